"""Random instances and the 3-Partition reduction.

All randomness comes from numpy's PCG64 bit generator seeded with the
caller's 64-bit seed; bounded integers use ``Generator.integers`` (Lemire's
unbiased method). Draw order is part of the contract and must not change.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidThreePartition, TooLarge, UnreachableTarget, ValidationError
from .model import Instance, Variant, bipartite_instance, new_instance
from .rational import as_fraction, to_json_rational


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & 0xFFFF_FFFF_FFFF_FFFF))


def _uniform(rng: np.random.Generator, lo: int, hi: int, size: int) -> list[int]:
    return [int(v) for v in rng.integers(lo, hi, size=size, endpoint=True, dtype=np.int64)]


@dataclass(frozen=True)
class GenConfig:
    n: int
    B: int
    r: Fraction
    seed: int = 0
    cost_lo: int = 200
    cost_hi: int = 800
    variable_cost: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", as_fraction(self.r))
        object.__setattr__(self, "variable_cost", as_fraction(self.variable_cost))
        if self.n < 1:
            raise ValidationError("n must be at least 1")
        if self.B < 1:
            raise ValidationError("B must be at least 1")
        if not 0 < self.r <= 1:
            raise ValidationError("r must lie in (0, 1]")
        if not 0 <= self.cost_lo <= self.cost_hi:
            raise ValidationError("need 0 <= cost_lo <= cost_hi")

    def echo(self) -> dict:
        doc = asdict(self)
        doc["r"] = to_json_rational(self.r)
        doc["variable_cost"] = to_json_rational(self.variable_cost)
        return {"generator": "bipartite", **doc}


def _top_up(values: list[int], cap: int, done) -> None:
    """Cyclic passes in index order, adding one unit to each entry below ``cap`` until ``done()``."""
    while not done():
        changed = False
        for idx in range(len(values)):
            if done():
                return
            if values[idx] < cap:
                values[idx] += 1
                changed = True
        if not changed:
            raise UnreachableTarget("every entry is already at the cap")


def balance(c: list[int], d: list[int], B: int, r: Fraction) -> None:
    """Raise demands (or supplies) in place until ``sum(d) == ceil(r * sum(c))``."""
    def target() -> int:
        return math.ceil(r * sum(c))

    if sum(d) < target():
        _top_up(d, B, lambda: sum(d) == target())
    elif sum(d) > target():
        # each supply increment moves the target up by 0 or 1, so it lands exactly
        _top_up(c, B, lambda: sum(d) == target())


def gen_bipartite(cfg: GenConfig) -> Instance:
    """Random ``n x n`` instance with equality demand rows.

    Draw order: supplies, demands, then fixed costs row-major.
    """
    rng = make_rng(cfg.seed)
    c = _uniform(rng, 1, cfg.B, cfg.n)
    d = _uniform(rng, 1, cfg.B, cfg.n)
    balance(c, d, cfg.B, cfg.r)
    q = _uniform(rng, cfg.cost_lo, cfg.cost_hi, cfg.n * cfg.n)
    qm = [q[i * cfg.n:(i + 1) * cfg.n] for i in range(cfg.n)]
    customers = frozenset(range(cfg.n + 1, 2 * cfg.n + 1))
    return bipartite_instance(c, d, cfg.variable_cost, qm, Variant(customers))


def gen_tree(n: int, b_max: int, seed: int) -> Instance:
    """Random recursive tree: node ``v`` attaches to a uniform earlier node.

    Draw order: parents of ``2..n``, capacities, per-unit costs, fixed costs.
    """
    if n < 1 or b_max < 0:
        raise ValidationError("need n >= 1 and b_max >= 0")
    rng = make_rng(seed)
    parents = [int(rng.integers(1, v, endpoint=True)) for v in range(1, n)]
    b = _uniform(rng, 0, b_max, n)
    p = _uniform(rng, -3, 3, n - 1)
    q = _uniform(rng, 0, 5, n - 1)
    arcs = [(parents[v - 2], v) for v in range(2, n + 1)]
    return new_instance(b, arcs, p, q)


@dataclass(frozen=True)
class ThreePartitionInput:
    numbers: tuple[int, ...]
    b: int
    n: int = field(init=False)

    def __post_init__(self) -> None:
        nums = tuple(int(v) for v in self.numbers)
        object.__setattr__(self, "numbers", nums)
        if not nums or len(nums) % 3:
            raise InvalidThreePartition(f"need 3n numbers, got {len(nums)}")
        n = len(nums) // 3
        object.__setattr__(self, "n", n)
        if sum(nums) != n * self.b:
            raise InvalidThreePartition(f"numbers sum to {sum(nums)}, expected {n}*{self.b}")
        for v in nums:
            if not (4 * v > self.b and 2 * v < self.b):
                raise InvalidThreePartition(f"{v} is not strictly between {self.b}/4 and {self.b}/2")

    @property
    def yes_value(self) -> int:
        """Optimum of the reduced instance exactly when the answer is yes."""
        return -2 * self.n * self.b + 3 * self.n


def reduce_3partition(inp: ThreePartitionInput) -> Instance:
    """``n`` suppliers of capacity ``b``, one customer per number, ``p = -2``, ``q = 1``."""
    return bipartite_instance([inp.b] * inp.n, list(inp.numbers), -2, 1)


MAX_EXHAUSTIVE_N = 4


def check_3partition(inp: ThreePartitionInput) -> bool:
    """Exhaustively decide whether the numbers split into triples summing to ``b``."""
    if inp.n > MAX_EXHAUSTIVE_N:
        raise TooLarge(f"n = {inp.n} exceeds the exhaustive bound {MAX_EXHAUSTIVE_N}")
    return _split_triples(Counter(inp.numbers), inp.b)


def _split_triples(pool: Counter, b: int) -> bool:
    if not +pool:
        return True
    first = min(v for v, cnt in pool.items() if cnt)
    pool[first] -= 1
    try:
        for second in sorted(v for v, cnt in pool.items() if cnt and v >= first):
            third = b - first - second
            if third < second:
                break
            pool[second] -= 1
            if pool[third] > 0:
                pool[third] -= 1
                if _split_triples(pool, b):
                    pool[third] += 1
                    pool[second] += 1
                    return True
                pool[third] += 1
            pool[second] += 1
        return False
    finally:
        pool[first] += 1
