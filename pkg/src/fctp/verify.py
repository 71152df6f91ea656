"""Seeded cross-checking suites run by ``fctp verify``.

Each suite returns a :class:`SuiteResult`; trials are independent, so the
verdict does not depend on evaluation order.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .formulations import (
    build_ip,
    build_ip_z,
    build_qdp,
    build_qsn,
    check_point,
    objective_value,
    solution_assignment,
    unary_assignment,
)
from .generators import (
    ThreePartitionInput,
    check_3partition,
    gen_tree,
    make_rng,
    reduce_3partition,
)
from .liftings import combine, encode_f, lift_z, pi_map, project, random_integer_flow, sample_p_point
from .model import Instance, bipartite_instance, root_tree
from .oracle import brute_force_solve, optimal_solutions
from .tree_dp import encode_uv, solve_tree

# (numbers, b): every entry strictly between b/4 and b/2; n = 1 inputs are
# trivially yes, the last four n = 2 inputs are no-instances.
THREE_PARTITION_CORPUS: tuple[tuple[tuple[int, ...], int], ...] = (
    ((2, 2, 2), 6),
    ((2, 2, 3), 7),
    ((3, 3, 4), 10),
    ((4, 4, 5), 13),
    ((4, 5, 6), 15),
    ((5, 5, 5), 15),
    ((5, 6, 7), 18),
    ((6, 7, 8), 21),
    ((2, 2, 2, 2, 3, 3), 7),
    ((3, 3, 3, 3, 3, 3), 9),
    ((3, 3, 3, 3, 4, 4), 10),
    ((3, 3, 4, 4, 4, 4), 11),
    ((3, 3, 3, 4, 4, 5), 11),
    ((4, 4, 4, 4, 5, 5), 13),
    ((4, 4, 5, 5, 6, 6), 15),
    ((5, 5, 6, 6, 7, 7), 18),
    ((4, 4, 4, 4, 4, 6), 13),
    ((4, 4, 4, 6, 6, 6), 15),
    ((5, 5, 5, 5, 5, 7), 16),
    ((5, 5, 5, 5, 6, 8), 17),
)

REDUCTION_LIMIT = 10**15


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.trials - len(self.failures)}/{self.trials} trials ok ({self.elapsed:.2f}s)"


def random_trees(trials: int, seed: int, max_nodes: int = 8, b_max: int = 5) -> list[Instance]:
    """``trials`` trees with 1..max_nodes nodes, each drawn from its own derived seed."""
    rng = make_rng(seed)
    sizes = rng.integers(1, max_nodes, size=trials, endpoint=True)
    seeds = rng.integers(0, 2**63 - 1, size=trials)
    return [gen_tree(int(n), b_max, int(s)) for n, s in zip(sizes, seeds)]


def small_bipartite(count: int, seed: int) -> list[Instance]:
    """Small complete bipartite instances (1-3 per side, capacities up to 4)."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        c = [rng.randint(0, 4) for _ in range(n)]
        d = [rng.randint(0, 4) for _ in range(m)]
        p = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(n)]
        q = [[rng.randint(0, 5) for _ in range(m)] for _ in range(n)]
        out.append(bipartite_instance(c, d, p, q))
    return out


def alpha_cells_expected(rt) -> int:
    inst = rt.instance
    return sum(len(rt.children[i]) * (inst.cap(i) + 1) for i in rt.order)


def beta_cells_expected(rt) -> int:
    return sum(a + 1 for a in rt.instance.a)


def _timed(fn):
    def wrapper(*args, **kwargs) -> SuiteResult:
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.elapsed = time.perf_counter() - start
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def suite_dp_oracle(trials: int = 200, seed: int = 1) -> SuiteResult:
    """Tree DP value equals the exhaustive optimum; table sizes match their closed forms."""
    res = SuiteResult("dp-oracle")
    for t, inst in enumerate(random_trees(trials, seed)):
        res.trials += 1
        rt = root_tree(inst)
        tables, sol = solve_tree(rt)
        ref = brute_force_solve(inst)
        if sol.objective != ref.objective:
            res.failures.append(f"trial {t}: dp {sol.objective} != oracle {ref.objective}")
        elif tables.alpha_cell_count() != alpha_cells_expected(rt):
            res.failures.append(f"trial {t}: alpha cell count {tables.alpha_cell_count()}")
        elif tables.beta_cell_count() != beta_cells_expected(rt):
            res.failures.append(f"trial {t}: beta cell count {tables.beta_cell_count()}")
    return res


@_timed
def suite_certificates(trials: int = 200, seed: int = 1) -> SuiteResult:
    """The dual encoding of the DP optimum is feasible for the dual model at the same value."""
    res = SuiteResult("certificates")
    for t, inst in enumerate(random_trees(trials, seed)):
        res.trials += 1
        rt = root_tree(inst)
        tables, sol = solve_tree(rt)
        cert = encode_uv(rt, sol.x)
        model = build_qdp(rt)
        pt = cert.assignment()
        bad = check_point(model, pt)
        value = objective_value(model, pt)
        if bad:
            res.failures.append(f"trial {t}: {bad[0]}")
        elif value != tables.root_value or cert.objective != tables.root_value:
            res.failures.append(f"trial {t}: certificate value {value} != {tables.root_value}")
    return res


@_timed
def suite_lift_z(trials: int = 20, seed: int = 1, points: int = 100) -> SuiteResult:
    """Fractional points of the relaxation lift into the unary model and project back."""
    res = SuiteResult("lift-z")
    half = trials // 2
    instances = random_trees(trials - half, seed) + small_bipartite(half, seed)
    rng = random.Random(seed)
    for t, inst in enumerate(instances):
        model = build_ip_z(inst)
        for _ in range(points):
            res.trials += 1
            x, y = sample_p_point(inst, rng)
            lifted = lift_z(inst, x, y)
            bad = check_point(model, lifted.values)
            z_ok = all(0 <= v <= 1 for n, v in lifted.values.items() if n.startswith("z_"))
            if bad or not z_ok:
                res.failures.append(f"instance {t}: {bad[0] if bad else 'z out of [0, 1]'}")
            elif project(lifted) != (tuple(x), tuple(y)):
                res.failures.append(f"instance {t}: projection does not return the input")
    return res


def _indicator(x) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(v > 0)) for v in x)


@_timed
def suite_pi_chain(trials: int = 20, seed: int = 1, flows: int = 50, midpoints: int = 20) -> SuiteResult:
    """Assignment encodings of integer flows are feasible and map into the DP dual."""
    res = SuiteResult("pi-chain")
    rng = random.Random(seed)
    for t, inst in enumerate(random_trees(trials, seed)):
        rt = root_tree(inst)
        qsn, qsnz, qdp = build_qsn(rt), build_qsn(rt, with_z=True), build_qdp(rt)
        encoded = []
        for _ in range(flows):
            res.trials += 1
            x = random_integer_flow(inst, rng)
            f = encode_f(rt, x)
            fz = encode_f(rt, x, with_z=True)
            uv = pi_map(rt, f, qsn)
            want = (tuple(Fraction(v) for v in x), _indicator(x))
            problems = check_point(qsn, f.values) + check_point(qsnz, fz.values) + check_point(qdp, uv.values)
            if problems:
                res.failures.append(f"tree {t}: {problems[0]}")
            elif project(f) != want or project(uv) != want:
                res.failures.append(f"tree {t}: projections disagree for x={x}")
            encoded.append((f, uv))
        for _ in range(midpoints):
            res.trials += 1
            (f1, g1), (f2, g2) = rng.choice(encoded), rng.choice(encoded)
            lam = Fraction(rng.randint(0, 8), 8)
            mixed = combine(lam, f1, f2)
            if pi_map(rt, mixed, qsn).values != combine(lam, g1, g2).values:
                res.failures.append(f"tree {t}: map is not linear at lambda={lam}")
    return res


@_timed
def suite_reduction(trials: int | None = None, seed: int = 1) -> SuiteResult:
    """3-Partition answers match the reduced instance's optimum; optima saturate suppliers."""
    res = SuiteResult("reduction")
    corpus = THREE_PARTITION_CORPUS if trials is None else THREE_PARTITION_CORPUS[:trials]
    for numbers, b in corpus:
        res.trials += 1
        inp = ThreePartitionInput(numbers, b)
        inst = reduce_3partition(inp)
        answer = check_3partition(inp)
        optima = list(optimal_solutions(inst, limit=REDUCTION_LIMIT))
        hit = optima[0].objective == inp.yes_value
        m = len(numbers)
        saturated = all(
            sum(sol.x[i * m:(i + 1) * m]) == b for sol in optima for i in range(inp.n)
        )
        if answer != hit:
            res.failures.append(f"{numbers}/{b}: partition={answer} but optimum {optima[0].objective}")
        elif not saturated:
            res.failures.append(f"{numbers}/{b}: an optimal solution leaves a supplier unsaturated")
    return res


@_timed
def suite_formulations(trials: int = 20, seed: int = 1) -> SuiteResult:
    """Exhaustive optima are feasible in both the standard and the unary model."""
    res = SuiteResult("formulations")
    for t, inst in enumerate(random_trees(trials, seed) + small_bipartite(trials, seed)):
        res.trials += 1
        sol = brute_force_solve(inst)
        pt = solution_assignment(inst, sol.x, sol.y)
        ip, ipz = build_ip(inst), build_ip_z(inst)
        ptz = {**pt, **unary_assignment(inst, sol.x)}
        bad = check_point(ip, pt, integral=True) + check_point(ipz, ptz, integral=True)
        if bad:
            res.failures.append(f"instance {t}: {bad[0]}")
        elif not objective_value(ip, pt) == objective_value(ipz, ptz) == sol.objective:
            res.failures.append(f"instance {t}: objective mismatch")
    return res


SUITES = {
    "dp-oracle": suite_dp_oracle,
    "certificates": suite_certificates,
    "lift-z": suite_lift_z,
    "pi-chain": suite_pi_chain,
    "reduction": suite_reduction,
    "formulations": suite_formulations,
}
