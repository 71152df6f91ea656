from __future__ import annotations

from fractions import Fraction

import pytest

from fctp.errors import ModelFormatError, NameTooLong, ParseError
from fctp.formulations import Model, Variable, build_ip, build_ip_z, build_qdp, build_qsn
from fctp.generators import GenConfig, gen_bipartite, gen_tree
from fctp.lpformat import dumps_lp, dumps_mps, loads_lp, read_model_lp, scale_row, write_model_lp
from fctp.model import new_instance, root_tree


def _models():
    inst = gen_tree(6, 3, seed=2)
    rt = root_tree(inst)
    return [build_ip(inst), build_ip_z(inst), build_qdp(rt), build_qsn(rt), build_qsn(rt, with_z=True)]


@pytest.mark.parametrize("model", _models(), ids=lambda m: m.name)
def test_lp_round_trip(model):
    text = dumps_lp(model)
    back = loads_lp(text)
    assert back == model
    assert dumps_lp(back) == text
    assert back.metadata["fingerprint"] == model.metadata["fingerprint"]


def test_lp_file_round_trip(tmp_path):
    model = build_ip_z(gen_bipartite(GenConfig(3, 6, Fraction(1), seed=4)))
    path = tmp_path / "m.lp"
    write_model_lp(model, path)
    assert read_model_lp(path) == model


def test_single_arc_lp_text():
    text = dumps_lp(build_ip(new_instance([2, 3], [(1, 2)], [-2], [1])))
    body = text.split("Minimize\n", 1)[1]
    assert body == (
        " obj: - 2 x_1_2 + y_1_2\n"
        "Subject To\n"
        " cap_1: x_1_2 <= 2\n"
        " cap_2: x_1_2 <= 3\n"
        " link_1_2: x_1_2 - 2 y_1_2 <= 0\n"
        "Bounds\n"
        " 0 <= x_1_2 <= 2\n"
        " 0 <= y_1_2 <= 1\n"
        "Binaries\n"
        "y_1_2\n"
        "End\n"
    )


def test_decimal_and_scaled_coefficients():
    model = build_ip(new_instance([3, 3], [(1, 2)], ["3/8"], ["1/3"]))
    text = dumps_lp(model)
    assert "\\ objective scaled by 24" in text
    assert " obj: 9 x_1_2 + 8 y_1_2" in text
    back = loads_lp(text)
    assert back.objective == model.objective and dumps_lp(back) == text


def test_scale_row():
    coeffs, rhs, factor = scale_row([("a", Fraction(1, 3)), ("b", Fraction(1, 2))], Fraction(1))
    assert factor == 6 and coeffs == [("a", 2), ("b", 3)] and rhs == 6
    assert scale_row([("a", Fraction(1, 4))], Fraction(1))[2] == 1
    coeffs, rhs, factor = scale_row([("a", Fraction(1, 3)), ("b", Fraction(1, 6))], Fraction(1, 2))
    assert coeffs == [("a", 2), ("b", 1)] and rhs == 3 and factor == 6


def test_long_lines_wrap():
    inst = new_instance([9] + [1] * 30, [(1, j) for j in range(2, 32)], [-1] * 30, [1] * 30)
    text = dumps_lp(build_ip(inst))
    assert max(len(line) for line in text.splitlines()) <= 78
    assert loads_lp(text) == build_ip(inst)


def test_name_checks():
    long = Model("m", (Variable("x" * 300),), (), ())
    with pytest.raises(NameTooLong):
        dumps_lp(long)
    with pytest.raises(ModelFormatError):
        dumps_mps(Model("m", (Variable("bad name"),), (), ()))


def test_parse_errors():
    with pytest.raises(ParseError):
        loads_lp("x + y <= 1\n")
    with pytest.raises(ParseError):
        loads_lp("Minimize\n obj: x\nSubject To\n c1: x + y <=\nEnd\n")
    with pytest.raises(ParseError):
        loads_lp("Minimize\n obj: x\nSubject To\n x + y <= 1\nEnd\n")


def test_mps_structure():
    model = build_ip_z(new_instance([2, 3], [(1, 2)], [-2], [1]))
    text = dumps_mps(model)
    lines = text.splitlines()
    assert lines[0] == "NAME ipz" and lines[-1] == "ENDATA"
    assert " MARKER0 'MARKER' 'INTORG'" in lines
    assert " BV BND y_1_2" in lines and " UP BND x_1_2 2" in lines
    assert " RHS zsum_1_2 1" in lines
    assert dumps_mps(model) == text
