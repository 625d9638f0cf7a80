import json
import random

import jsonschema
import pytest

from qmrel import relations as rel
from qmrel.errors import UsageError
from qmrel.groebner import divide
from qmrel.polyring import canonical_text, parse_poly, substitute
from qmrel.relations import z_matrix
from qmrel.symmat import SymMatrix, generic_block_lower, generic_Y, mat_mul


def _numeric(vt, point):
    return SymMatrix(vt, [[point[f"X{i}{j}"] for j in range(1, 5)] for i in range(1, 5)])


def test_z_matrix_identity_and_scalar(rvt):
    I = SymMatrix.identity(rvt)
    alpha = generic_block_lower(rvt)
    assert z_matrix(alpha, I) == alpha
    # adj(Y) (cI) Y = c det(Y) I
    c = rvt.var("c11")
    Z = z_matrix(I * c)
    assert Z[0, 1] == 0
    assert Z[0, 0] == Z[3, 3]


def test_rqmarch_regression_at_identity(rvt):
    R = rel.build_rqmarch(rvt, Y=SymMatrix.identity(rvt))
    assert canonical_text(R.poly) == "a12*a21 + c12*c21 - t1"


def test_rqmarch_shape(rvt):
    R = rel.build_rqmarch(rvt)
    assert len(R.poly) == 7329
    assert R.x_degree() == 8
    assert R.params_used == frozenset(rel.ALPHA_PARAMS + ("t1",))
    assert rel.build_rqmord0(rvt).params_used <= frozenset(rel.ALPHA_PARAMS)


def test_expanded_and_matrix_evaluation_agree(rvt):
    rng = random.Random(11)
    R = rel.build_rqmarch(rvt).poly
    for _ in range(3):
        W = rel.random_symplectic_point(rng)
        vals = {n: rng.randint(-5, 5) for n in rel.ALPHA_PARAMS + ("t1",)}
        alpha = generic_block_lower(rvt).subs(vals)
        direct = rel.build_rqmarch(rvt, alpha=alpha, Y=_numeric(rvt, W)).poly.subs({"t1": vals["t1"]})
        assert substitute(R, {**W, **vals}) == direct


def test_forced_shapes_give_vanishing_relations(rvt):
    rng = random.Random(3)
    for _ in range(50):
        Y = _numeric(rvt, rel.random_symplectic_point(rng))
        av = {n: rng.randint(-9, 9) for n in rel.ALPHA_PARAMS}
        a_arch = generic_block_lower(rvt).subs(rel._assignment(rvt, rel.ARCH_FORCED))
        a_arch = a_arch.subs({"a22": rvt.var("a11")}).subs(av)
        assert rel.build_rqmarch(rvt, alpha=a_arch, Y=Y).poly.subs({"t1": 0}).is_zero()
        a_ord = generic_block_lower(rvt).subs(rel._assignment(rvt, rel.ord_forced())).subs(av)
        assert rel.build_rqmord0(rvt, alpha=a_ord, Y=Y).poly.is_zero()


def test_generic_relations_do_not_vanish_on_symplectic_points(rvt):
    rng = random.Random(4)
    Y = _numeric(rvt, rel.random_symplectic_point(rng))
    av = {n: rng.randint(1, 9) for n in rel.ALPHA_PARAMS}
    alpha = generic_block_lower(rvt).subs(av)
    assert not rel.build_rqmord0(rvt, alpha=alpha, Y=Y).poly.is_zero()


def test_scalar_assignment():
    s = rel.scalar_assignment(3)
    assert s["a11"] == s["c22"] == 3 and s["b12"] == 0 and s["a12"] == 0
    assert set(rel.scalar_assignment(1, capital=True)) == set(rel.BETA_PARAMS)


def test_solve_linear_relation(rvt):
    t1 = rvt.var("t1")
    assert rel.solve_linear_relation([2 * t1 - 1, 4 * t1 - 2], "t1") == parse_poly("1/2", rvt).constant_value()
    assert rel.solve_linear_relation([t1, t1 - 1], "t1") is None
    with pytest.raises(UsageError):
        rel.solve_linear_relation([t1 * t1], "t1")


@pytest.fixture(scope="module")
def arch1():
    return rel.arch_stage1()


def test_arch_stage1_verdicts(arch1):
    for c in ("b11", "b22", "a12", "a21", "c12", "c21", "a11 - c11", "a22 - c22"):
        assert arch1.claim(c).implied, c
    # Only the product is forced; the entries separately are not.
    assert not arch1.claim("b12").implied
    assert not arch1.claim("b21").implied
    assert "b12*b21: implied=True" in arch1.notes
    assert "scalar alpha plus b12 = 1 (t1 = 0) is a common zero of the coefficients: True" in arch1.notes
    assert len(arch1.coefficients) == 31
    assert not arch1.remainder_zero


def test_arch_stage2(gb_rel):
    rep = rel.arch_stage2(gb_rel)
    assert rep.passed
    assert rep.claim("a11 - a22").implied
    assert not rep.claim("a11 - a22").ideal_member
    assert rep.remainder_terms == 22
    assert rel.t1_relation(gb_rel) == 0


def test_ord_stage1(gb_rel):
    rep = rel.ord_stage1(gb_rel)
    assert rep.passed, rep.failures()
    assert not rep.claim("a11 - a22").implied
    assert rep.remainder_terms == 487


def test_ord_stage2(gb_rel):
    rep = rel.ord_stage2(gb_rel)
    assert rep.passed, rep.failures()
    assert rep.claims and all(c.implied and c.ideal_member for c in rep.claims)
    assert "remainder coefficients lie in the commutator ideal: True" in rep.notes


def test_supersingular_small(gb_rel):
    rep = rel.supersingular_transport(seed_count=2, seed=5, gb=gb_rel)
    assert rep.passed
    assert [s["seed"] for s in rep.samples] == [5, 6]
    assert all(s["verdicts"]["membership_preserved"] for s in rep.samples)


def test_supersingular_generic_certificate_agrees(gb_rel):
    fast = rel.supersingular_transport(seed_count=1, seed=0, gb=gb_rel)
    slow = rel.supersingular_transport(seed_count=1, seed=0, gb=gb_rel, generic=True)
    key = "rqmarch_transport_in_ideal"
    assert fast.samples[0]["verdicts"][key] == slow.samples[0]["verdicts"][key] is False
    assert slow.samples[0]["verdicts"]["certificate"] == "generic remainder"


def test_delta_and_shapes():
    assert rel.delta_identity_check().passed
    rep = rel.shapes_check()
    assert rep.passed
    assert len(rep.checks) == 6


def test_trivial(gb_rel):
    rep = rel.trivial_relation_check(gb_rel)
    assert rep.passed, rep.failures()


def test_report_json_schema(gb_rel):
    rep = rel.arch_stage2(gb_rel)
    d = json.loads(rep.to_json())
    for key in ("stage", "claims", "coefficients", "remainder_terms", "remainder_zero",
                "assumptions", "samples", "seconds", "passed"):
        assert key in d
    assert d["claims"][0]["constraint"] == "a11 - a22"
    assert rel.PRIMALITY_ASSUMPTION in d["assumptions"]
    assert "[arch2] PASS" in rep.summary()


def test_verdicts_independent_of_order(rvt, gb_rel):
    lex = rel.default_basis(rvt, "lex")
    R = substitute(rel.build_rqmarch(rvt).poly, rel._assignment(rvt, rel.ARCH_FORCED))
    # Remainders differ between orders, membership does not.
    assert divide(R, lex).remainder.is_zero() == divide(R, gb_rel).remainder.is_zero() is False
    a_eq = substitute(R, {"a22": rvt.var("a11"), "t1": 0})
    assert divide(a_eq, lex).remainder.is_zero() and divide(a_eq, gb_rel).remainder.is_zero()


def test_resolve_basis_rejects_foreign_table(gb_x):
    with pytest.raises(UsageError):
        rel.arch_stage2(gb_x)


def test_constrained_pair_shape(rvt):
    a, b = rel.constrained_pair(rvt)
    assert a.entry(3, 2) == -rvt.var("b21") and a.entry(3, 1) == 0
    assert b.entry(1, 2) == rvt.var("C21")
    assert mat_mul(a, b) != mat_mul(b, a)
    assert generic_Y(rvt).entry(2, 3) == rvt.var("X23")


def test_reports_validate_against_schema(gb_rel):
    for rep in (rel.arch_stage2(gb_rel), rel.shapes_check(),
                rel.supersingular_transport(seed_count=1, gb=gb_rel)):
        jsonschema.validate(json.loads(rep.to_json()), rel.REPORT_SCHEMA)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"stage": "x"}, rel.REPORT_SCHEMA)
