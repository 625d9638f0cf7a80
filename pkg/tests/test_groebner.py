import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qmrel.errors import BudgetExceeded, CacheError, UnsupportedDomainError, UsageError
from qmrel.groebner import (
    STRATEGIES,
    Budget,
    ConstraintChecker,
    buchberger,
    divide,
    implied_by,
    load_basis,
    member,
    save_basis,
    sp4_basis,
    sp4_generators,
)
from qmrel.polyring import Polynomial, VarTable, parse_poly
from qmrel.symmat import X_NAMES, random_rational_symplectic, symplectic_family, symplectic_substitution

SP4_BASIS_SIZE = 16  # regression value from the first verified run


def at_identity(f):
    return f.evaluate({n: int(n[1] == n[2]) for n in X_NAMES})


def from_sympy(expr, gens, vt):
    p = sympy.Poly(expr, *gens)
    terms = {}
    for mon, c in p.terms():
        e = [0] * vt.nvars
        for g, k in zip(gens, mon):
            e[vt.index_of(str(g))] = k
        terms[tuple(e)] = Fraction(int(c.p), int(c.q))
    return Polynomial(vt, terms)


def monic(f):
    # sympy returns primitive integer polynomials; compare up to scaling.
    return f / f.leading_term("lex")[1]


def to_sympy(f, gens):
    sym = dict(zip(f.vt.names, gens))
    return sympy.sympify(str(f).replace("^", "**"), locals=sym)


# -- generators ---------------------------------------------------------------------


def test_generators_vanish_at_identity(xvt):
    for f in sp4_generators(xvt):
        assert at_identity(f) == 0


def test_generator_f1_f2_text(xvt):
    f1, f2, *_ = sp4_generators(xvt)
    assert f1 == parse_poly("-X31*X12 - X41*X22 + X11*X32 + X21*X42", xvt)
    assert f2 == parse_poly("-X31*X13 - X41*X23 + X11*X33 + X21*X43 - 1", xvt)
    constants = [g.terms.get(xvt.unit, 0) for g in sp4_generators(xvt)]
    assert constants == [0, -1, 0, 0, -1, 0]


def test_generators_vanish_on_family(xvt):
    vt = xvt.extended(*"lmnpqr")
    S = symplectic_family(1, 2, 3, 4, 5, 6, vt=vt)
    for f in sp4_generators(vt):
        assert f.subs(symplectic_substitution(S)).is_zero()


def test_generators_need_matrix_vars():
    with pytest.raises(UsageError):
        sp4_generators(VarTable(("x",)))


# -- buchberger ---------------------------------------------------------------------


def test_small_lex_example():
    vt = VarTable(("x", "y"))
    x, y = vt.vars("x y")
    gb = buchberger([x**2 - 1, x * y - 1], "lex")
    assert gb.basis == [x - y, y**2 - 1]
    assert buchberger([x], "degrevlex").basis == [x]
    assert buchberger([x, x + 1]).basis == [vt.one]


def test_sp4_basis_size_and_invariants(gb_x, gb_x_lex):
    assert len(gb_x) == SP4_BASIS_SIZE
    assert gb_x.check_reduced() == []
    assert gb_x_lex.check_reduced() == []
    for g in gb_x.generators:
        assert member(g, gb_x)
        assert member(g, gb_x_lex)


@pytest.mark.parametrize("order", ["degrevlex", "lex"])
def test_strategy_independence(xvt, order):
    bases = [sp4_basis(xvt, order, strategy=s).basis for s in STRATEGIES]
    assert all(b == bases[0] for b in bases)


@pytest.mark.parametrize("order, sym_order", [("degrevlex", "grevlex"), ("lex", "lex")])
def test_sp4_matches_sympy(xvt, order, sym_order, gb_x, gb_x_lex):
    gens = sympy.symbols(X_NAMES)
    ours = gb_x if order == "degrevlex" else gb_x_lex
    theirs = sympy.groebner([to_sympy(f, gens) for f in sp4_generators(xvt)], *gens, order=sym_order)
    assert {monic(from_sympy(e, gens, xvt)) for e in theirs.exprs} == {monic(b) for b in ours.basis}


small_vt = VarTable(("x", "y", "z"))
small_gens = sympy.symbols("x y z")
small_monos = st.tuples(*[st.integers(0, 2)] * 3)


@st.composite
def small_poly(draw):
    terms = draw(st.dictionaries(small_monos, st.integers(-3, 3), min_size=1, max_size=3))
    p = Polynomial(small_vt, terms)
    return p if not p.is_zero() else small_vt.var("x")


@settings(max_examples=40, deadline=None)
@given(st.lists(small_poly(), min_size=1, max_size=3), st.sampled_from(["lex", "degrevlex"]))
def test_random_ideals_match_sympy(gens, order):
    ours = buchberger(gens, order, budget=Budget(max_steps=10**6))
    sym = sympy.groebner([to_sympy(g, small_gens) for g in gens], *small_gens,
                         order="grevlex" if order == "degrevlex" else "lex")
    assert {monic(from_sympy(e, small_gens, small_vt)) for e in sym.exprs} == {monic(b) for b in ours.basis}
    assert ours.check_reduced() == []


def test_block_order_eliminates():
    vt = VarTable(("t",), ("x", "y"))
    t, x, y = vt.vars("t x y")
    gb = buchberger([x - t**2, y - t**3], "block(1)", scope=vt.names)
    free = [b for b in gb.basis if "t" not in b.variables()]
    assert free == [x**3 - y**2] or free == [y**2 - x**3]


# -- division -----------------------------------------------------------------------


def test_divide_examples(xvt, gb_x):
    f1, f2, *_ = sp4_generators(xvt)
    assert divide(f2, gb_x).is_member
    r = divide(xvt.var("X11"), gb_x)
    assert not r.is_member and r.remainder == xvt.var("X11")
    f = parse_poly("1 - X11*X33 - X21*X43 + X13*X31 + X23*X41", xvt)
    assert f == -f2 and divide(f, gb_x).remainder.is_zero()


def test_member_of_combination():
    vt = VarTable(X_NAMES, ("t1",))
    gb = sp4_basis(vt)
    f1, _, f3, *_ = sp4_generators(vt)
    assert member(f1 * vt.var("X44") + f3 * vt.var("t1"), gb)
    assert not member(vt.var("X11"), gb)
    assert at_identity(vt.var("X11")) == 1


def test_remainder_is_normal_form(gb_x, xvt):
    rng = random.Random(3)
    X = xvt.vars(X_NAMES)
    lms = gb_x.leading_monomials()
    for _ in range(20):
        f = sum((rng.randint(-2, 2) * rng.choice(X) * rng.choice(X) * rng.choice(X) for _ in range(6)), xvt.zero)
        rem = divide(f, gb_x).remainder
        for m in rem.terms:
            assert not any(all(a <= b for a, b in zip(lm, m)) for lm in lms)


def test_quotients_reassemble(xvt, gb_x):
    rng = random.Random(5)
    vt = VarTable(X_NAMES, ("s",))
    gb = sp4_basis(vt)
    s = vt.var("s")
    Xp = vt.vars(X_NAMES)
    for _ in range(10):
        f = sum((rng.randint(-3, 3) * rng.choice(Xp) * rng.choice(Xp) * (s + rng.randint(0, 2))
                 for _ in range(5)), vt.zero)
        res = divide(f, gb, track_quotients=True)
        combo = sum((q * b for q, b in zip(res.quotients, gb.basis)), vt.zero)
        assert f - res.remainder == combo


def test_list_divisor_with_parameter_leading_coefficient():
    vt = VarTable(("x",), ("a",))
    x, a = vt.vars("x a")
    with pytest.raises(UnsupportedDomainError):
        divide(x**2, [a * x + 1], scope=["x"])
    assert divide(a * x**2 + x, [x - 1], scope=["x"]).remainder == a + 1


def test_buchberger_rejects_parameters():
    vt = VarTable(("x",), ("a",))
    x, a = vt.vars("x a")
    with pytest.raises(UnsupportedDomainError):
        buchberger([a * x - 1], scope=["x"])


def test_mismatched_basis_table(gb_x):
    with pytest.raises(UsageError):
        divide(VarTable(("x",)).var("x"), gb_x)


def _probes(vt, gens, rng, n):
    X = vt.vars(X_NAMES)
    members, others = [], []
    for _ in range(n):
        comb = vt.zero
        for g in gens:
            mult = rng.randint(-2, 2) + rng.randint(-1, 1) * rng.choice(X)
            comb = comb + mult * g
        members.append(comb)
        others.append(comb + rng.choice(X) * rng.choice(X) + rng.randint(1, 3))
    return members, others


def test_membership_order_independent(xvt, gb_x, gb_x_lex):
    rng = random.Random(11)
    members, others = _probes(xvt, sp4_generators(xvt), rng, 50)
    for f in members:
        assert member(f, gb_x) and member(f, gb_x_lex)
    for f in others:
        assert member(f, gb_x) == member(f, gb_x_lex)
    # the perturbed probes are non-members: each has a nonzero value somewhere on SP4
    pts = [random_rational_symplectic(rng, xvt) for _ in range(5)]
    for f in others:
        if not member(f, gb_x):
            continue
        for W in pts:
            assert f.evaluate({n: W[int(n[1]) - 1, int(n[2]) - 1].constant_value() for n in X_NAMES}) == 0


def test_members_vanish_on_random_symplectic_points(xvt, gb_x):
    rng = random.Random(17)
    members, _ = _probes(xvt, sp4_generators(xvt), rng, 10)
    points = [random_rational_symplectic(rng, xvt) for _ in range(100)]
    values = [{n: W[int(n[1]) - 1, int(n[2]) - 1].constant_value() for n in X_NAMES} for W in points]
    for f in members:
        assert member(f, gb_x)
        assert all(f.evaluate(v) == 0 for v in values)


# -- implied constraints ------------------------------------------------------------

PVT = VarTable((), ("a11", "a22", "c11", "b11", "b12", "t1"))


def P(text):
    return parse_poly(text, PVT)


def test_implied_by_examples():
    assert implied_by([P("b11"), P("b12")], P("b11 + 3*b12"))
    assert not implied_by([P("a11 - c11")], P("a11 - a22"))


def test_radical_mode():
    gens = [P("b11^2"), P("b11*b12")]
    assert not implied_by(gens, P("b11"))
    assert implied_by(gens, P("b11"), mode="radical")
    assert not implied_by(gens, P("b12"), mode="radical")
    assert implied_by([P("b11*b12")], P("b11*b12^3"), mode="radical")


def test_elimination_flag():
    gens = [P("a11 - t1"), P("a22 - t1")]
    assert implied_by(gens, P("a11 - a22"), eliminate=["t1"])
    assert not implied_by([P("a11 - t1")], P("a11"), eliminate=["t1"])


def test_checker_rejects_foreign_variables():
    with pytest.raises(UsageError):
        ConstraintChecker([P("a11")], param_vars=["a22"])
    chk = ConstraintChecker([P("a11")])
    with pytest.raises(UsageError):
        chk.implied(P("a22"))
    with pytest.raises(UsageError):
        chk.implied(P("a11"), mode="weird")


# -- cache --------------------------------------------------------------------------


def test_cache_round_trip(tmp_path, xvt, gb_x):
    path = tmp_path / "b.gb"
    save_basis(gb_x, path)
    back = load_basis(path, xvt)
    assert back.basis == gb_x.basis and back.order == gb_x.order
    bigger = VarTable(X_NAMES, ("a11",))
    assert len(load_basis(path, bigger)) == len(gb_x)


def test_cache_detects_tampering(tmp_path, gb_x, xvt):
    path = tmp_path / "b.gb"
    save_basis(gb_x, path)
    text = path.read_text()
    path.write_text(text.replace("X11", "X12", 1))
    with pytest.raises(CacheError, match="sha256"):
        load_basis(path, xvt)


def test_cache_detects_invariant_failure(tmp_path, gb_x, xvt):
    import hashlib

    path = tmp_path / "b.gb"
    save_basis(gb_x, path)
    lines = path.read_text().splitlines()[:-1]
    # drop the last basis element and re-sign: the checksum passes, the invariants do not
    last_b = max(i for i, ln in enumerate(lines) if ln.startswith("b: "))
    text = "\n".join(lines[:last_b] + lines[last_b + 1:]) + "\n"
    path.write_text(text + f"sha256: {hashlib.sha256(text.encode()).hexdigest()}\n")
    with pytest.raises(CacheError, match="invariant"):
        load_basis(path, xvt)


def test_cache_version_and_table(tmp_path, gb_x):
    path = tmp_path / "b.gb"
    save_basis(gb_x, path)
    with pytest.raises(UsageError):
        load_basis(path, VarTable(("x", "y")))
    path.write_text(path.read_text().replace("GBCACHE v1", "GBCACHE v0"))
    with pytest.raises(CacheError, match="version"):
        load_basis(path, VarTable(X_NAMES))


# -- budget -------------------------------------------------------------------------


def test_budget_exceeded_reports_progress(xvt):
    with pytest.raises(BudgetExceeded) as ei:
        sp4_basis(xvt, budget=Budget(max_steps=5))
    assert ei.value.progress["steps"] > 5
    assert "basis_size" in ei.value.progress


def test_budget_env(monkeypatch):
    monkeypatch.setenv("QMREL_BUDGET", "123")
    assert Budget.from_env().max_steps == 123
    monkeypatch.setenv("QMREL_BUDGET", "lots")
    with pytest.raises(UsageError):
        Budget.from_env()
