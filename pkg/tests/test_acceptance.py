"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line; the terminal summary
repeats the verdicts.  Run with ``pytest tests/test_acceptance.py -s`` to see
the per-criterion detail inline.
"""

import itertools
import random
import time
from fractions import Fraction

import pytest

from qmrel import quatalg as qa
from qmrel import relations as rel
from qmrel.groebner import divide, sp4_basis, sp4_generators
from qmrel.polyring import Polynomial, VarTable
from qmrel.symmat import X_NAMES

pytestmark = [pytest.mark.criterion, pytest.mark.slow]


def verdict(n, ok, detail=""):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else ""))
    return ok


def _s_polynomial(f, g, order):
    mf, cf = f.leading_term(order)
    mg, cg = g.leading_term(order)
    L = tuple(map(max, mf, mg))
    uf = Polynomial(f.vt, {tuple(a - b for a, b in zip(L, mf)): Fraction(1) / cf})
    ug = Polynomial(g.vt, {tuple(a - b for a, b in zip(L, mg)): Fraction(1) / cg})
    return uf * f - ug * g


def _probes(vt, gens, rng, count=50):
    """Half built inside the ideal, half shifted out of it by a random monomial."""
    out = []
    for k in range(count):
        f = vt.zero
        for g in gens:
            m = tuple(rng.randint(0, 1) if rng.random() < 0.3 else 0 for _ in range(vt.nvars))
            f = f + Polynomial(vt, {m: rng.randint(-3, 3)}) * g
        if k % 2:
            m = tuple(rng.randint(0, 1) for _ in range(vt.nvars))
            f = f + Polynomial(vt, {m: rng.randint(1, 5)})
        out.append(f)
    return out


def test_criterion_1_groebner_basis():
    vt = VarTable(X_NAMES)
    t = time.perf_counter()
    gb = sp4_basis(vt, "degrevlex")
    secs = time.perf_counter() - t
    gens = sp4_generators(vt)
    gens_ok = all(divide(f, gb).is_member for f in gens)
    spolys_ok = all(
        divide(_s_polynomial(f, g, gb.order), gb).is_member
        for f, g in itertools.combinations(gb.basis, 2)
    )
    lex = sp4_basis(vt, "lex")
    probes = _probes(vt, gens, random.Random(2024))
    grevlex_verdicts = [gb.contains(p) for p in probes]
    lex_verdicts = [lex.contains(p) for p in probes]
    agree = grevlex_verdicts == lex_verdicts
    members = sum(grevlex_verdicts)
    ok = verdict(1, secs < 300 and gens_ok and spolys_ok and agree and gb.check_reduced() == [],
                 f"{len(gb)} elements in {secs:.2f}s; {members}/50 probes are members in both orders")
    assert ok


def test_criterion_2_archimedean_stage1():
    rep = rel.arch_stage1()
    ten = [rep.claim(c) for c in rel.ARCH_STAGE1_CLAIMS]
    missing = [c.constraint for c in ten if not c.implied]
    ok = verdict(2, not missing and rep.seconds < 120,
                 f"{rep.seconds:.1f}s; not implied: {missing or 'none'}")
    assert ok, f"constraints not implied by the coefficient ideal: {missing}"


def test_criterion_3_archimedean_stage2(gb_rel):
    rep = rel.arch_stage2(gb_rel)
    ok = verdict(3, not rep.remainder_zero and rep.claim("a11 - a22").implied
                 and rep.check("remainder zero after a22 -> a11 and t1 relation").ok,
                 f"remainder {rep.remainder_terms} terms; t1 = {rel.t1_relation(gb_rel)}")
    assert ok, rep.failures()


def test_criterion_4_ordinary_stage1(gb_rel):
    rep = rel.ord_stage1(gb_rel)
    forced = [rep.claim(c) for c in rel.ORD_STAGE1_CLAIMS]
    ok = verdict(4, all(c.implied for c in forced),
                 f"{sum(c.implied for c in forced)}/{len(forced)} implied")
    assert ok, rep.failures()


def test_criterion_5_ordinary_stage2(gb_rel):
    rep = rel.ord_stage2(gb_rel)
    entries_ok = bool(rep.claims) and all(c.ideal_member for c in rep.claims)
    ok = verdict(5, entries_ok
                 and rep.check("anticommuting pair gives nonzero remainder").ok
                 and rep.check("explicit pair anticommutes").ok
                 and rep.check("beta = alpha gives remainder 0").ok,
                 f"{len(rep.claims)} commutator entries in the ideal")
    assert ok, rep.failures()


def test_criterion_6_supersingular_transport(gb_rel):
    rep = rel.supersingular_transport(seed_count=20, seed=0, gb=gb_rel)
    v = [s["verdicts"] for s in rep.samples]
    ok = verdict(6, len(v) == 20 and all(x["generators_in_ideal"] and not x["rqmarch_transport_in_ideal"]
                                         for x in v),
                 f"20 seeds in {rep.seconds:.1f}s")
    assert ok, rep.failures()


def test_criterion_7_shape_identities():
    rep = rel.shapes_check()
    delta = [c for c in rep.checks if "d0^4" in c.name]
    ok = verdict(7, rep.passed and len(delta) == 3 and rep.seconds < 30, f"{rep.seconds:.2f}s")
    assert ok, rep.failures()


def test_criterion_8_quaternion_module():
    q_ok = (qa.find_q(6), qa.find_q(10), qa.find_q(15)) == (5, 13, 53)
    grid, cases = 0, set()
    grid_ok = True
    for q, delta in ((5, 6), (13, 10), (53, 15)):
        for lam, coords, r in qa.mu_sweep(q, delta, 2):
            grid += 1
            if isinstance(r, Exception):
                grid_ok = False
            else:
                cases.add(r.case)
    grid_ok = grid_ok and len(cases) == 6

    rng = random.Random(8)
    pairs = [(5, 6), (13, 10), (53, 15)]
    nrd_ok = True
    for _ in range(1000):
        A = qa.QuatAlgebra(*rng.choice(pairs))
        x = A.element(*(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(4)))
        y = A.element(*(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(4)))
        nrd_ok &= qa.nrd(x * y) == qa.nrd(x) * qa.nrd(y)
    inv_ok, tried = True, 0
    while tried < 1000:
        A = qa.QuatAlgebra(*rng.choice(pairs))
        alpha = A.element(0, *(rng.randint(-9, 9) for _ in range(3)))
        if alpha.is_zero() or (alpha * alpha).t >= 0:
            continue
        tried += 1
        x = A.element(*(Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(4)))
        inv_ok &= qa.rosati(qa.rosati(x, alpha), alpha) == x

    # Wider sweep, reported but not gating: see the parity discussion in the README.
    wide = sum(isinstance(r, Exception) for _, _, r in qa.mu_sweep(53, 15, 3))
    print(f"  info: alpha in [-3, 3]^4 for (q, delta) = (53, 15): {wide} construction failures")
    ok = verdict(8, q_ok and grid_ok and nrd_ok and inv_ok,
                 f"{grid} grid points over {len(cases)} cases")
    assert ok


def test_criterion_9_trivial_relations(gb_rel):
    rep = rel.trivial_relation_check(gb_rel)
    ok = verdict(9, rep.passed)
    assert ok, rep.failures()
