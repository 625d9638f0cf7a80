"""Division, Buchberger's algorithm and ideal-membership certificates.

Ring variables ("scope") are split from coefficient parameters.  Every basis
element must have a rational leading coefficient, so reduction of a
polynomial whose coefficients involve parameters only ever divides by
rationals.  Relative to the full variable table this is the block order
"scope variables beat parameters", with ``order`` used inside the scope.
"""

from __future__ import annotations

import hashlib
import heapq
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from operator import add, sub
from pathlib import Path
from typing import Iterable, Sequence

from .errors import BudgetExceeded, CacheError, UnsupportedDomainError, UsageError
from .polyring import (
    MonomialOrder,
    Polynomial,
    VarTable,
    _norm,
    canonical_text,
    parse_poly,
)

CACHE_HEADER = "GBCACHE v1"
BUDGET_ENV = "QMREL_BUDGET"


@dataclass
class Budget:
    """Resource caps. ``max_terms`` approximates 2 GiB at ~128 bytes per stored term."""

    max_steps: int = 10**7
    max_terms: int = 2**31 // 128

    @classmethod
    def from_env(cls) -> "Budget":
        b = cls()
        raw = os.environ.get(BUDGET_ENV)
        if raw:
            try:
                b.max_steps = int(raw)
            except ValueError:
                raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
        return b


class _Meter:
    __slots__ = ("budget", "steps", "context", "info")

    def __init__(self, budget: Budget | None, context: str):
        self.budget = budget or Budget.from_env()
        self.steps = 0
        self.context = context
        self.info = {}  # caller-maintained progress snapshot

    def tick(self, n=1, progress=None):
        self.steps += n
        if self.steps > self.budget.max_steps:
            raise BudgetExceeded(
                f"{self.context}: step budget of {self.budget.max_steps} exceeded",
                {"steps": self.steps, **self.info, **(progress or {})},
            )

    def terms(self, n, progress=None):
        if n > self.budget.max_terms:
            raise BudgetExceeded(
                f"{self.context}: term storage cap of {self.budget.max_terms} exceeded",
                {"terms": n, "steps": self.steps, **self.info, **(progress or {})},
            )


# -- scope handling ----------------------------------------------------------


def _scope_indices(vt: VarTable, scope) -> list:
    if scope is None:
        scope = vt.matrix_vars or vt.names
    idx = [vt.index_of(n) for n in scope]
    if len(set(idx)) != len(idx):
        raise UsageError("repeated variable in scope")
    return sorted(idx)


def _split(f: Polynomial, sidx, ridx) -> dict:
    """Group ``f`` as {scope monomial: {rest monomial: coeff}}."""
    out: dict = {}
    for m, c in f.terms.items():
        s = tuple([m[i] for i in sidx])
        r = tuple([m[i] for i in ridx])
        d = out.get(s)
        if d is None:
            out[s] = {r: c}
        else:
            d[r] = c
    return out


def _join(vt: VarTable, grouped: dict, sidx, ridx) -> Polynomial:
    n = vt.nvars
    terms = {}
    for s, d in grouped.items():
        for r, c in d.items():
            m = [0] * n
            for i, e in zip(sidx, s):
                m[i] = e
            for i, e in zip(ridx, r):
                m[i] = e
            terms[tuple(m)] = c
    return Polynomial(vt, terms, _trusted=True)


def _scope_only(f: Polynomial, sidx, ridx) -> dict:
    """{scope monomial: rational}; raises if any parameter occurs."""
    out = {}
    for m, c in f.terms.items():
        if any(m[i] for i in ridx):
            raise UnsupportedDomainError(
                "Groebner bases are computed over Q only; "
                f"{canonical_text(f)} involves variables outside the scope"
            )
        out[tuple([m[i] for i in sidx])] = c
    return out


def _embed(vt: VarTable, terms: dict, sidx) -> Polynomial:
    n = vt.nvars
    out = {}
    for s, c in terms.items():
        m = [0] * n
        for i, e in zip(sidx, s):
            m[i] = e
        out[tuple(m)] = c
    return Polynomial(vt, out, _trusted=True)


# -- reducers ----------------------------------------------------------------


class _Reducer:
    """A divisor prepared for fast reduction: leading monomial, its support, tail."""

    __slots__ = ("lm", "lc", "support", "tail", "param_tail")

    def __init__(self, grouped: dict, key):
        lm = max(grouped, key=key)
        lcd = grouped[lm]
        if len(lcd) != 1 or any(next(iter(lcd))):
            raise UnsupportedDomainError("leading coefficient involves parameters; cannot divide by it")
        self.lm = lm
        self.lc = next(iter(lcd.values()))
        self.support = tuple((i, e) for i, e in enumerate(lm) if e)
        tail = [(m, d) for m, d in grouped.items() if m != lm]
        self.param_tail = any(len(d) != 1 or any(next(iter(d))) for _, d in tail)
        # For rational tails keep plain coefficients.
        if self.param_tail:
            self.tail = tail
        else:
            self.tail = [(m, next(iter(d.values()))) for m, d in tail]

    def divides(self, m) -> bool:
        for i, e in self.support:
            if m[i] < e:
                return False
        return True


def _rational_reducers(polys: Sequence[dict], key) -> list:
    out = []
    for p in polys:
        out.append(_Reducer({m: {(): c} for m, c in p.items()}, key))
    return out


def _find(reducers, m):
    for g in reducers:
        if g.divides(m):
            return g
    return None


def _nf_rational(f: dict, reducers, order: MonomialOrder, meter: _Meter, full: bool = True) -> dict:
    """Normal form of a scope-only rational polynomial (dict form)."""
    f = dict(f)
    rkey = order.rkey
    heap = [(rkey(m), m) for m in f]
    heapq.heapify(heap)
    rem = {}
    steps = 0
    while heap:
        _, m = heapq.heappop(heap)
        c = f.pop(m, None)
        if c is None:
            continue
        g = _find(reducers, m)
        if g is None:
            if not full:
                rem[m] = c
                for mm, cc in f.items():
                    rem[mm] = cc
                return rem
            rem[m] = c
            continue
        steps += 1
        if steps & 1023 == 0:
            meter.tick(1024, {"pending_terms": len(f)})
        u = tuple(map(sub, m, g.lm))
        factor = -c / g.lc if g.lc != 1 else -c
        for t, ct in g.tail:
            mt = tuple(map(add, u, t))
            old = f.get(mt)
            if old is None:
                f[mt] = _norm(factor * ct)
                heapq.heappush(heap, (rkey(mt), mt))
            else:
                s = old + factor * ct
                if s:
                    f[mt] = _norm(s)
                else:
                    del f[mt]
    meter.tick(steps & 1023)
    return rem


def _addmul(dst: dict, src: dict, scalar):
    """dst += scalar * src for parameter-coefficient dicts; returns dst."""
    for r, c in src.items():
        s = dst.get(r, 0) + scalar * c
        if s:
            dst[r] = _norm(s)
        else:
            dst.pop(r, None)
    return dst


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ra, ca in a.items():
        for rb, cb in b.items():
            r = tuple(map(add, ra, rb))
            out[r] = out.get(r, 0) + ca * cb
    return {r: _norm(c) for r, c in out.items() if c}


def _nf_grouped(f: dict, reducers, order: MonomialOrder, meter: _Meter, quotients=None) -> dict:
    """Normal form where every coefficient is a parameter polynomial (dict)."""
    f = {m: dict(d) for m, d in f.items()}
    rkey = order.rkey
    heap = [(rkey(m), m) for m in f]
    heapq.heapify(heap)
    rem = {}
    steps = 0
    while heap:
        _, m = heapq.heappop(heap)
        cd = f.pop(m, None)
        if not cd:
            continue
        g = _find(reducers, m)
        if g is None:
            rem[m] = cd
            continue
        steps += 1
        if steps & 255 == 0:
            meter.tick(256, {"pending_terms": len(f)})
        u = tuple(map(sub, m, g.lm))
        inv = Fraction(-1) / g.lc if g.lc != 1 else -1
        if quotients is not None:
            q = quotients[id(g)].setdefault(u, {})
            _addmul(q, cd, -inv)
        if g.param_tail:
            for t, td in g.tail:
                mt = tuple(map(add, u, t))
                prod = _pmul(cd, td)
                old = f.get(mt)
                if old is None:
                    f[mt] = {r: _norm(c * inv) for r, c in prod.items()}
                    heapq.heappush(heap, (rkey(mt), mt))
                else:
                    _addmul(old, prod, inv)
        else:
            for t, ct in g.tail:
                mt = tuple(map(add, u, t))
                scale = inv * ct
                old = f.get(mt)
                if old is None:
                    f[mt] = {r: _norm(c * scale) for r, c in cd.items()}
                    heapq.heappush(heap, (rkey(mt), mt))
                else:
                    _addmul(old, cd, scale)
    meter.tick(steps & 255)
    return {m: d for m, d in rem.items() if d}


# -- public reduction API ----------------------------------------------------


@dataclass(frozen=True)
class ReductionResult:
    remainder: Polynomial
    is_member: bool
    quotients: tuple | None = None


@dataclass
class GroebnerBasis:
    """Reduced Groebner basis of ``generators`` over the variables in ``var_scope``."""

    vt: VarTable
    order: MonomialOrder
    generators: list
    basis: list
    var_scope: tuple
    _reducers: list | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.var_scope = tuple(self.var_scope)

    @property
    def scope_indices(self) -> list:
        return _scope_indices(self.vt, self.var_scope)

    def reducers(self) -> list:
        if self._reducers is None:
            sidx = self.scope_indices
            ridx = [i for i in range(self.vt.nvars) if i not in set(sidx)]
            self._reducers = [_Reducer(_split(b, sidx, ridx), self.order.key) for b in self.basis]
        return self._reducers

    def leading_monomials(self) -> list:
        return [r.lm for r in self.reducers()]

    def reduce(self, f: Polynomial, budget: Budget | None = None) -> ReductionResult:
        return divide(f, self, budget=budget)

    def contains(self, f: Polynomial, budget: Budget | None = None) -> bool:
        return member(f, self, budget=budget)

    def __len__(self):
        return len(self.basis)

    def same_basis(self, other: "GroebnerBasis") -> bool:
        return self.order == other.order and set(self.basis) == set(other.basis)

    def check_reduced(self, budget: Budget | None = None) -> list:
        """Return a list of violated reduced-basis invariants (empty when fine)."""
        problems = []
        sidx = self.scope_indices
        ridx = [i for i in range(self.vt.nvars) if i not in set(sidx)]
        key = self.order.key
        polys = []
        for b in self.basis:
            try:
                polys.append(_scope_only(b, sidx, ridx))
            except UnsupportedDomainError:
                problems.append(f"basis element {b} leaves the scope")
                return problems
        if any(not p for p in polys):
            problems.append("zero polynomial in basis")
            return problems
        lms = [max(p, key=key) for p in polys]
        for p, lm in zip(polys, lms):
            if p[lm] != 1:
                problems.append(f"leading coefficient {p[lm]} is not 1")
        for i, p in enumerate(polys):
            for j, lm in enumerate(lms):
                if i != j and any(_divides(lm, m) for m in p):
                    problems.append(f"element {i} has a monomial divisible by leading monomial of {j}")
                    break
        if problems:
            return problems
        meter = _Meter(budget, "check_reduced")
        reducers = _rational_reducers(polys, key)
        for i, j in combinations(range(len(polys)), 2):
            if _coprime(lms[i], lms[j]):
                continue
            s = _spoly(polys[i], lms[i], polys[j], lms[j])
            if _nf_rational(s, reducers, self.order, meter, full=False):
                problems.append(f"S-polynomial of {i},{j} does not reduce to 0")
        return problems


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(map(max, a, b))


def _spoly(f: dict, lf, g: dict, lg) -> dict:
    L = _lcm(lf, lg)
    uf = tuple(map(sub, L, lf))
    ug = tuple(map(sub, L, lg))
    cf, cg = f[lf], g[lg]
    out: dict = {}
    for m, c in f.items():
        mm = tuple(map(add, m, uf))
        out[mm] = out.get(mm, 0) + c * cg
    for m, c in g.items():
        mm = tuple(map(add, m, ug))
        out[mm] = out.get(mm, 0) - c * cf
    return {m: _norm(c) for m, c in out.items() if c}


def divide(
    f: Polynomial,
    basis,
    order: MonomialOrder | str | None = None,
    scope: Iterable[str] | None = None,
    budget: Budget | None = None,
    track_quotients: bool = False,
) -> ReductionResult:
    """Full multivariate division of ``f`` by ``basis``.

    ``basis`` is a :class:`GroebnerBasis` or a list of polynomials.  With a list,
    ``order`` (default degrevlex) orders monomials in the ``scope`` variables
    (default: the matrix variables, or every variable when there are none).
    Variables outside the scope are treated as coefficient parameters.
    The result is deterministic for a fixed basis list order.
    """
    vt = f.vt
    if isinstance(basis, GroebnerBasis):
        if basis.vt != vt:
            raise UsageError("polynomial and basis live over different variable tables")
        if order is not None and _as_order(order) != basis.order:
            raise UsageError("order differs from the basis order")
        order = basis.order
        sidx = basis.scope_indices
        reducers = basis.reducers()
        polys = basis.basis
    else:
        polys = list(basis)
        order = _as_order(order or "degrevlex")
        sidx = _scope_indices(vt, scope)
        ridx0 = [i for i in range(vt.nvars) if i not in set(sidx)]
        for p in polys:
            if p.vt != vt:
                raise UsageError("basis element lives over a different variable table")
            if p.is_zero():
                raise UsageError("zero polynomial in divisor list")
        reducers = [_Reducer(_split(p, sidx, ridx0), order.key) for p in polys]
    sset = set(sidx)
    ridx = [i for i in range(vt.nvars) if i not in sset]
    meter = _Meter(budget, "divide")
    grouped = _split(f, sidx, ridx)
    rational_input = all(len(d) == 1 and not any(next(iter(d))) for d in grouped.values())
    if rational_input and not track_quotients and not any(g.param_tail for g in reducers):
        # Skip the parameter bookkeeping; _embed leaves parameter exponents at 0.
        flat = {m: next(iter(d.values())) for m, d in grouped.items()}
        remainder = _embed(vt, _nf_rational(flat, reducers, order, meter), sidx)
        return ReductionResult(remainder, remainder.is_zero(), None)
    quot = None
    if track_quotients:
        quot = {id(g): {} for g in reducers}
    rem = _nf_grouped(grouped, reducers, order, meter, quot)
    remainder = _join(vt, rem, sidx, ridx)
    quotients = None
    if track_quotients:
        quotients = tuple(_join(vt, quot[id(g)], sidx, ridx) for g in reducers)
    return ReductionResult(remainder, remainder.is_zero(), quotients)


def _as_order(order) -> MonomialOrder:
    if isinstance(order, MonomialOrder):
        return order
    return MonomialOrder.from_name(order)


def member(f: Polynomial, gb: GroebnerBasis, budget: Budget | None = None) -> bool:
    """Ideal membership: ``f`` reduces to zero modulo the Groebner basis."""
    return divide(f, gb, budget=budget).is_member


# -- Buchberger ----------------------------------------------------------------

STRATEGIES = ("normal", "order", "fifo")


def buchberger(
    gens: Sequence[Polynomial],
    order: MonomialOrder | str = "degrevlex",
    scope: Iterable[str] | None = None,
    strategy: str = "normal",
    budget: Budget | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of ``gens`` (Buchberger with both criteria).

    ``strategy`` selects the next critical pair: ``normal`` takes the lowest
    total degree of the lcm, ties broken by lex comparison of the lcm;
    ``order`` takes the smallest lcm in the monomial order; ``fifo`` takes pairs
    in creation order.  The reduced basis does not depend on the strategy.
    """
    gens = list(gens)
    if not gens:
        raise UsageError("buchberger needs at least one generator")
    vt = gens[0].vt
    for g in gens:
        if g.vt != vt:
            raise UsageError("generators live over different variable tables")
    if strategy not in STRATEGIES:
        raise UsageError(f"unknown pair strategy {strategy!r}")
    order = _as_order(order)
    sidx = _scope_indices(vt, scope)
    ridx = [i for i in range(vt.nvars) if i not in set(sidx)]
    meter = _Meter(budget, "buchberger")
    basis_terms = _buchberger_core([_scope_only(g, sidx, ridx) for g in gens if g], order, strategy, meter)
    scope_names = tuple(vt.names[i] for i in sidx)
    basis = [_embed(vt, p, sidx) for p in basis_terms]
    return GroebnerBasis(vt, order, gens, basis, scope_names)


def _pair_key(strategy, key, lcm, serial):
    if strategy == "normal":
        return (sum(lcm), lcm, serial)
    if strategy == "order":
        return (key(lcm), serial)
    return (serial,)


def _buchberger_core(polys: list, order: MonomialOrder, strategy: str, meter: _Meter) -> list:
    key = order.key
    G: list = []  # list of dicts
    LM: list = []
    reducers: list = []
    pairs: dict = {}  # (i, j) -> sort key
    serial = 0

    def monic(p):
        lm = max(p, key=key)
        c = p[lm]
        if c != 1:
            inv = Fraction(1) / c
            p = {m: _norm(v * inv) for m, v in p.items()}
        return p, lm

    def add_poly(p):
        nonlocal serial
        p, lm = monic(p)
        t = len(G)
        G.append(p)
        LM.append(lm)
        reducers.append(_Reducer({m: {(): c} for m, c in p.items()}, key))
        for i in range(t):
            L = _lcm(LM[i], lm)
            pairs[(i, t)] = _pair_key(strategy, key, L, serial)
            serial += 1

    for p in polys:
        p = _nf_rational(p, reducers, order, meter)
        if p:
            if all(m == () or not any(m) for m in p):  # nonzero constant
                return [{tuple([0] * len(next(iter(p)))): 1}]
            add_poly(p)

    treated = set()
    while pairs:
        (i, j) = min(pairs, key=pairs.__getitem__)
        del pairs[(i, j)]
        treated.add((i, j))
        meter.info = {"basis_size": len(G), "pairs_left": len(pairs)}
        meter.tick(1)
        if _coprime(LM[i], LM[j]):
            continue
        L = _lcm(LM[i], LM[j])
        if _chain_criterion(i, j, L, LM, pairs):
            continue
        s = _spoly(G[i], LM[i], G[j], LM[j])
        h = _nf_rational(s, reducers, order, meter)
        if h:
            if not any(any(m) for m in h):
                return [{tuple([0] * len(LM[0])): 1}]
            meter.terms(sum(len(g) for g in G) + len(h), {"basis_size": len(G)})
            add_poly(h)
    return _interreduce(G, LM, order, meter)


def _chain_criterion(i, j, L, LM, pairs) -> bool:
    for k in range(len(LM)):
        if k == i or k == j:
            continue
        if not _divides(LM[k], L):
            continue
        if (min(i, k), max(i, k)) in pairs or (min(j, k), max(j, k)) in pairs:
            continue
        return True
    return False


def _interreduce(G, LM, order, meter) -> list:
    key = order.key
    n = len(G)
    keep = []
    for i in range(n):
        redundant = False
        for j in range(n):
            if i == j or not _divides(LM[j], LM[i]):
                continue
            # Break ties between equal leading monomials by index.
            if LM[j] != LM[i] or j < i:
                redundant = True
                break
        if not redundant:
            keep.append(i)
    minimal = [G[i] for i in keep]
    out = []
    for idx, p in enumerate(minimal):
        others = _rational_reducers([q for k, q in enumerate(minimal) if k != idx], key)
        r = _nf_rational(p, others, order, meter)
        lm = max(r, key=key)
        c = r[lm]
        if c != 1:
            inv = Fraction(1) / c
            r = {m: _norm(v * inv) for m, v in r.items()}
        out.append(r)
    out.sort(key=lambda p: key(max(p, key=key)), reverse=True)
    return out


# -- implied constraints ---------------------------------------------------------


def _subtable(vt: VarTable, names: Iterable[str], extra: Sequence[str] = ()) -> VarTable:
    names = set(names)
    ordered = tuple(n for n in vt.names if n in names)
    return VarTable((), ordered + tuple(extra), vt.exponent_cap)


def transfer(f: Polynomial, target: VarTable) -> Polynomial:
    """Re-express ``f`` over ``target``, which must contain every variable of ``f``."""
    src = f.vt
    pos = []
    for i, n in enumerate(src.names):
        pos.append(target.index.get(n))
    n = target.nvars
    terms = {}
    for m, c in f.terms.items():
        e = [0] * n
        for i, k in enumerate(m):
            if k:
                j = pos[i]
                if j is None:
                    raise UsageError(f"variable {src.names[i]!r} is missing from the target table")
                e[j] = k
        terms[tuple(e)] = c
    return Polynomial(target, terms, _trusted=True)


_RABINOWITSCH = "_rabinowitsch"


class ConstraintChecker:
    """Decides whether constraints are forced by a list of parameter polynomials.

    ``mode="ideal"``   constraint lies in the ideal generated by ``coeffs``.
    ``mode="radical"`` constraint vanishes wherever all ``coeffs`` vanish
                       (radical membership, via the Rabinowitsch trick).
    """

    def __init__(self, coeffs: Sequence[Polynomial], param_vars: Iterable[str] | None = None,
                 budget: Budget | None = None, eliminate: Sequence[str] = ()):
        coeffs = [c for c in coeffs if not c.is_zero()]
        if not coeffs:
            raise UsageError("no nonzero coefficients given")
        self.vt = coeffs[0].vt
        if param_vars is None:
            param_vars = set().union(*(c.variables() for c in coeffs))
        self.param_vars = set(param_vars)
        for c in coeffs:
            extra = c.variables() - self.param_vars
            if extra:
                raise UsageError(f"coefficient involves non-parameter variables {sorted(extra)}")
        self.budget = budget
        self.eliminate = tuple(eliminate)
        self.sub = _subtable(self.vt, self.param_vars | set(self.eliminate))
        self.coeffs = [transfer(c, self.sub) for c in coeffs]
        self._gb = None
        self._elim = None

    def basis(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = buchberger(self.coeffs, "degrevlex", scope=self.sub.names, budget=self.budget)
        return self._gb

    def _elimination_generators(self):
        if self._elim is None:
            elim = [n for n in self.sub.names if n in self.eliminate]
            rest = [n for n in self.sub.names if n not in self.eliminate]
            vt2 = VarTable(tuple(elim), tuple(rest), self.sub.exponent_cap)
            gb = buchberger([transfer(c, vt2) for c in self.coeffs], MonomialOrder.block(len(elim)),
                            scope=vt2.names, budget=self.budget)
            kept = [transfer(b, self.sub) for b in gb.basis if not (b.variables() & set(elim))]
            self._elim = kept
        return self._elim

    def implied(self, constraint: Polynomial, mode: str = "ideal") -> bool:
        if mode not in ("ideal", "radical"):
            raise UsageError(f"unknown mode {mode!r}")
        extra = constraint.variables() - self.param_vars
        if extra:
            raise UsageError(f"constraint involves non-parameter variables {sorted(extra)}")
        con = transfer(constraint, self.sub)
        if self.eliminate:
            gens = self._elimination_generators()
            if not gens:
                return con.is_zero()
            gb = buchberger(gens, "degrevlex", scope=self.sub.names, budget=self.budget)
        else:
            gb = self.basis()
        if member(con, gb, self.budget):
            return True
        if mode == "ideal":
            return False
        vt_r = self.sub.extended(_RABINOWITSCH)
        y = vt_r.var(_RABINOWITSCH)
        gens = [transfer(g, vt_r) for g in gb.basis] + [vt_r.one - y * transfer(con, vt_r)]
        gb_r = buchberger(gens, "degrevlex", scope=vt_r.names, budget=self.budget)
        return len(gb_r.basis) == 1 and gb_r.basis[0].is_constant()


def implied_by(coeffs: Sequence[Polynomial], constraint: Polynomial,
               param_vars: Iterable[str] | None = None, mode: str = "ideal",
               budget: Budget | None = None, eliminate: Sequence[str] = ()) -> bool:
    """True iff ``constraint`` is forced by ``coeffs`` (see :class:`ConstraintChecker`)."""
    if param_vars is None:
        param_vars = set(constraint.variables()).union(*(c.variables() for c in coeffs))
    return ConstraintChecker(coeffs, param_vars, budget, eliminate).implied(constraint, mode)


# -- I(SP4) ------------------------------------------------------------------------

MATRIX_VARS = tuple(f"X{i}{j}" for i in range(1, 5) for j in range(1, 5))


def sp4_generators(vt: VarTable) -> list:
    """The six upper-triangular entries of Y^T J Y - J, J = (0 I; -I 0), as f1..f6."""
    for n in MATRIX_VARS:
        vt.index_of(n)
    X = [[vt.var(f"X{i}{j}") for j in range(1, 5)] for i in range(1, 5)]
    J = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    gens = []
    for a, b in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]:
        # (Y^T J Y)_{ab} = Y1a Y3b + Y2a Y4b - Y3a Y1b - Y4a Y2b
        e = X[0][a] * X[2][b] + X[1][a] * X[3][b] - X[2][a] * X[0][b] - X[3][a] * X[1][b]
        gens.append(e - J[a][b])
    return gens


def sp4_basis(vt: VarTable, order="degrevlex", strategy="normal", budget=None) -> GroebnerBasis:
    return buchberger(sp4_generators(vt), order, scope=MATRIX_VARS, strategy=strategy, budget=budget)


# -- persistence ---------------------------------------------------------------------


def _cache_body(gb: GroebnerBasis) -> str:
    lines = [
        CACHE_HEADER,
        f"order: {gb.order.name}",
        f"vars: {','.join(gb.var_scope)}",
    ]
    lines += [f"gen: {canonical_text(g)}" for g in gb.generators]
    lines += [f"b: {canonical_text(b)}" for b in gb.basis]
    return "\n".join(lines) + "\n"


def save_basis(gb: GroebnerBasis, path) -> None:
    body = _cache_body(gb)
    digest = hashlib.sha256(body.encode()).hexdigest()
    Path(path).write_text(body + f"sha256: {digest}\n")


def load_basis(path, vt: VarTable, budget: Budget | None = None) -> GroebnerBasis:
    """Load and verify a basis cache; raises :class:`CacheError` on any defect."""
    try:
        raw = Path(path).read_text()
    except OSError as e:
        raise CacheError(f"cannot read {path}: {e}") from e
    lines = raw.split("\n")
    if not lines or lines[0] != CACHE_HEADER:
        raise CacheError(f"version mismatch: expected header {CACHE_HEADER!r}, got {lines[0]!r}")
    if len(lines) < 2 or lines[-1] != "" or not lines[-2].startswith("sha256: "):
        raise CacheError("corrupt cache: missing trailing sha256 line")
    body = "\n".join(lines[:-2]) + "\n"
    digest = lines[-2][len("sha256: "):]
    if hashlib.sha256(body.encode()).hexdigest() != digest:
        raise CacheError("corrupt cache: sha256 mismatch")
    header = lines[1:3]
    if not (header[0].startswith("order: ") and header[1].startswith("vars: ")):
        raise CacheError("corrupt cache: malformed header")
    order = _as_order(header[0][len("order: "):])
    scope = tuple(n for n in header[1][len("vars: "):].split(",") if n)
    missing = [n for n in scope if n not in vt]
    if missing:
        raise UsageError(f"variable table lacks cached variables {missing}")
    gens, basis = [], []
    for ln in lines[3:-2]:
        if ln.startswith("gen: "):
            gens.append(parse_poly(ln[5:], vt))
        elif ln.startswith("b: "):
            basis.append(parse_poly(ln[3:], vt))
        else:
            raise CacheError(f"corrupt cache: unexpected line {ln!r}")
    if not basis:
        raise CacheError("corrupt cache: empty basis")
    gb = GroebnerBasis(vt, order, gens, basis, scope)
    problems = gb.check_reduced(budget)
    if problems:
        raise CacheError("invariant failure: " + "; ".join(problems))
    for g in gens:
        if not member(g, gb, budget):
            raise CacheError(f"invariant failure: generator {g} is not reduced to 0 by the basis")
    return gb
