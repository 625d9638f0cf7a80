"""Sparse multivariate polynomials over Q.

A polynomial is a map from exponent tuples to nonzero rationals, tied to a
:class:`VarTable` that fixes the variable order.  Rationals are stored as
``int`` when integral and as :class:`fractions.Fraction` otherwise; both are
exact and compare/hash consistently.

Monomial orders are given by sort keys (larger key = larger monomial), see
:class:`MonomialOrder`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from operator import add, neg
from typing import Iterable, Mapping, Union

from .errors import ExponentOverflow, ParseError, UsageError

Rational = Union[int, Fraction]
Monomial = tuple  # exponent vector, one entry per VarTable variable

DEFAULT_EXPONENT_CAP = 2**31 - 1

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def rational(x) -> Rational:
    """Coerce ``x`` to an exact rational, ``int`` whenever integral."""
    if isinstance(x, bool):
        raise UsageError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rational(Fraction(x))
    if isinstance(x, float):
        raise UsageError("floating point coefficients are not allowed")
    try:
        q = Fraction(x)
    except TypeError:
        raise UsageError(f"cannot use {type(x).__name__} as a rational coefficient") from None
    return rational(q)


def _norm(c):
    # Fraction results of arithmetic are reduced already; only demote to int.
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


@dataclass(frozen=True)
class VarTable:
    """Ordered variable universe: matrix variables first, then parameters."""

    matrix_vars: tuple = ()
    param_vars: tuple = ()
    exponent_cap: int = field(default=DEFAULT_EXPONENT_CAP, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix_vars", tuple(self.matrix_vars))
        object.__setattr__(self, "param_vars", tuple(self.param_vars))
        names = self.matrix_vars + self.param_vars
        for n in names:
            if not isinstance(n, str) or not _NAME_RE.match(n):
                raise UsageError(f"invalid variable name {n!r}")
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise UsageError(f"duplicate variable names: {dup}")
        if self.exponent_cap < 1:
            raise UsageError("exponent cap must be positive")

    @cached_property
    def names(self) -> tuple:
        return self.matrix_vars + self.param_vars

    @cached_property
    def index(self) -> dict:
        return {n: i for i, n in enumerate(self.names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    @cached_property
    def unit(self) -> Monomial:
        return (0,) * self.nvars

    def index_of(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UsageError(f"unknown variable {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self.index

    @cached_property
    def default_order(self) -> "MonomialOrder":
        if self.matrix_vars and self.param_vars:
            return MonomialOrder.block(len(self.matrix_vars))
        return MonomialOrder.degrevlex()

    def var(self, name: str) -> "Polynomial":
        i = self.index_of(name)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1}, _trusted=True)

    def vars(self, names: Iterable[str] | str) -> list:
        if isinstance(names, str):
            names = names.replace(",", " ").split()
        return [self.var(n) for n in names]

    def const(self, c) -> "Polynomial":
        c = rational(c)
        return Polynomial(self, {self.unit: c} if c else {}, _trusted=True)

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {}, _trusted=True)

    @property
    def one(self) -> "Polynomial":
        return self.const(1)

    def extended(self, *names: str) -> "VarTable":
        """Copy with extra parameter variables appended."""
        return VarTable(self.matrix_vars, self.param_vars + tuple(names), self.exponent_cap)


class MonomialOrder:
    """Total monomial order given by a sort key.

    ``lex``        plain lexicographic in VarTable order.
    ``degrevlex``  graded reverse lexicographic.
    ``block(k)``   first ``k`` variables beat the rest; degrevlex inside each block.
    """

    __slots__ = ("kind", "split", "key", "rkey")

    def __init__(self, kind: str, split: int = 0):
        if kind not in ("lex", "degrevlex", "block"):
            raise UsageError(f"unknown monomial order {kind!r}")
        self.kind = kind
        self.split = split
        # rkey sorts ascending in *decreasing* monomial order (heap-friendly).
        if kind == "lex":
            self.key = _lex_key
            self.rkey = _lex_rkey
        elif kind == "degrevlex":
            self.key = _grevlex_key
            self.rkey = _grevlex_rkey
        else:
            k = split

            def key(m, k=k):
                a, b = m[:k], m[k:]
                return (sum(a), tuple(map(neg, reversed(a))), sum(b), tuple(map(neg, reversed(b))))

            def rkey(m, k=k):
                a, b = m[:k], m[k:]
                return (-sum(a), a[::-1], -sum(b), b[::-1])

            self.key = key
            self.rkey = rkey

    @classmethod
    def lex(cls):
        return cls("lex")

    @classmethod
    def degrevlex(cls):
        return cls("degrevlex")

    @classmethod
    def block(cls, split: int):
        return cls("block", split)

    @classmethod
    def from_name(cls, name: str) -> "MonomialOrder":
        m = re.fullmatch(r"block\((\d+)\)", name)
        if m:
            return cls.block(int(m.group(1)))
        return cls(name)

    @property
    def name(self) -> str:
        return f"block({self.split})" if self.kind == "block" else self.kind

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.kind, self.split) == (other.kind, other.split)

    def __hash__(self):
        return hash((self.kind, self.split))

    def __repr__(self):
        return f"MonomialOrder({self.name!r})"


def _lex_key(m):
    return m


def _grevlex_key(m):
    return (sum(m), tuple(map(neg, reversed(m))))


def _lex_rkey(m):
    return tuple(map(neg, m))


def _grevlex_rkey(m):
    return (-sum(m), m[::-1])


def _coerce_order(order, vt: VarTable) -> MonomialOrder:
    if order is None:
        return vt.default_order
    if isinstance(order, str):
        return MonomialOrder.from_name(order)
    return order


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("vt", "terms", "_maxexp", "_hash")

    def __init__(self, vt: VarTable, terms: Mapping | None = None, *, _trusted: bool = False):
        self.vt = vt
        if _trusted:
            self.terms = terms if terms is not None else {}
        else:
            n = vt.nvars
            clean = {}
            for m, c in (terms or {}).items():
                m = tuple(m)
                if len(m) != n or any((not isinstance(e, int)) or e < 0 for e in m):
                    raise UsageError(f"bad exponent vector {m!r} for {n} variables")
                c = rational(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
            self.terms = {m: _norm(c) for m, c in clean.items() if c}
            self._check_cap(max((max(m, default=0) for m in self.terms), default=0))
        self._maxexp = None
        self._hash = None

    # -- construction helpers -------------------------------------------------

    def _new(self, terms) -> "Polynomial":
        return Polynomial(self.vt, terms, _trusted=True)

    def _check_cap(self, e):
        if e > self.vt.exponent_cap:
            raise ExponentOverflow(f"exponent {e} exceeds cap {self.vt.exponent_cap}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.vt is not self.vt and other.vt != self.vt:
                raise UsageError("polynomials live over different variable tables")
            return other
        return self.vt.const(other)

    # -- basic queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.vt.unit in self.terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise UsageError("polynomial is not constant")
        return self.terms.get(self.vt.unit, 0)

    @property
    def max_exponent(self) -> int:
        if self._maxexp is None:
            self._maxexp = max((max(m, default=0) for m in self.terms), default=0)
        return self._maxexp

    def variables(self) -> set:
        used = [False] * self.vt.nvars
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return {n for n, u in zip(self.vt.names, used) if u}

    def total_degree(self, names: Iterable[str] | None = None) -> int:
        """Total degree, optionally counting only the given variables. Zero has degree -1."""
        if not self.terms:
            return -1
        if names is None:
            return max(sum(m) for m in self.terms)
        idx = [self.vt.index_of(n) for n in names]
        return max(sum(m[i] for i in idx) for m in self.terms)

    def is_homogeneous(self, names: Iterable[str] | None = None) -> bool:
        if names is None:
            degs = {sum(m) for m in self.terms}
        else:
            idx = [self.vt.index_of(n) for n in names]
            degs = {sum(m[i] for i in idx) for m in self.terms}
        return len(degs) <= 1

    def sorted_terms(self, order=None) -> list:
        """Terms in descending monomial order."""
        key = _coerce_order(order, self.vt).key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, order=None):
        if not self.terms:
            raise UsageError("zero polynomial has no leading term")
        key = _coerce_order(order, self.vt).key
        m = max(self.terms, key=key)
        return m, self.terms[m]

    # -- arithmetic -----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (other.vt is self.vt or other.vt == self.vt) and self.terms == other.terms
        try:
            return self.terms == self.vt.const(other).terms
        except UsageError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vt.names, frozenset(self.terms.items())))
        return self._hash

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for m, c in small.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return self._new(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = rational(other)
            if not c:
                return self.vt.zero
            return self._new({m: _norm(v * c) for m, v in self.terms.items()})
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return self.vt.zero
        self._check_cap(self.max_exponent + other.max_exponent)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = {}
        get = out.get
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                m = tuple(map(add, m1, m2))
                out[m] = get(m, 0) + c1 * c2
        return self._new({m: _norm(c) for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = rational(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        inv = Fraction(1) / c
        return self * inv

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise UsageError("exponent must be a non-negative integer")
        if n == 0:
            return self.vt.one
        self._check_cap(self.max_exponent * n)
        if len(self.terms) == 1:
            (m, c), = self.terms.items()
            return self._new({tuple(e * n for e in m): _norm(Fraction(c) ** n)})
        result, base = self.vt.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, values: Mapping[str, object]) -> Rational:
        """Evaluate at a full rational point (every occurring variable must be given)."""
        idx = self.vt.index
        point = [None] * self.vt.nvars
        for name, v in values.items():
            if name not in idx:
                raise UsageError(f"unknown variable {name!r}")
            point[idx[name]] = rational(v)
        total = 0
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    x = point[i]
                    if x is None:
                        raise UsageError(f"no value for variable {self.vt.names[i]!r}")
                    t = t * x**e
            total += t
        return _norm(Fraction(total)) if not isinstance(total, int) else total

    def subs(self, assignment: Mapping[str, object]) -> "Polynomial":
        return substitute(self, assignment)

    def __str__(self):
        return canonical_text(self)

    def __repr__(self):
        return f"Polynomial({canonical_text(self)!r})"


# -- public operations -------------------------------------------------------


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    _same_table(f, g)
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    _same_table(f, g)
    return f * g


def _same_table(f, g):
    if not (isinstance(f, Polynomial) and isinstance(g, Polynomial)):
        raise UsageError("expected two polynomials")
    if f.vt is not g.vt and f.vt != g.vt:
        raise UsageError("polynomials live over different variable tables")


def substitute(f: Polynomial, assignment: Mapping[str, object]) -> Polynomial:
    """Simultaneous substitution ``var -> value``; values are polynomials or rationals."""
    vt = f.vt
    subs = {}
    for name, val in assignment.items():
        i = vt.index_of(name)
        if isinstance(val, Polynomial):
            if val.vt is not vt and val.vt != vt:
                raise UsageError(f"value for {name!r} lives over a different variable table")
        else:
            val = vt.const(val)
        subs[i] = val
    if not subs or not f.terms:
        return f
    idx = sorted(subs)
    # Group terms by the exponents of the substituted variables.
    groups: dict = {}
    for m, c in f.terms.items():
        key = tuple(m[i] for i in idx)
        rest = list(m)
        for i in idx:
            rest[i] = 0
        g = groups.setdefault(key, {})
        g[tuple(rest)] = c
    powers = {i: {0: vt.one, 1: subs[i]} for i in idx}

    def power(i, e):
        table = powers[i]
        if e not in table:
            table[e] = subs[i] ** e
        return table[e]

    out: dict = {}
    for key, rest_terms in groups.items():
        factor = vt.one
        for i, e in zip(idx, key):
            if e:
                factor = factor * power(i, e)
        if not factor.terms:
            continue
        prod = factor * Polynomial(vt, rest_terms, _trusted=True)
        for m, c in prod.terms.items():
            out[m] = out.get(m, 0) + c
    return Polynomial(vt, {m: _norm(c) for m, c in out.items() if c}, _trusted=True)


def coefficient_rules(f: Polynomial, names: Iterable[str], order="degrevlex") -> list:
    """Split ``f`` as a sum of monomials in ``names`` times coefficients.

    Returns ``[(exponents_over_names, coefficient_polynomial), ...]`` sorted
    descending by ``order`` on the exponent vectors over ``names``.
    """
    names = list(names)
    if not names:
        raise UsageError("coefficient_rules needs at least one variable")
    vt = f.vt
    idx = [vt.index_of(n) for n in names]
    groups: dict = {}
    for m, c in f.terms.items():
        key = tuple(m[i] for i in idx)
        rest = list(m)
        for i in idx:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = c
    key_fn = (MonomialOrder.from_name(order) if isinstance(order, str) else order).key
    rules = [(k, Polynomial(vt, t, _trusted=True)) for k, t in groups.items()]
    rules.sort(key=lambda r: key_fn(r[0]), reverse=True)
    return rules


def monomial_text(vt: VarTable, m: Monomial) -> str:
    parts = []
    for name, e in zip(vt.names, m):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def _rational_text(c) -> str:
    if isinstance(c, int):
        return str(c)
    return f"{c.numerator}/{c.denominator}"


def canonical_text(f: Polynomial, order=None) -> str:
    """Render ``f`` with terms in descending order, e.g. ``"3/2*X11*X33 - 1"``."""
    if not f.terms:
        return "0"
    pieces = []
    for k, (m, c) in enumerate(f.sorted_terms(order)):
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        mono = monomial_text(f.vt, m)
        if mono == "1":
            body = _rational_text(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_rational_text(a)}*{mono}"
        if k == 0:
            pieces.append(body if sign == "+" else f"-{body}")
        else:
            pieces.append(f" {sign} {body}")
    return "".join(pieces)


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def parse_poly(text: str, vt: VarTable) -> Polynomial:
    """Parse the text grammar produced by :func:`canonical_text`.

    ``poly := ["+"|"-"] term {("+"|"-") term}``,
    ``term := rational ["*" powers] | powers``,
    ``powers := var ["^" int] {"*" var ["^" int]}``,
    ``rational := int ["/" int]``.  Whitespace is ignored.
    """
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    p = _Parser(text, tokens, vt)
    return p.poly()


class _Parser:
    def __init__(self, text, tokens, vt):
        self.text, self.tokens, self.vt = text, tokens, vt
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        raise ParseError(self.text, self.peek()[2], expected)

    def is_op(self, ch):
        kind, val, _ = self.peek()
        return kind == "op" and val == ch

    def poly(self):
        vt = self.vt
        terms: dict = {}
        first = True
        while True:
            sign = 1
            if self.is_op("+") or self.is_op("-"):
                sign = -1 if self.take()[1] == "-" else 1
            elif not first:
                break
            m, c = self.term()
            s = terms.get(m, 0) + sign * c
            terms[m] = s
            first = False
            if self.peek()[0] == "end":
                break
            if not (self.is_op("+") or self.is_op("-")):
                self.fail("'+', '-' or end of input")
        return Polynomial(vt, {m: c for m, c in terms.items() if c})

    def positive_int(self):
        kind, val, _ = self.peek()
        if kind != "int":
            self.fail("a positive integer")
        self.take()
        v = int(val)
        if v <= 0:
            self.i -= 1
            self.fail("a positive integer")
        return v

    def term(self):
        kind, val, _ = self.peek()
        coeff = Fraction(1)
        exps = [0] * self.vt.nvars
        if kind == "int":
            self.take()
            coeff = Fraction(int(val))
            if self.is_op("/"):
                self.take()
                coeff /= self.positive_int()
            if not self.is_op("*"):
                return tuple(exps), coeff
            self.take()
        elif kind != "name":
            self.fail("a coefficient or variable")
        self.powers(exps)
        return tuple(exps), coeff

    def powers(self, exps):
        while True:
            kind, val, pos = self.peek()
            if kind != "name":
                self.fail("a variable name")
            if val not in self.vt.index:
                raise ParseError(self.text, pos, f"a known variable (got {val!r})")
            self.take()
            e = 1
            if self.is_op("^"):
                self.take()
                e = self.positive_int()
            exps[self.vt.index[val]] += e
            if not self.is_op("*"):
                return
            self.take()
