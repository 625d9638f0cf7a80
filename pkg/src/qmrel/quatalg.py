"""Exact arithmetic in quaternion algebras (a, b / Q) and the explicit
constructions around them: presentation primes, Rosati conjugation, and an
element mu whose square generates a quadratic field unramified at the bad primes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor, gcd, isqrt

from .errors import (
    BudgetExceeded,
    ConstructionError,
    DegenerateFieldError,
    NonInvertibleError,
    UsageError,
    ValidationError,
)
from .polyring import rational

FIND_Q_CAP = 10**6


# -- elementary number theory ------------------------------------------------------


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict:
    """Prime factorisation of |n| by trial division."""
    n = abs(n)
    if n == 0:
        raise ValidationError("cannot factor 0")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p via Euler's criterion."""
    if p < 3 or not is_prime(p):
        raise ValidationError(f"Legendre symbol needs an odd prime modulus, got {p}")
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def validate_discriminant(delta: int) -> list:
    """Return the prime factors of a valid quaternion discriminant delta."""
    if not isinstance(delta, int) or isinstance(delta, bool) or delta < 2:
        raise ValidationError(f"discriminant must be an integer >= 2, got {delta!r}")
    f = factorize(delta)
    if any(e > 1 for e in f.values()):
        raise ValidationError(f"discriminant {delta} is not squarefree")
    if len(f) % 2:
        raise ValidationError(f"discriminant {delta} has an odd number of prime factors")
    return sorted(f)


def presentation_conditions(q: int, delta: int) -> dict:
    """The defining conditions for q, checked independently of any search."""
    odd = [p for p in validate_discriminant(delta) if p % 2]
    return {
        "q prime": is_prime(q),
        "q = 5 mod 8": q % 8 == 5,
        "gcd(q, delta) = 1": gcd(q, delta) == 1,
        "(q/p) = -1 for odd p | delta": all(legendre(q, p) == -1 for p in odd),
    }


def find_q(delta: int, cap: int = FIND_Q_CAP) -> int:
    """Smallest prime q = 5 mod 8 coprime to delta and a non-residue mod each odd p | delta."""
    odd = [p for p in validate_discriminant(delta) if p % 2]
    q = 5
    for _ in range(cap):
        if gcd(q, delta) == 1 and is_prime(q) and all(legendre(q, p) == -1 for p in odd):
            return q
        q += 8
    raise BudgetExceeded(f"no q found among {cap} candidates for delta = {delta}", {"last_candidate": q})


# -- quadratic fields ------------------------------------------------------------------


def squarefree_decomposition(n: int) -> tuple:
    """n = e0^2 * e' with e' squarefree (sign kept in e')."""
    if n == 0:
        raise ValidationError("0 has no squarefree part")
    e0 = 1
    core = -1 if n < 0 else 1
    for p, e in factorize(n).items():
        e0 *= p ** (e // 2)
        if e % 2:
            core *= p
    return e0, core


@dataclass(frozen=True)
class QuadFieldDisc:
    epsilon: int
    squarefree_part: int
    disc: int


def quad_disc(epsilon: int) -> QuadFieldDisc:
    """Discriminant of Q(sqrt(epsilon))."""
    if not isinstance(epsilon, int) or isinstance(epsilon, bool):
        raise ValidationError("epsilon must be an integer")
    if epsilon == 0:
        raise ValidationError("epsilon must be nonzero")
    if epsilon > 0 and isqrt(epsilon) ** 2 == epsilon:
        raise DegenerateFieldError(f"{epsilon} is a perfect square")
    _, core = squarefree_decomposition(epsilon)
    return QuadFieldDisc(epsilon, core, core if core % 4 == 1 else 4 * core)


def is_unramified(p: int, epsilon: int) -> bool:
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    return quad_disc(epsilon).disc % p != 0


def unramified_pair_check(p: int, q: int, delta: int) -> bool:
    """p is unramified in Q(sqrt q) or in Q(sqrt delta)."""
    if not is_prime(q):
        raise ValidationError(f"{q} is not prime")
    validate_discriminant(delta)
    return is_unramified(p, q) or is_unramified(p, delta)


# -- quaternion algebras -----------------------------------------------------------------


@dataclass(frozen=True)
class QuatAlgebra:
    """(a, b / Q): i^2 = a, j^2 = b, ij = -ji = k."""

    a: Fraction | int
    b: Fraction | int

    def __post_init__(self):
        a, b = rational(self.a), rational(self.b)
        if a == 0 or b == 0:
            raise ValidationError("quaternion algebra parameters must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def element(self, t=0, y=0, z=0, w=0) -> "QuatElement":
        return QuatElement(t, y, z, w, self)

    @property
    def one(self):
        return self.element(1)

    @property
    def i(self):
        return self.element(0, 1)

    @property
    def j(self):
        return self.element(0, 0, 1)

    @property
    def k(self):
        return self.element(0, 0, 0, 1)

    def basis_element(self, name: str) -> "QuatElement":
        if name not in ("i", "j", "k"):
            raise ValidationError(f"basis element must be i, j or k, got {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class QuatElement:
    t: Fraction | int
    y: Fraction | int
    z: Fraction | int
    w: Fraction | int
    algebra: QuatAlgebra = field(repr=False)

    def __post_init__(self):
        for name in ("t", "y", "z", "w"):
            object.__setattr__(self, name, rational(getattr(self, name)))

    @property
    def coords(self) -> tuple:
        return (self.t, self.y, self.z, self.w)

    def _same(self, other):
        if not isinstance(other, QuatElement):
            return self.algebra.element(rational(other))
        if other.algebra != self.algebra:
            raise UsageError("elements of different quaternion algebras")
        return other

    def __add__(self, other):
        o = self._same(other)
        return QuatElement(*(x + y for x, y in zip(self.coords, o.coords)), self.algebra)

    __radd__ = __add__

    def __neg__(self):
        return QuatElement(*(-x for x in self.coords), self.algebra)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        return quat_mul(self, self._same(other))

    def __rmul__(self, other):
        return quat_mul(self._same(other), self)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_scalar(self) -> bool:
        return not (self.y or self.z or self.w)

    def inverse(self) -> "QuatElement":
        n = nrd(self)
        if n == 0:
            raise NonInvertibleError(f"{self} has reduced norm 0")
        c = quat_conj(self)
        return QuatElement(*(Fraction(x) / n for x in c.coords), self.algebra)

    def __str__(self):
        parts = []
        for c, s in zip(self.coords, ("", "i", "j", "k")):
            if not c:
                continue
            mag = abs(c)
            body = s if (mag == 1 and s) else (f"{mag}{s}" if not s or isinstance(mag, int) else f"({mag}){s}")
            parts.append(("-" if c < 0 else "+") + body)
        if not parts:
            return "0"
        text = "".join(parts)
        return text[1:] if text[0] == "+" else text


def quat_mul(x: QuatElement, y: QuatElement) -> QuatElement:
    if x.algebra != y.algebra:
        raise UsageError("elements of different quaternion algebras")
    a, b = x.algebra.a, x.algebra.b
    t1, y1, z1, w1 = x.coords
    t2, y2, z2, w2 = y.coords
    return QuatElement(
        t1 * t2 + a * y1 * y2 + b * z1 * z2 - a * b * w1 * w2,
        t1 * y2 + y1 * t2 - b * z1 * w2 + b * w1 * z2,
        t1 * z2 + z1 * t2 + a * y1 * w2 - a * w1 * y2,
        t1 * w2 + w1 * t2 + y1 * z2 - z1 * y2,
        x.algebra,
    )


def quat_conj(x: QuatElement) -> QuatElement:
    return QuatElement(x.t, -x.y, -x.z, -x.w, x.algebra)


def trd(x: QuatElement):
    return 2 * x.t


def nrd(x: QuatElement):
    a, b = x.algebra.a, x.algebra.b
    return x.t ** 2 - a * x.y ** 2 - b * x.z ** 2 + a * b * x.w ** 2


def rosati(x: QuatElement, alpha: QuatElement) -> QuatElement:
    """alpha x* alpha^-1."""
    return alpha * quat_conj(x) * alpha.inverse()


def involution_witness(alpha: QuatElement) -> str:
    """Name of a basis element among i, j, k not fixed by conjugation with alpha."""
    if trd(alpha) != 0:
        raise ValidationError("alpha must have reduced trace 0")
    if alpha.is_zero():
        raise ValidationError("alpha must be nonzero")
    sq = alpha * alpha
    if not sq.is_scalar() or sq.t >= 0:
        raise ValidationError(f"alpha^2 = {sq} is not a negative rational")
    A = alpha.algebra
    for name in ("i", "j", "k"):
        lam = A.basis_element(name)
        if rosati(lam, alpha) != lam:
            return name
    raise ConstructionError("every basis element is fixed by the involution; this contradicts the theory")


# -- the mu construction ----------------------------------------------------------------


def _n_above(bound) -> int:
    """Smallest non-negative integer strictly greater than ``bound``."""
    if bound is None:
        return 0
    return max(0, floor(bound) + 1)


@dataclass
class MuConstruction:
    mu: QuatElement
    triple: tuple
    N: int
    bound: Fraction | None
    case: str
    epsilon: int
    disc: int
    checks: dict
    notes: list

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def rosati_fixed_system(alpha_coords, triple, q, delta) -> tuple:
    """(Yyq + Zz delta - Ww q delta, Xy, Xz, Xw): all zero exactly when mu is fixed."""
    X, Y, Z, W = alpha_coords
    y, z, w = triple
    return (Y * y * q + Z * z * delta - W * w * q * delta, X * y, X * z, X * w)


def _triple_for(case: str, alpha_coords, q: int, delta: int):
    X, Y, Z, W = (Fraction(c) for c in alpha_coords)
    bound = None
    notes = []
    if case == "i":
        if X != 0:
            return (1, 1, 1), 0, None, "i, X != 0", notes
        if Y == 0:
            raise ValidationError("for lambda = i the element needs (X, Y) != (0, 0)")
        bound = ((delta * (W * q - Z)) / (Y * q) - 1) / delta
        N = _n_above(bound)
        return (N * delta + 1, 1, 1), N, bound, "i, X = 0", notes
    if case == "j":
        if X == 0:
            return (1, 1, 1), 0, None, "j, X = 0", notes
        if Z == 0:
            notes.append("bound undefined for Z = 0; N = 0")
        else:
            bound = ((W * q * delta - Y * q) / (Z * delta) - 1) / (2 * q)
        N = _n_above(bound)
        return (1, 2 * N * q + 1, 1), N, bound, "j, X != 0", notes
    # The third case is written for lambda = k.
    notes.append("third case implemented for lambda = k")
    if X != 0:
        return (1, 1, 1), 0, None, "k, X != 0", notes
    if W == 0:
        raise ValidationError("for lambda = k the element needs (X, W) != (0, 0)")
    bound = ((Y * q + Z * delta) / (W * q * delta) - 1) / 2
    N = _n_above(bound)
    return (1, 2 * N * q + 1, 1), N, bound, "k, X = 0", notes


def mu_construction(q: int, delta: int, lambda_case: str, alpha_coords) -> MuConstruction:
    """Build mu = y i + z j + w k from the case table and verify it.

    Raises :class:`ConstructionError` naming every failed condition.
    """
    if not is_prime(q):
        raise ValidationError(f"q = {q} is not prime")
    odd = [p for p in validate_discriminant(delta) if p % 2]
    if lambda_case not in ("i", "j", "k"):
        raise ValidationError(f"lambda must be one of i, j, k, got {lambda_case!r}")
    coords = tuple(rational(c) for c in alpha_coords)
    if len(coords) != 4:
        raise ValidationError("alpha needs four coordinates (X, Y, Z, W)")
    A = QuatAlgebra(q, delta)
    alpha = A.element(*coords)
    if nrd(alpha) == 0:
        raise ValidationError("alpha is not invertible")
    triple, N, bound, case, notes = _triple_for(lambda_case, coords, q, delta)
    mu = A.element(0, *triple)
    lam = A.basis_element(lambda_case)
    sq = mu * mu
    eps = sq.t
    checks = {
        "trd(mu) = 0": trd(mu) == 0,
        "mu is not fixed by the involution": rosati(mu, alpha) != mu
        and any(rosati_fixed_system(coords, triple, q, delta)),
        "mu^2 is not a rational square": sq.is_scalar() and not _is_rational_square(eps),
    }
    disc = None
    if checks["mu^2 is not a rational square"]:
        disc = quad_disc(int(eps)).disc
        bad = sorted({2, q, *odd})
        checks["bad primes unramified in Q(sqrt(mu^2))"] = all(disc % p for p in bad)
    else:
        checks["bad primes unramified in Q(sqrt(mu^2))"] = False
    checks["lambda mu != mu lambda"] = lam * mu != mu * lam
    result = MuConstruction(mu, triple, N, bound, case, int(eps) if sq.is_scalar() else None,
                            disc, checks, notes)
    if not result.ok:
        failed = [k for k, v in checks.items() if not v]
        raise ConstructionError(f"mu = {mu} fails: {', '.join(failed)} (case {case})", failed)
    return result


def find_mu(q: int, delta: int, lambda_case: str, alpha_coords) -> QuatElement:
    return mu_construction(q, delta, lambda_case, alpha_coords).mu


def _is_rational_square(x) -> bool:
    x = Fraction(x)
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


def mu_sweep(q: int, delta: int, radius: int):
    """Yield (lambda, alpha, outcome) over alpha in [-radius, radius]^4.

    ``outcome`` is the :class:`MuConstruction` or the :class:`ConstructionError`
    raised for it; inputs the construction rejects as invalid are skipped.
    """
    for lam in "ijk":
        for coords in product(range(-radius, radius + 1), repeat=4):
            try:
                yield lam, coords, mu_construction(q, delta, lam, coords)
            except ValidationError:
                continue
            except ConstructionError as e:
                yield lam, coords, e
