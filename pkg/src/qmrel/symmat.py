"""Small square matrices over the polynomial ring, plus the fixed J-matrices
and the symplectic families used to probe the SP4 ideal."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UsageError
from .polyring import Polynomial, VarTable, canonical_text, parse_poly, rational


class SymMatrix:
    """Immutable n-by-n matrix of polynomials sharing one VarTable."""

    __slots__ = ("vt", "rows")

    def __init__(self, vt: VarTable, rows: Sequence[Sequence]):
        out = []
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise UsageError("matrix must be square")
            row = []
            for e in r:
                if isinstance(e, Polynomial):
                    if e.vt is not vt and e.vt != vt:
                        raise UsageError("matrix entry lives over a different variable table")
                    row.append(e)
                else:
                    row.append(vt.const(e))
            out.append(tuple(row))
        self.vt = vt
        self.rows = tuple(out)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entry(self, i: int, j: int) -> Polynomial:
        """1-based entry access, matching the usual (row, column) labels."""
        return self.rows[i - 1][j - 1]

    def __eq__(self, other):
        if isinstance(other, SymMatrix):
            return self.rows == other.rows
        return NotImplemented

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "SymMatrix(\n" + self.to_text() + ")"

    def map(self, fn) -> "SymMatrix":
        return SymMatrix(self.vt, [[fn(e) for e in r] for r in self.rows])

    def __add__(self, other):
        _check(self, other)
        return SymMatrix(self.vt, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        _check(self, other)
        return SymMatrix(self.vt, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return self.map(lambda e: -e)

    def __mul__(self, c):
        if isinstance(c, SymMatrix):
            return mat_mul(self, c)
        return self.map(lambda e: e * c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return mat_mul(self, other)

    @property
    def T(self) -> "SymMatrix":
        return mat_transpose(self)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def subs(self, assignment) -> "SymMatrix":
        return self.map(lambda e: e.subs(assignment))

    def to_text(self) -> str:
        return "".join("; ".join(canonical_text(e) for e in r) + "\n" for r in self.rows)

    @classmethod
    def from_text(cls, text: str, vt: VarTable) -> "SymMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        return cls(vt, [[parse_poly(cell.strip(), vt) for cell in ln.split(";")] for ln in lines])

    @classmethod
    def identity(cls, vt: VarTable, n: int = 4) -> "SymMatrix":
        return cls(vt, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, vt: VarTable, n: int = 4) -> "SymMatrix":
        return cls(vt, [[0] * n for _ in range(n)])


def _check(a: SymMatrix, b: SymMatrix):
    if not isinstance(b, SymMatrix):
        raise UsageError("expected a SymMatrix")
    if a.vt is not b.vt and a.vt != b.vt:
        raise UsageError("matrices live over different variable tables")
    if a.n != b.n:
        raise UsageError("matrix sizes differ")


def mat_mul(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    _check(a, b)
    zero = a.vt.zero
    cols = list(zip(*b.rows))
    out = []
    for r in a.rows:
        row = []
        for c in cols:
            acc = zero
            for x, y in zip(r, c):
                if x.terms and y.terms:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return SymMatrix(a.vt, out)


def mat_transpose(a: SymMatrix) -> SymMatrix:
    return SymMatrix(a.vt, list(zip(*a.rows)))


transpose = mat_transpose


def diag(vt: VarTable, *entries) -> SymMatrix:
    n = len(entries)
    return SymMatrix(vt, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])


def block_diag(a: SymMatrix, b: SymMatrix) -> SymMatrix:
    if a.vt != b.vt:
        raise UsageError("blocks live over different variable tables")
    n, m = a.n, b.n
    rows = [list(r) + [0] * m for r in a.rows] + [[0] * n + list(r) for r in b.rows]
    return SymMatrix(a.vt, rows)


def _minor(rows, i, j):
    return [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]


def _det(rows, zero):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = zero
    for j, e in enumerate(rows[0]):
        if e.terms:
            d = _det(_minor(rows, 0, j), zero)
            acc = acc + e * d if j % 2 == 0 else acc - e * d
    return acc


def det(a: SymMatrix) -> Polynomial:
    """Determinant by cofactor expansion along the first row."""
    return _det([list(r) for r in a.rows], a.vt.zero)


def adjugate(a: SymMatrix) -> SymMatrix:
    """Transpose of the cofactor matrix, so that adj(a) a = det(a) I."""
    rows = [list(r) for r in a.rows]
    n = len(rows)
    if n == 1:
        return SymMatrix(a.vt, [[1]])
    zero = a.vt.zero
    cof = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = _det(_minor(rows, i, j), zero)
            cof[j][i] = d if (i + j) % 2 == 0 else -d
    return SymMatrix(a.vt, cof)


# -- constant matrices ---------------------------------------------------------------


def _int_mul(a, b):
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in zip(*b)) for r in a)


def _int_T(a):
    return tuple(zip(*a))


_I4 = tuple(tuple(int(i == j) for j in range(4)) for i in range(4))


@dataclass(frozen=True)
class JConstants:
    """Integer 4x4 permutation-like matrices used to rearrange period matrices."""

    J24: tuple = ((1, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0), (0, 1, 0, 0))
    J0: tuple = ((1, 0, 0, 0), (0, 0, 0, 1), (0, 1, 0, 0), (0, 0, 1, 0))
    J0inv: tuple = ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, 1, 0, 0))
    Jsym: tuple = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))

    @property
    def J24T(self) -> tuple:
        return _int_T(self.J24)

    def check(self) -> list:
        bad = []
        if _int_mul(self.J24, self.J24T) != _I4:
            bad.append("J24 J24^T != I")
        if _int_mul(self.J0, self.J0inv) != _I4:
            bad.append("J0 J0inv != I")
        if _int_T(self.Jsym) != tuple(tuple(-x for x in r) for r in self.Jsym):
            bad.append("Jsym^T != -Jsym")
        return bad

    def matrix(self, name: str, vt: VarTable) -> SymMatrix:
        return SymMatrix(vt, getattr(self, name))


J = JConstants()
# The unnamed "J2" partner of J24 is its inverse, i.e. its transpose.
if J.check():
    raise RuntimeError(f"J-constant identities fail: {J.check()}")


# -- generic matrices and families -----------------------------------------------------

X_NAMES = tuple(f"X{i}{j}" for i in range(1, 5) for j in range(1, 5))


def generic_Y(vt: VarTable) -> SymMatrix:
    return SymMatrix(vt, [[vt.var(f"X{i}{j}") for j in range(1, 5)] for i in range(1, 5)])


def block_lower_names(capital: bool = False) -> tuple:
    """Parameter names of the generic block-lower-triangular matrix, row-major."""
    a, b, c = ("A", "B", "C") if capital else ("a", "b", "c")
    return tuple(f"{p}{i}{j}" for p in (a, b, c) for i in (1, 2) for j in (1, 2))


def generic_block_lower(vt: VarTable, capital: bool = False) -> SymMatrix:
    """(a 0; b c) with 2x2 blocks of fresh parameters (``A``, ``B``, ``C`` when capital)."""
    a, b, c = ("A", "B", "C") if capital else ("a", "b", "c")
    v = vt.var
    return SymMatrix(vt, [
        [v(f"{a}11"), v(f"{a}12"), 0, 0],
        [v(f"{a}21"), v(f"{a}22"), 0, 0],
        [v(f"{b}11"), v(f"{b}12"), v(f"{c}11"), v(f"{c}12")],
        [v(f"{b}21"), v(f"{b}22"), v(f"{c}21"), v(f"{c}22")],
    ])


def symplectic_family(l, m, n, p, q, r, vt: VarTable | None = None) -> SymMatrix:
    """S = (I Sigma; P I + P Sigma) with Sigma = (n m; m l), P = (p r; r q)."""
    args = (l, m, n, p, q, r)
    if vt is None:
        vt = next((x.vt for x in args if isinstance(x, Polynomial)), None)
        if vt is None:
            raise UsageError("pass vt when all family parameters are numbers")
    l, m, n, p, q, r = (x if isinstance(x, Polynomial) else vt.const(x) for x in args)
    return SymMatrix(vt, [
        [1, 0, n, m],
        [0, 1, m, l],
        [p, r, 1 + n * p + m * r, m * p + l * r],
        [r, q, n * r + q * m, 1 + m * r + l * q],
    ])


def symplectic_substitution(Smat: SymMatrix) -> dict:
    """Assignment X_ij -> Smat[i,j] for use with ``substitute``."""
    return {f"X{i + 1}{j + 1}": Smat[i, j] for i in range(4) for j in range(4)}


def _elementary_unimodular(rng: random.Random, steps: int = 4):
    A = [[1, 0], [0, 1]]
    for _ in range(steps):
        i = rng.randrange(2)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        A[i] = [x + c * y for x, y in zip(A[i], A[1 - i])]
    if rng.random() < 0.5:
        A[0] = [-x for x in A[0]]
    return A


def block_lower_symplectic_rows(A, S) -> list:
    """T = (A 0; C A^-T) with C = A^-T S, for integer A of det +-1 and symmetric S."""
    d = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if d not in (1, -1):
        raise UsageError("A must have determinant +-1")
    if S[0][1] != S[1][0]:
        raise UsageError("S must be symmetric")
    # For det +-1 the inverse is d * adj(A); its transpose follows.
    AinvT = [[A[1][1] * d, -A[1][0] * d], [-A[0][1] * d, A[0][0] * d]]
    C = [[sum(AinvT[i][k] * S[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    return [
        list(A[0]) + [0, 0],
        list(A[1]) + [0, 0],
        C[0] + AinvT[0],
        C[1] + AinvT[1],
    ]


def numeric_symplectic_rows(seed: int) -> list:
    """Seeded block-lower-triangular symplectic T = (A 0; C A^-T) as nested lists.

    A is a product of integer elementary matrices (det +-1); C = A^-T S with S a
    random integer symmetric matrix, so A^T C = S is symmetric.  Uses Python's
    Mersenne Twister seeded with ``seed``, which is reproducible across platforms.
    """
    rng = random.Random(seed)
    A = _elementary_unimodular(rng)
    s = [rng.randint(-3, 3) for _ in range(3)]
    return block_lower_symplectic_rows(A, [[s[0], s[1]], [s[1], s[2]]])


def numeric_symplectic_T(seed: int, vt: VarTable | None = None) -> SymMatrix:
    vt = vt or VarTable(X_NAMES)
    return SymMatrix(vt, numeric_symplectic_rows(seed))


def is_symplectic(M: SymMatrix) -> bool:
    Js = J.matrix("Jsym", M.vt)
    return mat_mul(mat_mul(M.T, Js), M) == Js


def random_rational_symplectic(rng: random.Random, vt: VarTable, factors: int = 3) -> SymMatrix:
    """Product of symplectic-family members and Jsym with small rational parameters.

    Unlike the family alone this reaches points with X11 = 0 and the like.
    """
    Js = J.matrix("Jsym", vt)
    M = SymMatrix.identity(vt)
    for _ in range(factors):
        vals = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(6)]
        M = mat_mul(M, symplectic_family(*vals, vt=vt))
        if rng.random() < 0.5:
            M = mat_mul(M, Js)
    return M


def riemann_check(M: SymMatrix, scalar) -> bool:
    """M Jsym M^T == scalar Jsym as a polynomial identity (denominators pre-cleared)."""
    vt = M.vt
    if not isinstance(scalar, Polynomial):
        scalar = vt.const(rational(scalar))
    if scalar.is_zero():
        raise UsageError("scalar must be nonzero")
    Js = J.matrix("Jsym", vt)
    return mat_mul(mat_mul(M, Js), M.T) == Js * scalar


def _two_by_two(vt: VarTable, names: Sequence[str]) -> SymMatrix:
    a, b, c, d = (vt.var(n) for n in names)
    return SymMatrix(vt, [[a, b], [c, d]])


def riemann_shape_matrix(D: SymMatrix) -> SymMatrix:
    """J24 diag(D, adj(D^T)); satisfies the check with scalar det(D)."""
    return mat_mul(J.matrix("J24", D.vt), block_diag(D, adjugate(D.T)))


def period_shape_equivalence(D: SymMatrix | None = None) -> bool:
    """Compare the two normal forms of a period matrix with 2x2 block D.

    Checks J24 diag(D, D^-T) J24 == J0^-1 diag(P, P/det P) J0 with P = D diag(1,-1),
    after multiplying both sides by det D (det P = -det D).
    """
    if D is None:
        vt = VarTable((), ("d11", "d12", "d21", "d22"))
        D = _two_by_two(vt, vt.names)
    vt = D.vt
    if D.n != 2:
        raise UsageError("D must be 2x2")
    dD = det(D)
    if dD.is_zero():
        raise UsageError("D must be invertible")
    P = mat_mul(D, diag(vt, 1, -1))
    lhs = mat_mul(mat_mul(J.matrix("J24", vt), block_diag(D * dD, adjugate(D.T))), J.matrix("J24", vt))
    rhs = mat_mul(mat_mul(J.matrix("J0inv", vt), block_diag(P * dD, -P)), J.matrix("J0", vt))
    return lhs == rhs
