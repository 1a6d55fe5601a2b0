"""Exact integer polynomials and matrices.

Everything in this module runs on arbitrary-precision Python integers:
polynomial construction, Frobenius companion matrices, fraction-free
determinants and characteristic polynomials.  No floating point enters any
code path here, so unimodularity and round-trip identities are exact
statements rather than numerical ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionMismatch, InvalidSpec, NonMonicPolynomial


@dataclass(frozen=True)
class PolySpec:
    """Parameters of the construction polynomial x^(2k) + sign*3*x^k + 1.

    ``odd_factor`` multiplies in (x - 1), raising the degree to 2k + 1.
    The safe ``sign`` depends on the parity of k (see ``for_dimension``):
    with the wrong parity the roots include unpaired negative reals, which
    no real matrix exponential realizes.  Flipping the middle sign maps
    each root x to -x, so all moduli (and every bound built on them) are
    unchanged.
    """

    k: int
    sign: int = 1
    odd_factor: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or self.k < 1:
            raise InvalidSpec(f"k must be an integer >= 1, got {self.k!r}")
        if self.sign not in (1, -1):
            raise InvalidSpec(f"sign must be +1 or -1, got {self.sign!r}")

    @property
    def n(self) -> int:
        """Degree of the full polynomial: 2k, or 2k + 1 with the odd factor."""
        return 2 * self.k + (1 if self.odd_factor else 0)

    @classmethod
    def for_dimension(cls, n: int) -> "PolySpec":
        """The parity-safe spec of degree n >= 2: k = n // 2, middle sign
        +3 for even k and -3 for odd k, odd factor exactly when n is odd."""
        if not isinstance(n, int) or n < 2:
            raise InvalidSpec(f"dimension must be an integer >= 2, got {n!r}")
        k = n // 2
        return cls(k=k, sign=1 if k % 2 == 0 else -1, odd_factor=bool(n % 2))


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients leading-first."""

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) == 0:
            raise InvalidSpec("a polynomial needs at least one coefficient")
        if any(not isinstance(c, int) for c in self.coeffs):
            raise InvalidSpec("coefficients must be Python ints")
        if self.coeffs[0] == 0 and len(self.coeffs) > 1:
            raise InvalidSpec("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[0] == 1

    def evaluate(self, x: complex) -> complex:
        """Horner evaluation; exact when x is an int."""
        acc: complex = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    def to_json(self) -> list[str]:
        """Decimal strings, leading coefficient first."""
        return [str(c) for c in self.coeffs]


def build_polynomial(spec: PolySpec) -> IntPoly:
    """x^(2k) + sign*3*x^k + 1, times (x - 1) when the odd factor is on.

    The three nonzero coefficients make the base polynomial palindromic,
    so its companion matrix has determinant +-1 and the root multiset is
    closed under r -> 1/r.
    """
    k = spec.k
    base = [0] * (2 * k + 1)
    base[0] = 1
    base[k] = 3 * spec.sign
    base[2 * k] = 1
    p = IntPoly(tuple(base))
    if spec.odd_factor:
        p = p * IntPoly((1, -1))
    return p


@dataclass(frozen=True)
class IntMatrix:
    """Square integer matrix, immutable rows of Python ints."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n == 0:
            raise InvalidSpec("matrix must be at least 1x1")
        for row in self.entries:
            if len(row) != n:
                raise DimensionMismatch(
                    f"expected square matrix, got row of length {len(row)} in {n}x{n}"
                )
            if any(not isinstance(e, int) for e in row):
                raise InvalidSpec("entries must be Python ints")

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(e) for e in row) for row in rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.n != other.n:
            raise DimensionMismatch(f"cannot multiply {self.n}x{self.n} by {other.n}x{other.n}")
        cols = list(zip(*other.entries))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col) if a) for col in cols)
                for row in self.entries
            )
        )

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.n))


def companion_matrix(p: IntPoly) -> IntMatrix:
    """Frobenius companion of a monic polynomial: ones on the subdiagonal,
    last column -c_0 .. -c_(n-1) top to bottom (c_i the x^i coefficient)."""
    if not p.is_monic:
        raise NonMonicPolynomial(f"companion matrix needs a monic polynomial, leading {p.coeffs[0]}")
    n = p.degree
    if n < 1:
        raise InvalidSpec("companion matrix needs degree >= 1")
    rows = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        rows[i + 1][i] = 1
    for i in range(n):
        # coefficient of x^i sits at index degree - i (leading-first layout)
        rows[i][n - 1] = -p.coeffs[n - i]
    return IntMatrix.from_rows(rows)


def _exact_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r != 0:
        raise ArithmeticError(f"inexact division {a} / {b} in fraction-free elimination")
    return q


def det_exact(m: IntMatrix) -> int:
    """Determinant by Bareiss fraction-free elimination.

    Intermediate divisions are exact by construction; each is checked
    anyway so a bookkeeping bug cannot silently truncate.
    """
    n = m.n
    a = [list(row) for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                row_i[j] = _exact_div(row_i[j] * pivot - aik * row_k[j], prev)
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def charpoly_exact(m: IntMatrix) -> IntPoly:
    """Characteristic polynomial det(xI - M) by the Faddeev-LeVerrier
    recurrence.  All divisions are by the step index and come out exact
    over the integers; each one is verified."""
    n = m.n
    coeffs = [1]
    # mk holds the current auxiliary matrix, starting from the identity
    mk = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for step in range(1, n + 1):
        # am = M @ mk with zero-skipping (companion inputs are sparse)
        am = [[0] * n for _ in range(n)]
        for i, row in enumerate(m.entries):
            acc = am[i]
            for j, a in enumerate(row):
                if a:
                    mrow = mk[j]
                    for t in range(n):
                        acc[t] += a * mrow[t]
        c = _exact_div(-sum(am[i][i] for i in range(n)), step)
        coeffs.append(c)
        for i in range(n):
            am[i][i] += c
        mk = am
    # Cayley-Hamilton: the recurrence must close on the zero matrix
    if any(any(e != 0 for e in row) for row in mk):
        raise ArithmeticError("characteristic polynomial recurrence failed to close")
    return IntPoly(tuple(coeffs))


def is_unimodular(m: IntMatrix) -> bool:
    """True iff det(M) is +1 or -1 (so M and its inverse preserve Z^n)."""
    return det_exact(m) in (1, -1)
