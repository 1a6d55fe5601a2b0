"""The solvable group R^n x| R and its left-invariant metric.

Elements are pairs (v, t) with v in R^n and t in R, multiplying as

    (v, t) * (w, s) = (v + Exp(t A) w, t + s)

for a fixed generator A in block form: 2x2 blocks lam*I + phi*J (J the
quarter-turn) and 1x1 blocks lam.  The one-parameter group Exp(t A) then
has the closed form e^(t lam) * rotation(t phi) per block, which is what
everything downstream uses; a generic scaling-and-squaring exponential is
kept alongside purely as an independent cross-check.

The left-invariant metric is declared orthonormal at the identity and
transported by left translation: at (w, t) the inner product of two
tangent vectors is the Euclidean product of their images under
blockdiag(Exp(-t A), 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidSpec,
    MatrixExpOverflow,
    UnrepresentableGenerator,
)
from .spectra import Spectrum

# beyond this 2-norm, e^||M|| leaves float64 range; refuse rather than
# return infs
_EXP_NORM_LIMIT = 500.0


@dataclass(frozen=True)
class Rot2:
    """2x2 block lam*I + phi*J: expands/contracts at rate lam, rotates at
    rate phi."""

    lam: float
    phi: float

    @property
    def size(self) -> int:
        return 2

    def dense(self) -> np.ndarray:
        return np.array([[self.lam, self.phi], [-self.phi, self.lam]])

    def exp(self, t: float) -> np.ndarray:
        r = math.exp(t * self.lam)
        c, s = math.cos(t * self.phi), math.sin(t * self.phi)
        return np.array([[r * c, r * s], [-r * s, r * c]])


@dataclass(frozen=True)
class Scal1:
    """1x1 block: pure expansion/contraction at rate lam."""

    lam: float

    @property
    def size(self) -> int:
        return 1

    def dense(self) -> np.ndarray:
        return np.array([[self.lam]])

    def exp(self, t: float) -> np.ndarray:
        return np.array([[math.exp(t * self.lam)]])


Block = Union[Rot2, Scal1]


@dataclass(frozen=True)
class BlockGenerator:
    """Block-diagonal generator acting on the translational fiber R^n."""

    blocks: tuple[Block, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) == 0:
            raise InvalidSpec("generator needs at least one block")

    @property
    def n(self) -> int:
        return sum(b.size for b in self.blocks)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Block]) -> "BlockGenerator":
        return cls(tuple(blocks))

    def dense(self) -> np.ndarray:
        return scipy.linalg.block_diag(*(b.dense() for b in self.blocks))

    def diagonal_part(self) -> "BlockGenerator":
        """The same expansion rates with every rotation removed.  The
        group this generates carries an identical metric Gram (rotations
        drop out of Exp(-tA)^T Exp(-tA)), which is what makes curvature
        computations on it legitimate stand-ins for the full generator."""
        out: list[Block] = []
        for b in self.blocks:
            out.append(Rot2(b.lam, 0.0) if isinstance(b, Rot2) else b)
        return BlockGenerator(tuple(out))

    def lambda_max(self) -> float:
        return max(abs(b.lam) for b in self.blocks)


def assemble_generator(spectrum: Spectrum) -> BlockGenerator:
    """One Rot2(lam, phi) block per conjugate pair, one Scal1(lam) per
    real positive root, in spectrum order.  Exp(1 * A) then has exactly
    the roots the spectrum encodes."""
    blocks: list[Block] = []
    for lam, phi in spectrum.pairs:
        if not (0.0 < phi < math.pi):
            raise UnrepresentableGenerator(f"pair angle {phi} outside (0, pi)")
        blocks.append(Rot2(lam, phi))
    for lam in spectrum.reals:
        blocks.append(Scal1(lam))
    return BlockGenerator(tuple(blocks))


def exp_tA_closed(a: BlockGenerator, t: float) -> np.ndarray:
    """Exp(t A) assembled blockwise from the closed form."""
    return scipy.linalg.block_diag(*(b.exp(t) for b in a.blocks))


def exp_generic(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of an arbitrary square matrix by Pade scaling
    and squaring (scipy).  Independent of the closed form above; the two
    are compared in tests and never mixed in one computation."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidSpec("matrix has non-finite entries")
    norm = float(np.linalg.norm(m, 2))
    if norm > _EXP_NORM_LIMIT:
        raise MatrixExpOverflow(f"||M|| = {norm:.3g} exceeds the overflow guard")
    return scipy.linalg.expm(m)


@dataclass
class GroupElement:
    """Point (v, t) of the group; v is the fiber part, t the base."""

    v: np.ndarray
    t: float

    def __post_init__(self) -> None:
        self.v = np.asarray(self.v, dtype=float)
        if self.v.ndim != 1:
            raise DimensionMismatch(f"fiber part must be a vector, got shape {self.v.shape}")
        self.t = float(self.t)


@dataclass
class TangentVector:
    """Tangent vector (xp, x0): fiber component xp in R^n, base component
    x0 along the t direction."""

    xp: np.ndarray
    x0: float

    def __post_init__(self) -> None:
        self.xp = np.asarray(self.xp, dtype=float)
        if self.xp.ndim != 1:
            raise DimensionMismatch(f"fiber part must be a vector, got shape {self.xp.shape}")
        self.x0 = float(self.x0)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.xp, [self.x0]])

    @classmethod
    def from_array(cls, x: np.ndarray) -> "TangentVector":
        x = np.asarray(x, dtype=float)
        return cls(x[:-1], float(x[-1]))

    def norm(self) -> float:
        return float(math.hypot(np.linalg.norm(self.xp), self.x0))


def identity_element(n: int) -> GroupElement:
    return GroupElement(np.zeros(n), 0.0)


def _check_dim(g: GroupElement, a: BlockGenerator) -> None:
    if g.v.shape[0] != a.n:
        raise DimensionMismatch(f"element fiber dim {g.v.shape[0]} vs generator dim {a.n}")


def multiply(g: GroupElement, h: GroupElement, a: BlockGenerator) -> GroupElement:
    """(v, t) * (w, s) = (v + Exp(t A) w, t + s)."""
    _check_dim(g, a)
    _check_dim(h, a)
    return GroupElement(g.v + exp_tA_closed(a, g.t) @ h.v, g.t + h.t)


def inverse(g: GroupElement, a: BlockGenerator) -> GroupElement:
    """(v, t)^-1 = (-Exp(-t A) v, -t)."""
    _check_dim(g, a)
    return GroupElement(-(exp_tA_closed(a, -g.t) @ g.v), -g.t)


def commutator(g: GroupElement, h: GroupElement, a: BlockGenerator) -> GroupElement:
    """g^-1 h^-1 g h, computed by the group law."""
    return multiply(multiply(multiply(inverse(g, a), inverse(h, a), a), g, a), h, a)


def commutator_vector_formula(g: GroupElement, h: GroupElement, a: BlockGenerator) -> np.ndarray:
    """Closed form of the commutator's fiber part,

        u = h(-s-t) v - h(-t) v + h(-s) w - h(-s-t) w

    with h(.) = Exp(. A); the base part is always 0.  Used as the oracle
    against the group-law route."""
    _check_dim(g, a)
    _check_dim(h, a)
    v, t = g.v, g.t
    w, s = h.v, h.t
    e_st = exp_tA_closed(a, -s - t)
    return e_st @ v - exp_tA_closed(a, -t) @ v + exp_tA_closed(a, -s) @ w - e_st @ w


def metric_at(p: GroupElement, a: BlockGenerator) -> np.ndarray:
    """Gram matrix of the left-invariant metric at p, in the coordinate
    frame (d/dv_1 .. d/dv_n, d/dt): blockdiag(Exp(-tA)^T Exp(-tA), 1).
    Depends on the base coordinate t only."""
    _check_dim(p, a)
    n = a.n
    e = exp_tA_closed(a, -p.t)
    g = np.eye(n + 1)
    g[:n, :n] = e.T @ e
    return g
