"""Lattices, fibers, and diameter bounds for the compact quotient.

The integer companion matrix T and the holonomy Exp(A) share a spectrum,
so a real conjugator P with Exp(A) P = P T turns P Z^n into an
Exp(A)-invariant lattice.  Scaling it by 1/h and crossing with Z gives a
cocompact subgroup; the quotient fibers over the circle R/Z with flat
torus fibers R^n / ((1/h) P Z^n), measured at base point t through
Exp(-tA).

The fiber diameter is bounded by the lattice covering radius, itself
bounded through the Gram-Schmidt profile of the basis: mu <= (1/2) *
sqrt(sum ||b_i*||^2).  A Riemannian submersion with totally geodesic
horizontal lifts then gives diam(total) <= diam(base) + sup_t
diam(fiber_t); the base circle R/Z contributes 1/2, and a variant with
base 1 is emitted alongside for comparison with the coarser convention.

For small fiber dimensions a graph-geodesic estimator over a fundamental
domain provides an independent sanity value; it is never used in
certificates.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np
import scipy.sparse
import scipy.sparse.csgraph

from .errors import (
    ConjugationFailure,
    DegenerateBasis,
    DimensionMismatch,
    InvalidSpec,
)
from .exactalg import IntMatrix, det_exact
from .solvgroup import BlockGenerator, assemble_generator, exp_tA_closed
from .spectra import Spectrum

_RESIDUAL_TOL = 1e-8
_MATCH_TOL = 1e-6


@dataclass(frozen=True)
class LatticeData:
    """Conjugator P with Exp(A) P = P T, plus the fiber scale h.

    The invariant lattice is (1/h) P Z^n; `residual` is the relative
    Frobenius defect of the conjugation identity and `cond` the condition
    number of P.
    """

    T: IntMatrix
    P: np.ndarray
    h: int
    residual: float
    cond: float

    def basis(self) -> np.ndarray:
        """Columns generating the fiber lattice at scale h."""
        return self.P / self.h

    def with_h(self, h: int) -> "LatticeData":
        if not isinstance(h, int) or h < 1:
            raise InvalidSpec(f"h must be an integer >= 1, got {h!r}")
        return dataclasses.replace(self, h=h)


@dataclass(frozen=True)
class DiameterBound:
    """Submersion diameter bound: upper = base_diam + fiber_sup.

    `upper_paper` repeats the sum with the coarser base value 1 instead
    of the geometric circle diameter 1/2.  `sampled` is an optional graph
    estimate, filled in only by `sampled_diameter` callers.
    """

    base_diam: float
    fiber_sup: float
    upper: float
    upper_paper: float
    sampled: float | None = None

    def to_json_dict(self) -> dict:
        return {
            "base_diam": self.base_diam,
            "fiber_sup": self.fiber_sup,
            "upper": self.upper,
            "upper_paper": self.upper_paper,
            "sampled": self.sampled,
        }


def conjugator(t_mat: IntMatrix, spectrum: Spectrum) -> LatticeData:
    """Real P with Exp(A) P = P T, built from the eigendecomposition.

    Write V for the complex eigenvector matrix of T with columns matched
    and ordered to the spectrum's blocks (each conjugate pair adjacent,
    v then conj v), and W for the corresponding eigenvectors of the block
    matrix Exp(A) (e_i +- i e_{i+1} per pair, e_i per real root).  Then
    W V^-1 intertwines the two actions and is real up to round-off, and
    its columns are real/imaginary eigenvector combinations of T.
    Residual above 1e-8 or an eigenvalue match worse than 1e-6 raises
    ConjugationFailure.
    """
    n = t_mat.n
    if n != spectrum.n:
        raise DimensionMismatch(f"matrix is {n}x{n} but spectrum has n={spectrum.n}")
    tf = np.array(t_mat.entries, dtype=float)
    if t_mat == IntMatrix.identity(n):
        return LatticeData(T=t_mat, P=np.eye(n), h=1, residual=0.0, cond=1.0)

    eigvals, eigvecs = np.linalg.eig(tf)
    used = np.zeros(n, dtype=bool)

    def take_nearest(target: complex) -> int:
        dist = np.abs(eigvals - target)
        dist[used] = np.inf
        idx = int(np.argmin(dist))
        if dist[idx] > _MATCH_TOL:
            raise ConjugationFailure(
                f"no eigenvalue of T within {_MATCH_TOL:g} of {target:.6g} "
                f"(closest at distance {dist[idx]:.3g}); spectrum does not match T",
                residual=float(dist[idx]),
                cond=float("nan"),
            )
        used[idx] = True
        return idx

    v = np.zeros((n, n), dtype=complex)
    w = np.zeros((n, n), dtype=complex)
    col = 0
    for lam, phi in spectrum.pairs:
        target = complex(math.exp(lam) * math.cos(phi), math.exp(lam) * math.sin(phi))
        i = take_nearest(target)
        # consume the conjugate partner as well
        take_nearest(target.conjugate())
        vec = eigvecs[:, i]
        v[:, col] = vec
        v[:, col + 1] = np.conj(vec)
        w[col, col] = 1.0
        w[col + 1, col] = 1.0j
        w[col, col + 1] = 1.0
        w[col + 1, col + 1] = -1.0j
        col += 2
    for lam in spectrum.reals:
        i = take_nearest(complex(math.exp(lam), 0.0))
        vec = eigvecs[:, i]
        # real eigenvalue: strip the (tiny) imaginary part after fixing phase
        pivot = vec[int(np.argmax(np.abs(vec)))]
        vec = vec * (abs(pivot) / pivot)
        v[:, col] = np.real(vec)
        w[col, col] = 1.0
        col += 1

    p_complex = w @ np.linalg.inv(v)
    imag_size = float(np.max(np.abs(np.imag(p_complex))))
    p = np.real(p_complex)
    scale = float(np.max(np.abs(p)))
    if not np.isfinite(scale) or scale == 0.0 or imag_size > 1e-6 * max(scale, 1.0):
        raise ConjugationFailure(
            f"conjugator failed to realify (imaginary size {imag_size:.3g})",
            residual=imag_size,
            cond=float("nan"),
        )

    exp_a = _exp_from_spectrum(spectrum)
    residual = float(np.linalg.norm(exp_a @ p - p @ tf, "fro") / np.linalg.norm(p, "fro"))
    cond = float(np.linalg.cond(p))
    if residual > _RESIDUAL_TOL:
        raise ConjugationFailure(
            f"conjugation residual {residual:.3e} exceeds {_RESIDUAL_TOL:g} "
            f"(cond(P) = {cond:.3e})",
            residual=residual,
            cond=cond,
        )
    return LatticeData(T=t_mat, P=p, h=1, residual=residual, cond=cond)


def _exp_from_spectrum(spectrum: Spectrum) -> np.ndarray:
    """Block matrix Exp(A) for the generator the spectrum encodes."""
    return exp_tA_closed(assemble_generator(spectrum), 1.0)


def lattice_invariance_check(lattice: LatticeData, a: BlockGenerator) -> float:
    """Largest Euclidean distance from Exp(A) b to the lattice, over the
    basis columns b, measured by rounding coordinates in the P basis.
    Must come out below 1e-8 * ||b|| for a genuine invariant lattice."""
    if a.n != lattice.T.n:
        raise DimensionMismatch(f"generator dim {a.n} vs lattice dim {lattice.T.n}")
    basis = lattice.basis()
    image = exp_tA_closed(a, 1.0) @ basis
    coords = np.linalg.solve(basis, image)
    defect = basis @ (coords - np.round(coords))
    return float(np.max(np.linalg.norm(defect, axis=0)))


def _gs_covering_bound(basis: np.ndarray) -> float:
    """Covering radius bound (1/2) sqrt(sum ||b_i*||^2) via QR: the
    magnitudes of R's diagonal are exactly the Gram-Schmidt norms."""
    r = np.linalg.qr(basis, mode="r")
    diag = np.abs(np.diag(r))
    if np.min(diag) < 1e-12 * max(np.max(diag), 1.0):
        raise DegenerateBasis(f"lattice basis nearly singular (GS norms {diag})")
    return 0.5 * float(np.sqrt(np.sum(diag**2)))


def fiber_gs_bound(lattice: LatticeData, a: BlockGenerator, t: float, twists: int = 0) -> float:
    """Covering-radius bound of the fiber lattice over base point t.

    The effective Euclidean basis is Exp(-tA) (1/h) P T^twists.  The
    `twists` argument applies the integer holonomy matrix: the bound is
    basis-dependent, and comparing t against t+1 only makes sense on the
    holonomy-adjusted basis, which is exactly the lattice identity
    Exp(-A) P T = P."""
    basis = exp_tA_closed(a, -t) @ lattice.basis()
    if twists:
        tw = np.array(lattice.T.entries, dtype=float)
        m = np.linalg.matrix_power(tw, twists) if twists > 0 else np.linalg.inv(
            np.linalg.matrix_power(tw, -twists)
        )
        basis = basis @ m
    return _gs_covering_bound(basis)


def fiber_diameter_upper(lattice: LatticeData, a: BlockGenerator, t_grid: int = 64) -> float:
    """sup over t in [0, 1) of the fiber diameter bound, inflated by the
    Lipschitz safety factor (1 + ||A|| dt e^||A||) to cover the gaps of
    the t grid.  The whole quantity scales exactly as 1/h."""
    if t_grid < 16:
        raise InvalidSpec(f"t_grid must be >= 16, got {t_grid}")
    if a.n != lattice.T.n:
        raise DimensionMismatch(f"generator dim {a.n} vs lattice dim {lattice.T.n}")
    worst = 0.0
    for i in range(t_grid):
        worst = max(worst, fiber_gs_bound(lattice, a, i / t_grid))
    a_norm = float(np.linalg.norm(a.dense(), 2))
    dt = 1.0 / t_grid
    return worst * (1.0 + a_norm * dt * math.exp(a_norm))


def diameter_upper(lattice: LatticeData, a: BlockGenerator, t_grid: int = 64) -> DiameterBound:
    """Submersion bound with the geometric base diameter 1/2, plus the
    coarser base-1 variant."""
    fiber = fiber_diameter_upper(lattice, a, t_grid)
    return DiameterBound(
        base_diam=0.5,
        fiber_sup=fiber,
        upper=0.5 + fiber,
        upper_paper=1.0 + fiber,
        sampled=None,
    )


def _int_inverse(t_mat: IntMatrix) -> IntMatrix:
    """Exact inverse of a unimodular integer matrix via the adjugate."""
    det = det_exact(t_mat)
    if det not in (1, -1):
        raise InvalidSpec(f"matrix with det {det} has no integer inverse")
    n = t_mat.n
    rows = [list(r) for r in t_mat.entries]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = det_exact(IntMatrix.from_rows(minor)) if minor else 1
            adj[j][i] = (-1) ** (i + j) * cof
    inv = IntMatrix.from_rows([[e * det for e in row] for row in adj])
    if inv @ t_mat != IntMatrix.identity(n):
        raise ArithmeticError("adjugate inverse failed verification")
    return inv


def sampled_diameter(lattice: LatticeData, a: BlockGenerator, grid: int = 16) -> float:
    """Graph-geodesic diameter estimate over a fundamental domain.

    Nodes are a grid x grid x ... grid mesh in lattice coordinates (n
    fiber axes plus the base circle); edges connect all coordinate
    neighbors including diagonals, weighted by segment length in the
    midpoint metric.  Crossing the base seam applies the inverse
    holonomy T^-1 to the fiber index, exactly, since T is unimodular.
    Overestimates the true diameter by at most the mesh anisotropy, so
    it must stay below the analytic upper bound plus a whisker.  Kept to
    fiber dimension <= 3 by a hard guard; this is a sanity instrument,
    not part of certification.
    """
    n = lattice.T.n
    if n > 3:
        raise InvalidSpec(f"sampled diameter supports fiber dim <= 3, got {n}")
    if grid < 8:
        raise InvalidSpec(f"grid must be >= 8, got {grid}")
    if a.n != n:
        raise DimensionMismatch(f"generator dim {a.n} vs lattice dim {n}")

    basis = lattice.basis()
    t_fwd = np.array(lattice.T.entries, dtype=np.int64)
    t_inv = np.array(_int_inverse(lattice.T).entries, dtype=np.int64)
    g = grid
    n_nodes = g ** (n + 1)

    # undirected graph: keep one representative per +-pair of offsets
    offsets = [
        off
        for off in iter_product((-1, 0, 1), repeat=n + 1)
        if off > tuple(-x for x in off)
    ]

    # node layout: id = base * g^n + horner(fiber digits)
    fib_coords = np.array(list(iter_product(range(g), repeat=n)), dtype=np.int64)
    base_coords = np.arange(g, dtype=np.int64)

    def fiber_ids(fib: np.ndarray) -> np.ndarray:
        acc = np.zeros(len(fib), dtype=np.int64)
        for col in range(n):
            acc = acc * g + fib[:, col]
        return acc

    def fiber_gram(half_steps: int) -> np.ndarray:
        e = exp_tA_closed(a, -half_steps / (2.0 * g))
        return e.T @ e

    home_ids = fiber_ids(fib_coords)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    for off in offsets:
        d_fib = np.array(off[:n], dtype=np.int64)
        d_base = off[n]
        # segment length depends only on the base level, not the fiber cell
        dv = basis @ (d_fib / g)
        length_at = np.array(
            [
                math.sqrt(float(dv @ fiber_gram(2 * b + d_base) @ dv) + (d_base / g) ** 2)
                for b in range(g)
            ]
        )
        raw = fib_coords + d_fib
        plain = fiber_ids(raw % g)
        up = fiber_ids((raw @ t_inv.T) % g)
        down = fiber_ids((raw @ t_fwd.T) % g)
        for base in base_coords:
            nb = int(base) + d_base
            if nb == g:
                # base seam upward: unroll to t = 1, map back via T^-1
                tgt = up
                nb = 0
            elif nb == -1:
                # base seam downward: unroll to t = -1/g, map up via T
                tgt = down
                nb = g - 1
            else:
                tgt = plain
            rows.append(int(base) * g**n + home_ids)
            cols.append(nb * g**n + tgt)
            weights.append(np.full(len(home_ids), length_at[int(base)]))

    graph = scipy.sparse.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_nodes, n_nodes),
    )
    ncomp, _ = scipy.sparse.csgraph.connected_components(graph, directed=False)
    if ncomp != 1:
        raise InvalidSpec(f"grid {g} too coarse: graph fell into {ncomp} components")

    diameter = 0.0
    chunk = max(1, min(256, n_nodes))
    for start in range(0, n_nodes, chunk):
        idx = np.arange(start, min(start + chunk, n_nodes))
        dist = scipy.sparse.csgraph.dijkstra(graph, directed=False, indices=idx)
        diameter = max(diameter, float(np.max(dist)))
    if not math.isfinite(diameter):
        raise InvalidSpec("graph distances diverged; grid disconnected")
    return diameter
