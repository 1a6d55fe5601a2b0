"""Root data of the construction polynomial.

Substituting y = x^k reduces x^(2k) + s*3*x^k + 1 to y^2 + s*3*y + 1,
whose roots have moduli (3 + sqrt 5)/2 and its reciprocal.  Every root of
the full polynomial therefore has log-modulus +-log((3 + sqrt 5)/2) / k,
and the odd factor (x - 1) contributes a single log-modulus of 0.  The
closed form below writes those values down directly; the iterative solver
is an independent route used to cross-check it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec, SolverFailure, UnrepresentableGenerator
from .exactalg import IntPoly, PolySpec

# log of the larger quadratic root modulus (3 + sqrt 5)/2, which equals
# twice the log of the golden ratio
LOG_Y_PLUS = math.log((3.0 + math.sqrt(5.0)) / 2.0)


@dataclass(frozen=True)
class Spectrum:
    """Log-moduli and angles of the construction roots.

    ``pairs`` holds one (log_modulus, angle) entry per complex-conjugate
    pair with angle in (0, pi); ``reals`` holds the log-moduli of the real
    positive roots.  Negative real roots are unrepresentable here by
    design: the parity-safe sign convention excludes them.
    """

    n: int
    pairs: tuple[tuple[float, float], ...]
    reals: tuple[float, ...]
    lambda_max: float

    def __post_init__(self) -> None:
        if 2 * len(self.pairs) + len(self.reals) != self.n:
            raise InvalidSpec(
                f"spectrum multiplicities do not add up to n={self.n}: "
                f"{len(self.pairs)} pairs + {len(self.reals)} reals"
            )
        for lam, phi in self.pairs:
            if not (0.0 < phi < math.pi):
                raise InvalidSpec(f"pair angle must lie in (0, pi), got {phi}")

    def log_moduli(self) -> list[float]:
        """All n log-moduli with multiplicity."""
        out: list[float] = []
        for lam, _ in self.pairs:
            out.extend((lam, lam))
        out.extend(self.reals)
        return out

    def complex_roots(self) -> list[complex]:
        """The n roots this spectrum encodes, as complex numbers."""
        out: list[complex] = []
        for lam, phi in self.pairs:
            r = math.exp(lam)
            out.append(complex(r * math.cos(phi), r * math.sin(phi)))
            out.append(complex(r * math.cos(phi), -r * math.sin(phi)))
        out.extend(complex(math.exp(lam), 0.0) for lam in self.reals)
        return out

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "pairs": [{"lambda": lam, "phi": phi} for lam, phi in self.pairs],
            "reals": list(self.reals),
            "lambda_max": self.lambda_max,
        }


@dataclass(frozen=True)
class SpectralBound:
    """Result of comparing lambda_max against 2/n."""

    holds: bool
    margin: float


def roots_closed_form(spec: PolySpec) -> Spectrum:
    """Spectrum of the construction polynomial via the y = x^k substitution.

    Valid sign/parity combinations are (k odd, sign -1) and (k even,
    sign +1).  The other two put a negative real number among the k-th
    roots, and an unpaired negative real eigenvalue admits no real
    logarithm, so those specs are rejected rather than silently mangled.
    """
    k, sign = spec.k, spec.sign
    if (k % 2 == 1) == (sign == 1):
        raise UnrepresentableGenerator(
            f"k={k} with middle sign {sign:+d}*3 yields negative real roots; "
            f"flip the sign (see PolySpec.for_dimension)"
        )
    lam = LOG_Y_PLUS / k
    pairs: list[tuple[float, float]] = []
    reals: list[float] = []
    if sign == 1:
        # y roots are negative: angles (2j + 1) * pi / k, none real
        angles = [(2 * j + 1) * math.pi / k for j in range(k // 2)]
    else:
        # y roots are positive: j = 0 gives a real positive root per branch
        angles = [2.0 * math.pi * j / k for j in range(1, (k - 1) // 2 + 1)]
        reals.extend((lam, -lam))
    for branch in (lam, -lam):
        for phi in angles:
            pairs.append((branch, phi))
    if spec.odd_factor:
        reals.append(0.0)
    pairs.sort(key=lambda t: (-t[0], t[1]))
    reals.sort(reverse=True)
    return Spectrum(n=spec.n, pairs=tuple(pairs), reals=tuple(reals), lambda_max=lam)


def roots_iterative(
    p: IntPoly,
    residual_target: float = 1e-13,
    max_iter: int = 500,
) -> np.ndarray:
    """All complex roots by Aberth-Ehrlich simultaneous iteration.

    Start points sit on a circle of Cauchy-bound radius with a fixed
    angular offset (deterministic, breaks the real-axis symmetry).  The
    stop rule is residual |p(z)| < residual_target * (1 + |z|)^deg for
    every root; three extra sweeps then polish toward machine precision,
    which the downstream 1e-10 cross-check against the closed form relies
    on.  Raises SolverFailure with the worst residual on stagnation.
    """
    deg = p.degree
    if deg < 1:
        raise InvalidSpec("need degree >= 1 to find roots")
    if p.coeffs[-1] == 0:
        raise InvalidSpec("zero constant term: factor out x first")
    c = np.array(p.coeffs, dtype=float)
    dc = c[:-1] * np.arange(deg, 0, -1)

    radius = 1.0 + np.max(np.abs(c[1:])) / abs(c[0])
    j = np.arange(deg)
    z = radius * np.exp(1j * (2.0 * np.pi * (j + 0.5) / deg + 0.4))

    def residuals_ok(zz: np.ndarray) -> bool:
        res = np.abs(np.polyval(c, zz))
        return bool(np.all(res < residual_target * (1.0 + np.abs(zz)) ** deg))

    converged_at = -1
    for it in range(max_iter):
        pv = np.polyval(c, z)
        dv = np.polyval(dc, z)
        dv = np.where(np.abs(dv) < 1e-300, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
        z = z - w / denom
        if converged_at < 0 and residuals_ok(z):
            converged_at = it
        if converged_at >= 0 and it >= converged_at + 3:
            return z
    if converged_at >= 0:
        return z
    res = np.abs(np.polyval(c, z))
    worst = float(np.max(res / (1.0 + np.abs(z)) ** deg))
    raise SolverFailure(
        f"root iteration stagnated after {max_iter} sweeps (worst scaled residual {worst:.3e})",
        worst_residual=worst,
    )


def cross_check_roots(spectrum: Spectrum, roots: np.ndarray) -> float:
    """Greedy nearest-neighbor matching of the closed-form root multiset
    against an iteratively computed one; returns the largest pairing
    distance.  Greedy is adequate here because root separations are three
    orders of magnitude above the tolerances in play."""
    targets = spectrum.complex_roots()
    if len(targets) != len(roots):
        raise InvalidSpec(f"root count mismatch: {len(targets)} vs {len(roots)}")
    remaining = list(roots)
    worst = 0.0
    for t in targets:
        dists = [abs(t - r) for r in remaining]
        i = min(range(len(dists)), key=dists.__getitem__)
        worst = max(worst, dists[i])
        remaining.pop(i)
    return worst


def verify_spectral_bound(spectrum: Spectrum) -> SpectralBound:
    """Check lambda_max < 2/n and report the signed margin 2/n - lambda_max.

    The bound holds for every even n, and for odd n only from n = 27 up;
    the small odd dimensions are reported honestly as failures.
    """
    margin = 2.0 / spectrum.n - spectrum.lambda_max
    return SpectralBound(holds=margin > 0.0, margin=margin)


def check_not_nilcoverable(spectrum: Spectrum, tol: float = 0.01) -> bool:
    """True iff some log-modulus exceeds tol in absolute value, i.e. the
    holonomy genuinely expands/contracts and the quotient cannot be
    covered by a nilmanifold with bounded geometry."""
    if tol <= 0:
        raise InvalidSpec(f"tolerance must be positive, got {tol}")
    return any(abs(lam) > tol for lam in spectrum.log_moduli())


def nilcover_witness(spectrum: Spectrum) -> float:
    """max |e^lambda - 1| over the spectrum: how far the holonomy matrix
    eigenvalues sit from the unit value a flat/nil structure would need."""
    return max(abs(math.exp(lam) - 1.0) for lam in spectrum.log_moduli())
