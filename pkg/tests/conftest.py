"""Shared test-side oracles, independent of the code under test."""

from __future__ import annotations

import math

import numpy as np

from pinchcert.solvgroup import BlockGenerator, GroupElement, metric_at


def jacobi_curvature_estimate(a: BlockGenerator, h: float = 0.01) -> float:
    """Geodesic-deviation oracle for the 2-dimensional group.

    The vertical lines t -> (v0, t) are unit-speed geodesics and the
    coordinate field along them is a Jacobi field whose norm J(t) comes
    straight from the metric Gram.  J'' = -K J, so a Richardson-refined
    second difference of J recovers K from metric evaluations alone.
    """

    def jnorm(t: float) -> float:
        g = metric_at(GroupElement(np.zeros(1), t), a)
        return math.sqrt(g[0, 0])

    j0 = jnorm(0.0)

    def est(hh: float) -> float:
        return -(jnorm(hh) - 2.0 * j0 + jnorm(-hh)) / (hh * hh * j0)

    return (4.0 * est(h / 2.0) - est(h)) / 3.0
