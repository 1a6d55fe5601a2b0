"""Spectrum layer: closed-form roots, the simultaneous-iteration solver,
and the two scalar checks built on log-moduli.

Oracles: the quadratic formula for y^2 + s*3*y + 1 (computed here,
independently of the module), direct polynomial evaluation at claimed
roots, and frozen decimal constants.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from pinchcert.errors import InvalidSpec, SolverFailure, UnrepresentableGenerator
from pinchcert.exactalg import IntPoly, PolySpec, build_polynomial
from pinchcert.spectra import (
    LOG_Y_PLUS,
    Spectrum,
    check_not_nilcoverable,
    cross_check_roots,
    nilcover_witness,
    roots_closed_form,
    roots_iterative,
    verify_spectral_bound,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class TestClosedForm:
    def test_frozen_constant(self):
        # log((3 + sqrt 5)/2), frozen to full precision
        assert LOG_Y_PLUS == pytest.approx(0.9624236501192069, abs=1e-15)
        assert LOG_Y_PLUS == pytest.approx(2.0 * math.log(GOLDEN), abs=1e-15)

    def test_n2_real_roots_match_quadratic_formula(self):
        s = roots_closed_form(PolySpec(k=1, sign=-1))
        assert s.pairs == ()
        assert len(s.reals) == 2
        # oracle: y^2 - 3y + 1 = 0 has roots (3 +- sqrt 5)/2
        y_hi = (3.0 + math.sqrt(5.0)) / 2.0
        assert math.exp(s.reals[0]) == pytest.approx(y_hi, abs=1e-14)
        assert math.exp(s.reals[1]) == pytest.approx(1.0 / y_hi, abs=1e-14)

    def test_n4_all_angles_quarter_turn(self):
        s = roots_closed_form(PolySpec(k=2, sign=1))
        assert len(s.pairs) == 2 and s.reals == ()
        for lam, phi in s.pairs:
            assert phi == pytest.approx(math.pi / 2.0, abs=1e-15)
        assert s.lambda_max == pytest.approx(0.48121182505960345, abs=1e-15)

    def test_n5_block_structure(self):
        s = roots_closed_form(PolySpec(k=2, sign=1, odd_factor=True))
        assert len(s.pairs) == 2
        assert s.reals == (0.0,)

    def test_lambda_max_scaling(self):
        for k in (1, 2, 3, 8, 16):
            spec = PolySpec.for_dimension(2 * k)
            s = roots_closed_form(spec)
            assert s.lambda_max * k == pytest.approx(LOG_Y_PLUS, abs=1e-15)

    @pytest.mark.parametrize("k", range(1, 17))
    @pytest.mark.parametrize("odd", [False, True])
    def test_roots_satisfy_polynomial(self, k, odd):
        spec = PolySpec.for_dimension(2 * k + (1 if odd else 0))
        p = build_polynomial(spec)
        s = roots_closed_form(spec)
        scale = sum(abs(c) for c in p.coeffs)
        for r in s.complex_roots():
            assert abs(p.evaluate(r)) < 1e-12 * scale

    @pytest.mark.parametrize("k,odd", [(1, False), (3, True), (5, False)])
    def test_log_moduli_sum_to_zero(self, k, odd):
        # unimodularity: the log-moduli cancel exactly
        n = 2 * k + (1 if odd else 0)
        s = roots_closed_form(PolySpec.for_dimension(n))
        assert abs(sum(s.log_moduli())) < 1e-12

    def test_parity_mismatch_rejected(self):
        with pytest.raises(UnrepresentableGenerator):
            roots_closed_form(PolySpec(k=1, sign=1))
        with pytest.raises(UnrepresentableGenerator):
            roots_closed_form(PolySpec(k=2, sign=-1))

    def test_spectrum_validates_multiplicity(self):
        with pytest.raises(InvalidSpec):
            Spectrum(n=3, pairs=((0.1, 1.0),), reals=(), lambda_max=0.1)
        with pytest.raises(InvalidSpec):
            Spectrum(n=2, pairs=((0.1, math.pi),), reals=(), lambda_max=0.1)

    def test_json_shape(self):
        d = roots_closed_form(PolySpec(k=2, sign=1)).to_json_dict()
        assert set(d) == {"n", "pairs", "reals", "lambda_max"}
        assert d["pairs"][0].keys() == {"lambda", "phi"}


class TestIterative:
    def test_simple_quadratic(self):
        roots = roots_iterative(IntPoly((1, -3, 1)))
        got = sorted(float(r.real) for r in roots)
        y_hi = (3.0 + math.sqrt(5.0)) / 2.0
        assert got[0] == pytest.approx(1.0 / y_hi, abs=1e-12)
        assert got[1] == pytest.approx(y_hi, abs=1e-12)
        assert max(abs(r.imag) for r in roots) < 1e-12

    def test_double_root_reported_twice(self):
        roots = roots_iterative(IntPoly((1, -2, 1)))
        assert len(roots) == 2
        for r in roots:
            assert abs(r - 1.0) < 1e-6

    def test_rejects_zero_constant_term(self):
        with pytest.raises(InvalidSpec):
            roots_iterative(IntPoly((1, 1, 0)))

    def test_stagnation_raises_with_residual(self):
        with pytest.raises(SolverFailure) as exc:
            roots_iterative(IntPoly((1, 0, 3, 0, 1)), max_iter=1)
        assert exc.value.worst_residual > 0.0

    @pytest.mark.parametrize("k", range(1, 17))
    @pytest.mark.parametrize("odd", [False, True])
    def test_cross_check_against_closed_form(self, k, odd):
        spec = PolySpec.for_dimension(2 * k + (1 if odd else 0))
        p = build_polynomial(spec)
        s = roots_closed_form(spec)
        mismatch = cross_check_roots(s, roots_iterative(p))
        assert mismatch < 1e-10

    def test_deterministic(self):
        p = build_polynomial(PolySpec(k=4))
        a = roots_iterative(p)
        b = roots_iterative(p)
        assert np.array_equal(a, b)


class TestSpectralBound:
    def test_even_dimensions_hold(self):
        for n in range(2, 33, 2):
            sb = verify_spectral_bound(roots_closed_form(PolySpec.for_dimension(n)))
            assert sb.holds and sb.margin > 0.0

    def test_small_odd_dimensions_fail(self):
        for n in range(3, 26, 2):
            sb = verify_spectral_bound(roots_closed_form(PolySpec.for_dimension(n)))
            assert not sb.holds and sb.margin < 0.0

    def test_odd_27_first_to_hold(self):
        sb = verify_spectral_bound(roots_closed_form(PolySpec.for_dimension(27)))
        assert sb.holds
        assert sb.margin == pytest.approx(4.148560336583729e-05, abs=1e-12)

    def test_margin_value_n3(self):
        sb = verify_spectral_bound(roots_closed_form(PolySpec.for_dimension(3)))
        assert sb.margin == pytest.approx(2.0 / 3.0 - LOG_Y_PLUS, abs=1e-15)


class TestNilcoverable:
    def test_construction_witness_n2(self):
        s = roots_closed_form(PolySpec.for_dimension(2))
        assert check_not_nilcoverable(s, tol=0.01)
        # e^lambda_max - 1 is the golden ratio at n = 2
        assert nilcover_witness(s) == pytest.approx(GOLDEN, abs=1e-12)

    def test_zero_spectrum_is_coverable(self):
        s = Spectrum(n=2, pairs=((0.0, math.pi / 2),), reals=(), lambda_max=0.0)
        assert not check_not_nilcoverable(s, tol=0.01)
        assert nilcover_witness(s) == 0.0

    def test_tol_validation(self):
        s = roots_closed_form(PolySpec.for_dimension(2))
        with pytest.raises(InvalidSpec):
            check_not_nilcoverable(s, tol=0.0)
