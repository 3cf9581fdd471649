import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from pinchext import (ConvergenceError, DiscFunction, detect_rational,
                      hardy_project_minus, restrict_along_curve)
from pinchext.gallery import (Example2, example1_eval, example1_growth_probe,
                              example1_ring, example2_eval,
                              example2_restriction, gallery_eval,
                              remark1_eval, remark1_ring)


def _example1_term(lam, z, n):
    prod = 1.0 + 0j
    for j in range(1, n + 1):
        prod *= (z - (2.0 / 3.0 * lam) ** j)
    return 3.0 ** (-4 * n ** 3) * prod * lam ** (-n * n) * z ** n


def _example1_direct(lam, z, depth):
    return sum(_example1_term(lam, z, n) for n in range(1, depth + 1))


# ---------------------------------------------------------------- example 1

def test_example1_truncates_on_curves(rng):
    # on z = ((2/3) lam)^l the factor j = l kills every term with n >= l
    for l in range(2, 9):
        for _ in range(5):
            lam = rng.uniform(0.3, 1.0) * np.exp(2j * np.pi * rng.uniform())
            z = (2.0 / 3.0 * lam) ** l
            full = example1_eval(lam, z, n_trunc=40)
            short = example1_eval(lam, z, n_trunc=l - 1)
            assert abs(full - short) < 1e-13


def test_example1_vanishes_on_first_curve(rng):
    for _ in range(5):
        lam = rng.uniform(0.3, 1.0) * np.exp(2j * np.pi * rng.uniform())
        z = 2.0 / 3.0 * lam
        assert example1_eval(lam, z) == 0.0


def test_example1_matches_direct_sum(rng):
    for _ in range(10):
        lam = rng.uniform(0.4, 1.0) * np.exp(2j * np.pi * rng.uniform())
        z = 0.3 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        direct = _example1_direct(lam, z, 6)
        assert abs(example1_eval(lam, z) - direct) <= 1e-12 * max(1.0, abs(direct))


def test_example1_terms_decay_geometrically():
    mags = [abs(_example1_term(0.5, 0.1, n)) for n in range(1, 7)]
    for a, b in zip(mags[3:], mags[4:]):
        assert b < 0.5 * a or b == 0.0


def test_example1_term_bound_holds(rng):
    # |term n| <= 3^{-4n^3-n} (1/eps)^{1.5(n^2+n)} on the compact
    # eps <= |lam| <= 1/eps, |z| <= 1/(3 eps)
    from pinchext.gallery import example1_term_bound
    eps = 0.3
    for _ in range(20):
        lam = rng.uniform(eps, 1.0 / eps) * np.exp(2j * np.pi * rng.uniform())
        z = rng.uniform(0, 1 / (3 * eps)) * np.exp(2j * np.pi * rng.uniform())
        for n in range(1, 5):
            assert abs(_example1_term(lam, z, n)) <= example1_term_bound(n, eps)


def test_example1_rejects_origin():
    with pytest.raises(ValueError):
        example1_eval(0.0, 0.1)


def test_example1_restriction_is_polynomial():
    # the restriction to C_l extends over the disc: Hardy-minus part tiny
    ring = example1_ring(0.3)
    for l in (2, 3):
        phi = DiscFunction([0j] * l + [(2.0 / 3.0) ** l])
        g = restrict_along_curve(ring, phi, m=64)
        assert hardy_project_minus(g).sup_norm < 1e-10


def test_growth_probe_increasing():
    samples = example1_growth_probe(1, 0.1, range(6, 13))
    scaled = [s.ratios[5] for s in samples]  # value * lam^6
    for a, b in zip(scaled, scaled[1:]):
        assert b > a


def test_growth_probe_ratio_definition():
    (s,) = example1_growth_probe(1, 0.1, [8])
    for p in range(1, 7):
        assert mp.almosteq(s.ratios[p - 1], s.value * mp.mpf(s.lam) ** p)


def test_growth_probe_parameter_checks():
    with pytest.raises(ValueError):
        example1_growth_probe(1, 0.6, range(4, 6))  # c too large
    with pytest.raises(ValueError):
        example1_growth_probe(0, 0.1, range(4, 6))
    assert example1_growth_probe(1, 0.1, []) == ()


# ---------------------------------------------------------------- example 2

def test_example2_polynomial_invariants():
    ex = Example2()
    for l in range(13):
        coeffs = ex.p_coeffs(l)
        assert len(coeffs) == l + 2  # degree l + 1
        assert abs(ex.p_sup(l) * math.factorial(l) - 1.0) < 1e-10
        for j in range(l + 1):
            assert abs(ex.p_eval(l, ex.z(j))) < 1e-16 / math.factorial(l)
        assert abs(ex.p_eval(l, 0.0)) > 0.0


def test_example2_restriction_pole_orders():
    for k in (1, 4, 5, 8):
        psi = example2_restriction(k)
        verdict = detect_rational(psi, 10, tail_rel=1e-15)
        assert verdict.is_rational
        (pole, mult), = verdict.rational.pole_list
        assert abs(pole) < 1e-8
        assert mult == k


def test_example2_restriction_at_zero_index():
    psi = example2_restriction(0)
    assert psi.sup_norm == 0.0


def test_example2_off_sequence_does_not_truncate():
    lam, z = 0.2 + 0j, 0.37 + 0j
    v10 = example2_eval(lam, z, l_trunc=10)
    v20 = example2_eval(lam, z, l_trunc=20)
    assert abs(v20 - v10) > 1e-10
    circle = 0.5 * np.exp(2j * np.pi * np.arange(16) / 16)
    vals = [abs(example2_eval(l, z)) for l in circle]
    assert max(vals) > 0.0


def test_example2_rejects_origin():
    with pytest.raises(ValueError):
        example2_eval(0.0, 0.1)


# ----------------------------------------------------------------- remark 1

def test_remark1_values():
    assert remark1_eval(1.0, 0.0) == 1.0
    assert abs(remark1_eval(0.5, 0.1) - cmath.exp(0.2)) < 1e-15
    with pytest.raises(ValueError):
        remark1_eval(0.0, 0.1)


def test_remark1_constant_along_scaled_lines():
    ring = remark1_ring(0.3)
    for k in (1, 3, 7):
        g = restrict_along_curve(ring, DiscFunction([0, 1.0 / k]), m=64)
        np.testing.assert_allclose(g.samples, cmath.exp(1.0 / k), atol=1e-13)


def test_gallery_dispatch():
    assert gallery_eval("remark1", 1.0, 0.0) == 1.0
    assert gallery_eval("example1", 0.5, 0.1) == example1_eval(0.5, 0.1)
    assert gallery_eval("example2", 0.5, 0.1) == example2_eval(0.5, 0.1)
    with pytest.raises(ValueError):
        gallery_eval("nope", 1.0, 0.0)
