import math

import numpy as np
import pytest

from relaylab.laplace import (QuadratureSpec, joint_exponent_2d, joint_exponent_split,
                              laplace_joint, laplace_single, shot_noise_coefficient)
from relaylab.params import SystemParams

P = SystemParams()


def test_single_trivial_values():
    assert laplace_single(0.0, 1.0, 1e-3, 4.0) == 1.0
    assert laplace_single(5.0, 1.0, 0.0, 4.0) == 1.0


def test_single_rejects_flat_path_loss():
    with pytest.raises(ValueError, match="non-integrable path loss"):
        laplace_single(1.0, 1.0, 1e-3, 2.0)


def test_single_alpha4_closed_form():
    # alpha = 4: exponent is (pi^2/2) z sqrt(s p)
    s, p, z = 3.0, 10.0, 1e-3
    expect = math.exp(-(math.pi ** 2 / 2) * z * math.sqrt(s * p))
    assert laplace_single(s, p, z, 4.0) == pytest.approx(expect, rel=1e-14)


def test_coefficient_alpha3_value():
    # (2/3) pi^2 z p^(2/3) / sin(2 pi / 3) at Table 1 carrier values
    c = shot_noise_coefficient(10.0, 1e-3, 3.0)
    assert c == pytest.approx(2 / 3 * math.pi ** 2 * 1e-3 * 10 ** (2 / 3) / math.sin(2 * math.pi / 3),
                              rel=1e-14)
    assert c == pytest.approx(0.0352651, abs=1e-7)


def test_single_decreasing():
    s = np.logspace(-3, 3, 50)
    v = laplace_single(s, P.Ptilde_T, P.zeta_tilde, P.alpha_tilde)
    assert np.all(np.diff(v) < 0)
    assert np.all((v > 0) & (v <= 1))


def test_joint_trivial():
    assert laplace_joint(0.0, 0.0, P.P_T, P.zeta, P.alpha, P.d_RD) == 1.0
    assert laplace_joint(1e6, 1e6, P.P_T, 0.0, P.alpha, P.d_RD) == 1.0


@pytest.mark.parametrize("s", [1e4, 1e6, 1e8])
def test_joint_factorizes_at_zero(s):
    single = laplace_single(s, P.P_T, P.zeta, P.alpha)
    assert laplace_joint(s, 0.0, P.P_T, P.zeta, P.alpha, P.d_RD) == pytest.approx(single, rel=1e-7)
    # the D-side correction is cut where its integrand drops below 1e-12,
    # which leaves an untracked tail of order 1e-6 relative at large s
    assert laplace_joint(0.0, s, P.P_T, P.zeta, P.alpha, P.d_RD) == pytest.approx(single, rel=1e-5)


@pytest.mark.parametrize("s1,s2", [(1e6, 1e6), (625 * 4, 3e5), (1e7, 1e5)])
def test_split_agrees_with_nested_quadrature(s1, s2):
    a = joint_exponent_split(s1, s2, P.P_T, P.alpha, P.d_RD)
    b = joint_exponent_2d(s1, s2, P.P_T, P.alpha, P.d_RD)
    assert a == pytest.approx(b, rel=1e-6)


def test_split_general_alpha_against_nested():
    a = joint_exponent_split(1e6, 2e6, P.P_T, 3.5, P.d_RD)
    b = joint_exponent_2d(1e6, 2e6, P.P_T, 3.5, P.d_RD)
    assert a == pytest.approx(b, rel=1e-5)


def test_joint_bounds_and_monotone():
    prev = 1.0
    for s2 in (0.0, 1e4, 1e5, 1e6, 1e7):
        v = laplace_joint(1e6, s2, P.P_T, P.zeta, P.alpha, P.d_RD)
        assert 0 < v <= prev
        prev = v
    # joint never below the product bound of independent interference
    s1 = s2 = 1e6
    lj = laplace_joint(s1, s2, P.P_T, P.zeta, P.alpha, P.d_RD)
    prod = laplace_single(s1, P.P_T, P.zeta, P.alpha) * laplace_single(s2, P.P_T, P.zeta, P.alpha)
    assert lj >= prod


def test_joint_tolerance_halving_is_stable():
    loose = QuadratureSpec(rel_tol=2e-8, abs_tol=2e-12)
    tight = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12)
    a = laplace_joint(1e6, 1e6, P.P_T, P.zeta, P.alpha, P.d_RD, loose, method="2d")
    b = laplace_joint(1e6, 1e6, P.P_T, P.zeta, P.alpha, P.d_RD, tight, method="2d")
    assert a == pytest.approx(b, rel=1e-6)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(inversion_nodes=4)
