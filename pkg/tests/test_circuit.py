import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcwqed.circuit import (
    CircuitParams,
    calibrated_params,
    chain_eigenmodes,
    linear_dispersion,
    nominal_params,
    squid_dispersion,
    uniform_inverse_inductance,
)

# frozen from a 40-digit mpmath evaluation of the dispersion formula with the
# literal parameter table (lj = l0/alpha0 = 2/3 nH, cg = 0.4 fF, cj = 90 fF)
OMEGA_ZONE_EDGE = 1.2902778267273619e11  # at k = pi/d0 [rad/s]
V_J = 1.9364916731037084e6  # [m/s]


def test_params_validation():
    with pytest.raises(ValueError):
        nominal_params(cj_over_cg=-1.0)
    with pytest.raises(ValueError):
        CircuitParams(1e-6, 4e-16, 0.0, 2e-10, 0.3, 0.31, 2 * np.pi / 333e-6)
    with pytest.raises(ValueError, match="integer multiple"):
        CircuitParams(1e-6, 4e-16, 0.0, 2e-10, 0.3, 0.045, 2 * np.pi / 333.4e-6)


def test_preset_relation():
    lit, cal = nominal_params(), calibrated_params()
    assert cal.alpha0 == pytest.approx(np.cos(0.3 * np.pi), rel=1e-12)
    assert cal.delta_alpha == pytest.approx(
        2 * np.pi * 0.045 * np.sin(0.3 * np.pi), rel=1e-12
    )
    for name in ("d0", "cg", "cj", "l0", "km"):
        assert getattr(lit, name) == getattr(cal, name)


def test_dispersion_zero_at_k0():
    assert squid_dispersion(nominal_params(), 0.0) == 0.0
    assert linear_dispersion(nominal_params(), 0.0) == 0.0


def test_dispersion_pinned_zone_edge():
    p = nominal_params()
    assert squid_dispersion(p, np.pi / p.d0) == pytest.approx(OMEGA_ZONE_EDGE, rel=1e-14)


def test_linear_dispersion_velocity():
    p = nominal_params()
    assert p.vj == pytest.approx(V_J, rel=1e-14)
    assert linear_dispersion(p, 1e4) == pytest.approx(1e4 * V_J, rel=1e-14)
    # reported order of magnitude for the device family
    assert 1e6 < p.vj < 1e7


def test_small_k_limit_matches_linear():
    # deviation is the cj correction, quadratic in k
    p = nominal_params()
    for k, tol in ((1.0, 1e-9), (10.0, 1e-7), (100.0, 1e-5)):
        assert squid_dispersion(p, k) / linear_dispersion(p, k) == pytest.approx(
            1.0, abs=tol
        )


def test_out_of_zone_rejected():
    p = nominal_params()
    with pytest.raises(ValueError):
        squid_dispersion(p, 1.01 * np.pi / p.d0)


@given(st.floats(min_value=1.0, max_value=3.1e6))
def test_dispersion_even_and_positive(k):
    p = nominal_params()
    assert squid_dispersion(p, k) == squid_dispersion(p, -k)
    assert squid_dispersion(p, k) > 0


@given(
    st.floats(min_value=0.05, max_value=1.0),
    st.floats(min_value=1.0, max_value=3.1e6),
)
def test_cj_zero_analytic_form(alpha0, k):
    """Without the junction capacitance the band is a pure |sin| form."""
    p = CircuitParams(1e-6, 4e-16, 0.0, 2e-10, alpha0, 0.0, 2 * np.pi / 333e-6)
    expected = (2 / p.d0) * p.vj * abs(np.sin(k * p.d0 / 2))
    assert squid_dispersion(p, k) == pytest.approx(expected, rel=1e-12)


def test_monotone_in_first_zone():
    p = nominal_params()
    ks = np.linspace(0, np.pi / p.d0, 400)
    om = squid_dispersion(p, ks)
    assert np.all(np.diff(om) > -1e-9 * om[-1])


# --- chain eigenmodes -------------------------------------------------------


def test_chain_requires_junction_list():
    p = nominal_params()
    with pytest.raises(ValueError, match="junction"):
        chain_eigenmodes(p, 5, np.ones(5) / p.lj)
    with pytest.raises(ValueError):
        chain_eigenmodes(p, 5, [1.0, -1.0, 1.0, 1.0])


def test_chain_three_nodes_matches_dense_oracle():
    """Explicit 3x3 matrices diagonalized independently."""
    p = nominal_params()
    inv = uniform_inverse_inductance(p, 3)
    omega, vecs = chain_eigenmodes(p, 3, inv)

    cj, cg, il = p.cj, p.cg, 1 / p.lj
    cmat = np.array(
        [[cg + cj, -cj, 0.0], [-cj, cg + 2 * cj, -cj], [0.0, -cj, cg + cj]]
    )
    linv = np.array([[il, -il, 0.0], [-il, 2 * il, -il], [0.0, -il, il]])
    s = np.linalg.inv(np.linalg.cholesky(cmat))
    w = np.linalg.eigvalsh(s @ linv @ s.T)
    assert omega == pytest.approx(np.sqrt(np.clip(w, 0, None)), rel=1e-10, abs=1e-3)
    # transformed-basis orthonormality
    gram = vecs.T @ cmat @ vecs
    assert np.max(np.abs(gram - np.eye(3))) < 1e-10


def test_chain_matches_discrete_dispersion_exactly():
    """Uniform open chain quantizes the plane-wave dispersion at k_n = n*pi/(N*d0)."""
    p = nominal_params()
    n = 240
    omega, _ = chain_eigenmodes(p, n, uniform_inverse_inductance(p, n))
    kn = np.arange(n) * np.pi / (n * p.d0)
    ref = squid_dispersion(p, kn)
    assert omega[0] < 1e-5 * omega[1]  # free-free zero mode, numerical jitter
    assert omega[1:] == pytest.approx(ref[1:], rel=1e-9)


def test_chain_linear_regime_low_modes():
    """With cj = 0 the low modes follow the linear dispersion to < 1%."""
    p = nominal_params(cj_over_cg=0.0)
    n = 200
    omega, _ = chain_eigenmodes(p, n, uniform_inverse_inductance(p, n))
    kn = np.arange(n) * np.pi / (n * p.d0)
    sel = slice(1, n // 10 + 1)
    assert np.all(
        np.abs(omega[sel] / linear_dispersion(p, kn[sel]) - 1) < 0.01
    )


def test_chain_ratio_contour():
    """cj = 450 cg depresses only the modes outside the 90% contour."""
    p0 = nominal_params(cj_over_cg=0.0)
    p1 = nominal_params(cj_over_cg=450.0)
    n = 400
    inv = uniform_inverse_inductance(p0, n)
    om0, _ = chain_eigenmodes(p0, n, inv, return_vectors=False)
    om1, _ = chain_eigenmodes(p1, n, inv, return_vectors=False)
    kn = np.arange(n) * np.pi / (n * p0.d0)
    ratio = np.ones(n)
    ratio[1:] = om1[1:] / om0[1:]
    # contour from the dispersion formula: ratio >= 0.9 iff
    # (cj/cg)(1 - cos k d0) <= (1/0.81 - 1)/2
    inside = (p1.cj / p1.cg) * (1 - np.cos(kn * p0.d0)) <= (1 / 0.81 - 1) / 2
    assert np.all(ratio[inside] >= 0.9 - 1e-9)
    assert np.all(ratio[~inside] < 0.9)


def test_chain_mirror_symmetry():
    rng = np.random.default_rng(7)
    p = nominal_params()
    n = 60
    inv = (1 + 0.3 * rng.random(n - 1)) / p.lj
    om_fwd, _ = chain_eigenmodes(p, n, inv, return_vectors=False)
    om_rev, _ = chain_eigenmodes(p, n, inv[::-1], return_vectors=False)
    assert om_fwd[1:] == pytest.approx(om_rev[1:], rel=1e-10)
    assert max(om_fwd[0], om_rev[0]) < 1e-5 * om_fwd[1]


def test_chain_orthonormal_vectors():
    rng = np.random.default_rng(3)
    p = nominal_params()
    n = 50
    inv = (1 + 0.5 * rng.random(n - 1)) / p.lj
    _, vecs = chain_eigenmodes(p, n, inv)
    cj, cg = p.cj, p.cg
    cmat = np.diag(np.full(n, cg)) + cj * (
        np.diag(np.r_[1.0, np.full(n - 2, 2.0), 1.0])
        - np.diag(np.ones(n - 1), 1)
        - np.diag(np.ones(n - 1), -1)
    )
    gram = vecs.T @ cmat @ vecs
    assert np.max(np.abs(gram - np.eye(n))) < 1e-10
