import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pcwqed.bloch import (
    ModulationProfile,
    band_structure,
    bloch_u,
    bz_grid,
    effective_mass_fit,
)
from pcwqed.circuit import calibrated_params, chain_eigenmodes
from pcwqed.errors import ConvergenceWarning

GHZ = 2 * np.pi * 1e9


def test_profile_constant_without_modulation():
    p = calibrated_params()
    p0 = type(p)(p.d0, p.cg, p.cj, p.l0, p.alpha0, 0.0, p.km)
    prof = ModulationProfile(p0)
    x = np.linspace(-3, 3, 50) * p.lambda_m
    assert prof.inverse_inductance(x) == pytest.approx(
        np.full(50, p.d0 / p.l0 * p.alpha0), rel=1e-14
    )


def test_profile_cosine_peak_value():
    p = calibrated_params()
    prof = ModulationProfile(p)
    assert prof.inverse_inductance(0.0) == pytest.approx(
        (p.d0 / p.l0) * (p.alpha0 + p.delta_alpha), rel=1e-14
    )


def test_profile_square_tie_break():
    """sgn(0) = +1 at the quarter-period point."""
    p = calibrated_params()
    prof = ModulationProfile(p, kind="square")
    assert prof.inverse_inductance(0.25 * p.lambda_m) == pytest.approx(
        (p.d0 / p.l0) * (p.alpha0 + p.delta_alpha), rel=1e-12
    )


@given(st.floats(min_value=-5, max_value=5), st.sampled_from(["cosine", "square"]))
def test_profile_periodicity(x_frac, kind):
    p = calibrated_params()
    prof = ModulationProfile(p, kind=kind, shift=0.1 * p.lambda_m)
    x = x_frac * p.lambda_m
    assert prof.inverse_inductance(x) == pytest.approx(
        prof.inverse_inductance(x + p.lambda_m), rel=1e-12
    )


def test_band_gap_and_edge(band):
    assert band.gap / GHZ == pytest.approx(0.801, abs=0.002)
    assert band.omega_edge / GHZ == pytest.approx(3.516, abs=0.005)
    # bands sorted and symmetric under k -> -k (ds = 0)
    assert np.all(band.bands[1] >= band.bands[0])
    i = band.k_index(0.25 * band.params.km)
    j = band.k_index(-0.25 * band.params.km)
    assert band.bands[0, i] == pytest.approx(band.bands[0, j], rel=1e-11)


def test_unmodulated_limit_gapless():
    p = calibrated_params()
    p0 = type(p)(p.d0, p.cg, p.cj, p.l0, p.alpha0, 0.0, p.km)
    bs = band_structure(
        ModulationProfile(p0), bz_grid(p0, 1e-3), check_convergence=False
    )
    assert bs.gap < 1e-8 * bs.omega_edge


def test_band_matches_real_space_chain(band):
    """Open modulated chain reproduces band 1 at its quantized wavevectors."""
    p = band.params
    cells = 20
    n_nodes = cells * p.cells_per_period + 1
    prof = band.profile
    xj = (np.arange(n_nodes - 1) + 0.5) * p.d0
    inv_l = prof.junction_inverse_inductance(xj)
    omega, _ = chain_eigenmodes(p, n_nodes, inv_l, return_vectors=False)
    kn = np.arange(n_nodes) * np.pi / (n_nodes * p.d0)
    in_band = (kn > 0) & (kn < 0.98 * p.k0)
    idx = np.nonzero(in_band)[0]
    # interpolate band 1 onto the chain's k values
    ref = np.interp(kn[idx], band.kgrid, band.bands[0])
    assert np.max(np.abs(omega[idx] / ref - 1)) < 5e-3


def test_gap_monotone_in_modulation_depth():
    p = calibrated_params()
    gaps = []
    for frac in np.linspace(0.02, 0.1, 5):
        px = type(p)(p.d0, p.cg, p.cj, p.l0, p.alpha0, frac * p.alpha0, p.km)
        kg = np.array([px.k0 * (1 - 1e-9), px.k0])
        bs = band_structure(ModulationProfile(px), kg, check_convergence=False)
        gaps.append(bs.gap)
    assert np.all(np.diff(gaps) > 0)


def test_shift_leaves_spectrum_and_coeff_magnitudes(band):
    p = band.params
    kg = bz_grid(p, 2e-3)
    bs0 = band_structure(ModulationProfile(p), kg, check_convergence=False)
    bs1 = band_structure(
        ModulationProfile(p, shift=0.21 * p.lambda_m), kg, check_convergence=False
    )
    # abs slack only matters for the omega = 0 acoustic point
    assert bs1.bands == pytest.approx(bs0.bands, rel=1e-11, abs=1e5)
    # coefficient magnitudes are gauge data only where the state is
    # non-degenerate: band 1 everywhere, band 2 away from the zone center
    # (bands 2 and 3 nearly cross at k = 0 and the eigenbasis rotates freely)
    assert np.max(np.abs(np.abs(bs1.coeffs[0]) - np.abs(bs0.coeffs[0]))) < 1e-10
    away = np.abs(kg) > 0.05 * p.km
    assert np.max(np.abs(np.abs(bs1.coeffs[1, away]) - np.abs(bs0.coeffs[1, away]))) < 1e-10


def test_harmonic_convergence(band):
    p = band.params
    kg = np.array([p.k0 * (1 - 1e-9), p.k0])
    g10 = band_structure(ModulationProfile(p), kg, nh=10, check_convergence=False).gap
    g20 = band_structure(ModulationProfile(p), kg, nh=20, check_convergence=False).gap
    assert abs(g10 - g20) < 1e-3 * g20


def test_convergence_warning_fires():
    p = calibrated_params()
    kg = np.array([p.k0 * (1 - 1e-9), p.k0])
    with pytest.warns(ConvergenceWarning):
        band_structure(ModulationProfile(p, kind="square"), kg, nh=1)


@given(st.floats(min_value=-2, max_value=2), st.integers(min_value=0, max_value=400))
def test_bloch_u_periodic(band, x_frac, k_off):
    p = band.params
    x = x_frac * p.lambda_m
    k = band.kgrid[band.edge_index - k_off]
    u1 = band.u(1, k, x)
    u2 = band.u(1, k, x + p.lambda_m)
    assert abs(u1 - u2) < 1e-12 * max(1.0, abs(u1))


def test_bloch_u_parseval(band):
    """Cell average of |u|^2 equals sum |c_n|^2 = 1."""
    p = band.params
    x = np.linspace(0, p.lambda_m, 4096, endpoint=False)
    k = band.kgrid[band.edge_index - 137]
    avg = np.mean(np.abs(band.u(1, k, x)) ** 2)
    assert avg == pytest.approx(1.0, rel=1e-10)


def test_bloch_u_largest_at_impedance_dip(band):
    """Band-edge modes concentrate at impedance dips, avoid the peaks."""
    p = band.params
    for off in (0, 40, 120):
        k = band.kgrid[band.edge_index - off]
        u_dip = abs(band.u(1, k, 0.0))
        u_peak = abs(band.u(1, k, 0.5 * p.lambda_m))
        assert u_dip > 2 * u_peak


def test_bloch_u_off_grid_requires_interpolation(band):
    k = 0.5 * (band.kgrid[10] + band.kgrid[11])
    with pytest.raises(ValueError):
        band.u(1, k, 0.0)
    u = band.u(1, k, 0.0, interpolate=True)
    assert np.isfinite(abs(u))


def test_effective_mass_quality(band, em):
    assert em.residual < 1e-3
    assert em.alpha_m > 0
    assert em.k0 == pytest.approx(band.params.k0)
    # curvature agrees with the gap-based estimate at the 30% level
    est = band.params.vj**2 / band.gap
    assert em.alpha_m == pytest.approx(est, rel=0.3)


def test_effective_mass_recovers_exact_parabola(band):
    """Synthetic parabolic band: fit identifies the inputs to 1e-10."""
    em_ref = effective_mass_fit(band)
    k0 = band.params.k0
    fake = band.bands.copy()
    fake[0] = 5.0e9 - 1234.5 * (band.kgrid - k0) ** 2
    bs2 = type(band)(band.profile, band.kgrid, fake, band.coeffs, band.nh, band.gauge)
    em2 = effective_mass_fit(bs2, window=em_ref.fit_window)
    assert em2.omega_edge == pytest.approx(5.0e9, rel=1e-12)
    assert em2.alpha_m == pytest.approx(1234.5, rel=1e-10)
    assert em2.residual < 1e-12


def test_in_gap_atom_placement(band, em):
    delta0 = 0.1 * band.gap
    omega_q = em.omega_edge + delta0
    assert band.bands[0].max() < omega_q < band.bands[1].min()
