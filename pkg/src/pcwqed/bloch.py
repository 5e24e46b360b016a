"""Band structure of the flux-modulated chain via plane-wave expansion.

The spatially periodic inverse inductance couples plane waves k + n*km.  For
each k in the first Brillouin zone the quadratic eigenvalue problem
[omega^2 M2 + M0] U = 0 reduces, because -M2 is positive diagonal, to a
standard Hermitian problem for omega^2.  The two lowest bands are retained
together with their Fourier coefficients, gauge-fixed by parallel transport.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .circuit import CircuitParams
from .errors import ConvergenceWarning

DEFAULT_HARMONICS = 10
DEFAULT_DK_FRACTION = 1e-4
DEFAULT_FIT_WINDOW = 0.02  # in units of km

# relative gap change allowed when the harmonic cutoff is raised by 2
_NH_GAP_TOL = 1e-3
_FIT_RESIDUAL_TOL = 1e-3


@dataclass(frozen=True)
class ModulationProfile:
    """Spatial modulation of the inverse inductance.

    kind   "cosine" or "square" (sign of a cosine, with sgn(0) = +1)
    shift  displacement ds of the modulation signal [m]
    """

    base: CircuitParams
    kind: str = "cosine"
    shift: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cosine", "square"):
            raise ValueError(f"unknown modulation kind {self.kind!r}")

    def waveform(self, x):
        """Dimensionless modulation f(km*(x - ds)) in [-1, 1]."""
        arg = np.cos(self.base.km * (np.asarray(x, dtype=float) - self.shift))
        if self.kind == "cosine":
            return arg
        return np.where(arg >= 0, 1.0, -1.0)

    def inverse_inductance(self, x):
        """Inverse inductance per unit length 1/l(x) [1/(H*m)]."""
        p = self.base
        return (p.d0 / p.l0) * (p.alpha0 + p.delta_alpha * self.waveform(x))

    def junction_inverse_inductance(self, x):
        """Per-junction inverse inductance 1/L_j [1/H] sampled at position x."""
        p = self.base
        return (1.0 / p.l0) * (p.alpha0 + p.delta_alpha * self.waveform(x))

    def relative_impedance(self, x):
        """Line impedance Z(x) normalized to the unmodulated value."""
        p = self.base
        return np.sqrt(p.alpha0 / (p.alpha0 + p.delta_alpha * self.waveform(x)))

    def fourier_coefficients(self, mmax: int) -> np.ndarray:
        """Coefficients F_m of alpha0 + delta_alpha*f, m = -mmax..mmax.

        1/l(x) = (d0/l0) * sum_m F_m exp(i*m*km*x); F_{-m} = conj(F_m).
        """
        p = self.base
        f = np.zeros(2 * mmax + 1, dtype=complex)
        f[mmax] = p.alpha0
        phase = np.exp(-1j * p.km * self.shift)
        if self.kind == "cosine":
            if mmax >= 1:
                f[mmax + 1] = p.delta_alpha / 2 * phase
                f[mmax - 1] = np.conj(f[mmax + 1])
        else:
            for m in range(1, mmax + 1, 2):
                amp = (2 / (np.pi * m)) * (-1) ** ((m - 1) // 2)
                f[mmax + m] = p.delta_alpha * amp * phase**m
                f[mmax - m] = np.conj(f[mmax + m])
        return f


@dataclass(frozen=True)
class GaugeRecord:
    """Phase convention applied to the Bloch coefficients."""

    kind: str
    anchor_x: float
    seed_k: float


@dataclass(frozen=True)
class BandStructure:
    """Two lowest bands on a BZ grid with gauge-fixed Fourier coefficients.

    bands[b, i] is omega of band b+1 at kgrid[i]; coeffs[b, i, :] are the
    c_n coefficients (n = -nh..nh) normalized to sum |c_n|^2 = 1.
    """

    profile: ModulationProfile
    kgrid: np.ndarray
    bands: np.ndarray
    coeffs: np.ndarray
    nh: int
    gauge: GaugeRecord

    @property
    def params(self) -> CircuitParams:
        return self.profile.base

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.nh, self.nh + 1)

    @property
    def dk(self) -> float:
        return float(self.kgrid[1] - self.kgrid[0])

    @property
    def edge_index(self) -> int:
        return int(np.argmin(np.abs(self.kgrid - self.params.k0)))

    @property
    def omega_edge(self) -> float:
        """Top of band 1 (at k0)."""
        return float(self.bands[0, self.edge_index])

    @property
    def gap(self) -> float:
        """Band gap between bands 1 and 2 at k0 [rad/s]."""
        i = self.edge_index
        return float(self.bands[1, i] - self.bands[0, i])

    def k_index(self, k: float) -> int:
        i = int(np.argmin(np.abs(self.kgrid - k)))
        if abs(self.kgrid[i] - k) > 1e-9 * self.params.km:
            raise ValueError(f"k = {k:.6g} is not on the grid")
        return i

    def u(self, band: int, k: float, x, interpolate: bool = False):
        """Bloch-periodic part u_k(x) = sum_n c_n exp(i*n*km*x)."""
        x = np.asarray(x, dtype=float)
        phases = np.exp(1j * np.multiply.outer(x, self.harmonics * self.params.km))
        c = self._coeff_at(band, k, interpolate)
        out = phases @ c
        return out if out.ndim else complex(out)

    def _coeff_at(self, band: int, k: float, interpolate: bool) -> np.ndarray:
        if band not in (1, 2):
            raise ValueError("band must be 1 or 2")
        if not interpolate:
            return self.coeffs[band - 1, self.k_index(k)]
        kg = self.kgrid
        if not kg[0] <= k <= kg[-1]:
            raise ValueError("k outside the tabulated grid")
        j = int(np.searchsorted(kg, k))
        if j == 0:
            return self.coeffs[band - 1, 0]
        w = (k - kg[j - 1]) / (kg[j] - kg[j - 1])
        c = (1 - w) * self.coeffs[band - 1, j - 1] + w * self.coeffs[band - 1, j]
        return c / np.linalg.norm(c)


@dataclass(frozen=True)
class EffectiveMass:
    """Quadratic band-edge expansion omega(k) = omega_edge - alpha_m*(k-k0)^2."""

    k0: float
    omega_edge: float
    alpha_m: float
    fit_window: float
    residual: float

    def decay_length(self, delta0: float) -> float:
        """Evanescent length sqrt(alpha_m/delta0) of an in-gap state [m]."""
        return float(np.sqrt(self.alpha_m / delta0))


def bz_grid(params: CircuitParams, dk_fraction: float = DEFAULT_DK_FRACTION) -> np.ndarray:
    """Uniform grid over (-km/2, km/2] with spacing dk_fraction*km."""
    n = round(1.0 / dk_fraction)
    dk = params.km / n
    return -params.km / 2 + dk * np.arange(1, n + 1)


def _band_eigh(profile: ModulationProfile, kgrid: np.ndarray, nh: int):
    """Lowest two eigenpairs of the plane-wave problem at every k."""
    p = profile.base
    ns = np.arange(-nh, nh + 1)
    fm = profile.fourier_coefficients(2 * nh)
    q = kgrid[:, None] + ns[None, :] * p.km
    # -M2 is diagonal positive: cj*d0^2*q^2 + cg (per unit length)
    d = (p.cj / p.d0) * p.d0**2 * q**2 + p.cg / p.d0
    jj, nn = np.meshgrid(np.arange(ns.size), np.arange(ns.size), indexing="ij")
    fmat = (p.d0 / p.l0) * fm[(jj - nn) + 2 * nh]
    m0 = fmat[None, :, :] * q[:, :, None] * q[:, None, :]
    dm12 = 1.0 / np.sqrt(d)
    mt = m0 * dm12[:, :, None] * dm12[:, None, :]
    w, v = np.linalg.eigh(mt)
    omega = np.sqrt(np.clip(w[:, :2], 0.0, None))
    coeffs = dm12[:, :, None] * v[:, :, :2]
    coeffs = coeffs / np.linalg.norm(coeffs, axis=1, keepdims=True)
    return omega.T, np.swapaxes(coeffs, 1, 2).transpose(1, 0, 2)


def _gap_at_edge(profile: ModulationProfile, nh: int) -> float:
    k0 = np.array([profile.base.k0])
    omega, _ = _band_eigh(profile, k0, nh)
    return float(omega[1, 0] - omega[0, 0])


def band_structure(
    profile: ModulationProfile,
    kgrid: np.ndarray | None = None,
    nh: int = DEFAULT_HARMONICS,
    anchor_x: float = 0.0,
    check_convergence: bool = True,
) -> BandStructure:
    """Solve the plane-wave band problem over the BZ grid and fix the gauge.

    The gauge sweep starts at the grid point nearest k0 = km/2, where the
    phase is chosen to make u_k(anchor_x) real positive, and parallel
    transports toward -km/2 (each successive overlap made real positive).
    """
    if nh < 1:
        raise ValueError("need at least one harmonic")
    params = profile.base
    if kgrid is None:
        kgrid = bz_grid(params)
    kgrid = np.asarray(kgrid, dtype=float)
    if kgrid.ndim != 1 or kgrid.size < 2:
        raise ValueError("kgrid must be a 1-d array with at least two points")
    if np.any(kgrid <= -params.k0 - 1e-12 * params.km) or np.any(
        kgrid > params.k0 * (1 + 1e-12)
    ):
        raise ValueError("kgrid must lie inside (-km/2, km/2]")

    bands, coeffs = _band_eigh(profile, kgrid, nh)
    coeffs = np.ascontiguousarray(coeffs)

    seed = int(np.argmin(np.abs(kgrid - params.k0)))
    ns = np.arange(-nh, nh + 1)
    anchor_phase = np.exp(1j * ns * params.km * anchor_x)
    for b in range(2):
        u_seed = coeffs[b, seed] @ anchor_phase
        coeffs[b, seed] *= np.exp(-1j * np.angle(u_seed))
        for i in range(seed - 1, -1, -1):
            ov = np.vdot(coeffs[b, i + 1], coeffs[b, i])
            coeffs[b, i] *= np.exp(-1j * np.angle(ov))
        for i in range(seed + 1, kgrid.size):
            ov = np.vdot(coeffs[b, i - 1], coeffs[b, i])
            coeffs[b, i] *= np.exp(-1j * np.angle(ov))

    if check_convergence:
        gap = _gap_at_edge(profile, nh)
        gap_ref = _gap_at_edge(profile, nh + 2)
        if gap_ref > 0 and abs(gap - gap_ref) > _NH_GAP_TOL * gap_ref:
            warnings.warn(
                f"gap changes by {abs(gap - gap_ref) / gap_ref:.2e} when the "
                f"harmonic cutoff is raised from {nh} to {nh + 2}",
                ConvergenceWarning,
                stacklevel=2,
            )

    gauge = GaugeRecord("parallel-transport", anchor_x, float(kgrid[seed]))
    return BandStructure(profile, kgrid, bands, coeffs, nh, gauge)


def bloch_u(bs: BandStructure, band: int, k: float, x, interpolate: bool = False):
    """Periodic Bloch amplitude u_k(x) for the given band."""
    return bs.u(band, k, x, interpolate)


def effective_mass_fit(
    bs: BandStructure, band: int = 1, window: float | None = None
) -> EffectiveMass:
    """Least-squares quadratic fit of the band top at k0 = km/2.

    Fits omega(k) = omega_edge - alpha_m*(k - k0)^2 over k0 - window <= k <= k0
    (the band is symmetric about k0, making the even basis exact).  Warns if
    the relative rms residual exceeds 1e-3.
    """
    if band != 1:
        raise ValueError("the effective-mass expansion targets band 1")
    k0 = bs.params.k0
    if window is None:
        window = DEFAULT_FIT_WINDOW * bs.params.km
    sel = (bs.kgrid >= k0 - window) & (bs.kgrid <= k0 * (1 + 1e-12))
    if sel.sum() < 3:
        raise ValueError("fit window contains fewer than three grid points")
    dk = bs.kgrid[sel] - k0
    omega = bs.bands[band - 1, sel]
    basis = np.stack([np.ones_like(dk), dk**2], axis=1)
    coef, *_ = np.linalg.lstsq(basis, omega, rcond=None)
    fit = basis @ coef
    residual = float(np.sqrt(np.mean(((omega - fit) / omega) ** 2)))
    if residual > _FIT_RESIDUAL_TOL:
        warnings.warn(
            f"effective-mass fit residual {residual:.2e} exceeds "
            f"{_FIT_RESIDUAL_TOL:.0e}; shrink the window",
            ConvergenceWarning,
            stacklevel=2,
        )
    return EffectiveMass(
        k0=float(k0),
        omega_edge=float(coef[0]),
        alpha_m=float(-coef[1]),
        fit_window=float(window),
        residual=residual,
    )
