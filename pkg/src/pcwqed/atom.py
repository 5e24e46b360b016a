"""Giant-atom description and the k-dependent coupling g_k.

An atom couples to the waveguide at one (small atom) or two (giant atom)
positions.  The per-mode coupling g_k = sum_i g_i exp(i*k*x_i) u_k(x_i) is
evaluated in the band structure's transported gauge; near the band edge it is
summarized by the linearization g_k ~ A + i*B*(k - k0).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import e as E_CHARGE
from scipy.constants import hbar as HBAR

from .bloch import BandStructure, EffectiveMass
from .errors import ConvergenceWarning, RegimeWarning

DEFAULT_LIN_WINDOW = 0.02  # in units of km
_RECONSTRUCTION_TOL = 0.05


@dataclass(frozen=True)
class Leg:
    """One coupling point: position [m] and per-mode strength [rad/s]."""

    x: float
    g: float

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("leg strength must be non-negative")


@dataclass(frozen=True)
class GiantAtom:
    """Atom with one or two coupling legs.

    Exactly one of `omega_q` [rad/s] or `delta0` [rad/s] is given; the other
    follows from the band edge (omega_q = omega_edge + delta0, the atom
    sitting inside the gap above the top of band 1).
    """

    legs: tuple[Leg, ...]
    omega_q: float | None = None
    delta0: float | None = None

    def __post_init__(self):
        if not 1 <= len(self.legs) <= 2:
            raise ValueError("an atom has one or two legs")
        if (self.omega_q is None) == (self.delta0 is None):
            raise ValueError("give exactly one of omega_q and delta0")
        if self.delta0 is not None and self.delta0 <= 0:
            raise ValueError("delta0 must be positive (atom inside the gap)")

    @classmethod
    def from_legs(cls, legs, omega_q=None, delta0=None) -> "GiantAtom":
        return cls(tuple(Leg(float(x), float(g)) for x, g in legs), omega_q, delta0)

    @property
    def positions(self) -> np.ndarray:
        return np.array([leg.x for leg in self.legs])

    @property
    def strengths(self) -> np.ndarray:
        return np.array([leg.g for leg in self.legs])

    @property
    def reference_x(self) -> float:
        return self.legs[0].x

    @property
    def center(self) -> float:
        return float(self.positions.mean())

    @property
    def is_giant(self) -> bool:
        return len(self.legs) == 2

    def resolve_frequency(self, omega_edge: float) -> tuple[float, float]:
        """Return (omega_q, delta0) given the band-1 top."""
        if self.delta0 is not None:
            return omega_edge + self.delta0, self.delta0
        delta0 = self.omega_q - omega_edge
        if delta0 <= 0:
            raise ValueError("omega_q must lie above the band-1 top")
        return self.omega_q, delta0

    def translated(self, dx: float) -> "GiantAtom":
        legs = tuple(Leg(leg.x + dx, leg.g) for leg in self.legs)
        return GiantAtom(legs, self.omega_q, self.delta0)

    def scaled(self, factor: float) -> "GiantAtom":
        legs = tuple(Leg(leg.x, leg.g * factor) for leg in self.legs)
        return GiantAtom(legs, self.omega_q, self.delta0)


@dataclass(frozen=True)
class CouplingLinearization:
    """Band-edge model g(k0 + dk) = a + i*b*dk.

    a [rad/s] is the mean real part over the window, b [rad*m/s] the
    least-squares slope of the imaginary part; `error` is the worst
    reconstruction mismatch relative to |g(k0)|.
    """

    a: float
    b: float
    window: float
    error: float

    def chirality_ratio(self, em: EffectiveMass, delta0: float) -> float:
        """Dimensionless b*sqrt(delta0/alpha_m)/a controlling the asymmetry."""
        return self.b * np.sqrt(delta0 / em.alpha_m) / self.a


def coupling_amplitude(
    cjg: float,
    csigma: float,
    ct: float,
    omega_q: float,
    line_impedance: float | None = None,
) -> float:
    """Per-leg coupling rate (e/hbar)*(cjg/csigma)*sqrt(hbar*omega_q/ct) [rad/s].

    If `line_impedance` [ohm] is supplied, warns unless it is small compared
    to the coupling-capacitor impedance 1/(omega_q*cjg) (low-impedance
    environment assumption).
    """
    if min(cjg, csigma, ct) < 0 or csigma == 0 or ct == 0:
        raise ValueError("capacitances must be positive (cjg may be zero)")
    if csigma < cjg:
        raise ValueError("total atom capacitance csigma must be >= cjg")
    if omega_q <= 0:
        raise ValueError("omega_q must be positive")
    if line_impedance is not None and cjg > 0:
        if line_impedance * omega_q * cjg > 0.1:
            warnings.warn(
                "line impedance is not small against 1/(omega_q*cjg); the "
                "capacitive coupling formula degrades",
                RegimeWarning,
                stacklevel=2,
            )
    return (E_CHARGE / HBAR) * (cjg / csigma) * np.sqrt(HBAR * omega_q / ct)


def coupling_gk(atom: GiantAtom, bs: BandStructure, k=None, band: int = 1):
    """Coupling g_k = sum_legs g_i exp(i*k*x_i) u_k(x_i) in the fixed gauge.

    With k=None, returns the coupling on the full bs.kgrid.
    """
    if k is None:
        kvec = bs.kgrid
        idx = slice(None)
    else:
        idx = bs.k_index(k)
        kvec = bs.kgrid[idx : idx + 1]
    ns = bs.harmonics
    g = np.zeros(kvec.size, dtype=complex)
    for leg in atom.legs:
        u = bs.coeffs[band - 1, idx] @ np.exp(1j * ns * bs.params.km * leg.x)
        u = np.atleast_1d(u)
        g += leg.g * np.exp(1j * kvec * leg.x) * u
    return g if k is None else complex(g[0])


def edge_window_samples(
    atom: GiantAtom,
    bs: BandStructure,
    window: float | None = None,
    band: int = 1,
    seed_offset: int = 0,
):
    """Coupling samples on both sides of the band edge k0 = km/2.

    The band continues across the zone boundary as k0 + s == -k0 + s, so the
    right half of the window comes from the opposite zone edge with the
    Fourier coefficients shifted by one harmonic.  The coefficient path is
    parallel transported along the unfolded window, seeded at the point
    `seed_offset` grid steps below k0 with u(anchor_x) made real positive.

    Returns (dk, g): offsets from k0 (ascending) and coupling values.
    """
    params = bs.params
    if window is None:
        window = DEFAULT_LIN_WINDOW * params.km
    nwin = int(round(window / bs.dk))
    nk = bs.kgrid.size
    if nwin < 2 or nwin >= nk // 2:
        raise ValueError("window must span at least two and at most half the grid")
    i0 = bs.edge_index
    lo = np.arange(i0 - nwin, i0 + 1)
    hi = np.arange(0, nwin)  # k = -k0 + s  <->  unfolded k0 + s
    dks = np.concatenate([bs.kgrid[lo] - params.k0, bs.kgrid[hi] + params.km - params.k0])

    c_lo = bs.coeffs[band - 1, lo]
    # unfold: u_{k+km}(x) = exp(-i*km*x) u_k(x)  <=>  c'_n = c_{n+1}
    c_hi = np.roll(bs.coeffs[band - 1, hi], -1, axis=1)
    c_hi[:, -1] = 0.0
    path = np.concatenate([c_lo, c_hi], axis=0)

    seed = len(lo) - 1 - abs(int(seed_offset))
    if seed < 0:
        raise ValueError(
            f"seed_offset {seed_offset} exceeds the window ({nwin} grid steps)"
        )
    ns = bs.harmonics
    anchor = np.exp(1j * ns * params.km * bs.gauge.anchor_x)
    u_seed = path[seed] @ anchor
    path[seed] = path[seed] * np.exp(-1j * np.angle(u_seed))
    for i in range(seed - 1, -1, -1):
        ov = np.vdot(path[i + 1], path[i])
        path[i] = path[i] * np.exp(-1j * np.angle(ov))
    for i in range(seed + 1, path.shape[0]):
        ov = np.vdot(path[i - 1], path[i])
        path[i] = path[i] * np.exp(-1j * np.angle(ov))

    kvals = params.k0 + dks
    g = np.zeros(kvals.size, dtype=complex)
    for leg in atom.legs:
        u = path @ np.exp(1j * ns * params.km * leg.x)
        g += leg.g * np.exp(1j * kvals * leg.x) * u
    order = np.argsort(dks)
    return dks[order], g[order]


def linearize_gk(samples_dk, samples_g, window: float | None = None) -> CouplingLinearization:
    """Fit g(k0 + dk) = a + i*b*dk on samples within |dk| <= window.

    Warns when the worst reconstruction error exceeds 5% of |g(k0)| (the
    analytic bound-state amplitudes become unreliable).
    """
    dk = np.asarray(samples_dk, dtype=float)
    g = np.asarray(samples_g, dtype=complex)
    if window is not None:
        sel = np.abs(dk) <= window
        dk, g = dk[sel], g[sel]
    else:
        window = float(np.max(np.abs(dk)))
    if dk.size < 5:
        raise ValueError("need at least five samples inside the window")
    a = float(np.mean(np.real(g)))
    b = float(np.polyfit(dk, np.imag(g), 1)[0])
    g0 = abs(g[np.argmin(np.abs(dk))])
    if g0 == 0:
        error = np.inf if np.max(np.abs(g)) > 0 else 0.0
    else:
        error = float(np.max(np.abs(g - (a + 1j * b * dk))) / g0)
    if error > _RECONSTRUCTION_TOL:
        warnings.warn(
            f"linearization reconstruction error {error:.1%} exceeds "
            f"{_RECONSTRUCTION_TOL:.0%}; analytic amplitudes will be unreliable",
            ConvergenceWarning,
            stacklevel=2,
        )
    return CouplingLinearization(a=a, b=b, window=float(window), error=error)


def linearize_atom(
    atom: GiantAtom,
    bs: BandStructure,
    window: float | None = None,
    seed_offset: int = 0,
) -> CouplingLinearization:
    """Convenience: window samples plus linear fit in one call."""
    dk, g = edge_window_samples(atom, bs, window, seed_offset=seed_offset)
    return linearize_gk(dk, g)
