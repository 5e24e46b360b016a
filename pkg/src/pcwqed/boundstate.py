"""In-gap bound states: energy, real-space photonic wavefunction, chirality.

The single-excitation eigenproblem of an atom coupled to the discretized
band-1 modes gives the bound-state energy eps_b (relative to omega_q) as the
root of eps = sum_k |g_k|^2/(eps - Delta_k).  The photonic wavefunction is the
corresponding BZ sum; per-leg contributions expose the interference that makes
the state chiral.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .atom import CouplingLinearization, GiantAtom, coupling_gk
from .bloch import BandStructure, EffectiveMass, effective_mass_fit
from .errors import BoundStateError, CoverageWarning

DEFAULT_SPAN_DECAY_LENGTHS = 12.0
DEFAULT_SAMPLES_PER_PERIOD = 16
_MIN_SPAN_DECAY_LENGTHS = 6.0


@dataclass(frozen=True)
class BoundStateSolution:
    """Sampled bound state: total and per-leg photonic amplitudes.

    phi_total is normalized to unit L2 norm on xgrid (trapezoid rule); the
    per-leg parts carry the same scale so phi_total = sum(phi_legs) pointwise.
    """

    atom: GiantAtom
    eps_b: float
    cos_theta: float
    xgrid: np.ndarray
    phi_total: np.ndarray
    phi_legs: tuple[np.ndarray, ...]
    delta0: float
    l_eff: float
    normalization: str = "unit L2 norm (trapezoid) over xgrid"

    def amplitude(self, leg: int | None = None) -> np.ndarray:
        """|phi(x)| of the total (leg=None) or one leg's component."""
        phi = self.phi_total if leg is None else self.phi_legs[leg]
        return np.abs(phi)

    def phase(self, leg: int) -> np.ndarray:
        return np.angle(self.phi_legs[leg])

    @property
    def delta_theta(self) -> np.ndarray:
        """Phase difference theta_plus - theta_minus, wrapped to (-pi, pi]."""
        if len(self.phi_legs) != 2:
            raise ValueError("phase difference needs a two-leg atom")
        return np.angle(self.phi_legs[1] * np.conj(self.phi_legs[0]))


@dataclass(frozen=True)
class AnalyticBoundState:
    """Step-plus-exponential envelope with side amplitudes c_minus/c_plus."""

    c_minus: float
    c_plus: float
    l_eff: float
    amplitude: float = 1.0

    def envelope(self, x, center: float = 0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float) - center
        side = np.where(x < 0, self.c_minus, self.c_plus)
        return self.amplitude * np.abs(side) * np.exp(-np.abs(x) / self.l_eff)

    @property
    def chirality(self) -> float:
        cm2, cp2 = self.c_minus**2, self.c_plus**2
        return (cm2 - cp2) / (cm2 + cp2)


@dataclass(frozen=True)
class ChiralityReport:
    """Left/right photonic weights and the chirality they define."""

    phi_left: float
    phi_right: float
    cb: float
    cb_analytic: float | None = None


def _band1_data(atom: GiantAtom, bs: BandStructure):
    g = coupling_gk(atom, bs)
    omega_q, delta0 = atom.resolve_frequency(bs.omega_edge)
    delta_k = bs.bands[0] - omega_q
    return g, delta_k, omega_q, delta0


def solve_bound_energy(atom: GiantAtom, bs: BandStructure) -> tuple[float, float]:
    """Bound-state energy eps_b (relative to omega_q) and atomic weight cos(theta).

    Solves eps = sum_k |g_k|^2/(eps - Delta_k) over the discrete band-1 modes
    by bracketed root finding on the gap above the band.  Raises
    BoundStateError when the root would cross into band 2.
    """
    g, delta_k, omega_q, _ = _band1_data(atom, bs)
    g2 = np.abs(g) ** 2
    if not g2.any():
        return 0.0, 1.0

    def f(eps):
        return eps - np.sum(g2 / (eps - delta_k))

    # f(0) < 0 always (Delta_k < 0 in the gap); expand the bracket upward
    hi = max(-delta_k.max(), 1e-30)
    while f(hi) < 0:
        hi *= 2
    eps_b = brentq(f, 0.0, hi, xtol=1e-30, rtol=1e-15, maxiter=200)

    gap_top = float(bs.bands[1].min() - omega_q)
    if eps_b >= gap_top:
        raise BoundStateError(
            f"bound-state energy {eps_b:.3e} rad/s reaches band 2 "
            f"({gap_top:.3e} rad/s above the atom)"
        )
    tan2 = np.sum(g2 / (eps_b - delta_k) ** 2)
    return float(eps_b), float(1.0 / np.sqrt(1.0 + tan2))


def default_xgrid(
    atom: GiantAtom,
    bs: BandStructure,
    l_eff: float,
    span_decay_lengths: float = DEFAULT_SPAN_DECAY_LENGTHS,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> np.ndarray:
    """Grid centered between the legs, covering span_decay_lengths * l_eff."""
    lam = bs.params.lambda_m
    half = span_decay_lengths / 2 * l_eff
    grid = np.arange(atom.center - half, atom.center + half, lam / samples_per_period)
    return np.union1d(grid, atom.positions)


def bound_state(
    atom: GiantAtom,
    bs: BandStructure,
    xgrid: np.ndarray | None = None,
    em: EffectiveMass | None = None,
    eps_b: float | None = None,
) -> BoundStateSolution:
    """Real-space bound state phi_b(x) with its per-leg decomposition.

    Each leg contributes the discrete BZ sum over band 1 of
    g_i exp(i*k*x_i) u_k(x_i) u_k*(x) exp(-i*k*x) / (eps_b - Delta_k).
    Pass `eps_b` to reuse a previously solved energy (the weak-coupling
    idealization eps_b = 0 is also legitimate here).
    """
    lam = bs.params.lambda_m
    if atom.is_giant and abs(atom.positions[1] - atom.positions[0]) >= lam:
        warnings.warn(
            "coupling points are separated by a full modulation period or "
            "more; the single-cell giant-atom picture does not apply",
            CoverageWarning,
            stacklevel=2,
        )
    if em is None:
        em = effective_mass_fit(bs)
    if eps_b is None:
        eps_b, cos_theta = solve_bound_energy(atom, bs)
    else:
        cos_theta = np.nan  # not solved when the energy is imposed

    g, delta_k, _, delta0 = _band1_data(atom, bs)
    l_eff = em.decay_length(delta0)
    if xgrid is None:
        xgrid = default_xgrid(atom, bs, l_eff)
    xgrid = np.asarray(xgrid, dtype=float)
    span = xgrid[-1] - xgrid[0]
    if span < _MIN_SPAN_DECAY_LENGTHS * l_eff:
        warnings.warn(
            f"x grid spans {span / l_eff:.1f} decay lengths "
            f"(< {_MIN_SPAN_DECAY_LENGTHS:.0f}); tail weight will be missed",
            CoverageWarning,
            stacklevel=2,
        )

    ns = bs.harmonics
    km = bs.params.km
    conj_coeffs = bs.coeffs[0].conj()  # (Nk, NS)
    phis = []
    for leg in atom.legs:
        u_leg = bs.coeffs[0] @ np.exp(1j * ns * km * leg.x)
        w = leg.g * np.exp(1j * bs.kgrid * leg.x) * u_leg / (eps_b - delta_k)
        phis.append(_bz_sum(w, conj_coeffs, bs.kgrid, ns * km, xgrid))
    total = np.sum(phis, axis=0)

    norm = np.sqrt(np.trapezoid(np.abs(total) ** 2, xgrid))
    if norm == 0:
        raise BoundStateError("photonic component vanishes identically")
    return BoundStateSolution(
        atom=atom,
        eps_b=float(eps_b),
        cos_theta=float(cos_theta),
        xgrid=xgrid,
        phi_total=total / norm,
        phi_legs=tuple(p / norm for p in phis),
        delta0=float(delta0),
        l_eff=float(l_eff),
    )


def _bz_sum(weights, conj_coeffs, kgrid, qn, xgrid, block: int = 512):
    """sum_k w_k u_k*(x) exp(-i*k*x) evaluated on xgrid in x blocks."""
    m = (conj_coeffs * weights[:, None]).T  # (NS, Nk)
    out = np.empty(xgrid.size, dtype=complex)
    for start in range(0, xgrid.size, block):
        xs = xgrid[start : start + block]
        ek = np.exp(-1j * np.outer(kgrid, xs))  # (Nk, nx)
        un = np.exp(-1j * np.outer(qn, xs))  # (NS, nx)
        out[start : start + len(xs)] = ((m @ ek) * un).sum(axis=0)
    return out


def analytic_bound_state(
    lin: CouplingLinearization, em: EffectiveMass, delta0: float
) -> AnalyticBoundState:
    """Envelope amplitudes c_pm = a +/- b*sqrt(delta0/alpha_m) and decay length."""
    kappa = np.sqrt(delta0 / em.alpha_m)
    return AnalyticBoundState(
        c_minus=float(lin.a - lin.b * kappa),
        c_plus=float(lin.a + lin.b * kappa),
        l_eff=float(em.decay_length(delta0)),
    )


def chirality(
    sol: BoundStateSolution,
    legs: np.ndarray | None = None,
    analytic: AnalyticBoundState | None = None,
) -> ChiralityReport:
    """Left/right weights outside the legs and cb = (L - R)/(L + R).

    The finite grid ends stand in for +/- infinity; the bound_state coverage
    warning bounds the truncation error.
    """
    if legs is None:
        legs = sol.atom.positions
    x_lo, x_hi = float(np.min(legs)), float(np.max(legs))
    x = sol.xgrid
    density = np.abs(sol.phi_total) ** 2
    left = float(np.trapezoid(np.where(x <= x_lo, density, 0.0), x))
    right = float(np.trapezoid(np.where(x >= x_hi, density, 0.0), x))
    if left + right == 0:
        raise BoundStateError("fully cancelled state: chirality undefined")
    cb = (left - right) / (left + right)
    cb_ana = analytic.chirality if analytic is not None else None
    return ChiralityReport(phi_left=left, phi_right=right, cb=cb, cb_analytic=cb_ana)


def visibility(sol: BoundStateSolution) -> float:
    """Interference visibility: total weight over the sum of per-leg weights.

    0 means the legs cancel completely, 2 means fully constructive.
    """
    if len(sol.phi_legs) != 2:
        raise ValueError("visibility is defined for two-leg atoms")
    num = np.trapezoid(np.abs(sol.phi_total) ** 2, sol.xgrid)
    den = sum(np.trapezoid(np.abs(p) ** 2, sol.xgrid) for p in sol.phi_legs)
    return float(num / den)


def envelope_peaks(sol: BoundStateSolution, side: str = "both"):
    """Local maxima of |phi_b(x)| (one per modulation period).

    side: 'left'/'right' keep only peaks beyond the outermost leg on that
    side; 'both' keeps all interior peaks.
    """
    a = np.abs(sol.phi_total)
    x = sol.xgrid
    interior = (a[1:-1] >= a[:-2]) & (a[1:-1] > a[2:])
    idx = np.nonzero(interior)[0] + 1
    if side == "left":
        idx = idx[x[idx] < np.min(sol.atom.positions)]
    elif side == "right":
        idx = idx[x[idx] > np.max(sol.atom.positions)]
    elif side != "both":
        raise ValueError("side must be 'left', 'right' or 'both'")
    return x[idx], a[idx]


def decay_length_fit(sol: BoundStateSolution, min_distance: float | None = None):
    """Exponential decay length of the dominant-side envelope tail [m].

    Fits log|peaks| linearly in x using peaks at least `min_distance`
    (default 2*l_eff) beyond the nearest leg.
    """
    if min_distance is None:
        min_distance = 2 * sol.l_eff
    report = chirality(sol)
    side = "left" if report.cb >= 0 else "right"
    xp, ap = envelope_peaks(sol, side)
    legs = sol.atom.positions
    if side == "left":
        sel = xp < np.min(legs) - min_distance
    else:
        sel = xp > np.max(legs) + min_distance
    xp, ap = xp[sel], ap[sel]
    if xp.size < 4:
        raise ValueError("not enough envelope peaks beyond the requested distance")
    slope = np.polyfit(xp, np.log(ap), 1)[0]
    return float(-1.0 / slope) if side == "right" else float(1.0 / slope)


def matched_strength_ratio(
    positions, bs: BandStructure, delta0_fraction: float = 0.1
) -> float:
    """Strength ratio g_plus/g_minus equalizing the two legs' photonic weights.

    Runs an equal-strength bound state for legs at `positions` (two entries)
    and returns the ratio of the per-leg norms; driving the second leg this
    much harder balances the interfering amplitudes.
    """
    if len(positions) != 2:
        raise ValueError("need exactly two leg positions")
    probe = GiantAtom.from_legs(
        [(positions[0], 1.0), (positions[1], 1.0)],
        delta0=delta0_fraction * bs.gap,
    )
    sol = bound_state(probe, bs)
    n0 = np.sqrt(np.trapezoid(np.abs(sol.phi_legs[0]) ** 2, sol.xgrid))
    n1 = np.sqrt(np.trapezoid(np.abs(sol.phi_legs[1]) ** 2, sol.xgrid))
    return float(n0 / n1)
