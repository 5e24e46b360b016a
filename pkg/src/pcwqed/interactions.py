"""Virtual-photon couplings between two giant atoms and resolvent poles.

Self-energies are discrete sums over the positive half of the band-1 grid;
their real parts give the coherent dipole-dipole couplings J.  The simplified
band-edge kernel admits a closed form whose poles (one real, possibly one
complex on the second sheet) control coherent coupling versus decay.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .atom import GiantAtom, coupling_gk
from .bloch import BandStructure, EffectiveMass
from .errors import PoleProximityError, RegimeWarning

_NEWTON_MAX_ITER = 100
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class Dimer:
    """Two giant atoms on the same waveguide (degenerate frequencies)."""

    atom_a: GiantAtom
    atom_b: GiantAtom

    def __post_init__(self):
        if (self.atom_a.omega_q, self.atom_a.delta0) != (
            self.atom_b.omega_q,
            self.atom_b.delta0,
        ):
            raise ValueError("dimer atoms must share the same transition frequency")

    @property
    def dq(self) -> float:
        """Reference-leg separation x_A - x_B."""
        return self.atom_a.reference_x - self.atom_b.reference_x

    @property
    def cell_length(self) -> float:
        """Chain period: twice the center separation."""
        return 2 * abs(self.atom_b.center - self.atom_a.center)

    def next_cell_atom(self) -> GiantAtom:
        """Atom A translated one chain period toward B (the A of the next cell)."""
        step = self.cell_length if self.atom_b.center > self.atom_a.center else -self.cell_length
        return self.atom_a.translated(step)


@dataclass(frozen=True)
class SelfEnergyResult:
    """Self-energies at complex energy z (relative to omega_q)."""

    sigma_e: complex
    sigma_ab: complex
    j: float
    stark: float


@dataclass(frozen=True)
class PoleAnalysis:
    """Poles of the band-edge resolvent kernel and their residues."""

    z0: float
    z1: complex | None
    gamma_c: float
    res0: float
    res1: complex | None


def self_energy(dimer: Dimer, bs: BandStructure, z: complex = 0.0) -> SelfEnergyResult:
    """sigma_e and sigma_AB as discrete sums over k in (0, k0].

    sigma_e(z)  = sum_k (|g_kA|^2 + |g_kB|^2)/(z - Delta_k)
    sigma_ab(z) = sum_k 2 Re(g_kA g_kB*)/(z - Delta_k)

    Real z inside the sampled band must keep clear of the band samples by
    more than the local level spacing (PoleProximityError otherwise).
    """
    omega_q, _ = dimer.atom_a.resolve_frequency(bs.omega_edge)
    delta_k = bs.bands[0] - omega_q
    pos = bs.kgrid > 0
    dk_pos = delta_k[pos]

    if np.imag(z) == 0:
        zr = float(np.real(z))
        spacing = np.abs(np.diff(np.sort(dk_pos))).max()
        if dk_pos.min() - spacing <= zr <= dk_pos.max() + spacing:
            if np.min(np.abs(zr - dk_pos)) < spacing:
                raise PoleProximityError(
                    "z lies within one level spacing of a sampled band energy; "
                    "supply an imaginary offset"
                )

    g_a = coupling_gk(dimer.atom_a, bs)[pos]
    g_b = coupling_gk(dimer.atom_b, bs)[pos]

    wa, wb = np.sum(np.abs(g_a) ** 2), np.sum(np.abs(g_b) ** 2)
    if max(wa, wb) > 0 and abs(wa - wb) > 0.1 * max(wa, wb):
        warnings.warn(
            "|g_kA| and |g_kB| differ by more than 10%; the separable "
            "supermode treatment degrades",
            RegimeWarning,
            stacklevel=2,
        )

    denom = z - dk_pos
    sigma_e = complex(np.sum((np.abs(g_a) ** 2 + np.abs(g_b) ** 2) / denom))
    sigma_ab = complex(np.sum(2 * np.real(g_a * np.conj(g_b)) / denom))
    return SelfEnergyResult(
        sigma_e=sigma_e,
        sigma_ab=sigma_ab,
        j=float(np.real(sigma_ab)),
        stark=float(np.real(sigma_e)),
    )


def coupling_pair(dimer: Dimer, bs: BandStructure) -> tuple[float, float]:
    """First-order couplings (J_AB, J_BA) at z = 0 in the rotating frame.

    J_AB couples the configured pair; J_BA couples atom B to the next cell's
    atom A (B's geometry repeated one chain period along).  Warns when the
    Stark shift is not small against delta0 (weak-coupling precondition).
    """
    res_ab = self_energy(dimer, bs, 0.0)
    _, delta0 = dimer.atom_a.resolve_frequency(bs.omega_edge)
    if abs(res_ab.stark) > 0.1 * delta0:
        warnings.warn(
            f"Stark shift {res_ab.stark:.3e} rad/s is not small against "
            f"delta0 = {delta0:.3e} rad/s",
            RegimeWarning,
            stacklevel=2,
        )
    inter = Dimer(dimer.atom_b, dimer.next_cell_atom())
    res_ba = self_energy(inter, bs, 0.0)
    return res_ab.j, res_ba.j


def simplified_sigma(
    g0: float,
    em: EffectiveMass,
    delta0p: float,
    dq: float,
    length: float,
    z: complex = 0.0,
) -> complex:
    """Band-edge kernel sigma_AB(z) in closed form.

    sigma = pi*g0^2/(z + delta0p) * length/(2*pi*l_eff(z)) * exp(-|dq|/l_eff(z))
    with l_eff(z) = sqrt(alpha_m/(z + delta0p)) on the principal branch.
    `length` is the quantization length 2*pi/dk of the mode grid.
    """
    if abs(dq) < 0:
        raise ValueError("dq must be non-negative")
    zp = complex(z) + delta0p
    if zp == 0:
        raise ValueError("z = -delta0p is the branch point of the kernel")
    l_eff = np.sqrt(em.alpha_m / zp)  # principal branch
    return (np.pi * g0**2 / zp) * (length / (2 * np.pi * l_eff)) * np.exp(-abs(dq) / l_eff)


def _kernel_constant(g0: float, em: EffectiveMass, length: float) -> float:
    """c in sigma(z) = c/sqrt(z + delta0p) for dq = 0."""
    return g0**2 * length / (2 * np.sqrt(em.alpha_m))


def find_poles(
    g0: float, em: EffectiveMass, delta0p: float, length: float
) -> PoleAnalysis:
    """Poles of G(z) = 1/(z - sigma(z)) for the dq = 0 kernel.

    The real pole z0 solves z = c/sqrt(z + delta0p) on the first sheet
    (bracketed search).  The complex pole z1 (Im < 0) lives on the second
    sheet, where sigma continues to -c/sqrt(z + delta0p); it is found by a
    damped Newton iteration seeded below the real axis and reported absent
    when the iteration fails or collapses onto the real axis.  Residues are
    1/(1 - sigma'(z)) with the analytic derivative on the matching sheet.
    """
    if delta0p <= 0:
        raise ValueError("delta0p must be positive")
    c = _kernel_constant(g0, em, length)
    if c == 0:
        return PoleAnalysis(z0=0.0, z1=None, gamma_c=0.0, res0=1.0, res1=None)

    def f(zr):
        return zr - c / np.sqrt(zr + delta0p)

    hi = max(delta0p, c ** (2.0 / 3.0))
    while f(hi) < 0:
        hi *= 2
    z0 = brentq(f, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=200)
    dsig0 = -0.5 * c * (z0 + delta0p) ** -1.5
    res0 = 1.0 / (1.0 - dsig0)

    def h(zc):
        return zc + c / np.sqrt(zc + delta0p)

    def dh(zc):
        return 1.0 - 0.5 * c * (zc + delta0p) ** -1.5

    # strong-coupling asymptote of the second-sheet root, Im < 0
    z = c ** (2.0 / 3.0) * np.exp(-2j * np.pi / 3.0) - delta0p
    z1 = None
    for _ in range(_NEWTON_MAX_ITER):
        val = h(z)
        if abs(val) <= _POLE_TOL * delta0p:
            z1 = z
            break
        deriv = dh(z)
        if deriv == 0:
            break
        step = val / deriv
        trial = z - step
        damping = 0
        while abs(h(trial)) > abs(val) and damping < 20:
            step /= 2
            trial = z - step
            damping += 1
        if trial == z:
            break
        z = trial

    if z1 is None or np.imag(z1) > -_POLE_TOL * delta0p:
        return PoleAnalysis(z0=float(z0), z1=None, gamma_c=0.0, res0=float(res0), res1=None)

    dsig1 = 0.5 * c * (z1 + delta0p) ** -1.5
    res1 = 1.0 / (1.0 - dsig1)
    return PoleAnalysis(
        z0=float(z0),
        z1=complex(z1),
        gamma_c=float(abs(np.imag(z1))),
        res0=float(np.real(res0)),
        res1=complex(res1),
    )
