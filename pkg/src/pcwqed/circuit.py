"""Lumped-circuit model of the bare SQUID transmission line.

Dispersion relations of the unmodulated chain (discrete and linearized) and a
finite-chain eigenmode solver used as a real-space oracle for the plane-wave
band structure.

Internal units are SI throughout: positions in m, capacitances in F,
inductances in H, angular frequencies in rad/s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError

# Relative slack for the "lambda_m is an integer number of cells" invariant.
_PERIOD_TOL = 1e-6

# Eigen-solver residual tolerance, relative to ||Linv||.
_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class CircuitParams:
    """Lumped-element constants of the SQUID chain.

    d0          unit-cell spacing [m]
    cg          ground capacitance per node [F]
    cj          Josephson capacitance [F]
    l0          bare junction inductance [H]
    alpha0      static flux factor cos(pi*Phi_ext/Phi0), in (0, 1]
    delta_alpha modulation depth of the inverse inductance, in units of 1/l0
    km          modulation wavevector [rad/m]; 2*pi/km must be an integer
                number of cells
    """

    d0: float
    cg: float
    cj: float
    l0: float
    alpha0: float
    delta_alpha: float
    km: float

    def __post_init__(self):
        if min(self.d0, self.cg, self.l0, self.km) <= 0:
            raise ValueError("d0, cg, l0 and km must be strictly positive")
        if self.cj < 0:
            raise ValueError("cj must be non-negative")
        if not 0 < self.alpha0 <= 1:
            raise ValueError("alpha0 must lie in (0, 1]")
        if not 0 <= self.delta_alpha < self.alpha0:
            raise ValueError(
                "delta_alpha must lie in [0, alpha0) to keep the inverse "
                "inductance positive"
            )
        cells = self.lambda_m / self.d0
        if abs(cells - round(cells)) > _PERIOD_TOL * cells:
            raise ValueError(
                f"modulation period lambda_m = {self.lambda_m:.6g} m is not an "
                f"integer multiple of d0 = {self.d0:.6g} m"
            )

    @property
    def lambda_m(self) -> float:
        """Modulation period 2*pi/km [m]."""
        return 2 * np.pi / self.km

    @property
    def cells_per_period(self) -> int:
        return round(self.lambda_m / self.d0)

    @property
    def lj(self) -> float:
        """Static Josephson inductance l0/alpha0 [H]."""
        return self.l0 / self.alpha0

    @property
    def vj(self) -> float:
        """Low-frequency phase velocity d0/sqrt(lj*cg) [m/s]."""
        return self.d0 / np.sqrt(self.lj * self.cg)

    @property
    def k0(self) -> float:
        """Band-edge wavevector km/2 [rad/m]."""
        return self.km / 2


def nominal_params(cj_over_cg: float | None = None) -> CircuitParams:
    """Literal reported lumped-element values of the SQUID-chain device family.

    The flux factors are taken at face value (alpha0 = 0.3, delta_alpha =
    0.045).  `cj_over_cg` overrides the Josephson-to-ground capacitance ratio
    (default 225; 450 is also used in linear-regime studies).
    """
    d0 = 1e-6
    cg = 0.4e-15
    cj = (225.0 if cj_over_cg is None else cj_over_cg) * cg
    return CircuitParams(
        d0=d0,
        cg=cg,
        cj=cj,
        l0=0.2e-9,
        alpha0=0.3,
        delta_alpha=0.045,
        km=2 * np.pi / (333 * d0),
    )


def calibrated_params(cj_over_cg: float | None = None) -> CircuitParams:
    """Reference chain with flux factors read as bias fractions.

    Same lumped elements as `nominal_params`, with alpha0 = cos(0.3*pi) and
    delta_alpha = 2*pi*0.045*sin(0.3*pi).  This reading reproduces the
    reported band structure of the device family (band edge near 4 GHz, gap
    of 0.8 GHz) and is the canonical parameter set for figure-level work.
    """
    base = nominal_params(cj_over_cg)
    return CircuitParams(
        d0=base.d0,
        cg=base.cg,
        cj=base.cj,
        l0=base.l0,
        alpha0=float(np.cos(0.3 * np.pi)),
        delta_alpha=float(2 * np.pi * 0.045 * np.sin(0.3 * np.pi)),
        km=base.km,
    )


def squid_dispersion(params: CircuitParams, k):
    """Plane-wave dispersion of the uniform chain [rad/s].

    omega_k = sqrt[(1 - cos(k*d0)) / (cj/cg*(1 - cos(k*d0)) + 1/2)] / sqrt(lj*cg),
    valid in the first zone |k| <= pi/d0.
    """
    k = np.asarray(k, dtype=float)
    if np.any(np.abs(k) > np.pi / params.d0 * (1 + 1e-12)):
        raise ValueError("wavevector outside the first zone |k| <= pi/d0")
    one_minus_cos = 2 * np.sin(k * params.d0 / 2) ** 2  # stable 1 - cos(k d0)
    ratio = one_minus_cos / (params.cj / params.cg * one_minus_cos + 0.5)
    out = np.sqrt(ratio) / np.sqrt(params.lj * params.cg)
    return out if out.ndim else float(out)


def linear_dispersion(params: CircuitParams, k):
    """Linearized dispersion omega = |k|*vj [rad/s] (valid for k*d0 << sqrt(cg/cj))."""
    k = np.asarray(k, dtype=float)
    out = np.abs(k) * params.vj
    return out if out.ndim else float(out)


def _capacitance_matrix(params: CircuitParams, n_nodes: int) -> np.ndarray:
    c = np.zeros((n_nodes, n_nodes))
    idx = np.arange(n_nodes)
    c[idx, idx] = params.cg
    c[idx[:-1], idx[:-1]] += params.cj
    c[idx[1:], idx[1:]] += params.cj
    c[idx[:-1], idx[1:]] = -params.cj
    c[idx[1:], idx[:-1]] = -params.cj
    return c


def _inverse_inductance_matrix(inv_l: np.ndarray) -> np.ndarray:
    n_nodes = inv_l.size + 1
    m = np.zeros((n_nodes, n_nodes))
    idx = np.arange(n_nodes - 1)
    m[idx, idx] += inv_l
    m[idx + 1, idx + 1] += inv_l
    m[idx, idx + 1] = -inv_l
    m[idx + 1, idx] = -inv_l
    return m


def chain_eigenmodes(
    params: CircuitParams,
    n_nodes: int,
    inverse_inductance,
    return_vectors: bool = True,
):
    """Eigenmodes of an open chain of `n_nodes` nodes.

    `inverse_inductance` lists the n_nodes - 1 junction values 1/L_j [1/H],
    junction j sitting between nodes j and j+1.  Solves the symmetric-definite
    pencil Linv v = omega^2 C v (equivalent to C^(-1/2) Linv C^(-1/2) psi =
    omega^2 psi with psi = C^(1/2) v).

    Returns (omega, v): frequencies ascending [rad/s] and node-amplitude
    columns v normalized so v.T @ C @ v = I, i.e. orthonormal in the
    transformed basis.  With return_vectors=False the second element is None.
    """
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    inv_l = np.asarray(inverse_inductance, dtype=float)
    if inv_l.shape != (n_nodes - 1,):
        raise ValueError(
            f"expected {n_nodes - 1} junction values for {n_nodes} nodes, "
            f"got {inv_l.size}"
        )
    if np.any(inv_l <= 0):
        raise ValueError("all inverse inductances must be positive")

    cmat = _capacitance_matrix(params, n_nodes)
    linv = _inverse_inductance_matrix(inv_l)

    # open chains with cg > 0 are positive definite; guard against bad input
    try:
        scipy.linalg.cholesky(cmat, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(
            f"capacitance matrix is not positive definite: {exc}"
        ) from exc

    if not return_vectors:
        w = scipy.linalg.eigh(linv, cmat, eigvals_only=True, check_finite=False)
        return np.sqrt(np.clip(w, 0.0, None)), None

    w, v = scipy.linalg.eigh(linv, cmat, check_finite=False)
    omega = np.sqrt(np.clip(w, 0.0, None))

    # per-mode residual relative to ||Linv|| and the vector magnitude
    residual = np.linalg.norm(linv @ v - cmat @ v * w, axis=0)
    scale = np.linalg.norm(linv, np.inf) * np.linalg.norm(v, axis=0)
    worst = float((residual / scale).max())
    if worst > _RESIDUAL_TOL:
        raise NumericalError(
            f"eigen-residual {worst:.3e} exceeds {_RESIDUAL_TOL:.0e}*||Linv||"
        )
    return omega, v


def uniform_inverse_inductance(params: CircuitParams, n_nodes: int) -> np.ndarray:
    """Junction list for the unmodulated chain: 1/lj on every junction."""
    return np.full(n_nodes - 1, 1.0 / params.lj)
