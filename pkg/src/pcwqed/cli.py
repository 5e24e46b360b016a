"""Command-line interface: one subcommand per experiment.

Every command reads an INI config (see configs/ for canonical examples),
writes a CSV with full metadata, and optionally an SVG plot.  Exit codes:
0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import bloch, boundstate, interactions, topo
from .atom import GiantAtom, edge_window_samples, linearize_gk
from .config import MHZ, ExperimentConfig, load_config
from .errors import ConfigError, NumericalError
from .output import write_csv, write_svg

GHZ = 2 * np.pi * 1e9

COMMANDS = {}


def command(name):
    def register(fn):
        COMMANDS[name] = fn
        return fn

    return register


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("PCWQED_THREADS", "")
    return max(1, int(env)) if env.isdigit() and env != "0" else 1


def _parallel_map(fn, items, n_threads):
    if n_threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(fn, items))


def _band(cfg: ExperimentConfig, check_convergence: bool = True):
    profile = cfg.profile()
    kgrid = bloch.bz_grid(profile.base, cfg.get("numerics", "dk_over_km"))
    return bloch.band_structure(
        profile,
        kgrid,
        nh=cfg.get("numerics", "harmonics"),
        check_convergence=check_convergence,
    )


def _delta0(cfg: ExperimentConfig, bs) -> float:
    return cfg.get("numerics", "delta0_over_gap") * bs.gap


def _emit(cfg, args, default_name, columns, units, meta, caught, xcol=None):
    out_dir = Path(args.out)
    name = cfg.get("output", "csv") or default_name
    path = write_csv(
        out_dir / name,
        args.command,
        columns,
        cfg.digest(),
        cfg.echo_lines(),
        units=units,
        warnings_seen=[str(w.message) for w in caught],
        extra_meta=meta,
    )
    print(f"wrote {path}")
    if args.plot:
        svg_name = cfg.get("output", "svg") or (Path(name).stem + ".svg")
        names = list(columns)
        x_name = xcol or names[0]
        series = {n: columns[n] for n in names if n != x_name}
        svg = write_svg(out_dir / svg_name, columns[x_name], series, x_name, args.command)
        print(f"wrote {svg}")
    return path


@command("bands")
def run_bands(cfg, args, caught):
    cfg.require("circuit")
    bs = _band(cfg)
    columns = {
        "k_over_km": bs.kgrid / bs.params.km,
        "omega1_ghz": bs.bands[0] / GHZ,
        "omega2_ghz": bs.bands[1] / GHZ,
    }
    meta = {
        "band edge (GHz)": f"{bs.omega_edge / GHZ:.6f}",
        "gap (GHz)": f"{bs.gap / GHZ:.6f}",
    }
    units = {"k_over_km": "k/km", "omega1_ghz": "GHz", "omega2_ghz": "GHz"}
    _emit(cfg, args, "bands.csv", columns, units, meta, caught)


@command("bloch")
def run_bloch(cfg, args, caught):
    cfg.require("circuit")
    bs = _band(cfg)
    lam = bs.params.lambda_m
    span = cfg.get("bloch", "x_span_over_lambda")
    x = np.linspace(-span / 2, span / 2, 257) * lam
    columns = {"x_over_lambda": x / lam}
    units = {"x_over_lambda": "x/lambda_m"}
    n_modes = cfg.get("bloch", "n_modes")
    for j in range(n_modes):
        k = bs.kgrid[bs.edge_index - j * 25]
        name = f"abs_u_k{j}"
        columns[name] = np.abs(bs.u(1, k, x))
        units[name] = f"|u| at k/km = {k / bs.params.km:.6f}"
    columns["impedance_rel"] = bs.profile.relative_impedance(x)
    units["impedance_rel"] = "Z(x)/Z0"
    _emit(cfg, args, "bloch.csv", columns, units, {}, caught, xcol="x_over_lambda")


@command("gk")
def run_gk(cfg, args, caught):
    cfg.require("circuit", "atom")
    bs = _band(cfg)
    atom = cfg.atom(bs.params, _delta0(cfg, bs))
    window = cfg.get("gk", "window_over_km") * bs.params.km
    dk, g = edge_window_samples(atom, bs, window)
    lin = linearize_gk(dk, g, window=0.02 * bs.params.km)
    columns = {
        "dk_over_km": dk / bs.params.km,
        "re_g_mhz": np.real(g) / MHZ,
        "im_g_mhz": np.imag(g) / MHZ,
    }
    meta = {
        "A (MHz)": f"{lin.a / MHZ:.6e}",
        "B*km (MHz)": f"{lin.b * bs.params.km / MHZ:.6e}",
        "reconstruction error": f"{lin.error:.4f}",
    }
    units = {"dk_over_km": "(k-k0)/km", "re_g_mhz": "MHz", "im_g_mhz": "MHz"}
    _emit(cfg, args, "gk.csv", columns, units, meta, caught, xcol="dk_over_km")


@command("boundstate")
def run_boundstate(cfg, args, caught):
    cfg.require("circuit", "atom")
    bs = _band(cfg)
    em = bloch.effective_mass_fit(bs)
    delta0 = _delta0(cfg, bs)
    atom = cfg.atom(bs.params, delta0)
    l_eff = em.decay_length(delta0)
    xgrid = boundstate.default_xgrid(
        atom,
        bs,
        l_eff,
        cfg.get("numerics", "span_decay_lengths"),
        cfg.get("numerics", "samples_per_lambda"),
    )
    sol = boundstate.bound_state(atom, bs, xgrid, em=em)
    lam = bs.params.lambda_m
    columns = {
        "x_over_lambda": sol.xgrid / lam,
        "abs_phi": sol.amplitude(),
    }
    units = {"x_over_lambda": "x/lambda_m", "abs_phi": "1/sqrt(m)"}
    if atom.is_giant:
        columns["abs_phi_minus"] = sol.amplitude(0)
        columns["abs_phi_plus"] = sol.amplitude(1)
        columns["delta_theta"] = sol.delta_theta
        units.update(
            abs_phi_minus="1/sqrt(m)", abs_phi_plus="1/sqrt(m)", delta_theta="rad"
        )
        lin = linearize_gk(*edge_window_samples(atom, bs))
        ana = boundstate.analytic_bound_state(lin, em, delta0)
        scale = np.max(sol.amplitude()) / np.max(ana.envelope(sol.xgrid, atom.center))
        columns["analytic_envelope"] = scale * ana.envelope(sol.xgrid, atom.center)
        units["analytic_envelope"] = "1/sqrt(m), peak-matched"
        report = boundstate.chirality(sol, analytic=ana)
        vis = boundstate.visibility(sol)
    else:
        report = boundstate.chirality(sol)
        vis = float("nan")
    meta = {
        "eps_b (MHz)": f"{sol.eps_b / MHZ:.6e}",
        "cos_theta": f"{sol.cos_theta:.8f}",
        "delta0 (MHz)": f"{delta0 / MHZ:.6f}",
        "L_eff/lambda_m": f"{l_eff / lam:.4f}",
        "chirality Cb": f"{report.cb:.6f}",
        "visibility W": f"{vis:.6f}",
    }
    _emit(cfg, args, "boundstate.csv", columns, units, meta, caught, xcol="x_over_lambda")


@command("chirality-scan")
def run_chirality_scan(cfg, args, caught):
    cfg.require("circuit", "atom", "scan")
    bs = _band(cfg)
    em = bloch.effective_mass_fit(bs)
    delta0 = _delta0(cfg, bs)
    lam = bs.params.lambda_m
    x_minus = cfg.get("atom", "x_minus_over_lambda") * lam
    g_minus = cfg.get("atom", "g_minus_mhz") * MHZ
    g_plus = cfg.get("atom", "g_plus_mhz")
    g_plus = g_minus if g_plus is None else g_plus * MHZ
    positions = cfg.scan_values()

    def one(x_plus_frac):
        x_plus = x_plus_frac * lam
        if abs(x_plus - x_minus) < 1e-9 * lam:
            atom = GiantAtom.from_legs([(x_minus, g_minus + g_plus)], delta0=delta0)
        else:
            atom = GiantAtom.from_legs(
                [(x_minus, g_minus), (x_plus, g_plus)], delta0=delta0
            )
        sol = boundstate.bound_state(atom, bs, em=em)
        if atom.is_giant:
            lin = linearize_gk(*edge_window_samples(atom, bs))
            ana = boundstate.analytic_bound_state(lin, em, delta0)
        else:
            ana = None
        return boundstate.chirality(sol, analytic=ana)

    reports = _parallel_map(one, list(positions), _threads(args))
    columns = {
        "x_plus_over_lambda": positions,
        "cb": np.array([r.cb for r in reports]),
        "cb_analytic": np.array(
            [np.nan if r.cb_analytic is None else r.cb_analytic for r in reports]
        ),
    }
    units = {"x_plus_over_lambda": "x/lambda_m", "cb": "1", "cb_analytic": "1"}
    _emit(cfg, args, "chirality_scan.csv", columns, units, {}, caught,
          xcol="x_plus_over_lambda")


@command("coupling-scan")
def run_coupling_scan(cfg, args, caught):
    cfg.require("circuit", "dimer", "scan")
    bs = _band(cfg)
    delta0 = _delta0(cfg, bs)
    spacings = cfg.scan_values()

    def one(spacing_frac):
        sub = _with_value(cfg, "dimer", "anchor_spacing_over_lambda", spacing_frac)
        dimer = sub.dimer(bs.params, delta0)
        return interactions.coupling_pair(dimer, bs)

    pairs = _parallel_map(one, list(spacings), _threads(args))
    columns = {
        "spacing_over_lambda": spacings,
        "j_ab_mhz": np.array([p[0] for p in pairs]) / MHZ,
        "j_ba_mhz": np.array([p[1] for p in pairs]) / MHZ,
    }
    units = {"spacing_over_lambda": "D/lambda_m", "j_ab_mhz": "MHz", "j_ba_mhz": "MHz"}
    _emit(cfg, args, "coupling_scan.csv", columns, units, {}, caught,
          xcol="spacing_over_lambda")


@command("shift-scan")
def run_shift_scan(cfg, args, caught):
    cfg.require("circuit", "dimer", "scan")
    shifts = cfg.scan_values()

    def one(shift_frac):
        sub = _with_value(cfg, "modulation", "shift_over_lambda", shift_frac)
        bs = _band(sub, check_convergence=False)
        delta0 = _delta0(sub, bs)
        dimer = sub.dimer(bs.params, delta0)
        return interactions.coupling_pair(dimer, bs)

    pairs = _parallel_map(one, list(shifts), _threads(args))
    j_ab = np.array([p[0] for p in pairs])
    j_ba = np.array([p[1] for p in pairs])
    columns = {
        "shift_over_lambda": shifts,
        "j_ab_mhz": j_ab / MHZ,
        "j_ba_mhz": j_ba / MHZ,
        "abs_j_ab_mhz": np.abs(j_ab) / MHZ,
        "abs_j_ba_mhz": np.abs(j_ba) / MHZ,
    }
    units = {
        "shift_over_lambda": "ds/lambda_m",
        "j_ab_mhz": "MHz",
        "j_ba_mhz": "MHz",
        "abs_j_ab_mhz": "MHz",
        "abs_j_ba_mhz": "MHz",
    }
    _emit(cfg, args, "shift_scan.csv", columns, units, {}, caught,
          xcol="shift_over_lambda")


@command("poles")
def run_poles(cfg, args, caught):
    cfg.require("circuit", "poles")
    bs = _band(cfg)
    em = bloch.effective_mass_fit(bs)
    g0 = cfg.get("poles", "g0_mhz") * MHZ
    length = 2 * np.pi / (cfg.get("numerics", "dk_over_km") * bs.params.km)
    d_start = cfg.get("poles", "delta0p_mhz_start")
    d_stop = cfg.get("poles", "delta0p_mhz_stop")
    detunings = np.linspace(d_start, d_stop, cfg.get("poles", "steps"))
    rows = [interactions.find_poles(g0, em, d * MHZ, length) for d in detunings]
    columns = {
        "delta0p_mhz": detunings,
        "z0_mhz": np.array([r.z0 for r in rows]) / MHZ,
        "gamma_c_mhz": np.array([r.gamma_c for r in rows]) / MHZ,
        "res0": np.array([r.res0 for r in rows]),
        "abs_res1": np.array(
            [0.0 if r.res1 is None else abs(r.res1) for r in rows]
        ),
    }
    meta = {"alpha_m (m^2 rad/s)": f"{em.alpha_m:.6e}", "length (m)": f"{length:.6e}"}
    units = {
        "delta0p_mhz": "MHz",
        "z0_mhz": "MHz",
        "gamma_c_mhz": "MHz",
        "res0": "1",
        "abs_res1": "1",
    }
    _emit(cfg, args, "poles.csv", columns, units, meta, caught, xcol="delta0p_mhz")


@command("pump")
def run_pump(cfg, args, caught):
    cfg.require("pump")
    schedule = cfg.pump_schedule()
    run = topo.evolve_pump(
        ncells=cfg.get("pump", "ncells"),
        schedule=schedule,
        cycles=cfg.get("pump", "cycles"),
        initial=cfg.get("pump", "initial_site"),
        dt=cfg.get("pump", "dt_over_period") * schedule.period,
    )
    stride = max(1, len(run.times) // 2000)
    columns = {"time": run.times[::stride]}
    units = {"time": "1/J0"}
    for site in range(run.site_populations.shape[1]):
        name = f"pop_site_{site:02d}"
        columns[name] = run.site_populations[::stride, site]
        units[name] = "probability"
    meta = {
        f"fidelity cycle {i + 1}": f"{f:.8f}"
        for i, f in enumerate(run.fidelity_per_cycle)
    }
    meta["norm drift"] = f"{run.norm_drift:.3e}"
    _emit(cfg, args, "pump.csv", columns, units, meta, caught, xcol="time")


def _with_value(cfg: ExperimentConfig, section: str, key: str, value) -> ExperimentConfig:
    values = dict(cfg.values)
    values[(section, key)] = float(value)
    return ExperimentConfig(values, cfg.sections, cfg.source, cfg.overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcwqed",
        description="Band structure, chiral bound states, dipole-dipole "
        "couplings and topological pumping of a modulated SQUID-chain waveguide.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="INI experiment file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--plot", action="store_true", help="also write an SVG plot")
        p.add_argument("--dk", type=float, default=None, help="override numerics.dk_over_km")
        p.add_argument(
            "--harmonics", type=int, default=None, help="override numerics.harmonics"
        )
        p.add_argument(
            "--threads",
            type=int,
            default=None,
            help="scan workers (default: PCWQED_THREADS or 1)",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.dk is not None:
        overrides[("numerics", "dk_over_km")] = args.dk
    if args.harmonics is not None:
        overrides[("numerics", "harmonics")] = args.harmonics
    try:
        cfg = load_config(args.config, overrides)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            COMMANDS[args.command](cfg, args, caught)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    raise SystemExit(main())
