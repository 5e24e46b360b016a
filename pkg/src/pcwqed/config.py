"""Experiment configuration: INI files with strict keys and unit-bearing names.

Sections are explicit opt-ins per command (a missing required section is a
config error); every key inside a present section has a default, and the
resolved values are echoed into output metadata so a run can be repeated
bit-identically.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .atom import GiantAtom
from .bloch import ModulationProfile
from .circuit import CircuitParams, calibrated_params, nominal_params
from .errors import ConfigError
from .interactions import Dimer
from .topo import PumpSchedule

MHZ = 2 * np.pi * 1e6

_PRESETS = {"calibrated": calibrated_params, "nominal": nominal_params}

# section -> key -> (default, converter)
_SCHEMA: dict[str, dict[str, tuple]] = {
    "circuit": {
        "preset": ("calibrated", str),
        "d0_um": (None, float),
        "cg_ff": (None, float),
        "cj_ff": (None, float),
        "l0_nh": (None, float),
        "alpha0": (None, float),
        "delta_alpha": (None, float),
        "cells_per_period": (None, int),
    },
    "modulation": {
        "kind": ("cosine", str),
        "shift_over_lambda": (0.0, float),
    },
    "numerics": {
        "dk_over_km": (1e-4, float),
        "harmonics": (10, int),
        "samples_per_lambda": (16, int),
        "span_decay_lengths": (12.0, float),
        "delta0_over_gap": (0.1, float),
    },
    "atom": {
        "x_minus_over_lambda": (0.0, float),
        "g_minus_mhz": (0.04, float),
        "x_plus_over_lambda": (None, float),
        "g_plus_mhz": (None, float),
    },
    "dimer": {
        "anchor_spacing_over_lambda": (1.5, float),
        "x_plus_offset_over_lambda": (-0.5, float),
        "g_minus_mhz": (0.04, float),
        "g_plus_mhz": (0.04, float),
    },
    "scan": {
        "start": (None, float),
        "stop": (None, float),
        "steps": (None, int),
    },
    "poles": {
        "g0_mhz": (0.8, float),
        "delta0p_mhz_start": (5.0, float),
        "delta0p_mhz_stop": (120.0, float),
        "steps": (47, int),
    },
    "pump": {
        "ncells": (6, int),
        "j0": (1.0, float),
        "pump_delta": (0.9, float),
        "omega_p": (0.3, float),
        "period": (100.0, float),
        "cycles": (3, int),
        "dt_over_period": (5e-4, float),
        "min_coupling": (None, float),
        "initial_site": (0, int),
    },
    "bloch": {
        "n_modes": (4, int),
        "x_span_over_lambda": (2.0, float),
    },
    "gk": {
        "window_over_km": (0.05, float),
    },
    "output": {
        "csv": (None, str),
        "svg": (None, str),
    },
}


@dataclass
class ExperimentConfig:
    """Validated configuration with resolved (section, key) -> value map."""

    values: dict[tuple[str, str], object]
    sections: tuple[str, ...]
    source: str = "<memory>"
    overrides: dict = field(default_factory=dict)

    # -- raw access -----------------------------------------------------

    def get(self, section: str, key: str):
        return self.values[(section, key)]

    def has_section(self, section: str) -> bool:
        return section in self.sections

    def require(self, *needed: str) -> None:
        for section in needed:
            if not self.has_section(section):
                raise ConfigError(
                    f"{self.source}: missing required section [{section}]"
                )

    def echo_lines(self) -> list[str]:
        """Resolved key/value lines, deterministic order."""
        out = []
        for (section, key), value in sorted(self.values.items()):
            out.append(f"{section}.{key} = {value}")
        return out

    def digest(self) -> str:
        payload = "\n".join(self.echo_lines()).encode()
        return hashlib.sha256(payload).hexdigest()

    # -- physics objects -------------------------------------------------

    def circuit_params(self) -> CircuitParams:
        preset = self.get("circuit", "preset")
        if preset not in _PRESETS:
            raise ConfigError(
                f"unknown circuit.preset {preset!r}; pick one of {sorted(_PRESETS)}"
            )
        base = _PRESETS[preset]()
        d0 = self._override_unit("circuit", "d0_um", 1e-6, base.d0)
        cells = self.get("circuit", "cells_per_period")
        return CircuitParams(
            d0=d0,
            cg=self._override_unit("circuit", "cg_ff", 1e-15, base.cg),
            cj=self._override_unit("circuit", "cj_ff", 1e-15, base.cj),
            l0=self._override_unit("circuit", "l0_nh", 1e-9, base.l0),
            alpha0=self._override_unit("circuit", "alpha0", 1.0, base.alpha0),
            delta_alpha=self._override_unit(
                "circuit", "delta_alpha", 1.0, base.delta_alpha
            ),
            km=2 * np.pi / ((cells if cells is not None else base.cells_per_period) * d0),
        )

    def _override_unit(self, section, key, unit, fallback):
        raw = self.get(section, key)
        return fallback if raw is None else raw * unit

    def profile(self) -> ModulationProfile:
        params = self.circuit_params()
        return ModulationProfile(
            base=params,
            kind=self.get("modulation", "kind"),
            shift=self.get("modulation", "shift_over_lambda") * params.lambda_m,
        )

    def atom(self, params: CircuitParams, delta0: float) -> GiantAtom:
        lam = params.lambda_m
        legs = [
            (
                self.get("atom", "x_minus_over_lambda") * lam,
                self.get("atom", "g_minus_mhz") * MHZ,
            )
        ]
        x_plus = self.get("atom", "x_plus_over_lambda")
        g_plus = self.get("atom", "g_plus_mhz")
        if (x_plus is None) != (g_plus is None):
            raise ConfigError(
                "atom.x_plus_over_lambda and atom.g_plus_mhz must be given together"
            )
        if x_plus is not None:
            legs.append((x_plus * lam, g_plus * MHZ))
        return GiantAtom.from_legs(legs, delta0=delta0)

    def dimer(self, params: CircuitParams, delta0: float) -> Dimer:
        lam = params.lambda_m
        spacing = self.get("dimer", "anchor_spacing_over_lambda") * lam
        offset = self.get("dimer", "x_plus_offset_over_lambda") * lam
        g_minus = self.get("dimer", "g_minus_mhz") * MHZ
        g_plus = self.get("dimer", "g_plus_mhz") * MHZ
        atom_a = GiantAtom.from_legs(
            [(0.0, g_minus), (offset, g_plus)], delta0=delta0
        )
        atom_b = GiantAtom.from_legs(
            [(spacing, g_minus), (spacing + offset, g_plus)], delta0=delta0
        )
        return Dimer(atom_a, atom_b)

    def pump_schedule(self) -> PumpSchedule:
        return PumpSchedule(
            j0=self.get("pump", "j0"),
            pump_delta=self.get("pump", "pump_delta"),
            omega_p=self.get("pump", "omega_p"),
            period=self.get("pump", "period"),
            min_coupling=self.get("pump", "min_coupling"),
        )

    def scan_values(self) -> np.ndarray:
        start = self.get("scan", "start")
        stop = self.get("scan", "stop")
        steps = self.get("scan", "steps")
        if None in (start, stop, steps):
            raise ConfigError("scan.start, scan.stop and scan.steps are all required")
        if steps < 2:
            raise ConfigError("scan.steps must be at least 2")
        return np.linspace(start, stop, steps)


def _convert(section: str, key: str, raw: str, conv, source: str):
    raw = raw.strip()
    if raw == "":
        return None
    try:
        if conv is int:
            value = int(raw)
        elif conv is float:
            value = float(raw)
        else:
            value = raw
    except ValueError as exc:
        raise ConfigError(
            f"{source}: [{section}] {key} = {raw!r} is not a valid {conv.__name__}"
        ) from exc
    return value


def load_config(
    path: str | Path, overrides: dict[tuple[str, str], object] | None = None
) -> ExperimentConfig:
    """Parse and validate an INI experiment file.

    `overrides` maps (section, key) to already-converted values (used by CLI
    flags such as --dk); overridden sections are treated as present.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    values: dict[tuple[str, str], object] = {}
    present = []
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"{path}: unknown section [{section}]; valid sections: "
                f"{', '.join(sorted(_SCHEMA))}"
            )
        present.append(section)
        schema = _SCHEMA[section]
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in section [{section}]; valid "
                    f"keys: {', '.join(sorted(schema))}"
                )
            values[(section, key)] = _convert(section, key, raw, schema[key][1], str(path))

    # defaults for everything not given
    for section, schema in _SCHEMA.items():
        for key, (default, _conv) in schema.items():
            values.setdefault((section, key), default)

    if overrides:
        for (section, key), value in overrides.items():
            if section not in _SCHEMA or key not in _SCHEMA[section]:
                raise ConfigError(f"invalid override {section}.{key}")
            values[(section, key)] = value
            if section not in present:
                present.append(section)

    return ExperimentConfig(
        values=values,
        sections=tuple(present),
        source=str(path),
        overrides=dict(overrides or {}),
    )
