"""JSON experiment configuration: parsing, validation, canonical hashing."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .core import (
    Grid,
    KfgLabError,
    KfgState,
    PhysicalUnits,
    ScalarPotential,
    SpatialProfile,
    TimeFactor,
)
from .bc import BcParams, InvalidParams, params_from_tag
from .evolution import EvolutionConfig
from .operators import System


class ConfigError(KfgLabError):
    """Malformed or inconsistent experiment configuration."""


def load_config(path: str | Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def units_from_config(cfg: dict) -> PhysicalUnits:
    d = cfg.get("units", {})
    try:
        return PhysicalUnits(
            hbar=float(d.get("hbar", 1.0)),
            c=float(d.get("c", 1.0)),
            mass=float(d.get("mass", 1.0)),
            bc_length=float(d.get("lambda", d.get("bc_length", 1.0))),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad units section: {exc}") from exc


def grid_from_config(cfg: dict) -> Grid:
    d = cfg.get("grid")
    if d is None:
        raise ConfigError("config is missing the grid section")
    try:
        return Grid(a=float(d["a"]), b=float(d["b"]), n=int(d["n"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid section: {exc}") from exc


def potential_from_config(cfg: dict) -> ScalarPotential:
    d = cfg.get("potential")
    if d is None:
        return ScalarPotential()
    try:
        pd = d.get("profile", {"kind": "constant", "value": 0.0})
        profile = SpatialProfile(
            kind=pd.get("kind", "constant"),
            value=float(pd.get("value", 0.0)),
            x0=float(pd.get("x0", 0.0)),
            left=float(pd.get("left", 0.0)),
            right=float(pd.get("right", 0.0)),
            coefficient=float(pd.get("coefficient", 0.0)),
            offset=float(pd.get("offset", 0.0)),
            values=tuple(pd.get("values", ())),
        )
        td = d.get("time_factor", {"kind": "constant"})
        factor = TimeFactor(
            kind=td.get("kind", "constant"),
            scale=float(td.get("scale", 1.0)),
            amplitude=float(td.get("amplitude", 1.0)),
            omega=float(td.get("omega", 1.0)),
            phase=float(td.get("phase", 0.0)),
            offset=float(td.get("offset", 0.0)),
            rate=float(td.get("rate", 0.0)),
        )
        return ScalarPotential(
            profile=profile, time_factor=factor, nonneg=bool(d.get("nonneg", False))
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential section: {exc}") from exc


def bc_from_config(cfg: dict, units: PhysicalUnits) -> BcParams:
    d = cfg.get("bc")
    if d is None:
        raise ConfigError("config is missing the bc section")
    try:
        if isinstance(d, str):
            return params_from_tag(d, lam=units.bc_length)
        return BcParams(
            m0=float(d["m0"]),
            m1=float(d["m1"]),
            m2=float(d["m2"]),
            m3=float(d["m3"]),
            mu=float(d["mu"]),
            lam=float(d.get("lambda", units.bc_length)),
        )
    except (KeyError, TypeError, ValueError, InvalidParams) as exc:
        raise ConfigError(f"bad bc section: {exc}") from exc


def system_from_config(cfg: dict) -> System:
    units = units_from_config(cfg)
    grid = grid_from_config(cfg)
    potential = potential_from_config(cfg)
    bc = bc_from_config(cfg, units)
    return System(grid=grid, bc=bc, potential=potential, units=units)


def majorana_from_config(cfg: dict) -> str | None:
    kind = cfg.get("majorana", "none")
    if kind in (None, "none"):
        return None
    if kind in ("plus", "minus"):
        return kind
    raise ConfigError(f"majorana must be plus, minus or none, got {kind!r}")


def initial_state_from_config(cfg: dict, system: System) -> KfgState:
    d = cfg.get("initial_state")
    if d is None:
        raise ConfigError("config is missing the initial_state section")
    kind = majorana_from_config(cfg) or "none"
    if kind != "none" and system.closure.is_complex:
        raise ConfigError(
            "a strictly neutral run is incompatible with a complex (m2 != 0) "
            "boundary condition"
        )
    t0 = float(cfg.get("t0", 0.0))
    if "modes" in d:
        try:
            coeffs = [
                (int(m["index"]), float(m.get("amplitude", 1.0)), float(m.get("phase", 0.0)))
                for m in d["modes"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad mode list: {exc}") from exc
        return system.synthesize(coeffs, t=t0, kind=kind)
    if "tabulated" in d:
        td = d["tabulated"]
        try:
            n = system.grid.n
            psi = np.asarray(td["psi_re"], dtype=float) + 1j * np.asarray(
                td.get("psi_im", np.zeros(n)), dtype=float
            )
            psi_t = np.asarray(td.get("psi_t_re", np.zeros(n)), dtype=float) + 1j * np.asarray(
                td.get("psi_t_im", np.zeros(n)), dtype=float
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad tabulated state: {exc}") from exc
        if len(psi) != n or len(psi_t) != n:
            raise ConfigError("tabulated state length must match the grid")
        return KfgState(psi=psi, psi_t=psi_t, t=t0)
    raise ConfigError("initial_state must contain 'modes' or 'tabulated'")


def evolution_from_config(cfg: dict) -> EvolutionConfig:
    d = cfg.get("evolution")
    if d is None:
        raise ConfigError("config is missing the evolution section")
    try:
        return EvolutionConfig(
            dt=float(d["dt"]),
            steps=int(d["steps"]),
            record_every=int(d.get("record_every", 1)),
            scheme=d.get("scheme", "cayley"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad evolution section: {exc}") from exc
