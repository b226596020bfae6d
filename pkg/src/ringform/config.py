"""Run configuration files.

TOML documents with four sections: ``[formation]`` (gaps, radii, omega),
``[controller]`` (gains), ``[target]`` (motion model), ``[sim]``
(integration and initialization). Parsing is permissive about types
(ints accepted for floats, scalar radius broadcast to all agents);
validation happens after assembly, so every loaded config either passes
the admissibility checks or raises with the full violation list.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .controller import ControllerParams
from .formation import FormationSpec, equal_spacing
from .geometry import Vec2
from .simulate import (
    AgentState,
    ExplicitInit,
    InvalidConfig,
    RandomAnnulusInit,
    SimConfig,
    validate_config,
)
from .targets import TargetModel

BUNDLED = ("example1", "example2", "example3")


@dataclass(frozen=True)
class OutputOptions:
    """Serialization knobs carried alongside the simulation config."""

    store_every: int = 1
    threshold: float = 1e-2  # convergence threshold used in the report


def _vec(raw, name: str) -> Vec2:
    if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
        raise InvalidConfig([f"{name} must be a two-element list"])
    return Vec2(float(raw[0]), float(raw[1]))


def _formation(section: dict) -> FormationSpec:
    omega = float(section.get("omega", 0.0))
    d = section.get("d", "equal")
    radii = section.get("R", 1.0)
    n = section.get("n")

    if isinstance(d, str):
        if d != "equal":
            raise InvalidConfig([f"formation.d must be a list or 'equal', got {d!r}"])
        if n is None:
            if isinstance(radii, (list, tuple)):
                n = len(radii)
            else:
                raise InvalidConfig(
                    ["formation.n is required when d = 'equal' and R is scalar"]
                )
        return equal_spacing(int(n), radii, omega)

    spacings = tuple(float(v) for v in d)
    if not isinstance(radii, (list, tuple)):
        radii = (float(radii),) * len(spacings)
    return FormationSpec(spacings=spacings, radii=tuple(float(r) for r in radii), omega=omega)


def _target(section: dict) -> TargetModel:
    kind = section.get("kind", "static")
    return TargetModel(
        kind=kind,
        position=_vec(section.get("position", [0.0, 0.0]), "target.position"),
        velocity=_vec(section.get("velocity", [0.0, 0.0]), "target.velocity"),
        radius=float(section.get("radius", 1.0)),
        angular_rate=float(section.get("angular_rate", 1.0)),
        phase=float(section.get("phase", 0.0)),
        speed_x=float(section.get("speed_x", 0.0)),
        amplitude=float(section.get("amplitude", 0.0)),
        frequency=float(section.get("frequency", 1.0)),
    )


def _init(section: dict):
    kind = section.get("init", "random-annulus")
    if kind == "random-annulus":
        return RandomAnnulusInit(
            r_min=float(section.get("r_min", 0.5)),
            r_max=float(section.get("r_max", 2.5)),
            v_max=float(section.get("v_max", 0.5)),
        )
    if kind == "explicit":
        states = section.get("states")
        if not states:
            raise InvalidConfig(["sim.states is required for explicit init"])
        parsed = []
        for row in states:
            if len(row) != 4:
                raise InvalidConfig([f"explicit state rows need 4 entries, got {row!r}"])
            parsed.append(
                AgentState(Vec2(float(row[0]), float(row[1])), Vec2(float(row[2]), float(row[3])))
            )
        return ExplicitInit(states=tuple(parsed))
    raise InvalidConfig([f"sim.init must be 'random-annulus' or 'explicit', got {kind!r}"])


def parse_config(text: str) -> tuple[SimConfig, OutputOptions]:
    """Parse and validate a config document; raises InvalidConfig."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InvalidConfig([f"config is not valid TOML: {exc}"]) from exc

    ctl = doc.get("controller", {})
    sim = doc.get("sim", {})
    try:
        params = ControllerParams(
            lambda1=float(ctl.get("lambda1", 1.0)),
            lambda2=float(ctl.get("lambda2", 1.0)),
            mu=float(ctl.get("mu", 1.0)),
            sigma=float(ctl.get("sigma", -1.0)),
            eps_rho=float(ctl.get("eps_rho", 1e-9)),
        )
        config = SimConfig(
            spec=_formation(doc.get("formation", {})),
            params=params,
            target=_target(doc.get("target", {})),
            dt=float(sim.get("dt", 1e-3)),
            t_end=float(sim.get("t_end", 60.0)),
            seed=int(sim.get("seed", 0)),
            init=_init(sim),
        )
    except (ValueError, TypeError) as exc:
        raise InvalidConfig([str(exc)]) from exc

    violations = validate_config(config)
    if violations:
        raise InvalidConfig(violations)

    store_every = int(sim.get("store_every", 1))
    if store_every < 1:
        raise InvalidConfig([f"sim.store_every must be >= 1, got {store_every}"])
    out = OutputOptions(
        store_every=store_every,
        threshold=float(sim.get("threshold", 1e-2)),
    )
    return config, out


def load_config(source: str | Path) -> tuple[SimConfig, OutputOptions]:
    """Load a config from a file path or a bundled example name."""
    if isinstance(source, str) and source in BUNDLED:
        text = resources.files("ringform.configs").joinpath(f"{source}.toml").read_text("utf-8")
        return parse_config(text)
    path = Path(source)
    if not path.exists():
        raise InvalidConfig(
            [f"config {source!r} not found (bundled names: {', '.join(BUNDLED)})"]
        )
    return parse_config(path.read_text("utf-8"))
