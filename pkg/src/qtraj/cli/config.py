"""Run configuration: one JSON document, overridden field by field by flags."""

from dataclasses import asdict, dataclass, field, fields
import json
import math
from typing import Optional

from ..basis import Constant, HarmonicExcited1, HarmonicGround, Linear, Scenario, build_basis
from ..dynamics import IntegrationOptions, Microstate, allowed_flow_microstate

POTENTIALS = ("constant", "linear", "harmonic_ground", "harmonic_excited1")
# the one potential-specific parameter each potential takes
_POT_PARAM = {
    "constant": "v0_ev",
    "linear": "g_ev_per_angstrom",
    "harmonic_ground": "omega",
    "harmonic_excited1": "omega",
}
TURNING_SNAP = 1e-5  # relative
_OPTIONAL_POT_PARAM = {"harmonic_ground", "harmonic_excited1"}


class ConfigError(ValueError):
    """Invalid or incomplete run configuration (exit code 2)."""


@dataclass
class RunConfig:
    potential: Optional[str] = None
    energy_ev: Optional[float] = None
    v0_ev: Optional[float] = None
    g_ev_per_angstrom: Optional[float] = None
    omega: Optional[float] = None  # 1/fs
    a: Optional[float] = None
    b: float = 0.0
    l: float = 0.0
    x0_angstrom: float = 0.0
    t0_fs: float = 0.0
    t_end_fs: Optional[float] = None
    sign: Optional[str] = None  # "+" or "-": direction of motion along x
    hbar_scale: float = 1.0
    epsilon_turn: float = 1e-9
    v_max: Optional[float] = None
    rtol: float = 1e-10
    atol: float = 1e-12
    enter_barrier: bool = False
    # "flow": (a, b) enter the velocity field directly; "closed_form": (a, b)
    # label the constant-potential closed form, x0 its additive constant
    constants_form: str = "flow"
    samples: int = 2001
    outputs: list = field(default_factory=lambda: ["csv", "json"])

    def to_dict(self):
        return asdict(self)


_FIELDS = {f.name for f in fields(RunConfig)}


def load_config(path=None, overrides=None) -> RunConfig:
    """Read ``path`` (JSON) and apply ``overrides`` (non-``None`` values win)."""
    data = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return RunConfig(**data)


def _num(cfg, name, positive=False):
    v = getattr(cfg, name)
    if v is None:
        raise ConfigError(f"missing required field '{name}'")
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"field '{name}' must be a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"field '{name}' must be finite")
    if positive and not v > 0:
        raise ConfigError(f"field '{name}' must be positive")
    return v


@dataclass
class ResolvedRun:
    config: RunConfig
    scenario: Scenario
    microstate: Microstate
    x0: float
    options: IntegrationOptions


def resolve(cfg: RunConfig) -> ResolvedRun:
    """Validate ``cfg`` and build the scenario, microstate and options.

    Raises
    ------
    ConfigError
        Naming the offending field.
    """
    if cfg.potential is None:
        raise ConfigError("missing required field 'potential'")
    if cfg.potential not in POTENTIALS:
        raise ConfigError(f"field 'potential' must be one of {', '.join(POTENTIALS)}")
    energy = _num(cfg, "energy_ev")
    a = _num(cfg, "a")
    if a == 0:
        raise ConfigError("field 'a' must be non-zero")
    b = _num(cfg, "b")
    l_phase = _num(cfg, "l")
    x0 = _num(cfg, "x0_angstrom")
    t0 = _num(cfg, "t0_fs")
    t_end = _num(cfg, "t_end_fs")
    if not t_end > t0:
        raise ConfigError("t_end_fs must exceed t0_fs")
    hbar_scale = _num(cfg, "hbar_scale", positive=True)

    own = _POT_PARAM[cfg.potential]
    for other in set(_POT_PARAM.values()) - {own}:
        if getattr(cfg, other) is not None:
            raise ConfigError(f"field '{other}' does not apply to potential '{cfg.potential}'")
    if getattr(cfg, own) is None and cfg.potential not in _OPTIONAL_POT_PARAM:
        raise ConfigError(f"missing required field '{own}' for potential '{cfg.potential}'")

    try:
        if cfg.potential == "constant":
            pot = Constant(_num(cfg, "v0_ev"))
        elif cfg.potential == "linear":
            pot = Linear(_num(cfg, "g_ev_per_angstrom", positive=True))
        else:
            cls = HarmonicGround if cfg.potential == "harmonic_ground" else HarmonicExcited1
            om = None if cfg.omega is None else _num(cfg, "omega", positive=True)
            pot = cls(om)
        sc = Scenario(pot, energy, hbar_scale=hbar_scale)
        pair = build_basis(sc)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    if cfg.constants_form not in ("flow", "closed_form"):
        raise ConfigError("field 'constants_form' must be 'flow' or 'closed_form'")
    ms = Microstate(a, b, l_phase)
    if cfg.constants_form == "closed_form":
        if cfg.potential != "constant" or energy <= (cfg.v0_ev or 0.0):
            raise ConfigError("constants_form 'closed_form' needs a constant potential with E > V0")
        if a < 0:
            raise ConfigError("closed-form constants need a > 0")
        p = math.sqrt(2 * sc.mass * (energy - cfg.v0_ev))
        x0 = sc.hbar / p * math.atan(b) + x0
        ms = allowed_flow_microstate(ms)

    # a start quoted to a few digits at a turning point is snapped onto it
    for tp in sc.turning_points():
        if abs(x0 - tp) <= TURNING_SNAP * max(1.0, abs(tp)):
            x0 = float(tp)
    kin = energy - sc.V(x0)
    if abs(kin) <= 1e-12 * max(abs(energy), 1.0):
        kin = 0.0
    if cfg.sign is None:
        if kin < 0:
            raise ConfigError("x0 lies in a classically forbidden region: field 'sign' is required")
        direction = 1
    elif cfg.sign in ("+", "-"):
        direction = 1 if cfg.sign == "+" else -1
    else:
        raise ConfigError("field 'sign' must be '+' or '-'")
    # positive branch moves toward +x where E > V, toward -x where E < V
    ms = ms.normalized(pair.W_x)
    branch = direction if kin >= 0 else -direction
    ms = Microstate(ms.a, ms.b, ms.l, branch)

    opts = IntegrationOptions(
        rtol=_num(cfg, "rtol", positive=True),
        atol=_num(cfg, "atol", positive=True),
        epsilon_turn=_num(cfg, "epsilon_turn", positive=True),
        v_max=None if cfg.v_max is None else _num(cfg, "v_max", positive=True),
        enter_barrier=bool(cfg.enter_barrier),
    )
    if int(cfg.samples) < 2:
        raise ConfigError("field 'samples' must be at least 2")
    bad = set(cfg.outputs) - {"csv", "json", "svg"}
    if bad:
        raise ConfigError(f"unknown output format(s): {', '.join(sorted(bad))}")
    return ResolvedRun(cfg, sc, ms, x0, opts)
