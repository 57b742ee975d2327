"""Run configuration: JSON parsing and validation.

A configuration looks like::

    {
      "system": "SINGLE",
      "hamiltonian": {"chi1": "1", "chi2": "0"},
      "initial": {"kind": "CS", "alpha": {"nu": 10, "phase_over_pi": "1/4"}},
      "times": {"time_unit": "T_rev", "values": ["0", "1/2", "1/3"]},
      "grid": {"x_count": 1001, "theta_count": 181},
      "analyses": ["TOMOGRAM", {"name": "HONG_MANDEL", "q": [1, 2]}],
      "output": "out"
    }

Times are given either as a list ``values`` or as ``{"start", "stop",
"count"}`` (inclusive); fractions are strings such as ``"1/4"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .dynamics_bec import BecInitialSpec, BecParams, bec_revival_check
from .dynamics_single import PiMultiple, SingleModeHamiltonian, as_coupling, revival_time
from .fock import DEFAULT_EPS, StateSpec

ANALYSES = ("TOMOGRAM", "STRANDS", "BLOBS", "HONG_MANDEL", "HILLERY", "ENTROPY",
            "ENTANGLEMENT", "REVIVAL_SCAN")
BEC_ONLY = ("BLOBS", "ENTANGLEMENT")
SINGLE_ONLY = ("STRANDS",)
WITH_ORDERS = ("HONG_MANDEL", "HILLERY")


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class Analysis:
    name: str
    orders: tuple = ()
    options: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class TimeSpec:
    unit: str
    values: tuple  # Fractions for "T_rev", floats for "absolute"

    def fractions_of_trev(self, period: Optional[float]):
        if self.unit == "T_rev":
            return [float(v) for v in self.values]
        if period is None:
            return [float("nan")] * len(self.values)
        return [v / period for v in self.values]


@dataclass
class RunConfig:
    system: str
    hamiltonian: object
    initial: object
    times: TimeSpec
    analyses: list
    x_count: int = 1001
    x_max: Optional[float] = None
    theta_count: int = 181
    sections: tuple = ((Fraction(0), Fraction(0)),)
    eps: float = DEFAULT_EPS
    angle_count: int = 5
    output: Optional[str] = None
    pattern: dict = field(default_factory=dict)
    figures: bool = True
    source_text: str = ""

    def analysis(self, name: str) -> Optional[Analysis]:
        for a in self.analyses:
            if a.name == name:
                return a
        return None

    # ------------------------------------------------------------ physics

    @property
    def period(self):
        """Revival period as a :class:`PiMultiple` (single mode) or float, or None."""
        if self.system == "SINGLE":
            return revival_time(self.hamiltonian).period
        if self.hamiltonian.U_ab == 0:
            return None
        return self.hamiltonian.revival_period

    @property
    def period_float(self) -> Optional[float]:
        p = self.period
        return None if p is None else float(p)

    def instants(self):
        """Evolution times, exact :class:`PiMultiple` where possible."""
        if self.times.unit == "absolute":
            return list(self.times.values)
        p = self.period
        if p is None:
            raise ConfigError("times.time_unit", "revivals absent, times cannot be given in T_rev")
        if isinstance(p, PiMultiple):
            return [p * f for f in self.times.values]
        return [float(p) * float(f) for f in self.times.values]

    def warnings(self) -> list:
        out = []
        needs_revival = self.times.unit == "T_rev" or self.analysis("REVIVAL_SCAN") is not None
        if self.system == "SINGLE":
            if revival_time(self.hamiltonian).absent and needs_revival:
                out.append("revivals absent for this Hamiltonian (irrational coupling ratio)")
        else:
            chk = bec_revival_check(self.hamiltonian) if self.hamiltonian.U_ab != 0 else None
            if (chk is None or not chk.is_revival_system) and needs_revival:
                out.append("revivals absent: omega0/U_ab and lambda1/U_ab are not integers "
                           "with an odd sum")
        return out

    def summary(self) -> list:
        lines = [f"system: {self.system}"]
        if self.system == "SINGLE":
            H = self.hamiltonian
            lines.append(f"hamiltonian: chi1={H.chi1}, chi2={H.chi2}")
            sched = revival_time(H)
            if sched.absent:
                lines.append("revival period: none")
            elif isinstance(sched.period, PiMultiple):
                lines.append(f"revival period: {sched.period.coefficient} pi")
            else:
                lines.append(f"revival period: {sched.period:.17g}")
        else:
            chk = bec_revival_check(self.hamiltonian) if self.hamiltonian.U_ab != 0 else None
            if chk is not None and chk.is_revival_system:
                lines.append(f"revival system: m={chk.m}, m′={chk.m_prime}")
            else:
                lines.append("not a revival system")
        lines.append(f"times: {len(self.times.values)} ({self.times.unit})")
        lines.append("analyses: " + ", ".join(a.name for a in self.analyses))
        return lines


# ---------------------------------------------------------------- parsing helpers


def _fraction(value, where: str) -> Fraction:
    if isinstance(value, bool):
        raise ConfigError(where, "expected a number or fraction string")
    try:
        if isinstance(value, float):
            return Fraction(value).limit_denominator(10**12)
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError, OverflowError):
        raise ConfigError(where, f"cannot read {value!r} as a fraction") from None


def _real(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(where, "expected a number")
    if isinstance(value, (int, float)):
        x = float(value)
    elif isinstance(value, str):
        s = value.strip()
        try:
            if s.startswith("sqrt(") and s.endswith(")"):
                x = math.sqrt(float(Fraction(s[5:-1])))
            else:
                x = float(Fraction(s))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(where, f"cannot read {value!r} as a number") from None
    else:
        raise ConfigError(where, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(x):
        raise ConfigError(where, "must be finite")
    return x


def _complex(value, where: str) -> complex:
    """Accepts a real, ``[re, im]`` or ``{"nu": |alpha|^2, "phase_over_pi": p}``."""
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(where, "complex numbers are [re, im]")
        return complex(_real(value[0], where + "[0]"), _real(value[1], where + "[1]"))
    if isinstance(value, dict):
        unknown = set(value) - {"nu", "abs", "phase_over_pi"}
        if unknown:
            raise ConfigError(where, f"unknown keys {sorted(unknown)}")
        if "nu" in value and "abs" in value:
            raise ConfigError(where, "give either nu or abs")
        if "nu" in value:
            nu = _real(value["nu"], where + ".nu")
            if nu < 0:
                raise ConfigError(where + ".nu", "must be >= 0")
            r = math.sqrt(nu)
        else:
            r = _real(value.get("abs", 0), where + ".abs")
        ph = float(_fraction(value.get("phase_over_pi", 0), where + ".phase_over_pi"))
        return r * complex(math.cos(math.pi * ph), math.sin(math.pi * ph))
    return complex(_real(value, where))


def _int(value, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(where, "expected an integer")
    if value < minimum:
        raise ConfigError(where, f"must be >= {minimum}")
    return value


def _expect_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ConfigError(where, f"unknown keys {sorted(unknown)}")


def _parse_hamiltonian(system, h):
    if system == "SINGLE":
        _expect_keys(h, ("chi1", "chi2"), "hamiltonian")
        vals = {}
        for k in ("chi1", "chi2"):
            raw = h.get(k, 0)
            # integers and fraction strings stay exact; "sqrt(x)" and floats are generic reals
            if isinstance(raw, str) and raw.strip().startswith("sqrt("):
                vals[k] = _real(raw, f"hamiltonian.{k}")
            elif isinstance(raw, (int, str)) and not isinstance(raw, bool):
                vals[k] = as_coupling(_fraction(raw, f"hamiltonian.{k}"))
            else:
                vals[k] = _real(raw, f"hamiltonian.{k}")
        try:
            return SingleModeHamiltonian(vals["chi1"], vals["chi2"])
        except ValueError as exc:
            raise ConfigError("hamiltonian", str(exc)) from None
    _expect_keys(h, ("omega0", "omega1", "lam", "U_ab"), "hamiltonian")
    missing = [k for k in ("omega0", "omega1", "lam", "U_ab") if k not in h]
    if missing:
        raise ConfigError("hamiltonian", f"missing {missing}")
    try:
        return BecParams(**{k: _real(h[k], f"hamiltonian.{k}") for k in h})
    except ValueError as exc:
        raise ConfigError("hamiltonian", str(exc)) from None


def _parse_initial(system, s):
    if system == "SINGLE":
        _expect_keys(s, ("kind", "alpha", "m", "n", "n_max"), "initial")
        kind = s.get("kind")
        if not isinstance(kind, str):
            raise ConfigError("initial.kind", "expected one of CS, PACS, TCS, FOCK")
        try:
            return StateSpec(kind, _complex(s.get("alpha", 0), "initial.alpha"),
                             _int(s.get("m", 0), "initial.m"), _int(s.get("n", 0), "initial.n"),
                             _int(s.get("n_max", 0), "initial.n_max"))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("initial.kind", str(exc)) from None
    _expect_keys(s, ("alpha_a", "alpha_b", "m1", "m2"), "initial")
    return BecInitialSpec(_complex(s.get("alpha_a", 0), "initial.alpha_a"),
                          _complex(s.get("alpha_b", 0), "initial.alpha_b"),
                          _int(s.get("m1", 0), "initial.m1"), _int(s.get("m2", 0), "initial.m2"))


def _parse_times(t):
    _expect_keys(t, ("time_unit", "values", "start", "stop", "count"), "times")
    unit = t.get("time_unit")
    if unit not in ("T_rev", "absolute"):
        raise ConfigError("times.time_unit", "must be \"T_rev\" or \"absolute\"")
    conv = _fraction if unit == "T_rev" else _real
    if "values" in t:
        if any(k in t for k in ("start", "stop", "count")):
            raise ConfigError("times", "give either values or start/stop/count")
        if not isinstance(t["values"], list) or not t["values"]:
            raise ConfigError("times.values", "expected a non-empty list")
        vals = tuple(conv(v, f"times.values[{i}]") for i, v in enumerate(t["values"]))
    else:
        for k in ("start", "stop", "count"):
            if k not in t:
                raise ConfigError(f"times.{k}", "missing")
        count = _int(t["count"], "times.count", 1)
        a, b = conv(t["start"], "times.start"), conv(t["stop"], "times.stop")
        if count == 1:
            vals = (a,)
        else:
            vals = tuple(a + (b - a) * (Fraction(i, count - 1) if unit == "T_rev" else i / (count - 1))
                         for i in range(count))
    for i, v in enumerate(vals):
        if v < 0:
            raise ConfigError(f"times.values[{i}]", "times must be >= 0")
    return TimeSpec(unit, vals)


def _parse_analyses(system, items):
    if not isinstance(items, list) or not items:
        raise ConfigError("analyses", "at least one analysis is required")
    out = []
    seen = set()
    for i, item in enumerate(items):
        where = f"analyses[{i}]"
        if isinstance(item, str):
            name, opts = item, {}
        elif isinstance(item, dict) and isinstance(item.get("name"), str):
            name, opts = item["name"], {k: v for k, v in item.items() if k != "name"}
        else:
            raise ConfigError(where, "expected a name or {\"name\": ...}")
        name = name.upper()
        if name not in ANALYSES:
            raise ConfigError(where, f"unknown analysis {name!r}")
        if name in seen:
            raise ConfigError(where, f"{name} requested twice")
        seen.add(name)
        if system == "SINGLE" and name in BEC_ONLY:
            raise ConfigError(where, f"{name} requires the BEC system")
        if system == "BEC" and name in SINGLE_ONLY:
            raise ConfigError(where, f"{name} requires the SINGLE system")
        orders = ()
        if name in WITH_ORDERS:
            q = opts.pop("q", [1])
            if not isinstance(q, list) or not q:
                raise ConfigError(where + ".q", "expected a non-empty list of orders")
            orders = tuple(_int(v, f"{where}.q[{j}]", 1) for j, v in enumerate(q))
            if max(orders) > 4:
                raise ConfigError(where + ".q", "orders above 4 are not supported")
        unknown = set(opts)
        if unknown:
            raise ConfigError(where, f"unknown keys {sorted(unknown)}")
        out.append(Analysis(name, orders, opts))
    return out


TOP_KEYS = ("system", "hamiltonian", "initial", "times", "grid", "analyses", "output",
            "eps", "angle_count", "pattern", "figures")


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"malformed JSON at line {exc.lineno}, column {exc.colno} "
                              f"(char {exc.pos}): {exc.msg}") from None
    _expect_keys(raw, TOP_KEYS, "config")
    for k in ("system", "hamiltonian", "initial", "times", "analyses"):
        if k not in raw:
            raise ConfigError(k, "missing")
    system = raw["system"]
    if system not in ("SINGLE", "BEC"):
        raise ConfigError("system", "must be \"SINGLE\" or \"BEC\"")
    cfg = RunConfig(
        system=system,
        hamiltonian=_parse_hamiltonian(system, raw["hamiltonian"]),
        initial=_parse_initial(system, raw["initial"]),
        times=_parse_times(raw["times"]),
        analyses=_parse_analyses(system, raw["analyses"]),
        source_text=text,
    )
    grid = raw.get("grid", {})
    _expect_keys(grid, ("x_count", "x_max", "theta_count", "sections"), "grid")
    if "x_count" in grid:
        cfg.x_count = _int(grid["x_count"], "grid.x_count", 3)
        if cfg.x_count % 2 == 0:
            raise ConfigError("grid.x_count", "must be odd")
    if "x_max" in grid:
        cfg.x_max = _real(grid["x_max"], "grid.x_max")
        if cfg.x_max <= 0:
            raise ConfigError("grid.x_max", "must be positive")
    if "theta_count" in grid:
        cfg.theta_count = _int(grid["theta_count"], "grid.theta_count", 1)
    if "sections" in grid:
        secs = grid["sections"]
        if system != "BEC":
            raise ConfigError("grid.sections", "sections only apply to the BEC system")
        if not isinstance(secs, list) or not secs:
            raise ConfigError("grid.sections", "expected a list of [theta1/pi, theta2/pi]")
        parsed = []
        for i, s in enumerate(secs):
            if not isinstance(s, list) or len(s) != 2:
                raise ConfigError(f"grid.sections[{i}]", "expected [theta1/pi, theta2/pi]")
            parsed.append((_fraction(s[0], f"grid.sections[{i}][0]"),
                           _fraction(s[1], f"grid.sections[{i}][1]")))
        cfg.sections = tuple(parsed)
    if "eps" in raw:
        cfg.eps = _real(raw["eps"], "eps")
        if not 0 < cfg.eps <= 1e-6:
            raise ConfigError("eps", "must lie in (0, 1e-6]")
    if "angle_count" in raw:
        cfg.angle_count = _int(raw["angle_count"], "angle_count", 2)
    if "output" in raw:
        if not isinstance(raw["output"], str) or not raw["output"]:
            raise ConfigError("output", "expected a directory path")
        cfg.output = raw["output"]
    if "pattern" in raw:
        pat = raw["pattern"]
        _expect_keys(pat, ("strands", "blobs"), "pattern")
        for k, v in pat.items():
            _expect_keys(v, ("relative_threshold", "smoothing_width"), f"pattern.{k}")
            cfg.pattern[k] = {kk: _real(vv, f"pattern.{k}.{kk}") for kk, vv in v.items()}
    if "figures" in raw:
        if not isinstance(raw["figures"], bool):
            raise ConfigError("figures", "expected true or false")
        cfg.figures = raw["figures"]
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)
