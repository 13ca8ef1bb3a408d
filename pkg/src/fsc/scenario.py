"""Scenario files: declarative description of one FSC study.

A scenario is an INI-style text file (parsed with :mod:`configparser`).
Sections and keys::

    [model]
    kind = free_sdof | forced_sdof | nonlinear_sdof | shear_building
    m = 100                      # number, or "axis <i>" for a random parameter
    k = axis 0                   # SDOF models
    q = axis 1                   # forced_sdof
    rho = axis 1                 # nonlinear_sdof
    k1 = axis 0                  # shear_building: k1..kn, alpha, beta
    u0 = 0.05                    # one value per dof (space separated)
    v0 = 0.2
    iota = 1 1 1                 # shear_building influence vector
    ground_motion = synthetic_ns.txt   # relative to the scenario file, else bundled
    unit_scale = 9.80665

    [domain]
    axis0 = uniform <a> <b>
    axis1 = beta <alpha> <beta> <a> <b>
    axis2 = gamma <alpha> <rate> [<shift>]

    [quadrature]
    points = 100 95              # per axis
    desk_points = 7 7            # optional, used unless --long

    [fsc]
    basis_size = 5
    dt = 0.005
    duration = 150
    desk_duration = 15           # optional, used unless --long
    warmup = 5
    warmup_index_bound = 6
    flow_order = 3               # optional
    cadence = 1                  # optional

    [compare]
    target = exact | monte_carlo | none
    samples = 20000
    long_samples = 1000000       # optional, used with --long
    seed = 12345
    reference_points = 400       # optional, forced-SDOF reference resolution

Unknown sections or keys are rejected.  Errors name the file, line and field.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .groundmotion import G, RecordParseError, bundled_record_path, load_ground_motion
from .models import Axis, ForcedSDOF, FreeSDOF, Model, NonlinearSDOF, ShearBuilding
from .probability import Distribution, RandomDomain
from .quadrature import QuadratureGrid, tensor_grid
from .scheme import FscConfig

MODEL_KINDS = ("free_sdof", "forced_sdof", "nonlinear_sdof", "shear_building")
TARGETS = ("exact", "monte_carlo", "none")

_SDOF_KEYS = {"kind", "m", "k", "u0", "v0"}
_MODEL_KEYS = {
    "free_sdof": _SDOF_KEYS,
    "forced_sdof": _SDOF_KEYS | {"q"},
    "nonlinear_sdof": _SDOF_KEYS | {"rho"},
}
_BUILDING_FIXED = {"kind", "m", "alpha", "beta", "u0", "v0", "iota", "ground_motion", "unit_scale"}
_SECTION_KEYS = {
    "quadrature": {"points", "desk_points"},
    "fsc": {"basis_size", "dt", "duration", "desk_duration", "warmup", "warmup_index_bound",
            "flow_order", "cadence"},
    "compare": {"target", "samples", "long_samples", "seed", "reference_points"},
}
_REQUIRED = {
    "quadrature": {"points"},
    "fsc": {"basis_size", "dt", "duration"},
}


class ScenarioError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None, field: str | None = None):
        where = "" if path is None else str(path)
        if line is not None:
            where += f":{line}"
        prefix = f"{where}: " if where else ""
        if field is not None:
            prefix += f"[{field}] "
        super().__init__(prefix + message)
        self.path = path
        self.line = line
        self.field = field


@dataclass(frozen=True)
class Scenario:
    name: str
    model: Model
    domain: RandomDomain
    points: tuple[int, ...]
    fsc: FscConfig
    target: str = "none"
    samples: int = 0
    seed: int = 0
    reference_points: int = 0
    long: bool = False
    source: str | None = None
    #: raw key-value tables as read, for the run manifest
    tables: dict = field(default_factory=dict, compare=False)

    def grid(self) -> QuadratureGrid:
        return tensor_grid(self.domain, self.points)

    def with_fsc(self, **changes) -> "Scenario":
        return replace(self, fsc=replace(self.fsc, **changes))


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """(section, key) -> line number, mirroring configparser's key normalisation."""
    index = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        hit = re.match(r"\[([^\]]+)\]", line)
        if hit:
            section = hit.group(1).strip()
            index[(section, "")] = lineno
            continue
        if section is not None and raw[:1] not in " \t":
            key = re.split(r"[=:]", line, maxsplit=1)[0].strip().lower()
            index[(section, key)] = lineno
    return index


class _Reader:
    def __init__(self, parser: configparser.ConfigParser, lines: dict, path):
        self.parser = parser
        self.lines = lines
        self.path = path

    def error(self, section: str, key: str, message: str) -> ScenarioError:
        line = self.lines.get((section, key), self.lines.get((section, "")))
        return ScenarioError(message, self.path, line, f"{section}.{key}" if key else section)

    def has(self, section: str, key: str) -> bool:
        return self.parser.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        if not self.has(section, key):
            raise self.error(section, "", f"missing key {key!r}")
        return self.parser.get(section, key).strip()

    def convert(self, section: str, key: str, fn, default=None):
        if not self.has(section, key):
            return default
        text = self.raw(section, key)
        try:
            return fn(text)
        except (ValueError, TypeError) as exc:
            raise self.error(section, key, f"bad value {text!r}: {exc}") from None

    def floats(self, section: str, key: str, default=None):
        return self.convert(section, key, lambda s: tuple(float(x) for x in s.split()), default)

    def ints(self, section: str, key: str, default=None):
        return self.convert(section, key, lambda s: tuple(int(x) for x in s.split()), default)

    def param(self, section: str, key: str, d: int, default=None):
        """A number or ``axis <i>`` with ``0 <= i < d``."""
        if not self.has(section, key):
            if default is None:
                raise self.error(section, "", f"missing key {key!r}")
            return default
        text = self.raw(section, key)
        parts = text.split()
        if parts and parts[0].lower() == "axis":
            if len(parts) != 2 or not parts[1].isdigit():
                raise self.error(section, key, f"expected 'axis <index>', got {text!r}")
            i = int(parts[1])
            if i >= d:
                raise self.error(section, key, f"axis {i} is not in the {d}-dimensional domain")
            return Axis(i)
        try:
            return float(text)
        except ValueError:
            raise self.error(section, key, f"expected a number or 'axis <index>', got {text!r}") from None


def _parse_distribution(reader: _Reader, key: str) -> Distribution:
    text = reader.raw("domain", key)
    parts = text.split()
    kind = parts[0].lower() if parts else ""
    try:
        nums = [float(x) for x in parts[1:]]
        if kind == "uniform" and len(nums) == 2:
            return Distribution.uniform(*nums)
        if kind == "beta" and len(nums) == 4:
            return Distribution.beta_on(*nums)
        if kind == "gamma" and len(nums) in (2, 3):
            return Distribution.gamma(*nums)
    except ValueError as exc:
        raise reader.error("domain", key, f"bad distribution {text!r}: {exc}") from None
    raise reader.error(
        "domain", key,
        f"expected 'uniform a b', 'beta alpha beta a b' or 'gamma alpha rate [shift]', got {text!r}",
    )


def _resolve_record(reader: _Reader, base: Path | None):
    name = reader.raw("model", "ground_motion")
    scale = reader.convert("model", "unit_scale", float, G)
    candidates = []
    if base is not None:
        candidates.append(base / name)
    candidates.append(Path(name))
    candidates.append(bundled_record_path(name))
    for path in candidates:
        if path.is_file():
            try:
                return load_ground_motion(path, scale), str(path)
            except RecordParseError as exc:
                raise reader.error("model", "ground_motion", str(exc)) from None
    raise reader.error("model", "ground_motion", f"ground-motion file {name!r} not found")


def _build_model(reader: _Reader, d: int, base: Path | None) -> tuple[Model, dict]:
    kind = reader.raw("model", "kind").lower()
    if kind not in MODEL_KINDS:
        raise reader.error("model", "kind", f"unknown model {kind!r}; expected one of {MODEL_KINDS}")
    keys = set(reader.parser.options("model"))
    extra = {}
    if kind in _MODEL_KEYS:
        allowed = _MODEL_KEYS[kind]
        _reject_unknown(reader, "model", keys, allowed)
        m = reader.param("model", "m", d)
        k = reader.param("model", "k", d)
        u0 = reader.param("model", "u0", d, 0.0)
        v0 = reader.param("model", "v0", d, 0.0)
        if kind == "free_sdof":
            model = FreeSDOF(m, k, u0, v0)
        elif kind == "forced_sdof":
            model = ForcedSDOF(m, k, reader.param("model", "q", d), u0, v0)
        else:
            model = NonlinearSDOF(m, k, reader.param("model", "rho", d), u0, v0)
        return model, extra

    stories = sorted(int(key[1:]) for key in keys if re.fullmatch(r"k[1-9][0-9]*", key))
    if not stories or stories != list(range(1, len(stories) + 1)):
        raise reader.error("model", "", "shear_building needs story stiffnesses k1, k2, ... without gaps")
    n = len(stories)
    _reject_unknown(reader, "model", keys, _BUILDING_FIXED | {f"k{j}" for j in stories})
    ks = tuple(reader.param("model", f"k{j}", d) for j in stories)
    vectors = {}
    for key, default in (("u0", 0.0), ("v0", 0.0), ("iota", 1.0)):
        vec = reader.floats("model", key, (default,) * n)
        if len(vec) != n:
            raise reader.error("model", key, f"needs {n} entries, got {len(vec)}")
        vectors[key] = vec
    record, record_path = _resolve_record(reader, base)
    model = ShearBuilding(
        reader.param("model", "m", d), ks,
        reader.param("model", "alpha", d), reader.param("model", "beta", d),
        record.forcing(), iota=vectors["iota"], u0=vectors["u0"], v0=vectors["v0"],
    )
    extra["ground_motion"] = record_path
    extra["ground_motion_duration"] = record.duration
    return model, extra


def _reject_unknown(reader: _Reader, section: str, keys, allowed):
    for key in sorted(set(keys) - set(allowed)):
        raise reader.error(section, key, f"unknown key {key!r}")


def parse_scenario_text(text: str, path=None, long: bool = False) -> Scenario:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=str(path) if path else "<scenario>")
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ScenarioError("malformed line", path, line) from None
    except configparser.Error as exc:
        raise ScenarioError(str(exc).splitlines()[0], path, getattr(exc, "lineno", None)) from None
    reader = _Reader(parser, _line_index(text), path)

    known = {"model", "domain", "quadrature", "fsc", "compare"}
    for section in parser.sections():
        if section not in known:
            raise reader.error(section, "", f"unknown section [{section}]")
    for section in ("model", "domain", "quadrature", "fsc"):
        if not parser.has_section(section):
            raise ScenarioError(f"missing section [{section}]", path)
    for section, allowed in _SECTION_KEYS.items():
        if parser.has_section(section):
            _reject_unknown(reader, section, parser.options(section), allowed)
            for key in sorted(_REQUIRED.get(section, ())):
                if not parser.has_option(section, key):
                    raise reader.error(section, "", f"missing key {key!r}")

    axis_keys = parser.options("domain")
    for key in axis_keys:
        if not re.fullmatch(r"axis[0-9]+", key):
            raise reader.error("domain", key, f"unknown key {key!r}; axes are named axis0, axis1, ...")
    order = sorted(int(key[4:]) for key in axis_keys)
    if order != list(range(len(order))) or not order:
        raise reader.error("domain", "", "axes must be numbered axis0, axis1, ... without gaps")
    domain = RandomDomain([_parse_distribution(reader, f"axis{i}") for i in order])
    d = domain.d

    base = Path(path).parent if path is not None else None
    model, extra = _build_model(reader, d, base)

    pts_key = "points" if long or not reader.has("quadrature", "desk_points") else "desk_points"
    points = reader.ints("quadrature", pts_key)
    if len(points) != d:
        raise reader.error("quadrature", pts_key, f"needs {d} counts (one per axis), got {len(points)}")
    if any(p < 1 for p in points):
        raise reader.error("quadrature", pts_key, "quadrature counts must be >= 1")

    fsc_kw = {}
    dur_key = "duration" if long or not reader.has("fsc", "desk_duration") else "desk_duration"
    fsc_kw["duration"] = reader.convert("fsc", dur_key, float)
    fsc_kw["basis_size"] = reader.convert("fsc", "basis_size", int)
    fsc_kw["dt"] = reader.convert("fsc", "dt", float)
    for key, fn in (("warmup", float), ("warmup_index_bound", int), ("flow_order", int), ("cadence", int)):
        if reader.has("fsc", key):
            fsc_kw[key] = reader.convert("fsc", key, fn)
    try:
        cfg = FscConfig(**fsc_kw)
        cfg.order_for(model.n_dof)
    except ValueError as exc:
        raise reader.error("fsc", "", str(exc)) from None
    if "ground_motion_duration" in extra and extra["ground_motion_duration"] < cfg.duration - 1e-9:
        raise reader.error("model", "ground_motion",
                           f"record covers {extra['ground_motion_duration']:g} s, run needs {cfg.duration:g} s")

    target, samples, seed, ref_points = "none", 0, 0, 0
    if parser.has_section("compare"):
        target = reader.convert("compare", "target", str.lower, "none")
        if target not in TARGETS:
            raise reader.error("compare", "target", f"unknown target {target!r}; expected one of {TARGETS}")
        s_key = "long_samples" if long and reader.has("compare", "long_samples") else "samples"
        samples = reader.convert("compare", s_key, int, 0)
        seed = reader.convert("compare", "seed", int, 0)
        ref_points = reader.convert("compare", "reference_points", int, 0)
        if target == "monte_carlo" and samples < 2:
            raise reader.error("compare", s_key, "Monte Carlo needs samples >= 2")
        if seed < 0:
            raise reader.error("compare", "seed", "seed must be non-negative")
    if target == "exact" and not isinstance(model, (FreeSDOF, ForcedSDOF)):
        raise reader.error("compare", "target", f"no exact reference for {model.name}")

    tables = {s: dict(parser.items(s)) for s in parser.sections()}
    tables.update(extra)
    name = Path(path).stem if path is not None else "scenario"
    return Scenario(name, model, domain, tuple(points), cfg, target, samples, seed, ref_points,
                    long, None if path is None else str(path), tables)


def parse_scenario(path, long: bool = False) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", path) from None
    return parse_scenario_text(text, path, long)


def bundled_scenarios() -> list[str]:
    folder = resources.files("fsc") / "data" / "scenarios"
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".ini"))


def bundled_scenario_path(name: str) -> Path:
    stem = name[:-4] if name.endswith(".ini") else name
    return Path(str(resources.files("fsc") / "data" / "scenarios" / f"{stem}.ini"))
