"""Ground-acceleration records.

On-disk format (plain text)::

    dt 0.01
    0.0012
    -0.0031
    ...

The header gives the sampling interval in seconds; the following lines hold
accelerations in units of g, one or more per line separated by whitespace.  ``unit_scale`` (default standard gravity)
converts to m/s^2 on load.  Blank lines and lines starting with ``#`` are
ignored.  PEER ``.AT2`` files can be converted once with :func:`convert_at2`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .models import GroundMotion

G = 9.80665

SYNTHETIC_NAME = "synthetic_ns.txt"


class RecordParseError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


@dataclass(frozen=True, eq=False)
class GroundMotionRecord:
    """Sampled record: ``values`` in file units, ``samples = values * unit_scale`` in m/s^2."""

    dt: float
    values: np.ndarray
    unit_scale: float = G

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if not self.dt > 0:
            raise ValueError("record dt must be positive")
        if values.ndim != 1 or len(values) < 2:
            raise ValueError("record needs at least 2 samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("record has non-finite samples")
        object.__setattr__(self, "values", values)

    @property
    def samples(self) -> np.ndarray:
        return self.values * self.unit_scale

    @property
    def duration(self) -> float:
        return self.dt * (len(self.values) - 1)

    def forcing(self) -> GroundMotion:
        return GroundMotion(self.dt, self.samples)


def parse_ground_motion(text: str, unit_scale: float = G, path=None) -> GroundMotionRecord:
    dt = None
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if dt is None:
            parts = line.split()
            if len(parts) != 2 or parts[0].lower() != "dt":
                raise RecordParseError("expected header 'dt <seconds>'", path, lineno)
            try:
                dt = float(parts[1])
            except ValueError:
                raise RecordParseError(f"bad dt value {parts[1]!r}", path, lineno) from None
            if not dt > 0:
                raise RecordParseError("dt must be positive", path, lineno)
            continue
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise RecordParseError(f"bad sample {tok!r}", path, lineno) from None
    if dt is None:
        raise RecordParseError("missing 'dt' header", path)
    if len(values) < 2:
        raise RecordParseError("record needs at least 2 samples", path)
    try:
        return GroundMotionRecord(dt, np.array(values), unit_scale)
    except ValueError as exc:
        raise RecordParseError(str(exc), path) from None


def load_ground_motion(path, unit_scale: float = G) -> GroundMotionRecord:
    path = Path(path)
    return parse_ground_motion(path.read_text(), unit_scale, path)


def format_ground_motion(dt: float, values) -> str:
    lines = [f"dt {dt!r}"]
    lines += [repr(float(x)) for x in values]
    return "\n".join(lines) + "\n"


def save_ground_motion(path, record: GroundMotionRecord):
    """Write ``record.values`` (file units); round-trips exactly through :func:`load_ground_motion`."""
    Path(path).write_text(format_ground_motion(record.dt, record.values))


_AT2_DT = re.compile(r"NPTS\s*=\s*(\d+)\s*,\s*DT\s*=\s*([0-9.eE+-]+)", re.IGNORECASE)


def parse_at2(text: str, path=None) -> GroundMotionRecord:
    """Parse a PEER NGA ``.AT2`` file (accelerations in g)."""
    lines = text.splitlines()
    for idx, line in enumerate(lines[:10]):
        hit = _AT2_DT.search(line)
        if hit:
            break
    else:
        raise RecordParseError("no 'NPTS=..., DT=...' line in the first 10 lines", path)
    npts, dt = int(hit.group(1)), float(hit.group(2))
    values = []
    for lineno, line in enumerate(lines[idx + 1:], start=idx + 2):
        for tok in line.split():
            try:
                values.append(float(tok))
            except ValueError:
                raise RecordParseError(f"bad sample {tok!r}", path, lineno) from None
    if len(values) != npts:
        raise RecordParseError(f"header announces {npts} samples, found {len(values)}", path)
    return GroundMotionRecord(dt, np.array(values))


def convert_at2(src, dst) -> GroundMotionRecord:
    record = parse_at2(Path(src).read_text(), src)
    save_ground_motion(dst, record)
    return record


def synthetic_record(duration: float = 60.0, dt: float = 0.01, pga: float = 0.319,
                     seed: int = 1940) -> GroundMotionRecord:
    """Stationary filtered white noise under a build-up/strong/decay envelope, in g.

    The spectrum is Kanai-Tajimi (ground frequency 15.6 rad/s, damping 0.6)
    with a Clough-Penzien high-pass to keep ground velocity bounded.  The
    result is scaled to peak ``pga``.
    """
    n = int(round(duration / dt)) + 1
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(n)
    w = 2 * np.pi * np.fft.rfftfreq(n, dt)
    wg, zg = 15.6, 0.6
    wf, zf = 1.5, 0.6
    kt = (wg**2 + 2j * zg * wg * w) / (wg**2 - w**2 + 2j * zg * wg * w)
    hp = w**2 / (wf**2 - w**2 + 2j * zf * wf * w)
    acc = np.fft.irfft(np.fft.rfft(noise) * kt * hp, n)
    t = dt * np.arange(n)
    env = np.where(t < 2.0, (t / 2.0) ** 2, np.where(t < 12.0, 1.0, np.exp(-0.18 * (t - 12.0))))
    acc *= env
    acc = acc * (pga / np.max(np.abs(acc))) + 0.0  # no negative zeros in the file
    return GroundMotionRecord(dt, acc)


def bundled_record_path(name: str = SYNTHETIC_NAME) -> Path:
    return Path(str(resources.files("fsc") / "data" / name))
