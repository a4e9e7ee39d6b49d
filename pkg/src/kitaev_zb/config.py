"""Plain ``key = value`` run configuration.

One assignment per line, ``#`` starts a comment, nested groups use dotted keys::

    mu = 0
    tp = 1
    d = 1
    n_sites = 256
    initial.kind = delta
    schedule.kind = off
    t_final = 10
    dt_out = 0.01
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import KitaevZbError
from .model import ChainParams

# configs usually carry 1/sqrt(2) to ~16 digits; the exact renormalisation happens here
CONFIG_SPINOR_TOL = 1e-6
ENGINES = ("spectral", "oracle", "both")
INITIAL_KINDS = ("gaussian", "delta")
SCHEDULE_KINDS = ("off", "resonant", "windowed")

_SCHEDULE_KEYS = {
    "off": (),
    "resonant": ("schedule.n_periods", "schedule.offset_ticks"),
    "windowed": ("schedule.on_periods", "schedule.stop_half_periods", "schedule.resume_periods"),
}

KNOWN_KEYS = {
    "mu", "tp", "d", "n_sites",
    "initial.kind", "initial.center", "initial.sigma", "initial.offset",
    "initial.a_re", "initial.a_im", "initial.b_re", "initial.b_im",
    "schedule.kind", *(k for keys in _SCHEDULE_KEYS.values() for k in keys),
    "t_final", "dt_out", "snapshots", "engine",
    "output.trajectory", "output.snapshot_prefix", "output.comparison",
}


class ConfigError(KitaevZbError, ValueError):
    """Collects every field-level problem found in a configuration."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{name}: {msg}" for name, msg in self.errors))


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    center: int
    sigma: float | None
    offset: int
    spinor: tuple[complex, complex]


@dataclass(frozen=True)
class ScheduleSpec:
    kind: str
    n_periods: int = 0
    offset_ticks: int = 0
    on_periods: int = 0
    stop_half_periods: int = 0
    resume_periods: int = 0


@dataclass(frozen=True)
class OutputSpec:
    trajectory: Path
    snapshot_prefix: Path
    comparison: Path


@dataclass(frozen=True)
class RunConfig:
    params: ChainParams
    initial: InitialSpec
    schedule: ScheduleSpec
    t_final: float
    dt_out: float
    snapshots: tuple[float, ...]
    outputs: OutputSpec
    engine: str = "spectral"

    def snapshot_path(self, index: int) -> Path:
        prefix = self.outputs.snapshot_prefix
        return prefix.with_name(f"{prefix.name}_{index:03d}.csv")


def parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            errors.append((f"line {lineno}", "missing key before '='"))
        elif key in pairs:
            errors.append((key, f"duplicate key on line {lineno}"))
        else:
            pairs[key] = value
    if errors:
        raise ConfigError(errors)
    return pairs


class _Reader:
    def __init__(self, pairs: dict[str, str]):
        self.pairs = pairs
        self.errors: list[tuple[str, str]] = []

    def _raw(self, key, default):
        if key not in self.pairs:
            if default is _REQUIRED:
                self.errors.append((key, "required"))
            return None, default
        return self.pairs[key], None

    def float(self, key, default=None):
        raw, dflt = self._raw(key, default)
        if raw is None:
            return None if dflt is _REQUIRED else dflt
        try:
            value = float(raw)
        except ValueError:
            self.errors.append((key, f"not a number: {raw!r}"))
            return None
        if not math.isfinite(value):
            self.errors.append((key, f"must be finite, got {raw!r}"))
            return None
        return value

    def int(self, key, default=None):
        raw, dflt = self._raw(key, default)
        if raw is None:
            return None if dflt is _REQUIRED else dflt
        try:
            return int(raw)
        except ValueError:
            self.errors.append((key, f"not an integer: {raw!r}"))
            return None

    def choice(self, key, options, default=None):
        raw, dflt = self._raw(key, default)
        if raw is None:
            return None if dflt is _REQUIRED else dflt
        if raw not in options:
            self.errors.append((key, f"must be one of {', '.join(options)}; got {raw!r}"))
            return None
        return raw

    def text(self, key, default):
        return self.pairs.get(key, default)

    def fail(self, key, message):
        self.errors.append((key, message))


_REQUIRED = object()


def _validate_params(r: _Reader):
    mu, tp, d = r.float("mu", _REQUIRED), r.float("tp", _REQUIRED), r.float("d", _REQUIRED)
    n = r.int("n_sites", _REQUIRED)
    if d is not None and not d > 0:
        r.fail("d", "must be positive")
        d = None
    if n is not None and (n < 8 or n % 2):
        r.fail("n_sites", "must be an even integer >= 8")
        n = None
    if None in (mu, tp, d, n):
        return None
    return ChainParams(mu, tp, d, n)


def _validate_initial(r: _Reader, n_sites):
    kind = r.choice("initial.kind", INITIAL_KINDS, _REQUIRED)
    center = r.int("initial.center", n_sites // 2 if n_sites else 0)
    sigma = r.float("initial.sigma", _REQUIRED if kind == "gaussian" else None)
    offset = r.int("initial.offset", 0)
    if kind == "delta":
        for key in ("initial.sigma", "initial.offset"):
            if key in r.pairs:
                r.fail(key, "only valid with initial.kind = gaussian")
    h = 1 / math.sqrt(2)
    parts = [r.float("initial.a_re", h), r.float("initial.a_im", 0.0),
             r.float("initial.b_re", -h), r.float("initial.b_im", 0.0)]
    spinor = None
    if None not in parts:
        a, b = complex(parts[0], parts[1]), complex(parts[2], parts[3])
        total = abs(a) ** 2 + abs(b) ** 2
        if abs(total - 1.0) > CONFIG_SPINOR_TOL:
            r.fail("initial.a_re/a_im/b_re/b_im",
                   f"spinor must satisfy |a|^2 + |b|^2 = 1, got {total:.12g}")
        else:
            scale = math.sqrt(total)
            spinor = (a / scale, b / scale)
    if n_sites:
        if center is not None and not 0 <= center < n_sites:
            r.fail("initial.center", f"must lie in [0, {n_sites})")
        if sigma is not None and not 0 < sigma < n_sites / 8:
            r.fail("initial.sigma", f"must lie in (0, n_sites/8) = (0, {n_sites / 8})")
        if sigma is not None and offset is not None and offset and \
                abs(offset) + 4 * sigma >= n_sites // 2 - 2:
            r.fail("initial.offset", "separated packets would reach the periodic seam")
    if None in (kind, center, offset, spinor) or (kind == "gaussian" and sigma is None):
        return None
    return InitialSpec(kind, center, sigma, offset, spinor)


def _validate_schedule(r: _Reader, params):
    kind = r.choice("schedule.kind", SCHEDULE_KINDS, "off")
    if kind is None:
        return None
    for key in sorted(KNOWN_KEYS):
        if key.startswith("schedule.") and key != "schedule.kind" and key in r.pairs \
                and key not in _SCHEDULE_KEYS[kind]:
            r.fail(key, f"not used with schedule.kind = {kind}")
    values = {}
    if kind == "resonant":
        values["n_periods"] = r.int("schedule.n_periods", _REQUIRED)
        values["offset_ticks"] = r.int("schedule.offset_ticks", 0)
        if values["n_periods"] is not None and values["n_periods"] < 1:
            r.fail("schedule.n_periods", "must be >= 1")
        if values["offset_ticks"] is not None and values["offset_ticks"] < 0:
            r.fail("schedule.offset_ticks", "must be >= 0")
    elif kind == "windowed":
        for name in ("on_periods", "stop_half_periods", "resume_periods"):
            values[name] = r.int(f"schedule.{name}", _REQUIRED)
            if values[name] is not None and values[name] < 0:
                r.fail(f"schedule.{name}", "must be >= 0")
    if kind != "off" and params is not None and not params.mu + 2 * params.tp > 0:
        r.fail("schedule.kind", "modulated schedules need mu + 2*tp > 0 to define the ZB period")
    if None in values.values():
        return None
    return ScheduleSpec(kind, **values)


def parse_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    """Parse and fully validate a configuration document.

    Raises
    ------
    ConfigError
        Listing every offending field; nothing is computed or written.
    """
    pairs = parse_pairs(text)
    r = _Reader(pairs)
    for key in pairs:
        if key not in KNOWN_KEYS:
            r.fail(key, "unknown key")

    params = _validate_params(r)
    n_sites = params.n_sites if params else None
    initial = _validate_initial(r, n_sites)
    schedule = _validate_schedule(r, params)
    t_final = r.float("t_final", _REQUIRED)
    dt_out = r.float("dt_out", _REQUIRED)
    if t_final is not None and not t_final > 0:
        r.fail("t_final", "must be positive")
    if dt_out is not None and not dt_out > 0:
        r.fail("dt_out", "must be positive")
    engine = r.choice("engine", ENGINES, "spectral")

    snapshots = ()
    raw = pairs.get("snapshots", "").strip()
    if raw:
        try:
            snapshots = tuple(sorted({float(v) for v in raw.split(",") if v.strip()}))
        except ValueError:
            r.fail("snapshots", f"expected comma-separated times, got {raw!r}")
        else:
            if t_final is not None and any(not 0 <= s <= t_final for s in snapshots):
                r.fail("snapshots", "every snapshot time must lie in [0, t_final]")

    base = Path(base_dir)
    outputs = OutputSpec(
        trajectory=base / r.text("output.trajectory", "trajectory.csv"),
        snapshot_prefix=base / r.text("output.snapshot_prefix", "snapshot"),
        comparison=base / r.text("output.comparison", "comparison.csv"),
    )
    if r.errors:
        raise ConfigError(r.errors)
    return RunConfig(params, initial, schedule, t_final, dt_out, snapshots, outputs, engine)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)
