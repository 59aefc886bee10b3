"""Scenario files: ``key=value`` text with optional [mobility] and [radio] sections.

Several pairs may share a line, ``#`` starts a comment, and keys not
given take their defaults.  Two values depend on the network type unless
set explicitly: the mobility model (rwp for manet, road for vanet) and
the per-hop loss probability (0.02 manet, 0.01 vanet).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

from .mobility import MobilityConfig
from .protocols.base import PROTOCOLS, VARIANTS
from .sim.radio import RadioModel

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "parse_config",
    "dump_config",
    "NETWORK_DEFAULTS",
]

NETWORKS = ("manet", "vanet")
NETWORK_DEFAULTS = {
    "manet": {"model": "rwp", "loss_prob": 0.02},
    "vanet": {"model": "road", "loss_prob": 0.01},
}


class ConfigError(ValueError):
    """Bad scenario text or values; ``line`` and ``field`` locate the problem."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.field = field


@dataclass
class ScenarioConfig:
    network: str = "manet"
    node_count: int = 30
    protocol: str = "dsr"
    variant: str = "default"
    sim_time: float = 900.0
    cbr_sources: int = 12
    cbr_rate: float = 4.0
    packet_size: int = 1000
    seed: int = 0
    warmup: float = 50.0
    # Explicitly set section values only; see mobility_config()/radio_model().
    mobility_opts: dict = field(default_factory=dict)
    radio_opts: dict = field(default_factory=dict)

    def validate(self) -> "ScenarioConfig":
        checks = [
            ("network", self.network in NETWORKS, f"must be one of {', '.join(NETWORKS)}"),
            ("protocol", self.protocol in PROTOCOLS, f"must be one of {', '.join(PROTOCOLS)}"),
            ("variant", self.variant in VARIANTS, f"must be one of {', '.join(VARIANTS)}"),
            ("node_count", self.node_count >= 1, "must be >= 1"),
            ("sim_time", self.sim_time > 0, "must be > 0"),
            ("cbr_sources", self.cbr_sources >= 0, "must be >= 0"),
            ("cbr_sources", self.cbr_sources <= self.node_count,
             f"{self.cbr_sources} sources exceed node_count={self.node_count}"),
            ("cbr_rate", self.cbr_rate > 0, "must be > 0"),
            ("packet_size", self.packet_size > 0, "must be > 0"),
            ("warmup", 0 <= self.warmup, "must be >= 0"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ConfigError(f"{name}: {msg}", field=name)
        for section, build in (("mobility", self.mobility_config), ("radio", self.radio_model)):
            try:
                build()
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"[{section}] {exc}", field=section) from None
        return self

    def mobility_config(self) -> MobilityConfig:
        opts = dict(self.mobility_opts)
        if opts.get("model", "auto") == "auto":
            opts["model"] = NETWORK_DEFAULTS.get(self.network, {}).get("model", "rwp")
        cfg = MobilityConfig(**opts)
        cfg.validate()
        return cfg

    def radio_model(self) -> RadioModel:
        opts = dict(self.radio_opts)
        if opts.get("loss_prob", "auto") == "auto":
            opts["loss_prob"] = NETWORK_DEFAULTS.get(self.network, {}).get("loss_prob", 0.0)
        return RadioModel(**opts)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


_TOP = {f.name: f for f in fields(ScenarioConfig) if not f.name.endswith("_opts")}
_SECTIONS = {
    "mobility": {f.name: f for f in fields(MobilityConfig)},
    "radio": {f.name: f for f in fields(RadioModel)},
}
_AUTO = {("mobility", "model"), ("radio", "loss_prob")}


def _default_of(f):
    if f.default is not dataclasses.MISSING:
        return f.default
    return f.default_factory()


def _coerce(raw: str, f, section: str | None):
    if (section, f.name) in _AUTO and raw == "auto":
        return "auto"
    kind = type(_default_of(f))
    if raw == "" and kind is not str:
        raise ValueError("missing value")
    if kind is bool:
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    return raw


def parse_config(text: str, base_dir: str | Path | None = None) -> ScenarioConfig:
    """Parse scenario text; relative trace paths resolve against ``base_dir``."""
    top: dict = {}
    sections: dict = {"mobility": {}, "radio": {}}
    unknown: list[str] = []
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", line=lineno)
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", line=lineno)
            section = name
            continue
        for token in line.split():
            key, eq, raw = token.partition("=")
            key = key.strip()
            if not eq or not key:
                raise ConfigError(f"expected key=value, got {token!r}", line=lineno)
            table = _SECTIONS[section] if section else _TOP
            f = table.get(key)
            if f is None:
                unknown.append(f"[{section}] {key}" if section else key)
                continue
            try:
                value = _coerce(raw, f, section)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", line=lineno, field=key) from None
            (sections[section] if section else top)[key] = value
    if unknown:
        raise ConfigError("unknown keys: " + ", ".join(unknown))
    mob = sections["mobility"]
    if base_dir is not None and mob.get("trace_file"):
        p = Path(mob["trace_file"])
        if not p.is_absolute():
            mob["trace_file"] = str(Path(base_dir) / p)
    cfg = ScenarioConfig(**top, mobility_opts=mob, radio_opts=sections["radio"])
    return cfg.validate()


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: ScenarioConfig) -> str:
    """Normalized text: every key, resolved values, fixed order."""
    out = [f"{name}={_fmt(getattr(cfg, name))}" for name in _TOP]
    resolved = {"mobility": cfg.mobility_config(), "radio": cfg.radio_model()}
    for section, obj in resolved.items():
        out.append(f"[{section}]")
        out.extend(f"{name}={_fmt(getattr(obj, name))}" for name in _SECTIONS[section])
    return "\n".join(out) + "\n"
