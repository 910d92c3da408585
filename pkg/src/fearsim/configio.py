"""Plain-text configuration documents and atomic file output.

Scenario and sweep documents are INI files.  A scenario document carries
``[world]``, ``[scenario]`` and ``[emotion]`` sections; a sweep document
adds ``[sweep]`` plus numbered ``[scenario.N]`` sections whose keys
override the shared sections row by row.  The calibration document holds
the overtaking-study parameters.
"""

from __future__ import annotations

import configparser
import os
import tempfile

from .sim import ScenarioConfig, WorldConfig

__all__ = [
    "ConfigError",
    "load_scenario_config",
    "load_sweep_rows",
    "load_display_calibration_doc",
    "load_osd_calibration_doc",
    "atomic_write",
]


class ConfigError(ValueError):
    """A configuration document failed to parse or validate."""


_WORLD_KEYS = {
    "tick_seconds": float,
    "patch_scale": float,
    "extent_min": float,
    "extent_max": float,
    "min_velocity": float,
    "max_velocity": float,
}

_SCENARIO_KEYS = {
    "kind": str,
    "separation": float,
    "ticks": int,
    "eeec_agent": bool,
    "bullet_acceleration": float,
    "bullet_deceleration": float,
    "target_acceleration": float,
    "target_deceleration": float,
    "target_phase_ticks": int,
    "phase_jitter_ticks": int,
    "seed": int,
    "reaction_profile": str,
    "osd_spacing": float,
    "osd_accel": float,
}

_EMOTION_KEYS = {
    "undesirability": float,
    "ig": float,
    "fear_threshold": float,
}

_ALL_KEYS = {**_WORLD_KEYS, **_SCENARIO_KEYS, **_EMOTION_KEYS}


def _read_ini(text: str, source: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return parser


def _coerce(key: str, raw: str, source: str):
    kind = _ALL_KEYS[key]
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "yes", "on", "1"):
                return True
            if lowered in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{source}: bad value for {key!r}: {raw!r}") from None


def _collect(parser: configparser.ConfigParser, sections: list[str], source: str) -> dict:
    values: dict = {}
    for section in sections:
        if not parser.has_section(section):
            continue
        for key, raw in parser.items(section):
            if key not in _ALL_KEYS:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
            values[key] = _coerce(key, raw, source)
    return values


def _build_scenario(values: dict, source: str) -> ScenarioConfig:
    world_kwargs = {}
    if "extent_min" in values or "extent_max" in values:
        world_kwargs["extent"] = (values.pop("extent_min", -25.0), values.pop("extent_max", 25.0))
    for key in ("tick_seconds", "patch_scale", "min_velocity", "max_velocity"):
        if key in values:
            world_kwargs[key] = values.pop(key)
    rename = {
        "eeec_agent": "eeec_agent_enabled",
        "bullet_acceleration": "bullet_accel",
        "bullet_deceleration": "bullet_decel",
        "target_acceleration": "target_accel",
        "target_deceleration": "target_decel",
    }
    scenario_kwargs = {rename.get(k, k): v for k, v in values.items()}
    try:
        return ScenarioConfig(world=WorldConfig(**world_kwargs), **scenario_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_scenario_config(text: str, source: str = "<config>") -> ScenarioConfig:
    """Parse a scenario document into a ScenarioConfig."""
    parser = _read_ini(text, source)
    values = _collect(parser, ["world", "scenario", "emotion"], source)
    return _build_scenario(values, source)


def load_sweep_rows(text: str, source: str = "<config>") -> tuple[list[ScenarioConfig], dict]:
    """Parse a sweep document into scenario rows plus sweep settings.

    Returns (rows, settings) where settings carries ``repetitions``,
    ``ticks`` and ``base_seed`` from the [sweep] section.
    """
    parser = _read_ini(text, source)
    shared = _collect(parser, ["world", "scenario", "emotion"], source)

    row_sections = sorted(
        (s for s in parser.sections() if s.startswith("scenario.")),
        key=lambda s: int(s.split(".", 1)[1]),
    )
    rows = []
    if row_sections:
        for section in row_sections:
            values = dict(shared)
            values.update(_collect(parser, [section], source))
            rows.append(_build_scenario(values, f"{source} [{section}]"))
    else:
        rows.append(_build_scenario(dict(shared), source))

    settings = {"repetitions": 50, "ticks": 100, "base_seed": 0}
    if parser.has_section("sweep"):
        for key, raw in parser.items("sweep"):
            if key not in settings:
                raise ConfigError(f"{source}: unknown key {key!r} in [sweep]")
            try:
                settings[key] = int(raw)
            except ValueError:
                raise ConfigError(f"{source}: bad value for {key!r}: {raw!r}") from None
    return rows, settings


def load_display_calibration_doc(text: str, source: str = "<calibration>") -> dict:
    """Parse the band/plateau record from a calibration document.

    Returns a dict with ``bands`` (five (lo, hi) pairs), ``plateaus``,
    ``levels`` (one level name per plateau) and ``default_threshold``.
    """
    parser = _read_ini(text, source)
    if not parser.has_section("bands") or not parser.has_section("display"):
        raise ConfigError(f"{source}: calibration needs [bands] and [display] sections")
    bands = []
    for name in ("very_low", "low", "medium", "high", "very_high"):
        raw = parser.get("bands", name, fallback=None)
        if raw is None:
            raise ConfigError(f"{source}: [bands] missing {name!r}")
        lo, hi = (float(p) for p in raw.split())
        bands.append((lo, hi))
    plateaus = tuple(int(p) for p in parser.get("display", "plateaus").split())
    levels = tuple(parser.get("display", "levels").split())
    if len(levels) != len(plateaus):
        raise ConfigError(f"{source}: plateau and level counts differ")
    threshold = float(parser.get("display", "default_threshold", fallback="0"))
    return {
        "bands": tuple(bands),
        "plateaus": plateaus,
        "levels": levels,
        "default_threshold": threshold,
    }


def load_osd_calibration_doc(text: str, source: str = "<calibration>"):
    """Parse the overtaking calibration from a calibration document.

    Sections are ``[osd <profile>]`` with an optional ``reaction_time``
    and ``row.N = speed_mph spacing_ft accel_ftps2`` entries.
    """
    from .experiments import OsdCalibration

    parser = _read_ini(text, source)
    reaction_time: dict[str, float] = {}
    anchors: dict[str, tuple] = {}
    for section in parser.sections():
        if not section.startswith("osd "):
            continue
        profile = section[4:].strip()
        rows = []
        for key, raw in parser.items(section):
            if key == "reaction_time":
                reaction_time[profile] = float(raw)
            elif key.startswith("row."):
                parts = raw.split()
                if len(parts) != 3:
                    raise ConfigError(f"{source}: {key} needs 'speed spacing accel', got {raw!r}")
                rows.append(tuple(float(p) for p in parts))
            else:
                raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
        if rows:
            anchors[profile] = tuple(sorted(rows))
    if not anchors:
        raise ConfigError(f"{source}: no [osd <profile>] sections found")
    return OsdCalibration(reaction_time=reaction_time, anchors=anchors)


def atomic_write(path, data: str) -> None:
    """Write a file via a temp sibling and rename, so output is all or nothing."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
