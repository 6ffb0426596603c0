"""Scenario configuration files.

INI-style text with dotted section names::

    [state]
    p_s = 0.928
    p_w = 0.628

    [plan]
    counts_per_pair = 14000     # or "exact"
    trials = 10
    seed = 20180207
    alice = 0, 0; pi/4, pi/8; pi/4, 0; pi/8, pi/16

    [cheat]
    policy = paper              # none | paper | rules

    [cheat.rules]
    0,1 = 0, 0                  # (alice index, bob index) = q, h

Angles may be written as rational multiples of pi (``-pi/16``, ``3*pi/8``),
plain radians, or degrees with a ``deg`` suffix.
"""

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .measurement import WavePlateSetting
from .simulator import (
    EXACT,
    DEFAULT_COUNTS_PER_PAIR,
    CheatPolicy,
    SettingsPlan,
    paper_cheat_policy,
    paper_settings,
)
from .spamloop import DEFAULT_THRESHOLD
from .states import WernerParams

BUNDLED = ("honest", "cheat", "bell")

_ANGLE = re.compile(
    r"""^\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:\.\d*)?|\.\d+)\s*\*?\s*)?
        (?P<pi>pi|π)?\s*
        (?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*
        (?P<deg>deg)?\s*$""",
    re.VERBOSE,
)


def parse_angle(text):
    """Angle in radians from ``pi/8``, ``-3*pi/16``, ``0.3927`` or ``22.5deg``."""
    m = _ANGLE.match(text)
    if not m or not (m.group("coef") or m.group("pi")):
        raise ValueError(f"cannot parse angle {text!r}")
    value = float(m.group("coef")) if m.group("coef") else 1.0
    if m.group("pi"):
        value *= np.pi
    if m.group("den"):
        value /= float(m.group("den"))
    if m.group("deg"):
        if m.group("pi"):
            raise ValueError(f"angle {text!r} mixes pi and degrees")
        value = np.deg2rad(value)
    if m.group("sign") == "-":
        value = -value
    return float(value)


def parse_setting(text):
    parts = [p for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"a setting needs 'q, h', got {text!r}")
    return WavePlateSetting(parse_angle(parts[0]), parse_angle(parts[1]))


def parse_settings(text):
    items = [t for t in text.split(";") if t.strip()]
    return tuple(parse_setting(t) for t in items)


def parse_counts(text):
    text = str(text).strip().lower()
    if text == EXACT:
        return EXACT
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"counts must be an integer or 'exact', got {text!r}") from None


def parse_rules(section):
    rules = {}
    for key, value in section.items():
        idx = key.split(",")
        if len(idx) != 2:
            raise ValueError(f"rule key must be 'i,j', got {key!r}")
        rules[(int(idx[0]), int(idx[1]))] = parse_setting(value)
    return rules


@dataclass
class ScenarioConfig:
    state: WernerParams
    plan: SettingsPlan
    cheat: str = "none"
    policy: CheatPolicy = field(default_factory=CheatPolicy)
    threshold: float = DEFAULT_THRESHOLD
    tomography: bool = True
    workers: int = 1
    report: str = None
    fmt: str = "json"
    source: str = None

    def echo(self):
        """Plain-data view of the configuration for reports."""
        plan = self.plan
        return {
            "source": self.source,
            "state": {"p_s": self.state.p_s, "p_w": self.state.p_w},
            "plan": {
                "alice": [[s.q, s.h] for s in plan.alice],
                "bob": [[s.q, s.h] for s in plan.bob],
                "counts_per_pair": plan.counts_per_pair,
                "trials": plan.trials,
                "seed": plan.seed,
            },
            "cheat": {
                "policy": self.cheat,
                "rules": [[i, j, s.q, s.h] for (i, j), s in sorted(self.policy.rules.items())],
            },
            "threshold": self.threshold,
            "tomography": self.tomography,
        }


def resolve_config_path(name):
    """A filesystem path, or the name of a bundled config (``honest`` ...)."""
    path = Path(name)
    if path.exists():
        return path
    stem = path.stem if path.suffix == ".cfg" else str(name)
    if stem in BUNDLED:
        return resources.files("loopspam") / "configs" / f"{stem}.cfg"
    raise ConfigError(f"config file not found: {name}")


def read_text(name):
    return resolve_config_path(name).read_text()


def load_policy(value, parser=None):
    """Build a cheat policy from ``none``, ``paper``, ``rules`` or a rules file."""
    value = value.strip()
    if value == "none":
        return "none", CheatPolicy()
    if value == "paper":
        return "paper", paper_cheat_policy()
    if value == "rules":
        if parser is None or not parser.has_section("cheat.rules"):
            raise ConfigError("cheat.policy: 'rules' needs a [cheat.rules] section")
        return "rules", CheatPolicy(parse_rules(parser["cheat.rules"]))
    path = Path(value)
    if not path.exists():
        raise ConfigError(f"cheat.policy: unknown policy or missing file {value!r}")
    rules_parser = _parser()
    try:
        rules_parser.read_string(path.read_text(), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    section = "cheat.rules" if rules_parser.has_section("cheat.rules") else "rules"
    if not rules_parser.has_section(section):
        raise ConfigError(f"{path}: no [cheat.rules] section")
    try:
        return str(path), CheatPolicy(parse_rules(rules_parser[section]))
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _parser():
    return configparser.ConfigParser(inline_comment_prefixes=("#", ";;"),
                                     interpolation=None)


def parse_config(text, source="<string>"):
    """Parse configuration text into a :class:`ScenarioConfig`.

    Errors name the offending ``section.key``; syntax errors carry the line
    number reported by :mod:`configparser`.
    """
    parser = _parser()
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    def get(section, key, conv, default):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key)
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{source}: {section}.{key} = {raw!r}: {exc}") from None

    try:
        state = WernerParams(get("state", "p_s", float, 1.0), get("state", "p_w", float, 1.0))
    except ValueError as exc:
        raise ConfigError(f"{source}: state: {exc}") from None

    alice, bob = paper_settings()
    alice = get("plan", "alice", parse_settings, alice)
    bob = get("plan", "bob", parse_settings, bob)
    try:
        plan = SettingsPlan(
            alice=alice,
            bob=bob,
            counts_per_pair=get("plan", "counts_per_pair", parse_counts, DEFAULT_COUNTS_PER_PAIR),
            trials=get("plan", "trials", int, 10),
            seed=get("plan", "seed", int, 0),
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: plan: {exc}") from None

    cheat_value = get("cheat", "policy", str, "none")
    try:
        cheat, policy = load_policy(cheat_value, parser)
    except ValueError as exc:
        raise ConfigError(f"{source}: cheat: {exc}") from None

    threshold = get("analysis", "threshold", float, DEFAULT_THRESHOLD)
    if not threshold > 0:
        raise ConfigError(f"{source}: analysis.threshold must be positive")

    return ScenarioConfig(
        state=state,
        plan=plan,
        cheat=cheat,
        policy=policy,
        threshold=threshold,
        tomography=get("analysis", "tomography", _parse_bool, True),
        workers=get("plan", "workers", int, 1),
        report=get("output", "report", str, None),
        fmt=get("output", "format", str, "json"),
        source=source,
    )


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def load_config(name):
    path = resolve_config_path(name)
    return parse_config(path.read_text(), source=getattr(path, "name", str(path)))
