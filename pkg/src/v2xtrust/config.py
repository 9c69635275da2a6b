"""Scenario configuration with defaults for the reference V2X scenario."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .trust import TrustThresholds
from .world import EntityClass


class ConfigError(ValueError):
    """Raised for an invalid scenario; ``errors`` maps field names to messages."""

    def __init__(self, errors: Dict[str, str]):
        self.errors = dict(errors)
        lines = [f"  {k}: {v}" for k, v in sorted(self.errors.items())]
        super().__init__("invalid scenario config:\n" + "\n".join(lines))


def _default_speed_ranges() -> Dict[str, List[float]]:
    return {"vehicle": [10.0, 30.0], "pedestrian": [0.0, 8.0], "cycle": [3.0, 10.0], "motorcycle": [10.0, 30.0]}


def _default_class_mix() -> Dict[str, int]:
    return {"vehicle": 12, "pedestrian": 4, "cycle": 4, "motorcycle": 4}


def _default_roads() -> List[Dict[str, Any]]:
    return [{"orientation": "h", "coord": 300.0}, {"orientation": "h", "coord": 600.0}, {"orientation": "v", "coord": 450.0}]


def _default_rsus() -> List[List[float]]:
    return [[x, y] for y in (150.0, 450.0, 750.0) for x in (150.0, 450.0, 750.0)]


@dataclass
class ScenarioConfig:
    iterations: int = 100
    entity_count: int = 24
    rsu_count: int = 9
    th_min: float = 0.4
    th_max: float = 0.7
    rc: float = 0.3
    c_w: float = 0.9
    initial_trust: float = 0.5
    speed_ranges: Dict[str, List[float]] = field(default_factory=_default_speed_ranges)
    class_mix: Dict[str, int] = field(default_factory=_default_class_mix)
    comm_range: float = 150.0
    rsu_range: Optional[float] = None  # None: same as comm_range
    rsu_window: int = 10
    selective_forwarding: int = 6
    good_mouthing: int = 3
    bad_mouthing: int = 3
    malicious_fraction: Optional[float] = None  # overrides the three counts above
    drop_probability: float = 0.5
    selective_forwarders_lie: bool = False
    firsthand_recommendations: bool = True
    sticky_local_blacklist: bool = False
    hop_limit: int = 5
    packets_per_iteration: int = 1
    recommendation_fanout: Optional[int] = None  # None: ask every one-hop neighbour
    accumulate_alarms: bool = True
    dt: float = 1.0
    speed_resample_probability: float = 0.1
    lane_offset: float = 2.0
    area: List[float] = field(default_factory=lambda: [900.0, 900.0])
    roads: List[Dict[str, Any]] = field(default_factory=_default_roads)
    rsu_positions: List[List[float]] = field(default_factory=_default_rsus)
    record_trajectory: bool = False
    seed: int = 0

    def __post_init__(self):
        errors = self.problems()
        if errors:
            raise ConfigError(errors)

    @property
    def thresholds(self) -> TrustThresholds:
        return TrustThresholds(self.th_min, self.th_max, self.rc, self.c_w)

    @property
    def effective_rsu_range(self) -> float:
        return self.comm_range if self.rsu_range is None else self.rsu_range

    def attacker_counts(self) -> Dict[str, int]:
        """Attackers per kind; a malicious fraction keeps the 2:1:1 split, SF taking the remainder."""
        if self.malicious_fraction is None:
            return {
                "selective_forwarding": self.selective_forwarding,
                "good_mouthing": self.good_mouthing,
                "bad_mouthing": self.bad_mouthing,
            }
        total = int(math.floor(self.malicious_fraction * self.entity_count + 0.5))
        quarter = int(math.floor(total / 4.0 + 0.5))
        return {"selective_forwarding": total - 2 * quarter, "good_mouthing": quarter, "bad_mouthing": quarter}

    def class_list(self) -> List[EntityClass]:
        classes = []
        for name in ("vehicle", "pedestrian", "cycle", "motorcycle"):
            classes.extend([EntityClass(name)] * int(self.class_mix.get(name, 0)))
        return classes

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "ScenarioConfig":
        data = dict(data or {})
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError({k: "unknown field" for k in unknown})
        return cls(**data)

    def problems(self) -> Dict[str, str]:
        errors: Dict[str, str] = {}

        def positive_int(name):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0:
                errors[name] = f"must be a positive integer, got {v!r}"

        def unit(name):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not 0.0 <= v <= 1.0:
                errors[name] = f"must be a number in [0, 1], got {v!r}"

        for name in ("iterations", "entity_count", "rsu_count", "rsu_window", "hop_limit", "packets_per_iteration"):
            positive_int(name)
        for name in ("th_min", "th_max", "c_w", "initial_trust", "drop_probability", "speed_resample_probability"):
            unit(name)
        if "th_min" not in errors and "th_max" not in errors and not self.th_min < self.th_max:
            errors["th_min"] = f"must be below th_max ({self.th_max}), got {self.th_min}"
        if not isinstance(self.rc, (int, float)) or not 0.0 < self.rc <= 1.0:
            errors["rc"] = f"must lie in (0, 1], got {self.rc!r}"
        for name in ("comm_range", "dt"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or v <= 0:
                errors[name] = f"must be positive, got {v!r}"
        if self.rsu_range is not None and (not isinstance(self.rsu_range, (int, float)) or self.rsu_range <= 0):
            errors["rsu_range"] = f"must be positive or null, got {self.rsu_range!r}"
        if self.malicious_fraction is not None and not (
            isinstance(self.malicious_fraction, (int, float)) and 0.0 <= self.malicious_fraction <= 1.0
        ):
            errors["malicious_fraction"] = f"must be in [0, 1] or null, got {self.malicious_fraction!r}"
        if self.recommendation_fanout is not None and (
            not isinstance(self.recommendation_fanout, int) or self.recommendation_fanout < 1
        ):
            errors["recommendation_fanout"] = "must be a positive integer or null"

        names = {c.value for c in EntityClass}
        if not isinstance(self.speed_ranges, dict) or set(self.speed_ranges) != names:
            errors["speed_ranges"] = f"must give [low, high] for each of {sorted(names)}"
        else:
            for k, v in self.speed_ranges.items():
                if len(v) != 2 or not 0.0 <= v[0] <= v[1]:
                    errors["speed_ranges"] = f"{k}: need 0 <= low <= high, got {v!r}"
        if not isinstance(self.class_mix, dict) or set(self.class_mix) - names:
            errors["class_mix"] = f"keys must be among {sorted(names)}"
        elif "entity_count" not in errors and sum(self.class_mix.values()) != self.entity_count:
            errors["class_mix"] = f"counts sum to {sum(self.class_mix.values())}, expected entity_count={self.entity_count}"

        for name in ("selective_forwarding", "good_mouthing", "bad_mouthing"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                errors[name] = f"must be a non-negative integer, got {v!r}"
        if not errors and sum(self.attacker_counts().values()) > self.entity_count:
            errors["selective_forwarding"] = "more attackers than entities"

        if not isinstance(self.rsu_positions, list) or any(len(p) != 2 for p in self.rsu_positions):
            errors["rsu_positions"] = "must be a list of [x, y] pairs"
        elif "rsu_count" not in errors and len(self.rsu_positions) != self.rsu_count:
            errors["rsu_positions"] = f"has {len(self.rsu_positions)} sites, expected rsu_count={self.rsu_count}"
        if not isinstance(self.roads, list) or not self.roads or any(
            r.get("orientation") not in ("h", "v") or "coord" not in r for r in self.roads
        ):
            errors["roads"] = "must be a non-empty list of {orientation: h|v, coord: number}"
        if len(self.area) != 2 or min(self.area) <= 0:
            errors["area"] = "must be [width, height] with positive sides"
        if not isinstance(self.seed, int) or self.seed < 0:
            errors["seed"] = f"must be a non-negative integer, got {self.seed!r}"
        return errors


def load_config(path) -> ScenarioConfig:
    text = Path(path).read_text()
    data = yaml.safe_load(text)
    if data is not None and not isinstance(data, dict):
        raise ConfigError({"<root>": "config file must contain a mapping"})
    return ScenarioConfig.from_dict(data)


def dump_config(config: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config.to_dict(), sort_keys=True))
