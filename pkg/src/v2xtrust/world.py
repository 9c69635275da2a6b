"""Road layout, entity kinematics and range-based connectivity."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class EntityClass(enum.Enum):
    VEHICLE = "vehicle"
    PEDESTRIAN = "pedestrian"
    CYCLE = "cycle"
    MOTORCYCLE = "motorcycle"


DEFAULT_SPEED_RANGES = {
    EntityClass.VEHICLE: (10.0, 30.0),
    EntityClass.PEDESTRIAN: (0.0, 8.0),
    EntityClass.CYCLE: (3.0, 10.0),
    EntityClass.MOTORCYCLE: (10.0, 30.0),
}


@dataclass(frozen=True)
class Road:
    """An axis-aligned road spanning the whole area; ``coord`` is its fixed x or y."""

    orientation: str  # "h" (constant y) or "v" (constant x)
    coord: float


@dataclass(frozen=True)
class Lane:
    road: int
    direction: int  # +1 or -1 along the road axis
    offset: float  # signed distance of the lane line from the road centre


@dataclass
class RoadLayout:
    roads: Sequence[Road]
    width: float = 900.0
    height: float = 900.0
    lane_offset: float = 2.0
    lanes: List[Lane] = field(init=False)
    intersections: List[Tuple[float, float]] = field(init=False)

    def __post_init__(self):
        self.roads = list(self.roads)
        self.lanes = []
        for r, road in enumerate(self.roads):
            if road.orientation not in ("h", "v"):
                raise ValueError(f"road orientation must be 'h' or 'v', got {road.orientation!r}")
            # keep-right: +x traffic below the centre line, +y traffic to the right of it
            sign = -1.0 if road.orientation == "h" else 1.0
            self.lanes.append(Lane(r, +1, sign * self.lane_offset))
            self.lanes.append(Lane(r, -1, -sign * self.lane_offset))
        self.intersections = []
        self._crossings: Dict[int, List[Tuple[float, int]]] = {r: [] for r in range(len(self.roads))}
        for a, ra in enumerate(self.roads):
            for b, rb in enumerate(self.roads):
                if ra.orientation == "h" and rb.orientation == "v":
                    self.intersections.append((rb.coord, ra.coord))
                    self._crossings[a].append((rb.coord, b))
                    self._crossings[b].append((ra.coord, a))
        for r in self._crossings:
            self._crossings[r].sort()

    def length(self, lane: int) -> float:
        road = self.roads[self.lanes[lane].road]
        return self.width if road.orientation == "h" else self.height

    def xy(self, lane: int, s: float) -> Tuple[float, float]:
        ln = self.lanes[lane]
        road = self.roads[ln.road]
        if road.orientation == "h":
            return s, road.coord + ln.offset
        return road.coord + ln.offset, s

    def crossings(self, lane: int) -> List[Tuple[float, int]]:
        """``(position along lane, crossing road)`` for every intersection on the lane's road."""
        return self._crossings[self.lanes[lane].road]

    def lanes_of(self, road: int) -> List[int]:
        return [i for i, ln in enumerate(self.lanes) if ln.road == road]

    def on_lane(self, x: float, y: float, tol: float = 1e-9) -> bool:
        for i in range(len(self.lanes)):
            ln = self.lanes[i]
            road = self.roads[ln.road]
            if road.orientation == "h":
                if abs(y - (road.coord + ln.offset)) <= tol and -tol <= x <= self.width + tol:
                    return True
            elif abs(x - (road.coord + ln.offset)) <= tol and -tol <= y <= self.height + tol:
                return True
        return False


def default_layout(lane_offset: float = 2.0) -> RoadLayout:
    """Two horizontal roads (y=300, y=600) crossed by one vertical road (x=450)."""
    return RoadLayout([Road("h", 300.0), Road("h", 600.0), Road("v", 450.0)], lane_offset=lane_offset)


def grid_rsu_positions(coords: Sequence[float] = (150.0, 450.0, 750.0)) -> np.ndarray:
    return np.array([(x, y) for y in coords for x in coords], dtype=float)


@dataclass
class World:
    layout: RoadLayout
    lane: np.ndarray
    s: np.ndarray
    speed: np.ndarray
    classes: List[EntityClass]
    rsu_positions: np.ndarray
    speed_ranges: Dict[EntityClass, Tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_SPEED_RANGES)
    )
    resample_probability: float = 0.1
    step_count: int = 0

    @property
    def n(self) -> int:
        return len(self.s)

    def positions(self) -> np.ndarray:
        return np.array([self.layout.xy(int(l), float(s)) for l, s in zip(self.lane, self.s)], dtype=float)

    def position(self, node: int) -> Tuple[float, float]:
        return self.layout.xy(int(self.lane[node]), float(self.s[node]))

    def heading(self, node: int) -> Tuple[float, float]:
        ln = self.layout.lanes[int(self.lane[node])]
        if self.layout.roads[ln.road].orientation == "h":
            return float(ln.direction), 0.0
        return 0.0, float(ln.direction)


def place_entities(
    layout: RoadLayout,
    classes: Sequence[EntityClass],
    rsu_positions: np.ndarray,
    rng: np.random.Generator,
    speed_ranges: Optional[Dict[EntityClass, Tuple[float, float]]] = None,
    resample_probability: float = 0.1,
) -> World:
    """Drop entities uniformly on random lanes with speeds drawn from their class range."""
    ranges = dict(DEFAULT_SPEED_RANGES if speed_ranges is None else speed_ranges)
    n = len(classes)
    lane = rng.integers(0, len(layout.lanes), size=n)
    s = np.array([rng.uniform(0.0, layout.length(int(l))) for l in lane])
    speed = np.array([rng.uniform(*ranges[c]) for c in classes])
    return World(layout, lane, s, speed, list(classes), np.asarray(rsu_positions, dtype=float), ranges, resample_probability)


def _advance(layout: RoadLayout, lane: int, s: float, distance: float, rng: np.random.Generator) -> Tuple[int, float]:
    """Move ``distance`` metres along the lane network, turning at intersections and wrapping at road ends."""
    remaining = distance
    while remaining > 0.0:
        ln = layout.lanes[lane]
        length = layout.length(lane)
        d = ln.direction
        ahead = [(abs(pos - s), road) for pos, road in layout.crossings(lane) if (pos - s) * d > 0.0]
        ahead.sort()
        if ahead and ahead[0][0] <= remaining:
            gap, other = ahead[0]
            remaining -= gap
            s = s + d * gap
            options = [lane] + layout.lanes_of(other)
            choice = options[int(rng.integers(len(options)))]
            if choice != lane:
                # position on the crossing road is the fixed coordinate of the road we leave
                s = layout.roads[ln.road].coord
                lane = choice
            continue
        to_end = (length - s) if d > 0 else s
        if to_end > remaining:
            s = s + d * remaining
            remaining = 0.0
        else:
            remaining -= to_end
            s = 0.0 if d > 0 else length
    length = layout.length(lane)
    if s >= length:
        s -= length
    return lane, s


def step_mobility(world: World, rng: np.random.Generator, dt: float = 1.0) -> World:
    """Advance every entity by ``speed * dt`` in id order, then maybe resample its speed."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    for i in range(world.n):
        lane, s = _advance(world.layout, int(world.lane[i]), float(world.s[i]), float(world.speed[i]) * dt, rng)
        world.lane[i] = lane
        world.s[i] = s
        if rng.random() < world.resample_probability:
            lo, hi = world.speed_ranges[world.classes[i]]
            world.speed[i] = rng.uniform(lo, hi)
    world.step_count += 1
    return world


def distance_matrix(points: np.ndarray, others: Optional[np.ndarray] = None) -> np.ndarray:
    others = points if others is None else others
    diff = points[:, None, :] - others[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def neighbors(world: World, node: int, comm_range: float, positions: Optional[np.ndarray] = None) -> set:
    """Entities other than ``node`` within ``comm_range`` metres (inclusive)."""
    if comm_range <= 0:
        raise ValueError("range must be positive")
    pos = world.positions() if positions is None else positions
    d = np.hypot(pos[:, 0] - pos[node, 0], pos[:, 1] - pos[node, 1])
    return {int(j) for j in np.flatnonzero(d <= comm_range) if j != node}


def reachable_rsus(world: World, node: int, comm_range: float, positions: Optional[np.ndarray] = None) -> set:
    if comm_range <= 0:
        raise ValueError("range must be positive")
    pos = world.positions() if positions is None else positions
    d = np.hypot(world.rsu_positions[:, 0] - pos[node, 0], world.rsu_positions[:, 1] - pos[node, 1])
    return {int(r) for r in np.flatnonzero(d <= comm_range)}


def nearest_rsu(world: World, node: int, candidates, positions: Optional[np.ndarray] = None) -> int:
    pos = world.positions() if positions is None else positions
    return min(
        candidates,
        key=lambda r: (float(np.hypot(*(world.rsu_positions[r] - pos[node]))), r),
    )
