"""Node trajectories: random waypoint, a two-direction ring road, static
layouts, and externally supplied traces.

All models answer ``position(i, t)`` for nondecreasing times per node and
are driven entirely by the PRNG handed to them, so a seeded run replays
bit for bit.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "MobilityConfig",
    "RwpState",
    "rwp_next_state",
    "RandomWaypoint",
    "RoadVehicle",
    "road_init",
    "road_step",
    "RoadMobility",
    "StaticMobility",
    "TraceMobility",
    "load_trace",
    "build_mobility",
]

DEFAULT_SPEED = 40.0 / 3.6  # 40 km/h


@dataclass
class MobilityConfig:
    model: str = "rwp"  # rwp | road | static | trace
    width: float = 1000.0
    height: float = 1000.0
    road_length: float = 10000.0
    speed: float = round(DEFAULT_SPEED, 2)
    pause_time: float = 0.0
    speed_spread: float = 0.1
    lam: float = 0.0
    sigma: float = 0.0
    lane_offset: float = 5.0
    spacing: float = 100.0
    trace_file: str = ""

    def validate(self):
        if self.model not in ("rwp", "road", "static", "trace"):
            raise ValueError(f"unknown mobility model {self.model!r}")
        if not self.speed > 0:
            raise ValueError("speed must be > 0")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not (self.width > 0 and self.height > 0 and self.road_length > 0):
            raise ValueError("area dimensions must be > 0")
        if self.pause_time < 0:
            raise ValueError("pause_time must be >= 0")
        if not 0 <= self.speed_spread < 1:
            raise ValueError("speed_spread must be in [0, 1)")
        if self.model == "trace" and not self.trace_file:
            raise ValueError("trace model needs trace_file")


# ---------------------------------------------------------------- random waypoint


@dataclass
class RwpState:
    x: float
    y: float
    wx: float
    wy: float
    speed: float
    t_ref: float = 0.0
    pausing: bool = False
    until: float = 0.0

    def __post_init__(self):
        if not self.pausing and self.until == 0.0:
            self.until = self.t_ref + math.hypot(self.wx - self.x, self.wy - self.y) / self.speed

    def velocity(self) -> tuple[float, float]:
        if self.pausing:
            return 0.0, 0.0
        d = math.hypot(self.wx - self.x, self.wy - self.y)
        if d == 0:
            return 0.0, 0.0
        return self.speed * (self.wx - self.x) / d, self.speed * (self.wy - self.y) / d

    def at(self, t: float) -> tuple[float, float]:
        if self.pausing:
            return self.x, self.y
        span = self.until - self.t_ref
        if span <= 0:
            return self.wx, self.wy
        frac = min(1.0, max(0.0, (t - self.t_ref) / span))
        return self.x + (self.wx - self.x) * frac, self.y + (self.wy - self.y) * frac


def _draw_speed(cfg: MobilityConfig, rng) -> float:
    lo, hi = (1.0 - cfg.speed_spread) * cfg.speed, (1.0 + cfg.speed_spread) * cfg.speed
    return rng.uniform(lo, hi) if hi > lo else cfg.speed


def rwp_next_state(state: RwpState, now: float, cfg: MobilityConfig, rng):
    """Advance ``state`` to ``now`` and return (position, velocity, next update time).

    A node heads straight for its waypoint; on arrival it dwells for
    ``pause_time`` and then draws a fresh uniform waypoint and speed.
    """
    while now >= state.until:
        t = state.until
        if state.pausing or cfg.pause_time <= 0:
            if not state.pausing:
                state.x, state.y = state.wx, state.wy
            state.wx = rng.uniform(0.0, cfg.width)
            state.wy = rng.uniform(0.0, cfg.height)
            state.speed = _draw_speed(cfg, rng)
            state.pausing = False
            state.t_ref = t
            state.until = t + math.hypot(state.wx - state.x, state.wy - state.y) / state.speed
        else:
            state.x, state.y = state.wx, state.wy
            state.pausing = True
            state.t_ref = t
            state.until = t + cfg.pause_time
    return state.at(now), state.velocity(), state.until


class RandomWaypoint:
    def __init__(self, count: int, cfg: MobilityConfig, rng):
        self.cfg = cfg
        self.rng = rng
        self.states = []
        for _ in range(count):
            x, y = rng.uniform(0, cfg.width), rng.uniform(0, cfg.height)
            wx, wy = rng.uniform(0, cfg.width), rng.uniform(0, cfg.height)
            self.states.append(RwpState(x, y, wx, wy, _draw_speed(cfg, rng)))
        self.count = count

    def position(self, i: int, t: float) -> tuple[float, float]:
        st = self.states[i]
        if t >= st.until:
            rwp_next_state(st, t, self.cfg, self.rng)
        return st.at(t)


# ---------------------------------------------------------------- road


@dataclass(slots=True)
class RoadVehicle:
    x0: float
    direction: int
    lane_y: float
    speed: float
    x: float = field(default=0.0)

    def __post_init__(self):
        self.x = self.x0


def _poisson_line(lam: float, length: float, rng) -> list[float]:
    xs = []
    if lam <= 0:
        return xs
    x = rng.expovariate(lam)
    while x < length:
        xs.append(x)
        x += rng.expovariate(lam)
    return xs


def _vehicle_speed(cfg: MobilityConfig, rng) -> float:
    if cfg.sigma == 0:
        return cfg.speed
    while True:
        v = rng.gauss(cfg.speed, cfg.sigma)
        if v > 0:
            return v


def road_init(cfg: MobilityConfig, rng, count: int | None = None) -> list[RoadVehicle]:
    """Lay vehicles on both directions of the road.

    Without ``count`` each direction is an independent Poisson process
    of rate ``cfg.lam``.  With ``count`` the same process is conditioned
    on the total: vehicles alternate between directions and sit at
    uniform positions, which is the Poisson law given its count.
    """
    if cfg.lam < 0:
        raise ValueError("lam must be >= 0")
    length = cfg.road_length
    lanes = ((+1, 0.0), (-1, cfg.lane_offset))
    vehicles = []
    if count is None:
        for direction, y in lanes:
            for x in _poisson_line(cfg.lam, length, rng):
                vehicles.append(RoadVehicle(x, direction, y, _vehicle_speed(cfg, rng)))
        return vehicles
    per_lane = [[], []]
    for i in range(count):
        per_lane[i % 2].append(rng.uniform(0.0, length))
    for (direction, y), xs in zip(lanes, per_lane):
        for x in xs:
            vehicles.append(RoadVehicle(x, direction, y, _vehicle_speed(cfg, rng)))
    # Interleave back so node i keeps the lane it was drawn for.
    out = []
    a, b = [v for v in vehicles if v.direction > 0], [v for v in vehicles if v.direction < 0]
    for i in range(count):
        out.append(a[i // 2] if i % 2 == 0 else b[i // 2])
    return out


def road_step(vehicle: RoadVehicle, dt: float, cfg: MobilityConfig) -> float:
    if not dt > 0:
        raise ValueError("dt must be positive")
    vehicle.x = (vehicle.x + vehicle.direction * vehicle.speed * dt) % cfg.road_length
    return vehicle.x


class RoadMobility:
    """Vehicles on a ring road; position is closed-form in time."""

    def __init__(self, vehicles: list[RoadVehicle], cfg: MobilityConfig):
        self.cfg = cfg
        self.vehicles = vehicles
        self.count = len(vehicles)
        self.wrap = cfg.road_length

    def position(self, i: int, t: float) -> tuple[float, float]:
        v = self.vehicles[i]
        return (v.x0 + v.direction * v.speed * t) % self.wrap, v.lane_y


class StaticMobility:
    def __init__(self, positions):
        self.points = [tuple(map(float, p)) for p in positions]
        self.count = len(self.points)

    def position(self, i: int, t: float) -> tuple[float, float]:
        return self.points[i]

    @classmethod
    def line(cls, count: int, spacing: float) -> "StaticMobility":
        return cls([(i * spacing, 0.0) for i in range(count)])


class TraceMobility:
    """Piecewise-linear interpolation of ``time node x y`` records."""

    def __init__(self, tracks: dict[int, list[tuple[float, float, float]]]):
        if not tracks:
            raise ValueError("empty trace")
        self.count = max(tracks) + 1
        self.times = []
        self.xy = []
        for i in range(self.count):
            recs = tracks.get(i)
            if not recs:
                raise ValueError(f"trace has no records for node {i}")
            self.times.append([r[0] for r in recs])
            self.xy.append([(r[1], r[2]) for r in recs])

    def position(self, i: int, t: float) -> tuple[float, float]:
        ts, xy = self.times[i], self.xy[i]
        k = bisect.bisect_right(ts, t)
        if k == 0:
            return xy[0]
        if k == len(ts):
            return xy[-1]
        t0, t1 = ts[k - 1], ts[k]
        (x0, y0), (x1, y1) = xy[k - 1], xy[k]
        frac = (t - t0) / (t1 - t0) if t1 > t0 else 1.0
        return x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac


def load_trace(path: str | Path) -> TraceMobility:
    tracks: dict[int, list] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(" ")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'time_s node_id x_m y_m'")
            try:
                t, node, x, y = float(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed number") from None
            recs = tracks.setdefault(node, [])
            if recs and t < recs[-1][0]:
                raise ValueError(f"{path}:{lineno}: time goes backwards for node {node}")
            recs.append((t, x, y))
    return TraceMobility(tracks)


def build_mobility(cfg: MobilityConfig, count: int, rng):
    cfg.validate()
    if cfg.model == "rwp":
        return RandomWaypoint(count, cfg, rng)
    if cfg.model == "road":
        return RoadMobility(road_init(cfg, rng, count=count), cfg)
    if cfg.model == "static":
        return StaticMobility.line(count, cfg.spacing)
    trace = load_trace(cfg.trace_file)
    if trace.count != count:
        raise ValueError(f"trace describes {trace.count} nodes, config has {count}")
    return trace
