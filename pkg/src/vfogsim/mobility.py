"""Grid-city road network and vehicle kinematics.

Roads are the zero-width gridlines of a rectangular block grid. Client
vehicles travel at constant speed along roads and pick a fresh direction
every time they hit an intersection; service vehicles are parked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

#: Unit vectors for the four legal headings.
HEADING_VECTORS = {
    "+x": (1.0, 0.0),
    "-x": (-1.0, 0.0),
    "+y": (0.0, 1.0),
    "-y": (0.0, -1.0),
}

_OPPOSITE = {"+x": "-x", "-x": "+x", "+y": "-y", "-y": "+y"}

_SNAP = 1e-9  # tolerance for "sitting exactly on a gridline"


@dataclass(frozen=True)
class GridNetwork:
    """Rectangular grid of square city blocks with a single RSU."""

    length_m: float = 1000.0
    width_m: float = 1000.0
    block_m: float = 200.0
    rsu_position: tuple[float, float] = (500.0, 500.0)

    def __post_init__(self):
        if self.block_m <= 0:
            raise ValueError("block_m must be positive")
        for side in (self.length_m, self.width_m):
            k = side / self.block_m
            if side <= 0 or abs(k - round(k)) > 1e-9:
                raise ValueError("region sides must be positive multiples of block_m")

    def on_gridline(self, coord: float) -> bool:
        return abs(coord - round(coord / self.block_m) * self.block_m) <= _SNAP

    def on_road(self, x: float, y: float) -> bool:
        inside = -_SNAP <= x <= self.length_m + _SNAP and -_SNAP <= y <= self.width_m + _SNAP
        return inside and (self.on_gridline(x) or self.on_gridline(y))

    def is_intersection(self, x: float, y: float) -> bool:
        return self.on_road(x, y) and self.on_gridline(x) and self.on_gridline(y)

    def total_road_length(self) -> float:
        n_vert = int(round(self.length_m / self.block_m)) + 1
        n_horiz = int(round(self.width_m / self.block_m)) + 1
        return n_vert * self.width_m + n_horiz * self.length_m

    def legal_directions(self, x: float, y: float) -> list[str]:
        """Headings that keep a vehicle on the road, evaluated at an intersection."""
        out = []
        if x < self.length_m - _SNAP:
            out.append("+x")
        if x > _SNAP:
            out.append("-x")
        if y < self.width_m - _SNAP:
            out.append("+y")
        if y > _SNAP:
            out.append("-y")
        return out

    def max_rsu_distance(self) -> float:
        """Largest possible distance from the RSU to a point of the region."""
        rx, ry = self.rsu_position
        corners = [(0, 0), (self.length_m, 0), (0, self.width_m), (self.length_m, self.width_m)]
        return max(math.hypot(cx - rx, cy - ry) for cx, cy in corners)


@dataclass
class ClientVehicleState:
    """Mobile task-emitting vehicle."""

    id: int
    x: float
    y: float
    heading: str
    velocity: float  # m/s, constant within an episode
    rate: float  # tasks per second


@dataclass(frozen=True)
class ServiceVehicleState:
    """Parked compute-offering vehicle."""

    id: int
    x: float
    y: float
    cpu: float  # MIPS


def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Euclidean distance between two points in meters."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def random_road_position(rng: np.random.Generator, grid: GridNetwork):
    """Sample a point uniformly over total road length, plus a legal heading.

    Returns (x, y, heading).
    """
    n_vert = int(round(grid.length_m / grid.block_m)) + 1
    n_horiz = int(round(grid.width_m / grid.block_m)) + 1
    total = grid.total_road_length()
    u = rng.uniform(0.0, total)
    if u < n_vert * grid.width_m:
        line = int(u // grid.width_m)
        x = line * grid.block_m
        y = u - line * grid.width_m
        axis = "y"
    else:
        u -= n_vert * grid.width_m
        line = int(u // grid.length_m)
        y = line * grid.block_m
        x = u - line * grid.length_m
        axis = "x"
    if grid.is_intersection(x, y):
        dirs = grid.legal_directions(x, y)
    elif axis == "x":
        dirs = ["+x", "-x"]
    else:
        dirs = ["+y", "-y"]
    heading = dirs[rng.integers(len(dirs))]
    return x, y, heading


def _redirect(rng: np.random.Generator, grid: GridNetwork, x: float, y: float, heading: str) -> str:
    # New direction at an intersection: uniform over legal continuations,
    # excluding the reversal of the incoming heading unless it is the only one.
    options = grid.legal_directions(x, y)
    forward = [d for d in options if d != _OPPOSITE[heading]]
    if forward:
        options = forward
    return options[rng.integers(len(options))]


def advance_vehicle(
    state: ClientVehicleState, dt: float, grid: GridNetwork, rng: np.random.Generator
) -> ClientVehicleState:
    """Move a client vehicle along the roads for dt seconds.

    Travels exactly velocity*dt meters of path, re-drawing the heading at
    every intersection crossed (possibly several within one call).
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    remaining = state.velocity * dt
    x, y, heading = state.x, state.y, state.heading
    while remaining > 0:
        if grid.is_intersection(x, y):
            heading = _redirect(rng, grid, x, y, heading)
        dx, dy = HEADING_VECTORS[heading]
        if dx != 0.0:
            along, lo, hi, sign = x, 0.0, grid.length_m, dx
        else:
            along, lo, hi, sign = y, 0.0, grid.width_m, dy
        units = along / grid.block_m
        k = round(units)
        at_line = abs(along - k * grid.block_m) <= _SNAP
        if sign > 0:
            nxt = (k + 1) * grid.block_m if at_line else math.ceil(units) * grid.block_m
            d_int = min(nxt, hi) - along
        else:
            nxt = (k - 1) * grid.block_m if at_line else math.floor(units) * grid.block_m
            d_int = along - max(nxt, lo)
        step = min(remaining, d_int)
        x += dx * step
        y += dy * step
        remaining -= step
        if step == d_int:
            # landed on a gridline: snap to kill float drift
            if dx != 0.0:
                x = round(x / grid.block_m) * grid.block_m
            else:
                y = round(y / grid.block_m) * grid.block_m
    return replace(state, x=x, y=y, heading=heading)


class Trajectory:
    """Lazy constant-speed path of one client vehicle.

    Queries must be made with nondecreasing times; the underlying random
    direction draws then depend only on cumulative distance traveled, so the
    produced path is identical no matter how queries are chunked.
    """

    def __init__(self, state: ClientVehicleState, grid: GridNetwork, rng: np.random.Generator):
        self._state = state
        self._grid = grid
        self._rng = rng
        self._t = 0.0

    @property
    def velocity(self) -> float:
        return self._state.velocity

    def position(self, t: float) -> tuple[float, float]:
        if t < self._t - 1e-12:
            raise ValueError(f"trajectory queried backwards: {t} < {self._t}")
        if t > self._t:
            self._state = advance_vehicle(self._state, t - self._t, self._grid, self._rng)
            self._t = t
        return self._state.x, self._state.y
