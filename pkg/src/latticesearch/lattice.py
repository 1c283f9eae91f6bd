"""L1 lattice geometry: points, spheres, balls, and unit-step trajectories.

All search geometry lives on the integer grid with the Manhattan metric.
The n-sphere is the set of points at L1 distance exactly n from the origin
(4n points for n >= 1), and the closed n-ball contains 2n^2 + 2n + 1 points.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

# Coordinates are kept inside a fixed signed range so that radius sweeps up to
# 10^6 are safe and any runaway generator is caught instead of silently
# producing nonsense geometry.
COORD_LIMIT = 2**31 - 1

DIRECTION_VECTORS = {
    "up": (0, 1),
    "down": (0, -1),
    "left": (-1, 0),
    "right": (1, 0),
}

_VECTOR_DIRECTIONS = {v: k for k, v in DIRECTION_VECTORS.items()}


class CoordinateOverflowError(ValueError):
    """A coordinate left the supported signed integer range."""


class InvalidTrajectoryError(ValueError):
    """A trajectory violated the unit-step or timing invariants."""


class LatticePoint(NamedTuple):
    x: int
    y: int


def _check_coord(value: int) -> int:
    if not -COORD_LIMIT <= value <= COORD_LIMIT:
        raise CoordinateOverflowError(f"coordinate {value} outside +/-{COORD_LIMIT}")
    return value


def l1_norm(p: LatticePoint | tuple[int, int]) -> int:
    """Manhattan distance from the origin."""
    x, y = p
    return abs(x) + abs(y)


def l1_distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def sphere_points(n: int) -> set[LatticePoint]:
    """All lattice points at L1 distance exactly n (the n-sphere)."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    if n == 0:
        return {LatticePoint(0, 0)}
    pts: set[LatticePoint] = set()
    for x in range(-n, n + 1):
        r = n - abs(x)
        pts.add(LatticePoint(x, r))
        pts.add(LatticePoint(x, -r))
    return pts


def ball_points(n: int) -> set[LatticePoint]:
    """All lattice points of the closed n-ball."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    return {
        LatticePoint(x, y)
        for x in range(-n, n + 1)
        for y in range(-(n - abs(x)), n - abs(x) + 1)
    }


def closed_ball_count(n: int) -> int:
    """Number of points in the closed n-ball: 2n^2 + 2n + 1."""
    if n < 0:
        raise ValueError("radius must be non-negative")
    return 2 * n * n + 2 * n + 1


def ring_cells(n: int) -> list[LatticePoint]:
    """The n-sphere in counterclockwise order starting at (n, 0).

    Position p in [0, 4n) walks the four diamond sides NE, NW, SW, SE.
    """
    if n < 1:
        raise ValueError("ring order needs n >= 1")
    cells: list[LatticePoint] = []
    cells.extend(LatticePoint(n - p, p) for p in range(n))
    cells.extend(LatticePoint(-p, n - p) for p in range(n))
    cells.extend(LatticePoint(-(n - p), -p) for p in range(n))
    cells.extend(LatticePoint(p, -(n - p)) for p in range(n))
    return cells


def rotate90(p: tuple[int, int], quarter_turns: int = 1) -> LatticePoint:
    """Rotate a point counterclockwise by 90-degree increments."""
    x, y = p
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return LatticePoint(x, y)


@dataclass(frozen=True)
class Step:
    """A run of unit moves in one direction (run-length encoded)."""

    direction: str
    count: int

    def __post_init__(self) -> None:
        if self.direction not in DIRECTION_VECTORS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.count < 1:
            raise ValueError("step count must be >= 1")


def compress_moves(moves: Iterable[tuple[int, int]]) -> tuple[Step, ...]:
    """Run-length encode a sequence of unit displacement vectors."""
    steps: list[Step] = []
    for vec in moves:
        direction = _VECTOR_DIRECTIONS.get(vec)
        if direction is None:
            raise InvalidTrajectoryError(f"not a unit move: {vec}")
        if steps and steps[-1].direction == direction:
            steps[-1] = Step(direction, steps[-1].count + 1)
        else:
            steps.append(Step(direction, 1))
    return tuple(steps)


@dataclass(frozen=True)
class Trajectory:
    """One robot's unit-step path with derived visit timing.

    The robot starts at ``start`` at wall-clock ``start_time`` and then takes
    one unit step per 1/speed time units.  Timing is exact (Fractions) so
    competitive-ratio audits stay honest; floats appear only in exported files.
    """

    robot_id: int
    start: LatticePoint
    steps: tuple[Step, ...]
    speed: int = 1
    start_time: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.speed < 1:
            raise InvalidTrajectoryError("speed must be a positive integer")
        if self.start_time < 0:
            raise InvalidTrajectoryError("start_time must be non-negative")
        _check_coord(self.start.x)
        _check_coord(self.start.y)
        x, y = self.start
        for step in self.steps:
            dx, dy = DIRECTION_VECTORS[step.direction]
            x = _check_coord(x + dx * step.count)
            y = _check_coord(y + dy * step.count)

    @property
    def step_count(self) -> int:
        return sum(s.count for s in self.steps)

    def positions(self) -> Iterator[tuple[Fraction, LatticePoint]]:
        """Yield (time, point) for the start and every unit step, in order."""
        x, y = self.start
        t = self.start_time
        yield t, LatticePoint(x, y)
        i = 0
        for step in self.steps:
            dx, dy = DIRECTION_VECTORS[step.direction]
            for _ in range(step.count):
                i += 1
                x += dx
                y += dy
                yield self.start_time + Fraction(i, self.speed), LatticePoint(x, y)

    def visit_times(self) -> dict[LatticePoint, Fraction]:
        """Earliest visit time of each point on the path."""
        earliest: dict[LatticePoint, Fraction] = {}
        for t, p in self.positions():
            if p not in earliest:
                earliest[p] = t
        return earliest

    def visit_counts(self) -> dict[LatticePoint, int]:
        """How many times each point was visited (revisit history)."""
        counts: dict[LatticePoint, int] = {}
        for _, p in self.positions():
            counts[p] = counts.get(p, 0) + 1
        return counts

    def end_position(self) -> LatticePoint:
        x, y = self.start
        for step in self.steps:
            dx, dy = DIRECTION_VECTORS[step.direction]
            x += dx * step.count
            y += dy * step.count
        return LatticePoint(x, y)

    def end_time(self) -> Fraction:
        return self.start_time + Fraction(self.step_count, self.speed)


def trajectories_to_csv(trajectories: Iterable[Trajectory]) -> str:
    """Render trajectories as CSV: header ``robot_id,t,x,y``, one row per unit
    step, t as decimal time, rows sorted by (robot_id, t).

    The start cell is not a step and gets no row; every plan starts at the
    origin (or the position recorded in the plan metadata).
    """
    out = io.StringIO()
    out.write("robot_id,t,x,y\n")
    for traj in sorted(trajectories, key=lambda tr: tr.robot_id):
        for t, p in traj.positions():
            if t == traj.start_time and p == traj.start:
                continue
            out.write(f"{traj.robot_id},{_format_time(t)},{p.x},{p.y}\n")
    return out.getvalue()


def _format_time(t: Fraction) -> str:
    if t.denominator == 1:
        return str(t.numerator)
    return repr(float(t))


def trajectories_from_csv(
    text: str,
    speeds: dict[int, int] | None = None,
    start_times: dict[int, Fraction] | None = None,
    starts: dict[int, LatticePoint] | None = None,
) -> list[Trajectory]:
    """Rebuild trajectories from the CSV interchange format.

    Exact step times are re-derived from ``speeds``/``start_times`` (normally
    taken from the plan metadata sidecar), not parsed from the lossy decimal
    ``t`` column.
    """
    rows: dict[int, list[LatticePoint]] = {}
    lines = text.strip().splitlines()
    if not lines or lines[0].strip() != "robot_id,t,x,y":
        raise InvalidTrajectoryError("bad CSV header, expected 'robot_id,t,x,y'")
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise InvalidTrajectoryError(f"bad CSV row: {line!r}")
        rid = int(parts[0])
        rows.setdefault(rid, []).append(LatticePoint(int(parts[2]), int(parts[3])))
    trajectories = []
    for rid in sorted(rows):
        start = (starts or {}).get(rid, LatticePoint(0, 0))
        pos = start
        moves = []
        for nxt in rows[rid]:
            moves.append((nxt.x - pos.x, nxt.y - pos.y))
            pos = nxt
        trajectories.append(
            Trajectory(
                robot_id=rid,
                start=start,
                steps=compress_moves(moves),
                speed=(speeds or {}).get(rid, 1),
                start_time=(start_times or {}).get(rid, Fraction(0)),
            )
        )
    return trajectories
