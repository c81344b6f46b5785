"""Environment, demand kinematics, and seeded Poisson demand streams.

A unit-speed service vehicle guards the deadline segment y = L of the
strip [0, W] x [0, L].  Demands appear on the generator y = 0 as a
temporal Poisson process with rate lam, at a uniform abscissa, and
translate straight up at constant speed v.  A demand that crosses the
deadline unserviced has escaped.  While unserviced, the stream seen as
points in the plane is a spatial Poisson process with areal intensity
lam / (v W).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from .errors import ContractViolationError, ParameterDomainError


@dataclass(frozen=True)
class EnvParams:
    """Problem geometry and arrival statistics. Vehicle speed is the unit."""

    W: float   # generator width
    L: float   # generator-to-deadline distance
    v: float   # demand translation speed, as a ratio of vehicle speed
    lam: float  # temporal arrival rate along the generator

    @property
    def areal_intensity(self) -> float:
        """Spatial density lam/(v W) of the unserviced-demand point process."""
        return self.lam / (self.v * self.W)


def make_env(W: float, L: float, v: float, lam: float) -> EnvParams:
    """Validate parameters and freeze them into an EnvParams."""
    for name, value in (("W", W), ("L", L), ("v", v), ("lam", lam)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParameterDomainError(f"{name} must be a number, got {value!r}")
        if not math.isfinite(value) or value <= 0:
            raise ParameterDomainError(
                f"{name} must be positive and finite, got {value!r}"
            )
    return EnvParams(float(W), float(L), float(v), float(lam))


class DemandStatus(str, Enum):
    PENDING = "pending"          # generated but not yet arrived
    OUTSTANDING = "outstanding"  # arrived, not yet resolved
    CAPTURED = "captured"
    ESCAPED = "escaped"


# legal transitions: pending -> outstanding -> {captured, escaped}
_NEXT_STATUS = {
    DemandStatus.PENDING: {DemandStatus.OUTSTANDING},
    DemandStatus.OUTSTANDING: {DemandStatus.CAPTURED, DemandStatus.ESCAPED},
    DemandStatus.CAPTURED: set(),
    DemandStatus.ESCAPED: set(),
}


@dataclass
class Demand:
    """One arrival: shows up at (x, 0) at time t_arr and rises at speed v."""

    id: int
    t_arr: float
    x: float
    status: DemandStatus = DemandStatus.PENDING
    resolve_time: float | None = None

    def escape_time(self, env: EnvParams) -> float:
        """Instant the demand reaches the deadline: t_arr + L/v."""
        return self.t_arr + env.L / env.v

    def _transition(self, new: DemandStatus) -> None:
        if new not in _NEXT_STATUS[self.status]:
            raise ContractViolationError(
                f"demand {self.id}: illegal status transition "
                f"{self.status.value} -> {new.value}"
            )
        self.status = new

    def mark_outstanding(self) -> None:
        self._transition(DemandStatus.OUTSTANDING)

    def mark_captured(self, t: float) -> None:
        self._transition(DemandStatus.CAPTURED)
        self.resolve_time = t

    def mark_escaped(self, t: float) -> None:
        self._transition(DemandStatus.ESCAPED)
        self.resolve_time = t


def demand_position(demand: Demand, v: float, t: float) -> tuple[float, float]:
    """Demand position (x, v*(t - t_arr)); negative ordinate before arrival."""
    return (demand.x, v * (t - demand.t_arr))


@dataclass(frozen=True)
class VehicleState:
    """Vehicle position snapshot at time t."""

    x: float
    y: float
    t: float


@dataclass
class DemandStream:
    """A seeded, time-sorted batch of demands over a fixed environment.

    Treated as immutable once built; policy simulators copy demands
    before mutating statuses, so one stream is safe to share across runs.
    """

    env: EnvParams
    seed: int
    demands: list[Demand] = field(default_factory=list)

    def __post_init__(self) -> None:
        prev = -math.inf
        for d in self.demands:
            if d.t_arr <= prev:
                raise ContractViolationError(
                    f"demand {d.id}: arrival times must be strictly increasing"
                )
            prev = d.t_arr
            # generated abscissae live in [0, W); hand-built boundary x = W is tolerated
            if not (0.0 <= d.x <= self.env.W):
                raise ContractViolationError(
                    f"demand {d.id}: abscissa {d.x} outside [0, {self.env.W}]"
                )

    def __len__(self) -> int:
        return len(self.demands)

    def __iter__(self) -> Iterator[Demand]:
        return iter(self.demands)

    def __getitem__(self, i: int) -> Demand:
        return self.demands[i]


def generate_stream(env: EnvParams, n_demands: int, seed: int) -> DemandStream:
    """Draw a stream of n_demands arrivals, deterministic per (env, n, seed).

    Interarrival gaps are Exponential(lam) via the inverse transform
    -ln(U)/lam, abscissae Uniform[0, W).  Draw order is fixed (all gaps,
    then all abscissae) so streams are bit-reproducible for a given seed.
    """
    if not isinstance(n_demands, int) or n_demands < 0:
        raise ParameterDomainError(f"n_demands must be a non-negative int, got {n_demands!r}")
    if not isinstance(seed, int) or seed < 0:
        raise ParameterDomainError(f"seed must be a non-negative int, got {seed!r}")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n_demands)          # in (0, 1], keeps -ln(U) finite
    gaps = -np.log(u) / env.lam
    t_arr = np.cumsum(gaps)
    xs = env.W * rng.random(n_demands)       # in [0, W)
    demands = [Demand(i, float(t_arr[i]), float(xs[i])) for i in range(n_demands)]
    return DemandStream(env=env, seed=seed, demands=demands)


def region_count(
    stream: DemandStream, rect: Sequence[float], t: float
) -> int:
    """Count demands whose position at time t lies in the closed rectangle.

    rect is (xmin, xmax, ymin, ymax) and should sit inside [0,W] x [0, v*t];
    counting assumes nothing has been serviced before t.
    """
    xmin, xmax, ymin, ymax = rect
    if xmin > xmax or ymin > ymax:
        raise ParameterDomainError(f"rect {rect!r} has negative extent")
    v = stream.env.v
    count = 0
    for d in stream.demands:
        y = v * (t - d.t_arr)
        if xmin <= d.x <= xmax and ymin <= y <= ymax:
            count += 1
    return count


# --- stream serialization -------------------------------------------------
# JSON lines: a header record with the environment and seed, then one
# record {id, t_arr, x} per demand.  Floats round-trip exactly (repr).

def write_stream_jsonl(stream: DemandStream, path: str) -> None:
    env = stream.env
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "env": {"W": env.W, "L": env.L, "v": env.v, "lam": env.lam},
            "seed": stream.seed,
            "n": len(stream),
        }
        fh.write(json.dumps(header) + "\n")
        for d in stream.demands:
            fh.write(json.dumps({"id": d.id, "t_arr": d.t_arr, "x": d.x}) + "\n")


def read_stream_jsonl(path: str) -> DemandStream:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ContractViolationError(f"{path}: empty stream file")
    header = json.loads(lines[0])
    env = make_env(**header["env"])
    demands = []
    for ln in lines[1:]:
        rec = json.loads(ln)
        demands.append(Demand(int(rec["id"]), float(rec["t_arr"]), float(rec["x"])))
    return DemandStream(env=env, seed=int(header["seed"]), demands=demands)
