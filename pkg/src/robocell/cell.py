"""Geometry and timing model of a flexible robotic cell.

The cell is a row of stations: the input buffer is station 0, machines
1..m follow in order, and the output buffer is station m+1.  A single
robot moves parts between neighboring stations in ``delta`` time per hop
and needs ``epsilon`` time for each pick or place.  Machine i processes a
part for ``proc[i-1]`` time once loaded.

Every production cycle performs 2m activities: loading machine i (L_i,
the robot fetches a part from the input buffer and places it on machine
i) and unloading machine i (U_i, the robot takes the finished part to
the output buffer).  All timing formulas below measure the gap between
activity *completions*.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

__all__ = [
    "Activity",
    "CellInstance",
    "InstanceError",
    "L",
    "U",
    "activities",
    "big_m",
    "canonical_order",
    "distance",
    "instance_hash",
    "load_instance",
    "min_separation",
]


class InstanceError(ValueError):
    """Raised for malformed cell instances or instance files."""


@dataclass(frozen=True, order=True)
class Activity:
    """One robot activity: kind "L" (load) or "U" (unload) of a machine.

    Ordering is the canonical activity order L_1 < ... < L_m < U_1 < ... < U_m.
    """

    kind: str
    machine: int

    def __post_init__(self) -> None:
        if self.kind not in ("L", "U"):
            raise ValueError(f"activity kind must be 'L' or 'U', got {self.kind!r}")
        if not isinstance(self.machine, int) or self.machine < 1:
            raise ValueError(f"machine index must be a positive int, got {self.machine!r}")

    def __str__(self) -> str:
        return f"{self.kind}{self.machine}"

    def __repr__(self) -> str:
        return f"Activity({self.kind!r}, {self.machine})"

    @classmethod
    def parse(cls, token: str) -> "Activity":
        token = token.strip()
        if len(token) < 2 or token[0] not in ("L", "U"):
            raise ValueError(f"cannot parse activity token {token!r}")
        try:
            machine = int(token[1:])
        except ValueError:
            raise ValueError(f"cannot parse activity token {token!r}") from None
        return cls(token[0], machine)

    def index(self, m: int) -> int:
        """Dense id in 0..2m-1 following the canonical order."""
        base = 0 if self.kind == "L" else m
        return base + self.machine - 1


def L(machine: int) -> Activity:
    return Activity("L", machine)


def U(machine: int) -> Activity:
    return Activity("U", machine)


def _check_duration(name: str, value, minimum_exclusive: bool) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise InstanceError(f"{name} must be a number, got {type(value).__name__}")
    if minimum_exclusive:
        if not value > 0:
            raise InstanceError(f"{name} must be positive, got {value!r}")
    elif value < 0:
        raise InstanceError(f"{name} must be non-negative, got {value!r}")


@dataclass(frozen=True)
class CellInstance:
    """A robotic cell: m machines, robot timings, per-machine processing times.

    Integer (or Fraction) inputs are kept exact through every computation;
    floats are carried as floats.
    """

    m: int
    epsilon: object
    delta: object
    proc: tuple

    def __init__(self, m: int, epsilon, delta, proc: Sequence) -> None:
        if not isinstance(m, int) or m < 1:
            raise InstanceError(f"m must be a positive int, got {m!r}")
        _check_duration("epsilon", epsilon, minimum_exclusive=True)
        _check_duration("delta", delta, minimum_exclusive=True)
        proc = tuple(proc)
        if len(proc) != m:
            raise InstanceError(f"expected {m} processing times, got {len(proc)}")
        for k, p in enumerate(proc, start=1):
            _check_duration(f"p_{k}", p, minimum_exclusive=False)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "epsilon", epsilon)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "proc", proc)

    @classmethod
    def uniform(cls, m: int, epsilon, delta, p) -> "CellInstance":
        """Instance where every machine has the same processing time p."""
        _check_duration("p", p, minimum_exclusive=False)
        return cls(m, epsilon, delta, (p,) * m)

    @property
    def uniform_p(self):
        """The common processing time, or None if machines differ."""
        first = self.proc[0]
        return first if all(p == first for p in self.proc) else None

    @property
    def n_activities(self) -> int:
        return 2 * self.m

    def is_exact(self) -> bool:
        """True when all durations are ints or Fractions (exact arithmetic)."""
        values = (self.epsilon, self.delta, *self.proc)
        return all(isinstance(v, (int, Rational)) and not isinstance(v, bool) for v in values)

    def to_json(self) -> dict:
        data = {"m": self.m, "epsilon": self.epsilon, "delta": self.delta}
        if self.uniform_p is not None:
            data["p"] = self.proc[0]
        else:
            data["p_i"] = list(self.proc)
        return data


_INSTANCE_KEYS = {"m", "epsilon", "delta", "p", "p_i"}


def load_instance(source) -> CellInstance:
    """Build a CellInstance from a JSON file path, JSON text, or a dict.

    The object must have keys m, epsilon, delta, and exactly one of
    p (uniform) or p_i (per machine).  Unknown keys are rejected.
    """
    if isinstance(source, CellInstance):
        return source
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid instance JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InstanceError("instance JSON must be an object")
    unknown = set(data) - _INSTANCE_KEYS
    if unknown:
        raise InstanceError(f"unknown instance keys: {sorted(unknown)}")
    for key in ("m", "epsilon", "delta"):
        if key not in data:
            raise InstanceError(f"instance is missing key {key!r}")
    if ("p" in data) == ("p_i" in data):
        raise InstanceError("instance must define exactly one of 'p' or 'p_i'")
    m = data["m"]
    if not isinstance(m, int) or isinstance(m, bool):
        raise InstanceError(f"m must be an int, got {m!r}")
    if "p" in data:
        return CellInstance.uniform(m, data["epsilon"], data["delta"], data["p"])
    p_i = data["p_i"]
    if not isinstance(p_i, list):
        raise InstanceError("p_i must be a list")
    return CellInstance(m, data["epsilon"], data["delta"], p_i)


def instance_hash(inst: CellInstance) -> str:
    """Stable short fingerprint used to tie models and warm starts together."""
    text = f"m={inst.m};epsilon={inst.epsilon!r};delta={inst.delta!r};proc={inst.proc!r}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def activities(m: int) -> list[Activity]:
    """All 2m activities in canonical order L_1..L_m, U_1..U_m."""
    return [Activity("L", i) for i in range(1, m + 1)] + [Activity("U", i) for i in range(1, m + 1)]


def canonical_order(m: int) -> list[Activity]:
    """The canonical cycle body after the anchor L_1: L_2..L_m, U_1..U_m."""
    return [Activity("L", i) for i in range(2, m + 1)] + [Activity("U", i) for i in range(1, m + 1)]


def distance(inst: CellInstance, a: Activity, b: Activity):
    """Travel-plus-handling time between completing activity a and then b.

    After L_i the robot stands at machine i; after U_i at the output
    buffer.  The next activity is one pick and one place with the walks
    they require.  Defined for every ordered pair with a != b, including
    (L_i, U_i).
    """
    if a == b:
        raise ValueError(f"distance is undefined for a == b ({a})")
    m = inst.m
    i, j = a.machine, b.machine
    if not (1 <= i <= m and 1 <= j <= m):
        raise ValueError(f"activity machine out of range for m={m}: {a}, {b}")
    if a.kind == "L" and b.kind == "L":
        hops = i + j
    elif a.kind == "U" and b.kind == "U":
        hops = 2 * (m + 1 - j)
    elif a.kind == "U":  # U_i -> L_j
        hops = m + 1 + j
    else:  # L_i -> U_j
        hops = abs(i - j) + (m + 1 - j)
    return 2 * inst.epsilon + hops * inst.delta


def min_separation(inst: CellInstance, machine: int):
    """Minimum gap between completing L_i and completing U_i.

    The robot must reach machine i (at best straight from loading it),
    the part must finish processing, and the robot carries it out:
    2*epsilon + (m+1-i)*delta + p_i.
    """
    if not (1 <= machine <= inst.m):
        raise ValueError(f"machine {machine} out of range for m={inst.m}")
    return 2 * inst.epsilon + (inst.m + 1 - machine) * inst.delta + inst.proc[machine - 1]


def big_m(inst: CellInstance):
    """Closed-form big-M constant used by all MILP formulations.

    Only defined for uniform processing times.  For per-machine times use
    the evaluated cycle time of the canonical order instead, which is an
    upper bound on the optimum as well.

    Note: for m >= 2 this constant exceeds the evaluated cycle time of
    the canonical order by 2*(m-1)*delta (plus cross-cycle effects at
    large p); it is kept in this closed form because the reference
    benchmark tables and their LP relaxation values are tied to it.
    """
    p = inst.uniform_p
    if p is None:
        raise InstanceError(
            "big_m requires uniform processing times; "
            "evaluate the canonical order for a per-machine bound"
        )
    m, eps, delta = inst.m, inst.epsilon, inst.delta
    base = 2 * (m * m + 2 * m - 1) * delta + 4 * m * eps
    slack = p - 2 * (m - 1) * eps - (m * m + m - 2) * delta
    return base + max(0, slack)
