"""Logical and physical instruction sets.

A logical program is a list of long-range CZ and single-qubit ops over
grid qubits.  A physical program is a list of timestamped events (gates,
belt loads, routings, throws/catches, measurements, disposal) produced by
the planner.  Positions are stored in units of the lattice spacing;
times in seconds.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum


class ParseError(ValueError):
    """Raised on malformed program text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class QubitKind(Enum):
    COMPUTATIONAL = "comp"
    MESSENGER = "mess"


@dataclass(frozen=True)
class QubitRef:
    """A computational qubit (grid coordinate) or a messenger qubit (serial)."""

    kind: QubitKind
    coord: tuple[int, int] | None = None  # (row, col) when computational
    serial: int | None = None             # unique id when messenger

    @classmethod
    def comp(cls, row: int, col: int) -> "QubitRef":
        return cls(QubitKind.COMPUTATIONAL, coord=(row, col))

    @classmethod
    def mess(cls, serial: int) -> "QubitRef":
        return cls(QubitKind.MESSENGER, serial=serial)

    @property
    def is_messenger(self) -> bool:
        return self.kind is QubitKind.MESSENGER

    def sort_key(self) -> tuple:
        if self.is_messenger:
            return (0, self.serial, 0)
        return (1, self.coord[0], self.coord[1])

    def to_json(self):
        if self.is_messenger:
            return {"kind": "mess", "serial": self.serial}
        return {"kind": "comp", "row": self.coord[0], "col": self.coord[1]}

    @classmethod
    def from_json(cls, obj) -> "QubitRef":
        if obj["kind"] == "mess":
            return cls.mess(obj["serial"])
        return cls.comp(obj["row"], obj["col"])

    def __repr__(self):
        if self.is_messenger:
            return f"m{self.serial}"
        return f"q{self.coord}"


class GateKind(Enum):
    CZ = "cz"
    SWAP = "swap"
    H = "h"
    Z = "z"
    X = "x"
    MEASURE_X = "mx"
    COND_Z = "cond_z"
    COND_X = "cond_x"

    @property
    def n_operands(self) -> int:
        return 2 if self in (GateKind.CZ, GateKind.SWAP) else 1

    @property
    def writes_bit(self) -> bool:
        return self is GateKind.MEASURE_X

    @property
    def reads_bit(self) -> bool:
        return self in (GateKind.COND_Z, GateKind.COND_X)

    @property
    def is_two_qubit(self) -> bool:
        return self.n_operands == 2


@dataclass(frozen=True)
class GateStep:
    """One gate in a decomposition, before space-time placement."""

    gate: GateKind
    operands: tuple[QubitRef, ...]
    bit: int | None = None

    def __post_init__(self):
        if len(self.operands) != self.gate.n_operands:
            raise ValueError(f"{self.gate.value} takes {self.gate.n_operands} operands")
        if self.gate.is_two_qubit and self.operands[0] == self.operands[1]:
            raise ValueError(f"{self.gate.value} operands must be distinct")
        if (self.gate.writes_bit or self.gate.reads_bit) and self.bit is None:
            raise ValueError(f"{self.gate.value} requires a classical bit")
        if self.bit is not None and not (self.gate.writes_bit or self.gate.reads_bit):
            raise ValueError(f"{self.gate.value} carries no classical bit")


# --- logical circuits -------------------------------------------------------

@dataclass(frozen=True)
class LogicalCZ:
    a: tuple[int, int]
    b: tuple[int, int]


@dataclass(frozen=True)
class Logical1Q:
    gate: GateKind  # H, Z or X
    q: tuple[int, int]


@dataclass(frozen=True)
class LogicalCircuit:
    lattice_size: int
    ops: tuple = ()


@dataclass(frozen=True)
class ValidationIssue:
    index: int | None
    message: str


def validate(circuit: LogicalCircuit) -> list[ValidationIssue]:
    """Check LogicalCircuit invariants; empty list means well formed."""
    issues = []
    L = circuit.lattice_size
    if L < 1:
        issues.append(ValidationIssue(None, f"lattice size {L} must be >= 1"))

    def in_range(c):
        return 0 <= c[0] < L and 0 <= c[1] < L

    for i, op in enumerate(circuit.ops):
        if isinstance(op, LogicalCZ):
            for c in (op.a, op.b):
                if not in_range(c):
                    issues.append(ValidationIssue(i, f"coordinate {c} out of range for L={L}"))
            if op.a == op.b:
                issues.append(ValidationIssue(i, f"cz operands identical: {op.a}"))
        elif isinstance(op, Logical1Q):
            if op.gate not in (GateKind.H, GateKind.Z, GateKind.X):
                issues.append(ValidationIssue(i, f"unsupported single-qubit gate {op.gate}"))
            if not in_range(op.q):
                issues.append(ValidationIssue(i, f"coordinate {op.q} out of range for L={L}"))
        else:
            issues.append(ValidationIssue(i, f"unknown op {op!r}"))
    return issues


_COORD_RE = r"\((\s*-?\d+)\s*,\s*(-?\d+)\s*\)"
_CZ_RE = re.compile(rf"^cz\s+{_COORD_RE}\s+{_COORD_RE}$")
_1Q_RE = re.compile(rf"^([hzx])\s+{_COORD_RE}$")
_LATTICE_RE = re.compile(r"^lattice\s+(\d+)$")


def parse_program(text: str) -> LogicalCircuit:
    """Parse program source.

    Format: `lattice <L>` header, then one statement per line:
    `cz (r1,c1) (r2,c2)` or `h|z|x (r,c)`.  `#` starts a comment.
    """
    L = None
    ops = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if L is None:
            m = _LATTICE_RE.match(line)
            if not m:
                raise ParseError(lineno, "expected 'lattice <L>' header")
            L = int(m.group(1))
            if L < 1:
                raise ParseError(lineno, f"lattice size {L} must be >= 1")
            continue
        m = _CZ_RE.match(line)
        if m:
            a = (int(m.group(1)), int(m.group(2)))
            b = (int(m.group(3)), int(m.group(4)))
            for c in (a, b):
                if not (0 <= c[0] < L and 0 <= c[1] < L):
                    raise ParseError(lineno, f"coordinate {c} out of range for L={L}")
            if a == b:
                raise ParseError(lineno, f"cz operands identical: {a}")
            ops.append(LogicalCZ(a, b))
            continue
        m = _1Q_RE.match(line)
        if m:
            gate = GateKind(m.group(1))
            q = (int(m.group(2)), int(m.group(3)))
            if not (0 <= q[0] < L and 0 <= q[1] < L):
                raise ParseError(lineno, f"coordinate {q} out of range for L={L}")
            ops.append(Logical1Q(gate, q))
            continue
        raise ParseError(lineno, f"cannot parse statement: {line!r}")
    if L is None:
        raise ParseError(1, "missing 'lattice <L>' header")
    return LogicalCircuit(lattice_size=L, ops=tuple(ops))


def render_program(circuit: LogicalCircuit) -> str:
    """Inverse of parse_program."""
    lines = [f"lattice {circuit.lattice_size}"]
    for op in circuit.ops:
        if isinstance(op, LogicalCZ):
            lines.append(f"cz ({op.a[0]},{op.a[1]}) ({op.b[0]},{op.b[1]})")
        else:
            lines.append(f"{op.gate.value} ({op.q[0]},{op.q[1]})")
    return "\n".join(lines) + "\n"


# --- physical events --------------------------------------------------------

class ActionKind(Enum):
    LOAD = "load"
    ROUTE = "route"
    THROW = "throw"
    CATCH = "catch"
    GATE = "gate"
    DISPOSE = "dispose"


_ACTION_RANK = {
    ActionKind.LOAD: 0,
    ActionKind.ROUTE: 1,
    ActionKind.THROW: 2,
    ActionKind.CATCH: 3,
    ActionKind.GATE: 4,
    ActionKind.DISPOSE: 5,
}


@dataclass(frozen=True)
class PhysicalEvent:
    t: float
    pos: tuple[float, float]
    action: ActionKind
    operands: tuple[QubitRef, ...] = ()
    gate: GateKind | None = None
    bit: int | None = None
    duration: float = 0.0
    belt: int | None = None
    to_belt: int | None = None
    velocity: tuple[float, float] | None = None

    @property
    def t_end(self) -> float:
        return self.t + self.duration

    def messenger_serial(self) -> int:
        serials = [q.serial for q in self.operands if q.is_messenger]
        return min(serials) if serials else -1

    def sort_key(self) -> tuple:
        return (
            self.t,
            _ACTION_RANK[self.action],
            self.messenger_serial(),
            tuple(q.sort_key() for q in self.operands),
        )

    def to_json(self) -> dict:
        obj = {
            "t": self.t,
            "x": self.pos[0],
            "y": self.pos[1],
            "action": self.action.value if self.gate is None
            else f"{self.action.value}:{self.gate.value}",
            "operands": [q.to_json() for q in self.operands],
            "bit": self.bit,
        }
        if self.duration:
            obj["dur"] = self.duration
        if self.belt is not None:
            obj["belt"] = self.belt
        if self.to_belt is not None:
            obj["to_belt"] = self.to_belt
        if self.velocity is not None:
            obj["vx"], obj["vy"] = self.velocity
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "PhysicalEvent":
        action = obj["action"]
        gate = None
        if ":" in action:
            action, gname = action.split(":", 1)
            gate = GateKind(gname)
        vel = (obj["vx"], obj["vy"]) if "vx" in obj else None
        return cls(
            t=obj["t"],
            pos=(obj["x"], obj["y"]),
            action=ActionKind(action),
            operands=tuple(QubitRef.from_json(q) for q in obj["operands"]),
            gate=gate,
            bit=obj.get("bit"),
            duration=obj.get("dur", 0.0),
            belt=obj.get("belt"),
            to_belt=obj.get("to_belt"),
            velocity=vel,
        )


def sort_events(events: list[PhysicalEvent]) -> list[PhysicalEvent]:
    """Canonical deterministic total order (idempotent)."""
    return sorted(events, key=PhysicalEvent.sort_key)


def events_to_jsonl(events: list[PhysicalEvent]) -> str:
    return "".join(json.dumps(e.to_json(), sort_keys=True) + "\n" for e in events)


def events_from_jsonl(text: str) -> list[PhysicalEvent]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        out.append(PhysicalEvent.from_json(json.loads(line)))
    return out


@dataclass(frozen=True)
class BitUsage:
    """Writer/reader indices per classical bit, plus ordering violations."""

    usage: dict  # bit -> (writer_index, tuple of reader indices)
    violations: tuple[str, ...] = ()


def classical_bits(events: list[PhysicalEvent]) -> BitUsage:
    """Map each classical bit to its writer and readers, checking order.

    Works on gate events in list order (programs are kept time-sorted);
    a read before the write is reported as a violation.
    """
    writers: dict[int, int] = {}
    readers: dict[int, list[int]] = {}
    violations = []
    for i, ev in enumerate(events):
        if ev.action is not ActionKind.GATE or ev.gate is None:
            continue
        if ev.gate.writes_bit:
            if ev.bit in writers:
                violations.append(f"bit {ev.bit} written twice (events {writers[ev.bit]}, {i})")
            writers[ev.bit] = i
        elif ev.gate.reads_bit:
            if ev.bit not in writers:
                violations.append(f"bit {ev.bit} read at event {i} before any write")
            else:
                w = events[writers[ev.bit]]
                if ev.t < w.t_end:
                    violations.append(
                        f"bit {ev.bit} read at event {i} (t={ev.t}) before writer finishes (t={w.t_end})"
                    )
            readers.setdefault(ev.bit, []).append(i)
    usage = {b: (w, tuple(readers.get(b, ()))) for b, w in writers.items()}
    for b in readers:
        if b not in writers:
            usage[b] = (-1, tuple(readers[b]))
    return BitUsage(usage=usage, violations=tuple(violations))


def gate_steps(events: list[PhysicalEvent]) -> list[GateStep]:
    """Extract the gate-level sequence (time order) from a physical program."""
    evs = [e for e in events if e.action is ActionKind.GATE]
    evs.sort(key=PhysicalEvent.sort_key)
    return [GateStep(e.gate, e.operands, e.bit) for e in evs]
