"""Space-time planner for messenger transport and gate firing.

Maps a decomposition onto concrete trajectories: belts run along grid
rows/columns with a half-cell lane offset, flights are straight lines
displaced half a cell from the line through the two targets.  A gate may
fire only while the messenger stays within the blockade radius of its
partner for the gate's whole duration; concurrent two-qubit gates must
keep all involved atoms at least two lattice cells apart.

All positions are in units of the lattice spacing; times in seconds.
One cell of travel takes `a / v` seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .architectures import (ArchitectureSpec, Decomposition, Variant,
                            decompose_cz, one_way_case)
from .ir import (ActionKind, GateKind, GateStep, Logical1Q, LogicalCZ,
                 LogicalCircuit, PhysicalEvent, QubitRef, sort_events, validate)

EXCLUSION_CELLS = 2.0       # min separation of concurrently firing 2q gates
DIST_TOL = 1e-9
ENTRY_MARGIN = 2.0          # cells of approach before the first interaction
EXIT_MARGIN = 1.5           # cells past the last interaction before disposal


class InfeasibleError(RuntimeError):
    """Raised when no feasible firing times exist; names the constraint."""

    def __init__(self, constraint: str):
        super().__init__(constraint)
        self.constraint = constraint


class SegmentKind(Enum):
    BELT_RIDE = "belt"
    FREE_FLIGHT = "flight"
    ROUTING = "routing"
    TURNAROUND = "turnaround"
    STATIONARY = "stationary"


@dataclass(frozen=True)
class BeltModel:
    direction: tuple[float, float]   # unit vector, +-x or +-y
    speed: float                     # m/s, equals arch.v
    site_pitch: float                # meters, equals arch.a
    phase_offset: float = 0.0
    lane_offset: float = 0.5         # perpendicular displacement, cells


@dataclass(frozen=True)
class TrajectorySegment:
    messenger: int
    kind: SegmentKind
    t_start: float
    t_end: float
    start_pos: tuple[float, float]
    end_pos: tuple[float, float]
    belt: int | None = None

    def position(self, t: float) -> tuple[float, float]:
        if self.t_end <= self.t_start:
            return self.start_pos
        f = min(max((t - self.t_start) / (self.t_end - self.t_start), 0.0), 1.0)
        return (self.start_pos[0] + f * (self.end_pos[0] - self.start_pos[0]),
                self.start_pos[1] + f * (self.end_pos[1] - self.start_pos[1]))


@dataclass
class ScheduledProgram:
    events: list[PhysicalEvent]
    trajectories: dict[int, list[TrajectorySegment]]
    makespan: float
    belts: dict[int, BeltModel] = field(default_factory=dict)


# --- atom motion lookup -----------------------------------------------------

class _Track:
    """Piecewise-linear position of one atom (static or from segments)."""

    def __init__(self, static_pos=None, segments=None):
        self.static = static_pos
        self.segments = segments or []

    @classmethod
    def for_qubit(cls, q: QubitRef, trajectories) -> "_Track":
        if q.is_messenger:
            return cls(segments=trajectories[q.serial])
        r, c = q.coord
        return cls(static_pos=(float(c), float(r)))

    def breakpoints(self, t0, t1):
        if self.static is not None:
            return []
        return [s.t_start for s in self.segments if t0 < s.t_start < t1] + \
               [s.t_end for s in self.segments if t0 < s.t_end < t1]

    def position(self, t: float) -> tuple[float, float]:
        if self.static is not None:
            return self.static
        segs = self.segments
        if t <= segs[0].t_start:
            return segs[0].start_pos
        for s in segs:
            if t <= s.t_end:
                return s.position(t)
        return segs[-1].end_pos


def _pieces(ta: _Track, tb: _Track, t0: float, t1: float):
    cuts = sorted(set([t0, t1] + ta.breakpoints(t0, t1) + tb.breakpoints(t0, t1)))
    for lo, hi in zip(cuts, cuts[1:]):
        yield lo, hi


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def min_distance(ta: _Track, tb: _Track, t0: float, t1: float) -> float:
    """Minimum separation over [t0, t1]; exact on the piecewise-linear motion."""
    if t1 < t0:
        return math.inf
    best = math.inf
    for lo, hi in _pieces(ta, tb, t0, t1):
        pa0, pa1 = ta.position(lo), ta.position(hi)
        pb0, pb1 = tb.position(lo), tb.position(hi)
        r0 = (pa0[0] - pb0[0], pa0[1] - pb0[1])
        r1 = (pa1[0] - pb1[0], pa1[1] - pb1[1])
        s = (r1[0] - r0[0], r1[1] - r0[1])
        ss = s[0] * s[0] + s[1] * s[1]
        best = min(best, math.hypot(*r0), math.hypot(*r1))
        if ss > 0:
            f = -(r0[0] * s[0] + r0[1] * s[1]) / ss
            if 0 < f < 1:
                best = min(best, math.hypot(r0[0] + f * s[0], r0[1] + f * s[1]))
    if best is math.inf:  # zero-length interval
        best = _dist(ta.position(t0), tb.position(t0))
    return best


def max_distance(ta: _Track, tb: _Track, t0: float, t1: float) -> float:
    """Maximum separation over [t0, t1] (convex per piece, so at breakpoints)."""
    times = sorted(set([t0, t1] + ta.breakpoints(t0, t1) + tb.breakpoints(t0, t1)))
    return max(_dist(ta.position(t), tb.position(t)) for t in times)


# --- single-gate planning ---------------------------------------------------

@dataclass
class _Anchor:
    step: GateStep
    duration: float
    lo: float                 # earliest feasible firing *center*
    hi: float                 # latest feasible firing center (inf if flexible)
    pos_kind: str             # "partner" | "cross" | "messenger" | "fixed"
    fixed_pos: tuple[float, float] | None = None
    center: float = math.nan


@dataclass
class _Draft:
    rides: dict = field(default_factory=dict)        # serial -> [TrajectorySegment]
    anchors: list = field(default_factory=list)
    aux_events: list = field(default_factory=list)   # PhysicalEvent (loads etc.)
    hold: dict = field(default_factory=dict)         # serial -> (arrival t, pos)
    belts: dict = field(default_factory=dict)


class _Itinerary:
    """Sequential builder for one messenger's trajectory."""

    def __init__(self, serial: int, t0: float, p0: tuple[float, float]):
        self.serial = serial
        self.t = t0
        self.p = p0
        self.t_load = t0
        self.segs: list[TrajectorySegment] = []

    def move_to(self, p1, v_cells: float, kind: SegmentKind, belt=None) -> float:
        d = _dist(self.p, p1)
        t1 = self.t + d / v_cells
        self.segs.append(TrajectorySegment(self.serial, kind, self.t, t1, self.p, p1, belt))
        self.t, self.p = t1, p1
        return t1

    def dwell(self, duration: float, kind: SegmentKind) -> float:
        t1 = self.t + duration
        self.segs.append(TrajectorySegment(self.serial, kind, self.t, t1, self.p, self.p))
        self.t = t1
        return t1

    def time_passing(self, point, v_cells: float) -> float:
        # time at which the *next* straight move passes `point`
        return self.t + _dist(self.p, point) / v_cells


def _pass_window(arch: ArchitectureSpec, offset_cells: float, duration: float,
                 t_closest: float, what: str) -> tuple[float, float]:
    """Center window for a gate fired on a messenger passing a static partner."""
    R_c = arch.R / arch.a
    ct = arch.a / arch.v
    chord2 = R_c * R_c - offset_cells * offset_cells
    if chord2 <= 0:
        raise InfeasibleError(f"{what}: lane offset {offset_cells} outside blockade radius {R_c}")
    hw = math.sqrt(chord2) * ct
    if 2 * hw < duration:
        raise InfeasibleError(
            f"{what}: blockade window {2 * hw:.3e}s shorter than gate duration {duration:.3e}s")
    return (t_closest - hw + duration / 2, t_closest + hw - duration / 2)


def _cross_window(arch: ArchitectureSpec, duration: float, t_sync: float,
                  what: str) -> tuple[float, float]:
    """Center window for a gate between two messengers crossing orthogonally."""
    R_c = arch.R / arch.a
    ct = arch.a / arch.v
    hw = R_c * ct / math.sqrt(2)  # relative speed sqrt(2) v at the crossing
    if 2 * hw < duration:
        raise InfeasibleError(
            f"{what}: crossing window {2 * hw:.3e}s shorter than gate duration {duration:.3e}s")
    return (t_sync - hw + duration / 2, t_sync + hw - duration / 2)


def _gate_duration(arch: ArchitectureSpec, gate: GateKind) -> float:
    if gate.is_two_qubit:
        return arch.t2
    if gate is GateKind.MEASURE_X:
        return arch.tr
    return arch.t1


def _load_event(it: _Itinerary, belt=None) -> PhysicalEvent:
    return PhysicalEvent(it.t_load, it.segs[0].start_pos, ActionKind.LOAD,
                         (QubitRef.mess(it.serial),), belt=belt)


def _xy(coord):
    return (float(coord[1]), float(coord[0]))  # (row, col) -> (x, y)


def _plan_two_way(arch: ArchitectureSpec, d: Decomposition) -> _Draft:
    (ra, ca), (rb, cb) = d.a, d.b
    dh = 1.0 if cb >= ca else -1.0
    dv = 1.0 if rb >= ra else -1.0
    ct = arch.a / arch.v
    vc = 1.0 / ct
    dc, dr = abs(cb - ca), abs(rb - ra)

    y1 = ra - 0.5 * dv            # lane of m1, flows +dh
    x2 = cb + 0.5 * dh            # lane of m2, flows +dv
    y3 = rb + 1.5 * dv            # return lane of m3, flows -dh
    x4 = ca - 0.5 * dh            # lane of m4, flows -dv
    s1, s2, s3, s4 = d.messengers

    draft = _Draft()
    vdir = arch.v
    draft.belts = {
        0: BeltModel((dh, 0.0), vdir, arch.a),
        1: BeltModel((0.0, dv), vdir, arch.a),
        2: BeltModel((-dh, 0.0), vdir, arch.a),
        3: BeltModel((0.0, -dv), vdir, arch.a),
    }

    m1 = _Itinerary(s1, 0.0, (ca - ENTRY_MARGIN * dh, y1))
    t_cz1 = m1.time_passing((ca, y1), vc)
    t_x1 = m1.time_passing((x2, y1), vc)
    m1.move_to((x2 + EXIT_MARGIN * dh, y1), vc, SegmentKind.BELT_RIDE, belt=0)

    m2 = _Itinerary(s2, t_x1 - ENTRY_MARGIN * ct, (x2, y1 - ENTRY_MARGIN * dv))
    t_cz2 = m2.time_passing((x2, rb), vc)
    t_x2 = m2.time_passing((x2, y3), vc)
    m2.move_to((x2, y3 + EXIT_MARGIN * dv), vc, SegmentKind.BELT_RIDE, belt=1)

    m3 = _Itinerary(s3, t_x2 - ENTRY_MARGIN * ct, (x2 + ENTRY_MARGIN * dh, y3))
    t_x3 = m3.time_passing((x4, y3), vc)
    m3.move_to((x4 - EXIT_MARGIN * dh, y3), vc, SegmentKind.BELT_RIDE, belt=2)

    m4 = _Itinerary(s4, t_x3 - ENTRY_MARGIN * ct, (x4, y3 + ENTRY_MARGIN * dv))
    t_cz3 = m4.time_passing((x4, ra), vc)
    m4.move_to((x4, ra - EXIT_MARGIN * dv), vc, SegmentKind.BELT_RIDE, belt=3)

    for it, belt in ((m1, 0), (m2, 1), (m3, 2), (m4, 3)):
        draft.rides[it.serial] = it.segs
        draft.aux_events.append(_load_event(it, belt))

    g = d.gates
    t2, t1 = arch.t2, arch.t1
    draft.anchors = [
        _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(A,m1)"), "partner"),
        _Anchor(g[1], t1, m1.t_load + t1 / 2, m1.t - t1 / 2, "messenger"),
        _Anchor(g[2], t2, *_cross_window(arch, t2, t_x1, "SWAP(m1,m2)"), "cross"),
        _Anchor(g[3], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(m2,B)"), "partner"),
        _Anchor(g[4], t2, *_cross_window(arch, t2, t_x2, "SWAP(m2,m3)"), "cross"),
        _Anchor(g[5], t2, *_cross_window(arch, t2, t_x3, "SWAP(m3,m4)"), "cross"),
        _Anchor(g[6], t1, m4.t_load + t1 / 2, m4.t - t1 / 2, "messenger"),
        _Anchor(g[7], t2, *_pass_window(arch, 0.5, t2, t_cz3, "CZ(A,m4)"), "partner"),
    ]
    return draft


def _plan_one_way(arch: ArchitectureSpec, d: Decomposition) -> _Draft:
    ct = arch.a / arch.v
    vc = 1.0 / ct
    L = arch.L
    t2, t1 = arch.t2, arch.t1
    g = d.gates
    draft = _Draft()
    draft.belts = {0: BeltModel((1.0, 0.0), arch.v, arch.a),
                   1: BeltModel((0.0, 1.0), arch.v, arch.a)}
    s1, s2 = d.messengers

    if d.case == 1:
        (rs, cs) = g[0].operands[0].coord   # source (componentwise dominated)
        (rd, cd) = g[3].operands[1].coord
        y_h = rs - 0.5
        x_v = cd + 0.5
        m1 = _Itinerary(s1, 0.0, (cs - ENTRY_MARGIN, y_h))
        t_cz1 = m1.time_passing((cs, y_h), vc)
        t_x = m1.time_passing((x_v, y_h), vc)
        m1.move_to((L + 1.0, y_h), vc, SegmentKind.BELT_RIDE, belt=0)

        m2 = _Itinerary(s2, t_x - ENTRY_MARGIN * ct, (x_v, y_h - ENTRY_MARGIN))
        t_cz2 = m2.time_passing((x_v, float(rd)), vc)
        t_arr = m2.move_to((x_v, L + 1.0), vc, SegmentKind.BELT_RIDE, belt=1)

        draft.rides = {s1: m1.segs, s2: m2.segs}
        draft.aux_events = [_load_event(m1, 0), _load_event(m2, 1)]
        draft.hold[s2] = (t_arr, (x_v, L + 1.0))
        draft.anchors = [
            _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(S,m1)"), "partner"),
            _Anchor(g[1], t1, m1.t_load + t1 / 2, m1.t - t1 / 2, "messenger"),
            _Anchor(g[2], t2, *_cross_window(arch, t2, t_x, "SWAP(m1,m2)"), "cross"),
            _Anchor(g[3], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(m2,D)"), "partner"),
            _Anchor(g[4], arch.tr, t_arr + arch.tr / 2, math.inf, "fixed", (x_v, L + 1.0)),
            _Anchor(g[5], t1, 0.0, math.inf, "fixed", _xy((rs, cs))),
        ]
    else:
        (rp, cp) = g[0].operands[0].coord   # smaller column
        (rq, cq) = g[2].operands[0].coord
        y_h = rp - 0.5
        x_v = cq + 0.5
        m1 = _Itinerary(s1, 0.0, (cp - ENTRY_MARGIN, y_h))
        t_cz1 = m1.time_passing((cp, y_h), vc)
        t_x = m1.time_passing((x_v, y_h), vc)
        t_arr1 = m1.move_to((L + 1.0, y_h), vc, SegmentKind.BELT_RIDE, belt=0)

        # m2 passes Q first, then meets m1 at the lane crossing
        m2 = _Itinerary(s2, t_x - (y_h - (rq - ENTRY_MARGIN)) * ct,
                        (x_v, rq - ENTRY_MARGIN))
        t_cz2 = m2.time_passing((x_v, float(rq)), vc)
        t_arr2 = m2.move_to((x_v, L + 1.0), vc, SegmentKind.BELT_RIDE, belt=1)

        draft.rides = {s1: m1.segs, s2: m2.segs}
        draft.aux_events = [_load_event(m1, 0), _load_event(m2, 1)]
        draft.hold[s1] = (t_arr1, (L + 1.0, y_h))
        draft.hold[s2] = (t_arr2, (x_v, L + 1.0))
        draft.anchors = [
            _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(P,m1)"), "partner"),
            _Anchor(g[1], t1, m1.t_load + t1 / 2, m1.t - t1 / 2, "messenger"),
            _Anchor(g[2], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(Q,m2)"), "partner"),
            _Anchor(g[3], t1, m2.t_load + t1 / 2, m2.t - t1 / 2, "messenger"),
            _Anchor(g[4], t2, *_cross_window(arch, t2, t_x, "CZ(m1,m2)"), "cross"),
            _Anchor(g[5], arch.tr, t_arr1 + arch.tr / 2, math.inf, "fixed", (L + 1.0, y_h)),
            _Anchor(g[6], arch.tr, t_arr2 + arch.tr / 2, math.inf, "fixed", (x_v, L + 1.0)),
            _Anchor(g[7], t1, 0.0, math.inf, "fixed", _xy((rp, cp))),
            _Anchor(g[8], t1, 0.0, math.inf, "fixed", _xy((rq, cq))),
        ]
    return draft


def _flight_line(d: Decomposition):
    pa, pb = _xy(d.a), _xy(d.b)
    D = _dist(pa, pb)
    u = ((pb[0] - pa[0]) / D, (pb[1] - pa[1]) / D)
    n = (-u[1], u[0])
    off = (0.5 * n[0], 0.5 * n[1])
    a_off = (pa[0] + off[0], pa[1] + off[1])
    b_off = (pb[0] + off[0], pb[1] + off[1])
    return pa, pb, u, a_off, b_off, D


def _plan_throw_catch_throw(arch: ArchitectureSpec, d: Decomposition) -> _Draft:
    ct = arch.a / arch.v
    vc = 1.0 / ct
    t2, t1 = arch.t2, arch.t1
    pa, pb, u, a_off, b_off, D = _flight_line(d)
    s = d.messengers[0]

    start = (a_off[0] - ENTRY_MARGIN * u[0], a_off[1] - ENTRY_MARGIN * u[1])
    catch = (b_off[0] + ENTRY_MARGIN * u[0], b_off[1] + ENTRY_MARGIN * u[1])
    m = _Itinerary(s, 0.0, start)
    t_cz1 = m.time_passing(a_off, vc)
    t_cz2 = m.time_passing(b_off, vc)
    t_catch = m.move_to(catch, vc, SegmentKind.FREE_FLIGHT)
    t_relaunch = m.dwell(arch.t_turnaround, SegmentKind.TURNAROUND)
    t_cz3 = m.time_passing(a_off, vc)
    m.move_to(start, vc, SegmentKind.FREE_FLIGHT)

    draft = _Draft(rides={s: m.segs})
    mref = QubitRef.mess(s)
    vel = (arch.v * u[0], arch.v * u[1])
    draft.aux_events = [
        _load_event(m),
        PhysicalEvent(0.0, start, ActionKind.THROW, (mref,), velocity=vel),
        PhysicalEvent(t_catch, catch, ActionKind.CATCH, (mref,)),
        PhysicalEvent(t_relaunch, catch, ActionKind.THROW, (mref,),
                      velocity=(-vel[0], -vel[1])),
    ]
    g = d.gates
    draft.anchors = [
        _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(A,m)"), "partner"),
        _Anchor(g[1], t1, m.t_load + t1 / 2, t_catch - t1 / 2, "messenger"),
        _Anchor(g[2], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(m,B)"), "partner"),
        _Anchor(g[3], t1, t_relaunch + t1 / 2, m.t - t1 / 2, "messenger"),
        _Anchor(g[4], t2, *_pass_window(arch, 0.5, t2, t_cz3, "CZ(A,m) return"), "partner"),
    ]
    return draft


def _plan_throw_and_measure(arch: ArchitectureSpec, d: Decomposition) -> _Draft:
    ct = arch.a / arch.v
    vc = 1.0 / ct
    t2, t1 = arch.t2, arch.t1
    pa, pb, u, a_off, b_off, D = _flight_line(d)
    s = d.messengers[0]

    start = (a_off[0] - ENTRY_MARGIN * u[0], a_off[1] - ENTRY_MARGIN * u[1])
    readout = (b_off[0] + ENTRY_MARGIN * u[0], b_off[1] + ENTRY_MARGIN * u[1])
    m = _Itinerary(s, 0.0, start)
    t_cz1 = m.time_passing(a_off, vc)
    t_cz2 = m.time_passing(b_off, vc)
    t_arr = m.move_to(readout, vc, SegmentKind.FREE_FLIGHT)

    draft = _Draft(rides={s: m.segs})
    mref = QubitRef.mess(s)
    draft.aux_events = [
        _load_event(m),
        PhysicalEvent(0.0, start, ActionKind.THROW, (mref,),
                      velocity=(arch.v * u[0], arch.v * u[1])),
    ]
    draft.hold[s] = (t_arr, readout)
    g = d.gates
    draft.anchors = [
        _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(A,m)"), "partner"),
        _Anchor(g[1], t1, m.t_load + t1 / 2, t_arr - t1 / 2, "messenger"),
        _Anchor(g[2], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(m,B)"), "partner"),
        _Anchor(g[3], arch.tr, t_arr + arch.tr / 2, math.inf, "fixed", readout),
        _Anchor(g[4], t1, 0.0, math.inf, "fixed", _xy(d.a)),
    ]
    return draft


def _plan_shuttle_and_route(arch: ArchitectureSpec, d: Decomposition) -> _Draft:
    (ra, ca), (rb, cb) = d.a, d.b
    dh = 1.0 if cb >= ca else -1.0
    dv = 1.0 if rb >= ra else -1.0
    ct = arch.a / arch.v
    vc = 1.0 / ct
    t2, t1 = arch.t2, arch.t1
    s = d.messengers[0]
    mref = QubitRef.mess(s)

    x_in = ca - 0.5 * dh
    y_a = ra - 0.5 * dv
    x_b = cb + 0.5 * dh
    y_ret = rb + 1.5 * dv
    y_out = ra - 1.5 * dv

    m = _Itinerary(s, 0.0, (x_in, y_a - ENTRY_MARGIN * dv))
    routes = []
    t = m.move_to((x_in, y_a), vc, SegmentKind.BELT_RIDE, belt=0)
    routes.append((t, (x_in, y_a), 0, 1))
    m.dwell(arch.t_route, SegmentKind.ROUTING)
    t_cz1 = m.time_passing((float(ca), y_a), vc)
    t = m.move_to((x_b, y_a), vc, SegmentKind.BELT_RIDE, belt=1)
    routes.append((t, (x_b, y_a), 1, 2))
    m.dwell(arch.t_route, SegmentKind.ROUTING)
    t_cz2 = m.time_passing((x_b, float(rb)), vc)
    t = m.move_to((x_b, y_ret), vc, SegmentKind.BELT_RIDE, belt=2)
    routes.append((t, (x_b, y_ret), 2, 3))
    m.dwell(arch.t_route, SegmentKind.ROUTING)
    t = m.move_to((x_in, y_ret), vc, SegmentKind.BELT_RIDE, belt=3)
    routes.append((t, (x_in, y_ret), 3, 4))
    m.dwell(arch.t_route, SegmentKind.ROUTING)
    t_cz3 = m.time_passing((x_in, float(ra)), vc)
    t = m.move_to((x_in, y_out), vc, SegmentKind.BELT_RIDE, belt=4)
    routes.append((t, (x_in, y_out), 4, 5))
    m.dwell(arch.t_route, SegmentKind.ROUTING)
    m.move_to((x_in - ENTRY_MARGIN * dh, y_out), vc, SegmentKind.BELT_RIDE, belt=5)

    draft = _Draft(rides={s: m.segs})
    draft.aux_events = [_load_event(m, 0)]
    for t_r, pos, b_from, b_to in routes:
        draft.aux_events.append(
            PhysicalEvent(t_r, pos, ActionKind.ROUTE, (mref,),
                          duration=arch.t_route, belt=b_from, to_belt=b_to))
    g = d.gates
    draft.anchors = [
        _Anchor(g[0], t2, *_pass_window(arch, 0.5, t2, t_cz1, "CZ(A,m)"), "partner"),
        _Anchor(g[1], t1, m.t_load + t1 / 2, m.t - t1 / 2, "messenger"),
        _Anchor(g[2], t2, *_pass_window(arch, 0.5, t2, t_cz2, "CZ(m,B)"), "partner"),
        _Anchor(g[3], t1, m.t_load + t1 / 2, m.t - t1 / 2, "messenger"),
        _Anchor(g[4], t2, *_pass_window(arch, 0.5, t2, t_cz3, "CZ(A,m) return"), "partner"),
    ]
    return draft


_PLANNERS = {
    Variant.TWO_WAY_BELT: _plan_two_way,
    Variant.ONE_WAY_BELT: _plan_one_way,
    Variant.THROW_CATCH_THROW: _plan_throw_catch_throw,
    Variant.SHUTTLE_AND_ROUTE: _plan_shuttle_and_route,
    Variant.THROW_AND_MEASURE: _plan_throw_and_measure,
}


def _place_anchors(arch: ArchitectureSpec, draft: _Draft) -> None:
    """Assign firing centers: dependency order plus pairwise exclusion."""
    eps = 1e-6 * arch.t2
    last_end: dict = {}    # QubitRef -> end time of its last gate
    bit_end: dict = {}
    placed_2q: list[_Anchor] = []
    tracks: dict = {}

    def track(q):
        if q not in tracks:
            tracks[q] = _Track.for_qubit(q, draft.rides)
        return tracks[q]

    for an in draft.anchors:
        step = an.step
        center = an.lo
        for q in step.operands:
            if q in last_end:
                center = max(center, last_end[q] + an.duration / 2 + eps)
        if step.gate.reads_bit and step.bit in bit_end:
            center = max(center, bit_end[step.bit] + an.duration / 2 + eps)
        if step.gate.is_two_qubit:
            moved = True
            while moved:
                moved = False
                for other in placed_2q:
                    o0, o1 = other.center - other.duration / 2, other.center + other.duration / 2
                    c0, c1 = center - an.duration / 2, center + an.duration / 2
                    if c0 < o1 and o0 < c1:
                        lo, hi = max(c0, o0), min(c1, o1)
                        dmin = min(
                            min_distance(track(qa), track(qb), lo, hi)
                            for qa in step.operands for qb in other.step.operands)
                        if dmin < EXCLUSION_CELLS - DIST_TOL:
                            center = o1 + an.duration / 2 + eps
                            moved = True
        if center > an.hi + 1e-15:
            raise InfeasibleError(
                f"{step.gate.value} on {step.operands}: required firing time "
                f"{center:.3e}s exceeds feasible window end {an.hi:.3e}s")
        an.center = center
        for q in step.operands:
            last_end[q] = center + an.duration / 2
        if step.gate.writes_bit:
            bit_end[step.bit] = center + an.duration / 2
        if step.gate.is_two_qubit:
            placed_2q.append(an)


def plan_trajectories(arch: ArchitectureSpec, d: Decomposition) -> ScheduledProgram:
    """Plan the space-time realization of one decomposed logical gate."""
    if d.variant is None:
        raise ValueError("the neighbor-chain baseline has no transport plan")
    if d.variant is not arch.variant:
        raise ValueError(f"decomposition for {d.variant} given to {arch.variant} planner")
    draft = _PLANNERS[arch.variant](arch, d)
    _place_anchors(arch, draft)

    events = list(draft.aux_events)
    tracks = {s: _Track(segments=segs) for s, segs in draft.rides.items()}
    mess_last_gate_end: dict[int, float] = {}
    for an in draft.anchors:
        step = an.step
        t0 = an.center - an.duration / 2
        if an.pos_kind == "fixed":
            pos = an.fixed_pos
        elif an.pos_kind == "partner":
            comp = next(q for q in step.operands if not q.is_messenger)
            pos = _xy(comp.coord)
        elif an.pos_kind == "cross":
            pos = tracks[step.operands[0].serial].position(an.center)
        else:  # messenger
            pos = tracks[step.operands[0].serial].position(an.center)
        events.append(PhysicalEvent(t0, pos, ActionKind.GATE, step.operands,
                                    gate=step.gate, bit=step.bit,
                                    duration=an.duration))
        for q in step.operands:
            if q.is_messenger:
                mess_last_gate_end[q.serial] = max(
                    mess_last_gate_end.get(q.serial, 0.0), an.center + an.duration / 2)

    trajectories: dict[int, list[TrajectorySegment]] = {}
    for s, segs in draft.rides.items():
        segs = list(segs)
        if s in draft.hold:
            arr, pos = draft.hold[s]
            t_disp = max(mess_last_gate_end.get(s, arr), arr)
            if t_disp > arr:
                segs.append(TrajectorySegment(s, SegmentKind.STATIONARY, arr, t_disp, pos, pos))
            events.append(PhysicalEvent(t_disp, pos, ActionKind.DISPOSE, (QubitRef.mess(s),)))
        else:
            end = segs[-1]
            events.append(PhysicalEvent(end.t_end, end.end_pos, ActionKind.DISPOSE,
                                        (QubitRef.mess(s),)))
        trajectories[s] = segs

    t_min = min(e.t for e in events)
    if t_min != 0.0:
        events = [replace(e, t=e.t - t_min) for e in events]
        trajectories = {
            s: [replace(seg, t_start=seg.t_start - t_min, t_end=seg.t_end - t_min)
                for seg in segs]
            for s, segs in trajectories.items()}
    makespan = max(e.t_end for e in events)
    return ScheduledProgram(sort_events(events), trajectories, makespan, draft.belts)


def shift_program(prog: ScheduledProgram, delta: float) -> ScheduledProgram:
    if delta == 0.0:
        return prog
    events = [replace(e, t=e.t + delta) for e in prog.events]
    trajectories = {
        s: [replace(seg, t_start=seg.t_start + delta, t_end=seg.t_end + delta)
            for seg in segs]
        for s, segs in prog.trajectories.items()}
    return ScheduledProgram(events, trajectories, prog.makespan + delta, prog.belts)


# --- multi-gate scheduling --------------------------------------------------

def makespan_estimate(arch: ArchitectureSpec, pair) -> float:
    """Closed-form makespan: transport path length over v plus variant constants."""
    (ra, ca), (rb, cb) = pair
    dc, dr = abs(cb - ca), abs(rb - ra)
    ct = arch.a / arch.v
    L = arch.L
    v = arch.variant
    if v is Variant.TWO_WAY_BELT:
        return ct * (2 * dc + 2 * dr + 2 * ENTRY_MARGIN + 2 * EXIT_MARGIN + 1.5)
    if v is Variant.ONE_WAY_BELT:
        case = one_way_case(pair[0], pair[1])
        if case == 1:
            src, dst = (pair[0], pair[1]) if (rb >= ra and cb >= ca) else (pair[1], pair[0])
            (rs, cs), (rd, cd) = src, dst
            m1_chain = ct * (L + 1 + ENTRY_MARGIN - cs)
            m2_chain = ct * ((cd - cs + 0.5 + ENTRY_MARGIN) + (L + 1.5 - rs)) + arch.tr + arch.t1
            return max(m1_chain, m2_chain)
        p, q = (pair[0], pair[1]) if ca < cb else (pair[1], pair[0])
        (rp, cp), (rq, cq) = p, q
        t_x = ct * (cq - cp + 0.5 + ENTRY_MARGIN)
        m2_load = t_x - ct * (rp - rq + 1.5)
        m1_chain = ct * (L + 1 + ENTRY_MARGIN - cp) + arch.tr + arch.t1
        m2_chain = t_x + ct * (L + 1.5 - rp) + arch.tr + arch.t1
        return max(m1_chain, m2_chain) - min(0.0, m2_load)
    D = math.hypot(dc, dr)
    if v is Variant.THROW_CATCH_THROW:
        return ct * (2 * D + 4 * ENTRY_MARGIN) + arch.t_turnaround
    if v is Variant.THROW_AND_MEASURE:
        return ct * (D + 2 * ENTRY_MARGIN) + arch.tr + arch.t1
    if v is Variant.SHUTTLE_AND_ROUTE:
        return ct * (2 * dc + 2 * dr + 7 + 2 * ENTRY_MARGIN) + 5 * arch.t_route
    raise ValueError(f"unknown variant {v}")  # pragma: no cover


def schedule(circuit: LogicalCircuit, arch: ArchitectureSpec) -> ScheduledProgram:
    """Greedy list scheduler over the circuit's logical ops.

    Gates run concurrently when their planned events violate no pairwise
    exclusion or qubit-dependency constraint; otherwise later gates are
    delayed by the minimal feasible offset.  Deterministic in circuit order.
    """
    issues = validate(circuit)
    if issues:
        raise ValueError(f"invalid circuit: {issues[0].message}")
    eps = 1e-6 * arch.t2
    events: list[PhysicalEvent] = []
    trajectories: dict[int, list[TrajectorySegment]] = {}
    ready: dict[tuple[int, int], float] = {}
    committed_2q: list[tuple[float, float, list[_Track]]] = []
    serial = bit = 0

    for op in circuit.ops:
        if isinstance(op, Logical1Q):
            t = ready.get(op.q, 0.0)
            q = QubitRef.comp(*op.q)
            events.append(PhysicalEvent(t, _xy(op.q), ActionKind.GATE, (q,),
                                        gate=op.gate, duration=arch.t1))
            ready[op.q] = t + arch.t1 + eps
            continue
        d = decompose_cz(arch, op.a, op.b, serial_start=serial, bit_start=bit)
        serial += len(d.messengers)
        bit += d.counts.nr
        plan = plan_trajectories(arch, d)
        delta = max(ready.get(op.a, 0.0), ready.get(op.b, 0.0))
        cand = [(e.t, e.t_end, [_Track.for_qubit(q, plan.trajectories) for q in e.operands])
                for e in plan.events
                if e.action is ActionKind.GATE and e.gate.is_two_qubit]
        for _ in range(10000):
            bumped = False
            for c0, c1, ctracks in cand:
                for o0, o1, otracks in committed_2q:
                    lo, hi = max(c0 + delta, o0), min(c1 + delta, o1)
                    if lo >= hi:
                        continue
                    dmin = min(min_distance(ta, _TrackShift(tb, delta), o0, o1)
                               for ta in otracks for tb in ctracks)
                    if dmin < EXCLUSION_CELLS - DIST_TOL:
                        delta = o1 - c0 + eps
                        bumped = True
            if not bumped:
                break
        else:
            raise InfeasibleError("scheduler failed to resolve exclusion conflicts")
        plan = shift_program(plan, delta)
        events.extend(plan.events)
        trajectories.update(plan.trajectories)
        for coord in (op.a, op.b):
            q = QubitRef.comp(*coord)
            ends = [e.t_end for e in plan.events if q in e.operands]
            if ends:
                ready[coord] = max(ends) + eps
        committed_2q.extend(
            (e.t, e.t_end, [_Track.for_qubit(q, plan.trajectories) for q in e.operands])
            for e in plan.events
            if e.action is ActionKind.GATE and e.gate.is_two_qubit)

    makespan = max((e.t_end for e in events), default=0.0)
    return ScheduledProgram(sort_events(events), trajectories, makespan)


class _TrackShift(_Track):
    """View of a track with all times offset by a constant."""

    def __init__(self, base: _Track, delta: float):
        self.base = base
        self.delta = delta
        self.static = base.static
        self.segments = base.segments

    def breakpoints(self, t0, t1):
        return [t + self.delta for t in self.base.breakpoints(t0 - self.delta, t1 - self.delta)]

    def position(self, t):
        return self.base.position(t - self.delta)


# --- conflict checking ------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str     # "blockade" | "exclusion" | "lifecycle"
    events: tuple[int, ...]
    distance: float | None
    times: tuple[float, ...]
    message: str


def check_conflicts(program: ScheduledProgram, arch: ArchitectureSpec) -> list[Violation]:
    """Independent re-validation of all ScheduledProgram invariants."""
    violations: list[Violation] = []
    R_c = arch.R / arch.a
    tracks: dict = {}

    def track(q):
        if q not in tracks:
            tracks[q] = _Track.for_qubit(q, program.trajectories)
        return tracks[q]

    gates_2q = []
    for i, e in enumerate(program.events):
        if e.action is ActionKind.GATE and e.gate is not None and e.gate.is_two_qubit:
            gates_2q.append((i, e))
            if any(q.is_messenger for q in e.operands):
                dmax = max_distance(track(e.operands[0]), track(e.operands[1]),
                                    e.t, e.t_end)
                if dmax > R_c + DIST_TOL:
                    violations.append(Violation(
                        "blockade", (i,), dmax, (e.t, e.t_end),
                        f"event {i}: partner at distance {dmax:.4f} cells > R={R_c:.4f} "
                        f"during {e.gate.value}"))

    gates_2q.sort(key=lambda ie: ie[1].t)
    active: list[tuple[int, PhysicalEvent]] = []
    for i, e in gates_2q:
        active = [(j, o) for j, o in active if o.t_end > e.t]
        for j, o in active:
            lo, hi = max(e.t, o.t), min(e.t_end, o.t_end)
            if lo >= hi - 1e-18:
                continue
            dmin = min(min_distance(track(qa), track(qb), lo, hi)
                       for qa in e.operands for qb in o.operands)
            if dmin < EXCLUSION_CELLS - DIST_TOL:
                violations.append(Violation(
                    "exclusion", (j, i), dmin, (lo, hi),
                    f"events {j} and {i} overlap in time with atoms "
                    f"{dmin:.4f} cells apart (< {EXCLUSION_CELLS})"))
        active.append((i, e))

    seen_load: dict[int, int] = {}
    seen_dispose: dict[int, int] = {}
    for i, e in enumerate(program.events):
        for q in e.operands:
            if not q.is_messenger:
                continue
            s = q.serial
            if s in seen_dispose:
                violations.append(Violation(
                    "lifecycle", (seen_dispose[s], i), None, (e.t,),
                    f"messenger {s} used at event {i} after disposal"))
            if e.action is ActionKind.LOAD:
                if s in seen_load:
                    violations.append(Violation(
                        "lifecycle", (seen_load[s], i), None, (e.t,),
                        f"messenger {s} loaded twice"))
                seen_load[s] = i
            elif e.action is ActionKind.DISPOSE:
                seen_dispose[s] = i
    for s, i in seen_load.items():
        if s not in seen_dispose:
            violations.append(Violation(
                "lifecycle", (i,), None, (), f"messenger {s} loaded but never disposed"))
    for s, i in seen_dispose.items():
        if s not in seen_load:
            violations.append(Violation(
                "lifecycle", (i,), None, (), f"messenger {s} disposed but never loaded"))
    return violations


def trajectories_to_csv(trajectories: dict[int, list[TrajectorySegment]]) -> str:
    lines = ["messenger,t_start,t_end,x0,y0,x1,y1,kind"]
    for s in sorted(trajectories):
        for seg in trajectories[s]:
            lines.append(
                f"{s},{seg.t_start!r},{seg.t_end!r},{seg.start_pos[0]!r},"
                f"{seg.start_pos[1]!r},{seg.end_pos[0]!r},{seg.end_pos[1]!r},{seg.kind.value}")
    return "\n".join(lines) + "\n"
