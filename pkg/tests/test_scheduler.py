import math
from dataclasses import replace

import pytest

from atomshuttle.architectures import ArchitectureSpec, Variant, decompose_cz
from atomshuttle.ir import (ActionKind, GateKind, LogicalCZ, Logical1Q,
                            LogicalCircuit, classical_bits, gate_steps)
from atomshuttle.oracle import verify_sequence
from atomshuttle.scheduler import (InfeasibleError, SegmentKind, _Track,
                                   check_conflicts, makespan_estimate,
                                   max_distance, min_distance,
                                   plan_trajectories, schedule, shift_program,
                                   trajectories_to_csv)

PAIRS = [((0, 0), (3, 3)), ((0, 0), (0, 5)), ((2, 1), (6, 1)),
         ((0, 5), (5, 0)), ((1, 2), (2, 1)), ((0, 0), (7, 7)),
         ((3, 3), (2, 2))]


def arch_for(variant, L=8, **kw):
    return ArchitectureSpec(variant, L, **kw)


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("pair", PAIRS)
def test_single_gate_plans_are_conflict_free(variant, pair):
    arch = arch_for(variant)
    d = decompose_cz(arch, *pair)
    prog = plan_trajectories(arch, d)
    assert check_conflicts(prog, arch) == []


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("pair", PAIRS)
def test_makespan_estimate_tracks_planner(variant, pair):
    arch = arch_for(variant)
    prog = plan_trajectories(arch, decompose_cz(arch, *pair))
    est = makespan_estimate(arch, pair)
    assert est == pytest.approx(prog.makespan, rel=0.25)


@pytest.mark.parametrize("variant", list(Variant))
def test_planned_gate_order_matches_protocol_dependencies(variant):
    arch = arch_for(variant)
    d = decompose_cz(arch, (1, 1), (6, 4))
    prog = plan_trajectories(arch, d)
    steps = gate_steps(prog.events)
    # same multiset of gates, and dependent gates keep their order
    assert sorted(s.gate.value for s in steps) == \
        sorted(g.gate.value for g in d.gates)
    assert classical_bits(prog.events).violations == ()
    # per-qubit gate order must match the protocol (global order may differ
    # for commuting gates on disjoint qubits)
    qubits = {q for g in d.gates for q in g.operands}
    for q in qubits:
        planned = [(s.gate, s.operands, s.bit) for s in steps if q in s.operands]
        protocol = [(g.gate, g.operands, g.bit) for g in d.gates if q in g.operands]
        assert planned == protocol


@pytest.mark.parametrize("variant", list(Variant))
def test_planned_sequence_still_verifies(variant):
    # the planner must not reorder gates in a way the oracle rejects
    arch = arch_for(variant)
    d = decompose_cz(arch, (0, 2), (5, 6))
    prog = plan_trajectories(arch, d)
    report = verify_sequence(gate_steps(prog.events), (0, 2), (5, 6),
                             list(d.messengers))
    assert report.ok


def test_gates_fire_inside_blockade_radius():
    arch = arch_for(Variant.TWO_WAY_BELT)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (7, 7)))
    R_c = arch.R / arch.a
    for e in prog.events:
        if e.action is ActionKind.GATE and e.gate.is_two_qubit:
            ta = _Track.for_qubit(e.operands[0], prog.trajectories)
            tb = _Track.for_qubit(e.operands[1], prog.trajectories)
            assert max_distance(ta, tb, e.t, e.t_end) <= R_c + 1e-9


def test_every_messenger_loaded_once_and_disposed_once():
    for variant in Variant:
        arch = arch_for(variant)
        prog = plan_trajectories(arch, decompose_cz(arch, (0, 5), (5, 0)))
        loads = [e for e in prog.events if e.action is ActionKind.LOAD]
        disposes = [e for e in prog.events if e.action is ActionKind.DISPOSE]
        serials = sorted(e.operands[0].serial for e in loads)
        assert serials == sorted(e.operands[0].serial for e in disposes)
        assert len(serials) == len(set(serials))


def test_marginal_lane_gap_is_reported_infeasible():
    # same-row targets at the speed limit: the crossing-to-gate gap is
    # shorter than one gate time, so the plan must be rejected, not fudged
    arch = arch_for(Variant.TWO_WAY_BELT, v=3.0)
    with pytest.raises(InfeasibleError) as exc:
        plan_trajectories(arch, decompose_cz(arch, (0, 0), (0, 5)))
    assert "window" in str(exc.value) or "exceeds" in str(exc.value)


def test_shuttle_and_route_emits_five_route_events():
    arch = arch_for(Variant.SHUTTLE_AND_ROUTE)
    prog = plan_trajectories(arch, decompose_cz(arch, (2, 2), (5, 6)))
    routes = [e for e in prog.events if e.action is ActionKind.ROUTE]
    assert len(routes) == 5
    assert all(e.duration == arch.t_route for e in routes)


def test_throw_catch_throw_event_shape():
    arch = arch_for(Variant.THROW_CATCH_THROW)
    prog = plan_trajectories(arch, decompose_cz(arch, (1, 1), (5, 5)))
    throws = [e for e in prog.events if e.action is ActionKind.THROW]
    catches = [e for e in prog.events if e.action is ActionKind.CATCH]
    assert len(throws) == 2 and len(catches) == 1
    kinds = {s.kind for s in prog.trajectories[prog.events[0].operands[0].serial]}
    assert SegmentKind.TURNAROUND in kinds


def test_measured_messengers_hold_at_readout():
    arch = arch_for(Variant.THROW_AND_MEASURE)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (4, 4)))
    mx = next(e for e in prog.events
              if e.action is ActionKind.GATE and e.gate is GateKind.MEASURE_X)
    dispose = next(e for e in prog.events if e.action is ActionKind.DISPOSE)
    assert dispose.t >= mx.t_end - 1e-12
    assert dispose.pos == mx.pos


def test_normalization_starts_at_zero():
    for variant in Variant:
        arch = arch_for(variant)
        prog = plan_trajectories(arch, decompose_cz(arch, (0, 3), (3, 0)))
        assert min(e.t for e in prog.events) == 0.0
        assert prog.makespan == max(e.t_end for e in prog.events)


def test_shift_program_translates_everything():
    arch = arch_for(Variant.TWO_WAY_BELT)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (3, 3)))
    shifted = shift_program(prog, 1e-3)
    assert shifted.makespan == pytest.approx(prog.makespan + 1e-3)
    for e0, e1 in zip(prog.events, shifted.events):
        assert e1.t == pytest.approx(e0.t + 1e-3)


def test_min_max_distance_exact_on_crossing():
    # two messengers crossing orthogonally at the origin
    from atomshuttle.scheduler import TrajectorySegment
    sa = [TrajectorySegment(0, SegmentKind.BELT_RIDE, 0.0, 2.0, (-1.0, 0.0), (1.0, 0.0))]
    sb = [TrajectorySegment(1, SegmentKind.BELT_RIDE, 0.0, 2.0, (0.0, -1.0), (0.0, 1.0))]
    ta, tb = _Track(segments=sa), _Track(segments=sb)
    assert min_distance(ta, tb, 0.0, 2.0) == pytest.approx(0.0, abs=1e-12)
    assert max_distance(ta, tb, 0.0, 2.0) == pytest.approx(math.sqrt(2))
    # restricted to the first half the closest approach is at t=1 boundary
    assert min_distance(ta, tb, 0.0, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_check_conflicts_flags_injected_exclusion_violation():
    arch = arch_for(Variant.THROW_AND_MEASURE)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (4, 4)))
    d2 = decompose_cz(arch, (0, 1), (4, 5), serial_start=10, bit_start=10)
    prog2 = plan_trajectories(arch, d2)  # one cell away, same timing
    merged_events = sorted(prog.events + prog2.events,
                           key=lambda e: e.sort_key())
    merged_traj = {**prog.trajectories, **prog2.trajectories}
    from atomshuttle.scheduler import ScheduledProgram
    merged = ScheduledProgram(merged_events, merged_traj,
                              max(prog.makespan, prog2.makespan))
    violations = check_conflicts(merged, arch)
    assert any(v.kind == "exclusion" for v in violations)


def test_check_conflicts_flags_use_after_dispose():
    arch = arch_for(Variant.THROW_AND_MEASURE)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (4, 4)))
    events = list(prog.events)
    dispose = next(e for e in events if e.action is ActionKind.DISPOSE)
    events.append(replace(dispose, t=dispose.t + 1.0, action=ActionKind.GATE,
                          gate=GateKind.H, duration=arch.t1))
    bad = replace(prog, events=events)
    assert any(v.kind == "lifecycle" for v in check_conflicts(bad, arch))


def test_schedule_serializes_gates_sharing_a_qubit():
    arch = arch_for(Variant.THROW_CATCH_THROW)
    circ = LogicalCircuit(8, (LogicalCZ((0, 0), (3, 3)),
                              LogicalCZ((0, 0), (5, 1))))
    prog = schedule(circ, arch)
    assert check_conflicts(prog, arch) == []
    shared = [e for e in prog.events
              if e.action is ActionKind.GATE
              and any(not q.is_messenger and q.coord == (0, 0) for q in e.operands)]
    shared.sort(key=lambda e: e.t)
    for e0, e1 in zip(shared, shared[1:]):
        assert e1.t >= e0.t_end


def test_schedule_keeps_disjoint_gates_parallel():
    arch = arch_for(Variant.THROW_AND_MEASURE)
    circ = LogicalCircuit(8, (LogicalCZ((0, 0), (2, 2)),
                              LogicalCZ((5, 5), (7, 7))))
    prog = schedule(circ, arch)
    assert check_conflicts(prog, arch) == []
    # far-apart gates should not be serialized
    assert prog.makespan < 1.9 * makespan_estimate(arch, ((0, 0), (2, 2)))


def test_schedule_handles_single_qubit_ops():
    arch = arch_for(Variant.TWO_WAY_BELT)
    circ = LogicalCircuit(8, (Logical1Q(GateKind.H, (0, 0)),
                              LogicalCZ((0, 0), (4, 4)),
                              Logical1Q(GateKind.Z, (0, 0))))
    prog = schedule(circ, arch)
    assert check_conflicts(prog, arch) == []
    gates_on_a = [e for e in prog.events
                  if e.action is ActionKind.GATE
                  and any(not q.is_messenger and q.coord == (0, 0)
                          for q in e.operands)]
    gates_on_a.sort(key=lambda e: e.t)
    assert gates_on_a[0].gate is GateKind.H
    assert gates_on_a[-1].gate is GateKind.Z


def test_schedule_rejects_invalid_circuit():
    arch = arch_for(Variant.TWO_WAY_BELT)
    with pytest.raises(ValueError):
        schedule(LogicalCircuit(8, (LogicalCZ((0, 0), (9, 9)),)), arch)


def test_trajectory_csv_shape():
    arch = arch_for(Variant.ONE_WAY_BELT)
    prog = plan_trajectories(arch, decompose_cz(arch, (0, 0), (5, 5)))
    csv = trajectories_to_csv(prog.trajectories)
    lines = csv.strip().splitlines()
    assert lines[0] == "messenger,t_start,t_end,x0,y0,x1,y1,kind"
    assert len(lines) == 1 + sum(len(s) for s in prog.trajectories.values())
