"""Compiler, verifier, scheduler and cost model for messenger-qubit
atom-array architectures."""

__version__ = "0.1.0"

from .architectures import (ArchitectureSpec, Decomposition, GateCounts,
                            Variant, decompose_cz, gate_counts,
                            load_arch_config, neighbor_chain_decompose,
                            one_way_case)
from .cost import (CostParams, FidelityReport, architecture_comparison,
                   error_budget_sweep, load_cost_config,
                   logical_gate_fidelity, neighbor_chain_fidelity)
from .ir import (GateKind, GateStep, LogicalCircuit, LogicalCZ, Logical1Q,
                 ParseError, PhysicalEvent, QubitRef, parse_program,
                 render_program)
from .oracle import (VerificationReport, branch_execute, verify_logical_cz,
                     verify_sequence)
from .scheduler import (InfeasibleError, ScheduledProgram, TrajectorySegment,
                        check_conflicts, makespan_estimate, plan_trajectories,
                        schedule)

__all__ = [
    "ArchitectureSpec", "CostParams", "Decomposition", "FidelityReport",
    "GateCounts", "GateKind", "GateStep", "InfeasibleError", "Logical1Q",
    "LogicalCZ", "LogicalCircuit", "ParseError", "PhysicalEvent", "QubitRef",
    "ScheduledProgram", "TrajectorySegment", "VerificationReport", "Variant",
    "architecture_comparison", "branch_execute", "check_conflicts",
    "decompose_cz", "error_budget_sweep", "gate_counts", "load_arch_config",
    "load_cost_config", "logical_gate_fidelity", "makespan_estimate",
    "neighbor_chain_decompose", "neighbor_chain_fidelity", "one_way_case",
    "parse_program", "plan_trajectories", "render_program", "schedule",
    "verify_logical_cz", "verify_sequence",
]
