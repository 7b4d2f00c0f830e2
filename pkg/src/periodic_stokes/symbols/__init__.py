from periodic_stokes.symbols.audit import (
    AuditReport,
    audit_profile_symbol,
    default_profile_samples,
    marcinkiewicz_audit,
    refinement_change,
)
from periodic_stokes.symbols.modes import BumpSpec, ModePoint, ParabolicScale, principal_root
from periodic_stokes.symbols.multipliers import symbol_heat_profile, symbol_M, symbol_M1, symbol_M2
from periodic_stokes.symbols.partition import partition_phi, shell_range, shell_weight
from periodic_stokes.symbols.pressure import q0_symbol, q1_q2_split, q_split_kernel

__all__ = [
    "AuditReport",
    "BumpSpec",
    "ModePoint",
    "ParabolicScale",
    "audit_profile_symbol",
    "default_profile_samples",
    "marcinkiewicz_audit",
    "partition_phi",
    "principal_root",
    "q0_symbol",
    "q1_q2_split",
    "q_split_kernel",
    "refinement_change",
    "shell_range",
    "shell_weight",
    "symbol_M",
    "symbol_M1",
    "symbol_M2",
    "symbol_heat_profile",
]
