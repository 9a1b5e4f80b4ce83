"""Byzantine-resilient, communication-compressed gradient aggregation with
Vandermonde block codes."""

from .adversary import AttackKind, AttackSpec, inject
from .codec import (
    MechanismConfig,
    build_allocation,
    encode_all,
    encode_worker,
    make_weights,
    validate_config,
    vandermonde,
)
from .decoder import DecodeReport, block_decode, decode, locate_adversaries, probe

__all__ = [
    "AttackKind",
    "AttackSpec",
    "DecodeReport",
    "MechanismConfig",
    "block_decode",
    "build_allocation",
    "decode",
    "encode_all",
    "encode_worker",
    "inject",
    "locate_adversaries",
    "make_weights",
    "probe",
    "validate_config",
    "vandermonde",
]
