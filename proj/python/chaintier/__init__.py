"""Hierarchical blockchain storage simulator for industrial IoT."""

from ._core import (
    ChaintierError,
    block_size,
    decode_transaction,
    derive_keypair,
    elect_leader,
    hash_digest,
    make_transaction,
    merkle_root,
    preset_names,
    quorum_size,
    run_preset,
    sha256,
    sign,
    transaction_size,
    transfer_duration_s,
    verify,
    verify_segment,
    volume_projection,
)

__all__ = [
    "ChaintierError",
    "block_size",
    "decode_transaction",
    "derive_keypair",
    "elect_leader",
    "hash_digest",
    "make_transaction",
    "merkle_root",
    "preset_names",
    "quorum_size",
    "run_preset",
    "sha256",
    "sign",
    "transaction_size",
    "transfer_duration_s",
    "verify",
    "verify_segment",
    "volume_projection",
]

__version__ = "0.1.0"
