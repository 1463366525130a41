"""Append-only, hash-chained score ledger.

File layout (all integers little-endian)::

    b"LDIT" | version u16
    repeated:
      length u32            bytes that follow, up to and including block_hash
      index u64
      prev_hash 32B         block_hash of the previous block, zeros for genesis
      payload_hash 32B      sha256(payload)
      timestamp i64         unix seconds
      payload               canonical JSON
      block_hash 32B        sha256(index u64 | prev_hash | payload_hash | timestamp i64)

Each record stores its own hash so that the newest block is covered as well
as every linked predecessor.
"""
from __future__ import annotations

import hashlib
import json
import os
import struct
import time
from dataclasses import dataclass
from typing import Optional

from .errors import CorruptChain
from .scoring import ScoreCard

MAGIC = b"LDIT"
VERSION = 1
HEADER = MAGIC + struct.pack("<H", VERSION)
ZERO_HASH = bytes(32)
_FIXED = struct.Struct("<Q32s32sq")
_MIN_RECORD = _FIXED.size + 32


def digest(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False).encode("utf-8")


def canonical_payload(scorecards, config_fingerprint: dict) -> bytes:
    return canonical_json({
        "config": config_fingerprint,
        "scorecards": [c.to_dict() for c in sorted(scorecards, key=lambda c: c.norad_id)],
    })


@dataclass(frozen=True)
class ScoreBlock:
    index: int
    prev_hash: bytes
    payload_hash: bytes
    timestamp: int
    payload: bytes

    @property
    def preimage(self) -> bytes:
        return _FIXED.pack(self.index, self.prev_hash, self.payload_hash, self.timestamp)

    @property
    def block_hash(self) -> bytes:
        return digest(self.preimage)

    def to_bytes(self) -> bytes:
        body = self.preimage + self.payload + self.block_hash
        return struct.pack("<I", len(body)) + body

    def decoded(self) -> dict:
        return json.loads(self.payload.decode("utf-8"))

    def scorecards(self) -> list:
        return [ScoreCard.from_dict(d) for d in self.decoded()["scorecards"]]


@dataclass
class VerificationReport:
    valid: bool
    n_blocks: int
    first_bad_index: Optional[int] = None
    reason: str = ""

    def __str__(self):
        if self.valid:
            return "empty ledger: valid" if self.n_blocks == 0 else f"valid: {self.n_blocks} blocks"
        return f"INVALID at block {self.first_bad_index}: {self.reason}"


def _scan(data: bytes):
    """Parse and check a ledger image; returns (blocks, report)."""
    blocks = []
    if not data:
        return blocks, VerificationReport(True, 0)
    if len(data) < len(HEADER) or data[:4] != MAGIC:
        return blocks, VerificationReport(False, 0, 0, "bad magic")
    if struct.unpack_from("<H", data, 4)[0] != VERSION:
        return blocks, VerificationReport(False, 0, 0, "unsupported version")
    pos = len(HEADER)
    prev = ZERO_HASH
    i = 0
    while pos < len(data):
        if pos + 4 > len(data):
            return blocks, VerificationReport(False, i, i, "truncated length prefix")
        (length,) = struct.unpack_from("<I", data, pos)
        if length < _MIN_RECORD or pos + 4 + length > len(data):
            return blocks, VerificationReport(False, i, i, "bad record length")
        body = data[pos + 4: pos + 4 + length]
        index, prev_hash, payload_hash, ts = _FIXED.unpack_from(body, 0)
        block = ScoreBlock(index, prev_hash, payload_hash, ts, body[_FIXED.size:-32])
        if index != i:
            return blocks, VerificationReport(False, i, i, f"index field {index} != position {i}")
        if prev_hash != prev:
            return blocks, VerificationReport(False, i, i, "prev_hash does not match previous block")
        if digest(block.payload) != payload_hash:
            return blocks, VerificationReport(False, i, i, "payload hash mismatch")
        if body[-32:] != block.block_hash:
            return blocks, VerificationReport(False, i, i, "block hash mismatch")
        blocks.append(block)
        prev = block.block_hash
        pos += 4 + length
        i += 1
    return blocks, VerificationReport(True, i)


class Ledger:
    """A ledger file; single writer, any number of readers."""

    def __init__(self, path):
        self.path = os.fspath(path)

    def read_bytes(self) -> bytes:
        try:
            with open(self.path, "rb") as fh:
                return fh.read()
        except FileNotFoundError:
            return b""

    def blocks(self) -> list:
        blocks, report = _scan(self.read_bytes())
        if not report.valid:
            raise CorruptChain(str(report))
        return blocks

    def __len__(self):
        return len(self.blocks())


def _ledger(ledger) -> Ledger:
    return ledger if isinstance(ledger, Ledger) else Ledger(ledger)


def verify_bytes(data: bytes) -> VerificationReport:
    return _scan(data)[1]


def verify_chain(ledger) -> VerificationReport:
    return verify_bytes(_ledger(ledger).read_bytes())


def append_block(ledger, scorecards, config_fingerprint: dict, timestamp: Optional[int] = None) -> ScoreBlock:
    """Append one block of score cards; refuses to extend a broken chain."""
    ledger = _ledger(ledger)
    data = ledger.read_bytes()
    blocks, report = _scan(data)
    if not report.valid:
        raise CorruptChain(f"refusing to append: {report}")
    prev = blocks[-1] if blocks else None
    if timestamp is None:
        timestamp = int(time.time())
        if prev is not None:
            timestamp = max(timestamp, prev.timestamp)
    elif prev is not None and timestamp < prev.timestamp:
        raise ValueError("timestamps must not go backwards")
    payload = canonical_payload(scorecards, config_fingerprint)
    block = ScoreBlock(
        index=len(blocks),
        prev_hash=prev.block_hash if prev else ZERO_HASH,
        payload_hash=digest(payload),
        timestamp=int(timestamp),
        payload=payload,
    )
    with open(ledger.path, "ab") as fh:
        if not data:
            fh.write(HEADER)
        fh.write(block.to_bytes())
        fh.flush()
        os.fsync(fh.fileno())
    return block


def read_history(ledger, norad_id: int) -> list:
    """(timestamp, ScoreCard) for one object across all blocks, oldest first."""
    out = []
    for block in _ledger(ledger).blocks():
        for card in block.scorecards():
            if card.norad_id == norad_id:
                out.append((block.timestamp, card))
    return out
