import random

import pytest
from hypothesis import given, settings, strategies as st

from ldit.errors import CorruptChain
from ldit.ledger import (
    HEADER,
    ZERO_HASH,
    Ledger,
    append_block,
    canonical_json,
    canonical_payload,
    read_history,
    verify_bytes,
    verify_chain,
)
from ldit.scoring import ScoreCard

FP = {"k": 60, "seed": 42}


def cards(n=3, shift=0.0):
    return [ScoreCard(i, f"OBJ {i}", 0.1 + shift, 0.2, 0.3, 0.2 + shift / 3) for i in range(1, n + 1)]


def build(path, n, t0=1_700_000_000):
    for i in range(n):
        append_block(path, cards(2, i / 1000), FP, timestamp=t0 + i)
    return path


def block_offsets(data):
    import struct

    pos, out = len(HEADER), []
    while pos < len(data):
        (length,) = struct.unpack_from("<I", data, pos)
        out.append((pos, pos + 4 + length))
        pos += 4 + length
    return out


def test_genesis_block(tmp_path):
    b = append_block(tmp_path / "l", cards(), FP, timestamp=10)
    assert b.index == 0 and b.prev_hash == ZERO_HASH


def test_identical_payloads_distinct_hashes(tmp_path):
    p = tmp_path / "l"
    a = append_block(p, cards(), FP, timestamp=10)
    b = append_block(p, cards(), FP, timestamp=11)
    assert a.payload_hash == b.payload_hash
    assert a.block_hash != b.block_hash and b.prev_hash == a.block_hash


def test_canonical_payload_round_trip(tmp_path):
    p = tmp_path / "l"
    b = append_block(p, cards(), FP, timestamp=1)
    assert canonical_json(b.decoded()) == b.payload
    assert canonical_payload(list(reversed(cards())), dict(reversed(list(FP.items())))) == b.payload


def test_empty_ledger_is_valid(tmp_path):
    assert verify_chain(tmp_path / "missing").valid
    (tmp_path / "empty").write_bytes(b"")
    r = verify_chain(tmp_path / "empty")
    assert r.valid and r.n_blocks == 0 and "empty" in str(r)


def test_hundred_blocks_valid(tmp_path):
    p = build(tmp_path / "l", 100)
    r = verify_chain(p)
    assert r.valid and r.n_blocks == 100 and len(Ledger(p)) == 100


def test_payload_flip_in_block_3_of_5(tmp_path):
    p = build(tmp_path / "l", 5)
    data = bytearray(p.read_bytes())
    start, end = block_offsets(bytes(data))[3]
    data[start + 4 + 80 + 5] ^= 0x01
    r = verify_bytes(bytes(data))
    assert not r.valid and r.first_bad_index == 3


def test_every_single_byte_mutation_detected(tmp_path):
    p = build(tmp_path / "l", 6)
    data = p.read_bytes()
    offsets = block_offsets(data)
    rnd = random.Random(0)
    for pos in range(len(data)):
        mutated = bytearray(data)
        mutated[pos] ^= rnd.randrange(1, 256)
        r = verify_bytes(bytes(mutated))
        assert not r.valid
        owner = next((i for i, (a, b) in enumerate(offsets) if a <= pos < b), 0)
        assert r.first_bad_index <= owner


def test_truncation_detected(tmp_path):
    p = build(tmp_path / "l", 3)
    data = p.read_bytes()
    for cut in (len(data) - 1, len(data) - 40, 5):
        assert not verify_bytes(data[:cut]).valid


def test_refuses_to_extend_corrupt_chain(tmp_path):
    p = build(tmp_path / "l", 2)
    data = bytearray(p.read_bytes())
    data[-1] ^= 0xFF
    p.write_bytes(bytes(data))
    with pytest.raises(CorruptChain):
        append_block(p, cards(), FP)
    with pytest.raises(CorruptChain):
        Ledger(p).blocks()


def test_timestamps_do_not_go_backwards(tmp_path):
    p = tmp_path / "l"
    append_block(p, cards(), FP, timestamp=100)
    with pytest.raises(ValueError):
        append_block(p, cards(), FP, timestamp=99)
    b = append_block(p, cards(), FP)
    assert b.timestamp >= 100


def test_history(tmp_path):
    p = tmp_path / "l"
    assert read_history(p, 1) == []
    append_block(p, cards(2), FP, timestamp=5)
    append_block(p, cards(3, 0.1), FP, timestamp=6)
    h = read_history(p, 1)
    assert [t for t, _ in h] == [5, 6]
    assert h[1][1].s_d == pytest.approx(0.2)
    assert [t for t, _ in read_history(p, 3)] == [6]
    assert read_history(p, 99) == []


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 10 ** 6), st.text(max_size=12),
                          st.one_of(st.none(), st.floats(0, 1, allow_nan=False))), max_size=8))
def test_payload_serialisation_is_canonical(rows):
    cs = [ScoreCard(n, name, v, v, v, v) for n, name, v in rows]
    payload = canonical_payload(cs, FP)
    import json

    assert canonical_json(json.loads(payload)) == payload
