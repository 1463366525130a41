"""Hash-chained score history and what tampering looks like."""
import os
import tempfile

from ldit.ledger import append_block, read_history, verify_chain
from ldit.scoring import ScoreCard, combine_dit

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "scores.ldit")
    for day, s_t in enumerate((0.41, 0.44, 0.52)):
        card = ScoreCard(25544, "ISS (ZARYA)", 0.9, 0.6, s_t, combine_dit(0.9, 0.6, s_t))
        block = append_block(path, [card], {"seed": 42}, timestamp=1_709_251_200 + 86400 * day)
        print(f"block {block.index}: {block.block_hash.hex()[:16]}...")
    print(verify_chain(path))
    for ts, card in read_history(path, 25544):
        print(f"  t={ts}  S_DIT {card.s_dit:.6f}")

    data = bytearray(open(path, "rb").read())
    data[len(data) // 2] ^= 0x01
    with open(path, "wb") as fh:
        fh.write(data)
    print("after flipping one bit:", verify_chain(path))
