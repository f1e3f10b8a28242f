"""Regenerates golden_splits.json without touching the Rust code.

Usage: python3 gen_golden_splits.py > golden_splits.json
"""
import json

MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = seed & MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def shuffle(self, items):
        for i in range(len(items) - 1, 0, -1):
            j = self.next() % (i + 1)
            items[i], items[j] = items[j], items[i]


# C3-shaped manifest: 16 submits x 20 pairs x 2 clips, in synth order
records = [
    (f"c3-s{s:02}-p{p:02}-{c}", f"p{p:02}", f"c3-s{s:02}")
    for s in range(1, 17)
    for p in range(1, 21)
    for c in range(2)
]

protocols = {"facial-id": (1, 4), "submit-id": (2, 3)}
out = {"splitmix64_seed0": [str(v) for v in (lambda r: [r.next() for _ in range(5)])(SplitMix64(0))]}
for name, (col, n_out) in protocols.items():
    labels = sorted({r[col] for r in records})
    rows = []
    for seed in range(100):
        shuffled = list(labels)
        SplitMix64(seed).shuffle(shuffled)
        held = sorted(shuffled[:n_out])
        test = [r[0] for r in records if r[col] in held]
        row = {"seed": seed, "held_out": held, "n_test": len(test)}
        if seed < 3:
            row["test_ids"] = test
        rows.append(row)
    out[name] = rows
print(json.dumps(out, indent=1))
