#!/usr/bin/env python3
"""Generate the bundled SNAP-format temporal fixture used by the smoke tests.

The process mimics a Q&A site: users join over time, and each interaction
links a (mostly recent) user to an existing user picked preferentially by
how often they have already been answered. Original ids are sparse so that
loading exercises id compaction.
"""

import argparse

import numpy as np


def generate(lines: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    user_ids = np.sort(rng.choice(10**6, size=lines, replace=False))
    joined = 2
    popularity = [1.0, 1.0]
    t = 1254192988
    records = []
    for _ in range(lines):
        if rng.random() < 0.12 or joined < 10:
            joined += 1
            popularity.append(1.0)
            src = joined - 1
        else:
            src = int(min(joined - 1, joined - 1 - rng.geometric(0.01) + 1))
        weights = np.asarray(popularity)
        dst = int(rng.choice(joined, p=weights / weights.sum()))
        if dst == src and rng.random() < 0.7:
            dst = int(rng.integers(0, joined))
        popularity[dst] += 1.0
        t += int(rng.integers(1, 600))
        records.append((int(user_ids[src]), int(user_ids[dst]), t))
    return records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--lines", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=20240)
    args = ap.parse_args()
    with open(args.out, "w", encoding="utf-8") as fh:
        for u, v, ts in generate(args.lines, args.seed):
            fh.write(f"{u} {v} {ts}\n")


if __name__ == "__main__":
    main()
