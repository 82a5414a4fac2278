#!/usr/bin/env python3
"""Benchmark the generation pipeline across worker counts.

Times repeated full runs over one synthetic room and checks that the
manifest bytes do not depend on the worker count.
"""

import argparse
import json
import time
from dataclasses import replace

from mvrep.pipeline import PipelineConfig, generate_multiview
from mvrep.synthetic import synthetic_room


def manifest_key(manifest) -> str:
    return json.dumps(manifest.to_dict(), sort_keys=True)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=1_000_000)
    parser.add_argument("--size", type=float, nargs=3, default=(8.0, 6.0, 3.0),
                        metavar=("SX", "SY", "SZ"))
    parser.add_argument("--seed", type=int, default=5)
    parser.add_argument("--jobs", type=int, nargs="+", default=(1, 2, 4, 8))
    parser.add_argument("--repeats", type=int, default=1)
    args = parser.parse_args()

    room = synthetic_room(args.points, size=tuple(args.size), seed=args.seed)
    base = PipelineConfig(seed=args.seed)
    print(f"room: {len(room)} points, threshold {base.min_points}")

    reference = None
    baseline = None
    for jobs in args.jobs:
        config = replace(base, jobs=jobs)
        best = float("inf")
        for _ in range(args.repeats):
            start = time.perf_counter()
            partials, manifest = generate_multiview(room, config)
            best = min(best, time.perf_counter() - start)
        key = manifest_key(manifest)
        if reference is None:
            reference = key
            baseline = best
        agree = "ok" if key == reference else "MISMATCH"
        print(
            f"jobs {jobs:2d}: {best:7.2f} s, {len(partials)} sets, "
            f"speedup {baseline / best:4.2f}x, manifest {agree}"
        )


if __name__ == "__main__":
    main()
