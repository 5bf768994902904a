"""Compare the compiled recurrent kernel against the pure-numpy fallback.

Times the raw kernel on the model's three stack shapes and the full
streaming pipeline end to end, printing one table per section.

Usage: python3 benchmarks/backend_compare.py [--duration S] [--repeats K]
"""

import argparse
import statistics
import time

import numpy as np
from threadpoolctl import threadpool_limits

from ffsn import kernels
from ffsn.cli import measure_rtf
from ffsn.model import ModelConfig, ModelWeights

# (label, input_dim, hidden_dim, batch): the six recurrent layers of the
# default architecture; sub-band layers run with one row per mel band
KERNEL_SHAPES = (
    ("l2m.lstm0", 64, 384, 1),
    ("l2m.lstm1", 384, 257, 1),
    ("sub.lstm0", 12, 384, 64),
    ("sub.lstm1", 384, 384, 64),
    ("m2l.lstm0", 128, 512, 1),
    ("m2l.lstm1", 512, 512, 1),
)


def time_kernel(backend: str, input_dim: int, hidden: int, batch: int,
                steps: int, repeats: int) -> float:
    rng = np.random.default_rng(0)
    scale = 1.0 / np.sqrt(hidden)
    wi = (scale * rng.standard_normal((input_dim, 4 * hidden))).astype(np.float32)
    wr = (scale * rng.standard_normal((hidden, 4 * hidden))).astype(np.float32)
    bi = np.zeros(4 * hidden, np.float32)
    br = np.zeros(4 * hidden, np.float32)
    xs = rng.standard_normal((steps, batch, input_dim)).astype(np.float32)
    h = np.zeros((batch, hidden), np.float32)
    c = np.zeros((batch, hidden), np.float32)
    previous = kernels.select_backend(backend)
    try:
        with threadpool_limits(limits=1):
            kernels.lstm_seq(wi, wr, bi, br, xs, h, c)  # warm-up
            times = []
            for _ in range(repeats):
                start = time.perf_counter()
                kernels.lstm_seq(wi, wr, bi, br, xs, h, c)
                times.append(time.perf_counter() - start)
    finally:
        kernels.select_backend(previous)
    return statistics.median(times) / steps


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--duration", type=float, default=10.0,
                        help="seconds of audio for the pipeline benchmark")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--m", type=int, default=2, help="down-sampling factor")
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("note: compiled backend unavailable, comparing pure against itself")

    print(f"backends: {', '.join(backends)}")
    print()
    print("raw kernel, microseconds per step (median of runs over 200 steps)")
    header = f"{'layer':12s} {'shape':>18s}" + "".join(f"{b:>12s}" for b in backends)
    print(header)
    print("-" * len(header))
    for label, input_dim, hidden, batch in KERNEL_SHAPES:
        per_step = [
            time_kernel(b, input_dim, hidden, batch, steps=200, repeats=args.repeats)
            for b in backends
        ]
        shape = f"{input_dim}x{hidden} b{batch}"
        cells = "".join(f"{1e6 * t:>12.1f}" for t in per_step)
        print(f"{label:12s} {shape:>18s}{cells}")

    print()
    print(f"streaming pipeline, m={args.m}, {args.duration:.0f} s audio")
    config = ModelConfig().with_downsample(args.m)
    weights = ModelWeights.random(config, seed=0)
    rtfs = {}
    for backend in backends:
        previous = kernels.select_backend(backend)
        try:
            report = measure_rtf(weights, config, args.duration, args.repeats)
        finally:
            kernels.select_backend(previous)
        rtfs[backend] = report.rtf
        print(f"  {backend:10s} rtf {report.rtf:.4f}")
    if "compiled" in rtfs and "pure" in rtfs:
        print(f"  speedup    {rtfs['pure'] / rtfs['compiled']:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
