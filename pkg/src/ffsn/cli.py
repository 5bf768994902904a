"""Command-line surface: enhancement, benchmarking, complexity tables,
SI-SDR scoring, stage dumps, and demo weight generation.

Exit codes: 0 success, 2 usage, 3 file format, 4 configuration or data
validation, 5 I/O.
"""

import argparse
import math
import os
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from ffsn import kernels
from ffsn.complexity import DEFAULT_COMPARISON, compare
from ffsn.dsp import ENGINE_SAMPLE_RATE, AudioClip, istft, stft
from ffsn.errors import FfsnError, FormatError
from ffsn.mel import apply_filterbank
from ffsn.metrics import si_sdr
from ffsn.model import (
    INFINITY,
    ModelConfig,
    ModelWeights,
    NormState,
    StackState,
    create_graph_state,
    flush_graph,
    forward_offline,
    graph_step,
    l2m_forward,
)
from ffsn.stream import enhance_stream
from ffsn.weights_io import load, save, save_tensors
from ffsn.wavio import read_wav, write_wav

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_VALIDATION = 4
EXIT_IO = 5

_STAGES = ("mel", "l2m", "sub", "mask")


class _UsageError(Exception):
    pass


@dataclass(frozen=True)
class RtfReport:
    """Wall-clock benchmark result over synthetic audio."""

    descriptor: str
    backend: str
    mode: str
    repeats: int
    audio_duration: float
    processing_time: float

    @property
    def rtf(self) -> float:
        return self.processing_time / self.audio_duration

    def __post_init__(self):
        if self.audio_duration <= 0 or self.processing_time <= 0:
            raise ValueError("durations must be positive")

    def render(self) -> str:
        return "\n".join(
            (
                f"config: {self.descriptor}",
                f"backend: {self.backend}",
                f"mode: {self.mode}",
                f"audio_duration_s: {self.audio_duration:.2f}",
                f"processing_time_s: {self.processing_time:.4f} (median of {self.repeats})",
                f"rtf: {self.rtf:.4f}",
            )
        )


def _parse_m(text: str):
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return INFINITY
    try:
        m = int(text)
    except ValueError:
        raise _UsageError(f"invalid down-sampling factor {text!r}") from None
    if m < 1:
        raise _UsageError("down-sampling factor must be >= 1")
    return m


def _describe_m(m) -> str:
    return "inf" if m == INFINITY else str(int(m))


def _resolve_weights(args) -> tuple[ModelWeights, ModelConfig]:
    path = args.weights or os.environ.get("FFSN_WEIGHTS")
    if not path:
        raise _UsageError("no weight file: pass --weights or set FFSN_WEIGHTS")
    weights, config = load(path)
    if args.m is not None:
        m = _parse_m(args.m)
        if (m != INFINITY) != config.sub_band_present:
            have = "with" if config.sub_band_present else "without"
            raise _UsageError(
                f"--m {args.m} conflicts with a weight file {have} sub-band weights"
            )
        config = config.with_downsample(m)
    return weights, config


def measure_rtf(
    weights: ModelWeights,
    config: ModelConfig,
    duration: float,
    repeats: int,
    mode: str = "stream",
    seed: int = 0,
) -> RtfReport:
    """Median-of-repeats wall-clock real-time factor on synthetic noise.

    Runs single threaded so results are comparable across configurations.

    Args:
        weights: model weights matching config.
        config: evaluation configuration.
        duration: synthetic input length in seconds.
        repeats: number of timed runs; the median is reported.
        mode: "stream" or "offline".
        seed: RNG seed for the synthetic input.

    Returns:
        RtfReport with the median processing time.
    """
    from threadpoolctl import threadpool_limits

    if duration <= 0:
        raise _UsageError("duration must be positive")
    if repeats < 1:
        raise _UsageError("repeats must be >= 1")
    rng = np.random.default_rng(seed)
    n = int(round(duration * ENGINE_SAMPLE_RATE))
    samples = (0.1 * rng.standard_normal(n)).astype(np.float32)
    clip = AudioClip(samples)
    times = []
    with threadpool_limits(limits=1):
        for _ in range(repeats):
            start = time.perf_counter()
            if mode == "stream":
                enhance_stream(weights, config, samples, chunk_size=256)
            else:
                istft(forward_offline(weights, config, stft(clip)), out_len=n)
            times.append(time.perf_counter() - start)
    return RtfReport(
        descriptor=f"fast_fullsubnet(m={_describe_m(config.downsample)})",
        backend=kernels.active_backend(),
        mode=mode,
        repeats=repeats,
        audio_duration=n / ENGINE_SAMPLE_RATE,
        processing_time=statistics.median(times),
    )


def _collect_stage(weights, config, spec, stage) -> dict:
    if stage == "mel":
        rows = [apply_filterbank(weights.mel, np.abs(frame)) for frame in spec]
        return {"mel.features": np.stack(rows) if rows else
                np.zeros((0, config.num_mel), np.float32)}
    if stage == "l2m":
        state = StackState.zeros(weights.l2m)
        norm = NormState()
        rows = []
        for frame in spec:
            mel_frame = norm.normalize(apply_filterbank(weights.mel, np.abs(frame)))
            embedding, state = l2m_forward(weights, mel_frame, state)
            rows.append(embedding)
        return {"l2m.embedding": np.stack(rows) if rows else
                np.zeros((0, config.num_mel), np.float32)}
    if stage == "sub":
        if not config.sub_band_present:
            raise _UsageError("stage sub needs sub-band weights (finite m)")
        gs = create_graph_state(weights, config)
        rows = []
        for frame in spec:
            mel_frame = gs.norm.normalize(apply_filterbank(weights.mel, np.abs(frame)))
            graph_step(weights, config, gs, mel_frame)
            rows.append(gs.held_sub.copy())
        return {"sub.held": np.stack(rows) if rows else
                np.zeros((0, config.num_mel), np.float32)}
    if stage == "mask":
        gs = create_graph_state(weights, config)
        masks = []
        for frame in spec:
            mel_frame = gs.norm.normalize(apply_filterbank(weights.mel, np.abs(frame)))
            masks.append(graph_step(weights, config, gs, mel_frame))
        masks += list(flush_graph(weights, config, gs))
        aligned = masks[config.lookahead :]
        return {"mask.compressed": np.stack(aligned) if aligned else
                np.zeros((0, config.mask_dim), np.float32)}
    raise _UsageError(f"unknown stage {stage!r}; choose from {_STAGES}")


def cmd_enhance(args) -> int:
    weights, config = _resolve_weights(args)
    clip = read_wav(args.input)
    if args.mode == "stream":
        out = enhance_stream(weights, config, clip.samples)
    else:
        spec = stft(clip)
        out = istft(forward_offline(weights, config, spec), out_len=len(clip)).samples
    write_wav(args.output, AudioClip(out))
    return EXIT_OK


def cmd_bench(args) -> int:
    weights, config = _resolve_weights(args)
    if args.backend:
        kernels.select_backend(args.backend)
    report = measure_rtf(
        weights, config, args.duration, args.repeats, mode=args.mode
    )
    print(report.render())
    return EXIT_OK


def cmd_sisdr(args) -> int:
    ref = read_wav(args.reference)
    est = read_wav(args.estimate)
    if len(ref) != len(est):
        raise _UsageError(f"length mismatch: ref {len(ref)} vs est {len(est)}")
    value = si_sdr(est.samples, ref.samples)
    if math.isinf(value):
        print("+inf" if value > 0 else "-inf")
    else:
        print(f"{value:.4f}")
    return EXIT_OK


def _parse_preset(text: str):
    name, sep, m_text = text.partition(":")
    return (name, _parse_m(m_text) if sep else None)


def cmd_complexity(args) -> int:
    items = (
        tuple(_parse_preset(p) for p in args.preset)
        if args.preset
        else DEFAULT_COMPARISON
    )
    print(compare(items, fmt=args.format))
    return EXIT_OK


def cmd_features(args) -> int:
    weights, config = _resolve_weights(args)
    spec = stft(read_wav(args.input))
    save_tensors(args.output, _collect_stage(weights, config, spec, args.stage))
    return EXIT_OK


def cmd_make_weights(args) -> int:
    m = _parse_m(args.m) if args.m is not None else 2
    config = ModelConfig().with_downsample(m)
    save(ModelWeights.random(config, seed=args.seed), config, args.output)
    return EXIT_OK


def _add_weight_args(sub, with_m=True):
    sub.add_argument("--weights", help="weight file (default: $FFSN_WEIGHTS)")
    if with_m:
        sub.add_argument("--m", help="down-sampling factor override (int or 'inf')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffsn", description="Streaming speech-enhancement engine."
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("enhance", help="denoise a mono 16 kHz PCM16 wav")
    p.add_argument("input")
    p.add_argument("output")
    _add_weight_args(p)
    p.add_argument("--mode", choices=("stream", "offline"), default="stream")
    p.set_defaults(func=cmd_enhance)

    p = subs.add_parser("bench", help="measure the real-time factor")
    _add_weight_args(p)
    p.add_argument("--duration", type=float, default=30.0, help="seconds of audio")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--mode", choices=("stream", "offline"), default="stream")
    p.add_argument("--backend", help="kernel backend (compiled or pure)")
    p.set_defaults(func=cmd_bench)

    p = subs.add_parser("sisdr", help="scale-invariant SDR between two wavs")
    p.add_argument("reference")
    p.add_argument("estimate")
    p.set_defaults(func=cmd_sisdr)

    p = subs.add_parser("complexity", help="analytic parameter and MACs table")
    p.add_argument(
        "--preset",
        action="append",
        help="preset name, optionally name:m (repeatable)",
    )
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_complexity)

    p = subs.add_parser("features", help="dump a pipeline stage as a tensor bundle")
    p.add_argument("input")
    p.add_argument("output")
    _add_weight_args(p)
    p.add_argument("--stage", choices=_STAGES, required=True)
    p.set_defaults(func=cmd_features)

    p = subs.add_parser("make-weights", help="write random demo weights")
    p.add_argument("output")
    p.add_argument("--m", help="down-sampling factor (int or 'inf')")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_make_weights)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FfsnError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
