"""Command-line entry point: ``sepdecode {decode,cut-trace,sweep,compare,code-info}``.

Machine-readable output goes to stdout, diagnostics to stderr. Exit status is
0 on success, 1 when a decoder fails on the requested frame and 2 on usage
errors. Bit and column indices are 0-based throughout.

Flags for ``sweep`` and ``compare`` can also come from ``--config FILE``, a
flat ``key=value`` file using the long flag names (``min-errors=200``);
command-line flags take precedence. Repeated keys such as ``decoder`` may be
comma-separated.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelConfig, frame_rng, receive
from .codes import AlistError, load_code
from .cuts import TRACE_HEADER
from .decoders import SeparationConfig, decode_separation
from .sim import (
    DECODERS,
    DecoderSpec,
    SweepConfig,
    default_workers,
    paired_compare,
    run_sweep,
    write_csv,
    write_summary,
)

EXIT_OK, EXIT_DECODE_FAILURE, EXIT_USAGE = 0, 1, 2

# flag values that start with '-' (negative LLRs) are glued to their flag
_VALUE_FLAGS = ("--llr", "--snr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def parse_snr(text: str) -> tuple[float, ...]:
    """``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            a, b, step = parts
            if step <= 0 or b < a:
                raise ValueError
            count = int(np.floor((b - a) / step + 1e-9)) + 1
            points = tuple(round(a + i * step, 10) for i in range(count))
        else:
            points = tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise UsageError(f"malformed SNR range {text!r}; use a:b:step or a comma list") from None
    if not points or any(not np.isfinite(p) for p in points):
        raise UsageError(f"malformed SNR range {text!r}")
    if any(q <= p for p, q in zip(points, points[1:])):
        raise UsageError(f"SNR points must be strictly increasing: {text!r}")
    return points


def parse_llr(text: str) -> np.ndarray:
    """Comma-separated values, or a file with one value per line or one comma-separated line."""
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    tokens = [t for t in text.replace("\n", ",").replace(" ", ",").split(",") if t.strip()]
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError:
        raise UsageError(f"cannot parse LLR input {text[:40]!r}") from None
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise UsageError("LLR input must hold finite numbers")
    return values


def read_config(path: str) -> dict[str, str]:
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _load(source: str):
    try:
        return load_code(source)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except (OSError, AlistError) as exc:
        raise UsageError(f"cannot load code {source!r}: {exc}") from None


def _decoder_spec(name: str, args) -> DecoderSpec:
    # defaults are left out so labels (and compare file names) stay short
    if name == "sep" and args.strategy != "all":
        return DecoderSpec("sep", strategy=args.strategy)
    if name == "ml" and args.ml_method != "brute":
        return DecoderSpec("ml", method=args.ml_method)
    return DecoderSpec(name)


def _frame_costs(args, code) -> np.ndarray:
    if args.llr is not None:
        c = parse_llr(args.llr)
        if c.size != code.n:
            raise UsageError(f"LLR vector has {c.size} entries, code {code.name} has n={code.n}")
        return c
    if args.snr is None:
        raise UsageError("give either --llr or --snr (with --seed)")
    try:
        snr = float(args.snr)
    except ValueError:
        raise UsageError(f"--snr expects one value here, got {args.snr!r}") from None
    return receive(np.zeros(code.n, np.uint8), ChannelConfig(snr), frame_rng(args.seed, 0, 0)).c


def _word_text(word) -> tuple[str, str]:
    bits = "".join(map(str, word.tolist()))
    width = (len(bits) + 3) // 4
    return bits, format(int(bits, 2), f"0{width}x")


def _print_trace(trace, out):
    for event in trace:
        print(f"lp\t{event['iteration']}\t{event['objective']:.10g}", file=out)
        for cut, viol in event["cuts"]:
            line = cut.trace_line()
            print(line.rsplit("\t", 1)[0] + f"\t{viol:.6g}", file=out)


def cmd_decode(args) -> int:
    code = _load(args.code)
    c = _frame_costs(args, code)
    spec = _decoder_spec(args.decoder, args)
    trace = [] if args.trace and spec.name == "sep" else None
    if trace is not None:
        outcome = decode_separation(code, c, SeparationConfig(strategy=args.strategy), trace=trace)
    else:
        if args.trace:
            print("note: --trace only applies to the sep decoder", file=sys.stderr)
        outcome = spec.bind()(code, c)
    out = sys.stdout
    if trace is not None:
        print(f"# trace: lp<TAB>iteration<TAB>objective, then cuts as {TRACE_HEADER}", file=out)
        _print_trace(trace, out)
    if outcome.word is not None:
        bits, hexa = _word_text(outcome.word)
        print(f"word_bin={bits}", file=out)
        print(f"word_hex={hexa}", file=out)
    else:
        print("word_bin=-", file=out)
        print("word_hex=-", file=out)
    print(f"status={outcome.status.value}", file=out)
    obj = "nan" if outcome.objective is None else f"{outcome.objective:.10g}"
    print(f"objective={obj}", file=out)
    s = outcome.stats
    for key in ("lps_solved", "gomory_cuts", "rpc_cuts", "fsi_cuts", "bp_iterations"):
        print(f"{key}={getattr(s, key)}", file=out)
    return EXIT_OK if outcome.success else EXIT_DECODE_FAILURE


def cmd_cut_trace(args) -> int:
    code = _load(args.code)
    c = _frame_costs(args, code)
    trace = []
    outcome = decode_separation(code, c, SeparationConfig(strategy=args.strategy), trace=trace)
    print("iteration\t" + TRACE_HEADER)
    for event in trace:
        print(f"lp {event['iteration']}: objective {event['objective']:.10g}, "
              f"{len(event['cuts'])} cut(s)", file=sys.stderr)
        for cut, viol in event["cuts"]:
            print(f"{event['iteration']}\t" + cut.trace_line().rsplit("\t", 1)[0] + f"\t{viol:.6g}")
    print(f"status {outcome.status.value}", file=sys.stderr)
    return EXIT_OK if outcome.success else EXIT_DECODE_FAILURE


_SWEEP_DEFAULTS = {"decoder": "sep", "seed": "0", "min-errors": "100", "max-frames": "10000", "strategy": "all",
                   "transmit-mode": "all_zero", "ml-method": "brute", "progress-every": "1000"}


def _merged(args) -> dict[str, str]:
    values = dict(_SWEEP_DEFAULTS)
    if args.config:
        values.update(read_config(args.config))
    for key in ("code", "snr", "seed", "min-errors", "max-frames", "strategy", "transmit-mode",
                "ml-method", "threads", "out", "progress-every"):
        v = getattr(args, key.replace("-", "_"))
        if v is not None:
            values[key] = str(v)
    if args.decoder:
        values["decoder"] = ",".join(args.decoder)
    unknown = set(values) - set(_SWEEP_DEFAULTS) - {"code", "snr", "threads", "out"}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("code", "snr"):
        if key not in values:
            raise UsageError(f"--{key} is required (flag or config file)")
    return values


def _int(values, key) -> int:
    try:
        return int(values[key])
    except ValueError:
        raise UsageError(f"{key} must be an integer, got {values[key]!r}") from None


def _sweep_setup(args):
    v = _merged(args)
    names = [d.strip() for d in v["decoder"].split(",") if d.strip()]
    ns = argparse.Namespace(strategy=v["strategy"], ml_method=v["ml-method"])
    try:
        specs = [_decoder_spec(name, ns) for name in names]
        cfg = SweepConfig(
            code=_load(v["code"]), decoder=specs[0] if specs else "sep",
            snr_points=parse_snr(v["snr"]), min_frame_errors=_int(v, "min-errors"),
            max_frames=_int(v, "max-frames"), seed=_int(v, "seed"),
            transmit_mode=v["transmit-mode"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    workers = _int(v, "threads") if "threads" in v else default_workers()
    return cfg, specs, workers, v.get("out"), _int(v, "progress-every")


def cmd_sweep(args) -> int:
    cfg, specs, workers, out, every = _sweep_setup(args)
    if len(specs) != 1:
        raise UsageError("sweep takes exactly one --decoder; use compare for several")
    result = run_sweep(cfg, workers=workers, progress_every=every, progress=sys.stderr)
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(result, fh)
    else:
        write_csv(result, sys.stdout)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg, specs, workers, out, every = _sweep_setup(args)
    if not specs:
        raise UsageError("compare needs at least one --decoder")
    paired = paired_compare(cfg, specs, workers=workers, progress_every=every, progress=sys.stderr)
    if out:
        directory = Path(out)
        directory.mkdir(parents=True, exist_ok=True)
        for label, result in paired.results.items():
            with open(directory / f"{label}.csv", "w", newline="") as fh:
                write_csv(result, fh)
        with open(directory / "summary.csv", "w", newline="") as fh:
            write_summary(paired, fh)
        print(f"wrote {len(paired.results) + 1} files to {directory}", file=sys.stderr)
    else:
        for label, result in paired.results.items():
            print(f"# decoder={label}")
            write_csv(result, sys.stdout)
        print("# summary")
        write_summary(paired, sys.stdout)
    return EXIT_OK


def cmd_code_info(args) -> int:
    code = _load(args.code)
    info = code.info()
    for key in ("name", "n", "k", "m", "rank", "rate", "max_check_degree", "max_variable_degree", "density"):
        value = info[key]
        print(f"{key}={value:.6g}" if isinstance(value, float) else f"{key}={value}")
    for key in ("check_degree_distribution", "variable_degree_distribution"):
        dist = ",".join(f"{d}:{cnt}" for d, cnt in sorted(info[key].items()))
        print(f"{key}={dist}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sepdecode", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def frame_flags(p):
        p.add_argument("--code", required=True, help="built-in code name or alist path")
        p.add_argument("--llr", help="comma-separated LLRs or a file of them (positive favours bit 0)")
        p.add_argument("--snr", help="Es/N0 in dB for a synthetic all-zero frame")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--strategy", choices=("all", "first"), default="all")

    p = sub.add_parser("decode", help="decode one frame")
    frame_flags(p)
    p.add_argument("--decoder", choices=DECODERS, default="sep")
    p.add_argument("--ml-method", choices=("brute", "branch_and_bound"), default="brute")
    p.add_argument("--trace", action="store_true", help="print LP objectives and cuts per iteration")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("cut-trace", help="decode one frame with the separation decoder, emitting every cut")
    frame_flags(p)
    p.set_defaults(func=cmd_cut_trace)

    for name, func, help_text in (("sweep", cmd_sweep, "FER sweep of one decoder"),
                                  ("compare", cmd_compare, "paired FER sweep of several decoders")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--code")
        p.add_argument("--decoder", action="append", choices=DECODERS)
        p.add_argument("--snr", help="a:b:step or comma list, Es/N0 in dB")
        p.add_argument("--seed", type=int)
        p.add_argument("--min-errors", type=int)
        p.add_argument("--max-frames", type=int)
        p.add_argument("--strategy", choices=("all", "first"))
        p.add_argument("--ml-method", choices=("brute", "branch_and_bound"))
        p.add_argument("--transmit-mode", choices=("all_zero", "random_codeword"))
        p.add_argument("--threads", type=int, help="worker processes (default: available CPUs)")
        p.add_argument("--progress-every", type=int, help="frames between progress lines on stderr")
        p.add_argument("--out", help="output CSV (sweep) or directory (compare)")
        p.set_defaults(func=func)

    p = sub.add_parser("code-info", help="print code parameters")
    p.add_argument("--code", required=True)
    p.set_defaults(func=cmd_code_info)
    return parser


def _glue_values(argv: list[str]) -> list[str]:
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
