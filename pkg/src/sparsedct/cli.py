"""Command-line front end.

Subcommands::

    sparsedct transform IN [--kind dct2|dct3|dct4|dst4] [--fast|--naive] [--out OUT]
    sparsedct recover IN (--bound M | --m m) [--epsilon EPS] [--out OUT] [--stats STATS]
    sparsedct gen --n N --m m [--mu MU] [--seed S] [--snr DB] [--out X] [--spectrum-out XHAT]
    sparsedct bench --n N --m m [m ...] [--bound-rule exact|3m] [--trials T] [--seed S] [--out CSV]
    sparsedct noise-study --n N --m m [--snr DB ...] [--epsilon-table SNR:EPS,...] [--out CSV]

Signal files hold one value per line (``#`` starts a comment) or, with
``--format bin``, raw little-endian float64.  ``-`` means stdin/stdout.

Exit codes: 0 success, 2 invalid arguments or input, 3 I/O failure,
4 recovery invariant violated.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .experiments import BOUND_RULES, RunManifest, run_bench, run_noise_study, write_csv
from .recovery import RecoveryConfig, RecoveryInvariantError, Variant, sparse_idct
from .sampling import NoiseSpec, SignalSpec, SpectrumSource, add_noise, generate_signal
from .transforms import InvalidSignalError, TransformKind, as_signal, dct2_fast, transform

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVARIANT = 4


class SignalFormatError(ValueError):
    """A signal file could not be parsed."""


def read_signal(path, fmt="text"):
    """Read a signal file; ``path == "-"`` reads stdin."""
    if fmt == "bin":
        if path == "-":
            raw = sys.stdin.buffer.read()
        else:
            with open(path, "rb") as fh:
                raw = fh.read()
        if len(raw) % 8:
            raise SignalFormatError(f"{path}: binary length {len(raw)} is not a multiple of 8 bytes")
        return as_signal(np.frombuffer(raw, dtype="<f8").astype(np.float64))

    fh = sys.stdin if path == "-" else open(path)
    values = []
    try:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise SignalFormatError(f"{path}:{lineno}: not a number: {text!r}") from None
    finally:
        if fh is not sys.stdin:
            fh.close()
    return as_signal(np.array(values, dtype=np.float64))


def write_signal(path, x, fmt="text", header=None):
    """Write `x` as text (``%.17g`` per line) or little-endian float64."""
    x = np.asarray(x, dtype=np.float64)
    if fmt == "bin":
        data = x.astype("<f8").tobytes()
        if path == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            with open(path, "wb") as fh:
                fh.write(data)
        return
    lines = [f"# {header}"] if header else []
    lines += [f"{v:.17g}" for v in x]
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dyadic(text):
    text = text.strip()
    try:
        if text.startswith("2^") or text.startswith("2**"):
            n = 2 ** int(text.split("^")[-1].split("*")[-1])
        else:
            n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"length must be a power of two, got {n}")
    return n


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _nonnegative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {v}")
    return v


def _positive_float(text):
    v = float(text)
    if not math.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"must be finite and positive, got {text}")
    return v


def _snr(text):
    v = float(text)
    if math.isnan(v) or v == -math.inf:
        raise argparse.ArgumentTypeError(f"invalid SNR: {text}")
    return v


def _epsilon_table(text):
    table = {}
    for item in text.split(","):
        if not item.strip():
            continue
        try:
            snr, eps = item.split(":")
            table[float(snr)] = _positive_float(eps)
        except (ValueError, argparse.ArgumentTypeError):
            raise argparse.ArgumentTypeError(f"bad SNR:EPS pair {item!r}") from None
    return table


def _emit_jsonl(path, records):
    lines = "".join(json.dumps(r, sort_keys=True, default=str) + "\n" for r in records)
    if path == "-":
        sys.stdout.write(lines)
    else:
        with open(path, "a") as fh:
            fh.write(lines)


def cmd_transform(args):
    x = read_signal(args.input, args.format)
    y = transform(x, TransformKind(args.kind), fast=args.fast)
    write_signal(args.out, y, args.format)
    return EXIT_OK


def cmd_recover(args):
    if args.m is not None and args.bound is not None:
        raise ValueError("give either --bound or --m, not both")
    if args.m is None and args.bound is None:
        raise ValueError("one of --bound or --m is required")
    spectrum = read_signal(args.input, args.format)
    N = spectrum.shape[0]
    if args.m is not None:
        config = RecoveryConfig(args.m, args.epsilon, Variant.EXACT_LENGTH)
    else:
        config = RecoveryConfig(args.bound, args.epsilon, Variant.BOUNDED)
    x, stats = sparse_idct(SpectrumSource(spectrum), N, config)
    write_signal(args.out, x, args.format)
    record = {"N": N, "M": config.support_bound, "epsilon": config.epsilon, "variant": config.variant.value}
    record.update(stats.as_record())
    if args.stats:
        _emit_jsonl(args.stats, [record])
    else:
        # keep stdout clean when the signal itself goes there
        stream = sys.stdout if args.out != "-" else sys.stderr
        stream.write(json.dumps(record, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_gen(args):
    J = args.n.bit_length() - 1
    eps = args.epsilon_floor
    rng = np.random.default_rng(args.seed)
    x = generate_signal(SignalSpec(J, args.m, mu=args.mu, epsilon_floor=eps, seed=args.seed), rng)
    spectrum = dct2_fast(x)
    if args.snr is not None and not math.isinf(args.snr):
        spectrum = add_noise(spectrum, NoiseSpec(args.snr, args.seed), rng)
    mu = int(np.flatnonzero(x)[0])
    header = f"N={args.n} m={args.m} mu={mu} seed={args.seed}"
    write_signal(args.out, x, args.format, header=header)
    if args.spectrum_out:
        write_signal(args.spectrum_out, spectrum, args.format, header=header + f" snr={args.snr}")
    return EXIT_OK


def _write_run(args, command, params, records, aggregates):
    write_csv(sys.stdout if args.out == "-" else args.out, records, aggregates)
    if args.out != "-":
        RunManifest(command=command, parameters=params, seeds=[args.seed]).write(args.out + ".manifest.json")
    if args.stats:
        _emit_jsonl(args.stats, [r.as_row() for r in records])


def cmd_bench(args):
    params = {
        "N": args.n,
        "m": args.m,
        "bound_rule": args.bound_rule,
        "trials": args.trials,
        "epsilon": args.epsilon,
        "baseline": not args.no_baseline,
    }
    records, aggregates = run_bench(
        args.n, args.m, args.bound_rule, args.trials, args.seed, args.epsilon, baseline=not args.no_baseline
    )
    _write_run(args, "bench", params, records, aggregates)
    return EXIT_OK


def cmd_noise_study(args):
    params = {
        "N": args.n,
        "m": args.m,
        "bound_rule": args.bound_rule,
        "snr": args.snr,
        "epsilon_table": args.epsilon_table,
        "trials": args.trials,
    }
    records, aggregates = run_noise_study(
        args.n, args.m, args.bound_rule, args.snr, args.epsilon_table, args.trials, args.seed
    )
    _write_run(args, "noise-study", params, records, aggregates)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="sparsedct", description="Sparse inverse DCT-II and fast DCTs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, out_default="-"):
        p.add_argument("--out", default=out_default, help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("text", "bin"), default="text", help="signal file format")

    p = sub.add_parser("transform", help="apply an orthonormal DCT/DST to a signal file")
    p.add_argument("input")
    p.add_argument("--kind", choices=[k.value for k in TransformKind], default="dct2")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--fast", dest="fast", action="store_true", default=True, help="O(n log n) algorithm")
    group.add_argument("--naive", dest="fast", action="store_false", help="dense matrix product")
    io_flags(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("recover", help="recover a short-support vector from its DCT-II")
    p.add_argument("input", help="spectrum file")
    p.add_argument("--bound", type=_positive_int, help="upper bound M on the support length")
    p.add_argument("--m", type=_positive_int, help="exact support length (exact-length variant)")
    p.add_argument("--epsilon", type=_positive_float, default=1e-4)
    p.add_argument("--stats", help="append a JSON-lines stats record here (default: stdout, or stderr when --out is stdout)")
    io_flags(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("gen", help="generate a random short-support signal and its spectrum")
    p.add_argument("--n", type=_dyadic, required=True, help="length N (power of two, '2^J' accepted)")
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--mu", type=_nonnegative_int, help="first support index (random if omitted)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon-floor", type=float, default=1e-4, help="lower bound for the endpoint entries")
    p.add_argument("--snr", type=_snr, help="add uniform noise to the spectrum at this SNR (dB)")
    p.add_argument("--spectrum-out", help="write the DCT-II of the signal here")
    io_flags(p)
    p.set_defaults(func=cmd_gen)

    for name, func, helptext in (
        ("bench", cmd_bench, "exact-data error/runtime benchmark (CSV)"),
        ("noise-study", cmd_noise_study, "support recovery from noisy spectra (CSV)"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--n", type=_dyadic, required=True)
        p.add_argument("--bound-rule", choices=BOUND_RULES, default="3m")
        p.add_argument("--trials", type=_nonnegative_int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="-", help="CSV path; a .manifest.json is written beside it")
        p.add_argument("--stats", help="append one JSON-lines record per trial here")
        p.set_defaults(func=func)
        if name == "bench":
            p.add_argument("--m", type=_positive_int, nargs="+", required=True)
            p.add_argument("--epsilon", type=_positive_float, default=1e-4)
            p.add_argument("--no-baseline", action="store_true", help="skip the dense DCT-III timing")
        else:
            p.add_argument("--m", type=_positive_int, required=True)
            p.add_argument("--snr", type=_snr, nargs="+", default=[0, 10, 20, 30, 40, 50])
            p.add_argument(
                "--epsilon-table", type=_epsilon_table, help="thresholds as 'SNR:EPS,...' (defaults for m=100, 1000)"
            )
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RecoveryInvariantError as exc:
        print(f"sparsedct: recovery invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"sparsedct: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidSignalError, ValueError) as exc:
        print(f"sparsedct: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
