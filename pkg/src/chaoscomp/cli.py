"""Command-line interface: ``chaoscomp <subcommand> ...``.

Key material is only ever read from a file, named by ``--key`` or by the
``CHAOSCOMP_KEY_FILE`` environment variable, never from the command line.

Exit codes:

    0   success
    1   other error
    2   usage error
    3   key missing, malformed or invalid
    4   container format error
    5   decode failure (corrupt data or wrong key)
    6   length or integrity mismatch
    7   codec unavailable
    8   empty input
    9   insufficient data for an analysis
    10  sensitivity measurement unavailable
    11  numerical failure (divergent map, non-finite estimate)
    12  I/O error
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import os
import random
import sys
import tempfile
from pathlib import Path

from . import chaos, corpus, errors
from .analysis import nist, stats
from .codec import CodecId, compression_benchmark
from .keys import KEY_BITS, keygen, parse_key, serialize_key
from .pipeline import (DEFAULT_CHUNK, MAX_CHUNK, MIN_CHUNK, PipelineMode, SceContainer,
                       decrypt_stream, encrypt, encrypt_stream, pipeline_benchmark)

KEY_ENV = "CHAOSCOMP_KEY_FILE"
log = logging.getLogger("chaoscomp")

EXIT_CODES = (
    (errors.InvalidKey, 3), (errors.KeyFormatError, 3), (errors.KeyGenFailure, 3),
    (errors.FormatError, 4), (errors.DecodeError, 5), (errors.IntegrityMismatch, 6),
    (errors.CodecUnavailable, 7), (errors.EmptyInput, 8), (errors.InsufficientData, 9),
    (errors.SensitivityUnavailable, 10), (errors.DivergentTrajectory, 11),
    (errors.NumericalError, 11), (errors.ChaosCompError, 1), (OSError, 12),
)


class UsageError(Exception):
    pass


def exit_code(exc: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 1


# ---------------------------------------------------------------------------
# helpers

def _size(text: str) -> int:
    """Parse a byte count with an optional K/M/G (binary) suffix."""
    text = text.strip().upper()
    scale = {"K": 1 << 10, "M": 1 << 20, "G": 1 << 30}.get(text[-1:], 1)
    if scale != 1:
        text = text[:-1]
    try:
        return int(text) * scale
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a size: {text!r}") from None


def _key_path(args) -> Path:
    path = args.key or os.environ.get(KEY_ENV)
    if not path:
        raise UsageError(f"no key file given (use --key or set {KEY_ENV})")
    return Path(path)


def _load_key(args):
    return parse_key(_key_path(args).read_bytes())


@contextlib.contextmanager
def _atomic_output(path: str):
    """Yield a binary stream; files are written to a sibling temp file and
    renamed into place only if the block completes."""
    if path == "-":
        yield sys.stdout.buffer
        sys.stdout.buffer.flush()
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.",
                               suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            yield fh
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


@contextlib.contextmanager
def _input(path: str):
    if path == "-":
        yield sys.stdin.buffer
    else:
        with open(path, "rb") as fh:
            yield fh


@contextlib.contextmanager
def _text_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _plaintext(args) -> bytes:
    if args.input:
        return Path(args.input).read_bytes()
    return corpus.random_bytes(args.length, args.seed)


# ---------------------------------------------------------------------------
# subcommands

def cmd_keygen(args) -> int:
    data = serialize_key(keygen())
    flags = os.O_WRONLY | os.O_CREAT | (os.O_TRUNC if args.force else os.O_EXCL)
    fd = os.open(args.out, flags, 0o600)
    with os.fdopen(fd, "wb") as fh:
        fh.write(data)
    with contextlib.suppress(OSError):
        os.chmod(args.out, 0o600)
    log.info("wrote %d-byte key file %s", len(data), args.out)
    return 0


def cmd_encrypt(args) -> int:
    key = _load_key(args)
    with _input(args.input) as src, _atomic_output(args.output) as dst:
        header = encrypt_stream(src, dst, key, CodecId[args.codec.upper()],
                                PipelineMode[args.mode.upper()], args.chunk_size)
    log.info("encrypted %d bytes into %d chunks", header.original_length,
             len(header.chunk_lengths))
    return 0


def cmd_decrypt(args) -> int:
    key = _load_key(args)
    with _input(args.input) as src, _atomic_output(args.output) as dst:
        header = decrypt_stream(src, dst, key)
    log.info("decrypted %d bytes", header.original_length)
    return 0


def cmd_characterize(args) -> int:
    m = chaos.CharacterizationMap.reference(args.map)
    if args.param is not None:
        m = chaos.CharacterizationMap(m.name, {**m.params, m.primary_param: args.param},
                                      m.initial)
    with _text_output(args.out) as out:
        if args.instrument == "lyapunov":
            le = chaos.lyapunov_exponent(m, args.iterations)
            chaos.metrics_csv([(m.name, "lyapunov", le)], out)
        elif args.instrument == "bifurcation":
            lo, hi = args.range
            scan = chaos.bifurcation_scan(m, lo, hi, args.steps, args.samples)
            chaos.bifurcation_csv(scan, out)
        else:
            _bench_maps([m], corpus.text_corpus(args.length), out)
    return 0


def _bench_maps(maps, data, out) -> None:
    """CSV with one row per map: keystream throughput and the correlation
    between the corpus and the corpus XORed with the keystream."""
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["map", "bytes_per_second", "cc"])
    for m in maps:
        rate, cc = chaos.map_benchmark(m, len(data), data)
        w.writerow([m.name, f"{rate:.1f}", repr(cc)])


def _emit(rows, header, out_path):
    if out_path is None:
        return
    with _text_output(out_path) as out:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_analyze(args) -> int:
    kind = args.kind
    codec, mode = CodecId[args.codec.upper()], PipelineMode[args.mode.upper()]
    if kind == "export-bits":
        if not args.input or not args.out:
            raise UsageError("export-bits needs --input and --out")
        nist.export_bitstream(Path(args.input).read_bytes(), args.out)
        return 0
    if kind == "nist":
        data = Path(args.input).read_bytes() if args.input else None
        if data is None:
            key = _load_key(args)
            plain = corpus.random_bytes(args.samples * args.bits // 8 + 1, args.seed)
            data = encrypt(plain, key, codec, mode).body
        elif data[:4] == b"SOC1":
            data = SceContainer.from_bytes(data).body
        camp = nist.nist_campaign(data, args.samples, args.bits, args.alpha)
        if camp.samples == 1:
            for t, p in zip(camp.tests, camp.pvalues[0]):
                print(f"{t:<4} {nist.TESTS[t][0]:<20} p = {p:.6f}")
        else:
            print(camp.table())
        if args.out:
            with open(args.out, "w", newline="") as fh:
                camp.write_csv(fh)
        return 0

    if kind in ("cc", "csi") and args.other:
        a = _plaintext(args)
        b = Path(args.other).read_bytes()
        n = min(len(a), len(b))
        fn = stats.pearson_cc if kind == "cc" else stats.cosine_similarity
        value = fn(a[:n], b[:n])
        print(f"{kind} = {value:.6g} over {n} bytes")
        _emit([(kind, n, repr(value))], ["metric", "bytes", "value"], args.out)
        return 0

    key = _load_key(args)
    if kind == "chen":
        found = stats.chen_property_check(key, args.trials, seed=args.seed)
        print(f"{found} violations in {args.trials} trials")
        _emit([("chen", args.trials, found)], ["metric", "trials", "equalities"], args.out)
        return 0

    p = _plaintext(args)
    if kind in ("cc", "csi"):
        body = encrypt(p, key, codec, mode).body
        n = min(len(p), len(body))
        fn = stats.pearson_cc if kind == "cc" else stats.cosine_similarity
        value = fn(p[:n], body[:n])
        print(f"{kind}(plaintext, ciphertext) = {value:.6g} over {n} bytes")
        _emit([(kind, n, repr(value))], ["metric", "bytes", "value"], args.out)
        return 0

    rng = random.Random(args.seed)
    rows = []
    for _ in range(args.trials):
        if kind == "keysens":
            bit = args.bit if args.bit is not None else rng.randrange(KEY_BITS)
            r = stats.key_sensitivity(p, key, bit, codec, mode)
        else:
            bit = args.bit if args.bit is not None else rng.randrange(8 * len(p))
            r = stats.plaintext_sensitivity(p, key, bit, codec, mode)
        rows.append((kind, r.bit, repr(r.cc), repr(r.csi), repr(r.csi_deviation),
                     r.length_a, r.length_b))
        print(f"{kind} bit {r.bit}: cc = {r.cc:.3e}  csi = {r.csi:.6f}  "
              f"csi - baseline = {r.csi_deviation:.3e}  lengths {r.length_a}/{r.length_b}")
    _emit(rows, ["metric", "bit", "cc", "csi", "csi_deviation", "length_a", "length_b"],
          args.out)
    return 0


def cmd_bench(args) -> int:
    if args.input:
        data = Path(args.input).read_bytes()
    elif args.corpus == "text":
        data = corpus.text_corpus(args.length)
    elif args.corpus == "zipf":
        data = corpus.zipf_bytes(args.length, args.seed)
    else:
        data = corpus.random_bytes(args.length, args.seed)
    codecs = [CodecId[c.upper()] for c in args.codecs]
    with _text_output(args.out) as out:
        if args.target == "codec":
            compression_benchmark(data, codecs, out)
        elif args.target == "pipeline":
            key = keygen(random.Random(args.seed))
            modes = [PipelineMode[m.upper()] for m in args.modes]
            pipeline_benchmark(data, key, modes, codecs, args.chunk_size, out)
        else:
            _bench_maps([chaos.CharacterizationMap.reference(n) for n in chaos.REFERENCE_MAPS],
                        data, out)
    return 0


# ---------------------------------------------------------------------------
# parser

def _chunk_size(text: str) -> int:
    n = _size(text)
    if not MIN_CHUNK <= n <= MAX_CHUNK:
        raise argparse.ArgumentTypeError(f"chunk size must be in [{MIN_CHUNK}, {MAX_CHUNK}]")
    return n


class _HelpFormatter(argparse.HelpFormatter):
    """Append "(default: X)" unless the default is empty or already stated."""

    def _get_help_string(self, action):
        text = action.help or ""
        if (action.default is not None and action.default is not False
                and action.default != argparse.SUPPRESS
                and "default" not in text and action.option_strings):
            default = action.default
            if isinstance(default, (list, tuple)):
                default = " ".join(str(d) for d in default)
            text += f" (default: {default})"
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chaoscomp", formatter_class=_HelpFormatter,
        description="Chaos-map compression and encryption toolkit.",
        epilog=f"Keys are read from --key PATH or from the file named by ${KEY_ENV}.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (repeat for more detail)")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = _HelpFormatter

    def add_key(p):
        p.add_argument("--key", metavar="PATH",
                       help=f"key file (default: ${KEY_ENV})")

    def add_pipeline(p):
        p.add_argument("--codec", choices=["store", "baseline", "zstd"], default="baseline",
                       help="compression codec")
        p.add_argument("--mode", choices=["sce", "cte", "etc"], default="sce",
                       help="stage order")

    p = sub.add_parser("keygen", help="generate a new random key file", formatter_class=fmt)
    p.add_argument("--out", required=True, metavar="PATH", help="where to write the key")
    p.add_argument("--force", action="store_true", help="overwrite an existing file")
    p.set_defaults(func=cmd_keygen)

    for name, func, text in (("encrypt", cmd_encrypt, "compress and encrypt a file"),
                             ("decrypt", cmd_decrypt, "decrypt and decompress a container")):
        p = sub.add_parser(name, help=text, formatter_class=fmt)
        add_key(p)
        p.add_argument("-i", "--input", default="-", help="input path, '-' for stdin")
        p.add_argument("-o", "--output", default="-", help="output path, '-' for stdout")
        if name == "encrypt":
            add_pipeline(p)
            p.add_argument("--chunk-size", type=_chunk_size, default=DEFAULT_CHUNK,
                           help="plaintext bytes per chunk (K/M suffixes allowed)")
        p.set_defaults(func=func)

    p = sub.add_parser("characterize", help="Lyapunov exponent, bifurcation scan, map benchmark",
                       formatter_class=fmt)
    p.add_argument("map", choices=list(chaos.REFERENCE_MAPS))
    p.add_argument("instrument", choices=["bifurcation", "lyapunov", "bench"])
    p.add_argument("--param", type=float, help="override the map's primary parameter")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), default=(2.8, 4.0),
                   help="bifurcation parameter range")
    p.add_argument("--steps", type=int, default=200, help="bifurcation parameter steps")
    p.add_argument("--samples", type=int, default=64, help="attractor samples per step")
    p.add_argument("--iterations", type=int, default=200_000,
                   help="iterations for the Lyapunov estimate")
    p.add_argument("--length", type=_size, default=1 << 20, help="benchmark keystream bytes")
    p.add_argument("--out", metavar="CSV", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("analyze", help="security analysis", formatter_class=fmt)
    p.add_argument("kind", choices=["cc", "csi", "keysens", "ptsens", "chen", "nist",
                                    "export-bits"])
    add_key(p)
    add_pipeline(p)
    p.add_argument("--input", metavar="PATH",
                   help="plaintext (or ciphertext for nist/export-bits); "
                        "random bytes if omitted")
    p.add_argument("--other", metavar="PATH", help="second sequence for cc/csi")
    p.add_argument("--length", type=_size, default=1 << 20, help="random plaintext bytes")
    p.add_argument("--bit", type=int, help="bit to flip (random if omitted)")
    p.add_argument("--trials", type=int, default=1, help="sensitivity or Chen trials")
    p.add_argument("--samples", type=int, default=1, help="NIST samples")
    p.add_argument("--bits", type=int, default=1_000_000, help="bits per NIST sample")
    p.add_argument("--alpha", type=float, default=nist.ALPHA, help="significance level")
    p.add_argument("--seed", type=int, default=0, help="seed for random inputs and bits")
    p.add_argument("--out", metavar="PATH", help="CSV report (bit file for export-bits)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="codec, pipeline and map benchmarks", formatter_class=fmt)
    p.add_argument("target", choices=["codec", "pipeline", "maps"])
    p.add_argument("--corpus", choices=["text", "zipf", "random"], default="text",
                   help="built-in corpus")
    p.add_argument("--input", metavar="PATH", help="benchmark this file instead")
    p.add_argument("--length", type=_size, default=1 << 20, help="corpus bytes")
    p.add_argument("--codecs", nargs="+", choices=["store", "baseline", "zstd"],
                   default=["store", "baseline"], help="codecs to compare")
    p.add_argument("--modes", nargs="+", choices=["sce", "cte", "etc"],
                   default=["sce", "cte", "etc"], help="stage orders to compare")
    p.add_argument("--chunk-size", type=_chunk_size, default=DEFAULT_CHUNK,
                   help="plaintext bytes per chunk")
    p.add_argument("--seed", type=int, default=0, help="corpus and key seed")
    p.add_argument("--out", metavar="CSV", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chaoscomp: {exc}", file=sys.stderr)
        return 2
    except (errors.ChaosCompError, OSError) as exc:
        print(f"chaoscomp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
