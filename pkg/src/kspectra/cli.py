"""Command-line interface: ``kspectra <subcommand> ...``.

Exit codes: 0 success, 1 input/precondition failure, 2 usage error,
3 answer unknown because the enumeration guard was exceeded.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
from pathlib import Path

from . import __version__
from .reconstruct import DEFAULT_GUARD, GuardExceeded, enumerate_genomes
from .segmentation import SegmentationRow, _sweep_rows, procedure1, procedure2
from .seqcore import DNA, Alphabet, Genome, read_fasta
from .spectrum import (
    EmptySpectrumError,
    KSpectrum,
    compute_spectrum,
    entropy,
    informational_indexes,
    read_spectrum,
    write_spectrum,
)
from .suffix_index import build_index

logger = logging.getLogger("kspectra")

EXIT_FAILURE = 1
EXIT_UNKNOWN = 3


class CliError(Exception):
    pass


def _positive_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _alphabet(choice: str | None, default: str) -> Alphabet | None:
    choice = choice or default
    if choice == "dna":
        return DNA
    if choice == "auto":
        return None
    return Alphabet.from_string(choice)


def _load_genomes(args) -> list[Genome]:
    path = Path(args.fasta)
    if not path.is_file():
        raise CliError(f"FASTA file not found: {path}")
    return read_fasta(path, _alphabet(args.alphabet, "dna"), soft_mask=args.soft_mask)


def _load_spectrum(args) -> KSpectrum:
    path = Path(args.spectrum)
    if not path.is_file():
        raise CliError(f"spectrum file not found: {path}")
    alpha = _alphabet(args.alphabet, "auto")
    with open(path, encoding="ascii") as fh:
        lines = fh.readlines()
    if alpha is None:
        letters = "".join(line.split("\t", 1)[0] for line in lines if not line.startswith("#"))
        alpha = Alphabet.infer(letters) if len(set(letters.lower())) >= 2 else None
    return read_spectrum(lines, alpha)


def _k_range(args, parser) -> tuple[int, int]:
    if args.k is not None:
        if args.kmin is not None or args.kmax is not None:
            parser.error("use either --k or --kmin/--kmax")
        return args.k, args.k
    if args.kmin is None or args.kmax is None:
        parser.error("a k value (--k) or range (--kmin and --kmax) is required")
    if args.kmin > args.kmax:
        parser.error(f"empty k range: --kmin {args.kmin} > --kmax {args.kmax}")
    return args.kmin, args.kmax


def _cache_path(args, g: Genome, n_records: int) -> Path | None:
    if not args.cache_index:
        return None
    base = Path(args.cache_index)
    return base if n_records == 1 else base.with_name(f"{base.name}.{g.name}")


def cmd_spectrum(args, parser, out) -> int:
    if args.k is None:
        parser.error("--k is required")
    for g in _load_genomes(args):
        out.write(g.header() + "\n")
        write_spectrum(compute_spectrum(g, args.k), out)
    return 0


def cmd_indexes(args, parser, out) -> int:
    ks: range = range(0)
    if args.k is not None or args.kmin is not None or args.kmax is not None:
        lo, hi = _k_range(args, parser)
        ks = range(lo, hi + 1)
    genomes = _load_genomes(args)
    for g in genomes:
        idx = build_index(g, _cache_path(args, g, len(genomes)))
        ix = informational_indexes(g, idx)
        out.write(g.header() + "\n")
        if g.mask:
            out.write("#frequency_denominator=valid_windows\n")
        out.write(f"mrl\t{ix.mrl}\nmhl\t{ix.mhl}\nmcl\t{ix.mcl}\nmfl\t{ix.mfl}\n")
        out.write(f"LG\t{ix.lg_length:.9g}\n")
        if ks:
            out.write("k\tDk\tLX\tE\n")
        for k in ks:
            try:
                spec = compute_spectrum(g, k)
            except EmptySpectrumError as exc:
                out.write(f"#skipped k={k}: {exc}\n")
                continue
            lx = spec.total / len(spec)
            out.write(f"{k}\t{len(spec)}\t{lx:.9g}\t{entropy(spec):.9g}\n")
    return 0


def cmd_segment(args, parser, out) -> int:
    k_min, k_max = _k_range(args, parser)
    genomes = _load_genomes(args)
    seg_out = io.StringIO() if args.emit_segments else None
    for g in genomes:
        idx = build_index(g, _cache_path(args, g, len(genomes)))
        out.write(g.header() + "\n")
        out.write(f"#k_min={k_min}\t#k_max={k_max}\n")
        if not args.all_rows:
            out.write("#rows=only k with Uk >= 1\n")
        out.write("\t".join(SegmentationRow.COLUMNS) + "\n")
        for k, row, reason in _sweep_rows(g, k_min, k_max, idx, args.threads):
            if row is None:
                out.write(f"#skipped k={k}: {reason}\n")
                continue
            if row.univocal_size == 0 and not args.all_rows:
                continue
            out.write(row.as_tsv() + "\n")
            if seg_out is not None:
                seg, _ = procedure2(g, k, idx)
                seg_out.write(f"{g.header()}\n#k={k}\n#word\tmultiplicity\tstart\tend\n")
                for s in seg.segments:
                    start, end = s.origin
                    seg_out.write(f"{s.word}\t{s.multiplicity}\t{start + 1}\t{end}\n")
    if seg_out is not None:
        Path(args.emit_segments).write_text(seg_out.getvalue(), encoding="ascii")
    return 0


def _report_realizations(spec: KSpectrum, args, out, target: str | None) -> int:
    try:
        found = enumerate_genomes(spec, limit=args.limit, guard=args.guard)
    except GuardExceeded as exc:
        out.write("#status=unknown (guard)\n")
        logger.warning("%s", exc)
        return EXIT_UNKNOWN
    n = len(found)
    capped = n >= args.limit
    count = f">= {n}" if capped else str(n)
    noun = "realization" if n == 1 else "realizations"
    unique = n == 1 and (target is None or found[0] == target)
    status = f"univocal; 1 {noun}" if unique else f"not univocal; {count} {noun}"
    out.write(f"#status={status}\n")
    for s in found:
        out.write(s + "\n")
    out.write(f"#count={n}\n")
    return 0


def cmd_univocal(args, parser, out) -> int:
    if args.spectrum:
        spec = _load_spectrum(args)
        out.write(f"#spectrum={args.spectrum}\n#k={spec.k}\n")
        return _report_realizations(spec, args, out, None)
    if not args.fasta or args.k is None:
        parser.error("univocal needs --spectrum, or --fasta with --k")
    code = 0
    for g in _load_genomes(args):
        if g.mask:
            raise CliError(f"genome {g.name!r} has masked positions; univocality needs an unmasked genome")
        out.write(f"{g.header()}\n#k={args.k}\n")
        code = max(code, _report_realizations(compute_spectrum(g, args.k), args, out, g.text))
    return code


def cmd_assemble(args, parser, out) -> int:
    if args.spectrum:
        specs = [_load_spectrum(args)]
    elif args.fasta and args.k is not None:
        specs = [compute_spectrum(g, args.k) for g in _load_genomes(args)]
    else:
        parser.error("assemble needs --spectrum, or --fasta with --k")
    for spec in specs:
        seg = procedure1(spec)
        out.write(f"#k={spec.k}\t#total={spec.total}\n#word\tmultiplicity\n")
        ms = seg.multiset()
        words = spec.alphabet.sorted_words(ms) if spec.alphabet else sorted(ms)
        for w in words:
            out.write(f"{w}\t{ms[w]}\n")
        out.write(f"#count={sum(ms.values())}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kspectra", description="Genomic k-spectra, "
                                     "informational indexes and spectral segmentations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spectrum_input=False):
        p.add_argument("--fasta", help="input FASTA file (one analysis per record)")
        if spectrum_input:
            p.add_argument("--spectrum", help="input spectrum TSV")
        p.add_argument("--k", type=_positive_int, help="k-mer length")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--alphabet", help="dna (default for FASTA), auto, or explicit symbols, e.g. abc")
        p.add_argument("--soft-mask", action="store_true", help="mask lowercase letters")

    p = sub.add_parser("spectrum", help="k-spectrum TSV per record")
    common(p)
    p.set_defaults(func=cmd_spectrum, needs_fasta=True)

    for name, func, helptext in (
        ("indexes", cmd_indexes, "mrl, mhl, mcl, mfl, LG and per-k LX/E"),
        ("segment", cmd_segment, "maximal-segment report over a k range"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.add_argument("--kmin", type=_positive_int, help="smallest k of the range")
        p.add_argument("--kmax", type=_positive_int, help="largest k of the range")
        p.add_argument("--cache-index", help="suffix index cache file")
        p.set_defaults(func=func, needs_fasta=True)
        if name == "segment":
            p.add_argument("--emit-segments", help="write segments (word, multiplicity, start, end)")
            p.add_argument("--threads", type=_positive_int, default=1,
                           help="k values evaluated concurrently")
            p.add_argument("--all-rows", action="store_true", help="also emit rows with Uk = 0")

    p = sub.add_parser("univocal", help="decide k-univocality by exhaustive reconstruction")
    common(p, spectrum_input=True)
    p.add_argument("--guard", type=_positive_int, default=DEFAULT_GUARD,
                   help=f"max spectrum total to enumerate (default {DEFAULT_GUARD})")
    p.add_argument("--limit", type=_positive_int, default=10000, help="max realizations listed")
    p.set_defaults(func=cmd_univocal, needs_fasta=False)

    p = sub.add_parser("assemble", help="greedy segmentation of a spectrum")
    common(p, spectrum_input=True)
    p.set_defaults(func=cmd_assemble, needs_fasta=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.needs_fasta and not args.fasta:
        parser.error("--fasta is required")
    buf = io.StringIO()
    try:
        code = args.func(args, parser, buf)
    except (CliError, ValueError, OSError) as exc:
        print(f"kspectra {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        if args.out:
            Path(args.out).write_text(buf.getvalue(), encoding="ascii")
        else:
            sys.stdout.write(buf.getvalue())
    except OSError as exc:
        print(f"kspectra {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return code


if __name__ == "__main__":
    sys.exit(main())
