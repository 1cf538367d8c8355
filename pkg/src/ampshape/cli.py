"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 on data or integrity errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis
from .combinatorics import Alphabet, build_mr_lut, build_sr_lut, dump_lut
from .errors import ShapingError
from .ranking import Engine
from .shapers import (
    build_ccdm,
    build_hcss,
    build_mpdm,
    deshape,
    dump_codebook,
    load_codebook,
    shape,
)
from .sphere import build_shell_spectrum, sphere_metrics, sphere_usage


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    """Parse ``"20,40,60"`` or a range ``"0-24"``."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _k_from(args) -> int:
    if args.k is not None:
        return args.k
    if args.rate is not None:
        return math.ceil(Fraction(args.rate) * args.n)
    raise UsageError("one of --k or --rate is required")


def _add_rate(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, help="input bits per block")
    g.add_argument("--rate", type=str, help="bits per amplitude symbol; k = ceil(rate * n)")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _alphabet_for_pmf(args) -> Alphabet:
    if args.amps:
        return Alphabet.parse(args.amps)
    return Alphabet.ask(len(args.pmf))


# -- bit I/O ------------------------------------------------------------------

def _hex_to_bits(text: str) -> str:
    text = text.strip().lower().removeprefix("0x")
    try:
        value = int(text, 16) if text else 0
    except ValueError:
        raise UsageError(f"not a hex string: {text!r}") from None
    return format(value, f"0{4 * len(text)}b") if text else ""


def _bytes_to_bits(data: bytes) -> str:
    return "".join(format(b, "08b") for b in data)


def _bits_to_hex(bits: str) -> str:
    if len(bits) % 4:
        raise UsageError(f"{len(bits)} output bits are not a whole number of hex digits; use --bits")
    return format(int(bits, 2), f"0{len(bits) // 4}x") if bits else ""


def _bits_to_bytes(bits: str) -> bytes:
    if len(bits) % 8:
        raise UsageError(f"{len(bits)} output bits are not a whole number of bytes")
    return int(bits, 2).to_bytes(len(bits) // 8, "big") if bits else b""


# -- subcommands --------------------------------------------------------------

def cmd_build(args) -> int:
    if args.scheme == "hcss":
        alphabet = Alphabet.parse(args.amps) if args.amps else Alphabet()
        cb = build_hcss(args.n, alphabet, _k_from(args), args.engine, args.min_perm_exp)
    else:
        if args.pmf is None:
            raise UsageError(f"build {args.scheme} needs --pmf")
        alphabet = _alphabet_for_pmf(args)
        builder = build_ccdm if args.scheme == "ccdm" else build_mpdm
        cb = builder(args.pmf, args.n, args.engine, alphabet)
    _emit(dump_codebook(cb), args.output)
    return 0


def _read_codebook(path):
    try:
        return load_codebook(Path(path).read_text())
    except OSError as exc:
        raise UsageError(str(exc)) from None


def cmd_shape(args) -> int:
    cb = _read_codebook(args.codebook)
    if args.in_hex is not None:
        bits = _hex_to_bits(args.in_hex)
    elif args.input is not None:
        bits = _bytes_to_bits(Path(args.input).read_bytes())
    else:
        raise UsageError("shape needs --in-hex or --in")
    if len(bits) % cb.k:
        raise UsageError(f"{len(bits)} input bits are not a multiple of k={cb.k}")
    lines = []
    for pos in range(0, len(bits), cb.k):
        seq = shape(cb, bits[pos:pos + cb.k])
        lines.append(",".join(map(str, seq)))
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_deshape(args) -> int:
    cb = _read_codebook(args.codebook)
    text = Path(args.input).read_text() if args.input else sys.stdin.read()
    bits = []
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            seq = [int(t) for t in line.split(",")]
        except ValueError:
            raise UsageError(f"bad symbol line {line!r}") from None
        if len(seq) != cb.n:
            raise UsageError(f"block of {len(seq)} symbols, expected n={cb.n}")
        bits.append(deshape(cb, seq))
    bits = "".join(bits)
    if args.output:
        Path(args.output).write_bytes(_bits_to_bytes(bits))
    elif args.bits:
        sys.stdout.write(bits + "\n")
    else:
        sys.stdout.write(_bits_to_hex(bits) + "\n")
    return 0


def cmd_analyze(args) -> int:
    cb = _read_codebook(args.codebook)
    row = analysis.codebook_row(cb)
    pairs = [
        ("scheme", cb.scheme.value),
        ("engine", cb.engine.value),
        ("n", cb.n),
        ("k", cb.k),
        ("rate", row.rate),
        ("num_compositions", row.num_compositions),
        ("tree_depth", row.tree_depth),
        ("entropy", row.entropy),
        ("rate_loss", row.rate_loss),
        ("avg_energy", row.avg_energy),
        ("lut_bits", row.lut_bits),
    ]
    sys.stdout.write("".join(f"{key}\t{analysis._cell(val)}\n" for key, val in pairs))
    return 0


def cmd_lut(args) -> int:
    if args.kind == "sr":
        if args.n_max is None:
            raise UsageError("lut sr needs --n-max")
        lut = build_sr_lut(args.n_max)
    else:
        if args.n is None:
            raise UsageError("lut mr needs --n")
        m = Alphabet.parse(args.amps).m if args.amps else args.m
        lut = build_mr_lut(args.n, m)
    if args.output:
        Path(args.output).write_text(dump_lut(lut))
    if args.report or not args.output:
        sys.stdout.write(
            f"entries\t{len(lut)}\ntotal_bits\t{lut.total_bits}\nmax_entry_bits\t{lut.max_entry_bits}\n"
        )
    return 0


def cmd_sweep(args) -> int:
    alphabet = Alphabet.parse(args.amps) if args.amps else None
    if args.kind == "rateloss":
        pmf = args.pmf or [0.4, 0.3, 0.2, 0.1]
        schemes = args.schemes.split(",") if args.schemes else analysis.RATE_LOSS_SCHEMES
        rows = analysis.rate_loss_sweep(schemes, pmf, _int_list(args.n_list), alphabet)
        text = analysis.rows_to_tsv(rows)
    elif args.kind == "pruning":
        alphabet = alphabet or Alphabet()
        if args.n is None:
            raise UsageError("sweep pruning needs --n")
        rows = analysis.pruning_sweep(args.n, alphabet, _k_from(args), args.engine, _int_list(args.exponents))
        text = analysis.pruning_to_tsv(rows)
    else:
        m = alphabet.m if alphabet else 4
        text = analysis.lut_sizes_to_tsv(analysis.lut_size_sweep(args.lut_kind, _int_list(args.n_list), m))
    _emit(text, args.output)
    return 0


def cmd_baseline(args) -> int:
    alphabet = Alphabet.parse(args.amps) if args.amps else Alphabet()
    spectrum = build_shell_spectrum(args.n, alphabet)
    if args.spectrum:
        _emit(spectrum.to_tsv(), args.output)
        return 0
    usage = sphere_usage(spectrum, _k_from(args))
    metrics = sphere_metrics(usage)
    pmf = ",".join("%.6f" % p for p in metrics.pmf)
    text = (
        f"n\t{args.n}\nk\t{usage.k}\navg_energy\t{metrics.avg_energy:.6f}\n"
        f"rate_loss\t{metrics.rate_loss:.6f}\npmf\t{pmf}\n"
        f"full_shells\t{usage.full_shells}\nboundary_fraction\t{usage.boundary_fraction}\n"
    )
    _emit(text, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ampshape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="construct a shaper codebook")
    p.add_argument("scheme", choices=["ccdm", "mpdm", "hcss"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--amps")
    p.add_argument("--pmf", type=_float_list)
    _add_rate(p)
    p.add_argument("--engine", type=Engine.parse, default=Engine.MR)
    p.add_argument("--min-perm-exp", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("shape", help="map input bits to amplitude blocks")
    p.add_argument("--codebook", required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--in-hex")
    src.add_argument("--in", dest="input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_shape)

    p = sub.add_parser("deshape", help="map amplitude blocks back to bits")
    p.add_argument("--codebook", required=True)
    p.add_argument("--in", dest="input")
    p.add_argument("--bits", action="store_true", help="print a 0/1 string instead of hex")
    p.add_argument("-o", "--output", help="write raw bytes")
    p.set_defaults(func=cmd_deshape)

    p = sub.add_parser("analyze", help="report metrics of a codebook")
    p.add_argument("codebook")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("lut", help="build a coefficient lookup table")
    p.add_argument("kind", choices=["sr", "mr"])
    p.add_argument("--n-max", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--amps")
    p.add_argument("--report", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_lut)

    p = sub.add_parser("sweep", help="tabulate metrics as TSV")
    p.add_argument("kind", choices=["rateloss", "pruning", "lutsize"])
    p.add_argument("--n", type=int)
    p.add_argument("--n-list", default="20,40,60,80,100")
    p.add_argument("--amps")
    p.add_argument("--pmf", type=_float_list)
    p.add_argument("--schemes")
    _add_rate(p)
    p.add_argument("--engine", type=Engine.parse, default=Engine.MR)
    p.add_argument("--exponents", default="0-24")
    p.add_argument("--lut-kind", choices=["sr", "mr"], default="sr")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("baseline", help="analytic sphere-shaping reference")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--amps")
    _add_rate(p)
    p.add_argument("--spectrum", action="store_true", help="dump the shell spectrum as TSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_baseline)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ampshape: error: {exc}", file=sys.stderr)
        return 1
    except (ShapingError, ValueError, OSError) as exc:
        print(f"ampshape: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
