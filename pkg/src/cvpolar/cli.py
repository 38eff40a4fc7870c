"""Command line interface.

Bit vectors are printed as hex strings: bits are taken in index order,
four per digit with the lowest index as the digit's most significant bit,
and zero padded at the end.  Channel LLR input holds one frame per line as
whitespace separated floats.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .frozen_io import FrozenFileError, format_frozen, read_frozen
from .listdec import ListDecoder
from .sc import SCDecoder
from .sim import (
    REPORT_COLUMNS,
    ChannelModel,
    DecoderConfig,
    ebn0_to_sigma,
    mc_construct,
    opcount_report,
    run_fer,
    write_csv,
)
from .transform import encode


def bits_to_hex(bits) -> str:
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-len(bits)) % 4
    b = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)]).reshape(-1, 4)
    return "".join(f"{v:x}" for v in b @ np.array([8, 4, 2, 1]))


def hex_to_bits(text: str, length: int) -> np.ndarray:
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    digits = -(-length // 4)
    if len(text) != digits:
        raise ValueError(f"expected {digits} hex digits for {length} bits, got {len(text)}")
    try:
        vals = [int(ch, 16) for ch in text]
    except ValueError:
        raise ValueError(f"invalid hex string {text!r}") from None
    bits = np.array([(v >> s) & 1 for v in vals for s in (3, 2, 1, 0)], dtype=np.uint8)
    if bits[length:].any():
        raise ValueError("nonzero padding bits")
    return bits[:length]


def _frames(fh, n: int):
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        try:
            y = np.array([float(t) for t in line.split()])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if y.shape != (n,):
            raise ValueError(f"line {lineno}: expected {n} LLRs, got {y.size}")
        yield y


def _open_in(path):
    return sys.stdin if path in (None, "-") else open(path, encoding="utf-8")


def _cmd_encode(args, out):
    spec = read_frozen(args.frozen)
    msgs = args.hex or [line for line in _open_in(args.input) if line.strip()]
    for text in msgs:
        out.write(bits_to_hex(encode(spec.embed(hex_to_bits(text, spec.k)))) + "\n")


def _cmd_decode(args, out, dec):
    with _open_in(args.llr) as fh:
        for y in _frames(fh, dec.spec.n):
            out.write(bits_to_hex(dec.decode(y)) + "\n")


def _cmd_decode_sc(args, out):
    _cmd_decode(args, out, SCDecoder(read_frozen(args.frozen), args.mode))


def _cmd_decode_list(args, out):
    spec = read_frozen(args.frozen)
    _cmd_decode(args, out, ListDecoder(spec, args.l, args.mode, args.skip_head, args.sc_tail))


def _cmd_simulate(args, out):
    spec = read_frozen(args.frozen)
    rate = spec.k / spec.n
    results = []
    for snr in args.snr:
        channel = ChannelModel.awgn_ebn0(snr, rate)
        for l in args.l:
            cfg = DecoderConfig(l, args.mode, args.skip_head, args.sc_tail)
            results.append(run_fer(spec, channel, cfg, args.trials, args.seed, snr,
                                   timing=not args.no_timing))
    write_csv(results, out)


def _cmd_opcount(args, out):
    import csv

    w = csv.DictWriter(out, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(opcount_report(args.min_n, args.max_n, args.mode))


def _cmd_construct(args, out):
    sigma = ebn0_to_sigma(args.design_snr, args.k / args.n)
    spec = mc_construct(args.n, args.k, sigma, args.trials, args.seed)
    out.write(format_frozen(spec))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvpolar", description="Convolutional polar code tools.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode hex messages into hex codewords")
    p.add_argument("--frozen", required=True, help="frozen-set file")
    p.add_argument("--hex", nargs="+", help="messages (default: one per line from --input)")
    p.add_argument("--input", default="-", help="message file, '-' for stdin")
    p.set_defaults(func=_cmd_encode)

    def decoder_args(p):
        p.add_argument("--frozen", required=True, help="frozen-set file")
        p.add_argument("--llr", default="-", help="LLR file, one frame per line; '-' for stdin")

    p = sub.add_parser("decode-sc", help="successive cancellation decoding")
    decoder_args(p)
    p.add_argument("--mode", choices=("sf", "eff"), default="eff")
    p.set_defaults(func=_cmd_decode_sc)

    p = sub.add_parser("decode-list", help="list decoding")
    decoder_args(p)
    p.add_argument("-l", type=int, required=True, help="list size")
    p.add_argument("--mode", choices=("sf", "eff"), default="eff")
    p.add_argument("--skip-head", action="store_true", help="skip scoring before the first information bit")
    p.add_argument("--sc-tail", action="store_true", help="plain SC after the last frozen bit")
    p.set_defaults(func=_cmd_decode_list)

    p = sub.add_parser("simulate", help="frame error rate over AWGN, CSV output")
    p.add_argument("--frozen", required=True, help="frozen-set file")
    p.add_argument("--snr", type=float, nargs="+", required=True, help="Eb/N0 in dB")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-l", type=int, nargs="+", default=[1], help="list sizes (1 = SC)")
    p.add_argument("--mode", choices=("sf", "eff"), default="eff")
    p.add_argument("--skip-head", action="store_true")
    p.add_argument("--sc-tail", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="report wall_ms as 0")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("opcount", help="counted operations per SC decode, CSV output")
    p.add_argument("--min-n", type=int, required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--mode", choices=("sf", "eff"), default="eff")
    p.set_defaults(func=_cmd_opcount)

    p = sub.add_parser("construct", help="Monte-Carlo frozen-set construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--design-snr", type=float, required=True, help="design Eb/N0 in dB")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_construct)
    return ap


def main(argv=None, out=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    out = out or sys.stdout
    try:
        args.func(args, out)
    except (FrozenFileError, ValueError, OSError) as exc:
        print(f"cvpolar: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
