"""``enose`` command line: simulate, sweep, classify, canlog.

Exit codes: 0 success, 2 bad config / input file / arguments, 3 model error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import can, config
from .classifier import CSV_HEADER, FingerprintLibrary, classify
from .errors import EnoseError, InputError, ParseError
from .gas_model import GasMixture, GasSpecies
from .pipeline import simulate, sweep

EXIT_OK, EXIT_INPUT, EXIT_MODEL = 0, 2, 3
KINDS = ("reading", "classification", "alert")


def _load_config(args) -> config.RunConfig:
    cfg = config.load(args.config) if args.config else config.RunConfig.default()
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _parse_gas(text: str) -> tuple[GasSpecies, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected GAS=PPM, got {text!r}")
    try:
        return GasSpecies.parse(name), float(value)
    except (EnoseError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _species(text: str) -> GasSpecies:
    try:
        return GasSpecies.parse(text)
    except EnoseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(out: Path | None, name: str, text: str, stdout):
    if out is None:
        stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8", newline="\n")


def cmd_simulate(args, stdout):
    cfg = _load_config(args)
    mixture = GasMixture.of({sp: c for sp, c in args.gas or []})
    result = simulate(cfg, mixture)
    out = Path(args.out)
    for path in result.write(out):
        print(path, file=stdout)
    print(CSV_HEADER, file=stdout)
    print(result.classification.csv_row(), file=stdout)


def cmd_sweep(args, stdout):
    cfg = _load_config(args)
    table = sweep(cfg, args.gas, args.c_min, args.c_max, args.points)
    out = Path(args.out) if args.out else None
    stem = f"sweep_{args.gas.name.lower()}"
    _write(out, f"{stem}.csv", table.csv(), stdout)
    if args.plot:
        if out is None:
            raise ParseError("--plot needs --out")
        _write(out, f"{stem}_rs_ro.svg", table.svg_ratio(), stdout)
        _write(out, f"{stem}_v_rl.svg", table.svg_voltage(), stdout)


def read_ratios(text: str) -> list[float]:
    """Five Rs/Ro values from a feature CSV.

    Accepts the ``features.csv`` written by ``simulate`` (one row per sensor
    with a ``steady_ratio`` column) or a single row of five ratios with an
    optional header line.
    """
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
    if not rows:
        raise ParseError("empty feature file")
    header = [h.strip() for h in rows[0]]
    if "steady_ratio" in header:
        col = header.index("steady_ratio")
        body = rows[1:]
        if len(body) != 5:
            raise ParseError(f"expected 5 sensor rows, found {len(body)}")
        values = []
        for i, row in enumerate(body, start=2):
            if len(row) != len(header):
                raise ParseError(f"row {i}: expected {len(header)} columns, found {len(row)}")
            values.append(_float(row[col], i, col + 1))
        return values
    if not _is_numeric(header):
        rows = rows[1:]
    if len(rows) != 1:
        raise ParseError(f"expected a single row of 5 ratios, found {len(rows)} rows")
    row = rows[0]
    row_no = 2 if not _is_numeric(header) else 1
    if len(row) != 5:
        raise ParseError(f"row {row_no}: expected 5 columns, found {len(row)}")
    return [_float(v, row_no, j) for j, v in enumerate(row, start=1)]


def _is_numeric(row):
    try:
        [float(v) for v in row]
    except ValueError:
        return False
    return True


def _float(text, row, col):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"row {row}, column {col}: not a number: {text!r}") from None


def cmd_classify(args, stdout):
    cfg = _load_config(args)
    ratios = read_ratios(Path(args.features).read_text(encoding="utf-8"))
    result = classify(FingerprintLibrary(cfg.specs), ratios, cfg.classifier)
    text = CSV_HEADER + "\n" + result.csv_row() + "\n"
    if args.out:
        _write(Path(args.out), "classification.csv", text, stdout)
    stdout.write(text)


def cmd_canlog(args, stdout):
    text = Path(args.log).read_text(encoding="utf-8")
    log = can.parse_log(text)
    lines = [n for n, line in enumerate(text.splitlines(), start=1) if line.strip()]
    for lineno, entry in zip(lines, log):
        try:
            msg = can.decode(entry.frame)
        except InputError as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None
        if args.filter and can.message_kind(msg) != args.filter:
            continue
        stdout.write(f"{entry.tick} {entry.sender} {can.describe(msg)}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration (default: built-in default.conf)")
    common.add_argument("--seed", type=int, help="override the noise seed")
    common.add_argument("--out", metavar="DIR", help="output directory")

    p = argparse.ArgumentParser(prog="enose", description="Electronic-nose simulator and gas identifier.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="run one sample through the full pipeline")
    s.add_argument("--gas", action="append", type=_parse_gas, metavar="GAS=PPM",
                   help="sample concentration, repeatable; omit for a clean-air blank")
    s.set_defaults(func=cmd_simulate, out_default="out")

    s = sub.add_parser("sweep", parents=[common], help="steady-state sensitivity curves for one gas")
    s.add_argument("--gas", type=_species, required=True, help="species name, e.g. methane or H2")
    s.add_argument("--c-min", type=float, default=100.0, help="lowest concentration, ppm (default 100)")
    s.add_argument("--c-max", type=float, default=10000.0, help="highest concentration, ppm (default 10000)")
    s.add_argument("--points", type=int, default=50, help="log-spaced grid points (default 50)")
    s.add_argument("--plot", action="store_true", help="also write Rs/Ro and V_RL SVG charts")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("classify", parents=[common], help="identify the gas behind a feature CSV")
    s.add_argument("features", metavar="FEATURES_CSV")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("canlog", parents=[common], help="decode a bus log")
    s.add_argument("log", metavar="BUS_LOG")
    s.add_argument("--filter", choices=KINDS)
    s.set_defaults(func=cmd_canlog)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "out_default", None) and not args.out:
        args.out = args.out_default
    try:
        args.func(args, stdout)
    except InputError as exc:
        print(f"enose {args.command}: error: {exc}", file=stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"enose {args.command}: error: {exc}", file=stderr)
        return EXIT_INPUT
    except EnoseError as exc:
        print(f"enose {args.command}: model error: {exc}", file=stderr)
        return EXIT_MODEL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
