"""Command-line entry point: ``qslwigner list`` and ``qslwigner run``."""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from . import __version__
from .experiments import EXPERIMENTS, format_value, list_experiments, resolve
from .quantum_core import InvalidArgument
from .two_qubit import IntegrationFailure

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def read_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidArgument(f"{path}:{lineno}: empty key")
        out[key] = value
    return out


def _parse_sets(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise InvalidArgument(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def render_csv(name: str, params: dict, columns, rows, summary: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# qslwigner {__version__}\n")
    buf.write(f"# experiment = {name}\n")
    for key in sorted(params):
        buf.write(f"# {key} = {format_value(params[key])}\n")
    for key, value in summary.items():
        buf.write(f"# summary {key} = {_cell(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def run(experiment: str | None, config: str | None, sets: list[str], out: str) -> int:
    overrides = read_config(config) if config else {}
    name = experiment or overrides.pop("experiment", None)
    overrides.pop("experiment", None)
    if name is None:
        raise InvalidArgument("no experiment given (use --experiment or 'experiment = ...' in the config)")
    overrides.update(_parse_sets(sets))
    params = resolve(name, overrides)
    columns, rows, summary = EXPERIMENTS[name].runner(params)
    text = render_csv(name, params, columns, rows, summary)
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qslwigner", description="Wigner-space QSL and nonclassicality data for open qubit models.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list available experiments")
    r = sub.add_parser("run", help="run an experiment and write CSV")
    r.add_argument("--experiment", "-e", help="experiment name (see 'qslwigner list')")
    r.add_argument("--config", "-c", help="file of 'key = value' lines")
    r.add_argument("--set", "-s", action="append", default=[], metavar="KEY=VALUE",
                   help="override a parameter; lists as a,b,c or start:stop:num")
    r.add_argument("--out", "-o", required=True, help="output CSV path, or - for stdout")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(list_experiments()))
        return EXIT_OK
    try:
        return run(args.experiment, args.config, args.set, args.out)
    except InvalidArgument as exc:
        print(f"qslwigner: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qslwigner: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationFailure as exc:
        print(f"qslwigner: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
