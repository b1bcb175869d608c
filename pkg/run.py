"""
Semi-Markov Credit Engine Entry Point
"""
import argparse
import os
import sys

from app import create_app
from app.commands import COMMANDS, RunSpec, run
from utils.cds_pricing import MODES, RISK_FREE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run.py",
        description="Bivariate semi-Markov reliability and counterparty-risk CDS engine",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--model", required=True, help="model JSON file")
    parser.add_argument("--component", type=int, choices=(1, 2), default=1)
    parser.add_argument("--init", help="initial states S1,S2")
    parser.add_argument("--backward", default="0,0", help="initial backward times V1,V2")
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--target", help="restrict phi output to state J")
    parser.add_argument("--maturity", type=int)
    parser.add_argument("--spread", type=float, default=0.0)
    parser.add_argument("--recovery-c", type=float, default=0.4)
    parser.add_argument("--recovery-b", type=float, default=0.4)
    parser.add_argument("--discount", default="flat:0", help="CSV file s,beta or flat:RATE")
    parser.add_argument("--mode", choices=MODES + (RISK_FREE,), default=MODES[0])
    parser.add_argument("--time", type=int, default=0, help="valuation time t")
    parser.add_argument("--paths", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tmax", type=int)
    parser.add_argument("--out", help="CSV output; a JSON summary is written next to it")
    parser.add_argument("--paths-out", help="simulate: dump every path event to this file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on bad usage, the parse-error code
        return int(e.code or 0)

    spec = RunSpec(**vars(args))
    engine = create_app(os.getenv('ENGINE_CONFIG', 'default'))
    return run(spec, engine)


if __name__ == "__main__":
    sys.exit(main())
