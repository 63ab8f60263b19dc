"""Command line: ``lerwray <subcommand> [--config FILE] [--key value]...``

CSV goes to ``--output`` (stdout if absent), the JSON summary to
``--summary`` (stderr if absent).  Exit codes: 0 ok, 2 config error,
3 infeasible schedule.
"""

import argparse
import logging
import sys

from .experiments import SUBCOMMANDS, ConfigError, parse_config, run_experiment
from .segments import ScheduleInfeasible

log = logging.getLogger("lerwray")


def _pairs(tokens):
    flags = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise ConfigError(f"unexpected argument {tok!r}")
        key, eq, val = tok[2:].partition("=")
        if not eq:
            val = next(it, None)
            if val is None:
                raise ConfigError(f"missing value for --{key}")
        flags[key.replace("-", "_")] = val
    return flags


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="lerwray", description=__doc__.splitlines()[0])
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--config", help="file of key=value lines")
    args, rest = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        flags = _pairs(rest)
        flags["subcommand"] = args.subcommand
        cfg = parse_config(text, flags)
        result = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScheduleInfeasible as exc:
        print(f"infeasible schedule: {exc}", file=sys.stderr)
        return 3
    if cfg.subcommand == "modulus" and not cfg.output:
        print(format(result.estimates["w"], ".17g"))
    elif not cfg.output:
        sys.stdout.write(result.csv_text())
    if not cfg.summary:
        print(result.json_text(), file=sys.stderr)
    log.info("%s finished in %.2fs", cfg.subcommand, result.wall_clock)
    return 0


if __name__ == "__main__":
    sys.exit(main())
