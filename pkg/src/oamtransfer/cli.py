"""``oamtransfer`` command line.

Values come from, lowest precedence first: built-in defaults, the
``OAMTRANSFER_SEED`` environment variable (seed only), ``--config FILE``,
then flags. Exit status: 0 success, 1 invalid input, 2 runtime failure,
3 tomography fit did not converge.
"""

from __future__ import annotations

import argparse
import sys

import yaml
from pydantic import ValidationError

from . import __version__
from .calibration import CalibrationError
from .config import ScenarioConfig, load_file, merge
from .results import to_csv, to_json, write_text
from .tomography import NonConvergenceError

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_NONCONVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input, not runtime failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _pair(text: str) -> list[str]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B (e.g. D,D), got {text!r}")
    return parts


def _ports(text: str) -> dict[str, str]:
    out = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected state=PORT pairs, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--config", metavar="FILE", help="YAML or JSON scenario file")
    g.add_argument("--seed", type=int, help="default: $OAMTRANSFER_SEED, else 20210815")
    g.add_argument("--ell0", type=int, help="OAM charge carried by the qubit (default 1)")
    g.add_argument("--json", dest="out_json", metavar="PATH", help="write the JSON envelope ('-' for stdout)")
    g.add_argument("--csv", dest="out_csv", metavar="PATH", help="write the CSV table ('-' for stdout)")
    n = p.add_argument_group("noise and delay")
    n.add_argument("--depolarizing-p", type=float, help="white noise weight on the source pair")
    n.add_argument("--source-delay-mm", type=float, help="HOM stage offset of the source")
    n.add_argument("--feedforward-flip-prob", type=float, help="chance of a wrongly reported Bell outcome")
    n.add_argument("--half-width-mm", type=float, help="HOM dip half width (default 0.194)")
    n.add_argument("--sigma-mm", type=float, help="Gaussian overlap scale, instead of --half-width-mm")


def _input_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input state (default: the six poles)")
    g.add_argument("--pole", help="0, 1, D, A, R or L")
    g.add_argument("--alpha", type=float, nargs=2, metavar=("RE", "IM"))
    g.add_argument("--beta", type=float, nargs=2, metavar=("RE", "IM"))


def _shots_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--shots", type=int, help="sample this many shots per input")
    g.add_argument("--exact", action="store_true", help="exact outcome weights (the default)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oamtransfer", description="Simulate polarization-to-OAM qubit transfer with linear optics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="COMMAND")

    p = sub.add_parser("hom-scan", help="coincidence curves versus stage position")
    _common(p)
    p.add_argument("--basis", action="append", type=_pair, metavar="A,B",
                   help="basis pair, repeatable (default: eight D/A and R/L pairs)")
    p.add_argument("--start-mm", type=float)
    p.add_argument("--stop-mm", type=float)
    p.add_argument("--points", type=int)

    p = sub.add_parser("source-verify", help="fidelity of the post-selected OAM pair")
    _common(p)

    p = sub.add_parser("bsm-verify", help="port matrix of the Bell-state analyser")
    _common(p)
    p.add_argument("--ports", type=_ports, metavar="S=P,...", help="e.g. omega+=A,omega-=B,xi+=C,xi-=D")

    p = sub.add_parser("teleport", help="teleport input states and score the result")
    _common(p)
    _input_args(p)
    _shots_args(p)
    p.add_argument("--mode", choices=("apply", "verify"))
    p.add_argument("--ports", type=_ports, metavar="S=P,...")

    p = sub.add_parser("tomo", help="teleport, tomograph and reconstruct by MLE")
    _common(p)
    _input_args(p)
    p.add_argument("--shots-per-basis", type=int)
    p.add_argument("--multinomial", action="store_true", help="fixed trials per basis instead of Poisson")
    p.add_argument("--bootstrap", type=int, help="bootstrap resamples for the error bars")
    p.add_argument("--teleport-shots", type=int)
    p.add_argument("--max-iter", type=int, help="MLE iteration cap (default 10000)")
    p.add_argument("--lenient", action="store_true", help="report a non-converged fit instead of failing")

    p = sub.add_parser("calibrate", help="fit the noise model to target fidelities")
    _common(p)
    p.add_argument("--target-source", type=float, help="post-selected pair fidelity (default 0.9255)")
    p.add_argument("--target-avg", type=float, help="six-pole teleportation fidelity (default 0.918)")
    p.add_argument("--source-only", action="store_true", help="ignore the average-fidelity target")
    return parser


def _overrides(a: argparse.Namespace) -> dict:
    get = lambda name: getattr(a, name, None)  # noqa: E731
    out = {
        "seed": a.seed,
        "ell0": a.ell0,
        "shots": get("shots"),
        "mode": get("mode"),
        "ports": get("ports"),
        "noise": {
            "depolarizing_p": a.depolarizing_p,
            "source_delay_mm": a.source_delay_mm,
            "feedforward_flip_prob": a.feedforward_flip_prob,
        },
        "delay": {"half_width_mm": a.half_width_mm, "sigma_mm": a.sigma_mm},
        "output": {"json_path": a.out_json, "csv_path": a.out_csv},
        "hom_scan": {"bases": get("basis"), "start_mm": get("start_mm"),
                     "stop_mm": get("stop_mm"), "points": get("points")},
        "tomo": {"shots_per_basis": get("shots_per_basis"), "bootstrap": get("bootstrap"),
                 "teleport_shots": get("teleport_shots"), "max_iter": get("max_iter"),
                 "poisson": False if get("multinomial") else None,
                 "strict": False if get("lenient") else None},
        "calibrate": {"target_source_fidelity": get("target_source"),
                      "target_avg_fidelity": get("target_avg")},
    }
    if get("pole") is not None or get("alpha") is not None or get("beta") is not None:
        out["input"] = {"pole": get("pole"), "alpha": get("alpha"), "beta": get("beta")}
    return out


def resolve_config(a: argparse.Namespace) -> ScenarioConfig:
    data = load_file(a.config) if a.config else {}
    file_exp = data.get("experiment")
    if file_exp is not None and file_exp != a.experiment:
        raise ValueError(f"config file is for {file_exp!r}, command is {a.experiment!r}")
    over = _overrides(a)
    cli_input = over.pop("input", None)
    data = merge(data, over)
    data["experiment"] = a.experiment
    if getattr(a, "exact", False):
        data["shots"] = None
    if getattr(a, "source_only", False):
        data.setdefault("calibrate", {})["target_avg_fidelity"] = None
    # an input given on the command line replaces the file's input wholesale
    if cli_input is not None:
        data["input"] = {k: v for k, v in cli_input.items() if v is not None}
    return ScenarioConfig.model_validate(data)


def _error(msg: str) -> None:
    print(f"oamtransfer: error: {msg}", file=sys.stderr)


def _format_validation(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(x) for x in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "invalid scenario\n  " + "\n  ".join(lines)


def main(argv: list[str] | None = None) -> int:
    from .runner import run

    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ValidationError as exc:
        _error(_format_validation(exc))
        return EXIT_INVALID
    except (OSError, ValueError, yaml.YAMLError) as exc:
        _error(str(exc))
        return EXIT_INVALID

    try:
        env = run(cfg)
    except CalibrationError as exc:
        _error(str(exc))
        return EXIT_INVALID
    except NonConvergenceError as exc:
        _error(str(exc))
        return EXIT_NONCONVERGED
    except Exception as exc:  # noqa: BLE001
        _error(f"{type(exc).__name__}: {exc}")
        return EXIT_RUNTIME

    try:
        if cfg.output.json_path is None and cfg.output.csv_path is None:
            write_text("-", to_json(env))
        if cfg.output.json_path is not None:
            write_text(cfg.output.json_path, to_json(env))
        if cfg.output.csv_path is not None:
            write_text(cfg.output.csv_path, to_csv(env.table))
    except OSError as exc:
        _error(str(exc))
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
