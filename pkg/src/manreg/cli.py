"""Command line front end.

Subcommands: sim (run one scenario config), compare (run the matched
tracking/regulation pair described by one mode-less config), certify
(solve and report the gain certificate), plotdata (split a trace CSV
into tidy per-panel CSVs for plotting tools). Exit codes: 0 success,
1 bad configuration or usage, 2 rollout diverged.
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from .harness import compare, run_scenario
from .lyapunov import CertificateError, NonHurwitzError, certify
from .scenarios import scenario_from_dict, scenario_pair_from_dict
from .trace import SchemaError, TraceLog
from .tracking import Gains


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # diverged rollouts, so usage problems map to 1 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _emit(payload: dict, out_path=None) -> None:
    text = json.dumps(payload, indent=2)
    if out_path is not None:
        pathlib.Path(out_path).write_text(text + "\n")
    print(text)


def _out_dir(args) -> pathlib.Path | None:
    if not args.out:
        return None
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_sim(args) -> int:
    try:
        sc = scenario_from_dict(_load_config(args.config))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad scenario config: {exc}") from exc
    result = run_scenario(sc)
    out = _out_dir(args)
    if out is not None:
        result.trace.write_csv(out / "trace.csv")
        _emit(result.summary(), out / "summary.json")
    else:
        _emit(result.summary())
    return 2 if result.diverged else 0


def _cmd_compare(args) -> int:
    try:
        tracking_sc, regulation_sc = scenario_pair_from_dict(
            _load_config(args.config))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad comparison config: {exc}") from exc
    cr = compare(tracking_sc, regulation_sc)
    out = _out_dir(args)
    if out is not None:
        cr.tracking.trace.write_csv(out / "tracking.csv")
        cr.regulation.trace.write_csv(out / "regulation.csv")
        _emit(cr.summary(), out / "summary.json")
    else:
        _emit(cr.summary())
    return 2 if (cr.tracking.diverged or cr.regulation.diverged) else 0


def _cmd_certify(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        try:
            gains = Gains(**cfg.get("gains", {}))
            with_integral = bool(cfg.get("with_integral", False))
        except TypeError as exc:
            raise ValueError(f"bad certify config: {exc}") from exc
    else:
        gains = Gains(k_p=args.k_p, k_d=args.k_d, k_psi=args.k_psi,
                      k_i=args.k_i)
        with_integral = args.integral
    cert = certify(gains, with_integral=with_integral)
    _emit(cert.to_dict(), args.out)
    return 0


# per-panel column pulls for plotdata; speed norms are derived
_PANELS = {
    "path": ("p1", "p2", "pd1", "pd2"),
    "positions": ("t", "p1", "p2", "p3", "pd1", "pd2", "pd3"),
    "roll": ("t", "phi_cmd", "sat_phi"),
    "pitch": ("t", "theta_cmd", "sat_theta"),
    "thrust": ("t", "f", "sat_f"),
    "tau": ("t", "tau"),
}


def _cmd_plotdata(args) -> int:
    log = TraceLog.read_csv(args.trace)
    out = _out_dir(args)
    if out is None:
        raise ValueError("plotdata needs --out")
    written = []
    for panel, names in _PANELS.items():
        _write_panel(out / f"{panel}.csv", names, log.cols(*names))
        written.append(f"{panel}.csv")
    speed = np.linalg.norm(log.cols("v1", "v2", "v3"), axis=1)
    speed_d = np.linalg.norm(log.cols("vd1", "vd2", "vd3"), axis=1)
    _write_panel(out / "speed.csv", ("t", "speed", "speed_d"),
                 np.column_stack([log.col("t"), speed, speed_d]))
    written.append("speed.csv")
    print(json.dumps({"written": sorted(written)}, indent=2))
    return 0


def _write_panel(path, names, data) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in np.atleast_2d(data):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manreg",
                     description="trajectory tracking vs maneuver regulation "
                                 "rollouts for a reduced vertical-takeoff "
                                 "vehicle model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="run one scenario config")
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", help="directory for trace.csv and summary.json")
    p.set_defaults(func=_cmd_sim)

    p = sub.add_parser("compare",
                       help="run the tracking/regulation pair of one "
                            "mode-less config")
    p.add_argument("--config", required=True,
                   help="scenario JSON file without a mode field")
    p.add_argument("--out", help="directory for tracking.csv, regulation.csv "
                                 "and summary.json")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("certify", help="solve the gain certificate")
    p.add_argument("--config",
                   help="JSON file with a gains object and optional "
                        "with_integral flag")
    p.add_argument("--k-p", type=float, default=Gains().k_p)
    p.add_argument("--k-d", type=float, default=Gains().k_d)
    p.add_argument("--k-psi", type=float, default=Gains().k_psi)
    p.add_argument("--k-i", type=float, default=Gains().k_i)
    p.add_argument("--integral", action="store_true",
                   help="certify the integral-augmented loop")
    p.add_argument("--out", help="write the certificate JSON here")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("plotdata",
                       help="split a trace CSV into tidy per-panel CSVs")
    p.add_argument("--trace", required=True, help="trace CSV file")
    p.add_argument("--out", required=True, help="directory for panel CSVs")
    p.set_defaults(func=_cmd_plotdata)

    return parser


def entry(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NonHurwitzError, CertificateError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(entry())
