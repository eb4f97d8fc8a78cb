"""Batch entry points: run, verify, study.

Exit codes: 0 success/completion, 1 configuration or usage error,
2 invariant abort (the run tripped a monitor). Every run writes history.csv,
a final snapshot, and an atomically-renamed run_manifest.json listing the
outputs it produced. MHD_LAB_OUT overrides --out-dir.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, parse_config
from .diagnostics import write_history
from .grid import save_snapshot
from .presets import make_initial_state
from .solver import HypothesisViolation, run


def _out_dir(args) -> Path:
    out = os.environ.get("MHD_LAB_OUT", args.out_dir)
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(out_dir: Path, payload: dict) -> None:
    tmp = out_dir / "run_manifest.json.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
    os.replace(tmp, out_dir / "run_manifest.json")


def _config_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def cmd_run(args) -> int:
    started = time.time()
    try:
        setup = parse_config(args.config)
        s0 = make_initial_state(
            setup.init_preset, setup.grid, setup.phi, setup.cfg, **setup.init_params
        )
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out_dir = _out_dir(args)
    try:
        result = run(s0, setup.flow, setup.phi, setup.cfg)
    except HypothesisViolation as exc:
        print(f"initial data rejected: {exc}", file=sys.stderr)
        _write_manifest(
            out_dir,
            {
                "config_hash": _config_hash(args.config),
                "code_version": __version__,
                "started": started,
                "ended": time.time(),
                "abort_reason": f"hypothesis: {exc}",
                "outputs": [],
            },
        )
        return 2

    history_path = out_dir / "history.csv"
    write_history(history_path, result.history)
    t_final = result.history[-1].t if result.history else setup.cfg.t_end
    snap_path = out_dir / f"snapshot_{t_final:.6g}.json"
    save_snapshot(
        snap_path,
        {"u": result.state.u, "theta": result.state.theta, "h": result.state.h},
        t_final,
        extra={"abort": result.abort_reason or "completed"},
    )
    outputs = [history_path.name, snap_path.name]
    _write_manifest(
        out_dir,
        {
            "config_hash": _config_hash(args.config),
            "code_version": __version__,
            "started": started,
            "ended": time.time(),
            "abort_reason": result.abort_reason or "completed",
            "floor_horizon": result.floor_horizon,
            "flags": result.flags,
            "outputs": outputs,
        },
    )
    if result.abort_reason:
        print(f"run aborted: {result.abort_reason}", file=sys.stderr)
        return 2
    print(f"run completed to t={t_final:.6g}; outputs in {out_dir}")
    return 0


def cmd_verify(args) -> int:
    from . import verification as ver

    suites = {
        "inequalities": ver.verify_inequalities,
        "mms": ver.verify_mms,
        "epsilon": ver.verify_epsilon,
        "uniqueness": ver.verify_uniqueness,
    }
    if args.suite != "all" and args.suite not in suites:
        print(
            f"unknown suite '{args.suite}' (choose from "
            f"{', '.join([*suites, 'all'])})",
            file=sys.stderr,
        )
        return 1
    selected = list(suites) if args.suite == "all" else [args.suite]
    out_dir = _out_dir(args)
    report = {"seed": args.seed, "n_samples": args.n, "checks": []}
    ok = True
    for name in selected:
        sub = suites[name](seed=args.seed, n_samples=args.n)
        report["checks"].extend(sub)
        for check in sub:
            status = "pass" if check["pass"] else "FAIL"
            print(f"[{status}] {check['name']}: {check['detail']}")
            ok &= check["pass"]
    report["pass"] = ok
    with open(out_dir / "verification_report.json", "w") as fh:
        json.dump(report, fh, indent=2)
    return 0 if ok else 1


def cmd_study(args) -> int:
    from . import verification as ver

    out_dir = _out_dir(args)
    try:
        if args.kind == "grid":
            rows = ver.grid_study_rows()
            path = out_dir / "study_grid.csv"
            header = "axis,parameter,error,observed_order"
            schema = "mhdlab.study.grid.v1"
        elif args.kind == "epsilon":
            setup = parse_config(args.config) if args.config else None
            rows = ver.epsilon_study_rows(setup)
            path = out_dir / "study_epsilon.csv"
            header = "axis,parameter,error,observed_order"
            schema = "mhdlab.study.epsilon.v1"
        else:
            print(f"unknown study kind '{args.kind}'", file=sys.stderr)
            return 1
    except (ConfigError, ValueError) as exc:
        print(f"study error: {exc}", file=sys.stderr)
        return 1
    if not rows:
        print("study produced no rows", file=sys.stderr)
        return 1
    with open(path, "w") as fh:
        fh.write(f"# schema={schema}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(
                f"{row[0]},{row[1]:.17g},{row[2]:.17g},"
                + (f"{row[3]:.17g}" if np.isfinite(row[3]) else "nan")
                + "\n"
            )
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mhdlab",
        description="MHD boundary-layer numerical laboratory",
    )
    parser.add_argument(
        "--out-dir", default="out", help="output directory (env MHD_LAB_OUT wins)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="time-integrate a configured problem")
    p_run.add_argument("--config", required=True)
    p_run.set_defaults(fn=cmd_run)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument(
        "suite", choices=None, help="inequalities|mms|epsilon|uniqueness|all"
    )
    p_ver.add_argument("--seed", type=int, default=7)
    p_ver.add_argument("--n", type=int, default=100)
    p_ver.set_defaults(fn=cmd_verify)

    p_study = sub.add_parser("study", help="refinement study CSV")
    p_study.add_argument("kind", help="grid|epsilon")
    p_study.add_argument("--config", default=None)
    p_study.set_defaults(fn=cmd_study)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
