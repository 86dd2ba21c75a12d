"""Command-line runner: ``lrb-lab run config.json [--output-dir DIR] [--threads N]``.

Exit status: 0 when every row passes, 1 on violations, 2 for an invalid
config, 3 when a dense object would exceed ``LRB_LAB_DIM_CAP``, 4 when a
model fails an experiment precondition (not gapped, not commuting).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import DimensionCapError, LocalOp, PauliString
from .decay import DecayFn, decay_from_dict, power_law
from .experiments import (
    NotGappedError,
    SweepReport,
    run_decay_correlations,
    run_localization_sweep,
    run_lppl,
    run_lrb_sweep,
    run_oracle_equivalence,
    run_sharpness,
    run_stability,
)
from .lattice import SiteGraph, build_graph
from .model import NonCommutingError, build_model, toric_edge_graph

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "validate_config",
    "run_config",
    "emit_report",
    "write_csv",
    "shipped_configs",
    "main",
]

EXIT_OK, EXIT_VIOLATIONS, EXIT_CONFIG, EXIT_DIMCAP, EXIT_PRECONDITION = 0, 1, 2, 3, 4

EXPERIMENTS = {
    "sharpness": "Remark 3.4 / Section 3.5.1 protocols: analytic <= measured <= Cor. 3.7",
    "lrb_sweep": "commutator bounds: Cor. 3.7(i), Thm 3.3(i), Thm 3.2(i), Thm 3.6",
    "localization_sweep": "operator localization: Cor. 3.7(ii), Thm 3.3(ii), Thm 3.2(ii), Thm 3.6",
    "decay_correlations": "Thm 4.1 decay of correlations in a gapped ground state",
    "lppl": "Thm 4.2 LPPL and its perturbed Lieb-Robinson premise",
    "stability": "Section 4.3 decomposition identity, Phi^int norm bound, XXZ curves",
    "oracle_equivalence": "Lemma 3.5: commuting engine vs dense oracle on random models",
}

DEFAULT_TOLERANCES = {"equality": 1e-10, "inequality_slack": -1e-12, "ode": 1e-8}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


# ---------------------------------------------------------------------------
# config parsing


def _get(d: dict, key: str, path: str, kind=None, required=True, default=None):
    if key not in d:
        if required:
            raise ConfigError(f"{path}.{key}" if path else key, "missing")
        return default
    val = d[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind}, got {type(val).__name__}")
    return val


def _graph(spec: dict) -> SiteGraph:
    if not isinstance(spec, dict):
        raise ConfigError("graph", "expected an object")
    kind = spec.get("kind")
    try:
        if kind == "toric_edges":
            return toric_edge_graph(int(_get(spec, "L", "graph")))
        return build_graph(kind, int(spec.get("D", 1)), int(_get(spec, "L", "graph")),
                           int(spec.get("q", 2)))
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError("graph", str(exc)) from exc


def _grid(cfg: dict, name: str, required: bool) -> list[float] | None:
    grids = cfg.get("grids", {})
    if not isinstance(grids, dict):
        raise ConfigError("grids", "expected an object")
    if name not in grids:
        if required:
            raise ConfigError(f"grids.{name}", "missing")
        return None
    vals = grids[name]
    if not isinstance(vals, list) or not vals:
        raise ConfigError(f"grids.{name}", "must be a non-empty list")
    try:
        out = [float(v) for v in vals]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grids.{name}", f"non-numeric entry ({exc})") from exc
    if any(not math.isfinite(v) for v in out):
        raise ConfigError(f"grids.{name}", "entries must be finite")
    return out


def _sites_ok(g: SiteGraph, sites, field: str) -> list[int]:
    try:
        sites = [int(s) for s in sites]
    except (TypeError, ValueError) as exc:
        raise ConfigError(field, f"expected a list of site ids ({exc})") from exc
    bad = [s for s in sites if not 0 <= s < g.n_sites]
    if bad:
        raise ConfigError(field, f"sites {bad} are not in the graph (0..{g.n_sites - 1})")
    if not sites:
        raise ConfigError(field, "must be non-empty")
    return sites


def _observable(g: SiteGraph, spec, field: str) -> LocalOp:
    """``"X0 Z3"`` or ``{"pauli": "X0", "coefficient": 0.5}``."""
    coef = 1.0
    if isinstance(spec, dict):
        coef = float(spec.get("coefficient", 1.0))
        spec = spec.get("pauli")
    if not isinstance(spec, str):
        raise ConfigError(field, "expected a Pauli label such as 'X0 Z3'")
    try:
        string = PauliString.from_label(spec)
    except (ValueError, IndexError) as exc:
        raise ConfigError(field, f"cannot parse {spec!r} ({exc})") from exc
    if not string.support:
        raise ConfigError(field, "observable must act on at least one site")
    _sites_ok(g, string.support, field)
    return string.to_local_op() * coef


def _decay(cfg: dict, model_spec: dict | None) -> DecayFn:
    params = cfg.get("params", {})
    spec = params.get("decay")
    try:
        if spec is not None:
            return decay_from_dict(spec)
        if model_spec is not None:
            if "decay" in model_spec:
                return decay_from_dict(model_spec["decay"])
            if model_spec.get("alpha") is not None:
                return power_law(float(model_spec["alpha"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError("params.decay", str(exc)) from exc
    raise ConfigError("params.decay", "missing (and the model does not define one)")


def _model(g: SiteGraph, spec, field: str = "model"):
    if not isinstance(spec, dict):
        raise ConfigError(field, "expected an object")
    try:
        return build_model(g, spec)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(field, str(exc)) from exc


def validate_config(cfg: Any) -> dict:
    """Check the top-level shape; returns the config with defaults filled in."""
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {sorted(EXPERIMENTS)}, got {exp!r}")
    _get(cfg, "graph", "", dict)
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(cfg.get("tolerances", {}))
    for key in ("equality", "ode"):
        if not float(tol[key]) > 0:
            raise ConfigError(f"tolerances.{key}", "must be positive")
    out = dict(cfg)
    out["tolerances"] = tol
    out.setdefault("params", {})
    out.setdefault("grids", {})
    out.setdefault("seed", 0)
    out.setdefault("output", {})
    fmt = out["output"].get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"must be csv or json, got {fmt!r}")
    return out


def build_experiment(cfg: dict, threads: int | None):
    """Parse everything up front; returns a zero-argument callable producing the report."""
    cfg = validate_config(cfg)
    exp = cfg["experiment"]
    g = _graph(cfg["graph"])
    params = cfg["params"]
    tol = cfg["tolerances"]

    if exp == "sharpness":
        proto = _get(params, "protocol", "params", str)
        if proto == "zz_sets":
            X = _sites_ok(g, _get(params, "X", "params", list), "params.X")
            Y = _sites_ok(g, _get(params, "Y", "params", list), "params.Y")
            if set(X) & set(Y):
                raise ConfigError("params.X/params.Y", f"X={X} and Y={Y} overlap")
        elif proto == "cnot_pair":
            _sites_ok(g, [_get(params, "x", "params"), _get(params, "y", "params")], "params.x/y")
            if int(params["x"]) == int(params["y"]):
                raise ConfigError("params.x/params.y", "must differ")
        else:
            raise ConfigError("params.protocol", f"must be zz_sets or cnot_pair, got {proto!r}")
        t = _grid(cfg, "t", True)
        return lambda: run_sharpness(g, proto, params, t, threads, tol["equality"])

    if exp in ("lrb_sweep", "localization_sweep"):
        psi = _model(g, _get(cfg, "model", "", dict))
        F = _decay(cfg, cfg["model"])
        t = _grid(cfg, "t", True)
        r = _grid(cfg, "r", False)
        x0 = _sites_ok(g, [params.get("x0", 0)], "params.x0")[0]
        radii = None if r is None else [int(v) for v in r]
        runner = run_lrb_sweep if exp == "lrb_sweep" else run_localization_sweep
        return lambda: runner(psi, F, t, radii, x0, threads)

    if exp == "decay_correlations":
        psi = _model(g, _get(cfg, "model", "", dict))
        F = _decay(cfg, cfg["model"])
        A = _observable(g, _get(params, "A", "params"), "params.A")
        Bs = [_observable(g, b, f"params.B[{i}]")
              for i, b in enumerate(_get(params, "B", "params", list))]
        for i, B in enumerate(Bs):
            if set(A.support) & set(B.support):
                raise ConfigError(f"params.B[{i}]", f"overlaps supp(A)={list(A.support)}")
        return lambda: run_decay_correlations(
            psi, A, Bs, F, params.get("b_tilde"), params.get("constant_form", "derived")
        )

    if exp == "lppl":
        psi = _model(g, _get(cfg, "model", "", dict))
        F = _decay(cfg, cfg["model"])
        V = _observable(g, _get(params, "V", "params"), "params.V")
        B = _observable(g, _get(params, "B", "params"), "params.B")
        lam = _grid(cfg, "lambda", False)
        t = _grid(cfg, "t", False) or [0.1, 0.25, 0.5, 1.0, 2.0]
        return lambda: run_lppl(psi, V, B, F, lam, t, float(params.get("g_min", 0.0)))

    if exp == "stability":
        psi = _model(g, _get(cfg, "model", "", dict))
        phi = _model(g, _get(params, "phi", "params", dict), "params.phi")
        F = _decay(cfg, None) if "decay" in params else power_law(2.0)
        A = _observable(g, params["A"], "params.A") if "A" in params else None
        deltas = _grid(cfg, "Delta", False)
        curve_t = _grid(cfg, "t", False) or [0.5]
        return lambda: run_stability(
            psi, phi, F, float(params.get("t", 1.0)), float(params.get("s", 0.0)), A,
            tol["ode"], deltas, curve_t,
        )

    # oracle_equivalence
    t = _grid(cfg, "t", False) or [0.3, 1.0, 3.0]
    return lambda: run_oracle_equivalence(
        g, int(cfg["seed"]), int(params.get("n_models", 100)), t,
        int(params.get("n_terms", 12)), tol["equality"], threads,
    )


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _columns(dicts) -> list[str]:
    cols: list[str] = []
    for d in dicts:
        for key in d:
            if key not in cols:
                cols.append(key)
    return cols


def _report_table(report: SweepReport) -> tuple[list[str], list[list[str]]]:
    params = _columns(r.params for r in report.rows)
    extras = [c for c in _columns(r.extras for r in report.rows)
              if c not in params + ["lhs", "rhs", "slack", "pass"]]
    header = params + ["lhs", "rhs", "slack", "pass"] + extras
    body = []
    for r in report.rows:
        line = [_fmt(r.params.get(c)) for c in params]
        line += [_fmt(r.lhs), _fmt(r.rhs), _fmt(r.slack), _fmt(r.passed)]
        line += [_fmt(r.extras.get(c)) for c in extras]
        body.append(line)
    return header, body


def write_csv(path: Path, header: list[str], body: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(body)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def emit_report(report: SweepReport, fmt: str, path: str | Path) -> Path:
    """Write ``report`` rows as CSV (``.17g`` numbers, LF endings) or one JSON document."""
    path = Path(path)
    if fmt == "csv":
        header, body = _report_table(report)
        write_csv(path, header, body)
    elif fmt == "json":
        doc = {
            "name": report.name,
            "rows": [
                {"params": r.params, "lhs": r.lhs, "rhs": r.rhs, "slack": r.slack,
                 "pass": r.passed, **({"extras": r.extras} if r.extras else {})}
                for r in report.rows
            ],
            "summary": report.summary(),
        }
        try:
            path.write_text(json.dumps(_jsonable(doc), indent=2) + "\n", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def run_config(
    cfg: dict, output_dir: str | Path = ".", threads: int | None = None, stem: str | None = None
) -> tuple[int, SweepReport, dict]:
    """Run one experiment and write ``<stem>.csv`` (or ``.json``) plus ``<stem>.summary.json``.

    Raises :class:`ConfigError` before doing any work if the config is invalid.
    """
    start = time.perf_counter()
    job = build_experiment(cfg, threads)
    cfg = validate_config(cfg)
    report = job()
    wall = time.perf_counter() - start

    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or cfg["output"].get("path") or cfg["experiment"]
    fmt = cfg["output"].get("format", "csv")
    data_path = emit_report(report, fmt, out_dir / f"{stem}.{fmt}")
    files = {"rows": data_path.name}
    if report.curves:
        header = _columns(report.curves)
        body = [[_fmt(c.get(k)) for k in header] for c in report.curves]
        write_csv(out_dir / f"{stem}.curves.csv", header, body)
        files["curves"] = f"{stem}.curves.csv"
    summary = {
        "experiment": cfg["experiment"],
        "config": cfg,
        "min_slack": report.min_slack,
        "violations": report.violations,
        "rows": len(report.rows),
        "wall_time_seconds": wall,
        "files": files,
        "meta": report.meta,
    }
    (out_dir / f"{stem}.summary.json").write_text(
        json.dumps(_jsonable(summary), indent=2) + "\n", encoding="utf-8"
    )
    status = EXIT_OK if report.violations == 0 else EXIT_VIOLATIONS
    return status, report, summary


def shipped_configs() -> dict[str, Path]:
    """Name -> path of the configs bundled under ``lrb_lab/configs``."""
    root = resources.files("lrb_lab") / "configs"
    return {
        Path(p.name).stem: Path(str(p))
        for p in sorted(root.iterdir(), key=lambda p: p.name)
        if p.name.endswith(".json")
    }


def _load(path_or_name: str) -> tuple[dict, str]:
    path = Path(path_or_name)
    if not path.exists():
        shipped = shipped_configs()
        if path_or_name in shipped:
            path = shipped[path_or_name]
        else:
            raise ConfigError("<path>", f"no such file or shipped config: {path_or_name}")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh), path.stem
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lrb-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--list-experiments", action="store_true",
                        help="list experiment kinds and shipped configs, then exit")
    sub = parser.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run one JSON config (a path or a shipped config name)")
    run.add_argument("config")
    run.add_argument("--output-dir", default=".")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads for grid points (default: all CPUs)")
    args = parser.parse_args(argv)

    if args.list_experiments:
        for name, desc in EXPERIMENTS.items():
            print(f"{name:20s} {desc}")
        print("\nshipped configs:")
        for name, path in shipped_configs().items():
            print(f"  {name}")
        return EXIT_OK
    if args.command != "run":
        parser.print_help()
        return EXIT_CONFIG
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg, stem = _load(args.config)
        out_stem = cfg.get("output", {}).get("path") if isinstance(cfg, dict) else None
        status, report, summary = run_config(cfg, args.output_dir, args.threads, out_stem or stem)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionCapError as exc:
        print(f"dimension cap: {exc}", file=sys.stderr)
        return EXIT_DIMCAP
    except (NotGappedError, NonCommutingError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    ms = summary["min_slack"]
    print(f"{summary['experiment']}: {summary['rows']} rows, {summary['violations']} violations, "
          f"min slack {ms if ms is None else format(ms, '.3e')}, "
          f"{summary['wall_time_seconds']:.2f}s -> {Path(args.output_dir) / summary['files']['rows']}")
    return status


if __name__ == "__main__":
    sys.exit(main())
