"""Command-line interface.

Subcommands ``gen-data``, ``train``, ``eval`` and ``grid``. Each accepts
``--config FILE`` (or the built-in name ``paper``); values resolve as
built-in defaults < config file < command-line flags.

Exit codes: 0 success, 2 usage error, 3 data/config error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import circuit as circ
from . import data as dat
from . import metrics, trainer
from .errors import ClassifierError, DataError, NumericError, SpecError, UnitarityError

log = logging.getLogger("bosonic_classifier")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

DEFAULTS = {
    "n_train": 200,
    "n_test": 1500,
    "seed": 7,
    "center": list(dat.CIRCLE_CENTER),
    "radius": dat.CIRCLE_RADIUS,
    "init_seed": 0,
    "output_dir": ".",
}


def load_config(ref) -> dict:
    if ref is None:
        return {}
    if ref == "paper":
        text = resources.files("bosonic_classifier").joinpath("configs/paper.json").read_text()
    else:
        path = Path(ref)
        if not path.is_file():
            raise DataError(f"config file not found: {path}")
        text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{ref}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecError(f"{ref}: config must be a JSON object")
    return doc


def pick(flag, cfg: dict, key: str, default=None):
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return DEFAULTS.get(key, default)


def circuit_from(cfg: dict) -> circ.CircuitSpec:
    return circ.from_dict(cfg["circuit"]) if "circuit" in cfg else circ.reference_circuit()


def train_config_from(cfg: dict, args) -> trainer.TrainConfig:
    doc = dict(cfg.get("train", {}))
    overrides = {
        "max_sweeps": args.max_sweeps,
        "rel_tol": args.rel_tol,
        "grid_size": args.grid_size,
        "shots": args.shots,
        "probe_mode": args.probe_mode,
        "seed": args.train_seed,
    }
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return trainer.TrainConfig.from_dict(doc)


def out_dir(args, cfg: dict) -> Path:
    d = Path(pick(args.out_dir, cfg, "output_dir"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def load_theta(path, spec: circ.CircuitSpec) -> tuple[np.ndarray, dict]:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"theta file not found: {path}")
    doc = json.loads(path.read_text())
    theta = np.asarray(doc["theta"], dtype=float)
    if theta.shape != (spec.param_count,) or doc.get("param_count", spec.param_count) != spec.param_count:
        raise SpecError(
            f"{path}: theta has {theta.size} parameters but the circuit needs {spec.param_count}"
        )
    return theta, doc


# -- subcommands ---------------------------------------------------------------

def cmd_gen_data(args) -> int:
    cfg = load_config(args.config)
    dcfg = cfg.get("data", {})
    n_train = pick(args.n_train, dcfg, "n_train")
    n_test = pick(args.n_test, dcfg, "n_test")
    seed = pick(args.seed, dcfg, "seed")
    center = tuple(pick(args.center, dcfg, "center"))
    radius = pick(args.radius, dcfg, "radius")
    if n_train < 1 or n_test < 1:
        raise SpecError("n_train and n_test must be positive")
    out = out_dir(args, cfg)
    # independent draws with distinct seeds, not a split
    train = dat.gen_circle(n_train, center, radius, seed=seed)
    test = dat.gen_circle(n_test, center, radius, seed=seed + 1)
    dat.save_csv(train, out / "train.csv")
    dat.save_csv(test, out / "test.csv")
    for name, ds in (("train", train), ("test", test)):
        print(f"{name}: {len(ds)} points, {int(ds.y.sum())} outside (y=1), {int((ds.y == 0).sum())} inside (y=0)")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    spec = circuit_from(cfg)
    tcfg = train_config_from(cfg, args)
    out = out_dir(args, cfg)
    train_path = Path(args.train_csv) if args.train_csv else out / "train.csv"
    ds = dat.load_csv(train_path)
    if ds.feature_dim != spec.feature_dim:
        raise SpecError(f"{train_path}: {ds.feature_dim} features, circuit expects {spec.feature_dim}")
    init_seed = pick(args.init_seed, cfg, "init_seed")
    theta0 = trainer.initial_theta(spec, init_seed)
    res = trainer.train(spec, theta0, ds, tcfg)
    if not np.all(np.isfinite(res.history)):
        raise NumericError("cost became non-finite during training")
    threshold = spec.threshold
    if args.fit_threshold:
        threshold = circ.fit_threshold(circ.forward_batch(spec, res.theta, ds.X), ds.y)
    write_json(
        out / "theta.json",
        {
            "theta": [float(t) for t in res.theta],
            "param_count": spec.param_count,
            "threshold": threshold,
            "best_index": res.best_index,
            "sweeps": res.sweeps,
            "converged": res.converged,
            "mode": tcfg.mode,
            "init_seed": init_seed,
            "train": tcfg.to_dict(),
        },
    )
    with open(out / "history.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sweep_index", "cost"])
        for i, c in enumerate(res.history):
            w.writerow([i, repr(float(c))])
    print(
        f"trained {res.sweeps} sweeps ({tcfg.mode}); cost {res.history[0]:.6g} -> {res.history[-1]:.6g}; "
        f"best sweep {res.best_index} cost {res.history[res.best_index]:.6g}"
    )
    return EXIT_OK


def _spec_with_theta_threshold(spec, doc) -> circ.CircuitSpec:
    if "threshold" in doc and doc["threshold"] is not None:
        return spec.with_threshold(float(doc["threshold"]))
    return spec


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    spec = circuit_from(cfg)
    out = out_dir(args, cfg)
    theta, doc = load_theta(args.theta or out / "theta.json", spec)
    spec = _spec_with_theta_threshold(spec, doc)
    test_path = Path(args.test_csv) if args.test_csv else out / "test.csv"
    ds = dat.load_csv(test_path)
    if ds.feature_dim != spec.feature_dim:
        raise SpecError(f"{test_path}: {ds.feature_dim} features, circuit expects {spec.feature_dim}")
    result = metrics.metrics_dict(metrics.evaluate(spec, theta, ds))
    result["threshold"] = spec.threshold
    text = json.dumps(result, indent=2)
    print(text)
    (out / "metrics.json").write_text(text + "\n")
    if args.metrics_csv:
        with open(args.metrics_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(list(result))
            w.writerow(list(result.values()))
    if args.grid:
        axis, P = metrics.decision_grid(spec, theta, args.grid)
        metrics.save_grid_csv(spec, axis, P, out / "grid.csv")
    return EXIT_OK


def cmd_grid(args) -> int:
    cfg = load_config(args.config)
    spec = circuit_from(cfg)
    out = out_dir(args, cfg)
    theta, doc = load_theta(args.theta or out / "theta.json", spec)
    spec = _spec_with_theta_threshold(spec, doc)
    axis, P = metrics.decision_grid(spec, theta, args.resolution)
    path = Path(args.out) if args.out else out / "grid.csv"
    metrics.save_grid_csv(spec, axis, P, path)
    print(f"wrote {args.resolution ** 2} grid points to {path}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bosonic-classifier", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON run config, or 'paper' for the built-in one")
        sp.add_argument("--out-dir", help="directory for inputs/outputs (default: config output_dir or .)")

    g = sub.add_parser("gen-data", help="generate train/test CSVs for the circle task")
    common(g)
    g.add_argument("--n-train", type=_positive_int)
    g.add_argument("--n-test", type=_positive_int)
    g.add_argument("--seed", type=int, help="train seed; the test set uses seed+1")
    g.add_argument("--center", type=float, nargs=2, metavar=("C1", "C2"))
    g.add_argument("--radius", type=_positive_float)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train circuit parameters by sequential minimal optimization")
    common(t)
    t.add_argument("--train-csv")
    t.add_argument("--shots", type=_positive_int, help="sample each probe with this many shots")
    t.add_argument("--probe-mode", choices=["analytic", "probed"])
    t.add_argument("--max-sweeps", type=_positive_int)
    t.add_argument("--rel-tol", type=_positive_float)
    t.add_argument("--grid-size", type=_positive_int)
    t.add_argument("--train-seed", type=int, help="seed for shot sampling")
    t.add_argument("--init-seed", type=int, help="seed for the initial parameters")
    t.add_argument("--fit-threshold", action="store_true", help="pick b maximizing balanced training accuracy")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="confusion matrix and rates on a test CSV")
    common(e)
    e.add_argument("--theta")
    e.add_argument("--test-csv")
    e.add_argument("--grid", type=int, metavar="RES", help="also write a RES x RES decision grid")
    e.add_argument("--metrics-csv")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("grid", help="export the decision surface as CSV")
    common(r)
    r.add_argument("--theta")
    r.add_argument("--resolution", type=int, default=150)
    r.add_argument("--out")
    r.set_defaults(func=cmd_grid)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "grid", None) is not None and args.grid < 2:
        parser.error("--grid must be >= 2")
    if getattr(args, "resolution", None) is not None and args.resolution < 2:
        parser.error("--resolution must be >= 2")
    try:
        return args.func(args)
    except (DataError, FileNotFoundError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, UnitarityError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ClassifierError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
