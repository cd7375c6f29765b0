"""Command-line interface: train, sweep, defend, replicate.

Every subcommand is deterministic given its flags; all randomness flows from
--seed. The resolved option set is echoed to <out>/manifest.json so a run can
be reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment, nn
from .data import SCHEMAS
from .errors import (
    ConfigError,
    EmptyDataError,
    LabelError,
    NumericError,
    SchemaError,
    ShapeError,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="advflow",
                     description="FGSM attack/defense harness for flow anomaly detectors")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--data", help="CSV file matching the chosen schema")
        src.add_argument("--synthetic", action="store_true",
                         help="generate a two-cluster synthetic dataset")
        p.add_argument("--schema", choices=sorted(SCHEMAS), default="bot_iot")
        p.add_argument("--balance", action="store_true",
                       help="SMOTE-balance the training split")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--epochs", type=int, default=nn.TrainConfig.epochs)
        p.add_argument("--batch-size", type=int, default=nn.TrainConfig.batch_size)
        p.add_argument("--lr", type=float, default=nn.TrainConfig.learning_rate)
        p.add_argument("--n-normal", type=int, default=1000)
        p.add_argument("--n-attack", type=int, default=1000)
        p.add_argument("--separation", type=float, default=6.0)
        p.add_argument("--manifest", help="JSON file of option defaults")

    p_train = sub.add_parser("train", help="train a detector and save it")
    add_common(p_train)

    p_sweep = sub.add_parser("sweep", help="train, then evaluate under an epsilon sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--epsilons", type=_float_list,
                         default=experiment.DEFAULT_EPSILONS)

    p_defend = sub.add_parser("defend", help="adversarial-retraining defense experiments")
    add_common(p_defend)
    p_defend.add_argument("--fractions", type=_float_list,
                          default=experiment.DEFAULT_FRACTIONS)
    p_defend.add_argument("--attack-eps", type=float, default=1.0)

    p_rep = sub.add_parser("replicate",
                           help="run the three published pipeline configurations")
    p_rep.add_argument("--bot-iot-csv", required=True)
    p_rep.add_argument("--modbus-csv", required=True)
    p_rep.add_argument("--seed", type=int, default=42)
    p_rep.add_argument("--out", default="out")
    p_rep.add_argument("--epochs", type=int, default=nn.TrainConfig.epochs)
    p_rep.add_argument("--batch-size", type=int, default=nn.TrainConfig.batch_size)
    p_rep.add_argument("--lr", type=float, default=nn.TrainConfig.learning_rate)
    p_rep.add_argument("--manifest", help="JSON file of option defaults")

    return parser


def _apply_manifest(args, argv):
    """Fill in options from a manifest file; explicit flags win."""
    if not getattr(args, "manifest", None):
        return args
    with open(args.manifest, encoding="utf-8") as fh:
        manifest = json.load(fh)
    explicit = set(argv)
    for key, value in manifest.items():
        if key == "subcommand":
            continue
        flag = "--" + key.replace("_", "-")
        if flag in explicit or not hasattr(args, key):
            continue
        if key in ("epsilons", "fractions"):
            value = tuple(float(v) for v in value)
        setattr(args, key, value)
    return args


def _resolved_manifest(args) -> dict:
    doc = {}
    for key, value in sorted(vars(args).items()):
        if key == "manifest":
            continue
        if isinstance(value, tuple):
            value = list(value)
        doc[key] = value
    return doc


def _sweep_config(args) -> experiment.SweepConfig:
    schema = SCHEMAS[args.schema]
    if args.data:
        source = experiment.DataSource(kind="csv", schema=schema, path=args.data)
    else:
        source = experiment.DataSource(
            kind="synthetic", schema=schema, n_normal=args.n_normal,
            n_attack=args.n_attack, separation=args.separation,
        )
    train_cfg = nn.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                               learning_rate=args.lr, seed=args.seed)
    return experiment.SweepConfig(
        source=source,
        epsilons=getattr(args, "epsilons", experiment.DEFAULT_EPSILONS),
        balance=args.balance, train=train_cfg, seed=args.seed,
    )


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _echo_manifest(args, out: Path) -> None:
    _write(out / "manifest.json",
           json.dumps(_resolved_manifest(args), indent=2, sort_keys=True) + "\n")


def cmd_train(args) -> int:
    out = _out_dir(args)
    ctx = experiment.prepare(_sweep_config(args))
    nn.save_model(ctx.model, out / "model.json")
    lines = ["epoch,loss"]
    lines += [f"{i},{v!r}" for i, v in enumerate(ctx.loss_trace, start=1)]
    _write(out / "loss_trace.csv", "\n".join(lines) + "\n")
    _echo_manifest(args, out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    out = _out_dir(args)
    cfg = _sweep_config(args)
    ctx = experiment.prepare(cfg)
    report = experiment.run_sweep(cfg, ctx)
    nn.save_model(ctx.model, out / "model.json")
    _write(out / "report.json", report.to_json())
    _write(out / "report.txt", report.to_text())
    _write(out / "accuracy_vs_epsilon.csv", report.accuracy_csv("sweep"))
    _echo_manifest(args, out)
    return EXIT_OK


def cmd_defend(args) -> int:
    out = _out_dir(args)
    cfg = _sweep_config(args)
    ctx = experiment.prepare(cfg)
    report = experiment.run_defense_suite(
        ctx, fractions=args.fractions, attack_epsilon=args.attack_eps,
        provenance=experiment.build_provenance(cfg, ctx),
    )
    _write(out / "defense_report.json", report.to_json())
    _write(out / "defense_report.txt", report.to_text())
    _echo_manifest(args, out)
    return EXIT_OK


def cmd_replicate(args) -> int:
    out = _out_dir(args)
    train_cfg = nn.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                               learning_rate=args.lr, seed=args.seed)
    report = experiment.replicate_paper_tables(
        args.bot_iot_csv, args.modbus_csv, train=train_cfg, seed=args.seed,
    )
    _write(out / "replicate_report.json", report.to_json())
    _write(out / "replicate_report.txt", report.to_text())
    for block in report.blocks:
        _write(out / f"accuracy_vs_epsilon_{block.name}.csv",
               report.accuracy_csv(block.name))
    _echo_manifest(args, out)
    return EXIT_OK


_HANDLERS = {
    "train": cmd_train,
    "sweep": cmd_sweep,
    "defend": cmd_defend,
    "replicate": cmd_replicate,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args = _apply_manifest(args, argv)
        return _HANDLERS[args.subcommand](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, LabelError, EmptyDataError, FileNotFoundError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ShapeError, NumericError, FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
