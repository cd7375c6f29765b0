"""Experiment orchestration: train, epsilon sweep, adversarial retraining.

A sweep trains one detector on clean data, then evaluates the test split
under the gradient-sign attack at each epsilon. The defense runner replaces
a fraction of training rows with their perturbed versions (generated once,
against the clean baseline), retrains from fresh initialization, and scores
the result on a fully perturbed test set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import metrics, nn
from .attack import AttackConfig, fgsm_perturb, perturb_dataset
from .data import (
    SCHEMAS,
    Dataset,
    Schema,
    SmoteConfig,
    apply_minmax,
    generate_synthetic,
    ingest_csv,
    minmax_normalize,
    smote_balance,
    stratified_split,
)
from .errors import ConfigError
from .linalg import Rng

DEFAULT_EPSILONS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
DEFAULT_FRACTIONS = (0.1, 0.2)

# fixed offsets so retraining can replay the exact init/shuffle streams
_INIT_SEED_OFFSET = 1
_TRAIN_SEED_OFFSET = 2
_DEFENSE_SEED_OFFSET = 3


@dataclass
class DataSource:
    kind: str                      # "synthetic" | "csv"
    schema: Schema
    path: str | None = None
    n_normal: int = 1000
    n_attack: int = 1000
    separation: float = 6.0

    def __post_init__(self):
        if self.kind not in ("synthetic", "csv"):
            raise ConfigError(f"unknown source kind {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise ConfigError("csv source requires a path")

    def describe(self) -> dict:
        d = {"kind": self.kind, "schema": self.schema.name}
        if self.kind == "csv":
            d["path"] = str(self.path)
        else:
            d.update(n_normal=self.n_normal, n_attack=self.n_attack,
                     separation=self.separation)
        return d


@dataclass
class SweepConfig:
    source: DataSource
    epsilons: tuple = DEFAULT_EPSILONS
    balance: bool = False
    train: nn.TrainConfig = field(default_factory=nn.TrainConfig)
    seed: int = 42
    clip_to_unit: bool = False

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise ConfigError("epsilons must be non-empty")
        if any(e < 0 for e in eps):
            raise ConfigError("epsilons must be nonnegative")
        if list(eps) != sorted(eps):
            raise ConfigError("epsilons must be sorted ascending")
        self.epsilons = eps


@dataclass
class DefenseConfig:
    adversarial_fraction: float
    attack_epsilon: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if not 0.0 <= self.adversarial_fraction <= 1.0:
            raise ConfigError(
                f"adversarial_fraction must be in [0, 1], got {self.adversarial_fraction}"
            )
        if self.attack_epsilon < 0:
            raise ConfigError(f"attack_epsilon must be >= 0, got {self.attack_epsilon}")


@dataclass
class MetricRow:
    label: str
    epsilon: float | None
    cm: metrics.ConfusionMatrix
    precision: float
    recall: float
    f1: float
    accuracy: float

    def to_dict(self) -> dict:
        d = {"label": self.label, "epsilon": self.epsilon}
        d.update(metrics.summarize(self.cm))
        return d


@dataclass
class ReportBlock:
    name: str
    rows: list[MetricRow]


@dataclass
class ExperimentReport:
    blocks: list[ReportBlock]
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "blocks": [
                {"name": b.name, "rows": [r.to_dict() for r in b.rows]}
                for b in self.blocks
            ],
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        header = (
            f"{'row':<36} {'tp':>9} {'tn':>9} {'fp':>9} {'fn':>9} "
            f"{'prec%':>8} {'rec%':>8} {'f1%':>8} {'acc%':>8}"
        )
        lines = []
        for block in self.blocks:
            lines.append(f"== {block.name} ==")
            lines.append(header)
            for r in block.rows:
                lines.append(
                    f"{r.label:<36} {r.cm.tp:>9} {r.cm.tn:>9} {r.cm.fp:>9} "
                    f"{r.cm.fn:>9} {r.precision:>8.2f} {r.recall:>8.2f} "
                    f"{r.f1:>8.2f} {r.accuracy:>8.2f}"
                )
            lines.append("")
        return "\n".join(lines)

    def accuracy_csv(self, block_name: str) -> str:
        """epsilon,accuracy rows for external plotting (sweep blocks only)."""
        block = next(b for b in self.blocks if b.name == block_name)
        lines = ["epsilon,accuracy"]
        for r in block.rows:
            if r.epsilon is not None:
                lines.append(f"{r.epsilon!r},{r.accuracy!r}")
        return "\n".join(lines) + "\n"


@dataclass
class SweepContext:
    model: nn.MlpModel
    train_ds: Dataset
    test_ds: Dataset
    train_cfg: nn.TrainConfig
    seed: int
    loss_trace: list
    dropped_rows: int = 0


def evaluate(model, ds: Dataset, label: str, epsilon=None) -> MetricRow:
    cm = metrics.confusion(nn.predict(model, ds.features), ds.labels)
    return MetricRow(
        label=label, epsilon=epsilon, cm=cm,
        precision=metrics.precision(cm), recall=metrics.recall(cm),
        f1=metrics.f1(cm), accuracy=metrics.accuracy(cm),
    )


def load_source(source: DataSource, rng: Rng):
    """Returns (raw Dataset, dropped_row_count)."""
    if source.kind == "csv":
        return ingest_csv(source.path, source.schema)
    ds = generate_synthetic(
        source.schema, source.n_normal, source.n_attack, source.separation, rng
    )
    return ds, 0


def prepare(cfg: SweepConfig) -> SweepContext:
    """Load, split 70/30, normalize on train stats, balance, train."""
    rng = Rng(cfg.seed)
    raw, dropped = load_source(cfg.source, rng)
    train_raw, test_raw = stratified_split(raw, 0.7, rng)
    train_ds, lo, hi = minmax_normalize(train_raw)
    test_ds = apply_minmax(test_raw, lo, hi)
    if cfg.balance:
        train_ds = smote_balance(train_ds, SmoteConfig(), rng)
    model0 = nn.build_paper_model(cfg.source.schema.n_features,
                                  Rng(cfg.seed + _INIT_SEED_OFFSET))
    model, trace = nn.train(model0, train_ds, cfg.train,
                            Rng(cfg.seed + _TRAIN_SEED_OFFSET))
    return SweepContext(
        model=model, train_ds=train_ds, test_ds=test_ds,
        train_cfg=cfg.train, seed=cfg.seed, loss_trace=trace,
        dropped_rows=dropped,
    )


def build_provenance(cfg: SweepConfig, ctx: SweepContext) -> dict:
    return {
        "seed": cfg.seed,
        "source": cfg.source.describe(),
        "balance": cfg.balance,
        "train": {
            "epochs": cfg.train.epochs,
            "batch_size": cfg.train.batch_size,
            "learning_rate": cfg.train.learning_rate,
        },
        "train_hash": ctx.train_ds.content_hash(),
        "test_hash": ctx.test_ds.content_hash(),
        "dropped_rows": ctx.dropped_rows,
    }


def sweep_block(ctx: SweepContext, epsilons, clip_to_unit=False,
                name: str = "sweep") -> ReportBlock:
    rows = [evaluate(ctx.model, ctx.test_ds, "clean")]
    for eps in epsilons:
        adv = perturb_dataset(ctx.model, ctx.test_ds,
                              AttackConfig(epsilon=eps, clip_to_unit=clip_to_unit))
        rows.append(evaluate(ctx.model, adv, f"fgsm eps={eps:g}", epsilon=eps))
    return ReportBlock(name=name, rows=rows)


def run_sweep(cfg: SweepConfig, ctx: SweepContext | None = None) -> ExperimentReport:
    if ctx is None:
        ctx = prepare(cfg)
    block = sweep_block(ctx, cfg.epsilons, cfg.clip_to_unit)
    prov = build_provenance(cfg, ctx)
    prov["epsilons"] = list(cfg.epsilons)
    return ExperimentReport(blocks=[block], provenance=prov)


def run_defense(dcfg: DefenseConfig, ctx: SweepContext,
                label: str | None = None) -> MetricRow:
    """Retrain on a partially adversarial training set, score on a fully
    adversarial test set. fraction=0 with the context's seed reproduces the
    baseline model exactly."""
    atk = AttackConfig(epsilon=dcfg.attack_epsilon)
    baseline = ctx.model
    train_ds = ctx.train_ds

    mixed = train_ds.features.copy()
    if dcfg.adversarial_fraction > 0:
        adv_feats = fgsm_perturb(baseline, train_ds.features, train_ds.labels, atk)
        pick_rng = Rng(dcfg.seed + _DEFENSE_SEED_OFFSET)
        for cls in (0, 1):
            idx = np.flatnonzero(train_ds.labels == cls)
            k = int(round(dcfg.adversarial_fraction * len(idx)))
            if k:
                chosen = pick_rng.choice(idx, size=k, replace=False)
                mixed[chosen] = adv_feats[chosen]

    mixed_ds = Dataset(
        schema=train_ds.schema, features=mixed, labels=train_ds.labels.copy(),
        normalization=train_ds.normalization,
        norm_min=train_ds.norm_min, norm_max=train_ds.norm_max,
    )
    model0 = nn.build_paper_model(train_ds.schema.n_features,
                                  Rng(ctx.seed + _INIT_SEED_OFFSET))
    retrained, _ = nn.train(model0, mixed_ds, ctx.train_cfg,
                            Rng(ctx.seed + _TRAIN_SEED_OFFSET))

    adv_test = perturb_dataset(baseline, ctx.test_ds, atk)
    if label is None:
        label = f"adv_fraction={dcfg.adversarial_fraction:g}"
    return evaluate(retrained, adv_test, label, epsilon=dcfg.attack_epsilon)


def run_defense_suite(ctx: SweepContext, fractions=DEFAULT_FRACTIONS,
                      attack_epsilon: float = 1.0,
                      provenance: dict | None = None) -> ExperimentReport:
    rows = []
    for i, frac in enumerate(fractions, start=1):
        dcfg = DefenseConfig(adversarial_fraction=frac,
                             attack_epsilon=attack_epsilon, seed=ctx.seed)
        label = f"experiment-{i} ({100 * frac:g}% adversarial)"
        rows.append(run_defense(dcfg, ctx, label=label))
    prov = dict(provenance or {})
    prov.update(fractions=list(fractions), attack_epsilon=attack_epsilon,
                seed=ctx.seed)
    return ExperimentReport(blocks=[ReportBlock("defense", rows)], provenance=prov)


def replicate_paper_tables(bot_iot_csv, modbus_csv,
                           train: nn.TrainConfig | None = None,
                           seed: int = 42,
                           epsilons=DEFAULT_EPSILONS) -> ExperimentReport:
    """Full pipeline over the three published configurations: imbalanced
    Bot-IoT, SMOTE-balanced Bot-IoT, and unbalanced Modbus. The output mirrors
    the published table layout; numeric agreement is not promised because the
    original training hyperparameters were never published."""
    train = train or nn.TrainConfig()
    blocks = []
    prov = {"seed": seed, "epsilons": list(epsilons), "sources": {}}
    runs = (
        ("bot_iot_imbalanced", bot_iot_csv, SCHEMAS["bot_iot"], False),
        ("bot_iot_balanced", bot_iot_csv, SCHEMAS["bot_iot"], True),
        ("modbus", modbus_csv, SCHEMAS["modbus"], False),
    )
    for name, path, schema, balance in runs:
        cfg = SweepConfig(
            source=DataSource(kind="csv", schema=schema, path=str(path)),
            epsilons=epsilons, balance=balance, train=train, seed=seed,
        )
        ctx = prepare(cfg)
        blocks.append(sweep_block(ctx, epsilons, name=name))
        prov["sources"][name] = build_provenance(cfg, ctx)
    return ExperimentReport(blocks=blocks, provenance=prov)
