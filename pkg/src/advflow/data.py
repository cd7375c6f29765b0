"""Dataset schemas, CSV ingestion, normalization, splitting, SMOTE, synthesis.

Labels are binary throughout: 0 = Normal, 1 = attack. Feature matrices are
row-major float64; a Dataset carries its normalization state so downstream
stages can refuse raw input.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigError, EmptyDataError, LabelError, SchemaError
from .linalg import Rng, as_matrix

NORMAL_CLASS = "normal"

# normalization states
RAW = "raw"
MINMAX = "minmax"
PERTURBED = "perturbed"


@dataclass(frozen=True)
class Schema:
    name: str
    feature_names: tuple[str, ...]
    label_column: str
    attack_class_names: frozenset[str]
    # column of unix-epoch seconds expanded into cyclical time features
    time_column: str | None = None

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


_TIME_FEATURES = ("hour_sin", "hour_cos", "day_sin", "day_cos")

BOT_IOT = Schema(
    name="bot_iot",
    feature_names=(
        "seq", "stddev", "N_IN_Conn_P_SrcIP", "min", "state_number",
        "mean", "N_IN_Conn_P_DstIP", "drate", "srate", "max",
    ),
    label_column="category",
    attack_class_names=frozenset({"ddos", "dos", "reconnaissance", "theft"}),
)

MODBUS = Schema(
    name="modbus",
    feature_names=(
        "FC1_Read_Input_Register", "FC2_Read_Discrete_Value",
        "FC3_Read_Holding_Register", "FC1_Read_Coil",
        *_TIME_FEATURES,
    ),
    label_column="type",
    attack_class_names=frozenset({"ddos", "dos", "backdoor"}),
    time_column="ts",
)

SCHEMAS = {s.name: s for s in (BOT_IOT, MODBUS)}


def synthetic_schema(n_features: int = 10) -> Schema:
    if n_features < 1:
        raise ConfigError(f"n_features must be >= 1, got {n_features}")
    return Schema(
        name="synthetic",
        feature_names=tuple(f"f{i}" for i in range(n_features)),
        label_column="label",
        attack_class_names=frozenset({"attack"}),
    )


@dataclass
class Dataset:
    schema: Schema
    features: np.ndarray      # (rows, n_features) float64
    labels: np.ndarray        # (rows,) int, values in {0, 1}
    normalization: str = RAW
    norm_min: np.ndarray | None = None
    norm_max: np.ndarray | None = None

    def __post_init__(self):
        self.features = as_matrix(self.features)
        self.labels = np.asarray(self.labels).reshape(-1).astype(int)
        if self.features.shape[0] != self.labels.shape[0]:
            raise SchemaError(
                f"{self.features.shape[0]} feature rows vs {self.labels.shape[0]} labels"
            )
        if self.features.shape[1] != self.schema.n_features:
            raise SchemaError(
                f"{self.features.shape[1]} feature columns vs schema "
                f"{self.schema.name} with {self.schema.n_features}"
            )
        bad = set(np.unique(self.labels)) - {0, 1}
        if bad:
            raise LabelError(f"labels must be 0/1, found {sorted(bad)}")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.features).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()[:16]


def binarize_labels(raw_classes, schema: Schema) -> np.ndarray:
    """Normal -> 0, declared attack classes -> 1, anything else rejected."""
    out = np.empty(len(raw_classes), dtype=int)
    for i, name in enumerate(raw_classes):
        key = str(name).strip().lower()
        if key == NORMAL_CLASS:
            out[i] = 0
        elif key in schema.attack_class_names:
            out[i] = 1
        else:
            raise LabelError(f"unrecognized class name {name!r} for schema {schema.name}")
    return out


def _expand_time_features(df: pd.DataFrame, schema: Schema) -> pd.DataFrame:
    """Derive hour/weekday sin-cos columns from the epoch-seconds column."""
    ts = df[schema.time_column].to_numpy(dtype=np.float64)
    hour = (ts / 3600.0) % 24.0
    day = (ts / 86400.0) % 7.0
    df = df.copy()
    df["hour_sin"] = np.sin(2.0 * np.pi * hour / 24.0)
    df["hour_cos"] = np.cos(2.0 * np.pi * hour / 24.0)
    df["day_sin"] = np.sin(2.0 * np.pi * day / 7.0)
    df["day_cos"] = np.cos(2.0 * np.pi * day / 7.0)
    return df


def ingest_csv(path, schema: Schema):
    """Read a schema-conformant CSV. Returns (Dataset, dropped_row_count).

    Rows whose schema-numeric cells fail to parse are dropped and counted;
    extra columns are ignored.
    """
    df = pd.read_csv(path)

    if schema.time_column is None:
        source_numeric = list(schema.feature_names)
    else:
        source_numeric = [c for c in schema.feature_names if c not in _TIME_FEATURES]
        source_numeric.append(schema.time_column)

    for col in source_numeric + [schema.label_column]:
        if col not in df.columns:
            raise SchemaError(f"column {col!r} required by schema {schema.name} is missing")

    numeric = df[source_numeric].apply(pd.to_numeric, errors="coerce")
    keep = ~numeric.isna().any(axis=1)
    dropped = int((~keep).sum())
    df = df.loc[keep].reset_index(drop=True)
    df[source_numeric] = numeric.loc[keep].reset_index(drop=True)
    if df.shape[0] == 0:
        raise EmptyDataError(f"no usable rows in {path}")

    if schema.time_column is not None:
        df = _expand_time_features(df, schema)

    features = df[list(schema.feature_names)].to_numpy(dtype=np.float64)
    labels = binarize_labels(df[schema.label_column].tolist(), schema)
    return Dataset(schema=schema, features=features, labels=labels), dropped


def minmax_normalize(data: Dataset):
    """Column-wise map to [0, 1]; constant columns go to 0.

    Returns (normalized Dataset, min_vec, max_vec); reuse the vectors on
    held-out data via apply_minmax so test statistics never leak into training.
    """
    if data.normalization != RAW:
        raise ConfigError(f"minmax_normalize expects raw data, got {data.normalization!r}")
    lo = data.features.min(axis=0)
    hi = data.features.max(axis=0)
    normalized = apply_minmax(data, lo, hi)
    return normalized, lo, hi


def apply_minmax(data: Dataset, min_vec, max_vec) -> Dataset:
    lo = np.asarray(min_vec, dtype=np.float64)
    hi = np.asarray(max_vec, dtype=np.float64)
    span = hi - lo
    safe = np.where(span == 0.0, 1.0, span)
    feats = (data.features - lo) / safe
    return Dataset(
        schema=data.schema, features=feats, labels=data.labels.copy(),
        normalization=MINMAX, norm_min=lo.copy(), norm_max=hi.copy(),
    )


def stratified_split(data: Dataset, train_fraction: float = 0.7, rng: Rng | None = None):
    """Seeded 70/30-style split preserving class proportions within one sample.

    Falls back to a plain shuffled split (with a warning) when any class is
    too small to stratify.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if rng is None:
        rng = Rng(0)
    labels = data.labels
    classes, counts = np.unique(labels, return_counts=True)

    if len(classes) < 2 or counts.min() < 2:
        warnings.warn(
            "class distribution too thin to stratify; falling back to a plain split",
            stacklevel=2,
        )
        order = rng.permutation(data.n_rows)
        n_train = int(round(train_fraction * data.n_rows))
        train_idx, test_idx = order[:n_train], order[n_train:]
    else:
        train_parts, test_parts = [], []
        for cls in classes:
            idx = np.flatnonzero(labels == cls)
            idx = idx[rng.permutation(len(idx))]
            n_train = int(round(train_fraction * len(idx)))
            train_parts.append(idx[:n_train])
            test_parts.append(idx[n_train:])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)

    train_idx = np.sort(train_idx)
    test_idx = np.sort(test_idx)

    def take(idx):
        return Dataset(
            schema=data.schema, features=data.features[idx].copy(),
            labels=labels[idx].copy(), normalization=data.normalization,
            norm_min=data.norm_min, norm_max=data.norm_max,
        )

    return take(train_idx), take(test_idx)


@dataclass
class SmoteConfig:
    k_neighbors: int = 5

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ConfigError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


def smote_balance(data: Dataset, cfg: SmoteConfig, rng: Rng) -> Dataset:
    """Oversample the minority class to the majority count.

    Each synthetic row is s + u * (n - s) for a random minority row s, one of
    its k nearest minority neighbors n (Euclidean), and u uniform in [0, 1].
    Original rows are kept verbatim.
    """
    labels = data.labels
    n_attack = int((labels == 1).sum())
    n_normal = int((labels == 0).sum())
    if n_attack == n_normal:
        return data
    minority_label = 1 if n_attack < n_normal else 0
    deficit = abs(n_normal - n_attack)

    minority = data.features[labels == minority_label]
    m = minority.shape[0]
    if m <= cfg.k_neighbors:
        raise ConfigError(
            f"k_neighbors={cfg.k_neighbors} requires a minority class larger "
            f"than that, got {m} rows"
        )

    # pairwise distances; minority classes are small enough for the dense matrix
    diff = minority[:, None, :] - minority[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbor_idx = np.argsort(dist, axis=1, kind="stable")[:, : cfg.k_neighbors]

    synth = np.empty((deficit, data.features.shape[1]))
    for j in range(deficit):
        i = int(rng.integers(0, m))
        nb = int(neighbor_idx[i, int(rng.integers(0, cfg.k_neighbors))])
        u = rng.uniform()
        synth[j] = minority[i] + u * (minority[nb] - minority[i])

    features = np.vstack([data.features, synth])
    new_labels = np.concatenate([labels, np.full(deficit, minority_label, dtype=int)])
    return Dataset(
        schema=data.schema, features=features, labels=new_labels,
        normalization=data.normalization, norm_min=data.norm_min, norm_max=data.norm_max,
    )


def generate_synthetic(schema: Schema, n_normal: int, n_attack: int,
                       separation: float, rng: Rng) -> Dataset:
    """Two unit-variance Gaussian clusters with mean distance `separation`."""
    if n_normal < 0 or n_attack < 0 or (n_normal == 0 and n_attack == 0):
        raise ConfigError(f"invalid counts n_normal={n_normal}, n_attack={n_attack}")
    d = schema.n_features
    shift = separation / np.sqrt(d)
    rows = []
    labels = []
    if n_normal:
        rows.append(rng.normal(0.0, 1.0, (n_normal, d)))
        labels.append(np.zeros(n_normal, dtype=int))
    if n_attack:
        rows.append(rng.normal(shift, 1.0, (n_attack, d)))
        labels.append(np.ones(n_attack, dtype=int))
    return Dataset(
        schema=schema,
        features=np.vstack(rows),
        labels=np.concatenate(labels),
    )


def write_csv(data: Dataset, path, *, epsilon=None, seed=None, source_hash=None) -> None:
    """Comma-separated export with a provenance comment as the first line."""
    prov = [f"schema={data.schema.name}", f"rows={data.n_rows}"]
    if epsilon is not None:
        prov.append(f"epsilon={epsilon!r}")
    if seed is not None:
        prov.append(f"seed={seed}")
    if source_hash is not None:
        prov.append(f"source_hash={source_hash}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# " + " ".join(prov) + "\n")
        fh.write(",".join([*data.schema.feature_names, "label"]) + "\n")
        for row, label in zip(data.features, data.labels):
            fh.write(",".join(repr(v) for v in row) + f",{label}\n")
