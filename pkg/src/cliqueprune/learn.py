"""Training data, logistic regression by SGD, and model files."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import FeatureMatrix
from .graph import Graph
from .solver import CliqueSet

log = logging.getLogger(__name__)

MODEL_VERSION = 1


class DimensionMismatch(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TrainingSet:
    X: np.ndarray
    y: np.ndarray  # 1 = in some maximum clique
    feature_names: tuple[str, ...]
    provenance: tuple[tuple[int, int], ...]  # (graph id, vertex label)
    degenerate: bool = False

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != len(self.feature_names):
            raise DimensionMismatch(f"X has shape {self.X.shape}, names {len(self.feature_names)}")
        if len(self.y) != len(self.X) or len(self.provenance) != len(self.X):
            raise DimensionMismatch("X, y and provenance must have equal length")

    def __len__(self):
        return len(self.y)

    @property
    def positives(self) -> int:
        return int(self.y.sum())

    @property
    def negatives(self) -> int:
        return len(self.y) - self.positives

    def subset(self, idx) -> "TrainingSet":
        idx = np.asarray(idx, dtype=np.int64)
        return TrainingSet(self.X[idx], self.y[idx], self.feature_names,
                           tuple(self.provenance[i] for i in idx))

    def select(self, names: Sequence[str]) -> "TrainingSet":
        cols = [self.feature_names.index(x) for x in names]
        return TrainingSet(self.X[:, cols], self.y, tuple(names), self.provenance, self.degenerate)

    @classmethod
    def empty(cls, feature_names, degenerate: bool = False) -> "TrainingSet":
        return cls(np.zeros((0, len(feature_names))), np.zeros(0, dtype=np.int64),
                   tuple(feature_names), (), degenerate)

    @classmethod
    def concat(cls, parts: Sequence["TrainingSet"]) -> "TrainingSet":
        if not parts:
            raise ValueError("nothing to concatenate")
        names = parts[0].feature_names
        if any(p.feature_names != names for p in parts):
            raise DimensionMismatch("feature names differ between training sets")
        return cls(np.vstack([p.X for p in parts]), np.concatenate([p.y for p in parts]),
                   names, tuple(x for p in parts for x in p.provenance))


def build_training_set(g: Graph, truth: CliqueSet, feats: FeatureMatrix,
                       graph_id: int = 0) -> TrainingSet:
    if feats.rows.shape[0] != g.n:
        raise DimensionMismatch(f"{feats.rows.shape[0]} feature rows for {g.n} vertices")
    y = np.fromiter((v in truth.covered for v in range(g.n)), dtype=np.int64, count=g.n)
    prov = tuple((graph_id, lab) for lab in g.labels)
    return TrainingSet(np.array(feats.rows, dtype=float), y, feats.names, prov)


def balance(t: TrainingSet, seed=0) -> TrainingSet:
    """Under-sample the larger class down to the size of the smaller one."""
    pos = np.flatnonzero(t.y == 1)
    neg = np.flatnonzero(t.y == 0)
    if len(pos) == 0 or len(neg) == 0:
        log.warning("cannot balance: %d positives, %d negatives", len(pos), len(neg))
        return TrainingSet.empty(t.feature_names, degenerate=True)
    rng = np.random.default_rng(seed)
    if len(pos) > len(neg):
        pos = rng.choice(pos, size=len(neg), replace=False)
    elif len(neg) > len(pos):
        neg = rng.choice(neg, size=len(pos), replace=False)
    return t.subset(np.sort(np.concatenate([pos, neg])))


@dataclass(frozen=True, eq=False)
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std


def fit_scaler(t: TrainingSet) -> Scaler:
    if len(t) == 0:
        raise ValueError("cannot fit a scaler on an empty training set")
    mean = t.X.mean(axis=0)
    std = t.X.std(axis=0)
    std[std == 0] = 1.0
    return Scaler(mean, std)


def apply_scaler(x, scaler: Scaler) -> np.ndarray:
    return scaler.apply(x)


@dataclass(frozen=True)
class Hyperparams:
    epochs: int = 30
    learning_rate: float = 0.05
    l2: float = 1e-4
    seed: int = 0


def _sigmoid(s):
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1.0 + e)
    return out


@dataclass(frozen=True, eq=False)
class StageModel:
    weights: np.ndarray
    bias: float
    scaler: Scaler
    feature_names: tuple[str, ...]
    stage_index: int = 1
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    loss_history: tuple[float, ...] = ()

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != len(self.weights):
            raise DimensionMismatch(f"expected {len(self.weights)} features, got {X.shape[-1]}")
        return self.scaler.apply(X) @ self.weights + self.bias

    def positive_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision(X))

    def predict_proba(self, X) -> np.ndarray:
        """Probability of the negative (prunable) class."""
        return 1.0 - self.positive_proba(X)

    def negative_proba(self, fm: FeatureMatrix) -> np.ndarray:
        if tuple(fm.names) != tuple(self.feature_names):
            missing = [x for x in self.feature_names if x not in fm.names]
            if missing:
                raise DimensionMismatch(f"features missing for this model: {missing}")
            fm = fm.select(self.feature_names)
        return self.predict_proba(fm.rows)

    def predict(self, X) -> np.ndarray:
        return (self.positive_proba(X) >= 0.5).astype(np.int64)


def predict_proba(m: StageModel, x) -> np.ndarray | float:
    p = m.predict_proba(np.atleast_2d(x))
    return float(p[0]) if np.ndim(x) == 1 else p


def log_loss(m: StageModel, t: TrainingSet) -> float:
    p = np.clip(m.positive_proba(t.X), 1e-15, 1 - 1e-15)
    return float(-np.mean(t.y * np.log(p) + (1 - t.y) * np.log(1 - p)))


def train_logistic(t: TrainingSet, hp: Hyperparams = Hyperparams(),
                   stage_index: int = 1) -> StageModel:
    """L2-regularised logistic regression by plain SGD.

    One sample per step in a seeded shuffled order; the step size decays as
    ``learning_rate / sqrt(step)``.
    """
    if len(t) == 0:
        raise ValueError("cannot train on an empty training set")
    if t.positives == 0 or t.negatives == 0:
        raise ValueError("training set contains a single class")
    scaler = fit_scaler(t)
    Z = scaler.apply(t.X)
    y = t.y.astype(float)
    d = Z.shape[1]
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(hp.seed)
    step = 0
    history = []
    for _ in range(hp.epochs):
        for i in rng.permutation(len(y)):
            step += 1
            lr = hp.learning_rate / math.sqrt(step)
            z = Z[i]
            s = float(z @ w) + b
            p = 1.0 / (1.0 + math.exp(-s)) if s >= 0 else math.exp(s) / (1.0 + math.exp(s))
            err = p - y[i]
            w -= lr * (err * z + hp.l2 * w)
            b -= lr * err
        s_all = Z @ w + b
        pr = np.clip(_sigmoid(s_all), 1e-15, 1 - 1e-15)
        history.append(float(-np.mean(y * np.log(pr) + (1 - y) * np.log(1 - pr))))
    return StageModel(w, float(b), scaler, t.feature_names, stage_index, hp, tuple(history))


def accuracy(m: StageModel, t: TrainingSet) -> float:
    return float(np.mean(m.predict(t.X) == t.y))


def cross_validate(t: TrainingSet, hp: Hyperparams = Hyperparams(), folds: int = 4,
                   seed=0) -> float:
    """Mean held-out accuracy over stratified folds."""
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(t), dtype=np.int64)
    for cls in (0, 1):
        idx = rng.permutation(np.flatnonzero(t.y == cls))
        fold_of[idx] = np.arange(len(idx)) % folds
    scores = []
    for f in range(folds):
        test = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        m = train_logistic(t.subset(train), hp)
        scores.append(accuracy(m, t.subset(test)))
    return float(np.mean(scores))


# -- persistence ---------------------------------------------------------------

def model_to_dict(m: StageModel) -> dict:
    hp = asdict(m.hyperparams)
    return {
        "version": MODEL_VERSION,
        "stage_index": m.stage_index,
        "feature_names": list(m.feature_names),
        "scaler_means": [float(x) for x in m.scaler.mean],
        "scaler_stds": [float(x) for x in m.scaler.std],
        "weights": [float(x) for x in m.weights],
        "bias": float(m.bias),
        "hyperparameters": {k: v for k, v in hp.items() if k != "seed"},
        "seed": hp["seed"],
        "loss_history": list(m.loss_history),
    }


def model_from_dict(d: dict) -> StageModel:
    if not isinstance(d, dict) or "version" not in d:
        raise ModelFormatError("model file has no version tag")
    if d["version"] != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {d['version']!r}")
    try:
        names = tuple(d["feature_names"])
        mean = np.array(d["scaler_means"], dtype=float)
        std = np.array(d["scaler_stds"], dtype=float)
        w = np.array(d["weights"], dtype=float)
        hp = Hyperparams(seed=int(d["seed"]), **d["hyperparameters"])
        m = StageModel(w, float(d["bias"]), Scaler(mean, std), names,
                       int(d["stage_index"]), hp, tuple(d.get("loss_history", ())))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    if not (len(names) == len(w) == len(mean) == len(std)):
        raise ModelFormatError("model vectors disagree in length")
    if np.any(std <= 0):
        raise ModelFormatError("scaler standard deviations must be positive")
    return m


def save_model(m: StageModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(m), indent=2, sort_keys=True) + "\n")


def load_model(path: str | Path) -> StageModel:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(d)


def model_filename(stage_index: int) -> str:
    return f"stage_{stage_index}.json"


def save_models(models: Sequence[StageModel], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for m in models:
        p = directory / model_filename(m.stage_index)
        save_model(m, p)
        paths.append(p)
    return paths


def load_models(directory: str | Path) -> list[StageModel]:
    """All ``stage_<i>.json`` files in stage order."""
    directory = Path(directory)
    found = {}
    for p in directory.glob("stage_*.json"):
        try:
            i = int(p.stem.split("_", 1)[1])
        except ValueError:
            continue
        found[i] = p
    if found and sorted(found) != list(range(1, len(found) + 1)):
        raise ModelFormatError(f"{directory}: stage files are not numbered 1..{len(found)}")
    models = [load_model(found[i]) for i in sorted(found)]
    for i, m in enumerate(models, 1):
        if m.stage_index != i:
            raise ModelFormatError(f"{found[i]} holds stage {m.stage_index}")
    return models
