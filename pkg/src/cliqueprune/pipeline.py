"""Multi-stage learned pruning: training, pruning, evaluation, synthetic corpora."""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from .decomposition import omega_oracle_prune
from .features import VERTEX_FEATURES, FeatureMatrix, vertex_features
from .generators import chung_lu, gnp, plant_clique
from .graph import Graph, VertexSet, induced_subgraph
from .learn import Hyperparams, StageModel, TrainingSet, balance, train_logistic
from .solver import Budget, CliqueSet, enumerate_max_cliques

log = logging.getLogger(__name__)

STRATEGIES = ("CC", "IC")


class ConfigError(ValueError):
    pass


class TrainingExhausted(RuntimeError):
    def __init__(self, stage: int):
        self.stage = stage
        super().__init__(f"no usable training graphs left at stage {stage}")


@dataclass(frozen=True)
class StageConfig:
    stages: int = 5
    strategy: str = "CC"
    q: float = 0.95
    d: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.stages < 1:
            raise ConfigError(f"need at least one stage, got {self.stages}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if not 0.5 < self.q < 1.0:
            raise ConfigError(f"confidence threshold q must lie in (0.5, 1), got {self.q}")
        if self.strategy == "IC":
            if self.d < 0:
                raise ConfigError(f"increment d must be non-negative, got {self.d}")
            if self.threshold(self.stages) > 1.0 + 1e-12:
                raise ConfigError(f"IC threshold exceeds 1 at stage {self.stages}")

    def threshold(self, stage: int) -> float:
        """Confidence threshold of 1-based ``stage``."""
        if self.strategy == "CC":
            return self.q
        return self.q + (stage - 1) * self.d

    @classmethod
    def sparse(cls, seed: int = 0) -> "StageConfig":
        return cls(stages=5, strategy="CC", q=0.95, seed=seed)

    @classmethod
    def dense(cls, seed: int = 0) -> "StageConfig":
        return cls(stages=1, strategy="CC", q=0.98, seed=seed)


class PruningModel(Protocol):
    def negative_proba(self, fm: FeatureMatrix) -> np.ndarray: ...


@dataclass(frozen=True)
class ConstantModel:
    """Stub that assigns every vertex the same negative-class probability."""
    p: float

    def negative_proba(self, fm: FeatureMatrix) -> np.ndarray:
        return np.full(len(fm.keys), self.p)


@dataclass(frozen=True)
class OracleModel:
    """Stub that knows V(M): probability 0 on its labels, 1 elsewhere."""
    keep_labels: frozenset

    @classmethod
    def from_truth(cls, g: Graph, truth: CliqueSet) -> "OracleModel":
        return cls(frozenset(g.labels[v] for v in truth.covered))

    def negative_proba(self, fm: FeatureMatrix) -> np.ndarray:
        return np.array([0.0 if k in self.keep_labels else 1.0 for k in fm.keys])


def _pmap(fn: Callable, items: Sequence, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_stage(g: Graph, model: PruningModel, threshold: float,
              feats: FeatureMatrix | None = None) -> VertexSet:
    """Vertices whose negative-class probability is strictly below ``threshold``."""
    if g.n == 0:
        return frozenset()
    if feats is None:
        feats = vertex_features(g)
    p = np.asarray(model.negative_proba(feats))
    return frozenset(np.flatnonzero(p < threshold).tolist())


# -- pruning -------------------------------------------------------------------

@dataclass(frozen=True)
class StageRecord:
    stage: int  # 0 marks the ω-oracle pre-pass
    threshold: float | None
    survivors: VertexSet  # internal ids of the original graph
    vertices_removed: int
    edges_removed: int
    n_after: int
    m_after: int
    seconds_features: float = 0.0
    seconds_prune: float = 0.0


@dataclass(frozen=True)
class PruneReport:
    original_n: int
    original_m: int
    stages: tuple[StageRecord, ...]
    final_n: int
    final_m: int
    seconds_total: float = 0.0

    @property
    def vertex_ratio(self) -> float:
        return _ratio(self.original_n - self.final_n, self.original_n)

    @property
    def edge_ratio(self) -> float:
        return _ratio(self.original_m - self.final_m, self.original_m)

    @property
    def survivors(self) -> VertexSet | None:
        return self.stages[-1].survivors if self.stages else None

    def to_dict(self, g: Graph, timing: bool = False) -> dict:
        """JSON-ready record; ``g`` is the original graph (for labels).

        Timings are left out unless asked for, so reports of identical runs
        are byte-identical.
        """
        lab = g.labels
        stages = []
        for r in self.stages:
            rec = {
                "stage": r.stage,
                "threshold": r.threshold,
                "vertices_removed": r.vertices_removed,
                "edges_removed": r.edges_removed,
                "n_after": r.n_after,
                "m_after": r.m_after,
                "survivors": sorted(lab[v] for v in r.survivors),
            }
            if timing:
                rec["seconds_features"] = r.seconds_features
                rec["seconds_prune"] = r.seconds_prune
            stages.append(rec)
        out = {
            "original_n": self.original_n,
            "original_m": self.original_m,
            "final_n": self.final_n,
            "final_m": self.final_m,
            "vertex_prune_ratio": self.vertex_ratio,
            "edge_prune_ratio": self.edge_ratio,
            "stages": stages,
        }
        if timing:
            out["seconds_total"] = self.seconds_total
        return out


def _ratio(removed: int, total: int) -> float:
    return removed / total if total else 0.0


def multi_stage_prune(g: Graph, models: Sequence[PruningModel], cfg: StageConfig,
                      pre_omega: int | None = None) -> tuple[Graph, PruneReport]:
    """Apply the stage models in turn, recomputing features on each survivor graph.

    ``pre_omega`` first applies the ω-oracle k-core pass with that clique size.
    With no models the graph is returned unchanged.
    """
    if models and len(models) < cfg.stages:
        raise ConfigError(f"config asks for {cfg.stages} stages but only "
                          f"{len(models)} models were given")
    t_start = time.perf_counter()
    records = []
    cur = g
    ids = list(range(g.n))  # ids[i] = original id of cur's vertex i

    def record(stage, threshold, keep, t_feat, t_prune):
        nonlocal cur, ids
        before_n, before_m = cur.n, cur.m
        cur = induced_subgraph(cur, keep)
        ids = [ids[i] for i in sorted(keep)]
        records.append(StageRecord(stage, threshold, frozenset(ids), before_n - cur.n,
                                   before_m - cur.m, cur.n, cur.m, t_feat, t_prune))

    if pre_omega is not None:
        t0 = time.perf_counter()
        keep = omega_oracle_prune(cur, pre_omega)
        record(0, None, keep, 0.0, time.perf_counter() - t0)

    for i in range(cfg.stages if models else 0):
        if cur.n == 0:
            log.info("graph empty before stage %d; stopping", i + 1)
            break
        threshold = cfg.threshold(i + 1)
        t0 = time.perf_counter()
        feats = vertex_features(cur)
        t1 = time.perf_counter()
        keep = run_stage(cur, models[i], threshold, feats)
        record(i + 1, threshold, keep, t1 - t0, time.perf_counter() - t1)

    report = PruneReport(g.n, g.m, tuple(records), cur.n, cur.m,
                         time.perf_counter() - t_start)
    return cur, report


# -- training ------------------------------------------------------------------

def _stage_training_set(g: Graph, positive_labels: frozenset, feats: FeatureMatrix,
                        graph_id: int) -> TrainingSet:
    y = np.fromiter((lab in positive_labels for lab in g.labels), dtype=np.int64, count=g.n)
    prov = tuple((graph_id, lab) for lab in g.labels)
    return TrainingSet(np.array(feats.rows, dtype=float), y, feats.names, prov)


def multi_stage_train(corpus: Sequence[tuple[Graph, CliqueSet]], cfg: StageConfig,
                      hp: Hyperparams = Hyperparams(), threads: int = 1,
                      feature_names: Sequence[str] = VERTEX_FEATURES,
                      history: list | None = None) -> list[StageModel]:
    """Train one model per stage on the survivors of the previous stages.

    Stage ``i`` pools labelled vertices of every corpus graph that is still
    non-empty and has both classes, balances the pool, and fits a model whose
    pruning decides what stage ``i + 1`` sees. Per-stage statistics are
    appended to ``history`` when given.
    """
    if not corpus:
        raise ConfigError("training corpus is empty")
    feature_names = tuple(feature_names)
    active = []
    for gid, (g, truth) in enumerate(corpus):
        active.append((gid, g, frozenset(g.labels[v] for v in truth.covered)))

    models = []
    for stage in range(1, cfg.stages + 1):
        live = []
        for gid, g, pos in active:
            if g.n == 0:
                log.warning("stage %d: graph %d is empty, dropping it", stage, gid)
                continue
            live.append((gid, g, pos))
        all_feats = _pmap(vertex_features, [g for _, g, _ in live], threads)

        parts, kept = [], []
        for (gid, g, pos), fm in zip(live, all_feats):
            t = _stage_training_set(g, pos, fm, gid)
            if t.positives == 0 or t.negatives == 0:
                log.warning("stage %d: graph %d has a single class (%d pos, %d neg), "
                            "dropping it", stage, gid, t.positives, t.negatives)
                continue
            parts.append(t.select(feature_names))
            kept.append((gid, g, pos, fm))
        if not parts:
            raise TrainingExhausted(stage)

        pooled = balance(TrainingSet.concat(parts), seed=[cfg.seed, stage])
        model = train_logistic(pooled, replace(hp, seed=hp.seed + stage - 1), stage_index=stage)
        models.append(model)
        log.info("stage %d: trained on %d samples from %d graphs",
                 stage, len(pooled), len(parts))
        if history is not None:
            history.append({
                "stage": stage,
                "threshold": cfg.threshold(stage),
                "graphs": [gid for gid, *_ in kept],
                "vertices": int(sum(len(p) for p in parts)),
                "positives": int(sum(p.positives for p in parts)),
                "balanced_samples": len(pooled),
                "final_loss": model.loss_history[-1] if model.loss_history else None,
            })

        threshold = cfg.threshold(stage)
        active = []
        for gid, g, pos, fm in kept:
            keep = run_stage(g, model, threshold, fm.select(feature_names))
            active.append((gid, induced_subgraph(g, keep), pos))
    return models


# -- evaluation ----------------------------------------------------------------

@dataclass(frozen=True)
class EvalMetrics:
    n: int
    m: int
    omega: int
    count: int
    pruned_n: int
    pruned_m: int
    new_omega: int
    new_count: int

    @property
    def omega_preserved(self) -> bool:
        return self.new_omega == self.omega

    @property
    def count_preserved(self) -> bool:
        return self.omega_preserved and self.new_count == self.count

    @property
    def vertex_ratio(self) -> float:
        return _ratio(self.n - self.pruned_n, self.n)

    @property
    def edge_ratio(self) -> float:
        return _ratio(self.m - self.pruned_m, self.m)

    def to_dict(self, instance: str | None = None) -> dict:
        out = {} if instance is None else {"instance": instance}
        out.update({
            "n": self.n, "m": self.m, "omega": self.omega, "n_omega": self.count,
            "omega_preserved": self.omega_preserved,
            "pruned_omega": self.new_omega,
            "count_preserved": self.count_preserved,
            "pruned_n_omega": self.new_count,
            "vertex_prune_ratio": self.vertex_ratio,
            "edge_prune_ratio": self.edge_ratio,
        })
        return out


def _check_induced(original: Graph, pruned: Graph) -> None:
    index = original.label_index
    try:
        ids = [index[lab] for lab in pruned.labels]
    except KeyError as exc:
        raise ValueError(f"pruned graph has vertex {exc.args[0]} not in the original") from None
    expected = induced_subgraph(original, ids)
    if sorted(ids) != ids:
        order = sorted(range(len(ids)), key=ids.__getitem__)
        pruned = induced_subgraph(pruned, order)
    if expected.adjacency != pruned.adjacency:
        raise ValueError("pruned graph is not an induced subgraph of the original")


def evaluate_pruning(original: Graph, truth: CliqueSet, pruned: Graph,
                     budget: Budget | None = None) -> EvalMetrics:
    _check_induced(original, pruned)
    if pruned.n:
        after = enumerate_max_cliques(pruned, budget)
        new_omega, new_count = after.omega, after.count
    else:
        new_omega, new_count = 0, 0
    return EvalMetrics(original.n, original.m, truth.omega, truth.count,
                       pruned.n, pruned.m, new_omega, new_count)


def grid_search(train: Sequence[tuple[Graph, CliqueSet]],
                validation: Sequence[tuple[Graph, CliqueSet]],
                stages: Iterable[int] = range(1, 9),
                qs: Iterable[float] = (0.55, 0.65, 0.75, 0.85, 0.95),
                strategy: str = "CC", hp: Hyperparams = Hyperparams(),
                seed: int = 0) -> list[dict]:
    """Score every (stages, q) cell on held-out graphs.

    Rows are sorted best first: cells that keep omega on more validation
    graphs win, then higher mean vertex prune ratio.
    """
    rows = []
    for ell in stages:
        for q in qs:
            cfg = StageConfig(stages=ell, strategy=strategy, q=q, seed=seed)
            try:
                models = multi_stage_train(train, cfg, hp)
            except TrainingExhausted as exc:
                rows.append({"stages": ell, "q": q, "exhausted_at": exc.stage})
                continue
            kept, ratios = 0, []
            for g, truth in validation:
                pruned, report = multi_stage_prune(g, models, cfg)
                kept += evaluate_pruning(g, truth, pruned).omega_preserved
                ratios.append(report.vertex_ratio)
            rows.append({"stages": ell, "q": q, "omega_kept": kept,
                         "graphs": len(validation),
                         "mean_vertex_ratio": float(np.mean(ratios)) if ratios else 0.0})
    rows.sort(key=lambda r: (-r.get("omega_kept", -1), -r.get("mean_vertex_ratio", 0.0),
                             r["stages"], r["q"]))
    return rows


# -- synthetic corpora -----------------------------------------------------------

CORPUS_KINDS = ("planted-sparse", "planted-dense")
_MAX_N = {"planted-sparse": 150, "planted-dense": 80}
_DEFAULT_N = {"planted-sparse": 150, "planted-dense": 60}


def default_clique_size(kind: str, n: int) -> int:
    if kind == "planted-dense":
        return math.ceil(2 * math.log2(n))
    return 10


def planted_graph(kind: str, n: int, seed, clique_size: int | None = None,
                  p: float = 0.5, avg_degree: float = 6.0) -> tuple[Graph, tuple[int, ...]]:
    """One random graph of ``kind`` with a planted clique; returns it and the clique."""
    rng = np.random.default_rng(seed)
    size = clique_size or default_clique_size(kind, n)
    if kind == "planted-dense":
        if p < 0.5:
            raise ConfigError(f"dense corpus needs p >= 0.5, got {p}")
        base = gnp(n, p, rng)
    elif kind == "planted-sparse":
        base = chung_lu(n, avg_degree, seed=rng)
    else:
        raise ConfigError(f"unknown corpus kind {kind!r}; choose from {CORPUS_KINDS}")
    return plant_clique(base, size, rng)


def _solve_entry(args) -> tuple[Graph, CliqueSet]:
    kind, n, seed, clique_size, p, avg_degree, budget = args
    g, _ = planted_graph(kind, n, seed, clique_size, p, avg_degree)
    return g, enumerate_max_cliques(g, budget)


def generate_corpus(kind: str, count: int, n: int | None = None, seed: int = 0,
                    clique_size: int | None = None, p: float = 0.5,
                    avg_degree: float = 6.0, budget: Budget | None = None,
                    threads: int = 1) -> list[tuple[Graph, CliqueSet]]:
    """``count`` solved planted-clique graphs; graph ``i`` is seeded by ``(seed, i)``."""
    if kind not in CORPUS_KINDS:
        raise ConfigError(f"unknown corpus kind {kind!r}; choose from {CORPUS_KINDS}")
    n = n or _DEFAULT_N[kind]
    if n > _MAX_N[kind]:
        raise ConfigError(f"{kind} graphs are limited to n <= {_MAX_N[kind]} for exact solving")
    if count < 0:
        raise ConfigError("count must be non-negative")
    jobs = [(kind, n, [seed, i], clique_size, p, avg_degree, budget) for i in range(count)]
    return _pmap(_solve_entry, jobs, threads)
