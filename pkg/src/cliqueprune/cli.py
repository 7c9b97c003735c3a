"""Command-line front end: ``cliqueprune <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .decomposition import omega_oracle_prune
from .features import edge_features, vertex_features
from .graph import (FORMATS, EmptyGraphError, Graph, GraphFormatError, induced_subgraph,
                    load_graph, write_graph)
from .learn import Hyperparams, ModelFormatError, load_models, save_models
from .pipeline import (CORPUS_KINDS, ConfigError, OracleModel, StageConfig, TrainingExhausted,
                       evaluate_pruning, generate_corpus, multi_stage_prune, multi_stage_train)
from .solver import Budget, BudgetExceeded, enumerate_max_cliques, format_report, read_report

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_CONFIG = 4

GRAPH_SUFFIXES = (".edges", ".txt", ".el", ".mtx", ".clq", ".col")

log = logging.getLogger("cliqueprune")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--threads", type=int, default=1,
                   help="worker processes for corpus-level work (default 1)")
    g.add_argument("--format", choices=FORMATS, default="auto", help="input graph format")
    g.add_argument("--pretty", action="store_true", help="human-readable output")
    g.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def _budget_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--budget", type=float, default=None, metavar="SECONDS",
                   help="wall-clock limit for exact solving")
    p.add_argument("--max-nodes", type=int, default=None,
                   help="search-node limit for exact solving")


def _stage_args(p: argparse.ArgumentParser, defaults_from_models: bool = False) -> None:
    d = None if defaults_from_models else argparse.SUPPRESS
    p.add_argument("--stages", type=int, default=d, help="number of stages (default 5)")
    p.add_argument("--strategy", choices=("CC", "IC"), default=d,
                   help="constant or increasing confidence (default CC)")
    p.add_argument("--q", type=float, default=d, help="confidence threshold (default 0.95)")
    p.add_argument("--d", type=float, default=d, help="IC per-stage increment (default 0)")
    p.add_argument("--dense", action="store_true",
                   help="dense-graph defaults: 1 stage, q=0.98")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="cliqueprune",
        description="Learned multi-stage pruning for maximum clique enumeration.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("solve", parents=[common], help="enumerate all maximum cliques")
    p.add_argument("graph")
    _budget_args(p)
    p.add_argument("--list", action="store_true", help="print every maximum clique")
    p.add_argument("-o", "--output", help="write the full clique report here")

    p = sub.add_parser("features", parents=[common], help="vertex or edge feature CSV")
    p.add_argument("graph")
    p.add_argument("--edges", action="store_true", help="edge features instead of vertex")
    p.add_argument("-o", "--output", help="CSV path (default stdout)")

    p = sub.add_parser("train", parents=[common], help="train per-stage models")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--corpus", help="directory of graph files (+ optional .cliques)")
    src.add_argument("--generate", choices=CORPUS_KINDS, help="synthetic corpus kind")
    p.add_argument("--count", type=int, default=40, help="generated graphs (default 40)")
    p.add_argument("--n", type=int, default=None, help="vertices per generated graph")
    p.add_argument("--clique-size", type=int, default=None)
    _stage_args(p)
    p.add_argument("--epochs", type=int, default=Hyperparams.epochs)
    p.add_argument("--lr", type=float, default=Hyperparams.learning_rate)
    p.add_argument("--l2", type=float, default=Hyperparams.l2)
    _budget_args(p)
    p.add_argument("-o", "--output", required=True, help="model directory")

    p = sub.add_parser("prune", parents=[common], help="prune a graph with stage models")
    p.add_argument("graph")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--models", help="model directory written by 'train'")
    which.add_argument("--oracle", metavar="CLIQUES",
                       help="clique report of the graph; prune to exactly V(M)")
    _stage_args(p, defaults_from_models=True)
    kc = p.add_mutually_exclusive_group()
    kc.add_argument("--pre-kcore", type=int, default=None, metavar="K",
                    help="first drop vertices of core number < K-1")
    kc.add_argument("--pre-kcore-exact", action="store_true",
                    help="as --pre-kcore with K = exact omega (solves the graph)")
    _budget_args(p)
    p.add_argument("-o", "--output", required=True, help="pruned edge-list path")
    p.add_argument("--report", help="JSON report path (default stdout)")
    p.add_argument("--timing", action="store_true", help="include timings in the report")

    p = sub.add_parser("eval", parents=[common], help="compare a pruned graph to the original")
    p.add_argument("original")
    p.add_argument("pruned")
    p.add_argument("--truth", metavar="CLIQUES", help="clique report of the original")
    _budget_args(p)

    p = sub.add_parser("kcore", parents=[common], help="omega-oracle k-core pruning")
    p.add_argument("graph")
    kk = p.add_mutually_exclusive_group(required=True)
    kk.add_argument("--k", type=int, help="clique size estimate")
    kk.add_argument("--exact-omega", action="store_true", help="use the exact clique number")
    _budget_args(p)
    p.add_argument("-o", "--output", help="pruned edge-list path")

    p = sub.add_parser("gen", parents=[common], help="write a solved synthetic corpus")
    p.add_argument("kind", choices=CORPUS_KINDS)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--clique-size", type=int, default=None)
    _budget_args(p)
    p.add_argument("-o", "--output", required=True, help="output directory")
    return parser


def _budget(args) -> Budget:
    return Budget(seconds=args.budget, nodes=args.max_nodes)


def _emit(record: dict, pretty: bool, out=None) -> None:
    out = out or sys.stdout
    if pretty:
        width = max((len(k) for k in record), default=0)
        for k, v in record.items():
            if isinstance(v, float):
                v = f"{v:.4f}"
            elif isinstance(v, (list, dict)):
                v = json.dumps(v)
            out.write(f"{k:<{width}}  {v}\n")
    else:
        out.write(json.dumps(record, indent=2, sort_keys=False) + "\n")


def _stage_config(args, stored: dict | None = None) -> StageConfig:
    base = dict(stored or {})
    if getattr(args, "dense", False):
        base.update(asdict(StageConfig.dense()))
    for key in ("stages", "strategy", "q", "d"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    base["seed"] = args.seed
    return StageConfig(**base)


def _validate(args) -> None:
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    if getattr(args, "budget", None) is not None and args.budget <= 0:
        raise ConfigError("--budget must be positive")
    if getattr(args, "max_nodes", None) is not None and args.max_nodes < 1:
        raise ConfigError("--max-nodes must be positive")
    if getattr(args, "count", None) is not None and args.count < 0:
        raise ConfigError("--count must be non-negative")
    if args.command == "train":
        if args.epochs < 1 or args.lr <= 0 or args.l2 < 0:
            raise ConfigError("need epochs >= 1, lr > 0, l2 >= 0")
    if args.command == "kcore" and args.k is not None and args.k < 1:
        raise ConfigError("--k must be >= 1")
    if args.command in ("train", "prune"):
        _stage_config(args, {"stages": 1} if args.command == "prune" else None)


# -- commands ------------------------------------------------------------------

def cmd_solve(args) -> int:
    g = load_graph(args.graph, args.format)
    cs = enumerate_max_cliques(g, _budget(args))
    report = format_report(cs, g, list_cliques=True)
    if args.output:
        Path(args.output).write_text(report)
    sys.stdout.write(report if args.list else report.splitlines()[0] + "\n")
    return EXIT_OK


def cmd_features(args) -> int:
    g = load_graph(args.graph, args.format)
    fm = edge_features(g) if args.edges else vertex_features(g)
    if args.output:
        fm.to_csv(args.output)
    else:
        fm.to_csv(sys.stdout)
    return EXIT_OK


def _find_graphs(directory: Path) -> list[Path]:
    return sorted(p for p in directory.iterdir()
                  if p.is_file() and p.suffix in GRAPH_SUFFIXES)


def _load_corpus(args):
    directory = Path(args.corpus)
    if not directory.is_dir():
        raise ConfigError(f"{directory} is not a directory")
    corpus = []
    for path in _find_graphs(directory):
        g = load_graph(path, args.format)
        truth_path = path.with_suffix(".cliques")
        if truth_path.exists():
            cs = read_report(truth_path, g)
        else:
            cs = enumerate_max_cliques(g, _budget(args))
        corpus.append((g, cs))
    if not corpus:
        raise ConfigError(f"no graph files in {directory}")
    return corpus


def cmd_train(args) -> int:
    cfg = _stage_config(args)
    hp = Hyperparams(epochs=args.epochs, learning_rate=args.lr, l2=args.l2, seed=args.seed)
    if args.corpus:
        corpus = _load_corpus(args)
        source = {"corpus": str(args.corpus), "graphs": len(corpus)}
    else:
        corpus = generate_corpus(args.generate, args.count, args.n, seed=args.seed,
                                 clique_size=args.clique_size, budget=_budget(args),
                                 threads=args.threads)
        source = {"generate": args.generate, "count": args.count, "n": args.n,
                  "clique_size": args.clique_size}
    history: list = []
    models = multi_stage_train(corpus, cfg, hp, threads=args.threads, history=history)
    out = Path(args.output)
    save_models(models, out)
    (out / "config.json").write_text(json.dumps(
        {"stage_config": asdict(cfg), "hyperparameters": asdict(hp), "source": source},
        indent=2) + "\n")
    (out / "train_log.json").write_text(json.dumps(history, indent=2) + "\n")
    sys.stdout.write(f"wrote {len(models)} stage models to {out}\n")
    return EXIT_OK


def _solve_or_read(g: Graph, truth_path, args):
    if truth_path:
        return read_report(truth_path, g)
    return enumerate_max_cliques(g, _budget(args))


def cmd_prune(args) -> int:
    g = load_graph(args.graph, args.format)
    if args.models:
        models = load_models(args.models)
        cfg_path = Path(args.models) / "config.json"
        stored = None
        if cfg_path.exists():
            stored = json.loads(cfg_path.read_text())["stage_config"]
        if not models:
            stored = None
        cfg = _stage_config(args, stored)
        if models and len(models) < cfg.stages:
            raise ConfigError(f"{args.models} holds {len(models)} models, "
                              f"config asks for {cfg.stages} stages")
    else:
        base = {"stages": 1}
        cfg = _stage_config(args, base)
        truth = read_report(args.oracle, g)
        models = [OracleModel.from_truth(g, truth)] * cfg.stages
    pre = args.pre_kcore
    if args.pre_kcore_exact:
        pre = enumerate_max_cliques(g, _budget(args)).omega
    pruned, report = multi_stage_prune(g, models, cfg, pre_omega=pre)
    write_graph(pruned, args.output)
    record = report.to_dict(g, timing=args.timing)
    if args.report:
        with open(args.report, "w") as fh:
            _emit(record, args.pretty, fh)
    else:
        _emit(record, args.pretty)
    return EXIT_OK


def cmd_eval(args) -> int:
    original = load_graph(args.original, args.format)
    pruned = load_graph(args.pruned, args.format)
    truth = _solve_or_read(original, args.truth, args)
    metrics = evaluate_pruning(original, truth, pruned, _budget(args))
    _emit(metrics.to_dict(Path(args.original).name), args.pretty)
    return EXIT_OK


def cmd_kcore(args) -> int:
    g = load_graph(args.graph, args.format)
    k = enumerate_max_cliques(g, _budget(args)).omega if args.exact_omega else args.k
    keep = omega_oracle_prune(g, k)
    pruned = induced_subgraph(g, keep)
    if args.output:
        write_graph(pruned, args.output)
    _emit({
        "k": k,
        "n": g.n, "m": g.m,
        "pruned_n": pruned.n, "pruned_m": pruned.m,
        "vertex_prune_ratio": (g.n - pruned.n) / g.n,
        "edge_prune_ratio": (g.m - pruned.m) / g.m if g.m else 0.0,
    }, args.pretty)
    return EXIT_OK


def cmd_gen(args) -> int:
    corpus = generate_corpus(args.kind, args.count, args.n, seed=args.seed,
                             clique_size=args.clique_size, budget=_budget(args),
                             threads=args.threads)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    width = max(3, len(str(max(args.count - 1, 0))))
    for i, (g, cs) in enumerate(corpus):
        stem = f"graph_{i:0{width}d}"
        write_graph(g, out / f"{stem}.edges")
        (out / f"{stem}.cliques").write_text(format_report(cs, g))
    sys.stdout.write(f"wrote {len(corpus)} graphs to {out}\n")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "features": cmd_features,
    "train": cmd_train,
    "prune": cmd_prune,
    "eval": cmd_eval,
    "kcore": cmd_kcore,
    "gen": cmd_gen,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except (ConfigError, TrainingExhausted) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not our error
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except (GraphFormatError, EmptyGraphError, ModelFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
