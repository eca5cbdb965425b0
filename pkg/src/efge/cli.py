"""Command-line entry point: ``efge {embed,classify,linkpred,stats}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation.classification import DEFAULT_RATIOS, evaluate_classification
from .evaluation.linkpred import build_lp_dataset, evaluate_link_prediction
from .graph import (
    GraphFormatError,
    LabelMap,
    graph_stats,
    label_file_tokens,
    largest_connected_component,
    load_edge_list,
    load_labels,
    parse_labels,
)
from .io import EmbeddingFormatError, load_embeddings, save_embeddings
from .model import ModelKind
from .pipeline import embed
from .train import NumericalError, TrainConfig
from .walks import WalkConfig

log = logging.getLogger("efge")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _ratios(text):
    try:
        values = [float(x) / 100 if float(x) >= 1 else float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratio list {text!r}") from None
    if not values or any(not 0 < v < 1 for v in values):
        raise argparse.ArgumentTypeError("ratios must lie in (0, 1) or be percentages in [1, 100)")
    return values


def _add_common(p):
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--json", help="write the machine-readable report/manifest here")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_training(p):
    g = p.add_argument_group("walks and training")
    g.add_argument("--method", choices=["bern", "pois", "norm"], default="bern")
    g.add_argument("--strategy", choices=["node2vec", "deepwalk"], default="node2vec")
    g.add_argument("--walks", type=_positive_int, default=80, help="walks per node")
    g.add_argument("--walk-length", type=_positive_int, default=10)
    g.add_argument("--window", type=_positive_int, default=10)
    g.add_argument("--p", type=_positive_float, default=1.0)
    g.add_argument("--q", type=_positive_float, default=1.0)
    g.add_argument("--dim", type=_positive_int, default=128)
    g.add_argument("--negative", type=_positive_int, default=5)
    g.add_argument("--lr", type=_positive_float, default=0.025)
    g.add_argument("--lr-min", type=_positive_float, default=None)
    g.add_argument("--epochs", type=_positive_int, default=1)
    g.add_argument("--clamp", type=_positive_float, default=None)
    g.add_argument("--sigma-pos", type=_positive_float, default=None)
    g.add_argument("--sigma-neg", type=_positive_float, default=None)
    g.add_argument("--export", choices=["alpha", "beta"], default="alpha",
                   help="which vectors represent a node downstream")
    g.add_argument("--corpus-cache", help="binary walk corpus file to reuse or create")


def _add_eval(p):
    g = p.add_argument_group("evaluation")
    g.add_argument("--l2", type=_positive_float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="efge", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    parser.subcommands = sub.choices

    p = sub.add_parser("embed", help="learn node embeddings from an edge list")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", help="label file; labeled nodes missing from the edge list become isolated nodes")
    p.add_argument("--output", required=True, help="embedding file (word2vec text format)")
    _add_common(p)
    _add_training(p)

    p = sub.add_parser("classify", help="node classification over several train ratios")
    p.add_argument("--labels", required=True)
    p.add_argument("--embeddings", help="precomputed embedding file")
    p.add_argument("--graph", help="edge list to embed when --embeddings is not given")
    p.add_argument("--ratios", type=_ratios, default=list(DEFAULT_RATIOS))
    p.add_argument("--repeats", type=_positive_int, default=50)
    _add_common(p)
    _add_training(p)
    _add_eval(p)

    p = sub.add_parser("linkpred", help="link prediction on the largest connected component")
    p.add_argument("--graph", required=True)
    p.add_argument("--fraction", type=float, default=0.5, help="share of edges to hold out")
    _add_common(p)
    _add_training(p)
    _add_eval(p)

    p = sub.add_parser("stats", help="dataset statistics")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels")
    _add_common(p)
    return parser


def read_config(path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            config = read_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except UsageError as exc:
            parser.error(str(exc))
        subparser = parser.subcommands[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known - {"config"})
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        for action in subparser._actions:
            if isinstance(action, argparse._StoreTrueAction) and action.dest in config:
                config[action.dest] = config[action.dest].lower() in ("1", "true", "yes", "on")
        # re-parse so flags override config values and config values get type-checked
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


# -- helpers ------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _walk_config(args) -> WalkConfig:
    return WalkConfig(walks_per_node=args.walks, walk_length=args.walk_length, window=args.window,
                      p=args.p, q=args.q, biased=args.strategy == "node2vec", seed=args.seed)


def _train_config(args) -> TrainConfig:
    if args.method != "norm" and (args.sigma_pos is not None or args.sigma_neg is not None):
        log.warning("--sigma-pos/--sigma-neg only apply to --method norm; ignored")
    model = ModelKind(args.method,
                      sigma_pos=args.sigma_pos if args.method == "norm" and args.sigma_pos else 1.0,
                      sigma_neg=args.sigma_neg if args.method == "norm" and args.sigma_neg else 1.0)
    try:
        return TrainConfig(model=model, dim=args.dim, negatives=args.negative, window=args.window,
                           lr_start=args.lr, lr_min=args.lr_min, epochs=args.epochs,
                           clamp=args.clamp, seed=args.seed, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _effective(walk_cfg: WalkConfig, train_cfg: TrainConfig, args) -> dict:
    m = train_cfg.model
    return {
        "method": m.name,
        "sigma_pos": m.sigma_pos,
        "sigma_neg": m.sigma_neg,
        "strategy": args.strategy,
        "walks_per_node": walk_cfg.walks_per_node,
        "walk_length": walk_cfg.walk_length,
        "window": walk_cfg.window,
        "p": walk_cfg.p,
        "q": walk_cfg.q,
        "dim": train_cfg.dim,
        "negatives": train_cfg.negatives,
        "lr_start": train_cfg.lr_start,
        "lr_min": train_cfg.min_learning_rate,
        "epochs": train_cfg.epochs,
        "clamp": train_cfg.dot_clamp,
        "export": args.export,
        "seed": args.seed,
        "threads": args.threads,
    }


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _read_graph(path, label_path=None):
    extra = []
    if label_path:
        with open(label_path) as fh:
            extra = label_file_tokens(fh)
    with open(path) as fh:
        return load_edge_list(fh, extra_nodes=extra)


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _embed_graph(g, args):
    walk_cfg = _walk_config(args)
    train_cfg = _train_config(args)
    result = embed(g, walk_cfg, train_cfg, corpus_cache=args.corpus_cache)
    vectors = result.embeddings.alpha if args.export == "alpha" else result.embeddings.beta
    info = {
        "parameters": _effective(walk_cfg, train_cfg, args),
        "corpus": {"walks": result.corpus_walks, "pairs": result.corpus_pairs},
        "objective": {"initial": _finite_or_none(result.initial_objective),
                      "final": _finite_or_none(result.final_objective)},
    }
    return vectors, info


# -- subcommands --------------------------------------------------------------

def cmd_embed(args) -> int:
    start = time.perf_counter()
    g = _read_graph(args.graph, args.labels)
    vectors, info = _embed_graph(g, args)
    with open(args.output, "w") as fh:
        save_embeddings(vectors, g.tokens, fh)
    inputs = {"graph": _sha256(args.graph)}
    if args.labels:
        inputs["labels"] = _sha256(args.labels)
    manifest = {
        "command": "embed",
        "version": __version__,
        "inputs": inputs,
        "graph": {"nodes": g.num_nodes, "edges": g.num_edges},
        "output": str(args.output),
        **info,
        "wall_time_seconds": time.perf_counter() - start,
    }
    _write_json(args.json or f"{args.output}.manifest.json", manifest)
    print(f"wrote {g.num_nodes} x {vectors.shape[1]} embeddings to {args.output}")
    print(f"monitored objective {info['objective']['initial']} -> {info['objective']['final']}")
    return EXIT_OK


def _labels_for_tokens(tokens, label_path) -> LabelMap:
    index = {t: i for i, t in enumerate(tokens)}
    with open(label_path) as fh:
        missing = [t for t in label_file_tokens(fh) if t not in index]
    if missing:
        shown = ", ".join(missing[:20]) + (" ..." if len(missing) > 20 else "")
        raise GraphFormatError(f"{len(missing)} labeled nodes have no embedding: {shown}")

    with open(label_path) as fh:
        return parse_labels(fh, index, len(tokens))


def cmd_classify(args) -> int:
    inputs = {"labels": _sha256(args.labels)}
    info = {}
    if args.embeddings:
        with open(args.embeddings) as fh:
            tokens, vectors = load_embeddings(fh)
        inputs["embeddings"] = _sha256(args.embeddings)
    elif args.graph:
        g = _read_graph(args.graph, args.labels)
        tokens = list(g.tokens)
        vectors, info = _embed_graph(g, args)
        inputs["graph"] = _sha256(args.graph)
    else:
        raise UsageError("classify needs --embeddings or --graph")
    labels = _labels_for_tokens(tokens, args.labels)
    report = evaluate_classification(vectors, labels, ratios=args.ratios, repeats=args.repeats,
                                     l2=args.l2, seed=args.seed)
    print(report.table())
    if args.json:
        _write_json(args.json, {
            "command": "classify",
            "version": __version__,
            "inputs": inputs,
            "evaluation": {"l2": args.l2, "seed": args.seed, "label_count": labels.label_count,
                           "labeled_nodes": int(len(labels.labeled_nodes()))},
            **info,
            "report": report.as_dict(),
        })
    return EXIT_OK


def cmd_linkpred(args) -> int:
    g = _read_graph(args.graph)
    lcc, _ = largest_connected_component(g)
    data = build_lp_dataset(lcc, np.random.default_rng([args.seed, 1]), fraction=args.fraction)
    vectors, info = _embed_graph(data.residual, args)
    report = evaluate_link_prediction(vectors, data, l2=args.l2)
    print(report.table())
    if args.json:
        _write_json(args.json, {
            "command": "linkpred",
            "version": __version__,
            "inputs": {"graph": _sha256(args.graph)},
            "graph": {"nodes": g.num_nodes, "edges": g.num_edges,
                      "lcc_nodes": lcc.num_nodes, "lcc_edges": lcc.num_edges},
            "evaluation": {"l2": args.l2, "fraction": args.fraction},
            **info,
            "report": report.as_dict(),
        })
    return EXIT_OK


def cmd_stats(args) -> int:
    g = _read_graph(args.graph, args.labels)
    stats = graph_stats(g).as_dict()
    if args.labels:
        with open(args.labels) as fh:
            stats["labels"] = load_labels(fh, g).label_count
    for key, value in stats.items():
        print(f"{key:<12} {value:.6g}" if isinstance(value, float) else f"{key:<12} {value}")
    if args.json:
        _write_json(args.json, {"command": "stats", "version": __version__,
                                "inputs": {"graph": _sha256(args.graph)}, "stats": stats})
    return EXIT_OK


COMMANDS = {"embed": cmd_embed, "classify": cmd_classify, "linkpred": cmd_linkpred, "stats": cmd_stats}


def main(argv=None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"efge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"efge: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphFormatError, EmbeddingFormatError, OSError, ValueError) as exc:
        print(f"efge: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
