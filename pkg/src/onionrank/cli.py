"""Command-line pipeline driver.

Subcommands mirror the pipeline stages: ``synth`` writes a synthetic
corpus, ``ingest`` loads one and emits the link graph, ``features``
writes the feature matrix, ``train``/``rank`` fit and apply a scoring
model, ``eval`` scores a ranking file, ``baseline`` runs one link-based
algorithm, ``cv`` runs the full cross-validated comparison of the
trained scheme against all four link-based baselines, and ``annotate``
drives an interactive judging session.

Every run writes a ``manifest.json`` next to its outputs with the
resolved configuration, so any output can be reproduced byte for byte
by re-running with the manifest's values.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import derive_link_graph, ingest_corpus, load_visual_records, parse_rfc3339
from .crossval import (
    BASELINE_CONFIGS,
    DEFAULT_K_GRID,
    FoldPlan,
    compare_baselines,
    cross_validate,
    write_report_csv,
    write_summary_csv,
)
from .errors import ConfigError, DataFormatError, OnionRankError
from .features import (
    FeatureConfig,
    FeatureMatrix,
    GROUP_ORDER,
    FEATURE_GROUPS,
    assemble_feature_matrix,
    load_gazetteer,
    resolve_groups,
    standardize,
)
from .graphalg import hits, katz, load_edgelist, pagerank, save_edgelist, torank
from .groundtruth import annotate_interactive, gains_from_annotations, load_questionnaire
from .ltr import JudgedDomain, ModelParams, TrainConfig, predict_rank, train, write_history_csv
from .metrics import ndcg_at_k
from .segmentation import load_lexicon
from .synth import SynthConfig, generate_corpus


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def read_config_file(path) -> dict:
    """key=value defaults, one per line; '#' starts a comment.

    Keys use the flag spelling without dashes (e.g. ``vocab_size = 5000``).
    Explicit command-line flags override file values.
    """
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path} line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        raw = raw.strip().strip('"').strip("'")
        if raw.lower() in ("true", "false"):
            values[key] = raw.lower() == "true"
        else:
            try:
                values[key] = int(raw)
            except ValueError:
                try:
                    values[key] = float(raw)
                except ValueError:
                    values[key] = raw
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="onionrank", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"onionrank {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with planted gains")
    p.add_argument("--outdir", required=True)
    p.add_argument("--n-domains", type=int, default=290)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--link-density", type=float, default=3.0)
    p.add_argument("--signal", type=float, default=1.0)

    p = sub.add_parser("ingest", help="load a corpus and write its link graph")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-graph", default=None)

    p = sub.add_parser("features", help="write the per-domain feature matrix CSV")
    _add_feature_args(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train a scoring model on annotated domains")
    _add_feature_args(p)
    _add_train_args(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--val-fraction", type=float, default=0.2)
    p.add_argument("--out", required=True)
    p.add_argument("--history", default=None)

    p = sub.add_parser("rank", help="rank a corpus with a trained model")
    _add_feature_args(p, groups=False)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="NDCG of a ranking CSV against annotations")
    p.add_argument("--ranking", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--k-list", default=",".join(str(k) for k in DEFAULT_K_GRID))
    p.add_argument("--out", default=None)

    p = sub.add_parser("baseline", help="run one link-based ranking algorithm")
    p.add_argument("--corpus", default=None)
    p.add_argument("--edgelist", default=None)
    p.add_argument("--algo", required=True, choices=sorted(BASELINE_CONFIGS))
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cv", help="cross-validated comparison of the scheme and all baselines")
    _add_feature_args(p)
    _add_train_args(p)
    p.add_argument("--annotations", required=True)
    p.add_argument("--k-list", default=",".join(str(k) for k in DEFAULT_K_GRID))
    p.add_argument("--outdir", required=True)

    p = sub.add_parser("annotate", help="interactive questionnaire session")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotator", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--domains", default=None, help="comma-separated domain ids; default all")
    p.add_argument("--questions", default=None)

    return parser


def _add_feature_args(p, groups: bool = True):
    p.add_argument("--config", default=None, help="key=value file of defaults; flags override")
    p.add_argument("--corpus", required=True)
    p.add_argument("--gazetteer", default=None)
    p.add_argument("--lexicon", default=None)
    p.add_argument("--visual", default=None)
    if groups:
        p.add_argument("--groups", default="all", help="comma list of text,ner,html,visual,graph or 'all'")
    p.add_argument("--reference-date", default=None, help="RFC-3339 anchor for the recency window")
    p.add_argument("--recency-days", type=int, default=90)
    p.add_argument("--vocab-size", type=int, default=10_000)
    p.add_argument("--min-df", type=int, default=3)
    p.add_argument("--popularity-threshold", type=int, default=5)
    p.add_argument("--top-x", type=int, default=10)
    p.add_argument("--landing-only", action="store_true")
    p.add_argument("--invert-keyword-ratio", action="store_true")


# algorithm names double as aliases for their scheme
SCHEME_ALIASES = {"mlp": "pointwise", "ranknet": "pairwise", "listnet": "listwise"}


def _add_train_args(p):
    p.add_argument(
        "--scheme",
        required=True,
        choices=["pointwise", "pairwise", "listwise", *sorted(SCHEME_ALIASES)],
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--max-epochs", type=int, default=2000)
    p.add_argument("--patience", type=int, default=50)
    p.add_argument("--min-delta", type=float, default=1e-4)
    p.add_argument("--dropout", type=float, default=0.5)


def _feature_config(args) -> FeatureConfig:
    reference = None
    if getattr(args, "reference_date", None):
        reference = parse_rfc3339(args.reference_date)
    return FeatureConfig(
        reference_date=reference,
        recency_days=args.recency_days,
        vocab_size=args.vocab_size,
        min_df=args.min_df,
        popularity_threshold=args.popularity_threshold,
        top_x=args.top_x,
        landing_only=args.landing_only,
        invert_keyword_ratio=args.invert_keyword_ratio,
    )


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        learning_rate=args.lr,
        max_epochs=args.max_epochs,
        patience=args.patience,
        min_delta=args.min_delta,
        dropout=args.dropout,
        seed=args.seed,
    )


def _assemble(args, groups) -> tuple[FeatureMatrix, object]:
    corpus = ingest_corpus(args.corpus)
    selected = resolve_groups(groups)
    if "ner" in selected and not args.gazetteer:
        raise ConfigError("ner features require --gazetteer")
    if "text" in selected and not args.lexicon:
        raise ConfigError("text features require --lexicon")
    gazetteer = load_gazetteer(args.gazetteer) if "ner" in selected else None
    lexicon = load_lexicon(args.lexicon) if "text" in selected and args.lexicon else None
    visual = (
        load_visual_records(args.visual, corpus.domain_ids())
        if "visual" in selected and args.visual
        else None
    )
    graph = derive_link_graph(corpus)
    matrix = assemble_feature_matrix(
        corpus,
        groups=selected,
        gazetteer=gazetteer,
        lexicon=lexicon,
        visual_records=visual,
        graph=graph,
        config=_feature_config(args),
    )
    return matrix, graph


def _judged(matrix: FeatureMatrix, gains: dict[str, int]) -> list[JudgedDomain]:
    missing = [d for d in matrix.domain_ids if d not in gains]
    if missing:
        raise DataFormatError(f"{len(missing)} domains lack annotations, e.g. {missing[:3]}")
    return [
        JudgedDomain(domain_id=d, gain=gains[d], features=matrix.row(d))
        for d in matrix.domain_ids
    ]


def _parse_k_list(text: str) -> tuple[int, ...]:
    try:
        ks = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --k-list {text!r}") from exc
    if not ks or any(k < 1 for k in ks):
        raise ConfigError(f"bad --k-list {text!r}")
    return ks


def _write_manifest(directory: Path, subcommand: str, args, outputs) -> None:
    payload = {
        "subcommand": subcommand,
        "version": __version__,
        "config": {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())},
        "outputs": [str(o) for o in outputs],
    }
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "manifest.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def _cmd_synth(args) -> int:
    out = generate_corpus(
        SynthConfig(
            n_domains=args.n_domains,
            seed=args.seed,
            noise=args.noise,
            link_density=args.link_density,
            signal=args.signal,
            out_dir=Path(args.outdir),
        )
    )
    print(f"wrote corpus with {args.n_domains} domains under {out.corpus_dir}")
    _write_manifest(
        Path(args.outdir),
        "synth",
        args,
        [out.corpus_dir, out.annotations_path, out.planted_path, out.visual_path, out.edges_path],
    )
    return 0


def _cmd_ingest(args) -> int:
    corpus = ingest_corpus(args.corpus)
    graph = derive_link_graph(corpus)
    print(f"{len(corpus)} domains, {sum(len(d.pages) for d in corpus)} pages, {len(graph.edges)} edges")
    outputs = []
    if args.out_graph:
        save_edgelist(graph, args.out_graph)
        outputs.append(args.out_graph)
        _write_manifest(Path(args.out_graph).parent, "ingest", args, outputs)
    return 0


def _cmd_features(args) -> int:
    matrix, _ = _assemble(args, args.groups)
    matrix.write_csv(args.out)
    print(f"wrote {len(matrix.domain_ids)} x {len(matrix.names)} feature matrix to {args.out}")
    _write_manifest(Path(args.out).parent, "features", args, [args.out])
    return 0


def _cmd_train(args) -> int:
    matrix, _ = _assemble(args, args.groups)
    gains = gains_from_annotations(args.annotations)
    judged = _judged(matrix, gains)
    plan = FoldPlan.build([d.domain_id for d in judged], seed=args.seed, n_folds=max(2, round(1 / args.val_fraction)))
    val_ids = set(plan.members(0))
    train_set = [d for d in judged if d.domain_id not in val_ids]
    val_set = [d for d in judged if d.domain_id in val_ids]
    train_matrix = FeatureMatrix(
        domain_ids=tuple(d.domain_id for d in train_set),
        names=matrix.names,
        values=np.asarray([d.features for d in train_set]),
    )
    standardized, stats = standardize(train_matrix)
    train_std = [
        JudgedDomain(d.domain_id, d.gain, standardized.row(d.domain_id)) for d in train_set
    ]
    val_std = []
    for d in val_set:
        row_matrix = FeatureMatrix(domain_ids=(d.domain_id,), names=matrix.names, values=d.features.reshape(1, -1))
        z, _ = standardize(row_matrix, stats)
        val_std.append(JudgedDomain(d.domain_id, d.gain, z.values[0]))
    model, history = train(args.scheme, train_std, val_std, _train_config(args), stats=stats)
    model.feature_names = matrix.names
    model.save(args.out)
    outputs = [args.out]
    if args.history:
        write_history_csv(history, args.history)
        outputs.append(args.history)
    best = max(h.val_ndcg10 for h in history)
    print(f"trained {args.scheme} for {len(history)} epochs, best val NDCG@10 {best:.4f}")
    _write_manifest(Path(args.out).parent, "train", args, outputs)
    return 0


def _groups_of_model(model: ModelParams) -> list[str]:
    names = list(model.feature_names)
    groups = []
    pos = 0
    for group in GROUP_ORDER:
        block = list(FEATURE_GROUPS[group])
        if names[pos : pos + len(block)] == block:
            groups.append(group)
            pos += len(block)
    if pos != len(names):
        raise DataFormatError("model feature names do not match any group layout")
    return groups


def _cmd_rank(args) -> int:
    model = ModelParams.load(args.model)
    if not model.feature_names:
        raise DataFormatError(f"model {args.model} carries no feature names")
    args.groups = ",".join(_groups_of_model(model))
    matrix, _ = _assemble(args, args.groups)
    if model.stats is None:
        raise DataFormatError(f"model {args.model} carries no standardization stats")
    standardized, _ = standardize(matrix, model.stats)
    domains = [
        JudgedDomain(domain_id=d, gain=0, features=standardized.row(d)) for d in standardized.domain_ids
    ]
    ranking = predict_rank(model, domains)
    ranking.write_csv(args.out)
    print(f"wrote ranking of {len(domains)} domains to {args.out}")
    _write_manifest(Path(args.out).parent, "rank", args, [args.out])
    return 0


def _cmd_eval(args) -> int:
    gains = gains_from_annotations(args.annotations)
    order = []
    for line in Path(args.ranking).read_text(encoding="utf-8").splitlines()[1:]:
        if line.strip():
            order.append(line.split(",")[0])
    missing = [d for d in order if d not in gains]
    if missing:
        raise DataFormatError(f"ranked domains lack annotations, e.g. {missing[:3]}")
    lines = ["K,ndcg"]
    for k in _parse_k_list(args.k_list):
        value = ndcg_at_k(order, gains, min(k, len(order)))
        lines.append(f"{k},{value:.17g}")
        print(f"NDCG@{k} = {value:.6f}")
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        _write_manifest(Path(args.out).parent, "eval", args, [args.out])
    return 0


def _cmd_baseline(args) -> int:
    if bool(args.corpus) == bool(args.edgelist):
        raise ConfigError("baseline needs exactly one of --corpus or --edgelist")
    graph = derive_link_graph(ingest_corpus(args.corpus)) if args.corpus else load_edgelist(args.edgelist)
    params = dict(BASELINE_CONFIGS[args.algo])
    if args.alpha is not None:
        params["alpha"] = args.alpha
    if args.beta is not None:
        params["beta"] = args.beta
    if args.max_iter is not None and args.algo != "torank":
        params["max_iter"] = args.max_iter
    if args.algo == "pagerank":
        ranking = pagerank(graph, **params)
    elif args.algo == "hits":
        ranking = hits(graph, **params).ranking()
    elif args.algo == "katz":
        ranking = katz(graph, **params)
    else:
        ranking = torank(graph, **params)
    ranking.write_csv(args.out)
    print(f"wrote {args.algo} ranking of {len(graph.nodes)} nodes to {args.out}")
    _write_manifest(Path(args.out).parent, "baseline", args, [args.out])
    return 0


def _cmd_cv(args) -> int:
    matrix, graph = _assemble(args, args.groups)
    gains = gains_from_annotations(args.annotations)
    judged = _judged(matrix, gains)
    k_list = _parse_k_list(args.k_list)
    config = _train_config(args)
    result = cross_validate(judged, args.scheme, config, k_list=k_list)
    curves = {args.scheme: result.curve}
    curves.update(compare_baselines(judged, graph, plan=result.plan, k_list=k_list))
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    report_path = outdir / "report.csv"
    summary_path = outdir / "summary.csv"
    folds_path = outdir / "folds.csv"
    write_report_csv(curves, report_path)
    write_summary_csv(curves, summary_path)
    fold_lines = ["domain_id,fold"] + [
        f"{d},{f}" for d, f in sorted(result.plan.fold_of.items())
    ]
    folds_path.write_text("\n".join(fold_lines) + "\n", encoding="utf-8", newline="\n")
    for line in result.report:
        print(line)
    for method in sorted(curves):
        at10 = curves[method].mean(10) if 10 in k_list else float("nan")
        print(f"{method}: mean NDCG@10 = {at10:.4f}")
    _write_manifest(outdir, "cv", args, [report_path, summary_path, folds_path])
    return 0


def _cmd_annotate(args) -> int:
    corpus = ingest_corpus(args.corpus)
    batch = args.domains.split(",") if args.domains else corpus.domain_ids()
    questions = load_questionnaire(args.questions) if args.questions else None
    records = annotate_interactive(corpus, args.annotator, batch, args.out, questions=questions)
    print(f"recorded {len(records)} new annotations to {args.out}")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "ingest": _cmd_ingest,
    "features": _cmd_features,
    "train": _cmd_train,
    "rank": _cmd_rank,
    "eval": _cmd_eval,
    "baseline": _cmd_baseline,
    "cv": _cmd_cv,
    "annotate": _cmd_annotate,
}


def _canonical_scheme(args) -> None:
    if hasattr(args, "scheme"):
        args.scheme = SCHEME_ALIASES.get(args.scheme, args.scheme)


def _apply_config_file(args, argv) -> None:
    if not getattr(args, "config", None):
        return
    values = read_config_file(args.config)
    explicit = {a.split("=", 1)[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in values.items():
        if not hasattr(args, key):
            raise ConfigError(f"config file key {key!r} does not match any option")
        if key not in explicit:
            setattr(args, key, value)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config_file(args, argv)
        _canonical_scheme(args)
        return _COMMANDS[args.subcommand](args)
    except OnionRankError as exc:
        print(f"onionrank {args.subcommand}: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
