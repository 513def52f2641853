"""Command-line entry point: generate, rank, train, evaluate, roc, replay, serve.

Every subcommand is reproducible: all randomness flows from `--seed`
(default 42), and artifacts rewritten with identical flags are identical
bytes.  Exit codes: 0 success, 1 runtime failure, 2 bad usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import __version__
from .catalog import CatalogError, SensitiveApiCatalog
from .datagen import (
    ConfigError,
    GeneratorVocab,
    ParseError,
    generate,
    read_csv,
    write_csv,
)
from .evaluation import EvaluationError, evaluate_all
from .gateway import ScenarioError, load_scenario, replay, serve
from .learners import (
    KINDS,
    ClassifierSpec,
    SpecError,
    TrainingError,
    load_model,
    save_model,
    train,
)
from .ranker import METHODS, RankingError, rank_all

_KIND_ALIASES = {
    "nb": "NaiveBayes",
    "naivebayes": "NaiveBayes",
    "j48": "J48",
    "bagging": "Bagging",
    "rf": "RandomForest",
    "randomforest": "RandomForest",
    "svm": "SVM",
    "esvm": "ESVM",
    "nn": "NeuralNet",
    "mlp": "NeuralNet",
    "neuralnet": "NeuralNet",
}

_ERRORS = (
    CatalogError,
    ConfigError,
    ParseError,
    RankingError,
    SpecError,
    TrainingError,
    EvaluationError,
    ScenarioError,
    OSError,
    ValueError,
)


def _kind(name: str) -> str:
    kind = _KIND_ALIASES.get(name.lower())
    if kind is None:
        raise SpecError(f"unknown classifier {name!r}; expected one of {list(KINDS)}")
    return kind


def _parse_hyper(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise SpecError(f"bad --hyper {pair!r}, expected key=value")
        key, value = pair.split("=", 1)
        if value.lower() in ("true", "false"):
            out[key] = value.lower() == "true"
            continue
        try:
            out[key] = int(value)
        except ValueError:
            try:
                out[key] = float(value)
            except ValueError:
                out[key] = value
    return out


def _cmd_generate(args) -> int:
    vocab = GeneratorVocab.from_file(args.vocab) if args.vocab else None
    dataset = generate(
        n=args.n,
        attack_ratio=args.attack_ratio,
        noise=args.noise,
        seed=args.seed,
        vocab=vocab,
    )
    write_csv(dataset, args.out)
    counts = dataset.class_counts()
    print(f"wrote {len(dataset)} samples to {args.out} "
          f"(Yes={counts['Yes']}, No={counts['No']}, seed={args.seed})")
    return 0


def _cmd_rank(args) -> int:
    dataset = read_csv(args.data)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    rankings = [
        rank_all(dataset, m, params={"seed": args.seed}) for m in methods
    ]
    header = ["feature"]
    for r in rankings:
        header += [f"{r.method.lower()}_score", f"{r.method.lower()}_rank"]
    first = rankings[0]
    rows = []
    for feature in first.order:
        row = [feature]
        for r in rankings:
            row += [f"{r.scores[feature]:.6f}", str(r.order.index(feature) + 1)]
        rows.append(row)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    if args.json:
        doc = {
            r.method: {"scores": r.scores, "order": list(r.order)} for r in rankings
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    for r in rankings:
        print(f"{r.method}: " + " > ".join(r.order))
    return 0


def _cmd_train(args) -> int:
    dataset = read_csv(args.data)
    spec = ClassifierSpec(
        kind=_kind(args.classifier),
        hyperparameters=_parse_hyper(args.hyper),
        seed=args.seed,
    )
    model = train(spec, dataset)
    save_model(model, args.out)
    print(f"trained {model.kind} on {model.n_train} samples "
          f"in {model.fit_ms:.1f} ms -> {args.out}")
    return 0


def _selected_specs(args) -> list[ClassifierSpec]:
    if args.classifiers:
        kinds = [_kind(c) for c in args.classifiers.split(",") if c.strip()]
    else:
        kinds = list(KINDS)
    return [ClassifierSpec(kind=k, seed=args.seed) for k in kinds]


def _cmd_evaluate(args) -> int:
    import os

    dataset = read_csv(args.data)
    report = evaluate_all(dataset, _selected_specs(args), k=args.k, seed=args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    report_path = os.path.join(args.outdir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        # timings go to the sidecar: report.json stays byte-reproducible
        json.dump(report.to_dict(include_timings=False), fh, indent=2)
        fh.write("\n")
    timings = {
        r.kind: {"train_ms": r.train_ms, "test_ms": r.test_ms}
        for r in report.results
        if r.error is None
    }
    with open(os.path.join(args.outdir, "timings.json"), "w", encoding="utf-8") as fh:
        json.dump(timings, fh, indent=2)
        fh.write("\n")
    metrics_path = os.path.join(args.outdir, "metrics.csv")
    with open(metrics_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["classifier", "accuracy", "precision", "recall", "f_measure", "auc"]
        )
        for r in report.results:
            if r.error is not None:
                writer.writerow([r.kind, "error", r.error, "", "", ""])
                continue
            m = r.metric_set.as_floats()
            writer.writerow(
                [
                    r.kind,
                    f"{m['accuracy']:.6f}",
                    f"{m['precision']:.6f}",
                    f"{m['recall']:.6f}",
                    f"{m['f_measure']:.6f}",
                    f"{float(r.auc_value):.6f}",
                ]
            )
    for r in report.results:
        if r.error is not None:
            print(f"{r.kind}: ERROR {r.error}")
        else:
            m = r.metric_set.as_floats()
            print(f"{r.kind}: accuracy={m['accuracy']:.4f} "
                  f"f_measure={m['f_measure']:.4f} auc={float(r.auc_value):.4f}")
    print(f"wrote {report_path}, timings.json and {metrics_path}")
    return 0


def _cmd_roc(args) -> int:
    dataset = read_csv(args.data)
    spec = ClassifierSpec(kind=_kind(args.classifier), seed=args.seed)
    report = evaluate_all(dataset, [spec], k=args.k, seed=args.seed)
    result = report.results[0]
    if result.error is not None:
        raise EvaluationError(result.error)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["fpr", "tpr"])
        for x, y in result.roc:
            writer.writerow([f"{float(x):.6f}", f"{float(y):.6f}"])
    print(f"{result.kind}: AUC={float(result.auc_value):.6f}, "
          f"{len(result.roc)} points -> {args.out}")
    return 0


def _cmd_replay(args) -> int:
    scenario = load_scenario(args.scenario)
    model = load_model(args.model)
    policy = args.policy
    if args.answers:
        with open(args.answers, encoding="utf-8") as fh:
            policy = json.load(fh)
    log = replay(
        scenario,
        model,
        policy=policy,
        blocklist_path=args.blocklist,
    )
    if args.log:
        log.to_jsonl(args.log)
    for (decision, reason), count in sorted(log.counts().items()):
        print(f"{decision}/{reason}: {count}")
    print(f"replayed {len(log.records)} events"
          + (f" -> {args.log}" if args.log else ""))
    return 0


def _cmd_serve(args) -> int:
    model = load_model(args.model)
    catalog = (
        SensitiveApiCatalog.from_file(args.catalog) if args.catalog else None
    )
    print(f"serving {model.kind} on http://{args.host}:{args.port}")
    serve(
        model,
        host=args.host,
        port=args.port,
        blocklist_path=args.blocklist,
        timeout=args.timeout,
        catalog=catalog,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgeguard",
        description="XSS detection and prevention for WebView JavaScript bridges.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--n", type=int, default=460)
    p.add_argument("--attack-ratio", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--vocab", help="generator vocabulary JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("rank", help="score features by IG / GR / Relief-F")
    p.add_argument("--data", required=True)
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="ranking table CSV")
    p.add_argument("--json", help="also write rankings as JSON")
    p.set_defaults(func=_cmd_rank)

    p = sub.add_parser("train", help="fit one classifier and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--classifier", required=True)
    p.add_argument("--hyper", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="cross-validate classifiers")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=10)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="all seven classifiers")
    group.add_argument("--classifiers", help="comma-separated subset")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("roc", help="write one classifier's pooled ROC curve")
    p.add_argument("--data", required=True)
    p.add_argument("--classifier", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_roc)

    p = sub.add_parser("replay", help="run a scenario through the engine")
    p.add_argument("--scenario", required=True, help="scenario JSONL")
    p.add_argument("--model", required=True, help="model JSON from `train`")
    p.add_argument("--policy", default="flag_sensitive",
                   help="always_allow | always_block | flag_sensitive")
    p.add_argument("--answers", help="JSON file of event_id -> allow/block")
    p.add_argument("--blocklist", help="blocklist TSV path")
    p.add_argument("--log", help="session log JSONL path")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="serve the live alert gateway")
    p.add_argument("--model", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--blocklist", help="blocklist TSV path")
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--catalog", help="sensitive API list, one name per line")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
