"""Command-line front end: ``ekge <subcommand> ...``.

Every subcommand is a thin adapter over the library. Exit codes: 0 success,
1 usage error, 2 data error, 3 numeric failure (training diverged).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import checkpoint, evaluation, kg, models, plotting, projection, training

log = logging.getLogger("ekge")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SEMANTIC_PARTNER = {"cont": "rescal", "tree": "rescal"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------- manifest

def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict = field(default_factory=dict)
    seed: int | None = None
    datasets: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def content_hash(self) -> str:
        """Hash of everything except wall-clock timings."""
        d = asdict(self)
        d.pop("timings")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode("utf-8")).hexdigest()

    def write(self, path) -> None:
        missing = [p for p in self.outputs.values() if not Path(p).exists()]
        if missing:
            raise RuntimeError(f"manifest names missing outputs: {missing}")
        d = asdict(self)
        d["content_sha256"] = self.content_hash()
        Path(path).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _seed(value) -> int:
    if value is not None:
        return value
    env = os.environ.get("EKGE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"EKGE_SEED must be an integer, got {env!r}") from None


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------- prepare

PREPARED_FILES = ("train", "valid", "test", "all", "start", "end")


def _load_prepared(data_dir) -> tuple[kg.Vocabulary, dict]:
    data_dir = Path(data_dir)
    vocab = kg.Vocabulary.load(data_dir / "vocab.json")
    return vocab, {name: data_dir / f"{name}.tsv" for name in PREPARED_FILES}


def cmd_prepare(args) -> int:
    tic = time.perf_counter()
    seed = _seed(args.seed)
    try:
        fractions = tuple(float(x) for x in args.split.split(","))
    except ValueError:
        raise UsageError(f"--split expects comma-separated fractions, got {args.split!r}") from None
    ds = kg.load_quadruples(args.input, timestamp_parser=args.timestamp_format)
    if len(ds) == 0:
        raise kg.DataError(f"{args.input}: no facts")
    ds = ds.subset(ds.values)
    out = _out_dir(args.out)
    train, valid, test = kg.split_dataset(ds, fractions, seed, args.min_occurrences)
    start, end = kg.build_start_end(ds)
    semantic = kg.derive_semantic(ds)
    paths = {
        "vocab": out / "vocab.json", "all": out / "all.tsv", "train": out / "train.tsv",
        "valid": out / "valid.tsv", "test": out / "test.tsv", "start": out / "start.tsv",
        "end": out / "end.tsv", "semantic": out / "semantic.tsv",
        "genuine": out / "genuine.tsv", "false": out / "false.tsv",
    }
    ds.vocab.save(paths["vocab"])
    for name, part in (("all", ds), ("train", train), ("valid", valid), ("test", test),
                       ("start", start), ("end", end)):
        kg.write_quadruples(part, paths[name], with_values=False)
    kg.write_triples(semantic, paths["semantic"])
    kg.write_triples(semantic.subset(semantic.values), paths["genuine"], with_values=False)
    kg.write_triples(semantic.subset(~semantic.values), paths["false"], with_values=False)
    counts = {"all": len(ds), "train": len(train), "valid": len(valid), "test": len(test),
              "start": len(start), "end": len(end), "genuine": int(semantic.values.sum()),
              "false": int((~semantic.values).sum())}
    if args.rare_threshold is not None:
        rare = kg.filter_rare(ds, args.rare_threshold, include_starts=args.rare_include_starts)
        paths["rare"] = out / "rare.tsv"
        kg.write_quadruples(rare, paths["rare"], with_values=False)
        counts["rare"] = len(rare)
    manifest = RunManifest(
        "prepare",
        config={"split": list(fractions), "min_occurrences": args.min_occurrences,
                "rare_threshold": args.rare_threshold, "rare_include_starts": args.rare_include_starts,
                "timestamp_format": args.timestamp_format},
        seed=seed,
        datasets={"input": file_sha256(args.input), **{k: file_sha256(p) for k, p in paths.items()}},
        outputs={k: str(p) for k, p in paths.items()},
        metrics={"counts": counts, "n_entities": ds.vocab.n_entities,
                 "n_predicates": ds.vocab.n_predicates, "n_timestamps": ds.vocab.n_timestamps},
        timings={"total_seconds": time.perf_counter() - tic},
    )
    manifest.write(out / "manifest.json")
    print(json.dumps(counts, sort_keys=True))
    return EXIT_OK


# ------------------------------------------------------------------------ train

CONFIG_FLAGS = ("model", "rank", "rank_t", "loss", "margin", "l2", "lr", "batch_size", "max_epochs",
                "eval_every", "patience", "neg_per_slot", "seed")


def _train_config(args) -> training.TrainConfig:
    raw = training.load_config(args.config) if args.config else {}
    for name in CONFIG_FLAGS:
        value = getattr(args, name)
        if value is not None:
            raw[name] = value
    for name in ("neg_slots", "monitor_slots"):
        value = getattr(args, name)
        if value is not None:
            raw[name] = [s for s in value.split(",") if s]
    if args.no_sigmoid:
        raw["margin_sigmoid"] = False
    raw["seed"] = _seed(raw.get("seed"))
    return training.TrainConfig.from_dict(raw)


def _semantic_split(data_dir, vocab):
    sem = kg.load_triples(Path(data_dir) / "semantic.tsv", vocab)
    return sem.subset(sem.values)


def cmd_train(args) -> int:
    tic = time.perf_counter()
    config = _train_config(args)
    kind, episodic = models.parse_model(config.model)
    vocab, files = _load_prepared(args.data)
    out = _out_dir(args.out)
    datasets = {"vocab": file_sha256(Path(args.data) / "vocab.json")}
    if args.projection:
        if not episodic:
            raise UsageError("--projection needs an episodic model")
        start = kg.load_quadruples(files["start"], vocab)
        end = kg.load_quadruples(files["end"], vocab)
        datasets.update(start=file_sha256(files["start"]), end=file_sha256(files["end"]))
        params, rep, rep_end = training.train_projection(kind, start, end, config, threads=args.threads)
    else:
        if episodic:
            train_name = args.train_file or "train"
            train_path = Path(args.data) / f"{train_name}.tsv"
            train_ds = kg.load_quadruples(train_path, vocab)
            valid_ds = train_ds if args.train_file else kg.load_quadruples(files["valid"], vocab)
            filt = kg.FilterIndex.from_datasets(kg.load_quadruples(files["all"], vocab))
            datasets.update(train=file_sha256(train_path))
        else:
            train_ds = valid_ds = _semantic_split(args.data, vocab)
            filt = None
            datasets.update(semantic=file_sha256(Path(args.data) / "semantic.tsv"))
        params, rep = training.train(kind, episodic, train_ds, valid_ds, config,
                                     filter_index=filt, threads=args.threads)
        rep_end = None
    paths = {"checkpoint": out / "model.ckpt", "report": out / "report.csv",
             "history_figure": out / "history.png"}
    meta = {"config": config.to_dict(), "projection": bool(args.projection)}
    checkpoint.save(params, paths["checkpoint"], meta)
    rep.write_csv(paths["report"])
    plotting.training_history(rep, paths["history_figure"], title=params.name)
    metrics = {"stage1": rep.to_dict()}
    timings = {"epoch_seconds": rep.epoch_seconds}
    if rep_end is not None:
        paths["report_end"] = out / "report_end.csv"
        rep_end.write_csv(paths["report_end"])
        metrics["stage2"] = rep_end.to_dict()
        timings["end_epoch_seconds"] = rep_end.epoch_seconds
    timings["total_seconds"] = time.perf_counter() - tic
    RunManifest("train", config.to_dict(), config.seed, datasets,
                {k: str(p) for k, p in paths.items()}, metrics, timings).write(out / "manifest.json")
    print(f"{params.name}: {params.n_params()} parameters, best valid MRR {rep.best_mrr:.4f} "
          f"at epoch {rep.best_epoch}")
    return EXIT_OK


# ------------------------------------------------------------------------- eval

def _slots(text: str, episodic: bool) -> list[str]:
    slots = [s for s in text.split(",") if s]
    allowed = {"entity", "subject", "object", "predicate"} | ({"timestamp"} if episodic else set())
    bad = [s for s in slots if s not in allowed]
    if bad or not slots:
        raise UsageError(f"bad --slots {text!r}; choose from {sorted(allowed)}")
    return slots


def cmd_eval(args) -> int:
    tic = time.perf_counter()
    params, meta = checkpoint.load(args.checkpoint)
    vocab, files = _load_prepared(args.data)
    if params.vocab_sha256 != vocab.sha256():
        raise kg.DataError("checkpoint was trained on a different vocabulary")
    params = params.with_time("start") if params.has_end_time else params
    slots = _slots(args.slots, params.episodic)
    modes = ("filtered", "raw") if args.mode == "both" else (args.mode,)
    if params.episodic:
        test_path = Path(args.data) / f"{args.split}.tsv"
        test = kg.load_quadruples(test_path, vocab)
        filt = kg.FilterIndex.from_datasets(kg.load_quadruples(files["all"], vocab))
    else:
        test_path = Path(args.data) / "semantic.tsv"
        test = _semantic_split(args.data, vocab)
        filt = kg.FilterIndex.from_datasets(test)
    out = _out_dir(args.out)
    results = {mode: evaluation.evaluate(params, test, slots, vocab, filt, mode, threads=args.threads)
               for mode in modes}
    payload = {"schema_version": 1, "model": params.name, "rank": params.rank.entity,
               "rank_t": params.rank.time, "test": args.split if params.episodic else "semantic",
               "results": {mode: evaluation.metrics_json(res)["slots"] for mode, res in results.items()}}
    paths = {"metrics": out / "metrics.json", "table": out / "metrics.txt",
             "hits_curve": out / "hits_curve.csv", "hits_figure": out / "hits.png"}
    _write_json(paths["metrics"], payload)
    table = "\n\n".join(evaluation.format_table({params.name: res}, slots, title=f"{mode.capitalize()} results")
                        for mode, res in results.items())
    paths["table"].write_text(table + "\n", encoding="utf-8")
    with open(paths["hits_curve"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["mode", "slot", "k", "hits"])
        for mode, res in results.items():
            for slot, m in res.items():
                for k, h in zip(*evaluation.hits_curve(m.ranks)):
                    w.writerow([mode, slot, int(k), repr(float(h))])
    plotting.hits_curves(results[modes[0]], paths["hits_figure"], title=f"{params.name} ({modes[0]})")
    RunManifest("eval", {"slots": slots, "modes": list(modes), "split": args.split}, meta.get("config", {}).get("seed"),
                {"test": file_sha256(test_path), "checkpoint": file_sha256(args.checkpoint)},
                {k: str(p) for k, p in paths.items()}, payload,
                {"total_seconds": time.perf_counter() - tic}).write(out / "manifest.json")
    print(table)
    return EXIT_OK


# ---------------------------------------------------------------------- project

def cmd_project(args) -> int:
    tic = time.perf_counter()
    params, meta = checkpoint.load(args.checkpoint)
    if args.data:
        vocab, _ = _load_prepared(args.data)
        genuine_path = args.genuine or Path(args.data) / "genuine.tsv"
        false_path = args.false or Path(args.data) / "false.tsv"
    elif args.vocab and args.genuine and args.false:
        vocab = kg.Vocabulary.load(args.vocab)
        genuine_path, false_path = args.genuine, args.false
    else:
        raise UsageError("give --data, or --vocab with --genuine and --false")
    if params.vocab_sha256 != vocab.sha256():
        raise kg.DataError("checkpoint was trained on a different vocabulary")
    genuine = kg.load_triples(genuine_path, vocab)
    false_set = kg.load_triples(false_path, vocab)
    columns, curves = {}, {}
    pooled = np.concatenate([genuine.facts, false_set.facts])
    labels = np.r_[np.ones(len(genuine), bool), np.zeros(len(false_set), bool)]
    modes = ("start", "start-end") if params.has_end_time else ("start",)
    for mode in modes:
        scorer = projection.marginalize(params, mode)
        columns[mode] = projection.evaluate_projection(scorer, genuine, false_set, args.threshold)
        curves[mode] = (scorer.scores(pooled), labels)
    if args.semantic_checkpoint:
        sem_params, _ = checkpoint.load(args.semantic_checkpoint)
        if sem_params.vocab_sha256 != vocab.sha256():
            raise kg.DataError("semantic checkpoint was trained on a different vocabulary")
        scorer = projection.semantic_scorer(sem_params)
        name = f"semantic ({sem_params.kind})"
        columns[name] = projection.evaluate_projection(scorer, genuine, false_set, args.threshold)
        curves[name] = (scorer(pooled), labels)
    out = _out_dir(args.out)
    paths = {"report": out / "projection.json", "table": out / "projection.txt",
             "pr_curve": out / "pr_curve.csv", "pr_figure": out / "pr.png"}
    partner = SEMANTIC_PARTNER.get(params.kind, params.kind)
    payload = {"schema_version": 1, "model": params.name, "semantic_partner": partner,
               "threshold": args.threshold, "n_genuine": len(genuine), "n_false": len(false_set),
               "columns": columns}
    _write_json(paths["report"], payload)
    paths["table"].write_text(projection_table(params.name, columns) + "\n", encoding="utf-8")
    with open(paths["pr_curve"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["column", "precision", "recall", "threshold"])
        for name, (scores, lab) in curves.items():
            for p, r, t in zip(*evaluation.pr_curve(scores, lab)):
                w.writerow([name, repr(float(p)), repr(float(r)), repr(float(t))])
    plotting.pr_curves(curves, paths["pr_figure"], title=f"{params.name} projection")
    RunManifest("project", {"threshold": args.threshold}, meta.get("config", {}).get("seed"),
                {"genuine": file_sha256(genuine_path), "false": file_sha256(false_path),
                 "checkpoint": file_sha256(args.checkpoint)},
                {k: str(p) for k, p in paths.items()}, payload,
                {"total_seconds": time.perf_counter() - tic}).write(out / "manifest.json")
    print(paths["table"].read_text(encoding="utf-8"), end="")
    return EXIT_OK


def projection_table(name: str, columns: dict) -> str:
    """Rows: filtered/raw Hits@10 per set, AUPRC, recall; one column per projection."""
    rows = [("Genuine filtered @10", "hits10_genuine_filtered"), ("Genuine raw @10", "hits10_genuine_raw"),
            ("False filtered @10", "hits10_false_filtered"), ("False raw @10", "hits10_false_raw"),
            ("AUPRC", "auprc"), ("Recall", "recall")]
    width = max(12, *(len(c) for c in columns))
    lines = [f"{name:<22}" + "".join(f" | {c:>{width}}" for c in columns)]
    lines.append("-" * len(lines[0]))
    for label, key in rows:
        scale = 100.0 if key.startswith("hits") else 1.0
        fmt = "{:>%d.2f}" % width if scale == 100.0 else "{:>%d.3f}" % width
        lines.append(f"{label:<22}" + "".join(" | " + fmt.format(scale * col[key]) for col in columns.values()))
    return "\n".join(lines)


# ------------------------------------------------------------------ synth, misc

def cmd_synth(args) -> int:
    fields_ = {"n_entities": args.entities, "n_predicates": args.predicates,
               "n_timestamps": args.timestamps, "n_spans": args.spans, "min_length": args.min_length,
               "max_length": args.max_length, "open_fraction": args.open_fraction, "seed": _seed(args.seed)}
    if args.spec:
        spec_d = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        spec_d.update({k: v for k, v in fields_.items() if v is not None and k != "seed"})
        spec_d.setdefault("seed", fields_["seed"])
    else:
        spec_d = {k: v for k, v in fields_.items() if v is not None}
    try:
        spec = kg.SynthSpec.from_dict(spec_d)
    except TypeError as exc:
        raise UsageError(f"bad synthetic spec: {exc}") from None
    ds = kg.synth_generate(spec)
    kg.write_quadruples(ds, args.out, with_values=False)
    print(f"{len(ds)} quadruples, {ds.vocab.n_entities} entities, {ds.vocab.n_predicates} predicates, "
          f"{ds.vocab.n_timestamps} timestamps -> {args.out}")
    return EXIT_OK


def cmd_paramcount(args) -> int:
    kind, episodic = models.parse_model(args.model)
    print(models.param_count(kind, episodic, args.ne, args.np, args.nt, models.Rank(args.rank, args.rank_t)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    """Grid over ranks: train and evaluate each model at each rank."""
    seed = _seed(args.seed)
    vocab, files = _load_prepared(args.data)
    train_ds = kg.load_quadruples(files["train"], vocab)
    valid_ds = kg.load_quadruples(files["valid"], vocab)
    test_ds = kg.load_quadruples(files["test"], vocab)
    filt = kg.FilterIndex.from_datasets(kg.load_quadruples(files["all"], vocab))
    base = training.load_config(args.config) if args.config else {}
    slots = _slots(args.slots, True)
    rows = []
    for name in args.models.split(","):
        kind, episodic = models.parse_model(name)
        if not episodic:
            raise UsageError("sweep runs episodic models only")
        for rank in (int(r) for r in args.ranks.split(",")):
            config = training.TrainConfig.from_dict({**base, "model": name, "rank": rank, "seed": seed})
            params, _ = training.train(kind, True, train_ds, valid_ds, config, filter_index=filt,
                                       threads=args.threads)
            res = evaluation.evaluate(params, test_ds, slots, vocab, filt, threads=args.threads)
            for slot, m in res.items():
                rows.append({"series": f"{params.name}/{slot}", "model": params.name, "slot": slot,
                             "rank": rank, "n_params": params.n_params(), "mrr": m.mrr,
                             "hits10": m.hits[10]})
    out = _out_dir(args.out)
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    plotting.metric_vs_rank(rows, "mrr", out / "sweep_mrr.png")
    print(f"{len(rows)} rows -> {out / 'sweep.csv'}")
    return EXIT_OK


# ----------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for ranking (default: available cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ekge", description="Episodic knowledge-graph embeddings.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prepare", parents=[common], help="split and derive datasets from a quadruple TSV")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    p.add_argument("--split", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-occurrences", type=int, default=0)
    p.add_argument("--rare-threshold", type=float)
    p.add_argument("--rare-include-starts", action="store_true")
    p.add_argument("--timestamp-format", choices=sorted(kg.TIMESTAMP_PARSERS), default="date")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", parents=[common], help="train a model on a prepared directory")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--projection", action="store_true",
                   help="two-stage training on start.tsv then end.tsv")
    p.add_argument("--train-file", help="train and validate on <data>/<name>.tsv (e.g. rare)")
    p.add_argument("--model")
    for name, typ in (("rank", int), ("rank-t", int), ("margin", float), ("l2", float), ("lr", float),
                      ("batch-size", int), ("max-epochs", int), ("eval-every", int),
                      ("patience", int), ("neg-per-slot", int), ("seed", int)):
        p.add_argument(f"--{name}", type=typ)
    p.add_argument("--loss", choices=("logistic", "margin"))
    p.add_argument("--neg-slots")
    p.add_argument("--monitor-slots")
    p.add_argument("--no-sigmoid", action="store_true", help="margin loss on raw scores")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common], help="filtered/raw ranking metrics")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--slots", default="entity,timestamp")
    p.add_argument("--mode", choices=("filtered", "raw", "both"), default="both")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("project", parents=[common], help="episodic-to-semantic projection report")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data")
    p.add_argument("--vocab")
    p.add_argument("--genuine")
    p.add_argument("--false")
    p.add_argument("--semantic-checkpoint")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic quadruple TSV")
    p.add_argument("--spec", help="JSON file with SynthSpec fields")
    p.add_argument("--entities", type=int)
    p.add_argument("--predicates", type=int)
    p.add_argument("--timestamps", type=int)
    p.add_argument("--spans", type=int)
    p.add_argument("--min-length", type=int)
    p.add_argument("--max-length", type=int)
    p.add_argument("--open-fraction", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("paramcount", parents=[common], help="parameter count of a model")
    p.add_argument("--model", required=True)
    p.add_argument("--ne", type=int, required=True)
    p.add_argument("--np", type=int, required=True)
    p.add_argument("--nt", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--rank-t", type=int)
    p.set_defaults(func=cmd_paramcount)

    p = sub.add_parser("sweep", parents=[common], help="grid of ranks; CSV and figure of test MRR")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--models", default="cont")
    p.add_argument("--ranks", default="4,8")
    p.add_argument("--slots", default="entity,timestamp")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except training.TrainingDiverged as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (kg.DataError, checkpoint.CheckpointError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (models.ModelError, projection.ProjectionError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
