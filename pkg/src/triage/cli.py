"""Command-line entry point: one subcommand per pipeline stage plus ``demo``.

Stages talk to each other through files in the output directory, so each
one can be rerun (or replaced) on its own. A stage refuses to start when the
files of the stage before it are missing.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
import traceback
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from triage import __version__
from triage.config import PipelineConfig, load_config, write_config
from triage.corpus import (
    Corpus,
    SpamStats,
    build_hashtag_dict,
    load_corpus,
    remove_spam,
    spam_users,
    write_corpus,
)
from triage.errors import ConfigError, DataError, TriageError
from triage.evalreport import (
    ComparisonRow,
    MethodResult,
    compare,
    emit_improvement,
    emit_results,
    precision_recall,
    read_results,
    split_labeled,
    write_meta,
)
from triage.learner import RelevancePipeline, classify_learning, load_training, train_relevance
from triage.matchfilter import (
    HashtagLedger,
    classify_matching,
    conventional_corpus,
    expand_candidates,
    final_terms,
    improvement,
    keywords_for,
    load_ledger,
    match_corpus,
    review,
    sample_texts,
    save_ledger,
)
from triage.regions import DisasterManifest, load_geometry, load_manifest, partition
from triage.sentiment import (
    GRANULARITIES,
    SentimentModel,
    bin_counts,
    load_sentiment_csv,
    predict_sentiment,
    train_sentiment,
    write_series_csv,
)

logger = logging.getLogger("triage")

REGIONS = ("affected", "unaffected")
F = {
    "ingested": "ingested.jsonl",
    "ingest": "ingest.json",
    "despammed": "despammed.jsonl",
    "spam": "spam_stats.json",
    "affected": "affected.jsonl",
    "unaffected": "unaffected.jsonl",
    "regions": "regions.json",
    "hashtag_dict": "hashtag_dict.csv",
    "matching": "matching.csv",
    "conventional": "conventional.csv",
    "relevance_model": "relevance_model.npz",
    "learning": "learning.csv",
    "sentiment_model": "sentiment_model.npz",
    "sentiment_train": "sentiment_train.json",
    "sentiment_labels": "sentiment_labels.csv",
    "eval": "eval.json",
    "results": "results.csv",
    "improvement": "improvement.csv",
    "labeled": "labeled_eval.csv",
    "report": "report.txt",
    "run_log": "run_log.jsonl",
}
# which subcommand writes each intermediate file, for "run X first" messages
PRODUCER = {
    "ingested": "ingest",
    "despammed": "despam",
    "spam": "despam",
    "affected": "regions",
    "unaffected": "regions",
    "regions": "regions",
    "hashtag_dict": "hashtags expand",
    "matching": "match",
    "conventional": "match",
    "relevance_model": "train-relevance",
    "learning": "classify",
    "sentiment_model": "train-sentiment",
    "eval": "eval",
}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this pipeline reserves 2 for data errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


class Run:
    """Everything a stage needs: config, its hash, and helpers for writing outputs."""

    def __init__(self, cfg: PipelineConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.config_hash = cfg.hash()
        self.outputs: list[str] = []
        self.out = cfg.out
        self.out.mkdir(parents=True, exist_ok=True)

    def file(self, key: str) -> Path:
        return self.out / F[key]

    def need(self, *keys: str) -> list[Path]:
        paths = [self.file(k) for k in keys]
        missing = [k for k, p in zip(keys, paths) if not p.exists()]
        if missing:
            names = ", ".join(F[k] for k in missing)
            stages = ", ".join(dict.fromkeys(f"'{PRODUCER.get(k, '?')}'" for k in missing))
            raise ConfigError(f"{self.command}: missing {names} in {self.out}; run {stages} first")
        return paths

    def wrote(self, path: Path, meta: bool = True, **extra) -> Path:
        if meta:
            write_meta(path, self.config_hash, seed=self.cfg.seed, stage=self.command, **extra)
        self.outputs.append(str(path))
        return path

    def json(self, key: str, obj: dict) -> Path:
        path = self.file(key)
        doc = {"config_hash": self.config_hash, "seed": self.cfg.seed, **obj}
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return self.wrote(path, meta=False)

    def manifest(self) -> DisasterManifest:
        return load_manifest(self.cfg.require("manifest"))

    def region(self, name: str) -> Corpus:
        (path,) = self.need(name)
        return load_corpus(path)


def _write_ids(path: Path, by_region: dict[str, set[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", "tweet_id"])
        for region in REGIONS:
            for tid in sorted(by_region.get(region, ())):
                w.writerow([region, tid])


def _read_ids(path: Path) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {r: set() for r in REGIONS}
    with path.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["region"], set()).add(row["tweet_id"])
    return out


# ---------------------------------------------------------------------------
# stages


def cmd_ingest(run: Run, args) -> None:
    corpus = load_corpus(run.cfg.require("corpus"))
    if len(corpus) == 0:
        raise DataError("corpus holds no valid tweets")
    write_corpus(corpus.sorted(), run.file("ingested"))
    run.wrote(run.file("ingested"))
    run.json(
        "ingest",
        {
            "tweets": len(corpus),
            "rejected_lines": len(corpus.errors),
            "errors": [{"line": e.line, "message": e.message} for e in corpus.errors[:100]],
        },
    )


def cmd_despam(run: Run, args) -> None:
    (path,) = run.need("ingested")
    corpus = load_corpus(path)
    spammers = spam_users(corpus, run.cfg.spam_threshold)
    clean, stats = remove_spam(corpus, run.cfg.spam_threshold)
    write_corpus(clean, run.file("despammed"))
    run.wrote(run.file("despammed"))
    run.json("spam", {**stats.to_dict(), "threshold": run.cfg.spam_threshold, "spam_users": sorted(spammers)})
    logger.info("despam: %d of %d users flagged, %.2f%% of tweets removed", stats.spam_user_count,
                stats.total_user_count, stats.spam_ratio)


def cmd_regions(run: Run, args) -> None:
    (path,) = run.need("despammed")
    manifest = run.manifest()
    geom_path = run.cfg.path("geometry")
    geom = load_geometry(run.cfg.require("geometry")) if geom_path is not None else None
    part = partition(load_corpus(path), manifest, geom)
    for name in REGIONS:
        write_corpus(getattr(part, name), run.file(name))
        run.wrote(run.file(name))
    run.json("regions", {"disaster_id": manifest.disaster_id, **part.summary()})


def _region_tweets(run: Run) -> list:
    return [t for r in REGIONS for t in run.region(r)]


def cmd_hashtags_expand(run: Run, args) -> None:
    manifest = run.manifest()
    tweets = _region_tweets(run)
    hd = build_hashtag_dict(tweets)
    with run.file("hashtag_dict").open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hashtag", "count"])
        for tag, n in sorted(hd.items(), key=lambda kv: (-kv[1], kv[0])):
            w.writerow([tag, n])
    run.wrote(run.file("hashtag_dict"))
    candidates = expand_candidates(keywords_for(manifest.types, manifest.keyword_overrides), hd)
    ledger_path = run.cfg.ledger_path()
    ledger = load_ledger(ledger_path) if ledger_path.exists() else HashtagLedger()
    added = ledger.merge_candidates(candidates, hd)
    ledger_path.parent.mkdir(parents=True, exist_ok=True)
    save_ledger(ledger, ledger_path)
    run.wrote(ledger_path, meta=False)
    print(f"{len(candidates)} candidate hashtags, {added} new; {len(ledger.pending())} awaiting review in {ledger_path}")


def cmd_hashtags_review(run: Run, args, prompt: Callable[[str], str] = input, **review_kw) -> None:
    ledger_path = run.cfg.ledger_path()
    if not ledger_path.exists():
        raise ConfigError(f"no ledger at {ledger_path}; run 'hashtags expand' first")
    ledger = load_ledger(ledger_path)
    pending = [e.hashtag for e in ledger.pending()]
    if not pending:
        print("nothing to review")
        return
    samples = sample_texts(_region_tweets(run), pending, run.cfg.sample_k)
    review(ledger, samples, ledger_path, prompt=prompt, **review_kw)
    run.wrote(ledger_path, meta=False)
    print(f"{len(ledger.accepted)} accepted, {len(ledger.rejected)} rejected, {len(ledger.pending())} pending")


def cmd_match(run: Run, args) -> None:
    run.need("affected", "unaffected")
    manifest = run.manifest()
    ledger_path = run.cfg.ledger_path()
    if ledger_path.exists():
        ledger = load_ledger(ledger_path)
    else:
        logger.warning("no hashtag ledger at %s; matching on core keywords only", ledger_path)
        ledger = None
    terms = final_terms(keywords_for(manifest.types, manifest.keyword_overrides), ledger)
    ours, conv = {}, {}
    for name in REGIONS:
        c = run.region(name)
        ours[name] = match_corpus(c, terms, run.cfg.keyword_match)
        conv[name] = conventional_corpus(c, manifest)
    _write_ids(run.file("matching"), ours)
    _write_ids(run.file("conventional"), conv)
    run.wrote(run.file("matching"), ledger_used=ledger is not None, accepted_hashtags=sorted(terms.hashtags))
    run.wrote(run.file("conventional"))


def _examples(run: Run):
    manifest = run.manifest()
    return manifest, load_training(run.cfg.training_paths(), type_filter=set(manifest.types))


def cmd_train_relevance(run: Run, args) -> None:
    manifest, examples = _examples(run)
    unlabeled = []
    if run.cfg.features.mode != "tfidf_lsi" and all(run.file(r).exists() for r in REGIONS):
        unlabeled = [t.text for t in _region_tweets(run)]
    pipe = train_relevance(manifest.types, examples, run.cfg.features, seed=run.cfg.seed, unlabeled=unlabeled)
    pipe.save(run.file("relevance_model"))
    run.wrote(run.file("relevance_model"), examples=len(examples))


def cmd_classify(run: Run, args) -> None:
    (model_path,) = run.need("relevance_model")
    pipe = RelevancePipeline.load(model_path)
    found = {name: classify_learning(run.region(name), pipe) for name in REGIONS}
    _write_ids(run.file("learning"), found)
    run.wrote(run.file("learning"))


def cmd_train_sentiment(run: Run, args) -> None:
    train = load_sentiment_csv(run.cfg.require("sentiment_train"))
    test_path = run.cfg.path("sentiment_test")
    test = load_sentiment_csv(run.cfg.require("sentiment_test")) if test_path is not None else []
    model, acc = train_sentiment(train, test, (), run.cfg.sentiment, seed=run.cfg.seed)
    model.save(run.file("sentiment_model"))
    run.wrote(run.file("sentiment_model"))
    run.json("sentiment_train", {"n_train": len(train), "n_test": len(test), "test_accuracy": acc})
    if acc is not None:
        print(f"sentiment test accuracy {acc:.4f}")


def cmd_sentiment(run: Run, args) -> None:
    model_path, matching_path = run.need("sentiment_model", "matching")
    model = SentimentModel.load(model_path)
    start, end = run.manifest().window
    relevant = _read_ids(matching_path)
    rows = []
    for name in REGIONS:
        tweets = [t for t in run.region(name) if t.tweet_id in relevant.get(name, ())]
        labels = predict_sentiment(tweets, model)
        rows.extend((name, t, lab) for t, lab in zip(tweets, labels))
        pairs = [(t.timestamp, lab) for t, lab in zip(tweets, labels)]
        for gran in GRANULARITIES:
            path = run.out / f"sentiment_{name}_{gran}.csv"
            write_series_csv(bin_counts(pairs, gran, start, end), path)
            run.wrote(path)
    with run.file("sentiment_labels").open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["region", "tweet_id", "timestamp", "label"])
        for name, t, lab in rows:
            w.writerow([name, t.tweet_id, t.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"), lab])
    run.wrote(run.file("sentiment_labels"))


def _labeled_eval(run: Run) -> list[dict]:
    """Both methods on a held-out half of the labeled data, against its human labels."""
    manifest, examples = _examples(run)
    train, test = split_labeled(examples, run.cfg.split_ratio, run.cfg.seed)
    if not test or len({e.y for e in train}) < 2:
        logger.warning("labeled split too small for a precision/recall check")
        return []
    pipe = train_relevance(manifest.types, train, run.cfg.features, seed=run.cfg.seed)
    ledger_path = run.cfg.ledger_path()
    ledger = load_ledger(ledger_path) if ledger_path.exists() else None
    terms = final_terms(keywords_for(manifest.types, manifest.keyword_overrides), ledger)
    universe = {str(i) for i in range(len(test))}
    truth = {str(i) for i, e in enumerate(test) if e.y == 1}
    proba = pipe.predict_proba([e.text for e in test])
    predicted = {
        "matching": {str(i) for i, e in enumerate(test) if classify_matching(e.text, terms, run.cfg.keyword_match)},
        "learning": {str(i) for i, p in enumerate(proba) if p >= pipe.threshold},
    }
    out = []
    for method, pred in predicted.items():
        p, r = precision_recall(pred, truth, universe)
        out.append({"method": method, "n_test": len(test), "n_predicted": len(pred), "n_truth": len(truth),
                    "precision": p, "recall": r})
    return out


def cmd_eval(run: Run, args) -> None:
    regions_path, spam_path, m_path, l_path, c_path = run.need("regions", "spam", "matching", "learning", "conventional")
    totals = json.loads(regions_path.read_text(encoding="utf-8"))
    spam = json.loads(spam_path.read_text(encoding="utf-8"))
    stats = SpamStats(spam["spam_user_count"], spam["total_user_count"], spam["spam_tweet_count"], spam["total_tweet_count"])
    matching, learning, conv = _read_ids(m_path), _read_ids(l_path), _read_ids(c_path)
    disaster = totals["disaster_id"]
    rows, bars = [], []
    for name in REGIONS:
        m = MethodResult("matching", name, frozenset(matching[name]), totals[name])
        l = MethodResult("learning", name, frozenset(learning[name]), totals[name])
        rows.append(compare(disaster, m, l, stats.spam_ratio))
        bars.append([disaster, name, len(matching[name]), len(conv[name]), improvement(len(matching[name]), len(conv[name]))])
    labeled = _labeled_eval(run) if run.cfg.paths.training else []
    run.json(
        "eval",
        {
            "rows": [r.__dict__ for r in rows],
            "improvement": bars,
            "labeled": labeled,
        },
    )


def _load_eval(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _pct(v) -> str:
    return "n/a" if v is None else f"{v:.2f}"


def cmd_report(run: Run, args) -> None:
    sources = [Path(p) for p in args.eval] if args.eval else run.need("eval")
    evals = [_load_eval(p) for p in sources]
    rows = [ComparisonRow(**r) for e in evals for r in e["rows"]]
    bars = [b for e in evals for b in e["improvement"]]
    emit_results(rows, run.file("results"), run.config_hash)
    emit_improvement(bars, run.file("improvement"), run.config_hash)
    run.outputs += [str(run.file("results")), str(run.file("improvement"))]
    labeled = [{"disaster_id": e["rows"][0]["disaster_id"] if e["rows"] else "", **x} for e in evals for x in e["labeled"]]
    fields = ["disaster_id", "method", "n_test", "n_predicted", "n_truth", "precision", "recall"]
    with run.file("labeled").open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for x in labeled:
            w.writerow(["n/a" if x[f] is None else (repr(x[f]) if isinstance(x[f], float) else x[f]) for f in fields])
    run.wrote(run.file("labeled"), note="standard precision/recall on the held-out half of the labeled data")

    parsed, avg = read_results(run.file("results"))
    lines = [
        "disaster           region      matching  learning  agreed  recall_m  recall_l  relev_m  relev_l  spam%",
    ]
    for r in parsed:
        lines.append(
            f"{r.disaster_id:<18} {r.region:<10} {r.n_matching:>9} {r.n_learning:>9} {r.n_agreement:>7} "
            f"{_pct(r.recall_matching):>9} {_pct(r.recall_learning):>9} {_pct(r.relevance_matching):>8} "
            f"{_pct(r.relevance_learning):>8} {_pct(r.spam_ratio):>6}"
        )
    if avg:
        lines.append(
            f"{'average':<18} {'all':<10} {avg['n_matching']:>9.1f} {avg['n_learning']:>9.1f} {avg['n_agreement']:>7.1f} "
            f"{_pct(avg['recall_matching']):>9} {_pct(avg['recall_learning']):>9} {_pct(avg['relevance_matching']):>8} "
            f"{_pct(avg['relevance_learning']):>8} {_pct(avg['spam_ratio']):>6}"
        )
    lines.append("recall = share of each method's retrieved tweets that both methods agree on")
    for d, region, ours, conv, imp in bars:
        lines.append(f"improvement over conventional hashtags, {d}/{region}: {ours} vs {conv} ({_pct(imp)}%)")
    for x in labeled:
        lines.append(f"labeled split, {x['method']}: precision {x['precision']}, recall {x['recall']}")
    text = "\n".join(lines) + "\n"
    run.file("report").write_text(text, encoding="utf-8")
    run.wrote(run.file("report"))
    print(text, end="")


# ---------------------------------------------------------------------------
# demo


def demo_config(out: Path, seed: int) -> PipelineConfig:
    """Config for the bundled synthetic scenario, with inputs under ``out/inputs``."""
    from triage.config import config_from_dict

    cfg = config_from_dict(
        {
            "paths": {
                "corpus": "inputs/corpus.jsonl",
                "manifest": "inputs/manifest.json",
                "geometry": "inputs/counties.geojson",
                "training": ["inputs/train_crisislex.csv", "inputs/train_crowdflower.csv"],
                "sentiment_train": "inputs/sentiment_train.csv",
                "sentiment_test": "inputs/sentiment_test.csv",
            },
            "out_dir": ".",
            "seed": seed,
            # the frequency-subsampling threshold only makes sense for corpora of
            # millions of tokens; on a few thousand it discards nearly every word
            "sentiment": {"subsample": 0.0},
        },
        base_dir=out,
    )
    return cfg


def scripted_reviewer(relevant: set[str], ledger_path: Path) -> Callable[[str], str]:
    """Stand-in for the human reviewer: answers from the generator's ground truth."""
    pending = iter([e.hashtag for e in load_ledger(ledger_path).pending()])

    def answer(_prompt: str) -> str:
        tag = next(pending, None)
        if tag is None:
            return "q"
        return "a" if tag in relevant else "r"

    return answer


def cmd_demo(run: Run, args) -> None:
    from triage import synthetic

    sc = synthetic.generate()
    synthetic.write_scenario(sc, run.out / "inputs")
    write_config(run.cfg, run.out / "demo_config.json")
    steps = [
        ("ingest", cmd_ingest),
        ("despam", cmd_despam),
        ("regions", cmd_regions),
        ("hashtags expand", cmd_hashtags_expand),
        ("hashtags review", None),
        ("match", cmd_match),
        ("train-relevance", cmd_train_relevance),
        ("classify", cmd_classify),
        ("train-sentiment", cmd_train_sentiment),
        ("sentiment", cmd_sentiment),
        ("eval", cmd_eval),
        ("report", cmd_report),
    ]
    for name, fn in steps:
        t0 = time.perf_counter()
        if name == "hashtags review":
            reviewer = scripted_reviewer(sc.relevant_hashtags, run.cfg.ledger_path())
            # fixed decision time keeps the ledger identical across demo runs
            decided = run.manifest().window[1]
            cmd_hashtags_review(run, args, prompt=reviewer, echo=logger.debug, clock=lambda: decided)
        else:
            fn(run, argparse.Namespace(eval=None))
        logger.info("demo: %s done in %.1fs", name, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML or JSON config (default: $TRIAGE_CONFIG)")
    common.add_argument("--seed", type=int, help="override the config's master seed")
    common.add_argument("--out", help="override the output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="triage", description="Disaster tweet filtering, comparison and sentiment pipeline.")
    p.add_argument("--version", action="version", version=f"triage {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="command")
    sub.required = True
    for name, help_ in (
        ("ingest", "validate and normalize the raw tweet file"),
        ("despam", "drop users exceeding the per-day tweet threshold"),
        ("regions", "split tweets into affected and nearby counties"),
        ("match", "keyword/hashtag matching plus the conventional baseline"),
        ("train-relevance", "train the learning-based relevance classifier"),
        ("classify", "apply the relevance classifier to both regions"),
        ("train-sentiment", "train the paragraph-vector sentiment model"),
        ("sentiment", "label relevant tweets and bin counts per hour/day"),
        ("eval", "compute comparison metrics"),
        ("demo", "run every stage on the bundled synthetic scenario"),
    ):
        sub.add_parser(name, parents=[common], help=help_)
    rp = sub.add_parser("report", parents=[common], help="write results tables and plot data")
    rp.add_argument("--eval", nargs="+", help="eval.json files to combine (default: the one in the output dir)")
    hp = sub.add_parser("hashtags", help="candidate hashtag expansion and review")
    hsub = hp.add_subparsers(dest="action", parser_class=_Parser, metavar="action")
    hsub.required = True
    hsub.add_parser("expand", parents=[common], help="collect candidate hashtags into the review ledger")
    hsub.add_parser("review", parents=[common], help="accept/reject pending candidates interactively")
    return p


COMMANDS = {
    "ingest": cmd_ingest,
    "despam": cmd_despam,
    "regions": cmd_regions,
    "hashtags expand": cmd_hashtags_expand,
    "hashtags review": cmd_hashtags_review,
    "match": cmd_match,
    "train-relevance": cmd_train_relevance,
    "classify": cmd_classify,
    "train-sentiment": cmd_train_sentiment,
    "sentiment": cmd_sentiment,
    "eval": cmd_eval,
    "report": cmd_report,
    "demo": cmd_demo,
}


def _make_config(args) -> PipelineConfig:
    if args.command == "demo":
        out = Path(args.out or "triage_demo").resolve()
        cfg = demo_config(out, args.seed if args.seed is not None else 0)
        return cfg
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out:
        cfg = replace(cfg, out_dir=str(Path(args.out).resolve()))
    return cfg


def _log_run(run: Run, status: int, elapsed: float, error: str | None) -> None:
    entry = {
        "command": run.command,
        "config_hash": run.config_hash,
        "seed": run.cfg.seed,
        "exit_code": status,
        "finished_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "elapsed_s": round(elapsed, 3),
        "outputs": run.outputs,
        "error": error,
    }
    with run.file("run_log").open("a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    command = args.command if args.command != "hashtags" else f"hashtags {args.action}"
    run = None
    t0 = time.perf_counter()
    status, error = 0, None
    try:
        run = Run(_make_config(args), command)
        COMMANDS[command](run, args)
    except TriageError as exc:
        status, error = exc.exit_code, str(exc)
        print(f"triage {command}: {exc}", file=sys.stderr)
    except OSError as exc:
        status, error = DataError.exit_code, str(exc)
        print(f"triage {command}: {exc}", file=sys.stderr)
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        status, error = 3, f"{type(exc).__name__}: {exc}"
        traceback.print_exc()
    if run is not None:
        _log_run(run, status, time.perf_counter() - t0, error)
    return status


if __name__ == "__main__":
    sys.exit(main())
