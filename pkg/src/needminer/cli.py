"""Operator command line. Long-form flags only; all randomness flows from
--seed (default 42) so runs are reproducible; outputs embed their config."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import report as reporting
from .corpus import (
    FilterRules,
    aggregate_labels,
    filter_corpus,
    load_label_records,
    load_tweets,
    write_aggregated_labels_csv,
    write_tweets_jsonl,
)
from .errors import NeedminerError
from .evaluation import (
    EvaluationReport,
    GridSpec,
    cross_domain,
    cross_validate,
    default_grid,
    learning_curve,
    nested_cv,
    standard_baselines,
)
from .learners import load_model, save_model, train
from .learners.base import make_spec
from .needcat import CATEGORY_IDS, load_category_labels, train_category_models
from .sampling import SamplingSpec, Strategy
from .service import (
    ModelRegistry,
    RetryPolicy,
    ServiceConfig,
    TweetStore,
    ingest as run_ingest,
    orchestrate,
    resolve_config_path,
)
from .service.api import RuntimeConfig, serve_api
from .service.orchestrator import timeseries
from .textproc import (
    PipelineConfig,
    build_vocabulary,
    default_pipeline,
    load_lexical_resource,
    tokens_for_text,
    vectorize,
)

_ALGO_NAMES = {
    "naive-bayes": "naive_bayes",
    "random-forest": "random_forest",
    "pegasos-svm": "pegasos_svm",
}


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load_corpus(data: str, labels: str | None):
    result = load_tweets(data)
    for err in result.errors:
        click.echo(f"warning: {data}:{err.line}: {err.message}", err=True)
    corpus = result.corpus
    if labels:
        agg = aggregate_labels(load_label_records(labels))
        for tweet_id, n in agg.unaggregatable:
            click.echo(f"warning: tweet {tweet_id} has {n} label records, expected 3", err=True)
        known = {t.id for t in corpus.tweets}
        corpus = corpus.with_labels(lab for lab in agg.labels if lab.tweet_id in known)
    return corpus


def _pipeline_from_flag(pipeline_path: str | None, language: str) -> PipelineConfig:
    if pipeline_path:
        return PipelineConfig.from_dict(json.loads(Path(pipeline_path).read_text()))
    return default_pipeline(language)


def _lex_from_flag(lexicon: str | None):
    return load_lexical_resource(lexicon) if lexicon else None


def _sampling_from_flags(sampling: str, smote_k: int, seed: int) -> SamplingSpec:
    return SamplingSpec(Strategy(sampling), smote_k=smote_k, seed=seed)


def _grid_from_flag(grid: str, kind: str) -> GridSpec:
    if grid == "default":
        return default_grid(kind)
    return GridSpec.from_dict(json.loads(Path(grid).read_text()))


def _algo_options(fn):
    fn = click.option("--algo", type=click.Choice(sorted(_ALGO_NAMES)), default="pegasos-svm",
                      show_default=True, help="Classifier family.")(fn)
    fn = click.option("--params", default=None, help="JSON object of algorithm parameters.")(fn)
    return fn


def _data_options(fn):
    fn = click.option("--data", required=True, help="Tweet JSONL file.")(fn)
    fn = click.option("--labels", required=True, help="Rater label CSV.")(fn)
    return fn


def _pipe_options(fn):
    fn = click.option("--pipeline", default=None, help="JSON pipeline config file.")(fn)
    fn = click.option("--language", default="german", show_default=True,
                      help="Stemmer language for the default pipeline.")(fn)
    fn = click.option("--lexicon", default=None, help="Lexical resource file for semantic steps.")(fn)
    return fn


def _sampling_options(fn):
    fn = click.option("--sampling", type=click.Choice([s.value for s in Strategy]),
                      default="none", show_default=True)(fn)
    fn = click.option("--smote-k", default=5, show_default=True, help="SMOTE neighbor count.")(fn)
    return fn


@click.group()
def main():
    """Mine customer needs from short-text streams."""


@main.command("filter")
@click.option("--data", required=True, help="Tweet JSONL file.")
@click.option("--out", required=True, help="Filtered JSONL output path.")
@click.option("--drop-urls/--keep-urls", default=True, show_default=True)
@click.option("--drop-retweets/--keep-retweets", default=True, show_default=True)
@click.option("--max-author-posts-per-day", type=int, default=None)
@click.option("--blocklist", default=None, help="File with one author id per line.")
def filter_cmd(data, out, drop_urls, drop_retweets, max_author_posts_per_day, blocklist):
    """Drop URL posts, retweets, blocklisted and flooding authors."""
    try:
        corpus = _load_corpus(data, None)
        block = frozenset()
        if blocklist:
            block = frozenset(
                line.strip() for line in Path(blocklist).read_text().splitlines() if line.strip()
            )
        rules = FilterRules(drop_urls, drop_retweets, max_author_posts_per_day, block)
        result = filter_corpus(corpus, rules)
        write_tweets_jsonl(result.corpus, out)
        click.echo(json.dumps({"kept": len(result.corpus), "removed": result.removed}))
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("aggregate-labels")
@click.option("--labels", required=True, help="Rater label CSV.")
@click.option("--out", required=True, help="Aggregated verdict CSV output path.")
def aggregate_cmd(labels, out):
    """Fold three rater votes per tweet into Need/NoNeed/Suspended."""
    try:
        result = aggregate_labels(load_label_records(labels))
        write_aggregated_labels_csv(result.labels, out)
        from collections import Counter

        counts = Counter(lab.verdict.value for lab in result.labels)
        click.echo(
            json.dumps({"partitions": dict(counts), "unaggregatable": len(result.unaggregatable)})
        )
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("train")
@_data_options
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--seed", default=42, show_default=True)
@click.option("--out", required=True, help="Model file output path.")
def train_cmd(data, labels, algo, params, pipeline, language, lexicon, sampling, smote_k, seed, out):
    """Train a need-tweet model on a labeled corpus and save it."""
    try:
        corpus = _load_corpus(data, labels)
        cfg = _pipeline_from_flag(pipeline, language)
        lex = _lex_from_flag(lexicon)
        pairs = corpus.labeled()
        if not pairs:
            _fail("corpus has no usable Need/NoNeed labels (all suspended or unlabeled)")
        tokens = [tokens_for_text(t.text, cfg, lex) for t, _ in pairs]
        vocab = build_vocabulary(tokens, fitted_on=data)
        vectors = [vectorize(toks, vocab) for toks in tokens]
        ys = [1 if v.value == "Need" else 0 for _, v in pairs]
        from .sampling import apply_sampling

        sampled = apply_sampling(vectors, ys, _sampling_from_flags(sampling, smote_k, seed))
        spec = make_spec(_ALGO_NAMES[algo], json.loads(params) if params else None, seed)
        model = train(spec, sampled.vectors, sampled.labels, vocab, cfg,
                      positive_label="Need", negative_label="NoNeed")
        save_model(model, out)
        click.echo(json.dumps({"model": out, "training_docs": len(sampled.vectors),
                               "vocabulary": len(vocab), "seed": seed}))
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("evaluate")
@_data_options
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--beta", default=1.0, show_default=True, help="F-measure beta.")
@click.option("--out", default=None, help="Report JSON output path.")
def evaluate_cmd(data, labels, algo, params, pipeline, language, lexicon, sampling, smote_k,
                 folds, seed, beta, out):
    """Plain stratified k-fold cross-validation."""
    try:
        corpus = _load_corpus(data, labels)
        kind = _ALGO_NAMES[algo]
        spec = make_spec(kind, json.loads(params) if params else None, seed)
        metrics = cross_validate(
            spec, corpus, folds, seed,
            _sampling_from_flags(sampling, smote_k, seed),
            _pipeline_from_flag(pipeline, language), _lex_from_flag(lexicon), beta,
        )
        from .evaluation import FoldResult

        report = EvaluationReport(
            algorithm=kind,
            per_fold=[FoldResult(i, spec.params.__dict__.copy(), m) for i, m in enumerate(metrics)],
            config={"seed": seed, "folds": folds, "sampling": sampling, "beta": beta, "data": data},
        )
        report.baselines = standard_baselines(corpus.need_share(), report.aggregate()["mean"])
        click.echo(reporting.render_report_table(report))
        if out:
            reporting.write_json(report.to_dict(), out)
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("nested-cv")
@_data_options
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--grid", default="default", show_default=True,
              help="'default' or a JSON file of parameter value lists.")
@click.option("--outer", default=5, show_default=True)
@click.option("--inner", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Parallelism cap for grid cells.")
@click.option("--out", default=None, help="Report JSON output path.")
@click.option("--out-dir", default=None, help="Directory for CSV and figures.")
def nested_cv_cmd(data, labels, algo, params, pipeline, language, lexicon, sampling, smote_k,
                  grid, outer, inner, seed, jobs, out, out_dir):
    """Grid search inside nested cross-validation; prints the fold table."""
    del params  # grid cells define the parameters
    try:
        corpus = _load_corpus(data, labels)
        kind = _ALGO_NAMES[algo]
        report = nested_cv(
            kind, _grid_from_flag(grid, kind), corpus, outer, inner, seed,
            _sampling_from_flags(sampling, smote_k, seed),
            _pipeline_from_flag(pipeline, language), _lex_from_flag(lexicon),
            jobs=jobs,
        )
        click.echo(reporting.render_report_table(report))
        if out:
            reporting.write_json(report.to_dict(), out)
        if out_dir:
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            reporting.write_json(report.to_dict(), out_path / "report.json")
            reporting.write_report_csv(report, out_path / "folds.csv")
            reporting.plot_fold_f1(report, out_path / "fold_f1.png")
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("learning-curve")
@_data_options
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--sizes", required=True, help="Comma-separated increasing training sizes.")
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--plateau-pp", default=0.5, show_default=True,
              help="Marginal-gain threshold in F1 percentage points.")
@click.option("--out-dir", default=None, help="Directory for JSON, CSV and the figure.")
def learning_curve_cmd(data, labels, algo, params, pipeline, language, lexicon, sampling, smote_k,
                       sizes, folds, seed, plateau_pp, out_dir):
    """Mean CV F1 over increasing training sizes, with plateau detection."""
    try:
        corpus = _load_corpus(data, labels)
        spec = make_spec(_ALGO_NAMES[algo], json.loads(params) if params else None, seed)
        curve = learning_curve(
            spec, corpus, [int(s) for s in sizes.split(",")], folds, seed,
            _sampling_from_flags(sampling, smote_k, seed),
            _pipeline_from_flag(pipeline, language), _lex_from_flag(lexicon),
            plateau_threshold_pp=plateau_pp,
        )
        click.echo(json.dumps(curve.to_dict()))
        if out_dir:
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            reporting.write_json(curve.to_dict(), out_path / "learning_curve.json")
            reporting.write_learning_curve_csv(curve, out_path / "learning_curve.csv")
            reporting.plot_learning_curve(curve, out_path / "learning_curve.png")
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("cross-domain")
@click.option("--data-a", required=True)
@click.option("--labels-a", required=True)
@click.option("--data-b", required=True)
@click.option("--labels-b", required=True)
@click.option("--name-a", default="domain_a", show_default=True)
@click.option("--name-b", default="domain_b", show_default=True)
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--size-match/--no-size-match", default=False, show_default=True,
              help="Reduce the larger domain to the smaller one's size.")
@click.option("--out-dir", default=None, help="Directory for JSON and the figure.")
def cross_domain_cmd(data_a, labels_a, data_b, labels_b, name_a, name_b, algo, params,
                     pipeline, language, lexicon, sampling, smote_k, folds, seed,
                     size_match, out_dir):
    """Intra-, cross- and combined-domain evaluation matrix."""
    try:
        spec = make_spec(_ALGO_NAMES[algo], json.loads(params) if params else None, seed)
        report = cross_domain(
            {name_a: _load_corpus(data_a, labels_a), name_b: _load_corpus(data_b, labels_b)},
            spec, seed, folds,
            _sampling_from_flags(sampling, smote_k, seed),
            _pipeline_from_flag(pipeline, language), _lex_from_flag(lexicon),
            size_match=size_match,
        )
        click.echo(reporting.render_cross_domain_table(report))
        if out_dir:
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            reporting.write_json(report.to_dict(), out_path / "cross_domain.json")
            reporting.plot_cross_domain(report, out_path / "cross_domain.png")
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("train-categories")
@click.option("--data", required=True, help="Need-tweet JSONL file.")
@click.option("--categories", required=True, help="Category CSV (tweet_id,category).")
@_algo_options
@_pipe_options
@_sampling_options
@click.option("--grid", default="default", show_default=True)
@click.option("--outer", default=10, show_default=True)
@click.option("--inner", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--jobs", default=1, show_default=True, help="Parallelism cap for grid cells.")
@click.option("--out-dir", required=True, help="Directory for the 8 model files and reports.")
def train_categories_cmd(data, categories, algo, params, pipeline, language, lexicon,
                         sampling, smote_k, grid, outer, inner, seed, jobs, out_dir):
    """One-vs-rest models for the eight need categories."""
    del params
    try:
        corpus = _load_corpus(data, None)
        labels_by_tweet = load_category_labels(categories)
        kind = _ALGO_NAMES[algo]
        result = train_category_models(
            corpus, labels_by_tweet, kind, _grid_from_flag(grid, kind), seed, outer, inner,
            _sampling_from_flags(sampling, smote_k, seed),
            _pipeline_from_flag(pipeline, language), _lex_from_flag(lexicon),
            jobs=jobs,
        )
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        paths = {}
        for cat, model in result.models.items():
            model_path = out_path / f"category_{cat}.json"
            save_model(model, model_path)
            paths[cat] = str(model_path)
            reporting.write_json(result.reports[cat].to_dict(), out_path / f"report_{cat}.json")
        for cat, reason in result.skipped.items():
            click.echo(f"warning: skipped category {cat}: {reason}", err=True)
        click.echo(json.dumps({"models": paths, "skipped": result.skipped, "seed": seed}))
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("classify")
@click.option("--model", required=True, help="Need-tweet model file.")
@click.option("--categories-dir", default=None,
              help="Directory holding category_<id>.json models.")
@click.option("--text", default=None, help="Single text to classify.")
@click.option("--input", "input_path", default=None, help="File with one text per line.")
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--lexicon", default=None)
def classify_cmd(model, categories_dir, text, input_path, threshold, lexicon):
    """Score texts with a trained model; JSON lines on stdout."""
    if (text is None) == (input_path is None):
        raise click.UsageError("pass exactly one of --text or --input")
    try:
        need_model = load_model(model)
        lex = _lex_from_flag(lexicon)
        cat_models = {}
        if categories_dir:
            for cat in CATEGORY_IDS:
                path = Path(categories_dir) / f"category_{cat}.json"
                if path.exists():
                    cat_models[cat] = load_model(path)
        texts = [text] if text else [
            line for line in Path(input_path).read_text(encoding="utf-8").splitlines() if line.strip()
        ]
        from .needcat import classify_needs

        for t in texts:
            score = float(need_model.score_text(t, lex))
            entry = {"text": t, "need_score": score, "is_need": score > threshold}
            if entry["is_need"] and cat_models:
                assignment = classify_needs(cat_models, "adhoc", t, lex=lex)
                entry["categories"] = list(assignment.categories)
                entry["low_confidence"] = assignment.low_confidence
            click.echo(json.dumps(entry, ensure_ascii=False))
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("ingest")
@click.option("--config", "config_path", default=None,
              help="Service config file (NEEDMINER_CONFIG overrides).")
@click.option("--process/--no-process", default=True, show_default=True,
              help="Run the model chain over new raw tweets after ingesting.")
@click.option("--retries", default=3, show_default=True)
def ingest_cmd(config_path, process, retries):
    """Pull tweets from the configured source into the store."""
    try:
        cfg = ServiceConfig.from_file(resolve_config_path(config_path))
        store = TweetStore(cfg.store_path)
        report = run_ingest(cfg.source_spec(), store, RetryPolicy(attempts=retries))
        payload = {"ingest": report.to_dict()}
        registry = ModelRegistry(cfg.registry_path)
        if process and registry.has_need_model():
            from .enrich import load_name_lexicon, load_sentiment_lexicon

            sentiment = load_sentiment_lexicon(cfg.sentiment_lexicon) if cfg.sentiment_lexicon else None
            names = load_name_lexicon(cfg.name_lexicon) if cfg.name_lexicon else None
            lex = load_lexical_resource(cfg.lexical_resource) if cfg.lexical_resource else None
            payload["orchestrate"] = orchestrate(
                store, registry, cfg.threshold, sentiment, names, lex
            ).to_dict()
        store.close()
        click.echo(json.dumps(payload))
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("quantify")
@click.option("--store", "store_path", required=True, help="Store directory.")
@click.option("--bucket", type=click.Choice(["day", "week", "month"]), default="month",
              show_default=True)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--category", default=None)
@click.option("--out-dir", default=None, help="Directory for JSON, CSV and the figure.")
def quantify_cmd(store_path, bucket, threshold, category, out_dir):
    """Time-bucketed category counts and shares over the store."""
    try:
        store = TweetStore(store_path)
        series = timeseries(store, bucket, category=category, threshold=threshold)
        store.close()
        payload = {"bucket": bucket, "threshold": threshold,
                   "series": [q.to_dict() for q in series]}
        click.echo(json.dumps(payload))
        if out_dir:
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            reporting.write_json(payload, out_path / "quantification.json")
            reporting.write_quantification_csv(series, out_path / "quantification.csv")
            if series:
                reporting.plot_category_shares(
                    series[-1], out_path / "category_shares.png",
                    title=f"latest {bucket} bucket",
                )
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("serve")
@click.option("--config", "config_path", default=None,
              help="Service config file (NEEDMINER_CONFIG overrides).")
def serve_cmd(config_path):
    """Serve the read API over the configured store."""
    try:
        cfg = ServiceConfig.from_file(resolve_config_path(config_path))
        store = TweetStore(cfg.store_path)
        registry = ModelRegistry(cfg.registry_path)
        lex = load_lexical_resource(cfg.lexical_resource) if cfg.lexical_resource else None
        serve_api(store, registry, cfg.host, cfg.port, RuntimeConfig(cfg.threshold), lex)
    except NeedminerError as exc:
        _fail(str(exc))


@main.command("report")
@click.option("--report", "report_path", required=True, help="Report JSON produced by nested-cv.")
@click.option("--out-dir", default=None, help="Directory for CSV and figures.")
def report_cmd(report_path, out_dir):
    """Render a stored evaluation report as the standard table."""
    try:
        report = EvaluationReport.from_dict(json.loads(Path(report_path).read_text()))
        click.echo(reporting.render_report_table(report))
        if out_dir:
            out_path = Path(out_dir)
            out_path.mkdir(parents=True, exist_ok=True)
            reporting.write_report_csv(report, out_path / "folds.csv")
            reporting.plot_fold_f1(report, out_path / "fold_f1.png")
    except (NeedminerError, json.JSONDecodeError) as exc:
        _fail(str(exc))


if __name__ == "__main__":
    main()
