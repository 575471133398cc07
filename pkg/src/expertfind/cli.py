"""Command-line entry point wiring the pipeline steps.

Artifacts live in a run directory with a manifest recording the config
hash and lexicon asset versions; commands that need an artifact
produced earlier fail with an error naming the producing command.
Identical inputs and seed give byte-identical artifacts.
"""

from __future__ import annotations

import csv
import json
import os
from contextlib import contextmanager
from pathlib import Path

import click
import numpy as np

from . import __version__
from .classes import CLASS_NAMES, EXPERT, parse_class
from .config import PipelineConfig
from .corpus import (
    CorpusStore,
    generate_fixture,
    read_labels,
    sample_for_labeling,
    subreddit_metrics,
)
from .evalkit import grid_search, kfold_cv, metrics as eval_metrics, select_features
from .features import FeatureMatrix, assemble
from .learners import Dataset, load_model, save_model, train
from .profiles import class_characteristics, classify_users, profile_summary
from .stats import anova_oneway, cohens_kappa
from .textpipe import asset_versions, measure, preprocess
from .vectorize import (
    MarginConfig,
    fit_tfidf,
    load_meta_model,
    save_meta_model,
    train_margin_classifier,
    transform,
)

LEARNER_CHOICES = click.Choice(["logistic", "tree", "forest", "rulefit"])


class Runtime:
    def __init__(self, config: PipelineConfig):
        self.config = config

    @property
    def run_dir(self) -> Path:
        return Path(self.config.run_dir)

    def store(self) -> CorpusStore:
        if not self.config.store:
            raise click.ClickException("no store configured; pass --store DIR")
        try:
            return CorpusStore.load(self.config.store)
        except FileNotFoundError as exc:
            raise click.ClickException(
                f"{exc}; run `expertfind ingest` or `expertfind gen-fixture` first"
            )

    def artifact(self, name: str) -> Path:
        return self.run_dir / name

    def require(self, name: str, producer: str) -> Path:
        path = self.artifact(name)
        if not path.exists():
            raise click.ClickException(
                f"missing artifact {name}; run `expertfind {producer}` first"
            )
        return path

    @contextmanager
    def lock(self):
        """One writer per run directory; concurrent commands rejected."""
        self.run_dir.mkdir(parents=True, exist_ok=True)
        lock_path = self.run_dir / ".lock"
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise click.ClickException(
                f"run directory busy (lock file {lock_path} exists)"
            )
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield
            self._write_manifest()
        finally:
            lock_path.unlink(missing_ok=True)

    def _write_manifest(self) -> None:
        manifest = {
            "format": "expertfind-run",
            "version": __version__,
            "config_hash": self.config.config_hash(),
            "asset_versions": asset_versions(),
        }
        self.artifact("manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    def labelled_dataset(self) -> tuple[Dataset, list[str]]:
        features_path = self.require("features.csv", "featurize")
        labels_path = self.require("labels.jsonl", "featurize")
        fmatrix = FeatureMatrix.load(features_path)
        labels = read_labels(labels_path, split="labelled")
        ids = sorted(cid for cid in labels if cid in fmatrix.rows)
        if not ids:
            raise click.ClickException("no labelled rows present in features.csv")
        X = fmatrix.to_array(ids)
        y = np.array([labels[cid] for cid in ids], dtype=int)
        return Dataset(X, y, list(fmatrix.feature_names)), ids


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--store", "store_dir", type=click.Path(), help="corpus store directory")
@click.option("--run-dir", type=click.Path(), help="artifact directory")
@click.option("--seed", type=int, help="master seed override")
@click.pass_context
def main(ctx, config_path, store_dir, run_dir, seed):
    """Expert / non-expert / out-of-scope comment classification toolkit."""
    config = PipelineConfig.load(config_path)
    if store_dir:
        config.store = store_dir
    if run_dir:
        config.run_dir = run_dir
    if seed is not None:
        config.seed = seed
    ctx.obj = Runtime(config)


# ---------------------------------------------------------------------------
# corpus commands
# ---------------------------------------------------------------------------


@main.command()
@click.option("--posts", required=True, type=click.Path(exists=True))
@click.option("--comments", required=True, type=click.Path(exists=True))
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.pass_obj
def ingest(rt: Runtime, posts, comments, store_dir):
    """Load line-delimited post/comment dumps into a store."""
    if store_dir:
        rt.config.store = store_dir
    if not rt.config.store:
        raise click.ClickException("pass --store DIR for the new store")
    store = CorpusStore.ingest(posts, comments, rt.config.store)
    r = store.report
    click.echo(
        f"ingested {r.n_posts} posts, {r.n_comments} comments "
        f"({r.malformed_lines} malformed, {r.duplicate_ids} duplicates, "
        f"{len(r.quarantined)} quarantined)"
    )


@main.command("metrics")
@click.pass_obj
def metrics_cmd(rt: Runtime):
    """Subreddit activity metrics over the store."""
    m = subreddit_metrics(rt.store())
    for key, value in m.to_dict().items():
        click.echo(f"{key:32s} {value}")


@main.command()
@click.option("--n", required=True, type=int)
@click.option("--from", "start", required=True, help="first month, YYYY-MM")
@click.option("--to", "end", required=True, help="last month, YYYY-MM")
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def sample(rt: Runtime, n, start, end, seed, out):
    """Draw the labeling sample (top-level comments, month-balanced)."""
    if seed is not None:
        rt.config.seed = seed
    result = sample_for_labeling(rt.store(), n, (start, end), seed=rt.config.seed)
    for note in result.notes:
        click.echo(f"note: {note}", err=True)
    click.echo(f"sampled {len(result.ids)} of {result.requested} requested")
    for month in sorted(result.per_month):
        click.echo(f"  {month}: {result.per_month[month]}")
    if out:
        Path(out).write_text("".join(cid + "\n" for cid in result.ids), encoding="utf-8")
        click.echo(f"ids written to {out}")


@main.command("gen-fixture")
@click.option("--posts", "n_posts", required=True, type=int)
@click.option("--comments", "n_comments", required=True, type=int)
@click.option("--labelled", "n_labelled", type=int, default=1113, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--store", "store_dir", type=click.Path(), default=None)
@click.pass_obj
def gen_fixture(rt: Runtime, n_posts, n_comments, n_labelled, seed, store_dir):
    """Generate the synthetic planted-label corpus."""
    if seed is not None:
        rt.config.seed = seed
    if store_dir:
        rt.config.store = store_dir
    if not rt.config.store:
        raise click.ClickException("pass --store DIR for the fixture store")
    n_labelled = min(n_labelled, n_comments)
    result = generate_fixture(
        seed=rt.config.seed,
        n_posts=n_posts,
        n_comments=n_comments,
        n_labelled=n_labelled,
        out_dir=rt.config.store,
    )
    click.echo(
        f"fixture: {n_posts} posts, {n_comments} comments, "
        f"{len(result.labelled_ids)} labelled -> {rt.config.store}"
    )


# ---------------------------------------------------------------------------
# text measurement
# ---------------------------------------------------------------------------


@main.command("measure")
@click.option("--text", default=None, help="measure one text and print json")
@click.option("--out", type=click.Path(), default=None, help="with a store: write one record per comment")
@click.pass_obj
def measure_cmd(rt: Runtime, text, out):
    """Per-text NLP measurements."""
    if text is not None:
        click.echo(json.dumps(measure(text).to_dict(), indent=2, sort_keys=True))
        return
    store = rt.store()
    target = Path(out) if out else None
    if target is None:
        raise click.ClickException("pass --text or --out FILE")
    with target.open("w", encoding="utf-8") as fh:
        for cid in sorted(store.comments):
            record = {"comment_id": cid}
            record.update(measure(store.comments[cid].body).to_dict())
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    click.echo(f"wrote {len(store.comments)} metric records to {target}")


# ---------------------------------------------------------------------------
# pipeline commands
# ---------------------------------------------------------------------------


@main.command()
@click.option("--labels", "labels_path", type=click.Path(exists=True), default=None,
              help="labelled comments (defaults to the store's planted labels)")
@click.pass_obj
def featurize(rt: Runtime, labels_path):
    """Fit the TF-IDF + margin meta-feature on the labelled split and
    assemble the feature matrix for every comment in the store."""
    store = rt.store()
    if labels_path is None:
        candidate = Path(rt.config.store) / "planted_labels.jsonl"
        if not candidate.exists():
            raise click.ClickException(
                "no --labels given and the store has no planted_labels.jsonl; "
                "run `expertfind gen-fixture` or export annotation labels first"
            )
        labels_path = candidate
    labelled = read_labels(labels_path, split="labelled")
    labelled = {cid: cls for cid, cls in labelled.items() if cid in store.comments}
    if not labelled:
        raise click.ClickException("labels file matched no comments in the store")

    with rt.lock():
        ids = sorted(labelled)
        docs = [preprocess(store.comments[cid].body).tokens for cid in ids]
        tfidf = fit_tfidf(docs, idf_mode=rt.config.idf_mode)
        vectors = [transform(tfidf, d) for d in docs]
        binary = [1 if labelled[cid] == EXPERT else 0 for cid in ids]
        margin = train_margin_classifier(
            vectors, binary, MarginConfig(seed=rt.config.seed, **rt.config.margin)
        )
        save_meta_model(rt.artifact("meta_model.json"), tfidf, margin)

        all_ids = sorted(store.comments)
        fmatrix = assemble(store, all_ids, tfidf, margin)
        fmatrix.save(rt.artifact("features.csv"))
        # keep a copy of the labels next to the features they train
        rt.artifact("labels.jsonl").write_text(
            Path(labels_path).read_text(encoding="utf-8"), encoding="utf-8"
        )
    click.echo(
        f"featurized {len(all_ids)} comments "
        f"({len(ids)} labelled) -> {rt.artifact('features.csv')}"
    )


@main.command("train")
@click.option("--model", "kind", required=True, type=LEARNER_CHOICES)
@click.pass_obj
def train_cmd(rt: Runtime, kind):
    """Train one learner on the labelled split."""
    dataset, _ = rt.labelled_dataset()
    config = dict(rt.config.learners.get(kind, {}))
    config["seed"] = rt.config.seed
    with rt.lock():
        model = train(kind, dataset, config)
        save_model(rt.artifact(f"model_{kind}.json"), model)
    click.echo(f"trained {kind} on {len(dataset.y)} rows -> model_{kind}.json")


@main.command()
@click.option("--model", "kind", required=True, type=LEARNER_CHOICES)
@click.pass_obj
def evaluate(rt: Runtime, kind):
    """Cross-validated evaluation of one learner."""
    dataset, _ = rt.labelled_dataset()
    config = dict(rt.config.learners.get(kind, {}))
    config["seed"] = rt.config.seed
    report = kfold_cv(dataset, (kind, config), k=rt.config.cv_k, seed=rt.config.seed)
    with rt.lock():
        rt.artifact(f"eval_{kind}.json").write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )
    click.echo(
        f"{kind}: accuracy={report.accuracy:.3f} auc={report.auc_macro_ovr:.3f} "
        f"mae={report.mae:.3f} r2={report.r2:.3f}"
    )


@main.command()
@click.option("--model", "kind", required=True, type=LEARNER_CHOICES)
@click.pass_obj
def gridsearch(rt: Runtime, kind):
    """Grid search over the configured grid; trains the winning config."""
    dataset, _ = rt.labelled_dataset()
    grid = rt.config.grid.get(kind)
    if not grid:
        raise click.ClickException(f"no grid configured for {kind}")
    result = grid_search(dataset, kind, grid, k=rt.config.cv_k, seed=rt.config.seed)
    with rt.lock():
        with rt.artifact(f"gridsearch_{kind}.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["config", "accuracy", "auc", "mae", "r2"])
            for row in result.to_rows():
                writer.writerow(
                    [json.dumps(row["config"], sort_keys=True), repr(row["accuracy"]),
                     repr(row["auc"]), repr(row["mae"]), repr(row["r2"])]
                )
        best = dict(result.best_config)
        best["seed"] = rt.config.seed
        rt.artifact(f"best_config_{kind}.json").write_text(
            json.dumps(best, indent=2, sort_keys=True), encoding="utf-8"
        )
        model = train(kind, dataset, best)
        save_model(rt.artifact(f"model_{kind}.json"), model)
        rt.artifact(f"eval_{kind}.json").write_text(
            json.dumps(result.best_report.to_dict(), indent=2, sort_keys=True),
            encoding="utf-8",
        )
    click.echo(
        f"best {kind} config {result.best_config} "
        f"(accuracy={result.best_report.accuracy:.3f}); model saved"
    )


@main.command()
@click.option("--method", type=click.Choice(["variance", "kbest", "percentile", "rfe", "sfs"]),
              default=None)
@click.option("--k", type=int, default=None)
@click.option("--percentile", type=float, default=None)
@click.option("--target-size", type=int, default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--learner", "kind", type=LEARNER_CHOICES, default="forest")
@click.pass_obj
def select(rt: Runtime, method, k, percentile, target_size, threshold, kind):
    """Feature selection over the labelled split."""
    dataset, _ = rt.labelled_dataset()
    method = method or rt.config.selection_method
    params = dict(rt.config.selection_params)
    for name, value in (
        ("k", k), ("percentile", percentile),
        ("target_size", target_size), ("threshold", threshold),
    ):
        if value is not None:
            params[name] = value
    learner_config = dict(rt.config.learners.get(kind, {}))
    learner_config["seed"] = rt.config.seed
    result = select_features(dataset, method, params, learner=(kind, learner_config))
    with rt.lock():
        rt.artifact("selection.json").write_text(
            json.dumps(
                {"method": result.method, "kept": result.kept, "scores": result.scores},
                indent=2, sort_keys=True,
            ),
            encoding="utf-8",
        )
    click.echo(f"{method} kept {len(result.kept)} features: {', '.join(result.kept[:8])} ...")


@main.command()
@click.option("--model", "kind", required=True, type=LEARNER_CHOICES)
@click.option("--include-labelled", is_flag=True, default=False,
              help="also predict the labelled split")
@click.pass_obj
def predict(rt: Runtime, kind, include_labelled):
    """Apply a trained model to the unlabelled pool."""
    model_path = rt.require(f"model_{kind}.json", f"train --model {kind}")
    features_path = rt.require("features.csv", "featurize")
    labels = read_labels(rt.require("labels.jsonl", "featurize"), split="labelled")
    fmatrix = FeatureMatrix.load(features_path)
    model = load_model(model_path)
    ids = [cid for cid in fmatrix.ids if include_labelled or cid not in labels]
    X = fmatrix.to_array(ids)
    proba = model.predict_proba(X)
    pred = model.predict(X)
    with rt.lock():
        with rt.artifact("predictions.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["comment_id", "label", "p_expert", "p_non_expert", "p_out_of_scope"])
            for i, cid in enumerate(ids):
                writer.writerow(
                    [cid, CLASS_NAMES[pred[i]]]
                    + [repr(float(p)) for p in proba[i]]
                )
    counts = {name: int((pred == c).sum()) for c, name in enumerate(CLASS_NAMES)}
    click.echo(f"predicted {len(ids)} comments: {counts}")


def _read_predictions(path: Path) -> dict[str, int]:
    out: dict[str, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["comment_id"]] = parse_class(row["label"])
    return out


@main.command()
@click.option("--predictions", "predictions_path", type=click.Path(exists=True),
              default=None, help="override the run's predictions.csv")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="write tables here instead of the run directory")
@click.pass_obj
def characterize(rt: Runtime, predictions_path, out_dir):
    """Per-class feature distributions, ANOVA and MANOVA over predictions."""
    source = Path(predictions_path) if predictions_path else rt.require(
        "predictions.csv", "predict"
    )
    predictions = _read_predictions(source)
    fmatrix = FeatureMatrix.load(rt.require("features.csv", "featurize"))
    report = class_characteristics(predictions, fmatrix)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        rt.config.run_dir = out_dir
    with rt.lock():
        with rt.artifact("characteristics.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "class", "n", "mean", "median", "q1", "q3"])
            for name, stats in report.per_class.items():
                for j, feature in enumerate(report.feature_names):
                    if stats.undefined:
                        writer.writerow([feature, name, stats.n, "", "", "", ""])
                    else:
                        writer.writerow(
                            [feature, name, stats.n, repr(float(stats.mean[j])),
                             repr(float(stats.median[j])), repr(float(stats.q1[j])),
                             repr(float(stats.q3[j]))]
                        )
        with rt.artifact("anova.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "f_value", "p_value"])
            for feature in report.feature_names:
                res = report.anova[feature]
                writer.writerow([feature, repr(res.f_value), repr(res.p_value)])
        manova_payload = report.manova.to_dict() if report.manova else {"undefined": True}
        rt.artifact("manova.json").write_text(
            json.dumps(manova_payload, indent=2, sort_keys=True), encoding="utf-8"
        )
    if report.manova:
        click.echo(
            f"manova: lambda={report.manova.wilks_lambda:.4f} "
            f"F={report.manova.f_approx:.1f} p={report.manova.p_value:.3g}"
        )
    for note in report.notes:
        click.echo(f"note: {note}", err=True)


@main.command()
@click.option("--predictions", "predictions_path", type=click.Path(exists=True),
              default=None, help="override the run's predictions.csv")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="write tables here instead of the run directory")
@click.pass_obj
def profile(rt: Runtime, predictions_path, out_dir):
    """Type users from predictions and emit the radar table."""
    source = Path(predictions_path) if predictions_path else rt.require(
        "predictions.csv", "predict"
    )
    predictions = _read_predictions(source)
    fmatrix = FeatureMatrix.load(rt.require("features.csv", "featurize"))
    store = rt.store()
    profiles = classify_users(predictions, store, min_activity=rt.config.min_activity)
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
        rt.config.run_dir = out_dir
    with rt.lock():
        with rt.artifact("profiles.csv").open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["username", "n_predicted", "share_expert", "share_nonexpert",
                 "share_oos", "user_type"]
            )
            for p in profiles:
                writer.writerow(
                    [p.username, p.n_labelled_items, repr(p.share_expert),
                     repr(p.share_nonexpert), repr(p.share_oos), p.user_type]
                )
        try:
            table = profile_summary(profiles, fmatrix)
            with rt.artifact("radar.csv").open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["user_type"] + table.feature_names)
                for user_type in sorted(table.rows):
                    writer.writerow(
                        [user_type] + [repr(float(v)) for v in table.rows[user_type]]
                    )
        except ValueError as exc:
            click.echo(f"radar table skipped: {exc}", err=True)
    counts: dict[str, int] = {}
    for p in profiles:
        counts[p.user_type] = counts.get(p.user_type, 0) + 1
    click.echo(f"profiled {len(profiles)} users: {counts}")


# ---------------------------------------------------------------------------
# statistics commands
# ---------------------------------------------------------------------------


@main.command("kappa")
@click.option("--a", "file_a", required=True, type=click.Path(exists=True))
@click.option("--b", "file_b", required=True, type=click.Path(exists=True))
def kappa_cmd(file_a, file_b):
    """Cohen's kappa between two aligned label files (one label per line)."""
    labels_a = [l.strip() for l in Path(file_a).read_text(encoding="utf-8").splitlines() if l.strip()]
    labels_b = [l.strip() for l in Path(file_b).read_text(encoding="utf-8").splitlines() if l.strip()]
    report = cohens_kappa(labels_a, labels_b)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


@main.command("anova")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True),
              help="feature matrix csv (featurize output)")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True),
              help="jsonl labels keyed by comment_id")
@click.option("--per-feature", is_flag=True, default=True)
@click.option("--out", type=click.Path(), default=None)
def anova_cmd(matrix_path, labels_path, per_feature, out):
    """Per-feature one-way ANOVA of feature values against the class."""
    fmatrix = FeatureMatrix.load(matrix_path)
    labels = read_labels(labels_path)
    ids = sorted(cid for cid in labels if cid in fmatrix.rows)
    if not ids:
        raise click.ClickException("labels match no matrix rows")
    X = fmatrix.to_array(ids)
    y = np.array([labels[cid] for cid in ids])
    lines = ["feature,f_value,p_value"]
    classes = sorted(set(y.tolist()))
    for j, feature in enumerate(fmatrix.feature_names):
        res = anova_oneway([X[y == c, j] for c in classes])
        lines.append(f"{feature},{res.f_value!r},{res.p_value!r}")
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# annotation service
# ---------------------------------------------------------------------------


@main.command("serve-annotation")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True, type=int)
@click.option("--token", default=None)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="directory with the web UI build")
@click.pass_obj
def serve_annotation(rt: Runtime, data_dir, host, port, token, static_dir):
    """Run the dual-coder annotation HTTP service."""
    import uvicorn

    from .annotate import create_app

    app = create_app(
        data_dir,
        store_dir=rt.config.store if rt.config.store else None,
        token=token,
        static_dir=static_dir,
    )
    uvicorn.run(app, host=host, port=port, log_level="warning")


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@main.command()
@click.pass_obj
def report(rt: Runtime):
    """Assemble the learner-comparison grid plus confusion and
    importances from this run's artifacts."""
    kinds = ["logistic", "forest", "tree", "rulefit"]
    evals = {}
    for kind in kinds:
        path = rt.artifact(f"eval_{kind}.json")
        if path.exists():
            evals[kind] = json.loads(path.read_text(encoding="utf-8"))
    if not evals:
        raise click.ClickException(
            "no eval_<model>.json artifacts; run `expertfind evaluate` first"
        )
    lines = []
    present = [k for k in kinds if k in evals]
    header = f"{'metric':12s}" + "".join(f"{k:>12s}" for k in present)
    lines.append(header)
    for metric_key, label in (
        ("accuracy", "accuracy"), ("auc_macro_ovr", "auc"),
        ("mae", "mae"), ("r2", "r2"),
    ):
        row = f"{label:12s}"
        for kind in present:
            row += f"{evals[kind][metric_key]:12.3f}"
        lines.append(row)
    best = max(present, key=lambda k: evals[k]["accuracy"])
    lines.append("")
    lines.append(f"confusion matrix ({best}, row=true, col=predicted, proportions):")
    confusion = np.asarray(evals[best]["confusion"])
    lines.append(f"{'':14s}" + "".join(f"{n:>14s}" for n in CLASS_NAMES))
    for i, name in enumerate(CLASS_NAMES):
        lines.append(
            f"{name:14s}" + "".join(f"{confusion[i, j]:14.4f}" for j in range(3))
        )
    model_path = rt.artifact(f"model_{best}.json")
    if model_path.exists():
        model = load_model(model_path)
        importances = model.feature_importances()
        order = np.argsort(-importances)[:12]
        lines.append("")
        lines.append(f"top feature importances ({best}):")
        for j in order:
            lines.append(f"  {model.feature_names[j]:32s} {importances[j]:.3f}")
    text = "\n".join(lines) + "\n"
    with rt.lock():
        rt.artifact("report.txt").write_text(text, encoding="utf-8")
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
