"""Command-line surface: measure words, evaluate against surveys, fit salience.

Subcommands
-----------
``measure``   score every (embedding x dimension x measure) cell and write
              per-run score tables plus a skipped-word manifest
``evaluate``  dimension-level accuracy, best settings, belief-level ranking,
              grand means, and the belief-factor regression
``salience``  labeling-salience regressions, with the importance-vs-accuracy
              correlation when an evaluation report is available
``all``       everything above plus a JSON summary

Exit codes: 0 ok, 1 domain error, 2 usage error.  Warnings (skipped words,
degenerate dimensions, se-missing datasets) go to ``warnings.json``, never
interleaved with data, and do not affect the exit code.
"""

from __future__ import annotations

import argparse
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .axes import DimensionSpec, load_dimension_specs, resolve_multiclass
from .config import RunConfig, config_fingerprint, load_config
from .embeddings import EmbeddingModel, load_embeddings
from .errors import DegenerateDataError, MeasurementError, WordaxesError, ZeroVectorError
from .evaluation import (
    BeliefRankingScore,
    DimensionAccuracy,
    MeasurementRun,
    RunKey,
    belief_factor_regression,
    dimension_accuracy,
    fit_salience,
    grand_mean_accuracy,
    rank_all_beliefs,
    run_measurement,
    salience_accuracy_correlation,
    select_best_settings,
)
from .reporting import sanitize, write_json, write_table
from .survey import (
    BeliefStats,
    build_belief_matrix,
    dimension_summary,
    load_labeling,
    load_survey,
)

logger = logging.getLogger(__name__)


class WarningCollector(logging.Handler):
    """Captures package warnings for the structured sidecar file."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.records: list[dict] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.records.append(
            {
                "logger": record.name,
                "level": record.levelname,
                "message": record.getMessage(),
            }
        )

    def sorted_records(self) -> list[dict]:
        return sorted(self.records, key=lambda r: (r["logger"], r["message"]))


@dataclass
class EvalArtifacts:
    accuracies: list[DimensionAccuracy]
    best: dict[tuple[str, str], DimensionAccuracy]
    rankings: list[tuple[str, DimensionAccuracy, BeliefRankingScore]]
    grand_means: dict[str, tuple[int, int, float | None]]


class Runner:
    """Loads inputs once and drives the measurement/evaluation/salience pipeline."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.fingerprint = config_fingerprint(cfg)
        # attach before loading so ingestion warnings land in warnings.json
        self.collector = WarningCollector()
        logging.getLogger("wordaxes").addHandler(self.collector)
        try:
            self.models = [
                load_embeddings(src.path, src.format, name=src.name)
                for src in cfg.embeddings
            ]
            self.dimensions = load_dimension_specs(cfg.dimensions)
            self.surveys: dict[str, list[BeliefStats]] = {
                src.name: load_survey(src.path, src.schema) for src in cfg.surveys
            }
            self.labeling = load_labeling(cfg.labeling) if cfg.labeling else None
        except BaseException:
            self.close()
            raise
        if cfg.identities is not None:
            self.identities = sorted(set(cfg.identities))
        else:
            self.identities = sorted(
                {r.identity for records in self.surveys.values() for r in records}
            )
        self._runs: list[MeasurementRun] | None = None
        self._failures: list[dict] = []

    def close(self) -> None:
        logging.getLogger("wordaxes").removeHandler(self.collector)

    @property
    def meta(self) -> dict:
        return {
            "tool": "wordaxes",
            "version": __version__,
            "config": self.fingerprint,
            "seed": self.cfg.seed,
        }

    # -- measurement --------------------------------------------------------

    def _plan(self) -> list[tuple[EmbeddingModel, DimensionSpec, str]]:
        plan = []
        for measure in sorted(self.cfg.measures):
            for spec in self.dimensions:
                binaries = (
                    resolve_multiclass(spec, measure) if spec.multiclass else [spec]
                )
                for binary in binaries:
                    for model in self.models:
                        plan.append((model, binary, measure))
        return plan

    def runs(self) -> list[MeasurementRun]:
        if self._runs is not None:
            return self._runs
        plan = self._plan()

        def one(task):
            model, spec, measure = task
            try:
                return run_measurement(model, spec, measure, self.identities)
            except (MeasurementError, ZeroVectorError, DegenerateDataError) as exc:
                logger.warning(
                    "run failed (embedding=%s dimension=%s source=%s measure=%s): %s",
                    model.name,
                    spec.name,
                    spec.wordset_source,
                    measure,
                    exc,
                )
                self._failures.append(
                    {
                        "embedding": model.name,
                        "dimension": spec.name,
                        "wordset_source": spec.wordset_source,
                        "measure": measure,
                        "error": str(exc),
                    }
                )
                return None

        if self.cfg.jobs > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.jobs) as pool:
                results = list(pool.map(one, plan))
        else:
            results = [one(task) for task in plan]
        runs = [r for r in results if r is not None]
        runs.sort(key=lambda r: r.key)
        if not runs:
            raise MeasurementError("no measurement run succeeded; see warnings")
        self._runs = runs
        return runs

    def write_measure(self) -> None:
        scores_dir = self.cfg.out / "scores"
        scores_dir.mkdir(parents=True, exist_ok=True)
        for run in self.runs():
            stem = "__".join(
                sanitize(t)
                for t in (
                    run.key.embedding,
                    run.key.dimension,
                    run.key.wordset_source,
                    run.key.measure,
                )
            )
            rows = [
                {"identity": identity, "score": run.scores[identity]}
                for identity in sorted(run.scores)
            ]
            write_table(
                scores_dir / f"{stem}.csv", ["identity", "score"], rows, self.meta
            )

    def write_skipped_manifest(self) -> None:
        skipped = []
        for run in self.runs():
            for sw in run.skipped:
                skipped.append(
                    {
                        "embedding": run.key.embedding,
                        "dimension": run.key.dimension,
                        "wordset_source": run.key.wordset_source,
                        "measure": run.key.measure,
                        "word": sw.word,
                        "reason": sw.reason,
                    }
                )
        skipped.sort(key=lambda r: tuple(r.values()))
        write_json(
            self.cfg.out / "skipped_words.json",
            {"skipped": skipped, "failed_runs": sorted(self._failures, key=str)},
            self.meta,
        )

    # -- evaluation ---------------------------------------------------------

    def evaluate(self) -> EvalArtifacts:
        accuracies = []
        for dataset, records in sorted(self.surveys.items()):
            dims = {r.dimension for r in records}
            for run in self.runs():
                if run.key.dimension not in dims:
                    continue
                try:
                    accuracies.append(dimension_accuracy(run, records, dataset))
                except DegenerateDataError as exc:
                    logger.warning("accuracy skipped for %s on %s: %s", run.key, dataset, exc)
        if not accuracies:
            raise DegenerateDataError("no dimension accuracy could be computed")
        best = select_best_settings(accuracies)

        runs_by_key = {r.key: r for r in self.runs()}
        rankings = []
        grand: dict[str, list[BeliefRankingScore]] = {}
        for (dataset, _dimension), acc in sorted(best.items()):
            run = runs_by_key[acc.key]
            scores = rank_all_beliefs(
                run, self.surveys[dataset], align=self.cfg.sign_align
            )
            grand.setdefault(dataset, []).extend(scores)
            rankings.extend((dataset, acc, s) for s in scores)
        grand_means = {
            dataset: grand_mean_accuracy(scores) for dataset, scores in grand.items()
        }
        return EvalArtifacts(accuracies, best, rankings, grand_means)

    def write_evaluate(self, artifacts: EvalArtifacts) -> None:
        out = self.cfg.out
        out.mkdir(parents=True, exist_ok=True)

        acc_rows = [
            {
                "dataset": a.dataset,
                "dimension": a.key.dimension,
                "wordset_source": a.key.wordset_source,
                "embedding": a.key.embedding,
                "measure": a.key.measure,
                "pearson_r": a.pearson_r,
                "n_identities": a.n_identities,
            }
            for a in artifacts.accuracies
        ]
        acc_rows.sort(key=lambda r: tuple(str(v) for v in r.values()))
        write_table(
            out / "dimension_accuracy.csv",
            ["dataset", "dimension", "wordset_source", "embedding", "measure", "pearson_r", "n_identities"],
            acc_rows,
            self.meta,
        )

        best_rows = [
            {
                "dataset": dataset,
                "dimension": dimension,
                "embedding": a.key.embedding,
                "wordset_source": a.key.wordset_source,
                "measure": a.key.measure,
                "pearson_r": a.pearson_r,
            }
            for (dataset, dimension), a in sorted(artifacts.best.items())
        ]
        write_table(
            out / "best_settings.csv",
            ["dataset", "dimension", "embedding", "wordset_source", "measure", "pearson_r"],
            best_rows,
            self.meta,
        )

        rank_rows = [
            {
                "dataset": dataset,
                "dimension": s.dimension,
                "identity": s.identity,
                "embedding": a.key.embedding,
                "wordset_source": a.key.wordset_source,
                "measure": a.key.measure,
                "n_gated": s.n_gated,
                "n_correct": s.n_correct,
                "accuracy": s.accuracy,
            }
            for dataset, a, s in artifacts.rankings
        ]
        rank_rows.sort(key=lambda r: (r["dataset"], r["dimension"], r["identity"]))
        write_table(
            out / "belief_ranking.csv",
            ["dataset", "dimension", "identity", "embedding", "wordset_source", "measure", "n_gated", "n_correct", "accuracy"],
            rank_rows,
            self.meta,
        )

        gm_rows = [
            {
                "dataset": dataset,
                "total_correct": correct,
                "total_gated": gated,
                "accuracy": ratio,
            }
            for dataset, (correct, gated, ratio) in sorted(artifacts.grand_means.items())
        ]
        write_table(
            out / "grand_mean.csv",
            ["dataset", "total_correct", "total_gated", "accuracy"],
            gm_rows,
            self.meta,
        )

        factor_rows = []
        by_dataset: dict[str, list[BeliefRankingScore]] = {}
        for dataset, _acc, s in artifacts.rankings:
            by_dataset.setdefault(dataset, []).append(s)
        for dataset, scores in sorted(by_dataset.items()):
            try:
                result = belief_factor_regression(
                    scores,
                    self.surveys[dataset],
                    ridge=self.cfg.ridge,
                    level=self.cfg.bootstrap_level,
                    resamples=self.cfg.bootstrap_resamples,
                    seed=self.cfg.seed,
                )
            except DegenerateDataError as exc:
                logger.warning("factor regression skipped for %s: %s", dataset, exc)
                continue
            factor_rows.append(
                {
                    "dataset": dataset,
                    "term": "(intercept)",
                    "estimate": result.fit.intercept,
                    "ci_lower": None,
                    "ci_upper": None,
                    "converged": result.fit.converged,
                    "n_beliefs": result.n_beliefs,
                }
            )
            for name, coef, ci in zip(
                result.factors, result.fit.coefficients, result.coefficient_cis
            ):
                factor_rows.append(
                    {
                        "dataset": dataset,
                        "term": name,
                        "estimate": float(coef),
                        "ci_lower": ci.lower,
                        "ci_upper": ci.upper,
                        "converged": result.fit.converged,
                        "n_beliefs": result.n_beliefs,
                    }
                )
        write_table(
            out / "factor_regression.csv",
            ["dataset", "term", "estimate", "ci_lower", "ci_upper", "converged", "n_beliefs"],
            factor_rows,
            self.meta,
        )

    # -- salience -----------------------------------------------------------

    def salience(self):
        if self.labeling is None:
            raise MeasurementError(
                "salience requires labeling data; set 'labeling' in the config"
            )
        dataset = self.cfg.salience_survey or self.cfg.surveys[0].name
        records = self.surveys[dataset]
        matrix = build_belief_matrix(records)
        result = fit_salience(
            self.labeling,
            matrix,
            ridge=self.cfg.ridge,
            level=self.cfg.bootstrap_level,
            resamples=self.cfg.bootstrap_resamples,
            seed=self.cfg.seed,
            on_missing="drop",
        )
        return dataset, records, result

    def write_salience(self, accuracies: list[DimensionAccuracy] | None) -> None:
        out = self.cfg.out
        out.mkdir(parents=True, exist_ok=True)
        dataset, records, result = self.salience()

        rows = []
        for j, dim in enumerate(result.dimensions):
            rows.append(
                {
                    "dimension": dim,
                    "isa_coefficient": float(result.isa.coefficients[j]),
                    "isa_ci_lower": result.isa_cis[j].lower,
                    "isa_ci_upper": result.isa_cis[j].upper,
                    "seenwith_coefficient": float(result.seenwith.coefficients[j]),
                    "seenwith_ci_lower": result.seenwith_cis[j].lower,
                    "seenwith_ci_upper": result.seenwith_cis[j].upper,
                    "importance": result.importance[dim],
                }
            )
        rows.sort(key=lambda r: r["dimension"])
        write_table(
            out / "salience.csv",
            ["dimension", "isa_coefficient", "isa_ci_lower", "isa_ci_upper", "seenwith_coefficient", "seenwith_ci_lower", "seenwith_ci_upper", "importance"],
            rows,
            self.meta,
        )

        if accuracies is None:
            accuracies = self._read_accuracy_table()
        correlation_rows = []
        if accuracies:
            effects: dict[str, list[float]] = {}
            for a in accuracies:
                effects.setdefault(a.key.dimension, []).append(a.pearson_r)
            mean_effects = {d: float(np.mean(v)) for d, v in effects.items()}
            variances = {}
            for dim in result.dimensions:
                try:
                    variances[dim] = dimension_summary(records, dim)["variance"]
                except DegenerateDataError:
                    continue
            for label, statistic in (("importance", result.importance), ("variance", variances)):
                try:
                    r = salience_accuracy_correlation(statistic, mean_effects)
                except DegenerateDataError as exc:
                    logger.warning("salience correlation (%s) skipped: %s", label, exc)
                    continue
                shared = len(set(statistic) & set(mean_effects))
                correlation_rows.append(
                    {"statistic": label, "pearson_r": r, "n_dimensions": shared}
                )
        else:
            logger.warning(
                "no evaluation report available; skipping importance-vs-accuracy correlation"
            )
        write_table(
            out / "salience_correlation.csv",
            ["statistic", "pearson_r", "n_dimensions"],
            correlation_rows,
            self.meta,
        )

    def _read_accuracy_table(self) -> list[DimensionAccuracy]:
        path = self.cfg.out / "dimension_accuracy.csv"
        if not path.is_file():
            return []
        accuracies = []
        with open(path, encoding="utf-8", newline="") as fh:
            first = fh.readline()
            if not first.startswith("#"):
                fh.seek(0)
            for row in csv.DictReader(fh):
                accuracies.append(
                    DimensionAccuracy(
                        RunKey(
                            row["embedding"],
                            row["dimension"],
                            row["wordset_source"],
                            row["measure"],
                        ),
                        float(row["pearson_r"]),
                        int(row["n_identities"]),
                        row["dataset"],
                    )
                )
        return accuracies

    # -- shared sidecars ----------------------------------------------------

    def write_sidecars(self, extra_summary: dict | None = None) -> None:
        out = self.cfg.out
        out.mkdir(parents=True, exist_ok=True)
        write_json(
            out / "warnings.json",
            {"warnings": self.collector.sorted_records()},
            self.meta,
        )
        if extra_summary is not None:
            write_json(out / "summary.json", extra_summary, self.meta)


def _summary_payload(runner: Runner, artifacts: EvalArtifacts | None) -> dict:
    skipped = sorted(
        {
            (run.key.embedding, run.key.dimension, run.key.wordset_source,
             run.key.measure, sw.word, sw.reason)
            for run in runner.runs()
            for sw in run.skipped
        }
    )
    payload: dict = {
        "embeddings": sorted(m.name for m in runner.models),
        "datasets": sorted(runner.surveys),
        "identities": len(runner.identities),
        "runs": len(runner.runs()),
        "failed_runs": sorted(runner._failures, key=str),
        "skipped_words": [
            dict(zip(("embedding", "dimension", "wordset_source", "measure", "word", "reason"), row))
            for row in skipped
        ],
    }
    if artifacts is not None:
        payload["grand_mean_accuracy"] = {
            dataset: ratio
            for dataset, (_c, _g, ratio) in sorted(artifacts.grand_means.items())
        }
    return payload


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordaxes",
        description="Measure words along semantic axes of embedding spaces "
        "and evaluate the measurements against survey data.",
    )
    parser.add_argument("--version", action="version", version=f"wordaxes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("measure", "write per-run identity score tables and the skipped-word manifest"),
        ("evaluate", "write accuracy, best-settings, ranking, and factor tables"),
        ("salience", "write labeling-salience coefficient tables"),
        ("all", "run measure, evaluate, and salience in one pass"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="TOML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--jobs", type=int, default=None, help="worker threads for the run grid")
        p.add_argument(
            "--no-sign-align",
            action="store_true",
            help="disable sign alignment before belief ranking",
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    runner = None
    try:
        cfg = load_config(
            args.config,
            seed=args.seed,
            out=args.out,
            jobs=args.jobs,
            sign_align=False if args.no_sign_align else None,
        )
        runner = Runner(cfg)
        artifacts = None
        if args.command in ("measure", "all"):
            runner.write_measure()
        if args.command in ("evaluate", "all"):
            artifacts = runner.evaluate()
            runner.write_evaluate(artifacts)
        if args.command in ("salience", "all"):
            runner.write_salience(artifacts.accuracies if artifacts else None)
        if args.command in ("measure", "evaluate", "all"):
            runner.write_skipped_manifest()
        summary = _summary_payload(runner, artifacts) if args.command == "all" else None
        runner.write_sidecars(summary)
    except WordaxesError as exc:
        logging.getLogger("wordaxes.cli").error("%s", exc)
        return 1
    except OSError as exc:
        logging.getLogger("wordaxes.cli").error("%s", exc)
        return 1
    finally:
        if runner is not None:
            runner.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
