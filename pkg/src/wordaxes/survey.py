"""Ingestion and summaries of survey belief datasets and identity-labeling responses.

Four CSV schemas are supported; each schema config records the dataset's
native response range so means can be rescaled to [0, 1], plus whether spread
information (sd, n) is required.  Ranges are data, not code: corrections are
a one-line schema edit.

CSV layouts
-----------
``this-paper``         identity,dimension,mean,sd,n[,log_frequency,synsets]; range [0, 1]
``bolukbasi``          identity,mean[,dimension,...]; range [-1, 1]; spread optional
``personality-traits`` identity,dimension,mean,sd,n[,...]; range [1, 5]
``epa-dictionary``     identity,dimension,mean,sd,n[,...]; range [-4.3, 4.3]

Labeling CSVs have columns question_id,question_type,question_identity,
answer_1..answer_4,selected; ``selected`` is either one of the four answers
or the sentinel ``all-equally-unlikely``, which drops the question.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, SchemaError

logger = logging.getLogger(__name__)

LABELING_SENTINEL = "all-equally-unlikely"
QUESTION_TYPES = ("IsA", "SeenWith")


@dataclass(frozen=True)
class SurveySchema:
    """Column requirements and native response range for one dataset family."""

    name: str
    low: float
    high: float
    requires_spread: bool
    fixed_dimension: str | None = None


SCHEMAS: dict[str, SurveySchema] = {
    "this-paper": SurveySchema("this-paper", 0.0, 1.0, True),
    "bolukbasi": SurveySchema("bolukbasi", -1.0, 1.0, False, fixed_dimension="gender"),
    "personality-traits": SurveySchema("personality-traits", 1.0, 5.0, True),
    "epa-dictionary": SurveySchema("epa-dictionary", -4.3, 4.3, True),
}


@dataclass(frozen=True)
class BeliefStats:
    """Per-(identity, dimension) survey summary, rescaled to [0, 1].

    ``se_missing`` marks records from datasets that ship means only; their
    standard error is set to 0 and the flag propagates to reports.
    """

    identity: str
    dimension: str
    mean: float
    sd: float
    n: int | None
    se: float
    log_frequency: float | None = None
    synsets: int | None = None
    se_missing: bool = False


@dataclass(frozen=True)
class LabelingObservation:
    """One (question identity, candidate answer) pairing with its 0/1 outcome."""

    question_type: str
    question_identity: str
    answer_identity: str
    selected: int

    def __post_init__(self):
        if self.question_type not in QUESTION_TYPES:
            raise ValueError(f"unknown question type {self.question_type!r}")
        if self.question_identity == self.answer_identity:
            raise ValueError("question and answer identities must differ")
        if self.selected not in (0, 1):
            raise ValueError("selected must be 0 or 1")


@dataclass(frozen=True, eq=False)
class BeliefMatrix:
    """Identities-by-dimensions grid of scaled-and-centered survey means.

    Every column has mean 0 and sample sd 1.
    """

    identities: tuple[str, ...]
    dimensions: tuple[str, ...]
    values: np.ndarray

    def row(self, identity: str) -> np.ndarray:
        return self.values[self.identities.index(identity)]


# ---------------------------------------------------------------------------
# Survey loading
# ---------------------------------------------------------------------------


def _parse_float(raw: str, what: str, where: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise SchemaError(f"{where}: non-numeric {what} {raw!r}") from None
    if not math.isfinite(value):
        raise SchemaError(f"{where}: non-finite {what}")
    return value


def _parse_optional(row: dict, column: str, caster, where: str):
    raw = (row.get(column) or "").strip()
    if not raw:
        return None
    try:
        return caster(raw)
    except ValueError:
        raise SchemaError(f"{where}: bad {column} value {raw!r}") from None


def load_survey(path, schema: str | SurveySchema) -> list[BeliefStats]:
    """Load one survey CSV, rescaling means (and sds) to the [0, 1] convention."""
    if isinstance(schema, str):
        if schema not in SCHEMAS:
            raise SchemaError(
                f"unknown survey schema {schema!r}; expected one of {sorted(SCHEMAS)}"
            )
        schema = SCHEMAS[schema]
    path = Path(path)
    span = schema.high - schema.low

    records: list[BeliefStats] = []
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        required = {"identity", "mean"}
        if schema.fixed_dimension is None:
            required.add("dimension")
        missing = required - set(reader.fieldnames)
        if missing:
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")

        for row in reader:
            where = f"{path}: line {reader.line_num}"
            identity = (row.get("identity") or "").strip()
            if not identity:
                raise SchemaError(f"{where}: empty identity")
            dimension = (row.get("dimension") or "").strip() or (
                schema.fixed_dimension or ""
            )
            if not dimension:
                raise SchemaError(f"{where}: empty dimension")

            raw_mean = _parse_float((row.get("mean") or "").strip(), "mean", where)
            if not schema.low <= raw_mean <= schema.high:
                raise SchemaError(
                    f"{where}: mean {raw_mean} outside native range "
                    f"[{schema.low}, {schema.high}]"
                )
            mean = (raw_mean - schema.low) / span

            raw_sd = (row.get("sd") or "").strip()
            raw_n = (row.get("n") or "").strip()
            if raw_sd and raw_n:
                sd_native = _parse_float(raw_sd, "sd", where)
                if sd_native < 0:
                    raise SchemaError(f"{where}: negative sd")
                sd = sd_native / span
                try:
                    n = int(raw_n)
                except ValueError:
                    raise SchemaError(f"{where}: bad n value {raw_n!r}") from None
                if n < 1:
                    raise SchemaError(f"{where}: n must be >= 1")
                se = sd / math.sqrt(n)
                se_missing = False
            elif schema.requires_spread:
                raise SchemaError(
                    f"{where}: schema '{schema.name}' requires sd and n"
                )
            elif raw_sd or raw_n:
                raise SchemaError(f"{where}: give both sd and n or neither")
            else:
                sd, n, se, se_missing = 0.0, None, 0.0, True

            key = (identity, dimension)
            if key in seen:
                raise SchemaError(f"{where}: duplicate record for {key}")
            seen.add(key)
            records.append(
                BeliefStats(
                    identity=identity,
                    dimension=dimension,
                    mean=mean,
                    sd=sd,
                    n=n,
                    se=se,
                    log_frequency=_parse_optional(row, "log_frequency", float, where),
                    synsets=_parse_optional(row, "synsets", int, where),
                    se_missing=se_missing,
                )
            )
    if not records:
        raise SchemaError(f"{path}: no data rows")
    if any(r.se_missing for r in records):
        logger.warning(
            "%s: %d records carry no spread information; se set to 0 and flagged",
            path,
            sum(r.se_missing for r in records),
        )
    return records


def save_survey(records: list[BeliefStats], path) -> None:
    """Write records in the canonical (already-scaled) ``this-paper`` layout.

    Loading the result back with the ``this-paper`` schema reproduces the
    records exactly, because the [0, 1] rescale is the identity there and
    floats are written with round-trip ``repr``.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["identity", "dimension", "mean", "sd", "n", "log_frequency", "synsets"]
        )
        for r in records:
            writer.writerow(
                [
                    r.identity,
                    r.dimension,
                    repr(float(r.mean)),
                    repr(float(r.sd)) if not r.se_missing else "",
                    "" if r.n is None else str(r.n),
                    "" if r.log_frequency is None else repr(float(r.log_frequency)),
                    "" if r.synsets is None else str(r.synsets),
                ]
            )


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


def dimension_summary(records: list[BeliefStats], dimension: str) -> dict[str, float]:
    """Sample variance and median of the per-identity means on one dimension."""
    means = np.array([r.mean for r in records if r.dimension == dimension])
    if means.size < 3:
        raise DegenerateDataError(
            f"dimension '{dimension}': need at least 3 identities, got {means.size}"
        )
    return {
        "variance": float(means.var(ddof=1)),
        "median": float(np.median(means)),
    }


def build_belief_matrix(records: list[BeliefStats]) -> BeliefMatrix:
    """Column-standardized matrix of mean beliefs (sample sd).

    Identities missing any dimension are dropped with a warning rather than
    imputed; a constant dimension cannot be standardized and is an error.
    """
    dimensions = tuple(sorted({r.dimension for r in records}))
    by_identity: dict[str, dict[str, float]] = {}
    for r in records:
        by_identity.setdefault(r.identity, {})[r.dimension] = r.mean

    identities = []
    for identity in sorted(by_identity):
        have = by_identity[identity]
        if len(have) == len(dimensions):
            identities.append(identity)
        else:
            logger.warning(
                "identity '%s' missing %d of %d dimensions; dropped from belief matrix",
                identity,
                len(dimensions) - len(have),
                len(dimensions),
            )
    if len(identities) < 2:
        raise DegenerateDataError("need at least 2 complete identities to standardize")

    values = np.array(
        [[by_identity[i][d] for d in dimensions] for i in identities], dtype=np.float64
    )
    means = values.mean(axis=0)
    sds = values.std(axis=0, ddof=1)
    flat = np.flatnonzero(sds == 0.0)
    if flat.size:
        raise DegenerateDataError(
            f"dimension '{dimensions[int(flat[0])]}' has zero variance; cannot standardize"
        )
    return BeliefMatrix(tuple(identities), dimensions, (values - means) / sds)


# ---------------------------------------------------------------------------
# Labeling data
# ---------------------------------------------------------------------------


def load_labeling(path) -> list[LabelingObservation]:
    """Expand answered labeling questions into one observation per candidate answer.

    Sentinel rows ("all are equally unlikely") contribute nothing; a selected
    answer that is not among the four candidates is an error.
    """
    path = Path(path)
    answer_columns = ("answer_1", "answer_2", "answer_3", "answer_4")
    observations: list[LabelingObservation] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = {"question_type", "question_identity", "selected", *answer_columns} - set(
            reader.fieldnames
        )
        if missing:
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")

        for row in reader:
            where = f"{path}: line {reader.line_num}"
            qtype = (row.get("question_type") or "").strip()
            if qtype not in QUESTION_TYPES:
                raise SchemaError(f"{where}: unknown question type {qtype!r}")
            question = (row.get("question_identity") or "").strip()
            if not question:
                raise SchemaError(f"{where}: empty question identity")
            answers = [(row.get(c) or "").strip() for c in answer_columns]
            if any(not a for a in answers):
                raise SchemaError(f"{where}: empty answer identity")
            if len(set(answers)) != len(answers):
                raise SchemaError(f"{where}: duplicate answer identities")
            if question in answers:
                raise SchemaError(f"{where}: question identity repeated among answers")
            selected = (row.get("selected") or "").strip()
            if selected == LABELING_SENTINEL:
                continue
            if selected not in answers:
                raise SchemaError(
                    f"{where}: selected answer {selected!r} not among candidates"
                )
            for answer in answers:
                observations.append(
                    LabelingObservation(
                        question_type=qtype,
                        question_identity=question,
                        answer_identity=answer,
                        selected=int(answer == selected),
                    )
                )
    return observations
