"""Run configuration: TOML loading, validation, and content fingerprinting.

The fingerprint covers every measurement-relevant setting plus the content
digests of all input files, and deliberately excludes the output directory
and worker count, so identical (config, seed) pairs give identical outputs
wherever they are written.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .axes import MEASURES
from .errors import ConfigError
from .survey import SCHEMAS

CONFIG_TEMPLATE = """\
# wordaxes run configuration (TOML)

seed = 7                      # RNG seed recorded in every output
out = "out"                   # output directory; --out overrides
dimensions = "dimensions.json"  # dimension-spec file (JSON)
labeling = "labeling.csv"     # identity-labeling CSV; omit if not running salience

# measures = ["kozlowski", "garg"]   # optional; defaults to all seven
# identities = ["doctor", "nurse"]   # optional; defaults to all survey identities

[[embeddings]]
name = "toy"                  # logical name used in reports
path = "vectors.txt"          # word2vec-text or glove-text file
format = "auto"               # auto | word2vec-text | glove-text

[[surveys]]
name = "mini"                 # dataset label used in reports
path = "survey.csv"
schema = "this-paper"         # this-paper | bolukbasi | personality-traits | epa-dictionary

[options]
sign_align = true             # flip scores to the survey before ranking; --no-sign-align overrides
ridge = 1e-6                  # ridge penalty for every regression fit
bootstrap_resamples = 200     # >= 100
bootstrap_level = 0.95
salience_survey = "mini"      # survey feeding the belief matrix; default: first survey
jobs = 1                      # worker threads for the measurement grid; --jobs overrides
"""


@dataclass(frozen=True)
class EmbeddingSource:
    name: str
    path: Path
    format: str


@dataclass(frozen=True)
class SurveySource:
    name: str
    path: Path
    schema: str


@dataclass
class RunConfig:
    """Validated run configuration; all paths are absolute."""

    embeddings: list[EmbeddingSource]
    dimensions: Path
    surveys: list[SurveySource]
    labeling: Path | None
    measures: list[str]
    identities: list[str] | None
    seed: int
    out: Path
    sign_align: bool = True
    ridge: float = 1e-6
    bootstrap_resamples: int = 200
    bootstrap_level: float = 0.95
    salience_survey: str | None = None
    jobs: int = 1
    source_path: Path | None = field(default=None, compare=False)


def _expect(payload: dict, key: str, kind, where: str, default=None, required: bool = False):
    if key not in payload:
        if required:
            raise ConfigError(f"{where}.{key}: missing required field")
        return default
    value = payload[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _existing_path(raw: str, base: Path, where: str) -> Path:
    path = Path(raw)
    if not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise ConfigError(f"{where}: no such file: {path}")
    return path.resolve()


def load_config(path, *, seed=None, out=None, jobs=None, sign_align=None) -> RunConfig:
    """Load and validate a TOML run configuration.

    Keyword arguments apply CLI overrides after parsing.  Relative paths in
    the file are resolved against the file's own directory.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config: no such file: {path}")
    base = path.resolve().parent
    try:
        with open(path, "rb") as fh:
            payload = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config: invalid TOML: {exc}") from None

    raw_embeddings = payload.get("embeddings")
    if not isinstance(raw_embeddings, list) or not raw_embeddings:
        raise ConfigError("embeddings: at least one [[embeddings]] block is required")
    embeddings = []
    for i, block in enumerate(raw_embeddings):
        where = f"embeddings[{i}]"
        if not isinstance(block, dict):
            raise ConfigError(f"{where}: expected a table")
        raw_path = _expect(block, "path", str, where, required=True)
        fmt = _expect(block, "format", str, where, default="auto")
        if fmt not in ("auto", "word2vec-text", "glove-text"):
            raise ConfigError(f"{where}.format: unknown format {fmt!r}")
        source = _existing_path(raw_path, base, f"{where}.path")
        name = _expect(block, "name", str, where, default=source.stem)
        embeddings.append(EmbeddingSource(name, source, fmt))
    if len({e.name for e in embeddings}) != len(embeddings):
        raise ConfigError("embeddings: duplicate embedding names")

    raw_surveys = payload.get("surveys")
    if not isinstance(raw_surveys, list) or not raw_surveys:
        raise ConfigError("surveys: at least one [[surveys]] block is required")
    surveys = []
    for i, block in enumerate(raw_surveys):
        where = f"surveys[{i}]"
        if not isinstance(block, dict):
            raise ConfigError(f"{where}: expected a table")
        raw_path = _expect(block, "path", str, where, required=True)
        schema = _expect(block, "schema", str, where, required=True)
        if schema not in SCHEMAS:
            raise ConfigError(
                f"{where}.schema: unknown schema {schema!r}; expected one of {sorted(SCHEMAS)}"
            )
        source = _existing_path(raw_path, base, f"{where}.path")
        name = _expect(block, "name", str, where, default=source.stem)
        surveys.append(SurveySource(name, source, schema))
    if len({s.name for s in surveys}) != len(surveys):
        raise ConfigError("surveys: duplicate survey names")

    dimensions = _existing_path(
        _expect(payload, "dimensions", str, "config", required=True), base, "dimensions"
    )
    labeling_raw = _expect(payload, "labeling", str, "config")
    labeling = _existing_path(labeling_raw, base, "labeling") if labeling_raw else None

    measures = payload.get("measures", sorted(MEASURES))
    if not isinstance(measures, list) or not all(isinstance(m, str) for m in measures):
        raise ConfigError("measures: expected a list of measure names")
    for m in measures:
        if m not in MEASURES:
            raise ConfigError(f"measures: unknown measure {m!r}; expected one of {sorted(MEASURES)}")
    if not measures:
        raise ConfigError("measures: list must not be empty")

    identities = payload.get("identities")
    if identities is not None and (
        not isinstance(identities, list) or not all(isinstance(w, str) for w in identities)
    ):
        raise ConfigError("identities: expected a list of words")

    options = payload.get("options", {})
    if not isinstance(options, dict):
        raise ConfigError("options: expected a table")
    cfg = RunConfig(
        embeddings=embeddings,
        dimensions=dimensions,
        surveys=surveys,
        labeling=labeling,
        measures=list(measures),
        identities=list(identities) if identities is not None else None,
        seed=_expect(payload, "seed", int, "config", default=0),
        out=Path(_expect(payload, "out", str, "config", default="out")),
        sign_align=_expect(options, "sign_align", bool, "options", default=True),
        ridge=_expect(options, "ridge", float, "options", default=1e-6),
        bootstrap_resamples=_expect(options, "bootstrap_resamples", int, "options", default=200),
        bootstrap_level=_expect(options, "bootstrap_level", float, "options", default=0.95),
        salience_survey=_expect(options, "salience_survey", str, "options"),
        jobs=_expect(options, "jobs", int, "options", default=1),
        source_path=path.resolve(),
    )
    if not cfg.out.is_absolute():
        cfg.out = base / cfg.out

    if seed is not None:
        cfg.seed = int(seed)
    if out is not None:
        cfg.out = Path(out).resolve()
    if jobs is not None:
        cfg.jobs = int(jobs)
    if sign_align is not None:
        cfg.sign_align = bool(sign_align)

    if cfg.ridge < 0:
        raise ConfigError("options.ridge: must be nonnegative")
    if cfg.bootstrap_resamples < 100:
        raise ConfigError("options.bootstrap_resamples: must be >= 100")
    if not 0.0 < cfg.bootstrap_level < 1.0:
        raise ConfigError("options.bootstrap_level: must be in (0, 1)")
    if cfg.jobs < 1:
        raise ConfigError("options.jobs: must be >= 1")
    if cfg.salience_survey is not None and cfg.salience_survey not in {
        s.name for s in cfg.surveys
    }:
        raise ConfigError(
            f"options.salience_survey: no survey named {cfg.salience_survey!r}"
        )
    return cfg


def _digest_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def config_fingerprint(cfg: RunConfig) -> str:
    """Short content hash of the configuration and all input files."""
    canonical = {
        "seed": cfg.seed,
        "measures": cfg.measures,
        "identities": cfg.identities,
        "sign_align": cfg.sign_align,
        "ridge": cfg.ridge,
        "bootstrap_resamples": cfg.bootstrap_resamples,
        "bootstrap_level": cfg.bootstrap_level,
        "salience_survey": cfg.salience_survey,
        "dimensions": _digest_file(cfg.dimensions),
        "labeling": _digest_file(cfg.labeling) if cfg.labeling else None,
        "embeddings": [
            {"name": e.name, "format": e.format, "sha256": _digest_file(e.path)}
            for e in cfg.embeddings
        ],
        "surveys": [
            {"name": s.name, "schema": s.schema, "sha256": _digest_file(s.path)}
            for s in cfg.surveys
        ],
    }
    blob = json.dumps(canonical, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]
