"""Pipeline run configuration.

A flat key-value text file (`key = value`, one per line, `#` comments) is
the canonical record of a run; CLI flags override file values. The
parsed form round-trips losslessly through to_text()/parse().
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

STAGE_ORDER = (
    "ingest",
    "build",
    "stats",
    "centrality",
    "cluster",
    "compare",
    "cohorts",
    "track",
)

RANDOMIZED_STAGES = {
    "stats": ("distance_seed",),
    "cluster": ("cluster_seed",),
    "compare": ("baseline_seed",),
    "cohorts": ("cohort_seed",),
}


@dataclass
class RunConfig:
    pubs: str = ""
    pubs_format: str = "tsv"
    seminars: str = ""
    out: str = "out"
    stages: str = ",".join(STAGE_ORDER)
    window: int = 1
    step: int = 1
    powerlaw_xmin: int = 1
    distance_samples: int = 1000
    distance_seed: int = 1
    tol: float = 1e-12
    max_iter: int = 100000
    cluster_seed: int = 1
    refine: bool = True
    compare_measure: str = "overlap"
    compare_top: int = 250
    baseline_seed: int = 1
    min_venue_authors: int = 10
    random_cohorts: int = 0
    connected_cohorts: int = 0
    cohort_seed: int = 1
    min_absentees: int = 5
    career_split: int = 0
    launcher_threshold: float = 0.2
    threads: int = 1

    def stage_list(self) -> list[str]:
        return [s.strip() for s in self.stages.split(",") if s.strip()]

    def to_text(self) -> str:
        lines = []
        for f in sorted(fields(self), key=lambda f: f.name):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def validate(self) -> None:
        stages = self.stage_list()
        unknown = [s for s in stages if s not in STAGE_ORDER]
        if unknown:
            raise ValueError(f"unknown stages: {unknown}")
        if not stages:
            raise ValueError("no stages requested")
        if self.window < 1 or self.step < 1:
            raise ValueError("window and step must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.powerlaw_xmin < 1:
            raise ValueError("powerlaw_xmin must be >= 1")
        if self.distance_samples < 1:
            raise ValueError("distance_samples must be >= 1")
        if self.pubs_format not in ("xml", "tsv"):
            raise ValueError("pubs_format must be xml or tsv")
        if self.compare_measure not in ("jaccard", "overlap"):
            raise ValueError("compare_measure must be jaccard or overlap")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if "ingest" in stages:
            if not self.pubs:
                raise ValueError("ingest stage needs a pubs path")
            if not Path(self.pubs).exists():
                raise ValueError(f"pubs file not found: {self.pubs}")
            if self.seminars and not Path(self.seminars).exists():
                raise ValueError(f"seminars file not found: {self.seminars}")


def parse_config(text: str) -> RunConfig:
    """Parse the flat key-value format, rejecting unknown keys."""
    known = {f.name: f.type for f in fields(RunConfig)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


_BOOL_KEYS = {"refine"}
_FLOAT_KEYS = {"tol", "launcher_threshold"}
_STR_KEYS = {"pubs", "pubs_format", "seminars", "out", "stages", "compare_measure"}


def _coerce(key: str, value: str):
    if key in _STR_KEYS:
        return value
    if key in _BOOL_KEYS:
        if value not in ("true", "false"):
            raise ValueError(f"{key} must be true or false, got {value!r}")
        return value == "true"
    if key in _FLOAT_KEYS:
        return float(value)
    return int(value)
