"""Word-similarity benchmark loading, scoring, and rank correlation.

Six benchmark layouts are supported (rg65, mc28, wordsim353, men,
simlex999, scws); each kind declares its gold scale so scores can be
normalized onto [-1, 1]. Model scores are compared against gold by
Spearman correlation: ranks use average-rank tie handling, rho is the
Pearson correlation of the ranks, and the p-value comes from the
t-distribution approximation with n-2 degrees of freedom.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats as _scipy_stats

from .metrics import CONTEXT_METRICS, METRICS, build_sense_index, context_vector
from .preprocess import clean_tokenize
from .vectors import VectorModel


class BenchmarkParseError(Exception):
    """A benchmark file row does not match the kind's published layout."""


@dataclass(frozen=True, slots=True)
class BenchmarkPair:
    w1: str
    w2: str
    gold: float
    ctx1: str | None = None
    ctx2: str | None = None


@dataclass(frozen=True, slots=True)
class EvalReport:
    benchmark: str
    metric: str
    rho: float
    p_value: float
    pairs_scored: int
    pairs_skipped: int

    def as_dict(self) -> dict:
        return {
            "benchmark": self.benchmark,
            "metric": self.metric,
            "rho": self.rho,
            "p_value": self.p_value,
            "pairs_scored": self.pairs_scored,
            "pairs_skipped": self.pairs_skipped,
        }


# Gold-score scale maximum per benchmark kind (all scales start at 0).
BENCHMARK_SCALES = {
    "rg65": 4.0,
    "mc28": 4.0,
    "wordsim353": 10.0,
    "men": 50.0,
    "simlex999": 10.0,
    "scws": 10.0,
}


def _fields(line: str) -> list[str]:
    line = line.rstrip("\n")
    if "\t" in line:
        return [f.strip() for f in line.split("\t")]
    if "," in line and " " not in line.strip():
        return [f.strip() for f in line.split(",")]
    return line.split()


def _rows(path: str):
    with open(path, encoding="utf-8") as handle:
        for rowno, line in enumerate(handle, start=1):
            if line.strip():
                yield rowno, _fields(line)


def _parse_three_column(path: str, header_ok: bool) -> list[BenchmarkPair]:
    pairs = []
    for rowno, fields in _rows(path):
        if len(fields) < 3:
            raise BenchmarkParseError(f"{path}:{rowno}: expected 3 columns")
        try:
            gold = float(fields[2])
        except ValueError:
            if header_ok and rowno == 1:
                continue
            raise BenchmarkParseError(f"{path}:{rowno}: bad score {fields[2]!r}")
        pairs.append(BenchmarkPair(w1=fields[0], w2=fields[1], gold=gold))
    return pairs


def _parse_simlex(path: str) -> list[BenchmarkPair]:
    pairs = []
    for rowno, fields in _rows(path):
        if len(fields) < 4:
            raise BenchmarkParseError(f"{path}:{rowno}: expected >=4 columns")
        try:
            gold = float(fields[3])
        except ValueError:
            if rowno == 1:  # header row
                continue
            raise BenchmarkParseError(f"{path}:{rowno}: bad score {fields[3]!r}")
        pairs.append(BenchmarkPair(w1=fields[0], w2=fields[1], gold=gold))
    return pairs


def _parse_scws(path: str) -> list[BenchmarkPair]:
    pairs = []
    for rowno, fields in _rows(path):
        if len(fields) < 8:
            raise BenchmarkParseError(f"{path}:{rowno}: expected >=8 columns")
        try:
            gold = float(fields[7])
        except ValueError:
            raise BenchmarkParseError(f"{path}:{rowno}: bad score {fields[7]!r}")
        pairs.append(
            BenchmarkPair(
                w1=fields[1],
                w2=fields[3],
                gold=gold,
                ctx1=fields[5],
                ctx2=fields[6],
            )
        )
    return pairs


def load_benchmark(path: str | os.PathLike, kind: str) -> list[BenchmarkPair]:
    """Parse a benchmark file in its published layout; kind picks the parser."""
    path = os.fspath(path)
    if kind in ("rg65", "mc28", "men"):
        return _parse_three_column(path, header_ok=False)
    if kind == "wordsim353":
        return _parse_three_column(path, header_ok=True)
    if kind == "simlex999":
        return _parse_simlex(path)
    if kind == "scws":
        return _parse_scws(path)
    raise ValueError(f"unknown benchmark kind: {kind!r}")


def normalize_gold(pairs: list[BenchmarkPair], scale_max: float) -> list[BenchmarkPair]:
    """Map gold scores linearly from [0, scale_max] onto [-1, 1]."""
    return [replace(p, gold=2.0 * p.gold / scale_max - 1.0) for p in pairs]


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> tuple[float, float]:
    """Rank correlation with average-rank ties; p from the t approximation."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two equal-length series")
    n = len(x)
    if n < 3:
        raise ValueError("spearman needs at least 3 points")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = float(np.sqrt(np.dot(dx, dx)))
    sy = float(np.sqrt(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("constant series: rho undefined")
    rho = float(np.dot(dx, dy) / (sx * sy))
    if abs(rho) >= 1.0 - 1e-15:
        return rho, 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), n - 2))
    return rho, p


def evaluate(
    model: VectorModel,
    pairs: list[BenchmarkPair],
    metric: str,
    benchmark: str = "",
) -> EvalReport:
    """Score every pair under one metric and rank-correlate with gold.

    Pairs are skipped (and counted) when either word has no senses in the
    model or the metric comes out undefined; context metrics additionally
    require both context sentences.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    needs_context = metric in CONTEXT_METRICS
    if needs_context and any(p.ctx1 is None or p.ctx2 is None for p in pairs):
        raise ValueError(f"metric {metric} needs context sentences on every pair")
    index = build_sense_index(model)
    metric_fn = METRICS[metric]
    scores: list[float] = []
    golds: list[float] = []
    skipped = 0
    for pair in pairs:
        su = index.get(pair.w1.lower())
        sw = index.get(pair.w2.lower())
        value = None
        if su is not None and sw is not None:
            if needs_context:
                cu = context_vector(clean_tokenize(pair.ctx1), model, index=index)
                cw = context_vector(clean_tokenize(pair.ctx2), model, index=index)
                if cu is not None and cw is not None:
                    value = metric_fn(su, sw, cu, cw)
            else:
                value = metric_fn(su, sw)
        if value is None:
            skipped += 1
            continue
        scores.append(value)
        golds.append(pair.gold)
    rho, p = spearman(scores, golds)
    return EvalReport(
        benchmark=benchmark,
        metric=metric,
        rho=rho,
        p_value=p,
        pairs_scored=len(scores),
        pairs_skipped=skipped,
    )


REPORT_FOOTER = (
    "Spearman: average-rank ties; p-value from the t approximation "
    "with n-2 degrees of freedom."
)


def render_reports(reports: list[EvalReport]) -> str:
    """Human-readable result table with a method footer."""
    lines = [
        f"{'benchmark':<14}{'metric':<12}{'rho':>10}{'p':>12}{'scored':>9}{'skipped':>9}"
    ]
    for r in reports:
        lines.append(
            f"{r.benchmark:<14}{r.metric:<12}{r.rho:>10.4f}{r.p_value:>12.3g}"
            f"{r.pairs_scored:>9}{r.pairs_skipped:>9}"
        )
    lines.append(REPORT_FOOTER)
    return "\n".join(lines)
