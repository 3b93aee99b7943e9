"""Evaluation methodology: seen/unseen decomposition, hybrid systems,
learning curves, and paired significance tests.

Correctness is exact string match. Every test token is routed into the
seen or unseen bucket by its historical form's presence in the training
lexicon, and all aggregate accuracies are derived from integer counts, so
the identity  correct_all = correct_seen + correct_unseen  holds exactly.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np
from scipy.special import stdtr

from histnorm.baseline import BaselineNormalizer, Lexicon, build_lexicon
from histnorm.corpus import Dataset, subset_tokens
from histnorm.models import ModelConfig, ModelNormalizer
from histnorm.models import train as train_model


class Normalizer(Protocol):
    name: str

    def normalize(self, token: str) -> str: ...


class IdentityNormalizer:
    def __init__(self, name: str = "unnormalized"):
        self.name = name

    def normalize(self, token: str) -> str:
        return token


class FunctionNormalizer:
    def __init__(self, name: str, fn: Callable[[str], str]):
        self.name = name
        self._fn = fn

    def normalize(self, token: str) -> str:
        return self._fn(token)


@dataclass(frozen=True)
class EvalReport:
    system: str
    n_seen: int
    n_unseen: int
    correct_seen: int
    correct_unseen: int
    train_size: int | None = None

    @property
    def n_all(self) -> int:
        return self.n_seen + self.n_unseen

    @property
    def correct_all(self) -> int:
        return self.correct_seen + self.correct_unseen

    @property
    def acc_all(self) -> float:
        return self.correct_all / self.n_all

    @property
    def acc_seen(self) -> float | None:
        return self.correct_seen / self.n_seen if self.n_seen else None

    @property
    def acc_unseen(self) -> float | None:
        return self.correct_unseen / self.n_unseen if self.n_unseen else None

    @property
    def seen_fraction(self) -> float:
        return self.n_seen / self.n_all

    @property
    def pct_unseen(self) -> float:
        return self.n_unseen / self.n_all

    def to_json_dict(self) -> dict:
        return {
            "system": self.system,
            "size": self.train_size,
            "n_all": self.n_all,
            "n_seen": self.n_seen,
            "n_unseen": self.n_unseen,
            "acc_all": self.acc_all,
            "acc_seen": self.acc_seen,
            "acc_unseen": self.acc_unseen,
            "pct_unseen": self.pct_unseen,
        }


def evaluate(system: Normalizer, test: Dataset, lex: Lexicon, train_size: int | None = None) -> EvalReport:
    """Exact-match accuracy of a normalizer, split by token seen-ness."""
    if len(test) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    n_seen = n_unseen = correct_seen = correct_unseen = 0
    for pair in test.pairs:
        hit = system.normalize(pair.hist) == pair.modern
        if lex.is_seen(pair.hist):
            n_seen += 1
            correct_seen += hit
        else:
            n_unseen += 1
            correct_unseen += hit
    return EvalReport(
        system=system.name,
        n_seen=n_seen,
        n_unseen=n_unseen,
        correct_seen=correct_seen,
        correct_unseen=correct_unseen,
        train_size=train_size,
    )


class HybridNormalizer:
    """Seen tokens go to the baseline, unseen tokens to the model."""

    def __init__(self, base: BaselineNormalizer, model: Normalizer, name: str | None = None):
        self.base = base
        self.model = model
        self.name = name or f"hybrid-{model.name}"

    def normalize(self, token: str) -> str:
        if self.base.lexicon.is_seen(token):
            return self.base.normalize(token)
        return self.model.normalize(token)


def make_hybrid(base: BaselineNormalizer, model: Normalizer, name: str | None = None) -> HybridNormalizer:
    return HybridNormalizer(base, model, name)


def paired_ttest(scores_a: Sequence[float], scores_b: Sequence[float]) -> tuple[float, float]:
    """Two-tailed paired t-test; p from Student's t with n-1 dof.

    All-equal samples give (0, 1); zero variance of the differences with a
    nonzero mean degenerates to p=0 (warned)."""
    if len(scores_a) != len(scores_b):
        raise ValueError("paired t-test needs equal-length samples")
    n = len(scores_a)
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = np.asarray(scores_a, dtype=np.float64) - np.asarray(scores_b, dtype=np.float64)
    if np.all(d == 0.0):
        return 0.0, 1.0
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        warnings.warn("zero variance of paired differences with nonzero mean; reporting p=0")
        return math.copysign(math.inf, mean), 0.0
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(stdtr(n - 1, -abs(t)))
    return t, p


@dataclass(frozen=True)
class CurvePoint:
    size: int
    pct_unseen: float  # unseen-token proportion of the test set at this size
    reports: tuple[EvalReport, ...]


class CurveError(RuntimeError):
    pass


DEFAULT_CURVE_SIZES = (1000, 2000, 5000, 10000, 20000, 50000)

_KIND_INDEX = {"soft": 0, "hard": 1}


def derive_seed(seed: int, size: int, kind: str) -> int:
    """Deterministic per-(size, kind) sub-seed from the single master seed."""
    ss = np.random.SeedSequence(seed, spawn_key=(size, _KIND_INDEX[kind]))
    return int(ss.generate_state(1)[0])


def _curve_point(
    train: Dataset,
    test: Dataset,
    size: int,
    systems: Sequence[str],
    model_config: ModelConfig | None,
    include_hybrid: bool,
    seed: int,
) -> CurvePoint:
    sub = subset_tokens(train, size)
    lex = build_lexicon(sub)
    base = BaselineNormalizer(lex)
    normalizers: list[Normalizer] = []
    if "baseline" in systems:
        normalizers.append(base)
    for kind in ("soft", "hard"):
        if kind not in systems:
            continue
        if model_config is None:
            raise ValueError(f"system {kind!r} requested but no model config given")
        cfg = replace(model_config, kind=kind, seed=derive_seed(seed, size, kind))
        model, _ = train_model(cfg, sub)
        mn = ModelNormalizer(model)
        normalizers.append(mn)
        if include_hybrid:
            normalizers.append(make_hybrid(base, mn))
    reports = tuple(evaluate(s, test, lex, train_size=size) for s in normalizers)
    pct_unseen = sum(1 for p in test.pairs if not lex.is_seen(p.hist)) / len(test)
    return CurvePoint(size=size, pct_unseen=pct_unseen, reports=reports)


def _curve_point_worker(args) -> CurvePoint:
    return _curve_point(*args)


def learning_curve(
    train: Dataset,
    test: Dataset,
    sizes: Sequence[int],
    systems: Sequence[str] = ("baseline", "soft", "hard"),
    model_config: ModelConfig | None = None,
    include_hybrid: bool = False,
    seed: int = 0,
    jobs: int = 1,
) -> list[CurvePoint]:
    """For each training size: prefix-subset, rebuild the lexicon, retrain
    each requested system, evaluate on the fixed test set."""
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be ascending")
    for s in sizes:
        if not 1 <= s <= len(train):
            raise ValueError(f"size {s} out of range 1..{len(train)}")
    unknown = set(systems) - {"baseline", "soft", "hard"}
    if unknown:
        raise ValueError(f"unknown systems: {sorted(unknown)}")

    tasks = [(train, test, size, tuple(systems), model_config, include_hybrid, seed) for size in sizes]
    points: list[CurvePoint] = []
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            futures = [(task[2], pool.submit(_curve_point_worker, task)) for task in tasks]
            for size, future in futures:
                try:
                    points.append(future.result())
                except Exception as e:
                    raise CurveError(f"learning curve failed at training size {size}: {e}") from e
    else:
        for task in tasks:
            try:
                points.append(_curve_point(*task))
            except Exception as e:
                raise CurveError(f"learning curve failed at training size {task[2]}: {e}") from e
    return points


def format_report_table(reports: Iterable[EvalReport]) -> str:
    """Aligned plain-text table with the A / S / U accuracy layout."""

    def pct(x: float | None) -> str:
        return "n/a" if x is None else f"{100.0 * x:.2f}"

    rows = [("system", "n_all", "n_seen", "n_unseen", "A", "S", "U")]
    for r in reports:
        rows.append(
            (r.system, str(r.n_all), str(r.n_seen), str(r.n_unseen), pct(r.acc_all), pct(r.acc_seen), pct(r.acc_unseen))
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def report_json_line(report: EvalReport) -> str:
    return json.dumps(report.to_json_dict(), ensure_ascii=False)


def write_reports_jsonl(reports: Iterable[EvalReport], f) -> None:
    for r in reports:
        f.write(report_json_line(r) + "\n")


def write_curve_csv(points: Iterable[CurvePoint], f) -> None:
    w = csv.writer(f)
    w.writerow(["size", "pct_unseen", "system", "acc_all", "acc_seen", "acc_unseen"])
    for pt in points:
        for r in pt.reports:
            w.writerow(
                [
                    pt.size,
                    f"{pt.pct_unseen:.6f}",
                    r.system,
                    f"{r.acc_all:.6f}",
                    "" if r.acc_seen is None else f"{r.acc_seen:.6f}",
                    "" if r.acc_unseen is None else f"{r.acc_unseen:.6f}",
                ]
            )
