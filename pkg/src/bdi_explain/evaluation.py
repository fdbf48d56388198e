"""Computational evaluation: full vs contrastive explanation sizes over a corpus."""

from __future__ import annotations

import csv
import json
import statistics
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from scipy.stats import spearmanr

from . import __version__
from .explain import explain_contrastive, explain_full
from .rng import Xoshiro256, derive_seed
from .trace import generate_trace
from .tree import GoalPlanTree
from .treegen import TRACE_STREAM, GenParams, gen_corpus_tree

RECORD_HEADER = ["tree_index", "fact", "foil", "full_size", "contrastive_size"]
SUMMARY_HEADER = ["f_bin", "median_f", "median_c", "median_saving", "count"]


@dataclass(frozen=True, order=True)
class EvalRecord:
    tree_index: int
    fact: str
    foil: str
    full_size: int
    contrastive_size: int

    @property
    def saving(self) -> int:
        return self.full_size - self.contrastive_size


@dataclass(frozen=True)
class BinStats:
    f: int
    median_f: float
    median_c: float
    median_saving: float
    count: int


@dataclass
class EvalSummary:
    bins: list[BinStats]
    # name -> [min, q1, median, q3, max]
    quantiles: dict[str, list[float]] = field(default_factory=dict)
    n_records: int = 0

    def bin(self, f: int) -> BinStats:
        for b in self.bins:
            if b.f == f:
                return b
        raise KeyError(f)

    def to_dict(self) -> dict:
        return {"n_records": self.n_records, "bins": [asdict(b) for b in self.bins], "quantiles": self.quantiles}


def evaluate_tree(tree: GoalPlanTree, tree_index: int, seed: int, p_true: float = 0.5,
                  off_path: str = "random") -> list[EvalRecord]:
    """One trace per action, then one record per valid foil of that action."""
    records = []
    for k, n in enumerate(tree.action_ids):
        foils = tree.valid_foils(n)
        if not foils:
            continue
        rng = Xoshiro256(derive_seed(seed, TRACE_STREAM, tree_index, k))
        trace, marking = generate_trace(tree, n, rng, p_true, off_path)
        full = len(explain_full(tree, trace, marking, n))
        for f in sorted(foils):
            c = len(explain_contrastive(tree, trace, marking, n, f))
            records.append(EvalRecord(tree_index, n, f, full, c))
    return records


def run_eval(params: GenParams, n_trees: int, trees: Sequence[GoalPlanTree] | None = None,
             off_path: str = "random") -> list[EvalRecord]:
    """Generate ``n_trees`` corpus trees (or use ``trees`` as given) and
    record full/contrastive sizes for every (fact, valid foil) pair."""
    records: list[EvalRecord] = []
    if trees is None:
        trees_iter: Iterable[tuple[int, GoalPlanTree]] = ((k, gen_corpus_tree(params, k)) for k in range(n_trees))
    else:
        trees_iter = enumerate(trees)
    for k, tree in trees_iter:
        records.extend(evaluate_tree(tree, k, params.seed, off_path=off_path))
    records.sort(key=lambda r: (r.tree_index, r.fact, r.foil))
    return records


def _five_numbers(values: list[float]) -> list[float]:
    if len(values) == 1:
        return [values[0]] * 5
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return [min(values), q1, q2, q3, max(values)]


def summarize(records: Sequence[EvalRecord]) -> EvalSummary:
    if not records:
        raise ValueError("cannot summarize an empty record list")
    by_f: dict[int, list[EvalRecord]] = defaultdict(list)
    for r in records:
        by_f[r.full_size].append(r)
    bins = []
    for f in sorted(by_f):
        rs = by_f[f]
        bins.append(BinStats(
            f,
            statistics.median(r.full_size for r in rs),
            statistics.median(r.contrastive_size for r in rs),
            statistics.median(r.saving for r in rs),
            len(rs),
        ))
    quantiles = {
        "F": _five_numbers([r.full_size for r in records]),
        "C": _five_numbers([r.contrastive_size for r in records]),
        "F-C": _five_numbers([r.saving for r in records]),
    }
    ratios = [r.contrastive_size / r.full_size for r in records if r.full_size > 0]
    if ratios:
        quantiles["C/F"] = _five_numbers(ratios)
    return EvalSummary(bins, quantiles, len(records))


@dataclass(frozen=True)
class Trend:
    """Median-C stability and saving growth over bins with F >= start."""

    start: int
    reference_c: float
    max_c_deviation: float
    saving_rank_corr: float


def saving_trend(summary: EvalSummary, start: int = 10) -> Trend:
    bins = [b for b in summary.bins if b.f >= start]
    if len(bins) < 2:
        raise ValueError(f"need at least two bins with F >= {start}")
    ref = summary.bin(start).median_c
    dev = max(abs(b.median_c - ref) for b in bins)
    rho = spearmanr([b.f for b in bins], [b.median_saving for b in bins]).correlation
    return Trend(start, ref, dev, float(rho))


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def write_csv(records: Sequence[EvalRecord], summary: EvalSummary | None, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>records.csv`` and ``<prefix>summary.csv``."""
    prefix = str(prefix)
    rec_path = Path(prefix + "records.csv")
    sum_path = Path(prefix + "summary.csv")
    rec_path.parent.mkdir(parents=True, exist_ok=True)
    with open(rec_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in sorted(records, key=lambda r: (r.tree_index, r.fact, r.foil)):
            w.writerow([r.tree_index, r.fact, r.foil, r.full_size, r.contrastive_size])
    with open(sum_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for b in summary.bins if summary else []:
            w.writerow([b.f, _fmt(b.median_f), _fmt(b.median_c), _fmt(b.median_saving), b.count])
    return rec_path, sum_path


def write_manifest(prefix: str | Path, params: GenParams, n_trees: int, n_records: int, **extra) -> Path:
    path = Path(str(prefix) + "manifest.json")
    doc = {"tool": "bdi-explain", "version": __version__, "params": params.to_dict(),
           "seed": params.seed, "n_trees": n_trees, "n_records": n_records, **extra}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def bin_table(summary: EvalSummary) -> str:
    """Plain-text table of the per-F medians."""
    lines = [f"{'F':>4} {'med F':>7} {'med C':>7} {'med F-C':>8} {'count':>7}"]
    for b in summary.bins:
        lines.append(f"{b.f:>4} {_fmt(b.median_f):>7} {_fmt(b.median_c):>7} {_fmt(b.median_saving):>8} {b.count:>7}")
    return "\n".join(lines)
