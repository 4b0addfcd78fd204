"""Cross-model, cross-indicator analysis.

Given a set of (name, quality, indicator values) records, this module
finds where the indicators disagree: Pareto frontiers per indicator,
tie-corrected Kendall rank correlation between indicator orderings with
an explicit list of every inverted pair, relative-tolerance matched
groups, and a combined report of models that look efficient under one
indicator and dominated under another.

All indicator values are treated as lower-is-better; throughput is
declared higher-is-better at ingestion and negated internally so the rule
holds uniformly. Everything is deterministic and pure over the input
record list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Canonical indicator ids. CSV files may carry extra columns (treated as
#: lower-is-better indicators); these are the ids with defined semantics.
INDICATOR_IDS = (
    "params", "flops", "latency", "throughput", "activation", "mac",
    "memory", "carbon", "cost",
)

#: Indicators where larger raw values are better; negated internally.
HIGHER_BETTER = frozenset({"throughput"})


class AnalysisError(Exception):
    """Base class for analysis-level failures (not input parse errors)."""


class InsufficientDataError(AnalysisError):
    """Fewer comparable records than the operation needs."""


class CoverageError(AnalysisError):
    """Records are missing a required column/indicator."""

    def __init__(self, message: str, offenders: tuple[str, ...] = ()):
        super().__init__(message)
        self.offenders = offenders


@dataclass(frozen=True)
class ModelRecord:
    """One model's quality score and cost-indicator values.

    ``quality`` is higher-is-better and may be None for records built from
    pure cost profiles; frontier analyses then refuse to run. Indicator
    values are raw as ingested (throughput stays positive here).
    """

    name: str
    indicators: dict[str, float]
    quality: float | None = None
    family: str | None = None

    def __post_init__(self):
        if self.quality is not None and not math.isfinite(self.quality):
            raise ValueError(f"record {self.name!r}: quality must be finite")
        if not self.indicators:
            raise ValueError(f"record {self.name!r}: at least one indicator required")
        for key, value in self.indicators.items():
            if not math.isfinite(value):
                raise ValueError(
                    f"record {self.name!r}: indicator {key!r} must be finite"
                )

    def cost_value(self, indicator: str) -> float:
        """Lower-is-better view of one indicator."""
        v = self.indicators[indicator]
        return -v if indicator in HIGHER_BETTER else v


def indicators_present(records) -> list[str]:
    """Indicator ids present on at least one record, canonical ids first."""
    seen = set()
    for r in records:
        seen.update(r.indicators)
    ordered = [k for k in INDICATOR_IDS if k in seen]
    ordered.extend(sorted(seen.difference(INDICATOR_IDS)))
    return ordered


# ---------------------------------------------------------------------------
# Pareto frontier


def pareto_frontier(records, quality_key: str = "quality", cost_key: str = "params"):
    """Records not strictly dominated in the (quality, cost) plane.

    A record is dominated when another has quality >= and cost <= with at
    least one strict; exact ties in both coordinates are all kept. Output
    is ordered by cost ascending (input order breaks ties).
    """
    records = list(records)
    missing = [r.name for r in records if cost_key not in r.indicators]
    if missing:
        raise CoverageError(
            f"records missing cost indicator {cost_key!r}: {', '.join(missing)}",
            offenders=tuple(missing),
        )
    if quality_key != "quality":
        raise ValueError(f"unsupported quality key {quality_key!r}")
    no_quality = [r.name for r in records if r.quality is None]
    if no_quality:
        raise CoverageError(
            f"records missing quality: {', '.join(no_quality)}",
            offenders=tuple(no_quality),
        )

    by_cost = sorted(enumerate(records), key=lambda ir: ir[1].cost_value(cost_key))
    frontier = []
    best_prev = -math.inf      # best quality among strictly cheaper records
    i = 0
    while i < len(by_cost):
        j = i
        cost = by_cost[i][1].cost_value(cost_key)
        while j < len(by_cost) and by_cost[j][1].cost_value(cost_key) == cost:
            j += 1
        group = by_cost[i:j]
        group_best = max(r.quality for _, r in group)
        if group_best > best_prev:
            frontier.extend(
                (orig, r) for orig, r in group if r.quality == group_best
            )
        best_prev = max(best_prev, group_best)
        i = j
    frontier.sort(key=lambda ir: (ir[1].cost_value(cost_key), ir[0]))
    return [r for _, r in frontier]


# ---------------------------------------------------------------------------
# Rank disagreement (Kendall tau-b with explicit inversions)


@dataclass(frozen=True)
class InvertedPair:
    """Two models whose ordering flips between two indicators; ``model_a``
    is the one that looks cheaper under ``indicator_a``."""

    model_a: str
    model_b: str
    indicator_a: str
    indicator_b: str


@dataclass(frozen=True)
class RankDisagreement:
    kendall_tau: float
    inverted_pairs: tuple[InvertedPair, ...]
    n_records: int
    n_concordant: int
    n_discordant: int


def rank_disagreement(records, indicator_a: str, indicator_b: str) -> RankDisagreement:
    """Tie-corrected Kendall tau (tau-b) between two cost orderings.

    ``inverted_pairs`` lists every discordant pair. When every pair is
    tied in at least one indicator the correlation is undefined; it is
    reported as 1.0 when there are no discordant pairs (the orderings
    never actually disagree) and 0.0 otherwise.
    """
    both = [r for r in records
            if indicator_a in r.indicators and indicator_b in r.indicators]
    if len(both) < 2:
        raise InsufficientDataError(
            f"need >= 2 records carrying both {indicator_a!r} and {indicator_b!r}, "
            f"got {len(both)}"
        )
    a = [r.cost_value(indicator_a) for r in both]
    b = [r.cost_value(indicator_b) for r in both]
    concordant = discordant = ties_a = ties_b = 0
    inversions = []
    n = len(both)
    for i in range(n):
        for j in range(i + 1, n):
            da = a[i] - a[j]
            db = b[i] - b[j]
            if da == 0:
                ties_a += 1
            if db == 0:
                ties_b += 1
            if da == 0 or db == 0:
                continue
            if (da > 0) == (db > 0):
                concordant += 1
            else:
                discordant += 1
                lo, hi = (i, j) if da < 0 else (j, i)
                inversions.append(InvertedPair(
                    both[lo].name, both[hi].name, indicator_a, indicator_b,
                ))
    n0 = n * (n - 1) // 2
    denom = math.sqrt((n0 - ties_a) * (n0 - ties_b))
    if denom == 0:
        tau = 1.0 if discordant == 0 else 0.0
    else:
        tau = (concordant - discordant) / denom
    return RankDisagreement(
        kendall_tau=tau,
        inverted_pairs=tuple(inversions),
        n_records=n,
        n_concordant=concordant,
        n_discordant=discordant,
    )


# ---------------------------------------------------------------------------
# Matched comparison sets


def matched_sets(records, indicator: str, rel_tolerance: float):
    """Maximal groups whose ``indicator`` values all sit within
    ``rel_tolerance`` of the group minimum; only groups of >= 2 records.

    This is the set construction behind "parameter-matched" and
    "compute-matched" comparisons: each group is a fair-comparison pool
    under the chosen indicator.
    """
    if not 0.0 < rel_tolerance < 1.0:
        raise ValueError(f"rel_tolerance must be in (0, 1), got {rel_tolerance}")
    carrying = [r for r in records if indicator in r.indicators]
    carrying.sort(key=lambda r: r.indicators[indicator])
    values = [r.indicators[indicator] for r in carrying]
    groups = []
    prev_end = -1
    for i, vmin in enumerate(values):
        if vmin <= 0:
            limit = vmin  # relative tolerance is meaningless at/below zero
        else:
            limit = vmin * (1.0 + rel_tolerance)
        j = i
        while j + 1 < len(values) and values[j + 1] <= limit:
            j += 1
        if j > i and j > prev_end:
            groups.append(carrying[i:j + 1])
            prev_end = j
    return groups


# ---------------------------------------------------------------------------
# Misnomer report


@dataclass(frozen=True)
class ParetoInstability:
    """A model on the frontier under some indicators and strictly
    dominated under others."""

    name: str
    frontier_under: tuple[str, ...]
    dominated_under: tuple[str, ...]


@dataclass(frozen=True)
class CoverageWarning:
    name: str
    indicator: str


@dataclass(frozen=True)
class MisnomerReport:
    """Where cost indicators disagree across a model set.

    Rank correlations use tie-corrected Kendall tau (tau-b). Frontier
    analyses run only when every record carries a quality score;
    otherwise the report covers rank disagreement alone.
    """

    indicator_pairs_examined: tuple[tuple[str, str], ...]
    kendall_tau: dict[tuple[str, str], float]
    inverted_pairs: tuple[InvertedPair, ...]
    pareto_instability: tuple[ParetoInstability, ...]
    coverage_warnings: tuple[CoverageWarning, ...]
    frontier_analysis_ran: bool = True


def misnomer_report(records) -> MisnomerReport:
    """Run every pairwise rank comparison and per-indicator frontier."""
    records = list(records)
    if len(records) < 2:
        raise InsufficientDataError(f"need >= 2 records, got {len(records)}")
    present = indicators_present(records)

    coverage = [
        CoverageWarning(r.name, ind)
        for r in records for ind in present if ind not in r.indicators
    ]

    pairs = []
    taus = {}
    inversions = []
    for i, ind_a in enumerate(present):
        for ind_b in present[i + 1:]:
            both = [r for r in records
                    if ind_a in r.indicators and ind_b in r.indicators]
            if len(both) < 2:
                continue
            result = rank_disagreement(records, ind_a, ind_b)
            pairs.append((ind_a, ind_b))
            taus[(ind_a, ind_b)] = result.kendall_tau
            inversions.extend(result.inverted_pairs)

    have_quality = all(r.quality is not None for r in records)
    instability = []
    if have_quality:
        frontier_under = {r.name: [] for r in records}
        dominated_under = {r.name: [] for r in records}
        for ind in present:
            carrying = [r for r in records if ind in r.indicators]
            if not carrying:
                continue
            on = {r.name for r in pareto_frontier(carrying, "quality", ind)}
            for r in carrying:
                (frontier_under if r.name in on else dominated_under)[r.name].append(ind)
        for r in records:
            if frontier_under[r.name] and dominated_under[r.name]:
                instability.append(ParetoInstability(
                    r.name,
                    tuple(frontier_under[r.name]),
                    tuple(dominated_under[r.name]),
                ))

    return MisnomerReport(
        indicator_pairs_examined=tuple(pairs),
        kendall_tau=taus,
        inverted_pairs=tuple(inversions),
        pareto_instability=tuple(instability),
        coverage_warnings=tuple(coverage),
        frontier_analysis_ran=have_quality,
    )
