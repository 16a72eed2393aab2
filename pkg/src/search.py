"""Exhaustive enumeration of Chern tuples for every defect branch of a case.

For each branch the tuples (c_1, c_2, ..., c_m) inside the active bounds are
walked lexicographically with c_2 outermost. The terms s_j for j < m only
depend on c_1..c_j, so they are computed once per prefix; a prefix whose
term already breaks the pattern discards all of its completions at once.
The innermost coordinate resumes the recurrence from the shared prefix and
stops at the first violated constraint.
"""

import logging
import os
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

# Add parent directory to path to import config
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config.rules import PARALLEL_SETTINGS, SEARCH_SETTINGS, TOOL_VERSION

from casegen import (
    BoundVariant,
    BoundsVector,
    CaseSpec,
    ChernTuple,
    DefectBranch,
    chern_bounds,
    defect_branches,
    degree_of,
    log_concavity_ok,
)
from parallel_processor import ParallelRangeProcessor
from recurrence import PreconditionError, scan_pattern, segre_sequence, term_fits

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchOptions:
    bound_variant: BoundVariant = BoundVariant(SEARCH_SETTINGS['bound_variant'])
    huh_filter: bool = SEARCH_SETTINGS['huh_filter']
    worker_count: int = 1
    evidence: bool = SEARCH_SETTINGS['evidence']

    def __post_init__(self):
        object.__setattr__(self, 'bound_variant', BoundVariant.parse(self.bound_variant))
        if self.worker_count < 1:
            raise PreconditionError(f"worker_count must be at least 1, got {self.worker_count}")


@dataclass(frozen=True)
class Candidate:
    """A tuple whose sequence has the positive-defect pattern."""
    chern: ChernTuple
    n: int
    degree: int
    s_evidence: Tuple[int, ...] = ()
    delta_evidence: Tuple[int, ...] = ()  # delta_j = degree * s_{n-j}
    huh_rejected: Optional[bool] = None

    @property
    def c(self) -> Tuple[int, ...]:
        return self.chern.c

    @property
    def r(self) -> int:
        return self.chern.branch.r

    def sort_key(self):
        return (self.r,) + self.c[1:]


@dataclass
class BranchResult:
    branch: DefectBranch
    tuples_enumerated: int
    tuples_pruned_early: int
    candidates: List[Candidate] = field(default_factory=list)


class Resolution(Enum):
    SEARCHED = "searched"
    PROPAGATED = "propagated"
    DEDUCED = "deduced-theorem51"


@dataclass
class Certificate:
    case: CaseSpec
    branches: List[BranchResult]
    options: SearchOptions
    verdict: bool
    wall_time: float
    tool_version: str = TOOL_VERSION
    resolution: Resolution = Resolution.SEARCHED
    provenance: Dict[str, str] = field(default_factory=dict)

    @property
    def candidates(self) -> List[Candidate]:
        return [cand for branch in self.branches for cand in branch.candidates]

    @property
    def tuples_enumerated(self) -> int:
        return sum(branch.tuples_enumerated for branch in self.branches)


@dataclass(frozen=True)
class EnumerationRange:
    """Inclusive range of c_2 values; lo > hi means empty."""
    lo: int
    hi: int

    @property
    def is_empty(self) -> bool:
        return self.lo > self.hi


def partition_space(branch: DefectBranch, bounds: BoundsVector, k: int) -> List[EnumerationRange]:
    """Split the c_2 axis [0, c_1^2] into k contiguous, disjoint ranges."""
    if k < 1:
        raise PreconditionError(f"k must be at least 1, got {k}")
    if bounds.c1 != branch.c1:
        raise PreconditionError(f"bounds built for c1={bounds.c1}, branch has c1={branch.c1}")

    values = bounds.static(2) + 1
    size, extra = divmod(values, k)
    ranges = []
    lo = 0
    for idx in range(k):
        width = size + (1 if idx < extra else 0)
        ranges.append(EnumerationRange(lo=lo, hi=lo + width - 1))
        lo += width
    return ranges


def _search_range(m: int, c1: int, n: int, r: int, bounds: BoundsVector, lo: int, hi: int):
    """Walk every tuple with c_2 in [lo, hi].

    Returns (tuples_enumerated, tuples_pruned_early, accepted tuples).
    """
    enumerated = 0
    pruned = 0
    accepted = []
    signs = [1 if q % 2 == 1 else -1 for q in range(1, m + 1)]

    hi = min(hi, bounds.static(2))
    if lo > hi:
        return 0, 0, accepted

    # s_1 = c_1 is shared by the whole range
    if not term_fits(1, c1, n, r):
        total = bounds.count_tuples(lo, hi)
        return total, (total if 1 < n else 0), accepted

    c = [c1]
    terms = [1, c1]

    def walk(j):
        nonlocal enumerated, pruned
        if j == 2:
            start, stop = lo, hi
        else:
            start, stop = 0, bounds.limit(j, c[-1])

        partial = 0
        for q in range(1, j):
            partial += signs[q - 1] * c[q - 1] * terms[j - q]
        sign = signs[j - 1]
        checked = j <= n

        if j < m:
            for x in range(start, stop + 1):
                s = partial + sign * x
                if checked and not term_fits(j, s, n, r):
                    weight = bounds.completions(j, x)
                    enumerated += weight
                    if j < n:
                        pruned += weight
                    continue
                c.append(x)
                terms.append(s)
                walk(j + 1)
                c.pop()
                terms.pop()
            return

        signed_prefix = tuple(signs[q - 1] * c[q - 1] for q in range(1, m))
        window_tail = terms[m - 1:0:-1]  # s_{m-1}, ..., s_1
        for x in range(start, stop + 1):
            enumerated += 1
            s = partial + sign * x
            if checked and not term_fits(j, s, n, r):
                if j < n:
                    pruned += 1
                continue
            index = scan_pattern(signed_prefix + (sign * x,), [s] + window_tail, m + 1, n, r)
            if index < 0:
                accepted.append(tuple(c) + (x,))
            elif index < n:
                pruned += 1

    walk(2)
    return enumerated, pruned, accepted


def _make_candidate(c: Tuple[int, ...], branch: DefectBranch, n: int, case: Optional[CaseSpec],
                    options: SearchOptions) -> Candidate:
    chern = ChernTuple(c=c, branch=branch, case=case)
    degree = degree_of(c)
    s_evidence = ()
    delta_evidence = ()
    if options.evidence:
        s_evidence = segre_sequence(c, n).terms
        delta_evidence = tuple(degree * s_evidence[n - j] for j in range(n + 1))
    huh_rejected = (not log_concavity_ok(c)) if options.huh_filter else None
    return Candidate(
        chern=chern,
        n=n,
        degree=degree,
        s_evidence=s_evidence,
        delta_evidence=delta_evidence,
        huh_rejected=huh_rejected,
    )


def _summarize(results) -> str:
    enumerated = sum(res[0] for res in results)
    pruned = sum(res[1] for res in results)
    found = sum(len(res[2]) for res in results)
    return f"enumerated {enumerated}, pruned early {pruned}, candidates {found}"


def _run_branch(m: int, n: int, branch: DefectBranch, options: SearchOptions,
                processor: ParallelRangeProcessor, case: Optional[CaseSpec] = None,
                label: str = 'search') -> BranchResult:
    bounds = chern_bounds(branch.c1, m, options.bound_variant)
    k = 1
    if options.worker_count > 1:
        k = options.worker_count * PARALLEL_SETTINGS['ranges_per_worker']
    tasks = [
        (m, branch.c1, n, branch.r, bounds, rng.lo, rng.hi)
        for rng in partition_space(branch, bounds, k)
        if not rng.is_empty
    ]
    results = processor.process_all(
        _search_range, tasks,
        label=f"{label} r={branch.r} c1={branch.c1}",
        summarize=_summarize,
    )

    enumerated = sum(res[0] for res in results)
    pruned = sum(res[1] for res in results)
    candidates = [
        _make_candidate(c, branch, n, case, options)
        for res in results
        for c in res[2]
    ]
    candidates.sort(key=Candidate.sort_key)
    return BranchResult(
        branch=branch,
        tuples_enumerated=enumerated,
        tuples_pruned_early=pruned,
        candidates=candidates,
    )


def search_raw(m: int, c1: int, n: int, r: int, options: Optional[SearchOptions] = None) -> List[Candidate]:
    """All tuples (c1, c_2, ..., c_m) within bounds whose sequence fits the (n, r) pattern."""
    if m < 2:
        raise PreconditionError(f"search needs m >= 2, got m={m}")
    if c1 < 1:
        raise PreconditionError(f"c1 must be positive, got {c1}")
    if r < 1 or r > n:
        raise PreconditionError(f"pattern needs 1 <= r <= n, got n={n}, r={r}")
    options = options or SearchOptions()

    processor = ParallelRangeProcessor(options.worker_count, PARALLEL_SETTINGS['heartbeat_seconds'])
    result = _run_branch(m, n, DefectBranch(r=r, c1=c1), options, processor, label=f"raw m={m} n={n}")
    return result.candidates


def run_case(case: CaseSpec, options: Optional[SearchOptions] = None) -> Certificate:
    """Search every defect branch of an admissible case.

    Raises:
        SearchAborted: If the search could not finish; no certificate is produced
    """
    options = options or SearchOptions()
    processor = ParallelRangeProcessor(options.worker_count, PARALLEL_SETTINGS['heartbeat_seconds'])
    start_time = time.perf_counter()

    branches = []
    for branch in defect_branches(case):
        logger.debug("N=%d m=%d: searching r=%d with c1=%d", case.N, case.m, branch.r, branch.c1)
        branches.append(
            _run_branch(case.m, case.n, branch, options, processor, case=case, label=f"N={case.N} m={case.m}")
        )

    verdict = all(not branch.candidates for branch in branches)
    return Certificate(
        case=case,
        branches=branches,
        options=options,
        verdict=verdict,
        wall_time=time.perf_counter() - start_time,
    )
