"""The order-three u-sequence and the double-zero classification.

For positive c_1, c_2, c_3 the sequence

    u_0 = 0, u_1 = 0, u_2 = 1,  u_j = c_1 u_{j-1} - c_2 u_{j-2} + c_3 u_{j-3}

satisfies u_{j+2} = s_j. If it stays positive on 2..m-1 and then vanishes at
m and m+1, the sequence repeats up to the factor d = c_3 u_{m-1} every m
steps, the characteristic polynomial t^3 - c_1 t^2 + c_2 t - c_3 divides
t^m - d, d has an integer m-th root and m is 4 or 6. Every one of these
consequences is checked here with exact integer arithmetic.
"""

import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import gmpy2
from sympy import ZZ, Poly
from sympy.abc import t

# Add parent directory to path to import config
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config.rules import CLASSIFY_SETTINGS, PARALLEL_SETTINGS

from casegen import admissible_case
from parallel_processor import ParallelRangeProcessor
from recurrence import PreconditionError

logger = logging.getLogger(__name__)

# Finite orders of elements of GL(3, Q) that a double zero can realise
LEMMA_PATTERN_INDICES = (4, 6)


class LemmaAnomaly(RuntimeError):
    """A double-zero sequence failed a check the classification proves must hold."""


@dataclass(frozen=True)
class USequence:
    c1: int
    c2: int
    c3: int
    terms: Tuple[int, ...]


@dataclass(frozen=True)
class LemmaReport:
    c1: int
    c2: int
    c3: int
    m: int
    d: int
    root: Optional[int]
    divides: bool
    classified: bool
    anomaly: Optional[str] = None


@dataclass
class ClassificationResult:
    """Double-zero indices found over a coefficient grid."""
    patterns: Dict[Tuple[int, int, int], int] = field(default_factory=dict)
    reports: Dict[Tuple[int, int, int], LemmaReport] = field(default_factory=dict)

    @property
    def anomalies(self) -> List[LemmaReport]:
        return [report for report in self.reports.values() if report.anomaly]

    def histogram(self) -> Counter:
        return Counter(self.patterns.values())


@dataclass(frozen=True)
class DeductionRecord:
    """Why codimension 3 needs no search when N is odd."""
    N: int
    n: int
    forced_defect: int
    pattern_index: int
    excluded_indices: Tuple[int, ...]
    steps: Tuple[str, ...]
    verdict: bool = True


def _validate_coefficients(c1: int, c2: int, c3: int):
    for name, value in (('c1', c1), ('c2', c2), ('c3', c3)):
        if value < 1:
            raise PreconditionError(f"{name} must be positive, got {value}")


def _u_terms(c1: int, c2: int, c3: int) -> Iterator[int]:
    u3, u2, u1 = 0, 0, 1  # u_{j-3}, u_{j-2}, u_{j-1} for j = 3
    yield 0
    yield 0
    yield 1
    while True:
        u = c1 * u1 - c2 * u2 + c3 * u3
        yield u
        u3, u2, u1 = u2, u1, u


def u_sequence(c1: int, c2: int, c3: int, L: int) -> USequence:
    """Return u_0..u_L."""
    _validate_coefficients(c1, c2, c3)
    if L < 2:
        raise PreconditionError(f"L must be at least 2, got {L}")
    terms = []
    for u in _u_terms(c1, c2, c3):
        terms.append(u)
        if len(terms) > L:
            break
    return USequence(c1=c1, c2=c2, c3=c3, terms=tuple(terms))


def char_poly(c1: int, c2: int, c3: int) -> Poly:
    """rho = t^3 - c1 t^2 + c2 t - c3."""
    return Poly([1, -c1, c2, -c3], t, domain=ZZ)


def find_double_zero(c1: int, c2: int, c3: int, horizon: int) -> Optional[int]:
    """Smallest m > 2 with u_2..u_{m-1} > 0 and u_m = u_{m+1} = 0, if m + 1 <= horizon."""
    _validate_coefficients(c1, c2, c3)
    if horizon <= 3:
        raise PreconditionError(f"horizon must exceed 3, got {horizon}")

    terms = _u_terms(c1, c2, c3)
    for _ in range(3):
        next(terms)
    current = next(terms)  # u_3
    for j in range(3, horizon):
        following = next(terms)
        if current > 0:
            current = following
            continue
        if current == 0 and following == 0:
            return j
        return None
    return None


def integer_nth_root(d: int, m: int) -> Optional[int]:
    """k with k^m = d exactly, or None."""
    if d < 1 or m < 1:
        raise PreconditionError(f"integer_nth_root needs d >= 1 and m >= 1, got d={d}, m={m}")
    root, exact = gmpy2.iroot(d, m)
    return int(root) if exact else None


def as_poly(p) -> Poly:
    """An integer polynomial in t from a Poly, an expression or coefficients highest degree first."""
    if isinstance(p, Poly):
        return p
    return Poly(p, t, domain=ZZ)


def poly_divide(dividend, divisor) -> Tuple[Poly, Poly]:
    """Long division by a monic integer polynomial: dividend = divisor * q + rem."""
    dividend = as_poly(dividend)
    divisor = as_poly(divisor)
    if divisor.is_zero or divisor.degree() < 1:
        raise PreconditionError(f"divisor must have degree >= 1, got {divisor.as_expr()}")
    if divisor.LC() != 1:
        raise PreconditionError(f"divisor must be monic, got leading coefficient {divisor.LC()}")
    return dividend.div(divisor)


def verify_lemma_structure(c1: int, c2: int, c3: int, m: int, strict: bool = False) -> LemmaReport:
    """Check every consequence of a double zero at index m.

    Raises:
        PreconditionError: If m is not the double-zero index of (c1, c2, c3)
        LemmaAnomaly: In strict mode, if any consequence fails
    """
    found = find_double_zero(c1, c2, c3, max(m + 1, 4))
    if found != m:
        raise PreconditionError(f"({c1}, {c2}, {c3}) has double-zero index {found}, not {m}")

    terms = u_sequence(c1, c2, c3, m).terms
    d = c3 * terms[m - 1]
    problems = []

    root = None
    if d < 1:
        problems.append(f"d = c3 * u_{m - 1} = {d} is not positive")
    else:
        root = integer_nth_root(d, m)
        if root is None:
            problems.append(f"d = {d} has no integer {m}-th root")

    rho = char_poly(c1, c2, c3)
    _, rem = poly_divide(t**m - d, rho)
    divides = rem.is_zero
    if not divides:
        problems.append(f"{rho.as_expr()} does not divide t^{m} - {d} (remainder {rem.as_expr()})")

    classified = m in LEMMA_PATTERN_INDICES
    if not classified:
        problems.append(f"pattern index {m} is not one of {LEMMA_PATTERN_INDICES}")

    report = LemmaReport(
        c1=c1, c2=c2, c3=c3, m=m, d=d, root=root, divides=divides, classified=classified,
        anomaly='; '.join(problems) or None,
    )
    if report.anomaly:
        logger.error("Double-zero structure check failed for (%d, %d, %d): %s", c1, c2, c3, report.anomaly)
        if strict:
            raise LemmaAnomaly(f"({c1}, {c2}, {c3}), m={m}: {report.anomaly}")
    return report


def _classify_slice(c1: int, cmax: int, horizon: int):
    found = []
    for c2 in range(1, cmax + 1):
        for c3 in range(1, cmax + 1):
            m = find_double_zero(c1, c2, c3, horizon)
            if m is not None:
                found.append(((c1, c2, c3), m, verify_lemma_structure(c1, c2, c3, m)))
    return found


def brute_force_classify(cmax: int, horizon: int = CLASSIFY_SETTINGS['horizon'],
                         worker_count: int = 1) -> ClassificationResult:
    """Record the double-zero index of every triple in [1, cmax]^3 that has one."""
    if horizon < CLASSIFY_SETTINGS['min_horizon']:
        raise PreconditionError(f"horizon must be at least {CLASSIFY_SETTINGS['min_horizon']}, got {horizon}")
    horizon = min(horizon, CLASSIFY_SETTINGS['horizon_cap'])

    result = ClassificationResult()
    if cmax < 1:
        return result

    processor = ParallelRangeProcessor(worker_count, PARALLEL_SETTINGS['heartbeat_seconds'])
    slices = processor.process_all(
        _classify_slice,
        [(c1, cmax, horizon) for c1 in range(1, cmax + 1)],
        label=f"classify cmax={cmax}",
    )
    for found in slices:
        for triple, m, report in found:
            result.patterns[triple] = m
            result.reports[triple] = report
    return result


def lemma_case(m: int) -> Tuple[int, int]:
    """The search target (n, r) whose pattern is a double zero at u-index m."""
    return m - 1, 2


def theorem51_certificate(N: int) -> DeductionRecord:
    """Deduce the codimension 3 verdict for odd N without enumerating anything."""
    if N % 2 == 0:
        raise PreconditionError(f"N={N} is even; the deduction covers odd N only")
    if N < 11:
        raise PreconditionError(f"N={N} is below 11")
    case = admissible_case(N, 3)
    n = case.n
    r = 2
    index = n + 1

    steps = (
        f"n = N - 3 = {n}",
        f"a positive defect r has 1 <= r <= 2 and r = n (mod 2); n = {n} is even, so r = {r}",
        f"c1 = (n - r)/2 = {(n - r) // 2}",
        f"the pattern needs s_j > 0 for j <= {n - 2} and s_{n - 1} = s_{n} = 0, which forces c1, c2, c3 > 0",
        f"u_(j+2) = s_j turns this into a double zero of the u-sequence at index {index}",
        f"a double zero only occurs at index 4 or 6, and {index} >= 9, so no Chern numbers qualify",
    )
    return DeductionRecord(
        N=N,
        n=n,
        forced_defect=r,
        pattern_index=index,
        excluded_indices=LEMMA_PATTERN_INDICES,
        steps=steps,
        verdict=index not in LEMMA_PATTERN_INDICES,
    )
