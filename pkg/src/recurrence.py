"""Exact evaluation of the Segre recurrence and its positivity/zero pattern.

The sequence is driven by the Chern numbers c_1..c_m:

    s_0 = 1
    s_j = sum_{q=1..m} (-1)^(q+1) c_q s_{j-q}

with s_{-1} = ... = s_{-m} = 0, which yields the truncated sums for j < m.
All arithmetic uses Python integers, so no term ever overflows.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence, Tuple


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


@dataclass(frozen=True)
class Coefficients:
    """The Chern numbers (c_1, ..., c_m) driving the recurrence."""
    c: Tuple[int, ...]

    def __post_init__(self):
        if len(self.c) < 1:
            raise PreconditionError("Coefficients need at least one entry")
        for q, value in enumerate(self.c, 1):
            if not isinstance(value, int) or isinstance(value, bool):
                raise PreconditionError(f"c_{q} must be an integer, got {value!r}")
            if value < 0:
                raise PreconditionError(f"c_{q} must be nonnegative, got {value}")

    @property
    def order(self) -> int:
        return len(self.c)

    def signed(self) -> Tuple[int, ...]:
        """Coefficients with the alternating sign of the recurrence applied."""
        return tuple(value if q % 2 == 1 else -value for q, value in enumerate(self.c, 1))


@dataclass(frozen=True)
class SegreTerms:
    """The terms s_0..s_L of the recurrence."""
    coefficients: Coefficients
    terms: Tuple[int, ...]

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, j):
        return self.terms[j]

    def __iter__(self):
        return iter(self.terms)


class ViolationKind(Enum):
    """Which half of the pattern a term failed."""
    NONPOSITIVE_IN_PREFIX = "nonpositive-in-prefix"
    NONZERO_IN_TAIL = "nonzero-in-tail"


@dataclass(frozen=True)
class PatternVerdict:
    """Outcome of testing s_0..s_n against the (n, r) pattern."""
    accepted: bool
    violation_index: Optional[int] = None
    violation_kind: Optional[ViolationKind] = None
    evidence: Optional[Tuple[int, ...]] = None  # s_0..s_n, present on acceptance


def as_coefficients(c) -> Coefficients:
    if isinstance(c, Coefficients):
        return c
    return Coefficients(tuple(c))


def segre_terms(c) -> Iterator[int]:
    """Yield s_0, s_1, ... indefinitely, keeping only the last m terms."""
    coeffs = as_coefficients(c)
    signed = coeffs.signed()
    window = deque([1] + [0] * (coeffs.order - 1), maxlen=coeffs.order)
    yield 1
    while True:
        term = 0
        for a, s in zip(signed, window):
            term += a * s
        window.appendleft(term)
        yield term


def segre_sequence(c, L: int) -> SegreTerms:
    """Return s_0..s_L exactly."""
    if L < 0:
        raise PreconditionError(f"L must be nonnegative, got {L}")
    coeffs = as_coefficients(c)
    terms = []
    for term in segre_terms(coeffs):
        terms.append(term)
        if len(terms) > L:
            break
    return SegreTerms(coefficients=coeffs, terms=tuple(terms))


def term_fits(j: int, term: int, n: int, r: int) -> bool:
    """Whether s_j = term is allowed by the (n, r) pattern (j <= n)."""
    if j <= n - r:
        return term > 0
    return term == 0


def violation_kind(j: int, n: int, r: int) -> ViolationKind:
    if j <= n - r:
        return ViolationKind.NONPOSITIVE_IN_PREFIX
    return ViolationKind.NONZERO_IN_TAIL


def scan_pattern(signed: Sequence[int], window: Sequence[int], start: int, n: int, r: int) -> int:
    """Continue the recurrence from index `start` and test it against the pattern.

    `window` holds s_{start-1}, s_{start-2}, ..., s_{start-m} (newest first,
    zeros standing in for negative indices). Returns the first index in
    [start, n] whose term violates the pattern, or -1 if none does.
    """
    history = deque(window, maxlen=len(signed))
    last_positive = n - r
    for j in range(start, n + 1):
        term = 0
        for a, s in zip(signed, history):
            term += a * s
        if j <= last_positive:
            if term <= 0:
                return j
        elif term != 0:
            return j
        history.appendleft(term)
    return -1


def _validate_pattern_target(n: int, r: int):
    if r < 1 or r > n:
        raise PreconditionError(f"pattern needs 1 <= r <= n, got n={n}, r={r}")


def check_pattern(c, n: int, r: int) -> PatternVerdict:
    """Test s_j > 0 for j <= n - r and s_j = 0 for n - r < j <= n.

    Stops at the first violated constraint. The full s_0..s_n is attached
    to an accepting verdict.
    """
    _validate_pattern_target(n, r)
    coeffs = as_coefficients(c)

    # s_0 = 1 always lies in the positive prefix since n - r >= 0
    window = [1] + [0] * (coeffs.order - 1)
    index = scan_pattern(coeffs.signed(), window, 1, n, r)
    if index >= 0:
        return PatternVerdict(
            accepted=False,
            violation_index=index,
            violation_kind=violation_kind(index, n, r),
        )
    return PatternVerdict(accepted=True, evidence=segre_sequence(coeffs, n).terms)
