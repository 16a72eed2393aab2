"""Admissible cases, defect branches, Chern number bounds and degree formulas.

The geometric constraints only enter here as integer arithmetic:

- a case (N, m) needs m >= 3, N >= 10 and 4(N - m) >= 3N - 2;
- a positive defect r satisfies 1 <= r <= m - 1 and r = N - m (mod 2),
  and forces c_1 = (N - m - r) / 2;
- the remaining Chern numbers obey c_j <= c_1 c_{j-1}, hence c_j <= c_1^j.
"""

import os
import sys
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import accumulate
from typing import List, Optional, Sequence, Tuple

# Add parent directory to path to import config
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))
from config.rules import CASE_CONSTRAINTS


class ConstraintViolation(ValueError):
    """A case or branch fails one of the admissibility inequalities."""

    def __init__(self, inequality, message):
        super().__init__(message)
        self.inequality = inequality


class BoundVariant(Enum):
    """How the upper bounds on c_2..c_m are applied."""
    PLAIN = "plain"
    CHAINED = "chained"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"Unknown bound variant: {value}. Supported: {[v.value for v in cls]}")


@dataclass(frozen=True)
class CaseSpec:
    N: int
    m: int

    @property
    def n(self) -> int:
        return self.N - self.m


@dataclass(frozen=True)
class DefectBranch:
    r: int
    c1: int


@dataclass(frozen=True)
class BoundsVector:
    """Upper bounds for c_2..c_m given c_1."""
    c1: int
    m: int
    variant: BoundVariant
    B: Tuple[int, ...]  # static bounds c1^j for j = 2..m

    def static(self, j: int) -> int:
        return self.B[j - 2]

    def limit(self, j: int, previous: int) -> int:
        """Largest admissible c_j once c_{j-1} = previous is fixed."""
        if self.variant is BoundVariant.CHAINED:
            return self.c1 * previous
        return self.static(j)

    def allows(self, c: Sequence[int]) -> bool:
        """Whether the full vector (c_1, ..., c_m) lies inside the bounds."""
        if len(c) != self.m or c[0] != self.c1:
            return False
        for j in range(2, self.m + 1):
            if c[j - 1] < 0 or c[j - 1] > self.limit(j, c[j - 2]):
                return False
        return True

    @cached_property
    def _completion_tables(self):
        # tables[j][x]: number of (c_{j+1}, ..., c_m) once c_j = x, for j = 2..m-1
        tables = {}
        below = None  # prefix sums of the level underneath
        for j in range(self.m - 1, 1, -1):
            if below is None:
                counts = [self.c1 * x + 1 for x in range(self.static(j) + 1)]
            else:
                counts = [below[self.c1 * x] for x in range(self.static(j) + 1)]
            tables[j] = counts
            below = list(accumulate(counts))
        return tables

    def completions(self, j: int, value: int) -> int:
        """Number of ways to finish a tuple whose coordinate c_j equals value."""
        if j >= self.m:
            return 1
        if self.variant is BoundVariant.PLAIN:
            total = 1
            for k in range(j + 1, self.m + 1):
                total *= self.static(k) + 1
            return total
        return self._completion_tables[j][value]

    def count_tuples(self, lo: int = 0, hi: Optional[int] = None) -> int:
        """Number of tuples whose c_2 lies in [lo, hi] (the whole space by default)."""
        if hi is None:
            hi = self.static(2)
        hi = min(hi, self.static(2))
        return sum(self.completions(2, x) for x in range(max(lo, 0), hi + 1))


@dataclass(frozen=True)
class ChernTuple:
    c: Tuple[int, ...]
    branch: DefectBranch
    case: Optional[CaseSpec] = None

    def __post_init__(self):
        if not self.c or self.c[0] != self.branch.c1:
            raise ConstraintViolation('c1', f"c_1 must equal the branch value {self.branch.c1}, got {self.c[:1]}")
        if any(value < 0 for value in self.c):
            raise ConstraintViolation('c>=0', f"Chern numbers must be nonnegative, got {self.c}")


def admissible_case(N: int, m: int) -> CaseSpec:
    """Validate (N, m) against the input domain of the search."""
    min_codim = CASE_CONSTRAINTS['min_codim']
    min_ambient = CASE_CONSTRAINTS['min_ambient']
    if m < min_codim:
        raise ConstraintViolation('m>=3', f"codimension m={m} is below {min_codim}")
    if N < min_ambient:
        raise ConstraintViolation('N>=10', f"ambient dimension N={N} is below {min_ambient}")
    if N < 4 * m - 2:
        raise ConstraintViolation(
            'N>=4m-2',
            f"N={N} < 4m - 2 = {4 * m - 2}: dimension N - m must be at least (3N - 2)/4",
        )
    return CaseSpec(N=N, m=m)


def defect_branches(case: CaseSpec) -> List[DefectBranch]:
    """Every positive defect r of the right parity, with its forced c_1."""
    n = case.n
    return [DefectBranch(r=r, c1=(n - r) // 2) for r in range(1, case.m) if (n - r) % 2 == 0]


def chern_bounds(c1: int, m: int, variant=BoundVariant.CHAINED) -> BoundsVector:
    variant = BoundVariant.parse(variant)
    if c1 < 1:
        raise ConstraintViolation('c1>=1', f"c_1 must be positive, got {c1}")
    if m < 2:
        raise ConstraintViolation('m>=2', f"bounds need at least c_2, got m={m}")
    return BoundsVector(c1=c1, m=m, variant=variant, B=tuple(c1 ** j for j in range(2, m + 1)))


def _values(c) -> Tuple[int, ...]:
    if isinstance(c, ChernTuple):
        return c.c
    return tuple(c)


def log_concavity_ok(c) -> bool:
    """c_j^2 >= c_{j-1} c_{j+1} with c_0 = 1, and no internal zeros."""
    seq = (1,) + _values(c)
    for j in range(1, len(seq) - 1):
        if seq[j] * seq[j] < seq[j - 1] * seq[j + 1]:
            return False

    seen_zero = False
    for value in seq:
        if value == 0:
            seen_zero = True
        elif seen_zero:
            return False
    return True


def branch_for(case: CaseSpec, r: int) -> DefectBranch:
    for branch in defect_branches(case):
        if branch.r == r:
            return branch
    raise ConstraintViolation(
        'r-branch',
        f"r={r} is not a positive defect branch for N={case.N}, m={case.m} "
        f"(need 1 <= r <= {case.m - 1} and r = {case.n} mod 2)",
    )


def degree_bound(N: int, m: int, r: int) -> int:
    """Upper bound sum_{j=0..m} c_1^j on deg(X) for defect r."""
    branch = branch_for(admissible_case(N, m), r)
    return sum(branch.c1 ** j for j in range(m + 1))


def degree_of(c) -> int:
    """deg(X) = 1 + c_1 + ... + c_m."""
    return 1 + sum(_values(c))
