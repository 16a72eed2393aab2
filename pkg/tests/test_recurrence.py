import unittest

from hypothesis import given, settings, strategies as st

from recurrence import (
    Coefficients,
    PreconditionError,
    ViolationKind,
    check_pattern,
    scan_pattern,
    segre_sequence,
    segre_terms,
)


def naive_pattern_ok(c, n, r):
    s = segre_sequence(c, n).terms
    return all(s[j] > 0 for j in range(n - r + 1)) and all(s[j] == 0 for j in range(n - r + 1, n + 1))


class TestSegreSequence(unittest.TestCase):

    def test_three_nine_twentyseven(self):
        s = segre_sequence((3, 9, 27), 11)
        self.assertEqual(s.terms, (1, 3, 0, 0, 81, 243, 0, 0, 6561, 19683, 0, 0))

    def test_all_ones(self):
        s = segre_sequence((1, 0, 0), 6)
        self.assertEqual(list(s), [1] * 7)

    def test_order_one_is_powers(self):
        s = segre_sequence((2,), 10)
        self.assertEqual(s.terms, tuple(2 ** j for j in range(11)))

    def test_truncated_sums_before_order(self):
        # s_1 = c1, s_2 = c1^2 - c2
        s = segre_sequence((5, 7, 11, 13), 2)
        self.assertEqual(s.terms, (1, 5, 18))

    def test_period_four(self):
        s = segre_sequence((1, 1, 1), 11)
        self.assertEqual(s.terms, (1, 1, 0, 0) * 3)

    def test_exact_big_integers(self):
        s = segre_sequence((10, 0, 0), 50)
        self.assertEqual(s[50], 10 ** 50)

    def test_zero_length(self):
        self.assertEqual(segre_sequence((4, 4), 0).terms, (1,))

    def test_negative_length_rejected(self):
        with self.assertRaises(PreconditionError):
            segre_sequence((1, 1, 1), -1)

    def test_bad_coefficients_rejected(self):
        with self.assertRaises(PreconditionError):
            Coefficients(())
        with self.assertRaises(PreconditionError):
            Coefficients((1, -2, 3))

    @settings(deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=6),
           st.integers(min_value=0, max_value=200))
    def test_generator_matches_sequence(self, c, L):
        gen = segre_terms(c)
        prefix = tuple(next(gen) for _ in range(L + 1))
        self.assertEqual(prefix, segre_sequence(c, L).terms)

    @settings(deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=6),
           st.integers(min_value=6, max_value=200))
    def test_recurrence_holds(self, c, L):
        s = segre_sequence(c, L).terms
        for j in range(1, L + 1):
            expected = sum((-1) ** (q + 1) * c[q - 1] * s[j - q] for q in range(1, len(c) + 1) if j - q >= 0)
            self.assertEqual(s[j], expected)

    @settings(deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=6),
           st.integers(min_value=1, max_value=200))
    def test_growth_bound(self, c, L):
        C = max(max(c), 1)
        m = len(c)
        for j, term in enumerate(segre_sequence(c, L).terms[1:], 1):
            self.assertLessEqual(abs(term), (m * C) ** j)


class TestCheckPattern(unittest.TestCase):

    def test_accepts_double_zero_at_end(self):
        verdict = check_pattern((1, 1, 1), 3, 2)
        self.assertTrue(verdict.accepted)
        self.assertEqual(verdict.evidence, (1, 1, 0, 0))
        self.assertIsNone(verdict.violation_index)

    def test_accepts_longer_positive_prefix(self):
        verdict = check_pattern((4, 8, 8), 5, 2)
        self.assertTrue(verdict.accepted)
        self.assertEqual(verdict.evidence, (1, 4, 8, 8, 0, 0))

    def test_zero_inside_prefix(self):
        verdict = check_pattern((1, 1, 1), 5, 2)
        self.assertFalse(verdict.accepted)
        self.assertEqual(verdict.violation_index, 2)
        self.assertEqual(verdict.violation_kind, ViolationKind.NONPOSITIVE_IN_PREFIX)
        self.assertIsNone(verdict.evidence)

    def test_nonzero_in_tail(self):
        verdict = check_pattern((1, 0, 0), 3, 1)
        self.assertFalse(verdict.accepted)
        self.assertEqual(verdict.violation_index, 3)
        self.assertEqual(verdict.violation_kind, ViolationKind.NONZERO_IN_TAIL)

    def test_constant_sequence_never_vanishes(self):
        verdict = check_pattern((1, 0, 0), 5, 2)
        self.assertFalse(verdict.accepted)
        self.assertEqual(verdict.violation_index, 4)
        self.assertEqual(verdict.violation_kind, ViolationKind.NONZERO_IN_TAIL)

    def test_r_equal_n_only_needs_s0(self):
        verdict = check_pattern((2, 4), 2, 2)
        self.assertFalse(verdict.accepted)
        self.assertEqual(verdict.violation_index, 1)

    def test_invalid_target(self):
        with self.assertRaises(PreconditionError):
            check_pattern((1, 1, 1), 3, 0)
        with self.assertRaises(PreconditionError):
            check_pattern((1, 1, 1), 3, 4)

    @settings(max_examples=200)
    @given(st.lists(st.integers(min_value=0, max_value=12), min_size=1, max_size=4),
           st.integers(min_value=1, max_value=14),
           st.data())
    def test_matches_naive_scan(self, c, n, data):
        r = data.draw(st.integers(min_value=1, max_value=n))
        self.assertEqual(check_pattern(c, n, r).accepted, naive_pattern_ok(c, n, r))

    def test_scan_resumes_mid_sequence(self):
        # s_0..s_3 of (4, 8, 8) are 1, 4, 8, 8; resume at index 4
        coeffs = Coefficients((4, 8, 8))
        self.assertEqual(scan_pattern(coeffs.signed(), [8, 8, 4], 4, 5, 2), -1)
        self.assertEqual(scan_pattern(coeffs.signed(), [8, 8, 4], 4, 6, 2), 4)


if __name__ == '__main__':
    unittest.main()
