"""
Tests for the closed-form tail and epsilon bounds.
"""

import math
from fractions import Fraction

import pytest

from tools.bounds import (
    SQUARED_DENOMINATOR_NOTE,
    bound_premises,
    epsilon_bound,
    epsilon_tail_raw,
    tail_bound,
    tail_bound_raw,
)


def _reference_tail(n, d, t):
    gap = Fraction(d, n) - Fraction(3, 8)
    return float((Fraction(t) / (n * gap * gap)) ** (t // 2))


class TestTailBound:
    """Tests for the per-case tail bound."""

    def test_exact_example(self):
        """Test n=64, t=8, p+r=16, d=40 gives exactly 1/16."""
        assert tail_bound(64, 40, 10, 6, 8) == 0.0625
        assert tail_bound_raw(64, 40, 16, 0, 8) == 0.0625

    def test_clamped(self):
        """Test values above 1 clamp to 1."""
        assert tail_bound_raw(16, 4, 2, 0, 3) > 1
        assert tail_bound(16, 4, 2, 0, 3) == 1.0

    def test_nonpositive_denominator(self):
        """Test d <= (p + r) / 2 is unbounded."""
        assert tail_bound_raw(64, 8, 16, 0, 8) is None
        assert tail_bound(64, 8, 16, 0, 8) == 1.0

    def test_odd_t(self):
        """Test odd t uses a half-integer power."""
        assert tail_bound_raw(64, 40, 16, 0, 7) == pytest.approx((64 * 7 / 32 ** 2) ** 3.5, rel=1e-12)

    @pytest.mark.parametrize("t", [200, 201])
    def test_beyond_float_range(self, t):
        """Test a raw tail past the float range clamps to 1 for even and odd t."""
        assert tail_bound_raw(64, 9, 16, 0, t) == math.inf
        assert tail_bound(64, 9, 16, 0, t) == 1.0


class TestEpsilonBound:
    """Tests for epsilon = max(rho, 2^-t + tail)."""

    def test_large_instance(self):
        """Test n=4096, d=1844, t=16 against a direct recomputation."""
        report = epsilon_bound(Fraction(1, 100), 4096, 1844, 16)
        expected = 2.0 ** -16 + _reference_tail(4096, 1844, 16)
        assert report.epsilon == pytest.approx(expected, rel=1e-12)
        assert 0.05 < report.epsilon < 0.055
        assert not report.vacuous
        assert report.premises_met
        assert report.components.rho_exact == "1/100"
        assert SQUARED_DENOMINATOR_NOTE in report.notes

    def test_rho_dominates(self):
        """Test rho above the tail sets epsilon."""
        report = epsilon_bound(Fraction(1, 2), 4096, 1844, 16)
        assert report.epsilon == 0.5
        assert report.raw_epsilon == 0.5

    def test_boundary_three_eighths(self):
        """Test d/n = 3/8 is vacuous with an unbounded tail."""
        report = epsilon_bound(Fraction(1, 4), 64, 24, 8)
        assert report.vacuous
        assert report.epsilon == 1.0
        assert report.raw_epsilon is None
        assert report.components.tail_term is None
        assert not report.premises.d_gt_3n_over_8
        assert epsilon_tail_raw(64, 24, 8) is None

    def test_clamp(self):
        """Test a just-above-3/8 distance clamps to 1 and keeps the raw value."""
        report = epsilon_bound(0.01, 64, 25, 8)
        assert report.epsilon == 1.0
        assert report.raw_epsilon > 1.0
        assert report.vacuous
        assert report.premises.d_gt_3n_over_8
        assert report.components.rho_exact is None

    def test_clamp_beyond_float_range(self):
        """Test a huge unclamped epsilon clamps to 1 and is reported as unbounded."""
        report = epsilon_bound(Fraction(1, 100), 4096, 1537, 200)
        assert report.epsilon == 1.0
        assert report.vacuous
        assert report.raw_epsilon is None
        assert report.components.tail_term is None
        assert report.premises.d_gt_3n_over_8
        assert any("float range" in note for note in report.notes)

    def test_t_premises(self):
        """Test t = 6 and odd t are flagged."""
        assert not bound_premises(4096, 1844, 6).t_gt_6
        assert bound_premises(4096, 1844, 8).t_gt_6
        odd = epsilon_bound(Fraction(1, 100), 4096, 1844, 7)
        assert not odd.premises.t_even
        assert not odd.premises_met
        assert any("even t > 6" in note for note in odd.notes)

    def test_r_premise(self):
        """Test r > t is reported and the per-case tail is attached."""
        report = epsilon_bound(Fraction(1, 100), 64, 40, 8, p=6, r=10, case=3)
        assert report.premises.r_le_t is False
        assert not report.premises_met
        assert report.case == 3
        assert report.components.case_tail == 0.0625
        assert any("r = 10 > t = 8" in note for note in report.notes)

    def test_toy_scheme_premises(self):
        """Test the [16, 11, 4] scheme misses the distance premise."""
        report = epsilon_bound(Fraction(1, 2), 16, 4, 3, p=0, r=0, case=1)
        assert not report.premises_met
        assert report.vacuous
        assert report.premises.r_le_t is True

    def test_monotone_in_distance(self):
        """Test epsilon does not grow as d increases past 3n/8."""
        values = [epsilon_bound(Fraction(1, 1000), 4096, d, 16).epsilon for d in range(1700, 2600, 25)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_json_dump(self):
        """Test the report serializes its premise flag."""
        dumped = epsilon_bound(Fraction(1, 100), 4096, 1844, 16).model_dump(mode="json")
        assert dumped["premises_met"] is True
        assert dumped["components"]["tail_term"] is not None
