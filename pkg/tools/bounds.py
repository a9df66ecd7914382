"""
Closed-form bounds for the affine-tampering security argument.

    tail_bound(n, d, p, r, t) = (n t / (d - (p + r)/2)^2)^(t/2)
    epsilon_bound(rho, n, d, t) = max(rho, 2^-t + (t / (n (d/n - 3/8)^2))^(t/2))

Both are computed from exact rationals and converted to float once, clamped
to [0, 1]. The unclamped value is kept for diagnostics: None when the
denominator is not positive, inf when it lies past the float range.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import List, Optional, Union

from schemes.models import BoundComponents, BoundPremises, BoundReport, format_probability

logger = logging.getLogger(__name__)

SQUARED_DENOMINATOR_NOTE = (
    "tail term uses the squared denominator (d/n - 3/8)^2, "
    "consistent with the per-case tail bound it is derived from"
)


def _power(base: Fraction, t: int) -> float:
    """base^(t/2): exact for even t, one float pow otherwise; inf past the float range."""
    if base > 1 and t * (math.log2(base.numerator) - math.log2(base.denominator)) > 2 * 1024:
        return math.inf
    try:
        if t % 2 == 0:
            return float(base ** (t // 2))
        return float(base) ** (t / 2)
    except OverflowError:
        return math.inf


def _finite(value: Optional[float]) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


def tail_bound_raw(n: int, d: int, p: int, r: int, t: int) -> Optional[float]:
    """Unclamped (n t / (d - (p+r)/2)^2)^(t/2), or None when d <= (p+r)/2."""
    gap = Fraction(2 * d - p - r, 2)
    if gap <= 0:
        return None
    return _power(Fraction(n * t) / (gap * gap), t)


def tail_bound(n: int, d: int, p: int, r: int, t: int) -> float:
    raw = tail_bound_raw(n, d, p, r, t)
    return 1.0 if raw is None else min(1.0, raw)


def epsilon_tail_raw(n: int, d: int, t: int) -> Optional[float]:
    """Unclamped (t / (n (d/n - 3/8)^2))^(t/2), or None when d/n <= 3/8."""
    gap = Fraction(d, n) - Fraction(3, 8)
    if gap <= 0:
        return None
    return _power(Fraction(t) / (n * gap * gap), t)


def bound_premises(n: int, d: int, t: int, r: Optional[int] = None) -> BoundPremises:
    return BoundPremises(
        d_gt_3n_over_8=8 * d > 3 * n,
        t_even=t % 2 == 0,
        t_gt_6=t > 6,
        r_le_t=None if r is None else r <= t,
    )


def epsilon_bound(
    rho: Union[Fraction, float],
    n: int,
    d: int,
    t: int,
    p: Optional[int] = None,
    r: Optional[int] = None,
    case: Optional[int] = None,
) -> BoundReport:
    """max(rho, 2^-t + tail) clamped to [0, 1], with premise flags.

    ``p`` and ``r`` are optional; when given, the per-case tail bound for that
    partition and the r <= t premise are reported too.
    """
    premises = bound_premises(n, d, t, r)
    tail = epsilon_tail_raw(n, d, t)
    two_pow_neg_t = 2.0 ** -t
    notes: List[str] = [SQUARED_DENOMINATOR_NOTE]

    if tail is None:
        raw_epsilon = None
        epsilon = 1.0
        vacuous = True
        notes.append("d/n <= 3/8: tail term unbounded, bound is vacuous")
    else:
        raw_epsilon = max(float(rho), two_pow_neg_t + tail)
        epsilon = min(1.0, max(0.0, raw_epsilon))
        vacuous = raw_epsilon >= 1.0
        if vacuous:
            notes.append("bound is at least 1 and carries no information")
        if math.isinf(raw_epsilon):
            notes.append("unclamped bound exceeds the float range")
    if not premises.t_even or not premises.t_gt_6:
        notes.append(f"t = {t}: the bound is stated for even t > 6 only")
    if premises.r_le_t is False:
        notes.append(f"r = {r} > t = {t}: outside the analysed regime")

    case_tail = tail_bound(n, d, p, r, t) if p is not None and r is not None else None
    report = BoundReport(
        case=case,
        epsilon=epsilon,
        raw_epsilon=_finite(raw_epsilon),
        vacuous=vacuous,
        premises=premises,
        components=BoundComponents(
            rho=float(rho),
            rho_exact=format_probability(rho) if isinstance(rho, Fraction) else None,
            two_pow_neg_t=two_pow_neg_t,
            tail_term=_finite(tail),
            case_tail=case_tail,
        ),
        notes=notes,
    )
    logger.debug("epsilon_bound n=%d d=%d t=%d -> %s (vacuous=%s)", n, d, t, epsilon, vacuous)
    return report
