"""
Finite distributions over decoder outcomes.

Outcomes are k-bit messages (``BitWord``), ``Symbol.BOTTOM`` or ``Symbol.SAME``.
Exact distributions carry ``Fraction`` masses that sum to exactly 1; sampled
ones carry empirical float frequencies together with their sample count and seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Literal, Mapping, Optional, Union

from schemes.models import Probability, format_probability
from schemes.nm_code import Outcome, Symbol
from tools.gf2 import BitWord

Mass = Union[Fraction, float]


def outcome_key(outcome: Outcome) -> str:
    """JSON key of an outcome: hex for messages, the symbol name otherwise."""
    if isinstance(outcome, Symbol):
        return outcome.value
    return outcome.to_hex()


@dataclass(frozen=True)
class Distribution:
    outcomes: Mapping[Outcome, Mass]
    mode: Literal["exact", "sampled"] = "exact"
    samples: Optional[int] = None
    seed: Optional[int] = None
    _zero: Mass = field(init=False, repr=False, compare=False, default=Fraction(0))

    def __post_init__(self) -> None:
        cleaned = {outcome: mass for outcome, mass in self.outcomes.items() if mass}
        if any(mass < 0 for mass in cleaned.values()):
            raise ValueError("Distribution has negative mass")
        if self.mode == "exact":
            if any(not isinstance(mass, (Fraction, int)) for mass in cleaned.values()):
                raise ValueError("Exact distributions take rational masses")
            if cleaned and sum(cleaned.values()) != 1:
                raise ValueError(f"Exact masses sum to {sum(cleaned.values())}, not 1")
        object.__setattr__(self, "outcomes", cleaned)
        object.__setattr__(self, "_zero", Fraction(0) if self.mode == "exact" else 0.0)

    @classmethod
    def point_mass(cls, outcome: Outcome) -> "Distribution":
        return cls({outcome: Fraction(1)})

    @classmethod
    def from_counts(
        cls,
        counts: Mapping[Outcome, int],
        total: int,
        mode: Literal["exact", "sampled"] = "exact",
        seed: Optional[int] = None,
    ) -> "Distribution":
        """Normalize integer counts over ``total`` trials (enumerated or sampled)."""
        if mode == "exact":
            return cls({outcome: Fraction(count, total) for outcome, count in counts.items()})
        return cls(
            {outcome: count / total for outcome, count in counts.items()},
            mode="sampled", samples=total, seed=seed,
        )

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def support(self) -> frozenset:
        return frozenset(self.outcomes)

    def probability(self, outcome: Outcome) -> Mass:
        return self.outcomes.get(outcome, self._zero)

    def mass_where(self, predicate: Callable[[Outcome], bool]) -> Mass:
        return sum((mass for outcome, mass in self.outcomes.items() if predicate(outcome)), self._zero)

    def is_point_mass(self, outcome: Outcome) -> bool:
        return self.probability(outcome) == 1

    def to_json(self) -> Dict[str, Probability]:
        return {outcome_key(outcome): format_probability(mass) for outcome, mass in self.outcomes.items()}


def patch(df: Distribution, s: BitWord) -> Distribution:
    """Move the mass on same* onto the message s."""
    same = df.outcomes.get(Symbol.SAME)
    if same is None:
        return df
    moved: Dict[Outcome, Mass] = {o: mass for o, mass in df.outcomes.items() if o != Symbol.SAME}
    moved[s] = moved.get(s, df._zero) + same
    return Distribution(moved, mode=df.mode, samples=df.samples, seed=df.seed)


def statistical_distance(p: Distribution, q: Distribution) -> Mass:
    """SD(P, Q) = 1/2 * sum |P(o) - Q(o)|; exact when both sides are exact."""
    # fixed summation order keeps float results independent of how counts were merged
    universe: Iterable[Outcome] = sorted(p.support | q.support, key=outcome_key)
    if p.exact and q.exact:
        total = sum((abs(p.probability(o) - q.probability(o)) for o in universe), Fraction(0))
        return total / 2
    return sum(abs(float(p.probability(o)) - float(q.probability(o))) for o in universe) / 2
