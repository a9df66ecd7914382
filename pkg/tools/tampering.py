"""
Tampering functions in the bitwise class and the l-affine class.

Every output bit of a tampering function is one of: constant 0, constant 1,
identity, flip, or an affine form (XOR of the bits in a support set B) + b.
All actions read the ORIGINAL codeword, i.e. the function is applied to all
positions at once. Positions are 0-based.

Degenerate affine forms are canonicalized on construction (empty support
becomes a constant, support {i} at position i becomes identity or flip), so
the affine positions of a function are always genuinely affine.
"""

from __future__ import annotations

import json
import logging
from enum import Enum
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from schemes.models import Partition, ProofCase, ValidationReport, Violation
from tools.gf2 import BitWord, Gf2Matrix

logger = logging.getLogger(__name__)


class TamperError(ValueError):
    """Custom exception for tampering-function errors."""
    pass


class ActionKind(str, Enum):
    CONST0 = "const0"
    CONST1 = "const1"
    IDENTITY = "id"
    FLIP = "flip"
    AFFINE = "affine"


CONSTANT_KINDS = (ActionKind.CONST0, ActionKind.CONST1)
COPY_KINDS = (ActionKind.IDENTITY, ActionKind.FLIP)


class BitAction(BaseModel):
    """One output bit: a constant, identity, flip, or XOR over ``support`` plus ``b``."""

    model_config = ConfigDict(frozen=True)

    kind: ActionKind
    support: Tuple[int, ...] = ()
    b: int = Field(0, ge=0, le=1)

    @model_validator(mode="before")
    @classmethod
    def normalize(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = ActionKind(data.get("kind"))
        support = tuple(data.get("support") or ())
        if kind != ActionKind.AFFINE:
            if support:
                raise ValueError(f"Action {kind.value!r} takes no support, got {list(support)}")
            data["b"] = 1 if kind in (ActionKind.CONST1, ActionKind.FLIP) else 0
        else:
            if any(position < 0 for position in support):
                raise ValueError(f"Negative position in support {list(support)}")
            if len(set(support)) != len(support):
                raise ValueError(f"Repeated position in support {list(support)}")
            support = tuple(sorted(support))
        data["kind"] = kind
        data["support"] = support
        return data

    @classmethod
    def const0(cls) -> "BitAction":
        return cls(kind=ActionKind.CONST0)

    @classmethod
    def const1(cls) -> "BitAction":
        return cls(kind=ActionKind.CONST1)

    @classmethod
    def identity(cls) -> "BitAction":
        return cls(kind=ActionKind.IDENTITY)

    @classmethod
    def flip(cls) -> "BitAction":
        return cls(kind=ActionKind.FLIP)

    @classmethod
    def affine(cls, support: Sequence[int], b: int = 0) -> "BitAction":
        return cls(kind=ActionKind.AFFINE, support=tuple(support), b=b)

    @classmethod
    def const(cls, bit: int) -> "BitAction":
        return cls.const1() if bit else cls.const0()

    def reads(self, position: int) -> Tuple[int, ...]:
        """Positions of the input this action depends on."""
        if self.kind in CONSTANT_KINDS:
            return ()
        if self.kind in COPY_KINDS:
            return (position,)
        return self.support

    def to_json_dict(self) -> Dict[str, Any]:
        entry: Dict[str, Any] = {"kind": self.kind.value}
        if self.kind == ActionKind.AFFINE:
            entry["support"] = list(self.support)
            entry["b"] = self.b
        return entry


def canonicalize(action: BitAction, position: int) -> BitAction:
    """Fold affine forms that are really constants, identity or flip."""
    if action.kind != ActionKind.AFFINE:
        return action
    if not action.support:
        return BitAction.const(action.b)
    if action.support == (position,):
        return BitAction.flip() if action.b else BitAction.identity()
    return action


class TamperFunction(BaseModel):
    """f = (f_1, ..., f_n) with a declared bound ``ell`` on affine supports."""

    model_config = ConfigDict(frozen=True)

    ell: int = Field(..., ge=0)
    actions: Tuple[BitAction, ...]

    _keep_mask: int = PrivateAttr(0)
    _xor_mask: int = PrivateAttr(0)
    _affine: Tuple[Tuple[int, int], ...] = PrivateAttr(())

    @model_validator(mode="before")
    @classmethod
    def canonicalize_actions(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "actions" not in data:
            return data
        data = dict(data)
        actions = [
            action if isinstance(action, BitAction) else BitAction.model_validate(action)
            for action in data["actions"]
        ]
        data["actions"] = tuple(canonicalize(action, i) for i, action in enumerate(actions))
        return data

    @model_validator(mode="after")
    def check_positions(self) -> "TamperFunction":
        for i, action in enumerate(self.actions):
            outside = [j for j in action.support if j >= self.n]
            if outside:
                raise ValueError(f"Action {i} reads positions {outside} outside 0..{self.n - 1}")
        return self

    def model_post_init(self, __context: Any) -> None:
        n = self.n
        keep = xor = 0
        affine = []
        for i, action in enumerate(self.actions):
            bit = 1 << (n - 1 - i)
            if action.kind in COPY_KINDS:
                keep |= bit
            if action.b:
                xor |= bit
            if action.kind == ActionKind.AFFINE:
                mask = sum(1 << (n - 1 - j) for j in action.support)
                affine.append((n - 1 - i, mask))
        self._keep_mask = keep
        self._xor_mask = xor
        self._affine = tuple(affine)

    @classmethod
    def from_actions(cls, actions: Sequence[BitAction], ell: int = 0) -> "TamperFunction":
        return cls(ell=ell, actions=tuple(actions))

    @classmethod
    def identity(cls, n: int, ell: int = 0) -> "TamperFunction":
        return cls.from_actions([BitAction.identity()] * n, ell)

    @classmethod
    def constant(cls, word: BitWord, ell: int = 0) -> "TamperFunction":
        return cls.from_actions([BitAction.const(bit) for bit in word], ell)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TamperFunction":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.model_validate(json.load(handle))

    def to_json_dict(self) -> Dict[str, Any]:
        return {"ell": self.ell, "actions": [action.to_json_dict() for action in self.actions]}

    @property
    def n(self) -> int:
        return len(self.actions)

    @property
    def is_bitwise(self) -> bool:
        """True when f has no affine action (the bitwise-independent class)."""
        return not self._affine

    def support_of(self, i: int) -> Tuple[int, ...]:
        """Input positions output bit ``i`` depends on."""
        return self.actions[i].reads(i)

    def affine_positions(self) -> List[int]:
        return [i for i, action in enumerate(self.actions) if action.kind == ActionKind.AFFINE]

    def affine_matrix(self) -> Gf2Matrix:
        """Support-indicator vectors of the affine actions, one row each."""
        return Gf2Matrix(tuple(mask for _, mask in self._affine), self.n)

    def apply_int(self, c: int) -> int:
        out = (c & self._keep_mask) ^ self._xor_mask
        for shift, mask in self._affine:
            out ^= ((c & mask).bit_count() & 1) << shift
        return out

    def apply(self, c: BitWord) -> BitWord:
        """f(c), every action evaluated on the original c."""
        if c.length != self.n:
            raise TamperError(f"Codeword has {c.length} bits, function expects {self.n}")
        return BitWord(self.apply_int(c.value), self.n)

    def partition(self) -> Partition:
        return partition(self)


def partition(f: TamperFunction) -> Partition:
    b1, b2, b3 = [], [], []
    for i, action in enumerate(f.actions):
        if action.kind in CONSTANT_KINDS:
            b1.append(i)
        elif action.kind in COPY_KINDS:
            b2.append(i)
        else:
            b3.append(i)
    return Partition(b1=b1, b2=b2, b3=b3)


def validate(f: TamperFunction) -> ValidationReport:
    """Check |B| <= ell per affine action and rank[beta_1; ...; beta_r] >= min(r, ell)."""
    violations: List[Violation] = []
    for i in f.affine_positions():
        support = f.actions[i].support
        if len(support) > f.ell:
            violations.append(Violation(
                check="support_size",
                detail=f"Action {i} reads {len(support)} bits, more than ell = {f.ell}",
                positions=[i],
            ))
    affine = f.affine_positions()
    rank = f.affine_matrix().rank()
    required = min(len(affine), f.ell)
    if rank < required:
        violations.append(Violation(
            check="rank",
            detail=f"Affine support vectors have rank {rank} < min(r, ell) = {required}",
            positions=affine,
        ))
    report = ValidationReport(
        ok=not violations,
        ell=f.ell,
        rank=rank,
        required_rank=required,
        violations=violations,
        beyond_proof_regime=len(affine) > f.ell,
    )
    if not report.ok:
        logger.debug("Tampering function rejected: %s", [v.detail for v in violations])
    return report


def affine_independence_check(f: TamperFunction) -> List[List[int]]:
    """Empirical cross-check of ell-wise independence of the affine outputs.

    For each set S of at most ``ell`` affine positions, the joint output on S is
    tabulated over every assignment of the input bits S reads; the sets whose
    joint output is not uniform are returned.
    """
    failures: List[List[int]] = []
    affine = f.affine_positions()
    for size in range(1, min(f.ell, len(affine)) + 1):
        for chosen in combinations(affine, size):
            inputs = sorted({j for i in chosen for j in f.actions[i].support})
            counts: Dict[Tuple[int, ...], int] = {}
            for assignment in range(1 << len(inputs)):
                bits = {j: (assignment >> k) & 1 for k, j in enumerate(inputs)}
                pattern = tuple(
                    (sum(bits[j] for j in f.actions[i].support) + f.actions[i].b) & 1
                    for i in chosen
                )
                counts[pattern] = counts.get(pattern, 0) + 1
            expected = (1 << len(inputs)) >> size
            if len(counts) != 1 << size or any(count != expected for count in counts.values()):
                failures.append(list(chosen))
    return failures


def matching_cases(p: int, r: int, n: int, t: int) -> List[ProofCase]:
    """Every case whose inequalities hold for (p, r), before precedence."""
    cases = []
    if p <= t - r:
        cases.append(ProofCase.CASE1)
    if p >= n - t:
        cases.append(ProofCase.CASE2)
    if t - r < p and 2 * p <= n - r:
        cases.append(ProofCase.CASE3)
    if 2 * p > n - r and p <= n - t:
        cases.append(ProofCase.CASE4)
    return cases


def classify_case(part: Partition, n: int, t: int) -> ProofCase:
    """First matching case in the order 1, 2, 3, 4."""
    if part.n != n:
        raise TamperError(f"Partition sizes p+q+r = {part.n} do not add up to n = {n}")
    cases = matching_cases(part.p, part.r, n, t)
    if not cases:
        raise TamperError(f"No case covers p={part.p}, r={part.r}, n={n}, t={t}")
    return cases[0]
