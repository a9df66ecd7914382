"""
Polynomial-tag algebraic manipulation detection (AMD) code.

A message s = (s_1, ..., s_u) of u elements of GF(2^m) is encoded with a
uniformly random x as the string s_1 | ... | s_u | x | tag where

    tag = x^(u+2) + sum_{i=1..u} s_i * x^i.

Verification recomputes the tag. For u + 2 odd, any fixed nonzero offset is
accepted with probability at most (u + 1) / 2^m over x.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from tools.gf2 import BitWord, FieldElem, get_field

from .models import AmdAuditReport, AmdParams, CertificateResult, format_probability

logger = logging.getLogger(__name__)


class AmdError(ValueError):
    """Custom exception for AMD encoding and audit errors."""
    pass


class AmdCode:
    """Encoder A and verifier V for one ``AmdParams`` instance."""

    def __init__(self, params: AmdParams):
        self.params = params
        self.m = params.m
        self.u = params.u
        self.field = get_field(params.m)
        self.block_mask = (1 << self.m) - 1
        self.message_bits = params.message_bits
        self.codeword_bits = params.codeword_bits

    def blocks(self, s: int) -> List[int]:
        """Split a message int into (s_1, ..., s_u), s_1 taken from the high bits."""
        return [(s >> (self.m * (self.u - i))) & self.block_mask for i in range(1, self.u + 1)]

    def tag(self, s: int, x: int) -> int:
        mul = self.field.mul
        acc = 0
        power = x
        for block in self.blocks(s):
            acc ^= mul(block, power)
            power = mul(power, x)
        # power is now x^(u+1)
        return acc ^ mul(power, x)

    def encode_int(self, s: int, x: int) -> int:
        return (((s << self.m) | x) << self.m) | self.tag(s, x)

    def verify_int(self, w: int) -> Optional[int]:
        tag = w & self.block_mask
        x = (w >> self.m) & self.block_mask
        s = w >> (2 * self.m)
        if self.tag(s, x) != tag:
            return None
        return s

    def _message_int(self, s: Union[BitWord, Sequence[FieldElem]]) -> int:
        if isinstance(s, BitWord):
            if s.length != self.message_bits:
                raise AmdError(f"Message has {s.length} bits, expected {self.message_bits}")
            return s.value
        if len(s) != self.u:
            raise AmdError(f"Message has {len(s)} field elements, expected u = {self.u}")
        value = 0
        for element in s:
            if element.field != self.field:
                raise AmdError(f"Message element from {element.field!r}, expected {self.field!r}")
            value = (value << self.m) | element.value
        return value

    def encode(self, s: Union[BitWord, Sequence[FieldElem]], x: Union[FieldElem, int]) -> BitWord:
        """A(s; x) laid out as (s, x, tag)."""
        x_value = x.value if isinstance(x, FieldElem) else x
        if not 0 <= x_value <= self.block_mask:
            raise AmdError(f"Randomness {x_value} is not an element of GF(2^{self.m})")
        return BitWord(self.encode_int(self._message_int(s), x_value), self.codeword_bits)

    def verify(self, w: BitWord) -> Optional[BitWord]:
        """V(w): the message if the tag checks out, otherwise None (reject)."""
        if w.length != self.codeword_bits:
            raise AmdError(f"Codeword has {w.length} bits, expected {self.codeword_bits}")
        s = self.verify_int(w.value)
        return None if s is None else BitWord(s, self.message_bits)

    def acceptance_count(self, s: int, delta: int) -> int:
        """Number of x for which V(A(s; x) + delta) accepts."""
        verify = self.verify_int
        return sum(1 for x in range(1 << self.m) if verify(self.encode_int(s, x) ^ delta) is not None)

    def acceptance_probability(self, s: BitWord, delta: BitWord) -> Fraction:
        """Pr_x[V(A(s; x) + delta) != reject], exactly."""
        if delta.length != self.codeword_bits:
            raise AmdError(f"Offset has {delta.length} bits, expected {self.codeword_bits}")
        return Fraction(self.acceptance_count(self._message_int(s), delta.value), 1 << self.m)


def amd_tag_linearity(params: AmdParams, limit: int = 1 << 20) -> CertificateResult:
    """tag(s + s', x) + tag(0, x) == tag(s, x) + tag(s', x) for all s, s', x."""
    code = AmdCode(params)
    total = 1 << (2 * params.message_bits + params.m)
    if total > limit:
        raise AmdError(f"Tag linearity enumeration of {total} triples exceeds the limit of {limit}")
    tag = code.tag
    messages = range(1 << params.message_bits)
    for x in range(1 << params.m):
        offset = tag(0, x)
        for s in messages:
            for s_prime in messages:
                if tag(s ^ s_prime, x) ^ offset != tag(s, x) ^ tag(s_prime, x):
                    return CertificateResult(
                        name="tag_linearity", passed=False, exhaustive=True, checked=total,
                        counterexample={
                            "s": BitWord(s, params.message_bits).to_hex(),
                            "s_prime": BitWord(s_prime, params.message_bits).to_hex(),
                            "x": str(x),
                        },
                    )
    return CertificateResult(name="tag_linearity", passed=True, exhaustive=True, checked=total)


def _audit_messages(params: AmdParams, messages: Sequence[int]) -> Tuple[int, int, int]:
    """Best (hits, s, delta) over the given messages and every nonzero delta."""
    code = AmdCode(params)
    encode, verify = code.encode_int, code.verify_int
    xs = range(1 << code.m)
    best = (-1, 0, 0)
    for s in messages:
        codewords = [encode(s, x) for x in xs]
        for delta in range(1, 1 << code.codeword_bits):
            hits = 0
            for word in codewords:
                if verify(word ^ delta) is not None:
                    hits += 1
            if hits > best[0]:
                best = (hits, s, delta)
    return best


def amd_security_oracle(
    params: AmdParams, limit: int = 1 << 20, workers: int = 1
) -> AmdAuditReport:
    """Exact max over s and delta != 0 of Pr_x[V(A(s; x) + delta) != reject].

    Messages are split into contiguous chunks when ``workers > 1``; ties are
    resolved towards the smallest (s, delta) so the witness does not depend on
    the split.
    """
    space = 1 << (params.message_bits + params.codeword_bits)
    if space > limit:
        raise AmdError(f"Audit space 2^{space.bit_length() - 1} exceeds the limit of {limit}")

    messages = list(range(1 << params.message_bits))
    if workers <= 1:
        results = [_audit_messages(params, messages)]
    else:
        size = -(-len(messages) // workers)
        chunks = [messages[i:i + size] for i in range(0, len(messages), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_audit_messages, [params] * len(chunks), chunks))

    hits, s, delta = max(results, key=lambda item: (item[0], -item[1], -item[2]))
    max_acceptance = Fraction(hits, 1 << params.m)
    passed = max_acceptance <= params.rho
    logger.info(
        "AMD audit m=%d u=%d: max acceptance %s (rho %s) -> %s",
        params.m, params.u, max_acceptance, params.rho, "pass" if passed else "FAIL",
    )
    return AmdAuditReport(
        m=params.m,
        u=params.u,
        rho=format_probability(params.rho),
        max_acceptance=format_probability(max_acceptance),
        worst_message=BitWord(s, params.message_bits).to_hex(),
        worst_delta=BitWord(delta, params.codeword_bits).to_hex(),
        enumerated=space << params.m,
        passed=passed,
    )
