"""
Linear error-correction secret-sharing (LECSS) over a binary linear code.

The encoder is coset-style: E(msg, r) = msg * G_msg + r * G_rnd, and the
decoder returns the message coordinates of a word in the row space of
[G_msg; G_rnd] or rejects. Each defining property (linearity, distance d,
secrecy t) has its own certifier that checks it by enumeration, falling back
to seeded sampling only where the enumeration would be too large.
"""

from __future__ import annotations

import logging
from collections import Counter
from itertools import combinations
from typing import List, Optional

import numpy as np

from config import Settings
from tools.gf2 import BitWord, Gf2Matrix, dual_distance, min_distance

from .models import CertificateResult, LecssCertificate, LecssParams

logger = logging.getLogger(__name__)

# Above this many entries span and decode tables are not materialized.
TABLE_LIMIT = 1 << 20


class LecssError(ValueError):
    """Custom exception for LECSS encoding errors."""
    pass


def span_table(matrix: Gf2Matrix) -> List[int]:
    """``table[i] == matrix.vec_mul(i)`` for every coefficient vector i."""
    size = matrix.n_rows
    table = [0] * (1 << size)
    for index in range(1, 1 << size):
        low = index & -index
        table[index] = table[index ^ low] ^ matrix.rows[size - low.bit_length()]
    return table


class LecssCode:
    """Encoder E and decoder D for one ``LecssParams`` instance."""

    def __init__(self, params: LecssParams):
        self.params = params
        self.n = params.n
        self.k_msg = params.k_msg
        self.z = params.z
        self.d = params.d
        self.t = params.t
        self.g_msg = params.msg_matrix
        self.g_rnd = params.rnd_matrix
        self.generator = self.g_msg.stack(self.g_rnd)
        self._solver = self.generator.solver()
        self.rnd_table = span_table(self.g_rnd) if (1 << self.z) <= TABLE_LIMIT else None

    def encode_int(self, msg: int, r: int) -> int:
        rnd_part = self.rnd_table[r] if self.rnd_table is not None else self.g_rnd.vec_mul(r)
        return self.g_msg.vec_mul(msg) ^ rnd_part

    def decode_int(self, c: int) -> Optional[int]:
        coordinates = self._solver.coordinates(c)
        if coordinates is None:
            return None
        return coordinates >> self.z

    def encode(self, msg: BitWord, r: BitWord) -> BitWord:
        if msg.length != self.k_msg:
            raise LecssError(f"Message has {msg.length} bits, expected k_msg = {self.k_msg}")
        if r.length != self.z:
            raise LecssError(f"Randomness has {r.length} bits, expected z = {self.z}")
        return BitWord(self.encode_int(msg.value, r.value), self.n)

    def decode(self, c: BitWord) -> Optional[BitWord]:
        """D(c): message bits, or None when c is not a codeword."""
        if c.length != self.n:
            raise LecssError(f"Word has {c.length} bits, expected n = {self.n}")
        msg = self.decode_int(c.value)
        return None if msg is None else BitWord(msg, self.k_msg)

    def decode_table(self) -> Optional[List[Optional[int]]]:
        """D over all of {0,1}^n, when small enough to hold in memory."""
        if (1 << self.n) > TABLE_LIMIT or self.rnd_table is None:
            return None
        table: List[Optional[int]] = [None] * (1 << self.n)
        msg_table = span_table(self.g_msg)
        for msg, msg_word in enumerate(msg_table):
            for rnd_word in self.rnd_table:
                table[msg_word ^ rnd_word] = msg
        return table


def _hex(value: int, length: int) -> str:
    return BitWord(value, length).to_hex()


def certify_correctness(code: LecssCode, limit: int = 1 << 22) -> CertificateResult:
    """D(E(m, r)) == m for every (m, r)."""
    total = 1 << (code.k_msg + code.z)
    if total > limit:
        raise LecssError(f"Correctness enumeration of {total} pairs exceeds the limit of {limit}")
    for msg in range(1 << code.k_msg):
        for r in range(1 << code.z):
            if code.decode_int(code.encode_int(msg, r)) != msg:
                return CertificateResult(
                    name="correctness", passed=False, exhaustive=True, checked=total,
                    counterexample={"msg": _hex(msg, code.k_msg), "r": _hex(r, code.z)},
                )
    return CertificateResult(name="correctness", passed=True, exhaustive=True, checked=total)


def certify_distance(code: LecssCode) -> CertificateResult:
    """Every nonzero word of weight below d is rejected."""
    checked = 0
    for weight in range(1, code.d):
        for positions in combinations(range(code.n), weight):
            word = BitWord.from_positions(code.n, positions).value
            checked += 1
            if code.decode_int(word) is not None:
                return CertificateResult(
                    name="distance", passed=False, exhaustive=True, checked=checked,
                    counterexample={"word": _hex(word, code.n)},
                )
    return CertificateResult(name="distance", passed=True, exhaustive=True, checked=checked)


def certify_linearity(
    code: LecssCode, settings: Optional[Settings] = None, seed: int = 0
) -> CertificateResult:
    """D(c + delta) is reject when D(delta) is, else D(c) + D(delta), for valid c.

    Exhaustive over every codeword and every delta when the pair count is within
    ``settings.linearity_exhaustive_limit``; otherwise ``settings.linearity_samples``
    seeded pairs.
    """
    settings = settings or Settings()
    dimension = code.k_msg + code.z
    pairs = 1 << (dimension + code.n)
    table = code.decode_table()
    decode = table.__getitem__ if table is not None else code.decode_int
    generator = code.generator

    def violates(coordinates: int, delta: int) -> bool:
        c = generator.vec_mul(coordinates)
        decoded_delta = decode(delta)
        expected = None if decoded_delta is None else (coordinates >> code.z) ^ decoded_delta
        return decode(c ^ delta) != expected

    if pairs <= settings.linearity_exhaustive_limit:
        coordinate_space = range(1 << dimension)
        deltas = range(1 << code.n)
        for coordinates in coordinate_space:
            for delta in deltas:
                if violates(coordinates, delta):
                    return _linearity_failure(code, coordinates, delta, True, pairs)
        return CertificateResult(name="linearity", passed=True, exhaustive=True, checked=pairs)

    rng = np.random.default_rng(seed)
    samples = settings.linearity_samples
    coordinate_draws = rng.integers(0, 1 << dimension, size=samples, dtype=np.uint64).tolist()
    delta_draws = rng.integers(0, 1 << code.n, size=samples, dtype=np.uint64).tolist()
    for coordinates, delta in zip(coordinate_draws, delta_draws):
        if violates(coordinates, delta):
            return _linearity_failure(code, coordinates, delta, False, samples)
    return CertificateResult(name="linearity", passed=True, exhaustive=False, checked=samples)


def _linearity_failure(
    code: LecssCode, coordinates: int, delta: int, exhaustive: bool, checked: int
) -> CertificateResult:
    return CertificateResult(
        name="linearity", passed=False, exhaustive=exhaustive, checked=checked,
        counterexample={
            "c": _hex(code.generator.vec_mul(coordinates), code.n),
            "delta": _hex(delta, code.n),
        },
    )


def certify_secrecy(code: LecssCode) -> CertificateResult:
    """For every message and every position set S with |S| <= t, the bits at S
    are exactly uniform over the 2^z randomness values."""
    if code.rnd_table is None:
        raise LecssError(f"Secrecy enumeration over 2^{code.z} randomness values is too large")
    subsets = [
        (size, sum(1 << (code.n - 1 - i) for i in positions), positions)
        for size in range(1, code.t + 1)
        for positions in combinations(range(code.n), size)
    ]
    checked = 0
    for msg in range(1 << code.k_msg):
        base = code.g_msg.vec_mul(msg)
        words = [base ^ rnd_word for rnd_word in code.rnd_table]
        for size, mask, positions in subsets:
            checked += 1
            counts = Counter(word & mask for word in words)
            uniform = size <= code.z and len(counts) == 1 << size and all(
                count == 1 << (code.z - size) for count in counts.values()
            )
            if not uniform:
                return CertificateResult(
                    name="secrecy", passed=False, exhaustive=True, checked=checked,
                    counterexample={
                        "msg": _hex(msg, code.k_msg),
                        "positions": ",".join(str(p) for p in positions),
                    },
                )
    return CertificateResult(name="secrecy", passed=True, exhaustive=True, checked=checked)


def certify_lecss(
    code: LecssCode, settings: Optional[Settings] = None, seed: int = 0
) -> LecssCertificate:
    """Run every certifier and cross-check secrecy against the dual-distance criterion."""
    settings = settings or Settings()
    limit = settings.codeword_enumeration_limit
    distance = min_distance(code.generator, limit)
    dual = dual_distance(code.g_rnd, limit)
    secrecy = certify_secrecy(code)
    certificate = LecssCertificate(
        n=code.n,
        k_msg=code.k_msg,
        z=code.z,
        d=code.d,
        t=code.t,
        min_distance=distance,
        dual_distance=dual,
        correctness=certify_correctness(code),
        distance=certify_distance(code),
        linearity=certify_linearity(code, settings, seed),
        secrecy=secrecy,
        secrecy_agrees_with_dual_distance=(dual > code.t) == secrecy.passed,
        meets_theorem_premise=code.params.meets_theorem_premise,
    )
    logger.info(
        "LECSS n=%d k_msg=%d z=%d: d=%d (certified %d), dual distance %d, verdict %s",
        code.n, code.k_msg, code.z, code.d, distance, dual,
        "pass" if certificate.passed else "FAIL",
    )
    return certificate
