"""
Non-malleability analysis of a composed scheme against one tampering function.

Exact mode enumerates every encoder randomness (x, r) and works in rationals;
sampled mode draws (x, r) in fixed-size chunks. Chunk i of message s is seeded
from ``SeedSequence(seed, spawn_key=(purpose, s, i))``, with one purpose per
stream (tampered runs, the simulator, message draws). The result depends on
the seed and chunk size but never on how chunks are spread over workers.

Simulator distributions D_f follow the case split of the security argument:
Case 1 maps each offset delta of the reference message 0^k to same* or bot,
Case 2 decodes the tampered reference codeword, Cases 3 and 4 always output bot.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Literal, Optional, Tuple

import numpy as np

from schemes.models import (
    CertificationReport,
    ProofCase,
    SchemeParams,
    format_probability,
)
from schemes.nm_code import NonMalleableCode, Symbol
from tools.bounds import epsilon_bound
from tools.distributions import Distribution, Mass, patch, statistical_distance
from tools.gf2 import BitWord
from tools.tampering import TamperFunction, classify_case, partition, validate

logger = logging.getLogger(__name__)

Mode = Literal["exact", "sampled"]

BOTTOM_KEY = -1
SAME_KEY = -2

# What each pass over the randomness records per sample.
DECODE = "decode"
SAME_OR_BOTTOM = "same_or_bottom"

# Stream purposes; keys are (purpose, s, chunk) of 32-bit words.
TAMPER_STREAM = 0
SIMULATOR_STREAM = 1
MESSAGE_STREAM = 2
MAX_SAMPLED_MESSAGE_BITS = 32

Counts = Tuple[Counter, int, int]


class AnalysisError(ValueError):
    """Custom exception for analysis errors (oversize instances, missing seeds)."""
    pass


def _escapes(case: int, inner: Optional[int]) -> bool:
    """Whether D(delta) = ``inner`` falls outside what D_f accounts for."""
    if case == ProofCase.CASE1:
        return inner is not None and inner != 0
    if case == ProofCase.CASE2:
        return False
    return inner is not None


def _count(
    code: NonMalleableCode,
    f: TamperFunction,
    case: int,
    observable: str,
    s: int,
    randomness: Iterable[Tuple[int, int]],
) -> Counts:
    """Outcome counts of one observable over the given (x, r), plus how often
    D(delta) escapes D_f and how often it is accepted at all."""
    enc, apply = code.enc_int, f.apply_int
    dec, lecss_decode = code.dec_int, code.lecss.decode_int
    counts: Counter = Counter()
    escapes = accepts = 0
    for x, r in randomness:
        c = enc(s, x, r)
        tampered = apply(c)
        inner = lecss_decode(tampered ^ c)
        if observable == DECODE:
            out = dec(tampered)
            counts[BOTTOM_KEY if out is None else out] += 1
            if inner is not None:
                accepts += 1
                escapes += _escapes(case, inner)
        else:
            counts[SAME_KEY if inner == 0 else BOTTOM_KEY] += 1
    return counts, escapes, accepts


def stream_rng(seed: int, purpose: int, s: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(purpose, s, chunk)))


def _chunk_randomness(
    m: int, z: int, seed: int, purpose: int, s: int, chunk: int, size: int
) -> Iterator[Tuple[int, int]]:
    rng = stream_rng(seed, purpose, s, chunk)
    xs = rng.integers(0, 1 << m, size=size, dtype=np.uint64).tolist()
    rs = rng.integers(0, 1 << z, size=size, dtype=np.uint64).tolist() if z else [0] * size
    return zip(xs, rs)


def _exact_counts(
    code: NonMalleableCode, f: TamperFunction, case: int, observable: str, messages: List[int]
) -> List[Counts]:
    return [_count(code, f, case, observable, s, code.iter_randomness()) for s in messages]


def _sampled_counts(
    code: NonMalleableCode,
    f: TamperFunction,
    case: int,
    observable: str,
    s: int,
    seed: int,
    purpose: int,
    chunks: List[int],
    chunk_size: int,
    samples: int,
) -> Counts:
    counts: Counter = Counter()
    escapes = accepts = 0
    for chunk in chunks:
        size = min(chunk_size, samples - chunk * chunk_size)
        randomness = _chunk_randomness(code.m, code.z, seed, purpose, s, chunk, size)
        chunk_counts, chunk_escapes, chunk_accepts = _count(code, f, case, observable, s, randomness)
        counts.update(chunk_counts)
        escapes += chunk_escapes
        accepts += chunk_accepts
    return counts, escapes, accepts


def _exact_worker(
    params: SchemeParams, f: TamperFunction, case: int, observable: str, messages: List[int]
) -> List[Counts]:
    return _exact_counts(NonMalleableCode(params), f, case, observable, messages)


def _sampled_worker(params: SchemeParams, *args) -> Counts:
    return _sampled_counts(NonMalleableCode(params), *args)


class _Runner:
    """Shared plumbing for exact and sampled passes over the randomness space."""

    def __init__(
        self,
        code: NonMalleableCode,
        f: TamperFunction,
        case: int,
        mode: Mode,
        samples: Optional[int],
        seed: Optional[int],
        workers: Optional[int],
    ):
        if f.n != code.n:
            raise AnalysisError(f"Tampering function has length {f.n}, scheme has n = {code.n}")
        self.code = code
        self.f = f
        self.case = int(case)
        self.mode = mode
        self.settings = code.settings
        self.workers = self.settings.worker_cap(workers)
        if mode == "exact":
            if code.randomness_size > self.settings.exact_randomness_limit:
                raise AnalysisError(
                    f"Randomness space 2^{code.randomness_size.bit_length() - 1} exceeds the exact "
                    f"limit of {self.settings.exact_randomness_limit}; use sampled mode"
                )
            self.total = code.randomness_size
        elif mode == "sampled":
            if seed is None:
                raise AnalysisError("Sampled mode needs an explicit seed")
            if seed < 0:
                raise AnalysisError("Seed must be non-negative")
            if code.k > MAX_SAMPLED_MESSAGE_BITS:
                raise AnalysisError(f"Sampled mode supports k <= {MAX_SAMPLED_MESSAGE_BITS}, got {code.k}")
            self.total = samples or self.settings.default_samples
        else:
            raise AnalysisError(f"Unknown mode {mode!r}")
        self.seed = seed

    def run(self, observable: str, messages: List[int], purpose: int = TAMPER_STREAM) -> List[Counts]:
        if self.mode == "exact":
            return self._run_exact(observable, messages)
        return [self._run_sampled(observable, s, purpose) for s in messages]

    def _run_exact(self, observable: str, messages: List[int]) -> List[Counts]:
        if self.workers <= 1 or len(messages) <= 1:
            return _exact_counts(self.code, self.f, self.case, observable, messages)
        size = -(-len(messages) // self.workers)
        chunks = [messages[i:i + size] for i in range(0, len(messages), size)]
        results: List[Counts] = []
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            for part in pool.map(
                _exact_worker,
                [self.code.params] * len(chunks),
                [self.f] * len(chunks),
                [self.case] * len(chunks),
                [observable] * len(chunks),
                chunks,
            ):
                results.extend(part)
        return results

    def _run_sampled(self, observable: str, s: int, purpose: int) -> Counts:
        chunk_size = self.settings.sample_chunk_size
        n_chunks = -(-self.total // chunk_size)
        if self.workers <= 1 or n_chunks <= 1:
            return _sampled_counts(
                self.code, self.f, self.case, observable, s, self.seed, purpose,
                list(range(n_chunks)), chunk_size, self.total,
            )
        assignments = [list(range(i, n_chunks, self.workers)) for i in range(self.workers)]
        assignments = [chunks for chunks in assignments if chunks]
        counts: Counter = Counter()
        escapes = accepts = 0
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futures = [
                pool.submit(
                    _sampled_worker, self.code.params, self.f, self.case, observable, s,
                    self.seed, purpose, chunks, chunk_size, self.total,
                )
                for chunks in assignments
            ]
            for future in futures:
                part_counts, part_escapes, part_accepts = future.result()
                counts.update(part_counts)
                escapes += part_escapes
                accepts += part_accepts
        return counts, escapes, accepts

    def distribution(self, counts: Counter) -> Distribution:
        k = self.code.k
        outcomes: Dict = {}
        for key, count in counts.items():
            if key == BOTTOM_KEY:
                outcomes[Symbol.BOTTOM] = count
            elif key == SAME_KEY:
                outcomes[Symbol.SAME] = count
            else:
                outcomes[BitWord(key, k)] = count
        return Distribution.from_counts(outcomes, self.total, mode=self.mode, seed=self.seed)

    def probability(self, count: int) -> Mass:
        if self.mode == "exact":
            return Fraction(count, self.total)
        return count / self.total


def tamper_distribution(
    code: NonMalleableCode,
    f: TamperFunction,
    s: BitWord,
    mode: Mode = "exact",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Distribution:
    """Distribution of Dec(f(Enc(s; x, r))) over uniform (x, r)."""
    if s.length != code.k:
        raise AnalysisError(f"Message has {s.length} bits, expected k = {code.k}")
    runner = _Runner(code, f, ProofCase.CASE2, mode, samples, seed, workers)
    [(counts, _, _)] = runner.run(DECODE, [s.value])
    return runner.distribution(counts)


def build_df(
    code: NonMalleableCode,
    f: TamperFunction,
    case: Optional[ProofCase] = None,
    mode: Mode = "exact",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> Distribution:
    """The message-independent simulator distribution D_f, built from the reference message 0^k."""
    if case is None:
        case = classify_case(partition(f), code.n, code.t)
    if case in (ProofCase.CASE3, ProofCase.CASE4):
        return Distribution.point_mass(Symbol.BOTTOM)
    runner = _Runner(code, f, case, mode, samples, seed, workers)
    observable = SAME_OR_BOTTOM if case == ProofCase.CASE1 else DECODE
    [(counts, _, _)] = runner.run(observable, [0], purpose=SIMULATOR_STREAM)
    return runner.distribution(counts)


def _word_distribution(code: NonMalleableCode, f: TamperFunction, s: BitWord, offset: bool) -> Distribution:
    if s.length != code.k:
        raise AnalysisError(f"Message has {s.length} bits, expected k = {code.k}")
    if code.randomness_size > code.settings.exact_randomness_limit:
        raise AnalysisError("Randomness space too large to enumerate")
    counts: Counter = Counter()
    for x, r in code.iter_randomness():
        c = code.enc_int(s.value, x, r)
        tampered = f.apply_int(c)
        counts[tampered ^ c if offset else tampered] += 1
    return Distribution.from_counts(
        {BitWord(word, code.n): count for word, count in counts.items()}, code.randomness_size
    )


def delta_distribution(code: NonMalleableCode, f: TamperFunction, s: BitWord) -> Distribution:
    """Exact distribution of the offset f(Enc(s)) + Enc(s)."""
    return _word_distribution(code, f, s, offset=True)


def tampered_codeword_distribution(code: NonMalleableCode, f: TamperFunction, s: BitWord) -> Distribution:
    """Exact distribution of f(Enc(s))."""
    return _word_distribution(code, f, s, offset=False)


def _all_messages(code: NonMalleableCode) -> List[BitWord]:
    if code.k > code.settings.exact_message_bits_limit:
        raise AnalysisError(
            f"k = {code.k} exceeds the exact message limit of {code.settings.exact_message_bits_limit} bits"
        )
    return [BitWord(s, code.k) for s in range(1 << code.k)]


def message_independence(
    code: NonMalleableCode, f: TamperFunction, case: Optional[ProofCase] = None
) -> Optional[bool]:
    """Case 1: is the offset distribution the same for every message? Case 2: is
    the tampered codeword distribution? None for Cases 3 and 4."""
    if case is None:
        case = classify_case(partition(f), code.n, code.t)
    if case == ProofCase.CASE1:
        observe = delta_distribution
    elif case == ProofCase.CASE2:
        observe = tampered_codeword_distribution
    else:
        return None
    messages = _all_messages(code)
    reference = observe(code, f, messages[0])
    return all(observe(code, f, s) == reference for s in messages[1:])


def fact_check(code: NonMalleableCode, f: TamperFunction, s: Optional[BitWord] = None) -> List[List[int]]:
    """Subsets of affine positions, of size at most t, whose tampered bits are
    not jointly uniform over the encodings of s (every s when omitted)."""
    affine = partition(f).b3
    if not affine:
        return []
    if code.randomness_size > code.settings.exact_randomness_limit:
        raise AnalysisError("Randomness space too large to enumerate")
    messages = [s] if s is not None else _all_messages(code)
    subsets = [
        (list(chosen), sum(1 << (code.n - 1 - i) for i in chosen))
        for size in range(1, min(code.t, len(affine)) + 1)
        for chosen in combinations(affine, size)
    ]
    failing: List[List[int]] = []
    for message in messages:
        tampered = [f.apply_int(code.enc_int(message.value, x, r)) for x, r in code.iter_randomness()]
        for chosen, mask in subsets:
            if chosen in failing:
                continue
            counts = Counter(word & mask for word in tampered)
            expected = Fraction(len(tampered), 1 << len(chosen))
            if len(counts) != 1 << len(chosen) or any(count != expected for count in counts.values()):
                failing.append(chosen)
    return sorted(failing)


def escape_probability(
    code: NonMalleableCode, f: TamperFunction, s: BitWord, case: Optional[ProofCase] = None
) -> Fraction:
    """Exact probability that D(delta) escapes D_f's accounting: D(delta) not in
    {bot, 0} for Case 1, D(delta) != bot for Cases 3 and 4, zero for Case 2."""
    if case is None:
        case = classify_case(partition(f), code.n, code.t)
    if case == ProofCase.CASE2:
        return Fraction(0)
    deltas = delta_distribution(code, f, s)
    decode = code.lecss.decode_int
    return deltas.mass_where(lambda delta: _escapes(case, decode(delta.value)))


def offset_acceptance_probability(code: NonMalleableCode, f: TamperFunction, s: BitWord) -> Fraction:
    """Exact Pr[D(delta) != bot] over the encodings of s, whatever the case."""
    decode = code.lecss.decode_int
    return delta_distribution(code, f, s).mass_where(lambda delta: decode(delta.value) is not None)


def _messages_for(code: NonMalleableCode, mode: Mode, seed: Optional[int]) -> List[int]:
    settings = code.settings
    if code.k <= settings.exact_message_bits_limit:
        return list(range(1 << code.k))
    if mode == "exact":
        raise AnalysisError(
            f"k = {code.k} exceeds the exact message limit of {settings.exact_message_bits_limit} bits"
        )
    rng = stream_rng(seed, MESSAGE_STREAM, 0, 0)
    drawn = rng.integers(0, 1 << code.k, size=settings.message_samples, dtype=np.uint64).tolist()
    return sorted(set(drawn))


def nm_certify(
    code: NonMalleableCode,
    f: TamperFunction,
    mode: Mode = "exact",
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
) -> CertificationReport:
    """max over s of SD(Tamper^f_s, Patch(D_f, s)) against the applicable threshold.

    With the bound's premises met the threshold is the epsilon bound; otherwise
    it is max(rho, escape probability), the inequality the case analysis rests on.
    The report also carries max(rho, Pr[D(delta) != bot]), the coarser threshold
    that ignores which accepted offsets D_f already accounts for.
    Sampled runs are given a tolerance of 3 * sqrt(|support| / samples).
    """
    validation = validate(f)
    if not validation.ok:
        raise AnalysisError("Tampering function failed validation: " + "; ".join(
            violation.detail for violation in validation.violations
        ))
    part = partition(f)
    case = classify_case(part, code.n, code.t)
    bound = epsilon_bound(code.rho, code.n, code.d, code.t, p=part.p, r=part.r, case=int(case))

    runner = _Runner(code, f, case, mode, samples, seed, workers)
    df = build_df(code, f, case, mode, samples, seed, workers)
    messages = _messages_for(code, mode, seed)
    results = runner.run(DECODE, messages)

    per_s: Dict[str, Mass] = {}
    max_sd: Mass = Fraction(0) if mode == "exact" else 0.0
    escape: Mass = Fraction(0) if mode == "exact" else 0.0
    acceptance: Mass = escape
    tolerance = 0.0
    for s_value, (counts, escapes, accepts) in zip(messages, results):
        s = BitWord(s_value, code.k)
        observed = runner.distribution(counts)
        patched = patch(df, s)
        sd = statistical_distance(observed, patched)
        per_s[s.to_hex()] = sd
        max_sd = max(max_sd, sd)
        escape = max(escape, runner.probability(escapes))
        acceptance = max(acceptance, runner.probability(accepts))
        if mode == "sampled":
            support = len(observed.support | patched.support)
            tolerance = max(tolerance, 3 * math.sqrt(support / runner.total))

    rho: Mass = code.rho if mode == "exact" else float(code.rho)
    if bound.premises_met:
        criterion = "theorem"
        threshold: Mass = bound.epsilon
    else:
        criterion = "substitute"
        threshold = max(rho, escape)
    if mode == "exact":
        passed = max_sd <= threshold
    else:
        passed = max_sd <= threshold + tolerance

    message_independent = message_independence(code, f, case) if mode == "exact" else None
    fact_violations = fact_check(code, f) if mode == "exact" else []

    report = CertificationReport(
        case=int(case),
        p=part.p,
        q=part.q,
        r=part.r,
        mode=mode,
        samples=runner.total if mode == "sampled" else None,
        seed=seed if mode == "sampled" else None,
        epsilon=bound.epsilon,
        epsilon_components=bound.components,
        premises=bound.premises,
        criterion=criterion,
        threshold=format_probability(threshold),
        escape_probability=format_probability(escape),
        acceptance_probability=format_probability(acceptance),
        acceptance_threshold=format_probability(max(rho, acceptance)),
        bitwise_premise=code.params.lecss.meets_bitwise_premise if f.is_bitwise else None,
        max_sd=format_probability(max_sd),
        tolerance=tolerance,
        per_s_sd={key: format_probability(value) for key, value in per_s.items()},
        df=df.to_json(),
        message_independent=message_independent,
        fact_violations=fact_violations,
        passed=passed,
    )
    logger.info(
        "Case %d (p=%d q=%d r=%d): max SD %s vs %s threshold %s -> %s",
        case, part.p, part.q, part.r, report.max_sd, criterion, report.threshold,
        "pass" if passed else "FAIL",
    )
    return report
