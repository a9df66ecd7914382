"""
The composed non-malleable code Enc(s) = E(A(s)), Dec(c) = V(D(c)).

Encoder randomness (x for the AMD layer, r for the LECSS layer) is always an
explicit argument so the whole randomness space can be enumerated; only
``encode_with_seed`` draws it, from a seeded numpy generator.
"""

from __future__ import annotations

import json
import logging
import threading
from enum import Enum
from pathlib import Path
from typing import Iterator, NamedTuple, Optional, Tuple, Union

import numpy as np
from cachetools import LRUCache, cached

from config import Settings
from tools.gf2 import BitWord, FieldElem

from .amd import AmdCode
from .lecss import LecssCode
from .models import SchemeParams

logger = logging.getLogger(__name__)


class SchemeError(ValueError):
    """Custom exception for composed-scheme errors."""
    pass


class Symbol(str, Enum):
    """Non-message outcomes: decoder rejection and the simulator's placeholder."""

    BOTTOM = "bot"
    SAME = "same*"


Outcome = Union[BitWord, Symbol]


class Encoding(NamedTuple):
    codeword: BitWord
    x: int
    r: BitWord


class NonMalleableCode:
    """AMD code wrapped in a LECSS scheme."""

    def __init__(self, params: SchemeParams, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.params = params
        self.amd = AmdCode(params.amd)
        self.lecss = LecssCode(params.lecss)
        self.k = params.k
        self.n = params.n
        self.m = params.amd.m
        self.z = params.lecss.z
        self.t = params.lecss.t
        self.d = params.lecss.d
        self.rho = params.amd.rho
        if self.settings.decode_cache_size:
            self.dec_int = cached(
                LRUCache(maxsize=self.settings.decode_cache_size), lock=threading.RLock()
            )(self._dec_int)
        else:
            self.dec_int = self._dec_int

    @classmethod
    def from_file(cls, path: Union[str, Path], settings: Optional[Settings] = None) -> "NonMalleableCode":
        return cls(load_scheme(path), settings)

    @property
    def randomness_size(self) -> int:
        return self.params.randomness_size

    def iter_randomness(self) -> Iterator[Tuple[int, int]]:
        """Every (x, r) pair, x outer."""
        for x in range(1 << self.m):
            for r in range(1 << self.z):
                yield x, r

    def enc_int(self, s: int, x: int, r: int) -> int:
        return self.lecss.encode_int(self.amd.encode_int(s, x), r)

    def _dec_int(self, c: int) -> Optional[int]:
        inner = self.lecss.decode_int(c)
        if inner is None:
            return None
        return self.amd.verify_int(inner)

    def enc(self, s: BitWord, x: Union[FieldElem, int], r: BitWord) -> BitWord:
        """Enc(s; x, r) = E(A(s; x), r)."""
        if s.length != self.k:
            raise SchemeError(f"Message has {s.length} bits, expected k = {self.k}")
        if r.length != self.z:
            raise SchemeError(f"LECSS randomness has {r.length} bits, expected z = {self.z}")
        x_value = x.value if isinstance(x, FieldElem) else x
        if not 0 <= x_value < (1 << self.m):
            raise SchemeError(f"AMD randomness {x_value} is not an element of GF(2^{self.m})")
        return BitWord(self.enc_int(s.value, x_value, r.value), self.n)

    def dec(self, c: BitWord) -> Optional[BitWord]:
        """Dec(c): None (reject) if D(c) rejects, else V(D(c))."""
        if c.length != self.n:
            raise SchemeError(f"Codeword has {c.length} bits, expected n = {self.n}")
        s = self.dec_int(c.value)
        return None if s is None else BitWord(s, self.k)

    def encode_with_seed(self, s: BitWord, seed: int) -> Encoding:
        rng = np.random.default_rng(seed)
        x = int(rng.integers(0, 1 << self.m))
        r = BitWord(int(rng.integers(0, 1 << self.z)), self.z)
        logger.debug("Encoding with seed %d: x=%d r=%s", seed, x, r.to_hex())
        return Encoding(self.enc(s, x, r), x, r)


def load_scheme(path: Union[str, Path]) -> SchemeParams:
    with open(path, "r", encoding="utf-8") as handle:
        return SchemeParams.model_validate(json.load(handle))
