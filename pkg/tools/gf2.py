"""
Exact arithmetic over GF(2) and small binary extension fields.

Vectors and matrix rows are Python ints used as bitsets. Bit position 0 of a
word is its most significant bit, so ``BitWord.from_bits("1011")`` reads left
to right and position 0 stands for the first coordinate of the codeword.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

CODEWORD_ENUMERATION_LIMIT = 1 << 24

# Smallest irreducible polynomial of each degree, written as an int with the
# leading term included (x^3 + x + 1 -> 0b1011).
IRREDUCIBLE_MODULI: Dict[int, int] = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
}


class Gf2Error(ValueError):
    """Custom exception for GF(2) arithmetic errors."""
    pass


@dataclass(frozen=True, slots=True)
class BitWord:
    """Fixed-length vector over GF(2)."""

    value: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise Gf2Error(f"Bit length must be non-negative, got {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise Gf2Error(f"Value {self.value:#x} does not fit in {self.length} bits")

    @classmethod
    def zeros(cls, length: int) -> "BitWord":
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> "BitWord":
        return cls((1 << length) - 1, length)

    @classmethod
    def unit(cls, length: int, position: int) -> "BitWord":
        """Word with a single 1 at ``position``."""
        if not 0 <= position < length:
            raise Gf2Error(f"Position {position} outside 0..{length - 1}")
        return cls(1 << (length - 1 - position), length)

    @classmethod
    def from_bits(cls, bits: str | Sequence[int]) -> "BitWord":
        """Build from ``"1011"`` or ``[1, 0, 1, 1]`` (position 0 first)."""
        if isinstance(bits, str):
            bits = bits.replace(" ", "").replace("_", "")
            if any(ch not in "01" for ch in bits):
                raise Gf2Error(f"Not a bit string: {bits!r}")
            return cls(int(bits, 2) if bits else 0, len(bits))
        value = 0
        for bit in bits:
            if bit not in (0, 1):
                raise Gf2Error(f"Not a bit: {bit!r}")
            value = (value << 1) | bit
        return cls(value, len(bits))

    @classmethod
    def from_positions(cls, length: int, positions: Sequence[int]) -> "BitWord":
        value = 0
        for position in positions:
            value |= cls.unit(length, position).value
        return cls(value, length)

    @classmethod
    def from_hex(cls, text: str, length: Optional[int] = None) -> "BitWord":
        """Parse the text form: plain hex, or ``"L:hex"`` when L is not a multiple of 4."""
        text = text.strip().lower()
        if ":" in text:
            declared, text = text.split(":", 1)
            try:
                declared_length = int(declared)
            except ValueError as exc:
                raise Gf2Error(f"Malformed bit-length field in {declared!r}") from exc
            if length is not None and length != declared_length:
                raise Gf2Error(f"Declared length {declared_length} differs from expected {length}")
            length = declared_length
        if text.startswith("0x"):
            text = text[2:]
        if length is None:
            length = 4 * len(text)
        try:
            value = int(text, 16) if text else 0
        except ValueError as exc:
            raise Gf2Error(f"Malformed hex string {text!r}") from exc
        return cls(value, length)

    def to_hex(self) -> str:
        digits = (self.length + 3) // 4
        body = format(self.value, f"0{digits}x") if digits else ""
        if self.length % 4:
            return f"{self.length}:{body}"
        return body

    def to_bits(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def bit(self, position: int) -> int:
        if not 0 <= position < self.length:
            raise Gf2Error(f"Position {position} outside 0..{self.length - 1}")
        return (self.value >> (self.length - 1 - position)) & 1

    def weight(self) -> int:
        return self.value.bit_count()

    def support(self) -> List[int]:
        return [i for i in range(self.length) if self.bit(i)]

    def concat(self, other: "BitWord") -> "BitWord":
        return BitWord((self.value << other.length) | other.value, self.length + other.length)

    def split(self, sizes: Sequence[int]) -> List["BitWord"]:
        """Cut into consecutive blocks of the given sizes, position 0 first."""
        if sum(sizes) != self.length:
            raise Gf2Error(f"Block sizes {list(sizes)} do not add up to {self.length}")
        blocks = []
        remaining = self.length
        for size in sizes:
            remaining -= size
            blocks.append(BitWord((self.value >> remaining) & ((1 << size) - 1), size))
        return blocks

    def _check_length(self, other: "BitWord") -> None:
        if self.length != other.length:
            raise Gf2Error(f"Length mismatch: {self.length} vs {other.length}")

    def __xor__(self, other: "BitWord") -> "BitWord":
        self._check_length(other)
        return BitWord(self.value ^ other.value, self.length)

    def __and__(self, other: "BitWord") -> "BitWord":
        self._check_length(other)
        return BitWord(self.value & other.value, self.length)

    def __invert__(self) -> "BitWord":
        return BitWord(self.value ^ ((1 << self.length) - 1), self.length)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bit(i) for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __str__(self) -> str:
        return self.to_bits()


def hamming_weight(x: BitWord) -> int:
    return x.value.bit_count()


def hamming_distance(x: BitWord, y: BitWord) -> int:
    """d_H(x, y) = w_H(x XOR y); raises on length mismatch."""
    return hamming_weight(x ^ y)


def _reduce_against(vec: int, pivots: Dict[int, int]) -> int:
    while vec:
        lead = vec.bit_length() - 1
        pivot = pivots.get(lead)
        if pivot is None:
            return vec
        vec ^= pivot
    return 0


@dataclass(frozen=True)
class Gf2Matrix:
    """Matrix over GF(2); each row is an int of ``cols`` bits (column 0 = MSB)."""

    rows: Tuple[int, ...]
    cols: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        for row in self.rows:
            if row < 0 or row >> self.cols:
                raise Gf2Error(f"Row {row:#x} does not fit in {self.cols} columns")

    @classmethod
    def from_words(cls, words: Sequence[BitWord], cols: Optional[int] = None) -> "Gf2Matrix":
        if cols is None:
            if not words:
                raise Gf2Error("Column count required for an empty matrix")
            cols = words[0].length
        for word in words:
            if word.length != cols:
                raise Gf2Error(f"Row length {word.length} differs from {cols}")
        return cls(tuple(word.value for word in words), cols)

    @classmethod
    def from_bit_rows(cls, rows: Sequence[str], cols: Optional[int] = None) -> "Gf2Matrix":
        return cls.from_words([BitWord.from_bits(row) for row in rows], cols)

    @classmethod
    def from_hex_rows(cls, rows: Sequence[str], cols: int) -> "Gf2Matrix":
        return cls(tuple(BitWord.from_hex(row, cols).value for row in rows), cols)

    @classmethod
    def identity(cls, size: int) -> "Gf2Matrix":
        return cls(tuple(1 << (size - 1 - i) for i in range(size)), size)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def row(self, index: int) -> BitWord:
        return BitWord(self.rows[index], self.cols)

    def to_hex_rows(self) -> List[str]:
        return [BitWord(row, self.cols).to_hex() for row in self.rows]

    def stack(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if other.cols != self.cols:
            raise Gf2Error(f"Cannot stack {self.cols}-column and {other.cols}-column matrices")
        return Gf2Matrix(self.rows + other.rows, self.cols)

    def without_row(self, index: int) -> "Gf2Matrix":
        return Gf2Matrix(self.rows[:index] + self.rows[index + 1:], self.cols)

    def rank(self) -> int:
        pivots: Dict[int, int] = {}
        for row in self.rows:
            reduced = _reduce_against(row, pivots)
            if reduced:
                pivots[reduced.bit_length() - 1] = reduced
        return len(pivots)

    def has_full_row_rank(self) -> bool:
        return self.rank() == self.n_rows

    def vec_mul(self, coefficients: int) -> int:
        """Row vector (``n_rows`` bits, row 0 = MSB) times the matrix."""
        out = 0
        for index, row in enumerate(self.rows):
            if (coefficients >> (self.n_rows - 1 - index)) & 1:
                out ^= row
        return out

    def row_space(self) -> Iterator[int]:
        """Every word of the row space, zero first, in Gray-code order."""
        word = 0
        yield word
        for step in range(1, 1 << self.n_rows):
            word ^= self.rows[(step & -step).bit_length() - 1]
            yield word

    def rref(self) -> Tuple[List[int], List[int]]:
        """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
        rows = list(self.rows)
        pivot_cols: List[int] = []
        top = 0
        for col in range(self.cols):
            if top == len(rows):
                break
            bit = 1 << (self.cols - 1 - col)
            pivot = next((i for i in range(top, len(rows)) if rows[i] & bit), None)
            if pivot is None:
                continue
            rows[top], rows[pivot] = rows[pivot], rows[top]
            for i in range(len(rows)):
                if i != top and rows[i] & bit:
                    rows[i] ^= rows[top]
            pivot_cols.append(col)
            top += 1
        return rows[:top], pivot_cols

    def null_space(self) -> "Gf2Matrix":
        """Basis of {x : M x^T = 0}, one row per free column."""
        reduced, pivot_cols = self.rref()
        pivot_set = set(pivot_cols)
        basis = []
        for free in range(self.cols):
            if free in pivot_set:
                continue
            free_bit = 1 << (self.cols - 1 - free)
            vec = free_bit
            for row, pivot_col in zip(reduced, pivot_cols):
                if row & free_bit:
                    vec |= 1 << (self.cols - 1 - pivot_col)
            basis.append(vec)
        return Gf2Matrix(tuple(basis), self.cols)

    def solver(self) -> "RowSpaceSolver":
        return RowSpaceSolver(self)


class RowSpaceSolver:
    """Solves x * M = w for full-row-rank M, returning x as an ``n_rows``-bit int."""

    def __init__(self, matrix: Gf2Matrix):
        self.matrix = matrix
        size = matrix.n_rows
        self._pivots: Dict[int, Tuple[int, int]] = {}
        for index, row in enumerate(matrix.rows):
            vec, combo = row, 1 << (size - 1 - index)
            while vec:
                lead = vec.bit_length() - 1
                entry = self._pivots.get(lead)
                if entry is None:
                    self._pivots[lead] = (vec, combo)
                    break
                vec ^= entry[0]
                combo ^= entry[1]
            else:
                raise Gf2Error(f"Row {index} is dependent on earlier rows; matrix is rank-deficient")

    def coordinates(self, word: int) -> Optional[int]:
        """Coordinate vector of ``word`` in the row space, or None if outside it."""
        combo = 0
        pivots = self._pivots
        while word:
            entry = pivots.get(word.bit_length() - 1)
            if entry is None:
                return None
            word ^= entry[0]
            combo ^= entry[1]
        return combo


def rank(matrix: Gf2Matrix) -> int:
    return matrix.rank()


def min_distance(generator: Gf2Matrix, limit: int = CODEWORD_ENUMERATION_LIMIT) -> int:
    """Minimum weight over all nonzero codewords, by exhaustive enumeration.

    A generator with no rows spans only the zero word; ``cols + 1`` is returned
    as the empty-code sentinel.
    """
    if not generator.has_full_row_rank():
        raise Gf2Error("min_distance needs a full-row-rank generator")
    if (1 << generator.n_rows) > limit:
        raise Gf2Error(
            f"{generator.n_rows} generator rows exceed the enumeration cap of {limit} codewords"
        )
    best = generator.cols + 1
    words = generator.row_space()
    next(words)
    for word in words:
        weight = word.bit_count()
        if weight < best:
            best = weight
            if best == 1:
                break
    return best


def dual_distance(generator: Gf2Matrix, limit: int = CODEWORD_ENUMERATION_LIMIT) -> int:
    """Minimum distance of the dual code; ``cols + 1`` when the dual is {0}."""
    if not generator.has_full_row_rank():
        raise Gf2Error("dual_distance needs a full-row-rank generator")
    dual = generator.null_space()
    if dual.n_rows == 0:
        return generator.cols + 1
    return min_distance(dual, limit)


class BinaryField:
    """GF(2^m) with a fixed irreducible modulus and a precomputed product table."""

    def __init__(self, m: int, modulus: Optional[int] = None):
        if modulus is None:
            if m not in IRREDUCIBLE_MODULI:
                raise Gf2Error(f"No fixed modulus for degree {m}; supported: {sorted(IRREDUCIBLE_MODULI)}")
            modulus = IRREDUCIBLE_MODULI[m]
        if modulus.bit_length() - 1 != m:
            raise Gf2Error(f"Modulus {modulus:#b} does not have degree {m}")
        if not is_irreducible(modulus):
            raise Gf2Error(f"Modulus {modulus:#b} is reducible")
        self.m = m
        self.modulus = modulus
        self.order = 1 << m
        self._table = [
            [_poly_mulmod(a, b, modulus, m) for b in range(self.order)]
            for a in range(self.order)
        ]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryField) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.m, self.modulus))

    def __repr__(self) -> str:
        return f"BinaryField(m={self.m}, modulus={self.modulus:#b})"

    def __call__(self, value: int) -> "FieldElem":
        return FieldElem(value, self)

    def mul(self, a: int, b: int) -> int:
        return self._table[a][b]

    def pow(self, a: int, exponent: int) -> int:
        result, base = 1, a
        while exponent:
            if exponent & 1:
                result = self._table[result][base]
            base = self._table[base][base]
            exponent >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise Gf2Error("Zero has no multiplicative inverse")
        return self.pow(a, self.order - 2)

    def elements(self) -> Iterator["FieldElem"]:
        return (FieldElem(value, self) for value in range(self.order))


def _poly_mulmod(a: int, b: int, modulus: int, m: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= modulus
    return result


def _poly_mod(a: int, modulus: int) -> int:
    degree = modulus.bit_length() - 1
    while a and a.bit_length() - 1 >= degree:
        a ^= modulus << (a.bit_length() - 1 - degree)
    return a


def is_irreducible(poly: int) -> bool:
    """Brute-force irreducibility test over GF(2) (small degrees only)."""
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    for divisor in range(2, 1 << (degree // 2 + 1)):
        if _poly_mod(poly, divisor) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def get_field(m: int) -> BinaryField:
    return BinaryField(m)


@dataclass(frozen=True)
class FieldElem:
    """Element of a ``BinaryField``; ``value`` holds the polynomial residue as an int."""

    value: int
    field: BinaryField

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.field.order:
            raise Gf2Error(f"{self.value} is not an element of GF(2^{self.field.m})")

    def _check_field(self, other: "FieldElem") -> None:
        if self.field != other.field:
            raise Gf2Error(f"Modulus mismatch: {self.field!r} vs {other.field!r}")

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._check_field(other)
        return FieldElem(self.value ^ other.value, self.field)

    __sub__ = __add__

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._check_field(other)
        return FieldElem(self.field.mul(self.value, other.value), self.field)

    def __pow__(self, exponent: int) -> "FieldElem":
        return FieldElem(self.field.pow(self.value, exponent), self.field)

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field.inv(self.value), self.field)

    def to_word(self) -> BitWord:
        return BitWord(self.value, self.field.m)


def field_add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def field_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def field_pow(a: FieldElem, exponent: int) -> FieldElem:
    return a ** exponent


def field_inv(a: FieldElem) -> FieldElem:
    return a.inverse()
