"""
Tests for tampering functions: canonical form, application, validation,
partition and case classification.
"""

import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from schemes.models import Partition, ProofCase
from tools.gf2 import BitWord
from tools.tampering import (
    ActionKind,
    BitAction,
    TamperError,
    TamperFunction,
    affine_independence_check,
    canonicalize,
    classify_case,
    matching_cases,
    partition,
    validate,
)

from .conftest import TAMPER_DIR
from .corpus import C0, C1, FLIP, ID, affine, make


def _action_strategy(n: int):
    positions = st.lists(st.integers(min_value=0, max_value=n - 1), max_size=4, unique=True)
    return st.one_of(
        st.sampled_from([C0, C1, ID, FLIP]),
        st.builds(lambda support, b: BitAction.affine(support, b), positions, st.integers(0, 1)),
    )


def _function_strategy(n: int = 8):
    return st.lists(_action_strategy(n), min_size=n, max_size=n).map(
        lambda actions: TamperFunction.from_actions(actions, ell=4)
    )


class TestBitAction:
    """Tests for a single output-bit action."""

    def test_constant_offsets(self):
        """Test that b follows the kind for non-affine actions."""
        assert C0.b == 0
        assert C1.b == 1
        assert ID.b == 0
        assert FLIP.b == 1

    def test_support_sorted(self):
        """Test affine supports are stored sorted."""
        assert BitAction.affine([5, 1, 3]).support == (1, 3, 5)

    def test_invalid_actions(self):
        """Test malformed actions are refused."""
        with pytest.raises(ValidationError):
            BitAction(kind="id", support=(1,))
        with pytest.raises(ValidationError):
            BitAction.affine([2, 2])
        with pytest.raises(ValidationError):
            BitAction.affine([-1])
        with pytest.raises(ValidationError):
            BitAction.affine([1], b=2)
        with pytest.raises(ValueError):
            BitAction(kind="xor")

    def test_json_form(self):
        """Test the file representation of actions."""
        assert C1.to_json_dict() == {"kind": "const1"}
        assert affine(3, 1, b=1).to_json_dict() == {"kind": "affine", "support": [1, 3], "b": 1}


class TestCanonicalize:
    """Tests for folding degenerate affine forms."""

    def test_empty_support_becomes_constant(self):
        """Test an empty affine form is a constant."""
        assert canonicalize(affine(b=1), 4) == C1
        assert canonicalize(affine(), 4) == C0

    def test_own_position_becomes_copy(self):
        """Test support {i} at position i is identity or flip."""
        assert canonicalize(affine(2), 2) == ID
        assert canonicalize(affine(2, b=1), 2) == FLIP

    def test_other_single_position_stays_affine(self):
        """Test support {j} at position i != j stays affine."""
        action = canonicalize(affine(1), 2)
        assert action.kind == ActionKind.AFFINE
        assert action.support == (1,)

    def test_applied_on_construction(self):
        """Test functions canonicalize their actions when built."""
        f = TamperFunction.from_actions([affine(0, b=1), affine(), affine(0, 1)], ell=2)
        assert f.actions[0] == FLIP
        assert f.actions[1] == C0
        assert f.actions[2].kind == ActionKind.AFFINE
        assert f.affine_positions() == [2]

    @given(_function_strategy())
    def test_canonicalization_idempotent(self, f):
        """Test canonicalizing twice changes nothing."""
        again = TamperFunction.model_validate(f.to_json_dict())
        assert again == f
        for i, action in enumerate(f.actions):
            assert canonicalize(action, i) == action


class TestTamperFunction:
    """Tests for loading and applying tampering functions."""

    @pytest.fixture
    def affine_example(self):
        return TamperFunction.load(TAMPER_DIR / "affine_example16.json")

    def test_load(self, affine_example):
        """Test loading a function file."""
        assert affine_example.n == 16
        assert affine_example.ell == 3
        assert affine_example.affine_positions() == [1]
        assert not affine_example.is_bitwise

    @pytest.mark.parametrize("before,after", [("4000", "0000"), ("0000", "4000"), ("c000", "c000")])
    def test_apply_affine(self, affine_example, before, after):
        """Test position 1 becomes c_0 + c_1 + 1."""
        assert affine_example.apply(BitWord.from_hex(before)).to_hex() == after

    def test_actions_read_original_word(self):
        """Test all actions see the input, not earlier outputs."""
        # swap positions 0 and 1
        f = TamperFunction.from_actions([affine(1), affine(0), ID], ell=1)
        assert f.apply(BitWord.from_bits("100")).to_bits() == "010"
        assert f.apply(BitWord.from_bits("011")).to_bits() == "101"

    def test_simple_functions(self):
        """Test identity, constant and flip functions."""
        word = BitWord.from_hex("a5c3")
        assert TamperFunction.identity(16).apply(word) == word
        constant = BitWord.from_hex("0ff0")
        assert TamperFunction.constant(constant).apply(word) == constant
        assert make({}, default=FLIP).apply(word) == ~word
        assert make({}, default=FLIP).is_bitwise

    @given(st.sets(st.integers(min_value=0, max_value=15)), st.integers(min_value=0, max_value=0xFFFF))
    def test_flip_twice_is_identity(self, flipped, c):
        """Test flipping the same positions twice returns the original word."""
        f = make({i: FLIP for i in flipped})
        word = BitWord(c, 16)
        assert f.apply(f.apply(word)) == word
        assert f.apply(f.apply(word)) == TamperFunction.identity(16).apply(word)

    def test_length_mismatch(self):
        """Test applying to a word of the wrong length."""
        with pytest.raises(TamperError):
            TamperFunction.identity(16).apply(BitWord(0, 15))

    def test_support_outside_word(self):
        """Test supports must stay within 0..n-1."""
        with pytest.raises(ValidationError):
            TamperFunction.from_actions([affine(0, 3), ID, ID], ell=2)

    def test_support_of(self):
        """Test dependence sets of each action kind."""
        f = make({0: C1, 1: FLIP, 2: affine(5, 9)})
        assert f.support_of(0) == ()
        assert f.support_of(1) == (1,)
        assert f.support_of(2) == (5, 9)
        assert f.support_of(3) == (3,)

    @given(_function_strategy(), st.integers(min_value=0, max_value=255))
    def test_output_bit_depends_only_on_its_support(self, f, c):
        """Test changing bits outside an action's support leaves its output alone."""
        out = f.apply(BitWord(c, 8))
        for i in range(8):
            support = set(f.support_of(i))
            outside = [j for j in range(8) if j not in support]
            if not outside:
                continue
            mask = BitWord.from_positions(8, outside).value
            assert f.apply(BitWord(c ^ mask, 8)).bit(i) == out.bit(i)

    @given(_function_strategy(), st.integers(min_value=0, max_value=255), st.integers(min_value=0, max_value=255))
    def test_affine_in_the_input(self, f, a, b):
        """Test f(a + b) + f(0) == f(a) + f(b)."""
        apply = f.apply_int
        assert apply(a ^ b) ^ apply(0) == apply(a) ^ apply(b)


class TestValidation:
    """Tests for family-membership checks."""

    def test_valid_function(self):
        """Test a function within its declared ell."""
        report = validate(TamperFunction.load(TAMPER_DIR / "affine_example16.json"))
        assert report.ok
        assert report.rank == 1
        assert report.required_rank == 1
        assert not report.beyond_proof_regime

    def test_support_too_large(self):
        """Test an affine support beyond ell is flagged."""
        f = make({2: affine(0, 1, 3, 4)})
        report = validate(f)
        assert not report.ok
        assert [v.check for v in report.violations] == ["support_size"]
        assert report.violations[0].positions == [2]

    def test_rank_deficient(self):
        """Test duplicated affine supports fail the rank check."""
        report = validate(TamperFunction.load(TAMPER_DIR / "duplicate_affine16.json"))
        assert not report.ok
        assert report.rank == 1
        assert report.required_rank == 2
        assert [v.check for v in report.violations] == ["rank"]
        assert report.violations[0].positions == [3, 4]

    def test_more_affine_positions_than_ell(self):
        """Test r > ell is allowed but flagged."""
        f = make({0: affine(1), 1: affine(2), 2: affine(3), 3: affine(4)}, ell=2)
        report = validate(f)
        assert report.ok
        assert report.required_rank == 2
        assert report.beyond_proof_regime

    def test_bitwise_function(self):
        """Test bitwise functions are always members."""
        report = validate(make({0: C0, 5: FLIP}, ell=0))
        assert report.ok
        assert report.rank == 0


class TestAffineIndependence:
    """Tests for the empirical independence cross-check."""

    def test_independent_outputs(self):
        """Test distinct supports give uniform joint outputs."""
        f = make({3: affine(0, 1), 4: affine(1, 2, b=1), 5: affine(2, 6)})
        assert validate(f).ok
        assert affine_independence_check(f) == []

    def test_dependent_outputs(self):
        """Test identical supports are caught."""
        f = TamperFunction.load(TAMPER_DIR / "duplicate_affine16.json")
        assert affine_independence_check(f) == [[3, 4]]

    def test_sum_of_two_supports(self):
        """Test a support that is the sum of two others."""
        f = make({5: affine(0, 1), 6: affine(1, 2), 7: affine(0, 2)}, ell=3)
        assert not validate(f).ok
        assert affine_independence_check(f) == [[5, 6, 7]]


class TestPartition:
    """Tests for B1/B2/B3 and case classification."""

    def test_partition(self):
        """Test positions split by action kind."""
        part = partition(make({0: C0, 1: C1, 2: FLIP, 3: affine(0, 1)}, n=5))
        assert part.b1 == [0, 1]
        assert part.b2 == [2, 4]
        assert part.b3 == [3]
        assert (part.p, part.q, part.r) == (2, 2, 1)

    def test_partition_json_includes_sizes(self):
        """Test p, q and r appear in the serialized partition."""
        dumped = Partition(b1=[0], b2=[1, 2], b3=[]).model_dump()
        assert dumped["p"] == 1
        assert dumped["q"] == 2
        assert dumped["r"] == 0

    @pytest.mark.parametrize(
        "p,r,n,t,expected",
        [
            (0, 0, 16, 3, ProofCase.CASE1),
            (3, 0, 16, 3, ProofCase.CASE1),
            (2, 1, 16, 3, ProofCase.CASE1),
            (13, 0, 16, 3, ProofCase.CASE2),
            (16, 0, 16, 3, ProofCase.CASE2),
            (4, 0, 16, 3, ProofCase.CASE3),
            (8, 0, 16, 3, ProofCase.CASE3),
            (3, 1, 16, 3, ProofCase.CASE3),
            (9, 0, 16, 3, ProofCase.CASE4),
            (12, 0, 16, 3, ProofCase.CASE4),
            (1, 0, 4, 3, ProofCase.CASE1),
            (2, 0, 4, 3, ProofCase.CASE1),
        ],
    )
    def test_classification(self, p, r, n, t, expected):
        """Test case selection with precedence 1, 2, 3, 4."""
        part = Partition(b1=list(range(p)), b2=list(range(p, n - r)), b3=list(range(n - r, n)))
        assert classify_case(part, n, t) == expected

    def test_overlapping_cases_take_first(self):
        """Test small n where Cases 1 and 2 both hold."""
        # n = 4, t = 3: p = 1 satisfies p <= t and p >= n - t
        assert matching_cases(1, 0, 4, 3) == [ProofCase.CASE1, ProofCase.CASE2]

    def test_classification_is_total(self):
        """Test some case applies to every (p, r) with p + r <= n."""
        for n in range(1, 65):
            for t in range(0, n + 1):
                for p in range(n + 1):
                    for r in range(n - p + 1):
                        assert matching_cases(p, r, n, t), (n, t, p, r)

    def test_size_mismatch(self):
        """Test the partition must cover n positions."""
        with pytest.raises(TamperError):
            classify_case(Partition(b1=[0], b2=[1]), 16, 3)

    def test_corpus_cases(self, corpora):
        """Test every corpus function lands in its case and is valid."""
        for case, functions in corpora.items():
            for f in functions:
                assert classify_case(f.partition(), 16, 3) == case
                assert validate(f).ok
