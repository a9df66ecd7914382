"""
Tests for the polynomial-tag AMD code and its exhaustive audits.
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from schemes.amd import AmdCode, AmdError, amd_security_oracle, amd_tag_linearity
from schemes.models import AmdParams, parse_probability
from tools.gf2 import BitWord, get_field


@pytest.fixture
def amd3():
    return AmdCode(AmdParams(m=3, u=1))


class TestAmdParams:
    """Tests for AMD parameter validation."""

    def test_derived_sizes(self):
        """Test message and codeword sizes and the rho bound."""
        params = AmdParams(m=3, u=1)
        assert params.message_bits == 3
        assert params.codeword_bits == 9
        assert params.rho == Fraction(1, 4)
        assert AmdParams(m=8, u=3).rho == Fraction(1, 64)

    def test_even_tag_degree_rejected(self):
        """Test that u + 2 even is refused."""
        with pytest.raises(ValidationError):
            AmdParams(m=3, u=2)

    def test_field_degree_range(self):
        """Test that m outside 2..8 is refused."""
        with pytest.raises(ValidationError):
            AmdParams(m=9, u=1)
        with pytest.raises(ValidationError):
            AmdParams(m=1, u=1)


class TestAmdCode:
    """Tests for encoding and verification."""

    def test_encoding_layout(self, amd3):
        """Test tag = x^3 + s*x laid out after s and x."""
        # in GF(8), x = 2: x^3 = 3, s*x = 2, tag = 1
        assert amd3.tag(1, 2) == 1
        assert amd3.encode_int(1, 2) == 81
        assert amd3.encode(BitWord(1, 3), 2).to_hex() == "9:051"

    def test_encode_from_field_elements(self, amd3):
        """Test encoding a message given as field elements."""
        gf8 = get_field(3)
        assert amd3.encode([gf8(1)], gf8(2)) == amd3.encode(BitWord(1, 3), 2)

    def test_verify_accepts_honest_codewords(self, amd3):
        """Test V(A(s; x)) == s for every s and x."""
        for s in range(8):
            for x in range(8):
                word = amd3.encode(BitWord(s, 3), x)
                assert amd3.verify(word) == BitWord(s, 3)

    @pytest.mark.parametrize("m,u", [(m, u) for m in (2, 3, 4) for u in (1, 3)])
    def test_correctness_exhaustive(self, m, u):
        """Test V(A(s; x)) == s over every message and x for m <= 4, u <= 3."""
        code = AmdCode(AmdParams(m=m, u=u))
        for s in range(1 << code.message_bits):
            for x in range(1 << m):
                assert code.verify_int(code.encode_int(s, x)) == s

    def test_verify_rejects_bad_tag(self, amd3):
        """Test that flipping a tag bit is rejected."""
        word = amd3.encode(BitWord(5, 3), 6)
        assert amd3.verify(word ^ BitWord(1, 9)) is None

    def test_blocks_high_bits_first(self):
        """Test that s_1 comes from the high bits of the message."""
        code = AmdCode(AmdParams(m=2, u=3))
        assert code.blocks(0b011011) == [1, 2, 3]

    def test_length_checks(self, amd3):
        """Test length and range errors."""
        with pytest.raises(AmdError):
            amd3.encode(BitWord(1, 4), 0)
        with pytest.raises(AmdError):
            amd3.encode(BitWord(1, 3), 8)
        with pytest.raises(AmdError):
            amd3.verify(BitWord(0, 8))
        with pytest.raises(AmdError):
            amd3.encode([get_field(4)(1)], 0)

    def test_zero_offset_always_accepted(self, amd3):
        """Test acceptance probability of the zero offset."""
        assert amd3.acceptance_probability(BitWord(3, 3), BitWord(0, 9)) == 1

    def test_nonzero_offsets_within_rho(self, amd3):
        """Test every offset for one message stays within rho."""
        rho = amd3.params.rho
        for delta in range(1, 1 << 9):
            assert amd3.acceptance_probability(BitWord(6, 3), BitWord(delta, 9)) <= rho


class TestAmdAudits:
    """Tests for the exhaustive security oracle and tag linearity."""

    @pytest.mark.parametrize("m", [2, 3])
    def test_oracle_within_rho(self, m):
        """Test the worst acceptance never exceeds (u + 1) / 2^m."""
        params = AmdParams(m=m, u=1)
        report = amd_security_oracle(params)
        assert report.passed
        assert parse_probability(report.max_acceptance) <= params.rho
        assert parse_probability(report.rho) == params.rho
        assert BitWord.from_hex(report.worst_delta).value != 0
        assert report.enumerated == 1 << (params.message_bits + params.codeword_bits + m)

    @pytest.mark.slow
    def test_oracle_m4(self):
        """Test the m = 4 audit."""
        report = amd_security_oracle(AmdParams(m=4, u=1))
        assert report.passed
        assert parse_probability(report.max_acceptance) <= Fraction(2, 16)

    def test_oracle_witness_independent_of_workers(self):
        """Test the audit result does not depend on the worker count."""
        params = AmdParams(m=2, u=1)
        assert amd_security_oracle(params, workers=1) == amd_security_oracle(params, workers=2)

    def test_oracle_limit(self):
        """Test the audit refuses spaces beyond its limit."""
        with pytest.raises(AmdError):
            amd_security_oracle(AmdParams(m=3, u=1), limit=1 << 10)

    @pytest.mark.parametrize("m,u", [(2, 1), (3, 1), (2, 3)])
    def test_tag_linearity(self, m, u):
        """Test the tag is affine in the message for each x."""
        result = amd_tag_linearity(AmdParams(m=m, u=u))
        assert result.name == "tag_linearity"
        assert result.passed
        assert result.exhaustive

    def test_tag_linearity_limit(self):
        """Test the linearity enumeration cap."""
        with pytest.raises(AmdError):
            amd_tag_linearity(AmdParams(m=8, u=1))
