"""
Tests for the composed code Enc(s) = E(A(s)), Dec(c) = V(D(c)).
"""

import pytest
from pydantic import ValidationError

from config.settings import Settings
from schemes.models import SchemeParams
from schemes.nm_code import NonMalleableCode, SchemeError, load_scheme
from tools.gf2 import BitWord

from .conftest import SCHEME_M2


class TestSchemeParams:
    """Tests for loading and checking scheme bundles."""

    def test_load(self, scheme_params):
        """Test the persisted toy scheme."""
        assert scheme_params.name == "rm16-amd-m2"
        assert scheme_params.k == 2
        assert scheme_params.n == 16
        assert scheme_params.randomness_size == 128

    def test_interface_mismatch(self, scheme_params):
        """Test the AMD codeword length must equal the LECSS message length."""
        data = scheme_params.model_dump()
        data["amd"] = {"m": 3, "u": 1}
        with pytest.raises(ValidationError):
            SchemeParams.model_validate(data)

    def test_missing_file(self, tmp_path):
        """Test loading a file that does not exist."""
        with pytest.raises(OSError):
            load_scheme(tmp_path / "missing.json")


class TestNonMalleableCode:
    """Tests for encoding and decoding the composed scheme."""

    def test_attributes(self, scheme):
        """Test derived parameters."""
        assert (scheme.k, scheme.n, scheme.m, scheme.z, scheme.t, scheme.d) == (2, 16, 2, 5, 3, 4)
        assert scheme.rho == scheme.params.amd.rho
        assert len(list(scheme.iter_randomness())) == scheme.randomness_size

    def test_zero_message_zero_randomness(self, scheme):
        """Test Enc(0; 0, 0) is the zero word."""
        assert scheme.enc(BitWord(0, 2), 0, BitWord(0, 5)) == BitWord(0, 16)

    @pytest.mark.parametrize("fixture", ["scheme", "scheme_m3"])
    def test_correctness_exhaustive(self, fixture, request):
        """Test Dec(Enc(s; x, r)) == s for every s, x and r."""
        code = request.getfixturevalue(fixture)
        for s in range(1 << code.k):
            for x, r in code.iter_randomness():
                assert code.dec_int(code.enc_int(s, x, r)) == s

    def test_rejects_low_weight_words(self, scheme):
        """Test weight-1 words are not codewords."""
        for i in range(16):
            assert scheme.dec(BitWord.unit(16, i)) is None

    def test_rejects_forged_tag(self, scheme):
        """Test a LECSS codeword carrying a bad AMD tag is rejected."""
        # AMD word (s=0, x=1, tag=0); the valid tag for x = 1 is 1
        forged = scheme.lecss.encode_int(0b0100, 0)
        assert scheme.dec_int(forged) is None

    def test_encode_with_seed(self, scheme):
        """Test seeded encoding is deterministic and decodes."""
        message = BitWord(0b10, 2)
        first = scheme.encode_with_seed(message, 7)
        assert first == scheme.encode_with_seed(message, 7)
        assert scheme.dec(first.codeword) == message
        assert scheme.enc(message, first.x, first.r) == first.codeword

    def test_argument_checks(self, scheme):
        """Test length and range errors."""
        with pytest.raises(SchemeError):
            scheme.enc(BitWord(0, 3), 0, BitWord(0, 5))
        with pytest.raises(SchemeError):
            scheme.enc(BitWord(0, 2), 4, BitWord(0, 5))
        with pytest.raises(SchemeError):
            scheme.enc(BitWord(0, 2), 0, BitWord(0, 4))
        with pytest.raises(SchemeError):
            scheme.dec(BitWord(0, 15))

    def test_uncached_decoder(self):
        """Test a zero cache size decodes without the LRU layer."""
        code = NonMalleableCode.from_file(SCHEME_M2, Settings(decode_cache_size=0))
        assert code.dec_int == code._dec_int
        assert code.dec(code.enc(BitWord(3, 2), 2, BitWord(9, 5))) == BitWord(3, 2)
