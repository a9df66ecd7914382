"""
Shared fixtures: persisted toy instances and the tampering corpora.
"""

from pathlib import Path

import pytest

from config.settings import Settings
from schemes.lecss import LecssCode
from schemes.models import LecssParams
from schemes.nm_code import NonMalleableCode, load_scheme

from .corpus import case1_corpus, case2_corpus, case3_corpus, case4_corpus

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SCHEME_M2 = DATA_DIR / "schemes" / "rm16_m2.json"
SCHEME_M3 = DATA_DIR / "schemes" / "rm16_m3.json"
LECSS_RM8 = DATA_DIR / "lecss" / "rm8.json"
LECSS_TOY7 = DATA_DIR / "lecss" / "toy7.json"
TAMPER_DIR = DATA_DIR / "tamper"


@pytest.fixture
def settings():
    return Settings(decode_cache_size=4096, linearity_samples=20_000)


@pytest.fixture
def scheme_params():
    return load_scheme(SCHEME_M2)


@pytest.fixture
def scheme(scheme_params, settings):
    return NonMalleableCode(scheme_params, settings)


@pytest.fixture
def scheme_m3(settings):
    return NonMalleableCode.from_file(SCHEME_M3, settings)


@pytest.fixture
def lecss8():
    return LecssCode(LecssParams.model_validate_json(LECSS_RM8.read_text()))


@pytest.fixture
def lecss_toy7():
    return LecssCode(LecssParams.model_validate_json(LECSS_TOY7.read_text()))


@pytest.fixture
def lecss16(scheme):
    return scheme.lecss


@pytest.fixture(scope="session")
def corpora():
    return {1: case1_corpus(), 2: case2_corpus(), 3: case3_corpus(), 4: case4_corpus()}
