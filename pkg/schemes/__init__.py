"""
Coding schemes: the AMD code, the LECSS code and their composition.
"""

from .amd import AmdCode, AmdError, amd_security_oracle, amd_tag_linearity
from .lecss import LecssCode, LecssError, certify_lecss
from .models import AmdParams, LecssParams, SchemeParams
from .nm_code import NonMalleableCode, SchemeError, Symbol, load_scheme

__all__ = [
    "AmdCode",
    "AmdError",
    "AmdParams",
    "LecssCode",
    "LecssError",
    "LecssParams",
    "NonMalleableCode",
    "SchemeError",
    "SchemeParams",
    "Symbol",
    "amd_security_oracle",
    "amd_tag_linearity",
    "certify_lecss",
    "load_scheme",
]
