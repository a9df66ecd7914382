"""
Test suite for the non-malleable code toolkit.

This package contains tests for:
- GF(2) words, matrices and binary fields
- The AMD code, the LECSS code and their composition
- Tampering functions and case classification
- Distributions, bounds and the non-malleability analysis
- CLI interface
- Integration tests
"""
