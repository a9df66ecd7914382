"""
Tools package for the non-malleable code toolkit.

This package contains the algebra and analysis machinery used by the schemes:
- gf2: bit vectors, GF(2) matrices, binary fields
- tampering: bitwise and affine tampering functions
- distributions / bounds / analysis: outcome distributions, epsilon and tail
  bounds, non-malleability certification
- lecss_search: randomized search for small LECSS instances
"""
