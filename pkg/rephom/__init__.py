"""
rephom - Exact Representation Homology Engine

This package computes representation homology of simply connected spaces from
their algebraic models, with exact rational arithmetic throughout. It provides:
- Quillen and Sullivan models with a catalog of standard spaces
- Representation complexes and their invariant parts
- Chevalley-Eilenberg complexes of current Lie algebras
- Hodge components of cyclic homology and loop-space degrees
- Drinfeld trace images and the freeness check
- Macdonald constant-term identities for small root systems
"""

__version__ = "0.1.0"
