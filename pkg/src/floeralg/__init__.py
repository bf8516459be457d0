"""Exact algebra for Novikov-ring Floer-type complexes.

Modules:
    novikov   -- truncated Laurent series over Z and the PID operations
    linalg    -- Smith normal form, kernels, cokernels, subquotients
    flowcat   -- flow-category counts, chain maps, homotopies, homology
    arnold    -- grading collapse and the torsion-aware lower bound
    strata    -- corner posets, word posets and outer collars
    equipoly  -- equivariant polynomial maps for finite abelian groups
"""

from .novikov import NovikovSeries, DEFAULT_PRECISION, parse_series, format_series

__version__ = "0.1.0"

__all__ = ["NovikovSeries", "DEFAULT_PRECISION", "parse_series", "format_series", "__version__"]
