"""Localization computations: genera, flat-connection moduli volumes, genus-0 mirror series."""

__version__ = "0.1.0"

from .exactnum import BigRational, GradedPolynomial, PolyRing, TruncatedSeries  # noqa: E402

__all__ = ["__version__", "BigRational", "GradedPolynomial", "PolyRing", "TruncatedSeries"]
