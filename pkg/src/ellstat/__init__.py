"""Group-structure statistics of elliptic curves over prime fields."""

__version__ = "0.1.0"

from .ecfp import CertificationError, Curve, CurveModP, local_invariants  # noqa: E402

__all__ = ["CertificationError", "Curve", "CurveModP", "__version__", "local_invariants"]
