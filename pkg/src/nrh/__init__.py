"""Exact algebra of Lorentzian infinitesimal models with parallel skew torsion.

Submodules: ``mlinalg`` (metric spaces, multivectors, skew endomorphisms),
``liealg`` (subalgebras of so(V), abstract Lie algebras, classification),
``torsioncurv`` (torsion and curvature tensors, Bianchi identities),
``models`` (validation, transvection algebras, case detection),
``constructions`` (parametrised families), ``coordgeo`` (numeric checks on
coordinate metrics), ``modelfile`` and ``cli``.
"""

from .errors import FamilyConstraintError, NRHError, SchemaError
from .mlinalg import MultiVector, SkewEndomorphism, Space
from .models import InfinitesimalModel, classify_case, transvection, validate
from .torsioncurv import CurvatureTensor, TorsionTensor

__version__ = "0.1.0"

__all__ = ["CurvatureTensor", "FamilyConstraintError", "InfinitesimalModel", "MultiVector", "NRHError",
           "SchemaError", "SkewEndomorphism", "Space", "TorsionTensor", "classify_case", "transvection",
           "validate"]
