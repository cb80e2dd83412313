"""Barycentric tuples of vector fields ("chambars"): exact jets, certificates, families and the 4-chambar ODE."""

from .core import (
    Chambar,
    ExactCertificate,
    Refuted,
    VectorField,
    VerifiedToOrder,
    check_barycentric,
)
from .scalars import Cyclo
from .series import Jet

__all__ = [
    "Chambar",
    "Cyclo",
    "ExactCertificate",
    "Jet",
    "Refuted",
    "VectorField",
    "VerifiedToOrder",
    "check_barycentric",
]
__version__ = "0.1.0"
