"""Exact multisymplectic observables with their Koszul and BRST cohomology."""

from .exalg import PolyForm, PolyMultivector, contract, ext_d, wedge
from .modelfile import load_model
from .mstruct import HamiltonianPair, MultisymplecticModel, NotHamiltonian, Observable

__all__ = [
    "HamiltonianPair",
    "MultisymplecticModel",
    "NotHamiltonian",
    "Observable",
    "PolyForm",
    "PolyMultivector",
    "contract",
    "ext_d",
    "load_model",
    "wedge",
]
__version__ = "0.1.0"
