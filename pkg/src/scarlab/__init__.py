"""Exact numerics for quantum many-body scars in the Z2 gauge ladder and its Ising dual."""

from .geometry import Geometry
from .hamiltonian import CouplingConfig, SparseOperator, build_ising_hamiltonian, build_lgt_hamiltonian
from .pauli import PauliString
from .scars import ScarLabel, effective_hamiltonian, scar_labels, scar_state
from .sectors import SectorBasis, StateVector, enumerate_ising_sector, enumerate_lgt_sector

__all__ = [
    "CouplingConfig",
    "Geometry",
    "PauliString",
    "ScarLabel",
    "SectorBasis",
    "SparseOperator",
    "StateVector",
    "build_ising_hamiltonian",
    "build_lgt_hamiltonian",
    "effective_hamiltonian",
    "enumerate_ising_sector",
    "enumerate_lgt_sector",
    "scar_labels",
    "scar_state",
]
