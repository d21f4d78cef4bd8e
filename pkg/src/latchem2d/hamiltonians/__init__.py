"""Hamiltonian builders and basis catalogs."""
from .chemistry import (ChemParams, NucleusSpec, PairBasis, build_single_particle, build_two_fermion,
                        molecular_nuclei, nuclear_potential, nuclear_repulsion)
from .mediator import (BasisCatalog, CouplingLink, MediatorIIHamiltonian, MediatorParamsI,
                       MediatorParamsII, SectorSpec, SplitHamiltonian, build_mediator_I,
                       build_mediator_II, build_mediator_II_basis, catalog_size, mediator_I_split)
from .sparse import SparseHamiltonian

__all__ = ["ChemParams", "NucleusSpec", "PairBasis", "build_single_particle", "build_two_fermion",
           "molecular_nuclei", "nuclear_potential", "nuclear_repulsion", "BasisCatalog",
           "CouplingLink", "MediatorIIHamiltonian", "MediatorParamsI", "MediatorParamsII",
           "SectorSpec", "SplitHamiltonian", "build_mediator_I", "build_mediator_II",
           "build_mediator_II_basis", "catalog_size", "mediator_I_split", "SparseHamiltonian"]
