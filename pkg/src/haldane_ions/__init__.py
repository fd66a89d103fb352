"""Trapped-ion quantum simulation of spin-1 XXZ chains with single-ion anisotropy.

Modules
-------
ion_chain      equilibrium positions, normal modes, Lamb-Dicke factors, couplings
spin_model     spin-1 operators and the XXZ-D Hamiltonian with symmetry sectors
drive_model    laser/microwave drives, phonon space, effective-model validation
frames         rotating-frame bookkeeping and unwinding schedules
adiabatic      state-preparation ramps and gap profiles
observables    correlations, string order, entanglement spectrum, tomography
noise          collective dephasing and quasi-static Rabi noise
integrators    Krylov and dense propagators
io             CSV/JSON output and run manifests
cli            command-line front end
"""

__version__ = "0.1.0"

from . import adiabatic, drive_model, frames, integrators, ion_chain, noise, observables, spin_model

__all__ = ["adiabatic", "drive_model", "frames", "integrators", "ion_chain", "noise", "observables",
           "spin_model", "__version__"]
