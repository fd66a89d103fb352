"""Unwinding the interaction frames and the effect of collective dephasing."""

# %% Stage durations for the dressed scheme
import numpy as np

from haldane_ions import frames, noise, spin_model

TWO_PI = 2 * np.pi
stack = frames.FrameStack.scheme2(omega_prime=TWO_PI * 10e3, theta=0.6, omega_carrier=TWO_PI * 1e6)
for stage in frames.scheme2_unwind(stack, tau=37e-6, measurement_rotation=True):
    print(f"{stage.label:22s} {stage.duration * 1e6:8.3f} us  drives: {', '.join(stage.active)}")

# %% States with zero total magnetization do not feel global field noise
J = spin_model.nearest_neighbor_couplings(4)
_, v = spin_model.solve_ground(spin_model.build_hamiltonian(spin_model.ModelParams(J)), sector=0, n_sites=4)
print("ground state:", noise.apply_collective_dephasing(v[:, 0], gamma=500.0, T=1e-3).fidelity)
# a superposition across magnetization sectors dephases
mixed = (spin_model.product_state([1, 0, 0, 0]) + spin_model.product_state([0, 0, 0, 0])) / np.sqrt(2)
print("(|+1,0,0,0> + |0,0,0,0>)/sqrt2:", noise.apply_collective_dephasing(mixed, 500.0, 1e-3).fidelity)
print("coherence of (|+1> + |0>)/sqrt2:", noise.single_spin_coherence(1, 500.0, 1e-3))
