"""Preparing the Haldane ground state from the large-D product state."""

# %%
from haldane_ions import adiabatic, spin_model

J = spin_model.nearest_neighbor_couplings(6)
detour = adiabatic.RampPath(J, h_max=0.5)
direct = adiabatic.RampPath(J, h_max=0.0)

prof = adiabatic.gap_along_path(detour)
T = adiabatic.adiabatic_time(detour, prof, C=10)
print(f"minimum gap along the detour {prof.minimum:.4f}, ramp time {T:.1f} / J")

# %% Same time profile for both paths
r1 = adiabatic.run_ramp(detour, T=T, profile=prof)
r0 = adiabatic.run_ramp(direct, T=T, profile=prof, schedule_path=detour)
print(f"final fidelity: detour {r1.final_fidelity:.5f}, direct {r0.final_fidelity:.5f}")
print(f"starting overlap with the D = 10 ground state {r1.fidelity[0]:.5f}")
print(f"sudden quench would give {adiabatic.sudden_overlap(detour):.5f}")
