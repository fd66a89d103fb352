"""Full spin-phonon evolution against the effective spin model (about 20 s).

Two ions share one radial mode.  The sideband drive, the theta-rotated
field and the anisotropy are applied together; the state is moved back into
the last interaction frame and compared with exp(-i H_eff t).
"""

# %%
import warnings

from haldane_ions import drive_model as dm

p = dm.default_validation_params(scheme=1)
print("hierarchy:")
for e in dm.validate_hierarchy(p).entries:
    print(f"   {e.name:10s} {e.condition:42s} ratio {e.ratio:8.1f}")

for form in ("secular", "printed"):
    rep = dm.validate_effective(p, form=form)
    print(f"{form:8s} form: fidelity {rep.fidelity:.4f} at t = {rep.t_final * 1e6:.0f} us, "
          f"phonons {rep.phonon_occupation:.1e}")

# %% Breaking the hierarchy (field as strong as the sideband detuning)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", dm.HierarchyWarning)
    bad = dm.validate_effective(dm.default_validation_params(scheme=1, violate=True))
print(f"violated hierarchy: fidelity {bad.fidelity:.4f}")
