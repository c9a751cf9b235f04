"""
Homodyne tomography of a heralded photon pair
=============================================

End-to-end synthetic experiment: herald a two-photon state with the
enhanced source, pass it through preparation loss, record 7000 homodyne
samples at random phase with a 67% efficient detector, then reconstruct the
state by maximum likelihood and look for the negative ring of its Wigner
function.
"""

from pathlib import Path

import numpy as np

from cavityfock import io
from cavityfock.config import parse_config
from cavityfock.fock import apply_loss, fock_state, wigner_radial
from cavityfock.pipeline import reconstruct, simulate
from cavityfock.tomo import TomoConfig

config = Path(__file__).with_name("configs") / "enhanced_two_photon.json"
cfg = parse_config(io.read_json(config))

# %%
# Simulate: herald on double clicks, then lose 19% in preparation.
sim = simulate(cfg)
print("prepared state diag:", np.array2string(sim.state.diag(), precision=4))
print("ideal |2> after loss:", np.array2string(apply_loss(fock_state(2, 5), cfg.eta_prep).diag(), precision=4))
print(f"{len(sim.dataset)} quadrature samples, heralds at {sim.herald.rate_hz:.3g} Hz")

# %%
# Reconstruct with the detector efficiency folded into the POVM.
res = reconstruct(sim.dataset, cfg.tomo)
print("reconstructed diag:  ", np.array2string(res.rho.diag(), precision=4))
print(f"iterations {res.diagnostics.iterations}, log-likelihood {res.diagnostics.loglik:.2f}")

# %%
# The Wigner function is positive at the origin (an even photon number
# dominates) and dips below zero on a ring.
neg = res.negativity
print(f"W(0,0) = {neg['wigner_origin']:.4f}, ring minimum {neg['radial_min']:.4f} at r = {neg['ring_radius']:.3f}")
r = np.linspace(0, 2.5, 11)
for ri, w in zip(r, wigner_radial(res.rho.diag(), r)):
    print(f"  r = {ri:4.2f}  W = {w:+.4f}")

# %%
# Without the efficiency correction the state looks more mixed, yet the ring
# usually survives.
raw = reconstruct(sim.dataset, TomoConfig(dim=5, eta_d=1.0))
print("uncorrected diag:    ", np.array2string(raw.rho.diag(), precision=4))
print(f"uncorrected ring minimum {raw.negativity['radial_min']:.5f}")

# %%
# A phase-insensitive fit of the diagonal only is much cheaper and gives
# nearly the same populations.
fast = reconstruct(sim.dataset, TomoConfig(dim=5, eta_d=cfg.tomo.eta_d, mode="diagonal"))
print("diagonal-mode diag:  ", np.array2string(fast.rho.diag(), precision=4))
