"""Step through SC decoding of a short code, one phase at a time.

Run: python3 demos/walkthrough.py
"""
import numpy as np

from cvpolar.sc import calct, decision, sc_init, updatec
from cvpolar.sim import ChannelModel, mc_construct, transmit
from cvpolar.transform import encode

rng = np.random.default_rng(1)

# A (16, 8) code with a frozen set found by genie-aided simulation.
spec = mc_construct(16, 8, design_sigma=0.8, trials=2000, seed=1)
print("frozen positions:", spec.frozen)

msg = rng.integers(0, 2, spec.k).astype(np.uint8)
u = spec.embed(msg)
c = encode(u)
print("message :", msg)
print("codeword:", c)

# Channel LLRs ln W(1|y)/W(0|y); negative values favour bit 0.
y = transmit(c, ChannelModel.awgn(0.8), rng)
print("channel LLRs:", np.round(y, 2))

# Both engines compute the same min-sum LLRs; the efficient one counts fewer operations.
for mode in ("sf", "eff"):
    state = sc_init(spec, y, mode)
    rows = []
    for phi in range(spec.n):
        llr = calct(state, phi)
        bit = decision(spec, phi, llr)
        state.decide(phi, bit)
        updatec(state, phi)
        rows.append((phi, "F" if phi in spec.frozen else "I", llr, bit, u[phi]))
    print(f"\nengine {mode}: {state.counter.total} counted operations")
    print(" phi  set      LLR  decided  sent")
    for phi, kind, llr, bit, sent in rows:
        print(f"{phi:4d}  {kind:>3}  {llr:7.2f}  {bit:7d}  {sent:4d}")
    print("decoded message correct:", np.array_equal(spec.extract(state.u_hat()), msg))
