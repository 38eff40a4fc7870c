"""Frame error rates of SC and list decoding on a Monte-Carlo constructed code.

Run: python3 demos/list_vs_sc.py [trials]
"""
import sys

from cvpolar import sim

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
n, k = 256, 128
spec = sim.mc_construct(n, k, sim.ebn0_to_sigma(2.0, k / n), trials=1000, seed=7)

results = []
for snr in (1.0, 1.5, 2.0, 2.5):
    channel = sim.ChannelModel.awgn_ebn0(snr, k / n)
    for l in (1, 2, 4, 8):
        # same seed per SNR: every list size sees the same messages and noise
        results.append(sim.run_fer(spec, channel, sim.DecoderConfig(l), trials, seed=11, snr_db=snr))

sim.write_csv(results, sys.stdout)
