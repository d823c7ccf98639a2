"""The two transition layers around the oscillatory interval.

Run with ``python3 demos/edges.py``. Near the left endpoint the
correction is a Hastings-McLeod profile times a fast cosine; near the
right endpoint it is a train of sech^2 pulses whose centres drift with
log t.
"""

import numpy as np

from pi2asym.critical import hastings_mcleod, soliton_center, y_edge_pii, y_edge_soliton

hm = hastings_mcleod()
print("Hastings-McLeod profile")
for xi in np.linspace(-8, 6, 8):
    print(f"  q({xi:5.2f}) = {hm(xi):.10f}")
print(f"  mesh refinements: {hm.refinements}")

t = 1e4
print(f"\nPainleve II edge at t = {t:g}")
for xi in (-4.0, -1.0, 0.0, 2.0):
    r = y_edge_pii(xi, t, hm)
    print(f"  xi = {xi:5.2f}: leading {r.leading:.6f}, correction {r.correction:+.6f}")

t = 1e8
print(f"\nsoliton edge at t = {t:g}; pulse centres "
      + ", ".join(f"{soliton_center(k, t):.4f}" for k in range(4)))
for xi in np.linspace(0.0, 3.0, 13):
    r = y_edge_soliton(xi, t)
    bar = "#" * int(round(20 * r.details["sech2_sum"]))
    print(f"  xi = {xi:4.2f}: y / |leading| = {r.value / abs(r.leading):+.4f} {bar}")
