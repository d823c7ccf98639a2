"""Branch points of the genus-one curve and the Whitham check.

Run with ``python3 demos/modulation_story.py``. The three branch points
start merged in pairs at both ends of the interval and open up in
between. The second half evaluates the Whitham residual for two
normalisations of the rescaled branch points; only one of them shows
second-order convergence under step halving.
"""

from pi2asym import S_LEFT, S_RIGHT
from pi2asym.modulation import continuation_sweep, residuals, whitham_residual

trace = continuation_sweep(S_LEFT, S_RIGHT, 12)
print(f"{'s':>9} {'beta3':>10} {'alpha':>10} {'beta2':>10} {'beta1':>10} {'max|r|':>9}")
for m in trace.points:
    r = max(abs(v) for v in residuals(m))
    print(f"{m.s:9.4f} {m.beta3:10.5f} {m.alpha:10.5f} {m.beta2:10.5f} {m.beta1:10.5f} {r:9.1e}")

window = continuation_sweep(S_LEFT + 0.3, S_RIGHT - 0.05, 6)
for scale in (1.0, 0.5):
    rep = whitham_residual(window, [1.0, 2.0, 4.0], beta_scale=scale)
    res = ", ".join(f"{v:.3g}" for v in rep.residuals)
    orders = ", ".join(f"{v:.2f}" for v in rep.orders)
    print(f"\nbeta_tilde = {scale:g} t^(1/2) beta: residuals {res}; orders {orders}")
