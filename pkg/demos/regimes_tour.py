"""Walk across the (x, t) plane at fixed t and watch the regimes change.

Run with ``python3 demos/regimes_tour.py``. For t > 0 the self-similar
variable s = x t^(-3/2) sweeps from the algebraic region on the left,
through the Painleve II edge, the oscillatory interval and the soliton
edge, back to the algebraic region. For t < 0 the solution is algebraic
everywhere.
"""

import numpy as np

from pi2asym import S_LEFT, S_RIGHT, classify, evaluate, ScalePoint


def tour(t, s_values):
    print(f"\nt = {t:g}")
    print(f"{'s':>9} {'regime':>14} {'y':>14} {'y / |t|^(1/2)':>14}")
    for s in s_values:
        p = ScalePoint.from_st(s, t)
        r = evaluate(p.x, p.t)
        print(f"{s:9.4f} {classify(p).value:>14} {r.value:14.6f} {r.value / abs(t) ** 0.5:14.6f}")


if __name__ == "__main__":
    s_values = np.concatenate([np.linspace(-5.0, S_LEFT - 0.1, 3),
                               [S_LEFT],
                               np.linspace(S_LEFT + 0.2, S_RIGHT - 0.1, 6),
                               [S_RIGHT],
                               np.linspace(S_RIGHT + 0.1, 2.0, 3)])
    tour(100.0, s_values)
    tour(-100.0, s_values)
