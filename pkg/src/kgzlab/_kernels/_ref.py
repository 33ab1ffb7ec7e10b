"""Pure-numpy twin of the compiled stepping kernels.

Expression grouping matches `_core.pyx` exactly; both backends must produce
bit-identical arrays (asserted in tests/test_kernels.py).
"""

import numpy as np


def second_diff_odd(W, inv_dr2, out):
    n = W.shape[0]
    if n == 0:
        return
    if n == 1:
        out[0] = ((-W[0] - 2.0 * W[0]) + 0.0) * inv_dr2
        return
    out[1:-1] = ((W[:-2] - 2.0 * W[1:-1]) + W[2:]) * inv_dr2
    out[0] = ((-W[0] - 2.0 * W[0]) + W[1]) * inv_dr2
    out[-1] = ((W[-2] - 2.0 * W[-1]) + 0.0) * inv_dr2


def leapfrog_step(U, V, S, m2, inv_dr2, dt):
    dd = np.empty_like(U)
    second_diff_odd(U, inv_dr2, dd)
    a = (dd - m2 * U) + S
    V += dt * a
    U += dt * V
