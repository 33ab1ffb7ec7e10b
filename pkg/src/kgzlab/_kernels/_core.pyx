# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels for the radial leapfrog stepper.

Arithmetic mirrors `_ref.py` expression by expression (same grouping, no FMA
contraction thanks to -ffp-contract=off) so both backends produce bit-identical
trajectories.  Grids are staggered, r_i = (i + 1/2)*dr; the evolved variable is
U = r*w, odd through r = 0 (left ghost U[-1] = -U[0]) and zero beyond the outer
causal boundary (right ghost 0).
"""

def second_diff_odd(double[::1] W, double inv_dr2, double[::1] out):
    """out[i] = (W[i-1] - 2 W[i] + W[i+1]) * inv_dr2 with odd/zero ghosts."""
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t i
    if n == 0:
        return
    if n == 1:
        out[0] = ((-W[0] - 2.0 * W[0]) + 0.0) * inv_dr2
        return
    out[0] = ((-W[0] - 2.0 * W[0]) + W[1]) * inv_dr2
    for i in range(1, n - 1):
        out[i] = ((W[i - 1] - 2.0 * W[i]) + W[i + 1]) * inv_dr2
    out[n - 1] = ((W[n - 2] - 2.0 * W[n - 1]) + 0.0) * inv_dr2


def leapfrog_step(double[::1] U, double[::1] V, double[::1] S,
                  double m2, double inv_dr2, double dt):
    """One kick-drift step of U_tt = D_rr U - m2*U + S, in place.

    V <- V + dt*A(U, S);  U <- U + dt*V.  The acceleration uses only the
    pre-step U, so the two passes are safe to fuse per node.
    """
    cdef Py_ssize_t n = U.shape[0]
    cdef Py_ssize_t i
    cdef double dd, a
    if n == 0:
        return
    cdef double U0 = U[0]
    cdef double Uprev = -U0  # odd ghost
    cdef double Ucur, Unext
    for i in range(n):
        Ucur = U[i]
        Unext = U[i + 1] if i + 1 < n else 0.0
        dd = ((Uprev - 2.0 * Ucur) + Unext) * inv_dr2
        a = (dd - m2 * Ucur) + S[i]
        V[i] = V[i] + dt * a
        Uprev = Ucur
    for i in range(n):
        U[i] = U[i] + dt * V[i]
