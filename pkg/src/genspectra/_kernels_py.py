"""Pure-numpy fallback for the hot solver kernels.

Semantics here are the reference; the compiled extension in ``_kernels.pyx``
must match it to within floating round-off. All kernels consume a fixed
discretization of the deforming Gaussian: node values ``g_k = |G_k - z|^2``
and weights ``w_k`` summing to one.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def h_rhs(g, w, h, t):
    """sum_k w_k (1 + t/h) / (g_k + (h+t)^2), elementwise over (h, t)."""
    h = np.asarray(h, dtype=float)
    t = np.asarray(t, dtype=float)
    denom = g[None, :] + (h[..., None] + t[..., None]) ** 2
    core = (w[None, :] / denom).sum(axis=-1)
    return (1.0 + t / h) * core


def h_bisect(g, w, t, tol=1e-13, max_iter=200):
    """Solve h > 0 with h_rhs(g, w, h, t) = 1 for each t > 0 by bisection.

    The right-hand side decreases strictly from +inf to 0 in h, so the root
    exists and is unique; the returned bracket width is below tol*(1+h).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    hi = np.ones_like(t)
    for _ in range(80):
        mask = h_rhs(g, w, hi, t) >= 1.0
        if not mask.any():
            break
        hi[mask] *= 2.0
    else:
        raise RuntimeError("failed to bracket the h-equation from above")
    lo = np.zeros_like(t)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol * (1.0 + hi)):
            break
        mid = 0.5 * (lo + hi)
        up = h_rhs(g, w, mid, t) >= 1.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return 0.5 * (lo + hi)


def f_rhs(gmat, w, f):
    """sum_k w_k / (g_k + f^2) per row of gmat."""
    f = np.asarray(f, dtype=float)
    denom = gmat + (f**2)[:, None]
    with np.errstate(divide="ignore"):
        return (w[None, :] / denom).sum(axis=1)


def f_bisect_many(gmat, w, tol=1e-13, max_iter=200):
    """Root f >= 0 of sum_k w_k/(g_k + f^2) = 1 per row; 0 when no root.

    Rows whose f=0 value already sits at or below 1 are outside the support
    seen by this discretization and return exactly 0.
    """
    gmat = np.atleast_2d(np.asarray(gmat, dtype=float))
    nz = gmat.shape[0]
    at_zero = f_rhs(gmat, w, np.zeros(nz))
    inside = at_zero > 1.0
    f = np.zeros(nz)
    if not inside.any():
        return f
    gm = gmat[inside]
    hi = np.ones(gm.shape[0])
    for _ in range(80):
        mask = f_rhs(gm, w, hi) >= 1.0
        if not mask.any():
            break
        hi[mask] *= 2.0
    else:
        raise RuntimeError("failed to bracket the f-equation from above")
    lo = np.zeros(gm.shape[0])
    for _ in range(max_iter):
        if np.all(hi - lo <= tol * (1.0 + hi)):
            break
        mid = 0.5 * (lo + hi)
        up = f_rhs(gm, w, mid) >= 1.0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    f[inside] = 0.5 * (lo + hi)
    return f


def _fp_map(g, w, eta, s):
    """Fixed-point map F(S) = sum_k w_k (S+eta)/(g_k - (eta+S)^2) and its
    S-derivative, evaluated elementwise over (eta, s)."""
    u = (eta + s)[..., None]
    denom = g[None, :] - u**2
    F = ((s + eta)[..., None] * (w[None, :] / denom)).sum(axis=-1)
    dF = ((g[None, :] + u**2) * (w[None, :] / denom**2)).sum(axis=-1)
    return F, dF


def stieltjes_solve(g, w, eta, s0, tol=1e-12, max_iter=10000, damping=0.5):
    """Solve S = F(S) per element of eta (Im eta > 0), starting from s0.

    Damped Picard iteration (the map preserves the upper half-plane) with the
    damping halved whenever the residual stalls, switching to Newton once the
    residual is small. Returns (S, residual).
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=complex))
    s = np.array(np.broadcast_to(np.asarray(s0, dtype=complex), eta.shape))
    damp = np.full(eta.shape, float(damping))
    active = np.ones(eta.shape, dtype=bool)
    resid = np.full(eta.shape, np.inf)
    prev = np.full(eta.shape, np.inf)
    for _ in range(max_iter):
        if not active.any():
            break
        F, dF = _fp_map(g, w, eta[active], s[active])
        r = np.abs(F - s[active])
        newton_ok = r < 1e-3
        step = np.where(newton_ok, 1.0, damp[active])
        s_new = s[active] + step * (F - s[active])
        with np.errstate(divide="ignore", invalid="ignore"):
            s_newton = s[active] - (s[active] - F) / (1.0 - dF)
        use_newton = newton_ok & np.isfinite(s_newton) & (s_newton.imag > 0)
        s_new = np.where(use_newton, s_newton, s_new)
        stalled = r >= prev[active]
        damp_act = np.where(stalled & ~newton_ok, np.maximum(damp[active] * 0.5, 0.01), damp[active])
        damp[active] = damp_act
        prev_act = r
        s_act = s_new
        res_act = r
        done = r <= tol
        idx = np.flatnonzero(active)
        s[idx] = s_act
        resid[idx] = res_act
        prev[idx] = prev_act
        active[idx[done]] = False
    return s, resid
