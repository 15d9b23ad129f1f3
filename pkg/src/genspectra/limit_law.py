"""Limiting spectral objects of the deformed circular family.

For a centered complex Gaussian G with covariance K, this module computes:

* the Stieltjes transform of the symmetrized singular-value law at any shift
  z (fixed-point solvers),
* the singular-value density by Stieltjes inversion,
* the support test, the width function f(z) and the spectral density on the
  plane,
* the log potential U(z) and its distributional-Laplacian density route.

The K = 0 degeneration reproduces the circular law and is used throughout the
tests as an analytic oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .gauss_expect import GaussianSpec, expect_inv_abs2
from .grids import GridSpec

__all__ = [
    "SolverError",
    "LimitLaw",
    "solve_h",
    "stieltjes_fixed_point",
    "nu_z_density",
    "nu_z_cdf",
    "support_indicator",
    "solve_f",
    "solve_f_grid",
    "brown_density",
    "brown_density_grid",
    "second_moment",
    "log_potential",
    "log_potential_grid",
    "log_potential_from_density",
    "density_via_laplacian",
    "evaluate",
]


class SolverError(RuntimeError):
    """A fixed-point or bracketing solver failed to converge."""


@dataclass(frozen=True)
class LimitLaw:
    """Limit-law summary at one point z."""

    z: complex
    spec: GaussianSpec
    f: float
    in_support: bool
    density: float
    U: float


def _gvals(spec, z, n_axis):
    gnodes, w = spec.nodes(n_axis)
    return np.abs(gnodes - z) ** 2, w, gnodes


def solve_h(z, t, spec, n_axis=200):
    """The unique h > 0 with E[(1 + t/h) / (|G-z|^2 + (h+t)^2)] = 1.

    This is Im of the symmetrized-law transform at i*t; computed by bisection
    on the strictly decreasing right-hand side.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    g, w, _ = _gvals(spec, z, n_axis)
    return float(kernels.h_bisect(g, w, np.array([float(t)]))[0])


def stieltjes_fixed_point(z, eta, spec, n_axis=200, tol=1e-12, max_iter=10000, damping=0.5):
    """Solve S = E[(S+eta) / (|G-z|^2 - (eta+S)^2)] for Im(eta) > 0.

    Purely imaginary eta delegates to the monotone h-equation; general eta
    uses a damped Picard iteration from S0 = -1/eta (with Newton polish),
    continuing down from a larger imaginary part when Im(eta) is small.
    """
    eta = complex(eta)
    if eta.imag <= 0:
        raise ValueError("eta must lie in the upper half-plane")
    if eta.real == 0.0:
        return 1j * solve_h(z, eta.imag, spec, n_axis)
    g, w, _ = _gvals(spec, z, n_axis)
    path = [eta]
    im = eta.imag
    while im < 0.5:
        im *= 4.0
        path.append(complex(eta.real, min(im, 1.0)))
    s = -1.0 / path[-1]
    for stage in reversed(path):
        s_arr, resid = kernels.stieltjes_solve(
            g, w, np.array([stage]), np.array([s]), tol=tol, max_iter=max_iter, damping=damping
        )
        s = complex(s_arr[0])
        if not (np.isfinite(resid[0]) and resid[0] <= max(tol, 1e-9)):
            raise SolverError(
                f"fixed point did not converge at eta={stage}: residual {float(resid[0]):.3e}"
            )
    return s


def _stieltjes_vector(g, w, eta, tol=1e-12, max_iter=10000):
    """Warm-started continuation solve for a vector of eta values sharing the
    same real parts but decreasing imaginary part."""
    s = -1.0 / eta
    im_target = float(eta.imag.min())
    ims = [max(1.0, im_target)]
    while ims[-1] > im_target:
        ims.append(max(im_target, ims[-1] * 0.25))
    for im in ims:
        stage = eta.real + 1j * np.maximum(eta.imag, im)
        s, resid = kernels.stieltjes_solve(g, w, stage, s, tol=tol, max_iter=max_iter)
        bad = ~(np.isfinite(resid) & (resid <= max(tol, 1e-9)))
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise SolverError(
                f"fixed point did not converge at eta={stage[k]}: residual {float(resid[k]):.3e}"
            )
    return s


def nu_z_density(z, s_grid, spec, eps=1e-3, n_axis=200):
    """Density of the singular-value law at the points of s_grid (> 0).

    Stieltjes inversion at s + i*eps and s + i*eps/2, Richardson-combined to
    cancel the leading linear smoothing error; the factor 2 restricts the
    symmetric law back to the positive axis. Clipped at zero.
    """
    if not 0.0 < eps <= 0.1:
        raise ValueError("eps must lie in (0, 0.1]")
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid <= 0):
        raise ValueError("s_grid must be positive")
    g, w, _ = _gvals(spec, z, n_axis)
    s_full = _stieltjes_vector(g, w, s_grid + 1j * eps)
    s_half = _stieltjes_vector(g, w, s_grid + 1j * (eps / 2.0))
    dens = (2.0 / math.pi) * (2.0 * s_half.imag - s_full.imag)
    return np.clip(dens, 0.0, None)


def nu_z_cdf(z, spec, s_max=None, n_points=800, eps=1e-3, n_axis=200):
    """(s grid, CDF values) of the singular-value law by integrating the
    inverted density; the grid reaches into the Gaussian tail."""
    if s_max is None:
        s_max = abs(z) + math.sqrt(spec.total_var) * 6.0 + 4.0
    s = np.linspace(s_max / n_points, s_max, n_points)
    dens = nu_z_density(z, s, spec, eps=eps, n_axis=n_axis)
    mids = 0.5 * (dens[1:] + dens[:-1]) * np.diff(s)
    cdf = np.concatenate([[0.0], np.cumsum(mids)])
    cdf = np.minimum(cdf, 1.0)
    return s, cdf


def support_indicator(z, spec):
    """True iff E[1/|G-z|^2] >= 1 (divergence counts as inside)."""
    return expect_inv_abs2(spec, z) >= 1.0


def solve_f(z, spec, n_axis=200):
    """The width f(z) >= 0: unique root of E[1/(|G-z|^2 + f^2)] = 1 inside
    the support, 0 outside. Bisection on [0, c] with c doubled until the
    right-hand side falls below 1."""
    if not support_indicator(z, spec):
        return 0.0
    g, w, _ = _gvals(spec, z, n_axis)
    return float(kernels.f_bisect_many(g[None, :], w)[0])


def solve_f_grid(zs, spec, n_axis=200, chunk=512):
    """Vectorized solve_f over an array of z values."""
    zs = np.asarray(zs, dtype=complex)
    flat = zs.ravel()
    gnodes, w = spec.nodes(n_axis)
    out = np.empty(flat.shape, dtype=float)
    for lo in range(0, flat.size, chunk):
        blk = flat[lo : lo + chunk]
        gmat = np.abs(gnodes[None, :] - blk[:, None]) ** 2
        f = kernels.f_bisect_many(gmat, w)
        inside = np.array([support_indicator(zz, spec) for zz in blk])
        out[lo : lo + chunk] = np.where(inside, f, 0.0)
    return out.reshape(zs.shape)


def _density_from_f(gmat, w, gnodes, zs, f):
    phi = 1.0 / (gmat + (f**2)[:, None]) ** 2
    e_phi = phi @ w
    e_gz = ((gnodes[None, :] - zs[:, None]) * phi) @ w
    return (f**2 * e_phi + np.abs(e_gz) ** 2 / e_phi) / math.pi


def brown_density(z, spec, n_axis=200):
    """Spectral density at z: (1/pi) f^2 E[Phi] + (1/pi) |E[(G-z)Phi]|^2 / E[Phi]
    with Phi = (|G-z|^2 + f(z)^2)^-2; zero outside the closed support. On the
    boundary f = 0 and the same formula applies (the density need not vanish
    there)."""
    z = complex(z)
    if not support_indicator(z, spec):
        return 0.0
    f = solve_f(z, spec, n_axis)
    g, w, gnodes = _gvals(spec, z, n_axis)
    return float(_density_from_f(g[None, :], w, gnodes, np.array([z]), np.array([f]))[0])


def brown_density_grid(zs, spec, n_axis=200, chunk=512):
    """Vectorized brown_density over an array of z values."""
    zs = np.asarray(zs, dtype=complex)
    flat = zs.ravel()
    gnodes, w = spec.nodes(n_axis)
    inside = np.array([support_indicator(zz, spec) for zz in flat])
    out = np.zeros(flat.shape, dtype=float)
    idx = np.flatnonzero(inside)
    for lo in range(0, idx.size, chunk):
        sel = idx[lo : lo + chunk]
        blk = flat[sel]
        gmat = np.abs(gnodes[None, :] - blk[:, None]) ** 2
        f = kernels.f_bisect_many(gmat, w)
        out[sel] = _density_from_f(gmat, w, gnodes, blk, f)
    return out.reshape(zs.shape)


def second_moment(z, spec):
    """Second moment of the singular-value law: 1 + E|G-z|^2, exactly."""
    return 1.0 + spec.total_var + abs(complex(z)) ** 2


_GL_CORE = np.polynomial.legendre.leggauss(48)
_GL_TAIL = np.polynomial.legendre.leggauss(64)


def _h_integral_nodes(T):
    """Nodes/weights for integrating h(z, .) over (0, T]: a direct rule on
    (0, 1] plus a log-substituted rule on [1, T]."""
    x1, w1 = _GL_CORE
    t1 = 0.5 * (x1 + 1.0)
    wt1 = 0.5 * w1
    x2, w2 = _GL_TAIL
    u = 0.5 * (x2 + 1.0) * math.log(T)
    t2 = np.exp(u)
    wt2 = 0.5 * math.log(T) * w2 * t2
    return np.concatenate([t1, t2]), np.concatenate([wt1, wt2])


def log_potential(z, spec, n_axis=200, T=None):
    """U(z) = -integral of log(s) against the singular-value law at z.

    Evaluated through the identity U(z) = int_0^T h(z,t) dt - log(T)
    - m2(z)/(2 T^2) + O(T^-4), where h is the imaginary-axis transform and m2
    the exact second moment; this avoids inversion error entirely and leaves
    an error smooth in z (the property the Laplacian cross-route needs).
    """
    z = complex(z)
    if T is None:
        T = max(40.0, 8.0 * math.sqrt(second_moment(z, spec)))
    g, w, _ = _gvals(spec, z, n_axis)
    t, wt = _h_integral_nodes(T)
    h = kernels.h_bisect(g, w, t)
    return float(np.dot(wt, h) - math.log(T) - second_moment(z, spec) / (2.0 * T * T))


def log_potential_grid(zs, spec, n_axis=200, T=None):
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=float)
    flat_in = zs.ravel()
    flat_out = out.ravel()
    for k, zz in enumerate(flat_in):
        flat_out[k] = log_potential(zz, spec, n_axis=n_axis, T=T)
    return out


def log_potential_from_density(z, spec, eps=1e-3, n_axis=200, s_max=None, n_points=600):
    """Direct quadrature of -log(s) against the inverted density, on a grid
    refined near s = 0 where the integrand has its (integrable) singularity.
    Slower and less accurate than log_potential; kept as the independent
    cross-check of the transform route."""
    z = complex(z)
    if s_max is None:
        s_max = abs(z) + math.sqrt(spec.total_var) * 6.0 + 4.0
    head = np.geomspace(1e-5, 0.1, n_points // 3)
    tail = np.linspace(0.1, s_max, n_points)[1:]
    s = np.concatenate([head, tail])
    dens = nu_z_density(z, s, spec, eps=eps, n_axis=n_axis)
    return float(-np.trapezoid(np.log(s) * dens, s))


def density_via_laplacian(grid: GridSpec, spec, n_axis=200, T=None):
    """Density as -(1/2pi) times the 5-point discrete Laplacian of U on the
    interior nodes of the grid. Returns (density, clip_magnitude): negative
    values are clipped to 0 and the largest clipped magnitude reported.
    Boundary rows/columns are NaN."""
    hx, hy = grid.spacing
    if max(hx, hy) > 0.1 + 1e-12:
        raise ValueError("grid spacing must be <= 0.1 for the Laplacian route")
    mesh = grid.mesh()
    U = log_potential_grid(mesh, spec, n_axis=n_axis, T=T)
    lap = np.full_like(U, np.nan)
    lap[1:-1, 1:-1] = (
        (U[1:-1, 2:] + U[1:-1, :-2] - 2.0 * U[1:-1, 1:-1]) / hx**2
        + (U[2:, 1:-1] + U[:-2, 1:-1] - 2.0 * U[1:-1, 1:-1]) / hy**2
    )
    dens = -lap / (2.0 * math.pi)
    interior = dens[1:-1, 1:-1]
    clip_mag = float(max(0.0, -np.nanmin(interior))) if interior.size else 0.0
    dens[1:-1, 1:-1] = np.clip(interior, 0.0, None)
    return dens, clip_mag


def evaluate(z, spec, n_axis=200):
    """Assemble the scalar limit-law summary at z."""
    z = complex(z)
    ins = support_indicator(z, spec)
    f = solve_f(z, spec, n_axis)
    dens = brown_density(z, spec, n_axis)
    u = log_potential(z, spec, n_axis)
    return LimitLaw(z=z, spec=spec, f=f, in_support=ins, density=dens, U=u)
