"""Finite-n spectral measurements: eigenvalues, shifted singular values, the
2n x 2n resolvent identity, and empirical-distribution summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grids import GridSpec

__all__ = [
    "SpectraError",
    "EsdSummary",
    "eigenvalues",
    "singular_values",
    "hermitization_stieltjes",
    "esd_summary",
    "ks_distance",
]

_TRACE_ROUTE_MAX_N = 64


class SpectraError(RuntimeError):
    """Dense solver failure, annotated with the sample seed when known."""


def eigenvalues(A, seed=None):
    """All n eigenvalues with multiplicity (dense nonsymmetric solver)."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise SpectraError(f"eigenvalue solver failed (seed={seed}): {exc}") from exc


def singular_values(A, z=0.0, seed=None):
    """Singular values of A - zI, descending."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    shifted = A - z * np.eye(n) if z != 0 else A
    try:
        return np.linalg.svd(shifted, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SpectraError(f"SVD failed (seed={seed}): {exc}") from exc


def hermitization_stieltjes(A, z, eta, method="auto"):
    """(1/2n) Tr (H(z) - eta I)^{-1} for H(z) = [[0, A-z], [(A-z)*, 0]].

    Equal to (1/2n) sum_i [1/(s_i - eta) + 1/(-s_i - eta)] over the singular
    values s_i of A - z; both evaluation routes are exposed ("trace" forms
    the 2n x 2n inverse, "singular" uses the singular values) and "auto"
    picks trace only for small test-size matrices.
    """
    eta = complex(eta)
    if eta.imag <= 0:
        raise ValueError("eta must lie in the upper half-plane")
    A = np.asarray(A)
    n = A.shape[0]
    if method == "auto":
        method = "trace" if n <= _TRACE_ROUTE_MAX_N else "singular"
    if method == "trace":
        shifted = A - z * np.eye(n)
        H = np.zeros((2 * n, 2 * n), dtype=complex)
        H[:n, n:] = shifted
        H[n:, :n] = shifted.conj().T
        R = np.linalg.inv(H - eta * np.eye(2 * n))
        return complex(np.trace(R) / (2 * n))
    if method == "singular":
        s = singular_values(A, z)
        return complex(np.sum(1.0 / (s - eta) + 1.0 / (-s - eta)) / (2 * n))
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class EsdSummary:
    """Histogram plus Gaussian-kernel density estimate on a grid."""

    kind: str  # "1d" or "2d"
    hist: np.ndarray  # cell masses, total 1
    kde: np.ndarray  # density values at the grid nodes
    bandwidth: tuple
    grid: GridSpec


def _silverman(x, n, d):
    # multivariate rule-of-thumb: sigma * (4/(d+2))^(1/(d+4)) * n^(-1/(d+4))
    sigma = float(np.std(x))
    if sigma == 0.0:
        sigma = 1e-12
    return sigma * (4.0 / (d + 2.0)) ** (1.0 / (d + 4.0)) * n ** (-1.0 / (d + 4.0))


def esd_summary(values, grid: GridSpec, bandwidth=None):
    """Normalized histogram and Gaussian KDE of a sample of reals (1D, using
    the grid's real axis) or complexes (2D). The KDE bandwidth defaults to a
    per-axis Silverman rule and is recorded in the output."""
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("empty sample")
    n = values.size
    if np.iscomplexobj(values) and np.any(values.imag != 0):
        re, im = values.real, values.imag
        if bandwidth is None:
            bandwidth = (_silverman(re, n, 2), _silverman(im, n, 2))
        hist, _, _ = np.histogram2d(
            im,
            re,
            bins=(grid.nodes_im, grid.nodes_re),
            range=((grid.im_min, grid.im_max), (grid.re_min, grid.re_max)),
        )
        hist /= n
        mesh = grid.mesh()
        kde = np.zeros(mesh.shape)
        bx, by = bandwidth
        norm = 1.0 / (2.0 * math.pi * bx * by * n)
        flat = mesh.ravel()
        for lo in range(0, n, 4096):
            pts = values.ravel()[lo : lo + 4096]
            dx = (flat.real[:, None] - pts.real[None, :]) / bx
            dy = (flat.imag[:, None] - pts.imag[None, :]) / by
            kde.ravel()[:] += norm * np.exp(-0.5 * (dx**2 + dy**2)).sum(axis=1)
        return EsdSummary("2d", hist, kde, (float(bx), float(by)), grid)
    x = values.real.astype(float).ravel()
    if bandwidth is None:
        bandwidth = (_silverman(x, n, 1),)
    hist, _ = np.histogram(x, bins=grid.nodes_re, range=(grid.re_min, grid.re_max))
    hist = hist / n
    axis = grid.re_axis
    b = bandwidth[0]
    kde = np.exp(-0.5 * ((axis[:, None] - x[None, :]) / b) ** 2).sum(axis=1) / (
        n * b * math.sqrt(2.0 * math.pi)
    )
    return EsdSummary("1d", hist, kde, (float(b),), grid)


def ks_distance(samples, cdf):
    """sup over the sample points of |empirical CDF - cdf|."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    ecdf = np.searchsorted(x, x, side="right") / n
    fx = np.asarray([cdf(v) for v in x], dtype=float)
    return float(np.max(np.abs(ecdf - fx)))
