"""Expectations E[h(G)] for a centered Gaussian G on R^2 ~ C.

This is the quadrature engine behind every limiting-law formula. The
covariance rank decides the strategy: a point mass at 0 (rank 0), a 1D
Gauss-Hermite rule along the support line (rank 1), or a tensor rule
(rank 2). A Monte Carlo mode is provided for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import wofz

__all__ = ["GaussianSpec", "ExpectResult", "expect", "expect_mc", "expect_inv_abs2"]

_RANK_TOL = 1e-12


@dataclass(frozen=True)
class GaussianSpec:
    """Absolute 2x2 covariance of (Re G, Im G) with its rank and a factor
    such that factor @ factor.T equals the covariance."""

    cov: np.ndarray
    rank: int
    factor: np.ndarray
    _node_cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_cov(cls, cov):
        cov = np.asarray(cov, dtype=float).reshape(2, 2)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-12:
            raise ValueError("covariance must be symmetric")
        evals, evecs = np.linalg.eigh(cov)
        if evals.min() < -_RANK_TOL:
            raise ValueError("covariance must be positive semidefinite")
        evals = np.clip(evals, 0.0, None)
        rank = int((evals > _RANK_TOL).sum())
        factor = evecs @ np.diag(np.sqrt(evals))
        return cls(cov=cov, rank=rank, factor=factor)

    @classmethod
    def from_covk(cls, K, scale=1.0):
        """Absolute covariance scale*K from a normalized CovK; scale is
        typically delta^2 for the interpolated generator family."""
        return cls.from_cov(K.scaled(scale))

    @classmethod
    def zero(cls):
        return cls.from_cov(np.zeros((2, 2)))

    @classmethod
    def isotropic(cls, c):
        return cls.from_cov(c * np.eye(2))

    @classmethod
    def diag(cls, k11, k22):
        return cls.from_cov(np.diag([float(k11), float(k22)]))

    @property
    def total_var(self):
        """E|G|^2 = trace of the covariance."""
        return float(np.trace(self.cov))

    def nodes(self, n_axis=200):
        """Quadrature nodes (complex values of G) and weights summing to 1."""
        key = int(n_axis)
        if key not in self._node_cache:
            self._node_cache[key] = self._build_nodes(key)
        return self._node_cache[key]

    def _build_nodes(self, n_axis):
        if self.rank == 0:
            return np.zeros(1, dtype=complex), np.ones(1)
        x, w = np.polynomial.hermite.hermgauss(n_axis)
        if self.rank == 1:
            lam, u = self._line()
            gvals = (u[0] + 1j * u[1]) * math.sqrt(2.0 * lam) * x
            return gvals.astype(complex), w / math.sqrt(math.pi)
        xs = math.sqrt(2.0) * x
        g1 = self.factor[0, 0] * xs[:, None] + self.factor[0, 1] * xs[None, :]
        g2 = self.factor[1, 0] * xs[:, None] + self.factor[1, 1] * xs[None, :]
        gvals = (g1 + 1j * g2).ravel()
        ww = (w[:, None] * w[None, :]).ravel() / math.pi
        return gvals, ww

    def _line(self):
        """(variance, unit direction) of the support line for rank 1."""
        evals, evecs = np.linalg.eigh(self.cov)
        i = int(np.argmax(evals))
        return float(evals[i]), evecs[:, i]

    def sample(self, rng, size):
        """Monte Carlo draws of G as complex numbers."""
        flat = int(np.prod(size)) if not np.isscalar(size) else int(size)
        xy = self.factor @ rng.standard_normal((2, flat))
        return (xy[0] + 1j * xy[1]).reshape(size)


@dataclass(frozen=True)
class ExpectResult:
    value: complex
    error_estimate: float


def _apply(h, gvals):
    try:
        out = np.asarray(h(gvals))
        if out.shape != gvals.shape:
            raise TypeError
    except Exception:
        out = np.array([h(g) for g in gvals])
    bad = ~np.isfinite(out)
    if bad.any():
        node = gvals[np.flatnonzero(bad)[0]]
        raise ValueError(f"integrand not finite at node G={node}")
    return out


def expect(spec, h, n_axis=200):
    """Deterministic E[h(G)] with a crude error estimate from comparing the
    full rule against one with half the nodes per axis."""
    gvals, w = spec.nodes(n_axis)
    value = complex(np.dot(w, _apply(h, gvals)))
    if spec.rank == 0:
        return ExpectResult(value, 0.0)
    g2, w2 = spec.nodes(max(4, n_axis // 2))
    coarse = complex(np.dot(w2, _apply(h, g2)))
    return ExpectResult(value, abs(value - coarse))


def expect_mc(spec, h, trials, rng):
    """Monte Carlo E[h(G)]; returns (mean, standard error)."""
    gvals = spec.sample(rng, trials)
    vals = _apply(h, gvals)
    mean = complex(vals.mean())
    var = float((np.abs(vals - mean) ** 2).sum() / (trials - 1))
    return mean, math.sqrt(var / trials)


def _gaussian_stieltjes(u):
    """S(u) = E[1/(T - u)] for T standard normal, Im u > 0."""
    return 1j * math.sqrt(math.pi / 2.0) * wofz(u / math.sqrt(2.0))


def expect_inv_abs2(spec, z):
    """E[1/|G - z|^2] as an extended real.

    Divergent cases are short-circuited analytically: invertible covariance
    (the 2D integrand is non-integrable at z) and z exactly on the support
    line of a rank-1 G. Rank 1 off the line uses the exact Gaussian
    Stieltjes transform, so the support test has no quadrature error.
    """
    z = complex(z)
    if spec.rank == 0:
        return math.inf if z == 0 else 1.0 / abs(z) ** 2
    if spec.rank == 2:
        return math.inf
    lam, u = spec._line()
    uc = u[0] + 1j * u[1]
    a = (np.conj(uc) * z).real
    b = abs((np.conj(uc) * z).imag)
    if b == 0.0:
        return math.inf
    s = _gaussian_stieltjes((a + 1j * b) / math.sqrt(lam))
    return float(s.imag / (math.sqrt(lam) * b))
