"""Construction of the random generator matrices L = X - delta*D and friends.

Everything is dense: the target sizes (n up to a few thousand) keep dense
eigensolvers comfortable and avoid iterative-solver dependencies. Matrices are
treated as immutable once sampled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entry_laws import EntryLaw, LawStats, law_stats

__all__ = [
    "GeneratorSample",
    "CenteredParts",
    "splitmix64",
    "derive_seed",
    "kahan_rowsum",
    "sample_generator",
    "rescale",
    "center",
]

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """One step of the splitmix64 mixer; maps uint64 -> uint64."""
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master, index):
    """Per-replica stream seed: master XOR splitmix64(index).

    Documented so that parallel schedules reproduce the sequential run.
    """
    return (int(master) & _MASK64) ^ splitmix64(index)


def kahan_rowsum(X):
    """Compensated row sums; keeps the zero-row-sum identity tight for large n."""
    n = X.shape[1]
    total = X[:, 0].copy()
    comp = np.zeros_like(total)
    for j in range(1, n):
        y = X[:, j] - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


@dataclass(frozen=True)
class GeneratorSample:
    """One realization (X, D, L) at size n with its seed provenance."""

    n: int
    X: np.ndarray
    D: np.ndarray  # diagonal entries, length n
    L: np.ndarray
    delta: float
    seed: int
    law: EntryLaw


@dataclass(frozen=True)
class CenteredParts:
    Xbar: np.ndarray
    Dbar: np.ndarray  # diagonal entries, length n
    Lbar: np.ndarray


def sample_generator(law, n, delta=1.0, seed=0):
    """Draw X with i.i.d. entries, form D from the (compensated) row sums and
    L = X - delta*D. Bit-identical output for identical (law, n, delta, seed).
    """
    if n < 2:
        raise ValueError("generator needs n >= 2")
    rng = np.random.default_rng(int(seed) & _MASK64)
    X = np.asarray(law.sample(n, rng, (n, n)))
    D = kahan_rowsum(X)
    L = X - delta * np.diag(D)
    return GeneratorSample(n=n, X=X, D=D, L=L, delta=float(delta), seed=int(seed), law=law)


def rescale(sample, stats):
    """M = (L + n m I) / (sigma sqrt(n)); rejects degenerate laws."""
    if stats.sigma2 <= 0.0:
        raise ValueError("degenerate law: sigma^2 = 0 admits no rescaling")
    n = sample.n
    shift = n * stats.m
    if shift.imag == 0 and not np.iscomplexobj(sample.L):
        M = sample.L + np.diag(np.full(n, shift.real))
    else:
        M = sample.L + np.diag(np.full(n, shift, dtype=complex))
    return M / (stats.sigma * np.sqrt(n))


def center(sample, stats):
    """Centered matrices: Xbar = X - mJ, Dbar = D - nmI, Lbar = Xbar - delta*Dbar.

    At delta = 1 the identity Lbar + (mJ - mnI) = L holds exactly.
    """
    n = sample.n
    m = stats.m if np.iscomplexobj(sample.X) else stats.m.real
    Xbar = sample.X - m
    Dbar = sample.D - n * m
    Lbar = Xbar - sample.delta * np.diag(Dbar)
    return CenteredParts(Xbar=Xbar, Dbar=Dbar, Lbar=Lbar)
