"""Entry distributions for the random weight matrices.

Each law carries *analytic* statistics (mean, variance, normalized covariance
of real/imaginary parts), so that downstream solvers never depend on Monte
Carlo estimates of the law itself. Samplers take an explicit
``numpy.random.Generator`` and are safe to use concurrently when each task
owns its generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CovK",
    "LawStats",
    "PSchedule",
    "EntryLaw",
    "ShiftedExponential",
    "RealGaussian",
    "ComplexGaussian",
    "Bernoulli",
    "Rademacher",
    "Constant",
    "UniformY",
    "DiscreteY",
    "SparseBernoulliTimesY",
    "law_stats",
    "sample_entry",
    "sample_array",
    "lindeberg_diagnostic",
    "law_to_config",
    "law_from_config",
]

_PSD_TOL = 1e-12


@dataclass(frozen=True)
class CovK:
    """Normalized covariance of (Re x, Im x); symmetric, k21 = k12 implied."""

    k11: float
    k12: float
    k22: float

    def __post_init__(self):
        if self.k11 < -_PSD_TOL or self.k22 < -_PSD_TOL:
            raise ValueError("covariance diagonal must be nonnegative")
        if self.k11 * self.k22 - self.k12**2 < -_PSD_TOL:
            raise ValueError("covariance must be positive semidefinite")

    @property
    def trace(self):
        return self.k11 + self.k22

    def as_matrix(self):
        return np.array([[self.k11, self.k12], [self.k12, self.k22]])

    def scaled(self, factor):
        """The matrix ``factor * K`` as a plain ndarray."""
        return factor * self.as_matrix()


@dataclass(frozen=True)
class LawStats:
    """Closed-form statistics of a law at a given dimension n."""

    m: complex
    sigma2: float
    K: CovK

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class PSchedule:
    """Sparsity schedule p(n), either constant or c*(log n)^power / n."""

    kind: str  # "constant" | "log_power"
    p: float = 0.0
    coeff: float = 1.0
    power: float = 1.0

    def __call__(self, n):
        if self.kind == "constant":
            return self.p
        if self.kind == "log_power":
            if n < 2:
                raise ValueError("log-power schedule needs n >= 2")
            return min(1.0, self.coeff * math.log(n) ** self.power / n)
        raise ValueError(f"unknown schedule kind {self.kind!r}")


_REAL_K = CovK(1.0, 0.0, 0.0)


class EntryLaw:
    """Base class; concrete laws implement stats and bulk sampling."""

    kind = "abstract"
    #: support contained in [0, inf) — required by the Markov-case reports
    nonneg_real = False

    def stats(self, n) -> LawStats:
        raise NotImplementedError

    def sample(self, n, rng, size) -> np.ndarray:
        raise NotImplementedError

    def degenerate(self, n) -> bool:
        return self.stats(n).sigma2 == 0.0


@dataclass(frozen=True)
class ShiftedExponential(EntryLaw):
    """Exponential(rate) shifted by a constant; rate 1 / shift -1 is centered."""

    rate: float = 1.0
    shift: float = 0.0
    kind = "shifted_exponential"

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("rate must be positive")

    @property
    def nonneg_real(self):
        return self.shift >= 0.0

    def stats(self, n):
        return LawStats(complex(1.0 / self.rate + self.shift), 1.0 / self.rate**2, _REAL_K)

    def sample(self, n, rng, size):
        return rng.exponential(1.0 / self.rate, size) + self.shift


@dataclass(frozen=True)
class RealGaussian(EntryLaw):
    mean: float = 0.0
    var: float = 1.0
    kind = "real_gaussian"

    def __post_init__(self):
        if self.var <= 0:
            raise ValueError("variance must be positive")

    def stats(self, n):
        return LawStats(complex(self.mean), self.var, _REAL_K)

    def sample(self, n, rng, size):
        return self.mean + math.sqrt(self.var) * rng.standard_normal(size)


@dataclass(frozen=True)
class ComplexGaussian(EntryLaw):
    """Complex Gaussian with mean and absolute covariance of (Re, Im)."""

    mean: complex = 0.0
    c11: float = 0.5
    c12: float = 0.0
    c22: float = 0.5
    kind = "complex_gaussian"

    def __post_init__(self):
        CovK(self.c11, self.c12, self.c22)  # PSD validation
        if self.c11 + self.c22 <= 0:
            raise ValueError("total variance must be positive")

    def _chol(self):
        cov = np.array([[self.c11, self.c12], [self.c12, self.c22]])
        w, v = np.linalg.eigh(cov)
        w = np.clip(w, 0.0, None)
        return v * np.sqrt(w)[None, :]

    def stats(self, n):
        s2 = self.c11 + self.c22
        return LawStats(complex(self.mean), s2, CovK(self.c11 / s2, self.c12 / s2, self.c22 / s2))

    def sample(self, n, rng, size):
        flat = int(np.prod(size)) if not np.isscalar(size) else size
        xy = rng.standard_normal((2, flat))
        re, im = self._chol() @ xy
        out = re + 1j * im + self.mean
        return out.reshape(size)


@dataclass(frozen=True)
class Bernoulli(EntryLaw):
    p: float = 0.5
    kind = "bernoulli"
    nonneg_real = True

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")

    def stats(self, n):
        s2 = self.p * (1.0 - self.p)
        return LawStats(complex(self.p), s2, _REAL_K if s2 > 0 else CovK(0.0, 0.0, 0.0))

    def sample(self, n, rng, size):
        return (rng.random(size) < self.p).astype(float)


@dataclass(frozen=True)
class Rademacher(EntryLaw):
    kind = "rademacher"

    def stats(self, n):
        return LawStats(0j, 1.0, _REAL_K)

    def sample(self, n, rng, size):
        return rng.integers(0, 2, size).astype(float) * 2.0 - 1.0


@dataclass(frozen=True)
class Constant(EntryLaw):
    """Degenerate law, admitted only for algebraic smoke tests."""

    value: complex = 1.0
    kind = "constant"

    @property
    def nonneg_real(self):
        return self.value.imag == 0 and self.value.real >= 0

    def stats(self, n):
        return LawStats(complex(self.value), 0.0, CovK(0.0, 0.0, 0.0))

    def sample(self, n, rng, size):
        val = complex(self.value)
        if val.imag == 0:
            return np.full(size, val.real)
        return np.full(size, val)


@dataclass(frozen=True)
class UniformY:
    """Bounded factor law on [lo, hi] for the sparse product model."""

    lo: float = 0.0
    hi: float = 1.0
    kind = "uniform"

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("need hi > lo")

    @property
    def mean(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def second_moment(self):
        return (self.hi**3 - self.lo**3) / (3.0 * (self.hi - self.lo))

    @property
    def diameter(self):
        return self.hi - self.lo

    @property
    def nonneg(self):
        return self.lo >= 0.0

    def sample(self, rng, size):
        return rng.uniform(self.lo, self.hi, size)


@dataclass(frozen=True)
class DiscreteY:
    """Bounded discrete factor law given by values and probabilities."""

    values: tuple = (1.0,)
    probs: tuple = (1.0,)
    kind = "discrete"

    def __post_init__(self):
        if len(self.values) != len(self.probs):
            raise ValueError("values and probs must have equal length")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    @property
    def mean(self):
        return sum(v * p for v, p in zip(self.values, self.probs))

    @property
    def second_moment(self):
        return sum(v * v * p for v, p in zip(self.values, self.probs))

    @property
    def diameter(self):
        return max(self.values) - min(self.values)

    @property
    def nonneg(self):
        return min(self.values) >= 0.0

    def sample(self, rng, size):
        idx = rng.choice(len(self.values), size=size, p=np.asarray(self.probs))
        return np.asarray(self.values, dtype=float)[idx]


@dataclass(frozen=True)
class SparseBernoulliTimesY(EntryLaw):
    """x = eps(n) * y with eps ~ Bernoulli(p(n)) and y a bounded real law."""

    schedule: PSchedule = field(default_factory=lambda: PSchedule("constant", p=0.1))
    y: object = field(default_factory=lambda: DiscreteY((1.0,), (1.0,)))
    kind = "sparse_bernoulli_y"

    def __post_init__(self):
        if not math.isfinite(self.y.diameter):
            raise ValueError("factor law must have bounded support")

    @property
    def nonneg_real(self):
        return self.y.nonneg

    def stats(self, n):
        p = self.schedule(n)
        my = self.y.mean
        s2 = p * self.y.second_moment - (p * my) ** 2
        return LawStats(complex(p * my), s2, _REAL_K if s2 > 0 else CovK(0.0, 0.0, 0.0))

    def sample(self, n, rng, size):
        p = self.schedule(n)
        keep = rng.random(size) < p
        return np.where(keep, self.y.sample(rng, size), 0.0)


def law_stats(law, n):
    """Analytic (m, sigma^2, K) of the law at dimension n; K has unit trace
    for every non-degenerate law, and is reported exactly as
    [[1,0],[0,0]] for real-valued laws."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return law.stats(n)


def sample_entry(law, n, rng):
    """One draw from the law at dimension n."""
    return complex(law.sample(n, rng, size=()))


def sample_array(law, n, rng, size):
    """Bulk i.i.d. draws; real laws return float arrays, complex laws complex."""
    return law.sample(n, rng, size)


def lindeberg_diagnostic(law, n, eps, trials, seed=0):
    """Monte Carlo estimate of the truncated second-moment ratio
    sigma^-2 E[|x-m|^2 1{|x-m|^2 >= eps n sigma^2}].

    Returns (estimate, standard_error). A vanishing estimate as n grows is
    what the tail hypothesis on the entry law asks for.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    st = law_stats(law, n)
    rng = np.random.default_rng(seed)
    x = np.asarray(law.sample(n, rng, trials))
    dev2 = np.abs(x - st.m) ** 2
    if st.sigma2 == 0.0:
        return 0.0, 0.0
    vals = dev2 * (dev2 >= eps * n * st.sigma2) / st.sigma2
    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return est, se


_LAW_KINDS = {
    "shifted_exponential": ShiftedExponential,
    "real_gaussian": RealGaussian,
    "complex_gaussian": ComplexGaussian,
    "bernoulli": Bernoulli,
    "rademacher": Rademacher,
    "constant": Constant,
    "sparse_bernoulli_y": SparseBernoulliTimesY,
}


def law_to_config(law):
    """Flatten a law to string key/values for the run-config format."""
    out = {"kind": law.kind}
    if isinstance(law, ShiftedExponential):
        out |= {"rate": repr(law.rate), "shift": repr(law.shift)}
    elif isinstance(law, RealGaussian):
        out |= {"mean": repr(law.mean), "var": repr(law.var)}
    elif isinstance(law, ComplexGaussian):
        out |= {
            "mean_re": repr(law.mean.real),
            "mean_im": repr(law.mean.imag),
            "c11": repr(law.c11),
            "c12": repr(law.c12),
            "c22": repr(law.c22),
        }
    elif isinstance(law, Bernoulli):
        out |= {"p": repr(law.p)}
    elif isinstance(law, Constant):
        out |= {"value_re": repr(complex(law.value).real), "value_im": repr(complex(law.value).imag)}
    elif isinstance(law, SparseBernoulliTimesY):
        sch = law.schedule
        if sch.kind == "constant":
            out |= {"p_schedule": f"constant:{sch.p!r}"}
        else:
            out |= {"p_schedule": f"log_power:{sch.coeff!r}:{sch.power!r}"}
        y = law.y
        if isinstance(y, UniformY):
            out |= {"y": f"uniform:{y.lo!r}:{y.hi!r}"}
        else:
            vals = ",".join(repr(v) for v in y.values)
            probs = ",".join(repr(p) for p in y.probs)
            out |= {"y": f"discrete:{vals}:{probs}"}
    elif isinstance(law, Rademacher):
        pass
    else:
        raise ValueError(f"cannot serialize law {law!r}")
    return out


def _parse_schedule(text):
    parts = text.split(":")
    if parts[0] == "constant":
        return PSchedule("constant", p=float(parts[1]))
    if parts[0] == "log_power":
        return PSchedule("log_power", coeff=float(parts[1]), power=float(parts[2]))
    raise ValueError(f"unknown schedule {text!r}")


def _parse_y(text):
    parts = text.split(":")
    if parts[0] == "uniform":
        return UniformY(float(parts[1]), float(parts[2]))
    if parts[0] == "discrete":
        vals = tuple(float(v) for v in parts[1].split(","))
        probs = tuple(float(p) for p in parts[2].split(","))
        return DiscreteY(vals, probs)
    raise ValueError(f"unknown factor law {text!r}")


def law_from_config(section):
    """Inverse of law_to_config; accepts any mapping of strings."""
    kind = section["kind"]
    if kind not in _LAW_KINDS:
        raise ValueError(f"unknown law kind {kind!r}")
    if kind == "shifted_exponential":
        return ShiftedExponential(float(section["rate"]), float(section["shift"]))
    if kind == "real_gaussian":
        return RealGaussian(float(section["mean"]), float(section["var"]))
    if kind == "complex_gaussian":
        return ComplexGaussian(
            complex(float(section["mean_re"]), float(section["mean_im"])),
            float(section["c11"]),
            float(section["c12"]),
            float(section["c22"]),
        )
    if kind == "bernoulli":
        return Bernoulli(float(section["p"]))
    if kind == "rademacher":
        return Rademacher()
    if kind == "constant":
        return Constant(complex(float(section["value_re"]), float(section["value_im"])))
    return SparseBernoulliTimesY(_parse_schedule(section["p_schedule"]), _parse_y(section["y"]))
