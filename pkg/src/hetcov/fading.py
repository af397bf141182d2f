"""Fading power-gain distributions expressed as Fox H densities.

Every catalog entry is normalized to unit mean power (E[H] = 1) so that
coverage results depend on the distribution shape only.  ``RawH`` accepts an
arbitrary parameter sequence and is kept exactly as given, after rescaling
``kappa`` so the density integrates to one.

Each distribution exposes the H representation of its pdf, exact Mellin
moments, and a deterministic sampler for Monte Carlo validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .foxh import (
    HFunction,
    HOrder,
    HParams,
    eval_h,
    eval_h_many,
    mellin_moment,
)

__all__ = [
    "Rayleigh",
    "Nakagami",
    "AlphaMu",
    "FisherF",
    "EGK",
    "RawH",
    "FadingSpec",
    "FoxHDistribution",
    "UnnormalizedDistribution",
    "make_distribution",
    "sample",
]


class UnnormalizedDistribution(ValueError):
    """The density mass differs from one beyond tolerance."""


@dataclass(frozen=True)
class Rayleigh:
    """Exponential power gain (Rayleigh amplitude), unit mean."""


@dataclass(frozen=True)
class Nakagami:
    m: float

    def __post_init__(self):
        if self.m < 0.5:
            raise ValueError("Nakagami shape m must be >= 0.5")


@dataclass(frozen=True)
class AlphaMu:
    """Generalized gamma power gain: pdf ~ x^{alpha mu - 1} exp(-(c x)^alpha)."""

    alpha: float
    mu: float

    def __post_init__(self):
        if self.alpha <= 0 or self.mu <= 0:
            raise ValueError("alpha and mu must be positive")


@dataclass(frozen=True)
class FisherF:
    """Fisher-Snedecor F composite gain; needs ms > 1 for a finite mean."""

    m: float
    ms: float

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError("m must be positive")
        if self.ms <= 1:
            raise ValueError("ms must exceed 1 for a finite-mean power gain")


@dataclass(frozen=True)
class EGK:
    """Extended generalized K: product of two generalized gamma variates."""

    m: float
    zeta: float
    ks: float

    def __post_init__(self):
        if min(self.m, self.zeta, self.ks) <= 0:
            raise ValueError("m, zeta, ks must be positive")


@dataclass(frozen=True)
class RawH:
    """Explicit H parameter sequence; kappa is rescaled to normalize the pdf."""

    order: HOrder
    kappa: float
    c: float
    a: tuple[float, ...] = ()
    A: tuple[float, ...] = ()
    b: tuple[float, ...] = ()
    B: tuple[float, ...] = ()


FadingSpec = Union[Rayleigh, Nakagami, AlphaMu, FisherF, EGK, RawH]


class FoxHDistribution:
    """A positive random variable whose pdf is kappa * H(c x)."""

    def __init__(self, spec: FadingSpec, h: HFunction,
                 sampler_kind: str, sampler_args: tuple = (),
                 name: str | None = None,
                 allow_unnormalized: bool = False):
        self.spec = spec
        self.h = h
        self.name = name if name is not None else type(spec).__name__
        self._sampler_kind = sampler_kind
        self._sampler_args = sampler_args
        self._inv_cdf = None
        # |mass - 1| measured once, at construction, from the exact Mellin
        # representation of the density
        self.normalization_defect = abs(mellin_moment(h, 0.0) - 1.0)
        if not allow_unnormalized and not self.normalization_defect <= 1e-6:
            raise UnnormalizedDistribution(
                f"{self.name}: density mass deviates from 1 by "
                f"{self.normalization_defect:.3g}")

    def pdf(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = eval_h_many(self.h, xs, tol=1e-10)
        return out if np.ndim(x) else float(out[0])

    def moment(self, s: float) -> float:
        """E[X^s] via the exact Mellin integral of the density."""
        return mellin_moment(self.h, s)

    @property
    def mean(self) -> float:
        return self.moment(1.0)

    # -- sampling ------------------------------------------------------------

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        kind = self._sampler_kind
        if kind == "exponential":
            return rng.standard_exponential(size)
        if kind == "gamma_power":
            # X = Gamma(mu)^{1/alpha} / c
            alpha, mu, c = self._sampler_args
            return rng.gamma(mu, size=size) ** (1.0 / alpha) / c
        if kind == "gamma_ratio":
            # X = G_m / (c * G_ms)
            m, ms, c = self._sampler_args
            return rng.gamma(m, size=size) / (c * rng.gamma(ms, size=size))
        if kind == "gamma_product_power":
            # X = (prod_j Gamma(k_j))^{zeta_j-powers} / c, all zeta equal here
            shapes, zeta, c = self._sampler_args
            out = np.ones(size)
            for k in shapes:
                out *= rng.gamma(k, size=size)
            return out ** zeta / c
        if kind == "inverse_cdf":
            if self._inv_cdf is None:
                self._inv_cdf = _build_inverse_cdf(self.h)
            return self._inv_cdf(rng.random(size))
        raise ValueError(f"unknown sampler kind {kind!r}")


def _build_inverse_cdf(h: HFunction, nodes: int = 2048):
    """Tabulated monotone inverse CDF on a wide log grid."""
    lo, hi = 1e-8, 1e4
    # shrink the window to where the density has visible mass
    xs = np.geomspace(lo, hi, nodes)
    pdf = np.maximum(eval_h_many(h, xs, tol=1e-9), 0.0)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(xs))])
    total = cdf[-1]
    if not 0.98 < total < 1.02:
        raise ValueError(f"inverse-CDF table only captured mass {total:g}")
    cdf /= total
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    interp = PchipInterpolator(cdf[keep], xs[keep], extrapolate=False)
    x_lo, x_hi = xs[keep][0], xs[keep][-1]

    def inv(u: np.ndarray) -> np.ndarray:
        out = interp(u)
        return np.where(np.isnan(out), np.where(u < 0.5, x_lo, x_hi), out)

    return inv


def sample(dist: FoxHDistribution, rng: np.random.Generator,
           count: int) -> np.ndarray:
    """i.i.d. draws from ``dist``; deterministic given the generator state."""
    if not dist.normalization_defect <= 1e-6:
        raise UnnormalizedDistribution(
            f"{dist.name}: cannot sample, density mass deviates from 1 by "
            f"{dist.normalization_defect:.3g}")
    return dist.sample(rng, count)


def make_distribution(spec: FadingSpec,
                      allow_unnormalized: bool = False) -> FoxHDistribution:
    if isinstance(spec, Rayleigh):
        h = HFunction(HOrder(1, 0, 0, 1),
                      HParams(1.0, 1.0, (), (), (0.0,), (1.0,)))
        return FoxHDistribution(spec, h, "exponential")

    if isinstance(spec, Nakagami):
        m = spec.m
        h = HFunction(HOrder(1, 0, 0, 1),
                      HParams(m / math.gamma(m), m, (), (), (m - 1.0,), (1.0,)))
        return FoxHDistribution(spec, h, "gamma_power", (1.0, m, m))

    if isinstance(spec, AlphaMu):
        al, mu = spec.alpha, spec.mu
        # unit mean: c = Gamma(mu + 1/alpha) / Gamma(mu)
        c = math.exp(math.lgamma(mu + 1.0 / al) - math.lgamma(mu))
        h = HFunction(
            HOrder(1, 0, 0, 1),
            HParams(c / math.gamma(mu), c, (), (),
                    (mu - 1.0 / al,), (1.0 / al,)),
        )
        return FoxHDistribution(spec, h, "gamma_power", (al, mu, c))

    if isinstance(spec, FisherF):
        m, ms = spec.m, spec.ms
        c = m / (ms - 1.0)
        h = HFunction(
            HOrder(1, 1, 1, 1),
            HParams(c / (math.gamma(m) * math.gamma(ms)), c,
                    (-ms,), (1.0,), (m - 1.0,), (1.0,)),
        )
        return FoxHDistribution(spec, h, "gamma_ratio", (m, ms, c))

    if isinstance(spec, EGK):
        m, zeta, ks = spec.m, spec.zeta, spec.ks
        beta = math.exp(math.lgamma(m + 1.0 / zeta) - math.lgamma(m))
        beta_s = math.exp(math.lgamma(ks + 1.0 / zeta) - math.lgamma(ks))
        c = beta * beta_s
        h = HFunction(
            HOrder(2, 0, 0, 2),
            HParams(c / (math.gamma(m) * math.gamma(ks)), c, (), (),
                    (m - 1.0 / zeta, ks - 1.0 / zeta), (1.0 / zeta, 1.0 / zeta)),
        )
        return FoxHDistribution(spec, h, "gamma_product_power",
                                ((m, ks), 1.0 / zeta, c))

    if isinstance(spec, RawH):
        h0 = HFunction(spec.order, HParams(spec.kappa, spec.c, spec.a, spec.A,
                                           spec.b, spec.B))
        mass = mellin_moment(h0, 0.0)
        if mass <= 0 or not math.isfinite(mass):
            raise ValueError(f"parameter sequence has non-normalizable mass {mass!r}")
        if not allow_unnormalized and abs(mass - 1.0) > 1e-6:
            raise UnnormalizedDistribution(
                f"RawH density mass is {mass:.6g}; pass allow_unnormalized "
                "to rescale kappa")
        h = HFunction(spec.order, HParams(spec.kappa / mass, spec.c, spec.a,
                                          spec.A, spec.b, spec.B))
        o = spec.order
        if o.n == 0 and o.p == 0 and len(set(spec.B)) == 1:
            # pure gamma-product form: X = (prod Gamma(b_j + B))^B / c
            B = spec.B[0]
            shapes = tuple(bj + B for bj in spec.b)
            return FoxHDistribution(spec, h, "gamma_product_power",
                                    (shapes, B, spec.c))
        return FoxHDistribution(spec, h, "inverse_cdf")

    raise TypeError(f"unsupported fading spec {spec!r}")
