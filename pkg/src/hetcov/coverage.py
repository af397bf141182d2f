"""Analytic coverage probabilities for multi-tier Poisson cellular networks.

Tiers are independent PPPs with their own density, transmit power, SINR
threshold, noise level, and H-function fading on every link.  Two cell
association rules (strongest average received signal, and max-SINR) and two
path-loss laws (r^-alpha and (1+r)^-alpha) are supported.

All results come from transform identities of the fading H-functions:

* the signal kernel K(xi) = xi^-2 H(xi; signal params) satisfies
  int_0^inf K(xi) e^{-xi T} dxi = P(H >= beta T), turning each conditional
  coverage probability into a Laplace-functional average;
* the interference kernels Psi1, Psi2 encode
  2 int_1^inf (1 - phi(xi u^-alpha)) u du = delta xi Psi1(xi) and
  int_1^inf (1 - phi(xi u^-alpha)) du = (delta/2) xi Psi2(xi),
  phi the Laplace transform of the fading power gain;
* the noise weight Phi(w) = int_0^inf exp(-v^{1/delta} - w v) dv equals
  delta * H^{1,1}_{1,1}(w) with parameters (1, 1, 1-delta, 0, delta, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator

from .fading import FoxHDistribution
from .foxh import (
    DegenerateHFunction,
    HFunction,
    HOrder,
    HParams,
    PoleHit,
    QuadratureFailure,
    coverage_weight_h,
    eval_h_many,
    mellin_moment,
    reduce,
)

__all__ = [
    "PathLossModel",
    "Tier",
    "NetworkConfig",
    "CoverageResult",
    "InvalidConfig",
    "c_delta",
    "lambda_moment",
    "phi_delta",
    "signal_kernel",
    "interference_kernel",
    "coverage_rss_unbounded",
    "coverage_rss_unbounded_dense",
    "coverage_rss_bounded_conditional",
    "coverage_rss_bounded",
    "coverage_rss_bounded_il",
    "coverage_rss_bounded_dense",
    "coverage_maxsinr_unbounded",
    "coverage_maxsinr_il",
    "coverage_alpha_mu_il",
    "coverage_maxsinr_bounded",
]


class InvalidConfig(ValueError):
    """Configuration violates a precondition of the requested model."""


class PathLossModel(str, Enum):
    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class Tier:
    """One network tier: density (BS/m^2), power (W), SINR threshold
    (linear), fading gain distribution, and noise power (W) at its users."""

    density: float
    power: float
    beta: float
    fading: FoxHDistribution
    noise: float = 0.0

    def __post_init__(self):
        if self.density <= 0 or self.power <= 0 or self.beta <= 0:
            raise InvalidConfig("density, power and beta must be positive")
        if self.noise < 0:
            raise InvalidConfig("noise must be nonnegative")


@dataclass(frozen=True)
class NetworkConfig:
    tiers: tuple[Tier, ...]
    alpha: float
    pathloss: PathLossModel = PathLossModel.UNBOUNDED

    def __post_init__(self):
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if not self.tiers:
            raise InvalidConfig("need at least one tier")
        if self.alpha <= 2:
            raise InvalidConfig("path-loss exponent must exceed 2")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha


@dataclass
class CoverageResult:
    value: float
    abs_error_estimate: float
    diagnostics: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------


def c_delta(delta: float) -> float:
    """pi^2 delta / sin(pi delta), the interference-limited max-SINR constant."""
    if not 0 < delta < 1:
        raise InvalidConfig("delta must lie in (0, 1)")
    return math.pi ** 2 * delta / math.sin(math.pi * delta)


def lambda_moment(dist: FoxHDistribution, delta: float) -> float:
    """Fractional fading moment E[H^delta]."""
    return mellin_moment(dist.h, delta)


@lru_cache(maxsize=64)
def _phi_h(delta: float) -> HFunction:
    return coverage_weight_h(delta)


def phi_delta(w, delta: float):
    """Noise weight Phi(w) = int_0^inf exp(-v^{1/delta} - w v) dv.

    Phi(0) = Gamma(1+delta) and Phi(w) ~ 1/w as w grows.
    """
    if not 0 < delta < 1:
        raise InvalidConfig("delta must lie in (0, 1)")
    ws = np.atleast_1d(np.asarray(w, dtype=float))
    if np.any(ws < 0):
        raise ValueError("argument must be nonnegative")
    out = np.empty_like(ws)
    zero = ws == 0
    out[zero] = math.gamma(1.0 + delta)
    pos = ~zero
    if np.any(pos):
        # beyond ~1e8 the H evaluation buys nothing over the leading term
        big = pos & (ws > 1e8)
        mid = pos & ~big
        if np.any(mid):
            out[mid] = delta * eval_h_many(_phi_h(delta), ws[mid], tol=1e-10)
        if np.any(big):
            wb = ws[big]
            g1 = math.gamma(1.0 + 1.0 / delta)
            g2 = math.gamma(1.0 + 2.0 / delta)
            out[big] = (1.0 - g1 / wb ** (1.0 / delta)
                        + g2 / (2.0 * wb ** (2.0 / delta))) / wb
    return out if np.ndim(w) else float(out[0])


# ---------------------------------------------------------------------------
# Kernels derived from the fading H-function
# ---------------------------------------------------------------------------


class SignalKernel:
    """Mixing kernel K(xi) = xi^-2 H(xi) with int K(xi) e^{-xi T} dxi = F_bar(beta T).

    Fully reducible kernels (exponential-type fading) collapse to a point
    mass at xi0 with the stored weight.
    """

    def __init__(self, dist: FoxHDistribution, beta: float,
                 tab_tol: float = 1e-7):
        h = dist.h
        o, pr = h.order, h.params
        kappa = pr.kappa * beta
        c = 1.0 / (pr.c * beta)
        a_new = tuple(1.0 - bj for bj in pr.b)
        A_new = pr.B
        b_new = tuple(1.0 - ai for ai in pr.a) + (1.0,)
        B_new = pr.A + (1.0,)
        self.h = HFunction(HOrder(o.n, o.m, o.q, o.p + 1),
                           HParams(kappa, c, a_new, A_new, b_new, B_new))
        hr = reduce(self.h)
        if hr.order == HOrder(0, 0, 0, 0):
            self.dirac = True
            self.xi0 = 1.0 / c
            self.weight = kappa / c
        else:
            self.dirac = False
            if hr.mu_star <= 1e-12:
                raise InvalidConfig(
                    "this fading model's signal kernel is not representable as "
                    "a pointwise function (its contour integrand does not "
                    "decay); use the Monte Carlo estimator for this model"
                )
            if hr.strip().empty:
                raise InvalidConfig("signal kernel has an empty Mellin strip")
            self.xi0 = 1.0 / c
            self._tab = _TabulatedH(hr, tab_tol)

    def density(self, xi: np.ndarray) -> np.ndarray:
        if self.dirac:
            raise InvalidConfig("point-mass kernel has no density")
        return self._tab(xi) / xi ** 2

    def expectation(self, g: Callable[[np.ndarray], np.ndarray],
                    tol: float, abs_tol: float = 0.0) -> tuple[float, float]:
        """int_0^inf K(xi) g(xi) dxi for vectorized g."""
        if self.dirac:
            val = self.weight / self.xi0 ** 2 * float(g(np.array([self.xi0]))[0])
            return val, abs(val) * 1e-12
        f = lambda xi: self.density(xi) * g(xi)
        return _integrate_decades(f, self.xi0, tol, abs_tol=abs_tol)


def signal_kernel(dist: FoxHDistribution, beta: float) -> SignalKernel:
    return SignalKernel(dist, beta)


def interference_kernel(dist: FoxHDistribution, delta: float,
                        half: bool = False) -> HFunction:
    """H-function whose evaluation gives Psi1 (half=False) or Psi2 (half=True)."""
    if not 0 < delta < 1:
        raise InvalidConfig("delta must lie in (0, 1)")
    d_eff = delta / 2.0 if half else delta
    h = dist.h
    o, pr = h.order, h.params
    a_new = (
        tuple(1.0 - pr.b[j] - 2.0 * pr.B[j] for j in range(o.m))
        + (0.0, d_eff)
        + tuple(1.0 - pr.b[j] - 2.0 * pr.B[j] for j in range(o.m, o.q))
    )
    A_new = tuple(pr.B[: o.m]) + (1.0, 1.0) + tuple(pr.B[o.m :])
    b_new = (
        (0.0,)
        + tuple(1.0 - pr.a[i] - 2.0 * pr.A[i] for i in range(o.n))
        + tuple(1.0 - pr.a[i] - 2.0 * pr.A[i] for i in range(o.n, o.p))
        + (-1.0, d_eff - 1.0)
    )
    B_new = (1.0,) + pr.A + (1.0, 1.0)
    return HFunction(
        HOrder(o.n + 1, o.m + 2, o.q + 2, o.p + 3),
        HParams(pr.kappa / pr.c ** 2, 1.0 / pr.c, a_new, A_new, b_new, B_new),
    )


class _TabulatedH:
    """Lazy log-grid tabulation of eval_h_many with monotone-cubic readback."""

    def __init__(self, h: HFunction, tol: float = 1e-7):
        self.h = h
        self.tol = tol
        self._lo: Optional[float] = None
        self._hi: Optional[float] = None
        self._interp = None
        self._log_positive = False
        self.nodes_used = 0
        self._memo: dict[float, float] = {}

    def _raw(self, xs: np.ndarray) -> np.ndarray:
        keys = np.round(np.log(xs), 10)
        out = np.array([self._memo.get(k, np.nan) for k in keys])
        missing = np.isnan(out)
        if np.any(missing):
            fresh = eval_h_many(self.h, xs[missing], tol=self.tol * 1e-2)
            self.nodes_used += int(missing.sum())
            out[missing] = fresh
            for k, v in zip(keys[missing], fresh):
                self._memo[k] = float(v)
        return out

    def _build(self, lo: float, hi: float) -> None:
        # nodes sit on an absolute log lattice (24 per decade, midpoints on
        # half-steps) so extending the range re-uses every memoized value
        step = math.log(10.0) / 24.0
        k_lo = math.floor(math.log(lo) / step)
        k_hi = math.ceil(math.log(hi) / step)
        lo, hi = math.exp(k_lo * step), math.exp(k_hi * step)
        xs = np.exp(np.arange(k_lo, k_hi + 1) * step)
        ys = self._raw(xs)
        # verify by midpoint error and subdivide only the failing intervals;
        # a global refinement over many decades would be ruinously expensive
        check = np.ones(len(xs) - 1, dtype=bool)
        for _ in range(6):
            floor = 1e-13 * float(np.max(np.abs(ys)))
            ysc = np.where(np.abs(ys) < floor, 0.0, ys)
            positive = bool(np.all(ysc > 0))
            if positive:
                interp = PchipInterpolator(np.log(xs), np.log(ysc))
                back = lambda t: np.exp(interp(t))
            else:
                interp = PchipInterpolator(np.log(xs), ysc)
                back = interp
            idx = np.flatnonzero(check)
            if len(idx) == 0:
                break
            xm = np.sqrt(xs[idx] * xs[idx + 1])
            ym = self._raw(xm)
            ymc = np.where(np.abs(ym) < floor, 0.0, ym)
            err = np.abs(back(np.log(xm)) - ymc)
            scale = np.abs(ymc) + 1e-6 * float(np.max(np.abs(ysc))) + 1e-300
            bad = err > self.tol * scale
            # merge every computed midpoint (they are memoized anyway) and
            # re-verify only the two children of each failing interval
            merged_x = np.concatenate([xs, xm])
            merged_y = np.concatenate([ys, ym])
            order = np.argsort(merged_x)
            xs, ys = merged_x[order], merged_y[order]
            if not np.any(bad):
                floor = 1e-13 * float(np.max(np.abs(ys)))
                ysc = np.where(np.abs(ys) < floor, 0.0, ys)
                positive = bool(np.all(ysc > 0))
                if positive:
                    interp = PchipInterpolator(np.log(xs), np.log(ysc))
                else:
                    interp = PchipInterpolator(np.log(xs), ysc)
                break
            bad_mid = set(np.round(np.log(xm[bad]), 10))
            check = np.zeros(len(xs) - 1, dtype=bool)
            keys = np.round(np.log(xs), 10)
            for i in range(1, len(xs) - 1):
                if keys[i] in bad_mid:
                    check[i - 1] = check[i] = True
        self._lo, self._hi = lo, hi
        self._interp, self._log_positive = interp, positive

    def __call__(self, x) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        lo = float(np.min(xs))
        hi = float(np.max(xs))
        if self._interp is None:
            self._build(lo / 4.0, hi * 4.0)
        elif lo < self._lo or hi > self._hi:
            self._build(min(lo / 4.0, self._lo), max(hi * 4.0, self._hi))
        t = np.log(xs)
        out = self._interp(t)
        return np.exp(out) if self._log_positive else out


# ---------------------------------------------------------------------------
# Quadrature helpers (vectorized integrands)
# ---------------------------------------------------------------------------


def _simpson_refine(F: Callable[[np.ndarray], np.ndarray], ta: float,
                    tb: float, rel_tol: float, abs_tol: float = 0.0,
                    n0: int = 16) -> tuple[float, float]:
    prev = None
    n = n0
    while n <= 16384:
        ts = np.linspace(ta, tb, n + 1)
        ys = F(ts)
        val = float(simpson(ys, x=ts))
        if prev is not None:
            err = abs(val - prev)
            if err <= rel_tol * (abs(val) + 1e-300) or err <= abs_tol:
                return val, err
        prev = val
        n *= 2
    raise QuadratureFailure("integral refinement did not converge")


def _integrate_decades(f: Callable[[np.ndarray], np.ndarray], center: float,
                       tol: float, max_decades: int = 40,
                       abs_tol: float = 0.0) -> tuple[float, float]:
    """int_0^inf f(x) dx by summing per-decade pieces outward from center."""

    def F(ts: np.ndarray) -> np.ndarray:
        xs = np.exp(ts)
        return f(xs) * xs

    total = 0.0
    err = 0.0
    peak = 0.0
    lt0 = math.log(center)
    l10 = math.log(10.0)
    for direction in (1, -1):
        quiet = 0
        for j in range(max_decades):
            if direction == 1:
                ta, tb = lt0 + j * l10, lt0 + (j + 1) * l10
            else:
                ta, tb = lt0 - (j + 1) * l10, lt0 - j * l10
            v, e = _simpson_refine(F, ta, tb, tol,
                                   abs_tol=max(peak * tol * 0.1,
                                               abs_tol * 0.25))
            total += v
            err += e
            peak = max(peak, abs(v))
            if abs(v) <= max(peak, abs(total)) * tol * 1e-2 + 1e-300:
                quiet += 1
                if quiet >= 2:
                    break
            else:
                quiet = 0
        else:
            raise QuadratureFailure("semi-infinite integral tail did not settle")
    return total, err


def _integrate_linear(f: Callable[[np.ndarray], np.ndarray], a: float,
                      b: float, tol: float) -> tuple[float, float]:
    return _simpson_refine(f, a, b, tol, n0=32)


# ---------------------------------------------------------------------------
# Shared per-configuration machinery
# ---------------------------------------------------------------------------


# building a kernel tabulation is expensive (wide-range H evaluations) while
# the result depends only on the fading spec and a scalar, so finished
# tabulations are shared process-wide and across repeated coverage calls
_PSI_CACHE: dict = {}
_SIG_CACHE: dict = {}
_KERNEL_CACHE_CAP = 64


def _cache_put(cache: dict, key, value):
    if len(cache) >= _KERNEL_CACHE_CAP:
        cache.pop(next(iter(cache)))
    cache[key] = value
    return value


class _Workspace:
    """Per-call view of the shared kernel caches, resolved by tier index."""

    def __init__(self, cfg: NetworkConfig, tol: float = 1e-6):
        self.cfg = cfg
        self.delta = cfg.delta
        # tabulations built for a loose request must not be reused by a
        # tighter one, so a tighter request rebuilds and replaces the entry
        self.tab_tol = min(1e-7, tol)
        self._psi: dict[tuple[int, bool], _TabulatedH] = {}
        self._sig: dict[int, SignalKernel] = {}

    def psi(self, j: int, half: bool) -> Callable[[np.ndarray], np.ndarray]:
        key = (j, half)
        if key not in self._psi:
            dist = self.cfg.tiers[j].fading
            gkey = (dist.spec, self.delta, half)
            tab = _PSI_CACHE.get(gkey)
            if tab is None or tab.tol > self.tab_tol:
                tab = _cache_put(_PSI_CACHE, gkey, _TabulatedH(
                    interference_kernel(dist, self.delta, half),
                    self.tab_tol))
            self._psi[key] = tab
        return self._psi[key]

    def sig(self, k: int) -> SignalKernel:
        if k not in self._sig:
            t = self.cfg.tiers[k]
            gkey = (t.fading.spec, t.beta)
            sk = _SIG_CACHE.get(gkey)
            if sk is None or (not sk.dirac and sk._tab.tol > self.tab_tol):
                sk = _cache_put(_SIG_CACHE, gkey,
                                SignalKernel(t.fading, t.beta, self.tab_tol))
            self._sig[k] = sk
        return self._sig[k]

    def diagnostics(self) -> dict:
        return {
            "psi_nodes": {f"tier{j}{'_half' if h else ''}": t.nodes_used
                          for (j, h), t in self._psi.items()},
            "signal_nodes": {f"tier{k}": (0 if s.dirac else s._tab.nodes_used)
                             for k, s in self._sig.items()},
        }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidConfig(msg)


# ---------------------------------------------------------------------------
# RSS association, unbounded path loss
# ---------------------------------------------------------------------------


def _rss_unbounded_denominator(ws: _Workspace, k: int,
                               xi: np.ndarray) -> np.ndarray:
    """pi * sum_j lambda_j (P_j/P_k)^delta (1 + delta xi Psi1_j(xi))."""
    cfg, d = ws.cfg, ws.delta
    Pk = cfg.tiers[k].power
    acc = np.zeros_like(xi)
    for j, tj in enumerate(cfg.tiers):
        acc += tj.density * (tj.power / Pk) ** d * (1.0 + d * xi * ws.psi(j, False)(xi))
    return math.pi * acc


def coverage_rss_unbounded(cfg: NetworkConfig, tol: float = 1e-6) -> CoverageResult:
    """Average coverage, strongest-signal association, r^-alpha path loss."""
    _require(cfg.pathloss is PathLossModel.UNBOUNDED, "unbounded path loss required")
    if all(t.noise == 0 for t in cfg.tiers):
        return coverage_rss_unbounded_dense(cfg, tol)
    ws = _Workspace(cfg, tol)
    d = ws.delta
    total = 0.0
    err = 0.0
    for k, tk in enumerate(cfg.tiers):
        sig = ws.sig(k)

        def g(xi: np.ndarray, k=k, tk=tk) -> np.ndarray:
            b = _rss_unbounded_denominator(ws, k, xi)
            if tk.noise == 0:
                return math.pi * tk.density / b
            A = tk.noise * xi / tk.power
            w = b * A ** (-d)
            return math.pi * tk.density * A ** (-d) * phi_delta(w, d)

        v, e = sig.expectation(g, tol)
        total += v
        err += e
    return CoverageResult(total, err, ws.diagnostics())


def coverage_rss_unbounded_dense(cfg: NetworkConfig,
                                 tol: float = 1e-6) -> CoverageResult:
    """Interference-limited / high-density limit; independent of uniform
    density scaling by construction."""
    _require(cfg.pathloss is PathLossModel.UNBOUNDED, "unbounded path loss required")
    ws = _Workspace(cfg, tol)
    d = ws.delta
    total = 0.0
    err = 0.0
    for k, tk in enumerate(cfg.tiers):
        sig = ws.sig(k)

        def g(xi: np.ndarray, k=k, tk=tk) -> np.ndarray:
            return math.pi * tk.density / _rss_unbounded_denominator(ws, k, xi)

        v, e = sig.expectation(g, tol)
        total += v
        err += e
    return CoverageResult(total, err, ws.diagnostics())


# ---------------------------------------------------------------------------
# RSS association, bounded path loss
# ---------------------------------------------------------------------------


def _bounded_exclusion_exponent(ws: _Workspace, k: int, r: float,
                                xi: np.ndarray) -> np.ndarray:
    """Sum over tiers of the log Laplace functional of the interference seen
    from a serving tier-k BS at distance r, at transform argument
    xi (1+r)^alpha / P_k."""
    cfg, d = ws.cfg, ws.delta
    alpha = cfg.alpha
    Pk = cfg.tiers[k].power
    acc = np.zeros_like(xi)
    for j, tj in enumerate(cfg.tiers):
        y = (1.0 + r) * (tj.power / Pk) ** (1.0 / alpha)
        if y >= 1.0:
            psi1 = ws.psi(j, False)(xi)
            psi2 = ws.psi(j, True)(xi)
            acc += math.pi * d * tj.density * xi * (y * y * psi1 - y * psi2)
        else:
            v = xi * y ** alpha
            psi1 = ws.psi(j, False)(v)
            psi2 = ws.psi(j, True)(v)
            acc += math.pi * d * tj.density * v * (psi1 - psi2)
    return acc


def coverage_rss_bounded_conditional(cfg: NetworkConfig, k: int, r: float,
                                     tol: float = 1e-6) -> CoverageResult:
    """Coverage given the user is served by a tier-k BS at distance r,
    (1+r)^-alpha path loss."""
    _require(cfg.pathloss is PathLossModel.BOUNDED, "bounded path loss required")
    _require(0 <= k < len(cfg.tiers), "tier index out of range")
    _require(r >= 0, "distance must be nonnegative")
    ws = _Workspace(cfg, tol)
    v, e = _bounded_conditional_value(ws, k, r, tol)
    return CoverageResult(v, e, ws.diagnostics())


def _bounded_conditional_value(ws: _Workspace, k: int, r: float,
                               tol: float) -> tuple[float, float]:
    cfg = ws.cfg
    tk = cfg.tiers[k]
    pl = (1.0 + r) ** cfg.alpha
    sig = ws.sig(k)

    def g(xi: np.ndarray) -> np.ndarray:
        expo = _bounded_exclusion_exponent(ws, k, r, xi)
        expo = expo + (tk.noise / tk.power) * xi * pl
        return np.exp(-expo)

    # the result is a probability, so tol also acts as an absolute target
    return sig.expectation(g, tol, abs_tol=tol)


def coverage_rss_bounded(cfg: NetworkConfig, tol: float = 1e-5) -> CoverageResult:
    """Average bounded-path-loss RSS coverage: the conditional value averaged
    over the serving-tier/serving-distance distribution."""
    _require(cfg.pathloss is PathLossModel.BOUNDED, "bounded path loss required")
    ws = _Workspace(cfg, tol)
    alpha = cfg.alpha
    total = 0.0
    err = 0.0
    for k, tk in enumerate(cfg.tiers):
        # no tier-j BS may beat the server: none with (1+x) < (1+r) Ptilde^(1/alpha)
        def void_exponent(r: float) -> float:
            acc = 0.0
            for tj in cfg.tiers:
                y = (1.0 + r) * (tj.power / tk.power) ** (1.0 / alpha)
                acc += math.pi * tj.density * max(y - 1.0, 0.0) ** 2
            return acc

        r_max = 1.0
        while void_exponent(r_max) < 40.0 and r_max < 1e7:
            r_max *= 2.0

        def integrand(rs: np.ndarray) -> np.ndarray:
            out = np.empty_like(rs)
            for i, r in enumerate(rs):
                cond, _ = _bounded_conditional_value(ws, k, float(r), tol)
                out[i] = (2.0 * math.pi * tk.density * r
                          * math.exp(-void_exponent(float(r))) * cond)
            return out

        # the integrand carries the inner quadrature's noise, so the outer
        # refinement also accepts an absolute tolerance (coverage <= 1)
        v, e = _simpson_refine(integrand, 0.0, r_max, tol,
                               abs_tol=0.5 * tol, n0=32)
        total += v
        err += e
    return CoverageResult(total, err, ws.diagnostics())


def coverage_rss_bounded_il(cfg: NetworkConfig, tol: float = 1e-5) -> CoverageResult:
    _require(all(t.noise == 0 for t in cfg.tiers),
             "interference-limited form needs all noise powers zero")
    return coverage_rss_bounded(cfg, tol)


def coverage_rss_bounded_dense(cfg: NetworkConfig, lambda_scale: float,
                               tol: float = 1e-5) -> CoverageResult:
    """Bounded-path-loss interference-limited coverage with every density
    multiplied by lambda_scale; decays roughly exponentially in the scale."""
    _require(lambda_scale > 0, "lambda_scale must be positive")
    _require(all(t.noise == 0 for t in cfg.tiers),
             "dense limit is interference-limited; set noise to zero")
    scaled = NetworkConfig(
        tuple(Tier(t.density * lambda_scale, t.power, t.beta, t.fading, 0.0)
              for t in cfg.tiers),
        cfg.alpha,
        cfg.pathloss,
    )
    return coverage_rss_bounded(scaled, tol)


# ---------------------------------------------------------------------------
# Max-SINR association
# ---------------------------------------------------------------------------


def _check_maxsinr_thresholds(cfg: NetworkConfig) -> None:
    _require(all(t.beta >= 1 for t in cfg.tiers),
             "max-SINR coverage expressions require beta >= 1 (at most one "
             "BS can then exceed the threshold)")


def coverage_maxsinr_unbounded(cfg: NetworkConfig,
                               tol: float = 1e-10) -> CoverageResult:
    """Max-SINR coverage, unbounded path loss, closed form (no quadrature)."""
    _require(cfg.pathloss is PathLossModel.UNBOUNDED, "unbounded path loss required")
    _check_maxsinr_thresholds(cfg)
    if all(t.noise == 0 for t in cfg.tiers):
        return coverage_maxsinr_il(cfg)
    d = cfg.delta
    lam = [lambda_moment(t.fading, d) for t in cfg.tiers]
    denom = sum(t.density * t.power ** d * L for t, L in zip(cfg.tiers, lam))
    total = 0.0
    for t, L in zip(cfg.tiers, lam):
        if t.noise == 0:
            total += (math.sin(math.pi * d) / (math.pi * d)
                      * t.density * t.power ** d * t.beta ** (-d) * L / denom)
        else:
            snr_d = (t.power / t.noise) ** d
            Delta = math.pi * math.gamma(1.0 - d) * denom / t.power ** d
            total += (math.pi * t.density * snr_d * t.beta ** (-d)
                      * L / math.gamma(1.0 + d) * phi_delta(Delta * snr_d, d))
    return CoverageResult(float(total), abs(total) * 1e-10,
                          {"closed_form": True})


def coverage_maxsinr_il(cfg: NetworkConfig) -> CoverageResult:
    """Interference-limited max-SINR coverage; exact closed form.

    Single tier with beta = 1 and alpha = 4 gives exactly 2/pi, independent
    of the fading law.
    """
    _require(cfg.pathloss is PathLossModel.UNBOUNDED, "unbounded path loss required")
    _require(all(t.noise == 0 for t in cfg.tiers),
             "interference-limited form needs all noise powers zero")
    _check_maxsinr_thresholds(cfg)
    d = cfg.delta
    lam = [lambda_moment(t.fading, d) for t in cfg.tiers]
    num = sum(t.density * t.power ** d * t.beta ** (-d) * L
              for t, L in zip(cfg.tiers, lam))
    den = sum(t.density * t.power ** d * L for t, L in zip(cfg.tiers, lam))
    value = math.pi * num / (c_delta(d) * den)
    return CoverageResult(float(value), 0.0, {"closed_form": True})


def coverage_alpha_mu_il(cfg: NetworkConfig) -> CoverageResult:
    """Interference-limited max-SINR coverage for generalized-gamma fading
    tiers, evaluated with plain gamma calls."""
    from .fading import AlphaMu, Nakagami, Rayleigh

    _require(cfg.pathloss is PathLossModel.UNBOUNDED, "unbounded path loss required")
    _require(all(t.noise == 0 for t in cfg.tiers),
             "interference-limited form needs all noise powers zero")
    _check_maxsinr_thresholds(cfg)
    d = cfg.delta

    def gg_moment(t: Tier) -> float:
        spec = t.fading.spec
        if isinstance(spec, AlphaMu):
            af, mu = spec.alpha, spec.mu
        elif isinstance(spec, Nakagami):
            af, mu = 1.0, spec.m
        elif isinstance(spec, Rayleigh):
            af, mu = 1.0, 1.0
        else:
            raise InvalidConfig("all tiers must use generalized-gamma fading")
        return math.exp(
            math.lgamma(mu + d / af)
            + (d - 1.0) * math.lgamma(mu)
            - d * math.lgamma(mu + 1.0 / af)
        )

    lam = [gg_moment(t) for t in cfg.tiers]
    num = sum(t.density * t.power ** d * t.beta ** (-d) * L
              for t, L in zip(cfg.tiers, lam))
    den = sum(t.density * t.power ** d * L for t, L in zip(cfg.tiers, lam))
    value = math.sin(math.pi * d) / (math.pi * d) * num / den
    return CoverageResult(float(value), 0.0, {"closed_form": True})


def coverage_maxsinr_bounded(cfg: NetworkConfig,
                             tol: float = 1e-5) -> CoverageResult:
    """Max-SINR coverage under (1+r)^-alpha path loss; double quadrature over
    serving distance and the signal-kernel variable."""
    _require(cfg.pathloss is PathLossModel.BOUNDED, "bounded path loss required")
    _check_maxsinr_thresholds(cfg)
    ws = _Workspace(cfg, tol)
    d = ws.delta
    alpha = cfg.alpha
    total = 0.0
    err = 0.0
    for k, tk in enumerate(cfg.tiers):
        sig = ws.sig(k)

        def inner(r: float) -> float:
            pl = (1.0 + r) ** alpha

            def g(xi: np.ndarray) -> np.ndarray:
                acc = (tk.noise / tk.power) * xi * pl
                for j, tj in enumerate(cfg.tiers):
                    v = (tj.power / tk.power) * xi * pl
                    psi1 = ws.psi(j, False)(v)
                    psi2 = ws.psi(j, True)(v)
                    acc = acc + math.pi * d * tj.density * v * (psi1 - psi2)
                return np.exp(-acc)

            v, _ = sig.expectation(g, tol, abs_tol=tol)
            return v

        # the integrand dies once interference (or noise) swamps the signal;
        # track its decay empirically to find the truncation radius
        r_max = 1.0
        f0 = max(inner(0.0), 1e-300)
        while inner(r_max) > f0 * tol * 1e-3 and r_max < 1e7:
            r_max *= 2.0

        def integrand(rs: np.ndarray) -> np.ndarray:
            return np.array([2.0 * math.pi * tk.density * r * inner(float(r))
                             for r in rs])

        # absolute fallback tolerance: the integrand carries inner-quadrature
        # noise and the result is a probability (<= 1)
        v, e = _simpson_refine(integrand, 0.0, r_max, tol,
                               abs_tol=0.5 * tol, n0=32)
        total += v
        err += e
    return CoverageResult(total, err, ws.diagnostics())
