"""Numerical evaluation and transform algebra for Fox H-functions.

An H-function here is the Mellin-Barnes integral

    H^{m,n}_{p,q}(z) = (1/2 pi i) int chi(s) z^{-s} ds,

    chi(s) = prod_{j<=m} G(b_j + B_j s) * prod_{i<=n} G(1 - a_i - A_i s)
             / ( prod_{j>m} G(1 - b_j - B_j s) * prod_{i>n} G(a_i + A_i s) ),

with G the gamma function.  A value object carries an additional scalar
multiplier ``kappa`` and argument scale ``c``; evaluation returns
``kappa * H(c x)``.

Evaluation uses the residue power series from the left pole families when the
poles are simple and the series is well conditioned, and otherwise an adaptive
trapezoidal rule on a vertical contour placed at (a numerical approximation
of) the saddle point of the integrand, which keeps the quadrature well
conditioned even where the function is exponentially small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, gammasgn, loggamma

__all__ = [
    "HOrder",
    "HParams",
    "HFunction",
    "MellinStrip",
    "HEvalResult",
    "FoxHError",
    "NoConvergenceStrip",
    "QuadratureFailure",
    "PoleHit",
    "InapplicableExpansion",
    "DegenerateHFunction",
    "eval_h",
    "eval_h_detailed",
    "eval_h_many",
    "mellin_moment",
    "asymptotic_tail",
    "tail_exponents",
    "h_transform_compose",
    "inv_laplace_params",
    "reduce",
]

_POLE_TOL = 1e-9


class FoxHError(Exception):
    """Base class for H-function evaluation errors."""


class NoConvergenceStrip(FoxHError):
    """No vertical contour separates the two gamma pole families."""


class QuadratureFailure(FoxHError):
    """Adaptive contour integration did not converge within budget."""


class PoleHit(FoxHError):
    """A gamma argument landed on a nonpositive integer."""


class InapplicableExpansion(FoxHError):
    """The large-argument expansion needs at least one upper parameter (n >= 1)."""


class DegenerateHFunction(FoxHError):
    """All gamma factors cancelled; the object is a point mass, not a function."""


@dataclass(frozen=True)
class HOrder:
    m: int
    n: int
    p: int
    q: int

    def __post_init__(self):
        if min(self.m, self.n, self.p, self.q) < 0:
            raise ValueError("order entries must be nonnegative")
        if self.m > self.q or self.n > self.p:
            raise ValueError(f"need m <= q and n <= p, got {self}")


@dataclass(frozen=True)
class HParams:
    """Parameter sequence (kappa, c, a, b, A, B).

    Within ``a``/``A`` the first ``n`` entries form the numerator group
    G(1 - a - A s); within ``b``/``B`` the first ``m`` entries form the
    numerator group G(b + B s).
    """

    kappa: float
    c: float
    a: tuple[float, ...]
    A: tuple[float, ...]
    b: tuple[float, ...]
    B: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "A", tuple(float(v) for v in self.A))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        object.__setattr__(self, "B", tuple(float(v) for v in self.B))
        if len(self.a) != len(self.A) or len(self.b) != len(self.B):
            raise ValueError("parameter vectors must pair up: |a|=|A|, |b|=|B|")
        if any(v <= 0 for v in self.A) or any(v <= 0 for v in self.B):
            raise ValueError("all A_i, B_j must be positive")
        if self.c <= 0:
            raise ValueError("argument scale c must be positive")


@dataclass(frozen=True)
class MellinStrip:
    """Open interval of Re(s) on which the defining contour may be placed."""

    lower: float
    upper: float

    @property
    def empty(self) -> bool:
        return not self.lower < self.upper


@dataclass
class HEvalResult:
    value: float
    abs_error: float
    method: str
    evaluations: int
    converged: bool


class HFunction:
    """Immutable H-function value object with cached evaluation machinery."""

    def __init__(self, order: HOrder, params: HParams):
        if len(params.a) != order.p or len(params.b) != order.q:
            raise ValueError(
                f"parameter lengths ({len(params.a)}, {len(params.b)}) "
                f"do not match order p={order.p}, q={order.q}"
            )
        self.order = order
        self.params = params
        self._check_pole_separation()
        self._contour_cache: dict = {}

    # -- derived convergence descriptors -------------------------------------

    @property
    def mu_star(self) -> float:
        o, pr = self.order, self.params
        return (
            sum(pr.B[: o.m])
            + sum(pr.A[: o.n])
            - sum(pr.B[o.m :])
            - sum(pr.A[o.n :])
        )

    @property
    def delta(self) -> float:
        return sum(self.params.B) - sum(self.params.A)

    @property
    def series_radius(self) -> float:
        """Convergence radius of the left-pole power series when delta == 0."""
        pr = self.params
        lg = -sum(A * math.log(A) for A in pr.A) + sum(B * math.log(B) for B in pr.B)
        return math.exp(lg)

    def strip(self) -> MellinStrip:
        o, pr = self.order, self.params
        lower = max((-pr.b[j] / pr.B[j] for j in range(o.m)), default=-math.inf)
        upper = min(((1.0 - pr.a[i]) / pr.A[i] for i in range(o.n)), default=math.inf)
        return MellinStrip(lower, upper)

    # -- internals -----------------------------------------------------------

    def _check_pole_separation(self, depth: int = 40) -> None:
        o, pr = self.order, self.params
        left = {
            round(-(pr.b[j] + k) / pr.B[j], 9)
            for j in range(o.m)
            for k in range(depth)
        }
        right = {
            round((1.0 - pr.a[i] + k) / pr.A[i], 9)
            for i in range(o.n)
            for k in range(depth)
        }
        clash = left & right
        if clash:
            raise NoConvergenceStrip(
                f"left and right gamma pole families overlap at s={sorted(clash)[:3]}"
            )

    def log_chi(self, s):
        """log of the gamma-ratio kernel at complex s (vectorized)."""
        o, pr = self.order, self.params
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        for j in range(o.m):
            out += loggamma(pr.b[j] + pr.B[j] * s)
        for i in range(o.n):
            out += loggamma(1.0 - pr.a[i] - pr.A[i] * s)
        for j in range(o.m, o.q):
            out -= loggamma(1.0 - pr.b[j] - pr.B[j] * s)
        for i in range(o.n, o.p):
            out -= loggamma(pr.a[i] + pr.A[i] * s)
        return out

    def chi_real(self, s: float) -> float:
        """chi(s) for real s, with sign tracking across negative gamma arguments."""
        o, pr = self.order, self.params
        log_abs = 0.0
        sign = 1.0
        zero = False
        for arg, num in _chi_factors(o, pr, s):
            if _near_nonpos_int(arg):
                if num:
                    raise PoleHit(f"gamma argument {arg!r} is a nonpositive integer")
                zero = True  # 1/Gamma vanishes at the pole
                continue
            log_abs += gammaln(arg) if num else -gammaln(arg)
            sign *= gammasgn(arg)
        if zero:
            return 0.0
        return sign * math.exp(log_abs)

    def __repr__(self):
        o = self.order
        return f"HFunction(H^{{{o.m},{o.n}}}_{{{o.p},{o.q}}}, kappa={self.params.kappa:g}, c={self.params.c:g})"


def _chi_factors(o: HOrder, pr: HParams, s: float):
    """Yield (gamma argument, is_numerator) pairs of chi(s)."""
    for j in range(o.m):
        yield pr.b[j] + pr.B[j] * s, True
    for i in range(o.n):
        yield 1.0 - pr.a[i] - pr.A[i] * s, True
    for j in range(o.m, o.q):
        yield 1.0 - pr.b[j] - pr.B[j] * s, False
    for i in range(o.n, o.p):
        yield pr.a[i] + pr.A[i] * s, False


def _near_nonpos_int(x: float, tol: float = 1e-12) -> bool:
    return x < 0.5 and abs(x - round(x)) < tol and round(x) <= 0


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------


def eval_h(h: HFunction, x: float, tol: float = 1e-8) -> float:
    return eval_h_detailed(h, x, tol).value


def eval_h_detailed(h: HFunction, x: float, tol: float = 1e-8) -> HEvalResult:
    if x <= 0:
        raise ValueError("argument must be positive")
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    hr = reduce(h)
    if hr.order == HOrder(0, 0, 0, 0):
        raise DegenerateHFunction(
            "all gamma factors cancel; this H-function is a Dirac mass"
        )
    z = hr.params.c * x

    res = _try_series(hr, z, tol)
    if res is None:
        sw = _swapped(hr)
        res = _try_series(sw, 1.0 / z, tol)
    if res is None:
        res = _eval_contour(hr, np.array([z]), tol)
        res = HEvalResult(res[0][0], res[1][0], "contour", res[2], res[3])
    scaled = hr.params.kappa * res.value
    return HEvalResult(scaled, abs(hr.params.kappa) * res.abs_error,
                       res.method, res.evaluations, res.converged)


def eval_h_many(h: HFunction, xs: Sequence[float], tol: float = 1e-8) -> np.ndarray:
    """Vectorized evaluation at many positive arguments.

    Arguments are bucketed by decade so each contour (when the series is not
    usable) can share its gamma-kernel samples across nearby points.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("arguments must be positive")
    hr = reduce(h)
    if hr.order == HOrder(0, 0, 0, 0):
        raise DegenerateHFunction(
            "all gamma factors cancel; this H-function is a Dirac mass"
        )
    zs = hr.params.c * xs
    out = np.full_like(zs, np.nan)

    mode = _series_mode(hr, zs)
    if mode == "direct":
        got = _series_values(hr, zs, tol)
        if got is not None:
            out = got
    elif mode == "swapped":
        sw = _swapped(hr)
        got = _series_values(sw, 1.0 / zs, tol)
        if got is not None:
            out = got

    # contour path for points the series could not certify, bucketed by decade
    todo = ~np.isfinite(out)
    if np.any(todo):
        dec = np.floor(np.log10(zs)).astype(int)
        for d in np.unique(dec[todo]):
            idx = todo & (dec == d)
            vals, _, _, _ = _eval_contour(hr, zs[idx], tol)
            out[idx] = vals
    return hr.params.kappa * out


# -- residue power series ----------------------------------------------------


def _swapped(h: HFunction) -> HFunction:
    """H^{m,n}_{p,q}(z) = H^{n,m}_{q,p}(1/z) with (a,A) <-> (1-b,B) swapped."""
    o, pr = h.order, h.params
    new_a = tuple(1.0 - bj for bj in pr.b)
    new_b = tuple(1.0 - ai for ai in pr.a)
    sw = HFunction(
        HOrder(o.n, o.m, o.q, o.p),
        HParams(1.0, 1.0, new_a, pr.B, new_b, pr.A),
    )
    return sw


def _left_pole_families(h: HFunction):
    o, pr = h.order, h.params
    return [(pr.b[j], pr.B[j]) for j in range(o.m)]


def _series_collision(h: HFunction, depth: int = 80) -> bool:
    fams = _left_pole_families(h)
    seen: dict[float, int] = {}
    for j, (b, B) in enumerate(fams):
        for k in range(depth):
            key = round((b + k) / B, 9)
            if key in seen and seen[key] != j:
                return True
            seen[key] = j
    return False


def _series_mode(h: HFunction, zs: np.ndarray) -> str | None:
    zmax = float(np.max(zs))
    zmin = float(np.min(zs))
    if h.order.m > 0 and not _series_collision(h):
        if h.delta > 0 or (h.delta == 0 and zmax < 0.8 * h.series_radius):
            return "direct"
    sw = None
    if h.order.n > 0:
        try:
            sw = _swapped(h)
        except NoConvergenceStrip:
            sw = None
    if sw is not None and sw.order.m > 0 and not _series_collision(sw):
        if sw.delta > 0 or (sw.delta == 0 and 1.0 / zmin < 0.8 * sw.series_radius):
            return "swapped"
    return None


def _series_values(h: HFunction, zs: np.ndarray, tol: float,
                   max_terms: int = 400) -> np.ndarray | None:
    """Sum the left-pole residue series at all zs; None if ill-conditioned."""
    o, pr = h.order, h.params
    logz = np.log(zs)
    total = np.zeros_like(zs)
    max_abs = np.zeros_like(zs)
    fams = _left_pole_families(h)
    done = False
    for k in range(max_terms):
        layer = np.zeros_like(zs)
        for j, (b, B) in enumerate(fams):
            s_jk = -(b + k) / B
            log_abs = -gammaln(k + 1.0) - math.log(B)
            sign = 1.0 if k % 2 == 0 else -1.0
            bad = False
            for idx, (bl, Bl) in enumerate(fams):
                if idx == j:
                    continue
                arg = bl + Bl * s_jk
                if _near_nonpos_int(arg, 1e-9):
                    return None  # coincident poles slipped through
                log_abs += gammaln(arg)
                sign *= gammasgn(arg)
            for i in range(o.n):
                arg = 1.0 - pr.a[i] - pr.A[i] * s_jk
                if _near_nonpos_int(arg, 1e-9):
                    return None
                log_abs += gammaln(arg)
                sign *= gammasgn(arg)
            for jj in range(o.m, o.q):
                arg = 1.0 - pr.b[jj] - pr.B[jj] * s_jk
                if _near_nonpos_int(arg, 1e-9):
                    sign = 0.0
                    bad = True
                    break
                log_abs -= gammaln(arg)
                sign *= gammasgn(arg)
            if not bad:
                for i in range(o.n, o.p):
                    arg = pr.a[i] + pr.A[i] * s_jk
                    if _near_nonpos_int(arg, 1e-9):
                        sign = 0.0
                        break
                    log_abs -= gammaln(arg)
                    sign *= gammasgn(arg)
            if sign == 0.0:
                continue
            with np.errstate(over="ignore", under="ignore"):
                term = sign * np.exp(log_abs + ((b + k) / B) * logz)
            term = np.where(np.isfinite(term), term, np.nan)
            layer += term
        total += layer
        np.maximum(max_abs, np.abs(layer), out=max_abs)
        settled = np.abs(layer) <= tol * 1e-2 * (np.abs(total) + 1e-300)
        if k > 4 and np.all(settled | ~np.isfinite(total)):
            done = True
            break
    if not done:
        total = np.where(settled, total, np.nan)
        if not np.any(np.isfinite(total)):
            return None
    # cancellation guard: float64 cannot deliver tol where terms dwarfed the sum
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = max_abs / np.maximum(np.abs(total), 1e-300)
    bad = cond * 1e-15 > max(tol, 1e-13)
    if np.all(bad | ~np.isfinite(total)):
        return None
    return np.where(bad, np.nan, total)


def _try_series(h: HFunction, z: float, tol: float) -> HEvalResult | None:
    zs = np.array([float(z)])
    if _series_mode(h, zs) == "direct":
        got = _series_values(h, zs, tol)
        if got is not None and np.isfinite(got[0]):
            return HEvalResult(float(got[0]), abs(got[0]) * tol, "series", 0, True)
    return None


# -- saddle-point contour quadrature ----------------------------------------


def _choose_sigma(h: HFunction, logz: float) -> float:
    """Place the contour near the minimum of |chi(s) z^-s| on the real axis."""
    strip = h.strip()
    if strip.empty:
        raise NoConvergenceStrip(f"empty Mellin strip {strip} for {h!r}")
    lo, hi = strip.lower, strip.upper

    def phi(sig: float) -> float:
        try:
            v = float(np.real(h.log_chi(sig + 0j))) - sig * logz
        except FloatingPointError:  # pragma: no cover
            return math.inf
        return v if math.isfinite(v) else math.inf

    # candidate points, clustered toward both (possibly infinite) edges;
    # the ladder reaches far out because saddles of steep integrands can sit
    # at very large |s|
    cands: list[float] = []
    offsets = [1e-4 * 3.0 ** k for k in range(60) if 1e-4 * 3.0 ** k < 1e9]
    if math.isfinite(lo) and math.isfinite(hi):
        span = hi - lo
        for f in [0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.98]:
            cands.append(lo + f * span)
        for off in offsets:
            if off < span / 2:
                cands.append(lo + off)
                cands.append(hi - off)
    elif math.isfinite(lo):
        cands.extend(lo + off for off in offsets)
    elif math.isfinite(hi):
        cands.extend(hi - off for off in offsets)
    else:
        cands.extend([-x for x in offsets] + [0.0] + list(offsets))
    cands = sorted({sg for sg in cands if lo < sg < hi})
    vals = [(phi(sg), sg) for sg in cands]
    finite = [(v, sg) for v, sg in vals if math.isfinite(v)]
    if not finite:
        raise QuadratureFailure("no usable contour abscissa found")
    best_val, best = min(finite)
    # refine between the neighbouring candidates of the discrete winner
    k = cands.index(best)
    lo_b = cands[k - 1] if k > 0 else max(lo + 1e-9, best - 1.0)
    hi_b = cands[k + 1] if k + 1 < len(cands) else best + max(1.0, abs(best))
    hi_b = min(hi_b, hi - 1e-9) if math.isfinite(hi) else hi_b
    if lo_b < hi_b:
        r = minimize_scalar(phi, bounds=(lo_b, hi_b), method="bounded",
                            options={"xatol": 1e-5})
        if r.success and math.isfinite(r.fun) and r.fun < best_val:
            best = float(r.x)
    return best


def _eval_contour(h: HFunction, zs: np.ndarray, tol: float,
                  max_nodes: int = 400_000, _depth: int = 0):
    """Trapezoidal Mellin-Barnes contour integral, shared across zs.

    Returns (values, abs_errors, n_evaluations, converged).
    """
    if h.mu_star < -1e-12:
        raise NoConvergenceStrip(
            f"contour integrand does not decay (mu* = {h.mu_star:g} < 0)"
        )
    logz_ref = float(np.mean(np.log(zs)))
    sigma = _choose_sigma(h, logz_ref)
    peak = float(np.real(h.log_chi(sigma + 0j)))

    # the saddle value bounds the modulus; points whose bound underflows are 0
    logz_all = np.log(zs)
    alive = peak - sigma * logz_all > -745.0
    if not np.any(alive):
        return np.zeros_like(zs), np.zeros_like(zs), 0, True
    if not np.all(alive):
        v, e, n_ev, conv = _eval_contour(h, zs[alive], tol, max_nodes)
        out = np.zeros_like(zs)
        abse = np.zeros_like(zs)
        out[alive], abse[alive] = v, e
        return out, abse, n_ev, conv

    # truncation height: integrand magnitude below tol * 1e-3 relative to peak
    drop = math.log(tol) - 3.0 * math.log(10.0) - 5.0
    T = 10.0
    while T < 1e6:
        mag = float(np.real(h.log_chi(sigma + 1j * T))) - peak
        if mag < drop:
            break
        T *= 2.0
    else:
        raise QuadratureFailure("contour integrand decays too slowly to truncate")

    logz = np.log(zs)
    # conjugate symmetry: H = (1/pi) int_0^T Re[chi(sigma+it) z^{-sigma-it}] dt;
    # everything below is relative to exp(peak - sigma*logz), restored at the end
    f0 = float(np.real(np.exp(h.log_chi(sigma + 0j) - peak)))

    def half_line_sum(ts: np.ndarray) -> np.ndarray:
        s = sigma + 1j * ts
        lc = h.log_chi(s) - peak
        expo = lc[:, None] - np.outer(1j * ts, logz)  # nodes x zs
        return np.real(np.exp(expo)).sum(axis=0)

    def pointwise_fallback():
        # a contour shared across the batch can fail even though every point
        # has a perfectly good saddle of its own; retry one z at a time
        outs = np.empty_like(zs)
        errs = np.empty_like(zs)
        n_ev = 0
        for i in range(len(zs)):
            v, e, ev, _ = _eval_contour(h, zs[i:i + 1], tol, max_nodes, 99)
            outs[i], errs[i] = v[0], e[0]
            n_ev += ev
        return outs, errs, n_ev, True

    n = max(64, int(T / 0.5))
    prev = None
    evals = 0
    for _ in range(16):
        if n > max_nodes:
            if len(zs) > 1:
                return pointwise_fallback()
            raise QuadratureFailure("contour refinement exceeded node budget")
        hstep = T / n
        ts = np.arange(1, n + 1) * hstep
        core = half_line_sum(ts)  # includes the half-weighted t=T endpoint error,
        evals += len(ts)          # negligible since the integrand is < drop there
        vals = hstep * (0.5 * f0 + core)
        if prev is not None:
            err = np.abs(vals - prev)
            scale = np.maximum(np.abs(vals), 1e-300)
            # points cancelled by a shared contour only need to settle down to
            # the rounding floor of the bucket; they are redone alone below
            noise = 1e-13 * max(1.0, float(np.max(np.abs(vals))))
            ok = err <= 0.1 * tol * scale + noise
            if np.all(ok):
                # |vals| << 1 means the shared contour cancelled catastrophically
                # for that point; redo it alone with its own saddle abscissa
                weak = (np.abs(vals) < 1e-2) | (err > 0.1 * tol * scale)
                with np.errstate(over="ignore", under="ignore"):
                    amp = np.exp(peak - sigma * logz) / math.pi
                out = vals * amp
                abse = (err + noise) * amp
                if np.any(weak) and len(zs) > 1 and _depth < 3:
                    # redo in narrow clusters so each shares a usable saddle
                    wi = np.flatnonzero(weak)
                    lw = np.log(zs[wi])
                    srt = np.argsort(lw)
                    wi, lw = wi[srt], lw[srt]
                    start = 0
                    for stop in range(1, len(wi) + 1):
                        if stop == len(wi) or lw[stop] - lw[start] > 0.2:
                            sel = wi[start:stop]
                            if len(sel) < len(zs):
                                v1, e1, ev1, _ = _eval_contour(
                                    h, zs[sel], tol, max_nodes, _depth + 1)
                                out[sel], abse[sel] = v1, e1
                                evals += ev1
                            start = stop
                return out, abse, evals, True
        prev = vals
        n *= 2
    if len(zs) > 1:
        return pointwise_fallback()
    raise QuadratureFailure("contour quadrature did not converge")


# ---------------------------------------------------------------------------
# Transform algebra
# ---------------------------------------------------------------------------


def mellin_moment(h: HFunction, s: float) -> float:
    """E-style moment int_0^inf x^s * [kappa H(c x)] dx = kappa c^{-s-1} chi(s+1).

    Raises PoleHit when any numerator gamma argument is a nonpositive integer.
    """
    pr = h.params
    val = h.chi_real(s + 1.0)
    return pr.kappa * pr.c ** (-(s + 1.0)) * val


def tail_exponents(h: HFunction) -> tuple[float, float]:
    """Leading large-argument behaviour kappa * eta * (c x)^d; returns (d, eta)."""
    o, pr = h.order, h.params
    if o.n == 0:
        raise InapplicableExpansion("expansion requires n >= 1")
    s_stars = [(1.0 - pr.a[i]) / pr.A[i] for i in range(o.n)]
    s_star = min(s_stars)
    winners = [i for i, s in enumerate(s_stars) if abs(s - s_star) < 1e-9]
    if len(winners) > 1:
        raise InapplicableExpansion(
            "tied dominant poles; simple-pole expansion not available"
        )
    i_star = winners[0]
    # other right-pole families must not collide with the dominant pole
    for i in range(o.n):
        if i != i_star and any(
            abs((1.0 - pr.a[i] + k) / pr.A[i] - s_star) < 1e-9 for k in range(4)
        ):
            raise InapplicableExpansion("dominant pole is not simple")
    d = -s_star
    # eta = chi_without_dominant_factor(s*) / A_{i*}
    log_abs = -math.log(pr.A[i_star])
    sign = 1.0
    for j in range(o.m):
        arg = pr.b[j] + pr.B[j] * s_star
        if _near_nonpos_int(arg):
            raise InapplicableExpansion("dominant pole collides with a left pole")
        log_abs += gammaln(arg)
        sign *= gammasgn(arg)
    for i in range(o.n):
        if i == i_star:
            continue
        arg = 1.0 - pr.a[i] - pr.A[i] * s_star
        log_abs += gammaln(arg)
        sign *= gammasgn(arg)
    for j in range(o.m, o.q):
        arg = 1.0 - pr.b[j] - pr.B[j] * s_star
        log_abs -= gammaln(arg)
        sign *= gammasgn(arg)
    for i in range(o.n, o.p):
        arg = pr.a[i] + pr.A[i] * s_star
        log_abs -= gammaln(arg)
        sign *= gammasgn(arg)
    eta = sign * math.exp(log_abs)
    return d, eta


def asymptotic_tail(h: HFunction, x: float) -> float:
    d, eta = tail_exponents(h)
    return h.params.kappa * eta * (h.params.c * x) ** d


def h_transform_compose(outer: HFunction, inner: HFunction) -> HFunction:
    """Parameter sequence of int_0^inf H_outer(t) H_inner(t s) dt.

    The integral equals (1/s) * eval of the returned function at 1/s.
    """
    o, pr = outer.order, outer.params
    o1, pr1 = inner.order, inner.params
    new_order = HOrder(o.m + o1.n, o.n + o1.m, o.p + o1.q, o.q + o1.p)
    # numerator a-group: (1 - b1 - B1) for inner's m-group, then outer's a-group
    a_num = [1.0 - pr1.b[j] - pr1.B[j] for j in range(o1.m)] + list(pr.a[: o.n])
    A_num = [pr1.B[j] for j in range(o1.m)] + list(pr.A[: o.n])
    a_den = [1.0 - pr1.b[j] - pr1.B[j] for j in range(o1.m, o1.q)] + list(pr.a[o.n :])
    A_den = [pr1.B[j] for j in range(o1.m, o1.q)] + list(pr.A[o.n :])
    # numerator b-group: outer's m-group then (1 - a1 - A1) for inner's n-group
    b_num = list(pr.b[: o.m]) + [1.0 - pr1.a[i] - pr1.A[i] for i in range(o1.n)]
    B_num = list(pr.B[: o.m]) + [pr1.A[i] for i in range(o1.n)]
    b_den = [1.0 - pr1.a[i] - pr1.A[i] for i in range(o1.n, o1.p)] + list(pr.b[o.m :])
    B_den = [pr1.A[i] for i in range(o1.n, o1.p)] + list(pr.B[o.m :])
    params = HParams(
        pr.kappa * pr1.kappa / pr1.c,
        pr.c / pr1.c,
        tuple(a_num + a_den),
        tuple(A_num + A_den),
        tuple(b_num + b_den),
        tuple(B_num + B_den),
    )
    composed = HFunction(new_order, params)
    if reduce(composed).order != HOrder(0, 0, 0, 0) and composed.strip().empty:
        raise NoConvergenceStrip("composed H-function has an empty Mellin strip")
    return composed


def inv_laplace_params(h: HFunction, rho: float) -> HFunction:
    """Parameter map of the inverse Laplace transform of p^{-rho} * H.

    L^{-1}{p^{-rho} kappa H(c p)}(t) = t^{rho-1} * eval of the returned
    function at 1/t; the caller applies the prefactor and the 1/t argument.
    """
    o, pr = h.order, h.params
    new_order = HOrder(o.m, o.n, o.p + 1, o.q)
    params = HParams(
        pr.kappa,
        pr.c,
        pr.a + (rho,),
        pr.A + (1.0,),
        pr.b,
        pr.B,
    )
    mapped = HFunction(new_order, params)
    if reduce(mapped).order != HOrder(0, 0, 0, 0) and mapped.strip().empty:
        raise NoConvergenceStrip("mapped H-function has an empty Mellin strip")
    return mapped


def reduce(h: HFunction) -> HFunction:
    """Cancel matched parameter pairs; evaluation is unchanged pointwise."""
    o, pr = h.order, h.params
    m, n = o.m, o.n
    a = list(zip(pr.a, pr.A))
    b = list(zip(pr.b, pr.B))
    changed = True
    while changed:
        changed = False
        # G(b_j + B_j s), j<=m against 1/G(a_i + A_i s), i>n
        for j in range(m):
            hit = next(
                (
                    i
                    for i in range(n, len(a))
                    if abs(a[i][0] - b[j][0]) < 1e-12 and abs(a[i][1] - b[j][1]) < 1e-12
                ),
                None,
            )
            if hit is not None:
                del a[hit]
                del b[j]
                m -= 1
                changed = True
                break
        if changed:
            continue
        # G(1 - a_i - A_i s), i<=n against 1/G(1 - b_j - B_j s), j>m
        for i in range(n):
            hit = next(
                (
                    j
                    for j in range(m, len(b))
                    if abs(b[j][0] - a[i][0]) < 1e-12 and abs(b[j][1] - a[i][1]) < 1e-12
                ),
                None,
            )
            if hit is not None:
                del b[hit]
                del a[i]
                n -= 1
                changed = True
                break
    if m == o.m and n == o.n and len(a) == o.p and len(b) == o.q:
        return h
    return HFunction(
        HOrder(m, n, len(a), len(b)),
        HParams(
            pr.kappa,
            pr.c,
            tuple(v for v, _ in a),
            tuple(v for _, v in a),
            tuple(v for v, _ in b),
            tuple(v for _, v in b),
        ),
    )


# -- convenience constructors ------------------------------------------------


def exp_h(scale: float = 1.0) -> HFunction:
    """The parameterization whose evaluation is exp(-scale * x)."""
    return HFunction(HOrder(1, 0, 0, 1), HParams(1.0, scale, (), (), (0.0,), (1.0,)))


def coverage_weight_h(delta: float) -> HFunction:
    """H^{1,1}_{1,1} with parameters (1, 1, 1-delta, 0, delta, 1).

    Equals (1/delta) * int_0^inf exp(-v^{1/delta} - w v) dv at argument w.
    """
    return HFunction(
        HOrder(1, 1, 1, 1),
        HParams(1.0, 1.0, (1.0 - delta,), (delta,), (0.0,), (1.0,)),
    )
