"""H-function evaluator: identities, Mellin moments, tails, transform algebra."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetcov.foxh import (
    DegenerateHFunction,
    HFunction,
    HOrder,
    HParams,
    PoleHit,
    asymptotic_tail,
    eval_h,
    eval_h_many,
    exp_h,
    h_transform_compose,
    inv_laplace_params,
    mellin_moment,
    reduce,
    tail_exponents,
)


def _h(order, kappa, c, a=(), A=(), b=(), B=()):
    return HFunction(HOrder(*order), HParams(kappa, c, a, A, b, B))


EXP = _h((1, 0, 0, 1), 1.0, 1.0, b=(0.0,), B=(1.0,))


class TestExponentialIdentity:
    def test_pointwise(self):
        xs = np.geomspace(1e-3, 20.0, 50)
        vals = eval_h_many(EXP, xs, tol=1e-12)
        assert np.max(np.abs(vals / np.exp(-xs) - 1.0)) < 1e-10

    def test_scalar_entrypoint(self):
        assert eval_h(EXP, 1.0, tol=1e-12) == pytest.approx(math.exp(-1.0),
                                                            rel=1e-10)

    def test_scale_factor(self):
        h = _h((1, 0, 0, 1), 2.5, 3.0, b=(0.0,), B=(1.0,))
        assert eval_h(h, 0.7) == pytest.approx(2.5 * math.exp(-2.1), rel=1e-8)


class TestAgainstMpmath:
    """Spot checks against an independent arbitrary-precision implementation
    of the same Mellin-Barnes integral."""

    @staticmethod
    def _mp_h(h, x):
        pr, o = h.params, h.order

        def chi(s):
            num = mpmath.mpf(1)
            for bj, Bj in zip(pr.b[:o.m], pr.B[:o.m]):
                num *= mpmath.gamma(bj + Bj * s)
            for ai, Ai in zip(pr.a[:o.n], pr.A[:o.n]):
                num *= mpmath.gamma(1 - ai - Ai * s)
            den = mpmath.mpf(1)
            for ai, Ai in zip(pr.a[o.n:], pr.A[o.n:]):
                den *= mpmath.gamma(ai + Ai * s)
            for bj, Bj in zip(pr.b[o.m:], pr.B[o.m:]):
                den *= mpmath.gamma(1 - bj - Bj * s)
            return num / den

        z = mpmath.mpf(pr.c) * x
        lo = max((-bj / Bj for bj, Bj in zip(pr.b[:o.m], pr.B[:o.m])),
                 default=mpmath.mpf(-10))
        hi = min(((1 - ai) / Ai for ai, Ai in zip(pr.a[:o.n], pr.A[:o.n])),
                 default=lo + 3)
        sigma = lo + (hi - lo) / 2 if hi < lo + 20 else lo + 1
        with mpmath.workdps(40):
            f = lambda t: chi(sigma + 1j * t) * z ** (-(sigma + 1j * t))
            val = mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf], maxdegree=10)
            return float(pr.kappa * mpmath.re(val) / (2 * mpmath.pi))

    @pytest.mark.parametrize("x", [0.05, 0.3, 1.0, 2.7])
    def test_meijer_like_2_0_0_2(self, x):
        h = _h((2, 0, 0, 2), 1.3, 0.8, b=(0.2, 1.7), B=(1.0, 0.5))
        assert eval_h(h, x, tol=1e-10) == pytest.approx(self._mp_h(h, x),
                                                        rel=1e-7)

    @pytest.mark.parametrize("x", [0.2, 1.0, 4.0])
    def test_with_numerator_a(self, x):
        h = _h((1, 1, 1, 1), 0.9, 1.1, a=(-2.0,), A=(1.0,),
               b=(0.5,), B=(1.0,))
        assert eval_h(h, x, tol=1e-10) == pytest.approx(self._mp_h(h, x),
                                                        rel=1e-7)


class TestMellinMoment:
    def test_exponential_moments(self):
        for s in (0.0, 0.5, 1.0, 2.5):
            assert mellin_moment(EXP, s) == pytest.approx(math.gamma(s + 1.0),
                                                          rel=1e-12)

    def test_matches_quadrature(self):
        from scipy.integrate import quad
        h = _h((2, 0, 0, 2), 1.0, 1.5, b=(0.4, 1.1), B=(0.7, 1.0))
        h = HFunction(h.order, HParams(
            h.params.kappa / mellin_moment(h, 0.0), h.params.c,
            h.params.a, h.params.A, h.params.b, h.params.B))
        for s in (0.0, 0.5, 1.0, 2.0):
            num, _ = quad(lambda x: x ** s * eval_h(h, x, tol=1e-12),
                          0, np.inf, limit=400)
            assert mellin_moment(h, s) == pytest.approx(num, rel=1e-7)

    def test_pole_raises(self):
        with pytest.raises(PoleHit):
            mellin_moment(EXP, -1.0)


class TestTail:
    def test_power_tail_exponent(self):
        # gamma-ratio density decays like x^{-(ms+1)} up to constants
        m, ms, c = 2.0, 3.0, 1.0
        h = _h((1, 1, 1, 1), c / (math.gamma(m) * math.gamma(ms)), c,
               a=(-ms,), A=(1.0,), b=(m - 1.0,), B=(1.0,))
        d, eta = tail_exponents(h)
        assert d == pytest.approx(-(ms + 1.0), abs=1e-12)
        x = 1e6
        assert asymptotic_tail(h, x) == pytest.approx(eval_h(h, x, tol=1e-12),
                                                      rel=1e-4)


class TestReduce:
    def test_cancels_matched_pair(self):
        # Gamma(s) Gamma(2+s) / Gamma(2+s): the numerator b=2 factor cancels
        # the denominator a=2 factor, leaving the exponential kernel Gamma(s)
        h = _h((2, 0, 1, 2), 1.0, 1.0, a=(2.0,), A=(1.0,),
               b=(0.0, 2.0), B=(1.0, 1.0))
        r = reduce(h)
        assert r.order == HOrder(1, 0, 0, 1)
        for x in (0.3, 1.0, 5.0):
            assert eval_h(h, x) == pytest.approx(math.exp(-x), rel=1e-8)

    def test_full_cancellation_is_degenerate(self):
        # Gamma(1+s)/Gamma(1+s) cancels completely: a Dirac mass, not a function
        h = _h((1, 0, 1, 1), 1.0, 1.0, a=(1.0,), A=(1.0,),
               b=(1.0,), B=(1.0,))
        with pytest.raises(DegenerateHFunction):
            eval_h(h, 1.0)


class TestCompose:
    """Transform composition: int_0^inf H1(x) * kappa2 H2(s x y) dx collapses
    to a single H-function of higher order, checked by 2-D quadrature."""

    CASES = [
        (_h((1, 0, 0, 1), 1.0, 1.0, b=(0.0,), B=(1.0,)),
         _h((1, 0, 0, 1), 1.0, 2.0, b=(0.5,), B=(1.0,))),
        (_h((1, 0, 0, 1), 0.7, 1.3, b=(0.3,), B=(0.8,)),
         _h((1, 0, 0, 1), 1.1, 0.9, b=(1.2,), B=(1.0,))),
        (_h((2, 0, 0, 2), 1.0, 1.0, b=(0.2, 1.0), B=(1.0, 0.5)),
         _h((1, 0, 0, 1), 1.0, 1.5, b=(0.4,), B=(1.0,))),
        (_h((1, 1, 1, 1), 0.5, 1.0, a=(-2.5,), A=(1.0,), b=(0.5,), B=(1.0,)),
         _h((1, 0, 0, 1), 1.0, 1.0, b=(0.0,), B=(1.0,))),
        (_h((1, 0, 0, 1), 1.0, 0.6, b=(1.5,), B=(0.5,)),
         _h((2, 0, 0, 2), 0.8, 1.0, b=(0.3, 0.9), B=(1.0, 1.0))),
    ]

    @pytest.mark.parametrize("h1,h2", CASES)
    @pytest.mark.parametrize("s", [0.5, 1.0, 2.0])
    def test_quadrature(self, h1, h2, s):
        from scipy.integrate import quad
        composed = h_transform_compose(h1, h2)

        def inner(x):
            return eval_h(h1, x, tol=1e-11) * eval_h(h2, s * x, tol=1e-11)

        lhs, _ = quad(inner, 0, np.inf, limit=400)
        rhs = (1.0 / s) * eval_h(composed, 1.0 / s, tol=1e-10)
        assert rhs == pytest.approx(lhs, rel=1e-6)


class TestInverseLaplace:
    def test_against_talbot(self):
        # F(p) = p^{-rho} kappa H(c p) has an H-form inverse transform
        # t^{rho-1} H'(1/t); compare a generic case with numerical Bromwich
        # inversion (Talbot's method)
        rho, nu, c = 1.0, 0.75, 1.4
        # kappa H(c p) = (1 + c p)^{-nu} in H^{1,1}_{1,1} form
        h = _h((1, 1, 1, 1), 1.0 / math.gamma(nu), c,
               a=(1.0 - nu,), A=(1.0,), b=(0.0,), B=(1.0,))
        hil = inv_laplace_params(h, rho)

        def F(p):
            return p ** (-rho) * (1 + mpmath.mpf(c) * p) ** (-nu)

        for t in (0.3, 1.0, 3.0):
            ref = float(mpmath.invertlaplace(F, t, method="talbot"))
            got = t ** (rho - 1.0) * eval_h(hil, 1.0 / t, tol=1e-10)
            assert got == pytest.approx(ref, rel=1e-6)


class TestExpCoverageBuilders:
    def test_exp_h_evaluates_to_exponential(self):
        h = exp_h(2.0)
        for x in (0.1, 1.0, 4.0):
            assert eval_h(h, x) == pytest.approx(math.exp(-2.0 * x), rel=1e-9)


@st.composite
def _gamma_product_h(draw):
    m = draw(st.integers(1, 3))
    b = tuple(draw(st.floats(0.1, 3.0)) for _ in range(m))
    B = tuple(draw(st.floats(0.3, 1.5)) for _ in range(m))
    kappa = draw(st.floats(0.2, 3.0))
    c = draw(st.floats(0.3, 3.0))
    return _h((m, 0, 0, m), kappa, c, b=b, B=B)


class TestProperties:
    @settings(max_examples=25, deadline=None)
    @given(_gamma_product_h(), st.floats(0.05, 10.0))
    def test_nonnegative_density_class(self, h, x):
        # products of gamma variates have nonnegative densities everywhere
        v = eval_h(h, x, tol=1e-8)
        assert v >= -1e-10 * (1.0 + abs(v))

    @settings(max_examples=25, deadline=None)
    @given(_gamma_product_h(), st.floats(0.2, 2.0))
    def test_argument_scale_absorbed_in_c(self, h, lam):
        # kappa H(c * (lam x)) equals the same H with c' = lam c
        h2 = HFunction(h.order, HParams(h.params.kappa, h.params.c * lam,
                                        h.params.a, h.params.A,
                                        h.params.b, h.params.B))
        x = 0.8
        assert eval_h(h, lam * x, tol=1e-9) == pytest.approx(
            eval_h(h2, x, tol=1e-9), rel=1e-6, abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(_gamma_product_h(), st.floats(0.3, 2.5))
    def test_reduce_preserves_value(self, h, pair):
        # appending one matched numerator/denominator factor pair leaves the
        # function unchanged and reduce() strips it again: the extra
        # Gamma(pair + s) goes in the numerator b-block (so m grows by one)
        # and in the denominator a-block
        o, pr = h.order, h.params
        padded = HFunction(
            HOrder(o.m + 1, o.n, o.p + 1, o.q + 1),
            HParams(pr.kappa, pr.c,
                    pr.a + (pair,), pr.A + (1.0,),
                    (pair,) + pr.b, (1.0,) + pr.B))
        stripped = reduce(padded)
        assert stripped.order == o
        x = 0.9
        assert eval_h(padded, x, tol=1e-9) == pytest.approx(
            eval_h(h, x, tol=1e-9), rel=1e-6, abs=1e-12)
