import math
import random

import pytest

from darbox import (
    Quad1DResult,
    TaggedPartition,
    UnboundedFunctionError,
    adaptive_1d,
    bronstein_integral,
    bronstein_product,
    darboux_sums_1d,
    interval_oracle,
    mesh_norm,
    riemann_sum,
    right_endpoint_sum,
    series_limit,
)
from darbox.errors import ExprDomainError

from corpus import LIPSCHITZ_CORPUS


class TestMeshNorm:
    def test_uniform(self):
        assert mesh_norm(TaggedPartition.uniform(0, 1, 4)) == pytest.approx(0.25)

    def test_irregular(self):
        p = TaggedPartition((0.0, 0.1, 1.0), (0.05, 0.5))
        assert mesh_norm(p) == pytest.approx(0.9)

    def test_single_interval(self):
        p = TaggedPartition((2.0, 5.0), (3.0,))
        assert mesh_norm(p) == 3.0


class TestTaggedPartition:
    def test_tag_outside_rejected(self):
        with pytest.raises(ValueError):
            TaggedPartition((0.0, 1.0), (1.5,))

    def test_tag_count_rejected(self):
        with pytest.raises(ValueError):
            TaggedPartition((0.0, 0.5, 1.0), (0.25,))

    def test_non_increasing_rejected(self):
        with pytest.raises(ValueError):
            TaggedPartition((0.0, 0.0, 1.0), (0.0, 0.5))


class TestRiemannSum:
    def test_constant_exact(self):
        rng = random.Random(3)
        for _ in range(100):
            pts = sorted({rng.uniform(0, 10) for _ in range(rng.randint(2, 12))})
            if len(pts) < 2:
                continue
            tags = [rng.uniform(a, b) for a, b in zip(pts, pts[1:])]
            p = TaggedPartition(tuple(pts), tuple(tags))
            c = rng.uniform(-5, 5)
            got = riemann_sum(lambda x: c, p)
            want = c * (pts[-1] - pts[0])
            assert got == pytest.approx(want, abs=4 * math.ulp(max(1.0, abs(want))))

    def test_square_right_tags(self):
        p = TaggedPartition.uniform(0, 1, 10, "right")
        assert riemann_sum(lambda x: x * x, p) == pytest.approx(0.385, abs=1e-14)

    def test_square_left_tags(self):
        p = TaggedPartition.uniform(0, 1, 10, "left")
        assert riemann_sum(lambda x: x * x, p) == pytest.approx(0.285, abs=1e-14)

    def test_non_finite_rejected(self):
        p = TaggedPartition.uniform(0, 1, 2)
        with pytest.raises(UnboundedFunctionError):
            riemann_sum(lambda x: math.nan, p)


class TestRightEndpointSum:
    def test_square_n10(self):
        assert right_endpoint_sum(lambda x: x * x, 0, 1, 10) == pytest.approx(0.385)

    def test_matches_closed_form(self):
        # (n+1)(2n+1)/(6 n^2) for f = x^2 on [0, 1]
        for n in (1, 7, 50, 400):
            want = (n + 1) * (2 * n + 1) / (6 * n * n)
            assert right_endpoint_sum(lambda x: x * x, 0, 1, n) == pytest.approx(want)

    def test_validation(self):
        with pytest.raises(ValueError):
            right_endpoint_sum(lambda x: x, 1, 0, 3)
        with pytest.raises(ValueError):
            right_endpoint_sum(lambda x: x, 0, 1, 0)


class TestDarbouxSums1D:
    def test_constant(self):
        oracle = interval_oracle("5", 1)
        lo, hi = darboux_sums_1d(oracle, [0.0, 0.3, 1.0])
        assert lo == pytest.approx(5.0, abs=1e-12)
        assert hi == pytest.approx(5.0, abs=1e-12)

    def test_identity(self):
        oracle = interval_oracle("x", 1)
        lo, hi = darboux_sums_1d(oracle, [0.0, 0.5, 1.0])
        assert lo == pytest.approx(0.25, abs=1e-12)
        assert hi == pytest.approx(0.75, abs=1e-12)

    def test_square(self):
        oracle = interval_oracle("x^2", 1)
        lo, hi = darboux_sums_1d(oracle, [0.0, 0.5, 1.0])
        assert lo == pytest.approx(0.125, abs=1e-12)
        assert hi == pytest.approx(0.625, abs=1e-12)

    def test_sandwich_of_tagged_sums(self):
        rng = random.Random(12)
        for _ in range(500):
            entry = rng.choice([e for e in LIPSCHITZ_CORPUS if e.dim == 1])
            a, b = entry.box.lower[0], entry.box.upper[0]
            pts = sorted({a, b, *(rng.uniform(a, b) for _ in range(rng.randint(0, 8)))})
            if len(pts) < 2:
                continue
            tags = tuple(rng.uniform(lo, hi) for lo, hi in zip(pts, pts[1:]))
            p = TaggedPartition(tuple(pts), tags)
            oracle = interval_oracle(entry.expr)
            lo, hi = darboux_sums_1d(oracle, pts)
            s = riemann_sum(lambda x, e=entry.expr: e((x,)), p)
            slack = 1e-9 * max(1.0, abs(s))
            assert lo - slack <= s <= hi + slack


class TestAdaptive1D:
    def test_arctangent_kernel(self):
        res = adaptive_1d(lambda x: 1 / (1 + x * x), 0, 1, 1e-6)
        assert res.converged
        assert res.value == pytest.approx(math.pi / 4, abs=1e-6)

    def test_square(self):
        res = adaptive_1d(lambda x: x * x, 0, 1, 1e-6)
        assert res.converged
        assert res.value == pytest.approx(1 / 3, abs=1e-6)
        assert abs(res.value - 1 / 3) <= res.error

    def test_degenerate_interval(self):
        res = adaptive_1d(lambda x: x, 2, 2, 1e-6)
        assert res == Quad1DResult(0.0, 0.0, True, 0)

    def test_open_fallback_improper_convergent(self):
        res = adaptive_1d(lambda x: 1 / math.sqrt(x), 0, 1, 1e-3, 2 ** 18)
        assert res.converged
        assert res.value == pytest.approx(2.0, abs=5e-3)

    def test_divergent_integrand_reported(self):
        res = adaptive_1d(lambda x: -1 / (x * x), 0, 1, 1e-3)
        assert not res.converged

    def test_interior_domain_error_propagates(self):
        def f(x):
            if abs(x - 0.5) < 1e-12:
                raise ExprDomainError("boom")
            return x

        with pytest.raises(ExprDomainError):
            adaptive_1d(f, 0, 1, 1e-6)

    def test_mesh_refinement_error_bound(self):
        # |right sum(n) - integral| <= L (b-a)^2 / n, with factor-2 slack
        for entry in LIPSCHITZ_CORPUS:
            if entry.dim != 1 or entry.lipschitz == 0.0:
                continue
            a, b = entry.box.lower[0], entry.box.upper[0]
            f = lambda x, e=entry.expr: e((x,))
            reference = adaptive_1d(f, a, b, 1e-8, 2 ** 18)
            assert reference.converged
            for n in (16, 64, 256):
                s = right_endpoint_sum(f, a, b, n)
                bound = entry.lipschitz * (b - a) ** 2 / n
                assert abs(s - reference.value) <= 2 * bound + 1e-9


class TestSeriesLimit:
    def test_square_partials_and_limit(self):
        res = series_limit("x^2", 0, 1, [10, 100, 1000])
        assert res.partial_sums == pytest.approx((0.385, 0.33835, 0.3338335))
        assert res.limit_estimate == pytest.approx(1 / 3, abs=1e-4)

    def test_shifted_square_pattern(self):
        # sum of (3/n)(2 + 3k/n)^2 is the right-endpoint sum of x^2 on [2, 5]
        res = series_limit("x^2", 2, 5, [10, 100, 1000])
        assert res.limit_estimate == pytest.approx(39.0, abs=1e-2)
        direct = sum(3 / 10 * (2 + 3 * k / 10) ** 2 for k in range(1, 11))
        assert res.partial_sums[0] == pytest.approx(direct)

    def test_inverse_square_squeeze(self):
        a, b = 1.0, 2.0
        res = series_limit("x^-2", a, b, [10, 100, 1000])
        for n, s in zip(res.n_values, res.partial_sums):
            lower = 1 / (a + (b - a) / n) - 1 / (a + (b - a) * (n + 1) / n)
            upper = 1 / a - 1 / b
            assert lower <= s <= upper
        assert res.limit_estimate == pytest.approx(0.5, abs=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            series_limit("x", 0, 1, [10, 10])
        with pytest.raises(ValueError):
            series_limit("x", 0, 1, [])


class TestBronstein:
    def test_product_small_cases(self):
        prod, closed = bronstein_product(2.0, 3)
        assert prod == pytest.approx(21.0, rel=1e-12)
        assert closed == pytest.approx(21.0, rel=1e-12)
        prod, closed = bronstein_product(2.0, 2)
        assert prod == closed == pytest.approx(5.0)
        prod, closed = bronstein_product(3.0, 2)
        assert prod == closed == pytest.approx(10.0)

    def test_product_identity_grid(self):
        for c in (1.5, 2.0, 3.0, 4.0):
            for n in range(2, 33):
                prod, closed = bronstein_product(c, n)
                assert prod == pytest.approx(closed, rel=1e-10)

    def test_product_validation(self):
        with pytest.raises(ValueError):
            bronstein_product(1.0, 4)
        with pytest.raises(ValueError):
            bronstein_product(2.0, 1)

    @pytest.mark.parametrize("a,b", [(1.0, 2.0), (2.0, 1.0), (1.0, math.e)])
    def test_integral_closed_form(self, a, b):
        res = bronstein_integral(a, b, 1e-4)
        assert res.converged
        assert res.value == pytest.approx(2 * math.pi * math.log(max(a, b)), abs=1e-4)

    def test_integral_validation(self):
        with pytest.raises(ValueError):
            bronstein_integral(1.0, 1.0, 1e-3)
        with pytest.raises(ValueError):
            bronstein_integral(-1.0, 2.0, 1e-3)
