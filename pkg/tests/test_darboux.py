import math
import random

import pytest

from darbox import (
    CustomOracle,
    Enclosure,
    GridPartition,
    LipschitzOracle,
    Rectangle,
    SupportOracle,
    UnboundedFunctionError,
    adaptive_integrate,
    bracket_for_partition,
    common_refinement,
    integrate_with_support,
    interval_eval,
    interval_oracle,
    lower_sum,
    mock_oracle,
    parse,
    subrectangles,
    uniform_partition,
    upper_sum,
)

from corpus import CORPUS, random_partition_axes

UNIT_SQUARE = Rectangle((0, 0), (1, 1))


def indicator_mock(eps: float):
    strip = Rectangle((0.5 - eps, 0.0), (0.5 + eps, 1.0))
    return mock_oracle([(strip, Enclosure(0.0, 1.0, True))], Enclosure(0.0, 0.0, True))


def indicator_partition(eps: float) -> GridPartition:
    return GridPartition(((0.0, 0.5 - eps, 0.5 + eps, 1.0), (0.0, 1.0)))


class TestSums:
    def test_constant_lower_sum(self):
        oracle = interval_oracle("3", 2)
        for counts in ([1, 1], [2, 3], [5, 4]):
            p = uniform_partition(UNIT_SQUARE, counts)
            assert lower_sum(oracle, p) == pytest.approx(3.0, abs=1e-12)
            assert upper_sum(oracle, p) == pytest.approx(3.0, abs=1e-12)

    def test_indicator_sums(self):
        # strip of half-width 0.1 around x = 1/2: lower sum 0, upper sum 2*eps
        oracle = indicator_mock(0.1)
        p = indicator_partition(0.1)
        assert lower_sum(oracle, p) == 0.0
        assert upper_sum(oracle, p) == (0.6 - 0.4) * 1.0

    def test_identity_function_hand_enumeration(self):
        oracle = interval_oracle("x", 1)
        p = GridPartition(((0.0, 0.5, 1.0),))
        assert lower_sum(oracle, p) == pytest.approx(0.25, abs=1e-12)
        assert upper_sum(oracle, p) == pytest.approx(0.75, abs=1e-12)


class TestBracketForPartition:
    def test_constant(self):
        oracle = interval_oracle("3", 2)
        b = bracket_for_partition(oracle, uniform_partition(UNIT_SQUARE, [3, 3]))
        assert b.lower == pytest.approx(3.0, abs=1e-12)
        assert b.width == pytest.approx(0.0, abs=1e-12)
        assert b.cells == 9

    def test_indicator(self):
        b = bracket_for_partition(indicator_mock(0.1), indicator_partition(0.1))
        assert b.lower == 0.0
        assert b.upper == pytest.approx(0.2, abs=1e-15)

    def test_square_uniform4(self):
        b = bracket_for_partition(
            interval_oracle("x^2", 1),
            uniform_partition(Rectangle((0,), (1,)), [4]),
        )
        assert b.lower == pytest.approx(0.21875, abs=1e-12)
        assert b.upper == pytest.approx(0.46875, abs=1e-12)
        assert b.source == "grid4"


class TestAdaptiveIntegrate:
    def test_square_unit_interval(self):
        res = adaptive_integrate(interval_oracle("x^2", 1), Rectangle((0,), (1,)), 1e-3)
        assert res.converged
        assert res.width <= 1e-3
        assert res.bracket.contains(1.0 / 3.0)

    def test_square_2_to_5(self):
        res = adaptive_integrate(interval_oracle("x^2", 1), Rectangle((2,), (5,)), 1e-2)
        assert res.converged
        assert res.bracket.contains(39.0)

    def test_constant_needs_no_refinement(self):
        res = adaptive_integrate(interval_oracle("3", 2), UNIT_SQUARE, 1e-12)
        assert res.converged
        assert res.refinements == 0
        assert res.bracket.lower == res.bracket.upper == 3.0

    def test_degenerate_rectangle_short_circuits(self):
        res = adaptive_integrate(interval_oracle("x+y", 2), Rectangle((0, 0), (0, 1)), 1e-6)
        assert res.converged
        assert res.bracket.lower == res.bracket.upper == 0.0
        assert res.refinements == 0

    def test_budget_exhaustion_is_not_an_error(self):
        res = adaptive_integrate(
            interval_oracle("x^2", 1), Rectangle((0,), (1,)), 1e-9, max_cells=64
        )
        assert not res.converged
        assert res.bracket.cells == 64
        assert res.bracket.contains(1.0 / 3.0)

    def test_unbounded_rejected(self):
        with pytest.raises(UnboundedFunctionError):
            adaptive_integrate(interval_oracle("1/x", 1), Rectangle((-1,), (1,)), 1e-3)

    def test_invalid_arguments(self):
        oracle = interval_oracle("x", 1)
        with pytest.raises(ValueError):
            adaptive_integrate(oracle, Rectangle((0,), (1,)), 0.0)
        with pytest.raises(ValueError):
            adaptive_integrate(oracle, Rectangle((0,), (1,)), 1e-3, max_cells=0)

    def test_worker_counts_do_not_change_results(self):
        def step(rect):
            if rect.upper[0] < 0.5:
                return Enclosure(0.0, 0.0, True)
            if rect.lower[0] >= 0.5:
                return Enclosure(1.0, 1.0, True)
            return Enclosure(0.0, 1.0, True)

        results = [
            adaptive_integrate(
                CustomOracle(step, rigorous=True), UNIT_SQUARE, 1e-3, workers=w
            )
            for w in (1, 2, 8)
        ]
        assert results[0] == results[1] == results[2]


class TestNestedBrackets:
    @pytest.mark.parametrize(
        "oracle",
        [
            interval_oracle("sin(3*x)*cos(2*y)", 2),
            LipschitzOracle(lambda p: math.sin(3 * p[0]) * math.cos(2 * p[1]), 4.0),
            indicator_mock(0.05),
        ],
        ids=["interval", "lipschitz", "mock"],
    )
    def test_adaptive_brackets_nest(self, oracle):
        log = []
        adaptive_integrate(oracle, UNIT_SQUARE, 1e-2, max_cells=2 ** 12, bracket_log=log)
        assert len(log) >= 2
        for b1, b2 in zip(log, log[1:]):
            scale = max(1.0, abs(b1.lower), abs(b1.upper))
            assert b2.lower >= b1.lower - 1e-10 * scale
            assert b2.upper <= b1.upper + 1e-10 * scale


class TestSumInvariants:
    def test_sandwich(self):
        # m V(R) <= L <= U <= M V(R) with (m, M) a global enclosure
        rng = random.Random(101)
        for _ in range(200):
            entry = rng.choice(CORPUS)
            oracle = interval_oracle(entry.expr)
            p = GridPartition(random_partition_axes(rng, entry.box))
            box = entry.box
            glob = interval_eval(entry.expr, box)
            lo, hi = lower_sum(oracle, p), upper_sum(oracle, p)
            v = box.volume
            mv, big_mv = glob.lo * v, glob.hi * v
            slack = 1e-9 * max(1.0, abs(mv), abs(big_mv))
            assert mv - slack <= lo <= hi <= big_mv + slack

    def test_refinement_monotonicity(self):
        rng = random.Random(202)
        for _ in range(200):
            entry = rng.choice(CORPUS)
            oracle = interval_oracle(entry.expr)
            p = GridPartition(random_partition_axes(rng, entry.box))
            q = GridPartition(random_partition_axes(rng, entry.box))
            fine = common_refinement(p, q)
            slack = 1e-9
            assert lower_sum(oracle, fine) >= lower_sum(oracle, p) - slack
            assert upper_sum(oracle, fine) <= upper_sum(oracle, p) + slack

    def test_cross_partition_lower_below_upper(self):
        rng = random.Random(303)
        for _ in range(200):
            entry = rng.choice(CORPUS)
            oracle = interval_oracle(entry.expr)
            p = GridPartition(random_partition_axes(rng, entry.box))
            q = GridPartition(random_partition_axes(rng, entry.box))
            assert lower_sum(oracle, p) <= upper_sum(oracle, q) + 1e-9

    def test_scaling_linearity(self):
        rng = random.Random(404)
        base = "sin(3*x)+x^2"
        box = Rectangle((-1,), (1,))
        for alpha in (2.0, 0.5, -2.0):
            for _ in range(30):
                p = GridPartition(random_partition_axes(rng, box))
                f = interval_oracle(base, 1)
                scaled = interval_oracle(f"{alpha}*({base})", 1)
                lf, uf = lower_sum(f, p), upper_sum(f, p)
                ls, us = lower_sum(scaled, p), upper_sum(scaled, p)
                if alpha >= 0:
                    assert ls == pytest.approx(alpha * lf, abs=1e-9)
                    assert us == pytest.approx(alpha * uf, abs=1e-9)
                else:
                    # negative scaling swaps the roles of the two sums
                    assert ls == pytest.approx(alpha * uf, abs=1e-9)
                    assert us == pytest.approx(alpha * lf, abs=1e-9)

    def test_sum_linearity_bracket_inclusion(self):
        rng = random.Random(505)
        f_text, g_text = "sin(3*x)", "x^2-x"
        box = Rectangle((0,), (2,))
        for _ in range(50):
            p = GridPartition(random_partition_axes(rng, box))
            bf = bracket_for_partition(interval_oracle(f_text, 1), p)
            bg = bracket_for_partition(interval_oracle(g_text, 1), p)
            bfg = bracket_for_partition(interval_oracle(f"{f_text}+({g_text})", 1), p)
            slack = 1e-9
            assert bfg.lower >= bf.lower + bg.lower - slack
            assert bfg.upper <= bf.upper + bg.upper + slack

    def test_monotone_functions_order_sums(self):
        # cell-wise f.hi <= g.lo forces U(f) <= L(g)
        rng = random.Random(606)
        f = interval_oracle("sin(x)/4", 1)  # range within [-0.25, 0.25]
        g = interval_oracle("2+x^2", 1)     # at least 2
        box = Rectangle((0,), (1,))
        for _ in range(50):
            p = GridPartition(random_partition_axes(rng, box))
            for _, cell in subrectangles(p):
                assert f(cell).hi <= g(cell).lo
            assert upper_sum(f, p) <= lower_sum(g, p)

    def test_restriction_to_aligned_subrectangle(self):
        # the U - L contribution of cells inside an aligned sub-rectangle
        # is at most the total U - L
        rng = random.Random(707)
        for _ in range(100):
            entry = rng.choice([e for e in CORPUS if e.dim <= 2])
            oracle = interval_oracle(entry.expr)
            p = GridPartition(random_partition_axes(rng, entry.box))
            counts = p.cells_per_axis
            ranges = []
            for m in counts:
                i = rng.randrange(m)
                j = rng.randrange(i, m)
                ranges.append((i, j))
            inner_gap = 0.0
            total_gap = 0.0
            for idx, cell in subrectangles(p):
                enc = oracle(cell)
                gap = (enc.hi - enc.lo) * cell.volume
                total_gap += gap
                if all(i <= k <= j for k, (i, j) in zip(idx.indices, ranges)):
                    inner_gap += gap
            assert inner_gap <= total_gap + 1e-12

    def test_continuous_expressions_converge(self):
        # bracket width O(mesh) means ~1/tol^dim cells: tolerances are scaled
        # by dimension to stay at desk size
        tol_by_dim = {1: 1e-4, 2: 2e-2, 3: 6e-1}
        for entry in CORPUS:
            if entry.text in ("log(x)",):  # unbounded derivative is fine, still converges
                pass
            res = adaptive_integrate(
                interval_oracle(entry.expr), entry.box, tol_by_dim[entry.dim]
            )
            assert res.converged, entry.text


class TestSupport:
    def _tent_oracle(self):
        tent = parse("(1-4*abs(x-0.5)+abs(1-4*abs(x-0.5)))/2", 1)
        support = Rectangle((0.25,), (0.75,))
        return SupportOracle(interval_oracle(tent), support), support

    def test_tent_same_value_any_enclosure(self):
        oracle, support = self._tent_oracle()
        tol = 1e-3
        r1 = integrate_with_support(oracle, support, Rectangle((0,), (1,)), tol)
        r2 = integrate_with_support(oracle, support, Rectangle((-3,), (3,)), tol)
        assert r1.converged and r2.converged
        assert r1.bracket.contains(0.25)
        assert r2.bracket.contains(0.25)
        assert abs(r1.midpoint - r2.midpoint) <= 2 * tol
        assert r1.declared_support == support

    def test_zero_function(self):
        zero = CustomOracle(lambda r: Enclosure(0.0, 0.0, True), rigorous=True)
        support = Rectangle((0.4,), (0.6,))
        res = integrate_with_support(zero, support, Rectangle((0,), (1,)), 1e-9)
        assert res.converged
        assert res.midpoint == 0.0

    def test_support_must_be_interior(self):
        oracle, support = self._tent_oracle()
        with pytest.raises(ValueError):
            integrate_with_support(oracle, support, Rectangle((0.25,), (1,)), 1e-3)


class TestMockAdaptive:
    def test_strip_width_tracks_strip_volume(self):
        # fixed-eps mock: the bracket width converges to the strip volume 2*eps
        eps = 0.05
        res = adaptive_integrate(indicator_mock(eps), UNIT_SQUARE, 0.11, max_cells=2 ** 16)
        assert res.converged
        assert res.width >= 2 * eps  # the strip itself is never resolved below 2*eps
