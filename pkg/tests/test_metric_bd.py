"""
弦距离、Γ 与 BD¹ 度量测试
"""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from src.core.cantor import cantor_iterate
from src.core.catalog import identity_g, non_tvs_sequences, random_ac_function
from src.core.measure import StieltjesMeasure
from src.core.metric_bd import (
    PairGrid,
    bc_membership,
    bd1_distance,
    bdk_norm,
    cauchy_probe,
    chordal,
    chordal_extended,
    gamma,
    metric_axioms_check,
)
from src.core.piecewise import PiecewiseMap
from src.core.segments import AffineForm

reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


class TestChordal:
    def test_values(self):
        assert chordal(0.0, 1.0) == pytest.approx(1.0 / math.sqrt(2.0))
        assert chordal(3.0, 3.0) == 0.0

    def test_extended(self):
        assert chordal_extended(math.inf, 0.0) == pytest.approx(1.0)
        assert chordal_extended(0.0, -math.inf) == pytest.approx(1.0)
        assert chordal_extended(math.inf, math.inf) == 0.0
        assert chordal_extended(math.inf, 1.0) == pytest.approx(1.0 / math.sqrt(2.0))

    def test_vectorized(self):
        out = chordal(np.array([0.0, 1.0]), np.array([1.0, 1.0]))
        assert out.tolist() == pytest.approx([1.0 / math.sqrt(2.0), 0.0])

    @given(reals, reals, reals)
    def test_triangle(self, x, y, z):
        assert chordal(x, y) == chordal(y, x)
        assert chordal(x, z) <= chordal(x, y) + chordal(y, z) + 1e-12
        assert chordal(x, y) <= 1.0


class TestGamma:
    def test_cantor_iterates_are_far_apart(self, cantor10):
        iterates = [cantor_iterate(n) for n in range(1, 6)]
        pairs = PairGrid(cantor10, iterates)
        for f, h in itertools.combinations(iterates, 2):
            assert pairs.gamma(f, h).value >= 1.0 - 1e-6

    def test_identical_maps(self, example1):
        f = PiecewiseMap.from_derivator(example1)
        assert gamma(f, f, example1) == 0.0

    def test_non_tvs_sum_does_not_converge(self, non_tvs):
        for k in (1, 4, 10):
            f, h, f_k, h_k = non_tvs_sequences(k)
            total, total_k = f.add(h), f_k.add(h_k)
            assert gamma(total, total_k, non_tvs) >= 1.0 - 1e-6
            assert bd1_distance(f, f_k, non_tvs).d <= 2.0 / k + 1e-12
            assert bd1_distance(h, h_k, non_tvs).d <= 3.0 / k + 1e-12


class TestDistance:
    def test_components(self):
        g = identity_g(0.0, 1.0)
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(1.0)])
        h = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(1.0, 0.5)])
        report = bd1_distance(f, h, g)
        assert report.sup_norm_gap == pytest.approx(0.5)
        assert report.deriv_gap == pytest.approx(0.0, abs=1e-9)
        assert report.gamma == pytest.approx(0.0, abs=1e-9)
        assert report.d == pytest.approx(0.5)

    def test_axioms_on_random_functions(self, example1, rng):
        measure = StieltjesMeasure(example1)
        maps = [random_ac_function(rng, example1, measure, label=f"F{i}") for i in range(3)]
        report = metric_axioms_check(maps, example1)
        assert report.holds, report.to_dict()


class TestCauchy:
    def test_sup_component(self, non_tvs):
        seq = [non_tvs_sequences(k)[2] for k in range(1, 9)]
        report = cauchy_probe(seq, non_tvs, [0.1, 0.01], component="sup")
        assert report.cauchy == {0.1: True, 0.01: False}
        assert report.distances[0][1] == pytest.approx(0.5)

    def test_unknown_component(self, non_tvs):
        with pytest.raises(ValueError):
            cauchy_probe([], non_tvs, [0.1], component="l2")


class TestNorms:
    def test_bdk_norm(self):
        g = identity_g(0.0, 1.0)
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(2.0)])
        grid = np.linspace(0.0, 1.0, 11).tolist()
        assert bdk_norm(f, g, 0, grid) == pytest.approx(2.0)
        assert bdk_norm(f, g, 1, grid) == pytest.approx(4.0)
        assert bdk_norm(f, g, 2, grid) == pytest.approx(4.0)
        with pytest.raises(ValueError):
            bdk_norm(f, g, 3)

    def test_bc_membership(self, example1):
        grid = np.linspace(0.0, 3.0, 31).tolist()
        assert bc_membership(PiecewiseMap.from_derivator(example1), example1, grid)
