"""
分段函数代数、f* 与 BD_g 成员检查测试
"""

import numpy as np
import pytest

from src.core.catalog import fderexample_f, non_tvs_f
from src.core.piecewise import PiecewiseMap, bd_membership, is_g_continuous_at
from src.core.segments import AffineForm, ConstantForm
from src.utils.config import ContinuityConfig
from src.utils.exceptions import DomainMismatch, OutOfDomain, SpecFormatError, ZeroDenominator


@pytest.fixture
def spike():
    """[0,1) 上为 0、[0.5,1] 上为 1，0.5 处点值为 7"""
    return PiecewiseMap((0.0, 1.0), [0.0, 0.5, 1.0], [ConstantForm(0.0), ConstantForm(1.0)], {0.5: 7.0})


class TestEvaluation:
    def test_right_continuous_by_default(self):
        f = fderexample_f()
        assert f.eval(2.0) == 5.0
        assert f.left_limit(2.0) == 2.0
        assert f.right_limit(2.0) == 5.0
        assert f.eval(1.0) == 1.0

    def test_point_value_override(self, spike):
        assert spike.eval(0.5) == 7.0
        assert spike.left_limit(0.5) == 0.0
        assert spike.right_limit(0.5) == 1.0
        assert spike.values([0.25, 0.5, 0.75]).tolist() == [0.0, 7.0, 1.0]

    def test_right_limit_override(self):
        f = PiecewiseMap((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(1.0), AffineForm(1.0)], right_limits={1.0: 4.0})
        assert f.eval(1.0) == 1.0
        assert f.right_limit(1.0) == 4.0

    def test_sup_norm_sees_one_sided_limits(self):
        f = PiecewiseMap((0.0, 2.0), [0.0, 1.0, 2.0], [AffineForm(-3.0, 1.0), ConstantForm(0.0)])
        # 1 处左极限为 −2，点值为 0
        assert f.sup_norm() == 2.0

    def test_errors(self, spike):
        with pytest.raises(OutOfDomain):
            spike.eval(1.5)
        with pytest.raises(SpecFormatError):
            PiecewiseMap((0.0, 1.0), [0.0, 1.0], [ConstantForm(0.0)], {0.5: 1.0})
        with pytest.raises(SpecFormatError):
            PiecewiseMap((0.0, 1.0), [0.0, 1.0], [ConstantForm(0.0)], right_limits={1.0: 1.0})


class TestAlgebra:
    def test_add_and_multiply(self, spike):
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(2.0)])
        total = spike + f
        product = spike * f
        ts = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        assert np.allclose(total.values(ts), spike.values(ts) + f.values(ts))
        assert np.allclose(product.values(ts), spike.values(ts) * f.values(ts))
        assert total.right_limit(0.5) == pytest.approx(2.0)

    def test_scale_and_negate(self, spike):
        assert (-spike).eval(0.5) == -7.0
        assert (2.0 * spike).eval(0.75) == 2.0

    def test_divide(self):
        f = PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(1.0, 1.0)])
        q = PiecewiseMap.constant((0.0, 1.0), 1.0).divide(f)
        assert q.eval(0.5) == pytest.approx(1.0 / 1.5)
        with pytest.raises(ZeroDenominator):
            f.divide(PiecewiseMap((0.0, 1.0), [0.0, 1.0], [AffineForm(1.0, -0.5)]))

    def test_domain_mismatch(self, spike):
        with pytest.raises(DomainMismatch):
            spike.add(PiecewiseMap.constant((0.0, 2.0), 1.0))

    def test_compose(self, spike):
        h = spike.compose(np.exp, np.exp, "exp")
        assert h.eval(0.5) == pytest.approx(np.exp(7.0))
        assert h.eval(0.25) == pytest.approx(1.0)


class TestStar:
    def test_star_eval(self, gderexample):
        f = fderexample_f()
        assert f.star_eval(gderexample, 1.5) == 5.0
        assert f.star_eval(gderexample, 0.5) == 0.5

    def test_star_map(self, gderexample):
        star = fderexample_f().star_map(gderexample)
        assert star.eval(1.25) == 5.0
        assert star.eval(1.0) == 1.0
        assert star.eval(2.5) == 6.0
        assert star.eval(0.5) == 0.5


class TestBDMembership:
    def test_step_at_jump_is_bd(self, non_tvs):
        assert bd_membership(non_tvs_f(), non_tvs, grid=np.linspace(-1.0, 1.0, 21)).verdict

    def test_step_off_jump_is_not_g_continuous(self, example1):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.5, 3.0], [0.0, 1.0])
        assert not is_g_continuous_at(f, example1, 1.5)
        report = bd_membership(f, example1)
        assert not report.verdict
        assert 1.5 in report.failures

    def test_offsets_come_from_config(self, example1):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.5, 3.0], [0.0, 1.0])
        # 8 个偏移最小只到 2^-9，g 的增量仍远大于阈值
        shallow = ContinuityConfig(offsets=8, ratio=0.5)
        assert is_g_continuous_at(f, example1, 1.5, continuity=shallow)
        assert bd_membership(f, example1, continuity=shallow).verdict
        assert not is_g_continuous_at(f, example1, 1.5, continuity=ContinuityConfig())

    def test_constancy_interior_is_vacuous(self, gderexample):
        f = PiecewiseMap.step((0.0, 3.0), [0.0, 1.5, 3.0], [0.0, 1.0])
        assert is_g_continuous_at(f, gderexample, 1.5)
