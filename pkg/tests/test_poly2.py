"""Tests für Fasern, Resultanten, Inner-Toral-Zertifizierung und Abtastung der Varietät."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.isopair_lab.poly2 import (
    check_inner_toral,
    cluster_roots,
    component_points,
    exceptional_lambdas,
    is_regular_point,
    is_square_free,
    resultant_w,
    roots,
    sample_variety,
    slice_at_w,
    slice_at_z,
)
from src.models import BiPoly, Factorization, UniPoly, Verdict

unit_disk_values = st.builds(
    lambda r, t: complex(r * np.cos(t), r * np.sin(t)),
    st.floats(min_value=0, max_value=0.99),
    st.floats(min_value=0, max_value=2 * np.pi),
)


class TestFibers:
    """Tests für Fasern und Nullstellen."""

    def test_slice_at_z(self, parabola):
        fib = slice_at_z(parabola, 0.25)
        assert fib.degree == 2
        assert sorted(abs(r) for r in roots(fib)) == pytest.approx([0.5, 0.5])

    def test_slice_at_w(self, parabola):
        fib = slice_at_w(parabola, 0.5)
        assert fib.degree == 1
        assert roots(fib) == [pytest.approx(0.25)]

    def test_roots_of_constant(self):
        assert roots(UniPoly(coeffs=[3])) == []

    def test_roots_of_zero_raise(self):
        with pytest.raises(ValueError):
            roots(UniPoly(coeffs=[0]))

    def test_cluster_roots(self):
        clusters = cluster_roots([1, 1 + 1e-9, -1], radius=1e-6)
        assert [m for _, m in clusters] == [1, 2]
        assert clusters[1][0] == pytest.approx(1)

    @settings(max_examples=30, deadline=None)
    @given(z=unit_disk_values, w=unit_disk_values)
    def test_product_evaluates_pointwise(self, z, w):
        p = BiPoly.from_coeffs([[0, 0, 1], [-1, 0, 0]])
        q = BiPoly.from_coeffs([[2, 1j], [0, 3]])
        assert (p * q)(z, w) == pytest.approx(p(z, w) * q(z, w), abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(
        coeffs=arrays(np.float64, (3, 3), elements=st.floats(min_value=1, max_value=2)),
        z=unit_disk_values,
        w=unit_disk_values,
    )
    def test_swap_exchanges_variables(self, coeffs, z, w):
        p = BiPoly.from_coeffs(coeffs)
        assert p.swap()(w, z) == pytest.approx(p(z, w), abs=1e-12)


class TestRegularity:
    """Tests für reguläre Punkte."""

    def test_parabola_point_is_regular(self, parabola):
        assert is_regular_point(parabola, 0.25, 0.5)

    def test_crossing_is_singular(self, cross):
        assert not is_regular_point(cross, 0, 0)

    def test_point_off_variety_raises(self, parabola):
        with pytest.raises(ValueError):
            is_regular_point(parabola, 0.5, 0.5)


class TestResultants:
    """Tests für Resultanten und Ausnahmepunkte."""

    def test_resultant_of_lines(self, diagonal, anti_diagonal):
        res = resultant_w(diagonal, anti_diagonal)
        assert abs(res(0)) == pytest.approx(0, abs=1e-12)
        assert abs(res(0.5)) == pytest.approx(1)

    def test_resultant_with_zero(self, diagonal):
        assert resultant_w(diagonal, BiPoly.zero()).is_zero

    def test_exceptional_lambdas_parabola(self, parabola):
        lambdas = exceptional_lambdas(parabola)
        assert len(lambdas) == 1
        assert abs(lambdas[0]) < 1e-6

    def test_exceptional_lambdas_cross(self, cross):
        lambdas = exceptional_lambdas(cross)
        assert len(lambdas) == 1
        assert abs(lambdas[0]) < 1e-6

    def test_exceptional_lambdas_need_w_degree(self):
        with pytest.raises(ValueError):
            exceptional_lambdas(BiPoly.from_terms({(1, 0): 1}))

    def test_square_free(self, cross, parabola):
        assert is_square_free(cross)
        assert is_square_free(parabola)

    def test_square_detected(self, diagonal):
        result = is_square_free(diagonal**2)
        assert not result
        assert result.residual <= result.threshold

    def test_square_free_rejects_constant(self):
        with pytest.raises(ValueError):
            is_square_free(BiPoly.constant(2))


class TestInnerToral:
    """Tests für die Inner-Toral-Zertifizierung."""

    @pytest.mark.parametrize("name", ["parabola", "diagonal", "cross", "cusp"])
    def test_inner_toral_examples_pass(self, name, request):
        report = check_inner_toral(request.getfixturevalue(name))
        assert report.verdict == Verdict.PASS
        assert report.witnesses == []
        assert report.boundary_max_deviation < 1e-8
        assert report.interior_max_modulus < 1

    def test_exterior_sampling(self, parabola):
        report = check_inner_toral(parabola, exterior=True)
        assert report.verdict == Verdict.PASS
        assert report.exterior_min_modulus > 1

    def test_hyperbola_escapes_disk(self, hyperbola):
        report = check_inner_toral(hyperbola)
        assert report.verdict == Verdict.FAIL
        assert "interior_escape" in {w.reason for w in report.witnesses}

    def test_steep_line_leaves_torus(self, steep_line):
        report = check_inner_toral(steep_line)
        assert report.verdict == Verdict.FAIL
        assert "boundary_deviation" in {w.reason for w in report.witnesses}
        assert report.boundary_max_deviation == pytest.approx(1)

    def test_hyperbola_enters_exterior(self, hyperbola):
        report = check_inner_toral(hyperbola, exterior=True)
        assert "exterior_entry" in {w.reason for w in report.witnesses}

    def test_requires_both_variables(self):
        with pytest.raises(ValueError):
            check_inner_toral(BiPoly.from_terms({(0, 1): 1, (0, 0): -0.5}))


class TestSampling:
    """Tests für Abtastung der Varietät."""

    def test_points_lie_on_variety(self, parabola):
        points = sample_variety(parabola, 10, seed=3)
        assert len(points) == 10
        for point in points:
            assert abs(parabola(point.z, point.w)) < 1e-8
            assert abs(point.z) < 1 and abs(point.w) < 1
            assert abs(point.z) > 1e-3
            assert point.regular

    def test_sampling_is_deterministic(self, parabola):
        first = sample_variety(parabola, 5, seed=11)
        second = sample_variety(parabola, 5, seed=11)
        assert [(p.z, p.w) for p in first] == [(p.z, p.w) for p in second]

    def test_component_index(self, cross, diagonal, anti_diagonal):
        fac = Factorization(factors=[diagonal, anti_diagonal])
        points = sample_variety(cross, 12, seed=1, factors=fac)
        for point in points:
            factor = fac.factors[point.component_index]
            assert abs(factor(point.z, point.w)) < 1e-8

    def test_component_points(self, cross, diagonal, anti_diagonal):
        fac = Factorization(factors=[diagonal, anti_diagonal])
        points = component_points(cross, fac, 1, 8, seed=2)
        assert all(p.component_index == 1 for p in points)
        assert all(abs(p.w + p.z) < 1e-8 for p in points)
        assert all(abs(p.w - p.z) > 1e-6 for p in points)
