"""Tests für das Shift-Modell: Annihilation, Rangtupel, Multiplizitäten und Blaschke-Restriktion."""

import dataclasses

import numpy as np
import pytest

from src.isopair_lab.colligation import truncation_error_bound
from src.isopair_lab.errors import NumericalCheckError
from src.isopair_lab.isopair import (
    BlaschkeProduct,
    Operator,
    ShiftModel,
    annihilation_residual,
    blaschke_annihilator,
    blaschke_from_zeros,
    char_poly_check,
    compute_rank,
    diagonalizability_check,
    hermitian_rank,
    joint_kernel_dim,
    multiplicity,
    operator_annihilation_residual,
    operator_joint_kernel_dim,
    rank_stability_check,
    rank_upper_bound_check,
    restrict_via_blaschke,
)
from src.models import BiPoly, Factorization, VarietyPoint


@pytest.fixture
def exemplar_model(exemplar_colligation):
    return ShiftModel(exemplar_colligation, 12)


@pytest.fixture
def diagonal_model(diagonal_colligation):
    return ShiftModel(diagonal_colligation, 12)


@pytest.fixture
def cross_factors(diagonal, anti_diagonal):
    return Factorization(factors=[diagonal, anti_diagonal])


@pytest.fixture
def doubled_model(doubled_exemplar_colligation):
    return ShiftModel(doubled_exemplar_colligation, 12)


@pytest.fixture
def mobius_model(mobius_colligation):
    return ShiftModel(mobius_colligation, 12)


class TestShiftModel:
    """Tests für die trunkierten Operatoren."""

    def test_dimensions(self, exemplar_model):
        assert exemplar_model.dim == 26
        assert exemplar_model.shift_matrix.shape == (26, 26)

    def test_truncation_degree_checked(self, exemplar_colligation):
        with pytest.raises(ValueError):
            ShiftModel(exemplar_colligation, 0)

    def test_phi_acts_on_constants(self, exemplar_model):
        w = BiPoly.from_terms({(0, 1): 1})
        image = exemplar_model.apply_polynomial(w, exemplar_model.embed([[1, 0]]))
        assert np.allclose(image, exemplar_model.embed([[0, 1]]))

    def test_shift_raises_degree(self, exemplar_model):
        z = BiPoly.from_terms({(1, 0): 1})
        image = exemplar_model.apply_polynomial(z, exemplar_model.embed([[1, 0]]))
        assert np.allclose(image, exemplar_model.embed([[0, 0], [1, 0]]))

    def test_operator_annihilation(self, exemplar_model, parabola):
        assert operator_annihilation_residual(exemplar_model, parabola) < 1e-12

    def test_pointwise_annihilation(self, exemplar_model, diagonal_model, parabola, cross):
        assert annihilation_residual(exemplar_model, parabola) < 1e-9
        assert annihilation_residual(diagonal_model, cross) < 1e-9

    def test_wrong_polynomial_not_annihilating(self, exemplar_model, cross):
        assert annihilation_residual(exemplar_model, cross) > 1e-3


class TestJointKernel:
    """Tests für gemeinsame Kerne und Multiplizitäten."""

    def test_joint_kernel_on_and_off_variety(self, exemplar_model):
        assert joint_kernel_dim(exemplar_model, 0.25, 0.5) == 1
        assert joint_kernel_dim(exemplar_model, 0.25, -0.5) == 1
        assert joint_kernel_dim(exemplar_model, 0.25, 0.3) == 0

    def test_multiplicities_match_bidegree(self, exemplar_model):
        assert multiplicity(exemplar_model, Operator.S) == 2
        assert multiplicity(exemplar_model, "T") == 1

    def test_multiplicity_needs_truncation(self, exemplar_colligation):
        with pytest.raises(ValueError):
            multiplicity(ShiftModel(exemplar_colligation, 1), Operator.S)


class TestRank:
    """Tests für das Rangtupel α."""

    def test_exemplar_rank(self, exemplar_model, parabola):
        result = compute_rank(exemplar_model, Factorization(factors=[parabola]))
        assert result.alpha == (1,)
        assert result.consistent
        assert len(result.per_component_samples[0]) == 20

    def test_diagonal_rank(self, diagonal_model, cross_factors):
        result = compute_rank(diagonal_model, cross_factors, samples_per_component=20)
        assert result.alpha == (1, 1)
        assert all(len(samples) == 20 for samples in result.per_component_samples)
        assert result.M_check and result.N_check

    def test_rank_is_deterministic(self, exemplar_model, parabola):
        fac = Factorization(factors=[parabola])
        first = compute_rank(exemplar_model, fac, seed=4)
        second = compute_rank(exemplar_model, fac, seed=4, threads=3)
        assert first == second

    def test_foreign_factor_has_no_kernel(self, exemplar_model, diagonal):
        with pytest.raises(NumericalCheckError):
            compute_rank(exemplar_model, Factorization(factors=[diagonal]), samples_per_component=5)

    def test_regularity_threshold_is_honored(self, exemplar_model, parabola):
        """|∇(w² − z)| ≥ 1 auf 𝔙; eine Schwelle von 10 lässt keinen regulären Punkt übrig."""
        fac = Factorization(factors=[parabola])
        assert compute_rank(exemplar_model, fac, samples_per_component=5, regularity_tol=0.5).alpha == (1,)
        with pytest.raises(ValueError):
            compute_rank(exemplar_model, fac, samples_per_component=5, regularity_tol=10.0)

    def test_char_poly(self, exemplar_model, diagonal_model, parabola, cross_factors):
        report = char_poly_check(exemplar_model, Factorization(factors=[parabola]), [1])
        assert report.max_residual < 1e-10
        assert report.skipped == ()
        assert char_poly_check(diagonal_model, cross_factors, [1, 1]).max_residual < 1e-10

    def test_diagonalizable_fibers(self, exemplar_model, diagonal_model, parabola, cross_factors):
        assert diagonalizability_check(exemplar_model, Factorization(factors=[parabola]), [1], 0.25)
        assert diagonalizability_check(diagonal_model, cross_factors, [1, 1], 0.4j)

    def test_cyclic_rank_bound(self, exemplar_model, parabola):
        result = compute_rank(exemplar_model, Factorization(factors=[parabola]), samples_per_component=5)
        points = [point for point, _ in result.per_component_samples[0]]
        assert rank_upper_bound_check(exemplar_model, 1, points)


class TestBlaschke:
    """Tests für endliche Blaschke-Produkte."""

    def test_zeros_inside_disk(self):
        with pytest.raises(ValueError):
            BlaschkeProduct(zeros=(1.0,))

    def test_unimodular_on_boundary(self):
        u = blaschke_from_zeros([0.5, -0.3j, 0])
        assert u.degree == 3
        assert u.boundary_deviation() < 1e-12
        assert abs(u(0.5)) < 1e-12

    def test_taylor_coefficients(self):
        u = blaschke_from_zeros([0.5])
        assert np.allclose(u.taylor(3), [-0.5, 0.75, 0.375])

    @pytest.mark.parametrize("size", [1, 2, 4])
    def test_nilpotent_jordan_block(self, size):
        jordan = np.eye(size, k=1)
        u = blaschke_annihilator(jordan)
        assert u.degree == size
        assert np.allclose(u.zeros, 0)

    def test_minimal_polynomial_degree(self):
        u = blaschke_annihilator(np.diag([0.5, 0.5, -0.2]))
        assert u.degree == 2
        assert np.linalg.norm(u.at_matrix(np.diag([0.5, 0.5, -0.2]))) < 1e-12

    def test_eigenvalue_outside_disk(self):
        with pytest.raises(ValueError):
            blaschke_annihilator(np.diag([0.5, 1.2]))


class TestRestriction:
    """Tests für die Restriktion auf den Bildraum von u(S)."""

    @pytest.mark.parametrize("zeros", [[0], [0.5], [0, 0.5]])
    def test_codimension(self, exemplar_model, zeros):
        restricted = restrict_via_blaschke(exemplar_model, blaschke_from_zeros(zeros))
        assert restricted.codimension == len(zeros) * 2
        assert restricted.expected_codimension == restricted.codimension

    def test_truncation_too_small(self, exemplar_colligation):
        with pytest.raises(ValueError):
            restrict_via_blaschke(ShiftModel(exemplar_colligation, 2), blaschke_from_zeros([0]))

    def test_restricted_pair_is_annihilated(self, exemplar_model, parabola):
        restricted = restrict_via_blaschke(exemplar_model, blaschke_from_zeros([0]))
        assert restricted.annihilation_residual(parabola) < 1e-10

    @pytest.mark.parametrize("zeros", [[0], [0.5]])
    def test_rank_is_stable(self, exemplar_model, parabola, zeros):
        report = rank_stability_check(
            exemplar_model, Factorization(factors=[parabola]), blaschke_from_zeros(zeros), samples_per_component=8
        )
        assert report
        assert report.alpha == (1,)
        assert report.codimension == 2
        assert len(report.measured) + len(report.excluded) == 8

    @pytest.mark.parametrize(
        ("model_name", "factor_names"),
        [
            ("exemplar_model", ["parabola"]),
            ("diagonal_model", ["diagonal", "anti_diagonal"]),
            ("doubled_model", ["parabola"]),
            ("mobius_model", ["mobius_poly"]),
        ],
    )
    @pytest.mark.parametrize("zeros", [[0], [0, 0], [0.4]])
    def test_rank_is_stable_for_all_models(self, model_name, factor_names, zeros, request):
        """z, z² und der Automorphismus mit Nullstelle 0.4 erhalten α an 20 Punkten je Komponente."""
        model = request.getfixturevalue(model_name)
        fac = Factorization(factors=[request.getfixturevalue(name) for name in factor_names])
        report = rank_stability_check(model, fac, blaschke_from_zeros(zeros), samples_per_component=20)
        assert report.stable
        assert report.codimension == len(zeros) * model.M
        assert len(report.measured) + len(report.excluded) == 20 * len(factor_names)
        assert len(report.measured) > 0
        assert all(dim == report.alpha[index] for index, _, dim in report.measured)

    def test_wrong_rank_is_not_stable(self, exemplar_model, parabola):
        fac = Factorization(factors=[parabola])
        rank = compute_rank(exemplar_model, fac)
        wrong = dataclasses.replace(rank, alpha=(2,))
        report = rank_stability_check(exemplar_model, fac, blaschke_from_zeros([0.4]), rank=wrong)
        assert not report.stable
        assert not report

    def test_rational_transfer_far_from_origin(self, mobius_model):
        """Für Φ = (z − 1/2)/(1 − z/2) bleibt der Kern bei |λ| = 0.9 eindimensional."""
        point = VarietyPoint(z=0.9, w=0.4 / 0.55)
        restricted = restrict_via_blaschke(mobius_model, blaschke_from_zeros([0.4]))
        assert restricted.joint_kernel_dim(point.z, point.w) == 1
        assert restricted.joint_kernel_dim(point.z, 0.0) == 0

    def test_fiber_vanishes_at_zero_of_u(self, exemplar_model):
        restricted = restrict_via_blaschke(exemplar_model, blaschke_from_zeros([0]))
        assert restricted.fiber(0.3).shape == (2, 2)
        assert restricted.fiber(0).shape == (2, 0)
        assert restricted.joint_kernel_dim(0, 0) == 0
        assert restricted.excluded(0, 0)

    def test_exclusion_radius(self, exemplar_model, parabola):
        """Mit Radius 10 liegt jeder Punkt in σ(A) × σ(B) und wird ausgelassen."""
        report = rank_stability_check(
            exemplar_model,
            Factorization(factors=[parabola]),
            blaschke_from_zeros([0]),
            samples_per_component=8,
            exclusion_radius=10.0,
        )
        assert report.measured == ()
        assert len(report.excluded) == 8


class TestOperatorJointKernel:
    """Tests für den gemeinsamen Kern auf Operatorebene mit adaptiver Trunkierung."""

    @pytest.mark.parametrize(("lam", "mu", "expected"), [(0.25, 0.5, 1), (0.25, -0.5, 1), (0.25, 0.3, 0)])
    def test_matches_pointwise_kernel_for_polynomial_transfer(self, exemplar_model, lam, mu, expected):
        assert operator_joint_kernel_dim(exemplar_model, lam, mu) == expected
        assert joint_kernel_dim(exemplar_model, lam, mu) == expected

    @pytest.mark.parametrize("lam", [0.3, 0.9, -0.85j])
    def test_rational_transfer(self, mobius_model, lam):
        mu = (lam - 0.5) / (1 - 0.5 * lam)
        assert operator_joint_kernel_dim(mobius_model, lam, mu) == 1
        assert operator_joint_kernel_dim(mobius_model, lam, mu + 0.3) == 0

    def test_truncation_limit(self, mobius_model):
        mu = (0.9 - 0.5) / (1 - 0.45)
        with pytest.raises(NumericalCheckError):
            operator_joint_kernel_dim(mobius_model, 0.9, mu, max_degree=13)

    def test_error_bound_is_attained(self, mobius_colligation):
        """Die Spalten von T_K − μ weichen in Richtung der Auswertung bei λ genau um die Schranke ab."""
        lam, degree = 0.7, 10
        mu = (lam - 0.5) / (1 - 0.5 * lam)
        model = ShiftModel(mobius_colligation, degree)
        evaluation = lam ** np.arange(degree + 1)
        row = evaluation @ (model.phi_matrix - mu * np.eye(model.dim))[:, :degree]
        bound = truncation_error_bound(mobius_colligation, lam, degree)
        assert np.linalg.norm(row) == pytest.approx(bound, rel=1e-9)


class TestDefectRank:
    """Tests für den Rang hermitescher Defektmatrizen."""

    @pytest.mark.parametrize("scale", [1e-8, 1.0, 1e8])
    def test_rank_is_scale_invariant(self, scale):
        assert hermitian_rank(scale * np.diag([1e-8, 1e-16]), 1e-7) == 1
        assert hermitian_rank(scale * np.diag([1.0, 0.5, 1e-12]), 1e-7) == 2

    def test_zero_matrix(self):
        assert hermitian_rank(np.zeros((3, 3)), 1e-7) == 0

    def test_negative_eigenvalues_do_not_count(self):
        assert hermitian_rank(np.diag([1.0, -1.0]), 1e-7) == 1


class TestDoubledExemplar:
    """Tests für Φ ⊕ Φ auf w² = z mit Rang 2."""

    def test_rank_two(self, doubled_model, parabola):
        result = compute_rank(doubled_model, Factorization(factors=[parabola]), samples_per_component=20)
        assert result.alpha == (2,)
        assert result.consistent
        assert (result.M, result.N) == (4, 2)

    def test_joint_kernel_at_exemplar_point(self, doubled_model):
        assert joint_kernel_dim(doubled_model, 0.25, 0.5) == 2
        assert operator_joint_kernel_dim(doubled_model, 0.25, 0.5) == 2

    def test_multiplicities(self, doubled_model):
        assert multiplicity(doubled_model, Operator.S) == 4
        assert multiplicity(doubled_model, Operator.T) == 2
