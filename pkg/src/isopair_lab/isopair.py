"""Trunkiertes Shift-Modell von (M_z, M_Φ): Annihilation, Rangtupel, Multiplizitäten, Blaschke-Restriktion."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import toeplitz
from scipy.signal import lfilter

from src.isopair_lab.colligation import (
    boundary_points,
    interior_points,
    required_truncation,
    taylor_coefficients,
    transfer,
)
from src.isopair_lab.errors import NumericalCheckError
from src.isopair_lab.poly2 import cluster_roots, component_points, roots, slice_at_z
from src.models import BiPoly, Colligation, Factorization, Tolerances, UniPoly, VarietyPoint
from src.utils import parallel_map

logger = logging.getLogger(__name__)

_TOL = Tolerances()


class Operator(str, Enum):
    """Auswahl des Isometrie-Operators."""

    S = "S"
    T = "T"


# =============================================================================
# Shift-Modell
# =============================================================================


@dataclass(frozen=True)
class ShiftModel:
    """
    Trunkiertes Modell von (M_z, M_Φ) auf H²_{ℂ^M}.

    Basis z^a e_k mit 0 ≤ a ≤ D, Index a·M + k. Beide Matrizen sind untere
    Block-Dreiecksmatrizen; Produkte sind exakte Kompressionen der Operatorprodukte.
    """

    colligation: Colligation
    truncation_degree: int

    def __post_init__(self):
        if self.truncation_degree < 1:
            raise ValueError(f"truncation degree must be at least 1, got {self.truncation_degree}")

    @property
    def M(self) -> int:
        return self.colligation.M

    @property
    def N(self) -> int:
        return self.colligation.N

    @property
    def dim(self) -> int:
        return (self.truncation_degree + 1) * self.M

    @cached_property
    def shift_matrix(self) -> np.ndarray:
        """S_D: Blockshift um einen Grad."""
        size = self.truncation_degree + 1
        return np.kron(np.eye(size, k=-1), np.eye(self.M)).astype(complex)

    @cached_property
    def phi_matrix(self) -> np.ndarray:
        """T_D: untere Block-Toeplitzmatrix der Taylorkoeffizienten von Φ."""
        size = self.truncation_degree + 1
        matrix = np.zeros((self.dim, self.dim), dtype=complex)
        for k, coefficient in enumerate(taylor_coefficients(self.colligation, size)):
            matrix += np.kron(np.eye(size, k=-k), coefficient)
        return matrix

    def matrix(self, which: Operator) -> np.ndarray:
        return self.shift_matrix if which == Operator.S else self.phi_matrix

    def embed(self, coefficients: np.ndarray) -> np.ndarray:
        """Bettet ein Vektorpolynom (Zeile a = Koeffizient von z^a) in die trunkierte Basis ein."""
        coefficients = np.atleast_2d(np.asarray(coefficients, dtype=complex))
        vector = np.zeros(self.dim, dtype=complex)
        rows = min(coefficients.shape[0], self.truncation_degree + 1)
        vector[: rows * self.M] = coefficients[:rows].ravel()
        return vector

    def with_truncation(self, degree: int) -> ShiftModel:
        return ShiftModel(self.colligation, degree)

    def direct_sum(self, other: ShiftModel) -> ShiftModel:
        return ShiftModel(
            self.colligation.direct_sum(other.colligation), max(self.truncation_degree, other.truncation_degree)
        )

    def apply_polynomial(self, r: BiPoly, vector: np.ndarray) -> np.ndarray:
        """r(S_D, T_D)·vector."""
        result = np.zeros(self.dim, dtype=complex)
        if r.is_zero:
            return result
        t_power = np.array(vector, dtype=complex)
        for j in range(r.bidegree[1] + 1):
            s_power = t_power
            for i in range(r.bidegree[0] + 1):
                if r.coeffs[i, j] != 0:
                    result += r.coeffs[i, j] * s_power
                s_power = self.shift_matrix @ s_power
            t_power = self.phi_matrix @ t_power
        return result


def poly_at_matrix(p: BiPoly, lam: complex, phi: np.ndarray) -> np.ndarray:
    """p(λI, Φ) = Σ_j 𝔭_λ-Koeffizient_j · Φ^j (Horner in Φ)."""
    size = phi.shape[0]
    coefficients = p.w_coefficients(lam)
    result = np.zeros((size, size), dtype=complex)
    for c in coefficients[::-1]:
        result = result @ phi + c * np.eye(size)
    return result


def _default_disk_samples() -> np.ndarray:
    return np.concatenate([boundary_points(), interior_points()])


def annihilation_residual(model: ShiftModel, p: BiPoly, samples: Sequence[complex] | None = None) -> float:
    """max_λ ‖𝔭(λI, Φ(λ))‖ über Abtastpunkte in der abgeschlossenen Scheibe."""
    points = _default_disk_samples() if samples is None else samples
    return max(
        float(np.linalg.norm(poly_at_matrix(p, lam, transfer(model.colligation, lam)), 2)) for lam in points
    )


def operator_annihilation_residual(model: ShiftModel, p: BiPoly) -> float:
    """‖𝔭(S_D, T_D)‖ als exakte Kompression von 𝔭(S, T)."""
    total = np.zeros((model.dim, model.dim), dtype=complex)
    t_power = np.eye(model.dim, dtype=complex)
    for j in range(p.bidegree[1] + 1):
        s_power = t_power
        for i in range(p.bidegree[0] + 1):
            total += p.coeffs[i, j] * s_power
            s_power = model.shift_matrix @ s_power
        t_power = model.phi_matrix @ t_power
    return float(np.linalg.norm(total, 2))


# =============================================================================
# Gemeinsame Kerne und Multiplizitäten
# =============================================================================


def _nullity(matrix: np.ndarray, rank_tol: float) -> int:
    singular = np.linalg.svd(matrix, compute_uv=False)
    threshold = rank_tol * max(float(singular.max(initial=0.0)), 1.0)
    return int(np.sum(singular < threshold)) + max(0, matrix.shape[1] - singular.size)


def hermitian_rank(matrix: np.ndarray, rank_tol: float) -> int:
    """Anzahl der Eigenwerte über rank_tol · (größter Eigenwertbetrag); skaleninvariant."""
    eigenvalues = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)
    scale = float(np.abs(eigenvalues).max(initial=0.0))
    if scale == 0.0:
        return 0
    return int(np.sum(eigenvalues > rank_tol * scale))


def joint_kernel_dim(model: ShiftModel, lam: complex, mu: complex, rank_tol: float = _TOL.rank) -> int:
    """dim(ker(S−λ)* ∩ ker(T−μ)*) als numerische Nullität von Φ(λ) − μI."""
    phi = transfer(model.colligation, lam)
    return _nullity(phi - mu * np.eye(model.M), rank_tol)


def _range_codimension(
    out_basis: np.ndarray,
    in_basis: np.ndarray,
    shift: np.ndarray,
    phi: np.ndarray,
    lam: complex,
    mu: complex,
    rank_tol: float,
) -> int:
    """Kodimension von (S−λ)·in + (T−μ)·in innerhalb des Raums ``out``."""
    size = shift.shape[0]
    columns = np.hstack(
        [
            out_basis.conj().T @ (shift - lam * np.eye(size)) @ in_basis,
            out_basis.conj().T @ (phi - mu * np.eye(size)) @ in_basis,
        ]
    )
    singular = np.linalg.svd(columns, compute_uv=False)
    rank = int(np.sum(singular > rank_tol * max(float(singular.max(initial=0.0)), 1.0)))
    return out_basis.shape[1] - rank


TAIL_MARGIN = 1e-2


def operator_joint_kernel_dim(
    model: ShiftModel, lam: complex, mu: complex, rank_tol: float = _TOL.rank, max_degree: int = 512
) -> int:
    """Gemeinsamer Kern auf Operatorebene.

    Kodimension von (S_K−λ)P_{K−1} + (T_K−μ)P_{K−1} in P_K. K ≥ D wird so gewählt, dass
    truncation_error_bound bei λ unter TAIL_MARGIN · rank_tol liegt; für polynomiales Φ bleibt K = D.

    Raises:
        NumericalCheckError: Wenn dafür K > max_degree nötig wäre
    """
    degree = required_truncation(model.colligation, lam, model.truncation_degree, TAIL_MARGIN * rank_tol, max_degree)
    work = model if degree == model.truncation_degree else model.with_truncation(degree)
    identity = np.eye(work.dim, dtype=complex)
    inner = identity[:, : work.truncation_degree * work.M]
    return _range_codimension(identity, inner, work.shift_matrix, work.phi_matrix, lam, mu, rank_tol)


def _defect_rank(model: ShiftModel, which: Operator, rank_tol: float) -> int:
    x = model.matrix(which)
    interior = model.truncation_degree * model.M
    defect = (np.eye(model.dim) - x @ x.conj().T)[:interior, :interior]
    return hermitian_rank(defect, rank_tol)


def multiplicity(model: ShiftModel, which: Operator | str, rank_tol: float = _TOL.rank) -> int:
    """mult(V) = dim ker V* als Rang von I − V_D V_D* auf den Graden < D.

    Raises:
        ValueError: Wenn D < 2
        NumericalCheckError: Wenn sich der Wert zwischen D und D+1 ändert
    """
    which = Operator(which)
    if model.truncation_degree < 2:
        raise ValueError("multiplicity requires truncation degree at least 2")
    value = _defect_rank(model, which, rank_tol)
    larger = _defect_rank(model.with_truncation(model.truncation_degree + 1), which, rank_tol)
    if value != larger:
        raise NumericalCheckError(
            f"multiplicity of {which.value} unstable between D={model.truncation_degree} ({value}) and D+1 ({larger})"
        )
    return value


# =============================================================================
# Rangtupel
# =============================================================================


@dataclass(frozen=True)
class RankResult:
    """Rangtupel α mit Abtastpunkten je Komponente und den Bimultiplizitäts-Identitäten."""

    alpha: tuple[int, ...]
    per_component_samples: tuple[tuple[tuple[VarietyPoint, int], ...], ...]
    M_check: bool
    N_check: bool
    M: int
    N: int
    bidegrees: tuple[tuple[int, int], ...]

    @property
    def consistent(self) -> bool:
        return self.M_check and self.N_check


def compute_rank(
    model: ShiftModel,
    fac: Factorization,
    samples_per_component: int = 20,
    seed: int = 0,
    max_retries: int = 100,
    rank_tol: float = _TOL.rank,
    threads: int = 1,
    regularity_tol: float = _TOL.regularity,
    cluster_radius: float = _TOL.cluster,
) -> RankResult:
    """Bestimmt α an regulären Punkten jeder Komponente (einstimmig über alle Abtastpunkte).

    Args:
        model: Shift-Modell der Kolligation
        fac: Faktorisierung 𝔭 = 𝔭₁⋯𝔭_s
        samples_per_component: reguläre Punkte je Komponente
        seed: Startwert der Abtastung
        max_retries: Wiederholungen bei uneinheitlichen Dimensionen
        rank_tol: relative Singulärwertschwelle
        threads: Obergrenze für parallele Auswertung
        regularity_tol: Mindestgradient regulärer Abtastpunkte
        cluster_radius: Radius, in dem Ausnahmepunkte zusammengefasst werden

    Returns:
        RankResult mit α, Abtastpunkten und M/N-Prüfungen

    Raises:
        NumericalCheckError: Bei dauerhaft uneinheitlichen Dimensionen oder αⱼ = 0
    """
    p = fac.product()
    alpha: list[int] = []
    per_component: list[tuple[tuple[VarietyPoint, int], ...]] = []
    for index in range(len(fac.factors)):
        for attempt in range(max_retries):
            points = component_points(
                p,
                fac,
                index,
                samples_per_component,
                seed=seed + 7919 * attempt + 104729 * index,
                regularity_tol=regularity_tol,
                cluster_radius=cluster_radius,
            )
            dims = parallel_map(lambda pt: joint_kernel_dim(model, pt.z, pt.w, rank_tol), points, threads)
            if len(set(dims)) == 1:
                break
            logger.warning("component %d: non-unanimous dimensions %s, resampling", index, sorted(set(dims)))
        else:
            raise NumericalCheckError(f"joint kernel dimensions on component {index} stay non-unanimous")
        if dims[0] == 0:
            raise NumericalCheckError(f"component {index} carries no joint kernel; Φ is not annihilated by the factor")
        alpha.append(dims[0])
        per_component.append(tuple(zip(points, dims, strict=True)))

    bidegrees = tuple(f.bidegree for f in fac.factors)
    m_sum = sum(a * m for a, (_, m) in zip(alpha, bidegrees, strict=True))
    n_sum = sum(a * n for a, (n, _) in zip(alpha, bidegrees, strict=True))
    logger.info("rank alpha=%s, M=%d (sum %d), N=%d (sum %d)", alpha, model.M, m_sum, model.N, n_sum)
    return RankResult(
        alpha=tuple(alpha),
        per_component_samples=tuple(per_component),
        M_check=model.M == m_sum,
        N_check=model.N == n_sum,
        M=model.M,
        N=model.N,
        bidegrees=bidegrees,
    )


@dataclass(frozen=True)
class CharPolyReport:
    """Abweichung det(wI − Φ(λ)) gegen Π 𝔭_{j,λ}^{αⱼ} (monisch normiert)."""

    max_residual: float
    checked: tuple[complex, ...]
    skipped: tuple[complex, ...]


def char_poly_check(
    model: ShiftModel,
    fac: Factorization,
    alpha: Sequence[int],
    lambdas: Sequence[complex] | None = None,
) -> CharPolyReport:
    """Vergleicht charakteristisches Polynom und Faserprodukt koeffizientenweise.

    Punkte, an denen ein Faktor im w-Grad fällt, werden übersprungen und berichtet.
    Bei Gradunterschied wird das kürzere Polynom mit führenden Nullen aufgefüllt.
    """
    points = interior_points() if lambdas is None else lambdas
    worst = 0.0
    checked: list[complex] = []
    skipped: list[complex] = []
    for lam in points:
        lam = complex(lam)
        char = np.poly(transfer(model.colligation, lam))
        product = UniPoly(coeffs=[1.0])
        dropped = False
        for factor, a in zip(fac.factors, alpha, strict=True):
            fiber = slice_at_z(factor, lam)
            if fiber.degree < factor.bidegree[1]:
                dropped = True
                break
            product = product * fiber**a
        if dropped:
            logger.warning("char poly check: fiber degree drops at lambda=%s, skipped", lam)
            skipped.append(lam)
            continue
        reference = product.monic().coeffs[::-1]
        size = max(len(char), len(reference))
        char = np.concatenate([np.zeros(size - len(char)), char])
        reference = np.concatenate([np.zeros(size - len(reference)), reference])
        worst = max(worst, float(np.abs(char - reference).max()))
        checked.append(lam)
    return CharPolyReport(max_residual=worst, checked=tuple(checked), skipped=tuple(skipped))


def diagonalizability_check(
    model: ShiftModel, fac: Factorization, alpha: Sequence[int], lam: complex, rank_tol: float = _TOL.rank
) -> bool:
    """An nicht-exzeptionellem λ ist Φ(λ) diagonalisierbar mit geometrischer Vielfachheit αⱼ je Faserpunkt."""
    total = 0
    for factor, a in zip(fac.factors, alpha, strict=True):
        for mu in roots(slice_at_z(factor, lam)):
            geometric = joint_kernel_dim(model, lam, mu, rank_tol)
            if geometric != a:
                return False
            total += geometric
    return total == model.M


def rank_upper_bound_check(model: ShiftModel, k: int, points: Sequence[VarietyPoint], rank_tol: float = _TOL.rank) -> bool:
    """Für ein k-zyklisches Paar gilt dim(ker(S−λ)* ∩ ker(T−μ)*) ≤ k an allen Punkten."""
    return all(joint_kernel_dim(model, pt.z, pt.w, rank_tol) <= k for pt in points)


# =============================================================================
# Blaschke-Produkte
# =============================================================================


@dataclass(frozen=True)
class BlaschkeProduct:
    """Endliches Blaschke-Produkt u(z) = Π (z − a)/(1 − āz)."""

    zeros: tuple[complex, ...]

    def __post_init__(self):
        if any(abs(a) >= 1 for a in self.zeros):
            raise ValueError("Blaschke zeros must lie in the open unit disk")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @property
    def numerator(self) -> UniPoly:
        coefficients = np.array([1.0 + 0j])
        for a in self.zeros:
            coefficients = npoly.polymul(coefficients, [-a, 1.0])
        return UniPoly(coeffs=coefficients)

    @property
    def denominator(self) -> UniPoly:
        coefficients = np.array([1.0 + 0j])
        for a in self.zeros:
            coefficients = npoly.polymul(coefficients, [1.0, -np.conj(a)])
        return UniPoly(coeffs=coefficients)

    def __call__(self, z: complex) -> complex:
        return self.numerator(z) / self.denominator(z)

    def at_matrix(self, a: np.ndarray) -> np.ndarray:
        """u(A) = num(A)·den(A)^{-1}."""
        size = a.shape[0]

        def horner(poly: UniPoly) -> np.ndarray:
            result = np.zeros((size, size), dtype=complex)
            for c in poly.coeffs[::-1]:
                result = result @ a + c * np.eye(size)
            return result

        return horner(self.numerator) @ np.linalg.inv(horner(self.denominator))

    def taylor(self, count: int) -> np.ndarray:
        """Erste ``count`` Taylorkoeffizienten (Potenzreihendivision)."""
        impulse = np.zeros(count, dtype=complex)
        impulse[0] = 1.0
        return lfilter(self.numerator.coeffs, self.denominator.coeffs, impulse)

    def boundary_deviation(self, samples: int = 64) -> float:
        """max ||u(e^{it})| − 1|."""
        return max(abs(abs(self(z)) - 1) for z in boundary_points(samples))


def blaschke_from_zeros(zeros: Sequence[complex]) -> BlaschkeProduct:
    return BlaschkeProduct(zeros=tuple(complex(a) for a in zeros))


def _ascent_index(a: np.ndarray, center: complex, multiplicity: int, tol: float) -> int:
    shifted = a - center * np.eye(a.shape[0])
    power = np.eye(a.shape[0], dtype=complex)
    for k in range(1, multiplicity + 1):
        power = power @ shifted
        if _nullity(power, tol) >= multiplicity:
            return k
    return multiplicity


def blaschke_annihilator(
    a: np.ndarray, cluster_radius: float = _TOL.cluster, tol: float = _TOL.annihilation, nullity_tol: float = 1e-8
) -> BlaschkeProduct:
    """Blaschke-Produkt mit u(A) = 0, Grad = Grad des Minimalpolynoms von A.

    Raises:
        ValueError: Wenn ein Eigenwert nicht in 𝔻 liegt
        NumericalCheckError: Wenn ‖u(A)‖ die Toleranz überschreitet
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    eigenvalues = np.linalg.eigvals(a)
    if np.any(np.abs(eigenvalues) >= 1):
        raise ValueError(f"matrix has eigenvalue of modulus {np.abs(eigenvalues).max():.6f} >= 1")
    zeros: list[complex] = []
    for center, count in cluster_roots(list(eigenvalues), cluster_radius):
        zeros += [center] * _ascent_index(a, center, count, nullity_tol)
    u = BlaschkeProduct(zeros=tuple(zeros))
    residual = float(np.linalg.norm(u.at_matrix(a), 2))
    if residual > tol:
        raise NumericalCheckError(f"Blaschke annihilator residual {residual:.3e}", residual=residual, threshold=tol)
    return u


# =============================================================================
# Restriktion und Rangstabilität
# =============================================================================


def _range_split(model: ShiftModel, u: BlaschkeProduct, degree: int, rank_tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalbasen von range u(S) ∩ P_degree und seinem Komplement in P_degree."""
    toeplitz_u = toeplitz(u.taylor(degree + 1), np.zeros(degree + 1))
    u_matrix = np.kron(toeplitz_u, np.eye(model.M))
    defect = np.eye(u_matrix.shape[0]) - u_matrix @ u_matrix.conj().T
    eigenvalues, eigenvectors = np.linalg.eigh((defect + defect.conj().T) / 2)
    inside = eigenvalues <= rank_tol
    return eigenvectors[:, inside], eigenvectors[:, ~inside]


@dataclass(frozen=True)
class RestrictedModel:
    """Einschränkung des Modells auf 𝓛 = u(S)H²_{ℂ^M} (trunkiert) samt endlichem Komplement."""

    parent: ShiftModel
    blaschke: BlaschkeProduct
    basis: np.ndarray
    inner_basis: np.ndarray
    complement: np.ndarray

    @property
    def codimension(self) -> int:
        return self.complement.shape[1]

    @property
    def expected_codimension(self) -> int:
        return self.blaschke.degree * self.parent.M

    @cached_property
    def compressed_shift(self) -> np.ndarray:
        """A = Kompression von S auf das Komplement."""
        return self.complement.conj().T @ self.parent.shift_matrix @ self.complement

    @cached_property
    def compressed_phi(self) -> np.ndarray:
        """B = Kompression von T auf das Komplement."""
        return self.complement.conj().T @ self.parent.phi_matrix @ self.complement

    @cached_property
    def shift_matrix(self) -> np.ndarray:
        return self.basis.conj().T @ self.parent.shift_matrix @ self.basis

    @cached_property
    def phi_matrix(self) -> np.ndarray:
        return self.basis.conj().T @ self.parent.phi_matrix @ self.basis

    def fiber(self, lam: complex, rank_tol: float = _TOL.rank) -> np.ndarray:
        """Orthonormalbasis von {f(λ) : f ∈ 𝓛_D} ⊂ ℂ^M."""
        M = self.parent.M
        powers = complex(lam) ** np.arange(self.parent.truncation_degree + 1)
        values = np.kron(powers[None, :], np.eye(M)) @ self.basis
        left, singular, _ = np.linalg.svd(values)
        count = int(np.sum(singular > rank_tol * max(float(singular.max(initial=0.0)), 1.0)))
        return left[:, :count]

    def joint_kernel_dim(self, lam: complex, mu: complex, rank_tol: float = _TOL.rank) -> int:
        """dim(ker(S|𝓛 − λ)* ∩ ker(T|𝓛 − μ)*) als Nullität von (Φ(λ) − μI)* auf der Faser bei λ.

        u(S) ist isometrisch und vertauscht mit T, daher ist der gemeinsame Kern
        u·s_λ·ker(Φ(λ) − μI)*, solange u(λ) ≠ 0; an Nullstellen von u liegt (λ, μ) in σ(A) × σ(B).
        """
        fiber = self.fiber(lam, rank_tol)
        if fiber.shape[1] == 0:
            return 0
        shifted = transfer(self.parent.colligation, lam) - mu * np.eye(self.parent.M)
        return _nullity(shifted.conj().T @ fiber, rank_tol)

    def annihilation_residual(self, p: BiPoly) -> float:
        """‖V*𝔭(S_D, T_D)V_inner‖ für die eingeschränkten Operatoren."""
        total = np.zeros((self.parent.dim, self.inner_basis.shape[1]), dtype=complex)
        t_power = np.array(self.inner_basis, dtype=complex)
        for j in range(p.bidegree[1] + 1):
            s_power = t_power
            for i in range(p.bidegree[0] + 1):
                total += p.coeffs[i, j] * s_power
                s_power = self.parent.shift_matrix @ s_power
            t_power = self.parent.phi_matrix @ t_power
        return float(np.linalg.norm(self.basis.conj().T @ total, 2)) if total.size else 0.0

    def excluded(self, lam: complex, mu: complex, radius: float = _TOL.regularity) -> bool:
        """(λ, μ) ∈ σ(A) × σ(B) des endlichen Komplements."""
        if self.codimension == 0:
            return False
        near_a = np.min(np.abs(np.linalg.eigvals(self.compressed_shift) - lam)) <= radius
        near_b = np.min(np.abs(np.linalg.eigvals(self.compressed_phi) - mu)) <= radius
        return bool(near_a and near_b)


def restrict_via_blaschke(model: ShiftModel, u: BlaschkeProduct, rank_tol: float = _TOL.rank) -> RestrictedModel:
    """Schränkt (S, T) auf den Bildraum von u(S) ein.

    Der Bildraum im trunkierten Raum ist der Kern der komprimierten Defektprojektion
    I − U_D U_D*; ihr Rang ist die Kodimension d·M.

    Raises:
        ValueError: Wenn D < d + 2
    """
    degree = model.truncation_degree
    if degree < u.degree + 2:
        raise ValueError(f"truncation degree {degree} too small for a Blaschke product of degree {u.degree}")
    basis, complement = _range_split(model, u, degree, rank_tol)
    inner, _ = _range_split(model, u, degree - 1, rank_tol)
    inner_embedded = np.vstack([inner, np.zeros((model.M, inner.shape[1]), dtype=complex)])
    restricted = RestrictedModel(
        parent=model, blaschke=u, basis=basis, inner_basis=inner_embedded, complement=complement
    )
    if restricted.codimension != restricted.expected_codimension:
        logger.warning(
            "restriction codimension %d differs from d*M = %d", restricted.codimension, restricted.expected_codimension
        )
    return restricted


@dataclass(frozen=True)
class StabilityReport:
    """Ergebnis der Rangstabilität unter Blaschke-Restriktion."""

    stable: bool
    alpha: tuple[int, ...]
    measured: tuple[tuple[int, VarietyPoint, int], ...]
    excluded: tuple[VarietyPoint, ...]
    codimension: int
    expected_codimension: int

    def __bool__(self) -> bool:
        return self.stable


def rank_stability_check(
    model: ShiftModel,
    fac: Factorization,
    u: BlaschkeProduct,
    rank: RankResult | None = None,
    samples_per_component: int = 20,
    seed: int = 0,
    rank_tol: float = _TOL.rank,
    exclusion_radius: float = _TOL.regularity,
) -> StabilityReport:
    """Prüft, dass das eingeschränkte Paar an denselben regulären Punkten den Rang α behält.

    Punkte mit (λ, μ) innerhalb von ``exclusion_radius`` um σ(A) × σ(B) werden ausgelassen.
    """
    if rank is None:
        rank = compute_rank(model, fac, samples_per_component, seed, rank_tol=rank_tol)
    restricted = restrict_via_blaschke(model, u, rank_tol)
    measured: list[tuple[int, VarietyPoint, int]] = []
    excluded: list[VarietyPoint] = []
    for index, samples in enumerate(rank.per_component_samples):
        for point, _ in samples:
            if restricted.excluded(point.z, point.w, exclusion_radius):
                excluded.append(point)
                continue
            measured.append((index, point, restricted.joint_kernel_dim(point.z, point.w, rank_tol)))
    stable = restricted.codimension == restricted.expected_codimension and all(
        dim == rank.alpha[index] for index, _, dim in measured
    )
    logger.info("rank stability under Blaschke degree %d: %s", u.degree, stable)
    return StabilityReport(
        stable=stable,
        alpha=rank.alpha,
        measured=tuple(measured),
        excluded=tuple(excluded),
        codimension=restricted.codimension,
        expected_codimension=restricted.expected_codimension,
    )
