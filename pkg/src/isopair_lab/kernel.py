"""Zulässige Tripel (Q, P, 𝔭): Konstruktion aus der Kolligation, Kernidentität und Gram-Prüfungen."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from src.isopair_lab.colligation import transfer
from src.isopair_lab.errors import NumericalCheckError
from src.isopair_lab.poly2 import roots, sample_variety, slice_at_z
from src.models import BiPoly, Colligation, MatrixBiPoly, Tolerances, VarietyPoint

logger = logging.getLogger(__name__)

_TOL = Tolerances()

KernelFunction = Callable[[VarietyPoint, VarietyPoint], np.ndarray]


@dataclass(frozen=True)
class AdmissibleTriple:
    """Q (α×M), P (α×N) und 𝔭 mit Zeugenpunkt vollen Rangs."""

    Q: MatrixBiPoly
    P: MatrixBiPoly
    alpha: int
    p: BiPoly
    witness: VarietyPoint

    def kernel(self, x: VarietyPoint, y: VarietyPoint) -> np.ndarray:
        return kernel_eval(self, x, y)

    def scaled(self, factor: BiPoly) -> AdmissibleTriple:
        """Eichtransformation Q ↦ EQ, P ↦ EP mit skalarem Polynom E."""
        return AdmissibleTriple(self.Q.scaled(factor), self.P.scaled(factor), self.alpha, self.p, self.witness)


def adjugate(matrix: np.ndarray) -> np.ndarray:
    """Adjunkte über Kofaktoren (auch für 0×0 und 1×1)."""
    size = matrix.shape[0]
    if size == 0:
        return np.zeros((0, 0), dtype=complex)
    if size == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty((size, size), dtype=complex)
    for i in range(size):
        for j in range(size):
            minor = np.delete(np.delete(matrix, i, axis=0), j, axis=1)
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _interpolate_grid(values: np.ndarray, rel_tol: float = 1e-12) -> np.ndarray:
    """Koeffizienten aus Werten auf dem Einheitswurzelgitter (Achsen 0/1 = z/w).

    Liefert die Form (rows, cols, nz, nw); Koeffizienten unter rel_tol·max werden genullt.
    """
    nz, nw = values.shape[:2]
    coeffs = np.fft.fft2(values, axes=(0, 1)) / (nz * nw)
    scale = float(np.abs(coeffs).max(initial=0.0))
    coeffs[np.abs(coeffs) <= rel_tol * scale] = 0
    return np.moveaxis(coeffs, (0, 1), (2, 3))


def _unit_grid(count: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def kernel_residual_at(Q: MatrixBiPoly, c: Colligation, points: Sequence[VarietyPoint]) -> float:
    """max ‖Q(z,w)(Φ(z) − wI)‖ über Varietätspunkte."""
    identity = np.eye(c.M)
    return max(
        (float(np.linalg.norm(Q(pt.z, pt.w) @ (transfer(c, pt.z) - pt.w * identity), 2)) for pt in points),
        default=0.0,
    )


def construct_Q(
    c: Colligation,
    p_component: BiPoly,
    base: VarietyPoint,
    alpha: int,
    seed: int = 0,
    check_samples: int = 50,
    tol: float = _TOL.kernel,
    rank_tol: float = _TOL.rank,
) -> MatrixBiPoly:
    """Polynomiales Q mit Q(z,w)(Φ(z) − wI) = 0 auf der Komponente und Rang α am Basispunkt.

    Nach SVD am Basispunkt ist Σ = U'*(dΦ − dwI)V' = [[E, G], [H, L]] mit invertierbarem L;
    die Zeilen d·[det L · I_α, −G adj L]·U'* annullieren Σ bis auf Vielfache von det Σ.
    Interpolation auf einem Gitter von Einheitswurzeln mit Gradschranke aus N, M, α.

    Raises:
        ValueError: Wenn der Basispunkt nicht die Nullität α hat
        NumericalCheckError: Wenn das Residuum auf der Varietät die Toleranz überschreitet
    """
    M = c.M
    phi_base = transfer(c, base.z) - base.w * np.eye(M)
    left, singular, right_h = np.linalg.svd(phi_base)
    nullity = int(np.sum(singular < rank_tol * max(float(singular[0]), 1.0)))
    if nullity != alpha:
        raise ValueError(f"base point has kernel dimension {nullity}, expected alpha={alpha}")
    rest = M - alpha
    left_adj = np.hstack([left[:, rest:], left[:, :rest]]).conj().T
    right = np.hstack([right_h.conj().T[:, rest:], right_h.conj().T[:, :rest]])

    nz = c.N * rest + c.N + 1
    nw = rest + 1
    values = np.zeros((nz, nw, alpha, M), dtype=complex)
    for k, z in enumerate(_unit_grid(nz)):
        d = np.linalg.det(np.eye(c.N) - z * c.D) if c.N else 1.0
        d_phi = d * transfer(c, z)
        for col, w in enumerate(_unit_grid(nw)):
            sigma = left_adj @ (d_phi - d * w * np.eye(M)) @ right
            g_block = sigma[:alpha, alpha:]
            l_block = sigma[alpha:, alpha:]
            det_l = np.linalg.det(l_block) if rest else 1.0
            row = np.hstack([det_l * np.eye(alpha), -g_block @ adjugate(l_block)])
            values[k, col] = d * row @ left_adj

    grids = _interpolate_grid(values)
    flat = grids.ravel()
    grids = grids / flat[int(np.argmax(np.abs(flat)))]
    Q = MatrixBiPoly.from_grids(grids, witness=base)

    check_points = sample_variety(p_component, check_samples, seed)
    residual = kernel_residual_at(Q, c, check_points)
    logger.debug("construct_Q residual %.3e over %d points", residual, len(check_points))
    if residual > tol:
        raise NumericalCheckError(f"Q(Φ − w) residual {residual:.3e} exceeds {tol:.1e}", residual, tol)
    if np.linalg.matrix_rank(Q(base.z, base.w), tol=rank_tol) != alpha:
        raise NumericalCheckError("Q does not have full rank alpha at the witness point")
    return Q


def construct_P(
    Q: MatrixBiPoly,
    c: Colligation,
    p: BiPoly | None = None,
    check_samples: int = 50,
    seed: int = 0,
    tol: float = _TOL.kernel,
) -> MatrixBiPoly:
    """P = Q·B·(I − zD)^{-1} als Polynom vom z-Grad ≤ deg_z Q + N − 1.

    Raises:
        ValueError: Wenn N = 0
        NumericalCheckError: Wenn (Q zP)U = (wQ P) auf der Varietät verletzt ist
    """
    if c.N == 0:
        raise ValueError("construct_P requires a colligation with N >= 1")
    deg_z, deg_w = Q.max_bidegree
    nz = max(deg_z, 0) + c.N
    nw = max(deg_w, 0) + 1
    values = np.zeros((nz, nw, Q.shape[0], c.N), dtype=complex)
    for k, z in enumerate(_unit_grid(nz)):
        resolvent = c.B @ np.linalg.inv(np.eye(c.N) - z * c.D)
        for col, w in enumerate(_unit_grid(nw)):
            values[k, col] = Q(z, w) @ resolvent
    P = MatrixBiPoly.from_grids(_interpolate_grid(values), witness=Q.witness)

    points = sample_variety(p, check_samples, seed) if p is not None else ([Q.witness] if Q.witness else [])
    residual = intertwining_residual(Q, P, c, points)
    if residual > tol:
        raise NumericalCheckError(f"intertwining residual {residual:.3e} exceeds {tol:.1e}", residual, tol)
    return P


def intertwining_residual(Q: MatrixBiPoly, P: MatrixBiPoly, c: Colligation, points: Sequence[VarietyPoint]) -> float:
    """max ‖(Q  zP)U − (wQ  P)‖ über die Punkte."""
    worst = 0.0
    for pt in points:
        q, p = Q(pt.z, pt.w), P(pt.z, pt.w)
        lhs = np.hstack([q, pt.z * p]) @ c.U
        rhs = np.hstack([pt.w * q, p])
        worst = max(worst, float(np.linalg.norm(lhs - rhs, 2)))
    return worst


def build_triple(
    c: Colligation,
    p: BiPoly,
    alpha: int,
    seed: int = 0,
    candidates: int = 12,
    rank_tol: float = _TOL.rank,
    tol: float = _TOL.kernel,
) -> AdmissibleTriple:
    """Wählt den ersten regulären Abtastpunkt mit maximaler Lücke σ_{M−α} und konstruiert (Q, P).

    Raises:
        NumericalCheckError: Wenn kein Punkt der Nullität α gefunden wurde
    """
    best: VarietyPoint | None = None
    best_gap = -1.0
    for point in sample_variety(p, candidates, seed):
        if not point.regular:
            continue
        singular = np.linalg.svd(transfer(c, point.z) - point.w * np.eye(c.M), compute_uv=False)
        threshold = rank_tol * max(float(singular[0]), 1.0)
        if int(np.sum(singular < threshold)) != alpha:
            continue
        gap = float(singular[c.M - alpha - 1]) if alpha < c.M else np.inf
        if gap > best_gap:
            best, best_gap = point, gap
    if best is None:
        raise NumericalCheckError(f"no regular sample point with kernel dimension {alpha}")
    logger.info("kernel base point z=%s w=%s", best.z, best.w)
    Q = construct_Q(c, p, best, alpha, seed, tol=tol, rank_tol=rank_tol)
    P = construct_P(Q, c, p, seed=seed, tol=tol)
    return AdmissibleTriple(Q=Q, P=P, alpha=alpha, p=p, witness=best)


# =============================================================================
# Kernidentität
# =============================================================================


def kernel_eval(t: AdmissibleTriple, x: VarietyPoint, y: VarietyPoint, guard: float = 1e-12) -> np.ndarray:
    """K(x, y) = Q(x)Q(y)*/(1 − z ζ̄).

    Raises:
        ValueError: Wenn 1 − z ζ̄ numerisch verschwindet
    """
    denominator = 1 - x.z * np.conj(y.z)
    if abs(denominator) < guard:
        raise ValueError("kernel denominator 1 - z conj(zeta) vanishes")
    return t.Q(x.z, x.w) @ t.Q(y.z, y.w).conj().T / denominator


@dataclass(frozen=True)
class AdmissibleCheck:
    """Residuum der Kernidentität und Ränge am Zeugenpunkt."""

    max_residual: float
    q_rank: int
    p_rank: int
    k_rank: int
    alpha: int

    @property
    def full_rank(self) -> bool:
        return self.q_rank == self.p_rank == self.k_rank == self.alpha

    def passed(self, tol: float = _TOL.kernel) -> bool:
        return self.full_rank and self.max_residual <= tol


def verify_admissible(
    t: AdmissibleTriple, pair_samples: int = 50, seed: int = 0, rank_tol: float = _TOL.rank
) -> AdmissibleCheck:
    """Prüft QQ*/(1 − zζ̄) = PP*/(1 − wη̄) an Punktpaaren und den vollen Rang am Zeugen."""
    points = sample_variety(t.p, 2 * pair_samples, seed)
    worst = 0.0
    for x, y in zip(points[::2], points[1::2], strict=True):
        q_side = t.Q(x.z, x.w) @ t.Q(y.z, y.w).conj().T / (1 - x.z * np.conj(y.z))
        p_side = t.P(x.z, x.w) @ t.P(y.z, y.w).conj().T / (1 - x.w * np.conj(y.w))
        worst = max(worst, float(np.linalg.norm(q_side - p_side, 2)))
    w = t.witness
    result = AdmissibleCheck(
        max_residual=worst,
        q_rank=int(np.linalg.matrix_rank(t.Q(w.z, w.w), tol=rank_tol)),
        p_rank=int(np.linalg.matrix_rank(t.P(w.z, w.w), tol=rank_tol)),
        k_rank=int(np.linalg.matrix_rank(kernel_eval(t, w, w), tol=rank_tol)),
        alpha=t.alpha,
    )
    logger.info("kernel identity residual %.3e, ranks Q=%d P=%d K=%d", worst, result.q_rank, result.p_rank, result.k_rank)
    return result


def kernel_positivity_check(t: AdmissibleTriple, points: Sequence[VarietyPoint]) -> tuple[float, float]:
    """Kleinste Eigenwerte der Gram-Matrizen [K(x_k, x_j)] und [(1 − z_k z̄_j)K(x_k, x_j)] = [Q(x_k)Q(x_j)*]."""
    n, a = len(points), t.alpha
    gram = np.zeros((n * a, n * a), dtype=complex)
    weighted = np.zeros_like(gram)
    for k, x in enumerate(points):
        for j, y in enumerate(points):
            block = kernel_eval(t, x, y)
            gram[k * a : (k + 1) * a, j * a : (j + 1) * a] = block
            weighted[k * a : (k + 1) * a, j * a : (j + 1) * a] = (1 - x.z * np.conj(y.z)) * block
    smallest = [float(np.linalg.eigvalsh((m + m.conj().T) / 2).min()) for m in (gram, weighted)]
    return smallest[0], smallest[1]


# =============================================================================
# Gram-Prüfungen gegen H²
# =============================================================================


def _series_terms(points: Sequence[VarietyPoint], cutoff: float = 1e-18, limit: int = 4000) -> int:
    radius = max(abs(pt.z) for pt in points)
    if radius == 0:
        return 1
    return int(min(limit, np.ceil(np.log(cutoff) / (2 * np.log(radius))) + 1))


def gram_unitarity_check(
    t: AdmissibleTriple,
    samples: int = 8,
    seed: int = 0,
    kernel: KernelFunction | None = None,
) -> float:
    """Vergleicht die H²-Gram-Matrix der Vektoren s_ζ Q(ζ,η)*γ mit der Kern-Gram-Matrix.

    Die H²-Seite wird als abgeschnittene Potenzreihe explizit summiert. ``kernel``
    ersetzt die Kernauswertung (Regressionstest mit vertauschten Argumenten).
    """
    evaluate = kernel or (lambda x, y: kernel_eval(t, x, y))
    points = sample_variety(t.p, samples, seed)
    terms = _series_terms(points)
    a, M = t.alpha, t.Q.shape[1]
    powers = np.arange(terms)
    columns = []
    for pt in points:
        series = np.conj(pt.z) ** powers
        q_adj = t.Q(pt.z, pt.w).conj().T
        columns.append(np.kron(series[:, None], q_adj))
    coefficients = np.hstack(columns)
    h2_gram = coefficients.conj().T @ coefficients

    kernel_gram = np.zeros((len(points) * a, len(points) * a), dtype=complex)
    for i, x in enumerate(points):
        for j, y in enumerate(points):
            kernel_gram[i * a : (i + 1) * a, j * a : (j + 1) * a] = evaluate(x, y)
    deviation = float(np.abs(h2_gram - kernel_gram).max())
    logger.debug("gram unitarity deviation %.3e over %d points (%d series terms, M=%d)", deviation, len(points), terms, M)
    return deviation


@dataclass(frozen=True)
class BasisCheck:
    """Bilder g_{a,j} = z^a Q e_j der Standardbasis von H²: Gram-Abgleich mit K und lineare Unabhängigkeit."""

    gram_deviation: float
    rank: int
    expected_rank: int

    @property
    def independent(self) -> bool:
        return self.rank == self.expected_rank

    def passed(self, tol: float = _TOL.kernel) -> bool:
        return self.independent and self.gram_deviation <= tol


def basis_orthonormality_check(
    t: AdmissibleTriple,
    c: Colligation,
    a_max: int = 3,
    samples: int | None = None,
    seed: int = 0,
    gram_points: int = 8,
    rank_tol: float = _TOL.rank,
) -> BasisCheck:
    """Prüft, dass f ↦ Qf die Basis z^a e_j von H²_{ℂ^M} orthonormal nach H(K) abbildet.

    Für eine Orthonormalbasis gilt Σ_{a≤a_max, j} g_{a,j}(x)g_{a,j}(y)* = (1 − (zζ̄)^{a_max+1})K(x, y).
    Die Gram-Matrix der abgetasteten Basiswerte wird mit der Kern-Gram-Matrix in der P-Form
    K = P(x)P(y)*/(1 − wη̄) verglichen (relativ zu max|K|); zusätzlich muss das Auswertungssystem
    der g_{a,j} vollen Spaltenrang haben.
    """
    M = c.M
    unknowns = (a_max + 1) * M
    count = samples or (4 * unknowns // t.alpha + 8)
    points = sample_variety(t.p, max(count, gram_points), seed)
    a = t.alpha
    powers = np.arange(a_max + 1)

    def basis_values(pt: VarietyPoint) -> np.ndarray:
        return np.hstack([pt.z**k * t.Q(pt.z, pt.w) for k in powers])

    system = np.vstack([basis_values(pt) for pt in points])
    singular = np.linalg.svd(system, compute_uv=False)
    rank = int(np.sum(singular > rank_tol * max(float(singular.max(initial=0.0)), 1.0)))

    subset = points[:gram_points]
    stacked = np.vstack([basis_values(pt) for pt in subset])
    kernel_gram = np.zeros((len(subset) * a, len(subset) * a), dtype=complex)
    for i, x in enumerate(subset):
        for j, y in enumerate(subset):
            head = 1 - (x.z * np.conj(y.z)) ** (a_max + 1)
            p_kernel = t.P(x.z, x.w) @ t.P(y.z, y.w).conj().T / (1 - x.w * np.conj(y.w))
            kernel_gram[i * a : (i + 1) * a, j * a : (j + 1) * a] = head * p_kernel
    scale = max(1.0, float(np.abs(kernel_gram).max()))
    deviation = float(np.abs(stacked @ stacked.conj().T - kernel_gram).max()) / scale
    logger.debug("basis gram deviation %.3e, evaluation rank %d of %d", deviation, rank, unknowns)
    return BasisCheck(gram_deviation=deviation, rank=rank, expected_rank=unknowns)


def r_matrix_rank(t: AdmissibleTriple, lam: complex, rank_tol: float = _TOL.rank) -> int:
    """Rang von R(λ) = [Q(λ, μ₁)* … Q(λ, μ_m)*] über die Faserpunkte."""
    blocks = [t.Q(lam, mu).conj().T for mu in roots(slice_at_z(t.p, lam))]
    if not blocks:
        return 0
    return int(np.linalg.matrix_rank(np.hstack(blocks), tol=rank_tol))
