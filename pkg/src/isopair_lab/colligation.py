"""Transferfunktionen unitärer Kolligationen, Innerheit, Defektfaktoren und Realisierung aus Abtastwerten."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.linalg import orth, polar

from src.isopair_lab.errors import NumericalCheckError
from src.models import Colligation, Tolerances

logger = logging.getLogger(__name__)

_TOL = Tolerances()

TransferFunction = Callable[[complex], np.ndarray]

DEFAULT_BOUNDARY_SAMPLES = 24
DEFAULT_INTERIOR_RADII = (0.3, 0.6, 0.9)


def transfer(c: Colligation, z: complex) -> np.ndarray:
    """Φ(z) = A + zB(I − zD)^{-1}C; Φ(0) = A exakt.

    Raises:
        ValueError: Wenn I − zD singulär ist (nur für |z| > 1 möglich)
    """
    if c.N == 0 or z == 0:
        return np.array(c.A, dtype=complex)
    try:
        state = np.linalg.solve(np.eye(c.N) - z * c.D, c.C)
    except np.linalg.LinAlgError:
        raise ValueError(f"I - zD is singular at z = {z}")
    return c.A + z * (c.B @ state)


def transfer_fn(c: Colligation) -> TransferFunction:
    """Transferfunktion als aufrufbares Objekt."""
    return lambda z: transfer(c, z)


def state_map(c: Colligation, z: complex) -> np.ndarray:
    """F(z) = (I − zD)^{-1}C, eine N×M-Matrix."""
    if c.N == 0:
        return np.zeros((0, c.M), dtype=complex)
    return np.linalg.solve(np.eye(c.N) - z * c.D, c.C)


def taylor_coefficients(c: Colligation, count: int) -> list[np.ndarray]:
    """Taylorkoeffizienten Φ_0 = A, Φ_k = B D^{k-1} C."""
    coefficients = [np.array(c.A, dtype=complex)]
    if c.N == 0:
        return coefficients + [np.zeros((c.M, c.M), dtype=complex) for _ in range(count - 1)]
    tail = np.array(c.C, dtype=complex)
    for _ in range(1, count):
        coefficients.append(c.B @ tail)
        tail = c.D @ tail
    return coefficients


def truncation_error_bound(c: Colligation, z: complex, degree: int) -> float:
    """Schranke für den Fehler von T_K = P_K M_Φ|P_{K−1} in Richtung der Auswertung bei z.

    Die Spalte z^j trägt z^{K+1}·B D^{K−j}(I − zD)^{-1}C bei; die Schranke ist
    |z|^{K+1}·(Σ_{i=1}^{K} ‖B D^i (I − zD)^{-1}C‖²)^{1/2} mit K = ``degree``.
    """
    if c.N == 0 or z == 0 or degree < 1:
        return 0.0
    state = state_map(c, z)
    total = 0.0
    for _ in range(degree):
        state = c.D @ state
        total += float(np.linalg.norm(c.B @ state, 2)) ** 2
    return abs(complex(z)) ** (degree + 1) * float(np.sqrt(total))


def required_truncation(c: Colligation, z: complex, start: int, tol: float, limit: int = 512) -> int:
    """Kleinster Grad K ≥ start mit truncation_error_bound(c, z, K) ≤ ``tol``.

    Raises:
        NumericalCheckError: Wenn K über ``limit`` hinaus wachsen müsste
    """
    bound = truncation_error_bound(c, z, start)
    if bound <= tol:
        return start
    radius = abs(complex(z))
    state = np.linalg.matrix_power(np.asarray(c.D, dtype=complex), start) @ state_map(c, z)
    total = (bound / radius ** (start + 1)) ** 2
    for degree in range(start + 1, limit + 1):
        state = c.D @ state
        total += float(np.linalg.norm(c.B @ state, 2)) ** 2
        bound = radius ** (degree + 1) * float(np.sqrt(total))
        if bound <= tol:
            logger.debug("truncation raised from %d to %d at |z|=%.3f", start, degree, radius)
            return degree
    raise NumericalCheckError(
        f"truncation error at |z|={radius:.3f} stays above {tol:.1e} up to degree {limit}",
        residual=bound,
        threshold=tol,
    )


def _evaluator(phi: Colligation | TransferFunction) -> TransferFunction:
    return transfer_fn(phi) if isinstance(phi, Colligation) else phi


def boundary_points(count: int = DEFAULT_BOUNDARY_SAMPLES) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(count) / count)


def interior_points(count: int = 12, radii: Sequence[float] = DEFAULT_INTERIOR_RADII) -> np.ndarray:
    """Innere Stützstellen auf den Radien ``radii``, Winkel je Radius gegeneinander versetzt."""
    per_radius = -(-count // len(radii))
    points = [
        r * np.exp(2j * np.pi * (k + 0.5 * idx / len(radii)) / per_radius)
        for idx, r in enumerate(radii)
        for k in range(per_radius)
    ]
    return np.array(points[:count], dtype=complex)


def verify_inner(phi: Colligation | TransferFunction, boundary_samples: int = DEFAULT_BOUNDARY_SAMPLES) -> float:
    """Maximale Abweichung ‖Φ(e^{it})*Φ(e^{it}) − I‖ über die Randabtastpunkte."""
    evaluate = _evaluator(phi)
    deviation = 0.0
    for z in boundary_points(boundary_samples):
        value = np.atleast_2d(evaluate(z))
        deviation = max(deviation, float(np.linalg.norm(value.conj().T @ value - np.eye(value.shape[1]), 2)))
    return deviation


def cauchy_constant_term(phi: Colligation | TransferFunction, samples: int = 256) -> np.ndarray:
    """Rekonstruiert Φ(0) aus Randwerten mit der Trapezregel des Cauchy-Integrals."""
    evaluate = _evaluator(phi)
    values = [np.atleast_2d(evaluate(z)) for z in boundary_points(samples)]
    return np.mean(values, axis=0)


def random_unitary_colligation(m: int, n: int, seed: int = 0) -> Colligation:
    """Haar-verteilte unitäre Kolligation (QR einer komplexen Gauß-Matrix mit Phasenkorrektur)."""
    rng = np.random.default_rng(seed)
    size = m + n
    gaussian = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / np.sqrt(2)
    q, r = np.linalg.qr(gaussian)
    diagonal = np.diag(r)
    q = q * (diagonal / np.abs(diagonal))
    return Colligation.from_unitary(q, m)


def transfer_table(c: Colligation, points: Sequence[complex]) -> pd.DataFrame:
    """Tabelle der Transferwerte: Stützstelle und alle Einträge von Φ (Real- und Imaginärteil)."""
    rows = []
    for z in points:
        value = transfer(c, z)
        row = {"z_re": float(np.real(z)), "z_im": float(np.imag(z))}
        for r in range(c.M):
            for k in range(c.M):
                row[f"phi_{r}{k}_re"] = float(value[r, k].real)
                row[f"phi_{r}{k}_im"] = float(value[r, k].imag)
        rows.append(row)
    return pd.DataFrame(rows)


# =============================================================================
# Defektfaktor und Realisierung
# =============================================================================


@dataclass(frozen=True)
class DefectFactor:
    """Faktorisierung (I − Φ(μ)*Φ(λ))/(1 − μ̄λ) = F(μ)*F(λ) an Stützstellen.

    F_values[i] ist die N×M-Matrix F(sample_points[i]), bestimmt bis auf eine linke unitäre Eichung.
    """

    sample_points: tuple[complex, ...]
    F_values: tuple[np.ndarray, ...]
    M: int
    N: int
    gram_min_eigenvalue: float
    displayed_rank: int

    def residual(self, phi: Colligation | TransferFunction) -> float:
        """Maximale Abweichung der Faktorisierung über alle Stützstellenpaare."""
        evaluate = _evaluator(phi)
        values = [np.atleast_2d(evaluate(z)) for z in self.sample_points]
        worst = 0.0
        for i, mu in enumerate(self.sample_points):
            for j, lam in enumerate(self.sample_points):
                lhs = np.eye(self.M) - values[i].conj().T @ values[j]
                rhs = (1 - np.conj(mu) * lam) * (self.F_values[i].conj().T @ self.F_values[j])
                worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst


def _numerical_rank(eigenvalues: np.ndarray, tol: float) -> int:
    scale = max(1.0, float(np.max(eigenvalues, initial=0.0)))
    return int(np.sum(eigenvalues > tol * scale))


def _gram_blocks(values: list[np.ndarray], points: Sequence[complex], adjoint_left: bool) -> np.ndarray:
    m = values[0].shape[0]
    count = len(points)
    gram = np.zeros((count * m, count * m), dtype=complex)
    for i, mu in enumerate(points):
        for j, lam in enumerate(points):
            if adjoint_left:
                block = (np.eye(m) - values[i].conj().T @ values[j]) / (1 - np.conj(mu) * lam)
            else:
                block = (np.eye(m) - values[i] @ values[j].conj().T) / (1 - mu * np.conj(lam))
            gram[i * m : (i + 1) * m, j * m : (j + 1) * m] = block
    return (gram + gram.conj().T) / 2


def defect_factor(
    phi: Colligation | TransferFunction,
    sample_points: Sequence[complex],
    rank_tol: float = 1e-8,
    psd_tol: float = 1e-8,
) -> tuple[DefectFactor, int]:
    """Faktorisiert den Defekt-Gram an den Stützstellen und liest N als numerischen Rang ab.

    Args:
        phi: Kolligation oder Transferfunktion
        sample_points: paarweise verschiedene Punkte in 𝔻
        rank_tol: relative Eigenwertschwelle für den Rang
        psd_tol: zulässige negative Eigenwerte

    Returns:
        (DefectFactor, N)

    Raises:
        NumericalCheckError: Wenn der Gram einen Eigenwert unter −psd_tol hat (Φ nicht inner)
    """
    evaluate = _evaluator(phi)
    points = [complex(z) for z in sample_points]
    values = [np.atleast_2d(evaluate(z)) for z in points]
    m = values[0].shape[0]
    gram = _gram_blocks(values, points, adjoint_left=True)
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    minimum = float(eigenvalues[0])
    if minimum < -psd_tol:
        raise NumericalCheckError(
            f"defect Gram matrix has negative eigenvalue {minimum:.3e}; the function is not inner",
            residual=minimum,
            threshold=-psd_tol,
        )
    n = _numerical_rank(eigenvalues, rank_tol)
    top = eigenvectors[:, len(eigenvalues) - n :]
    factor = np.sqrt(np.clip(eigenvalues[len(eigenvalues) - n :], 0, None))[:, None] * top.conj().T
    f_values = tuple(factor[:, i * m : (i + 1) * m] for i in range(len(points)))

    displayed = np.linalg.eigvalsh(_gram_blocks(values, points, adjoint_left=False))
    displayed_rank = _numerical_rank(displayed, rank_tol)
    if displayed_rank != n:
        logger.warning("defect ranks differ between the two kernel forms: %d vs %d", n, displayed_rank)
    logger.debug("defect factor over %d points: N = %d, min eigenvalue %.2e", len(points), n, minimum)
    return (
        DefectFactor(
            sample_points=tuple(points),
            F_values=f_values,
            M=m,
            N=n,
            gram_min_eigenvalue=minimum,
            displayed_rank=displayed_rank,
        ),
        n,
    )


def _complement_basis(basis: np.ndarray, dim: int, tol: float = 1e-6) -> np.ndarray:
    """Orthonormalbasis des Komplements, per Gram-Schmidt der Einheitsvektoren in Indexreihenfolge."""
    vectors = [basis[:, k] for k in range(basis.shape[1])]
    complement: list[np.ndarray] = []
    for index in range(dim):
        if len(vectors) + len(complement) == dim:
            break
        candidate = np.zeros(dim, dtype=complex)
        candidate[index] = 1.0
        for v in vectors + complement:
            candidate = candidate - v * (v.conj() @ candidate)
        norm = np.linalg.norm(candidate)
        if norm > tol:
            complement.append(candidate / norm)
    return np.array(complement, dtype=complex).T.reshape(dim, len(complement))


def realize_from_samples(
    phi_values: Sequence[np.ndarray],
    factor: DefectFactor,
    isometry_tol: float = 1e-8,
) -> Colligation:
    """Löst die Isometrie (γ; μF(μ)γ) ↦ (Φ(μ)γ; F(μ)γ) und ergänzt sie zu einer unitären Kolligation.

    Args:
        phi_values: Φ an den Stützstellen von ``factor``
        factor: Defektfaktor
        isometry_tol: zulässige Abweichung der Gram-Matrizen beider Seiten

    Returns:
        Kolligation, deren Transferfunktion Φ reproduziert

    Raises:
        NumericalCheckError: Wenn die Abbildung keine Isometrie ist (inkonsistentes F)
    """
    m, n = factor.M, factor.N
    points = factor.sample_points
    source = np.hstack(
        [np.vstack([np.eye(m), mu * f]) for mu, f in zip(points, factor.F_values, strict=True)]
    ).astype(complex)
    target = np.hstack(
        [np.vstack([np.atleast_2d(value), f]) for value, f in zip(phi_values, factor.F_values, strict=True)]
    ).astype(complex)

    defect = float(np.abs(source.conj().T @ source - target.conj().T @ target).max())
    if defect > isometry_tol:
        raise NumericalCheckError(
            f"lurking map is not isometric: Gram mismatch {defect:.3e}", residual=defect, threshold=isometry_tol
        )

    size = m + n
    solution, *_ = np.linalg.lstsq(source.T, target.T, rcond=None)
    u = solution.T
    domain = orth(source, rcond=1e-9)
    if domain.shape[1] < size:
        # Ergänzung: Komplement des Definitionsbereichs auf Komplement des Bildes
        image = orth(target, rcond=1e-9)
        if image.shape[1] != domain.shape[1]:
            raise NumericalCheckError(
                f"rank mismatch between domain ({domain.shape[1]}) and image ({image.shape[1]})",
            )
        u = u @ (domain @ domain.conj().T)
        u = u + _complement_basis(image, size) @ _complement_basis(domain, size).conj().T
        logger.debug("extended isometry from rank %d to %d", domain.shape[1], size)
    unitary, _ = polar(u)
    return Colligation.from_unitary(unitary, m)


def realize(
    phi: Colligation | TransferFunction,
    sample_points: Sequence[complex] | None = None,
) -> tuple[Colligation, DefectFactor]:
    """Bequemlichkeitsfunktion: Defektfaktor an Stützstellen und anschließende Realisierung."""
    points = list(interior_points() if sample_points is None else sample_points)
    evaluate = _evaluator(phi)
    factor, _ = defect_factor(evaluate, points)
    values = [np.atleast_2d(evaluate(z)) for z in points]
    return realize_from_samples(values, factor), factor


def held_out_error(first: Colligation, second: Colligation | TransferFunction, points: Sequence[complex]) -> float:
    """Maximaler Transferfehler an Prüfpunkten."""
    evaluate = _evaluator(second)
    return max(float(np.linalg.norm(transfer(first, z) - np.atleast_2d(evaluate(z)), 2)) for z in points)
