"""Bivariate Polynome: Fasern, reguläre Punkte, Inner-Toral-Zertifizierung und Abtastung der Varietät."""

from __future__ import annotations

import logging
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from src.models import BiPoly, Factorization, InnerToralReport, Tolerances, UniPoly, VarietyPoint, Verdict, Witness

logger = logging.getLogger(__name__)

_TOL = Tolerances()

# Radien der inneren Abtastpunkte; der erste Punkt liegt bei λ = 0.5
_INTERIOR_RADII = (0.5, 0.25, 0.75, 0.1, 0.9, 0.95)
_EXTERIOR_RADII = (1.5, 3.0)
_GOLDEN_TURN = 2 * np.pi * (1 - (np.sqrt(5) - 1) / 2)

# Abstand, ab dem ein abgetastetes λ als ausnahmefrei gilt
_EXCEPTIONAL_CLEARANCE = 1e-3


# =============================================================================
# Auswertung und Fasern
# =============================================================================


def eval_poly(p: BiPoly, z: complex, w: complex) -> complex:
    """Wertet p(z, w) aus (Horner; exakt 0 für das Nullpolynom)."""
    return p(z, w)


def _trim_fiber(coeffs: np.ndarray, scale: float, rel_tol: float) -> UniPoly:
    coeffs = np.array(coeffs, dtype=complex)
    coeffs[np.abs(coeffs) <= rel_tol * scale] = 0
    return UniPoly(coeffs=coeffs)


def slice_at_z(p: BiPoly, lam: complex, rel_tol: float = 1e-13) -> UniPoly:
    """Faser 𝔭_λ(w) = 𝔭(λ, w) als Polynom in w.

    Koeffizienten unterhalb ``rel_tol`` * max|coeff| gelten als Null, daher kann der Grad fallen.
    """
    return _trim_fiber(p.w_coefficients(lam), max(p.max_abs_coeff, 1.0), rel_tol)


def slice_at_w(p: BiPoly, mu: complex, rel_tol: float = 1e-13) -> UniPoly:
    """Faser 𝔭^μ(z) = 𝔭(z, μ) als Polynom in z."""
    return slice_at_z(p.swap(), mu, rel_tol)


def roots(u: UniPoly) -> list[complex]:
    """Nullstellen über die Eigenwerte der (balancierten) Begleitmatrix.

    Raises:
        ValueError: Für das Nullpolynom
    """
    if u.is_zero:
        raise ValueError("the zero polynomial has no finite root set")
    if u.degree == 0:
        return []
    return [complex(r) for r in np.roots(u.coeffs[::-1])]


def cluster_roots(values: list[complex], radius: float = _TOL.cluster) -> list[tuple[complex, int]]:
    """Fasst Nullstellen innerhalb ``radius`` zu (Zentrum, Vielfachheit) zusammen."""
    clusters: list[list[complex]] = []
    for value in sorted(values, key=lambda c: (c.real, c.imag)):
        for cluster in clusters:
            if abs(value - np.mean(cluster)) <= radius:
                cluster.append(value)
                break
        else:
            clusters.append([value])
    return [(complex(np.mean(cluster)), len(cluster)) for cluster in clusters]


def gradient(p: BiPoly, z: complex, w: complex) -> tuple[complex, complex]:
    """Exakter Gradient (∂𝔭/∂z, ∂𝔭/∂w) am Punkt (z, w)."""
    return p.derivative_z()(z, w), p.derivative_w()(z, w)


def residual_bound(p: BiPoly, tol: float = _TOL.residual) -> float:
    """Absolute Schwelle für |𝔭(z, w)|, skaliert mit der Koeffizientengröße."""
    return tol * (1.0 + p.max_abs_coeff)


def is_regular_point(
    p: BiPoly,
    z: complex,
    w: complex,
    residual_tol: float = _TOL.residual,
    regularity_tol: float = _TOL.regularity,
) -> bool:
    """Prüft, ob (z, w) ein regulärer Punkt von 𝔭 ist (|∇𝔭| > Schwelle).

    Raises:
        ValueError: Wenn der Punkt nicht auf der Varietät liegt
    """
    value = abs(p(z, w))
    if value > residual_bound(p, residual_tol):
        raise ValueError(f"point ({z}, {w}) is not on the variety: |p| = {value:.3e}")
    dz, dw = gradient(p, z, w)
    return bool(np.hypot(abs(dz), abs(dw)) > regularity_tol)


# =============================================================================
# Resultanten
# =============================================================================


def sylvester_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Sylvester-Matrix zweier Koeffizientenvektoren (aufsteigend, formale Grade len-1)."""
    m, k = len(a) - 1, len(b) - 1
    size = m + k
    matrix = np.zeros((size, size), dtype=complex)
    a_desc, b_desc = np.asarray(a)[::-1], np.asarray(b)[::-1]
    for row in range(k):
        matrix[row, row : row + m + 1] = a_desc
    for row in range(m):
        matrix[k + row, row : row + k + 1] = b_desc
    return matrix


def resultant_w(p: BiPoly, q: BiPoly) -> UniPoly:
    """Res_w(p, q) als Polynom in z.

    Die Sylvester-Determinante wird auf Einheitswurzeln ausgewertet und per FFT
    interpoliert (Gradschranke deg_z p·deg_w q + deg_z q·deg_w p).
    """
    if p.is_zero or q.is_zero:
        return UniPoly(coeffs=np.zeros(0, dtype=complex))
    (np_, mp), (nq, mq) = p.bidegree, q.bidegree
    bound = np_ * mq + nq * mp
    count = bound + 1
    nodes = np.exp(2j * np.pi * np.arange(count) / count)
    values = np.array(
        [np.linalg.det(sylvester_matrix(p.w_coefficients(z), q.w_coefficients(z))) for z in nodes], dtype=complex
    )
    return UniPoly(coeffs=np.fft.fft(values) / count)


def exceptional_lambdas(
    p: BiPoly,
    square_free_tol: float = _TOL.square_free,
    cluster_radius: float = _TOL.cluster,
) -> list[complex]:
    """Ausnahmepunkte λ ∈ 𝔻, an denen 𝔭_λ eine mehrfache Nullstelle hat oder im Grad fällt.

    Nullstellen in 𝔻 von Res_w(𝔭, ∂𝔭/∂w) zusammen mit den Nullstellen des führenden w-Koeffizienten.

    Raises:
        ValueError: Wenn 𝔭 keinen positiven w-Grad hat oder die Resultante identisch verschwindet
    """
    if p.is_zero or p.bidegree[1] < 1:
        raise ValueError("exceptional_lambdas requires positive degree in w")
    normalized = p.scaled(1.0 / p.max_abs_coeff)
    res = resultant_w(normalized, normalized.derivative_w())
    scale = float(np.abs(res.coeffs).max()) if not res.is_zero else 0.0
    if scale <= square_free_tol:
        raise ValueError("resultant Res_w(p, dp/dw) vanishes identically; the polynomial is not square free")
    candidates = roots(_trim_fiber(res.coeffs, scale, 1e-10))
    leading = UniPoly(coeffs=normalized.coeffs[:, -1])
    candidates += roots(_trim_fiber(leading.coeffs, 1.0, 1e-13))
    inside = [lam for lam in candidates if abs(lam) < 1]
    centers = [center for center, _ in cluster_roots(inside, cluster_radius)]
    result = sorted(centers, key=lambda c: (round(abs(c), 12), np.angle(c)))
    logger.debug("exceptional lambdas for bidegree %s: %s", p.bidegree, result)
    return result


@dataclass(frozen=True)
class SquareFreeResult:
    """Entscheidung über Quadratfreiheit samt der verwendeten Resultantennormen."""

    square_free: bool
    residual_w: float | None
    residual_z: float | None
    threshold: float

    @property
    def residual(self) -> float:
        present = [r for r in (self.residual_w, self.residual_z) if r is not None]
        return min(present)

    def __bool__(self) -> bool:
        return self.square_free


def is_square_free(p: BiPoly, tol: float = _TOL.square_free) -> SquareFreeResult:
    """Entscheidet numerisch, ob kein Quadrat eines nichtkonstanten Faktors 𝔭 teilt.

    Res_w(𝔭, ∂𝔭/∂w) ≢ 0 erkennt mehrfache Faktoren mit positivem w-Grad; die
    symmetrische Resultante in z erkennt die übrigen.

    Raises:
        ValueError: Für konstante Polynome
    """
    if p.total_degree < 1:
        raise ValueError("is_square_free requires a nonconstant polynomial")
    normalized = p.scaled(1.0 / p.max_abs_coeff)

    def resultant_norm(poly: BiPoly) -> float | None:
        if poly.bidegree[1] < 1:
            return None
        res = resultant_w(poly, poly.derivative_w())
        return float(np.abs(res.coeffs).max()) if not res.is_zero else 0.0

    residual_w = resultant_norm(normalized)
    residual_z = resultant_norm(normalized.swap())
    present = [r for r in (residual_w, residual_z) if r is not None]
    return SquareFreeResult(
        square_free=all(r > tol for r in present),
        residual_w=residual_w,
        residual_z=residual_z,
        threshold=tol,
    )


# =============================================================================
# Inner-Toral-Zertifizierung
# =============================================================================


@dataclass
class _FiberScan:
    boundary_max_deviation: float = 0.0
    interior_max_modulus: float = 0.0
    exterior_min_modulus: float = np.inf
    witnesses: list[Witness] = field(default_factory=list)


def _interior_nodes(count: int) -> np.ndarray:
    k = np.arange(count)
    radii = np.array(_INTERIOR_RADII)[k % len(_INTERIOR_RADII)]
    return radii * np.exp(1j * _GOLDEN_TURN * k)


def _scan_fibers(poly: BiPoly, fiber: str, boundary: int, interior: int, exterior: bool, tol: float) -> _FiberScan:
    """Tastet die Fasern von ``poly`` in der ersten Variablen ab."""
    scan = _FiberScan()
    expected_degree = poly.bidegree[1]

    def witness(lam: complex, mu: complex | None, reason: str) -> Witness:
        z, w = (lam, mu) if fiber == "z" else (mu, lam)
        return Witness(z=z, w=w, reason=reason, fiber=fiber)

    def fiber_roots(lam: complex, allow_drop: bool) -> list[complex]:
        fib = slice_at_z(poly, lam)
        if fib.is_zero:
            scan.witnesses.append(witness(lam, None, "degenerate_fiber"))
            return []
        if fib.degree < expected_degree and not allow_drop:
            scan.witnesses.append(witness(lam, None, "degree_drop"))
        return roots(fib)

    for lam in np.exp(2j * np.pi * np.arange(boundary) / boundary):
        for mu in fiber_roots(complex(lam), allow_drop=False):
            deviation = abs(abs(mu) - 1)
            scan.boundary_max_deviation = max(scan.boundary_max_deviation, deviation)
            if deviation > tol:
                scan.witnesses.append(witness(complex(lam), mu, "boundary_deviation"))

    for lam in _interior_nodes(interior):
        for mu in fiber_roots(complex(lam), allow_drop=False):
            scan.interior_max_modulus = max(scan.interior_max_modulus, abs(mu))
            if abs(mu) >= 1 - tol:
                scan.witnesses.append(witness(complex(lam), mu, "interior_escape"))

    if exterior:
        k = np.arange(interior)
        radii = np.array(_EXTERIOR_RADII)[k % len(_EXTERIOR_RADII)]
        for lam in radii * np.exp(1j * _GOLDEN_TURN * k):
            for mu in fiber_roots(complex(lam), allow_drop=True):
                scan.exterior_min_modulus = min(scan.exterior_min_modulus, abs(mu))
                if abs(mu) <= 1 + tol:
                    scan.witnesses.append(witness(complex(lam), mu, "exterior_entry"))
    return scan


def check_inner_toral(
    p: BiPoly,
    boundary_samples: int = 64,
    interior_samples: int = 64,
    tol: float = _TOL.inner,
    exterior: bool = False,
) -> InnerToralReport:
    """Zertifiziert Z(𝔭) ⊂ 𝔻² ∪ 𝕋² ∪ 𝔼² durch Abtasten der Fasern in beiden Variablen.

    Args:
        p: Polynom mit positivem Grad in z und w
        boundary_samples: Anzahl λ ∈ 𝕋 je Variable
        interior_samples: Anzahl λ ∈ 𝔻 je Variable
        tol: Toleranz für ||μ| − 1| auf dem Rand und das Band 1 − tol im Inneren
        exterior: zusätzlich λ ∈ 𝔼 abtasten (alle Nullstellen müssen in 𝔼 liegen)

    Returns:
        InnerToralReport mit Urteil, Abweichungen und Zeugen

    Raises:
        ValueError: Wenn 𝔭 nicht von beiden Variablen abhängt
    """
    if p.is_zero or p.bidegree[0] < 1 or p.bidegree[1] < 1:
        raise ValueError(f"check_inner_toral requires positive degree in both variables, got bidegree {p.bidegree}")
    scans = [
        _scan_fibers(p, "z", boundary_samples, interior_samples, exterior, tol),
        _scan_fibers(p.swap(), "w", boundary_samples, interior_samples, exterior, tol),
    ]
    witnesses = [w for scan in scans for w in scan.witnesses]
    boundary = max(scan.boundary_max_deviation for scan in scans)
    interior = max(scan.interior_max_modulus for scan in scans)
    exterior_min = min(scan.exterior_min_modulus for scan in scans) if exterior else None
    if exterior_min is not None and not np.isfinite(exterior_min):
        exterior_min = None
    passed = (
        boundary <= tol
        and interior < 1 - tol
        and (exterior_min is None or exterior_min > 1 + tol)
        and not witnesses
    )
    logger.info(
        "inner-toral check bidegree %s: boundary %.2e, interior %.6f, %d witnesses",
        p.bidegree,
        boundary,
        interior,
        len(witnesses),
    )
    return InnerToralReport(
        verdict=Verdict.PASS if passed else Verdict.FAIL,
        boundary_max_deviation=boundary,
        interior_max_modulus=interior,
        exterior_min_modulus=exterior_min,
        witnesses=witnesses,
        tolerance=tol,
        boundary_samples=boundary_samples,
        interior_samples=interior_samples,
    )


# =============================================================================
# Abtastpunkte auf der Varietät
# =============================================================================


def component_index(factors: Factorization, z: complex, w: complex) -> int:
    """Index des Faktors mit kleinstem |𝔭ⱼ(z, w)|."""
    return int(np.argmin([abs(f(z, w)) for f in factors.factors]))


def _fiber_candidates(
    p: BiPoly, rng: np.random.Generator, excluded: list[complex], max_attempts: int, residual_tol: float
) -> Iterator[tuple[complex, complex]]:
    """Erzeugt Kandidaten (λ, μ) ∈ 𝔙(p) mit λ fern der Ausnahmepunkte."""
    bound = residual_bound(p, residual_tol)
    for _ in range(max_attempts):
        lam = complex(0.95 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random()))
        pick = rng.random()
        if any(abs(lam - e) < _EXCEPTIONAL_CLEARANCE for e in excluded):
            continue
        fib = slice_at_z(p, lam)
        if fib.is_zero or fib.degree < 1:
            continue
        fiber_roots = roots(fib)
        mu = fiber_roots[int(pick * len(fiber_roots))]
        if abs(mu) >= 1 or abs(p(lam, mu)) > bound:
            continue
        yield lam, mu


def sample_variety(
    p: BiPoly,
    count: int,
    seed: int = 0,
    factors: Factorization | None = None,
    residual_tol: float = _TOL.residual,
    regularity_tol: float = _TOL.regularity,
    cluster_radius: float = _TOL.cluster,
) -> list[VarietyPoint]:
    """Deterministische Abtastung von Punkten auf 𝔙(𝔭) = Z(𝔭) ∩ 𝔻².

    Punkte mit λ nahe einem Ausnahmepunkt werden ausgelassen.

    Raises:
        ValueError: Wenn nach 100·count Versuchen zu wenige Punkte gefunden wurden
    """
    rng = np.random.default_rng(seed)
    excluded = exceptional_lambdas(p, cluster_radius=cluster_radius)
    points: list[VarietyPoint] = []
    for lam, mu in _fiber_candidates(p, rng, excluded, 100 * count, residual_tol):
        points.append(
            VarietyPoint(
                z=lam,
                w=mu,
                regular=is_regular_point(p, lam, mu, residual_tol, regularity_tol),
                component_index=component_index(factors, lam, mu) if factors is not None else None,
            )
        )
        if len(points) == count:
            break
    if len(points) < count:
        raise ValueError(f"found only {len(points)} of {count} variety points (degenerate polynomial?)")
    logger.debug("sampled %d variety points with seed %d", count, seed)
    return points


def component_points(
    p: BiPoly,
    factors: Factorization,
    index: int,
    count: int,
    seed: int = 0,
    residual_tol: float = _TOL.residual,
    regularity_tol: float = _TOL.regularity,
    cluster_radius: float = _TOL.cluster,
) -> list[VarietyPoint]:
    """Reguläre Punkte der Komponente 𝔙(𝔭ⱼ), regulär für das volle 𝔭 und auf keinem anderen Faktor.

    Raises:
        ValueError: Wenn zu wenige Punkte gefunden wurden
    """
    rng = np.random.default_rng(seed)
    factor = factors.factors[index]
    others = [f for k, f in enumerate(factors.factors) if k != index]
    excluded = exceptional_lambdas(p, cluster_radius=cluster_radius)
    points: list[VarietyPoint] = []
    for lam, mu in _fiber_candidates(factor, rng, excluded, 100 * count, residual_tol):
        if any(abs(other(lam, mu)) <= regularity_tol for other in others):
            continue
        if not is_regular_point(p, lam, mu, residual_tol, regularity_tol):
            continue
        points.append(VarietyPoint(z=lam, w=mu, regular=True, component_index=index))
        if len(points) == count:
            break
    if len(points) < count:
        raise ValueError(f"found only {len(points)} of {count} regular points on component {index}")
    return points
