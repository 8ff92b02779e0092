"""Exakte Idealarithmetik in ℚ(i)[z, w] und zyklischer Defekt.

Gröbner-Basen nach Buchberger mit Kofaktoren, Quotientendimension, Normalformen mit
Zertifikat, Teilbarkeit und die numerische Kodimensionsfolge zyklischer Unterräume.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

import numpy as np

from src.isopair_lab.errors import NumericalCheckError
from src.isopair_lab.isopair import ShiftModel
from src.models import BiPoly, ExactPolyModel, ExactTerm, Marker, MatrixBiPoly, TermOrder, Tolerances, VarietyPoint

logger = logging.getLogger(__name__)

_TOL = Tolerances()

Monomial = tuple[int, int]


# =============================================================================
# Koeffizientenkörper ℚ(i)
# =============================================================================


@dataclass(frozen=True)
class GaussianRational:
    """Exakte Zahl re + i·im mit rationalen Teilen."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, re: str, im: str = "0") -> GaussianRational:
        return cls(Fraction(re), Fraction(im))

    @classmethod
    def from_complex(cls, value: complex, max_denominator: int = 10**12) -> GaussianRational:
        value = complex(value)
        return cls(
            Fraction(value.real).limit_denominator(max_denominator),
            Fraction(value.imag).limit_denominator(max_denominator),
        )

    @staticmethod
    def coerce(value: GaussianRational | Fraction | int) -> GaussianRational:
        return value if isinstance(value, GaussianRational) else GaussianRational(Fraction(value))

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero

    def __add__(self, other: GaussianRational | Fraction | int) -> GaussianRational:
        other = self.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: GaussianRational | Fraction | int) -> GaussianRational:
        return self + (-self.coerce(other))

    def __mul__(self, other: GaussianRational | Fraction | int) -> GaussianRational:
        other = self.coerce(other)
        return GaussianRational(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other: GaussianRational | Fraction | int) -> GaussianRational:
        other = self.coerce(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by exact zero")
        return self * GaussianRational(other.re / norm, -other.im / norm)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


_ONE = GaussianRational(Fraction(1))


def monomial_key(order: TermOrder, mono: Monomial) -> tuple[int, int]:
    """Sortierschlüssel: lex mit z > w bzw. degrevlex mit z > w."""
    i, j = mono
    if order == TermOrder.LEX_ZW:
        return (i, j)
    return (i + j, i)


def _divides(a: Monomial, b: Monomial) -> bool:
    return a[0] <= b[0] and a[1] <= b[1]


# =============================================================================
# Exakte Polynome
# =============================================================================


@dataclass(frozen=True, eq=False)
class ExactBiPoly:
    """Dünnbesetztes Polynom in ℚ(i)[z, w] mit fester Monomordnung."""

    terms: Mapping[Monomial, GaussianRational]
    order: TermOrder = TermOrder.LEX_ZW

    def __post_init__(self):
        cleaned = {mono: coeff for mono, coeff in self.terms.items() if not coeff.is_zero}
        object.__setattr__(self, "terms", MappingProxyType(cleaned))

    @classmethod
    def zero(cls, order: TermOrder = TermOrder.LEX_ZW) -> ExactBiPoly:
        return cls({}, order)

    @classmethod
    def monomial(
        cls, mono: Monomial, coeff: GaussianRational = _ONE, order: TermOrder = TermOrder.LEX_ZW
    ) -> ExactBiPoly:
        return cls({mono: coeff}, order)

    @classmethod
    def from_model(cls, model: ExactPolyModel) -> ExactBiPoly:
        terms: dict[Monomial, GaussianRational] = {}
        for term in model.terms:
            key = (term.i, term.j)
            terms[key] = terms.get(key, GaussianRational()) + GaussianRational.parse(term.re, term.im)
        return cls(terms, model.order)

    def to_model(self) -> ExactPolyModel:
        return ExactPolyModel(
            terms=[ExactTerm(i=i, j=j, re=str(c.re), im=str(c.im)) for (i, j), c in sorted(self.terms.items())],
            order=self.order,
        )

    @classmethod
    def from_bipoly(
        cls, p: BiPoly, order: TermOrder = TermOrder.LEX_ZW, max_denominator: int = 10**12
    ) -> ExactBiPoly:
        """Rationalisiert die Gleitkommakoeffizienten (Nenner ≤ max_denominator)."""
        terms = {
            (int(i), int(j)): GaussianRational.from_complex(p.coeffs[i, j], max_denominator)
            for i, j in zip(*np.nonzero(p.coeffs), strict=True)
        }
        return cls(terms, order)

    def to_bipoly(self) -> BiPoly:
        return BiPoly.from_terms({mono: complex(c) for mono, c in self.terms.items()})

    def with_order(self, order: TermOrder) -> ExactBiPoly:
        return self if order == self.order else ExactBiPoly(self.terms, order)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading_monomial(self) -> Monomial:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading monomial")
        return max(self.terms, key=lambda mono: monomial_key(self.order, mono))

    @property
    def leading_coefficient(self) -> GaussianRational:
        return self.terms[self.leading_monomial]

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    @property
    def bidegree(self) -> tuple[int, int]:
        if self.is_zero:
            return (-1, -1)
        return (max(i for i, _ in self.terms), max(j for _, j in self.terms))

    def __add__(self, other: ExactBiPoly) -> ExactBiPoly:
        terms = dict(self.terms)
        for mono, coeff in other.terms.items():
            terms[mono] = terms.get(mono, GaussianRational()) + coeff
        return ExactBiPoly(terms, self.order)

    def __neg__(self) -> ExactBiPoly:
        return ExactBiPoly({mono: -c for mono, c in self.terms.items()}, self.order)

    def __sub__(self, other: ExactBiPoly) -> ExactBiPoly:
        return self + (-other)

    def mul_term(self, mono: Monomial, coeff: GaussianRational) -> ExactBiPoly:
        return ExactBiPoly(
            {(i + mono[0], j + mono[1]): c * coeff for (i, j), c in self.terms.items()},
            self.order,
        )

    def __mul__(self, other: ExactBiPoly | GaussianRational | int) -> ExactBiPoly:
        if not isinstance(other, ExactBiPoly):
            return self.mul_term((0, 0), GaussianRational.coerce(other))
        result = ExactBiPoly.zero(self.order)
        for mono, coeff in other.terms.items():
            result = result + self.mul_term(mono, coeff)
        return result

    def monic(self) -> ExactBiPoly:
        return self.mul_term((0, 0), _ONE / self.leading_coefficient)

    def at_z(self, z0: GaussianRational) -> list[GaussianRational]:
        """Koeffizienten in w (aufsteigend) nach Einsetzen z = z0."""
        coeffs = [GaussianRational() for _ in range(self.bidegree[1] + 1)]
        for (i, j), c in self.terms.items():
            power = _ONE
            for _ in range(i):
                power = power * z0
            coeffs[j] = coeffs[j] + c * power
        return coeffs

    def __call__(self, z: complex, w: complex) -> complex:
        return sum((complex(c) * z**i * w**j for (i, j), c in self.terms.items()), 0j)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExactBiPoly):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        ordered = sorted(self.terms, key=lambda mono: monomial_key(self.order, mono), reverse=True)
        return " + ".join(f"{self.terms[m]}*z^{m[0]}*w^{m[1]}" for m in ordered)


def _divide(f: ExactBiPoly, divisors: Sequence[ExactBiPoly]) -> tuple[list[ExactBiPoly], ExactBiPoly]:
    """Multivariate Division: f = Σ h_i g_i + r, kein Term von r durch ein LM(g_i) teilbar."""
    order = f.order
    quotients = [ExactBiPoly.zero(order) for _ in divisors]
    remainder: dict[Monomial, GaussianRational] = {}
    current = f
    leads = [(g.leading_monomial, g.leading_coefficient) for g in divisors]
    while not current.is_zero:
        lm, lc = current.leading_monomial, current.leading_coefficient
        for index, (g_lm, g_lc) in enumerate(leads):
            if _divides(g_lm, lm):
                shift = (lm[0] - g_lm[0], lm[1] - g_lm[1])
                factor = lc / g_lc
                quotients[index] = quotients[index] + ExactBiPoly.monomial(shift, factor, order)
                current = current - divisors[index].mul_term(shift, factor)
                break
        else:
            remainder[lm] = lc
            current = current - ExactBiPoly.monomial(lm, lc, order)
    return quotients, ExactBiPoly(remainder, order)


# =============================================================================
# Gröbner-Basen
# =============================================================================


@dataclass(frozen=True)
class _Tracked:
    """Polynom g mit Kofaktoren g = s·p + t·q."""

    poly: ExactBiPoly
    s: ExactBiPoly
    t: ExactBiPoly

    def mul_term(self, mono: Monomial, coeff: GaussianRational) -> _Tracked:
        return _Tracked(self.poly.mul_term(mono, coeff), self.s.mul_term(mono, coeff), self.t.mul_term(mono, coeff))

    def __sub__(self, other: _Tracked) -> _Tracked:
        return _Tracked(self.poly - other.poly, self.s - other.s, self.t - other.t)

    def monic(self) -> _Tracked:
        return self.mul_term((0, 0), _ONE / self.poly.leading_coefficient)


def _reduce(f: _Tracked, basis: Sequence[_Tracked]) -> _Tracked:
    quotients, remainder = _divide(f.poly, [g.poly for g in basis])
    s, t = f.s, f.t
    for h, g in zip(quotients, basis, strict=True):
        if not h.is_zero:
            s = s - h * g.s
            t = t - h * g.t
    return _Tracked(remainder, s, t)


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return (max(a[0], b[0]), max(a[1], b[1]))


def _s_polynomial(f: _Tracked, g: _Tracked) -> _Tracked:
    f_lm, g_lm = f.poly.leading_monomial, g.poly.leading_monomial
    lcm = _lcm(f_lm, g_lm)
    left = f.mul_term((lcm[0] - f_lm[0], lcm[1] - f_lm[1]), _ONE / f.poly.leading_coefficient)
    right = g.mul_term((lcm[0] - g_lm[0], lcm[1] - g_lm[1]), _ONE / g.poly.leading_coefficient)
    return left - right


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduzierte Gröbner-Basis von ⟨p, q⟩ mit Kofaktoren gᵢ = sᵢp + tᵢq."""

    generators: tuple[ExactBiPoly, ...]
    cofactors: tuple[tuple[ExactBiPoly, ExactBiPoly], ...]
    order: TermOrder
    p: ExactBiPoly
    q: ExactBiPoly

    @property
    def leading_monomials(self) -> tuple[Monomial, ...]:
        return tuple(g.leading_monomial for g in self.generators)

    @property
    def normal_set(self) -> tuple[Monomial, ...] | None:
        """Standardmonome, falls reine Potenzen beider Variablen führend auftreten; sonst None."""
        leads = self.leading_monomials
        a = min((i for i, j in leads if j == 0), default=None)
        b = min((j for i, j in leads if i == 0), default=None)
        if a is None or b is None:
            return None
        return tuple(
            (i, j) for i in range(a) for j in range(b) if not any(_divides(lead, (i, j)) for lead in leads)
        )

    @property
    def is_zero_dimensional(self) -> bool:
        return self.normal_set is not None

    def certificate_residual(self, index: int) -> ExactBiPoly:
        s, t = self.cofactors[index]
        return self.generators[index] - s * self.p - t * self.q


def groebner_basis(p: ExactBiPoly, q: ExactBiPoly, order: TermOrder | None = None) -> GroebnerBasis:
    """Buchberger mit Normalauswahl und Kriterium teilerfremder Leitmonome.

    Raises:
        ValueError: Wenn p oder q das Nullpolynom ist
    """
    order = order or p.order
    p, q = p.with_order(order), q.with_order(order)
    if p.is_zero or q.is_zero:
        raise ValueError("ideal generators must be nonzero")
    zero, one = ExactBiPoly.zero(order), ExactBiPoly.monomial((0, 0), _ONE, order)
    basis = [_Tracked(p, one, zero), _Tracked(q, zero, one)]
    pairs = [(0, 1)]

    def pair_key(pair: tuple[int, int]) -> tuple:
        lcm = _lcm(basis[pair[0]].poly.leading_monomial, basis[pair[1]].poly.leading_monomial)
        return (monomial_key(order, lcm), pair)

    while pairs:
        pairs.sort(key=pair_key)
        i, j = pairs.pop(0)
        lm_i, lm_j = basis[i].poly.leading_monomial, basis[j].poly.leading_monomial
        if min(lm_i[0], lm_j[0]) == 0 and min(lm_i[1], lm_j[1]) == 0:
            continue
        reduced = _reduce(_s_polynomial(basis[i], basis[j]), basis)
        if reduced.poly.is_zero:
            continue
        basis.append(reduced)
        pairs += [(k, len(basis) - 1) for k in range(len(basis) - 1)]
    logger.debug("buchberger finished with %d elements before reduction", len(basis))

    minimal: list[_Tracked] = []
    for index, element in enumerate(basis):
        lead = element.poly.leading_monomial
        redundant = any(
            _divides(other.poly.leading_monomial, lead) and (other.poly.leading_monomial != lead or k < index)
            for k, other in enumerate(basis)
            if k != index
        )
        if not redundant:
            minimal.append(element)
    reduced_basis = [
        _reduce(element, [other for k, other in enumerate(minimal) if k != index]).monic()
        for index, element in enumerate(minimal)
    ]
    reduced_basis.sort(key=lambda g: monomial_key(order, g.poly.leading_monomial), reverse=True)
    return GroebnerBasis(
        generators=tuple(g.poly for g in reduced_basis),
        cofactors=tuple((g.s, g.t) for g in reduced_basis),
        order=order,
        p=p,
        q=q,
    )


def quotient_dim(p: ExactBiPoly, q: ExactBiPoly, order: TermOrder | None = None) -> int | Marker:
    """dim ℚ(i)[z, w]/⟨p, q⟩ oder Marker.INFINITE."""
    normal = groebner_basis(p, q, order).normal_set
    return Marker.INFINITE if normal is None else len(normal)


@dataclass(frozen=True)
class NormalForm:
    """ψ = s·p + t·q + r mit r in Normalform bezüglich der Gröbner-Basis."""

    remainder: ExactBiPoly
    s: ExactBiPoly
    t: ExactBiPoly


def normal_form(psi: ExactBiPoly, gb: GroebnerBasis) -> NormalForm:
    """Normalform mit exaktem Zertifikat.

    Raises:
        NumericalCheckError: Wenn ψ − sp − tq − r nicht exakt verschwindet
    """
    psi = psi.with_order(gb.order)
    quotients, remainder = _divide(psi, gb.generators)
    s, t = ExactBiPoly.zero(gb.order), ExactBiPoly.zero(gb.order)
    for h, (gs, gt) in zip(quotients, gb.cofactors, strict=True):
        s = s + h * gs
        t = t + h * gt
    if not (psi - s * gb.p - t * gb.q - remainder).is_zero:
        raise NumericalCheckError("normal form certificate does not cancel exactly")
    return NormalForm(remainder=remainder, s=s, t=t)


# =============================================================================
# Resultante, Teilerfremdheit, Teilbarkeit
# =============================================================================


def _exact_det(matrix: list[list[GaussianRational]]) -> GaussianRational:
    """Determinante durch Gauß-Elimination über ℚ(i)."""
    rows = [list(row) for row in matrix]
    size = len(rows)
    det = _ONE
    for col in range(size):
        pivot = next((r for r in range(col, size) if not rows[r][col].is_zero), None)
        if pivot is None:
            return GaussianRational()
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det = det * rows[col][col]
        for r in range(col + 1, size):
            if rows[r][col].is_zero:
                continue
            factor = rows[r][col] / rows[col][col]
            rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col], strict=True)]
    return det


def _exact_sylvester(a: list[GaussianRational], b: list[GaussianRational]) -> list[list[GaussianRational]]:
    """Sylvester-Matrix zweier aufsteigender Koeffizientenlisten."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    matrix = [[GaussianRational() for _ in range(size)] for _ in range(size)]
    for row in range(n):
        for k, c in enumerate(reversed(a)):
            matrix[row][row + k] = c
    for row in range(m):
        for k, c in enumerate(reversed(b)):
            matrix[n + row][row + k] = c
    return matrix


def resultant_w_exact(p: ExactBiPoly, q: ExactBiPoly) -> list[GaussianRational]:
    """Werte von Res_w(p, q) an z = 0, 1, …, deg-Schranke (exakt).

    Ein Punkt mit Gradabfall in w wird übersprungen.
    """
    bound = p.bidegree[0] * q.bidegree[1] + q.bidegree[0] * p.bidegree[1]
    m, n = p.bidegree[1], q.bidegree[1]
    values = []
    z0 = 0
    while len(values) < bound + 1:
        point = GaussianRational(Fraction(z0))
        a, b = p.at_z(point), q.at_z(point)
        z0 += 1
        if a[m].is_zero or b[n].is_zero:
            continue
        values.append(_exact_det(_exact_sylvester(a, b)))
    return values


def relatively_prime(p: ExactBiPoly, q: ExactBiPoly, order: TermOrder | None = None) -> bool:
    """p, q teilerfremd ⇔ ⟨p, q⟩ nulldimensional.

    Raises:
        NumericalCheckError: Wenn Resultante und Gröbner-Basis widersprechen
    """
    finite = quotient_dim(p, q, order) != Marker.INFINITE
    if finite and p.bidegree[1] > 0 and q.bidegree[1] > 0:
        if all(value.is_zero for value in resultant_w_exact(p, q)):
            raise NumericalCheckError("finite quotient but identically vanishing resultant")
    return finite


def divide_exact(p: ExactBiPoly, f: ExactBiPoly) -> ExactBiPoly | Marker:
    """Exakter Quotient p/f oder Marker.NOT_DIVISIBLE."""
    if f.is_zero:
        raise ValueError("division by the zero polynomial")
    quotients, remainder = _divide(p.with_order(f.order), [f])
    return quotients[0] if remainder.is_zero else Marker.NOT_DIVISIBLE


def factor_multiplicities(
    q: ExactBiPoly, factors: Sequence[ExactBiPoly]
) -> tuple[tuple[int, ...], ExactBiPoly]:
    """Exponenten γⱼ mit q = Π fⱼ^γⱼ · rest, rest durch kein fⱼ teilbar."""
    current = q
    exponents = []
    for factor in factors:
        if factor.total_degree < 1:
            raise ValueError("factor multiplicities require non-constant factors")
        count = 0
        while True:
            quotient = divide_exact(current, factor)
            if quotient == Marker.NOT_DIVISIBLE:
                break
            current = quotient
            count += 1
        exponents.append(count)
    return tuple(exponents), current


# =============================================================================
# Zyklischer Defekt
# =============================================================================


@dataclass(frozen=True)
class Generator:
    """Vektor g = Σ r_k(S, T)c_k mit Polynomen r_k und konstanten Vektoren c_k."""

    terms: tuple[tuple[BiPoly, np.ndarray], ...]

    @classmethod
    def constant(cls, vector: Iterable[complex]) -> Generator:
        return cls(((BiPoly.constant(1.0), np.asarray(list(vector), dtype=complex)),))

    @property
    def degree(self) -> int:
        return max((r.total_degree for r, _ in self.terms), default=0)

    def vector(self, model: ShiftModel) -> np.ndarray:
        result = np.zeros(model.dim, dtype=complex)
        for r, c in self.terms:
            result += model.apply_polynomial(r, model.embed(c[None, :]))
        return result

    def padded(self, before: int, after: int) -> Generator:
        return Generator(tuple((r, np.concatenate([np.zeros(before), c, np.zeros(after)])) for r, c in self.terms))


@dataclass(frozen=True)
class CyclicDefectResult:
    """Kodimensionsfolge des von S^aT^b g_j aufgespannten Raums je Trunkierungsgrad."""

    degrees: tuple[int, ...]
    codimensions: tuple[int, ...]
    generator_count: int
    generator_degree: int
    ideal_codimension: int | Marker | None = None

    @property
    def stabilized(self) -> bool:
        return len(self.codimensions) >= 2 and self.codimensions[-1] == self.codimensions[-2]

    @property
    def stabilized_value(self) -> int | None:
        return self.codimensions[-1] if self.stabilized else None


def cyclic_defect_from_generators(
    model: ShiftModel,
    generators: Sequence[Generator],
    degrees: Sequence[int],
    generator_degree: int | None = None,
    rank_tol: float = _TOL.rank,
) -> CyclicDefectResult:
    """Kodimension von span{S^aT^b g_j : a + b ≤ D − deg} im Block der Grade < D − deg.

    Für jedes D wird das Modell auf Grad D trunkiert.

    Raises:
        ValueError: Wenn D − deg < 1
    """
    degree = max((g.degree for g in generators), default=0) if generator_degree is None else generator_degree
    codims = []
    for D in degrees:
        reach = D - degree
        if reach < 1:
            raise ValueError(f"truncation degree {D} insufficient for generator degree {degree}")
        work = model.with_truncation(D)
        block = reach * work.M
        vectors = []
        for g in generators:
            t_power = g.vector(work)
            for b in range(reach + 1):
                s_power = t_power
                for _ in range(reach - b + 1):
                    vectors.append(s_power[:block])
                    s_power = work.shift_matrix @ s_power
                t_power = work.phi_matrix @ t_power
        span = np.column_stack(vectors) if vectors else np.zeros((block, 0))
        singular = np.linalg.svd(span, compute_uv=False)
        rank = int(np.sum(singular > rank_tol * max(float(singular.max(initial=0.0)), 1.0)))
        codims.append(block - rank)
        logger.debug("cyclic defect D=%d: block %d, rank %d", D, block, rank)
    return CyclicDefectResult(
        degrees=tuple(degrees),
        codimensions=tuple(codims),
        generator_count=len(generators),
        generator_degree=degree,
    )


def direct_sum_generators(parts: Sequence[Sequence[Generator]], dims: Sequence[int]) -> list[Generator]:
    """Generatoren der direkten Summe: j-ter Generator = ⊕ j-te Generatoren der Summanden (fehlende = 0)."""
    total = sum(dims)
    count = max((len(part) for part in parts), default=0)
    result = []
    for j in range(count):
        terms: list[tuple[BiPoly, np.ndarray]] = []
        offset = 0
        for part, dim in zip(parts, dims, strict=True):
            if j < len(part):
                terms += part[j].padded(offset, total - offset - dim).terms
            offset += dim
        result.append(Generator(tuple(terms)))
    return result


def _bipoly_det(entries: list[list[BiPoly]]) -> BiPoly:
    size = len(entries)
    if size == 0:
        return BiPoly.constant(1.0)
    if size == 1:
        return entries[0][0]
    total = BiPoly.zero()
    for col in range(size):
        minor = [row[:col] + row[col + 1 :] for row in entries[1:]]
        term = entries[0][col] * _bipoly_det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def _bipoly_adjugate(entries: list[list[BiPoly]]) -> list[list[BiPoly]]:
    size = len(entries)
    if size == 1:
        return [[BiPoly.constant(1.0)]]
    adj = [[BiPoly.zero() for _ in range(size)] for _ in range(size)]
    for i in range(size):
        for j in range(size):
            minor = [row[:j] + row[j + 1 :] for k, row in enumerate(entries) if k != i]
            cofactor = _bipoly_det(minor)
            adj[j][i] = cofactor if (i + j) % 2 == 0 else -cofactor
    return adj


def cyclic_generators(Q_values: np.ndarray, Q0: list[list[BiPoly]]) -> tuple[list[Generator], BiPoly]:
    """g_j = Σ_k adj(Q₀)_{kj}(S, T)·c_k mit c_k = k-te Spalte von Q(y)*, dazu q̃ = det Q₀."""
    q_tilde = _bipoly_det(Q0)
    adj = _bipoly_adjugate(Q0)
    columns = Q_values.conj().T
    alpha = len(Q0)
    generators = [
        Generator(tuple((adj[k][j], columns[:, k]) for k in range(alpha) if not adj[k][j].is_zero))
        for j in range(alpha)
    ]
    return generators, q_tilde


def cyclic_defect(
    model: ShiftModel,
    Q: MatrixBiPoly,
    base: VarietyPoint,
    degrees: Sequence[int],
    p: BiPoly | None = None,
    generator_count: int | None = None,
    rank_tol: float = _TOL.rank,
    rationalize: float = _TOL.rationalize,
    trim_tol: float = 1e-9,
) -> CyclicDefectResult:
    """Zyklischer Defekt aus dem Kern-Tripel am Basispunkt y.

    Q₀(z, w) = Q(z, w)Q(y)*, q̃ = det Q₀; die Generatoren stammen aus adj(Q₀).
    Mit ``p`` wird zusätzlich dim ℚ(i)[z,w]/⟨𝔭, q̃⟩ berechnet.

    Args:
        model: Shift-Modell der Kolligation
        Q: Polynommatrix Q (α×M)
        base: Basispunkt y auf der Varietät
        degrees: aufsteigende Trunkierungsgrade
        p: Komponentenpolynom für die Idealkodimension
        generator_count: nur die ersten k Generatoren verwenden
        rank_tol: relative Singulärwertschwelle der Kodimensionen
        rationalize: Genauigkeit der Rationalisierung von q̃ und 𝔭 (Nenner ≤ 1/rationalize)
        trim_tol: relative Schwelle, unter der Koeffizienten von q̃ verworfen werden

    Returns:
        CyclicDefectResult mit Kodimensionsfolge
    """
    q_values = Q(base.z, base.w)
    alpha, M = q_values.shape
    Q0 = [
        [
            sum(
                (Q.entries[r][m] * complex(np.conj(q_values[s, m])) for m in range(M)),
                BiPoly.zero(),
            ).trimmed()
            for s in range(alpha)
        ]
        for r in range(alpha)
    ]
    generators, q_tilde = cyclic_generators(q_values, Q0)
    if generator_count is not None:
        generators = generators[:generator_count]
    q_tilde = q_tilde.trimmed()
    if q_tilde.is_zero:
        raise NumericalCheckError("det Q0 vanishes identically; the base point is not a full-rank witness")
    result = cyclic_defect_from_generators(model, generators, degrees, max(q_tilde.total_degree, 0), rank_tol)
    if p is None:
        return result
    scale = q_tilde.coeffs.flat[int(np.argmax(np.abs(q_tilde.coeffs)))]
    max_denominator = max(1, round(1 / rationalize))
    exact_q = ExactBiPoly.from_bipoly(q_tilde.scaled(1 / scale).trimmed(trim_tol), max_denominator=max_denominator)
    leading_p = p.coeffs.flat[int(np.argmax(np.abs(p.coeffs)))]
    exact_p = ExactBiPoly.from_bipoly(p.scaled(1 / leading_p), max_denominator=max_denominator)
    codim = quotient_dim(exact_p, exact_q)
    logger.info("ideal codimension dim C[z,w]/<p, det Q0> = %s", codim)
    return CyclicDefectResult(
        degrees=result.degrees,
        codimensions=result.codimensions,
        generator_count=result.generator_count,
        generator_degree=result.generator_degree,
        ideal_codimension=codim,
    )
