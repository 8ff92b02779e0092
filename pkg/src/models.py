from __future__ import annotations

from collections.abc import Callable
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, ClassVar

import numpy as np
from numpy.polynomial import polynomial as npoly
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, ValidationInfo, model_validator
from scipy.signal import convolve2d

from src.utils import thread_cap

# =============================================================================
# Enumerations
# =============================================================================


class Verdict(str, Enum):
    """Ergebnis einer mathematischen Prüfung."""

    PASS = "pass"
    FAIL = "fail"


class StageStatus(str, Enum):
    """Status einer Pipeline-Stufe im Gesamtbericht."""

    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class TermOrder(str, Enum):
    """Monomordnungen der exakten Idealrechnung."""

    LEX_ZW = "lex_zw"
    DEGREVLEX = "degrevlex"


class Marker(str, Enum):
    """Marker für nicht-numerische Ergebnisse der Idealrechnung."""

    INFINITE = "infinite"
    NOT_DIVISIBLE = "not_divisible"


class Command(str, Enum):
    """Befehle der Kommandozeile."""

    CHECK_INNER_TORAL = "check-inner-toral"
    REALIZE = "realize"
    RANK = "rank"
    KERNEL = "kernel"
    IDEAL = "ideal"
    DEFECT = "defect"
    REPORT = "report"


# =============================================================================
# Komplexe Zahlen und Arrays (JSON-Kodierung [re, im])
# =============================================================================


def _to_complex(value: Any) -> complex:
    """Liest eine komplexe Zahl aus [re, im] oder einer reellen/komplexen Zahl."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex number must be encoded as [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex, np.number)):
        return complex(value)
    raise ValueError(f"cannot interpret {value!r} as a complex number")


def _encode_complex(value: complex) -> list[float]:
    return [float(value.real), float(value.imag)]


def _complex_array_validator(ndim: int) -> Callable[[Any], np.ndarray]:
    """Erzeugt einen Validator für komplexe Arrays der Dimension ``ndim``.

    Akzeptiert numpy-Arrays, verschachtelte Listen reeller Zahlen und verschachtelte
    Listen von [re, im]-Paaren (eine zusätzliche letzte Achse der Länge 2).
    """

    def validate(value: Any) -> np.ndarray:
        try:
            raw = np.array(value)
        except (TypeError, ValueError) as e:
            raise ValueError(f"cannot interpret value as a complex array: {e}")
        if raw.size == 0:
            arr = np.zeros((0,) * ndim, dtype=complex) if raw.ndim != ndim else raw.astype(complex)
        elif raw.dtype.kind == "c" and raw.ndim == ndim:
            arr = raw.astype(complex)
        elif raw.dtype.kind not in "biuf":
            raise ValueError(f"cannot interpret array of dtype '{raw.dtype}' as complex numbers")
        elif raw.ndim == ndim + 1 and raw.shape[-1] == 2:
            arr = raw[..., 0].astype(float) + 1j * raw[..., 1].astype(float)
        elif raw.ndim == ndim:
            arr = raw.astype(complex)
        else:
            raise ValueError(f"expected a {ndim}-dimensional array (optionally of [re, im] pairs), got shape {raw.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("array contains non-finite entries")
        arr.setflags(write=False)
        return arr

    return validate


def _encode_complex_array(arr: np.ndarray) -> list:
    if arr.size == 0:
        return np.zeros(arr.shape).tolist()
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


ComplexNumber = Annotated[complex, PlainValidator(_to_complex), PlainSerializer(_encode_complex)]
ComplexVector = Annotated[np.ndarray, PlainValidator(_complex_array_validator(1)), PlainSerializer(_encode_complex_array)]
ComplexMatrix = Annotated[np.ndarray, PlainValidator(_complex_array_validator(2)), PlainSerializer(_encode_complex_array)]


def _trim_grid(coeffs: np.ndarray) -> np.ndarray:
    """Entfernt nachlaufende Null-Zeilen und -Spalten; Nullpolynom -> leeres Gitter."""
    rows, cols = np.nonzero(coeffs)
    if rows.size == 0:
        trimmed = np.zeros((0, 0), dtype=complex)
    else:
        trimmed = np.array(coeffs[: rows.max() + 1, : cols.max() + 1], dtype=complex)
    trimmed.setflags(write=False)
    return trimmed


def _trim_vector(coeffs: np.ndarray) -> np.ndarray:
    nonzero = np.nonzero(coeffs)[0]
    trimmed = np.zeros(0, dtype=complex) if nonzero.size == 0 else np.array(coeffs[: nonzero.max() + 1], dtype=complex)
    trimmed.setflags(write=False)
    return trimmed


# =============================================================================
# Polynome
# =============================================================================


class BiPoly(BaseModel):
    """
    Dichtes bivariates Polynom mit komplexen Koeffizienten.

    Eintrag (i, j) von ``coeffs`` ist der Koeffizient von z^i w^j. Die Speicherung ist
    normalisiert: letzte Zeile und letzte Spalte enthalten je einen Eintrag ungleich Null.
    Das Nullpolynom wird durch ein leeres Gitter mit Bigrad (-1, -1) dargestellt.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    bidegree: tuple[int, int] = Field(description="(Grad in z, Grad in w); (-1, -1) für das Nullpolynom")
    coeffs: ComplexMatrix = Field(description="Koeffizientengitter, Zeile = z-Potenz, Spalte = w-Potenz")

    @model_validator(mode="before")
    @classmethod
    def normalize_storage(cls, data: Any) -> Any:
        """Normalisiert das Koeffizientengitter und prüft einen angegebenen Bigrad."""
        if not isinstance(data, dict):
            return data
        grid = _complex_array_validator(2)(data.get("coeffs", []))
        declared = data.get("bidegree")
        if declared is not None and grid.size > 0:
            shape_degree = (grid.shape[0] - 1, grid.shape[1] - 1)
            if tuple(declared) != shape_degree:
                raise ValueError(f"declared bidegree {tuple(declared)} does not match coefficient grid {shape_degree}")
        trimmed = _trim_grid(grid)
        return {"bidegree": (trimmed.shape[0] - 1, trimmed.shape[1] - 1), "coeffs": trimmed}

    @model_validator(mode="after")
    def validate_normalized(self):
        """Validiere die normalisierte Speicherung."""
        if self.coeffs.size == 0:
            if self.bidegree != (-1, -1):
                raise ValueError("zero polynomial must have bidegree (-1, -1)")
            return self
        if self.bidegree != (self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1):
            raise ValueError("bidegree must equal coefficient grid dimensions minus one")
        if not np.any(self.coeffs[-1, :]) or not np.any(self.coeffs[:, -1]):
            raise ValueError("last row and last column of coeffs must contain a nonzero entry")
        return self

    # -- Konstruktoren ---------------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Any) -> BiPoly:
        return cls(coeffs=np.asarray(coeffs, dtype=complex))

    @classmethod
    def zero(cls) -> BiPoly:
        return cls(coeffs=np.zeros((0, 0), dtype=complex))

    @classmethod
    def constant(cls, value: complex) -> BiPoly:
        return cls(coeffs=np.array([[value]], dtype=complex))

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, int], complex]) -> BiPoly:
        """Baut ein Polynom aus {(i, j): Koeffizient}."""
        if not terms:
            return cls.zero()
        n = max(i for i, _ in terms)
        m = max(j for _, j in terms)
        grid = np.zeros((n + 1, m + 1), dtype=complex)
        for (i, j), value in terms.items():
            grid[i, j] += value
        return cls(coeffs=grid)

    # -- Eigenschaften ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        rows, cols = np.nonzero(self.coeffs)
        return int((rows + cols).max())

    @property
    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max()) if not self.is_zero else 0.0

    # -- Auswertung ------------------------------------------------------------

    def __call__(self, z: complex, w: complex) -> complex:
        """Horner-Auswertung p(z, w)."""
        if self.is_zero:
            return 0j
        return complex(npoly.polyval2d(z, w, self.coeffs))

    def w_coefficients(self, z: complex) -> np.ndarray:
        """Koeffizienten von p(z, ·) als Polynom in w (aufsteigend)."""
        if self.is_zero:
            return np.zeros(0, dtype=complex)
        return np.asarray(npoly.polyval(z, self.coeffs), dtype=complex)

    # -- Arithmetik ------------------------------------------------------------

    def derivative_z(self) -> BiPoly:
        if self.is_zero:
            return self
        return BiPoly(coeffs=npoly.polyder(self.coeffs, axis=0))

    def derivative_w(self) -> BiPoly:
        if self.is_zero:
            return self
        return BiPoly(coeffs=npoly.polyder(self.coeffs, axis=1))

    def swap(self) -> BiPoly:
        """Vertauscht die Rollen von z und w."""
        return BiPoly(coeffs=self.coeffs.T)

    def scaled(self, factor: complex) -> BiPoly:
        return BiPoly(coeffs=self.coeffs * factor)

    def _padded(self, shape: tuple[int, int]) -> np.ndarray:
        grid = np.zeros(shape, dtype=complex)
        grid[: self.coeffs.shape[0], : self.coeffs.shape[1]] = self.coeffs
        return grid

    def __add__(self, other: BiPoly | complex) -> BiPoly:
        if not isinstance(other, BiPoly):
            other = BiPoly.constant(other)
        shape = (
            max(self.coeffs.shape[0], other.coeffs.shape[0]),
            max(self.coeffs.shape[1], other.coeffs.shape[1]),
        )
        return BiPoly(coeffs=self._padded(shape) + other._padded(shape))

    __radd__ = __add__

    def __neg__(self) -> BiPoly:
        return self.scaled(-1)

    def __sub__(self, other: BiPoly | complex) -> BiPoly:
        if not isinstance(other, BiPoly):
            other = BiPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other: complex) -> BiPoly:
        return BiPoly.constant(other) - self

    def __mul__(self, other: BiPoly | complex) -> BiPoly:
        if not isinstance(other, BiPoly):
            return self.scaled(other)
        if self.is_zero or other.is_zero:
            return BiPoly.zero()
        return BiPoly(coeffs=convolve2d(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> BiPoly:
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = BiPoly.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash((self.bidegree, self.coeffs.tobytes()))

    def is_close(self, other: BiPoly, tol: float = 1e-8) -> bool:
        """Koeffizientenweiser Vergleich relativ zur größeren Koeffizientenskala."""
        diff = self - other
        scale = max(1.0, self.max_abs_coeff, other.max_abs_coeff)
        return diff.max_abs_coeff <= tol * scale

    def trimmed(self, rel_tol: float = 1e-12) -> BiPoly:
        """Setzt Koeffizienten unterhalb ``rel_tol`` * max|coeff| auf Null."""
        if self.is_zero:
            return self
        grid = np.array(self.coeffs)
        grid[np.abs(grid) <= rel_tol * self.max_abs_coeff] = 0
        return BiPoly(coeffs=grid)


class UniPoly(BaseModel):
    """Univariates komplexes Polynom, Koeffizienten aufsteigend nach Potenz."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: ComplexVector

    @model_validator(mode="before")
    @classmethod
    def normalize_storage(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        return {"coeffs": _trim_vector(_complex_array_validator(1)(data.get("coeffs", [])))}

    @classmethod
    def from_coeffs(cls, coeffs: Any) -> UniPoly:
        return cls(coeffs=np.asarray(coeffs, dtype=complex))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def __call__(self, x: complex) -> complex:
        if self.is_zero:
            return 0j
        return complex(npoly.polyval(x, self.coeffs))

    def monic(self) -> UniPoly:
        if self.is_zero:
            raise ValueError("zero polynomial has no monic normalization")
        return UniPoly(coeffs=self.coeffs / self.coeffs[-1])

    def __mul__(self, other: UniPoly) -> UniPoly:
        if self.is_zero or other.is_zero:
            return UniPoly(coeffs=np.zeros(0, dtype=complex))
        return UniPoly(coeffs=npoly.polymul(self.coeffs, other.coeffs))

    def __pow__(self, exponent: int) -> UniPoly:
        result = UniPoly(coeffs=np.array([1.0 + 0j]))
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniPoly):
            return NotImplemented
        return bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs.tobytes())


class MatrixBiPoly(BaseModel):
    """
    Matrix aus bivariaten Polynomen (z.B. Q der Größe α×M oder P der Größe α×N).

    Optional mit Zeugenpunkt, an dem die Matrix vollen Rang α hat.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    shape: tuple[int, int]
    entries: list[list[BiPoly]]
    witness: VarietyPoint | None = Field(default=None, description="Punkt mit vollem numerischen Rang")

    @model_validator(mode="before")
    @classmethod
    def fill_shape(cls, data: Any) -> Any:
        if isinstance(data, dict) and "shape" not in data and "entries" in data:
            entries = data["entries"]
            data = {**data, "shape": (len(entries), len(entries[0]) if entries else 0)}
        return data

    @model_validator(mode="after")
    def validate_shape(self):
        """Validiere, dass alle Zeilen die angegebene Länge haben."""
        rows, cols = self.shape
        if len(self.entries) != rows or any(len(row) != cols for row in self.entries):
            raise ValueError(f"entries do not match declared shape {self.shape}")
        return self

    @classmethod
    def from_grids(cls, grids: np.ndarray, witness: VarietyPoint | None = None) -> MatrixBiPoly:
        """Baut die Matrix aus einem Array der Form (rows, cols, n+1, m+1)."""
        rows, cols = grids.shape[:2]
        entries = [[BiPoly(coeffs=grids[r, c]) for c in range(cols)] for r in range(rows)]
        return cls(shape=(rows, cols), entries=entries, witness=witness)

    def __call__(self, z: complex, w: complex) -> np.ndarray:
        rows, cols = self.shape
        return np.array([[self.entries[r][c](z, w) for c in range(cols)] for r in range(rows)], dtype=complex).reshape(
            rows, cols
        )

    def scaled(self, factor: BiPoly | complex) -> MatrixBiPoly:
        """Multipliziert jeden Eintrag mit einem skalaren Polynom."""
        return MatrixBiPoly(
            shape=self.shape,
            entries=[[entry * factor for entry in row] for row in self.entries],
            witness=self.witness,
        )

    @property
    def max_bidegree(self) -> tuple[int, int]:
        degrees = [entry.bidegree for row in self.entries for entry in row if not entry.is_zero]
        if not degrees:
            return (-1, -1)
        return (max(d[0] for d in degrees), max(d[1] for d in degrees))


# =============================================================================
# Varietät und Berichte
# =============================================================================


class VarietyPoint(BaseModel):
    """Punkt (z, w) auf 𝔙(𝔭) mit Regularitätsflag und optionalem Komponentenindex."""

    model_config = ConfigDict(frozen=True)

    z: ComplexNumber
    w: ComplexNumber
    regular: bool = True
    component_index: int | None = Field(default=None, ge=0)


class Witness(BaseModel):
    """Verletzender Punkt einer Prüfung mit Begründung.

    Bei Faserfehlern ohne Nullstelle ist nur die abgetastete Koordinate gesetzt.
    """

    model_config = ConfigDict(frozen=True)

    z: ComplexNumber | None = None
    w: ComplexNumber | None = None
    reason: str
    fiber: str = Field(default="z", description="Variable, deren Faser abgetastet wurde")


class InnerToralReport(BaseModel):
    """Bericht der Inner-Toral-Zertifizierung."""

    model_config = ConfigDict(frozen=True)

    verdict: Verdict
    boundary_max_deviation: float = Field(ge=0)
    interior_max_modulus: float = Field(ge=0)
    exterior_min_modulus: float | None = Field(default=None, ge=0)
    witnesses: list[Witness] = Field(default_factory=list)
    tolerance: float = Field(gt=0)
    boundary_samples: int = Field(ge=1)
    interior_samples: int = Field(ge=1)

    @model_validator(mode="after")
    def validate_verdict(self):
        """Validiere, dass das Urteil zu Abweichungen und Zeugen passt."""
        within = (
            self.boundary_max_deviation <= self.tolerance
            and self.interior_max_modulus < 1 - self.tolerance
            and (self.exterior_min_modulus is None or self.exterior_min_modulus > 1 + self.tolerance)
            and not self.witnesses
        )
        if within != (self.verdict == Verdict.PASS):
            raise ValueError(f"verdict '{self.verdict.value}' contradicts the recorded deviations and witnesses")
        return self


# =============================================================================
# Kolligationen und Faktorisierungen
# =============================================================================


class Colligation(BaseModel):
    """
    Unitäre Kolligation U = [[A, B], [C, D]].

    Realisiert die matrixwertige rationale innere Funktion Φ(z) = A + zB(I − zD)^{-1}C.
    Nicht-unitäre Blockmatrizen werden abgewiesen, nicht auf die unitäre Gruppe projiziert.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    M: int = Field(ge=1, description="Faserdimension von Φ")
    N: int = Field(ge=0, description="Zustandsdimension (Rang des Defekts)")
    A: ComplexMatrix
    B: ComplexMatrix
    C: ComplexMatrix
    D: ComplexMatrix

    UNITARY_TOL: ClassVar[float] = 1e-10

    @model_validator(mode="before")
    @classmethod
    def shape_empty_blocks(cls, data: Any) -> Any:
        """Leere Blöcke (N = 0) bekommen ihre formale Form (M×0, 0×M, 0×0)."""
        if not isinstance(data, dict) or "M" not in data or "N" not in data:
            return data
        m, n = int(data["M"]), int(data["N"])
        expected = {"A": (m, m), "B": (m, n), "C": (n, m), "D": (n, n)}
        data = dict(data)
        for name, shape in expected.items():
            value = data.get(name)
            if value is not None and np.size(np.asarray(value, dtype=object)) == 0 and 0 in shape:
                data[name] = np.zeros(shape, dtype=complex)
        return data

    @model_validator(mode="after")
    def validate_unitary(self, info: ValidationInfo):
        """Validiere Blockformen, Unitarität von U und Spektralradius von D < 1.

        Die Unitaritätstoleranz kommt aus dem Validierungskontext (``unitary_tol``), sonst UNITARY_TOL.
        """
        expected = {"A": (self.M, self.M), "B": (self.M, self.N), "C": (self.N, self.M), "D": (self.N, self.N)}
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise ValueError(f"block {name} has shape {actual}, expected {shape}")
        u = self.U
        identity = np.eye(self.M + self.N)
        defect = max(np.linalg.norm(u.conj().T @ u - identity, 2), np.linalg.norm(u @ u.conj().T - identity, 2))
        context = info.context or {}
        tolerance = float(context.get("unitary_tol", Colligation.UNITARY_TOL))
        if defect > tolerance:
            raise ValueError(f"colligation is not unitary: defect {defect:.3e} exceeds {tolerance:.0e}")
        if self.N > 0 and self.spectral_radius_d >= 1:
            raise ValueError(f"spectral radius of D is {self.spectral_radius_d:.6f}, must be < 1")
        return self

    @property
    def U(self) -> np.ndarray:
        """Zusammengesetzte (M+N)×(M+N)-Blockmatrix."""
        return np.block([[self.A, self.B], [self.C, self.D]])

    @property
    def spectral_radius_d(self) -> float:
        if self.N == 0:
            return 0.0
        return float(np.abs(np.linalg.eigvals(self.D)).max())

    @classmethod
    def from_unitary(cls, u: np.ndarray, m: int) -> Colligation:
        """Zerlegt eine unitäre Matrix in die Blöcke einer Kolligation mit Faserdimension m."""
        u = np.asarray(u, dtype=complex)
        n = u.shape[0] - m
        return cls(M=m, N=n, A=u[:m, :m], B=u[:m, m:], C=u[m:, :m], D=u[m:, m:])

    def direct_sum(self, other: Colligation) -> Colligation:
        """Direkte Summe Φ ⊕ Ψ als blockdiagonale Kolligation."""

        def diag(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            out = np.zeros((x.shape[0] + y.shape[0], x.shape[1] + y.shape[1]), dtype=complex)
            out[: x.shape[0], : x.shape[1]] = x
            out[x.shape[0] :, x.shape[1] :] = y
            return out

        return Colligation(
            M=self.M + other.M,
            N=self.N + other.N,
            A=diag(self.A, other.A),
            B=diag(self.B, other.B),
            C=diag(self.C, other.C),
            D=diag(self.D, other.D),
        )


class Factorization(BaseModel):
    """
    Faktorisierung 𝔭 = 𝔭₁⋯𝔭_s in (als irreduzibel angenommene) paarweise verschiedene Faktoren.

    Irreduzibilität wird nicht geprüft; Verschiedenheit bis auf skalare Vielfache schon.
    """

    model_config = ConfigDict(frozen=True)

    factors: list[BiPoly] = Field(min_length=1)
    product_check_residual: float | None = Field(default=None, ge=0)

    PROPORTIONAL_TOL: ClassVar[float] = 1e-10

    @model_validator(mode="after")
    def validate_distinct(self):
        """Validiere, dass keine zwei Faktoren skalare Vielfache voneinander sind."""
        for idx, first in enumerate(self.factors):
            if first.is_zero:
                raise ValueError(f"factor {idx} is the zero polynomial")
            for jdx in range(idx + 1, len(self.factors)):
                if _proportional(first, self.factors[jdx], Factorization.PROPORTIONAL_TOL):
                    raise ValueError(f"factors {idx} and {jdx} are scalar multiples of each other")
        return self

    def product(self) -> BiPoly:
        result = BiPoly.constant(1)
        for factor in self.factors:
            result = result * factor
        return result

    @property
    def bidegrees(self) -> list[tuple[int, int]]:
        return [factor.bidegree for factor in self.factors]

    def checked_against(self, p: BiPoly, tol: float = 1e-8) -> Factorization:
        """Prüft das Produkt gegen 𝔭 (relativ zu max|coeff|) und speichert das Residuum.

        Raises:
            ValueError: Wenn das Produkt 𝔭 nicht innerhalb der Toleranz reproduziert
        """
        diff = self.product() - p
        residual = diff.max_abs_coeff / max(p.max_abs_coeff, 1e-300)
        if residual > tol:
            raise ValueError(f"product of factors differs from the polynomial (relative residual {residual:.3e})")
        return self.model_copy(update={"product_check_residual": residual})


def _proportional(first: BiPoly, second: BiPoly, tol: float) -> bool:
    if first.coeffs.shape != second.coeffs.shape:
        return False
    stacked = np.vstack([first.coeffs.ravel(), second.coeffs.ravel()])
    singular = np.linalg.svd(stacked, compute_uv=False)
    return bool(singular[1] <= tol * singular[0])


# =============================================================================
# Exakte Polynome (Wire-Format)
# =============================================================================


class ExactTerm(BaseModel):
    """Term (i, j) mit gaußsch-rationalem Koeffizienten re + i·im als Bruch-Strings."""

    model_config = ConfigDict(frozen=True)

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    re: str = "0"
    im: str = "0"

    @model_validator(mode="after")
    def validate_fractions(self):
        """Validiere, dass re und im als Brüche lesbar sind."""
        for part in (self.re, self.im):
            try:
                Fraction(part)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"'{part}' is not a rational number: {e}")
        return self


class ExactPolyModel(BaseModel):
    """JSON-Form eines exakten bivariaten Polynoms."""

    model_config = ConfigDict(frozen=True)

    terms: list[ExactTerm] = Field(default_factory=list)
    order: TermOrder = TermOrder.LEX_ZW


class IdealPair(BaseModel):
    """Erzeugerpaar (p, q) eines Ideals."""

    model_config = ConfigDict(frozen=True)

    p: ExactPolyModel
    q: ExactPolyModel


class TripleModel(BaseModel):
    """Explizit vorgegebenes Tripel (Q, P) statt einer Konstruktion aus der Kolligation."""

    model_config = ConfigDict(frozen=True)

    Q: MatrixBiPoly
    P: MatrixBiPoly
    witness: VarietyPoint | None = None


class Bundle(BaseModel):
    """Eingabebündel für den Gesamtbericht."""

    model_config = ConfigDict(frozen=True)

    poly: BiPoly
    colligation: Colligation
    factors: list[BiPoly] | None = Field(default=None, description="Faktoren von poly; Standard: [poly]")
    component: int = Field(default=0, ge=0, description="Komponente für Kern- und Defektstufe")
    triple: TripleModel | None = None
    ideal: IdealPair | None = None
    blaschke_zeros: list[ComplexNumber] = Field(default_factory=lambda: [0j])

    @model_validator(mode="after")
    def validate_component(self):
        """Validiere den Komponentenindex gegen die Faktorliste."""
        if self.component >= len(self.factorization.factors):
            raise ValueError(f"component {self.component} out of range for {len(self.factorization.factors)} factors")
        return self

    @property
    def factorization(self) -> Factorization:
        return Factorization(factors=self.factors if self.factors else [self.poly])


# =============================================================================
# Konfiguration
# =============================================================================


class Tolerances(BaseModel):
    """Numerische Schwellen aller Module (alle positiv)."""

    model_config = ConfigDict(frozen=True)

    residual: float = Field(default=1e-8, gt=0, description="|𝔭(z,w)| für Varietätspunkte")
    regularity: float = Field(default=1e-6, gt=0, description="|∇𝔭| für reguläre Punkte")
    rank: float = Field(default=1e-7, gt=0, description="relative Singulärwertschwelle für Kerndimensionen")
    unitary: float = Field(default=1e-10, gt=0, description="Unitaritätsdefekt von Kolligationen")
    inner: float = Field(default=1e-8, gt=0, description="Randabweichung für Inner-Toral und Innerheit")
    annihilation: float = Field(default=1e-9, gt=0, description="‖𝔭(λ, Φ(λ))‖")
    realization: float = Field(default=1e-7, gt=0, description="Transferfehler nach Realisierung")
    kernel: float = Field(default=1e-8, gt=0, description="Kernidentität QQ* vs PP*")
    gram: float = Field(default=1e-10, gt=0, description="Gram- und Basisprüfungen")
    square_free: float = Field(default=1e-10, gt=0, description="relative Resultantennorm")
    cluster: float = Field(default=1e-6, gt=0, description="Clusterradius für mehrfache Nullstellen")
    rationalize: float = Field(default=1e-12, gt=0, description="Rationalisierungsgenauigkeit")


class RunConfig(BaseModel):
    """Konfiguration eines CLI-Aufrufs."""

    model_config = ConfigDict(frozen=True)

    command: Command
    poly: Path | None = None
    colligation: Path | None = None
    factors: Path | None = None
    bundle: Path | None = None
    ideal: Path | None = Field(default=None, description="IdealPair-JSON für das Kommando ideal")
    csv: Path | None = None
    tolerances: Tolerances = Field(default_factory=Tolerances)
    seed: int = Field(default=0, ge=0)
    truncation: int = Field(default=12, ge=2, description="Trunkierungsgrad D des Shift-Modells")
    samples: int = Field(default=20, ge=1, description="Abtastpunkte pro Komponente bzw. Paarzahl")
    boundary_samples: int = Field(default=64, ge=1)
    interior_samples: int = Field(default=64, ge=1)
    order: TermOrder = TermOrder.LEX_ZW
    exterior: bool = False
    degrees: list[int] = Field(default_factory=lambda: [8, 10, 12])
    generators: int | None = Field(default=None, ge=1)
    component: int = Field(default=0, ge=0)
    verbose: bool = False

    @model_validator(mode="after")
    def validate_degrees(self):
        """Validiere die Defektgrade (aufsteigend, mindestens zwei)."""
        if len(self.degrees) < 2 or sorted(self.degrees) != self.degrees or min(self.degrees) < 1:
            raise ValueError("degrees must be at least two ascending positive integers")
        return self

    def require_path(self, name: str) -> Path:
        """Holt einen Eingabepfad und prüft seine Existenz.

        Raises:
            FileNotFoundError: Wenn der Pfad fehlt oder nicht existiert
        """
        path = getattr(self, name)
        if path is None:
            raise FileNotFoundError(f"command '{self.command.value}' requires --{name}")
        if not path.exists():
            raise FileNotFoundError(f"input file '{path}' does not exist")
        return path

    @property
    def threads(self) -> int:
        return thread_cap()

    @property
    def validation_context(self) -> dict[str, float]:
        """Kontext für model_validate der Eingabedateien."""
        return {"unitary_tol": self.tolerances.unitary}


MatrixBiPoly.model_rebuild()
