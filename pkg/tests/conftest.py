"""Gemeinsame Fixtures: Beispielpolynome und Kolligationen."""

import pytest

from src.models import BiPoly, Colligation


@pytest.fixture
def parabola():
    """w² − z."""
    return BiPoly.from_coeffs([[0, 0, 1], [-1, 0, 0]])


@pytest.fixture
def diagonal():
    """w − z."""
    return BiPoly.from_coeffs([[0, 1], [-1, 0]])


@pytest.fixture
def anti_diagonal():
    """w + z."""
    return BiPoly.from_coeffs([[0, 1], [1, 0]])


@pytest.fixture
def cross():
    """(w − z)(w + z) = w² − z²."""
    return BiPoly.from_coeffs([[0, 0, 1], [0, 0, 0], [-1, 0, 0]])


@pytest.fixture
def cusp():
    """w³ − z²."""
    return BiPoly.from_coeffs([[0, 0, 0, 1], [0, 0, 0, 0], [-1, 0, 0, 0]])


@pytest.fixture
def hyperbola():
    """zw − 1 (nicht inner-toral)."""
    return BiPoly.from_coeffs([[-1, 0], [0, 1]])


@pytest.fixture
def steep_line():
    """w − 2z (nicht inner-toral)."""
    return BiPoly.from_coeffs([[0, 1], [-2, 0]])


@pytest.fixture
def exemplar_colligation():
    """Φ(z) = [[0, z], [1, 0]] mit M = 2, N = 1."""
    return Colligation(M=2, N=1, A=[[0, 0], [1, 0]], B=[[1], [0]], C=[[0, 1]], D=[[0]])


@pytest.fixture
def shift_colligation():
    """Φ(z) = z."""
    return Colligation(M=1, N=1, A=[[0]], B=[[1]], C=[[1]], D=[[0]])


@pytest.fixture
def negative_shift_colligation():
    """Φ(z) = −z."""
    return Colligation(M=1, N=1, A=[[0]], B=[[1]], C=[[-1]], D=[[0]])


@pytest.fixture
def diagonal_colligation(shift_colligation, negative_shift_colligation):
    """Φ(z) = diag(z, −z)."""
    return shift_colligation.direct_sum(negative_shift_colligation)


@pytest.fixture
def mobius_colligation():
    """Φ(z) = (z − 1/2)/(1 − z/2): skalarer Automorphismus, nicht polynomial."""
    a = 0.5
    s = (1 - a**2) ** 0.5
    return Colligation(M=1, N=1, A=[[-a]], B=[[s]], C=[[s]], D=[[a]])


@pytest.fixture
def mobius_poly():
    """w − zw/2 − z + 1/2, die Kurve w = (z − 1/2)/(1 − z/2)."""
    return BiPoly.from_coeffs([[0.5, 1], [-1, -0.5]])


@pytest.fixture
def doubled_exemplar_colligation(exemplar_colligation):
    """Φ ⊕ Φ mit M = 4, N = 2 auf w² = z (Rang 2)."""
    return exemplar_colligation.direct_sum(exemplar_colligation)
