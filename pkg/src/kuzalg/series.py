"""Integer power-series helpers for graded dimension bookkeeping.

Everything here manipulates plain Python integer lists, so results are exact.
The central object is the series

    product over i of (1 - z^(d - a_i))  /  product over i of (1 - z^(a_i)),

which is the Hilbert series of the quotient by a regular sequence of
homogeneous polynomials of degrees d - a_i in variables of weights a_i.  The
dimension engine uses it as a certificate: once an isolated critical point is
certified, every graded dimension must match these coefficients.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

from gmpy2 import mpq

from .errors import StructuralError


def multiply_by_one_minus_power(coeffs: list[int], a: int) -> list[int]:
    """Coefficients of f(z) * (1 - z^a), truncated to the input length."""
    out = coeffs[:]
    for i in range(len(coeffs) - 1, a - 1, -1):
        out[i] -= coeffs[i - a]
    return out


def divide_by_one_minus_power(coeffs: list[int], a: int) -> list[int]:
    """Coefficients of f(z) / (1 - z^a), truncated to the input length."""
    out = coeffs[:]
    for i in range(a, len(out)):
        out[i] += out[i - a]
    return out


def weighted_monomial_counts(weights: Sequence[int], upto: int) -> list[int]:
    """Number of monomials of each weighted degree 0..upto.

    Coefficients of 1 / product (1 - z^(a_i)).
    """
    coeffs = [0] * (upto + 1)
    coeffs[0] = 1
    for a in weights:
        coeffs = divide_by_one_minus_power(coeffs, a)
    return coeffs


def complete_intersection_hilbert(
    weights: Sequence[int], relation_degrees: Sequence[int], upto: int
) -> list[int]:
    """Coefficients 0..upto of prod(1 - z^b) / prod(1 - z^a).

    With b ranging over relation_degrees and a over weights.  A relation
    degree <= 0 has no meaningful series; callers must filter those out.
    """
    if any(b <= 0 for b in relation_degrees):
        raise StructuralError("relation degrees must be positive")
    coeffs = [0] * (upto + 1)
    coeffs[0] = 1
    for a in weights:
        coeffs = divide_by_one_minus_power(coeffs, a)
    for b in relation_degrees:
        coeffs = multiply_by_one_minus_power(coeffs, b)
    return coeffs


def jacobian_hilbert_if_isolated(weights: Sequence[int], d: int, upto: int) -> list[int]:
    """Expected Jacobian-ring dimensions when the critical point is isolated."""
    return complete_intersection_hilbert(
        weights, [d - a for a in weights], upto
    )


def milnor_product(weights: Sequence[int], d: int) -> int:
    """The closed-form total dimension: product of (d - a_i) / a_i.

    Raises if the product is not a nonnegative integer, which cannot happen
    for inputs with an isolated critical point.
    """
    value = prod(mpq(d - a, a) for a in weights)
    if value.denominator != 1 or value < 0:
        raise StructuralError(
            f"product formula gives non-integer {value}; "
            "no isolated critical point is possible for these parameters"
        )
    return int(value)
