"""Exact arithmetic for weighted multivariate polynomials.

A :class:`WeightedRing` fixes the number of variables and a positive integer
weight for each; a :class:`WPolynomial` is a sparse map from exponent tuples
to nonzero rational coefficients (gmpy2 ``mpq``).  Everything is immutable
after construction and safe to share between threads.

Monomials are plain exponent tuples.  Inside a fixed weighted degree they are
ordered lexicographically with variable 0 most significant and the largest
monomial first, so bases, tables and serialized output are reproducible.

The text grammar accepted by :func:`parse_polynomial` uses variables
``x0..xN``, integer or rational coefficients, and the operators ``+ - * ^``;
whitespace is insignificant, e.g. ``x4^3 + x0^6 + 3/2*x1^2*x2^4``.
"""

from __future__ import annotations

import math
import random
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq, mpz

from .errors import ParseError, StructuralError

Monomial = tuple  # exponent tuple, one entry per variable

_ZERO = mpq(0)
_ONE = mpq(1)


class WeightedRing:
    """Ambient graded polynomial ring: a variable count and positive weights.

    Weights must have gcd 1; a common factor would merely rescale every
    degree and is rejected to keep degree bookkeeping canonical.
    """

    __slots__ = ("num_vars", "weights", "_hash")

    def __init__(self, weights: Sequence[int]):
        weights = tuple(int(a) for a in weights)
        if not weights:
            raise StructuralError("a ring needs at least one variable")
        if any(a < 1 for a in weights):
            raise StructuralError(f"weights must be positive, got {weights}")
        if math.gcd(*weights) != 1:
            raise StructuralError(f"weights must have gcd 1, got {weights}")
        self.num_vars = len(weights)
        self.weights = weights
        self._hash = hash(("WeightedRing", weights))

    def __eq__(self, other):
        return isinstance(other, WeightedRing) and self.weights == other.weights

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"WeightedRing{self.weights}"

    @property
    def total_weight(self) -> int:
        """Sum of all variable weights."""
        return sum(self.weights)

    def weighted_degree(self, exponents: Monomial) -> int:
        return weighted_degree(exponents, self)

    def monomials_of_degree(self, degree: int) -> list[Monomial]:
        return monomials_of_degree(self, degree)

    def variable(self, i: int, power: int = 1) -> "WPolynomial":
        """The monomial x_i^power as a polynomial."""
        if not 0 <= i < self.num_vars:
            raise StructuralError(f"variable index {i} out of range")
        exps = [0] * self.num_vars
        exps[i] = power
        return WPolynomial(self, {tuple(exps): _ONE})

    def one(self) -> "WPolynomial":
        return WPolynomial(self, {(0,) * self.num_vars: _ONE})

    def zero(self) -> "WPolynomial":
        return WPolynomial(self, {})


def weighted_degree(m: Monomial, ring: WeightedRing) -> int:
    """Weighted degree of an exponent tuple: sum of exponent * weight."""
    if len(m) != ring.num_vars:
        raise StructuralError(
            f"monomial has {len(m)} exponents, ring has {ring.num_vars} variables"
        )
    if any(e < 0 for e in m):
        raise StructuralError(f"negative exponent in {m}")
    return sum(e * a for e, a in zip(m, ring.weights))


@lru_cache(maxsize=None)
def _monomials_cached(weights: tuple, degree: int) -> tuple:
    if degree < 0:
        return ()
    if not weights:
        return ((),) if degree == 0 else ()
    a0 = weights[0]
    out = []
    # variable 0 most significant, largest exponent first
    for e0 in range(degree // a0, -1, -1):
        for tail in _monomials_cached(weights[1:], degree - e0 * a0):
            out.append((e0,) + tail)
    return tuple(out)


def monomials_of_degree(ring: WeightedRing, degree: int) -> list[Monomial]:
    """All monomials of the given weighted degree, largest first.

    The order is lexicographic on exponent tuples (variable 0 most
    significant), descending; it is the column order of every matrix built
    over a graded piece.  Negative degrees give the empty list.
    """
    return list(_monomials_cached(ring.weights, degree))


@lru_cache(maxsize=None)
def _monomial_index_cached(weights: tuple, degree: int) -> dict:
    return {m: i for i, m in enumerate(_monomials_cached(weights, degree))}


def monomial_index(ring: WeightedRing, degree: int) -> Mapping[Monomial, int]:
    """Monomial -> position in monomials_of_degree(ring, degree)."""
    return _monomial_index_cached(ring.weights, degree)


def _coerce_coeff(c) -> mpq:
    if isinstance(c, (int, mpz)):
        return mpq(c)
    if isinstance(c, mpq):
        return c
    raise StructuralError(f"coefficient {c!r} is not an exact rational")


class WPolynomial:
    """Sparse exact-coefficient polynomial over a :class:`WeightedRing`.

    ``terms`` maps exponent tuples to nonzero ``mpq`` coefficients.  Zero
    coefficients are never stored.  Instances are immutable; all arithmetic
    returns fresh objects.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeightedRing, terms: Mapping[Monomial, object]):
        clean: dict[Monomial, mpq] = {}
        n = ring.num_vars
        for m, c in terms.items():
            if len(m) != n:
                raise StructuralError(
                    f"monomial {m} has wrong length for {ring!r}"
                )
            c = _coerce_coeff(c)
            if c != 0:
                clean[tuple(m)] = c
        self.ring = ring
        self.terms = clean

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_terms(cls, ring: WeightedRing, pairs: Iterable[tuple[Monomial, object]]):
        acc: dict[Monomial, mpq] = {}
        for m, c in pairs:
            m = tuple(m)
            acc[m] = acc.get(m, _ZERO) + _coerce_coeff(c)
        return cls(ring, acc)

    # -- predicates ------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        r = self.ring
        return {weighted_degree(m, r) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Weighted degree of a homogeneous polynomial; None for 0."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise StructuralError(f"polynomial is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    # -- arithmetic -------------------------------------------------------------

    def _check_ring(self, other: "WPolynomial"):
        if self.ring != other.ring:
            raise StructuralError("polynomials live in different rings")

    def __add__(self, other: "WPolynomial") -> "WPolynomial":
        self._check_ring(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            s = acc.get(m, _ZERO) + c
            if s == 0:
                acc.pop(m, None)
            else:
                acc[m] = s
        return WPolynomial(self.ring, acc)

    def __neg__(self) -> "WPolynomial":
        return WPolynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "WPolynomial") -> "WPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "WPolynomial":
        if isinstance(other, (int, mpz, mpq)):
            c0 = _coerce_coeff(other)
            if c0 == 0:
                return self.ring.zero()
            return WPolynomial(self.ring, {m: c * c0 for m, c in self.terms.items()})
        self._check_ring(other)
        acc: dict[Monomial, mpq] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = acc.get(m, _ZERO) + c1 * c2
                if s == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = s
        return WPolynomial(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "WPolynomial":
        if k < 0:
            raise StructuralError("negative powers are not defined")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        return (
            isinstance(other, WPolynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"WPolynomial({format_polynomial(self)!r})"

    # -- calculus / substitution -------------------------------------------------

    def partial_derivative(self, i: int) -> "WPolynomial":
        """Formal partial derivative with respect to variable i."""
        if not 0 <= i < self.ring.num_vars:
            raise StructuralError(f"variable index {i} out of range")
        acc: dict[Monomial, mpq] = {}
        for m, c in self.terms.items():
            e = m[i]
            if e == 0:
                continue
            m2 = m[:i] + (e - 1,) + m[i + 1 :]
            acc[m2] = acc.get(m2, _ZERO) + c * e
        return WPolynomial(self.ring, acc)

    def substitute(self, change: "CoordinateChange") -> "WPolynomial":
        """Replace each variable by its image under the coordinate change."""
        if change.ring != self.ring:
            raise StructuralError("coordinate change is for a different ring")
        out = self.ring.zero()
        power_cache: dict[tuple[int, int], WPolynomial] = {}

        def img_power(i: int, e: int) -> WPolynomial:
            key = (i, e)
            got = power_cache.get(key)
            if got is None:
                got = change.images[i] ** e
                power_cache[key] = got
            return got

        for m, c in self.terms.items():
            term = self.ring.one() * c
            for i, e in enumerate(m):
                if e:
                    term = term * img_power(i, e)
            out = out + term
        return out

    def restrict_to_zero_locus(self, indices: Iterable[int]) -> "WPolynomial":
        """Drop every term with a positive exponent on any listed variable.

        The result lives in the same ring; the listed variables are simply
        unused afterwards.
        """
        idx = set(indices)
        for i in idx:
            if not 0 <= i < self.ring.num_vars:
                raise StructuralError(f"variable index {i} out of range")
        kept = {
            m: c for m, c in self.terms.items() if all(m[i] == 0 for i in idx)
        }
        return WPolynomial(self.ring, kept)

    def coefficient_of_power(self, i: int, e: int) -> "WPolynomial":
        """The coefficient of x_i^e, as a polynomial not involving x_i."""
        acc = {}
        for m, c in self.terms.items():
            if m[i] == e:
                acc[m[:i] + (0,) + m[i + 1 :]] = c
        return WPolynomial(self.ring, acc)

    def coefficient_vector(self, degree: int) -> list[mpq]:
        """Dense coefficient vector over monomials_of_degree(ring, degree).

        Requires every stored term to have that weighted degree.
        """
        index = monomial_index(self.ring, degree)
        vec = [_ZERO] * len(index)
        for m, c in self.terms.items():
            pos = index.get(m)
            if pos is None:
                raise StructuralError(
                    f"term {m} does not have weighted degree {degree}"
                )
            vec[pos] = c
        return vec


# -- operation-style wrappers (thin aliases over the methods) -------------------


def partial_derivative(p: WPolynomial, i: int) -> WPolynomial:
    return p.partial_derivative(i)


def substitute(p: WPolynomial, change: "CoordinateChange") -> WPolynomial:
    return p.substitute(change)


def restrict_to_zero_locus(p: WPolynomial, indices: Iterable[int]) -> WPolynomial:
    return p.restrict_to_zero_locus(indices)


class CoordinateChange:
    """A graded substitution x_i -> image_i, with an invertibility witness.

    Each image must be homogeneous of the source variable's weight.  At
    construction the induced linear map on every graded piece of degree up to
    max(weights) is checked to be bijective; because those degrees contain all
    the variables, bijectivity there forces bijectivity in every degree, so
    the substitution is a ring automorphism.
    """

    __slots__ = ("ring", "images")

    def __init__(self, ring: WeightedRing, images: Sequence[WPolynomial], check: bool = True):
        if len(images) != ring.num_vars:
            raise StructuralError("need one image per variable")
        for i, img in enumerate(images):
            if img.ring != ring:
                raise StructuralError("image lives in the wrong ring")
            if img.is_zero() or img.degree() != ring.weights[i]:
                raise StructuralError(
                    f"image of variable {i} must be homogeneous of degree "
                    f"{ring.weights[i]}"
                )
        self.ring = ring
        self.images = tuple(images)
        if check and not self._bijective_on_low_degrees():
            raise StructuralError("substitution is not invertible")

    def _bijective_on_low_degrees(self) -> bool:
        from .linalg import exact_rank

        for e in range(1, max(self.ring.weights) + 1):
            basis = monomials_of_degree(self.ring, e)
            if not basis:
                continue
            rows = []
            for m in basis:
                p = self.ring.one()
                for i, exp in enumerate(m):
                    if exp:
                        p = p * (self.images[i] ** exp)
                rows.append(p.coefficient_vector(e))
            if exact_rank(rows) != len(basis):
                return False
        return True

    @classmethod
    def identity(cls, ring: WeightedRing) -> "CoordinateChange":
        return cls(ring, [ring.variable(i) for i in range(ring.num_vars)], check=False)

    def compose(self, inner: "CoordinateChange") -> "CoordinateChange":
        """The change sending p to substitute(substitute(p, self), inner)."""
        if inner.ring != self.ring:
            raise StructuralError("coordinate changes live in different rings")
        return CoordinateChange(
            self.ring, [img.substitute(inner) for img in self.images], check=False
        )

    def __eq__(self, other):
        return (
            isinstance(other, CoordinateChange)
            and self.ring == other.ring
            and self.images == other.images
        )

    def __repr__(self):
        imgs = ", ".join(format_polynomial(p) for p in self.images)
        return f"CoordinateChange[{imgs}]"


def random_coordinate_change(
    ring: WeightedRing,
    rng: random.Random,
    shears: int = 2,
    coeff_bound: int = 4,
    dense_linear: bool = False,
) -> CoordinateChange:
    """A random invertible coordinate change.

    Composed from a permutation of equal-weight variables, nonzero diagonal
    scalings, and ``shears`` single-variable substitutions
    x_i -> x_i + c * (monomial of weight a_i).  With ``dense_linear`` the
    equal-weight blocks instead get a random invertible integer matrix, which
    produces dense images.
    """
    n = ring.num_vars
    weights = ring.weights

    # permutation within weight classes + scaling
    by_weight: dict[int, list[int]] = {}
    for i, a in enumerate(weights):
        by_weight.setdefault(a, []).append(i)
    target = list(range(n))
    for group in by_weight.values():
        shuffled = group[:]
        rng.shuffle(shuffled)
        for src, dst in zip(group, shuffled):
            target[src] = dst
    images = []
    for i in range(n):
        c = 0
        while c == 0:
            c = rng.randint(-coeff_bound, coeff_bound)
        images.append(ring.variable(target[i]) * c)
    change = CoordinateChange(ring, images, check=False)

    if dense_linear:
        from .linalg import exact_rank

        for group in by_weight.values():
            k = len(group)
            if k < 2:
                continue
            while True:
                mat = [
                    [rng.randint(-coeff_bound, coeff_bound) for _ in range(k)]
                    for _ in range(k)
                ]
                if exact_rank([[mpq(x) for x in row] for row in mat]) == k:
                    break
            imgs = list(CoordinateChange.identity(ring).images)
            for r, i in enumerate(group):
                p = ring.zero()
                for s, j in enumerate(group):
                    if mat[r][s]:
                        p = p + ring.variable(j) * mat[r][s]
                imgs[i] = p
            change = change.compose(CoordinateChange(ring, imgs, check=False))

    for _ in range(shears):
        i = rng.randrange(n)
        # a degree-a_i monomial other than x_i cannot involve x_i, so the
        # shear x_i -> x_i + c*m is unipotent and invertible
        unit = tuple(1 if j == i else 0 for j in range(n))
        candidates = [
            m for m in monomials_of_degree(ring, weights[i]) if m != unit
        ]
        if not candidates:
            continue
        mono = candidates[rng.randrange(len(candidates))]
        c = 0
        while c == 0:
            c = rng.randint(-coeff_bound, coeff_bound)
        imgs = list(CoordinateChange.identity(ring).images)
        imgs[i] = imgs[i] + WPolynomial(ring, {mono: c})
        change = change.compose(CoordinateChange(ring, imgs, check=False))

    # the composition of invertible pieces is invertible; verify once anyway
    return CoordinateChange(ring, change.images, check=True)


# -- text grammar ----------------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def take_int(self) -> int:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected an integer", start)
        return int(self.text[start : self.pos])

    def expect(self, ch: str):
        got = self.peek()
        if got != ch:
            raise ParseError(f"expected {ch!r}", self.pos)
        self.pos += 1


def parse_polynomial(text: str, ring: WeightedRing) -> WPolynomial:
    """Parse the CLI polynomial grammar into a polynomial over ``ring``."""
    tok = _Tokenizer(text)
    poly = _parse_sum(tok, ring)
    if tok.peek() is not None:
        raise ParseError(f"unexpected character {tok.peek()!r}", tok.pos)
    return poly


def _parse_sum(tok: _Tokenizer, ring: WeightedRing) -> WPolynomial:
    acc = ring.zero()
    sign = 1
    ch = tok.peek()
    if ch == "+":
        tok.expect("+")
    elif ch == "-":
        tok.expect("-")
        sign = -1
    while True:
        acc = acc + _parse_product(tok, ring) * sign
        ch = tok.peek()
        if ch == "+":
            tok.expect("+")
            sign = 1
        elif ch == "-":
            tok.expect("-")
            sign = -1
        else:
            return acc


def _parse_product(tok: _Tokenizer, ring: WeightedRing) -> WPolynomial:
    acc = _parse_power(tok, ring)
    while tok.peek() == "*":
        tok.expect("*")
        acc = acc * _parse_power(tok, ring)
    return acc


def _parse_power(tok: _Tokenizer, ring: WeightedRing) -> WPolynomial:
    base = _parse_atom(tok, ring)
    if tok.peek() == "^":
        tok.expect("^")
        return base ** tok.take_int()
    return base


def _parse_atom(tok: _Tokenizer, ring: WeightedRing) -> WPolynomial:
    ch = tok.peek()
    if ch is None:
        raise ParseError("unexpected end of input", tok.pos)
    if ch == "(":
        tok.expect("(")
        inner = _parse_sum(tok, ring)
        tok.expect(")")
        return inner
    if ch == "x":
        tok.expect("x")
        i = tok.take_int()
        if i >= ring.num_vars:
            raise ParseError(
                f"variable x{i} out of range for {ring.num_vars} variables",
                tok.pos,
            )
        return ring.variable(i)
    if ch.isdigit():
        num = tok.take_int()
        if tok.peek() == "/":
            tok.expect("/")
            den = tok.take_int()
            if den == 0:
                raise ParseError("zero denominator", tok.pos)
            return ring.one() * mpq(num, den)
        return ring.one() * num
    raise ParseError(f"unexpected character {ch!r}", tok.pos)


def format_polynomial(p: WPolynomial) -> str:
    """Serialize to the text grammar; parse(format(p)) == p."""
    if p.is_zero():
        return "0"
    items = sorted(p.terms.items(), key=lambda mc: (weighted_degree(mc[0], p.ring), mc[0]), reverse=True)
    chunks = []
    for m, c in items:
        factors = []
        for i, e in enumerate(m):
            if e == 1:
                factors.append(f"x{i}")
            elif e > 1:
                factors.append(f"x{i}^{e}")
        mag = abs(c)
        body = "*".join(factors)
        if not factors:
            body = _format_coeff(mag)
        elif mag != 1:
            body = f"{_format_coeff(mag)}*{body}"
        if not chunks:
            chunks.append(body if c > 0 else f"-{body}")
        else:
            chunks.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(chunks)


def _format_coeff(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"
