"""Exact arithmetic for holonomy functions on a deformation variety.

Every function this package manipulates on the shape variety is built from
the three corner parameters of an ideal tetrahedron with shape z:

    z,      zeta1(z) = 1/(1 - z),      zeta2(z) = (z - 1)/z.

All three are (up to sign) monomials in the two atoms z and (1 - z), so any
product of corner parameters is exactly a *signed monomial*

    +/- prod_i  z_i^{a_i} (1 - z_i)^{b_i},

and the translation functions are short integer combinations of such
monomials.  Working in this factored-atom ring keeps equality tests,
derivatives, and denominators exact: no multivariate gcd, no floating
simplification.

`SignedMonomial` is the multiplicative group element (dilation parts mu of
peripheral curves, edge equations).  `MonomialSum` is the additive closure
(translation parts tau, cleared equations, exact derivatives).  Evaluation
happens at a `ShapeAssignment`, a tuple of arbitrary-precision complex
shapes with a degeneracy guard keeping every coordinate away from {0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, TYPE_CHECKING

import mpmath
from mpmath import mp

if TYPE_CHECKING:
    from .manifold import CornerRef, CuspCurve, CuspData, IdealTriangulation


class DegenerateShapeError(ValueError):
    """A shape coordinate sits inside the guard band around 0 or 1."""


class MuOnlyDataError(ValueError):
    """The triangulation data lacks ordered corner words, so tau is undefined."""


DEGENERACY_GUARD = 1e-12

# Exponent contribution of each corner kind to (a_t, b_t) and to the sign:
#   E0: z               -> (+1,  0), sign +
#   E1: 1/(1-z)         -> ( 0, -1), sign +
#   E2: -(1-z)/z        -> (-1, +1), sign -
_CORNER_EXPONENTS = {"E0": (1, 0, 1), "E1": (0, -1, 1), "E2": (-1, 1, -1)}


@dataclass(frozen=True)
class SignedMonomial:
    """A function +/- prod z_i^{a_i} (1-z_i)^{b_i} in canonical form.

    The representation is unique: the sign and the two integer exponent
    vectors determine the function, and equal functions have equal fields.
    """

    sign: int
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if len(self.a) != len(self.b):
            raise ValueError("exponent vectors must have equal length")

    @staticmethod
    def one(n: int) -> "SignedMonomial":
        return SignedMonomial(1, (0,) * n, (0,) * n)

    @staticmethod
    def from_corner(n: int, corner: "CornerRef | tuple[int, str]") -> "SignedMonomial":
        """The corner parameter of a tetrahedron corner as a monomial."""
        tet, kind = (corner.tet, corner.kind) if hasattr(corner, "tet") else corner
        if not 0 <= tet < n:
            raise ValueError(f"corner tetrahedron index {tet} out of range for n={n}")
        da, db, ds = _CORNER_EXPONENTS[kind]
        a = [0] * n
        b = [0] * n
        a[tet] = da
        b[tet] = db
        return SignedMonomial(ds, tuple(a), tuple(b))

    @staticmethod
    def from_word(n: int, word: Iterable["CornerRef | tuple[int, str]"]) -> "SignedMonomial":
        """Product of the corner parameters along a fan word."""
        sign = 1
        a = [0] * n
        b = [0] * n
        for corner in word:
            tet, kind = (corner.tet, corner.kind) if hasattr(corner, "tet") else corner
            if not 0 <= tet < n:
                raise ValueError(f"corner tetrahedron index {tet} out of range for n={n}")
            da, db, ds = _CORNER_EXPONENTS[kind]
            a[tet] += da
            b[tet] += db
            sign *= ds
        return SignedMonomial(sign, tuple(a), tuple(b))

    @property
    def n_vars(self) -> int:
        return len(self.a)

    def is_one(self) -> bool:
        return self.sign == 1 and not any(self.a) and not any(self.b)

    def __mul__(self, other: "SignedMonomial") -> "SignedMonomial":
        if self.n_vars != other.n_vars:
            raise ValueError("variable count mismatch")
        return SignedMonomial(
            self.sign * other.sign,
            tuple(x + y for x, y in zip(self.a, other.a)),
            tuple(x + y for x, y in zip(self.b, other.b)),
        )

    def inverse(self) -> "SignedMonomial":
        return SignedMonomial(self.sign, tuple(-x for x in self.a), tuple(-x for x in self.b))

    def __pow__(self, k: int) -> "SignedMonomial":
        return SignedMonomial(
            self.sign if k % 2 else 1,
            tuple(k * x for x in self.a),
            tuple(k * x for x in self.b),
        )

    def __neg__(self) -> "SignedMonomial":
        return SignedMonomial(-self.sign, self.a, self.b)

    def as_sum(self) -> "MonomialSum":
        return MonomialSum({(self.a, self.b): self.sign})

    def cleared(self) -> "MonomialSum":
        """Numerator of (self - 1) after clearing the monomial's denominator.

        Splitting the exponents into positive and negative parts writes the
        equation  self = 1  as the polynomial  sign*P_plus - P_minus = 0.
        """
        n = self.n_vars
        a_pos = tuple(max(x, 0) for x in self.a)
        b_pos = tuple(max(x, 0) for x in self.b)
        a_neg = tuple(max(-x, 0) for x in self.a)
        b_neg = tuple(max(-x, 0) for x in self.b)
        return MonomialSum({(a_pos, b_pos): self.sign}) - MonomialSum({(a_neg, b_neg): 1})

    def evaluate(self, shapes: "ShapeAssignment") -> mpmath.mpc:
        shapes.require_non_degenerate()
        with mp.workprec(shapes.precision_bits):
            value = mp.mpc(self.sign)
            for z, az, bz in zip(shapes.z, self.a, self.b):
                if az:
                    value *= z ** az
                if bz:
                    value *= (1 - z) ** bz
        return value

    def derivative(self, i: int) -> "MonomialSum":
        """Exact partial derivative with respect to z_i.

        d/dz [z^a (1-z)^b] = a z^(a-1) (1-z)^b - b z^a (1-z)^(b-1),
        which stays inside the Laurent monomial ring.
        """
        if not 0 <= i < self.n_vars:
            raise IndexError(f"variable index {i} out of range")
        out = MonomialSum.zero()
        if self.a[i]:
            a = list(self.a)
            a[i] -= 1
            out = out + MonomialSum({(tuple(a), self.b): self.sign * self.a[i]})
        if self.b[i]:
            b = list(self.b)
            b[i] -= 1
            out = out - MonomialSum({(self.a, tuple(b)): self.sign * self.b[i]})
        return out

    def canonical_string(self) -> str:
        parts = []
        for i, (az, bz) in enumerate(zip(self.a, self.b)):
            if az:
                parts.append(f"z{i}^{az}")
            if bz:
                parts.append(f"(1-z{i})^{bz}")
        body = "*".join(parts) if parts else "1"
        return ("-" if self.sign < 0 else "") + body

    def __str__(self) -> str:
        return self.canonical_string()


_Key = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class MonomialSum:
    """Finite integer combination of monomials, like terms merged."""

    terms: dict[_Key, int] = field(default_factory=dict)

    def __post_init__(self):
        for key, coeff in list(self.terms.items()):
            if coeff == 0:
                del self.terms[key]

    @staticmethod
    def zero() -> "MonomialSum":
        return MonomialSum({})

    @staticmethod
    def constant(c: int, n: int) -> "MonomialSum":
        if c == 0:
            return MonomialSum.zero()
        return MonomialSum({((0,) * n, (0,) * n): c})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "MonomialSum") -> "MonomialSum":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, 0) + coeff
        return MonomialSum(terms)

    def __sub__(self, other: "MonomialSum") -> "MonomialSum":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms.get(key, 0) - coeff
        return MonomialSum(terms)

    def __neg__(self) -> "MonomialSum":
        return MonomialSum({key: -c for key, c in self.terms.items()})

    def __mul__(self, other: "MonomialSum | SignedMonomial | int") -> "MonomialSum":
        if isinstance(other, int):
            return MonomialSum({key: c * other for key, c in self.terms.items()})
        if isinstance(other, SignedMonomial):
            other = other.as_sum()
        terms: dict[_Key, int] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (
                    tuple(x + y for x, y in zip(a1, a2)),
                    tuple(x + y for x, y in zip(b1, b2)),
                )
                terms[key] = terms.get(key, 0) + c1 * c2
        return MonomialSum(terms)

    def evaluate(self, shapes: "ShapeAssignment") -> mpmath.mpc:
        shapes.require_non_degenerate()
        with mp.workprec(shapes.precision_bits):
            total = mp.mpc(0)
            for (a, b), coeff in self.terms.items():
                term = mp.mpc(coeff)
                for z, az, bz in zip(shapes.z, a, b):
                    if az:
                        term *= z ** az
                    if bz:
                        term *= (1 - z) ** bz
                total += term
        return total

    def derivative(self, i: int) -> "MonomialSum":
        out = MonomialSum.zero()
        for (a, b), coeff in self.terms.items():
            mono = SignedMonomial(1 if coeff > 0 else -1, a, b)
            out = out + mono.derivative(i) * abs(coeff)
        return out

    def canonical_string(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for (a, b) in sorted(self.terms):
            coeff = self.terms[(a, b)]
            mono = SignedMonomial(1, a, b).canonical_string()
            mag = abs(coeff)
            body = mono if mag == 1 else f"{mag}*{mono}"
            pieces.append(("- " if coeff < 0 else "+ ") + body)
        head = pieces[0]
        head = ("-" + head[2:]) if head.startswith("- ") else head[2:]
        return " ".join([head] + pieces[1:])

    def __str__(self) -> str:
        return self.canonical_string()


@dataclass(frozen=True)
class ShapeAssignment:
    """A point of the shape variety: one complex shape per tetrahedron."""

    z: tuple[mpmath.mpc, ...]
    precision_bits: int = 256
    guard: float = DEGENERACY_GUARD

    @staticmethod
    def from_values(values, precision_bits: int = 256, guard: float = DEGENERACY_GUARD):
        with mp.workprec(precision_bits):
            z = tuple(mp.mpc(v) for v in values)
        return ShapeAssignment(z, precision_bits, guard)

    @property
    def n(self) -> int:
        return len(self.z)

    def is_degenerate(self) -> bool:
        return any(abs(z) < self.guard or abs(1 - z) < self.guard for z in self.z)

    def require_non_degenerate(self):
        if self.is_degenerate():
            raise DegenerateShapeError(
                "shape assignment has a coordinate within %.1e of {0, 1}" % self.guard
            )

    def is_geometric(self) -> bool:
        return all(z.imag > 0 for z in self.z)

    def with_precision(self, precision_bits: int) -> "ShapeAssignment":
        return ShapeAssignment(self.z, precision_bits, self.guard)


def evaluate(fn: SignedMonomial | MonomialSum, shapes: ShapeAssignment) -> mpmath.mpc:
    """Value of a monomial or monomial sum at a shape assignment."""
    return fn.evaluate(shapes)


def partial_derivative(fn: SignedMonomial | MonomialSum, i: int) -> MonomialSum:
    """Exact partial derivative; a MonomialSum in the same Laurent ring."""
    return fn.derivative(i)


def _require_words(tri: "IdealTriangulation"):
    if not getattr(tri, "tau_capable", True):
        raise MuOnlyDataError(
            "triangulation was imported from an exponent matrix; "
            "ordered corner words (hence tau) are unavailable"
        )


def mu(tri: "IdealTriangulation", curve: "CuspCurve") -> SignedMonomial:
    """Dilation part of the peripheral holonomy of a closed cusp curve.

    The product of all right-hand fan words along the curve, times (-1)^m
    for a curve through m vertices.
    """
    n = tri.n_tet
    m = len(curve.vertices)
    out = SignedMonomial.one(n) if m % 2 == 0 else -SignedMonomial.one(n)
    for vertex in curve.vertices:
        out = out * SignedMonomial.from_word(n, vertex.word)
    return out


def tau(tri: "IdealTriangulation", curve: "CuspCurve") -> MonomialSum:
    """Translation part of the peripheral holonomy, normalized at the
    reference edge: the alternating sum of leading partial products.

    w_0 comes from the curve's w0_word (empty word means w_0 = 1); the
    later w_j are the stored fan words.
    """
    _require_words(tri)
    n = tri.n_tet
    m = len(curve.vertices)
    partial = SignedMonomial.from_word(n, curve.w0_word)
    total = partial.as_sum()
    for l in range(1, m):
        partial = partial * SignedMonomial.from_word(n, curve.vertices[l].word)
        term = partial.as_sum()
        total = (total - term) if l % 2 else (total + term)
    return total


def cusp_parameter(tri: "IdealTriangulation", cusp: "CuspData") -> tuple[MonomialSum, MonomialSum]:
    """The cusp parameter as the exact pair (tau(longitude), tau(meridian)).

    The quotient is only ever formed numerically, at evaluation time; the
    pair stays in the monomial-sum ring.
    """
    return tau(tri, cusp.longitude), tau(tri, cusp.meridian)


def evaluate_cusp_parameter(
    pair: tuple[MonomialSum, MonomialSum], shapes: ShapeAssignment
) -> mpmath.mpc:
    """Numerical value tau(l)/tau(m); raises if the denominator vanishes."""
    num = pair[0].evaluate(shapes)
    den = pair[1].evaluate(shapes)
    with mp.workprec(shapes.precision_bits):
        if abs(den) < mp.mpf(2) ** (-shapes.precision_bits // 2):
            raise ZeroDivisionError(
                "tau(meridian) vanishes at this point; the cusp parameter "
                "is undefined here (degenerate input or far from the "
                "complete structure)"
            )
        return num / den
