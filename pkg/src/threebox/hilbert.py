"""Exact complex linear algebra on small Hilbert spaces.

All amplitudes live in the Gaussian rationals: complex numbers whose real and
imaginary parts are exact ``fractions.Fraction`` values.  Irrational global
normalisation factors (such as 1/sqrt(3) for an equal superposition of three
basis states) never appear explicitly: a state vector carries its *squared*
norm scale as an exact rational, and every quantity this package needs
(outcome weights, sandwich traces) is quadratic in the amplitudes, so the
arithmetic never leaves the rationals and every probability is bit-exact.

Matrices are dense tuples of tuples; dimensions are capped at ``MAX_DIM``.
All objects are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

MAX_DIM = 8

RationalLike = Union[Fraction, int]
ScalarLike = Union["ComplexRational", Fraction, int]


@dataclass(frozen=True)
class ComplexRational:
    """A complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def coerce(value: ScalarLike) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (int, Fraction)):
            return ComplexRational(Fraction(value))
        raise TypeError(f"cannot interpret {value!r} as an exact complex scalar")

    def __add__(self, other: ScalarLike) -> "ComplexRational":
        o = ComplexRational.coerce(other)
        return ComplexRational(self.re + o.re, self.im + o.im)

    def __sub__(self, other: ScalarLike) -> "ComplexRational":
        o = ComplexRational.coerce(other)
        return ComplexRational(self.re - o.re, self.im - o.im)

    def __mul__(self, other: ScalarLike) -> "ComplexRational":
        o = ComplexRational.coerce(other)
        return ComplexRational(self.re * o.re - self.im * o.im,
                               self.re * o.im + self.im * o.re)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self) -> "ComplexRational":
        return ComplexRational(-self.re, -self.im)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def __repr__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = ComplexRational()
ONE = ComplexRational(Fraction(1))

Matrix = tuple[tuple[ComplexRational, ...], ...]


def _check_dim(dim: int) -> None:
    if not 1 <= dim <= MAX_DIM:
        raise ValueError(f"dimension {dim} outside supported range 1..{MAX_DIM}")


def as_matrix(rows: Iterable[Iterable[ScalarLike]]) -> Matrix:
    """Coerce nested scalars into a square exact-complex matrix."""
    out = tuple(tuple(ComplexRational.coerce(x) for x in row) for row in rows)
    dim = len(out)
    _check_dim(dim)
    if any(len(row) != dim for row in out):
        raise ValueError("matrix rows must all have the same length as the row count")
    return out


def zero_matrix(dim: int) -> Matrix:
    _check_dim(dim)
    return tuple(tuple(ZERO for _ in range(dim)) for _ in range(dim))


def identity_matrix(dim: int) -> Matrix:
    _check_dim(dim)
    return tuple(tuple(ONE if r == c else ZERO for c in range(dim)) for r in range(dim))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    dim = len(a)
    return tuple(
        tuple(
            sum((a[r][k] * b[k][c] for k in range(dim)), ZERO)
            for c in range(dim)
        )
        for r in range(dim)
    )


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scalar_mul(c: ScalarLike, m: Matrix) -> Matrix:
    s = ComplexRational.coerce(c)
    return tuple(tuple(s * x for x in row) for row in m)


def conj_transpose(m: Matrix) -> Matrix:
    dim = len(m)
    return tuple(tuple(m[c][r].conjugate() for c in range(dim)) for r in range(dim))


def mat_trace(m: Matrix) -> ComplexRational:
    return sum((m[i][i] for i in range(len(m))), ZERO)


def is_hermitian(m: Matrix) -> bool:
    return m == conj_transpose(m)


@dataclass(frozen=True)
class StateVector:
    """A ket with exact amplitudes and a rational squared-norm scale.

    The physical vector is ``sqrt(norm_squared_scale)`` times the stored
    amplitudes; since only squared magnitudes ever matter, the square root is
    never taken.
    """

    dim: int
    amplitudes: tuple[ComplexRational, ...]
    norm_squared_scale: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        if len(self.amplitudes) != self.dim:
            raise ValueError(f"expected {self.dim} amplitudes, got {len(self.amplitudes)}")
        if self.norm_squared_scale <= 0:
            raise ValueError("norm_squared_scale must be positive")

    def norm_squared(self) -> Fraction:
        return self.norm_squared_scale * sum(a.abs_squared() for a in self.amplitudes)

    @property
    def is_normalized(self) -> bool:
        return self.norm_squared() == 1


def state_vector(amplitudes: Sequence[ScalarLike],
                 norm_squared_scale: RationalLike = 1) -> StateVector:
    amps = tuple(ComplexRational.coerce(a) for a in amplitudes)
    return StateVector(len(amps), amps, Fraction(norm_squared_scale))


def basis_state(dim: int, index: int) -> StateVector:
    _check_dim(dim)
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} outside 0..{dim - 1}")
    return StateVector(dim, tuple(ONE if i == index else ZERO for i in range(dim)))


@dataclass(frozen=True)
class Projector:
    """An exactly idempotent, Hermitian matrix."""

    dim: int
    matrix: Matrix

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        if len(self.matrix) != self.dim:
            raise ValueError("projector matrix does not match declared dimension")
        if not is_hermitian(self.matrix):
            raise ValueError("projector must be Hermitian")
        if mat_mul(self.matrix, self.matrix) != self.matrix:
            raise ValueError("projector must be idempotent")


def projector_onto(v: StateVector) -> Projector:
    """Rank-1 projector onto a normalized state."""
    if not v.is_normalized:
        raise ValueError(f"state is not normalized (norm squared {v.norm_squared()})")
    scale = v.norm_squared_scale
    m = tuple(
        tuple((v.amplitudes[r] * v.amplitudes[c].conjugate()) * scale
              for c in range(v.dim))
        for r in range(v.dim)
    )
    return Projector(v.dim, m)


def identity_projector(dim: int) -> Projector:
    return Projector(dim, identity_matrix(dim))


def zero_projector(dim: int) -> Projector:
    return Projector(dim, zero_matrix(dim))


def complement(p: Projector) -> Projector:
    return Projector(p.dim, mat_sub(identity_matrix(p.dim), p.matrix))


@dataclass(frozen=True)
class PVM:
    """A projection-valued measure: orthogonal projectors summing to identity."""

    elements: tuple[Projector, ...]

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("a PVM needs at least one element")
        dim = self.elements[0].dim
        if any(p.dim != dim for p in self.elements):
            raise ValueError("PVM elements must share one dimension")
        for a in range(len(self.elements)):
            for b in range(a + 1, len(self.elements)):
                prod = mat_mul(self.elements[a].matrix, self.elements[b].matrix)
                if prod != zero_matrix(dim):
                    raise ValueError(f"PVM elements {a} and {b} are not orthogonal")
        total = zero_matrix(dim)
        for p in self.elements:
            total = mat_add(total, p.matrix)
        if total != identity_matrix(dim):
            raise ValueError("PVM elements must sum to the identity")

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def __getitem__(self, index: int) -> Projector:
        return self.elements[index]

    def __len__(self) -> int:
        return len(self.elements)


def binary_pvm(p: Projector) -> PVM:
    """Two-outcome PVM ``{1 - P, P}``; outcome 1 is the projector itself."""
    return PVM((complement(p), p))


@dataclass(frozen=True)
class DensityOperator:
    """A Hermitian, trace-one operator (rank-1 pure states in practice)."""

    dim: int
    matrix: Matrix

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        if len(self.matrix) != self.dim:
            raise ValueError("density matrix does not match declared dimension")
        if not is_hermitian(self.matrix):
            raise ValueError("density operator must be Hermitian")
        tr = mat_trace(self.matrix)
        if tr != ONE:
            raise ValueError(f"density operator must have trace 1, got {tr!r}")


def outer_product(v: StateVector) -> DensityOperator:
    """Density operator ``|v><v|`` of a normalized state."""
    proj = projector_onto(v)
    return DensityOperator(v.dim, proj.matrix)


def apply_projector(p: Projector, rho: DensityOperator) -> tuple[Matrix, Fraction]:
    """Project-and-collapse update: return ``P rho P`` and its weight.

    The first component is the unnormalised post-measurement operator (its
    trace equals the weight, so it is deliberately *not* wrapped in
    ``DensityOperator``, which enforces trace one); the second is the outcome
    probability ``Tr[P rho P]`` as an exact rational.
    """
    if p.dim != rho.dim:
        raise ValueError(f"dimension mismatch: projector {p.dim}, state {rho.dim}")
    sandwiched = mat_mul(mat_mul(p.matrix, rho.matrix), p.matrix)
    tr = mat_trace(sandwiched)
    if not tr.is_real:
        raise ValueError(f"outcome weight must be real, got {tr!r}")
    weight = tr.re
    if not 0 <= weight <= 1:
        raise ValueError(f"outcome weight {weight} outside [0, 1]")
    return sandwiched, weight


def trace_product(p: Projector, rho: Union[DensityOperator, Matrix]) -> Fraction:
    """Exact real trace ``Tr[P rho]``; raises if the trace is not real."""
    other = rho.matrix if isinstance(rho, DensityOperator) else rho
    if p.dim != len(other):
        raise ValueError(f"dimension mismatch: projector {p.dim}, operator {len(other)}")
    tr = mat_trace(mat_mul(p.matrix, other))
    if not tr.is_real:
        raise ValueError(f"trace must be real, got {tr!r}; input was not Hermitian")
    return tr.re
