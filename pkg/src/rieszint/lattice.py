"""Concrete Riesz spaces: R^d with the componentwise order.

Values are immutable.  Order comparisons are exact; no epsilon is ever
applied here (tolerances belong to convergence verdicts).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import StructuralError

__all__ = [
    "RieszValue",
    "ProductKind",
    "ProductRule",
    "leq",
    "join_meet",
    "abs_parts",
    "apply_product",
    "as_value",
]


def _space_tag(d):
    return f"R{d}"


class RieszValue:
    """An element of R^d ordered componentwise."""

    __slots__ = ("_coords", "_space")

    def __init__(self, coords, space=None):
        arr = np.array(coords, dtype=np.float64).reshape(-1)
        if arr.size == 0:
            raise StructuralError("a Riesz value needs dimension >= 1")
        arr.setflags(write=False)
        self._coords = arr
        self._space = space or _space_tag(arr.size)

    @classmethod
    def zero(cls, dim, space=None):
        return cls(np.zeros(dim), space)

    @property
    def coords(self):
        return self._coords

    @property
    def space(self):
        return self._space

    @property
    def dim(self):
        return self._coords.size

    def _check(self, other):
        if not isinstance(other, RieszValue):
            raise StructuralError(f"expected RieszValue, got {type(other).__name__}")
        if other._space != self._space or other.dim != self.dim:
            raise StructuralError(
                f"space mismatch: {self._space}(d={self.dim}) vs {other._space}(d={other.dim})"
            )

    def _new(self, arr):
        return RieszValue(arr, self._space)

    def __add__(self, other):
        self._check(other)
        return self._new(self._coords + other._coords)

    def __sub__(self, other):
        self._check(other)
        return self._new(self._coords - other._coords)

    def __neg__(self):
        return self._new(-self._coords)

    def __mul__(self, alpha):
        if isinstance(alpha, RieszValue):
            raise StructuralError("use a ProductRule to multiply two Riesz values")
        return self._new(float(alpha) * self._coords)

    __rmul__ = __mul__

    def __or__(self, other):
        return join_meet(self, other)[0]

    def __and__(self, other):
        return join_meet(self, other)[1]

    def __abs__(self):
        return self._new(np.abs(self._coords))

    @property
    def pos(self):
        return self._new(np.maximum(self._coords, 0.0))

    @property
    def neg(self):
        return self._new(np.maximum(-self._coords, 0.0))

    def __le__(self, other):
        return leq(self, other)

    def __ge__(self, other):
        return leq(other, self)

    def __eq__(self, other):
        if not isinstance(other, RieszValue):
            return NotImplemented
        return (
            self._space == other._space
            and self.dim == other.dim
            and bool(np.array_equal(self._coords, other._coords))
        )

    def __hash__(self):
        return hash((self._space, self._coords.tobytes()))

    def __iter__(self):
        return iter(self._coords.tolist())

    def __len__(self):
        return self.dim

    def __getitem__(self, k):
        return float(self._coords[k])

    def is_zero(self):
        return not np.any(self._coords)

    def is_positive(self):
        return bool(np.all(self._coords >= 0.0))

    def norm(self):
        """Sup norm, the natural lattice norm of R^d."""
        return float(np.max(np.abs(self._coords)))

    def tolist(self):
        return self._coords.tolist()

    def __repr__(self):
        body = ", ".join(repr(float(c)) for c in self._coords)
        return f"RieszValue([{body}])"


def as_value(x, space=None):
    """Coerce scalars, sequences and arrays to a RieszValue."""
    if isinstance(x, RieszValue):
        return x
    return RieszValue(np.atleast_1d(np.asarray(x, dtype=np.float64)), space)


def leq(a, b):
    """Componentwise partial order."""
    a._check(b)
    return bool(np.all(a.coords <= b.coords))


def join_meet(a, b):
    a._check(b)
    return (
        a._new(np.maximum(a.coords, b.coords)),
        a._new(np.minimum(a.coords, b.coords)),
    )


def abs_parts(a):
    """Return (|a|, a+, a-) with a = a+ - a-."""
    zero = RieszValue.zero(a.dim, a.space)
    pos = join_meet(a, zero)[0]
    neg = join_meet(-a, zero)[0]
    absolute = join_meet(a, -a)[0]
    return absolute, pos, neg


class ProductKind(str, Enum):
    SCALAR_SCALAR = "scalar*scalar"
    SCALAR_VECTOR = "scalar*vector"
    VECTOR_SCALAR = "vector*scalar"
    COMPONENTWISE = "componentwise"


@dataclass(frozen=True)
class ProductRule:
    """Bilinear, positive-cone-isotone product X x Y -> Z."""

    kind: ProductKind
    dim_x: int = 1
    dim_y: int = 1

    def __post_init__(self):
        kind = ProductKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ProductKind.SCALAR_SCALAR and (self.dim_x, self.dim_y) != (1, 1):
            raise StructuralError("scalar*scalar needs dim_x = dim_y = 1")
        if kind is ProductKind.SCALAR_VECTOR and self.dim_x != 1:
            raise StructuralError("scalar*vector needs dim_x = 1")
        if kind is ProductKind.VECTOR_SCALAR and self.dim_y != 1:
            raise StructuralError("vector*scalar needs dim_y = 1")
        if kind is ProductKind.COMPONENTWISE and self.dim_x != self.dim_y:
            raise StructuralError("componentwise product needs equal dimensions")

    @property
    def dim_z(self):
        return max(self.dim_x, self.dim_y)

    @classmethod
    def infer(cls, dim_x, dim_y):
        if dim_x == 1 and dim_y == 1:
            return cls(ProductKind.SCALAR_SCALAR, 1, 1)
        if dim_x == 1:
            return cls(ProductKind.SCALAR_VECTOR, 1, dim_y)
        if dim_y == 1:
            return cls(ProductKind.VECTOR_SCALAR, dim_x, 1)
        if dim_x == dim_y:
            return cls(ProductKind.COMPONENTWISE, dim_x, dim_y)
        raise StructuralError(f"no product rule for dimensions {dim_x} x {dim_y}")

    def apply_arrays(self, fx, my):
        """Row-wise product of (n, dim_x) and (n, dim_y) arrays -> (n, dim_z)."""
        fx = np.asarray(fx, dtype=np.float64)
        my = np.asarray(my, dtype=np.float64)
        if fx.shape[-1] != self.dim_x or my.shape[-1] != self.dim_y:
            raise StructuralError(
                f"{self.kind.value} expects dims ({self.dim_x}, {self.dim_y}), "
                f"got ({fx.shape[-1]}, {my.shape[-1]})"
            )
        # broadcasting a length-1 trailing axis covers all four kinds
        return fx * my


def apply_product(rule, x, y):
    if x.dim != rule.dim_x or y.dim != rule.dim_y:
        raise StructuralError(
            f"{rule.kind.value} expects dims ({rule.dim_x}, {rule.dim_y}), got ({x.dim}, {y.dim})"
        )
    return RieszValue(rule.apply_arrays(x.coords[None, :], y.coords[None, :])[0])
