"""Truncated Taylor series ("jets") with complex coefficients.

A jet of order d stores a_0..a_d of sum_k a_k w^k. Arithmetic and the
elementary functions below are exact up to w^d; derivatives at the expansion
point are recovered as k! a_k.
"""
import cmath
import math
from enum import Enum
from typing import Sequence, Union

import numpy as np

from app.exceptions import BranchError, InvalidParameterError

Scalar = Union[int, float, complex]


class JetFunction(str, Enum):
    EXP = "exp"
    SIN = "sin"
    COS = "cos"
    SQRT = "sqrt"
    RECIPROCAL = "reciprocal"


class Jet:
    __slots__ = ("coeffs",)
    # numpy scalars defer to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, coeffs: Sequence[Scalar], order: int = None):
        values = np.asarray(coeffs, dtype=complex).ravel()
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise InvalidParameterError(f"jet order must be >= 0, got {order}")
        padded = np.zeros(order + 1, dtype=complex)
        size = min(len(values), order + 1)
        padded[:size] = values[:size]
        self.coeffs = padded

    @classmethod
    def constant(cls, value: Scalar, order: int) -> "Jet":
        return cls([value], order)

    @classmethod
    def variable(cls, at: Scalar, order: int) -> "Jet":
        """The identity function w expanded around ``at``."""
        return cls([at, 1.0], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> complex:
        return complex(self.coeffs[0])

    def derivative(self, k: int) -> complex:
        if not 0 <= k <= self.order:
            raise InvalidParameterError(f"derivative order {k} outside jet order {self.order}")
        return complex(self.coeffs[k]) * math.factorial(k)

    def derivatives(self) -> np.ndarray:
        factorials = np.array([math.factorial(k) for k in range(self.order + 1)], dtype=float)
        return self.coeffs * factorials

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise InvalidParameterError(
                    f"cannot combine jets of order {self.order} and {other.order}"
                )
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        return Jet(self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs)

    def __sub__(self, other):
        return Jet(self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return Jet(self._coerce(other).coeffs - self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs * complex(other))
        other = self._coerce(other)
        return Jet(np.convolve(self.coeffs, other.coeffs)[: self.order + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.coeffs / complex(other))
        return self * jet_reciprocal(self._coerce(other))

    def __rtruediv__(self, other):
        return jet_reciprocal(self) * other

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise InvalidParameterError("jets support non-negative integer powers only")
        result = Jet.constant(1.0, self.order)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __repr__(self) -> str:
        return f"Jet({self.coeffs.tolist()!r})"


def _weighted(x: Jet) -> np.ndarray:
    # k a_k, used by the derivative recurrences below
    return np.arange(x.order + 1) * x.coeffs


def jet_exp(x: Jet) -> Jet:
    # b' = b x'  =>  k b_k = sum_{j=1..k} j a_j b_{k-j}
    d = x.order
    a = _weighted(x)
    b = np.zeros(d + 1, dtype=complex)
    b[0] = cmath.exp(x.coeffs[0])
    for k in range(1, d + 1):
        b[k] = np.dot(a[1 : k + 1], b[k - 1 :: -1][:k]) / k
    return Jet(b)


def jet_sin_cos(x: Jet):
    # s' = c x', c' = -s x'
    d = x.order
    a = _weighted(x)
    s = np.zeros(d + 1, dtype=complex)
    c = np.zeros(d + 1, dtype=complex)
    s[0] = cmath.sin(x.coeffs[0])
    c[0] = cmath.cos(x.coeffs[0])
    for k in range(1, d + 1):
        s[k] = np.dot(a[1 : k + 1], c[k - 1 :: -1][:k]) / k
        c[k] = -np.dot(a[1 : k + 1], s[k - 1 :: -1][:k]) / k
    return Jet(s), Jet(c)


def jet_sin(x: Jet) -> Jet:
    return jet_sin_cos(x)[0]


def jet_cos(x: Jet) -> Jet:
    return jet_sin_cos(x)[1]


def jet_sqrt(x: Jet) -> Jet:
    # b^2 = a  =>  b_k = (a_k - sum_{j=1..k-1} b_j b_{k-j}) / (2 b_0)
    a0 = x.coeffs[0]
    if a0 == 0:
        raise BranchError("sqrt of a jet with vanishing constant term has no Taylor expansion")
    d = x.order
    b = np.zeros(d + 1, dtype=complex)
    b[0] = cmath.sqrt(a0)
    for k in range(1, d + 1):
        cross = np.dot(b[1:k], b[k - 1 : 0 : -1]) if k > 1 else 0.0
        b[k] = (x.coeffs[k] - cross) / (2 * b[0])
    return Jet(b)


def jet_reciprocal(x: Jet) -> Jet:
    # b a = 1  =>  b_k = -(sum_{j=1..k} a_j b_{k-j}) / a_0
    a0 = x.coeffs[0]
    if a0 == 0:
        raise BranchError("reciprocal of a jet with vanishing constant term is singular")
    d = x.order
    b = np.zeros(d + 1, dtype=complex)
    b[0] = 1.0 / a0
    for k in range(1, d + 1):
        b[k] = -np.dot(x.coeffs[1 : k + 1], b[k - 1 :: -1][:k]) / a0
    return Jet(b)


_ELEMENTARY = {
    JetFunction.EXP: jet_exp,
    JetFunction.SIN: jet_sin,
    JetFunction.COS: jet_cos,
    JetFunction.SQRT: jet_sqrt,
    JetFunction.RECIPROCAL: jet_reciprocal,
}


def jet_elementary(f: Union[JetFunction, str], x: Jet) -> Jet:
    try:
        function = JetFunction(f)
    except ValueError:
        raise InvalidParameterError(f"unknown jet function {f!r}")
    return _ELEMENTARY[function](x)


def jet_power_series(coefficients: Sequence[Scalar], x: Jet) -> Jet:
    """sum_j coefficients[j] x^j by Horner's rule on jets."""
    result = Jet.constant(0.0, x.order)
    for coefficient in reversed(list(coefficients)):
        result = result * x + coefficient
    return result
