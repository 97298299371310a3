"""Complex numbers carried as mantissa times e**exponent.

Jost data at small ħ reach e**(±S/ħ) with S/ħ in the thousands, well past
double range, so boundary values and Wronskians travel in this form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Scaled:
    mant: complex
    exp: float = 0.0

    @staticmethod
    def from_log(log_value: complex) -> "Scaled":
        return Scaled(cmath.exp(1j * log_value.imag), float(log_value.real))

    @staticmethod
    def of(z: complex) -> "Scaled":
        return Scaled(complex(z), 0.0).normalized()

    def normalized(self) -> "Scaled":
        m = abs(self.mant)
        if m == 0.0 or not math.isfinite(m):
            return self
        k = math.log(m)
        return Scaled(self.mant / m, self.exp + k)

    def __mul__(self, other) -> "Scaled":
        if isinstance(other, Scaled):
            return Scaled(self.mant * other.mant, self.exp + other.exp).normalized()
        return Scaled(self.mant * other, self.exp).normalized()

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scaled":
        if isinstance(other, Scaled):
            return Scaled(self.mant / other.mant, self.exp - other.exp).normalized()
        return Scaled(self.mant / other, self.exp).normalized()

    def __rtruediv__(self, other) -> "Scaled":
        return Scaled.of(other) / self

    def __add__(self, other) -> "Scaled":
        if not isinstance(other, Scaled):
            other = Scaled.of(other)
        if self.mant == 0:
            return other
        if other.mant == 0:
            return self
        e = max(self.exp, other.exp)
        m = self.mant * math.exp(self.exp - e) + other.mant * math.exp(other.exp - e)
        return Scaled(m, e).normalized()

    __radd__ = __add__

    def __neg__(self) -> "Scaled":
        return Scaled(-self.mant, self.exp)

    def __sub__(self, other) -> "Scaled":
        if not isinstance(other, Scaled):
            other = Scaled.of(other)
        return self + (-other)

    def conj(self) -> "Scaled":
        return Scaled(self.mant.conjugate(), self.exp)

    def log_abs(self) -> float:
        return math.log(abs(self.mant)) + self.exp if self.mant != 0 else -math.inf

    def log10_abs(self) -> float:
        return self.log_abs() / math.log(10.0)

    def to_complex(self) -> complex:
        if self.mant == 0:
            return 0j
        if self.exp > 709.0:
            return complex(math.inf, 0.0)
        if self.exp < -745.0:
            return 0j
        return self.mant * math.exp(self.exp)

    def __abs__(self) -> float:
        return abs(self.to_complex())
