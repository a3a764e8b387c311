"""Overflow-safe scalar special functions.

Factorial-like quantities are carried as natural logs. Complex prefactors are
split into a log-magnitude and a unit phase, see :class:`LogMagnitude`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction


class DegenerateParameterError(ValueError):
    """A series denominator vanishes for the requested parameters."""


@dataclass(frozen=True)
class LogMagnitude:
    """Nonnegative magnitude stored as ``exp(log_abs)``, or exactly zero."""

    log_abs: float = 0.0
    is_zero: bool = False

    @classmethod
    def of(cls, value: complex) -> "LogMagnitude":
        a = abs(value)
        if a == 0.0:
            return cls(0.0, True)
        return cls(math.log(a))

    def value(self) -> float:
        return 0.0 if self.is_zero else math.exp(self.log_abs)

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.is_zero or other.is_zero:
            return LogMagnitude(0.0, True)
        return LogMagnitude(self.log_abs + other.log_abs)


def split_log(value: complex) -> tuple[float, complex]:
    """Return ``(ln|value|, value/|value|)``; zero maps to ``(-inf, 0)``."""
    a = abs(value)
    if a == 0.0:
        return -math.inf, 0j
    return math.log(a), complex(value) / a


def log_factorial(n: int) -> float:
    """ln(n!)."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1)


def log_binomial(n: int, q: int) -> float:
    return log_factorial(n) - log_factorial(q) - log_factorial(n - q)


def pochhammer_rising(x: float, n: int) -> float:
    """Rising factorial x (x+1) ... (x+n-1); 1 for n = 0."""
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def hermite(n: int, x: complex) -> complex:
    """Physicists' Hermite polynomial H_n(x) by upward recurrence."""
    h_prev, h = 1.0 + 0j, 2.0 * x + 0j
    if n == 0:
        return h_prev
    for m in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * m * h_prev
    return h


def hermite_table(n_max: int, x: complex) -> list[complex]:
    """H_0(x) .. H_{n_max}(x) from the same recurrence as :func:`hermite`."""
    out = [1.0 + 0j]
    if n_max >= 1:
        out.append(2.0 * x + 0j)
    for m in range(1, n_max):
        out.append(2.0 * x * out[m] - 2.0 * m * out[m - 1])
    return out


def terminating_2f1(n: int, b: complex, c: float, z: float) -> complex:
    """Gauss 2F1(-n, b; c; z) as its finite polynomial.

    At z = 2 the terms alternate and grow far beyond the sum, so plain float
    accumulation loses every digit for n around 20. Binary floats are exact
    rationals; the sum is therefore accumulated exactly in Gaussian rationals
    and rounded once at the end.
    """
    if n < 0:
        raise ValueError(f"terminating_2f1 needs n >= 0, got {n}")
    b = complex(b)
    b_re, b_im = Fraction(b.real), Fraction(b.imag)
    c_q, z_q = Fraction(c), Fraction(z)
    for j in range(n):
        if c_q + j == 0:
            raise DegenerateParameterError(
                f"(c)_j vanishes at j={j + 1} for c={c}, n={n}"
            )
    acc_re, acc_im = Fraction(0), Fraction(0)
    t_re, t_im = Fraction(1), Fraction(0)
    for j in range(n + 1):
        acc_re += t_re
        acc_im += t_im
        if j == n:
            break
        scale = Fraction(j - n) * z_q / ((c_q + j) * (j + 1))
        shifted = b_re + j
        t_re, t_im = (
            (t_re * shifted - t_im * b_im) * scale,
            (t_re * b_im + t_im * shifted) * scale,
        )
    return complex(float(acc_re), float(acc_im))


def principal_power(w: complex, p: float) -> complex:
    """w**p on the principal branch; 0**p = 0 for p > 0 and 1 for p = 0."""
    if p == 0:
        return 1.0 + 0j
    if w == 0:
        return 0j
    return cmath.exp(p * cmath.log(w))


def logsumexp(values) -> float:
    vals = [v for v in values if v != -math.inf]
    if not vals:
        return -math.inf
    top = max(vals)
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))
