"""Minimal-length deformed oscillator: k(n) = A n + B n**2 with A = 1 + tau/2, B = tau/2.

Units are hbar = omega = m = 1, so tau is the only model input. Everything is
first order in tau.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .numerics import pochhammer_rising


class PerturbativeRangeWarning(UserWarning):
    """tau is beyond the range where the first-order expansion is trusted."""


@dataclass(frozen=True)
class DeformedOscillator:
    tau: float = 0.0
    A: float = field(init=False)
    B: float = field(init=False)

    def __post_init__(self):
        tau = float(self.tau)
        if not tau >= 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau!r}")
        if tau > 1.0:
            warnings.warn(
                f"tau={tau} > 1: first-order perturbative results may be unreliable",
                PerturbativeRangeWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "A", 1.0 + tau / 2.0)
        object.__setattr__(self, "B", tau / 2.0)

    @property
    def is_undeformed(self) -> bool:
        return self.tau == 0.0

    def k(self, n: int) -> float:
        return self.A * n + self.B * n * n

    def f(self, n: int) -> float:
        # f(0) = sqrt(A) by convention; it only ever meets k(0) = 0 or f(0)! = 1
        return math.sqrt(self.A + self.B * n)

    def energy(self, n: int) -> float:
        return self.k(n)

    def log_f_factorial(self, n: int) -> float:
        """ln of f(1) f(2) ... f(n)."""
        return 0.5 * math.fsum(math.log(self.A + self.B * i) for i in range(1, n + 1))

    def log_rho(self, n: int) -> float:
        """ln rho(n) = ln k(1) k(2) ... k(n)."""
        return math.fsum(math.log(self.k(i)) for i in range(1, n + 1))

    def log_rho_table(self, n_max: int) -> list[float]:
        out = [0.0]
        for i in range(1, n_max + 1):
            out.append(out[-1] + math.log(self.k(i)))
        return out

    def f_factorial_log_ratio(self, n: int, target: int) -> float:
        """ln(f(n)!) - ln(f(target)!) for target = n +/- 4."""
        if abs(n - target) != 4 or target < 0 or n < 0:
            raise ValueError(f"only shifts of +/-4 are supported, got n={n}, target={target}")
        lo, hi = min(n, target), max(n, target)
        s = 0.5 * math.fsum(math.log(self.A + self.B * i) for i in range(lo + 1, hi + 1))
        return s if n > target else -s


def k(model: DeformedOscillator, n: int) -> float:
    return model.k(n)


def f(model: DeformedOscillator, n: int) -> float:
    return model.f(n)


def energy(model: DeformedOscillator, n: int) -> float:
    return model.energy(n)


def log_rho(model: DeformedOscillator, n: int) -> float:
    return model.log_rho(n)


def f_factorial_log_ratio(model: DeformedOscillator, n: int, target: int) -> float:
    return model.f_factorial_log_ratio(n, target)


@dataclass(frozen=True)
class EigenstateExpansion:
    """First-order eigenstate as a sparse {Fock index: coefficient} map."""

    center: int
    terms: dict

    def __getitem__(self, index: int) -> float:
        return self.terms.get(index, 0.0)


def perturbed_eigenstate(model: DeformedOscillator, n: int) -> EigenstateExpansion:
    """|phi_n> = |n> - tau/16 sqrt((n-3)^(4)) |n-4> + tau/16 sqrt((n+1)^(4)) |n+4>."""
    if model.tau == 0.0:
        return EigenstateExpansion(n, {n: 1.0})
    eps = model.tau / 16.0
    terms = {n: 1.0, n + 4: eps * math.sqrt(pochhammer_rising(n + 1, 4))}
    if n >= 4:
        terms[n - 4] = -eps * math.sqrt(pochhammer_rising(n - 3, 4))
    return EigenstateExpansion(n, terms)


