"""Lossless beam splitter acting on (state in port a) x (vacuum in port b).

Only the known Fock action is used:

    B |n>_a |0>_b = sum_q sqrt(C(n, q)) t^q r^(n-q) |q>_c |n-q>_d

so the output amplitude on |q>_c |m>_d is c_{q+m} sqrt(C(q+m, q)) t^q r^m.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .numerics import log_factorial
from .states import FockVector


@dataclass(frozen=True)
class BeamSplitterConfig:
    theta: float
    phi: float
    r: complex
    t: float


def make_config(theta: float = math.pi / 2, phi: float = 0.0) -> BeamSplitterConfig:
    """r = -exp(-i phi) sin(theta/2), t = cos(theta/2)."""
    theta, phi = float(theta), float(phi)
    r = -cmath.exp(-1j * phi) * math.sin(theta / 2)
    return BeamSplitterConfig(theta, phi, r, math.cos(theta / 2))


@dataclass(frozen=True, eq=False)
class BipartiteAmplitudes:
    """O[q, m] on the triangle q + m <= N; zero elsewhere."""

    amps: np.ndarray
    truncation: int

    def to_json(self) -> dict:
        qs, ms = np.nonzero(self.amps)
        return {
            "truncation": self.truncation,
            "amps": [
                [int(q), int(m), float(self.amps[q, m].real), float(self.amps[q, m].imag)]
                for q, m in zip(qs, ms)
            ],
        }


def _sqrt_binomial_table(N: int) -> np.ndarray:
    """S[q, m] = sqrt(C(q+m, q)) for q + m <= N, else 0."""
    lf = np.array([log_factorial(i) for i in range(N + 1)])
    q = np.arange(N + 1)[:, None]
    m = np.arange(N + 1)[None, :]
    inside = q + m <= N
    total = np.where(inside, q + m, 0)
    return np.where(inside, np.exp(0.5 * (lf[total] - lf[q] - lf[m])), 0.0)


def _powers(x: complex, N: int) -> np.ndarray:
    out = np.empty(N + 1, dtype=complex)
    out[0] = 1.0
    for i in range(1, N + 1):
        out[i] = out[i - 1] * x
    return out


def mix_with_vacuum(state: FockVector | np.ndarray, bs: BeamSplitterConfig) -> BipartiteAmplitudes:
    """Send a normalized state through port a with vacuum in port b."""
    c = np.asarray(state.coeffs if isinstance(state, FockVector) else state, dtype=complex)
    N = len(c) - 1
    q = np.arange(N + 1)[:, None]
    m = np.arange(N + 1)[None, :]
    total = np.minimum(q + m, N)
    amps = c[total] * _sqrt_binomial_table(N) * _powers(bs.t, N)[:, None] * _powers(bs.r, N)[None, :]
    amps[q + m > N] = 0.0
    return BipartiteAmplitudes(amps, N)


def output_norm(out: BipartiteAmplitudes) -> float:
    """sum |O[q, m]|**2 with compensated summation."""
    a = np.abs(out.amps).ravel() ** 2
    return math.fsum(a.tolist())
