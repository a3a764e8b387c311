"""Truncated Fock-space vectors for coherent and squeezed states.

Four families are supported:

* ``nc_coherent``  -- coherent states of the deformed oscillator
* ``nc_squeezed``  -- squeezed states of the deformed oscillator
* ``ho_squeezed``  -- ordinary squeezed states (Hermite form)
* ``ho_coherent``  -- ordinary Glauber coherent states

Unnormalized coefficients are assembled as complex mantissas with a separate
log scale and only exponentiated relative to the largest entry, so sqrt(rho(n))
values far beyond double range never materialize.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import DeformedOscillator
from .numerics import (
    DegenerateParameterError,
    hermite_table,
    log_factorial,
    pochhammer_rising,
    principal_power,
    terminating_2f1,
)

DEFAULT_TAIL_TOL = 1e-8
_RESCALE_AT = 1e150


class TruncationWarning(UserWarning):
    """The estimated probability beyond the truncation exceeds the tolerance."""


class ZeroVectorError(ValueError):
    pass


class Family(str, enum.Enum):
    NC_COHERENT = "nc_coherent"
    NC_SQUEEZED = "nc_squeezed"
    HO_SQUEEZED = "ho_squeezed"
    HO_COHERENT = "ho_coherent"

    @classmethod
    def parse(cls, name) -> "Family":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(f.value.replace("_", "-") for f in cls)
            raise ValueError(f"unknown state family {name!r} (choose from {choices})") from None

    @property
    def squeezed(self) -> bool:
        return self in (Family.NC_SQUEEZED, Family.HO_SQUEEZED)

    @property
    def deformed(self) -> bool:
        return self in (Family.NC_COHERENT, Family.NC_SQUEEZED)


@dataclass(frozen=True)
class StateSpec:
    family: Family
    alpha: complex = 0j
    zeta: complex = 0j
    model: DeformedOscillator = DeformedOscillator(0.0)

    def __post_init__(self):
        fam = Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "zeta", complex(self.zeta))
        if fam.squeezed and self.zeta == 0:
            raise ValueError(f"{fam.value} needs zeta != 0; use the coherent family instead")
        if not fam.squeezed and self.zeta != 0:
            raise ValueError(f"{fam.value} requires zeta = 0, got {self.zeta}")

    @property
    def tau(self) -> float:
        # ho_* families ignore the deformation
        return self.model.tau if self.family.deformed else 0.0


@dataclass(frozen=True, eq=False)
class FockVector:
    """Normalized coefficients c_0..c_N with truncation diagnostics."""

    coeffs: np.ndarray
    tail_mass: float = 0.0
    norm_log: float = 0.0
    spec: StateSpec | None = None

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def to_json(self) -> dict:
        spec = self.spec
        if spec is None:
            family, alpha, zeta, tau = "raw", 0j, 0j, 0.0
        else:
            family, alpha, zeta, tau = spec.family.value, spec.alpha, spec.zeta, spec.tau
        return {
            "family": family,
            "alpha": [alpha.real, alpha.imag],
            "zeta": [zeta.real, zeta.imag],
            "tau": tau,
            "truncation": self.truncation,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "tail_mass": self.tail_mass,
        }


@dataclass(frozen=True, eq=False)
class RecurrenceTable:
    """I(alpha, zeta, n) stored as ``mantissa * exp(log_scale)``.

    The log scale stays 0 until a mantissa passes 1e150, so at ordinary sizes
    the mantissas are the recurrence values themselves.
    """

    mantissa: np.ndarray
    log_scale: np.ndarray

    @property
    def values(self) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.mantissa * np.exp(self.log_scale)

    def __len__(self):
        return len(self.mantissa)


def recurrence_I(alpha: complex, zeta: complex, model: DeformedOscillator, n_max: int) -> RecurrenceTable:
    """Solve I(n+1) = alpha I(n) - zeta k(n) I(n-1) with I(0) = 1, I(1) = alpha."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    alpha, zeta = complex(alpha), complex(zeta)
    mant = np.empty(n_max + 1, dtype=complex)
    scale = np.zeros(n_max + 1)
    prev, cur, s = 1.0 + 0j, alpha, 0.0
    mant[0], mant[1] = prev, cur
    for n in range(1, n_max):
        nxt = alpha * cur - zeta * model.k(n) * prev
        big = abs(nxt)
        if big > _RESCALE_AT:
            cur, nxt, s = cur / big, nxt / big, s + math.log(big)
        prev, cur = cur, nxt
        mant[n + 1], scale[n + 1] = cur, s
    return RecurrenceTable(mant, scale)


def closed_form_I(alpha: complex, zeta: complex, model: DeformedOscillator, n: int) -> complex:
    """Hypergeometric closed form of I(alpha, zeta, n); needs B > 0 and zeta != 0."""
    zeta = complex(zeta)
    if model.B == 0 or zeta == 0:
        raise DegenerateParameterError("closed form needs B > 0 and zeta != 0")
    A, B = model.A, model.B
    zb = zeta * B
    b = 0.5 + A / (2 * B) + 1j * complex(alpha) / (2 * cmath.sqrt(zb))
    c = 1.0 + A / B
    prefactor = (1j ** n) * principal_power(zb, n / 2) * pochhammer_rising(c, n)
    return prefactor * terminating_2f1(n, b, c, 2.0)


def _combine(parts) -> tuple[complex, float]:
    """Sum of ``m * exp(s)`` pairs, returned as one ``(mantissa, scale)`` pair."""
    live = [(m, s) for m, s in parts if m != 0]
    if not live:
        return 0j, 0.0
    ref = max(s + math.log(abs(m)) for m, s in live)
    return sum(m * math.exp(s - ref) for m, s in live), ref


def _to_log_form(mant: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """Log-magnitudes of ``mant * exp(scale)``; zeros map to -inf."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(mant)) + scale


def _compensated_norm_sq(vals: np.ndarray) -> float:
    return math.fsum((vals.real ** 2).tolist() + (vals.imag ** 2).tolist())


def normalize(coeffs, log_scale=None, *, spec: StateSpec | None = None, tail_mass: float = 0.0) -> FockVector:
    """Divide by the Euclidean norm; ``norm_log`` records ln of that norm.

    ``log_scale`` optionally gives each entry a separate factor ``exp(log_scale[n])``.
    """
    mant = np.asarray(coeffs, dtype=complex)
    scale = np.zeros(len(mant)) if log_scale is None else np.asarray(log_scale, dtype=float)
    logs = _to_log_form(mant, scale)
    if len(mant) == 0 or not np.any(np.isfinite(logs)):
        raise ZeroVectorError("cannot normalize a zero vector")
    live = np.isfinite(logs)
    ref = float(np.max(logs[live]))
    rel = np.zeros(len(mant), dtype=complex)
    with np.errstate(under="ignore"):
        rel[live] = mant[live] / np.abs(mant[live]) * np.exp(logs[live] - ref)
    norm = math.sqrt(_compensated_norm_sq(rel))
    return FockVector(rel / norm, tail_mass=tail_mass, norm_log=ref + math.log(norm), spec=spec)


_TAIL_TERMS = 2


def _finish(mant, scale, N: int, spec: StateSpec) -> FockVector:
    """Normalize entries 0..N; entries N+1.. feed the tail estimate."""
    mant = np.asarray(mant, dtype=complex)
    scale = np.asarray(scale, dtype=float)
    logs = 2 * _to_log_form(mant, scale)
    finite = logs[np.isfinite(logs)]
    if finite.size == 0:
        raise ZeroVectorError("state has no nonzero coefficient")
    ref = float(finite.max())
    with np.errstate(under="ignore"):
        weights = np.where(np.isfinite(logs), np.exp(logs - ref), 0.0)
    total = math.fsum(weights.tolist())
    tail = math.fsum(weights[N + 1:].tolist()) / total
    return normalize(mant[: N + 1], scale[: N + 1], spec=spec, tail_mass=tail)


def _nc_assemble(table: RecurrenceTable, model: DeformedOscillator, n_top: int):
    """Deformed-state coefficients I-combination / sqrt(rho(n)) for n = 0..n_top.

    Each |n> collects I(n), the -tau/16 f(n)!/f(n+4)! I(n+4) correction and,
    for n >= 4, the +tau/16 n!/(n-4)! f(n)!/f(n-4)! I(n-4) correction.
    """
    eps = model.tau / 16.0
    log_rho = model.log_rho_table(n_top)
    mant = np.empty(n_top + 1, dtype=complex)
    scale = np.empty(n_top + 1)
    I_m, I_s = table.mantissa, table.log_scale
    for n in range(n_top + 1):
        parts = [(I_m[n], I_s[n])]
        if eps:
            parts.append((-eps * I_m[n + 4], I_s[n + 4] + model.f_factorial_log_ratio(n, n + 4)))
            if n >= 4:
                lower = log_factorial(n) - log_factorial(n - 4) + model.f_factorial_log_ratio(n, n - 4)
                parts.append((eps * I_m[n - 4], I_s[n - 4] + lower))
        m, s = _combine(parts)
        mant[n], scale[n] = m, s - 0.5 * log_rho[n]
    return mant, scale


def _check_truncation(N: int, minimum: int = 0):
    if N < minimum:
        raise ValueError(f"truncation must be >= {minimum}, got {N}")


def nc_coherent(alpha: complex, model: DeformedOscillator, truncation: int) -> FockVector:
    """Coherent state of the deformed oscillator truncated at Fock level N."""
    _check_truncation(truncation, 8)
    top = truncation + _TAIL_TERMS
    table = recurrence_I(alpha, 0.0, model, top + 4)
    mant, scale = _nc_assemble(table, model, top)
    return _finish(mant, scale, truncation, StateSpec(Family.NC_COHERENT, alpha, 0j, model))


def nc_squeezed(alpha: complex, zeta: complex, model: DeformedOscillator, truncation: int,
                tail_tol: float = DEFAULT_TAIL_TOL) -> FockVector:
    """Squeezed state of the deformed oscillator truncated at Fock level N."""
    _check_truncation(truncation, 8)
    spec = StateSpec(Family.NC_SQUEEZED, alpha, zeta, model)
    top = truncation + _TAIL_TERMS
    table = recurrence_I(alpha, zeta, model, top + 4)
    mant, scale = _nc_assemble(table, model, top)
    vec = _finish(mant, scale, truncation, spec)
    if vec.tail_mass > tail_tol:
        warnings.warn(
            f"tail mass {vec.tail_mass:.3g} exceeds {tail_tol:.3g} at N={truncation}",
            TruncationWarning,
            stacklevel=2,
        )
    return vec


def ho_squeezed(alpha: complex, zeta: complex, truncation: int) -> FockVector:
    """Ordinary squeezed state, c_n ~ (zeta/2)^(n/2) H_n(alpha / sqrt(2 zeta)) / sqrt(n!)."""
    _check_truncation(truncation)
    spec = StateSpec(Family.HO_SQUEEZED, alpha, zeta)
    zeta = spec.zeta
    x = spec.alpha / cmath.sqrt(2 * zeta)
    top = truncation + _TAIL_TERMS
    herm = hermite_table(top, x)
    half = zeta / 2
    log_half, arg_half = math.log(abs(half)), cmath.phase(half)
    mant = np.empty(top + 1, dtype=complex)
    scale = np.empty(top + 1)
    for n in range(top + 1):
        mant[n] = cmath.exp(0.5j * n * arg_half) * herm[n]
        scale[n] = 0.5 * n * log_half - 0.5 * log_factorial(n)
    return _finish(mant, scale, truncation, spec)


def ho_coherent(alpha: complex, truncation: int) -> FockVector:
    """Glauber coherent state, c_n ~ alpha^n / sqrt(n!)."""
    _check_truncation(truncation)
    spec = StateSpec(Family.HO_COHERENT, alpha)
    top = truncation + _TAIL_TERMS
    a = spec.alpha
    mant = np.zeros(top + 1, dtype=complex)
    scale = np.zeros(top + 1)
    mant[0] = 1.0
    if a != 0:
        la, ph = math.log(abs(a)), a / abs(a)
        for n in range(1, top + 1):
            mant[n] = ph ** n
            scale[n] = n * la - 0.5 * log_factorial(n)
    return _finish(mant, scale, truncation, spec)


def build_state(spec: StateSpec, truncation: int) -> FockVector:
    """Build any family at a fixed truncation without emitting tail warnings."""
    fam = spec.family
    if fam is Family.NC_COHERENT:
        return nc_coherent(spec.alpha, spec.model, truncation)
    if fam is Family.NC_SQUEEZED:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            return nc_squeezed(spec.alpha, spec.zeta, spec.model, truncation)
    if fam is Family.HO_SQUEEZED:
        return ho_squeezed(spec.alpha, spec.zeta, truncation)
    return ho_coherent(spec.alpha, truncation)


def converge_truncation(spec: StateSpec, tail_tol: float = DEFAULT_TAIL_TOL,
                        n_start: int = 8, n_max: int = 128) -> tuple[FockVector, bool]:
    """Double N from ``n_start`` until ``tail_mass < tail_tol``, capped at ``n_max``.

    Returns the last vector built and whether the tolerance was met.
    """
    if n_start < 8 or n_max < n_start:
        raise ValueError(f"need 8 <= n_start <= n_max, got {n_start}, {n_max}")
    N = n_start
    while True:
        vec = build_state(spec, N)
        if vec.tail_mass < tail_tol:
            return vec, True
        if N >= n_max:
            return vec, False
        N = min(2 * N, n_max)


def fock_state(n: int, truncation: int | None = None) -> FockVector:
    """The number state |n> as a raw vector."""
    N = n if truncation is None else truncation
    if not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= truncation, got n={n}, truncation={N}")
    c = np.zeros(N + 1, dtype=complex)
    c[n] = 1.0
    return FockVector(c)
