"""Reduced density matrix of the beam-splitter output and its entropies.

The production path works in coefficient space: normalized c_n -> O[q, m]
-> rho_A = O O^dagger -> purity. :func:`entropy_quadruple_sum_oracle`
instead evaluates the four-fold sum over the raw (unnormalized) state
amplitudes, with every factorial carried as a logarithm, and exists to
cross-check the matrix path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamsplitter import BeamSplitterConfig, BipartiteAmplitudes, mix_with_vacuum
from .model import DeformedOscillator
from .numerics import hermite_table, log_factorial, logsumexp, split_log
from .states import Family, FockVector, StateSpec, recurrence_I

EIGEN_CLAMP = 1e-14
PSD_TOL = -1e-10
ORACLE_MAX_N = 12


class JacobiConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return math.fsum(np.real(np.diag(self.entries)).tolist())

    def is_physical(self, tol: float = 1e-12, psd_tol: float = PSD_TOL) -> bool:
        """Hermitian and unit trace within ``tol``, eigenvalues >= ``psd_tol``."""
        e = self.entries
        if np.max(np.abs(e - e.conj().T), initial=0.0) > tol or abs(self.trace() - 1) > tol:
            return False
        return bool(jacobi_eigenvalues(e).min() >= psd_tol)


@dataclass(frozen=True)
class EntropyResult:
    linear_entropy: float
    purity: float
    truncation: int
    von_neumann: float | None = None
    tail_mass: float = 0.0
    converged: bool = True


def reduce_over_d(out: BipartiteAmplitudes) -> DensityMatrix:
    """rho_A[q, s] = sum_m O[q, m] conj(O[s, m])."""
    O = out.amps
    full = O @ O.conj().T
    upper = np.triu(full, 1)
    rho = upper + upper.conj().T + np.diag(np.real(np.diag(full)))
    return DensityMatrix(rho.astype(complex))


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2) as the squared Frobenius norm (rho is Hermitian), capped at 1."""
    return min(1.0, math.fsum((np.abs(rho.entries) ** 2).ravel().tolist()))


def linear_entropy(rho: DensityMatrix) -> EntropyResult:
    p = purity(rho)
    return EntropyResult(linear_entropy=1.0 - p, purity=p, truncation=rho.dim - 1)


def _jacobi_rotate(a: np.ndarray, p: int, q: int) -> None:
    g = a[p, q]
    mag = abs(g)
    if mag < 1e-200:
        a[p, q] = a[q, p] = 0.0
        return
    phase = g / mag
    app, aqq = a[p, p].real, a[q, q].real
    theta = (aqq - app) / (2.0 * mag)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # unitary on the (p, q) plane: phase-align a[p, q], then a real Givens rotation
    M = np.array([[c, s], [-s / phase, c / phase]], dtype=complex)
    idx = [p, q]
    a[:, idx] = a[:, idx] @ M
    a[idx, :] = M.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p], a[q, q] = a[p, p].real, a[q, q].real


def jacobi_eigenvalues(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi sweeps.

    Stops when the off-diagonal Frobenius norm drops below ``tol``.
    """
    a = np.array(h, dtype=complex, copy=True)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol:
            return np.sort(np.real(np.diag(a)))
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, p, q)
    raise JacobiConvergenceError(f"no convergence after {max_sweeps} sweeps")


def von_neumann_entropy(rho: DensityMatrix, clamp: float = EIGEN_CLAMP) -> float:
    """-sum lambda log2 lambda in bits."""
    lam = np.clip(jacobi_eigenvalues(rho.entries), 0.0, 1.0)
    return -math.fsum(float(x * math.log2(x)) for x in lam if x > clamp) + 0.0


def _oracle_amplitudes(state, N: int):
    """Unnormalized log|S(n)|, phase S(n) and ln f(n)! for n = 0..N.

    Raw coefficient vectors are read as undeformed amplitudes, S(n) = c_n sqrt(n!).
    """
    log_f = np.zeros(N + 1)
    if not isinstance(state, StateSpec):
        c = np.asarray(state.coeffs if isinstance(state, FockVector) else state, dtype=complex)
        if len(c) < N + 1:
            c = np.concatenate([c, np.zeros(N + 1 - len(c), dtype=complex)])
        pairs = [split_log(c[n]) for n in range(N + 1)]
        logs = [lg + 0.5 * log_factorial(n) for n, (lg, _) in enumerate(pairs)]
        return np.array(logs), np.array([ph for _, ph in pairs]), log_f

    fam = state.family
    if fam is Family.HO_SQUEEZED:
        x = state.alpha / np.sqrt(2 * state.zeta)
        herm = hermite_table(N, x)
        half = state.zeta / 2
        pairs = [split_log(herm[n] * np.exp(0.5j * n * np.angle(half))) for n in range(N + 1)]
        logs = [lg + 0.5 * n * math.log(abs(half)) for n, (lg, _) in enumerate(pairs)]
        return np.array(logs), np.array([ph for _, ph in pairs]), log_f

    model = state.model if fam.deformed else DeformedOscillator(0.0)
    zeta = state.zeta if fam.squeezed else 0j
    table = recurrence_I(state.alpha, zeta, model, N + 4)
    I = [split_log(m) for m in table.mantissa]
    I = [(lg + s, ph) for (lg, ph), s in zip(I, table.log_scale)]
    eps = model.tau / 16.0
    logs, phases = np.empty(N + 1), np.empty(N + 1, dtype=complex)
    for n in range(N + 1):
        log_f[n] = model.log_f_factorial(n)
        terms = [I[n]]
        if eps:
            lg, ph = I[n + 4]
            terms.append((lg + math.log(eps) + log_f[n] - model.log_f_factorial(n + 4), -ph))
            if n >= 4:
                lg, ph = I[n - 4]
                terms.append((
                    lg + math.log(eps) + log_factorial(n) - log_factorial(n - 4)
                    + log_f[n] - model.log_f_factorial(n - 4),
                    ph,
                ))
        live = [(lg, ph) for lg, ph in terms if lg > -math.inf]
        if not live:
            logs[n], phases[n] = -math.inf, 0j
            continue
        ref = max(lg for lg, _ in live)
        total = sum(ph * math.exp(lg - ref) for lg, ph in live)
        lg, ph = split_log(total)
        logs[n], phases[n] = lg + ref, ph
    return logs, phases, log_f


def _power_log(k: np.ndarray, x: float) -> np.ndarray:
    """k * ln|x| with 0 * ln 0 read as 0."""
    if x == 0.0:
        return np.where(k == 0, 0.0, -np.inf)
    return k * math.log(x)


def entropy_quadruple_sum_oracle(state, bs: BeamSplitterConfig, N: int) -> float:
    """Linear entropy from the four-fold sum over unnormalized amplitudes.

    ``state`` is a :class:`StateSpec` or a raw coefficient vector. Sums run over
    the total-photon triangle q + m <= N.
    """
    if N > ORACLE_MAX_N:
        raise ValueError(f"quadruple-sum oracle is limited to N <= {ORACLE_MAX_N}, got {N}")
    logS, phS, logF = _oracle_amplitudes(state, N)
    lf = np.array([log_factorial(i) for i in range(N + 1)])
    at, ar = abs(bs.t), abs(bs.r)
    with np.errstate(divide="ignore", invalid="ignore"):
        # normalization constant over the output triangle
        q = np.arange(N + 1)[:, None]
        m = np.arange(N + 1)[None, :]
        tot = np.minimum(q + m, N)
        lognorm = (2 * logS[tot] - 2 * logF[tot] - lf[q] - lf[m]
                   + _power_log(2 * q, at) + _power_log(2 * m, ar))
        log_n2 = logsumexp(lognorm[(q + m <= N) & np.isfinite(lognorm)].tolist())

        q, s, m, n = np.meshgrid(*(np.arange(N + 1),) * 4, indexing="ij")
        top = np.maximum(q, s)
        valid = (m + top <= N) & (n + top <= N)
        i1, i2, i3, i4 = (np.where(valid, idx, 0) for idx in (m + q, m + s, n + s, n + q))
        logt = (_power_log(2 * (q + s), at) + _power_log(2 * (m + n), ar)
                + logS[i1] + logS[i2] + logS[i3] + logS[i4]
                - lf[q] - lf[s] - lf[m] - lf[n]
                - logF[i1] - logF[i2] - logF[i3] - logF[i4] - 2 * log_n2)
        phase = phS[i1] * np.conj(phS[i2]) * phS[i3] * np.conj(phS[i4])
        keep = valid & np.isfinite(logt)
        contrib = (phase[keep] * np.exp(logt[keep])).real
    return 1.0 - math.fsum(contrib.tolist())


def entropy_of_state(state: FockVector, bs: BeamSplitterConfig, *, von_neumann: bool = False,
                     converged: bool = True) -> EntropyResult:
    """Full production pipeline: mix with vacuum, trace out mode d, entropies."""
    rho = reduce_over_d(mix_with_vacuum(state, bs))
    lin = linear_entropy(rho)
    vn = von_neumann_entropy(rho) if von_neumann else None
    return EntropyResult(
        linear_entropy=lin.linear_entropy,
        purity=lin.purity,
        truncation=state.truncation,
        von_neumann=vn,
        tail_mass=state.tail_mass,
        converged=converged,
    )
