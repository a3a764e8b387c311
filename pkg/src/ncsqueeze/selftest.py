"""Quick oracle-equivalence and fixed-point checks behind ``ncsqueeze selftest``."""

from __future__ import annotations

import math

import numpy as np

from .beamsplitter import make_config
from .entanglement import entropy_of_state, entropy_quadruple_sum_oracle
from .model import DeformedOscillator
from .states import (
    StateSpec,
    build_state,
    closed_form_I,
    converge_truncation,
    fock_state,
    ho_squeezed,
    nc_squeezed,
    recurrence_I,
)


def _single_photon():
    res = entropy_of_state(fock_state(1), make_config(), von_neumann=True)
    ok = abs(res.linear_entropy - 0.5) <= 1e-12 and abs(res.von_neumann - 1.0) <= 1e-9
    return ok, f"S={res.linear_entropy!r} S_vN={res.von_neumann!r}"


def _coherent_product():
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        vec, _ = converge_truncation(StateSpec("ho_coherent", alpha), 1e-10)
        worst = max(worst, entropy_of_state(vec, make_config()).linear_entropy)
    return worst <= 1e-6, f"max S={worst:.3g}"


def _recurrence_vs_closed_form():
    worst = 0.0
    for tau in (0.1, 0.5):
        model = DeformedOscillator(tau)
        for zeta in (0.25, 0.75):
            for alpha in (0.0, 0.5, 1.0, 2.0):
                vals = recurrence_I(alpha, zeta, model, 30).values
                for n in range(31):
                    dev = abs(vals[n] - closed_form_I(alpha, zeta, model, n)) / max(abs(vals[n]), 1.0)
                    worst = max(worst, dev)
    return worst <= 1e-9, f"max rel dev={worst:.3g}"


def _tau_zero_reduction():
    worst = 0.0
    model = DeformedOscillator(0.0)
    for zeta in (0.25, 0.75):
        for alpha in (0.0, 0.5, 1.0, 2.0):
            a = nc_squeezed(alpha, zeta, model, 40, tail_tol=math.inf).coeffs
            b = ho_squeezed(alpha, zeta, 40).coeffs
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst <= 1e-9, f"max dev={worst:.3g}"


def _oracle_equivalence():
    worst = 0.0
    bs = make_config()
    for alpha in (0.5, 1.0, 2.0):
        spec = StateSpec("nc_squeezed", alpha, 0.5, DeformedOscillator(0.5))
        matrix = entropy_of_state(build_state(spec, 10), bs).linear_entropy
        worst = max(worst, abs(matrix - entropy_quadruple_sum_oracle(spec, bs, 10)))
    return worst <= 1e-10, f"max |dS|={worst:.3g}"


CHECKS = (
    ("single-photon benchmark", _single_photon),
    ("coherent product state", _coherent_product),
    ("recurrence vs hypergeometric", _recurrence_vs_closed_form),
    ("tau=0 Hermite reduction", _tau_zero_reduction),
    ("matrix vs quadruple-sum entropy", _oracle_equivalence),
)


def run_checks():
    for name, check in CHECKS:
        ok, detail = check()
        yield name, ok, detail
