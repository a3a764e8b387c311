import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncsqueeze.beamsplitter import make_config, mix_with_vacuum, output_norm
from ncsqueeze.model import DeformedOscillator
from ncsqueeze.states import fock_state, ho_coherent, nc_squeezed, normalize


def test_config_examples():
    bs = make_config(math.pi / 2, 0.0)
    assert bs.t == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert bs.r == pytest.approx(-1 / math.sqrt(2), abs=1e-15)
    ident = make_config(0.0, 1.1)
    assert ident.t == 1 and ident.r == 0
    full = make_config(math.pi, math.pi / 2)
    assert abs(full.t) < 1e-15 and abs(full.r) == pytest.approx(1, abs=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_config_unitarity(theta, phi):
    bs = make_config(theta, phi)
    assert abs(abs(bs.r) ** 2 + abs(bs.t) ** 2 - 1) <= 1e-15


def test_single_photon_split():
    out = mix_with_vacuum(fock_state(1), make_config())
    assert out.amps[1, 0] == pytest.approx(1 / math.sqrt(2))
    assert out.amps[0, 1] == pytest.approx(-1 / math.sqrt(2))
    assert np.count_nonzero(out.amps) == 2


def test_vacuum_stays_vacuum():
    out = mix_with_vacuum(fock_state(0, 6), make_config(1.0, 0.3))
    assert out.amps[0, 0] == 1 and np.count_nonzero(out.amps) == 1


def test_coherent_input_gives_product_state():
    N = 24
    bs = make_config()
    out = mix_with_vacuum(ho_coherent(1.0, N), bs)
    # analytic: |alpha> -> |t alpha>|r alpha>, truncated to q + m <= N
    q = np.arange(N + 1)
    fact = np.array([math.factorial(i) for i in q], dtype=float)
    a = (bs.t * 1.0) ** q / np.sqrt(fact)
    b = (bs.r * 1.0) ** q / np.sqrt(fact)
    product = np.outer(a, b)
    product[q[:, None] + q[None, :] > N] = 0
    product /= np.linalg.norm(product)
    assert np.max(np.abs(out.amps - product)) <= 1e-10


def test_triangle_support_and_norm():
    v = nc_squeezed(1.0, 0.5, DeformedOscillator(0.5), 16, tail_tol=math.inf)
    out = mix_with_vacuum(v, make_config(1.1, 0.4))
    q = np.arange(17)
    assert np.all(out.amps[q[:, None] + q[None, :] > 16] == 0)
    assert abs(output_norm(out) - 1) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 14),
    theta=st.floats(0, 2 * math.pi),
    phi=st.floats(0, 2 * math.pi),
    seed=st.integers(0, 2 ** 32 - 1),
)
def test_photon_number_conservation(n, theta, phi, seed):
    rng = np.random.default_rng(seed)
    c = normalize(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)).coeffs
    out = mix_with_vacuum(c, make_config(theta, phi))
    weights = np.abs(out.amps) ** 2
    for level in range(n + 1):
        diag = sum(weights[qq, level - qq] for qq in range(level + 1))
        assert abs(diag - abs(c[level]) ** 2) <= 1e-12


def test_amplitudes_json_lists_nonzero_entries():
    out = mix_with_vacuum(fock_state(1), make_config())
    data = json.loads(json.dumps(out.to_json()))
    assert data["truncation"] == 1
    entries = {(q, m): (re, im) for q, m, re, im in data["amps"]}
    assert set(entries) == {(1, 0), (0, 1)}
    assert entries[(0, 1)][0] == pytest.approx(-1 / math.sqrt(2))
