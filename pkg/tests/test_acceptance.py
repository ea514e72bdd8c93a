"""Acceptance gate. Each test carries a ``criterion`` marker; conftest prints
one PASS/FAIL line per criterion at the end of the run."""

import subprocess
import sys
import time

import numpy as np
import pytest

from discordlab import channels, measure, protocols, states
from discordlab.correlations import (
    classical_correlation,
    conditional_entropy,
    discord,
    mutual_information,
    von_neumann_entropy,
)

import oracles


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.mark.criterion(1, "Bell-state battery")
def test_bell_battery():
    with Timer() as t:
        rho = states.bell_state(0).density()
        d = discord(rho).value
        i_ab = mutual_information(rho)
        s_cond = conditional_entropy(rho)
        _, _, gain = protocols.fqsw_report(rho)
    assert abs(d - 1) <= 1e-6
    assert abs(i_ab - 2) <= 1e-9
    assert abs(s_cond + 1) <= 1e-9
    assert abs(gain - 1) <= 1e-9
    assert t.elapsed < 1.0


@pytest.mark.criterion(2, "zero discord on quantum-classical states")
def test_zero_discord_family():
    worst = 0.0
    with Timer() as t:
        for seed in range(100):
            # qubit pointer on the measured side; quantum side of dim 2 or 3
            side = "B" if seed % 2 == 0 else "A"
            dq = 2 + (seed // 2) % 2
            probs = states.rng(seed).dirichlet(np.ones(2))
            cond = [states.random_density((dq,), rank=1 + (seed + k) % dq, seed=10_000 + 7 * seed + k) for k in range(2)]
            rho = states.classical_quantum_state(probs, 2, cond, classical_side=side)
            worst = max(worst, abs(discord(rho, side).value))
    assert worst <= 1e-6
    assert t.elapsed < 30


@pytest.mark.criterion(3, "Werner curve matches brute-force grid")
def test_werner_oracle():
    with Timer() as t:
        errs = []
        for p in np.round(np.linspace(0, 1, 11), 12):
            grid = oracles.grid_discord_b(oracles.werner_matrix(p))
            errs.append(abs(discord(states.werner(p)).value - grid))
    assert max(errs) <= 1e-4
    assert t.elapsed < 120


@pytest.mark.criterion(4, "minimum loss over measurements equals discord")
def test_min_loss_equals_discord():
    gaps = []
    with Timer() as t:
        for seed in range(50):
            rho = states.random_density((2, 2), seed=seed)
            # channel path: Neumark measurement channel, entropies of ρ'
            loss = protocols.min_loss_over_measurements(rho)
            # ensemble path: conditional states and Σ p_i S(ρ_{A|i})
            gaps.append(abs(loss - discord(rho).value))
    assert max(gaps) <= 1e-5
    assert t.elapsed < 600


@pytest.mark.criterion(5, "data processing and dilation reconstruction")
def test_data_processing():
    worst = np.inf
    for seed in range(500):
        rho = states.random_density((2, 2), rank=1 + seed % 4, seed=seed)
        ch = channels.random_channel(2, 1 + seed % 4, seed=50_000 + seed)
        prime = channels.apply(ch, rho, 1)
        worst = min(worst, conditional_entropy(prime) - conditional_entropy(rho))
    assert worst >= -1e-9

    err = 0.0
    for seed in range(100):
        rho = states.random_density((2, 2), seed=seed)
        ch = channels.random_channel(2, 1 + seed % 4, seed=60_000 + seed)
        dil = channels.dilate(ch)
        err = max(err, np.max(np.abs(dil.apply(rho, 1).mat - channels.apply(ch, rho, 1).mat)))
    assert err <= 1e-8


@pytest.mark.criterion(6, "A marginal untouched by measuring B")
def test_post_measurement_marginal():
    worst = 0.0
    for seed in range(200):
        dims = (2, 2 + seed % 2)
        rho = states.random_density(dims, seed=seed)
        povm = measure.random_rank1_povm(dims[1], dims[1] + seed % 3, seed=70_000 + seed)
        rho_a = rho.marginal("A")
        averaged = states.DensityOperator((dims[0],), measure.measure_side(rho, povm, "B").average())
        via_channel = channels.apply(channels.measurement_channel(povm), rho, 1).marginal("A")
        assert via_channel.dims == (dims[0],)
        worst = max(worst, states.trace_distance(rho_a, averaged), states.trace_distance(rho_a, via_channel))
    assert worst <= 1e-10


@pytest.mark.criterion(7, "cross-protocol loss identity")
def test_cross_protocol_identity():
    worst = 0.0
    for seed in range(100):
        rho = states.random_density((2, 2), rank=1 + seed % 4, seed=seed)
        ch = channels.random_channel(2, 1 + seed % 4, seed=80_000 + seed)
        losses = [
            protocols.teleportation_report(rho, ch).loss,
            protocols.merging_report(rho, ch).loss,
            protocols.decohered_fqsw_report(rho, ch).loss,
            protocols.dense_coding_report(rho, ch).loss,
        ]
        worst = max(worst, max(losses) - min(losses))
    assert worst <= 1e-12


def _neumark_error(povm, seed):
    rho = states.random_density((povm.dim,), seed=seed).mat
    proj, v = measure.neumark(povm)
    extended = v @ rho @ v.conj().T
    p_ext = np.array([np.trace(e @ extended).real for e in proj.elements])
    return np.max(np.abs(p_ext - povm.probabilities(rho)))


@pytest.mark.criterion(8, "Neumark extension reproduces POVM statistics")
def test_neumark_fidelity():
    errs = [_neumark_error(measure.trine(), s) for s in range(5)]
    for seed in range(50):
        d = 2 + seed % 2
        errs.append(_neumark_error(measure.random_rank1_povm(d, d + seed % 4, seed=90_000 + seed), seed))
    assert max(errs) <= 1e-12


@pytest.mark.criterion(9, "strong subadditivity")
def test_strong_subadditivity():
    worst = -np.inf
    for seed in range(200):
        rho = states.random_density((2, 2, 2), rank=1 + seed % 8, seed=seed)
        s_abc, s_ab = protocols.conditional_entropy_abc(rho)
        worst = max(worst, s_abc - s_ab)
    assert worst <= 1e-9


@pytest.mark.criterion(10, "pure states: discord = J = S(A)")
def test_pure_state_coincidence():
    worst = 0.0
    for seed in range(50):
        dims = (2, 2) if seed < 40 else (2, 3)
        rho = states.random_pure(dims, seed).density()
        s_a = von_neumann_entropy(rho.partial_trace([0]))
        d = discord(rho).value
        j = classical_correlation(rho)
        worst = max(worst, abs(d - s_a), abs(j - s_a), abs(d - j))
    assert worst <= 2e-5


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "discordlab", *argv], capture_output=True, check=True).stdout


@pytest.mark.criterion(11, "byte-identical CSV from sweep and random-scan")
def test_determinism():
    sweep = ("sweep", "--family", "werner", "--step", "0.1", "--quantities", "discord,concurrence,classical_correlation")
    scan = ("random-scan", "--n", "5", "--seed", "42")
    first, second = _cli(*sweep), _cli(*sweep)
    assert first == second and first.count(b"\n") == 12
    first, second = _cli(*scan), _cli(*scan)
    assert first == second and first.count(b"\n") == 6
