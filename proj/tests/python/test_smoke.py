import math
import os
import pathlib

import numpy as np
import pytest

import iontherm as it

REFERENCE_CONFIG = pathlib.Path(__file__).resolve().parents[2] / "configs" / "calcium_reference.conf"


@pytest.fixture(scope="module")
def trap():
    return it.TrapConfig.calcium_reference()


def test_derived_parameters(trap):
    d = it.derive_params(trap)
    assert d.gamma == pytest.approx(math.tan(math.pi / 6) / 1e-3, rel=1e-14)
    assert d.kappa == pytest.approx(10.0)
    assert d.tau_z == pytest.approx(5e-6)


def test_thermal_state_round_trip():
    s = it.thermal_state(2.0, 64)
    assert s.rho.shape == (64, 64)
    assert np.trace(s.rho).real == pytest.approx(1.0, abs=1e-12)
    m = it.moments(s)
    assert m.N == pytest.approx(2.0, abs=1e-6)
    assert m.R == pytest.approx(5.0, abs=1e-5)


def test_state_from_numpy():
    psi = np.zeros(8, dtype=complex)
    psi[0] = psi[2] = 1 / math.sqrt(2)
    s = it.RadialState(np.outer(psi, psi.conj()))
    assert s.dim == 8
    assert it.moments(s).X == pytest.approx(math.sqrt(2.0))  # 2 Re <a^2>


def test_newton_matches_oracle(trap):
    rng = np.random.default_rng(4)
    g = rng.normal(size=(10, 3)) + 1j * rng.normal(size=(10, 3))
    rho = g @ g.conj().T
    s = it.RadialState(rho / np.trace(rho).real)
    a = it.newton_propagate(s, 5e-9, -1e-6, trap)
    b = it.dense_propagate_oracle(s, 5e-9, -1e-6, trap)
    assert np.abs(np.linalg.eigvalsh(a.rho - b.rho)).sum() / 2 < 1e-8


def test_engine_run_moments():
    cfg = it.EngineConfig()
    cfg.quantum_backend = it.QuantumBackend.Moments
    cfg.z0 = -1.1e-6
    cfg.sample_every = 0
    trace = it.run_engine(cfg)
    z = trace["peaks"]["z"]
    assert len(z) == 9
    growth = np.diff(z[::2]).mean()
    ctx = it.AnalyticContext(cfg.trap)
    assert growth == pytest.approx(it.delta_z(1.2e-3, 1.0e-3, ctx), rel=1e-3)
    assert all(abs(c["residual"]) < 1e-2 * abs(c["heat_bath1"]) for c in trace["cycles"])


def test_closed_forms(trap):
    ctx = it.AnalyticContext(trap)
    assert it.thermal_R(1e-3, ctx) == pytest.approx(41.68, rel=1e-3)
    assert it.amplification(1.5, 0.0, 10.0) == pytest.approx(math.cosh(3) + math.sinh(3) / 399)
    n = it.thermal_occupation(0.11e-3, trap.omega_x0)
    assert 1.07 <= it.squeeze_quantum_threshold(n) <= 1.14


def test_protocol_is_seeded(trap):
    p = it.ProtocolConfig()
    p.m = 500
    p.sigma_shot = 1e-6
    p.seed = 3
    e = it.EngineConfig()
    a = it.run_protocol(p, e)
    b = it.run_protocol(p, e)
    assert a.set_a == b.set_a
    est = it.estimate_delta_T(a, it.AnalyticContext(trap))
    assert est.sigma_delta_T > 0


def test_config_and_experiment(tmp_path):
    cfg = it.parse_config(str(REFERENCE_CONFIG))
    cfg = it.apply_overrides(cfg, ["backend=moments", "n_cycles=2"])
    files, summary = it.run_experiment(cfg, "trajectory", str(tmp_path))
    assert any(os.path.basename(str(f)) == "peaks.csv" for f in files)
    assert "max_peak_deviation_per_growth" in summary


def test_errors_are_python_exceptions():
    with pytest.raises(it.Error, match="mass_amu"):
        it.parse_config_text("omega_x0_hz = 1e6\n")
    with pytest.raises(it.Error):
        it.thermal_state(24.5, 32)
