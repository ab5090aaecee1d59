import math
import os
from pathlib import Path

import pytest

import fhtc

SRC = Path(os.environ.get("FHTC_SOURCE_DIR", Path(__file__).resolve().parents[2]))
TABLE = SRC / "data" / "capacity_table.csv"


def test_special_functions():
    assert fhtc.gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)
    assert fhtc.gauss_2f1(1, 1, 2, -1.0) == pytest.approx(math.log(2), rel=1e-14)
    with pytest.raises(ValueError):
        fhtc.gamma_fn(-1.0)


def test_outage_closed_forms():
    floor = 1 - math.exp(-(10 ** 0.37) / 10)
    assert fhtc.bpp_outage(0, 3.7, 10.0) == pytest.approx(floor, rel=1e-12)
    assert fhtc.ppp_outage(0.0, 3.7, 10.0) == pytest.approx(floor, rel=1e-12)
    assert fhtc.bpp_outage(50, 3.7, 10.0, lprime=200) < fhtc.bpp_outage(50, 3.7, 10.0, lprime=10)
    assert fhtc.conditional_outage([], 0.0, 0.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_monte_carlo_agrees_with_closed_form():
    value, stderr = fhtc.mc_spatial_outage("ppp", 1.0, 3.7, 10.0, lprime=10, networks=4000, seed=1)
    assert abs(value - fhtc.ppp_outage(1.0, 3.7, 10.0, lprime=10)) <= 4 * stderr + 1e-3


def test_transmission_capacity_ordering():
    a = fhtc.tc("ppp", 0.3, -10.0, 10.0, r_net=2.0)
    b = fhtc.tc("ppp", 0.3, -10.0, 10.0, r_net=10.0)
    c = fhtc.tc("infinite", 0.3, -10.0, 10.0)
    assert a > b > c
    with pytest.raises(ValueError):
        fhtc.tc("mesh", 0.3, -10.0, 10.0)


def test_modulation():
    table = fhtc.load_table(str(TABLE))
    assert len(table.h) == 101 and len(table.gamma_db) == 181
    beta = fhtc.sinr_threshold_db(table, 1.0, 0.5)
    assert 3.2 <= beta <= 4.2
    assert fhtc.capacity(table, 1.0, beta) >= 0.5 - 1e-12
    assert fhtc.spectral_efficiency(0.5) == pytest.approx(0.846, rel=1e-3)
    assert 0.4 <= fhtc.estimate_capacity(1.0, 3.7, samples=20000) <= 0.6


def test_optimizer_methods_agree():
    table = fhtc.load_table(str(TABLE))
    g = fhtc.optimize(table, "bpp", 50, r_net=1.0, method="gradient")
    e = fhtc.optimize(table, "bpp", 50, r_net=1.0, method="exhaustive")
    assert g["tau_prime"] == e["tau_prime"]
    assert (g["lprime"], g["h"], g["beta_db"]) == (e["lprime"], e["h"], e["beta_db"])
    assert g["evaluations"] < e["evaluations"] / 20


def test_figure(tmp_path):
    files = fhtc.run_figure(6, {}, str(tmp_path))
    assert len(files) == 3 and all(Path(f).exists() for f in files)
    with pytest.raises(ValueError):
        fhtc.run_figure(1, {}, str(tmp_path))
