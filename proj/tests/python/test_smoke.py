import math
from fractions import Fraction

import pytest

import martinq


def test_chain_rows():
    z = martinq.chain("z")
    assert z.name == "z"
    assert sorted(z.successors("0")) == [("-1", "1/2"), ("1", "1/2")]
    bb = martinq.chain("bangbang:q=1/3")
    assert sum(Fraction(p) for _, p in bb.successors("4")) == 1


def test_green_exact_and_solve():
    z = martinq.chain("z")
    assert martinq.green_exact(z, "2", "3") == "4"
    (r,) = martinq.green_solve(z, [("2", "3")])
    assert r["value"] == pytest.approx(4.0, abs=1e-10)
    tree = martinq.chain("tree:k=2")
    assert martinq.green_exact(tree, "0", "0") == "2"


def test_green_mc_is_reproducible():
    bb = martinq.chain("bangbang:q=1/3")
    a = martinq.green_mc(bb, "1", ["1", "2"], seed=3, trajectories=20000)
    b = martinq.green_mc(bb, "1", ["1", "2"], seed=3, trajectories=20000)
    assert a == b
    exact = float(Fraction(martinq.green_exact(bb, "1", "1")))
    assert abs(a[0]["value"] - exact) < 5 * a[0]["stderr"]


def test_profiles_and_mass():
    z = martinq.chain("z")
    phi = martinq.profile(z, "+inf")
    assert phi("5")["exact"] == "10"
    rep = martinq.check_harmonic(phi, 20)
    assert rep["ok"] and rep["mass"]["exact"] == "1"
    tree = martinq.chain("tree:k=2")
    assert martinq.check_harmonic(martinq.profile(tree, "(0)*"), 5)["mass"]["exact"] == "1/2"
    mix = martinq.mixture(z, "1/2*+inf+1/2*-inf")
    assert mix("-3")["exact"] == "3"


def test_measures():
    z = martinq.chain("z")
    phi = martinq.profile(z, "+inf")
    r = martinq.restricted_measure(phi, "1", "path:1.2.3")
    assert r["exact"] == "3/2"
    seq = martinq.cylinder_measure(phi, "0", "at:1=1", [16, 32, 64, 128, 256])
    assert seq["verdict"] == "diverges"
    assert martinq.verify_concatenation(phi, "1", "2", 2, 4)["ok"]
    av = martinq.avoidance(phi, "3", "1")
    assert av["verdict"] == "bracket-closed"
    assert av["lower"] <= 4.0 + 1e-9 <= av["upper"] + 1e-9


def test_h_transform():
    z = martinq.chain("z")
    assert martinq.psi(z, "0", "+inf")["exact"] == "1"
    assert martinq.psi(z, "2", "+inf")["exact"] == "5"
    row = dict(martinq.transformed_successors(z, "1", "+inf"))
    assert row == {"2": "5/6", "0": "1/6"}
    assert martinq.check_row_sums(z, "+inf", radius=30)["ok"]
    assert martinq.check_rn_identity(z, "0", 5, "+inf")["ok"]
    rep = martinq.convergence(martinq.chain("bangbang:q=1/3"), "inf", seed=1, trajectories=500)
    assert rep["checkpoints"][0]["fraction_beyond"] > 0.95


def test_potential():
    assert martinq.potential_value(1, 0)["exact"] == "1"
    rows = martinq.potential_table(3)
    assert (1, 1, "0", "4", pytest.approx(1.2732395447)) in [(i, j, p, q, pytest.approx(v)) for i, j, p, q, v in rows]
    assert martinq.check_potential(10)["ok"]
    # E_(1,0)[visits to (2,0) before (0,0)] = a(1,0) + a(2,0) - a(1,0) = 4 - 8/pi
    (est,) = martinq.potential_mc("1,0", ["2,0"], seed=2, trajectories=2000, exit_radius=20)
    assert abs(est["value"] - (4 - 8 / math.pi)) < 5 * est["stderr"]


def test_verify_and_errors():
    rep = martinq.verify("exact")
    assert rep["ok"]
    ids = {c["id"] for c in rep["checks"]}
    assert {"green.closed_form", "sigma.concatenation", "htransform.rn_identity"} <= ids
    assert not martinq.verify("exact", corrupt_phi=True)["ok"]
    with pytest.raises(martinq.ParseError):
        martinq.chain("nope")
    with pytest.raises(martinq.MartinqError):
        martinq.profile(martinq.chain("z"), "(0)*")
