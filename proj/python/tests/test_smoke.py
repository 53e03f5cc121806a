import json
import math

import pytest

import meteorsim as ms


def test_graph_factories():
    g = ms.Graph.torus(4, 2)
    assert g.vertex_count == 16
    assert g.degree(0) == 4
    assert sorted(ms.Graph.cycle(5).neighbors(0)) == [1, 4]
    with pytest.raises(ms.MeteorError):
        ms.Graph.cycle(2)


def test_simulate_matches_paths_and_conserves():
    g = ms.Graph.cycle(7)
    m0 = [1.0, 0.0, 2.0, 0.5, 0.0, 3.0, 1.5]
    out = ms.simulate(g, m0, 4.0, 3)
    assert math.isclose(sum(out), sum(m0), rel_tol=1e-12)
    assert out == ms.simulate(g, m0, 4.0, 3)
    for x in range(7):
        assert math.isclose(ms.mass_via_paths(g, m0, 4.0, 3, x), out[x], rel_tol=1e-9, abs_tol=1e-12)


def test_heat_profile_on_c3():
    g = ms.Graph.cycle(3)
    prof = ms.heat_mean_profile(g, [3.0, 0.0, 0.0], 1.0)
    assert math.isclose(prof[0], 1 + 2 * math.exp(-1.5), rel_tol=1e-9)


def test_moment_report_json():
    rep = json.loads(ms.moment_report(ms.Graph.cycle(50), replicas=4, samples=50, seed=2))
    assert rep["schema"] == "meteor-moment-report/1"
    names = {q["name"] for q in rep["quantities"]}
    assert {"mean", "variance", "cov_neighbor"} <= names


def test_exact_identities():
    for d in range(1, 5):
        r = ms.verify_prime_solution(d)
        assert r["passed"]
    assert ms.verify_prime_solution(2)["h"] == "9/16"


def test_coupling_and_support():
    c = ms.coupling_experiment(1, 256, 2, 20, 500.0, 1)
    assert c["suffix_equal"] == 20
    assert len(c["meeting_times"]) == c["met"]
    t = ms.support_trial(ms.Graph.cycle(5), seed=3)
    assert t["reached"]
    assert t["distance"] <= 0.1


def test_bad_state_rejected():
    with pytest.raises(ms.MeteorError):
        ms.simulate(ms.Graph.cycle(4), [1.0, -1.0, 0.0, 0.0], 1.0, 1)
