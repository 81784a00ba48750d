import numpy as np
import pytest

from wellkit.fixtures import four_crossing_map
from wellkit.mesh import Interval1D, build_map
from wellkit.stability import (SUITES, StabilityReport, bridge_matrix, check_bridge,
                               check_distance_lemma, check_shrinking_wellness,
                               check_shrinking_wellness_grid, check_stability, diagram_distance,
                               sup_distance)
from wellkit.wellcore import build_well_module, robustness, well_diagram, well_function


def shifted(f, c):
    return build_map(f.domain, f.values + c)


def test_report_tolerance():
    rep = StabilityReport("x")
    assert rep.record(1.0, 1.0 + 1e-12)
    assert not rep.record(1.0, 1.1, info={"k": 1})
    assert rep.violations == 1 and rep.failures == [{"k": 1}]
    assert rep.worst_slack == pytest.approx(-0.1)
    assert rep.to_json()["trials"] == 2


def test_distance_examples(fig1):
    rep = check_distance_lemma(fig1, fig1, 0.0)
    assert rep.ok and rep.worst_slack == 0
    g = shifted(fig1, 0.7)
    rep = check_distance_lemma(fig1, g, 0.0, samples=50)
    assert rep.ok and rep.worst_slack == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        check_distance_lemma(fig1, build_map(Interval1D(0, 1, 3), [1, 2, 3]), 0.0)


def test_stability_examples(fig1):
    assert check_stability(fig1, fig1, 0.0).worst_slack == 0
    g = shifted(fig1, 0.5)
    rep = check_stability(fig1, g, 0.0)
    assert rep.ok
    assert diagram_distance(fig1, g, 0.0) <= 0.5
    # the classes that died at 1 now die within half a unit of it
    low = well_diagram(build_well_module(g, 0.0)).values()[:2]
    assert all(0.5 <= v <= 1.5 for v in low)
    # a three-way merge at one radius keeps each zero's component well
    assert [p.value for p in robustness(g, 0.0)] == [3.5] * 4
    rep = check_stability(fig1, trials=20, seed=3)
    assert rep.ok and rep.trials + rep.skipped == 20


def test_shrinking_examples(fig1):
    const = build_map(Interval1D(0, 1, 4), [1.0] * 4)
    assert check_shrinking_wellness(build_well_module(const, 0.0)).ok
    assert check_shrinking_wellness(build_well_module(fig1, 0.0)).ok
    w = well_function(fig1, 0.0)
    assert check_shrinking_wellness_grid(w, np.linspace(0, 5, 11)).ok


def test_bridge_examples(fig1):
    for r in (0.0, 0.5, 1.5, 2.5, 3.5):
        assert check_bridge(fig1, fig1, 0.0, r)
    assert check_bridge(fig1, shifted(fig1, 0.5), 0.0, 0.25)
    wf, wg = well_function(fig1, 0.0), well_function(shifted(fig1, 0.5), 0.0)
    beta, src, dst = bridge_matrix(wg, wf, 0.25, 0.75)
    assert (beta.rows, beta.cols) == (len(dst.components), len(src.components))


def test_sup_distance_is_vertexwise():
    f = four_crossing_map()
    assert sup_distance(f, shifted(f, 0.25)) == pytest.approx(0.25)


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_small(name):
    rep = SUITES[name](60, 11)
    assert rep.violations == 0, rep.failures
    assert rep.trials > 0


def test_suite_replay_is_deterministic():
    a = SUITES["stability"](25, 5).to_json()
    b = SUITES["stability"](25, 5).to_json()
    assert a == b
