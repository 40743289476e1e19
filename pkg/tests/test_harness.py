"""Closed-loop harness tests: hold, drag, rollouts, metrics, comparisons."""

import json

import numpy as np
import pytest

from manreg import (DragSpec, EmptyWindowError, Gains, HoldSpec, Metrics,
                    ProjectionConfig, ProjectionState, ReducedState, Scenario,
                    SchemaError, TraceLog, TRACE_COLUMNS, VehicleParams,
                    circle, compare, compute_metrics, default_projection_metric,
                    drag_force, apply_hold, hold_release_scenario,
                    payload_drag_scenario, regulation_control, run_scenario,
                    scenario_from_dict, scenario_pair_from_dict,
                    scenario_to_dict, tracking_virtual_input, turn90)

CIRCLE = circle(radius=0.25, speed=0.1)
PERIOD = CIRCLE.tau_max


@pytest.fixture(scope="module")
def hold_tracking():
    return run_scenario(hold_release_scenario("tracking"))


@pytest.fixture(scope="module")
def hold_regulation():
    return run_scenario(hold_release_scenario("regulation"))


@pytest.fixture(scope="module")
def plain_pair():
    tr = Scenario(name="plain-tracking", mode="tracking", maneuver=CIRCLE,
                  duration=10.0)
    rg = Scenario(name="plain-regulation", mode="regulation", maneuver=CIRCLE,
                  duration=10.0)
    return compare(tr, rg)


# ---------------------------------------------------------------- hold

def test_hold_clamps_position_and_velocity():
    hold = HoldSpec(release=5.0, position=np.array([0.25, 0.0, -1.0]))
    x = ReducedState(p=[1.0, 2.0, -3.0], v=[0.5, -0.5, 0.1], psi=0.7)
    held = apply_hold(x, hold, 2.0)
    assert np.array_equal(held.p, [0.25, 0.0, -1.0])
    assert np.array_equal(held.v, np.zeros(3))
    assert held.psi == 0.7


def test_hold_release_instant_passes_through():
    hold = HoldSpec(release=5.0, position=np.zeros(3))
    x = ReducedState(p=[1.0, 0.0, -1.0], v=[0.1, 0.0, 0.0], psi=0.0)
    assert apply_hold(x, hold, 5.0) is x
    assert apply_hold(x, hold, 7.3) is x


def test_hold_disabled_or_unresolved_passes_through():
    x = ReducedState(p=[1.0, 0.0, -1.0], v=[0.1, 0.0, 0.0], psi=0.0)
    assert apply_hold(x, None, 1.0) is x
    # position still unresolved: nothing to clamp to yet
    assert apply_hold(x, HoldSpec(release=5.0), 1.0) is x


def test_hold_spec_validation():
    with pytest.raises(ValueError):
        HoldSpec(release=1.0, start=2.0)
    with pytest.raises(ValueError):
        HoldSpec(release=0.0)
    with pytest.raises(ValueError):
        HoldSpec(release=1.0, start=-0.5)
    with pytest.raises(ValueError):
        HoldSpec(release=1.0, position=np.array([1.0, np.inf, 0.0]))


# ---------------------------------------------------------------- drag

def test_drag_vanishes_at_rest():
    spec = DragSpec(magnitude=0.02, epsilon=0.01)
    assert np.array_equal(drag_force(np.zeros(3), spec, 0.03), np.zeros(3))


def test_drag_asymptotic_magnitude_and_direction():
    spec = DragSpec(magnitude=0.02, epsilon=0.01)
    v = np.array([3.0, -4.0, 0.0])  # speed 5 >> epsilon
    f = drag_force(v, spec, 0.03)
    assert np.linalg.norm(f) == pytest.approx(0.02 / 0.03, rel=0.01)
    # opposes the motion
    assert float(f @ v) < 0.0
    assert np.allclose(np.cross(f, v), 0.0, atol=1e-12)


def test_drag_horizontal_only_flag():
    spec = DragSpec(magnitude=0.02, epsilon=0.01, horizontal_only=True)
    f = drag_force([0.0, 0.0, 2.0], spec, 0.03)
    assert np.array_equal(f, np.zeros(3))
    spec3d = DragSpec(magnitude=0.02, epsilon=0.01, horizontal_only=False)
    f3 = drag_force([0.0, 0.0, 2.0], spec3d, 0.03)
    assert f3[2] < 0.0


def test_drag_spec_validation():
    with pytest.raises(ValueError):
        DragSpec(magnitude=-0.1)
    with pytest.raises(ValueError):
        DragSpec(epsilon=0.0)


# ---------------------------------------------------------------- rollouts

def test_zero_duration_gives_empty_trace_and_zero_metrics():
    sc = Scenario(name="degenerate", mode="regulation", maneuver=CIRCLE,
                  duration=0.0)
    res = run_scenario(sc)
    assert len(res.trace) == 0
    assert not res.diverged
    m = res.metrics()
    assert m.peak_speed == 0.0 and m.peak_thrust == 0.0
    assert m.sat_duty == 0.0 and m.max_path_deviation == 0.0
    assert m.settling_time is None
    assert m.n_steps == 0


def test_rollout_reproducible_bit_for_bit():
    a = run_scenario(hold_release_scenario("regulation", duration=8.0))
    b = run_scenario(hold_release_scenario("regulation", duration=8.0))
    assert np.array_equal(a.trace.data, b.trace.data)


def test_trace_grid_and_final_row():
    sc = Scenario(name="grid", mode="tracking", maneuver=CIRCLE, duration=2.0)
    res = run_scenario(sc)
    t = res.trace.col("t")
    assert len(res.trace) == 201
    assert t[0] == 0.0 and t[-1] == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(np.diff(t), 0.01, atol=1e-12)


def test_regulation_on_curve_stays_nominal():
    sc = Scenario(name="nominal", mode="regulation", maneuver=CIRCLE,
                  duration=10.0)
    res = run_scenario(sc)
    m = res.metrics()
    assert not res.diverged
    assert m.peak_speed <= 1.5 * 0.1
    assert m.settling_time == 0.0


def test_divergence_flag_truncates_run():
    far = ReducedState(p=[30.0, 0.0, -1.0], v=np.zeros(3), psi=0.0)
    sc = Scenario(name="runaway", mode="tracking", maneuver=CIRCLE,
                  duration=10.0, initial_state=far)
    res = run_scenario(sc)
    assert res.diverged
    assert res.metrics().diverged
    assert len(res.trace) < 1001


def test_projection_failure_marks_diverged(monkeypatch):
    from manreg import harness as harness_mod
    real = harness_mod.project
    calls = {"n": 0}

    def failing_project(z, m, cfg, state):
        calls["n"] += 1
        if calls["n"] >= 3:
            raise EmptyWindowError("injected projection failure")
        return real(z, m, cfg, state)

    monkeypatch.setattr(harness_mod, "project", failing_project)
    sc = Scenario(name="fault", mode="regulation", maneuver=CIRCLE,
                  duration=1.0)
    res = run_scenario(sc)
    assert res.diverged
    assert len(res.trace) == 2


def test_open_path_stops_at_far_end():
    m = turn90(speed=0.2)
    sc = Scenario(name="turn", mode="regulation", maneuver=m, duration=20.0)
    res = run_scenario(sc)
    assert res.completed_path and not res.diverged
    assert res.trace.col("tau")[-1] == pytest.approx(m.tau_max, abs=0.05)
    assert len(res.trace) < 2001

    free = run_scenario(Scenario(name="turn-free", mode="regulation",
                                 maneuver=m, duration=20.0,
                                 stop_at_path_end=False))
    assert not free.completed_path
    assert len(free.trace) == 2001


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(name="x", mode="hover", maneuver=CIRCLE, duration=1.0)
    with pytest.raises(ValueError):
        Scenario(name="x", mode="tracking", maneuver=CIRCLE, duration=-1.0)
    with pytest.raises(ValueError):
        Scenario(name="x", mode="tracking", maneuver=CIRCLE, duration=1.0,
                 control_dt=0.01, plant_dt=0.003)
    with pytest.raises(ValueError):
        Scenario(name="x", mode="tracking", maneuver=CIRCLE, duration=1.0,
                 hold=HoldSpec(release=2.0))


def test_integrator_frozen_during_hold():
    g = Gains(k_i=0.5)
    res = run_scenario(hold_release_scenario("tracking", gains=g))
    t = res.trace.col("t")
    eta = res.trace.cols("eta1", "eta2", "eta3")
    in_hold = t < 5.0
    assert np.array_equal(eta[in_hold], np.zeros_like(eta[in_hold]))
    assert np.abs(eta[~in_hold][5:]).max() > 0.0


# ------------------------------------------------- mode equivalence

def test_modes_issue_identical_commands_on_curve():
    gains = Gains()
    params = VehicleParams()
    cfg = ProjectionConfig(metric_P=default_projection_metric(gains))
    for tau in [0.0, 1.234, 5.0, 9.87, 15.0]:
        ref = CIRCLE.eval(tau)
        x = ReducedState(p=ref.p.copy(), v=ref.v.copy(), psi=ref.psi)
        mu_tr = tracking_virtual_input(x, ref, gains, None, params)
        _, diag = regulation_control(x, CIRCLE, gains, None, cfg,
                                     ProjectionState(), params)
        assert np.abs(mu_tr.mu_p - diag.mu.mu_p).max() <= 1e-9
        assert abs(mu_tr.mu_psi - diag.mu.mu_psi) <= 1e-9


def test_regulation_tau_tracks_the_clock():
    sc = Scenario(name="clock", mode="regulation", maneuver=CIRCLE,
                  duration=5.0)
    res = run_scenario(sc)
    t = res.trace.col("t")
    tau = res.trace.col("tau")
    # closed curve: compare modulo the period to avoid the seam jump
    raw = tau - (t % PERIOD)
    gap = np.abs((raw + 0.5 * PERIOD) % PERIOD - 0.5 * PERIOD)
    assert gap.max() <= 1e-3


@pytest.mark.xfail(strict=True, reason=(
    "the zero-order hold between controller updates displaces the "
    "projected parameter by a fraction of the control period, so the "
    "pointwise gap between the two modes scales with control_dt "
    "(measured near 5e-5 at the default rates) and cannot reach 1e-6 "
    "without a faster control loop"))
def test_modes_agree_pointwise_on_curve():
    tr = run_scenario(Scenario(name="eq-t", mode="tracking", maneuver=CIRCLE,
                               duration=5.0))
    rg = run_scenario(Scenario(name="eq-r", mode="regulation", maneuver=CIRCLE,
                               duration=5.0))
    gap = np.abs(tr.trace.cols("p1", "p2", "p3", "v1", "v2", "v3", "psi")
                 - rg.trace.cols("p1", "p2", "p3", "v1", "v2", "v3", "psi"))
    assert gap.max() <= 1e-6


# ------------------------------------------------------ hold phases

def test_hold_phase_regulation_stays_put(hold_regulation):
    trace = hold_regulation.trace
    t = trace.col("t")
    window = (t >= 0.5) & (t < 5.0)  # let the projection settle first
    dist_sq = trace.col("dist_sq")[window]
    assert dist_sq.max() - dist_sq.min() <= 1e-6

    mu_norm = np.linalg.norm(trace.cols("mu1", "mu2", "mu3"), axis=1)[window]
    g = Gains()
    bound = g.k_d * 0.1 + 0.1 ** 2 / 0.25 + g.k_i * g.eta_limit
    assert mu_norm.max() <= bound


def test_hold_phase_tracking_error_grows(hold_tracking):
    trace = hold_tracking.trace
    t = trace.col("t")
    err = np.linalg.norm(trace.cols("p1", "p2", "p3")
                         - trace.cols("pd1", "pd2", "pd3"), axis=1)
    first_quarter = t < min(5.0, PERIOD / 4.0)
    assert (np.diff(err[first_quarter]) > 0.0).all()


# ------------------------------------------- start-point invariance

def _max_point_to_polyline(points: np.ndarray, poly: np.ndarray) -> float:
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    worst = 0.0
    for pnt in points:
        ap = pnt - a
        s = np.clip(np.einsum("ij,ij->i", ap, ab) / denom, 0.0, 1.0)
        d = ap - s[:, None] * ab
        worst = max(worst, float(np.sqrt(np.einsum("ij,ij->i", d, d).min())))
    return worst


def test_regulation_path_independent_of_start_parameter():
    ref = CIRCLE.eval(2.0)
    shifted = ReducedState(p=ref.p.copy(), v=ref.v.copy(), psi=ref.psi)
    a = run_scenario(Scenario(name="start-0", mode="regulation",
                              maneuver=CIRCLE, duration=PERIOD))
    b = run_scenario(Scenario(name="start-2", mode="regulation",
                              maneuver=CIRCLE, duration=PERIOD,
                              initial_state=shifted))
    pa = a.trace.cols("p1", "p2", "p3")
    pb = b.trace.cols("p1", "p2", "p3")
    hausdorff = max(_max_point_to_polyline(pa, pb),
                    _max_point_to_polyline(pb, pa))
    assert hausdorff < 1e-6


# ------------------------------------------------------ comparisons

def test_compare_rejects_mismatched_scenarios():
    tr = hold_release_scenario("tracking")
    rg = hold_release_scenario("regulation", gains=Gains(k_p=4.0))
    with pytest.raises(ValueError, match="gains"):
        compare(tr, rg)

    rg2 = hold_release_scenario("regulation", duration=12.0)
    with pytest.raises(ValueError, match="duration"):
        compare(tr, rg2)

    with pytest.raises(ValueError, match="tracking"):
        compare(hold_release_scenario("regulation"),
                hold_release_scenario("regulation"))


def test_compare_undisturbed_metrics_near_identical(plain_pair):
    mt = plain_pair.tracking.metrics()
    mr = plain_pair.regulation.metrics()
    for name in ("peak_speed", "peak_thrust", "mean_speed"):
        ratio = getattr(mt, name) / getattr(mr, name)
        assert abs(ratio - 1.0) <= 0.05, name
    assert mt.sat_duty == 0.0 and mr.sat_duty == 0.0
    assert mt.settling_time == 0.0 and mr.settling_time == 0.0
    # both deviations sit below the dense-path sampling resolution
    assert mt.max_path_deviation < 1e-4
    assert mr.max_path_deviation < 1e-4
    assert not mt.diverged and not mr.diverged


def test_compare_summary_shape(plain_pair):
    s = plain_pair.summary()
    assert s["schema_version"] == 1
    assert set(s["ratios"]) == {"peak_speed", "peak_thrust",
                                "max_path_deviation"}
    for side in ("tracking", "regulation"):
        assert set(s[side]) == {"name", "mode", "diverged", "completed_path",
                                "ambiguity_count", "metrics"}
    # the whole report must be JSON-serializable
    json.dumps(s)


# ---------------------------------------------------------- metrics

def test_metrics_recompute_from_csv(tmp_path, hold_regulation):
    path = tmp_path / "trace.csv"
    hold_regulation.trace.write_csv(path)
    again = TraceLog.read_csv(path)
    m0 = hold_regulation.metrics()
    m1 = compute_metrics(again, CIRCLE, diverged=hold_regulation.diverged)
    assert m0 == m1


def test_metrics_fields_from_trace(hold_tracking):
    m = hold_tracking.metrics()
    trace = hold_tracking.trace
    speed = np.linalg.norm(trace.cols("v1", "v2", "v3"), axis=1)
    assert m.peak_speed == speed.max()
    assert m.peak_thrust == trace.col("f").max()
    assert m.mean_speed == speed.mean()
    assert m.n_steps == len(trace)
    assert m.duration == pytest.approx(20.0, abs=1e-9)
    assert isinstance(m, Metrics)


# -------------------------------------------------------- trace CSV

def test_trace_header_and_schema_line(hold_regulation):
    text = hold_regulation.trace.to_csv_text().splitlines()
    assert text[0] == "# schema_version: 1"
    assert text[1] == ",".join(TRACE_COLUMNS)
    assert len(TRACE_COLUMNS) == 37
    assert text[1].startswith("t,tau,p1,p2,p3,v1,v2,v3,psi,pd1")
    assert text[1].endswith("dist_sq,eta1,eta2,eta3")


def test_trace_round_trip_bitwise(tmp_path, hold_regulation):
    path = tmp_path / "round.csv"
    hold_regulation.trace.write_csv(path)
    back = TraceLog.read_csv(path)
    assert np.array_equal(back.data, hold_regulation.trace.data)


def test_trace_empty_round_trip(tmp_path):
    path = tmp_path / "empty.csv"
    TraceLog(np.empty((0, len(TRACE_COLUMNS)))).write_csv(path)
    assert len(TraceLog.read_csv(path)) == 0


@pytest.mark.parametrize("mangle", [
    lambda lines: lines[1:],                                   # comment gone
    lambda lines: ["# schema_version: 99"] + lines[1:],        # wrong version
    lambda lines: [lines[0], lines[1].replace("tau", "sigma")] + lines[2:],
])
def test_trace_schema_errors(tmp_path, hold_regulation, mangle):
    good = hold_regulation.trace.to_csv_text().splitlines()
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(mangle(good)) + "\n")
    with pytest.raises(SchemaError):
        TraceLog.read_csv(bad)


def test_trace_unknown_column():
    log = TraceLog(np.zeros((1, len(TRACE_COLUMNS))))
    with pytest.raises(KeyError):
        log.col("altitude")


def test_tracking_trace_logs_clock_as_tau(hold_tracking):
    trace = hold_tracking.trace
    assert np.array_equal(trace.col("tau"), trace.col("t"))


# ----------------------------------------------------- config files

def test_scenario_json_round_trip():
    for sc in (hold_release_scenario("tracking"),
               payload_drag_scenario("regulation"),
               Scenario(name="off", mode="regulation", maneuver=CIRCLE,
                        duration=3.0,
                        initial_state=ReducedState(p=[0.3, 0.0, -1.0],
                                                   v=np.zeros(3), psi=0.0))):
        d = scenario_to_dict(sc)
        back = scenario_from_dict(json.loads(json.dumps(d)))
        assert scenario_to_dict(back) == d


def test_scenario_dict_rejects_unknown_version():
    d = scenario_to_dict(hold_release_scenario("tracking"))
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        scenario_from_dict(d)


def test_pair_builder_yields_matched_pair():
    d = scenario_to_dict(hold_release_scenario("tracking"))
    del d["mode"]
    d["name"] = "pair"
    tr, rg = scenario_pair_from_dict(d)
    assert (tr.mode, rg.mode) == ("tracking", "regulation")
    assert tr.name == "pair-tracking" and rg.name == "pair-regulation"
    compare(tr, rg)  # must pass the mismatch guard

    d["mode"] = "tracking"
    with pytest.raises(ValueError):
        scenario_pair_from_dict(d)


def test_builders_share_one_gain_setting():
    a = hold_release_scenario("tracking").gains
    b = hold_release_scenario("regulation").gains
    c = payload_drag_scenario("regulation").gains
    assert a == b == c == Gains()
