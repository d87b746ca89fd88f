"""Tests for convergence predictions and measurements."""

import math

import pytest

from wave_cluster.config import Config
from wave_cluster.convergence import (
    compare_methods,
    convergence_sweep,
    fit_power_law,
    measure_convergence,
    measure_heat_rounds,
    measure_wave_rounds,
    mixing_time,
    predict_times,
    ring_lambda2,
    ring_mixing_time,
)
from wave_cluster.exceptions import (
    BudgetExceededError,
    DomainError,
    InvalidSpeedError,
    MixingTimeUndefinedError,
    ValidationError,
)
from wave_cluster.generators import karate_club, line_graph, ring_graph
from wave_cluster.wave import eigenvalue_to_frequency

C = math.sqrt(1.99)


def test_mixing_time_value():
    """Test tau = -1/ln(1 - lambda_2)."""
    assert mixing_time(0.5) == pytest.approx(1.0 / math.log(2.0))


def test_mixing_time_domain():
    """Test the mixing-time domain errors."""
    with pytest.raises(MixingTimeUndefinedError):
        mixing_time(1.0)
    with pytest.raises(DomainError):
        mixing_time(0.0)
    with pytest.raises(DomainError):
        mixing_time(-0.1)


def test_ring_mixing_time_asymptotics():
    """Test that the ring mixing time grows like 2 (N / 2 pi)^2."""
    assert ring_lambda2(4) == pytest.approx(1.0)
    assert ring_mixing_time(64) == pytest.approx(2 * (64 / (2 * math.pi)) ** 2, rel=0.01)


def test_predict_times_values():
    """Test the predictor's frequency and round counts."""
    lambda2 = ring_lambda2(64)

    p = predict_times(lambda2, C, 7.0, 64)

    assert p.tau == pytest.approx(mixing_time(lambda2))
    assert p.omega2 == pytest.approx(eigenvalue_to_frequency(lambda2, C), rel=1e-9)
    assert p.t_resolve == pytest.approx(7.0 * 2 * math.pi / p.omega2)
    assert p.t_wave == pytest.approx(p.t_resolve + 64)
    assert p.t_gossip == pytest.approx(p.tau * math.log(64) ** 2)
    assert set(p.to_dict()) >= {"tau", "omega2", "t_wave", "t_gossip"}


def test_predict_times_near_one():
    """Test that lambda_2 just below one still gives finite predictions."""
    p = predict_times(0.99, C, 7.0, 10)

    assert math.isfinite(p.t_wave)
    assert p.tau < 1.0


def test_predict_times_errors():
    """Test the predictor's argument validation."""
    with pytest.raises(MixingTimeUndefinedError):
        predict_times(1.2, C, 7.0, 10)
    with pytest.raises(DomainError):
        predict_times(2.5, C, 7.0, 10)
    with pytest.raises(InvalidSpeedError):
        predict_times(0.1, 1.5, 7.0, 10)
    with pytest.raises(ValidationError):
        predict_times(0.1, C, 7.0, 1)


def test_wave_rounds_scale_with_sqrt_tau():
    """Test that the predicted resolve time grows as the square root of tau."""
    lambdas = [1e-3, 1e-4, 1e-5, 1e-6]
    predictions = [predict_times(lam, C, 7.0, 100) for lam in lambdas]

    _, exponent = fit_power_law([p.tau for p in predictions], [p.t_resolve for p in predictions])

    assert exponent == pytest.approx(0.5, abs=0.05)


def test_fit_power_law_exact():
    """Test recovery of an exact power law."""
    xs = [2, 4, 8, 16]
    ys = [3 * x ** 1.5 for x in xs]

    a, p = fit_power_law(xs, ys)

    assert a == pytest.approx(3.0)
    assert p == pytest.approx(1.5)


def test_fit_power_law_needs_two_points():
    """Test that a single point cannot be fitted."""
    with pytest.raises(ValidationError):
        fit_power_law([1.0], [2.0])


def test_measure_wave_rounds_ring():
    """Test that the measured horizon is a power of two covering eta cycles."""
    rounds = measure_wave_rounds(ring_graph(32), Config())

    assert rounds & (rounds - 1) == 0
    assert rounds >= 7 * 2 * math.pi / eigenvalue_to_frequency(ring_lambda2(32), C)


def test_measure_wave_rounds_long_ring():
    """Test that a 256-node ring is not declared converged after a few rounds."""
    n = 256

    rounds = measure_wave_rounds(ring_graph(n), Config())

    assert rounds & (rounds - 1) == 0
    assert rounds >= 4 * n
    assert rounds >= 7 * 2 * math.pi / eigenvalue_to_frequency(ring_lambda2(n), C)


def test_measure_heat_rounds_grows_with_n():
    """Test that the heat iteration needs more rounds on longer rings."""
    config = Config()

    assert measure_heat_rounds(ring_graph(32), config) > measure_heat_rounds(
        ring_graph(16), config
    )


def test_measure_budget_exceeded():
    """Test the round budget of both measurements."""
    config = Config(min_t_max=16, max_t_max=32)

    with pytest.raises(BudgetExceededError):
        measure_convergence(ring_graph(64), "wave", config)
    with pytest.raises(BudgetExceededError):
        measure_convergence(ring_graph(64), "heat", config)


def test_measure_unknown_method():
    """Test method validation."""
    with pytest.raises(ValidationError, match="unknown method"):
        measure_convergence(ring_graph(8), "gossip")


def test_convergence_sweep_frame():
    """Test the sweep's table layout."""
    frame = convergence_sweep("ring", [16, 32], Config())

    assert list(frame.columns) == ["N", "wave_rounds", "heat_rounds"]
    assert frame["N"].tolist() == [16, 32]
    assert (frame["heat_rounds"] > 0).all()


def test_convergence_sweep_scaling():
    """Test wave rounds linear and heat rounds quadratic in the ring size."""
    frame = convergence_sweep("ring", [32, 64, 128, 256], Config())

    _, wave_exp = fit_power_law(frame["N"], frame["wave_rounds"])
    _, heat_exp = fit_power_law(frame["N"], frame["heat_rounds"])

    assert wave_exp == pytest.approx(1.0, abs=0.15)
    assert heat_exp == pytest.approx(2.0, abs=0.3)
    assert (frame["wave_rounds"] < frame["heat_rounds"]).all()


def test_compare_methods_reports():
    """Test the per-method report rows on a line graph with exact sums."""
    g = line_graph(20, weak_pos=9, weak_weight=0.1)

    reports = compare_methods(
        g, k=1, config=Config(seed=1), rounds=2000, gossip_steps=0, graph_label="line:20"
    )

    by_method = {r["method"]: r for r in reports}
    assert [r["method"] for r in reports] == ["wave", "orthogonal_iteration", "heat"]
    assert all(
        set(r) == {"graph", "method", "rounds", "messages_scalar_equiv", "partition_agreement"}
        for r in reports
    )
    assert {r["graph"] for r in reports} == {"line:20"}
    assert by_method["wave"]["partition_agreement"] == 1.0
    assert by_method["wave"]["messages_scalar_equiv"] == 2 * 19 * by_method["wave"]["rounds"] + 20
    assert by_method["orthogonal_iteration"]["partition_agreement"] == 1.0
    assert by_method["orthogonal_iteration"]["rounds"] == 2000
    per_round = 2 * 19 * 2 + 2 * 20 * 4
    assert by_method["orthogonal_iteration"]["messages_scalar_equiv"] == 2000 * per_round
    assert by_method["heat"]["partition_agreement"] is None
    assert by_method["heat"]["messages_scalar_equiv"] == 2 * 19 * by_method["heat"]["rounds"]


def test_compare_methods_gossip_validation():
    """Test that a negative gossip length is rejected."""
    with pytest.raises(ValidationError, match="gossip_steps"):
        compare_methods(karate_club(), gossip_steps=-1)
