import numpy as np
import pytest
from scipy.integrate import solve_ivp

from levpivot.errors import OutOfDomainError
from levpivot.problems import (
    LabelOracle,
    evaluate_target,
    evaluate_targets,
    heat_peak,
    load_labeled,
    make_problem,
    oscillator_peak,
    sample_domain,
    save_labeled,
    surface_coverage,
)
from levpivot.rng import RngState


def test_domains():
    assert make_problem("oscillator2d").domain == ((1.0, 3.0), (0.0, 2.0))
    assert make_problem("oscillator3d").dims == 3
    assert make_problem("heat").domain == ((0.0, 3.0), (0.0, 5.0))
    p = make_problem("surface_reaction")
    assert p.fixed_params["kappa"] == 10.0 and p.fixed_params["horizon"] == 4.0
    with pytest.raises(ValueError):
        make_problem("pendulum")


def test_unforced_oscillator_stays_at_rest():
    assert evaluate_target(make_problem("oscillator3d"), [2.0, 0.0, 1.0]) == 0.0


def _oscillator_closed_form(k, c, f, w, t):
    # steady-state particular solution plus the homogeneous part fixed by x(0)=x'(0)=0
    den = (k - w**2) ** 2 + (c * w) ** 2
    a, b = f * (k - w**2) / den, f * c * w / den
    mu = -c / 2
    nu = np.sqrt(k - c**2 / 4)
    c1 = -a
    c2 = (-b * w - mu * c1) / nu
    return np.exp(mu * t) * (c1 * np.cos(nu * t) + c2 * np.sin(nu * t)) + a * np.cos(w * t) + b * np.sin(w * t)


def test_oscillator_against_closed_form():
    t = np.linspace(0, 20, 400_001)
    for k, w in [(2.0, 1.0), (1.0, 0.0), (3.0, 1.7)]:
        exact = np.max(np.abs(_oscillator_closed_form(k, 0.5, 0.5, w, t)))
        got = evaluate_target(make_problem("oscillator2d"), [k, w])
        assert got == pytest.approx(exact, rel=1e-5)


def test_oscillator_step_refinement():
    coarse = oscillator_peak(np.array([2.0]), np.array([0.5]), np.array([0.5]), np.array([1.0]))[0]
    # rtol/32 roughly halves the step of a fifth-order method
    fine = oscillator_peak(np.array([2.0]), np.array([0.5]), np.array([0.5]), np.array([1.0]),
                           rtol=1e-8 / 32, atol=1e-10 / 32)[0]
    assert coarse == pytest.approx(fine, rel=1e-5)


def test_surface_linear_closed_form():
    alpha, gamma = 0.7, 0.2
    got = surface_coverage(np.zeros(1), np.zeros(1), kappa=0.0, alpha=alpha, gamma=gamma)[0]
    inf = alpha / (alpha + gamma)
    exact = inf + (0.9 - inf) * np.exp(-(alpha + gamma) * 4.0)
    assert got == pytest.approx(exact, abs=1e-6)


def test_surface_range():
    p = make_problem("surface_reaction")
    vals = evaluate_targets(p, sample_domain(p, 200, RngState(1)))
    assert np.all((vals > 0) & (vals < 1))


def _heat_reference(t, w, nodes=201):
    # the same semi-discrete system integrated by a stiff ODE solver
    x = np.linspace(0, 1, nodes)
    hx = x[1] - x[0]

    def rhs(s, f):
        df = np.zeros_like(f)
        df[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / (np.pi * hx**2)
        df[-1] = -np.pi * np.exp(-s)
        return df

    f0 = np.sin(w * np.pi * x)
    sol = solve_ivp(rhs, (0, t), f0, method="BDF", rtol=1e-10, atol=1e-12)
    return max(sol.y[:, -1].max(), 0.0)


@pytest.mark.parametrize("t,w", [(0.1, 0.7), (0.5, 2.3), (1.2, 4.1)])
def test_heat_modal_solution_matches_time_stepping(t, w):
    assert heat_peak(t, w)[0] == pytest.approx(_heat_reference(t, w), abs=1e-6)


def test_heat_initial_condition():
    assert heat_peak(0.0, 0.5)[0] == pytest.approx(1.0, abs=1e-12)


def test_heat_spatial_refinement():
    probes = [(0.05, 0.5), (0.1, 0.7), (0.2, 1.5), (0.3, 2.5), (0.02, 4.5)]
    for t, w in probes:
        a, b = heat_peak(t, w, 201)[0], heat_peak(t, w, 401)[0]
        assert a > 0
        assert abs(a - b) <= 1e-3 * abs(b)


def test_domain_checks():
    with pytest.raises(OutOfDomainError):
        evaluate_target(make_problem("oscillator2d"), [0.5, 1.0])
    with pytest.raises(OutOfDomainError):
        evaluate_target(make_problem("heat"), [1.0, 2.0, 3.0])
    evaluate_target(make_problem("surface_reaction"), [100.0, -100.0])


@pytest.mark.parametrize("kind", ["oscillator2d", "oscillator3d", "heat"])
def test_uniform_draws_in_box(kind):
    p = make_problem(kind)
    x = sample_domain(p, 500, RngState(2))
    assert x.shape == (500, p.dims)
    assert np.all(x >= p.lower) and np.all(x <= p.upper)


def test_gaussian_draws_mean():
    n = 20_000
    x = sample_domain(make_problem("surface_reaction"), n, RngState(3))
    assert np.all(np.abs(x.mean(axis=0)) <= 3 * 7.5 / np.sqrt(n))
    assert x.std() == pytest.approx(7.5, rel=0.03)


def test_fine_grid():
    assert sample_domain(make_problem("oscillator3d"), 1, RngState(0), grid=True).shape == (51**3, 3)


def test_evaluation_is_deterministic():
    p = make_problem("oscillator2d")
    x = sample_domain(p, 50, RngState(4))
    assert np.array_equal(evaluate_targets(p, x), evaluate_targets(p, x))


def test_label_oracle_counts_queries():
    p = make_problem("heat")
    x = sample_domain(p, 30, RngState(5))
    oracle = LabelOracle(p, x)
    vals = oracle.query([3, 7, 3])
    assert oracle.calls == 2 and oracle.observed == {3, 7}
    np.testing.assert_array_equal(vals, evaluate_targets(p, x)[[3, 7, 3]])


def test_labeled_csv_roundtrip(tmp_path, gen):
    x, b = gen.standard_normal((6, 2)), gen.standard_normal(6)
    save_labeled(tmp_path / "xb.csv", x, b)
    x2, b2 = load_labeled(tmp_path / "xb.csv")
    np.testing.assert_array_equal(x2, x)
    np.testing.assert_array_equal(b2, b)
