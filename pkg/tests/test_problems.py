"""Oracles, value functions, and certificate estimation."""

import numpy as np
import pytest

from holderopt import (
    HolderCertificate,
    MinMaxProblem,
    SmoothObjective,
    ValueFunctionView,
    estimate_holder_constants,
    finite_diff_gradient,
    get_problem,
    make_quadratic_minmin,
    make_quadratic_saddle,
    make_sqrt_problem,
)

ALL_PROBLEMS = [
    make_sqrt_problem,
    lambda: make_quadratic_saddle(3),
    lambda: make_quadratic_saddle(8),
    lambda: make_quadratic_minmin(4),
]


def test_certificate_validation():
    HolderCertificate(beta=1.0, nu=0.5)
    with pytest.raises(ValueError):
        HolderCertificate(beta=0.0, nu=0.5)
    with pytest.raises(ValueError):
        HolderCertificate(beta=-1.0, nu=0.5)
    with pytest.raises(ValueError):
        HolderCertificate(beta=1.0, nu=0.0)
    with pytest.raises(ValueError):
        HolderCertificate(beta=1.0, nu=1.5)
    with pytest.raises(ValueError):
        HolderCertificate(beta=float("inf"), nu=1.0)


def test_smooth_objective_counts_and_checks_shape():
    obj = SmoothObjective(2, lambda x: (float(x @ x), 2.0 * x))
    assert obj.call_counter == 0
    v, g = obj.eval([1.0, 2.0])
    assert obj.call_counter == 1
    assert v == 5.0
    np.testing.assert_array_equal(g, [2.0, 4.0])
    with pytest.raises(ValueError):
        obj.eval([1.0, 2.0, 3.0])


def test_objective_eval_is_pure():
    """Repeated evaluation at the same point is bit-identical."""
    obj = ValueFunctionView(make_sqrt_problem())
    x = np.array([1.7])
    v1, g1 = obj.eval(x)
    v2, g2 = obj.eval(x)
    assert v1 == v2
    np.testing.assert_array_equal(g1, g2)


def test_minmax_problem_validation():
    loss = lambda x, y: float(x @ y)
    grad = lambda x, y: np.asarray(y, dtype=float)
    with pytest.raises(ValueError, match="sense"):
        MinMaxProblem(1, 1, loss, grad, sense="max-min", best_response=lambda x: x)
    with pytest.raises(ValueError, match="oracle"):
        MinMaxProblem(1, 1, loss, grad, sense="min-max")


def test_value_function_view_requires_exact_oracle():
    prob = make_sqrt_problem()
    prob.best_response = None
    with pytest.raises(ValueError):
        ValueFunctionView(prob)


@pytest.mark.parametrize("maker", ALL_PROBLEMS)
def test_best_response_optimizes_inner_problem(maker):
    """The exact oracle beats random nearby candidates in the problem's sense."""
    prob = maker()
    rng = np.random.default_rng(7)
    sign = 1.0 if prob.sense == "min-max" else -1.0
    for _ in range(25):
        x = rng.uniform(0.2, 2.0, size=prob.dim_x)
        y_star = prob.best_response(x)
        L_star = prob.loss(x, y_star)
        for _ in range(10):
            y = y_star + rng.normal(size=prob.dim_y) * 0.3
            if prob.name == "sqrt":
                y = np.maximum(y, 0.0)
            assert sign * prob.loss(x, y) <= sign * L_star + 1e-12


@pytest.mark.parametrize("maker", ALL_PROBLEMS)
def test_envelope_identity(maker):
    """grad of the value function matches finite differences through the oracle."""
    prob = maker()
    view = ValueFunctionView(prob)
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = rng.uniform(0.3, 3.0, size=prob.dim_x)
        _, g = view.eval(x)
        fd = finite_diff_gradient(view, x, 1e-6)
        assert np.linalg.norm(g - fd) <= 1e-4


def test_sqrt_value_function_closed_form():
    view = ValueFunctionView(make_sqrt_problem())
    v, g = view.eval([4.0])
    assert v == pytest.approx((2.0 / 3.0) * 8.0, rel=1e-12)
    assert g[0] == 2.0
    # left of the origin the inner argmax sits on the boundary
    v, g = view.eval([-1.0])
    assert v == 0.0
    assert g[0] == 0.0


def test_quadratic_value_functions_closed_form():
    saddle = ValueFunctionView(make_quadratic_saddle(3))
    x = np.array([1.0, -2.0, 0.5])
    v, g = saddle.eval(x)
    assert v == pytest.approx(0.5 * float(x @ x), rel=1e-12)
    np.testing.assert_allclose(g, x, rtol=1e-12)

    minmin = ValueFunctionView(make_quadratic_minmin(3))
    v, g = minmin.eval(x)
    assert v == pytest.approx(0.25 * float(x @ x), rel=1e-12)
    np.testing.assert_allclose(g, 0.5 * x, rtol=1e-12)


@pytest.mark.parametrize("maker", ALL_PROBLEMS)
def test_holder_descent_lemma(maker):
    """f(x) <= f(y) + <grad f(x), x - y> + beta/(nu+1) |y - x|^(nu+1) on random pairs."""
    prob = maker()
    view = ValueFunctionView(prob)
    cert = prob.certificate
    rng = np.random.default_rng(3)
    coef = cert.beta / (cert.nu + 1.0)
    for _ in range(1000):
        x = rng.uniform(-2.0, 4.0, size=prob.dim_x)
        y = rng.uniform(-2.0, 4.0, size=prob.dim_x)
        fx, gx = view.eval(x)
        fy, _ = view.eval(y)
        d = x - y
        bound = fy + float(gx @ d) + coef * np.linalg.norm(d) ** (cert.nu + 1.0)
        assert fx <= bound + 1e-12


@pytest.mark.parametrize("maker", ALL_PROBLEMS)
def test_approx_response_converges_to_exact(maker):
    from holderopt import InnerAscentBudget

    prob = maker()
    rng = np.random.default_rng(5)
    budget = InnerAscentBudget(steps=60, step_size=0.5)
    for _ in range(10):
        x = rng.uniform(0.2, 2.0, size=prob.dim_x)
        y_star = prob.best_response(x)
        y = prob.approx_response(x, None, budget)
        assert np.linalg.norm(y - y_star) <= 2.0 * 0.5**60 + 1e-12
        # warm start from the answer stays at the answer
        y2 = prob.approx_response(x, y_star, budget)
        assert np.linalg.norm(y2 - y_star) <= 1e-12


def test_finite_diff_gradient_quadratic():
    obj = SmoothObjective(2, lambda x: (0.5 * float(x @ x), x))
    fd = finite_diff_gradient(obj, [1.0, 2.0], 1e-5)
    np.testing.assert_allclose(fd, [1.0, 2.0], atol=1e-8)


def test_finite_diff_gradient_sqrt_value():
    view = ValueFunctionView(make_sqrt_problem())
    fd = finite_diff_gradient(view, [4.0], 1e-6)
    assert abs(fd[0] - 2.0) <= 1e-6


def test_finite_diff_gradient_constant():
    fd = finite_diff_gradient(lambda x: 3.0, np.zeros(4))
    np.testing.assert_array_equal(fd, np.zeros(4))


def test_registry_ids():
    assert get_problem("sqrt").name == "sqrt"
    p = get_problem("quadratic_saddle:8")
    assert p.dim_x == 8 and p.sense == "min-max"
    p = get_problem("quadratic_minmin:3")
    assert p.dim_x == 3 and p.sense == "min-min"
    with pytest.raises(KeyError):
        get_problem("nope")
    with pytest.raises(KeyError):
        get_problem("quadratic_saddle:x")
    with pytest.raises(KeyError):
        get_problem("quadratic_saddle:")


def test_estimate_constants_on_quadratic():
    """A Lipschitz gradient comes back as nu ~ 1 with beta just above the true 1."""
    obj = SmoothObjective(1, lambda x: (0.5 * x[0] ** 2, np.array([x[0]])))
    for seed in (0, 1, 2):
        cert = estimate_holder_constants(obj, [(-1.0, 1.0)], samples=512, seed=seed)
        assert 0.95 <= cert.nu <= 1.0
        assert 1.0 <= cert.beta <= 1.1
        assert cert.global_flag is False


def test_estimate_constants_on_sqrt_value_function():
    """The sqrt corner needs dense sampling; the fitted exponent lands near 1/2."""
    view = ValueFunctionView(make_sqrt_problem())
    for seed in (0, 1):
        cert = estimate_holder_constants(view, [(0.0, 1.0)], samples=4096, seed=seed)
        assert 0.45 <= cert.nu <= 0.55


def test_estimate_constants_certifies_pairs_exactly_for_quadratic():
    """For f(x) = x^2/2 every pair has ratio exactly 1, so beta = 1 certifies all of them."""
    obj = SmoothObjective(1, lambda x: (0.5 * x[0] ** 2, np.array([x[0]])))
    cert = estimate_holder_constants(obj, [(-1.0, 1.0)], samples=256, seed=4)
    assert cert.nu == pytest.approx(1.0, abs=1e-12)
    assert 1.0 <= cert.beta <= 1.0 + 1e-12
    rng = np.random.default_rng(99)
    x = rng.uniform(-1.0, 1.0, size=400)
    for i in range(0, 400, 2):
        dx = abs(x[i] - x[i + 1])
        assert dx <= cert.beta * dx**cert.nu * (1.0 + 1e-12)


def test_estimate_constants_constant_gradient():
    obj = SmoothObjective(2, lambda x: (3.0, np.zeros(2)))
    cert = estimate_holder_constants(obj, [(-1.0, 1.0), (0.0, 2.0)], samples=64)
    assert cert.beta <= 1e-12
    assert cert.global_flag is False


def test_estimate_constants_rejects_bad_input():
    obj = SmoothObjective(1, lambda x: (0.5 * x[0] ** 2, np.array([x[0]])))
    with pytest.raises(ValueError, match="volume"):
        estimate_holder_constants(obj, [(1.0, 1.0)])
    with pytest.raises(ValueError, match="samples"):
        estimate_holder_constants(obj, [(-1.0, 1.0)], samples=1)
    with pytest.raises(ValueError, match="region"):
        estimate_holder_constants(obj, [(-1.0, 1.0), (0.0, 1.0)])
