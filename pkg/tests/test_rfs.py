import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsc.probability import Distribution, RandomDomain
from fsc.quadrature import inner, tensor_grid
from fsc.rfs import (Basis, DegenerateBasisError, GridFunction, gpc_basis, graded_lex_indices,
                     gram_schmidt, mean_var, project)


def funcs(grid, *fns):
    return [GridFunction.of(grid, fn) for fn in fns]


def assert_orthogonal(basis, tol=1e-10):
    G = basis.gram()
    n = np.sqrt(np.diag(G))
    off = np.abs(G - np.diag(np.diag(G))) / np.outer(n, n)
    assert off.max() <= tol
    assert np.allclose(np.diag(G), basis.squared_norms, rtol=1e-14, atol=0)


def test_grid_function_validation(unit_grid):
    with pytest.raises(ValueError):
        GridFunction(unit_grid, np.ones(3))
    bad = np.ones(unit_grid.Q)
    bad[2] = np.nan
    with pytest.raises(ValueError):
        GridFunction(unit_grid, bad)


def test_already_orthogonal_pair_unchanged(unit_grid):
    cands = funcs(unit_grid, lambda x: np.ones(len(x)), lambda x: x[:, 0])
    b = gram_schmidt(cands)
    assert b.P == 1
    assert np.allclose(b.values[1], unit_grid.nodes[:, 0], atol=1e-15)


def test_quadratic_becomes_legendre(unit_grid):
    x = unit_grid.nodes[:, 0]
    b = gram_schmidt(funcs(unit_grid, lambda x: np.ones(len(x)), lambda x: x[:, 0], lambda x: x[:, 0] ** 2))
    assert np.allclose(b.values[2], x**2 - 1 / 3, atol=1e-14)
    assert b.squared_norms[2] == pytest.approx(4 / 45, rel=1e-12)


def test_constant_multiple_is_degenerate(unit_grid):
    with pytest.raises(DegenerateBasisError):
        gram_schmidt(funcs(unit_grid, lambda x: np.ones(len(x)), lambda x: 3.0 * np.ones(len(x))))
    with pytest.raises(DegenerateBasisError):
        gram_schmidt([])


def test_constant_first_required(unit_grid):
    with pytest.raises(ValueError):
        gram_schmidt(funcs(unit_grid, lambda x: x[:, 0], lambda x: np.ones(len(x))))


def test_dependent_candidate_dropped_order_kept(unit_grid):
    b = gram_schmidt(funcs(unit_grid,
                           lambda x: np.ones(len(x)), lambda x: x[:, 0], lambda x: 2 * x[:, 0] + 1,
                           lambda x: x[:, 0] ** 3))
    assert b.P == 2
    assert b.kept == (0, 1, 3)


def test_gpc_legendre(unit_grid):
    b = gpc_basis(unit_grid, 2)
    x = unit_grid.nodes[:, 0]
    s = np.sqrt(1 / 3)
    # standardised monomials z = x / s orthogonalise to (x/s), (x^2 - 1/3)/s^2
    assert np.allclose(b.values[1] * s, x, atol=1e-14)
    assert np.allclose(b.values[2] * s**2, x**2 - 1 / 3, atol=1e-13)
    one = gpc_basis(unit_grid, 0)
    assert one.size == 1 and np.all(one.values == 1)


def test_gpc_jacobi_matches_scipy():
    from scipy.special import eval_jacobi
    dist = Distribution.beta_on(2, 5)
    g = tensor_grid(RandomDomain([dist]), [30])
    b = gpc_basis(g, 4)
    t = 2 * g.nodes[:, 0] - 1  # Jacobi variable, exponents (4, 1)
    for j in range(1, 5):
        ref = eval_jacobi(j, 4, 1, t)
        c = np.dot(b.values[j], ref * g.weights) / np.dot(ref, ref * g.weights)
        assert np.allclose(b.values[j], c * ref, rtol=1e-9, atol=1e-9 * np.abs(b.values[j]).max())


def test_graded_lex():
    assert graded_lex_indices(2, 6) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert graded_lex_indices(3, 4) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_gpc_two_dimensional():
    dom = RandomDomain([Distribution.uniform(-1, 1), Distribution.beta_on(2, 5)])
    g = tensor_grid(dom, [6, 6])
    b = gpc_basis(g, 5)
    assert b.size == 6
    assert_orthogonal(b)
    # first non-constant members depend on one axis each
    x0, x1 = g.nodes[:, 0], g.nodes[:, 1]
    assert np.allclose(b.values[1] / b.values[1][np.argmax(np.abs(b.values[1]))],
                       x0 / x0[np.argmax(np.abs(b.values[1]))], atol=1e-12)
    c = np.polyfit(x1, b.values[2], 1)
    assert np.allclose(np.polyval(c, x1), b.values[2], atol=1e-12)


def test_project_examples():
    g = tensor_grid(RandomDomain([Distribution.uniform(340, 460)]), [10])
    b = gram_schmidt(funcs(g, lambda x: np.ones(len(x)), lambda x: x[:, 0] - 400))
    assert np.allclose(project(b, GridFunction.of(g, lambda x: x[:, 0])), [400, 1], rtol=1e-12)
    assert np.allclose(project(b, GridFunction.constant(g, 7.0)), [7, 0], atol=1e-12)
    assert np.allclose(project(b, b.functions[1]), [0, 1], atol=1e-12)
    m, v = mean_var(b, project(b, GridFunction.of(g, lambda x: x[:, 0])))
    assert m == pytest.approx(400, rel=1e-12) and v == pytest.approx(1200, rel=1e-9)


def test_mean_var_examples(unit_grid):
    b = gram_schmidt(funcs(unit_grid, lambda x: np.ones(len(x)), lambda x: x[:, 0]))
    assert mean_var(b, [0.0, 2.0]) == pytest.approx((0.0, 4 / 3))
    assert mean_var(b, [3.0, 0.0]) == (3.0, 0.0)
    with pytest.raises(ValueError):
        mean_var(b, [1.0, 2.0, 3.0])
    m, v = mean_var(b, np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(m, [1, 0]) and np.allclose(v, [0, 1 / 3])


def test_project_grid_mismatch(unit_grid):
    other = tensor_grid(unit_grid.domain, [20])
    b = gpc_basis(unit_grid, 2)
    with pytest.raises(ValueError):
        project(b, GridFunction.constant(other, 1.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 10_000))
def test_random_polynomial_candidates_orthogonal(n_cand, seed):
    rng = np.random.default_rng(seed)
    dom = RandomDomain([Distribution.uniform(-1, 1), Distribution.beta_on(2, 5, 0, 2)])
    g = tensor_grid(dom, [8, 8])
    x, y = g.nodes[:, 0], g.nodes[:, 1]
    rows = [np.ones(g.Q)]
    for _ in range(n_cand - 1):
        c = rng.normal(size=6) * 10.0 ** rng.uniform(-3, 3)
        rows.append(c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * x**3 + c[5] * y**4)
    b = gram_schmidt([GridFunction(g, r) for r in rows])
    assert_orthogonal(b)
    assert b.P <= 5


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_span_reconstruction_and_bessel(seed):
    rng = np.random.default_rng(seed)
    g = tensor_grid(RandomDomain([Distribution.beta_on(2, 5, 340, 460)]), [30])
    b = gpc_basis(g, 5)
    coef = rng.normal(size=b.size)
    f = GridFunction(g, b.reconstruct(coef))
    c = project(b, f)
    assert np.allclose(b.reconstruct(c), f.values, rtol=1e-9, atol=1e-9 * np.abs(f.values).max())
    m, v = mean_var(b, c)
    mq = g.integrate(f.values)
    vq = g.integrate((f.values - mq) ** 2)
    assert m == pytest.approx(mq, rel=1e-9, abs=1e-12)
    assert v == pytest.approx(vq, rel=1e-9)
    h = GridFunction(g, rng.normal(size=g.Q))
    ch = project(b, h)
    assert inner(g, h, h) >= np.dot(b.squared_norms, ch**2) - 1e-9
