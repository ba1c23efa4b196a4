import itertools

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from nsark import pds, tableaux
from nsark.nbseries import (
    CoefficientProvider,
    DerivativeOrderError,
    JetOracle,
    LabelingExplosionError,
    LinearOracle,
    MissingCoefficientError,
    UCoefficients,
    elementary_differential,
    exact_u,
    nb_truncation,
    nsark_u,
    nsark_u_oracle,
)
from nsark.trees import density, enumerate_trees, tree

LINEAR2 = np.array([[-5.0, 1.0], [5.0, -1.0]])


def random_provider(rng, N, s, explicit=False):
    A = rng.normal(size=(N, s, s))
    if explicit:
        A = np.tril(A, -1)
    return CoefficientProvider(A, rng.normal(size=(N, s)))


# elementary differentials --------------------------------------------------------

def test_bullet_is_the_component(smooth_problem, rng):
    oracle = smooth_problem.oracle()
    y = rng.uniform(0.5, 2.0, smooth_problem.N)
    for nu in range(1, smooth_problem.N + 1):
        np.testing.assert_allclose(elementary_differential(tree(nu), oracle, y),
                                   smooth_problem.component(nu, y), rtol=0, atol=1e-15)


def test_linear_tall_tree_is_matrix_power(rng):
    M = rng.normal(size=(3, 3))
    y = rng.normal(size=3)
    t = tree((1, [(1, [1])]))
    np.testing.assert_allclose(elementary_differential(t, LinearOracle([M]), y),
                               M @ M @ M @ y, rtol=1e-13)


def test_linear_colored_chain_multiplies_in_order(rng):
    Ms = [rng.normal(size=(2, 2)) for _ in range(3)]
    y = rng.normal(size=2)
    t = tree((2, [(3, [1])]))
    np.testing.assert_allclose(elementary_differential(t, LinearOracle(Ms), y),
                               Ms[1] @ Ms[2] @ Ms[0] @ y, rtol=1e-13)


def test_linear_branching_tree_vanishes(rng):
    M = rng.normal(size=(2, 2))
    assert not elementary_differential(tree((1, [1, 1])), LinearOracle([M]), np.ones(2)).any()


def test_colorings_of_short_chain_sum_to_jacobian_times_field():
    problem = pds.nonlinear3()
    oracle = problem.oracle()
    y = np.array([2.0, 0.7, 0.4])
    total = sum(elementary_differential(tree((mu, [eta])), oracle, y)
                for mu in (1, 2, 3) for eta in (1, 2, 3))
    # Jacobian by central differences of the full right-hand side
    eps = 1e-6
    J = np.column_stack([(problem.rhs(y + eps * e) - problem.rhs(y - eps * e)) / (2 * eps)
                         for e in np.eye(3)])
    np.testing.assert_allclose(total, J @ problem.rhs(y), rtol=1e-7, atol=1e-10)


def test_oracle_deriv_symmetric(rng):
    oracle = pds.nonlinear3().oracle()
    y = rng.uniform(0.5, 2.0, 3)
    dirs = list(rng.normal(size=(3, 3)))
    base = oracle.deriv(1, y, dirs)
    for perm in itertools.permutations(dirs):
        np.testing.assert_allclose(oracle.deriv(1, y, list(perm)), base, rtol=1e-10, atol=1e-12)


def test_deriv_without_directions_is_eval(rng):
    oracle = pds.nonlinear3().oracle()
    y = rng.uniform(0.5, 2.0, 3)
    np.testing.assert_array_equal(oracle.deriv(2, y, []), oracle.eval(2, y))


def test_derivative_order_guard():
    oracle = JetOracle([lambda y: [y[0] ** 5]], 1, max_order=2)
    with pytest.raises(DerivativeOrderError):
        elementary_differential(tree((1, [1, 1, 1])), oracle, np.ones(1))


# truncated series ----------------------------------------------------------------

def test_nb0_is_identity(rng):
    y = rng.normal(size=2)
    out = nb_truncation({}, LinearOracle([LINEAR2]), y, 0.1, 0)
    np.testing.assert_array_equal(out, y)
    assert out is not y


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_scalar_linear_exact_flow_is_taylor_polynomial(k):
    lam, h, y = -1.3, 0.2, np.array([0.8])
    expected = y * sum((h * lam) ** j / np.prod(np.arange(1, j + 1)) for j in range(k + 1))
    got = nb_truncation(exact_u, LinearOracle([[[lam]]]), y, h, k)
    np.testing.assert_allclose(got, expected, rtol=1e-15)


def test_mapping_and_callable_coefficients_agree(rng):
    oracle = pds.nonlinear3().oracle()
    trees = enumerate_trees(3, 3)
    table = {t: exact_u(t) for t in trees}
    y = rng.uniform(0.5, 2.0, 3)
    np.testing.assert_allclose(nb_truncation(table, oracle, y, 0.05, 3, trees),
                               nb_truncation(exact_u, oracle, y, 0.05, 3), rtol=1e-15)


def test_missing_coefficient():
    trees = enumerate_trees(2, 2)
    table = {t: 1.0 for t in trees.of_order(1)}
    with pytest.raises(MissingCoefficientError):
        nb_truncation(table, LinearOracle([LINEAR2, LINEAR2]), np.ones(2), 0.1, 2, trees)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_exact_flow_truncation_order_linear2(k):
    problem = pds.linear2()
    oracle = problem.oracle()
    y0 = problem.y0
    hs = 0.1 * 0.5 ** np.arange(6)
    errs = [np.abs(scipy.linalg.expm(h * LINEAR2) @ y0 - nb_truncation(exact_u, oracle, y0, h, k)).max()
            for h in hs]
    slope = np.polyfit(np.log(hs[-4:]), np.log(errs[-4:]), 1)[0]
    assert slope == pytest.approx(k + 1, abs=0.1)


# u coefficients -----------------------------------------------------------------

def test_u_of_bullet_is_weight_sum(rng):
    co = random_provider(rng, 3, 4)
    for mu in (1, 2, 3):
        assert nsark_u(tree(mu), co) == pytest.approx(co.b[mu - 1].sum(), rel=1e-14)


def test_u_tall_tree_triple_sum(rng):
    co = random_provider(rng, 3, 3)
    mu, nu, xi = 2, 3, 1
    t = tree((mu, [(nu, [xi])]))
    expected = sum(co.b_coef(i, mu) * co.a(i, j, nu) * co.a(j, k, xi)
                   for i in range(1, 4) for j in range(1, 4) for k in range(1, 4))
    assert nsark_u(t, co) == pytest.approx(expected, rel=1e-12)
    assert nsark_u_oracle(t, co) == pytest.approx(expected, rel=1e-12)


def test_u_order_two_direct_expansion(rng):
    co = random_provider(rng, 2, 2)
    t = tree((1, [2]))
    expected = sum(co.b[0, i] * co.A[1, i, j] for i in range(2) for j in range(2))
    assert nsark_u_oracle(t, co) == pytest.approx(expected, rel=1e-14)


def test_u_trivial_single_stage():
    assert nsark_u_oracle(tree(1), CoefficientProvider([[0.0]], [1.0])) == 1.0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_replicated_rk4_reproduces_exact_coefficients(N):
    co = CoefficientProvider.replicated(tableaux.rk4.A, tableaux.rk4.b, N)
    session = UCoefficients(co)
    for t in enumerate_trees(4, N):
        assert abs(session.u(t) - 1.0 / density(t)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 4), st.booleans())
def test_recursion_matches_label_sum(s_, N, s, explicit):
    co = random_provider(np.random.default_rng(s_), N, s, explicit)
    session = UCoefficients(co)
    for t in enumerate_trees(4, N):
        ref = nsark_u_oracle(t, co)
        assert session.u(t) == pytest.approx(ref, rel=1e-12, abs=1e-12 * max(1.0, abs(ref)))


def test_u_is_sum_of_weighted_g(rng):
    co = random_provider(rng, 2, 3)
    session = UCoefficients(co)
    for t in enumerate_trees(3, 2):
        total = sum(co.b[nu - 1] @ session.g(t, nu) for nu in (1, 2))
        assert session.u(t) == pytest.approx(total, rel=1e-14)


def test_label_guard():
    co = CoefficientProvider(np.zeros((1, 4, 4)), np.ones((1, 4)))
    t = tree((1, [1, 1, 1, 1, 1, 1, 1, 1, 1, 1]))
    with pytest.raises(LabelingExplosionError):
        nsark_u_oracle(t, co)


def test_provider_shape_checks():
    with pytest.raises(ValueError):
        CoefficientProvider(np.zeros((2, 3, 3)), np.zeros((1, 3)))
    co = CoefficientProvider(np.tril(np.ones((3, 3)), -1), np.ones(3))
    assert co.N == 1 and co.s == 3 and co.is_explicit
