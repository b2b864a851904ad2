import numpy as np
import pytest

from afcec.curves import (
    FunctionFamily,
    builtin_family,
    constant_basis,
    custom_basis,
    explanatory,
    fit_curve,
    monomial_basis,
    projection_basis,
    select_orientation,
)
from afcec.errors import DegenerateCluster, RankDeficient


def test_builtin_family_sizes():
    # constant + p projections [+ deg-2 monomials [+ univariate cubes]]
    assert builtin_family("linear", 1).size == 2
    assert builtin_family("linear", 3).size == 4
    assert builtin_family("quadratic", 1).size == 3
    assert builtin_family("quadratic", 2).size == 6  # 1 + 2 + 3
    assert builtin_family("cubic", 1).size == 4
    assert builtin_family("cubic", 2).size == 8  # quadratic(2) + x0^3 + x1^3


def test_builtin_family_rejects_unknown_kind():
    with pytest.raises(ValueError):
        builtin_family("quartic", 1)


def test_family_requires_constant_and_projections():
    with pytest.raises(ValueError):
        FunctionFamily(input_dim=1, basis=(projection_basis(1, 0),))
    with pytest.raises(ValueError):
        FunctionFamily(input_dim=2, basis=(constant_basis(2), projection_basis(2, 0)))


def test_design_matrix_shapes():
    fam = builtin_family("quadratic", 2)
    xe = np.arange(10.0).reshape(5, 2)
    dm = fam.design_matrix(xe)
    assert dm.shape == (5, 6)
    assert np.allclose(dm[:, 0], 1.0)
    assert np.allclose(dm[:, 1], xe[:, 0])
    single = fam.design_matrix(xe[0])
    assert single.shape == (1, 6)


def test_monomial_basis_values():
    b = monomial_basis((2, 1))
    pts = np.array([[2.0, 3.0], [1.0, -1.0]])
    assert np.allclose(b(pts), [12.0, -1.0])


def test_custom_basis_evaluates_rowwise():
    b = custom_basis(lambda row: row[0] * row[1], 2)
    pts = np.array([[2.0, 3.0], [4.0, 0.5]])
    assert np.allclose(b(pts), [6.0, 2.0])


def test_fit_curve_recovers_polynomial():
    rng = np.random.default_rng(7)
    x0 = rng.uniform(-2.0, 2.0, 60)
    y = 0.3 - 1.1 * x0 + 0.5 * x0 * x0
    pts = np.column_stack([x0, y])
    fam = builtin_family("quadratic", 1)
    fit = fit_curve(pts, 1, fam)
    assert np.allclose(fit.coeffs, [0.3, -1.1, 0.5], atol=1e-9)
    assert fit.sse < 1e-18
    assert np.allclose(fit.evaluate(x0[:, None]), y, atol=1e-9)


def test_fit_curve_sse_is_grid_optimal():
    # brute force over a coefficient grid cannot beat the normal equations
    rng = np.random.default_rng(8)
    x0 = rng.uniform(-1.0, 1.0, 40)
    y = 0.2 + 0.7 * x0 + rng.normal(0.0, 0.3, 40)
    pts = np.column_stack([x0, y])
    fit = fit_curve(pts, 1, builtin_family("linear", 1))
    for c0 in np.linspace(-1.0, 1.0, 41):
        for c1 in np.linspace(-1.0, 2.0, 61):
            sse = float(np.sum((y - c0 - c1 * x0) ** 2))
            assert fit.sse <= sse + 1e-9


def test_fit_curve_sse_monotone_in_family_nesting():
    rng = np.random.default_rng(9)
    pts = rng.standard_normal((50, 2))
    sses = [
        fit_curve(pts, 1, builtin_family(kind, 1)).sse
        for kind in ("linear", "quadratic", "cubic")
    ]
    assert sses[0] >= sses[1] - 1e-12
    assert sses[1] >= sses[2] - 1e-12


def test_fit_curve_too_few_points():
    pts = np.array([[0.0, 1.0], [1.0, 2.0]])
    with pytest.raises(RankDeficient):
        fit_curve(pts, 1, builtin_family("quadratic", 1))


def test_explanatory_drops_column():
    pts = np.arange(12.0).reshape(4, 3)
    assert np.allclose(explanatory(pts, 1), pts[:, [0, 2]])


def test_select_orientation_prefers_functional_axis():
    # sideways parabola x0 = x1^2: only axis 0 is a function of the rest
    rng = np.random.default_rng(10)
    x1 = rng.uniform(-2.0, 2.0, 300)
    x0 = x1 * x1 + rng.normal(0.0, 0.01, 300)
    pts = np.column_stack([x0, x1])
    axis, curve, h, params = select_orientation(pts, builtin_family("quadratic", 1))
    assert axis == 0
    assert params.dependent_axis == 0
    coef = np.zeros(3)
    coef[: len(curve.coeffs)] = curve.coeffs
    assert np.allclose(coef, [0.0, 0.0, 1.0], atol=0.01)


def test_select_orientation_tie_breaks_low_axis():
    # exchange-symmetric cloud: both axes score identically, axis 0 wins
    rng = np.random.default_rng(11)
    a = rng.standard_normal(200)
    b = rng.standard_normal(200)
    pts = np.concatenate([np.column_stack([a, b]), np.column_stack([b, a])])
    axis, *_ = select_orientation(pts, builtin_family("linear", 1))
    assert axis == 0


def test_select_orientation_degenerate_cluster():
    pts = np.zeros((2, 3))
    with pytest.raises(DegenerateCluster):
        select_orientation(pts, builtin_family("quadratic", 2))
