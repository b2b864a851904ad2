"""Function families, least-squares curve fitting, dependent-axis selection.

A family is a finite basis of functions R^{d-1} -> R, linear in coefficients.
Every family contains the constant function and all coordinate projections,
so plain Gaussians are always a special case of the curved model.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import DegenerateCluster, RankDeficient

BUILTIN_KINDS = ("linear", "quadratic", "cubic")


@dataclass(frozen=True)
class BasisFunction:
    """One basis element: a monomial given by its exponent tuple, or a callable."""

    tag: str  # constant | linear | monomial | custom
    exponents: tuple = None
    fn: object = None

    def __call__(self, xe):
        # xe arrives as a (n, input_dim) array via design_matrix
        if self.tag == "custom":
            return np.asarray([float(self.fn(row)) for row in xe])
        exp = np.asarray(self.exponents, dtype=float)
        return np.prod(xe ** exp, axis=1)


def constant_basis(input_dim):
    return BasisFunction("constant", (0,) * input_dim)


def projection_basis(input_dim, i):
    e = [0] * input_dim
    e[i] = 1
    return BasisFunction("linear", tuple(e))


def monomial_basis(exponents):
    return BasisFunction("monomial", tuple(int(e) for e in exponents))


def custom_basis(fn, input_dim):
    return BasisFunction("custom", (0,) * input_dim, fn)


@dataclass(frozen=True)
class FunctionFamily:
    """Ordered basis over R^{input_dim}. basis[0] must be the constant 1 and
    all coordinate projections must be present."""

    input_dim: int
    basis: tuple
    kind: str = "custom"

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        object.__setattr__(self, "basis", tuple(self.basis))
        b0 = self.basis[0]
        if b0.tag == "custom" or any(b0.exponents):
            raise ValueError("basis[0] must be the constant function")
        for i in range(self.input_dim):
            want = tuple(1 if j == i else 0 for j in range(self.input_dim))
            if not any(b.tag != "custom" and b.exponents == want for b in self.basis):
                raise ValueError(f"basis lacks the projection onto coordinate {i}")

    @property
    def size(self):
        return len(self.basis)

    def design_matrix(self, xe):
        xe = np.asarray(xe, dtype=float)
        if xe.ndim != 2:
            xe = xe.reshape(-1, self.input_dim)
        if xe.shape[1] != self.input_dim:
            raise ValueError(f"expected {self.input_dim} columns, got {xe.shape[1]}")
        return np.column_stack([b(xe) for b in self.basis])


def builtin_family(kind, input_dim):
    """linear = {1, x_i}; quadratic adds all degree-2 monomials; cubic adds
    univariate third powers on top of quadratic (full degree-3 tensor bases
    blow up combinatorially and are never needed here)."""
    if kind not in BUILTIN_KINDS:
        raise ValueError(f"unknown family kind {kind!r}")
    p = int(input_dim)
    basis = [constant_basis(p)] + [projection_basis(p, i) for i in range(p)]
    if kind in ("quadratic", "cubic"):
        for pair in itertools.combinations_with_replacement(range(p), 2):
            e = [0] * p
            for i in pair:
                e[i] += 1
            basis.append(monomial_basis(e))
    if kind == "cubic":
        if p == 1:
            basis.append(monomial_basis((3,)))
        else:
            for i in range(p):
                e = [0] * p
                e[i] = 3
                basis.append(monomial_basis(e))
    return FunctionFamily(p, tuple(basis), kind)


@dataclass(frozen=True)
class CurveFit:
    """A fitted curve: x_j ~ sum_b coeffs[b] * basis[b](x_others)."""

    family: FunctionFamily
    coeffs: np.ndarray = field(repr=False)
    sse: float = 0.0

    def evaluate(self, xe):
        """Curve value at one point (scalar out) or a batch (vector out)."""
        xe = np.asarray(xe, dtype=float)
        p = self.family.input_dim
        single = xe.ndim == 0 or (xe.ndim == 1 and p > 1 and xe.shape[0] == p)
        vals = self.family.design_matrix(xe.reshape(-1, p)) @ self.coeffs
        return float(vals[0]) if single else vals


def explanatory(x, j):
    """Columns of x with axis j removed, original order kept."""
    x = np.asarray(x, dtype=float)
    return np.delete(x, j, axis=1)


def fit_curve(x, j, family):
    """Least-squares fit of coordinate j on the family basis over the others."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xe = explanatory(x, j)
    a = family.design_matrix(xe)
    if x.shape[0] < family.size:
        raise RankDeficient(f"need at least {family.size} points, got {x.shape[0]}")
    coeffs = numerics.least_squares(a, x[:, j])
    resid = x[:, j] - a @ coeffs
    return CurveFit(family, coeffs, float(resid @ resid))


def select_orientation(x, family):
    """Fit every candidate dependent axis, return the cross-entropy argmin.

    Returns (axis, CurveFit, H, FAdaptedParams); ties go to the smallest axis
    index. Axes whose fit or covariance is degenerate are skipped; if every
    axis fails, DegenerateCluster is raised.
    """
    from .density import fadapted_cross_entropy

    x = np.atleast_2d(np.asarray(x, dtype=float))
    d = x.shape[1]
    best = None
    for k in range(d):
        try:
            curve = fit_curve(x, k, family)
            h, params = fadapted_cross_entropy(x, k, curve)
        except (DegenerateCluster, RankDeficient):
            continue
        if best is None or h < best[2]:
            best = (k, curve, h, params)
    if best is None:
        raise DegenerateCluster("no orientation admits a non-degenerate fit")
    return best
