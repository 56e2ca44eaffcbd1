"""The split operator family on R^6: exact construction and spectra.

The operator ``H`` is defined by differentiating the basis-substitution
determinant of the (2,3) star Jacobian with respect to the six coordinates
and dividing out the monomial factor ``u2*u3*v1*v3``.  Everything else is
derived from it: ``H^2 = H*H``, the t-derivatives entrywise.

Structure worth knowing (used by the fast numeric builders and proved
against the symbolic construction in the tests): with ``x = (u, v)``,
``beta = (u, -v)``, ``phi = (0, 1/u2, 1/u3, 1/v1, 0, 1/v3)`` and
``S = diag(1,1,1,-1,-1,-1)``,

    H = outer(beta, phi) + S          and   phi . beta == 0,

so ``H^2 = outer(beta, phi*S) + outer(S*beta, phi) + I``.  Consequently H has
point-independent eigenvalues {+-sqrt(5), +-1, +-1}, H^2 has {5,5,1,1,1,1},
four singular values of H are exactly 1 and the extreme two multiply to 5.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import tuples
from .symbolic import (
    EvaluationError,
    ExprError,
    PointState,
    RationalExpr,
    Sym,
    expr,
)

VARS = tuple(Sym(i, 0) for i in range(6))

# the coordinate displays the construction must reproduce, entry by entry
H_DISPLAY = (
    ("1", "u1/u2", "u1/u3", "u1/v1", "0", "u1/v3"),
    ("0", "2", "u2/u3", "u2/v1", "0", "u2/v3"),
    ("0", "u3/u2", "2", "u3/v1", "0", "u3/v3"),
    ("0", "-v1/u2", "-v1/u3", "-2", "0", "-v1/v3"),
    ("0", "-v2/u2", "-v2/u3", "-v2/v1", "-1", "-v2/v3"),
    ("0", "-v3/u2", "-v3/u3", "-v3/v1", "0", "-2"),
)

H_SQUARED_DISPLAY = (
    ("1", "2*u1/u2", "2*u1/u3", "0", "0", "0"),
    ("0", "3", "2*u2/u3", "0", "0", "0"),
    ("0", "2*u3/u2", "3", "0", "0", "0"),
    ("0", "0", "0", "3", "0", "2*v1/v3"),
    ("0", "0", "0", "2*v2/v1", "1", "2*v2/v3"),
    ("0", "0", "0", "2*v3/v1", "0", "3"),
)

# quotient-rule derivative of every H entry; the (5,2) entry is written with
# the leading minus that d/dt(-v2/u2) requires
H_PRIME_DISPLAY = (
    ("0", "u1'/u2 - u1*u2'/u2^2", "u1'/u3 - u1*u3'/u3^2",
     "u1'/v1 - u1*v1'/v1^2", "0", "u1'/v3 - u1*v3'/v3^2"),
    ("0", "0", "u2'/u3 - u2*u3'/u3^2",
     "u2'/v1 - u2*v1'/v1^2", "0", "u2'/v3 - u2*v3'/v3^2"),
    ("0", "u3'/u2 - u3*u2'/u2^2", "0",
     "u3'/v1 - u3*v1'/v1^2", "0", "u3'/v3 - u3*v3'/v3^2"),
    ("0", "-v1'/u2 + v1*u2'/u2^2", "-v1'/u3 + v1*u3'/u3^2",
     "0", "0", "-v1'/v3 + v1*v3'/v3^2"),
    ("0", "-v2'/u2 + v2*u2'/u2^2", "-v2'/u3 + v2*u3'/u3^2",
     "-v2'/v1 + v2*v1'/v1^2", "0", "-v2'/v3 + v2*v3'/v3^2"),
    ("0", "-v3'/u2 + v3*u2'/u2^2", "-v3'/u3 + v3*u3'/u3^2",
     "-v3'/v1 + v3*v1'/v1^2", "0", "0"),
)


def parse_matrix(strings) -> tuple:
    return tuple(tuple(expr(s) for s in row) for row in strings)


def mirror_symbolic() -> tuple:
    """(u1, u2, u3, -v1, -v2, -v3)."""
    return tuples.mirror_vector()


def aligned_symbolic() -> tuple:
    """(u1, u2, u3, v1, v2, v3)."""
    out = [RationalExpr.var(f"u{i}") for i in (1, 2, 3)]
    out += [RationalExpr.var(f"v{i}") for i in (1, 2, 3)]
    return tuple(out)


def mat_vec(matrix, vector) -> tuple:
    return tuple(
        functools.reduce(lambda a, b: a + b,
                         (matrix[i][j] * vector[j] for j in range(6)))
        for i in range(6))


def mat_mul(a, b) -> tuple:
    return tuple(tuple(
        functools.reduce(lambda x, y: x + y,
                         (a[i][k] * b[k][j] for k in range(6)))
        for j in range(6)) for i in range(6))


@dataclass(frozen=True)
class OperatorBundle:
    """H and its derived matrices, all symbolic 6x6 RationalExpr grids."""

    h: tuple
    h_squared: tuple
    h_prime: tuple
    h_second: tuple
    h_squared_prime: tuple

    def at(self, point: PointState) -> "NumericOperators":
        def ev(mat):
            return tuple(tuple(e.evaluate(point) for e in row) for row in mat)
        return NumericOperators(ev(self.h), ev(self.h_squared),
                                ev(self.h_prime), ev(self.h_second),
                                ev(self.h_squared_prime), point)


@dataclass(frozen=True)
class NumericOperators:
    h: tuple
    h_squared: tuple
    h_prime: tuple
    h_second: tuple
    h_squared_prime: tuple
    point: PointState


@functools.lru_cache(maxsize=4)
def build_operators(max_order: int = 2) -> OperatorBundle:
    """Construct H from the basis-substitution determinant, then derive."""
    ed = tuples.external_det()
    factor = expr("u2*u3*v1*v3")
    h = tuple(tuple(ed.vector[i].diff_sym(VARS[j]) / factor
                    for j in range(6)) for i in range(6))
    h_squared = mat_mul(h, h)
    h_prime = tuple(tuple(e.diff_t(max_order) for e in row) for row in h)
    h_second = tuple(tuple(e.diff_t(max_order) for e in row) for row in h_prime)
    h_squared_prime = tuple(tuple(e.diff_t(max_order) for e in row)
                            for row in h_squared)
    return OperatorBundle(h, h_squared, h_prime, h_second, h_squared_prime)


# ---------------------------------------------------------------------------
# Fast numeric builders (outer-product form; exact for exact points)


def _lift(x):
    return Fraction(x) if isinstance(x, int) else x


def _frames(p: PointState):
    x = [_lift(c) for c in p.coords()]
    dx = [_lift(c) for c in tuple(p.du) + tuple(p.dv)]
    ddx = [_lift(c) for c in tuple(p.ddu) + tuple(p.ddv)]
    sign = (1, 1, 1, -1, -1, -1)
    beta = [s * c for s, c in zip(sign, x)]
    beta_d = [s * c for s, c in zip(sign, dx)]
    beta_dd = [s * c for s, c in zip(sign, ddx)]
    active = (1, 2, 3, 5)
    phi = [0] * 6
    phi_d = [0] * 6
    phi_dd = [0] * 6
    for j in active:
        phi[j] = 1 / x[j]
        phi_d[j] = -dx[j] / x[j] ** 2
        phi_dd[j] = -ddx[j] / x[j] ** 2 + 2 * dx[j] ** 2 / x[j] ** 3
    return x, dx, sign, beta, beta_d, beta_dd, phi, phi_d, phi_dd


def h_numeric(p: PointState) -> list:
    _, _, sign, beta, _, _, phi, _, _ = _frames(p)
    return [[beta[i] * phi[j] + (sign[i] if i == j else 0)
             for j in range(6)] for i in range(6)]


def h_prime_numeric(p: PointState) -> list:
    _, _, _, beta, beta_d, _, phi, phi_d, _ = _frames(p)
    return [[beta_d[i] * phi[j] + beta[i] * phi_d[j]
             for j in range(6)] for i in range(6)]


def h_second_numeric(p: PointState) -> list:
    _, _, _, beta, beta_d, beta_dd, phi, phi_d, phi_dd = _frames(p)
    return [[beta_dd[i] * phi[j] + 2 * beta_d[i] * phi_d[j]
             + beta[i] * phi_dd[j] for j in range(6)] for i in range(6)]


def h_squared_numeric(p: PointState) -> list:
    x, _, sign, beta, _, _, phi, _, _ = _frames(p)
    return [[beta[i] * phi[j] * sign[j] + sign[i] * beta[i] * phi[j]
             + (1 if i == j else 0) for j in range(6)] for i in range(6)]


def h_squared_prime_numeric(p: PointState) -> list:
    x, dx, sign, beta, beta_d, _, phi, phi_d, _ = _frames(p)
    plus = x
    plus_d = dx
    return [[beta_d[i] * phi[j] * sign[j] + beta[i] * phi_d[j] * sign[j]
             + plus_d[i] * phi[j] + plus[i] * phi_d[j]
             for j in range(6)] for i in range(6)]


def as_float(matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in matrix], dtype=float)


def mirror_at(p: PointState) -> list:
    return [_lift(p.u[0]), _lift(p.u[1]), _lift(p.u[2]),
            -_lift(p.v[0]), -_lift(p.v[1]), -_lift(p.v[2])]


def aligned_at(p: PointState) -> list:
    return [_lift(c) for c in p.coords()]


def trace_exact(p: PointState):
    """Trace of H at an exact point; identically zero."""
    h = h_numeric(p)
    return sum(h[i][i] for i in range(6))


# ---------------------------------------------------------------------------
# Symbolic identity suite


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _match_matrix(name, got, want) -> CheckResult:
    for i in range(6):
        for j in range(6):
            if not got[i][j].equals(want[i][j]):
                return CheckResult(name, False, f"entry ({i + 1},{j + 1})")
    return CheckResult(name, True)


def _match_vector(name, got, want) -> CheckResult:
    for i in range(6):
        if not got[i].equals(want[i]):
            return CheckResult(name, False, f"entry ({i + 1})")
    return CheckResult(name, True)


def _scaled(vec, c: int) -> tuple:
    factor = RationalExpr.const(c)
    return tuple(factor * x for x in vec)


def verify_identity_suite(bundle: OperatorBundle | None = None) -> list:
    """Prove the seven exact operator identities; report offending entries."""
    bundle = bundle or build_operators()
    mirror = mirror_symbolic()
    aligned = aligned_symbolic()
    results = [
        _match_vector("mirror_to_aligned",
                      mat_vec(bundle.h, mirror), aligned),
        _match_vector("square_on_mirror",
                      mat_vec(bundle.h_squared, mirror), _scaled(mirror, 5)),
        _match_vector("aligned_to_scaled",
                      mat_vec(bundle.h, aligned), _scaled(mirror, 5)),
        _match_vector("square_on_aligned",
                      mat_vec(bundle.h_squared, aligned), _scaled(aligned, 5)),
        _match_matrix("square_matches_display",
                      bundle.h_squared, parse_matrix(H_SQUARED_DISPLAY)),
        _match_matrix("rate_matches_display",
                      bundle.h_prime, parse_matrix(H_PRIME_DISPLAY)),
    ]
    # gradient of the basis-substitution determinant factors through the
    # displayed operator
    ed = tuples.external_det()
    factor = expr("u2*u3*v1*v3")
    display = parse_matrix(H_DISPLAY)
    grad_ok = CheckResult("gradient_factorization", True)
    for i in range(6):
        for j in range(6):
            if not ed.vector[i].diff_sym(VARS[j]).equals(factor * display[i][j]):
                grad_ok = CheckResult("gradient_factorization", False,
                                      f"entry ({i + 1},{j + 1})")
                break
        if not grad_ok.passed:
            break
    results.append(grad_ok)
    return results


def operator_matches_display(bundle: OperatorBundle | None = None) -> CheckResult:
    bundle = bundle or build_operators()
    return _match_matrix("operator_matches_display",
                         bundle.h, parse_matrix(H_DISPLAY))


# ---------------------------------------------------------------------------
# Eigendecomposition and singular values


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual_norms))


def eigen(matrix: np.ndarray) -> SpectralResult:
    vals, vecs = np.linalg.eig(np.asarray(matrix, dtype=float))
    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]
    residuals = np.array([
        np.linalg.norm(matrix @ vecs[:, k] - vals[k] * vecs[:, k])
        / np.linalg.norm(vecs[:, k]) for k in range(len(vals))])
    if np.max(np.abs(vals.imag)) < 1e-9:
        vals = vals.real
        vecs = vecs.real if np.max(np.abs(vecs.imag)) < 1e-9 else vecs
    return SpectralResult(vals, vecs, residuals)


def h_eigen(p: PointState) -> SpectralResult:
    return eigen(as_float(h_numeric(p)))


def h_squared_eigen(p: PointState) -> SpectralResult:
    return eigen(as_float(h_squared_numeric(p)))


H_EIGENVALUES = np.array([-math.sqrt(5), -1.0, -1.0, 1.0, 1.0, math.sqrt(5)])
H_SQUARED_EIGENVALUES = np.array([1.0, 1.0, 1.0, 1.0, 5.0, 5.0])


@dataclass(frozen=True)
class SingularValues:
    sigma: tuple                 # six values, descending
    radicand_sum: float          # scaled sigma_max^2 + sigma_min^2
    radicand_diff: float         # scaled sigma_max^2 - sigma_min^2
    source: str                  # "closed-form" | "numeric" | "numeric-fallback"

    @property
    def sigma_max(self) -> float:
        return self.sigma[0]

    @property
    def sigma_min(self) -> float:
        return self.sigma[5]


_RADICAND_SUM_TEXT = (
    "((v1^2 + v3^2)*u3^2 + v1^2*v3^2)*u2^4"
    " + u3^4*v1^2*v3^2"
    " + (v3^2*v1^4 + (v3^4 + (u1^2 + v2^2)*v3^2)*v1^2)*u3^2"
    " + ((v1^2 + v3^2)*u3^4"
    "    + (v1^4 + (u1^2 + v2^2 + 14*v3^2)*v1^2 + v3^4"
    "       + (u1^2 + v2^2)*v3^2)*u3^2"
    "    + v3^2*v1^4 + (v3^4 + (u1^2 + v2^2)*v3^2)*v1^2)*u2^2")

# best-effort reading of the companion radicand; it does NOT reconcile with
# the singular values (see radicand_report) and is kept only for the record
_RADICAND_DIFF_TEXT = (
    "((u1^2+u2^2+u3^2+v1^2+v2^2+v3^2)*((v1^2+v3^2)*u3^2+v1^2*v3^2)*u2^2"
    " + u3^2*v1^2*v3^2)*((v1^2+v3^2)*u3^2+v1^2*v3^2)*u2^4"
    " + ((v1^2+v3^2)*u3^4"
    "    + (v1^4+(u1^2+v2^2+24*v3^2)*v1^2+v3^2*(u1^2+v2^2+v3^2))*u3^2"
    "    + v1^2*v3^2*(u1^2+v1^2+v2^2+v3^2))*u2^2"
    " + u3^2*v1^2*v3^2*(u1^2+u3^2+v1^2+v2^2+v3^2)")


@functools.lru_cache(maxsize=2)
def radicand_sum_expr() -> RationalExpr:
    return expr(_RADICAND_SUM_TEXT)


@functools.lru_cache(maxsize=2)
def radicand_diff_transcribed_expr() -> RationalExpr:
    return expr(_RADICAND_DIFF_TEXT)


def _monomial_sq(p: PointState) -> float:
    return float(_lift(p.u[1]) * _lift(p.u[2])
                 * _lift(p.v[0]) * _lift(p.v[2])) ** 2


def svd_numeric(p: PointState) -> SingularValues:
    sigma = np.linalg.svd(as_float(h_numeric(p)), compute_uv=False)
    dsq = _monomial_sq(p)
    b = dsq * (sigma[0] ** 2 + sigma[5] ** 2)
    q = dsq * (sigma[0] ** 2 - sigma[5] ** 2)
    return SingularValues(tuple(sigma), b, q, "numeric")


def svd_closed_form(p: PointState) -> SingularValues:
    """Extreme singular values from the closed-form radicands.

    The additive radicand is the transcribed polynomial (it reconciles with
    the spectrum); the subtractive one is derived from the two invariants
    sum = b/d and product = 5, because the transcribed companion does not
    reconcile.  A negative derived radicand falls back to the numeric SVD.
    """
    b = float(radicand_sum_expr().evaluate(p))
    dsq = _monomial_sq(p)
    disc = b * b - 100.0 * dsq * dsq
    if disc < 0:
        num = svd_numeric(p)
        return SingularValues(num.sigma, num.radicand_sum,
                              num.radicand_diff, "numeric-fallback")
    q = math.sqrt(disc)
    smax = math.sqrt((b + q) / (2.0 * dsq))
    smin = math.sqrt((b - q) / (2.0 * dsq))
    return SingularValues((smax, 1.0, 1.0, 1.0, 1.0, smin), b, q, "closed-form")


def radicand_report(p: PointState) -> dict:
    """Which closed-form reading reconciles with the numeric SVD."""
    num = svd_numeric(p)
    b_transcribed = float(radicand_sum_expr().evaluate(p))
    q_transcribed = float(radicand_diff_transcribed_expr().evaluate(p))
    q_required = num.radicand_diff
    return {
        "sum_transcribed": b_transcribed,
        "sum_from_sigma": num.radicand_sum,
        "sum_reconciles": bool(
            abs(b_transcribed - num.radicand_sum)
            <= 1e-8 * max(1.0, abs(num.radicand_sum))),
        "diff_transcribed": q_transcribed,
        "diff_from_sigma": q_required,
        "diff_reconciles": bool(
            abs(q_transcribed - q_required)
            <= 1e-8 * max(1.0, abs(q_required))),
        "diff_derived_from_invariants": math.sqrt(
            max(b_transcribed ** 2 - 100.0 * _monomial_sq(p) ** 2, 0.0)),
    }


# ---------------------------------------------------------------------------
# Closed-form eigenvector candidates (validated per column, never assumed)

_S5 = math.sqrt(5)


def h_reference_eigenvectors(p: PointState) -> list:
    """Printed closed-form eigenvector columns of H with their eigenvalues."""
    u1, u2, u3 = (float(x) for x in p.u)
    v1, v2, v3 = (float(x) for x in p.v)
    cols = [
        (_S5, [0.5 * u1 * (_S5 - 1) / (_S5 - 2),
               -0.5 * u2 * (_S5 - 1) / (_S5 - 2),
               -0.5 * u3 * (3 + _S5), v1, v2, v3]),
        (-_S5, [-0.5 * u1 * (-_S5 - 1) / (-_S5 - 2),
                -0.5 * u2 * (-_S5 - 1) / (-_S5 - 2),
                -0.5 * u3 * (3 - _S5), v1, v2, v3]),
        (1.0, [0.0, -u2, u3, 0.0, 0.0, 0.0]),
        (1.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        (-1.0, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        (-1.0, [0.0, 0.0, 0.0, -v1, 0.0, v3]),
    ]
    return cols


def h_squared_reference_eigenvectors(p: PointState) -> list:
    u1, u2, u3 = (float(x) for x in p.u)
    v1, v2, v3 = (float(x) for x in p.v)
    cols = [
        (5.0, [u1 / u3, u2 / u3, 1.0, 0.0, 0.0, 0.0]),
        (5.0, [0.0, 0.0, 0.0, v1 / v3, v2 / v3, 1.0]),
        (1.0, [0.0, 0.0, 0.0, -v1 / v3, 0.0, 1.0]),
        (1.0, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
        (1.0, [0.0, -u2 / u3, 1.0, 0.0, 0.0, 0.0]),
        (1.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ]
    return cols


def validate_reference_columns(p: PointState, which: str = "h",
                               tol: float = 1e-8) -> list:
    """Residual-check each closed-form column; flag failures, never assume."""
    if which == "h":
        mat = as_float(h_numeric(p))
        cols = h_reference_eigenvectors(p)
    elif which == "h_squared":
        mat = as_float(h_squared_numeric(p))
        cols = h_squared_reference_eigenvectors(p)
    else:
        raise ExprError("which must be 'h' or 'h_squared'")
    out = []
    for idx, (lam, col) in enumerate(cols, start=1):
        vec = np.array(col, dtype=float)
        res = np.linalg.norm(mat @ vec - lam * vec) / np.linalg.norm(vec)
        out.append({"column": idx, "eigenvalue": lam,
                    "residual": float(res), "ok": bool(res < tol)})
    return out


# ---------------------------------------------------------------------------
# Matrix pencils


@dataclass(frozen=True)
class PencilSolution:
    finite_eigenvalues: tuple
    eigenvectors: tuple
    residuals: tuple
    rank_a: int
    rank_b: int
    singular: bool           # det(A - lambda B) identically zero
    char_coeffs: tuple       # ascending powers of lambda

    @property
    def num_finite(self) -> int:
        return len(self.finite_eigenvalues)


def _is_exact_matrix(m) -> bool:
    return all(isinstance(x, (int, Fraction)) for row in m for x in row)


def _exact_det(rows) -> Fraction:
    return tuples._fraction_det([[Fraction(x) for x in row] for row in rows])


def _solve_fraction_system(a, b):
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(val)]
         for row, val in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col] / pv
                for c in range(col, n + 1):
                    m[r][c] -= f * m[col][c]
    return [m[r][n] / m[r][r] for r in range(n)]


def char_poly(a, b) -> tuple:
    """Coefficients of det(A - lambda*B), ascending; exact when inputs are."""
    n = len(a)
    lams = list(range(n + 1))
    if _is_exact_matrix(a) and _is_exact_matrix(b):
        dets = []
        for lam in lams:
            m = [[Fraction(a[i][j]) - lam * Fraction(b[i][j])
                  for j in range(n)] for i in range(n)]
            dets.append(tuples._fraction_det(m))
        vand = [[Fraction(lam) ** k for k in range(n + 1)] for lam in lams]
        coeffs = _solve_fraction_system(vand, dets)
        return tuple(coeffs)
    a_np = np.asarray(a, dtype=float)
    b_np = np.asarray(b, dtype=float)
    dets = [np.linalg.det(a_np - lam * b_np) for lam in lams]
    vand = np.vander(np.array(lams, dtype=float), n + 1, increasing=True)
    return tuple(np.linalg.solve(vand, np.array(dets)))


def _strip_char(coeffs) -> list:
    vals = [float(c) for c in coeffs]
    top = max((abs(v) for v in vals), default=0.0)
    if top == 0.0:
        return []
    if all(isinstance(c, Fraction) for c in coeffs):
        out = list(coeffs)
        while out and out[-1] == 0:
            out.pop()
        return out
    out = [v if abs(v) > 1e-10 * top else 0.0 for v in vals]
    while out and out[-1] == 0.0:
        out.pop()
    return out


def _matrix_rank_any(m) -> int:
    if _is_exact_matrix(m):
        return tuples._fraction_rank(m)
    arr = np.asarray(m, dtype=float)
    top = np.linalg.norm(arr, 2)
    return int(np.linalg.matrix_rank(arr, tol=1e-9 * max(top, 1e-300)))


def solve_pencil(a, b) -> PencilSolution:
    """Regular finite eigenpairs of the pencil (A, B).

    Works for rank-deficient B: det(A - lambda B) is interpolated exactly
    (for exact inputs) and its roots are the finite eigenvalues; eigenvectors
    come from the numeric nullspace of A - lambda B.  An identically zero
    determinant marks a singular pencil, which has no regular eigenpairs and
    is reported distinctly from "no finite eigenvalues".
    """
    coeffs = char_poly(a, b)
    stripped = _strip_char(coeffs)
    rank_a = _matrix_rank_any(a)
    rank_b = _matrix_rank_any(b)
    if not stripped:
        return PencilSolution((), (), (), rank_a, rank_b, True,
                              tuple(float(c) for c in coeffs))
    roots = np.roots([float(c) for c in reversed(stripped)]) \
        if len(stripped) > 1 else np.array([])
    a_np = np.asarray(a, dtype=float)
    b_np = np.asarray(b, dtype=float)
    vectors = []
    residuals = []
    finite = []
    for lam in roots:
        lamc = complex(lam)
        if abs(lamc.imag) < 1e-10 * max(1.0, abs(lamc.real)):
            lamc = complex(lamc.real, 0.0)
        pencil = a_np.astype(complex) - lamc * b_np.astype(complex)
        _, _, vh = np.linalg.svd(pencil)
        vec = vh[-1].conj()
        res = np.linalg.norm(a_np @ vec - lamc * (b_np @ vec))
        finite.append(lamc if lamc.imag else lamc.real)
        vectors.append(vec.real if not lamc.imag else vec)
        residuals.append(float(res))
    return PencilSolution(tuple(finite), tuple(vectors), tuple(residuals),
                          rank_a, rank_b, False,
                          tuple(float(c) for c in coeffs))


def lambda_formula_value(p: PointState):
    """The printed closed-form pencil eigenvalue (taken sign and all).

    Its magnitude matches one finite eigenvalue of the (H^2, H') pencil; the
    sign it carries disagrees with the eigenvalue through (u, -v), which is
    recorded by ``omega_pencil_report``.
    """
    u1, u2, u3 = (_lift(x) for x in p.u)
    v1, v2, v3 = (_lift(x) for x in p.v)
    du2, du3 = _lift(p.du[1]), _lift(p.du[2])
    dv1, dv3 = _lift(p.dv[0]), _lift(p.dv[2])
    den = u3 * v1 * v3 * du2 + du3 * u2 * v1 * v3 \
        - dv1 * u2 * u3 * v3 - dv3 * u2 * u3 * v1
    if den == 0:
        raise EvaluationError("pencil eigenvalue formula denominator vanishes")
    return 5 * u2 * u3 * v1 * v3 / den


def omega_pencil(p: PointState) -> PencilSolution:
    """The (H^2, H') pencil at a point with first-order jets."""
    return solve_pencil(h_squared_numeric(p), h_prime_numeric(p))


def omega_pencil_report(p: PointState, tol: float = 1e-8) -> dict:
    sol = omega_pencil(p)
    report = {
        "num_finite": sol.num_finite,
        "rank_b": sol.rank_b,
        "singular": sol.singular,
        "max_residual": max(sol.residuals, default=0.0),
    }
    try:
        formula = float(lambda_formula_value(p))
    except EvaluationError:
        report["formula"] = None
        return report
    mirror = np.array([float(x) for x in mirror_at(p)])
    mirror /= np.linalg.norm(mirror)
    best = None
    for lam, vec in zip(sol.finite_eigenvalues, sol.eigenvectors):
        v = np.asarray(vec)
        align = abs(np.vdot(mirror, v)) / np.linalg.norm(v)
        if best is None or align > best[0]:
            best = (float(align), lam)
    report["formula"] = formula
    if best is not None:
        align, lam = best
        lam_real = lam.real if isinstance(lam, complex) else float(lam)
        report["mirror_alignment"] = align
        report["eigenvalue_through_mirror"] = lam_real
        report["magnitude_matches_formula"] = bool(
            abs(abs(lam_real) - abs(formula))
            <= max(tol, 1e-8 * abs(formula)))
        report["sign_agrees_with_formula"] = bool(
            abs(lam_real - formula) <= max(tol, 1e-8 * abs(formula)))
    return report


def _mat_mul_exact(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def higher_pencil_scan(points, max_power: int = 2) -> dict:
    """Pencils from higher derivative splits stay singular for every power.

    Right-multiplying both sides by H^p cannot create regular eigenpairs:
    the base pencil already has an identically zero determinant, so the
    verdict must not change with p.
    """
    per_point = []
    for p in points:
        a0 = h_squared_prime_numeric(p)
        b0 = h_second_numeric(p)
        base = solve_pencil(a0, b0)
        h = h_numeric(p)
        powers_match = True
        ap, bp = a0, b0
        for _ in range(max_power):
            ap = _mat_mul_exact(ap, h)
            bp = _mat_mul_exact(bp, h)
            shifted = solve_pencil(ap, bp)
            if (shifted.singular != base.singular
                    or shifted.num_finite != base.num_finite):
                powers_match = False
                break
        per_point.append({
            "singular": base.singular,
            "num_finite": base.num_finite,
            "powers_match": powers_match,
        })
    return {
        "num_points": len(per_point),
        "all_singular": all(r["singular"] for r in per_point),
        "no_regular_finite_pairs": all(
            r["num_finite"] == 0 for r in per_point),
        "powers_consistent": all(r["powers_match"] for r in per_point),
        "max_power": max_power,
    }


# ---------------------------------------------------------------------------
# Rank checks for the image of a fixed vector


def hw0_rank_check(p: PointState, w0) -> tuple:
    """Ranks of the coordinate Jacobians of H*w0 and of its direction cosines.

    Both are 5 at generic points: the image of a fixed vector is constrained,
    while its direction may still be arbitrary.
    """
    w0 = [_lift(x) for x in w0]
    if all(x == 0 for x in w0):
        raise ExprError("w0 must be nonzero")
    bundle = build_operators()
    w0_expr = [RationalExpr.const(x) for x in w0]
    image = mat_vec(bundle.h, w0_expr)
    jac = [[image[i].diff_sym(VARS[j]) for j in range(6)] for i in range(6)]
    jac_num = np.array([[float(jac[i][j].evaluate(p)) for j in range(6)]
                        for i in range(6)])
    f = np.array([float(image[i].evaluate(p)) for i in range(6)])
    norm_f = np.linalg.norm(f)
    if norm_f == 0:
        raise EvaluationError("H*w0 vanishes at this point")
    mu_jac = jac_num / norm_f - np.outer(f, f @ jac_num) / norm_f ** 3
    def nrank(m):
        top = np.linalg.norm(m, 2)
        return int(np.linalg.matrix_rank(m, tol=1e-9 * max(top, 1e-300)))
    return nrank(jac_num), nrank(mu_jac)
