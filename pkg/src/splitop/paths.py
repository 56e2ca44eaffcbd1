"""Pathwise behavior of solutions to w' = H(t) w.

A :class:`Trajectory` prescribes the six coordinate functions (and their
jets) over an interval.  Integrating the flow gives a :class:`PathSolution`,
which is then enriched in place-free style (every stage returns a new
instance): swept area about the origin, the catenary profile of
``s(u) = |w|^2 / 2`` against the doubled sweep area ``u = 2A``, and the
dissipation split of the second u-derivative

    w''_u = t''_u w'_t + t'_u^2 H' w + t'_u^2 H^2 w.

A path is non-dissipative when each split term aligns with w itself; that
happens exactly on the two exponential families (catenary profile) and on
radial rays (zero sweep area, the degenerate soap-film regime).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .operators import (
    as_float,
    h_numeric,
    h_prime_numeric,
    h_squared_numeric,
)
from .symbolic import ExprError, PointState

CLASS_CATENARY = "NonDissipativeCatenary"
CLASS_LINE = "NonDissipativeLine"
CLASS_DISSIPATIVE = "Dissipative"

_trapz = getattr(np, "trapezoid", None) or np.trapz


class PathError(ValueError):
    """Trajectory or integration failure."""


class ZeroSweepArea(PathError):
    """No sweep area; the path is in the degenerate (straight-line) regime."""


class TrajectoryKind(Enum):
    EXP1 = "exp1"        # u = c e^t,   v = l e^-t
    EXP5 = "exp5"        # u = C e^5t,  v = K e^-5t
    SAMPLED = "sampled"
    CLOSURE = "closure"


_CSV_BASE = ("t", "u1", "u2", "u3", "v1", "v2", "v3")
_CSV_D1 = ("du1", "du2", "du3", "dv1", "dv2", "dv3")
_CSV_D2 = ("ddu1", "ddu2", "ddu3", "ddv1", "ddv2", "ddv3")


@dataclass(frozen=True)
class Trajectory:
    kind: TrajectoryKind
    t0: float
    t1: float
    growth: tuple | None = None   # coefficients on the e^{+rate t} block
    decay: tuple | None = None    # coefficients on the e^{-rate t} block
    rate: float = 1.0
    samples: dict | None = None
    fns: dict | None = None
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.t1 <= self.t0:
            raise PathError("empty time interval")
        if self.kind in (TrajectoryKind.EXP1, TrajectoryKind.EXP5):
            for coeffs in (self.growth, self.decay):
                if coeffs is None or len(coeffs) != 3 or any(c == 0 for c in coeffs):
                    raise PathError("exponential families need three nonzero "
                                    "coefficients per block")

    # -- constructors -----------------------------------------------------

    @staticmethod
    def exp1(c, l, t0: float = 0.0, t1: float = 1.0) -> "Trajectory":
        return Trajectory(TrajectoryKind.EXP1, t0, t1,
                          tuple(float(x) for x in c),
                          tuple(float(x) for x in l), rate=1.0)

    @staticmethod
    def exp5(c, k, t0: float = 0.0, t1: float = 1.0) -> "Trajectory":
        return Trajectory(TrajectoryKind.EXP5, t0, t1,
                          tuple(float(x) for x in c),
                          tuple(float(x) for x in k), rate=5.0)

    @staticmethod
    def from_functions(u, v, du=None, dv=None, ddu=None, ddv=None,
                       t0: float = 0.0, t1: float = 1.0,
                       fd_step: float = 1e-5) -> "Trajectory":
        fns = {"u": u, "v": v, "du": du, "dv": dv, "ddu": ddu, "ddv": ddv}
        return Trajectory(TrajectoryKind.CLOSURE, t0, t1, fns=fns,
                          fd_step=fd_step)

    @staticmethod
    def from_csv(path) -> "Trajectory":
        """Load ``t,u1..v3[,du1..dv3[,ddu1..ddv3]]`` with strictly rising t."""
        lines = Path(path).read_text().splitlines()
        if not lines:
            raise PathError(f"{path}: empty file (line 1)")
        header = tuple(h.strip() for h in lines[0].split(","))
        expected = [_CSV_BASE, _CSV_BASE + _CSV_D1, _CSV_BASE + _CSV_D1 + _CSV_D2]
        if header not in expected:
            raise PathError(f"{path}: bad header (line 1)")
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            cells = line.split(",")
            if len(cells) != len(header):
                raise PathError(f"{path}: expected {len(header)} columns "
                                f"(line {lineno})")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                raise PathError(f"{path}: malformed number (line {lineno})")
        if len(rows) < 4:
            raise PathError(f"{path}: need at least 4 samples "
                            f"(line {len(lines)})")
        data = np.array(rows)
        t = data[:, 0]
        for i in range(1, len(t)):
            if t[i] <= t[i - 1]:
                raise PathError(f"{path}: t must be strictly increasing "
                                f"(line {i + 2})")
        samples = {"t": t, "u": data[:, 1:4], "v": data[:, 4:7]}
        if len(header) >= 13:
            samples["du"] = data[:, 7:10]
            samples["dv"] = data[:, 10:13]
        else:
            samples["du"] = np.gradient(samples["u"], t, axis=0)
            samples["dv"] = np.gradient(samples["v"], t, axis=0)
        if len(header) == 19:
            samples["ddu"] = data[:, 13:16]
            samples["ddv"] = data[:, 16:19]
        else:
            samples["ddu"] = np.gradient(samples["du"], t, axis=0)
            samples["ddv"] = np.gradient(samples["dv"], t, axis=0)
        return Trajectory(TrajectoryKind.SAMPLED, float(t[0]), float(t[-1]),
                          samples=samples)

    # -- evaluation --------------------------------------------------------

    def _closure_eval(self, name, t):
        fn = self.fns.get(name)
        base = self.fns["u" if name.endswith("u") else "v"]
        h = self.fd_step
        if fn is not None:
            return tuple(float(x) for x in fn(t))
        if name in ("du", "dv"):
            lo, hi = np.asarray(base(t - h)), np.asarray(base(t + h))
            return tuple((hi - lo) / (2 * h))
        mid = np.asarray(base(t))
        lo, hi = np.asarray(base(t - h)), np.asarray(base(t + h))
        return tuple((hi - 2 * mid + lo) / h ** 2)

    def point(self, t: float) -> PointState:
        """Coordinate values and jets at time t."""
        k = self.kind
        if k in (TrajectoryKind.EXP1, TrajectoryKind.EXP5):
            r = self.rate
            up = math.exp(r * t)
            dn = math.exp(-r * t)
            u = tuple(c * up for c in self.growth)
            v = tuple(c * dn for c in self.decay)
            try:
                return PointState(u, v,
                                  du=tuple(r * x for x in u),
                                  dv=tuple(-r * x for x in v),
                                  ddu=tuple(r * r * x for x in u),
                                  ddv=tuple(r * r * x for x in v))
            except ExprError as exc:
                raise PathError(f"coordinate vanished at t={t}: {exc}")
        if k is TrajectoryKind.CLOSURE:
            vals = {"u": tuple(float(x) for x in self.fns["u"](t)),
                    "v": tuple(float(x) for x in self.fns["v"](t))}
            for name in ("du", "dv", "ddu", "ddv"):
                vals[name] = self._closure_eval(name, t)
            try:
                return PointState(vals["u"], vals["v"], vals["du"],
                                  vals["dv"], vals["ddu"], vals["ddv"])
            except ExprError as exc:
                raise PathError(f"coordinate vanished at t={t}: {exc}")
        # sampled: linear interpolation per column
        s = self.samples
        tt = s["t"]
        if t < tt[0] - 1e-12 or t > tt[-1] + 1e-12:
            raise PathError(f"t={t} outside sampled range")
        def interp(block):
            return tuple(float(np.interp(t, tt, block[:, j])) for j in range(3))
        try:
            return PointState(interp(s["u"]), interp(s["v"]),
                              interp(s["du"]), interp(s["dv"]),
                              interp(s["ddu"]), interp(s["ddv"]))
        except ExprError as exc:
            raise PathError(f"coordinate vanished at t={t}: {exc}")

    def reference_solution(self, t: float) -> np.ndarray | None:
        """Closed-form distinguished solution for the exponential families."""
        if self.kind is TrajectoryKind.EXP1:
            up = math.exp(t)
            return np.array([c * up for c in self.growth]
                            + [-c / up for c in self.decay])
        if self.kind is TrajectoryKind.EXP5:
            up = math.exp(5 * t)
            return np.array([c * up for c in self.growth]
                            + [c / up for c in self.decay])
        return None

    def area_rate(self) -> float | None:
        """Analytic dA/dt on the distinguished solution, if closed-form."""
        if self.kind is TrajectoryKind.EXP1:
            return float(np.linalg.norm(self.growth)
                         * np.linalg.norm(self.decay))
        if self.kind is TrajectoryKind.EXP5:
            return 5.0 * float(np.linalg.norm(self.growth)
                               * np.linalg.norm(self.decay))
        return None

    def catenary_parameters(self) -> tuple | None:
        """(scale c^2, phase a) of the closed-form catenary profile."""
        if self.kind not in (TrajectoryKind.EXP1, TrajectoryKind.EXP5):
            return None
        cn = float(np.linalg.norm(self.growth))
        ln = float(np.linalg.norm(self.decay))
        return cn * ln, math.log(cn / ln)


@dataclass(frozen=True)
class PathSolution:
    trajectory: Trajectory
    t: np.ndarray
    w: np.ndarray              # (N, 6)
    w_prime: np.ndarray        # (N, 6), H(t) w
    steps: int
    tol: float | None
    area: np.ndarray | None = None
    double_area: np.ndarray | None = None
    term0: np.ndarray | None = None   # t''_u w'_t
    term1: np.ndarray | None = None   # t'_u^2 H' w
    term2: np.ndarray | None = None   # t'_u^2 H^2 w
    delta: np.ndarray | None = None   # dissipation density over t
    dissipation_total: float | None = None
    classification: str | None = None

    def replace(self, **kw) -> "PathSolution":
        return dataclasses.replace(self, **kw)

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.w, axis=1)

    @property
    def total_double_area(self) -> float:
        if self.double_area is None:
            raise PathError("sweep area not computed")
        return float(self.double_area[-1] - self.double_area[0])


def _h_float(traj: Trajectory, t: float) -> np.ndarray:
    return as_float(h_numeric(traj.point(t)))


def _rk4_pass(traj: Trajectory, w0: np.ndarray, steps: int) -> tuple:
    ts = np.linspace(traj.t0, traj.t1, steps + 1)
    h = (traj.t1 - traj.t0) / steps
    mats = [_h_float(traj, t) for t in ts]
    mids = [_h_float(traj, t + h / 2) for t in ts[:-1]]
    w = np.empty((steps + 1, 6))
    w[0] = w0
    for i in range(steps):
        wi = w[i]
        k1 = mats[i] @ wi
        k2 = mids[i] @ (wi + 0.5 * h * k1)
        k3 = mids[i] @ (wi + 0.5 * h * k2)
        k4 = mats[i + 1] @ (wi + h * k3)
        w[i + 1] = wi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6
    w_prime = np.array([mats[i] @ w[i] for i in range(steps + 1)])
    return ts, w, w_prime


def integrate(traj: Trajectory, w0, steps: int = 2000,
              tol: float | None = None, max_doublings: int = 8) -> PathSolution:
    """Classic fourth-order fixed-step run; with ``tol`` set, the step count
    doubles until two successive refinements agree to within ``tol``."""
    w0 = np.asarray([float(x) for x in w0], dtype=float)
    if not np.any(w0):
        raise PathError("w0 must be nonzero")
    ts, w, wp = _rk4_pass(traj, w0, steps)
    if tol is None:
        return PathSolution(traj, ts, w, wp, steps, None)
    for _ in range(max_doublings):
        steps2 = steps * 2
        ts2, w2, wp2 = _rk4_pass(traj, w0, steps2)
        err = float(np.max(np.linalg.norm(w2[::2] - w, axis=1)))
        if err < tol:
            return PathSolution(traj, ts2, w2, wp2, steps2, tol)
        ts, w, wp, steps = ts2, w2, wp2, steps2
    raise PathError(f"refinement did not reach tol={tol} "
                    f"within {max_doublings} doublings (step underflow)")


def sweep_area(sol: PathSolution, anchor: float | None = None) -> PathSolution:
    """Accumulate the swept area about the origin by the trapezoid rule.

    The area element is the Lagrange-identity form
    ``dA = 0.5 * sqrt(|w|^2 |w'|^2 - (w . w')^2) dt``.  For the closed-form
    exponential families the constant of integration is fixed so that
    ``A(t) = rate * t`` exactly (zero offset); otherwise A starts at
    ``anchor`` (default 0) at the left endpoint.
    """
    w, wp = sol.w, sol.w_prime
    g = (np.sum(w * w, axis=1) * np.sum(wp * wp, axis=1)
         - np.sum(w * wp, axis=1) ** 2)
    rate = 0.5 * np.sqrt(np.maximum(g, 0.0))
    area = np.concatenate([
        [0.0],
        np.cumsum(0.5 * (rate[1:] + rate[:-1]) * np.diff(sol.t))])
    if anchor is None:
        analytic = sol.trajectory.area_rate()
        ref = sol.trajectory.reference_solution(sol.t[0])
        on_reference = (ref is not None
                        and np.allclose(ref, w[0], rtol=1e-9, atol=1e-12))
        anchor = analytic * sol.t[0] if (analytic is not None and on_reference) \
            else 0.0
    area = area + anchor
    return sol.replace(area=area, double_area=2.0 * area)


@dataclass(frozen=True)
class CatenaryFit:
    c_norm: float | None
    l_norm: float | None
    csq: float                # the scale, |c| |l| on closed-form families
    a: float                  # the phase, log(|c| / |l|)
    max_residual: float
    fitted: bool              # True when (csq, a) came from least squares


def catenary_check(sol: PathSolution) -> CatenaryFit:
    """Compare s(u) = |w|^2/2 against the catenary csq*cosh(u/csq + a)."""
    if sol.double_area is None:
        sol = sweep_area(sol)
    if sol.total_double_area <= 1e-8:
        raise ZeroSweepArea("no sweep area; straight-line regime, no fit")
    s = 0.5 * np.sum(sol.w * sol.w, axis=1)
    u = sol.double_area
    params = sol.trajectory.catenary_parameters()
    if params is not None:
        csq, a = params
        cn = float(np.linalg.norm(sol.trajectory.growth))
        ln = float(np.linalg.norm(sol.trajectory.decay))
        fitted = False
    else:
        from scipy.optimize import least_squares
        csq0 = max(float(np.min(s)), 1e-9)
        a0 = -float(u[np.argmin(s)]) / csq0
        def resid(theta):
            c2, aa = theta
            return c2 * np.cosh(u / c2 + aa) - s
        fit = least_squares(resid, x0=[csq0, a0], method="lm")
        csq, a = (float(x) for x in fit.x)
        cn = ln = None
        fitted = True
    residual = float(np.max(np.abs(s - csq * np.cosh(u / csq + a))))
    return CatenaryFit(cn, ln, csq, a, residual, fitted)


def _perp_norms(x: np.ndarray, w_unit: np.ndarray) -> np.ndarray:
    coeff = np.sum(x * w_unit, axis=1)
    return np.linalg.norm(x - coeff[:, None] * w_unit, axis=1)


def dissipation(sol: PathSolution, delta_tol: float = 1e-6,
                zero_area_tol: float = 1e-8) -> PathSolution:
    """Split w''_u into its three terms and measure misalignment with w.

    The dissipation density is the sum of the orthogonal-to-w norms of the
    three split terms, normalized by |w|; its integral over t is the total.
    Paths with no sweep area are the straight-line regime and are classified
    without a split (t(u) is undefined there).
    """
    if sol.double_area is None:
        sol = sweep_area(sol)
    n = len(sol.t)
    if sol.total_double_area <= zero_area_tol:
        return sol.replace(delta=np.zeros(n), dissipation_total=0.0,
                           classification=CLASS_LINE)
    du_dt = np.gradient(sol.double_area, sol.t)
    if np.min(du_dt) <= 1e-12:
        raise PathError("sweep area is not strictly increasing; "
                        "t(u) undefined")
    t_prime_u = 1.0 / du_dt
    t_second_u = np.gradient(t_prime_u, sol.double_area)
    hp = np.empty((n, 6, 6))
    h2 = np.empty((n, 6, 6))
    for i, t in enumerate(sol.t):
        p = sol.trajectory.point(t)
        hp[i] = as_float(h_prime_numeric(p))
        h2[i] = as_float(h_squared_numeric(p))
    term0 = t_second_u[:, None] * sol.w_prime
    term1 = (t_prime_u ** 2)[:, None] * np.einsum("nij,nj->ni", hp, sol.w)
    term2 = (t_prime_u ** 2)[:, None] * np.einsum("nij,nj->ni", h2, sol.w)
    norms = sol.norms
    w_unit = sol.w / norms[:, None]
    delta = (_perp_norms(term0, w_unit) + _perp_norms(term1, w_unit)
             + _perp_norms(term2, w_unit)) / norms
    total = float(_trapz(delta, sol.t))
    cls = CLASS_CATENARY if float(np.max(delta)) < delta_tol \
        else CLASS_DISSIPATIVE
    return sol.replace(term0=term0, term1=term1, term2=term2, delta=delta,
                       dissipation_total=total, classification=cls)


def scaled_family_residual(traj: Trajectory, scale_fn,
                           samples: int = 200) -> float:
    """Max relative residual of w' = H w for scale(t) times the closed form.

    Any nonconstant smooth scaling breaks the flow equation; constants keep
    it (the general solutions are unique up to constants).
    """
    if traj.reference_solution(traj.t0) is None:
        raise PathError("needs a closed-form trajectory")
    h = 1e-6
    ts = np.linspace(traj.t0 + 2 * h, traj.t1 - 2 * h, samples)
    worst = 0.0
    for t in ts:
        wm = scale_fn(t - h) * traj.reference_solution(t - h)
        wh = scale_fn(t + h) * traj.reference_solution(t + h)
        wc = scale_fn(t) * traj.reference_solution(t)
        dw = (wh - wm) / (2 * h)
        res = np.linalg.norm(dw - _h_float(traj, t) @ wc) / np.linalg.norm(wc)
        worst = max(worst, float(res))
    return worst


def uniqueness_check(traj: Trajectory, scale_fn, tol: float = 1e-4) -> bool:
    """True iff the scaled family still satisfies the flow equation."""
    return scaled_family_residual(traj, scale_fn) < tol


def arclength_relation(sol: PathSolution) -> dict:
    """Check ds/dL = d|w|/dl and emit both revolution integrals.

    Here l is the hodograph arc length and L the arc length of the profile
    (u, s(u)).  The relation is an identity, so the deviation is numerical
    noise.  The two revolution integrals (volume about l, area generated by
    s over L) scale differently; they are reported, not equated.
    """
    if sol.double_area is None:
        sol = sweep_area(sol)
    w, wp = sol.w, sol.w_prime
    norms = sol.norms
    s = 0.5 * norms ** 2
    ds_dt = np.sum(w * wp, axis=1)
    dnorm_dt = ds_dt / norms
    dl_dt = np.linalg.norm(wp, axis=1)
    du_dt = np.gradient(sol.double_area, sol.t)
    dL_dt = np.sqrt(ds_dt ** 2 + du_dt ** 2)
    mask = (dl_dt > 1e-12) & (dL_dt > 1e-12)
    deviation = float(np.max(np.abs(ds_dt[mask] / dL_dt[mask]
                                    - dnorm_dt[mask] / dl_dt[mask]),
                             initial=0.0))
    l_grid = np.concatenate([[0.0], np.cumsum(
        0.5 * (dl_dt[1:] + dl_dt[:-1]) * np.diff(sol.t))])
    big_l_grid = np.concatenate([[0.0], np.cumsum(
        0.5 * (dL_dt[1:] + dL_dt[:-1]) * np.diff(sol.t))])
    volume = float(_trapz(math.pi * norms ** 2, l_grid))
    surface = float(_trapz(2 * math.pi * s, big_l_grid))
    return {
        "max_deviation": deviation,
        "hodograph_length": float(l_grid[-1]),
        "profile_length": float(big_l_grid[-1]),
        "volume_about_hodograph": volume,
        "area_of_profile_revolution": surface,
        "integrals_comparable": False,  # they scale differently; see docstring
        "profiles": {
            "l": l_grid,
            "norm": norms,
            "L": big_l_grid,
            "s": s,
        },
    }


# ---------------------------------------------------------------------------
# Hypersphere section geometry


@dataclass(frozen=True)
class SectionGeometry:
    n_matrix: np.ndarray      # 6x5
    varpi: tuple
    e: np.ndarray
    p: np.ndarray
    e_matrix: np.ndarray      # 6x6, N extended with the delta column
    gamma1: float
    gamma2: float
    theta: float
    det_e: float
    det_e_closed_form: float
    det_e_at_theta_condition: float
    rank_n: int
    norm_e: float
    norm_p: float
    delta_vector: np.ndarray
    delta_eigen_residual: float       # distance of delta from the 5-eigenspace
    delta_theta_mirror_residual: float


def section_matrix(point: PointState) -> np.ndarray:
    u1, u2, u3 = (float(x) for x in point.u)
    v1, v2, v3 = (float(x) for x in point.v)
    return np.array([
        [u1, u1, u1, -u1, u1],
        [-u2, u2, -u2, -u2, -u2],
        [u3, u3, u3, u3, u3],
        [v1, -v1, -v1, -v1, -v1],
        [-v2, -v2, v2, v2, -v2],
        [-v3, -v3, v3, v3, v3],
    ])


def _delta_column(point: PointState, g1: float, g2: float) -> np.ndarray:
    u1, u2, u3 = (float(x) for x in point.u)
    v1, v2, v3 = (float(x) for x in point.v)
    return np.array([g1 * u1 / u3, g1 * u2 / u3, g1,
                     g2 * v1 / v3, g2 * v2 / v3, g2])


def section_geometry(point: PointState, varpi, gamma1: float, gamma2: float,
                     theta: float = 1.0) -> SectionGeometry:
    """Unit-sphere section of the operator's image ellipsoid at one point.

    The five columns of N span the directions whose image under H keeps the
    norm; adding the two-eigenvector combination delta as a sixth column
    gives det(E) = -32 (gamma2 u3 + gamma1 v3) v2 v1 u2 u1, which vanishes
    exactly when delta is proportional to (u, -v).
    """
    varpi = tuple(float(x) for x in varpi)
    if len(varpi) != 5 or any(x == 0 for x in varpi):
        raise ExprError("varpi must be five nonzero coefficients")
    if gamma1 == 0 or gamma2 == 0 or theta == 0:
        raise ExprError("gamma and theta must be nonzero")
    u1, u2, u3 = (float(x) for x in point.u)
    v1, v2, v3 = (float(x) for x in point.v)
    n_mat = section_matrix(point)
    e = n_mat @ np.array(varpi)
    h = as_float(h_numeric(point))
    p = h @ e
    delta = _delta_column(point, gamma1, gamma2)
    e_mat = np.hstack([n_mat, delta.reshape(6, 1)])
    det_e = float(np.linalg.det(e_mat))
    closed = -32.0 * (gamma2 * u3 + gamma1 * v3) * v2 * v1 * u2 * u1
    delta_theta = _delta_column(point, theta * u3, -theta * v3)
    e_mat_theta = np.hstack([n_mat, delta_theta.reshape(6, 1)])
    det_theta = float(np.linalg.det(e_mat_theta))
    mirror = np.array([u1, u2, u3, -v1, -v2, -v3])
    h2 = as_float(h_squared_numeric(point))
    eig_res = float(np.linalg.norm(h2 @ delta - 5.0 * delta)
                    / np.linalg.norm(delta))
    mirror_res = float(np.linalg.norm(delta_theta - theta * mirror)
                       / np.linalg.norm(delta_theta))
    top = np.linalg.norm(n_mat, 2)
    rank_n = int(np.linalg.matrix_rank(n_mat, tol=1e-9 * max(top, 1e-300)))
    return SectionGeometry(
        n_matrix=n_mat, varpi=varpi, e=e, p=p, e_matrix=e_mat,
        gamma1=float(gamma1), gamma2=float(gamma2), theta=float(theta),
        det_e=det_e, det_e_closed_form=closed,
        det_e_at_theta_condition=det_theta,
        rank_n=rank_n,
        norm_e=float(np.linalg.norm(e)), norm_p=float(np.linalg.norm(p)),
        delta_vector=delta, delta_eigen_residual=eig_res,
        delta_theta_mirror_residual=mirror_res)


# ---------------------------------------------------------------------------
# CSV emission


def solution_csv_rows(sol: PathSolution) -> list:
    """Rows for the ``t,w1..w6,A,u,delta`` solution format."""
    if sol.double_area is None:
        sol = sweep_area(sol)
    delta = sol.delta if sol.delta is not None else np.zeros(len(sol.t))
    header = "t,w1,w2,w3,w4,w5,w6,A,u,delta"
    rows = [header]
    for i, t in enumerate(sol.t):
        cells = [repr(float(t))]
        cells += [repr(float(x)) for x in sol.w[i]]
        cells += [repr(float(sol.area[i])), repr(float(sol.double_area[i])),
                  repr(float(delta[i]))]
        rows.append(",".join(cells))
    return rows


def trajectory_csv_rows(traj: Trajectory, steps: int = 200) -> list:
    """Sample a trajectory into the input CSV format (with first jets)."""
    header = ",".join(_CSV_BASE + _CSV_D1)
    rows = [header]
    for t in np.linspace(traj.t0, traj.t1, steps + 1):
        p = traj.point(float(t))
        cells = [repr(float(t))]
        cells += [repr(float(x)) for x in p.u + p.v + p.du + p.dv]
        rows.append(",".join(cells))
    return rows
