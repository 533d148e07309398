"""Parametric ODE/PDE targets used as expensive label oracles.

* ``oscillator2d`` / ``oscillator3d``: maximum displacement over ``t in [0, 20]``
  of ``x'' + c x' + k x = f cos(w t)``, ``x(0) = x'(0) = 0``.
* ``heat``: maximum over ``x`` of the temperature at time ``t`` for
  ``pi f_t = f_xx`` on ``[0, 1]`` with ``f(0, t) = 0``, ``f(x, 0) = sin(w pi x)``
  and right boundary driven by ``d f(1, t)/dt = -pi e^{-t}``.
* ``surface_reaction``: ``rho(4)`` for
  ``rho' = a (1 - rho) - g rho - kappa (1 - rho)^2 rho``, ``rho(0) = 0.9``.

Every evaluator is batched over points, and each point's result depends only
on that point.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfDomainError, SolverDivergedError
from .rng import as_generator

KINDS = ("oscillator2d", "oscillator3d", "heat", "surface_reaction")


@dataclass(frozen=True)
class TargetProblem:
    kind: str
    domain: tuple
    fixed_params: dict = field(default_factory=dict)

    @property
    def dims(self):
        return len(self.domain)

    @property
    def bounded(self):
        return self.kind != "surface_reaction"

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.domain])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.domain])


def make_problem(kind, **overrides):
    if kind == "oscillator2d":
        p = TargetProblem(kind, ((1.0, 3.0), (0.0, 2.0)), {"c": 0.5, "f": 0.5, "horizon": 20.0})
    elif kind == "oscillator3d":
        p = TargetProblem(kind, ((1.0, 3.0), (0.0, 2.0), (0.0, 2.0)), {"c": 0.5, "horizon": 20.0})
    elif kind == "heat":
        p = TargetProblem(kind, ((0.0, 3.0), (0.0, 5.0)), {"nodes": 201})
    elif kind == "surface_reaction":
        # unbounded Gaussian inputs; the box is only a nominal plotting range
        p = TargetProblem(kind, ((-30.0, 30.0), (-30.0, 30.0)),
                          {"kappa": 10.0, "horizon": 4.0, "sigma": 7.5, "rho0": 0.9, "steps": 2000})
    else:
        raise ValueError(f"unknown problem kind {kind!r}; expected one of {KINDS}")
    if overrides:
        p = TargetProblem(p.kind, p.domain, {**p.fixed_params, **overrides})
    return p


def _check_box(problem, points):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[1] != problem.dims:
        raise OutOfDomainError(f"{problem.kind} expects {problem.dims} coordinates, got {points.shape[1]}")
    if problem.bounded:
        slack = 1e-12 * (problem.upper - problem.lower)
        if np.any(points < problem.lower - slack) or np.any(points > problem.upper + slack):
            raise OutOfDomainError(f"point outside the {problem.kind} domain {problem.domain}")
    return points


def evaluate_target(problem, point):
    """Quantity of interest at one parameter point."""
    return float(evaluate_targets(problem, np.asarray(point, dtype=np.float64)[None, :])[0])


def evaluate_targets(problem, points):
    points = _check_box(problem, points)
    fp = problem.fixed_params
    if problem.kind == "oscillator2d":
        k, w = points[:, 0], points[:, 1]
        c = np.full_like(k, fp["c"])
        f = np.full_like(k, fp["f"])
        return oscillator_peak(k, c, f, w, fp["horizon"])
    if problem.kind == "oscillator3d":
        k, f, w = points.T
        return oscillator_peak(k, np.full_like(k, fp["c"]), f, w, fp["horizon"])
    if problem.kind == "heat":
        return heat_peak(points[:, 0], points[:, 1], fp["nodes"])
    if problem.kind == "surface_reaction":
        return surface_coverage(points[:, 0], points[:, 1], fp["kappa"], fp["horizon"],
                                rho0=fp["rho0"], steps=fp["steps"])
    raise ValueError(f"unknown problem kind {problem.kind!r}")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_DENSE = 20


def oscillator_peak(k, c, f, w, horizon=20.0, rtol=1e-8, atol=1e-10):
    """``max_t |x(t)|`` on ``[0, horizon]`` for a batch of forced damped oscillators.

    Batched Dormand-Prince with independent step-size control per lane.  The
    maximum is taken over accepted steps and a cubic Hermite interpolant
    (exact position and velocity at both ends) at 20 interior points per step.
    """
    k, c, f, w = (np.asarray(v, dtype=np.float64).reshape(-1) for v in (k, c, f, w))
    n = k.shape[0]
    x = np.zeros(n)
    v = np.zeros(n)
    t = np.zeros(n)
    h = np.full(n, 1e-3)
    peak = np.zeros(n)
    active = np.arange(n)
    theta = np.linspace(0.0, 1.0, _DENSE + 2)[1:-1, None]
    h00 = 2 * theta**3 - 3 * theta**2 + 1
    h10 = theta**3 - 2 * theta**2 + theta
    h01 = -2 * theta**3 + 3 * theta**2
    h11 = theta**3 - theta**2

    def rhs(tt, xx, vv, kk, cc, ff, ww):
        return vv, ff * np.cos(ww * tt) - cc * vv - kk * xx

    while active.size:
        ka, ca, fa, wa = k[active], c[active], f[active], w[active]
        ta, xa, va = t[active], x[active], v[active]
        ha = np.minimum(h[active], horizon - ta)
        kx = []
        kv = []
        for s in range(7):
            dx = sum(_A[s][r] * kx[r] for r in range(s)) if s else 0.0
            dv = sum(_A[s][r] * kv[r] for r in range(s)) if s else 0.0
            gx, gv = rhs(ta + _C[s] * ha, xa + ha * dx, va + ha * dv, ka, ca, fa, wa)
            kx.append(gx)
            kv.append(gv)
        xn = xa + ha * sum(_B[r] * kx[r] for r in range(7))
        vn = va + ha * sum(_B[r] * kv[r] for r in range(7))
        ex = ha * sum(_E[r] * kx[r] for r in range(7))
        ev = ha * sum(_E[r] * kv[r] for r in range(7))
        sx = atol + rtol * np.maximum(np.abs(xa), np.abs(xn))
        sv = atol + rtol * np.maximum(np.abs(va), np.abs(vn))
        err = np.sqrt(0.5 * ((ex / sx) ** 2 + (ev / sv) ** 2))
        if not np.all(np.isfinite(err)):
            raise SolverDivergedError("non-finite state in oscillator integration")

        ok = err <= 1.0
        if np.any(ok):
            idx = active[ok]
            hh = ha[ok]
            interp = (h00 * xa[ok] + h10 * hh * va[ok] + h01 * xn[ok] + h11 * hh * vn[ok])
            peak[idx] = np.maximum(peak[idx], np.maximum(np.abs(interp).max(axis=0), np.abs(xn[ok])))
            x[idx], v[idx] = xn[ok], vn[ok]
            t[idx] = np.where(horizon - (ta[ok] + hh) <= 1e-12 * horizon, horizon, ta[ok] + hh)
        with np.errstate(divide="ignore"):
            factor = np.clip(0.9 * err ** -0.2, 0.2, 5.0)
        factor = np.where(ok, factor, np.minimum(factor, 1.0))
        h[active] = ha * factor
        if np.any(h[active] < 1e-14 * horizon):
            raise SolverDivergedError("step size underflow in oscillator integration")
        active = active[t[active] < horizon]
    return peak


def heat_peak(t, w, nodes=201):
    """``max_x f(x, t)`` for the heat problem by the method of lines.

    The second-difference operator on the interior nodes is diagonalized
    by the discrete sine transform, so the semi-discrete linear system is
    integrated exactly in time.  The right boundary node follows
    ``dF/dt = -pi e^{-t}`` and enters the interior equations as forcing.
    """
    t = np.asarray(t, dtype=np.float64).reshape(-1)
    w = np.asarray(w, dtype=np.float64).reshape(-1)
    m = nodes - 2
    hx = 1.0 / (nodes - 1)
    grid = np.linspace(0.0, 1.0, nodes)
    j = np.arange(1, m + 1)
    modes = np.sqrt(2.0 / (m + 1)) * np.sin(np.outer(j, j) * np.pi / (m + 1))
    lam = -4.0 / hx**2 * np.sin(j * np.pi / (2 * (m + 1))) ** 2
    mu = lam / np.pi
    g = modes[-1] / (np.pi * hx**2)

    right0 = np.sin(w * np.pi)
    interior0 = np.sin(np.outer(w, grid[1:-1]) * np.pi)
    c0 = interior0 @ modes
    tt = t[:, None]
    decay = np.exp(mu * tt)
    a_part = (right0 - np.pi)[:, None] * (decay - 1.0) / mu
    b_part = np.pi * (np.exp(-tt) - decay) / (-1.0 - mu)
    ct = decay * c0 + g * (a_part + b_part)
    interior = ct @ modes.T
    right = right0 + np.pi * (np.exp(-t) - 1.0)
    return np.maximum(np.maximum(interior.max(axis=1), right), 0.0)


def surface_coverage(x, y, kappa=10.0, horizon=4.0, rho0=0.9, steps=2000, alpha=None, gamma=None):
    """``rho(horizon)`` for the surface-reaction ODE by classical RK4.

    ``alpha`` and ``gamma`` default to ``0.1 + exp(0.05 x)`` and
    ``0.001 + 0.01 exp(0.05 y)``; passing them overrides the coordinates.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    a = 0.1 + np.exp(0.05 * x) if alpha is None else np.broadcast_to(alpha, x.shape).astype(float)
    g = 0.001 + 0.01 * np.exp(0.05 * y) if gamma is None else np.broadcast_to(gamma, x.shape).astype(float)

    def rhs(r):
        return a * (1.0 - r) - g * r - kappa * (1.0 - r) ** 2 * r

    dt = horizon / steps
    rho = np.full(x.shape, rho0)
    for _ in range(steps):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * dt * k1)
        k3 = rhs(rho + 0.5 * dt * k2)
        k4 = rhs(rho + dt * k3)
        rho = rho + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(rho)):
        raise SolverDivergedError("surface reaction integration produced non-finite values")
    return rho


def sample_domain(problem, n, rng, grid=False, grid_size=51):
    """Raw parameter points: uniform on the box, Gaussian for surface_reaction.

    ``grid=True`` returns the full ``grid_size^dims`` tensor grid instead
    (the fine grid used for the 3-D oscillator); ``n`` is then ignored.
    """
    if grid:
        axes = [np.linspace(lo, hi, grid_size) for lo, hi in problem.domain]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    gen = as_generator(rng)
    if problem.kind == "surface_reaction":
        return gen.normal(0.0, problem.fixed_params["sigma"], size=(n, problem.dims))
    return gen.uniform(problem.lower, problem.upper, size=(n, problem.dims))


class LabelOracle:
    """Label source for a fixed point set that counts what the learner observes.

    ``query`` is the learner-facing path and is metered; ``reference`` gives
    the full label vector used only to score fits.
    """

    def __init__(self, problem, points, labels=None):
        self.problem = problem
        self.points = np.asarray(points, dtype=np.float64)
        self._labels = None if labels is None else np.asarray(labels, dtype=np.float64)
        self.observed = set()
        self.calls = 0

    def reference(self):
        if self._labels is None:
            self._labels = evaluate_targets(self.problem, self.points)
        return self._labels

    def query(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        fresh = set(indices.tolist())
        self.calls += len(fresh)
        self.observed |= fresh
        return self.reference()[indices]

    def reset_budget(self):
        self.observed = set()
        self.calls = 0


def save_labeled(path, x, b):
    np.savetxt(path, np.column_stack([x, b]), delimiter=",", fmt="%.17g")


def load_labeled(path):
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return data[:, :-1], data[:, -1]
