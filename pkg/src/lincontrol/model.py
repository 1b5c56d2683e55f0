"""Problem statement, trajectories, impulses, and the cost functional.

The controlled system is the damped drive ``xdot + x = u`` steered from
``x(0) = 0`` to ``x(T) = 1`` with the first ``n`` derivatives of ``x``
pinned to zero at both endpoints.  Solutions are scored by the running cost

    C = int_0^T [x^2 + xdot^2] dt            (bare cost)
    C_R = C + lambda * int_0^T v^2 dt        (regularized cost)

where ``v`` is the auxiliary control (``v = udot`` for ``n = 1`` and
``v = u^(n)`` in general).  Trajectories are closed-form evaluators, never
stored arrays; sampling them is a view, so no interpolation error enters
any downstream check.  Impulsive controls are represented symbolically by
:class:`Impulse` records and excluded from all integrals.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numerics import integrate


class InvalidOrder(ValueError):
    """Requested basis size or derivative order is below the minimum."""


@dataclass(frozen=True)
class ControlProblem:
    """Full problem statement: horizon, boundary order, regularization.

    Parameters
    ----------
    T : float
        Control horizon, strictly positive.  All tabulated values use 1.
    n : int
        Number of derivatives of ``x`` forced to vanish at both endpoints.
    lam : float
        Weight of the control-energy term; 0 selects the singular limit.
    """

    T: float = 1.0
    n: int = 1
    lam: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"horizon must be positive, got {self.T}")
        if self.n < 1 or int(self.n) != self.n:
            raise InvalidOrder(f"derivative order must be an integer >= 1, got {self.n}")
        if self.lam < 0:
            raise ValueError(f"regularization weight must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class Impulse:
    """Instantaneous control kick of finite signed area at ``t = time``."""

    time: float
    area: float


@dataclass(frozen=True)
class StateSample:
    """All trajectory quantities at one instant.

    ``z`` stacks the augmented coordinates ``z_0 .. z_{n-1}`` (``z_0`` is the
    physical control ``u``).  ``x_derivatives`` stacks ``x', x'', ..,
    x^(n)``, obtained by analytic differentiation, never finite differences.
    ``p`` carries the adjoint vector for optimal-control solutions and is
    ``None`` otherwise.
    """

    t: float
    x: float
    xdot: float
    u: float
    v: float
    y: float
    z: tuple
    x_derivatives: tuple
    p: Optional[tuple] = None


@dataclass(frozen=True)
class Trajectory:
    """Closed-form evaluator ``t -> StateSample`` on ``[0, T]``."""

    evaluator: Callable[[float], StateSample]
    T: float
    grid_points: int = 1001

    def sample(self, t):
        return self.evaluator(float(t))

    def grid(self, points=None):
        return np.linspace(0.0, self.T, points or self.grid_points)

    def samples(self, ts=None):
        if ts is None:
            ts = self.grid()
        return [self.evaluator(float(t)) for t in np.asarray(ts).ravel()]


@dataclass(frozen=True)
class CostBreakdown:
    """The three integrand parts of the regularized cost."""

    state: float
    derivative: float
    control_energy: float

    @property
    def total(self):
        return self.state + self.derivative + self.control_energy

    @property
    def bare(self):
        return self.state + self.derivative

    def as_dict(self):
        return {
            "state": self.state,
            "derivative": self.derivative,
            "control_energy": self.control_energy,
        }


@dataclass(frozen=True)
class ProtocolSolution:
    """A solved protocol: coefficients, trajectory, impulses, and cost.

    ``kind`` is one of ``sta-poly``, ``sta-trig``, ``sta-exp``,
    ``oct-singular``, ``oct-regular``, ``oct-higher``.  ``cost`` always
    matches the quadrature of the running cost over ``(0, T)`` (impulses
    excluded); ``cost_breakdown.bare`` is the cost without the
    control-energy term.
    """

    problem: ControlProblem
    kind: str
    coefficients: dict
    trajectory: Trajectory
    impulses: tuple
    cost: float
    cost_breakdown: CostBreakdown


def cost_functional(traj, lam=0.0, T=None, nodes=64, panels=1):
    """Quadrature of the running cost along a trajectory.

    The integral is split into ``panels`` equal panels, each integrated with
    an ``nodes``-point Gauss-Legendre rule, so boundary layers of width
    ``1/rate`` are resolved by choosing ``panels ~ rate * T / 16``.  Endpoint
    impulses never contribute: quadrature nodes are interior points.

    Returns
    -------
    (float, CostBreakdown)
        Total cost and its (state, derivative, control-energy) parts.
    """
    if T is None:
        T = traj.T
    edges = np.linspace(0.0, T, panels + 1)
    parts = np.zeros(3)
    for a, b in zip(edges[:-1], edges[1:]):
        parts[0] += integrate(lambda t: traj.sample(t).x ** 2, a, b, nodes)
        parts[1] += integrate(lambda t: traj.sample(t).xdot ** 2, a, b, nodes)
        if lam > 0:
            parts[2] += lam * integrate(lambda t: traj.sample(t).v ** 2, a, b, nodes)
    breakdown = CostBreakdown(parts[0], parts[1], parts[2])
    return breakdown.total, breakdown


@dataclass(frozen=True)
class BoundaryReport:
    """Residuals of every boundary condition, checked against one tolerance."""

    residuals: dict
    tol: float

    @property
    def max_residual(self):
        return max(abs(v) for v in self.residuals.values())

    @property
    def passed(self):
        return self.max_residual <= self.tol


def verify_boundaries(sol, tol=1e-8):
    """Residuals of ``x`` and its first ``n`` derivatives at both endpoints.

    Derivatives come from the trajectory's analytic ``x_derivatives``.  For
    impulsive solutions the first-derivative conditions hold across the
    bangs: the kick area is removed from the arc value before comparing,
    since a bang of area ``A`` shifts ``xdot`` by ``A`` instantaneously.
    """
    n = sol.problem.n
    T = sol.problem.T
    s0 = sol.trajectory.sample(0.0)
    sT = sol.trajectory.sample(T)
    jump0 = sum(i.area for i in sol.impulses if i.time == 0.0)
    jumpT = sum(i.area for i in sol.impulses if i.time == T)
    residuals = {
        "x(0)": s0.x,
        "x(T)-1": sT.x - 1.0,
    }
    for j in range(1, n + 1):
        r0 = s0.x_derivatives[j - 1]
        rT = sT.x_derivatives[j - 1]
        if j == 1:
            r0 -= jump0
            rT += jumpT
        residuals[f"x^({j})(0)"] = r0
        residuals[f"x^({j})(T)"] = rT
    return BoundaryReport(residuals=residuals, tol=tol)


def _adjoint_names(n):
    if n == 1:
        return ["py", "pz"]
    return [f"px{n}"] + [f"pz{k}" for k in range(n - 1, -1, -1)]


def sample_table(sol, points):
    """Tabulate the trajectory: header row plus ``points`` sample rows.

    Columns are ``t, x, xdot, u, v``, then ``y`` (first order only), the
    augmented coordinates ``z0..``, and the adjoint columns when present.
    """
    if points < 2:
        raise ValueError(f"need at least 2 points, got {points}")
    n = sol.problem.n
    first = sol.trajectory.sample(0.0)
    header = ["t", "x", "xdot", "u", "v"]
    if n == 1:
        header.append("y")
    header += [f"z{k}" for k in range(n)]
    if first.p is not None:
        header += _adjoint_names(n)
    rows = []
    for t in sol.trajectory.grid(points):
        s = sol.trajectory.sample(t)
        row = [s.t, s.x, s.xdot, s.u, s.v]
        if n == 1:
            row.append(s.y)
        row.extend(s.z)
        if s.p is not None:
            row.extend(s.p)
        rows.append(row)
    return header, rows


def _format_number(x):
    return format(float(x), ".17g")


def csv_text(sol, points=1001):
    """Render the sample table as CSV: 17 significant digits, LF endings."""
    header, rows = sample_table(sol, points)
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_format_number(x) for x in row) + "\n")
    return buf.getvalue()


def write_csv(sol, path, points=1001):
    """Write :func:`csv_text` output to ``path`` byte-for-byte."""
    text = csv_text(sol, points)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path
