r"""Truncated Mittag-Leffler series solutions of the fractional plate system.

For ``dt^alpha u + lap^2 u = 0`` with hinged boundary conditions and data
``u(0) = u0``, ``u_t(0) = u1``, the solution separates over the shared
eigenbasis with per-mode time factor

.. math::

    c_n(t) = u0_n E_\alpha(-\lambda_n t^\alpha)
           + u1_n\, t\, E_{\alpha,2}(-\lambda_n t^\alpha).

There is no time stepping anywhere: the series is evaluated exactly through
the Mittag-Leffler kernels, and time grids exist only to measure residuals
and norms.  The residual probes push sampled coefficients through the
discrete Caputo pipeline and compare against ``-lambda_n c_n``, which is the
numerical meaning of "solves the equation".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fractional_calculus import (
    TimeGrid,
    TimeSeries,
    caputo_derivative,
    grid_derivative,
    rl_integral_matrix,
)
from .report import VerificationReport
from .spectral_domain import (
    Domain,
    EigenMode,
    SpectralCoefficients,
    eigenmodes,
    eval_mode,
    fractional_norm,
    mode_gradients,
)
from .special_functions import ml_profile

__all__ = [
    "InitialData",
    "SpectralSolution",
    "LiftedSolution",
    "CLASS_EXPONENTS",
    "solve",
    "lift",
    "eval_u",
    "eval_ut",
    "eval_caputo",
    "eval_grad_laplacian",
    "mode_ode_residual",
    "weak_form_residual",
    "classify",
    "apriori_estimate_check",
]


# data-class name -> (theta for u0, theta for u1)
CLASS_EXPONENTS: dict[str, tuple[float, float]] = {
    "H1": (0.25, -0.25),
    "H2": (0.5, 0.0),
    "H3": (0.75, 0.25),
    "Strong": (1.0, 0.5),
}


@dataclass(frozen=True)
class InitialData:
    """Initial displacement and velocity in the eigenbasis.

    ``declared_class`` is metadata selecting which estimates apply; every
    finite truncation satisfies all hypothesis sets, so it never gates
    anything numerically.
    """

    u0: SpectralCoefficients
    u1: SpectralCoefficients
    declared_class: str = "H2"

    def __post_init__(self) -> None:
        if self.declared_class not in CLASS_EXPONENTS:
            raise ValueError(
                f"unknown class {self.declared_class!r}; "
                f"expected one of {sorted(CLASS_EXPONENTS)}"
            )
        if len(self.u0) != len(self.u1):
            raise ValueError("u0 and u1 must cover the same modes")
        for a, b in zip(self.u0.modes, self.u1.modes):
            if a.index != b.index:
                raise ValueError("u0 and u1 must be expanded over the same modes")


@dataclass(frozen=True)
class SpectralSolution:
    """Everything needed to evaluate the series solution lazily."""

    domain: Domain
    modes: tuple[EigenMode, ...]
    alpha: float
    u0: np.ndarray
    u1: np.ndarray
    T: float
    declared_class: str = "H2"
    tail_u0: float = 0.0
    tail_u1: float = 0.0

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([m.lam for m in self.modes])

    @property
    def mus(self) -> np.ndarray:
        return np.array([m.mu for m in self.modes])

    def coefficients(self, times: np.ndarray) -> np.ndarray:
        """Per-mode time factors c_n(t); shape (n_times, n_modes)."""
        t = np.asarray(times, dtype=float).reshape(-1)
        lam = self.lambdas
        Z = -np.outer(t**self.alpha, lam)
        e1 = ml_profile(self.alpha, 1.0, Z)
        e2 = ml_profile(self.alpha, 2.0, Z)
        return self.u0[None, :] * e1 + (t[:, None] * e2) * self.u1[None, :]

    def coefficient_derivatives(self, times: np.ndarray) -> np.ndarray:
        """Exact c_n'(t); t = 0 rows use the continuous limit u1_n."""
        t = np.asarray(times, dtype=float).reshape(-1)
        lam = self.lambdas
        Z = -np.outer(t**self.alpha, lam)
        ea = ml_profile(self.alpha, self.alpha, Z)
        e1 = ml_profile(self.alpha, 1.0, Z)
        tpow = np.where(t > 0.0, t, 1.0) ** (self.alpha - 1.0)
        tpow = np.where(t > 0.0, tpow, 0.0)
        return (-lam[None, :] * self.u0[None, :]) * tpow[:, None] * ea + self.u1[
            None, :
        ] * e1


@dataclass(frozen=True)
class LiftedSolution:
    """A solution viewed through a fractional power of the operator."""

    base: SpectralSolution
    power: float

    @property
    def solution(self) -> SpectralSolution:
        lam = self.base.lambdas
        scale = np.exp(self.power * np.log(lam))
        return SpectralSolution(
            self.base.domain,
            self.base.modes,
            self.base.alpha,
            self.base.u0 * scale,
            self.base.u1 * scale,
            self.base.T,
            self.base.declared_class,
            self.base.tail_u0,
            self.base.tail_u1,
        )


def solve(
    d: Domain, N: int, alpha: float, data: InitialData, T: float
) -> SpectralSolution:
    """Assemble the truncated series solution; no discretization happens here.

    ``data`` must cover at least the first N modes of ``d``; any extra modes
    are dropped and their mass in the declared-class norms is recorded as the
    truncation tail.
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (1, 2): {alpha}")
    if T <= 0.0:
        raise ValueError(f"horizon must be positive: {T}")
    modes = tuple(eigenmodes(d, N))
    if len(data.u0) < N:
        raise ValueError(
            f"data covers {len(data.u0)} modes but N={N} were requested"
        )
    for have, want in zip(data.u0.modes[:N], modes):
        if have.index != want.index:
            raise ValueError("data modes do not match the domain's eigenbasis")
    th0, th1 = CLASS_EXPONENTS[data.declared_class]
    lam_all = data.u0.lambdas
    tail0 = float(np.sum(lam_all[N:] ** (2 * th0) * data.u0.values[N:] ** 2))
    tail1 = float(np.sum(lam_all[N:] ** (2 * th1) * data.u1.values[N:] ** 2))
    return SpectralSolution(
        d,
        modes,
        alpha,
        data.u0.values[:N].copy(),
        data.u1.values[:N].copy(),
        T,
        data.declared_class,
        tail0,
        tail1,
    )


def lift(s: SpectralSolution, power: float) -> LiftedSolution:
    return LiftedSolution(s, power)


# {{{ pointwise evaluation

def _check_time(s: SpectralSolution, t: float) -> None:
    if not 0.0 <= t <= s.T:
        raise ValueError(f"t={t} outside [0, {s.T}]")


def eval_u(s: SpectralSolution, t: float, x) -> float:
    """u(t, x) by summing the truncated series."""
    _check_time(s, t)
    c = s.coefficients(np.array([t]))[0]
    vals = np.array([eval_mode(m, s.domain, x)[0] for m in s.modes])
    return float(c @ vals)


def eval_ut(s: SpectralSolution, t: float, x) -> float:
    """u_t(t, x); for nonzero u0 the formula carries t^(alpha-1), so t > 0."""
    _check_time(s, t)
    if t == 0.0 and np.any(s.u0 != 0.0):
        raise ValueError("u_t at t=0 requires zero initial displacement")
    c = s.coefficient_derivatives(np.array([t]))[0]
    vals = np.array([eval_mode(m, s.domain, x)[0] for m in s.modes])
    return float(c @ vals)


def eval_caputo(s: SpectralSolution, t: float, x) -> float:
    """Caputo derivative through the equation: -sum lam_n c_n(t) e_n(x)."""
    _check_time(s, t)
    c = s.coefficients(np.array([t]))[0]
    vals = np.array([eval_mode(m, s.domain, x)[0] for m in s.modes])
    return float(-(s.lambdas * c) @ vals)


def eval_grad_laplacian(s: SpectralSolution, t: float, x) -> np.ndarray:
    """grad(lap u)(t, x) = sum c_n(t) (-mu_n) grad e_n(x)."""
    _check_time(s, t)
    c = s.coefficients(np.array([t]))[0]
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    grads = mode_gradients(s.modes, s.domain, pts)[0]  # (dim, N)
    return np.asarray(grads @ (-s.mus * c))


# }}}


# {{{ residual probes

def _mode_position(s: SpectralSolution, n: int) -> int:
    for i, m in enumerate(s.modes):
        if m.index == (n,) or m.index == n:
            return i
    raise ValueError(f"mode {n} is not part of the solution")


def _interior_window(grid: TimeGrid) -> slice:
    """Nodes measured by residual probes: the startup layer is excluded.

    The first few graded cells represent the kernel's ``t^(alpha-1)``
    behavior with O(1) relative error no matter how fine the grid is (the
    layer is self-similar under refinement), so residuals are measured from
    cell M/32 on, where the estimate both converges and is meaningful.  The
    initial-condition checks cover the excluded layer separately.
    """
    M = len(grid) - 1
    return slice(max(4, M // 32), M)


def mode_ode_residual(s: SpectralSolution, n: int, grid: TimeGrid) -> float:
    """max over interior nodes of |dt^alpha c_n + lam_n c_n|.

    The Caputo derivative is the full discrete pipeline (fourth-order
    differentiation, fractional integral with exact moments, differentiation
    again) with the exact initial slope c_n'(0) = u1_n supplied.
    """
    if len(grid) < 513:
        raise ValueError("mode residuals need a graded grid with >= 512 cells")
    i = _mode_position(s, n)
    lam = s.modes[i].lam
    c = s.coefficients(grid.nodes)[:, i]
    dc = caputo_derivative(TimeSeries(grid, c), s.alpha, float(s.u1[i]))
    resid = dc.values + lam * c
    return float(np.nanmax(np.abs(resid[_interior_window(grid)])))


def weak_form_residual(
    s: SpectralSolution, v: SpectralCoefficients, grid: TimeGrid
) -> float:
    """max over interior nodes of the weak-form defect against test function v.

    Per active mode the first term is d/dt I^(2-alpha)(c_n' - c_n'(0)) formed
    on the grid; the bilinear term contracts spectrally to
    ``sum_n lam_n c_n(t) v_n`` by orthonormality.
    """
    if len(grid) < 9:
        raise ValueError("grid too coarse for the differentiation stencils")
    positions = []
    weights = []
    for mode, value in zip(v.modes, v.values):
        if value == 0.0:
            continue
        for i, m in enumerate(s.modes):
            if m.index == mode.index:
                positions.append(i)
                weights.append(value)
                break
        else:
            raise ValueError(f"test mode {mode.index} not active in the solution")
    if not positions:
        return 0.0
    idx = np.array(positions, dtype=int)
    w = np.array(weights)
    C = s.coefficients(grid.nodes)[:, idx]
    lam = s.lambdas[idx]
    dC = np.column_stack(
        [grid_derivative(grid, C[:, j]) for j in range(C.shape[1])]
    )
    dC = dC - s.u1[idx][None, :]
    W = rl_integral_matrix(grid, 2.0 - s.alpha)
    inner = W @ dC
    first = np.column_stack(
        [grid_derivative(grid, inner[:, j]) for j in range(inner.shape[1])]
    )
    resid = (first + lam[None, :] * C) @ w
    return float(np.nanmax(np.abs(resid[_interior_window(grid)])))


# }}}


# {{{ classification and a-priori estimates

def classify(data: InitialData, d: Domain) -> tuple[str, dict[str, dict[str, float]]]:
    """Norm table of the data across the fractional power scale.

    u0 is measured at theta in {1/4, 1/2, 3/4, 1} and u1 at
    {-1/4, 0, 1/4, 1/2}; for finite truncations every norm is finite, so the
    table is the informative output (it normalizes the estimate ratios).
    """
    u0_table = {
        f"theta={th}": fractional_norm(data.u0, th) for th in (0.25, 0.5, 0.75, 1.0)
    }
    u1_table = {
        f"theta={th}": fractional_norm(data.u1, th) for th in (-0.25, 0.0, 0.25, 0.5)
    }
    satisfied = [
        name
        for name, (t0, t1) in CLASS_EXPONENTS.items()
        if math.isfinite(fractional_norm(data.u0, t0))
        and math.isfinite(fractional_norm(data.u1, t1))
    ]
    return data.declared_class, {
        "u0": u0_table,
        "u1": u1_table,
        "satisfies": {name: 1.0 for name in satisfied},
    }


def apriori_estimate_check(s: SpectralSolution, grid: TimeGrid) -> VerificationReport:
    """Empirical ratios for the strong-data a-priori estimates.

    LHS norms are spectral sums with trapezoid time quadrature:

    * ``||dt^alpha u||_{L^2(0,T;L^2)}``  against ``||grad lap u0|| + ||grad u1||``
    * ``||grad lap u||_{L^2(0,T;D(A^theta))}`` with theta = 1/(4 alpha)
      (midpoint of the admissible range) against the same data norms.

    Zero data is flagged vacuous rather than reported as 0/0.
    """
    lam = s.lambdas
    u0c = SpectralCoefficients(s.modes, s.u0)
    u1c = SpectralCoefficients(s.modes, s.u1)
    rhs = fractional_norm(u0c, 0.75) + fractional_norm(u1c, 0.25)
    report = VerificationReport(
        name="apriori_estimates",
        inputs={"alpha": s.alpha, "T": s.T, "modes": len(s.modes)},
    )
    if rhs == 0.0:
        report.notes.append("vacuous: zero initial data")
        report.metrics["vacuous"] = 1.0
        return report
    C = s.coefficients(grid.nodes)
    t = grid.nodes
    theta = 1.0 / (4.0 * s.alpha)
    sq1 = np.sum((lam[None, :] ** 2) * C**2, axis=1)
    lhs1 = math.sqrt(float(np.trapezoid(sq1, t)))
    sq2 = np.sum((lam[None, :] ** (1.5 + 2 * theta)) * C**2, axis=1)
    lhs2 = math.sqrt(float(np.trapezoid(sq2, t)))
    report.metrics["ratio_dtalpha_l2"] = lhs1 / rhs
    report.metrics["ratio_gradlap_dtheta"] = lhs2 / rhs
    report.inputs["theta"] = theta
    return report


# }}}
