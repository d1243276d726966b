r"""Boundary traces, multiplier identities, and the direct-inequality probe.

The multiplier method pairs the equation with ``h . grad(lap w)`` for a
vector field ``h`` that agrees with the outward normal on the boundary
(numerically: ``h . nu = 1`` at every boundary node; explicit polynomial
fields per domain).  For ``w`` with ``w = lap w = 0`` on the boundary,

    2 int lap^2 w (h . grad lap w)
        = int_bnd (h . nu) |d_nu lap w|^2
        - 2 sum_ij int (d_i h_j)(d_i lap w)(d_j lap w)
        + int (div h) |grad lap w|^2.

Applying the fractional integral ``I^beta`` to the equation first (it does
not commute with the Caputo derivative, so the identity must be derived on
the filtered solution directly) yields the same algebra with every field
replaced by its per-mode ``I^beta`` filtering, at a single time or for a
difference of two times.

The direct-inequality probe measures trace energy against the data energy
``||u0||_{H^1_0}^2 + ||u1||_{H^-1}^2`` across mode schedules and data
families.  It reports ratios and their growth, never a claimed constant:
bounded ratios are the numerical signature of hidden regularity, not a
proof.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._parallel import thread_map
from .families import family_members
from .fractional_calculus import TimeGrid, default_grading, rl_integral_matrix
from .report import VerificationReport
from .solver import InitialData, SpectralSolution, solve
from .special_functions import ml_profile
from .spectral_domain import (
    Domain,
    Interval,
    SpectralCoefficients,
    boundary_quadrature,
    domain_quadrature,
    eigenmodes,
    fractional_norm,
    mode_gradients,
    mode_normal_derivatives,
    mode_values,
)

__all__ = [
    "MultiplierField",
    "TraceSeries",
    "boundary_normal_field",
    "normal_trace",
    "trace_energy",
    "static_multiplier_identity_terms",
    "static_multiplier_identity_residual",
    "filtered_identity_terms",
    "filtered_identity_residual",
    "filtered_identity2_residual",
    "direct_inequality_probe",
]


# {{{ multiplier fields

@dataclass(frozen=True)
class MultiplierField:
    """C^1 vector field with unit normal component on the boundary.

    ``h``, ``jacobian`` and ``divergence`` are vectorized callbacks over
    point arrays of shape (n, dim).
    """

    domain: Domain
    h: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    divergence: Callable[[np.ndarray], np.ndarray]


def boundary_normal_field(d: Domain) -> MultiplierField:
    """The canonical polynomial multiplier: affine per axis, h.nu = 1 on bnd."""
    if isinstance(d, Interval):
        L = d.length

        def h(p: np.ndarray) -> np.ndarray:
            return (2.0 * p - L) / L

        def jac(p: np.ndarray) -> np.ndarray:
            n = p.shape[0]
            return np.full((n, 1, 1), 2.0 / L)

        def div(p: np.ndarray) -> np.ndarray:
            return np.full(p.shape[0], 2.0 / L)

        return MultiplierField(d, h, jac, div)
    a, b = d.a, d.b

    def h2(p: np.ndarray) -> np.ndarray:
        return np.column_stack([(2.0 * p[:, 0] - a) / a, (2.0 * p[:, 1] - b) / b])

    def jac2(p: np.ndarray) -> np.ndarray:
        n = p.shape[0]
        out = np.zeros((n, 2, 2))
        out[:, 0, 0] = 2.0 / a
        out[:, 1, 1] = 2.0 / b
        return out

    def div2(p: np.ndarray) -> np.ndarray:
        return np.full(p.shape[0], 2.0 / a + 2.0 / b)

    return MultiplierField(d, h2, jac2, div2)


def _check_alignment(
    field: MultiplierField, pts: np.ndarray, normals: np.ndarray
) -> None:
    hv = field.h(pts)
    mismatch = np.max(np.abs(np.sum(hv * normals, axis=1) - 1.0))
    if mismatch > 1e-12:
        raise ValueError(
            f"multiplier field is not normal-aligned on the boundary "
            f"(max |h.nu - 1| = {mismatch:.2e})"
        )


# }}}


# {{{ traces

def _boundary_order(modes: Sequence) -> int:
    max_freq = max(max(m.index) for m in modes)
    return 4 * max_freq + 8


@dataclass(frozen=True)
class TraceSeries:
    """Boundary samples of a trace quantity on a time grid."""

    grid: TimeGrid
    samples: np.ndarray  # (n_times, n_boundary_nodes)
    points: np.ndarray
    weights: np.ndarray
    which: str


def normal_trace(s: SpectralSolution, grid: TimeGrid, which: str = "u") -> TraceSeries:
    """Per-mode boundary trace series.

    ``which='u'`` gives ``d_nu u``; ``which='delta_lifted'`` gives
    ``d_nu lap w`` for the lifted solution ``w`` (operator power -1/2).  Per
    mode the lifted factor is ``-mu_n lam_n^(-1/2) = -1`` exactly, so the two
    traces coincide up to sign; that identity is asserted here.
    """
    if which not in ("u", "delta_lifted"):
        raise ValueError(f"unknown trace kind {which!r}")
    order = _boundary_order(s.modes)
    pts, w, normals = boundary_quadrature(s.domain, order)
    nd = mode_normal_derivatives(s.modes, s.domain, pts, normals)
    C = s.coefficients(grid.nodes)
    if which == "delta_lifted":
        factor = -s.mus / np.sqrt(s.lambdas)
        if np.max(np.abs(factor + 1.0)) > 1e-12:
            raise AssertionError(
                "per-mode algebra violated: mu/sqrt(lam) deviates from 1"
            )
        C = C * factor[None, :]
    samples = C @ nd.T
    return TraceSeries(grid, samples, pts, w, which)


def trace_energy(tr: TraceSeries) -> float:
    """Boundary quadrature then time trapezoid of the squared trace."""
    per_time = tr.samples**2 @ tr.weights
    return float(np.trapezoid(per_time, tr.grid.nodes))


# }}}


# {{{ static multiplier identity

def static_multiplier_identity_terms(
    w: SpectralCoefficients,
    d: Domain,
    field: MultiplierField | None = None,
    quad_order: int | None = None,
) -> dict[str, float]:
    """The four integrals of the multiplier identity for an eigen-sum w.

    Returns lhs = 2 int lap^2 w (h . grad lap w), the boundary term, the
    Jacobian contraction (with its -2 sign), and the divergence term.
    Supplying w as an eigen-sum guarantees the boundary conditions exactly.
    """
    field = field or boundary_normal_field(d)
    modes = w.modes
    if quad_order is None:
        max_freq = max(max(m.index) for m in modes)
        quad_order = 4 * max_freq + 8
    lam = w.lambdas
    mu = np.sqrt(lam)
    pts, qw = domain_quadrature(d, quad_order)
    basis = mode_values(modes, d, pts)
    grads = mode_gradients(modes, d, pts)
    bilap = basis @ (lam * w.values)
    grad_lap = -np.einsum("pdm,m->pd", grads, mu * w.values)
    hv = field.h(pts)
    jac = field.jacobian(pts)
    divv = field.divergence(pts)

    lhs = 2.0 * float(qw @ (bilap * np.sum(hv * grad_lap, axis=1)))
    jac_term = -2.0 * float(qw @ np.einsum("pij,pi,pj->p", jac, grad_lap, grad_lap))
    div_term = float(qw @ (divv * np.sum(grad_lap**2, axis=1)))

    bpts, bw, normals = boundary_quadrature(d, quad_order)
    _check_alignment(field, bpts, normals)
    nd = mode_normal_derivatives(modes, d, bpts, normals)
    dnu_lap = nd @ (-(mu * w.values))
    hnu = np.sum(field.h(bpts) * normals, axis=1)
    bnd_term = float(bw @ (hnu * dnu_lap**2))
    return {
        "lhs": lhs,
        "boundary": bnd_term,
        "jacobian": jac_term,
        "divergence": div_term,
    }


def static_multiplier_identity_residual(
    w: SpectralCoefficients,
    d: Domain,
    field: MultiplierField | None = None,
    quad_order: int | None = None,
) -> float:
    """|lhs - rhs| of the static multiplier identity."""
    t = static_multiplier_identity_terms(w, d, field, quad_order)
    return abs(t["lhs"] - (t["boundary"] + t["jacobian"] + t["divergence"]))


# }}}


# {{{ filtered identities

def _filtered_discrete(
    s: SpectralSolution, beta: float, grid: TimeGrid
) -> np.ndarray:
    """Product-trapezoidal I^beta of every mode coefficient; (n_t, n_modes)."""
    W = rl_integral_matrix(grid, beta)
    C = s.coefficients(grid.nodes)
    return W @ C


def _filtered_exact(s: SpectralSolution, beta: float, t: float) -> np.ndarray:
    """Exact I^beta of the mode coefficients at one time.

    The fractional integral maps the relaxation kernels within the family:

        I^beta(E_a(-lam tau^a))(t)        = t^beta     E_{a,1+beta}(-lam t^a)
        I^beta(tau E_{a,2}(-lam tau^a))(t) = t^(1+beta) E_{a,2+beta}(-lam t^a)

    which provides the filtering route independent of the quadrature rule.
    """
    if t == 0.0:
        return np.zeros(len(s.modes))
    z = -(t**s.alpha) * s.lambdas
    e1b = ml_profile(s.alpha, 1.0 + beta, z)
    e2b = ml_profile(s.alpha, 2.0 + beta, z)
    return s.u0 * t**beta * e1b + s.u1 * t ** (1.0 + beta) * e2b


def filtered_identity_terms(
    s: SpectralSolution,
    beta: float,
    grid: TimeGrid,
    t_index: int,
    tau_index: int | None = None,
    field: MultiplierField | None = None,
) -> dict[str, float]:
    """Terms of the fractional-filtered multiplier identity.

    The boundary side is assembled from the exactly filtered coefficients
    (closed-form kernels), the interior side from the product-trapezoidal
    filtering ``b_n = I^beta(c_n)`` on the grid, with the filtered Caputo
    term evaluated through the equation as ``-lam_n b_n`` (exact for the
    series solution).  The identity holds exactly for any coefficient
    vector, so the mismatch isolates the time-discretization error of the
    quadrature route and must vanish under grid refinement.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1): {beta}")
    d = s.domain
    field = field or boundary_normal_field(d)
    B = _filtered_discrete(s, beta, grid)
    b = B[t_index].copy()
    b_exact = _filtered_exact(s, beta, float(grid.nodes[t_index]))
    if tau_index is not None:
        b -= B[tau_index]
        b_exact = b_exact - _filtered_exact(s, beta, float(grid.nodes[tau_index]))
    lam = s.lambdas
    mu = s.mus
    modes = s.modes
    quad_order = _boundary_order(modes)
    pts, qw = domain_quadrature(d, quad_order)
    basis = mode_values(modes, d, pts)
    grads = mode_gradients(modes, d, pts)
    filt_caputo = basis @ (-(lam * b))
    filt_grad_lap = -np.einsum("pdm,m->pd", grads, mu * b)
    hv = field.h(pts)
    jac = field.jacobian(pts)
    divv = field.divergence(pts)
    term_eq = -2.0 * float(qw @ (filt_caputo * np.sum(hv * filt_grad_lap, axis=1)))
    term_jac = 2.0 * float(
        qw @ np.einsum("pij,pi,pj->p", jac, filt_grad_lap, filt_grad_lap)
    )
    term_div = -float(qw @ (divv * np.sum(filt_grad_lap**2, axis=1)))

    bpts, bw, normals = boundary_quadrature(d, quad_order)
    _check_alignment(field, bpts, normals)
    nd = mode_normal_derivatives(modes, d, bpts, normals)
    dnu = nd @ (-(mu * b_exact))
    hnu = np.sum(field.h(bpts) * normals, axis=1)
    lhs = float(bw @ (hnu * dnu**2))
    return {
        "lhs_boundary": lhs,
        "equation": term_eq,
        "jacobian": term_jac,
        "divergence": term_div,
    }


def filtered_identity_residual(
    s: SpectralSolution,
    field: MultiplierField | None,
    beta: float,
    grid: TimeGrid,
    t_index: int,
) -> float:
    """|lhs - rhs| of the single-time filtered identity; 0 exactly at t=0."""
    if t_index == 0:
        return 0.0  # all fractional integrals vanish at t=0
    t = filtered_identity_terms(s, beta, grid, t_index, None, field)
    return abs(t["lhs_boundary"] - (t["equation"] + t["jacobian"] + t["divergence"]))


def filtered_identity2_residual(
    s: SpectralSolution,
    field: MultiplierField | None,
    beta: float,
    grid: TimeGrid,
    t_index: int,
    tau_index: int,
) -> float:
    """|lhs - rhs| of the two-time differenced identity; 0 exactly at t=tau."""
    if t_index == tau_index:
        return 0.0
    t = filtered_identity_terms(s, beta, grid, t_index, tau_index, field)
    return abs(t["lhs_boundary"] - (t["equation"] + t["jacobian"] + t["divergence"]))


# }}}


# {{{ direct-inequality probe

def direct_inequality_probe(
    d: Domain,
    alpha: float,
    T: float,
    family_spec: str,
    N_schedule: Sequence[int],
    seed: int = 42,
    members: int = 8,
    time_nodes: int = 512,
) -> VerificationReport:
    """Trace energy against data energy across a mode schedule.

    For each N the probe reports ``R(N) = max over the family of
    trace_energy / (||u0||_{H^1_0}^2 + ||u1||_{H^-1}^2)`` and the growth
    factors R(2N)/R(N) between consecutive schedule entries.  Bounded R is
    evidence for the hidden-regularity inequality; the constant itself is
    never claimed (it is not numerically pinned by the theory).
    """
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in (1, 2): {alpha}")
    schedule = sorted(int(n) for n in N_schedule)
    grid = TimeGrid.graded(T, time_nodes, default_grading(alpha))
    N_max = schedule[-1]
    members_full = family_members(family_spec, N_max, seed=seed, members=members)
    table = []
    r_values = []
    for N in schedule:
        modes = tuple(eigenmodes(d, N))

        def member_ratio(pair: tuple[np.ndarray, np.ndarray]) -> float:
            u0_full, u1_full = pair
            u0c = SpectralCoefficients(modes, u0_full[:N])
            u1c = SpectralCoefficients(modes, u1_full[:N])
            denom = fractional_norm(u0c, 0.25) ** 2 + fractional_norm(u1c, -0.25) ** 2
            if denom == 0.0:
                return -1.0  # zero-energy member: skipped
            sol = solve(d, N, alpha, InitialData(u0c, u1c, "H1"), T)
            return trace_energy(normal_trace(sol, grid, "u")) / denom

        # parallel over members, reduced in fixed order for determinism
        ratios = thread_map(member_ratio, members_full)
        best = 0.0
        best_member = -1
        for mi, ratio in enumerate(ratios):
            if ratio > best:
                best = ratio
                best_member = mi
        table.append({"N": N, "R": best, "argmax_member": best_member})
        r_values.append(best)
    growth = []
    for i in range(len(schedule) - 1):
        if schedule[i + 1] == 2 * schedule[i] and r_values[i] > 0.0:
            growth.append(r_values[i + 1] / r_values[i])
    report = VerificationReport(
        name="direct_inequality_probe",
        inputs={
            "domain": repr(d),
            "alpha": alpha,
            "T": T,
            "family": family_spec,
            "seed": seed,
            "members": members,
            "time_nodes": time_nodes,
            "schedule": list(schedule),
        },
        table=table,
        metrics={
            "R_max": max(r_values),
            "growth_factor_max": max(growth) if growth else 1.0,
        },
        notes=[
            "bounded ratios are numerical evidence only; the constant in the "
            "trace inequality is qualitative and is not reproduced"
        ],
    )
    return report


# }}}
