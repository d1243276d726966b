r"""Explicit eigenpairs of the hinged biharmonic operator and power norms.

With hinged (Navier) conditions ``u = lap u = 0`` on the boundary, the
biharmonic operator shares eigenfunctions with the Dirichlet Laplacian, so on
an interval or a rectangle everything is sines:

* interval (0, L):   ``e_n(x) = sqrt(2/L) sin(n pi x / L)``,
  ``mu_n = (n pi / L)^2``, ``lam_n = mu_n^2``;
* rectangle (0,a)x(0,b): products of sines with
  ``mu_jk = (j pi / a)^2 + (k pi / b)^2``.

Fractional power norms are the ``lam_n^theta``-weighted coefficient sums;
negative ``theta`` gives the dual norms.  ``theta = 1/4`` is the H^1_0 norm,
``1/2`` the norm of the Laplacian, ``3/4`` the norm of grad(lap u), ``-1/4``
the H^{-1} norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "Interval",
    "Rectangle",
    "Domain",
    "EigenMode",
    "SpectralCoefficients",
    "eigenmodes",
    "eval_mode",
    "normal_derivative_on_boundary",
    "project",
    "fractional_norm",
    "apply_power",
    "domain_quadrature",
    "boundary_quadrature",
    "mode_values",
    "mode_gradients",
    "mode_normal_derivatives",
    "parse_domain",
]


# {{{ domains

@dataclass(frozen=True)
class Interval:
    length: float

    def __post_init__(self) -> None:
        if not self.length > 0.0:
            raise ValueError(f"interval length must be positive: {self.length}")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Rectangle:
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError(f"rectangle sides must be positive: {self.a}, {self.b}")

    @property
    def dim(self) -> int:
        return 2


Domain = Interval | Rectangle


def parse_domain(spec: str) -> Domain:
    """Parse ``interval:L`` or ``rectangle:AxB`` (lengths accept ``pi``)."""

    def _num(tok: str) -> float:
        tok = tok.strip().lower()
        if tok in ("pi", "π"):
            return math.pi
        if tok.endswith("pi"):
            return float(tok[:-2]) * math.pi
        return float(tok)

    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "interval":
        return Interval(_num(rest))
    if kind == "rectangle":
        parts = rest.replace(",", "x").split("x")
        if len(parts) != 2:
            raise ValueError(f"rectangle spec needs two sides: {spec!r}")
        return Rectangle(_num(parts[0]), _num(parts[1]))
    raise ValueError(f"unknown domain spec {spec!r}")


# }}}


# {{{ eigenmodes

@dataclass(frozen=True)
class EigenMode:
    """One hinged-biharmonic eigenpair.

    ``mu`` is the Dirichlet-Laplacian eigenvalue and ``lam = mu**2`` the
    biharmonic one (stored as the exact square of the stored ``mu``).
    """

    index: tuple[int, ...]
    mu: float
    lam: float
    norm_const: float


def _interval_mode(n: int, L: float) -> EigenMode:
    mu = (n * math.pi / L) ** 2
    return EigenMode((n,), mu, mu * mu, math.sqrt(2.0 / L))


def _rectangle_mode(j: int, k: int, a: float, b: float) -> EigenMode:
    mu = (j * math.pi / a) ** 2 + (k * math.pi / b) ** 2
    return EigenMode((j, k), mu, mu * mu, 2.0 / math.sqrt(a * b))


def eigenmodes(d: Domain, N: int) -> list[EigenMode]:
    """First N modes, sorted by ascending eigenvalue, ties lexicographic.

    The square rectangle carries genuine multiplicities (mu_{jk} = mu_{kj});
    they are kept, with the deterministic index order breaking ties.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1: {N}")
    if isinstance(d, Interval):
        return [_interval_mode(n, d.length) for n in range(1, N + 1)]
    # any mode among the N smallest has both indices <= N
    candidates = [
        _rectangle_mode(j, k, d.a, d.b)
        for j in range(1, N + 1)
        for k in range(1, N + 1)
    ]
    candidates.sort(key=lambda m: (m.lam, m.index))
    return candidates[:N]


def eval_mode(
    m: EigenMode, d: Domain, x: float | Sequence[float]
) -> tuple[float, np.ndarray, float]:
    """Value, gradient and Laplacian of one eigenfunction at a point.

    The Laplacian is returned through the exact identity ``lap e = -mu e``.
    """
    if isinstance(d, Interval):
        xv = float(np.asarray(x).reshape(()))
        if not -1e-12 <= xv <= d.length + 1e-12:
            raise ValueError(f"x={xv} outside [0, {d.length}]")
        w = m.index[0] * math.pi / d.length
        value = m.norm_const * math.sin(w * xv)
        grad = np.array([m.norm_const * w * math.cos(w * xv)])
        return value, grad, -m.mu * value
    xv = np.asarray(x, dtype=float).reshape(2)
    if not (-1e-12 <= xv[0] <= d.a + 1e-12 and -1e-12 <= xv[1] <= d.b + 1e-12):
        raise ValueError(f"point {tuple(xv)} outside the rectangle")
    j, k = m.index
    wx = j * math.pi / d.a
    wy = k * math.pi / d.b
    sx, cx = math.sin(wx * xv[0]), math.cos(wx * xv[0])
    sy, cy = math.sin(wy * xv[1]), math.cos(wy * xv[1])
    value = m.norm_const * sx * sy
    grad = np.array([m.norm_const * wx * cx * sy, m.norm_const * wy * sx * cy])
    return value, grad, -m.mu * value


def normal_derivative_on_boundary(
    m: EigenMode, d: Domain, s: float | Sequence[float]
) -> float:
    """Outward normal derivative of an eigenfunction at a boundary point.

    Rectangle corners (where the normal is undefined) return 0, which is also
    the exact limit of the gradient there; they carry no boundary measure.
    """
    tol = 1e-10
    if isinstance(d, Interval):
        sv = float(np.asarray(s).reshape(()))
        L = d.length
        w = m.index[0] * math.pi / L
        if abs(sv) <= tol * max(1.0, L):
            return -m.norm_const * w * math.cos(0.0)
        if abs(sv - L) <= tol * max(1.0, L):
            return m.norm_const * w * math.cos(w * L)
        raise ValueError(f"s={sv} is not a boundary point of [0, {L}]")
    sv = np.asarray(s, dtype=float).reshape(2)
    a, b = d.a, d.b
    on_x0 = abs(sv[0]) <= tol * max(1.0, a)
    on_xa = abs(sv[0] - a) <= tol * max(1.0, a)
    on_y0 = abs(sv[1]) <= tol * max(1.0, b)
    on_yb = abs(sv[1] - b) <= tol * max(1.0, b)
    if not (on_x0 or on_xa or on_y0 or on_yb):
        raise ValueError(f"point {tuple(sv)} is not on the rectangle boundary")
    if (on_x0 or on_xa) and (on_y0 or on_yb):
        return 0.0  # corner: gradient vanishes, zero boundary measure
    _, grad, _ = eval_mode(m, d, sv)
    if on_x0:
        nu = np.array([-1.0, 0.0])
    elif on_xa:
        nu = np.array([1.0, 0.0])
    elif on_y0:
        nu = np.array([0.0, -1.0])
    else:
        nu = np.array([0.0, 1.0])
    return float(grad @ nu)


# }}}


# {{{ quadrature

def _gauss_on(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = roots_legendre(order)
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


def domain_quadrature(d: Domain, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights; tensor product on the rectangle.

    Returns points with shape (n, dim) and weights with shape (n,).
    """
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1: {order}")
    if isinstance(d, Interval):
        x, w = _gauss_on(0.0, d.length, order)
        return x[:, None], w
    x, wx = _gauss_on(0.0, d.a, order)
    y, wy = _gauss_on(0.0, d.b, order)
    X, Y = np.meshgrid(x, y, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    w = np.outer(wx, wy).ravel()
    return pts, w


def boundary_quadrature(
    d: Domain, order: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boundary nodes, weights and outward normals.

    For the interval the boundary is the two endpoints with counting measure;
    for the rectangle, Gauss-Legendre nodes per edge with arclength weights.
    Returns (points (n, dim), weights (n,), normals (n, dim)).
    """
    if isinstance(d, Interval):
        pts = np.array([[0.0], [d.length]])
        w = np.array([1.0, 1.0])
        normals = np.array([[-1.0], [1.0]])
        return pts, w, normals
    xs, wx = _gauss_on(0.0, d.a, order)
    ys, wy = _gauss_on(0.0, d.b, order)
    pts = []
    wts = []
    nrm = []
    # bottom y=0, top y=b, left x=0, right x=a (fixed deterministic order)
    pts.append(np.column_stack([xs, np.zeros_like(xs)]))
    wts.append(wx)
    nrm.append(np.tile([0.0, -1.0], (order, 1)))
    pts.append(np.column_stack([xs, np.full_like(xs, d.b)]))
    wts.append(wx)
    nrm.append(np.tile([0.0, 1.0], (order, 1)))
    pts.append(np.column_stack([np.zeros_like(ys), ys]))
    wts.append(wy)
    nrm.append(np.tile([-1.0, 0.0], (order, 1)))
    pts.append(np.column_stack([np.full_like(ys, d.a), ys]))
    wts.append(wy)
    nrm.append(np.tile([1.0, 0.0], (order, 1)))
    return np.vstack(pts), np.concatenate(wts), np.vstack(nrm)


def mode_values(
    modes: Sequence[EigenMode], d: Domain, pts: np.ndarray
) -> np.ndarray:
    """Matrix of eigenfunction values, shape (n_points, n_modes)."""
    pts = np.asarray(pts, dtype=float)
    if isinstance(d, Interval):
        x = pts[:, 0]
        cols = [
            m.norm_const * np.sin(m.index[0] * math.pi / d.length * x) for m in modes
        ]
        return np.column_stack(cols)
    x, y = pts[:, 0], pts[:, 1]
    cols = []
    for m in modes:
        j, k = m.index
        cols.append(
            m.norm_const
            * np.sin(j * math.pi / d.a * x)
            * np.sin(k * math.pi / d.b * y)
        )
    return np.column_stack(cols)


def mode_gradients(
    modes: Sequence[EigenMode], d: Domain, pts: np.ndarray
) -> np.ndarray:
    """Gradients of the eigenfunctions, shape (n_points, dim, n_modes)."""
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[0]
    out = np.empty((n, d.dim, len(modes)))
    if isinstance(d, Interval):
        x = pts[:, 0]
        for i, m in enumerate(modes):
            w = m.index[0] * math.pi / d.length
            out[:, 0, i] = m.norm_const * w * np.cos(w * x)
        return out
    x, y = pts[:, 0], pts[:, 1]
    for i, m in enumerate(modes):
        j, k = m.index
        wx = j * math.pi / d.a
        wy = k * math.pi / d.b
        out[:, 0, i] = m.norm_const * wx * np.cos(wx * x) * np.sin(wy * y)
        out[:, 1, i] = m.norm_const * wy * np.sin(wx * x) * np.cos(wy * y)
    return out


def mode_normal_derivatives(
    modes: Sequence[EigenMode], d: Domain, pts: np.ndarray, normals: np.ndarray
) -> np.ndarray:
    """Normal derivatives at boundary nodes, shape (n_points, n_modes)."""
    grads = mode_gradients(modes, d, pts)
    return np.einsum("pdm,pd->pm", grads, np.asarray(normals, dtype=float))


# }}}


# {{{ coefficients and norms

@dataclass(frozen=True)
class SpectralCoefficients:
    """A function or functional represented in the shared eigenbasis.

    ``values[i]`` is the pairing with ``modes[i]``; for ``kind='functional'``
    the pairing is the duality bracket of strength ``theta`` (numerically the
    same sequence, since finite truncations always live in L^2).
    """

    modes: tuple[EigenMode, ...]
    values: np.ndarray
    kind: str = "function"
    theta: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", np.asarray(self.values, dtype=float).reshape(-1)
        )
        if len(self.modes) != len(self.values):
            raise ValueError(
                f"{len(self.modes)} modes but {len(self.values)} values"
            )
        if self.kind not in ("function", "functional"):
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([m.lam for m in self.modes])

    def __len__(self) -> int:
        return len(self.values)


def project(
    f: Callable[..., np.ndarray],
    d: Domain,
    modes: Sequence[EigenMode],
    quad_order: int,
) -> SpectralCoefficients:
    """L^2 projection onto the given modes by Gauss-Legendre quadrature.

    ``f`` receives coordinate arrays (one per axis) and must evaluate
    pointwise.  Refuses orders below two points per half-wave of the highest
    requested mode, where the quadrature would alias.
    """
    if isinstance(d, Interval):
        max_wave = max(m.index[0] for m in modes)
    else:
        max_wave = max(max(m.index) for m in modes)
    if quad_order < 2 * max_wave:
        raise ValueError(
            f"quad_order={quad_order} is below 2 points per half-wave; "
            f"use at least {2 * max_wave} for these modes"
        )
    pts, w = domain_quadrature(d, quad_order)
    fv = f(*(pts[:, i] for i in range(d.dim)))
    fv = np.asarray(fv, dtype=float)
    basis = mode_values(modes, d, pts)
    coeffs = basis.T @ (w * fv)
    return SpectralCoefficients(tuple(modes), coeffs)


def fractional_norm(c: SpectralCoefficients, theta: float) -> float:
    """Norm of the fractional power space of exponent ``theta``.

    ``(sum lam_n^(2 theta) |c_n|^2)^(1/2)``; powers are formed as
    ``exp(theta * log(lam))`` so dual norms do not drift.
    """
    lam = c.lambdas
    if len(lam) == 0:
        return 0.0
    weights = np.exp(2.0 * theta * np.log(lam)) if theta != 0.0 else 1.0
    return float(np.sqrt(np.sum(weights * c.values**2)))


def apply_power(c: SpectralCoefficients, theta: float) -> SpectralCoefficients:
    """Apply the fractional power of the operator: values scaled by lam^theta."""
    if theta == 0.0:
        scale = 1.0
    else:
        scale = np.exp(theta * np.log(c.lambdas))
    return SpectralCoefficients(c.modes, c.values * scale, c.kind, c.theta)


# }}}
