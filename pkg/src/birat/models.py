"""Concrete reaction models: enzyme kinetics, Lotka-Volterra, Schnakenberg.

The enzyme system is the four-species mass-action network

    S + E <-> C -> P + E

with rates k1 (binding), km1 (unbinding), k2 (catalysis); e + c is conserved.
Scaling by the initial substrate and enzyme pools gives the three-variable
dimensionless form in (x, y, z) with parameters mu < nu and the small ratio
eps = e0/s0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DenominatorVanishes, PoleError
from .quadvf import QuadraticVectorField


@dataclass(frozen=True)
class EnzymeParams:
    """Mass-action rates and initial pools for the four-species system."""

    k1: float
    km1: float
    k2: float
    s0: float = 1.0
    e0: float = 1.0

    def __post_init__(self):
        for name in ("k1", "k2", "s0", "e0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.km1 < 0:
            raise ValueError("km1 must be nonnegative")


@dataclass(frozen=True)
class DimensionlessEnzymeParams:
    """Parameters of the scaled system; requires nu > mu > 0 and eps > 0."""

    mu: float
    nu: float
    eps: float

    def __post_init__(self):
        if not (self.nu > self.mu > 0):
            raise ValueError(f"need nu > mu > 0, got mu={self.mu}, nu={self.nu}")
        if self.eps <= 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class SchnakenbergParams:
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("a and b must be positive")


# -- enzyme kinetics -----------------------------------------------------------


def enzyme_vf(p: EnzymeParams) -> QuadraticVectorField:
    """Four-species field in the ordering (s, e, c, p).

    s' = -k1 e s + km1 c,  e' = -k1 e s + (km1 + k2) c,
    c' =  k1 e s - (km1 + k2) c,  p' = k2 c.
    """
    lin = [
        (0, 2, p.km1),
        (1, 2, p.km1 + p.k2),
        (2, 2, -(p.km1 + p.k2)),
        (3, 2, p.k2),
    ]
    quad = [
        (0, 0, 1, -p.k1),
        (1, 0, 1, -p.k1),
        (2, 0, 1, p.k1),
    ]
    return QuadraticVectorField.from_triplets(4, lin_triplets=lin, quad_triplets=quad)


def nondimensionalize(p: EnzymeParams):
    """Scaled parameters plus the factors that map solutions back.

    Returns (params, time_scale, state_scales): t = time_scale * tau and
    (s, c, p) = state_scales * (x, y, z); the enzyme level is e0 * (1 - y).
    """
    mu = p.km1 / (p.k1 * p.s0)
    nu = (p.km1 + p.k2) / (p.k1 * p.s0)
    eps = p.e0 / p.s0
    params = DimensionlessEnzymeParams(mu=mu, nu=nu, eps=eps)
    time_scale = 1.0 / (p.k1 * p.e0)
    state_scales = np.array([p.s0, p.e0, p.s0])
    return params, time_scale, state_scales


def enzyme_diml_vf(p: DimensionlessEnzymeParams) -> QuadraticVectorField:
    """Dimensionless field in (x, y, z); stores 1/eps explicitly.

    x' = -x + mu y + x y,  eps y' = x - nu y - x y,  z' = (nu - mu) y.
    The row functional (1, eps, 1) annihilates the field, so x + eps y + z
    is a first integral.
    """
    inv_eps = 1.0 / p.eps
    lin = [
        (0, 0, -1.0),
        (0, 1, p.mu),
        (1, 0, inv_eps),
        (1, 1, -p.nu * inv_eps),
        (2, 1, p.nu - p.mu),
    ]
    quad = [
        (0, 0, 1, 1.0),
        (1, 0, 1, -inv_eps),
    ]
    return QuadraticVectorField.from_triplets(3, lin_triplets=lin, quad_triplets=quad)


def enzyme_reduced_vf(p: DimensionlessEnzymeParams) -> QuadraticVectorField:
    """The closed (x, y) subsystem of :func:`enzyme_diml_vf`."""
    inv_eps = 1.0 / p.eps
    lin = [
        (0, 0, -1.0),
        (0, 1, p.mu),
        (1, 0, inv_eps),
        (1, 1, -p.nu * inv_eps),
    ]
    quad = [
        (0, 0, 1, 1.0),
        (1, 0, 1, -inv_eps),
    ]
    return QuadraticVectorField.from_triplets(2, lin_triplets=lin, quad_triplets=quad)


def product_accumulate(y_values, h: float, p: DimensionlessEnzymeParams) -> np.ndarray:
    """Trapezoidal reconstruction of z from sampled y values.

    z_n = (h/2)(nu - mu) * sum_{i<n} (y_i + y_{i+1}), with z_0 = 0; returns an
    array aligned with ``y_values``.
    """
    y = np.asarray(y_values, dtype=float)
    if y.ndim != 1:
        raise ValueError("y_values must be one-dimensional")
    z = np.zeros_like(y)
    if y.size > 1:
        z[1:] = 0.5 * h * (p.nu - p.mu) * np.cumsum(y[:-1] + y[1:])
    return z


def michaelis_menten(x: float, nu: float) -> float:
    """Quasi-steady complex level y = x/(nu + x)."""
    den = nu + x
    if den == 0:
        raise PoleError(f"pole at x = -nu = {x}")
    return x / den


# -- Lotka-Volterra -------------------------------------------------------------


def lv_vf() -> QuadraticVectorField:
    """Normalized predator-prey field x' = x(1 - y), y' = y(x - 1)."""
    lin = [(0, 0, 1.0), (1, 1, -1.0)]
    quad = [(0, 0, 1, -1.0), (1, 0, 1, 1.0)]
    return QuadraticVectorField.from_triplets(2, lin_triplets=lin, quad_triplets=quad)


# -- Schnakenberg ---------------------------------------------------------------


def schnakenberg_vf(p: SchnakenbergParams):
    """Right-hand side (a - x + x^2 y, b - x^2 y); cubic, so a plain callable."""

    def f(state):
        x, y = state
        xxy = x * x * y
        return np.array([p.a - x + xxy, p.b - xxy])

    return f


def schnakenberg_step(p: SchnakenbergParams, x: float, y: float, h: float):
    """Structure-adapted step solved in closed form.

    (xt - x)/h = a - (xt + x)/2 + x xt yt,  (yt - y)/h = b - x^2 yt.
    """
    den_y = 1.0 + h * x * x
    if den_y == 0.0:
        raise DenominatorVanishes("1 + h*x^2 vanishes")
    yt = (y + h * p.b) / den_y
    den_x = 1.0 + 0.5 * h - h * x * yt
    if den_x == 0.0:
        raise DenominatorVanishes("1 + h/2 - h*x*yt vanishes")
    xt = (x + h * (p.a - 0.5 * x)) / den_x
    return xt, yt


def schnakenberg_inverse_step(p: SchnakenbergParams, xt: float, yt: float, h: float):
    """Exact inverse of :func:`schnakenberg_step`."""
    den_x = 1.0 - 0.5 * h + h * xt * yt
    if den_x == 0.0:
        raise DenominatorVanishes("1 - h/2 + h*xt*yt vanishes")
    x = (xt * (1.0 + 0.5 * h) - h * p.a) / den_x
    y = yt * (1.0 + h * x * x) - h * p.b
    return x, y


def schnakenberg_steady_state(p: SchnakenbergParams):
    """The unique positive steady state (a + b, b/(a + b)^2)."""
    s = p.a + p.b
    return s, p.b / (s * s)


def schnakenberg_trace(p: SchnakenbergParams) -> float:
    """Trace of the field Jacobian at the steady state; positive means unstable."""
    s = p.a + p.b
    return -1.0 + 2.0 * p.b / s - s * s


def hopf_unstable_b(a: float, trace_target: float = 0.25, b_grid=None) -> float:
    """Smallest grid value of b whose steady state has trace >= trace_target.

    Derived from the trace condition rather than hard-coded; the default grid
    scans b in (0, 1).
    """
    if b_grid is None:
        b_grid = np.linspace(0.05, 0.95, 181)
    for b in b_grid:
        if schnakenberg_trace(SchnakenbergParams(a=a, b=float(b))) >= trace_target:
            return float(b)
    raise ValueError(f"no b in the grid reaches trace {trace_target} for a={a}")


# -- registry --------------------------------------------------------------------

MODEL_STATE_NAMES = {
    "enzyme4": ("s", "e", "c", "p"),
    "enzyme3": ("x", "y", "z"),
    "lv": ("x", "y"),
    "schnakenberg": ("x", "y"),
}


def model_vector_field(name: str, params=None) -> QuadraticVectorField:
    """Quadratic field for a registry model; Schnakenberg is cubic and excluded.

    ``params`` is the model's parameter object (EnzymeParams for enzyme4,
    DimensionlessEnzymeParams for enzyme3, ignored for lv).
    """
    if name == "enzyme4":
        return enzyme_vf(params)
    if name == "enzyme3":
        return enzyme_diml_vf(params)
    if name == "lv":
        return lv_vf()
    raise KeyError(f"no quadratic field for model {name!r}")


def model_default_x0(name: str, params=None):
    if name == "enzyme4":
        return [params.s0, params.e0, 0.0, 0.0]
    if name == "enzyme3":
        return [1.0, 0.0, 0.0]
    if name == "lv":
        return [2.0, 0.5]
    if name == "schnakenberg":
        xs, ys = schnakenberg_steady_state(params)
        return [1.1 * xs, ys]
    raise KeyError(f"unknown model {name!r}")


__all__ = [
    "EnzymeParams",
    "DimensionlessEnzymeParams",
    "SchnakenbergParams",
    "enzyme_vf",
    "nondimensionalize",
    "enzyme_diml_vf",
    "enzyme_reduced_vf",
    "product_accumulate",
    "michaelis_menten",
    "lv_vf",
    "schnakenberg_vf",
    "schnakenberg_step",
    "schnakenberg_inverse_step",
    "schnakenberg_steady_state",
    "schnakenberg_trace",
    "hopf_unstable_b",
    "MODEL_STATE_NAMES",
    "model_vector_field",
    "model_default_x0",
]
