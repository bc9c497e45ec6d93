"""A ten-parameter family of linearly implicit Lotka-Volterra discretizations.

For the normalized system x' = x(1 - y), y' = y(x - 1) the family is

    (xt - x)/h =  a x + (1-a) xt - (b x y + c xt yt + d x yt + e xt y)
    (yt - y)/h = -A y - (1-A) yt + (B x y + C xt yt + D x yt + E xt y)

subject to b + c + d + e = 1 and B + C + D + E = 1.  Both relations are
affine in each of xt and yt, so eliminating one unknown leaves a quadratic
in the other; the map is birational exactly when that quadratic factors
rationally, which happens on seven parameter subfamilies (labels i..vii).
Three subfamilies (I..III) preserve the symplectic form dx ^ dy / (x y).

Classification is template membership with exact rational arithmetic; the
symbolic certificate independently re-derives the elimination quadratics
over Q[x, y, h] and checks their discriminants for perfect squares, with h
carried as an indeterminate so the verdict covers every step size at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from random import Random

import numpy as np

from .errors import (
    ConstraintViolation,
    DegenerateLinearTerm,
    DomainError,
    NotBirational,
    SingularImplicitSystem,
)
from .ratpoly import MultiPoly, _as_fraction, perfect_square_root

CASE_LABELS = ("i", "ii", "iii", "iv", "v", "vi", "vii")
SYMPLECTIC_LABELS = ("I", "II", "III")

BIRATIONAL = "BIRATIONAL"
NOT_CERTIFIED = "NOT_CERTIFIED"

DEFAULT_STEP_TOL = 1e-9


@dataclass(frozen=True)
class LVParams:
    """Exact scheme parameters (a, b, c, d, e, A, B, C, D, E).

    The complementary weights are derived: a_hat = 1 - a, A_hat = 1 - A.
    Floats are rejected; feed strings like "1/2" or "0.1" for exact values.
    """

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    A: Fraction
    B: Fraction
    C: Fraction
    D: Fraction
    E: Fraction

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "e", "A", "B", "C", "D", "E"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        lower = self.b + self.c + self.d + self.e
        if lower != 1:
            raise ConstraintViolation(f"b + c + d + e = {lower}, expected 1")
        upper = self.B + self.C + self.D + self.E
        if upper != 1:
            raise ConstraintViolation(f"B + C + D + E = {upper}, expected 1")

    @property
    def a_hat(self) -> Fraction:
        return 1 - self.a

    @property
    def A_hat(self) -> Fraction:
        return 1 - self.A

    @classmethod
    def from_list(cls, values) -> "LVParams":
        vals = list(values)
        if len(vals) != 10:
            raise ConstraintViolation(f"expected 10 parameters, got {len(vals)}")
        return cls(*[_as_fraction(v) for v in vals])

    def to_list(self) -> list[Fraction]:
        return [self.a, self.b, self.c, self.d, self.e, self.A, self.B, self.C, self.D, self.E]

    @cached_property
    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.to_list())


# -- named schemes ---------------------------------------------------------------

KAHAN_SCHEME = LVParams.from_list(["1/2", 0, 0, "1/2", "1/2", "1/2", 0, 0, "1/2", "1/2"])
MICKENS_SCHEME = LVParams.from_list([2, 0, 0, 0, 1, 0, 0, -1, 0, 2])
# an oscillation-preserving member of case (vi) / symplectic case (III)
CASE_VI_SCHEME = LVParams.from_list(["1/2", 0, "3/2", "-1/2", 0, "1/2", "4/5", 0, "1/5", 0])


def case_iv_blend(d) -> LVParams:
    """Case-(iv) family {1/2, 3/2, 0, d, -d-1/2, 1/2, 0, 0, 0, 1}.

    Symplectic (case I) exactly at d = 0; for d != 0 orbits lose the
    conserved form and drift toward the interior fixed point.
    """
    d = _as_fraction(d)
    return LVParams.from_list(
        [Fraction(1, 2), Fraction(3, 2), 0, d, -d - Fraction(1, 2), Fraction(1, 2), 0, 0, 0, 1]
    )


# -- classification ----------------------------------------------------------------


def classify_birational(p: LVParams) -> tuple[str, ...]:
    """Labels of the birational case templates containing p (possibly several)."""
    cases = []
    if p.b == 0 and p.c == 0 and p.B == 0 and p.C == 0 and p.d + p.e == 1 and p.D + p.E == 1:
        cases.append("i")
    if p.b == 0 and p.c == 0 and p.e == 0 and p.d == 1 and p.C == 0 and p.B + p.D + p.E == 1:
        cases.append("ii")
    if p.b == 0 and p.c == 0 and p.d == 0 and p.e == 1 and p.B == 0 and p.C + p.D + p.E == 1:
        cases.append("iii")
    if p.c == 0 and p.B == 0 and p.C == 0 and p.D == 0 and p.E == 1 and p.b + p.d + p.e == 1:
        cases.append("iv")
    if p.b == 0 and p.B == 0 and p.C == 0 and p.E == 0 and p.D == 1 and p.c + p.d + p.e == 1:
        cases.append("v")
    if p.b == 0 and p.e == 0 and p.C == 0 and p.E == 0 and p.c + p.d == 1 and p.B + p.D == 1:
        cases.append("vi")
    if p.c == 0 and p.d == 0 and p.B == 0 and p.D == 0 and p.b + p.e == 1 and p.C + p.E == 1:
        cases.append("vii")
    return tuple(cases)


def classify_symplectic(p: LVParams) -> tuple[str, ...]:
    """Labels of the symplectic case templates containing p."""
    cases = []
    if p.c == 0 and p.d == 0 and p.B == 0 and p.D == 0 and p.b + p.e == 1 and p.C + p.E == 1:
        cases.append("I")
    if p.b == 0 and p.c == 0 and p.B == 0 and p.C == 0 and p.D == p.d and p.E == p.e \
            and p.d + p.e == 1:
        cases.append("II")
    if p.b == 0 and p.e == 0 and p.C == 0 and p.E == 0 and p.c + p.d == 1 and p.B + p.D == 1:
        cases.append("III")
    return tuple(cases)


def check_sympcon(p: LVParams) -> bool:
    """Product conditions equivalent to preservation of dx ^ dy / (x y):

    d E - D e = c C = d C = c E = b B = b D = e B = 0.
    """
    return (
        p.d * p.E - p.D * p.e == 0
        and p.c * p.C == 0
        and p.d * p.C == 0
        and p.c * p.E == 0
        and p.b * p.B == 0
        and p.b * p.D == 0
        and p.e * p.B == 0
    )


def invert_params(p: LVParams) -> LVParams:
    """Parameters of the inverse scheme (used with step -h); an involution.

    Swaps b with c, d with e, B with C, D with E and reflects a, A about 1/2.
    """
    return LVParams(
        a=1 - p.a, b=p.c, c=p.b, d=p.e, e=p.d,
        A=1 - p.A, B=p.C, C=p.B, D=p.E, E=p.D,
    )


# -- the step relations -------------------------------------------------------------


def _relation_coeffs(vals, x, y, h, one):
    """Coefficients of the two step relations in the basis {1, xt, yt, xt*yt}.

    Works elementwise over floats or MultiPoly; returns
    (c1, u1, v1, uv1, c2, u2, v2, uv2) for h-scaled residuals E1, E2 that
    vanish on step pairs.
    """
    a, b, c, d, e, A, B, C, D, E = vals
    e1c = h * b * x * y - x - h * a * x
    e1u = one - (1 - a) * h + e * h * y
    e1v = d * h * x
    e1uv = c * h
    e2c = h * A * y - y - h * B * x * y
    e2u = -(E * h * y)
    e2v = one + (1 - A) * h - D * h * x
    e2uv = -(C * h)
    return e1c, e1u, e1v, e1uv, e2c, e2u, e2v, e2uv


def _eliminate(c1, u1, v1, uv1, c2, u2, v2, uv2):
    """Resultant of the two relations in u: quadratic coefficients in v.

    With E_i = (u_i + uv_i v) u + (c_i + v_i v), returns (p2, p1, p0) of
    alpha1*beta2 - alpha2*beta1.
    """
    p2 = uv1 * v2 - uv2 * v1
    p1 = u1 * v2 + uv1 * c2 - u2 * v1 - uv2 * c1
    p0 = u1 * c2 - u2 * c1
    return p2, p1, p0


def step_residuals(p: LVParams, x, y, xt, yt, h):
    """h-scaled residuals of the two defining relations at a candidate pair."""
    c1, u1, v1, uv1, c2, u2, v2, uv2 = _relation_coeffs(p.as_floats, x, y, h, 1.0)
    r1 = c1 + u1 * xt + v1 * yt + uv1 * xt * yt
    r2 = c2 + u2 * xt + v2 * yt + uv2 * xt * yt
    return r1, r2


def _linear_root(p1, p0, tol):
    if abs(p1) <= tol * (abs(p0) + 1.0):
        raise DegenerateLinearTerm(f"linear coefficient {p1} too small, map undefined here")
    return -p0 / p1


def _recover(num1, den1, num2, den2, tol):
    if abs(den1) > tol:
        return -num1 / den1
    if abs(den2) > tol:
        return -num2 / den2
    raise DegenerateLinearTerm("both recovery denominators vanish")


def lv_step(p: LVParams, x: float, y: float, h: float, tol: float = DEFAULT_STEP_TOL):
    """One step (x, y) -> (xt, yt) of the scheme p.

    Tries the xt-elimination first: if the quadratic coefficient in yt is
    negligible (relative to the other coefficients) the relation is linear
    and yt = -p0/p1; otherwise the roles of xt and yt are exchanged.  Every
    birational case template leaves at least one order linear.
    """
    x, y, h = float(x), float(y), float(h)
    c1, u1, v1, uv1, c2, u2, v2, uv2 = _relation_coeffs(p.as_floats, x, y, h, 1.0)

    p2, p1, p0 = _eliminate(c1, u1, v1, uv1, c2, u2, v2, uv2)
    if abs(p2) <= tol * (abs(p1) + abs(p0) + 1.0):
        yt = _linear_root(p1, p0, tol)
        xt = _recover(c1 + v1 * yt, u1 + uv1 * yt, c2 + v2 * yt, u2 + uv2 * yt, tol)
        return xt, yt

    q2, q1, q0 = _eliminate(c1, v1, u1, uv1, c2, v2, u2, uv2)
    if abs(q2) <= tol * (abs(q1) + abs(q0) + 1.0):
        xt = _linear_root(q1, q0, tol)
        yt = _recover(c1 + u1 * xt, v1 + uv1 * xt, c2 + u2 * xt, v2 + uv2 * xt, tol)
        return xt, yt

    raise NotBirational(
        f"both elimination orders stay quadratic (p2={p2:.3e}, q2={q2:.3e}) "
        f"at (x, y) = ({x}, {y}), h = {h}"
    )


def lv_inverse_step(p: LVParams, xt: float, yt: float, h: float, tol: float = DEFAULT_STEP_TOL):
    """Inverse step: the inverted parameter set run with step -h."""
    return lv_step(invert_params(p), xt, yt, -h, tol)


def iterate_lv(p: LVParams, x0: float, y0: float, h: float, steps: int,
               tol: float = DEFAULT_STEP_TOL) -> np.ndarray:
    """Trajectory array of shape (steps + 1, 2)."""
    out = np.empty((steps + 1, 2))
    out[0] = (x0, y0)
    x, y = float(x0), float(y0)
    for k in range(steps):
        x, y = lv_step(p, x, y, h, tol)
        out[k + 1] = (x, y)
    return out


# -- symbolic certification -----------------------------------------------------------


@dataclass(frozen=True)
class SymbolicCertificate:
    """Exact elimination quadratics and their discriminant square roots.

    The forward quadratic (in yt) has coefficients in the departure point
    (x, y); the backward quadratic (in y) has coefficients in the arrival
    point, represented here by the same two variable slots.
    """

    verdict: str
    forward: tuple[MultiPoly, MultiPoly, MultiPoly]
    backward: tuple[MultiPoly, MultiPoly, MultiPoly]
    forward_discriminant: MultiPoly
    backward_discriminant: MultiPoly
    forward_root: MultiPoly | None
    backward_root: MultiPoly | None

    @property
    def p2(self) -> MultiPoly:
        return self.forward[0]

    @property
    def backward_p2(self) -> MultiPoly:
        return self.backward[0]

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "forward_quadratic": [q.render() for q in self.forward],
            "backward_quadratic": [q.render() for q in self.backward],
            "forward_discriminant": self.forward_discriminant.render(),
            "backward_discriminant": self.backward_discriminant.render(),
            "forward_root": None if self.forward_root is None else self.forward_root.render(),
            "backward_root": None if self.backward_root is None else self.backward_root.render(),
        }


def _symbolic_quadratic(p: LVParams):
    x = MultiPoly.variable("x")
    y = MultiPoly.variable("y")
    h = MultiPoly.variable("h")
    one = MultiPoly.constant(1)
    coeffs = _relation_coeffs(tuple(p.to_list()), x, y, h, one)
    return _eliminate(*coeffs)


def symbolic_certificate(p: LVParams) -> SymbolicCertificate:
    """Exact birationality certificate over Q[x, y, h].

    Forward direction: eliminate xt, leaving a quadratic in yt.  Backward
    direction: the inverse scheme with h negated, whose elimination yields
    the quadratic satisfied by the departure y as a function of the arrival
    point.  Each direction is solvable in radicals-free form precisely when
    its leading coefficient vanishes identically or its discriminant is a
    polynomial square.
    """
    forward = _symbolic_quadratic(p)
    backward = tuple(q.negate_h() for q in _symbolic_quadratic(invert_params(p)))

    disc_f = forward[1] * forward[1] - 4 * forward[0] * forward[2]
    disc_b = backward[1] * backward[1] - 4 * backward[0] * backward[2]
    root_f = perfect_square_root(disc_f)
    root_b = perfect_square_root(disc_b)
    forward_ok = forward[0].is_zero or root_f is not None
    backward_ok = backward[0].is_zero or root_b is not None
    verdict = BIRATIONAL if (forward_ok and backward_ok) else NOT_CERTIFIED
    return SymbolicCertificate(
        verdict=verdict,
        forward=forward,
        backward=backward,
        forward_discriminant=disc_f,
        backward_discriminant=disc_b,
        forward_root=root_f,
        backward_root=root_b,
    )


@dataclass(frozen=True)
class ClassificationReport:
    birational_cases: tuple[str, ...]
    symplectic_cases: tuple[str, ...]
    sympcon: bool
    certificate: SymbolicCertificate | None = None

    def to_json_dict(self) -> dict:
        out = {
            "birational_cases": list(self.birational_cases),
            "symplectic_cases": list(self.symplectic_cases),
            "sympcon": self.sympcon,
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json_dict()
        return out


def classify_params(p: LVParams, certify: bool = False) -> ClassificationReport:
    return ClassificationReport(
        birational_cases=classify_birational(p),
        symplectic_cases=classify_symplectic(p),
        sympcon=check_sympcon(p),
        certificate=symbolic_certificate(p) if certify else None,
    )


# -- geometry ---------------------------------------------------------------------------


def lv_hamiltonian(x: float, y: float) -> float:
    """Conserved quantity H = log(x y) - x - y of the continuous flow."""
    if x <= 0 or y <= 0:
        raise DomainError(f"H is defined on the open positive quadrant, got ({x}, {y})")
    return math.log(x * y) - x - y


def symplectic_residual(p: LVParams, x: float, y: float, h: float,
                        tol: float = DEFAULT_STEP_TOL) -> float:
    """det(d(xt, yt)/d(x, y)) - (xt yt)/(x y) by implicit differentiation.

    Zero (to rounding) exactly for schemes preserving dx ^ dy / (x y).
    """
    if x == 0 or y == 0:
        raise DomainError("residual needs x y != 0")
    xt, yt = lv_step(p, x, y, h, tol)
    vals = p.as_floats
    a, b, c, d, e, A, B, C, D, E = vals

    m11 = 1.0 - h * (1.0 - a) + h * (c * yt + e * y)      # dE1/dxt
    m12 = h * (c * xt + d * x)                             # dE1/dyt
    m21 = -h * (C * yt + E * y)                            # dE2/dxt
    m22 = 1.0 + h * (1.0 - A) - h * (C * xt + D * x)       # dE2/dyt
    r11 = -1.0 - h * a + h * (b * y + d * yt)              # dE1/dx
    r12 = h * (b * x + e * xt)                             # dE1/dy
    r21 = -h * (B * y + D * yt)                            # dE2/dx
    r22 = -1.0 + h * A - h * (B * x + E * xt)              # dE2/dy

    det_m = m11 * m22 - m12 * m21
    if abs(det_m) <= 1e-15 * (abs(m11 * m22) + abs(m12 * m21)):
        raise SingularImplicitSystem(f"implicit system singular at ({x}, {y}), h={h}")
    det_r = r11 * r22 - r12 * r21
    # J solves M J = -R, so det J = det R / det M
    return det_r / det_m - (xt * yt) / (x * y)


# -- random representatives (seeded) ------------------------------------------------------


def _rand_fraction(rng: Random, nonzero: bool = False, span: int = 3, max_den: int = 4) -> Fraction:
    while True:
        q = Fraction(rng.randint(-span, span), rng.randint(1, max_den))
        if q != 0 or not nonzero:
            return q


def random_case_params(label: str, rng: Random) -> LVParams:
    """A random exact-rational member of a birational case template."""
    a = _rand_fraction(rng)
    A = _rand_fraction(rng)
    r = lambda: _rand_fraction(rng, nonzero=True)
    if label == "i":
        d, D = r(), r()
        vals = [a, 0, 0, d, 1 - d, A, 0, 0, D, 1 - D]
    elif label == "ii":
        B, D = r(), r()
        vals = [a, 0, 0, 1, 0, A, B, 0, D, 1 - B - D]
    elif label == "iii":
        C, D = r(), r()
        vals = [a, 0, 0, 0, 1, A, 0, C, D, 1 - C - D]
    elif label == "iv":
        b, d = r(), r()
        vals = [a, b, 0, d, 1 - b - d, A, 0, 0, 0, 1]
    elif label == "v":
        c, d = r(), r()
        vals = [a, 0, c, d, 1 - c - d, A, 0, 0, 1, 0]
    elif label == "vi":
        c, B = r(), r()
        vals = [a, 0, c, 1 - c, 0, A, B, 0, 1 - B, 0]
    elif label == "vii":
        b, C = r(), r()
        vals = [a, b, 0, 0, 1 - b, A, 0, C, 0, 1 - C]
    else:
        raise KeyError(f"unknown case label {label!r}")
    return LVParams.from_list(vals)


def random_symplectic_params(label: str, rng: Random) -> LVParams:
    """A random exact-rational member of a symplectic case template."""
    a = _rand_fraction(rng)
    A = _rand_fraction(rng)
    r = lambda: _rand_fraction(rng, nonzero=True)
    if label == "I":
        b, C = r(), r()
        vals = [a, b, 0, 0, 1 - b, A, 0, C, 0, 1 - C]
    elif label == "II":
        d = r()
        vals = [a, 0, 0, d, 1 - d, A, 0, 0, d, 1 - d]
    elif label == "III":
        c, B = r(), r()
        vals = [a, 0, c, 1 - c, 0, A, B, 0, 1 - B, 0]
    else:
        raise KeyError(f"unknown symplectic label {label!r}")
    return LVParams.from_list(vals)


def random_noncase_params(rng: Random, max_tries: int = 200) -> LVParams:
    """A constraint-satisfying set outside every birational case template."""
    for _ in range(max_tries):
        b = _rand_fraction(rng, nonzero=True)
        c = _rand_fraction(rng, nonzero=True)
        d = _rand_fraction(rng, nonzero=True)
        B = _rand_fraction(rng, nonzero=True)
        C = _rand_fraction(rng, nonzero=True)
        D = _rand_fraction(rng, nonzero=True)
        p = LVParams.from_list(
            [_rand_fraction(rng), b, c, d, 1 - b - c - d,
             _rand_fraction(rng), B, C, D, 1 - B - C - D]
        )
        if not classify_birational(p):
            return p
    raise RuntimeError("failed to sample a non-case parameter set")
