"""Interval model map X_{n+1} = mu - A*|X_n|^nu.

The map is even in X with a corner at 0, so the orbit of the corner
point organizes the bifurcation structure the same way the separatrix
does for the flow.  Conventions:

* the corner image f(0) is defined by continuity from X -> 0+, so
  f(0) = mu; the 0- convention produces the mirror kneading and is
  exposed as a flag where it matters;
* kneading symbols are 1 for an iterate >= 0 and 0 otherwise.

Curve families over the (mu, A) or (mu, nu) planes:

* ``l1``    mu = 0, the corner is a fixed point;
* ``l2``    A*mu^(nu-1) = 1, the corner orbit is period-2;
* ``l1_LA`` A*mu^(nu-1) = 2, f^2(0) lands on the unstable fixed point
  -mu of the increasing branch;
* ``l2_LA`` f^3(0) lands on the negative point of the unstable
  alternating period-2 orbit;
* ``l_lac`` f^3(0) lands on the unstable fixed point of the
  decreasing branch;
* ``l_SN``  saddle-node of the increasing-branch fixed-point pair;
* ``l_PD``  period-doubling of the decreasing-branch fixed point.

The first three have closed forms (``analytic_curve``); the rest are
solved by bracketed root-finding (``solve_curve``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels as k
from .errors import DomainError

__all__ = [
    "ModelParams",
    "CurvePoint",
    "step",
    "orbit",
    "critical_orbit",
    "analytic_curve",
    "solve_curve",
    "classify_regime",
    "mirror_params",
    "regime_grid",
    "ANALYTIC_KINDS",
    "SOLVED_KINDS",
]

ANALYTIC_KINDS = ("l1", "l2", "l1_LA")
SOLVED_KINDS = ("l2_LA", "l_SN", "l_PD", "l_lac")

_ESCAPE = 1e6


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the map X -> mu - A*|X|^nu."""

    mu: float
    A: float
    nu: float

    def __post_init__(self):
        if not (self.nu > 0.0):
            raise DomainError(f"nu must be positive, got {self.nu}")


@dataclass(frozen=True)
class CurvePoint:
    """A parameter point on a named bifurcation curve of the map."""

    kind: str
    params: ModelParams
    residual: float


def step(X: float, p: ModelParams) -> float:
    """One application of the map."""
    return p.mu - p.A * abs(X) ** p.nu


def orbit(p: ModelParams, x0: float, N: int) -> np.ndarray:
    """Orbit x0, f(x0), ..., f^N(x0) as an array of length N + 1."""
    if N < 0:
        raise DomainError("N must be >= 0")
    out = np.empty(N + 1)
    k._modelmap_orbit(p.mu, p.A, p.nu, float(x0), N, out)
    return out


def critical_orbit(p: ModelParams, N: int,
                   branch: str = "plus") -> tuple[np.ndarray, str]:
    """Orbit of the corner X = 0 with kneading symbols.

    Returns (orbit, symbols): orbit[0] = 0 and len(orbit) = N + 1
    unless the orbit leaves |X| > 1e6, in which case it is truncated
    at the last finite bounded iterate.  symbols[i] is '1' when
    orbit[i] >= 0 and '0' otherwise, so symbols[0] = '1' on the plus
    branch (corner resolved by continuity from 0+).  branch='minus'
    resolves the corner through the mirror replacement (mu -> -mu,
    A -> -A, orbit negated); the map is even in X, so the iterates
    coincide with the plus branch and only exact zeros flip symbol
    (the corner itself, and interior hits such as the period-2 corner
    orbit on l2).
    """
    if N < 1:
        raise DomainError("N must be >= 1")
    if branch not in ("plus", "minus"):
        raise DomainError(f"unknown branch {branch!r}")
    q = mirror_params(p) if branch == "minus" else p
    xs = orbit(q, 0.0, N)
    bad = ~(np.isfinite(xs) & (np.abs(xs) <= _ESCAPE))
    if bad.any():
        xs = xs[:int(np.argmax(bad))]
    if branch == "minus":
        xs = -xs
        symbols = "".join("1" if x > 0 else "0" for x in xs)
    else:
        symbols = "".join("1" if x >= 0 else "0" for x in xs)
    return xs, symbols


def analytic_curve(kind: str, A: float, nu: float) -> float:
    """Closed-form mu for the curves l1, l2 and l1_LA."""
    if kind not in ANALYTIC_KINDS:
        raise DomainError(f"no closed form for {kind!r}")
    if nu >= 1.0:
        raise DomainError(
            f"closed forms require nu < 1 (exponent 1/(1-nu)), got nu={nu}")
    if kind == "l1":
        return 0.0
    if A <= 0.0:
        raise DomainError(f"{kind} requires A > 0, got {A}")
    if kind == "l2":
        return A ** (1.0 / (1.0 - nu))
    return (A / 2.0) ** (1.0 / (1.0 - nu))


def _f(x: float, mu: float, A: float, nu: float) -> float:
    return mu - A * abs(x) ** nu


def _fn(x: float, mu: float, A: float, nu: float, n: int) -> float:
    for _ in range(n):
        x = mu - A * abs(x) ** nu
    return x


def _dec_fixed_point(mu: float, A: float, nu: float) -> float:
    """The unique fixed point on the decreasing branch x > 0."""
    # h(x) = f(x) - x is strictly decreasing on x > 0 with h(0+) = mu > 0
    # and h(mu) = -A*mu^nu < 0
    if mu <= 0.0 or A <= 0.0:
        raise DomainError("decreasing-branch fixed point needs mu, A > 0")
    return brentq(lambda x: _f(x, mu, A, nu) - x, 0.0, mu, xtol=1e-15)


def _alt_period2_negative(mu: float, A: float, nu: float) -> float:
    """Negative point p1 of the alternating period-2 orbit p1 < 0 < p2.

    Roots of f^2(x) = x on x < 0 are scanned densely and filtered:
    fixed points are discarded (below the saddle-node value the
    increasing branch carries two of them) and the partner f(p1) must
    be positive.  Exactly one surviving root is required.
    """
    lo = -1.5 * mu
    # the log tail must reach very deep: near the cycle birth at l2 the
    # negative point sits at |p1| ~ (offset)^(1/nu), which for nu ~ 0.55
    # and an offset of 1e-9*mu is already down at 1e-18*mu
    grid = np.concatenate([
        np.linspace(lo, 0.0, 1025),
        -mu * np.logspace(-26, 0, 553),
    ])
    grid = np.unique(grid[grid <= 0.0])
    H = np.array([_fn(x, mu, A, nu, 2) - x for x in grid])
    # every absolute scale below must follow mu: at nu near 1 the whole
    # window collapses (mu down to ~1e-17 at the grid corner) and any
    # fixed cutoff is either above the cycle or below root accuracy
    xtol = 1e-12 * mu
    roots = []
    for i in range(len(grid) - 1):
        if H[i] == 0.0:
            r = grid[i]
        elif (H[i] > 0.0) != (H[i + 1] > 0.0):
            r = brentq(lambda x: _fn(x, mu, A, nu, 2) - x,
                       grid[i], grid[i + 1], xtol=xtol)
        else:
            continue
        # fixed points of f are also roots of f^2; the genuine cycle has
        # |f(p1) - p1| = p2 - p1 ~ 2 mu, a fixed point only rounding
        if abs(_f(r, mu, A, nu) - r) < 1e-6 * mu:
            continue
        if r >= 0.0 or _f(r, mu, A, nu) <= 0.0:
            continue
        if not roots or abs(r - roots[-1]) > 1e-6 * mu:
            roots.append(r)
    if len(roots) != 1:
        raise DomainError(
            f"expected one alternating period-2 point at mu={mu}, "
            f"found {len(roots)}: {roots}")
    return roots[0]


def _bracketed_root(fun, bracket, what):
    a, b = bracket
    fa, fb = fun(a), fun(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        samples = ", ".join(
            f"f({x:.6g})={fun(x):.6g}" for x in np.linspace(a, b, 5))
        raise DomainError(
            f"no sign change for {what} on [{a:.6g}, {b:.6g}]: {samples}")
    return brentq(fun, a, b, xtol=1e-15)


def solve_curve(kind: str, A: float, nu: float,
                bracket: tuple[float, float] | None = None) -> CurvePoint:
    """Numerically locate mu on one of the solved curve families.

    For l_lac and l2_LA the bracket is in mu (default: strictly inside
    the l1_LA..l2 window).  l_SN and l_PD reduce to one equation for
    the tangency point x; the bracket is in |x| and mu follows from
    the fixed-point condition, so both defining residuals vanish to
    rounding.
    """
    if kind not in SOLVED_KINDS:
        raise DomainError(f"unknown solved curve {kind!r}")
    if nu >= 1.0 or nu <= 0.0:
        raise DomainError(f"curves require 0 < nu < 1, got {nu}")
    if A <= 0.0:
        raise DomainError(f"curves require A > 0, got {A}")

    if kind in ("l_SN", "l_PD"):
        # tangency condition |f'| = A*nu*|x|^(nu-1) = 1 on the relevant
        # branch, solved for |x|; the mu making x a fixed point follows
        u_star = (A * nu) ** (1.0 / (1.0 - nu))
        if bracket is None:
            bracket = (0.25 * u_star, 4.0 * u_star)
        if bracket[0] <= 0.0:
            raise DomainError("bracket for l_SN/l_PD must lie in |x| > 0")
        # solve in log|x|: u_star spans many decades over the (A, nu)
        # window and the power law is badly conditioned in u itself
        w = _bracketed_root(
            lambda w: A * nu * math.exp((nu - 1.0) * w) - 1.0,
            (math.log(bracket[0]), math.log(bracket[1])),
            f"{kind} tangency")
        u = math.exp(w)
        if kind == "l_SN":
            x_star = -u
            mu = x_star + A * u ** nu
            residual = abs(A * nu * u ** (nu - 1.0) - 1.0)
        else:
            x_star = u
            mu = x_star + A * u ** nu
            residual = abs(-A * nu * u ** (nu - 1.0) + 1.0)
        p = ModelParams(mu, A, nu)
        residual = max(residual, abs(_f(x_star, mu, A, nu) - x_star))
        return CurvePoint(kind=kind, params=p, residual=residual)

    mu_hi = analytic_curve("l2", A, nu)
    mu_lo = analytic_curve("l1_LA", A, nu)
    if bracket is None:
        bracket = (mu_lo * (1.0 + 1e-9), mu_hi * (1.0 - 1e-9))

    if kind == "l_lac":
        def resid(mu):
            return _fn(0.0, mu, A, nu, 3) - _dec_fixed_point(mu, A, nu)
    else:  # l2_LA
        def resid(mu):
            return _fn(0.0, mu, A, nu, 3) - _alt_period2_negative(mu, A, nu)

    mu = _bracketed_root(resid, bracket, kind)
    p = ModelParams(mu, A, nu)
    return CurvePoint(kind=kind, params=p, residual=abs(resid(mu)))


def classify_regime(p: ModelParams, N_transient: int = 2000,
                    N_probe: int = 1000, cycle_tol: float = 1e-9,
                    max_period: int = 64) -> str:
    """Long-run behavior of the corner orbit.

    'stable_periodic' when the tail settles on a cycle of period
    <= max_period to cycle_tol, 'escaped' when |X| exceeds 1e6,
    'chaotic_candidate' for a bounded non-convergent tail.
    """
    if N_transient < 0 or N_probe < max_period + 1:
        raise DomainError("need N_transient >= 0 and N_probe > max_period")
    code = k._modelmap_classify(p.mu, p.A, p.nu, N_transient, N_probe,
                                cycle_tol, max_period, _ESCAPE)
    return ("stable_periodic", "chaotic_candidate", "escaped")[code]


def mirror_params(p: ModelParams) -> ModelParams:
    """The conjugate parameter point: orbits map via X -> -X."""
    return ModelParams(-p.mu, -p.A, p.nu)


def regime_grid(mu_axis: np.ndarray, other_axis: np.ndarray,
                other: str = "nu", fixed: float = 0.63,
                N_transient: int = 2000, N_probe: int = 1000
                ) -> np.ndarray:
    """Regime classification over a (mu, A) or (mu, nu) rectangle.

    other='nu' varies nu at fixed A; other='A' varies A at fixed nu.
    Returns an integer array of shape (len(other_axis), len(mu_axis))
    with 0/1/2 = stable_periodic/chaotic_candidate/escaped.
    """
    if other not in ("nu", "A"):
        raise DomainError(f"other must be 'nu' or 'A', got {other!r}")
    out = np.empty((len(other_axis), len(mu_axis)), dtype=np.int8)
    for i, val in enumerate(other_axis):
        A = fixed if other == "nu" else float(val)
        nu = float(val) if other == "nu" else fixed
        for j, mu in enumerate(mu_axis):
            out[i, j] = k._modelmap_classify(
                float(mu), A, nu, N_transient, N_probe, 1e-9, 64, _ESCAPE)
    return out
