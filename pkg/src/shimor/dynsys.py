"""System definitions and closed-form structure.

Three vector fields share the symmetry (x, y, z) -> (-x, -y, z):

  Shimizu-Morioka:  xdot = y, ydot = x - lam*y - x*z, zdot = -alpha*z + x^2
  extended SM:      same with an extra -B*x^3 in ydot
  Lorenz:           xdot = sigma*(y-x), ydot = x*(r-z) - y, zdot = x*y - b*z

Besides field/Jacobian evaluation this module carries the equilibrium
reports (saddle eigenstructure, saddle index), the analytic Hopf and
saddle-index-level curves, and the parameter/state transform that sends
a Lorenz system into the extended SM form.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_CODES = {"sm": 0, "ext_sm": 1, "lorenz": 2}


@dataclass(frozen=True)
class SystemParams:
    """Parameter set tagged by family ('sm', 'ext_sm', 'lorenz')."""

    system_id: str
    alpha: float = np.nan
    lam: float = np.nan
    B: float = np.nan
    b: float = np.nan
    sigma: float = np.nan
    r: float = np.nan

    def __post_init__(self):
        if self.system_id not in _CODES:
            raise DomainError(f"unknown system_id {self.system_id!r}")
        if self.system_id in ("sm", "ext_sm"):
            vals = [self.alpha, self.lam] + ([self.B] if self.system_id == "ext_sm" else [])
            if not all(np.isfinite(v) for v in vals):
                raise DomainError("non-finite parameter")
            if self.alpha <= 0.0:
                raise DomainError("alpha must be positive")
        else:
            if not all(np.isfinite(v) for v in (self.b, self.sigma, self.r)):
                raise DomainError("non-finite parameter")

    @property
    def code(self) -> int:
        return _CODES[self.system_id]

    @property
    def pvec(self) -> np.ndarray:
        if self.system_id == "sm":
            return np.array([self.alpha, self.lam, 0.0])
        if self.system_id == "ext_sm":
            return np.array([self.alpha, self.lam, self.B])
        return np.array([self.b, self.sigma, self.r])

    def label(self) -> str:
        if self.system_id == "sm":
            return f"sm(alpha={self.alpha:g}, lam={self.lam:g})"
        if self.system_id == "ext_sm":
            return f"ext_sm(alpha={self.alpha:g}, lam={self.lam:g}, B={self.B:g})"
        return f"lorenz(b={self.b:g}, sigma={self.sigma:g}, r={self.r:g})"


def sm(alpha: float, lam: float) -> SystemParams:
    return SystemParams("sm", alpha=float(alpha), lam=float(lam))


def ext_sm(alpha: float, lam: float, B: float) -> SystemParams:
    return SystemParams("ext_sm", alpha=float(alpha), lam=float(lam), B=float(B))


def lorenz(b: float, sigma: float, r: float) -> SystemParams:
    return SystemParams("lorenz", b=float(b), sigma=float(sigma), r=float(r))


def _check_state(s):
    s = np.asarray(s, dtype=float)
    if s.shape != (3,):
        raise DomainError(f"state must have shape (3,), got {s.shape}")
    if not np.all(np.isfinite(s)):
        raise DomainError("non-finite state")
    return s


def vector_field(p: SystemParams, s) -> np.ndarray:
    """Right-hand side at state s."""
    x, y, z = _check_state(s)
    if p.system_id == "sm":
        return np.array([y, x - p.lam * y - x * z, -p.alpha * z + x * x])
    if p.system_id == "ext_sm":
        return np.array([y, x - p.lam * y - x * z - p.B * x ** 3, -p.alpha * z + x * x])
    return np.array([p.sigma * (y - x), x * (p.r - z) - y, x * y - p.b * z])


def jacobian(p: SystemParams, s) -> np.ndarray:
    x, y, z = _check_state(s)
    if p.system_id == "sm":
        return np.array([
            [0.0, 1.0, 0.0],
            [1.0 - z, -p.lam, -x],
            [2.0 * x, 0.0, -p.alpha],
        ])
    if p.system_id == "ext_sm":
        return np.array([
            [0.0, 1.0, 0.0],
            [1.0 - z - 3.0 * p.B * x * x, -p.lam, -x],
            [2.0 * x, 0.0, -p.alpha],
        ])
    return np.array([
        [-p.sigma, p.sigma, 0.0],
        [p.r - z, -1.0, -x],
        [y, x, -p.b],
    ])


def symmetry_image(s) -> np.ndarray:
    """The involution (x, y, z) -> (-x, -y, z)."""
    s = np.asarray(s, dtype=float)
    return np.array([-s[0], -s[1], s[2]])


@dataclass(frozen=True)
class EquilibriumReport:
    """Equilibrium location with eigen data sorted by descending real
    part (descending imaginary part inside a conjugate pair)."""

    name: str
    location: np.ndarray
    eigenvalues: np.ndarray
    gamma: float
    lambda_s: float
    lambda_ss: float
    saddle_index: float
    a2_condition_holds: bool
    stable: bool


def _char_poly_eigs(J: np.ndarray) -> np.ndarray:
    """Eigenvalues of a 3x3 matrix via its explicit characteristic
    polynomial s^3 + c2 s^2 + c1 s + c0."""
    c2 = -np.trace(J)
    c1 = (J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
          + J[0, 0] * J[2, 2] - J[0, 2] * J[2, 0]
          + J[1, 1] * J[2, 2] - J[1, 2] * J[2, 1])
    c0 = -np.linalg.det(J)
    roots = np.roots([1.0, c2, c1, c0])
    order = np.lexsort((-roots.imag, -roots.real))
    return roots[order]


def _report(name: str, p: SystemParams, loc: np.ndarray) -> EquilibriumReport:
    eigs = _char_poly_eigs(jacobian(p, loc))
    g = eigs[0].real
    ls = eigs[1].real
    lss = eigs[2].real
    real_saddle = (np.all(np.abs(eigs.imag) < 1e-12)
                   and g > 0.0 > ls > lss)
    idx = abs(ls) / g if real_saddle else np.nan
    return EquilibriumReport(
        name=name,
        location=loc,
        eigenvalues=eigs,
        gamma=g,
        lambda_s=ls,
        lambda_ss=lss,
        saddle_index=idx,
        a2_condition_holds=bool(real_saddle),
        stable=bool(np.all(eigs.real < 0.0)),
    )


def equilibria(p: SystemParams) -> list[EquilibriumReport]:
    """Reports for O at the origin and the symmetric pair O+, O-.

    For SM parameters with 0 < 2*alpha < lam + sqrt(lam^2 + 4) the
    origin satisfies gamma > 0 > -alpha > lambda_ss with the z-axis as
    the leading stable direction.
    """
    if p.system_id in ("sm", "ext_sm"):
        o = np.zeros(3)
        if p.system_id == "sm":
            x2 = p.alpha
            z0 = 1.0
        else:
            denom = 1.0 + p.alpha * p.B
            if denom <= 0.0:
                raise DomainError("no symmetric equilibria: 1 + alpha*B <= 0")
            x2 = p.alpha / denom
            z0 = 1.0 / denom
        xs = np.sqrt(x2)
        reports = [
            _report("O", p, o),
            _report("O+", p, np.array([xs, 0.0, z0])),
            _report("O-", p, np.array([-xs, 0.0, z0])),
        ]
        return reports
    # Lorenz
    if p.b * (p.r - 1.0) < 0.0:
        raise DomainError("no symmetric equilibria: b*(r-1) < 0")
    xs = np.sqrt(p.b * (p.r - 1.0))
    return [
        _report("O", p, np.zeros(3)),
        _report("O+", p, np.array([xs, xs, p.r - 1.0])),
        _report("O-", p, np.array([-xs, -xs, p.r - 1.0])),
    ]


def saddle_eigenvalues(alpha: float, lam: float) -> tuple[float, float, float]:
    """Closed-form eigenvalues of the SM origin: gamma and the lesser
    root of s^2 + lam*s - 1 in the (x, y) plane, and -alpha on the
    z-axis.  Returned sorted descending (gamma, lambda_s, lambda_ss)
    under the ordering condition 2*alpha < lam + sqrt(lam^2 + 4)."""
    disc = np.sqrt(lam * lam + 4.0)
    g = 0.5 * (-lam + disc)
    s_minus = 0.5 * (-lam - disc)
    trio = sorted((g, -alpha, s_minus), reverse=True)
    return tuple(trio)


def saddle_index(alpha: float, lam: float) -> float:
    """nu(O) = |leading stable| / unstable = 2*alpha / (sqrt(lam^2+4) - lam)."""
    if alpha <= 0.0:
        raise DomainError("alpha must be positive")
    return 2.0 * alpha / (np.sqrt(lam * lam + 4.0) - lam)


def unstable_eigenvector(alpha: float, lam: float) -> np.ndarray:
    """Unit eigenvector of the SM origin for the unstable eigenvalue
    gamma; oriented toward x > 0."""
    g = 0.5 * (-lam + np.sqrt(lam * lam + 4.0))
    v = np.array([1.0, g, 0.0])
    return v / np.linalg.norm(v)


def saddle_frame(alpha: float, lam: float) -> np.ndarray:
    """Orthonormal tangent frame at the SM origin ordered by descending
    eigenvalue real part: unstable direction, z-axis (-alpha), then the
    strongly-stable planar direction (Gram-Schmidt in that order)."""
    disc = np.sqrt(lam * lam + 4.0)
    g = 0.5 * (-lam + disc)
    s_minus = 0.5 * (-lam - disc)
    e_u = np.array([1.0, g, 0.0])
    e_z = np.array([0.0, 0.0, 1.0])
    e_ss = np.array([1.0, s_minus, 0.0])
    cols = [e_u, e_z, e_ss]
    if -alpha < s_minus:
        # outside the usual ordering the z-axis is the weakest direction
        cols = [e_u, e_ss, e_z]
    Q = np.empty((3, 3))
    for j, c in enumerate(cols):
        v = c.astype(float).copy()
        for i in range(j):
            v -= (Q[:, i] @ v) * Q[:, i]
        Q[:, j] = v / np.linalg.norm(v)
    return Q


def hopf_curve_alpha(lam: float) -> float:
    """Hopf locus of O+-: alpha = (2 - lam^2)/lam, from the imaginary
    pair condition (lam + alpha)*(alpha*lam) = 2*alpha for the cubic
    s^3 + (lam+alpha) s^2 + alpha*lam s + 2*alpha."""
    if lam <= 0.0:
        raise DomainError("lam must be positive")
    if lam >= np.sqrt(2.0):
        raise DomainError("no positive-alpha Hopf point for lam >= sqrt(2)")
    return (2.0 - lam * lam) / lam


def wing_stability_margin(alpha: float, lam: float) -> float:
    """Largest real part over the characteristic roots of O+-.

    The cubic is s^3 + (lam+alpha) s^2 + alpha*lam*s + 2*alpha; the
    margin crosses zero exactly on the Hopf locus, which makes it a
    bracketing residual for the numeric cross-checks below.
    """
    roots = np.roots([1.0, lam + alpha, alpha * lam, 2.0 * alpha])
    return float(np.max(roots.real))


def hopf_alpha_numeric(lam: float, bracket: tuple[float, float] | None = None
                       ) -> float:
    """Hopf alpha at fixed lam from a bracketed scan of the eigenvalue
    margin, independent of the closed form."""
    from scipy.optimize import brentq
    if bracket is None:
        a0 = hopf_curve_alpha(lam)
        bracket = (0.5 * a0, 1.5 * a0)
    return float(brentq(lambda a: wing_stability_margin(a, lam),
                        bracket[0], bracket[1], xtol=1e-13))


def hopf_lambda_numeric(alpha: float, bracket: tuple[float, float] = (0.8, 1.4)
                        ) -> float:
    """Hopf lam at fixed alpha from the same eigenvalue margin."""
    from scipy.optimize import brentq
    return float(brentq(lambda l: wing_stability_margin(alpha, l),
                        bracket[0], bracket[1], xtol=1e-13))


def saddle_index_level_alpha(nu0: float, lam: float) -> float:
    """Level curve nu(O) = nu0 solved for alpha."""
    if lam <= 0.0:
        raise DomainError("lam must be positive")
    if nu0 <= 0.0:
        raise DomainError("nu0 must be positive")
    return 0.5 * nu0 * (np.sqrt(lam * lam + 4.0) - lam)


def analytic_curve(kind: str, lam: float, nu0: float = 1.0) -> float:
    """alpha(lam) for kind 'hopf' or 'saddle_index_level'."""
    if kind == "hopf":
        return hopf_curve_alpha(lam)
    if kind == "saddle_index_level":
        return saddle_index_level_alpha(nu0, lam)
    raise DomainError(f"unknown analytic curve {kind!r}")


def lorenz_to_extended_sm(b: float, sigma: float, r: float) -> SystemParams:
    """Parameter transform (b, sigma, r) -> ext_sm(alpha, lam, B)."""
    q = sigma * (r - 1.0)
    if q <= 0.0:
        raise DomainError("requires sigma*(r - 1) > 0")
    if 2.0 * sigma == b:
        raise DomainError("requires 2*sigma != b")
    sq = np.sqrt(q)
    return ext_sm(alpha=b / sq, lam=(1.0 + sigma) / sq, B=sq / (2.0 * sigma - b))


def lorenz_state_map(b: float, sigma: float, r: float):
    """State and time change taking Lorenz orbits into extended-SM
    orbits: returns (phi, jac_phi, time_scale) where phi maps a Lorenz
    state to the extended-SM state and d(t_lorenz) = time_scale * d(t_new).
    Requires b < 2*sigma so the scaling coefficients are real."""
    q = sigma * (r - 1.0)
    if q <= 0.0:
        raise DomainError("requires sigma*(r - 1) > 0")
    if b >= 2.0 * sigma:
        raise DomainError("state map requires b < 2*sigma")
    root = np.sqrt(sigma - 0.5 * b)
    cx = root / q ** 0.75
    cy = root / q ** 1.25
    cz = sigma / q

    def phi(s):
        x, y, z = np.asarray(s, dtype=float)
        return np.array([cx * x, cy * sigma * (y - x), cz * (z - x * x / (2.0 * sigma))])

    def jac_phi(s):
        x = float(np.asarray(s, dtype=float)[0])
        return np.array([
            [cx, 0.0, 0.0],
            [-cy * sigma, cy * sigma, 0.0],
            [-cz * x / sigma, 0.0, cz],
        ])

    return phi, jac_phi, 1.0 / np.sqrt(q)
