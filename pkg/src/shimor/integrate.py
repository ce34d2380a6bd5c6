"""Adaptive integration wrappers: trajectories, section events,
separatrix seeding, arc-length skipping.

All heavy stepping happens in ``_kernels``; this module owns buffer
management, chunked execution against wall-clock deadlines, and the
small result containers used downstream.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as k
from .dynsys import SystemParams, unstable_eigenvector, _check_state
from .errors import DomainError, EscapeError, ConvergenceError

_STATUS_NAMES = {
    k.OK_TEND: "completed",
    k.EVENT: "event",
    k.ESCAPE: "escape",
    k.UNDERFLOW: "step_underflow",
    k.BUDGET: "budget",
    k.ARC: "arc_target",
    k.NONFINITE: "non_finite",
    k.FULL: "full",
}

_EV_KINDS = {"plane_z": 0, "plane_y0": 1, "z_local_max": 2}
_EV_DIRS = {"up": 1, "down": -1, "both": 0}
_EV_PREDS = {"none": 0, "zdot_pos": 1, "zdot_neg": 2}

# steps per kernel call between deadline checks
_CHUNK_STEPS = 2_000_000


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and guards for the embedded RK5(4) stepper."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.25
    escape_radius: float = 1e3
    h0: float = 1e-3

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_step <= 0 or self.escape_radius <= 0:
            raise DomainError("max_step and escape_radius must be positive")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class SectionSpec:
    """Cross-section description.

    kind: 'plane_z' (g = z - value), 'plane_y0' (g = y), or
    'z_local_max' (g = zdot).  direction filters the sign of dg/dt at
    the crossing; predicate optionally requires zdot > 0 or < 0 there.
    """

    kind: str = "plane_z"
    value: float = 1.0
    direction: str = "both"
    predicate: str = "none"

    def __post_init__(self):
        if self.kind not in _EV_KINDS:
            raise DomainError(f"unknown section kind {self.kind!r}")
        if self.direction not in _EV_DIRS:
            raise DomainError(f"unknown direction {self.direction!r}")
        if self.predicate not in _EV_PREDS:
            raise DomainError(f"unknown predicate {self.predicate!r}")

    @property
    def ev_args(self) -> tuple[int, float, int, int]:
        return (_EV_KINDS[self.kind], float(self.value),
                _EV_DIRS[self.direction], _EV_PREDS[self.predicate])


@dataclass
class TrajectorySample:
    """Dense-sampled orbit; states has one row per entry of t."""

    t: np.ndarray
    states: np.ndarray
    status: str
    final_state: np.ndarray
    final_time: float


@dataclass
class CrossingEvent:
    t: float
    state: np.ndarray
    direction_sign: int
    g_residual: float


def _buffers(n: int):
    return (np.empty((7, n)), np.empty((5, n)), np.empty(n), np.empty(n), np.empty(n))


class _Deadline:
    def __init__(self, deadline):
        self.deadline = deadline

    def expired(self) -> bool:
        return self.deadline is not None and time.monotonic() > self.deadline


def integrate(p: SystemParams, s0, T: float, cfg: IntegratorConfig = DEFAULT_CONFIG,
              sample_dt: float = 0.1, deadline: float | None = None,
              with_tangent: np.ndarray | None = None) -> TrajectorySample:
    """Integrate for time T, sampling the state every sample_dt.

    with_tangent, if given, is a 3x3 matrix of tangent columns carried
    along (samples then have 12 columns).  Escape and step failures end
    the run early with the corresponding status.
    """
    s0 = _check_state(s0)
    if T <= 0:
        raise DomainError("T must be positive")
    n = 3 if with_tangent is None else 12
    y = np.empty(n)
    y[:3] = s0
    if with_tangent is not None:
        y[3:] = np.asarray(with_tangent, dtype=float).T.ravel()
    ts = np.arange(1, int(np.floor(T / sample_dt)) + 1) * sample_dt
    ts = np.concatenate(([0.0], ts))
    out = np.empty((ts.size, n))
    out[0] = y
    K, rc, ytmp, ynew, yev = _buffers(n)
    t, h = 0.0, cfg.h0
    idx = 1
    dl = _Deadline(deadline)
    status = k.OK_TEND
    while idx < ts.size:
        status, t, h, idx, _ = k._sample_path(
            p.code, p.pvec, 1.0, n, y, t, h, ts, out, idx,
            cfg.rel_tol, cfg.abs_tol, cfg.max_step,
            cfg.escape_radius ** 2, _CHUNK_STEPS,
            K, rc, ytmp, ynew, yev)
        if status == k.BUDGET:
            if dl.expired():
                break
            continue
        break
    out = out[:idx]
    ts = ts[:idx]
    return TrajectorySample(
        t=ts, states=out, status=_STATUS_NAMES[status],
        final_state=y[:3].copy(), final_time=t)


def detect_crossings(p: SystemParams, s0, section: SectionSpec, T: float,
                     cfg: IntegratorConfig = DEFAULT_CONFIG,
                     n_max: int = 100_000, t_skip: float = 0.0,
                     deadline: float | None = None) -> list[CrossingEvent]:
    """Section crossings of the orbit from s0 over [0, T].

    Crossings are refined on the step's dense output; the g-residual of
    each returned event is below 1e-10.  Crossings before t_skip are
    discarded.  Escape raises EscapeError.
    """
    s0 = _check_state(s0)
    y = s0.copy()
    ev_kind, ev_value, ev_dir, ev_pred = section.ev_args
    K, rc, ytmp, ynew, yev = _buffers(3)
    out_t = np.empty(n_max)
    out_state = np.empty((n_max, 3))
    out_dir = np.empty(n_max)
    t, h = 0.0, cfg.h0
    n_have = 0
    dl = _Deadline(deadline)
    while True:
        status, t, h, n_have, _ = k._crossings(
            p.code, p.pvec, 3, y, t, h, T, n_max,
            ev_kind, ev_value, ev_dir, ev_pred,
            cfg.rel_tol, cfg.abs_tol, cfg.max_step,
            cfg.escape_radius ** 2, _CHUNK_STEPS,
            out_t, out_state, out_dir, n_have,
            K, rc, ytmp, ynew, yev)
        if status == k.BUDGET and not dl.expired():
            continue
        break
    if status == k.ESCAPE:
        raise EscapeError(
            f"orbit escaped |s| > {cfg.escape_radius:g} at t = {t:.6g} ({p.label()})")
    if status in (k.UNDERFLOW, k.NONFINITE):
        raise ConvergenceError(f"integration failed ({_STATUS_NAMES[status]}) at t = {t:.6g}")
    events = []
    for i in range(n_have):
        if out_t[i] < t_skip:
            continue
        st = out_state[i]
        g = _g_residual(p, section, st)
        events.append(CrossingEvent(t=float(out_t[i]), state=st.copy(),
                                    direction_sign=int(out_dir[i]), g_residual=g))
    return events


def _g_residual(p: SystemParams, section: SectionSpec, state) -> float:
    x, y, z = state
    if section.kind == "plane_z":
        return float(z - section.value)
    if section.kind == "plane_y0":
        return float(y)
    if p.system_id == "lorenz":
        return float(x * y - p.b * z)
    return float(-p.alpha * z + x * x)


def separatrix_seed(p: SystemParams, branch: str = "plus", eps: float = 1e-6) -> np.ndarray:
    """Seed point on the 1D unstable separatrix of the origin, at
    distance eps along the unstable eigenvector (branch 'plus' toward
    x > 0, 'minus' its symmetric image)."""
    if p.system_id not in ("sm", "ext_sm"):
        raise DomainError("separatrix seeding is defined for the SM families")
    if eps <= 0:
        raise DomainError("eps must be positive")
    v = unstable_eigenvector(p.alpha, p.lam)
    if branch == "plus":
        return eps * v
    if branch == "minus":
        return -eps * v
    raise DomainError(f"unknown branch {branch!r}")


def advance_to_arc_length(p: SystemParams, s0, arc: float,
                          cfg: IntegratorConfig = DEFAULT_CONFIG,
                          t_max: float = 1e4) -> tuple[np.ndarray, float]:
    """Advance until the accumulated arc length reaches ``arc``;
    returns (state, time).  Used to skip the slow initial crawl of a
    separatrix away from the saddle."""
    s0 = _check_state(s0)
    if arc <= 0:
        raise DomainError("arc must be positive")
    y = s0.copy()
    K, rc, ytmp, ynew, yev = _buffers(3)
    status, t, h, a, _, _ = k._advance(
        p.code, p.pvec, 1.0, 3, y, 0.0, cfg.h0, t_max,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        -1, 0.0, 0, 0, 0.0,
        cfg.escape_radius ** 2, arc, 0.0,
        2 ** 62,
        K, rc, ytmp, ynew, yev)
    if status == k.ESCAPE:
        raise EscapeError(f"orbit escaped before reaching arc length {arc:g}")
    if status != k.ARC:
        raise ConvergenceError(
            f"arc length {arc:g} not reached by t = {t_max:g} ({_STATUS_NAMES[status]})")
    return y, t
