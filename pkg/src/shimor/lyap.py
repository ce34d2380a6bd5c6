"""Lyapunov spectra and covariant Lyapunov vectors.

The spectrum uses the classical tangent-frame scheme: integrate the
variational equations alongside the state and re-orthonormalize
(modified Gram-Schmidt) every ``renorm_interval`` time units,
accumulating log norms.

Covariant vectors use the forward-QR / backward-triangular method: a
forward pass stores per-frame Q and R factors, a backward pass iterates
coefficient matrices C_{k-1} = normalize(R_k^{-1} C_k); the covariant
vectors are Q_k C_k.  Long runs fall back to bounded-memory segment
replay: the forward pass keeps only periodic integrator checkpoints and
each segment is re-integrated during the backward sweep.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels as k
from .dynsys import SystemParams, _check_state
from .errors import DomainError, EscapeError, ConvergenceError
from .integrate import (IntegratorConfig, DEFAULT_CONFIG, SectionSpec,
                        _buffers, _STATUS_NAMES)

_BIG = 2 ** 62


@dataclass
class LyapunovSpectrum:
    exponents: np.ndarray        # descending
    T_total: float
    renorm_interval: float
    convergence_history: np.ndarray  # rows (t, L1, L2, L3)
    error_bar: np.ndarray
    converged: bool
    status: str

    @property
    def L1(self):
        return float(self.exponents[0])

    @property
    def L2(self):
        return float(self.exponents[1])

    @property
    def L3(self):
        return float(self.exponents[2])


def lyapunov_spectrum(p: SystemParams, s0, T: float = 1e4,
                      renorm_interval: float = 0.5, transient: float = 1e3,
                      cfg: IntegratorConfig = DEFAULT_CONFIG,
                      history_points: int = 200, conv_tol: float = 0.02,
                      q0: np.ndarray | None = None,
                      deadline: float | None = None) -> LyapunovSpectrum:
    """Benettin spectrum over accumulation time T after discarding the
    transient.  Escape anywhere raises EscapeError; an oscillating tail
    only clears the ``converged`` flag."""
    s0 = _check_state(s0)
    if T < 10 * renorm_interval:
        raise DomainError("T too short for the renormalization interval")
    # runs short enough to fit one kernel chunk would otherwise never
    # look at the clock
    if deadline is not None and time.monotonic() > deadline:
        raise ConvergenceError("deadline exceeded in lyapunov_spectrum")
    y = np.empty(12)
    y[:3] = s0
    Q = np.eye(3) if q0 is None else np.asarray(q0, dtype=float)
    y[3:] = Q.T.ravel()
    bufs = _buffers(12)
    t, h = 0.0, cfg.h0

    n_tr = int(round(transient / renorm_interval))
    n_acc = int(round(T / renorm_interval))
    lognorms = np.empty((n_tr + n_acc, 3))
    w = 0
    status = k.OK_TEND
    while w < n_tr + n_acc:
        status, t, h, w, _ = k._benettin(
            p.code, p.pvec, y, 0.0, w, n_tr + n_acc, t, h, renorm_interval,
            cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.escape_radius ** 2,
            5_000_000, lognorms, *bufs)
        if status == k.BUDGET:
            if deadline is not None and time.monotonic() > deadline:
                raise ConvergenceError("deadline exceeded in lyapunov_spectrum")
            continue
        break
    if status == k.ESCAPE:
        raise EscapeError(f"orbit escaped during spectrum run at t = {t:.6g} ({p.label()})")
    if status != k.OK_TEND:
        raise ConvergenceError(f"spectrum integration failed: {_STATUS_NAMES[status]}")

    acc = lognorms[n_tr:]
    csum = np.cumsum(acc, axis=0)
    times = (np.arange(1, n_acc + 1)) * renorm_interval
    stride = max(1, n_acc // history_points)
    idx = np.arange(stride - 1, n_acc, stride)
    history = np.column_stack((times[idx], csum[idx] / times[idx, None]))
    exponents = csum[-1] / times[-1]

    tail = history[history[:, 0] >= 0.75 * times[-1], 1:]
    error_bar = np.abs(tail - exponents).max(axis=0) if tail.size else np.full(3, np.nan)
    half = csum[n_acc // 2 - 1] / times[n_acc // 2 - 1] if n_acc >= 2 else exponents
    converged = bool(np.all(np.abs(half - exponents) < conv_tol))
    return LyapunovSpectrum(
        exponents=exponents, T_total=float(times[-1]),
        renorm_interval=renorm_interval, convergence_history=history,
        error_bar=error_bar, converged=converged, status="completed")


@dataclass
class ClvFrame:
    t: float
    point: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    V3: np.ndarray
    n_cu: np.ndarray


@dataclass
class ClvRun:
    """Covariant-vector frames inside the retained window.

    V[i] has the covariant vectors as columns (V1, V2, V3); n_cu is the
    unit normal of span(V1, V2) oriented along V1 x V2; q1 is the
    leading forward-orthonormalization vector kept for diagnostics;
    lognorm3 holds per-frame backward renormalization logs of the V3
    coefficient column (their negated sum over elapsed time estimates
    the third exponent).
    """

    t: np.ndarray
    points: np.ndarray
    V: np.ndarray
    n_cu: np.ndarray
    q1: np.ndarray
    lognorm3: np.ndarray
    dropped: int
    n_raw_frames: int
    spectrum_estimate: np.ndarray

    def frames(self):
        for i in range(self.t.size):
            yield ClvFrame(t=float(self.t[i]), point=self.points[i],
                           V1=self.V[i, :, 0], V2=self.V[i, :, 1],
                           V3=self.V[i, :, 2], n_cu=self.n_cu[i])

    def __len__(self):
        return self.t.size


def _run_forward_segment(p, y, t, h, t_stop, mode, t_base, w_next, t_last_qr,
                         renorm_interval, max_window, sec_args, cfg, bufs, cap):
    """One kernel sweep filling fresh frame arrays until t_stop or
    capacity.  Returns (status, state tuple, frame arrays, n)."""
    out_t = np.empty(cap)
    out_pt = np.empty((cap, 3))
    out_Q = np.empty((cap, 3, 3))
    out_R = np.empty((cap, 3, 3))
    out_emit = np.zeros(cap, dtype=np.int64)
    ev_kind, ev_value, ev_dir, ev_pred = sec_args
    status, t, h, w_next, t_last_qr, n, _ = k._clv_forward(
        p.code, p.pvec, y, t, h, t_stop,
        mode, t_base, w_next, renorm_interval, max_window, t_last_qr,
        ev_kind, ev_value, ev_dir, ev_pred,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.escape_radius ** 2, _BIG,
        out_t, out_pt, out_Q, out_R, out_emit, 0,
        *bufs)
    return status, (t, h, w_next, t_last_qr), (out_t, out_pt, out_Q, out_R, out_emit), n


def covariant_vectors(p: SystemParams, s0, T: float,
                      transient_fwd: float = 1e3, transient_bwd: float = 1e3,
                      cfg: IntegratorConfig = DEFAULT_CONFIG,
                      frame_mode: str = "section",
                      section: SectionSpec = SectionSpec(kind="plane_z", value=1.0,
                                                         direction="both"),
                      renorm_interval: float = 0.5, max_window: float = 5.0,
                      q0: np.ndarray | None = None,
                      max_frames_in_memory: int = 400_000,
                      deadline: float | None = None) -> ClvRun:
    """Covariant vectors along the orbit from s0 over [0, T]; frames are
    retained on [transient_fwd, T - transient_bwd].

    frame_mode 'section' places orthonormalization boundaries at the
    crossings of ``section`` (with forced intermediate boundaries every
    max_window time units, not emitted); 'stride' uses a uniform
    renorm_interval grid and emits every boundary.

    q0 may pin the initial orthonormal frame (e.g. the saddle frame when
    starting on a separatrix, which removes the forward transient).
    """
    s0 = _check_state(s0)
    if frame_mode not in ("section", "stride"):
        raise DomainError(f"unknown frame_mode {frame_mode!r}")
    if T <= transient_fwd + transient_bwd:
        raise DomainError("T must exceed the two transients")
    mode = 1 if frame_mode == "section" else 0
    y = np.empty(12)
    y[:3] = s0
    Q = np.eye(3) if q0 is None else np.asarray(q0, dtype=float)
    y[3:] = Q.T.ravel()
    bufs = _buffers(12)
    sec_args = section.ev_args
    t, h = 0.0, cfg.h0
    w_next, t_last_qr = 0, 0.0

    # forward pass in segments
    seg_cap = max_frames_in_memory
    checkpoints = [(y.copy(), t, h, w_next, t_last_qr)]
    seg_counts = []
    seg_arrays = None  # kept only if everything fits in one segment
    while True:
        status, state, arrays, n = _run_forward_segment(
            p, y, t, h, T, mode, 0.0, w_next, t_last_qr,
            renorm_interval, max_window, sec_args, cfg, bufs, seg_cap)
        t, h, w_next, t_last_qr = state
        if status == k.ESCAPE:
            raise EscapeError(f"orbit escaped during CLV run at t = {t:.6g} ({p.label()})")
        if status not in (k.OK_TEND, k.FULL):
            raise ConvergenceError(f"CLV forward pass failed: {_STATUS_NAMES[status]}")
        seg_counts.append(n)
        if status == k.OK_TEND:
            seg_arrays = arrays if len(seg_counts) == 1 else None
            break
        checkpoints.append((y.copy(), t, h, w_next, t_last_qr))
        seg_arrays = None
        if deadline is not None and time.monotonic() > deadline:
            raise ConvergenceError("deadline exceeded in covariant_vectors forward pass")
    n_segments = len(seg_counts)
    n_total = int(sum(seg_counts))
    if n_total < 4:
        raise ConvergenceError("CLV run produced too few frames")

    # backward pass, last segment first
    C = np.eye(3)
    dropped = 0
    t_lo, t_hi = transient_fwd, T - transient_bwd
    kept = []  # per segment: (t, pt, V, n_cu, q1, lognorm3) already masked
    sumlog = np.zeros(3)
    t_last_raw = 0.0
    seam_log = np.nan  # lognorm of the step landing on a segment's last frame
    for j in range(n_segments - 1, -1, -1):
        if seg_arrays is not None and j == 0:
            out_t, out_pt, out_Q, out_R, out_emit = seg_arrays
            n = seg_counts[0]
        else:
            y_ck, t_ck, h_ck, w_ck, tq_ck = checkpoints[j]
            y_re = y_ck.copy()
            _, _, arrays, n = _run_forward_segment(
                p, y_re, t_ck, h_ck, T, mode, 0.0, w_ck, tq_ck,
                renorm_interval, max_window, sec_args, cfg, bufs, seg_cap)
            assert n == seg_counts[j]
            out_t, out_pt, out_Q, out_R, out_emit = arrays
        if j == n_segments - 1:
            t_last_raw = out_t[n - 1]
        sumlog += np.log(np.abs(np.diagonal(out_R[:n], axis1=1, axis2=2))).sum(axis=0)
        Vcoef = np.empty((n, 3, 3))
        lognorm3 = np.full(n, np.nan)
        Vcoef[n - 1] = C
        if j < n_segments - 1:
            # the step landing here was taken while processing the next
            # segment (its first R factor); reattach its renorm log
            lognorm3[n - 1] = seam_log
        dropped += int(k._clv_backward(out_R[:n], C, Vcoef, lognorm3, n - 1, 0))
        # cross-boundary transition into the previous segment using this
        # segment's first R factor (which maps the previous frame here);
        # routed through the same kernel step so replay stays bitwise
        # identical to the single-segment path
        if j > 0:
            tmp_V = np.empty((1, 3, 3))
            tmp_l = np.empty(1)
            if k._clv_backward(out_R[0:1], C, tmp_V, tmp_l, 0, -1):
                raise ConvergenceError("degenerate coefficients at segment boundary")
            seam_log = float(tmp_l[0])
        sel = (out_emit[:n] == 1) & (out_t[:n] >= t_lo) & (out_t[:n] <= t_hi)
        # the last frame's coefficients are the arbitrary backward seed;
        # normally outside the retained window, but guard anyway
        if j == n_segments - 1:
            sel[n - 1] = False
        good = ~np.isnan(Vcoef[:, 0, 0])
        dropped += int(np.count_nonzero(sel & ~good))
        sel &= good
        if np.any(sel):
            Qsel = out_Q[:n][sel]
            V = np.einsum("kij,kjl->kil", Qsel, Vcoef[sel])
            V /= np.linalg.norm(V, axis=1, keepdims=True)
            cross = np.cross(V[:, :, 0], V[:, :, 1], axis=1)
            q3 = Qsel[:, :, 2]
            sgn = np.where(np.einsum("ki,ki->k", cross, q3) >= 0.0, 1.0, -1.0)
            n_cu = q3 * sgn[:, None]
            kept.append((out_t[:n][sel], out_pt[:n][sel], V, n_cu,
                         Qsel[:, :, 0], lognorm3[sel]))
    kept.reverse()
    if not kept:
        raise ConvergenceError("no CLV frames inside the retained window")
    t_arr = np.concatenate([kk[0] for kk in kept])
    pts = np.concatenate([kk[1] for kk in kept])
    V = np.concatenate([kk[2] for kk in kept])
    n_cu = np.concatenate([kk[3] for kk in kept])
    q1 = np.concatenate([kk[4] for kk in kept])
    ln3 = np.concatenate([kk[5] for kk in kept])
    order = np.argsort(t_arr, kind="stable")
    spectrum_estimate = sumlog / t_last_raw
    return ClvRun(t=t_arr[order], points=pts[order], V=V[order], n_cu=n_cu[order],
                  q1=q1[order], lognorm3=ln3[order], dropped=dropped,
                  n_raw_frames=n_total, spectrum_estimate=spectrum_estimate)


def push_tangent(p: SystemParams, point, v, dt: float,
                 cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Push one tangent vector along the flow for time dt (variational
    integration); the image is NOT normalized."""
    point = _check_state(point)
    y = np.empty(12)
    y[:3] = point
    v = np.asarray(v, dtype=float)
    y[3:6] = v
    y[6:9] = (0.0, 1.0, 0.0)
    y[9:12] = (0.0, 0.0, 1.0)
    bufs = _buffers(12)
    status, t, hh, _, _, _ = k._advance(
        p.code, p.pvec, 1.0, 12, y, 0.0, cfg.h0, dt,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        -1, 0.0, 0, 0, 0.0,
        cfg.escape_radius ** 2, 0.0, 0.0, _BIG,
        *bufs)
    if status != k.OK_TEND:
        raise ConvergenceError(f"push_tangent failed: {_STATUS_NAMES[status]}")
    return y[3:6].copy()
