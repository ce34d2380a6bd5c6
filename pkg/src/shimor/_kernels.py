"""Compiled numerical kernels.

Plain array code, one source for both backends (see ``_accel``).  The
integrator is an embedded Dormand-Prince 5(4) pair with the standard
quartic dense-output polynomial; events are located by scanning the
dense output inside accepted steps and bisecting.

Layout conventions used throughout:
  * the phase state is y[0:3]; tangent vectors, when present, are
    y[3:6], y[6:9], y[9:12] (n == 3 or n == 12),
  * system codes: 0 = Shimizu-Morioka, 1 = extended SM (cubic term),
    2 = Lorenz; pv is a length-3 parameter vector
    (alpha, lambda, -) / (alpha, lambda, B) / (b, sigma, r).
"""

import math

import numpy as np

from ._accel import njit

SM_CODE = 0
EXT_CODE = 1
LOR_CODE = 2

# _advance return codes
OK_TEND = 0
EVENT = 1
ESCAPE = 2
UNDERFLOW = 3
BUDGET = 4
ARC = 5
NONFINITE = 6
FULL = 7

# kneading terminations
KN_DONE = 0
KN_ESCAPE = 1
KN_CAPTURE = 2
KN_TIME = 3
KN_BUDGET = 4
KN_FAIL = 5

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0
# dense-output weights (Hairer's CONTD5)
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0

_EVENT_GTOL = 1e-12
_NSUB = 8  # dense sub-intervals scanned for sign changes


@njit
def _rhs(code, pv, fsign, y, out, n):
    x = y[0]
    yy = y[1]
    z = y[2]
    if code == 0:
        al = pv[0]
        lm = pv[1]
        fx = yy
        fy = x - lm * yy - x * z
        fz = -al * z + x * x
    elif code == 1:
        al = pv[0]
        lm = pv[1]
        bb = pv[2]
        fx = yy
        fy = x - lm * yy - x * z - bb * x * x * x
        fz = -al * z + x * x
    else:
        b = pv[0]
        sg = pv[1]
        r = pv[2]
        fx = sg * (yy - x)
        fy = x * (r - z) - yy
        fz = x * yy - b * z
    out[0] = fsign * fx
    out[1] = fsign * fy
    out[2] = fsign * fz
    if n == 12:
        if code == 0:
            al = pv[0]
            lm = pv[1]
            j00 = 0.0
            j01 = 1.0
            j02 = 0.0
            j10 = 1.0 - z
            j11 = -lm
            j12 = -x
            j20 = 2.0 * x
            j21 = 0.0
            j22 = -al
        elif code == 1:
            al = pv[0]
            lm = pv[1]
            bb = pv[2]
            j00 = 0.0
            j01 = 1.0
            j02 = 0.0
            j10 = 1.0 - z - 3.0 * bb * x * x
            j11 = -lm
            j12 = -x
            j20 = 2.0 * x
            j21 = 0.0
            j22 = -al
        else:
            b = pv[0]
            sg = pv[1]
            r = pv[2]
            j00 = -sg
            j01 = sg
            j02 = 0.0
            j10 = r - z
            j11 = -1.0
            j12 = -x
            j20 = yy
            j21 = x
            j22 = -b
        for k in range(3):
            o = 3 + 3 * k
            vx = y[o]
            vy = y[o + 1]
            vz = y[o + 2]
            out[o] = fsign * (j00 * vx + j01 * vy + j02 * vz)
            out[o + 1] = fsign * (j10 * vx + j11 * vy + j12 * vz)
            out[o + 2] = fsign * (j20 * vx + j21 * vy + j22 * vz)


@njit
def _zdot(code, pv, y):
    if code == 2:
        return y[0] * y[1] - pv[0] * y[2]
    return -pv[0] * y[2] + y[0] * y[0]


@njit
def _gval(code, pv, ev_kind, ev_value, y):
    # 0: z - c, 1: y, 2: zdot
    if ev_kind == 0:
        return y[2] - ev_value
    elif ev_kind == 1:
        return y[1]
    else:
        return _zdot(code, pv, y)


@njit
def _pred_ok(code, pv, ev_pred, y):
    # 0: none, 1: zdot > 0, 2: zdot < 0
    if ev_pred == 0:
        return True
    zd = _zdot(code, pv, y)
    if ev_pred == 1:
        return zd > 0.0
    return zd < 0.0


@njit
def _dense(rc, n, theta, out):
    th1 = 1.0 - theta
    for i in range(n):
        out[i] = rc[0, i] + theta * (
            rc[1, i] + th1 * (rc[2, i] + theta * (rc[3, i] + th1 * rc[4, i]))
        )


@njit
def _advance(code, pv, fsign, n, y, t, h, t_end,
             rtol, atol, max_step,
             ev_kind, ev_value, ev_dir, ev_pred, t_ev_min,
             escape_sq, arc_target, arc0,
             max_steps,
             K, rc, ytmp, ynew, yev):
    """Advance y from t toward t_end, stopping early on the first
    matching section event, escape, or arc-length target.

    Returns (status, t, h, arc, steps_used, event_dirsign).  y is
    updated in place; on EVENT it holds the refined crossing state, on
    NONFINITE/UNDERFLOW it holds the last accepted state.
    """
    arc = arc0
    steps = 0
    dirsign = 0.0
    eps_end = 1e-12 * max(1.0, abs(t_end))
    have_k0 = False
    while True:
        if t_end - t <= eps_end:
            return OK_TEND, t, h, arc, steps, dirsign
        if steps >= max_steps:
            return BUDGET, t, h, arc, steps, dirsign
        if not have_k0:
            _rhs(code, pv, fsign, y, K[0], n)
            have_k0 = True
        if h > max_step:
            h = max_step
        hs = h
        clipped = False
        if t + hs >= t_end:
            hs = t_end - t
            clipped = True
        # stages 2..7 (FSAL: K[6] becomes next step's K[0])
        for i in range(n):
            ytmp[i] = y[i] + hs * _A21 * K[0, i]
        _rhs(code, pv, fsign, ytmp, K[1], n)
        for i in range(n):
            ytmp[i] = y[i] + hs * (_A31 * K[0, i] + _A32 * K[1, i])
        _rhs(code, pv, fsign, ytmp, K[2], n)
        for i in range(n):
            ytmp[i] = y[i] + hs * (_A41 * K[0, i] + _A42 * K[1, i] + _A43 * K[2, i])
        _rhs(code, pv, fsign, ytmp, K[3], n)
        for i in range(n):
            ytmp[i] = y[i] + hs * (_A51 * K[0, i] + _A52 * K[1, i]
                                   + _A53 * K[2, i] + _A54 * K[3, i])
        _rhs(code, pv, fsign, ytmp, K[4], n)
        for i in range(n):
            ytmp[i] = y[i] + hs * (_A61 * K[0, i] + _A62 * K[1, i] + _A63 * K[2, i]
                                   + _A64 * K[3, i] + _A65 * K[4, i])
        _rhs(code, pv, fsign, ytmp, K[5], n)
        for i in range(n):
            ynew[i] = y[i] + hs * (_B1 * K[0, i] + _B3 * K[2, i] + _B4 * K[3, i]
                                   + _B5 * K[4, i] + _B6 * K[5, i])
        _rhs(code, pv, fsign, ynew, K[6], n)
        steps += 1
        err = 0.0
        bad = False
        for i in range(n):
            if not math.isfinite(ynew[i]):
                bad = True
                break
            e = hs * (_E1 * K[0, i] + _E3 * K[2, i] + _E4 * K[3, i]
                      + _E5 * K[4, i] + _E6 * K[5, i] + _E7 * K[6, i])
            ay = abs(y[i])
            an = abs(ynew[i])
            sc = atol + rtol * (ay if ay > an else an)
            e = e / sc
            err += e * e
        if not bad:
            err = math.sqrt(err / n)
            if not math.isfinite(err):
                bad = True
        if bad:
            if hs <= 1e-13 * max(1.0, abs(t)):
                return NONFINITE, t, h, arc, steps, dirsign
            h = hs * 0.1
            continue
        if err > 1.0:
            fac = 0.9 * err ** -0.2
            if fac < 0.1:
                fac = 0.1
            h = hs * fac
            if h < 1e-13 * max(1.0, abs(t)):
                return UNDERFLOW, t, h, arc, steps, dirsign
            continue
        # accepted: dense coefficients over [t, t+hs]
        for i in range(n):
            ydiff = ynew[i] - y[i]
            bspl = hs * K[0, i] - ydiff
            rc[0, i] = y[i]
            rc[1, i] = ydiff
            rc[2, i] = bspl
            rc[3, i] = ydiff - hs * K[6, i] - bspl
            rc[4, i] = hs * (_D1 * K[0, i] + _D3 * K[2, i] + _D4 * K[3, i]
                             + _D5 * K[4, i] + _D6 * K[5, i] + _D7 * K[6, i])
        if err == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * err ** -0.2
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
        hnext = hs * fac
        # arc-length target (used without events)
        if arc_target > 0.0 and ev_kind < 0:
            dx = ynew[0] - y[0]
            dy = ynew[1] - y[1]
            dz = ynew[2] - y[2]
            chord = math.sqrt(dx * dx + dy * dy + dz * dz)
            if arc + chord >= arc_target:
                th = (arc_target - arc) / chord if chord > 0.0 else 1.0
                for _ in range(2):
                    _dense(rc, n, th, yev)
                    dx = yev[0] - y[0]
                    dy = yev[1] - y[1]
                    dz = yev[2] - y[2]
                    c2 = math.sqrt(dx * dx + dy * dy + dz * dz)
                    if c2 > 0.0:
                        th = th * (arc_target - arc) / c2
                        if th > 1.0:
                            th = 1.0
                _dense(rc, n, th, yev)
                for i in range(n):
                    y[i] = yev[i]
                return ARC, t + th * hs, hnext, arc_target, steps, dirsign
            arc += chord
        # event scan over dense sub-intervals
        if ev_kind >= 0:
            g_prev = _gval(code, pv, ev_kind, ev_value, y)
            th_prev = 0.0
            for j in range(1, _NSUB + 1):
                th_j = j / _NSUB
                if j == _NSUB:
                    for i in range(n):
                        yev[i] = ynew[i]
                else:
                    _dense(rc, n, th_j, yev)
                g_j = _gval(code, pv, ev_kind, ev_value, yev)
                crossed = (g_prev < 0.0 and g_j > 0.0) or (g_prev > 0.0 and g_j < 0.0) \
                    or (g_prev == 0.0 and g_j != 0.0 and th_prev > 0.0)
                if crossed:
                    d = 1.0 if g_j > g_prev else -1.0
                    if ev_dir == 0 or (ev_dir > 0 and d > 0.0) or (ev_dir < 0 and d < 0.0):
                        ta = th_prev
                        tb = th_j
                        ga = g_prev
                        tm = tb
                        for _ in range(90):
                            tm = 0.5 * (ta + tb)
                            _dense(rc, n, tm, yev)
                            gm = _gval(code, pv, ev_kind, ev_value, yev)
                            if abs(gm) < _EVENT_GTOL or (tb - ta) < 1e-16:
                                break
                            if (ga < 0.0 and gm < 0.0) or (ga > 0.0 and gm > 0.0):
                                ta = tm
                                ga = gm
                            else:
                                tb = tm
                        _dense(rc, n, tm, yev)
                        t_star = t + tm * hs
                        if t_star > t_ev_min and _pred_ok(code, pv, ev_pred, yev):
                            for i in range(n):
                                y[i] = yev[i]
                            return EVENT, t_star, hnext, arc, steps, d
                g_prev = g_j
                th_prev = th_j
        # commit the full step
        for i in range(n):
            y[i] = ynew[i]
        t = t_end if clipped else t + hs
        rsq = y[0] * y[0] + y[1] * y[1] + y[2] * y[2]
        if rsq > escape_sq:
            return ESCAPE, t, hnext, arc, steps, dirsign
        h = hnext
        for i in range(n):
            K[0, i] = K[6, i]


@njit
def _sample_path(code, pv, fsign, n, y, t, h, ts, out, start_idx,
                 rtol, atol, max_step, escape_sq, max_steps,
                 K, rc, ytmp, ynew, yev):
    """Land exactly on each requested time in ts (from start_idx on) and
    record y[:n].  Returns (status, t, h, next_idx, steps)."""
    steps_total = 0
    i = start_idx
    while i < ts.size:
        st, t, h, _, su, _ = _advance(
            code, pv, fsign, n, y, t, h, ts[i],
            rtol, atol, max_step,
            -1, 0.0, 0, 0, 0.0,
            escape_sq, 0.0, 0.0,
            max_steps - steps_total,
            K, rc, ytmp, ynew, yev)
        steps_total += su
        if st != OK_TEND:
            return st, t, h, i, steps_total
        for k in range(n):
            out[i, k] = y[k]
        i += 1
    return OK_TEND, t, h, i, steps_total


@njit
def _crossings(code, pv, n, y, t, h, t_max, n_want,
               ev_kind, ev_value, ev_dir, ev_pred,
               rtol, atol, max_step, escape_sq, max_steps,
               out_t, out_state, out_dir, n_have,
               K, rc, ytmp, ynew, yev):
    """Collect section crossings.  Returns (status, t, h, n_have, steps);
    status is OK_TEND when t_max was reached first, FULL when n_want
    crossings were recorded."""
    steps_total = 0
    while n_have < n_want:
        st, t, h, _, su, d = _advance(
            code, pv, 1.0, n, y, t, h, t_max,
            rtol, atol, max_step,
            ev_kind, ev_value, ev_dir, ev_pred, t + 1e-9,
            escape_sq, 0.0, 0.0,
            max_steps - steps_total,
            K, rc, ytmp, ynew, yev)
        steps_total += su
        if st != EVENT:
            return st, t, h, n_have, steps_total
        out_t[n_have] = t
        for k in range(n):
            out_state[n_have, k] = y[k]
        out_dir[n_have] = d
        n_have += 1
    return FULL, t, h, n_have, steps_total


@njit
def _mgs(y, lognorms, w):
    """Modified Gram-Schmidt on the three tangent columns stored in
    y[3:12]; writes log column norms into lognorms[w]."""
    for j in range(3):
        o = 3 + 3 * j
        for i in range(j):
            oi = 3 + 3 * i
            c = y[o] * y[oi] + y[o + 1] * y[oi + 1] + y[o + 2] * y[oi + 2]
            y[o] -= c * y[oi]
            y[o + 1] -= c * y[oi + 1]
            y[o + 2] -= c * y[oi + 2]
        r = math.sqrt(y[o] * y[o] + y[o + 1] * y[o + 1] + y[o + 2] * y[o + 2])
        inv = 1.0 / r
        y[o] *= inv
        y[o + 1] *= inv
        y[o + 2] *= inv
        lognorms[w, j] = math.log(r)


@njit
def _mgs_qr(y, R):
    """Like _mgs but stores the full upper-triangular factor into R."""
    for j in range(3):
        o = 3 + 3 * j
        for i in range(j):
            oi = 3 + 3 * i
            c = y[o] * y[oi] + y[o + 1] * y[oi + 1] + y[o + 2] * y[oi + 2]
            R[i, j] = c
            y[o] -= c * y[oi]
            y[o + 1] -= c * y[oi + 1]
            y[o + 2] -= c * y[oi + 2]
        r = math.sqrt(y[o] * y[o] + y[o + 1] * y[o + 1] + y[o + 2] * y[o + 2])
        R[j, j] = r
        for i in range(j + 1, 3):
            R[i, j] = 0.0
        inv = 1.0 / r
        y[o] *= inv
        y[o + 1] *= inv
        y[o + 2] *= inv


@njit
def _benettin(code, pv, y, t_base, w_start, n_windows, t, h, renorm_dt,
              rtol, atol, max_step, escape_sq, max_steps,
              lognorms,
              K, rc, ytmp, ynew, yev):
    """Tangent-frame integration with periodic orthonormalization.

    Window w ends at t_base + (w+1)*renorm_dt.  Returns
    (status, t, h, w_done, steps); status BUDGET allows chunked calls.
    """
    steps_total = 0
    w = w_start
    while w < n_windows:
        t_end = t_base + (w + 1) * renorm_dt
        st, t, h, _, su, _ = _advance(
            code, pv, 1.0, 12, y, t, h, t_end,
            rtol, atol, max_step,
            -1, 0.0, 0, 0, 0.0,
            escape_sq, 0.0, 0.0,
            max_steps - steps_total,
            K, rc, ytmp, ynew, yev)
        steps_total += su
        if st != OK_TEND:
            return st, t, h, w, steps_total
        _mgs(y, lognorms, w)
        w += 1
    return OK_TEND, t, h, w, steps_total


@njit
def _clv_forward(code, pv, y, t, h, t_stop,
                 mode, t_base, w_next, renorm_dt, max_window, t_last_qr,
                 ev_kind, ev_value, ev_dir, ev_pred,
                 rtol, atol, max_step, escape_sq, max_steps,
                 out_t, out_pt, out_Q, out_R, out_emit, n_frames,
                 K, rc, ytmp, ynew, yev):
    """Forward QR pass of the covariant-vector computation.

    mode 0: QR at t_base + k*renorm_dt, every frame emitted.
    mode 1: QR at section crossings (emitted) with a forced
            non-emitted QR whenever max_window elapses without one.

    Returns (status, t, h, w_next, t_last_qr, n_frames, steps).
    status FULL means the output arrays ran out; resume after growing.
    """
    steps_total = 0
    cap = out_t.size
    while True:
        if n_frames >= cap:
            return FULL, t, h, w_next, t_last_qr, n_frames, steps_total
        if mode == 0:
            t_end = t_base + (w_next + 1) * renorm_dt
            if t_end > t_stop + 1e-12 * max(1.0, abs(t_stop)):
                return OK_TEND, t, h, w_next, t_last_qr, n_frames, steps_total
            st, t, h, _, su, _ = _advance(
                code, pv, 1.0, 12, y, t, h, t_end,
                rtol, atol, max_step,
                -1, 0.0, 0, 0, 0.0,
                escape_sq, 0.0, 0.0,
                max_steps - steps_total,
                K, rc, ytmp, ynew, yev)
            steps_total += su
            if st != OK_TEND:
                return st, t, h, w_next, t_last_qr, n_frames, steps_total
            emit = 1
            w_next += 1
        else:
            t_cap = t_last_qr + max_window
            if t_cap > t_stop:
                t_cap = t_stop
            if t_cap - t <= 1e-12 * max(1.0, abs(t_cap)):
                return OK_TEND, t, h, w_next, t_last_qr, n_frames, steps_total
            st, t, h, _, su, _ = _advance(
                code, pv, 1.0, 12, y, t, h, t_cap,
                rtol, atol, max_step,
                ev_kind, ev_value, ev_dir, ev_pred, t + 1e-9,
                escape_sq, 0.0, 0.0,
                max_steps - steps_total,
                K, rc, ytmp, ynew, yev)
            steps_total += su
            if st == EVENT:
                emit = 1
            elif st == OK_TEND:
                emit = 0
            else:
                return st, t, h, w_next, t_last_qr, n_frames, steps_total
        _mgs_qr(y, out_R[n_frames])
        out_t[n_frames] = t
        for i in range(3):
            out_pt[n_frames, i] = y[i]
            for j in range(3):
                out_Q[n_frames, i, j] = y[3 + 3 * j + i]
        out_emit[n_frames] = emit
        t_last_qr = t
        n_frames += 1


@njit
def _clv_backward(Rs, C, Vcoef, lognorm3, k_hi, k_lo):
    """Backward triangular iteration of the covariant-vector method.

    Rs[k] maps frame k-1 to k.  On entry C holds the coefficient matrix
    at frame k_hi; the loop writes coefficients for frames
    k_hi-1 .. k_lo into Vcoef (index-aligned with frames) and the
    column-3 renormalization logs into lognorm3.  C is updated in place
    to the coefficients at frame k_lo.  Returns the number of frames
    whose solve was degenerate.
    """
    bad = 0
    for k in range(k_hi, k_lo, -1):
        R = Rs[k]
        degenerate = False
        for j in range(3):
            if abs(R[j, j]) < 1e-300:
                degenerate = True
        if degenerate:
            bad += 1
            for i in range(3):
                for j in range(3):
                    Vcoef[k - 1, i, j] = np.nan
            continue
        for j in range(3):
            # back-substitute R x = C[:, j]
            x2 = C[2, j] / R[2, 2]
            x1 = (C[1, j] - R[1, 2] * x2) / R[1, 1]
            x0 = (C[0, j] - R[0, 1] * x1 - R[0, 2] * x2) / R[0, 0]
            nrm = math.sqrt(x0 * x0 + x1 * x1 + x2 * x2)
            if j == 2:
                lognorm3[k - 1] = math.log(nrm)
            inv = 1.0 / nrm
            C[0, j] = x0 * inv
            C[1, j] = x1 * inv
            C[2, j] = x2 * inv
        for i in range(3):
            for j in range(3):
                Vcoef[k - 1, i, j] = C[i, j]
    return bad


@njit
def _kneading(code, pv, y, t, h, t_max, n_want,
              rtol, atol, max_step, escape_sq,
              cap_x, cap_z, cap_r, cap_on, max_steps,
              symbols, n_have,
              K, rc, ytmp, ynew, yev):
    """Symbol extraction along an orbit: 1 at x-maxima with x > 0, 0 at
    x-minima with x < 0 (extrema are y = 0 crossings since xdot = y).

    Returns (kn_status, t, h, n_have, steps).
    """
    steps_total = 0
    cap_r2 = cap_r * cap_r
    while n_have < n_want:
        st, t, h, _, su, d = _advance(
            code, pv, 1.0, 3, y, t, h, t_max,
            rtol, atol, max_step,
            1, 0.0, 0, 0, t + 1e-9,
            escape_sq, 0.0, 0.0,
            max_steps - steps_total,
            K, rc, ytmp, ynew, yev)
        steps_total += su
        if st == EVENT:
            x = y[0]
            if d < 0.0 and x > 0.0:
                symbols[n_have] = 1
                n_have += 1
            elif d > 0.0 and x < 0.0:
                symbols[n_have] = 0
                n_have += 1
            if cap_on == 1:
                dxp = y[0] - cap_x
                dz = y[2] - cap_z
                dxm = y[0] + cap_x
                dp = dxp * dxp + y[1] * y[1] + dz * dz
                dm = dxm * dxm + y[1] * y[1] + dz * dz
                if dp < cap_r2 or dm < cap_r2:
                    return KN_CAPTURE, t, h, n_have, steps_total
        elif st == OK_TEND:
            return KN_TIME, t, h, n_have, steps_total
        elif st == ESCAPE:
            return KN_ESCAPE, t, h, n_have, steps_total
        elif st == BUDGET:
            return KN_BUDGET, t, h, n_have, steps_total
        else:
            return KN_FAIL, t, h, n_have, steps_total
    return KN_DONE, t, h, n_have, steps_total


@njit
def _modelmap_orbit(mu, A, nu, x0, n, out):
    """Iterate X -> mu - A*|X|**nu, recording the orbit (out[0] = x0)."""
    x = x0
    out[0] = x
    for k in range(1, n + 1):
        x = mu - A * abs(x) ** nu
        out[k] = x
    return x


@njit
def _modelmap_classify(mu, A, nu, n_transient, n_probe, cycle_tol, max_period, escape):
    """0 = stable_periodic, 1 = chaotic_candidate, 2 = escaped."""
    x = 0.0
    for _ in range(n_transient):
        x = mu - A * abs(x) ** nu
        if not math.isfinite(x) or abs(x) > escape:
            return 2
    tail = np.empty(n_probe)
    for k in range(n_probe):
        x = mu - A * abs(x) ** nu
        if not math.isfinite(x) or abs(x) > escape:
            return 2
        tail[k] = x
    for p in range(1, max_period + 1):
        ok = True
        for k in range(n_probe - p):
            if abs(tail[k + p] - tail[k]) > cycle_tol:
                ok = False
                break
        if ok:
            return 0
    return 1
