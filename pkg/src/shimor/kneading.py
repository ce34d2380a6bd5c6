"""Kneading sequences along the separatrix and homoclinic bisection.

A symbol is registered at every sign-consistent extremum of x along
the unstable separatrix: 1 at a local maximum with x > 0, 0 at a local
minimum with x < 0 (extrema are located as y = 0 crossings since
xdot = y).  The resulting binary itinerary is a topological invariant
whose n-th symbol changes exactly when an n-round homoclinic loop is
crossed in parameter space, which turns symbol flips into a bisection
tool for locating homoclinic bifurcation curves.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as k
from .dynsys import SystemParams, equilibria
from .errors import DomainError, ConvergenceError
from .integrate import (IntegratorConfig, DEFAULT_CONFIG, _buffers,
                        separatrix_seed)

_TERMINATION = {
    k.KN_DONE: "completed",
    k.KN_ESCAPE: "escape",
    k.KN_CAPTURE: "equilibrium_capture",
    k.KN_TIME: "time_limit",
}


@dataclass
class KneadingSequence:
    symbols: str
    skip: int
    params: SystemParams
    termination: str
    t_end: float
    final_state: np.ndarray

    def __len__(self):
        return len(self.symbols)


def kneading_sequence(p: SystemParams, N: int = 16, eps: float = 1e-6,
                      cfg: IntegratorConfig = DEFAULT_CONFIG,
                      branch: str = "plus", skip: int = 1,
                      t_max: float = 1e4, capture_radius: float = 1e-4
                      ) -> KneadingSequence:
    """First N kneading symbols of the separatrix of the given branch.

    Stops early on escape, on capture into a ball of radius
    capture_radius around a stable O+/O- (only armed when those
    equilibria are stable), or at t_max; the termination field records
    which.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    s0 = separatrix_seed(p, branch, eps)
    eqs = equilibria(p)
    if len(eqs) < 3:
        cap_on, cap_x, cap_z = 0, 0.0, 0.0
    else:
        cap_on = 1 if eqs[1].stable else 0
        cap_x, cap_z = float(eqs[1].location[0]), float(eqs[1].location[2])
    y = s0.copy()
    bufs = _buffers(3)
    symbols = np.empty(N, dtype=np.int64)
    status, t, h, n_have, _ = k._kneading(
        p.code, p.pvec, y, 0.0, cfg.h0, t_max, N,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.escape_radius ** 2,
        cap_x, cap_z, capture_radius, cap_on, 2 ** 62,
        symbols, 0, *bufs)
    if status == k.KN_BUDGET or status == k.KN_FAIL:
        raise ConvergenceError(f"kneading integration failed at t = {t:.6g}")
    return KneadingSequence(
        symbols="".join("1" if s else "0" for s in symbols[:n_have]),
        skip=skip, params=p, termination=_TERMINATION[status],
        t_end=float(t), final_state=y.copy())


def _symbols_of(seq) -> tuple[str, str | None]:
    if isinstance(seq, KneadingSequence):
        return seq.symbols, seq.termination
    return str(seq), None


def kneading_code(seq, K_N: int = 15, skip: int = 1,
                  pad_capture: bool = False) -> float:
    """Binary-fraction code of the K_N symbols after the skipped
    prefix: sum of s_i * 2^-(i+1) over the retained window.

    pad_capture extends a sequence truncated by equilibrium capture
    with the symbol of the capturing wing (sign of the final x), which
    is what chart cells inside stability windows use.
    """
    symbols, termination = _symbols_of(seq)
    if pad_capture and termination == "equilibrium_capture" \
            and len(symbols) < skip + K_N:
        fill = "1" if seq.final_state[0] > 0 else "0"
        symbols = symbols + fill * (skip + K_N - len(symbols))
    if len(symbols) < skip + K_N:
        raise DomainError(
            f"sequence too short: need {skip + K_N} symbols, have {len(symbols)}")
    window = symbols[skip:skip + K_N]
    return sum(int(c) * 0.5 ** (i + 1) for i, c in enumerate(window))


def _interp_params(p_a: SystemParams, p_b: SystemParams, s: float) -> SystemParams:
    if p_a.system_id != p_b.system_id:
        raise DomainError("endpoints must belong to the same family")
    def mix(x, y):
        return (1.0 - s) * x + s * y
    if p_a.system_id == "lorenz":
        return replace(p_a, b=mix(p_a.b, p_b.b), sigma=mix(p_a.sigma, p_b.sigma),
                       r=mix(p_a.r, p_b.r))
    return replace(p_a, alpha=mix(p_a.alpha, p_b.alpha),
                   lam=mix(p_a.lam, p_b.lam), B=mix(p_a.B, p_b.B))


def _param_distance(p_a: SystemParams, p_b: SystemParams) -> float:
    if p_a.system_id == "lorenz":
        va = (p_a.b, p_a.sigma, p_a.r)
        vb = (p_b.b, p_b.sigma, p_b.r)
    elif p_a.system_id == "ext_sm":
        va = (p_a.alpha, p_a.lam, p_a.B)
        vb = (p_b.alpha, p_b.lam, p_b.B)
    else:
        va = (p_a.alpha, p_a.lam)
        vb = (p_b.alpha, p_b.lam)
    return float(np.linalg.norm(np.subtract(va, vb)))


@dataclass
class HomoclinicPoint:
    params: SystemParams
    symbol_index: int
    seq_lo: KneadingSequence
    seq_hi: KneadingSequence
    iterations: int
    bracket_history: list
    diagnostic: str = ""


def homoclinic_bisect(p_a: SystemParams, p_b: SystemParams, symbol_index: int,
                      tol: float = 1e-6, eps: float = 1e-6,
                      cfg: IntegratorConfig = DEFAULT_CONFIG,
                      t_max: float = 1e4) -> HomoclinicPoint:
    """Bisect the parameter segment [p_a, p_b] on a flip of the
    kneading symbol at symbol_index (0-based, raw sequence).

    The endpoints must disagree at that symbol.  Midpoints whose
    sequence terminates before reaching the symbol stop the bisection
    early with a diagnostic (the current bracket midpoint is still
    returned).  bracket_history holds the successive (s_lo, s_hi)
    fractions of the segment, which halve each iteration.
    """
    N = symbol_index + 1

    def seq_at(s):
        return kneading_sequence(_interp_params(p_a, p_b, s), N=N, eps=eps,
                                 cfg=cfg, t_max=t_max)

    seq_a, seq_b = seq_at(0.0), seq_at(1.0)
    for nm, sq in (("first", seq_a), ("second", seq_b)):
        if len(sq.symbols) <= symbol_index:
            raise DomainError(
                f"{nm} endpoint reached only {len(sq.symbols)} symbols "
                f"(termination {sq.termination})")
    if seq_a.symbols[symbol_index] == seq_b.symbols[symbol_index]:
        raise DomainError(
            f"symbol {symbol_index} is {seq_a.symbols[symbol_index]!r} at both endpoints")

    s_lo, s_hi = 0.0, 1.0
    lo_sym = seq_a.symbols[symbol_index]
    history = [(s_lo, s_hi)]
    diagnostic = ""
    span = _param_distance(p_a, p_b)
    iterations = 0
    while span * (s_hi - s_lo) > tol:
        s_mid = 0.5 * (s_lo + s_hi)
        sq = seq_at(s_mid)
        iterations += 1
        if len(sq.symbols) <= symbol_index:
            diagnostic = (f"sequence at bracket fraction {s_mid:.6g} terminated "
                          f"({sq.termination}) before symbol {symbol_index}")
            break
        if sq.symbols[symbol_index] == lo_sym:
            s_lo = s_mid
            seq_a = sq
        else:
            s_hi = s_mid
            seq_b = sq
        history.append((s_lo, s_hi))
    s_star = 0.5 * (s_lo + s_hi)
    return HomoclinicPoint(params=_interp_params(p_a, p_b, s_star),
                           symbol_index=symbol_index, seq_lo=seq_a,
                           seq_hi=seq_b, iterations=iterations,
                           bracket_history=history, diagnostic=diagnostic)
