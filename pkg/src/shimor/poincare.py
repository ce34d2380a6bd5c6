"""Section portraits and 1D Poincare-map extraction along the
separatrix.

The attractor is sampled by the crossings of a cross-section; the 1D
map is the cloud of (x at crossing k, folded x at crossing k+stride)
with the pre-image restricted to one side of the symmetry plane.  Two
scalar diagnostics quantify what the paper judges by eye: the fiber
spread (vertical extent within x-bins, small when the cloud is a
graph) and branch turning points (non-monotonicity of the binned
branch, nonzero when the map develops a hook).  Lacunae show up as
gaps in the crossing coordinates, counted by component_count.
"""

from dataclasses import dataclass

import numpy as np

from .dynsys import SystemParams, _check_state
from .errors import DomainError, EscapeError
from .integrate import (IntegratorConfig, DEFAULT_CONFIG, SectionSpec,
                        detect_crossings, separatrix_seed)

_PORTRAIT_COORDS = {"plane_z": (0, 1), "plane_y0": (0, 2), "z_local_max": (0, 2)}


@dataclass
class SectionPortrait:
    section: SectionSpec
    coords: np.ndarray        # (n, 2) section coordinates per crossing
    states: np.ndarray        # (n, 3) full states
    directions: np.ndarray    # +1 / -1 sign of dg/dt
    truncated: bool
    params: SystemParams


@dataclass
class OneDMapData:
    xn: np.ndarray
    xim: np.ndarray
    stride: int
    folding: str
    section: SectionSpec
    params: SystemParams
    truncated: bool


def _separatrix_crossings(p: SystemParams, section: SectionSpec, n_want: int,
                          transient_crossings: int, cfg: IntegratorConfig,
                          t_max: float, eps: float, s0,
                          deadline: float | None):
    """Crossing events of the separatrix (or of the orbit from s0),
    with the approach transient dropped.  Returns (events, truncated)."""
    if s0 is None:
        s0 = separatrix_seed(p, "plus", eps)
    else:
        s0 = _check_state(s0)
    total = transient_crossings + n_want
    try:
        events = detect_crossings(p, s0, section, t_max, cfg=cfg,
                                  n_max=total, deadline=deadline)
    except EscapeError:
        raise
    truncated = len(events) < total
    return events[transient_crossings:], truncated


def section_portrait(p: SystemParams, section: SectionSpec | None = None,
                     n_events: int = 2000,
                     cfg: IntegratorConfig = DEFAULT_CONFIG,
                     transient_crossings: int = 100, t_max: float = 1e5,
                     eps: float = 1e-6, s0=None,
                     deadline: float | None = None) -> SectionPortrait:
    """Portrait of the attractor on a cross-section: the first n_events
    crossings of the separatrix after the transient, direction-tagged.

    Fewer crossings than requested (stability windows, t_max hit) give
    a truncated portrait, not an error.
    """
    if n_events < 1:
        raise DomainError("n_events must be at least 1")
    if section is None:
        section = SectionSpec(kind="plane_z", value=1.0, direction="both")
    events, truncated = _separatrix_crossings(
        p, section, n_events, transient_crossings, cfg, t_max, eps, s0, deadline)
    i, j = _PORTRAIT_COORDS[section.kind]
    states = np.array([e.state for e in events]) if events else np.empty((0, 3))
    dirs = np.array([e.direction_sign for e in events], dtype=int)
    coords = states[:, (i, j)] if states.size else np.empty((0, 2))
    return SectionPortrait(section=section, coords=coords, states=states,
                           directions=dirs, truncated=truncated, params=p)


def one_d_map(p: SystemParams, section: SectionSpec | None = None,
              stride: int = 1, folding: str = "abs_fold",
              n_pairs: int = 1000, cfg: IntegratorConfig = DEFAULT_CONFIG,
              side: str = "positive", transient_crossings: int = 100,
              t_max: float = 1e5, eps: float = 1e-6, s0=None,
              deadline: float | None = None) -> OneDMapData:
    """1D Poincare-map cloud (x_k, folded x_{k+stride}) from successive
    section crossings, the pre-image restricted to one side.

    folding 'abs_fold' stores |x| of the image (the symmetry quotient
    of the paper's (x_n, |x_{n+1}|) plots); 'none' keeps the sign.
    """
    if stride not in (1, 2):
        raise DomainError("stride must be 1 or 2")
    if folding not in ("abs_fold", "none"):
        raise DomainError(f"unknown folding {folding!r}")
    if side not in ("positive", "negative", "both"):
        raise DomainError(f"unknown side {side!r}")
    if section is None:
        # upward z=1 crossings: the downward family does not project to a
        # graph (fibers stay order-one wide), the upward one does
        section = SectionSpec(kind="plane_z", value=1.0, direction="up")
    # n_pairs pre-images need n_pairs + stride crossings; oversample the
    # request because the side filter discards roughly half
    want = 2 * n_pairs + stride
    events, truncated = _separatrix_crossings(
        p, section, want, transient_crossings, cfg, t_max, eps, s0, deadline)
    x = np.array([e.state[0] for e in events])
    if x.size <= stride:
        raise DomainError("not enough section crossings for any pair")
    xn = x[:-stride]
    xim = x[stride:]
    if side == "positive":
        keep = xn > 0
    elif side == "negative":
        keep = xn < 0
    else:
        keep = np.ones(xn.size, dtype=bool)
    xn, xim = xn[keep], xim[keep]
    if xn.size > n_pairs:
        xn, xim = xn[:n_pairs], xim[:n_pairs]
    else:
        truncated = True
    if folding == "abs_fold":
        xim = np.abs(xim)
    return OneDMapData(xn=xn, xim=xim, stride=stride, folding=folding,
                       section=section, params=p, truncated=truncated)


def component_count(data: OneDMapData, gap_frac: float = 0.05) -> int:
    """Number of clusters of the pre-image coordinates separated by
    gaps wider than gap_frac times the occupied range."""
    x = np.sort(data.xn)
    if x.size < 2:
        return int(x.size > 0)
    rng = x[-1] - x[0]
    if rng == 0.0:
        return 1
    return int(1 + np.count_nonzero(np.diff(x) > gap_frac * rng))


def fiber_spread(data: OneDMapData, n_bins: int = 100) -> float:
    """Largest vertical extent of the image cloud within x-bins,
    normalized by the x-range; small values mean the cloud is a graph
    over x (the projection collapsed the stable fibers).

    Bins must be narrow: a steep single-valued branch contributes
    |slope| * binwidth of extent, which shrinks as bins are refined,
    while genuinely two-dimensional clouds keep order-one extent."""
    if data.xn.size < 2:
        raise DomainError("need at least two pairs")
    rng = data.xn.max() - data.xn.min()
    if rng == 0.0:
        raise DomainError("degenerate x-range")
    idx = np.clip(((data.xn - data.xn.min()) / rng * n_bins).astype(int),
                  0, n_bins - 1)
    worst = 0.0
    for b in range(n_bins):
        ys = data.xim[idx == b]
        if ys.size >= 2:
            worst = max(worst, float(ys.max() - ys.min()))
    return worst / rng


def branch_turning_points(data: OneDMapData, n_bins: int = 40,
                          noise_frac: float = 0.02) -> int:
    """Number of direction reversals of the binned branch medians;
    zero for a monotone branch, positive when the map has a hook.

    Reversals are counted on bin-median increments larger than
    noise_frac times the image range, so sampling jitter inside a
    monotone branch does not register.
    """
    if data.xn.size < 10:
        raise DomainError("need at least 10 pairs")
    rng = data.xn.max() - data.xn.min()
    if rng == 0.0:
        raise DomainError("degenerate x-range")
    idx = np.clip(((data.xn - data.xn.min()) / rng * n_bins).astype(int),
                  0, n_bins - 1)
    med = []
    for b in range(n_bins):
        ys = data.xim[idx == b]
        if ys.size >= 3:
            med.append(float(np.median(ys)))
    if len(med) < 3:
        raise DomainError("too few populated bins")
    med = np.array(med)
    floor = noise_frac * (data.xim.max() - data.xim.min())
    steps = np.diff(med)
    signs = np.sign(steps[np.abs(steps) > floor])
    if signs.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(signs) != 0))


def hook_detected(data: OneDMapData, n_bins: int = 40,
                  noise_frac: float = 0.02) -> bool:
    """True when the branch carries more structure than a single fold.

    The abs-folded map is unimodal across the whole chaotic window, so
    one turning point is the baseline; a hook near the branch tip adds
    further reversals."""
    return branch_turning_points(data, n_bins, noise_frac) >= 2
