"""Subspace-angle diagnostics and pseudohyperbolicity verdicts.

The central quantity is the angle between the strong-stable line
span(V3) and the center-unstable plane span(V1, V2) along an orbit,
computed per frame as arcsin of the projection of V3 onto the plane
normal.  A strictly positive minimum over the attractor certifies the
transversality part of pseudohyperbolicity; a minimum hitting zero
signals tangency.  Continuity diagrams (distance in phase space vs
angle between the field directions at the two points) detect whether
the strong-stable field is single-valued and orientable over the
attractor.

Tangency-curve tracing locates parameter values where the minimal
angle along a short separatrix segment crosses a threshold beta*.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import dynsys
from .dynsys import SystemParams
from .errors import DomainError, EscapeError, ConvergenceError
from .integrate import (IntegratorConfig, DEFAULT_CONFIG, SectionSpec,
                        separatrix_seed, advance_to_arc_length)
from .lyap import lyapunov_spectrum, covariant_vectors, ClvRun, ClvFrame

_PAIRS = ("ss_vs_cu", "u_vs_cs")
_SUBSPACES = ("E_ss", "E_cu", "E_u", "E_cs")

# minimal-angle thresholds used for the tangency-curve overlays of the
# chart presets, from coarse to the deepest zoom levels
BETA_STAR_PRESETS = {
    "fig6": 0.005,
    "fig12": 0.0006,
    "fig14": 0.00024,
    "fig16a": 0.00005,
    "fig16b": 0.00002,
}

_DEGEN = 1e-12


@dataclass
class AngleStats:
    beta_min: float
    histogram: np.ndarray
    bin_edges: np.ndarray
    sample_count: int
    subspace_pair: str


@dataclass
class ContinuityCloud:
    rho: np.ndarray
    phi: np.ndarray
    subspace: str
    diameter: float
    rng_seed: int


@dataclass
class PseudohypVerdict:
    params: SystemParams
    exponents: np.ndarray
    P2_gap: float          # L2 - L3
    P3_sum: float          # L1 + L2
    beta_min: float
    beta_threshold: float
    verdict: str           # LorenzAttractor | TangencyDetected | NotChaotic
    orientability: str     # orientable | non_orientable | undetermined | not_computed
    diagnostic: str = ""


def _pair_angles(V1, V2, V3, pair):
    """Vectorized line-vs-plane angles with degenerate-frame mask.

    Rows are frames; returns (angles, ok).  The plane normal comes from
    the cross product of its two spanning vectors, so the result is
    invariant under sign flips of any Vi.
    """
    if pair == "ss_vs_cu":
        n = np.cross(V1, V2, axis=1)
        line = V3
    elif pair == "u_vs_cs":
        n = np.cross(V2, V3, axis=1)
        line = V1
    else:
        raise DomainError(f"unknown subspace pair {pair!r}")
    nn = np.linalg.norm(n, axis=1)
    ok = nn > _DEGEN
    sines = np.zeros(len(nn))
    sines[ok] = np.abs(np.einsum("ki,ki->k", n[ok], line[ok])) / nn[ok]
    return np.arcsin(np.clip(sines, 0.0, 1.0)), ok


def frame_angle(f: ClvFrame, pair: str = "ss_vs_cu") -> float:
    """Angle in [0, pi/2] between span(V3) and span(V1,V2) (ss_vs_cu)
    or between span(V1) and span(V2,V3) (u_vs_cs) for one frame."""
    ang, ok = _pair_angles(f.V1[None, :], f.V2[None, :], f.V3[None, :], pair)
    if not ok[0]:
        raise DomainError("degenerate frame: spanning vectors are near-parallel")
    return float(ang[0])


def _run_vectors(frames):
    """Accepts a ClvRun or an iterable of ClvFrame; returns the stacked
    (V1, V2, V3) arrays."""
    if isinstance(frames, ClvRun):
        return frames.V[:, :, 0], frames.V[:, :, 1], frames.V[:, :, 2]
    fl = list(frames)
    if not fl:
        raise DomainError("empty frame stream")
    V1 = np.stack([f.V1 for f in fl])
    V2 = np.stack([f.V2 for f in fl])
    V3 = np.stack([f.V3 for f in fl])
    return V1, V2, V3


def angle_statistics(frames, pair: str = "ss_vs_cu", bins: int = 90) -> AngleStats:
    """Histogram over [0, pi/2] plus the exact minimum of the per-frame
    subspace angles; degenerate frames are skipped."""
    V1, V2, V3 = _run_vectors(frames)
    if V1.shape[0] == 0:
        raise DomainError("empty frame stream")
    ang, ok = _pair_angles(V1, V2, V3, pair)
    ang = ang[ok]
    if ang.size == 0:
        raise DomainError("all frames degenerate")
    counts, edges = np.histogram(ang, bins=bins, range=(0.0, math.pi / 2))
    return AngleStats(beta_min=float(ang.min()), histogram=counts,
                      bin_edges=edges, sample_count=int(ang.size),
                      subspace_pair=pair)


def _subspace_directions(run: ClvRun, subspace: str) -> np.ndarray:
    """Unit direction (line subspaces) or unit plane normal (plane
    subspaces) per frame, with the natural signs produced by the
    backward pass."""
    if subspace == "E_ss":
        return run.V[:, :, 2]
    if subspace == "E_u":
        return run.V[:, :, 0]
    if subspace == "E_cu":
        return run.n_cu
    if subspace == "E_cs":
        n = np.cross(run.V[:, :, 1], run.V[:, :, 2], axis=1)
        nn = np.linalg.norm(n, axis=1)
        bad = nn <= _DEGEN
        nn[bad] = 1.0
        n /= nn[:, None]
        n[bad] = np.nan
        return n
    raise DomainError(f"unknown subspace {subspace!r}")


def continuity_diagram(run: ClvRun, subspace: str = "E_ss",
                       pair_budget: int = 500_000,
                       rng_seed: int = 0) -> ContinuityCloud:
    """Cloud of (rho, phi) over seeded random frame pairs: rho is the
    phase-space distance, phi in [0, pi] the angle between the subspace
    directions (or plane normals) at the two frames."""
    if pair_budget <= 0:
        raise DomainError("pair_budget must be positive")
    if not isinstance(run, ClvRun):
        raise DomainError("continuity_diagram expects a ClvRun")
    N = len(run)
    if N < 2:
        raise DomainError("need at least two frames")
    dirs = _subspace_directions(run, subspace)
    good = ~np.isnan(dirs[:, 0])
    pts = run.points[good]
    dirs = dirs[good]
    N = pts.shape[0]
    rng = np.random.default_rng(rng_seed)
    i = rng.integers(0, N, size=pair_budget)
    j = rng.integers(0, N, size=pair_budget)
    rho = np.linalg.norm(pts[i] - pts[j], axis=1)
    cosphi = np.einsum("ki,ki->k", dirs[i], dirs[j])
    phi = np.arccos(np.clip(cosphi, -1.0, 1.0))
    diam = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    return ContinuityCloud(rho=rho, phi=phi, subspace=subspace,
                           diameter=diam, rng_seed=rng_seed)


def classify_orientability(cloud: ContinuityCloud,
                           delta_rho_frac: float = 0.05,
                           delta_phi: float = 0.2) -> str:
    """non_orientable when some close pair (rho below the fraction of
    the cloud diameter) has phi near pi; orientable when additionally
    no close pair sits in the middle band (pi/4, 3pi/4); undetermined
    otherwise."""
    if cloud.rho.size == 0:
        raise DomainError("empty cloud")
    close = cloud.rho < delta_rho_frac * cloud.diameter
    if np.any(close & (cloud.phi > math.pi - delta_phi)):
        return "non_orientable"
    mid = close & (cloud.phi > math.pi / 4) & (cloud.phi < 3 * math.pi / 4)
    if not np.any(mid):
        return "orientable"
    return "undetermined"


@dataclass
class VerdictConfig:
    s0: tuple | None = None          # None: start on the separatrix
    separatrix_eps: float = 1e-6
    spectrum_T: float = 2e4
    spectrum_transient: float = 1e3
    spectrum_renorm: float = 0.5
    clv_T: float = 1.1e4
    clv_transient_fwd: float = 5e2
    clv_transient_bwd: float = 5e2
    clv_renorm: float = 0.1
    frame_mode: str = "stride"
    section: SectionSpec = field(default_factory=SectionSpec)
    beta_star: float = 0.005
    lam1_min: float = 0.005
    pair_budget: int = 500_000
    rng_seed: int = 0
    bins: int = 90
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)


def verdict(p: SystemParams, cfg: VerdictConfig | None = None,
            deadline: float | None = None) -> PseudohypVerdict:
    """Two-step pseudohyperbolicity test: exponent gates first
    (chaoticity, ordering gap, volume expansion), then the minimal
    subspace angle against beta_star, then orientability from the
    strong-stable continuity cloud.

    Escape and non-convergence do not raise: they yield NotChaotic with
    the diagnostic recorded.
    """
    if cfg is None:
        cfg = VerdictConfig()
    nan3 = np.full(3, np.nan)
    s0 = (separatrix_seed(p, "plus", cfg.separatrix_eps) if cfg.s0 is None
          else np.asarray(cfg.s0, dtype=float))
    try:
        spec = lyapunov_spectrum(p, s0, T=cfg.spectrum_T,
                                 renorm_interval=cfg.spectrum_renorm,
                                 transient=cfg.spectrum_transient,
                                 cfg=cfg.integrator, deadline=deadline)
    except (EscapeError, ConvergenceError) as e:
        return PseudohypVerdict(params=p, exponents=nan3, P2_gap=math.nan,
                                P3_sum=math.nan, beta_min=math.nan,
                                beta_threshold=cfg.beta_star, verdict="NotChaotic",
                                orientability="not_computed", diagnostic=str(e))
    L = spec.exponents
    gap = float(L[1] - L[2])
    vol = float(L[0] + L[1])
    base = dict(params=p, exponents=L, P2_gap=gap, P3_sum=vol,
                beta_threshold=cfg.beta_star)
    if L[0] < cfg.lam1_min:
        return PseudohypVerdict(beta_min=math.nan, verdict="NotChaotic",
                                orientability="not_computed",
                                diagnostic=f"L1 = {L[0]:.4g} below chaos threshold", **base)
    if gap <= 0.0 or vol <= 0.0:
        return PseudohypVerdict(beta_min=math.nan, verdict="NotChaotic",
                                orientability="not_computed",
                                diagnostic="exponent ordering/volume-expansion gate failed", **base)
    try:
        run = covariant_vectors(p, s0, T=cfg.clv_T,
                                transient_fwd=cfg.clv_transient_fwd,
                                transient_bwd=cfg.clv_transient_bwd,
                                cfg=cfg.integrator, frame_mode=cfg.frame_mode,
                                section=cfg.section,
                                renorm_interval=cfg.clv_renorm,
                                deadline=deadline)
        stats = angle_statistics(run, "ss_vs_cu", bins=cfg.bins)
        cloud = continuity_diagram(run, "E_ss", pair_budget=cfg.pair_budget,
                                   rng_seed=cfg.rng_seed)
        orient = classify_orientability(cloud)
    except (EscapeError, ConvergenceError, DomainError) as e:
        return PseudohypVerdict(beta_min=math.nan, verdict="NotChaotic",
                                orientability="not_computed",
                                diagnostic=f"CLV stage failed: {e}", **base)
    if stats.beta_min < cfg.beta_star:
        return PseudohypVerdict(beta_min=stats.beta_min, verdict="TangencyDetected",
                                orientability=orient, **base)
    return PseudohypVerdict(beta_min=stats.beta_min, verdict="LorenzAttractor",
                            orientability=orient, **base)


def short_segment_beta_min(p: SystemParams, skip_arc: float = 0.1,
                           window_T: float = 300.0, tail_T: float = 150.0,
                           renorm_interval: float = 0.1,
                           eps: float = 1e-6,
                           cfg: IntegratorConfig = DEFAULT_CONFIG,
                           deadline: float | None = None) -> float:
    """Minimal ss-vs-cu angle over a short initial piece of the
    separatrix: seed near O along the unstable eigenvector, skip an
    arc-length-0.1 segment (the frames there are slaved to the saddle),
    then run covariant vectors for window_T time units with the initial
    orthonormal frame pinned to the saddle eigenframe, plus a backward
    tail that is discarded."""
    if p.system_id not in ("sm", "ext_sm"):
        raise DomainError("short_segment_beta_min needs the saddle frame of the origin")
    s_seed = separatrix_seed(p, "plus", eps)
    s_skip, _ = advance_to_arc_length(p, s_seed, skip_arc, cfg=cfg)
    q0 = dynsys.saddle_frame(p.alpha, p.lam)
    run = covariant_vectors(p, s_skip, T=window_T + tail_T,
                            transient_fwd=0.0, transient_bwd=tail_T,
                            cfg=cfg, frame_mode="stride",
                            renorm_interval=renorm_interval, q0=q0,
                            deadline=deadline)
    return angle_statistics(run, "ss_vs_cu").beta_min


@dataclass
class TangencyCurve:
    points: np.ndarray      # rows (alpha, lambda)
    beta_star: float
    notes: list


def trace_tangency_curve(region, axis: str = "alpha", beta_star: float = 0.005,
                         resolution: int = 17, n_lines: int = 9,
                         tol: float = 1e-5, scan_from: str = "high",
                         cfg: IntegratorConfig = DEFAULT_CONFIG,
                         deadline: float | None = None) -> TangencyCurve:
    """Trace the tangency locus where short_segment_beta_min crosses
    beta_star.

    region is ((alpha_lo, alpha_hi), (lambda_lo, lambda_hi)); scan
    lines are placed along ``axis`` and the crossing is bisected along
    the other parameter to |delta| < tol.

    The short-segment angle dips to zero AT the tangency locus and
    grows on both sides, so the scan walks from the ``scan_from`` end
    of the line (default the high end, the robustly pseudohyperbolic
    side for the lambda scans) and bisects the first drop below
    beta_star.  Lines without a sign change are skipped with a note.
    """
    if axis not in ("alpha", "lambda"):
        raise DomainError(f"unknown scan axis {axis!r}")
    if scan_from not in ("high", "low"):
        raise DomainError(f"scan_from must be 'high' or 'low'")
    (a_lo, a_hi), (l_lo, l_hi) = region

    def beta_at(a, l):
        try:
            return short_segment_beta_min(dynsys.sm(a, l), cfg=cfg,
                                          deadline=deadline)
        except (EscapeError, ConvergenceError):
            return math.nan

    if axis == "alpha":
        lines = np.linspace(a_lo, a_hi, n_lines)
        scan_lo, scan_hi = l_lo, l_hi
    else:
        lines = np.linspace(l_lo, l_hi, n_lines)
        scan_lo, scan_hi = a_lo, a_hi

    points = []
    notes = []
    for line_val in lines:
        def g(s):
            a, l = (line_val, s) if axis == "alpha" else (s, line_val)
            b = beta_at(a, l)
            return b - beta_star if not math.isnan(b) else math.nan
        grid = np.linspace(scan_hi, scan_lo, resolution) if scan_from == "high" \
            else np.linspace(scan_lo, scan_hi, resolution)
        vals = [g(s) for s in grid]
        hit = None
        for i in range(resolution - 1):
            if math.isnan(vals[i]) or math.isnan(vals[i + 1]):
                continue
            if vals[i + 1] == 0.0:
                hit = grid[i + 1]
                break
            if vals[i] > 0.0 > vals[i + 1]:
                s_pos, s_neg = grid[i], grid[i + 1]
                while abs(s_pos - s_neg) > tol:
                    mid = 0.5 * (s_pos + s_neg)
                    fm = g(mid)
                    if math.isnan(fm):
                        break
                    if fm > 0.0:
                        s_pos = mid
                    else:
                        s_neg = mid
                hit = 0.5 * (s_pos + s_neg)
                break
        if hit is None:
            notes.append(f"{axis} = {line_val:.6g}: no crossing of beta* "
                         f"on the scan line")
            continue
        points.append((line_val, hit) if axis == "alpha" else (hit, line_val))
    pts = np.array(points) if points else np.empty((0, 2))
    return TangencyCurve(points=pts, beta_star=beta_star, notes=notes)
