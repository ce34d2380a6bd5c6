"""Checkpointed parameter-plane scans.

A scan evaluates one cell job (top Lyapunov exponent, kneading code,
pseudohyperbolicity verdict, or short-segment minimal angle) over a
rectangular grid, either directly in the (alpha, lambda) plane or in
rotated (u, v) coordinates aligned with the codimension-2 point where
the separatrix value vanishes.

Determinism contract: every cell derives its own seed from the global
seed and the cell index, so results do not depend on scan order or on
the worker schedule.  Checkpoint records are flushed in contiguous
cell-index order, which makes the checkpoint file and the final CSV
byte-identical between an interrupted-and-resumed scan and an
uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import dynsys
from . import kneading as _kneading
from . import lyap as _lyap
from . import pseudohyp as _pseudohyp
from .errors import ConfigError, ConvergenceError, DomainError, EscapeError
from .integrate import separatrix_seed

__all__ = [
    "ChartAxis",
    "CellRecord",
    "ChartGrid",
    "rotate_params",
    "inverse_rotation",
    "scan",
    "preset_spec",
    "write_csv",
    "load_checkpoint",
    "kneading_boundaries",
    "JOBS",
    "PRESETS",
    "CHECKPOINT_MAGIC",
]

# (u, v) -> (alpha, lambda) affine rotation centered on the separatrix
# value degeneracy; the linear part is orthogonal to ~1e-4
_R_AA, _R_AV, _R_A0 = 0.87567, 0.48291, 0.47746
_R_LA, _R_LV, _R_L0 = 0.48291, -0.87567, 0.5704
_R_NORM = _R_AA * _R_AA + _R_AV * _R_AV

CHECKPOINT_MAGIC = "# shimor-checkpoint v1"


def rotate_params(u: float, v: float) -> tuple[float, float]:
    """Map chart coordinates (u, v) to system parameters (alpha, lambda)."""
    alpha = _R_AA * u + _R_AV * v + _R_A0
    lam = _R_LA * u + _R_LV * v + _R_L0
    return alpha, lam


def inverse_rotation(alpha: float, lam: float) -> tuple[float, float]:
    """Inverse of rotate_params; composes to identity to 1e-12."""
    da, dl = alpha - _R_A0, lam - _R_L0
    u = (_R_AA * da + _R_LA * dl) / _R_NORM
    v = (_R_AV * da + _R_LV * dl) / _R_NORM
    return u, v


@dataclass(frozen=True)
class ChartAxis:
    name: str
    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"axis {self.name}: n must be >= 1")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigError(f"axis {self.name}: non-finite bounds")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class CellRecord:
    index: int
    c1: float
    c2: float
    status: str          # ok | failed | timeout
    value: float | str
    extra: dict


@dataclass
class ChartGrid:
    axis1: ChartAxis
    axis2: ChartAxis
    rotated: bool
    job: str
    rng_seed: int
    options: dict
    cells: list
    config_hash: str
    preset_id: str | None = None

    @property
    def n_cells(self) -> int:
        return self.axis1.n * self.axis2.n

    @property
    def complete(self) -> bool:
        return len(self.cells) == self.n_cells

    def cell_coords(self, index: int) -> tuple[float, float]:
        i2, i1 = divmod(index, self.axis1.n)
        return (float(self.axis1.values()[i1]),
                float(self.axis2.values()[i2]))

    def cell_params(self, index: int):
        c1, c2 = self.cell_coords(index)
        if self.rotated:
            alpha, lam = rotate_params(c1, c2)
        else:
            alpha, lam = c1, c2
        return dynsys.sm(alpha, lam)

    def values_array(self) -> np.ndarray:
        """Cell values as a (axis2.n, axis1.n) float array (NaN where
        the value is non-numeric or the cell is missing/failed)."""
        out = np.full((self.axis2.n, self.axis1.n), np.nan)
        for c in self.cells:
            if isinstance(c.value, (int, float)):
                i2, i1 = divmod(c.index, self.axis1.n)
                out[i2, i1] = c.value
        return out


# ---------------------------------------------------------------------------
# cell jobs

def _cell_seed(rng_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([rng_seed, index]).generate_state(1)[0])


def _job_lyapunov(p, opts, seed, deadline):
    s0 = separatrix_seed(p, "plus", opts["eps"])
    sp = _lyap.lyapunov_spectrum(
        p, s0, T=opts["T"], renorm_interval=opts["renorm_interval"],
        transient=opts["transient"], deadline=deadline)
    value = float(sp.exponents[0])
    extra = {"L": [float(x) for x in sp.exponents],
             "converged": bool(sp.converged)}
    return value, extra


def _job_kneading(p, opts, seed, deadline):
    K_N, skip = int(opts["K_N"]), int(opts["skip"])
    seq = _kneading.kneading_sequence(
        p, N=K_N + skip, eps=opts["eps"], skip=skip, t_max=opts["t_max"])
    code = _kneading.kneading_code(seq, K_N=K_N, skip=skip, pad_capture=True)
    return float(code), {"symbols": seq.symbols,
                         "termination": seq.termination}


def _job_verdict(p, opts, seed, deadline):
    cfg = _pseudohyp.VerdictConfig(
        spectrum_T=opts["spectrum_T"], clv_T=opts["clv_T"],
        beta_star=opts["beta_star"], rng_seed=seed)
    v = _pseudohyp.verdict(p, cfg, deadline=deadline)
    extra = {
        "L": [float(x) for x in v.exponents] if v.exponents is not None else None,
        "beta_min": None if v.beta_min is None else float(v.beta_min),
        "orientability": v.orientability,
    }
    return v.verdict, extra


def _job_short_beta(p, opts, seed, deadline):
    beta = _pseudohyp.short_segment_beta_min(
        p, window_T=opts["window_T"], tail_T=opts["tail_T"],
        renorm_interval=opts["renorm_interval"], deadline=deadline)
    return float(beta), {}


JOBS = {
    "lyapunov": (_job_lyapunov, {
        "T": 2000.0, "transient": 200.0, "renorm_interval": 0.5,
        "eps": 1e-6}),
    "kneading": (_job_kneading, {
        "K_N": 15, "skip": 1, "eps": 1e-6, "t_max": 1e4}),
    "verdict": (_job_verdict, {
        "spectrum_T": 2000.0, "clv_T": 1100.0, "beta_star": 0.005}),
    "short_beta": (_job_short_beta, {
        "window_T": 300.0, "tail_T": 150.0, "renorm_interval": 0.1}),
}


def _run_cell(grid: ChartGrid, index: int, budget: float) -> CellRecord:
    c1, c2 = grid.cell_coords(index)
    seed = _cell_seed(grid.rng_seed, index)
    deadline = time.monotonic() + budget if budget else None
    fn = JOBS[grid.job][0]
    try:
        p = grid.cell_params(index)
        value, extra = fn(p, grid.options, seed, deadline)
        status = "ok"
    except (DomainError, EscapeError, ConvergenceError, ValueError) as exc:
        if deadline is not None and time.monotonic() > deadline:
            status = "timeout"
        else:
            status = "failed"
        value = float("nan")
        extra = {"error": f"{type(exc).__name__}: {exc}"}
    return CellRecord(index=index, c1=c1, c2=c2, status=status,
                      value=value, extra=extra)


# ---------------------------------------------------------------------------
# checkpointing

def _config_hash(axis1, axis2, rotated, job, rng_seed, options) -> str:
    blob = json.dumps({
        "axis1": [axis1.name, repr(axis1.lo), repr(axis1.hi), axis1.n],
        "axis2": [axis2.name, repr(axis2.lo), repr(axis2.hi), axis2.n],
        "rotated": rotated,
        "job": job,
        "rng_seed": rng_seed,
        "options": {k: repr(v) for k, v in sorted(options.items())},
    }, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _record_line(c: CellRecord) -> str:
    return json.dumps(
        {"i": c.index, "c1": c.c1, "c2": c.c2, "status": c.status,
         "value": c.value, "extra": c.extra},
        sort_keys=True, separators=(",", ":"))


def load_checkpoint(path, expect_hash: str | None = None) -> list[CellRecord]:
    """Read a checkpoint file back into cell records.

    The records must form a contiguous index prefix 0..k-1 (that is the
    only state an interrupted scan leaves behind); anything else means
    the file is corrupt or belongs to a different run.
    """
    with open(path, "r") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(CHECKPOINT_MAGIC):
        raise ConfigError(f"{path}: not a checkpoint file")
    got_hash = lines[0][len(CHECKPOINT_MAGIC):].strip()
    if expect_hash is not None and got_hash != expect_hash:
        raise ConfigError(
            f"{path}: checkpoint was written for config {got_hash}, "
            f"current config is {expect_hash}")
    cells = []
    for ln in lines[1:]:
        if not ln:
            continue
        d = json.loads(ln)
        cells.append(CellRecord(index=d["i"], c1=d["c1"], c2=d["c2"],
                                status=d["status"], value=d["value"],
                                extra=d["extra"]))
    for k, c in enumerate(cells):
        if c.index != k:
            raise ConfigError(
                f"{path}: records are not a contiguous prefix "
                f"(record {k} has index {c.index})")
    return cells


def scan(axis1: ChartAxis, axis2: ChartAxis, job: str,
         options: dict | None = None, rotated: bool = False,
         rng_seed: int = 0, preset_id: str | None = None,
         checkpoint: str | None = None, resume: bool = False,
         n_workers: int = 4, cell_budget: float = 30.0,
         max_cells: int | None = None, batch_size: int = 16) -> ChartGrid:
    """Evaluate a cell job over the grid.

    Cell failures and per-cell budget overruns are contained in the
    cell status and never abort the scan.  With a checkpoint path the
    finished prefix is appended batch-wise; resume=True picks up after
    the last checkpointed cell.  max_cells limits how many new cells
    are computed (the hook used to exercise interruption).
    """
    if job not in JOBS:
        raise ConfigError(f"unknown job {job!r}; known: {sorted(JOBS)}")
    defaults = JOBS[job][1]
    opts = dict(defaults)
    for key, val in (options or {}).items():
        if key not in defaults:
            raise ConfigError(
                f"unknown option {key!r} for job {job!r}; "
                f"known: {sorted(defaults)}")
        opts[key] = val
    cfg_hash = _config_hash(axis1, axis2, rotated, job, rng_seed, opts)
    grid = ChartGrid(axis1=axis1, axis2=axis2, rotated=rotated, job=job,
                     rng_seed=rng_seed, options=opts, cells=[],
                     config_hash=cfg_hash, preset_id=preset_id)

    done: list[CellRecord] = []
    fh = None
    if checkpoint is not None:
        import os
        if resume and os.path.exists(checkpoint):
            done = load_checkpoint(checkpoint, expect_hash=cfg_hash)
            fh = open(checkpoint, "a")
        else:
            fh = open(checkpoint, "w")
            fh.write(f"{CHECKPOINT_MAGIC} {cfg_hash}\n")
            fh.flush()

    start = len(done)
    n_new = grid.n_cells - start
    if max_cells is not None:
        n_new = min(n_new, max_cells)
    todo = range(start, start + n_new)

    try:
        if n_new > 0:
            with ThreadPoolExecutor(max_workers=max(1, n_workers)) as pool:
                futures = {i: pool.submit(_run_cell, grid, i, cell_budget)
                           for i in todo}
                pending = {}
                next_idx = start
                unwritten = 0
                for i in todo:
                    pending[i] = futures[i].result()
                    # flush the contiguous prefix so the file never
                    # depends on completion order
                    while next_idx in pending:
                        rec = pending.pop(next_idx)
                        done.append(rec)
                        if fh is not None:
                            fh.write(_record_line(rec) + "\n")
                            unwritten += 1
                            if unwritten >= batch_size:
                                fh.flush()
                                unwritten = 0
                        next_idx += 1
                if fh is not None:
                    fh.flush()
    finally:
        if fh is not None:
            fh.close()

    grid.cells = done
    return grid


def write_csv(grid: ChartGrid, path, extra_header: tuple = ()) -> None:
    """Write cells as `axis1,axis2,value,status` sorted by cell index."""
    lines = [f"# {h}" for h in extra_header]
    lines.append(f"# chart job={grid.job} config={grid.config_hash} "
                 f"axes={grid.axis1.name},{grid.axis2.name} "
                 f"rotated={int(grid.rotated)}")
    lines.append("axis1,axis2,value,status")
    for c in sorted(grid.cells, key=lambda c: c.index):
        v = c.value if isinstance(c.value, str) else repr(float(c.value))
        lines.append(f"{c.c1!r},{c.c2!r},{v},{c.status}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def kneading_boundaries(grid: ChartGrid) -> list[tuple[CellRecord, CellRecord, int]]:
    """Adjacent ok-cell pairs whose kneading symbols first differ at
    some index; each pair brackets a homoclinic bifurcation between the
    two cell parameter points."""
    if grid.job != "kneading":
        raise ConfigError("kneading_boundaries requires a kneading grid")
    by_index = {c.index: c for c in grid.cells}
    n1 = grid.axis1.n
    out = []
    for c in grid.cells:
        if c.status != "ok":
            continue
        i2, i1 = divmod(c.index, n1)
        for j in ((c.index + 1) if i1 + 1 < n1 else None,
                  (c.index + n1) if i2 + 1 < grid.axis2.n else None):
            if j is None or j not in by_index:
                continue
            d = by_index[j]
            if d.status != "ok":
                continue
            sa = c.extra.get("symbols", "")
            sb = d.extra.get("symbols", "")
            m = min(len(sa), len(sb))
            if m == 0:
                continue
            diff = next((k for k in range(m) if sa[k] != sb[k]), None)
            if diff is not None:
                out.append((c, d, diff))
    return out


# ---------------------------------------------------------------------------
# figure presets (windows are approximate: the source figures carry no
# numeric axes, so the ranges below were read off the visible extents)

def _preset(axis1, axis2, rotated, job, options, note):
    return {"axis1": axis1, "axis2": axis2, "rotated": rotated, "job": job,
            "options": options, "note": note, "approximate": True}


PRESETS = {
    "fig6a": _preset(
        ChartAxis("alpha", 0.1, 1.0, 50), ChartAxis("lambda", 0.35, 1.35, 50),
        False, "lyapunov", {},
        "top Lyapunov exponent over the primary (alpha, lambda) window"),
    "fig6b": _preset(
        ChartAxis("alpha", 0.1, 1.0, 50), ChartAxis("lambda", 0.35, 1.35, 50),
        False, "kneading", {"K_N": 15, "skip": 1},
        "kneading-code chart over the primary (alpha, lambda) window"),
    "fig12a": _preset(
        ChartAxis("alpha", 0.44, 0.66, 50), ChartAxis("lambda", 0.50, 0.70, 50),
        False, "lyapunov", {},
        "Lyapunov zoom near the first branch points of the A=0 curve"),
    "fig12b": _preset(
        ChartAxis("alpha", 0.44, 0.66, 50), ChartAxis("lambda", 0.50, 0.70, 50),
        False, "kneading", {"K_N": 28, "skip": 1},
        "long-kneading zoom near the first branch points of the A=0 curve"),
    "fig14": _preset(
        ChartAxis("u", -0.004, 0.012, 50), ChartAxis("v", -0.001, 0.0002, 50),
        True, "kneading", {"K_N": 40, "skip": 3},
        "rotated-frame kneading chart around the codimension-2 point"),
    "fig16a": _preset(
        ChartAxis("u", -0.0035, 0.0005, 50), ChartAxis("v", -3e-5, 2e-5, 50),
        True, "short_beta", {},
        "short-segment minimal angle, wide deep-cascade window"),
    "fig16b": _preset(
        ChartAxis("u", -0.004, -0.002, 50), ChartAxis("v", 0.0, 2e-5, 50),
        True, "short_beta", {},
        "short-segment minimal angle, narrow deep-cascade window"),
}


def preset_spec(name: str, n: int | None = None) -> dict:
    """A copy of the named preset, optionally resampled to n x n."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    spec = dict(PRESETS[name])
    spec["options"] = dict(spec["options"])
    if n is not None:
        spec["axis1"] = replace(spec["axis1"], n=n)
        spec["axis2"] = replace(spec["axis2"], n=n)
    return spec
