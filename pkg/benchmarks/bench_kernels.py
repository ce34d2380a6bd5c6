"""Timing comparison of the compiled kernels against the pure-Python
fallback (SHIMOR_DISABLE_NUMBA=1), with a cross-check that both
backends produce identical numbers.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import os
import subprocess
import sys
import time

WORKLOADS = ("integrate", "spectrum", "kneading", "clv")


def _run_workload(name):
    import numpy as np

    from shimor import dynsys, kneading, lyap
    from shimor.integrate import integrate, separatrix_seed

    p = dynsys.sm(0.4, 0.9)
    s0 = separatrix_seed(p, "plus")
    if name == "integrate":
        tr = integrate(p, s0, 200.0, sample_dt=0.5)
        return float(np.sum(tr.states)), tr.states.shape[0]
    if name == "spectrum":
        sp = lyap.lyapunov_spectrum(p, s0, T=300.0, transient=50.0)
        return float(np.sum(sp.exponents)), 3
    if name == "kneading":
        seq = kneading.kneading_sequence(p, N=10)
        return float(seq.t_end), len(seq.symbols)
    if name == "clv":
        run = lyap.covariant_vectors(p, s0, T=300.0, transient_fwd=50.0,
                                     transient_bwd=50.0, frame_mode="stride")
        return float(np.sum(run.V)), len(run)
    raise SystemExit(f"unknown workload {name}")


def _worker(name):
    _run_workload(name)          # warm-up (JIT compile / cache load)
    t0 = time.perf_counter()
    checksum, n = _run_workload(name)
    dt = time.perf_counter() - t0
    print(f"RESULT {name} {dt!r} {checksum!r} {n}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--worker", default=None, help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        _worker(args.worker)
        return

    rows = {}
    for name in WORKLOADS:
        for disable in ("0", "1"):
            env = dict(os.environ, SHIMOR_DISABLE_NUMBA=disable)
            out = subprocess.run(
                [sys.executable, os.path.abspath(__file__), "--worker", name],
                capture_output=True, text=True, env=env, check=True)
            line = [ln for ln in out.stdout.splitlines()
                    if ln.startswith("RESULT")][0]
            _, _, dt, checksum, n = line.split()
            rows.setdefault(name, {})[disable] = (float(dt), checksum, n)

    print(f"{'workload':<12} {'kernels':>10} {'fallback':>10} "
          f"{'speedup':>8}  identical")
    for name in WORKLOADS:
        fast, chk_f, n_f = rows[name]["0"]
        slow, chk_s, n_s = rows[name]["1"]
        same = (chk_f == chk_s) and (n_f == n_s)
        print(f"{name:<12} {fast:>9.3f}s {slow:>9.3f}s "
              f"{slow / fast:>7.1f}x  {same}")
        if not same:
            print(f"  backend mismatch: {chk_f}/{n_f} vs {chk_s}/{n_s}")
            sys.exit(1)


if __name__ == "__main__":
    main()
