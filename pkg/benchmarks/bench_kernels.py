"""Compare the numba and numpy kernels on the workloads the searches produce.

    python benchmarks/bench_kernels.py [--sizes 1000 20000 100000] [--repeat 3]

Both backends are called explicitly, so the RELAYSEC_BACKEND variable does not
matter here.  The first numba call (compilation, or cache load) is excluded.
"""

import argparse
import time

import numpy as np

from relaysec._accel import HAVE_NUMBA
from relaysec.gaussian import GaussianOrthogonalChannel, genie_program, joint_covariances, pdf_program
from relaysec.kernels import batch_conditional_mi, entropy_rows
from relaysec.optimizer import params_to_covariances


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def covariance_batch(n, seed=0):
    rng = np.random.default_rng(seed)
    ch = GaussianOrthogonalChannel(2.0, 1.0, 1.2, 0.6, 0.7, 0.9)
    X = np.column_stack([rng.random((n, 3)), rng.uniform(-0.5, 0.5, (n, 3))])
    K, lam = params_to_covariances(X)
    return joint_covariances(ch, K[lam >= 0])


def run(sizes, repeat):
    masks = np.vstack([pdf_program("case3").masks(), genie_program("case3").masks()])
    rows = []
    for n in sizes:
        sigma = covariance_batch(n)
        P = np.random.default_rng(1).dirichlet(np.ones(64), size=n)
        ref = batch_conditional_mi(sigma[:50], masks, use_numba=False)
        if HAVE_NUMBA:
            got = batch_conditional_mi(sigma[:50], masks, use_numba=True)
            entropy_rows(P[:5], use_numba=True)
            assert np.allclose(got, ref, atol=1e-12), "backends disagree"
        for name, fn in (
            ("gaussian_mi", lambda u: batch_conditional_mi(sigma, masks, use_numba=u)),
            ("entropy_rows", lambda u: entropy_rows(P, use_numba=u)),
        ):
            t_np = _best_of(lambda: fn(False), repeat)
            t_nb = _best_of(lambda: fn(True), repeat) if HAVE_NUMBA else float("nan")
            rows.append((name, len(sigma) if name == "gaussian_mi" else n, t_np, t_nb))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 20000, 100000])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    rows = run(args.sizes, args.repeat)
    print(f"{'kernel':<14}{'batch':>9}{'numpy s':>11}{'numba s':>11}{'speedup':>9}")
    for name, n, t_np, t_nb in rows:
        print(f"{name:<14}{n:>9}{t_np:>11.4f}{t_nb:>11.4f}{t_np / t_nb:>9.1f}")
    return rows


if __name__ == "__main__":
    main()
