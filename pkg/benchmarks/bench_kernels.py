"""Time the numba and numpy kernels on generated S5-sized inputs.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 120,240,480,720] [--repeat 3]

Both flavours run on identical inputs; the script checks they agree before
reporting the best wall time of ``--repeat`` calls.
"""
import argparse
import time

import numpy as np

from lart import kernels
from lart._accel import HAVE_NUMBA
from lart.cluster import mergeable
from lart.core import Multiplex, build_supra
from lart.dissim import dissimilarity_matrix
from lart.synthgen import ScenarioConfig, generate
from lart.walk import walk


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def inputs(size, seed=0):
    # S5 has 4 layers; shrink N to hit the requested NL
    m, _ = generate(ScenarioConfig("S5", seed))
    n = max(2, size // m.num_layers)
    if n < m.num_nodes:
        m = Multiplex(n, m.num_layers,
                      tuple([(u, v) for u, v in layer if v < n] for layer in m.layers))
    sa = build_supra(m)
    tp = walk(sa, 3 * m.num_layers)
    X = tp.matrix / np.sqrt(tp.degrees)[None, :]
    S = dissimilarity_matrix(tp).values
    return m, X, S, mergeable(sa)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="120,240,480,720")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    # compile once outside the timings
    m, X, S, conn = inputs(16)
    kernels._dissimilarity_numba(X, m.num_nodes, m.num_layers)
    kernels._linkage_numba(S, conn)

    print(f"{'NL':>5} {'kernel':<14} {'numpy s':>9} {'numba s':>9} {'speedup':>8}")
    for size in (int(s) for s in args.sizes.split(",")):
        m, X, S, conn = inputs(size)
        n, L = m.num_nodes, m.num_layers
        t_np, d_np = best_of(lambda: kernels._dissimilarity_numpy(X, n, L), args.repeat)
        t_nb, d_nb = best_of(lambda: kernels._dissimilarity_numba(X, n, L), args.repeat)
        assert np.allclose(d_np, d_nb, rtol=0, atol=1e-13)
        print(f"{n * L:>5} {'dissimilarity':<14} {t_np:>9.3f} {t_nb:>9.3f} {t_np / t_nb:>7.1f}x")
        t_np, l_np = best_of(lambda: kernels._linkage_numpy(S, conn), args.repeat)
        t_nb, l_nb = best_of(lambda: kernels._linkage_numba(S, conn), args.repeat)
        assert np.array_equal(l_np[0], l_nb[0])
        print(f"{n * L:>5} {'linkage':<14} {t_np:>9.3f} {t_nb:>9.3f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
