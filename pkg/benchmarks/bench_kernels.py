"""Time the numba and numpy kernel backends on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row runs one workload on every backend, checks the outputs agree
word for word, and reports the best wall time of ``--repeat`` runs.  The
first numba call of each kernel is compiled before timing starts.
"""

import argparse
import time

import numpy as np

from sumset_orders import _bitset, _kernels


def _sparse(rng, count, span):
    return np.unique(np.concatenate([[0], rng.integers(0, span, count)])).astype(np.int64)


def workloads(quick):
    rng = np.random.default_rng(7)
    scale = 1 if quick else 4
    out = []

    for count, span in [(200 * scale, 10 ** 6), (2000 * scale, 10 ** 5)]:
        xs, ys = _sparse(rng, count, span), _sparse(rng, count, span)

        def pairs(k, xs=xs, ys=ys, span=span):
            buf = np.zeros(_bitset.nwords(2 * span) + 1, dtype=np.uint64)
            k.sum_pairs(buf, xs, ys)
            return buf
        out.append((f"sum_pairs {len(xs)}x{len(ys)}", pairs))

    src = _bitset.BitSet.from_elements(_sparse(rng, 50_000 * scale, 4 * 10 ** 6))
    shifts = _sparse(rng, 300 * scale, 10 ** 5)

    def shifted(k):
        buf = np.zeros(_bitset.nwords(src.nbits + int(shifts[-1])) + 1, dtype=np.uint64)
        k.sum_elements(buf, shifts, src.words)
        return buf
    out.append((f"sum_elements {len(shifts)} shifts of {src.nbits} bits", shifted))

    p, t = 3, 8 if not quick else 7
    idx = np.unique(rng.integers(0, p ** t, 400 * scale)).astype(np.int64)

    def modp(k):
        buf = np.zeros(p ** t, dtype=np.uint8)
        k.modp_sum_pairs(buf, idx, idx, p, t)
        return buf
    out.append((f"modp_sum_pairs {len(idx)}^2 in (Z/{p})^{t}", modp))

    base = _bitset.BitSet.from_elements(np.array([0, 1, 3, 7, 12, 20, 33, 54, 88, 143], dtype=np.int64))
    h = 60 * scale

    def hfold(k):
        return _bitset.hfold(base, h, k).words
    out.append((f"hfold h={h} of a 10-element set", hfold))
    return out


def best_time(fn, k, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(k)
        times.append(time.perf_counter() - start)
    return min(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)

    backends = _kernels.backends()
    names = [k.name for k in backends]
    print(f"{'workload':<48}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")
    for label, fn in workloads(args.quick):
        for k in backends:
            fn(k)  # compile / warm caches
        timed = [best_time(fn, k, args.repeat) for k in backends]
        ref = timed[0][1]
        for (_, res), k in zip(timed[1:], backends[1:]):
            if not np.array_equal(res, ref):
                raise SystemExit(f"{label}: backend {k.name} disagrees with {backends[0].name}")
        cells = "".join(f"{t * 1e3:>10.1f}ms" for t, _ in timed)
        speedup = timed[0][0] / timed[-1][0] if len(timed) > 1 else 1.0
        print(f"{label:<48}{cells}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()
