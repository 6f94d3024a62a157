"""
Compiled kernel vs pure-Python fallback.

Each backend runs in a fresh interpreter (the backend is chosen at import),
times the same workloads and reports a digest of the results so the two can
be checked for agreement.

    python benchmarks/bench_kernel.py [--repeat 3] [--workloads table7,table15,straddle]
"""
import argparse
import hashlib
import json
import os
import subprocess
import sys
import time
from fractions import Fraction

WORKLOADS = ("table7", "table15", "straddle")


def _table(level):
    from lhmaass import tables
    from lhmaass.hecke import get_preset, hecke_function
    from lhmaass.localpoly import LocalPolyParams

    t = tables.table(level)
    out = []
    for D in t["Ds"]:
        h = hecke_function(LocalPolyParams(t["k"], t["N"], D, t["D0"]), get_preset(t["preset"]))
        out += [h(x) for x in t["xs"]]
    return out


def _straddle():
    from lhmaass.qforms import genus_data, straddle_power_sum

    out = []
    for delta, N, D0 in ((1073, 7, 29), (4636, 15, 61), (8633, 22, 89)):
        genus_data(D0, N)
        for q in range(1, 40):
            for p in range(q):
                out.append(straddle_power_sum(delta, N, D0, Fraction(p, q), 2))
    return out


def _clear_caches():
    from lhmaass import localpoly, qforms

    for mod in (localpoly, qforms):
        for obj in vars(mod).values():
            if hasattr(obj, "cache_clear"):
                obj.cache_clear()


def child(names, repeat):
    import lhmaass

    fns = {"table7": lambda: _table(7), "table15": lambda: _table(15), "straddle": _straddle}
    res = {"backend": lhmaass.BACKEND, "times": {}, "digest": {}}
    for name in names:
        best = float("inf")
        for _ in range(repeat):
            _clear_caches()
            t0 = time.perf_counter()
            vals = fns[name]()
            best = min(best, time.perf_counter() - t0)
        res["times"][name] = best
        res["digest"][name] = hashlib.sha256(repr(vals).encode()).hexdigest()[:16]
    print(json.dumps(res))


def run(pure, names, repeat):
    env = dict(os.environ)
    env["LHMAASS_PURE_PYTHON"] = "1" if pure else "0"
    cmd = [sys.executable, __file__, "--child", "--repeat", str(repeat), "--workloads", ",".join(names)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workloads", default=",".join(WORKLOADS))
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    names = [w for w in args.workloads.split(",") if w]
    unknown = set(names) - set(WORKLOADS)
    if unknown:
        ap.error(f"unknown workloads {sorted(unknown)}")
    if args.child:
        child(names, args.repeat)
        return 0
    fast = run(False, names, args.repeat)
    slow = run(True, names, args.repeat)
    if fast["backend"] == "python":
        print("warning: compiled kernel not available, both runs use the fallback")
    print(f"{'workload':<10} {fast['backend']:>10} {slow['backend']:>10} {'speedup':>8}  same")
    status = 0
    for name in names:
        a, b = fast["times"][name], slow["times"][name]
        same = fast["digest"][name] == slow["digest"][name]
        status |= not same
        print(f"{name:<10} {a:>9.3f}s {b:>9.3f}s {b / a:>7.1f}x  {'yes' if same else 'NO'}")
    return status


if __name__ == "__main__":
    sys.exit(main())
