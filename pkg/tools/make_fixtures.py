"""Regenerate the bundled newform fixtures with PARI/GP (via cypari2).

Only needed by maintainers; the package and its tests read the shipped
gzip files and never import cypari2.

    python tools/make_fixtures.py --pmax 200000
"""
import argparse
import gzip
import json
from pathlib import Path

import cypari2

# label -> (level, index in PARI's mfeigenbasis, Atkin-Lehner signs)
ORBITS = {
    "7.4.a.a": (7, 1),
    "15.4.a.b": (15, 1),
    "22.4.a.b": (22, 2),
}

OUT = Path(__file__).resolve().parents[1] / "src" / "lhmaass" / "data" / "fixtures"


def build(pari, label, level, idx, pmax):
    f = pari(f"mfeigenbasis(mfinit([{level},4],0))[{idx}]")
    coeffs = pari.mfcoefs(f, pmax)
    ap = [[int(p), int(coeffs[int(p)])] for p in pari.primes([2, pmax])]
    al = {}
    for l in pari.factor(level)[0]:
        l = int(l)
        # for p || N the Atkin-Lehner eigenvalue is -a_p / p^(k-1), k = 2 here
        al[str(l)] = -int(coeffs[l]) // l
    return {"label": label, "level": level, "weight": 4,
            "atkin_lehner": al, "ap": ap}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pmax", type=int, default=200000)
    args = ap.parse_args()
    pari = cypari2.Pari()
    pari.allocatemem(4 * 10**9)
    OUT.mkdir(parents=True, exist_ok=True)
    for label, (level, idx) in ORBITS.items():
        doc = build(pari, label, level, idx, args.pmax)
        path = OUT / f"{label}.json.gz"
        with gzip.open(path, "wt") as fh:
            json.dump(doc, fh, separators=(",", ":"))
        print(label, doc["atkin_lehner"], len(doc["ap"]), "primes ->", path.name)


if __name__ == "__main__":
    main()
