#!/usr/bin/env python3
"""Census of gyration orbits: periods, rotation classes, face balance.

Walks every orbit of the alternating square ensemble, groups them by
the rotation class of their link patterns, and tallies the +1/-1 face
indicators per class, which come out balanced class by class.

    python scripts/orbit_census.py --n 4 [--face 3,2]
"""

import argparse
from collections import Counter, defaultdict

from fplrs.fplcore import link_data, plaquette_indicator
from fplrs.gyration import orbit_partition
from fplrs.lattice import build_square
from fplrs.linkpat import rotation_class_of


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=4)
    parser.add_argument("--sign", choices=["+", "-"], default="+")
    parser.add_argument("--face", default=None, help="x,y of one face to tally")
    args = parser.parse_args()

    d, _ = build_square(args.n, args.sign)
    face = tuple(int(v) for v in args.face.split(",")) if args.face else None

    orbits = orbit_partition(args.n, args.sign)
    periods = Counter(o.period for o in orbits)
    print(f"n={args.n}: {len(orbits)} orbits, periods {dict(sorted(periods.items()))}")

    per_class: dict[str, list] = defaultdict(list)
    balance: dict[str, Counter] = defaultdict(Counter)
    for o in orbits:
        configs = list(o.configs())
        cls = rotation_class_of(link_data(configs[0]).black).word
        per_class[cls].append(o.period)
        if face:
            for phi in configs:
                balance[cls][plaquette_indicator(phi, face)] += 1

    for cls, sizes in sorted(per_class.items()):
        line = f"  class {cls}: {len(sizes)} orbits, {sum(sizes)} configs"
        if face:
            b = balance[cls]
            line += f", face {face}: +1 x{b[1]}, -1 x{b[-1]}"
            assert b[1] == b[-1]
        print(line)
    if face:
        print("per-class +1/-1 tallies balance")


if __name__ == "__main__":
    main()
