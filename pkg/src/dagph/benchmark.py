"""Runtime scaling of the two rank engines on doubling instance families.

Run ``python -m dagph.benchmark [out.json]``. Each family is timed at four
or more doubling sizes; the exponent is the slope of a least-squares fit of
log(time) against log(size).
"""

from __future__ import annotations

import json
import math
import random
import sys
import time

import numpy as np

from .dagmodel import SubgraphSelector, path_filtration
from .linalg import PrimeField
from .simplicial import close_under_faces
from .ssss import all_pairs_rank
from .subgraph import persistence_rank

F = PrimeField(46337)


def cylinder(m: int):
    """Triangulated cylinder with ``m`` segments per boundary circle."""
    tris = []
    for i in range(m):
        a, b = i, (i + 1) % m
        tris.append(tuple(sorted((a, b, m + a))))
        tris.append(tuple(sorted((b, m + a, m + b))))
    return close_under_faces(tris)


def random_order(cx, seed: int) -> list:
    """Face-respecting random insertion order of all simplices."""
    rng = random.Random(seed)
    members: set = set()
    order = []
    while len(order) < len(cx):
        ready = [s for s in range(len(cx)) if s not in members
                 and all(f in members for f in cx.face_ids[s])]
        sid = rng.choice(ready)
        members.add(sid)
        order.append(sid)
    return order


def _time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def loglog_slope(sizes, times) -> float:
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(times, dtype=float), 1e-6))
    return float(np.polyfit(x, y, 1)[0])


def run(segments=(3, 6, 12, 24), repeats: int = 2, k: int = 1) -> dict:
    """Time ``all_pairs_rank`` and whole-path ``persistence_rank`` on cylinder paths.

    Size is the number of vertices of the path (simplices of the complex).
    """
    out = {}
    sizes, t_pairs, t_sub = [], [], []
    for m in segments:
        cx = cylinder(m)
        path = path_filtration(cx, random_order(cx, m))
        sel = SubgraphSelector.whole(path)
        sizes.append(len(path.vertices))
        t_pairs.append(_time(lambda: all_pairs_rank(path, k, F), repeats))
        t_sub.append(_time(lambda: persistence_rank(path, sel, k, F), repeats))
    for name, times in (("all_pairs_rank", t_pairs), ("persistence_rank", t_sub)):
        out[name] = {"sizes": sizes, "seconds": times, "exponent": loglog_slope(sizes, times)}
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    res = run()
    text = json.dumps(res, indent=2) + "\n"
    if argv:
        with open(argv[0], "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
