#!/usr/bin/env python
"""Regenerate the shipped lattice catalog (src/k3frob/data/*.json).

Asserts the defining properties of every entry before writing: determinants,
parities, signatures.  Run from the repository root.
"""

from __future__ import annotations

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from k3frob.k3families import Lattice  # noqa: E402

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "k3frob" / "data"

# Simply-laced E8 diagram: chain 1-3-4-5-6-7-8 with node 2 attached to node 4.
_E8_EDGES = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]


def e8_cartan() -> list[list[int]]:
    g = [[2 if i == j else 0 for j in range(8)] for i in range(8)]
    for a, b in _E8_EDGES:
        g[a - 1][b - 1] = g[b - 1][a - 1] = -1
    return g


def negate(g: list[list[int]]) -> list[list[int]]:
    return [[-x for x in row] for row in g]


def block_sum(*blocks: list[list[int]]) -> list[list[int]]:
    total = sum(len(b) for b in blocks)
    out = [[0] * total for _ in range(total)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


def main() -> None:
    u = [[0, 1], [1, 0]]
    e8m = negate(e8_cartan())
    entries = {
        "U": Lattice(tuple(map(tuple, u)), "U"),
        "E8_minus": Lattice(tuple(map(tuple, e8m)), "E8_minus"),
        "K3_Lambda": Lattice(tuple(map(tuple, block_sum(e8m, e8m, u, u, u))), "K3_Lambda"),
        "FermatT": Lattice(((8, 0), (0, 8)), "FermatT"),
        "FermatNS": Lattice(
            tuple(map(tuple, block_sum(e8m, e8m, u, [[-8, 0], [0, -8]]))), "FermatNS"
        ),
    }

    expected = {
        # name: (rank, det, even, signature)
        "U": (2, -1, True, (1, 1)),
        "E8_minus": (8, 1, True, (0, 8)),
        "K3_Lambda": (22, -1, True, (3, 19)),
        "FermatT": (2, 64, True, (2, 0)),
        "FermatNS": (20, -64, True, (1, 19)),
    }
    for name, lat in entries.items():
        rank, det, even, sig = expected[name]
        assert lat.rank == rank, (name, lat.rank)
        assert lat.det() == det, (name, lat.det())
        assert lat.is_even() == even, name
        assert lat.signature() == sig, (name, lat.signature())

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for name, lat in entries.items():
        path = DATA_DIR / f"{name}.json"
        path.write_text(json.dumps(lat.to_jsonable(), indent=1) + "\n", encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
