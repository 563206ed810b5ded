#!/usr/bin/env python3
"""Convert the relational mutagenesis molecules into TUDataset text files.

The input is the pair of files shipped as
neuralogic/utils/data/datasets/molecules/mutagenesis/{examples,queries}.txt
in the `neuralogic` wheel on PyPI. Hydrogen atoms are dropped, which yields
the heavy-atom graphs of the 188-molecule MUTAG benchmark.

usage: mutagenesis_to_tudataset.py EXAMPLES QUERIES OUTDIR [NAME]
"""
import os
import re
import sys

# element -> node label, following the MUTAG label convention
ELEMENTS = {"c": 0, "n": 1, "o": 2, "f": 3, "i": 4, "cl": 5, "br": 6}

ATOM = re.compile(r"\b([a-z]+)\((d\w+?)_(\d+)\)")
BOND = re.compile(r"bond\((d\w+?)_(\d+), (d\w+?)_(\d+), \d+\)")


def main():
    examples, queries, outdir = sys.argv[1:4]
    name = sys.argv[4] if len(sys.argv) > 4 else "MUTAG"
    ex_lines = [l for l in open(examples).read().splitlines() if l.strip()]
    q_lines = [l for l in open(queries).read().splitlines() if l.strip()]
    assert len(ex_lines) == len(q_lines)
    os.makedirs(outdir, exist_ok=True)
    edges, indicator, node_labels, graph_labels = [], [], [], []
    offset = 0
    for gid, (ex, q) in enumerate(zip(ex_lines, q_lines), start=1):
        atoms = {}
        for elem, _, idx in ATOM.findall(ex):
            if elem == "h":
                continue
            atoms[int(idx)] = ELEMENTS[elem]
        order = sorted(atoms)
        local = {a: i for i, a in enumerate(order)}
        for a in order:
            indicator.append(gid)
            node_labels.append(atoms[a])
        seen = set()
        for _, a, _, b in BOND.findall(ex):
            a, b = int(a), int(b)
            if a in local and b in local:
                seen.add((local[a], local[b]))
                seen.add((local[b], local[a]))
        for u, v in sorted(seen):
            edges.append((u + offset + 1, v + offset + 1))
        offset += len(order)
        graph_labels.append(1 if float(q.split()[0]) > 0.5 else -1)

    def write(suffix, rows):
        with open(os.path.join(outdir, f"{name}_{suffix}.txt"), "w") as f:
            f.writelines(r + "\n" for r in rows)

    write("A", [f"{u}, {v}" for u, v in edges])
    write("graph_indicator", [str(g) for g in indicator])
    write("node_labels", [str(l) for l in node_labels])
    write("graph_labels", [str(l) for l in graph_labels])


if __name__ == "__main__":
    main()
