#!/usr/bin/env python3
"""Independent validation of isle CLI outputs.

Re-derives the structural checks straight from the edge list and the JSON
files, with no project code involved. Usage:

    validate_outputs.py DIR [--layers D0,D1,...]

DIR must contain g.edges, result.json, report.json, c_island.json,
c_pull.json, c_push.json, spy.pgm, spy.csv (see .claude/skills/verify).
"""

import argparse
import collections
import json
import os
import sys


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("dir")
    ap.add_argument("--layers", default="32,16,4")
    args = ap.parse_args()
    d = args.dir
    dims = [int(x) for x in args.layers.split(",")]

    edges = set()
    adj = collections.defaultdict(set)
    n = 0
    for line in open(os.path.join(d, "g.edges")):
        u, v = map(int, line.split())
        edges.add((min(u, v), max(u, v)))
        adj[u].add(v)
        adj[v].add(u)
        n = max(n, u + 1, v + 1)

    r = json.load(open(os.path.join(d, "result.json")))
    assert r["num_nodes"] == n, "node count"
    hubs = set(r["hubs"])
    seen = set(hubs)
    covered = 0
    for isl in r["islands"]:
        nodes = isl["nodes"]
        assert len(nodes) >= 1, "empty island"
        for u in nodes:
            assert u not in seen, f"node {u} classified twice"
            seen.add(u)
        member = set(nodes)
        for u in nodes:  # closure: neighbors are in-island or hubs
            for v in adj[u]:
                assert v in member or v in hubs, f"closure breach {u}->{v}"
        hub_ids, nn = isl["hubs"], len(nodes)
        bits, val = [], 0
        for run in isl["bitmap_rle"]:
            bits.extend([val] * run)
            val ^= 1
        assert len(bits) == (len(hub_ids) + nn) * nn, "rle length"
        for i in range(len(hub_ids) + nn):
            ent = hub_ids[i] if i < len(hub_ids) else nodes[i - len(hub_ids)]
            for j in range(nn):
                want = int(ent != nodes[j] and
                           (min(ent, nodes[j]), max(ent, nodes[j])) in edges)
                assert bits[i * nn + j] == want, f"bitmap bit ({i},{j})"
        covered += sum(bits[: len(hub_ids) * nn]) + sum(bits[len(hub_ids) * nn:]) // 2

    ih = {tuple(e) for e in r["inter_hub_edges"]}
    assert len(ih) == len(r["inter_hub_edges"]), "inter-hub dedup"
    for u, v in ih:
        assert u in hubs and v in hubs and (u, v) in edges, "inter-hub validity"
    assert seen == set(range(n)), "partition totality"
    assert covered + len(ih) == len(edges), f"edge cover {covered}+{len(ih)} != {len(edges)}"

    rep = json.load(open(os.path.join(d, "report.json")))
    t = rep["total"]
    want_macs = sum(n * dims[i] * dims[i + 1] for i in range(len(dims) - 1))
    assert t["combination_macs"] == want_macs, "mac identity"
    assert t["baseline_adds"] == (len(dims) - 1) * 2 * len(edges), "baseline identity"
    assert 0 < t["pruning_rate"] < 1, "pruning rate sane"
    assert len(rep["per_layer"]) == len(dims) - 1, "per-layer ledgers"

    ci = json.load(open(os.path.join(d, "c_island.json")))
    cp = json.load(open(os.path.join(d, "c_pull.json")))
    cq = json.load(open(os.path.join(d, "c_push.json")))
    assert ci["reads_words"] < cp["reads_words"], "island < pull-row reads"
    assert ci["reads_words"] < cq["reads_words"], "island < push-outer reads"

    header = open(os.path.join(d, "spy.pgm"), "rb").read(20).split()
    assert header[0] == b"P5" and int(header[1]) == min(1024, n), "pgm header"
    csv_rows = sum(1 for _ in open(os.path.join(d, "spy.csv"))) - 1
    assert csv_rows == 2 * len(edges), "spy csv coordinate count"

    print(f"OK: n={n} E={len(edges)} hubs={len(hubs)} islands={len(r['islands'])} "
          f"cover={covered}+{len(ih)} pruning={t['pruning_rate']:.3f} "
          f"reads island/pull/push={ci['reads_words']}/{cp['reads_words']}/{cq['reads_words']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
