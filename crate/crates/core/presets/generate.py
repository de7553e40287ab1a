#!/usr/bin/env python3
"""Regenerates the bundled .topo presets. Run from this directory."""

DELAY_MS = 1
BANDWIDTH = 1000


def write(path, header, nodes, links):
    with open(path, "w") as f:
        for line in header:
            f.write(f"# {line}\n")
        for nid, label, role in nodes:
            f.write(f"node {nid} {label} {role}\n")
        for a, b in links:
            f.write(f"link {a} {b} {DELAY_MS} {BANDWIDTH}\n")


def nsfnet(extra_consumer):
    nodes, links = [], []
    routers = list(range(11))
    for r in routers:
        nodes.append((r, f"r{r}", "router"))
    links += [(r, (r + 1) % 11) for r in routers]
    links += [(0, 5), (2, 8), (3, 7), (1, 9)]
    for r in routers:
        for k in range(2):
            cid = 11 + 2 * r + k
            nodes.append((cid, f"c{cid - 11}", "consumer"))
            links.append((r, cid))
    for r in routers:
        nodes.append((33 + r, f"s{r}", "resolver"))
        links.append((r, 33 + r))
    # producer 44 hangs off consumer 11, 45 shares its router, the rest sit farther out
    producer_at = {44: None, 45: 0, 46: 3, 47: 7, 48: 4, 49: 8, 50: 2, 51: 6}
    for pid, r in producer_at.items():
        nodes.append((pid, f"p{pid - 44}", "producer"))
        links.append((11, pid) if r is None else (r, pid))
    nodes.append((52, "tld0", "tld"))
    links.append((6, 52))
    nodes.append((53, "ns0", "nameserver"))
    links.append((9, 53))
    if extra_consumer:
        nodes.append((54, "c22", "consumer"))
        links.append((5, 54))
    return nodes, links


def oteglobe():
    nodes, links = [], []
    for r in range(61):
        nodes.append((r, f"r{r}", "router"))
    core = list(range(13))
    links += [(r, (r + 1) % 13) for r in core]
    links += [(0, 6), (3, 9), (2, 10), (5, 11)]
    # chain A: 13..36 from router 0; chain B: 37..48 from 4; chain C: 49..60 from 8
    for start, end, root in [(13, 36, 0), (37, 48, 4), (49, 60, 8)]:
        prev = root
        for r in range(start, end + 1):
            links.append((prev, r))
            prev = r
    # the first eight resolvers share router 0; the rest take one router each
    for k in range(61):
        sid = 61 + k
        nodes.append((sid, f"s{k}", "resolver"))
        links.append((0 if k < 8 else k - 7, sid))
    consumers = 271
    for k in range(consumers):
        cid = 122 + k
        nodes.append((cid, f"c{k}", "consumer"))
        links.append(((1 + k) % 61, cid))
    for j in range(32):
        pid = 122 + consumers + j
        nodes.append((pid, f"p{j}", "producer"))
        links.append((13 + j % 24, pid))
    nodes.append((425, "tld0", "tld"))
    links.append((6, 425))
    nodes.append((426, "ns0", "nameserver"))
    links.append((10, 426))
    return nodes, links


if __name__ == "__main__":
    write("nsfnet.topo", ["NSFnet-like backbone: 11 routers, 22 consumers, 11 resolvers, 8 producers, 1 tld, 1 nameserver"], *nsfnet(False))
    write("nsfnet-populated.topo", ["nsfnet plus one consumer (c22) on router 5"], *nsfnet(True))
    write("oteglobe.topo", ["OTEGlobe-like: 61 routers (13 core, chains of 24/12/12), 61 resolvers, 305 hosts"], *oteglobe())
