"""Tour of the graph rankers on a hand-drawn network.

The little network below has a popular storefront everyone links to, a
mirror pair, a bridge connecting two neighborhoods, and one isolated
island, which is enough structure to tell the five algorithms apart.

Run:  python demos/02_graph_algorithms.py
"""

from onionrank import LinkGraph, centralities, hits, katz, kshell, pagerank, torank

edges = {
    # a dense neighborhood around "market"
    ("forum", "market"),
    ("blog", "market"),
    ("mirror1", "market"),
    ("mirror2", "market"),
    ("market", "forum"),
    # mirrors point at each other
    ("mirror1", "mirror2"),
    ("mirror2", "mirror1"),
    # a second neighborhood reachable only through the bridge
    ("market", "bridge"),
    ("bridge", "shop"),
    ("shop", "vendor"),
    ("vendor", "shop"),
}
graph = LinkGraph(
    nodes=frozenset(n for e in edges for n in e) | {"island"},
    edges=frozenset(edges),
)

print(f"{len(graph.nodes)} nodes, {len(graph.edges)} edges\n")

pr = pagerank(graph)
print("pagerank (mass sums to 1):")
for node, score in pr.entries[:4]:
    print(f"  {node:8s} {score:.4f}")

auth = hits(graph)
print("\nhits authorities (the most linked-to node dominates):")
for node, score in auth.ranking().entries[:3]:
    print(f"  {node:8s} {score:.4f}")

kz = katz(graph, alpha=0.1, beta=1.0)
print("\nkatz (every node keeps a beta baseline):")
for node, score in kz.entries[:3]:
    print(f"  {node:8s} {score:.4f}")

tr = torank(graph)
print("\ntorank removal order (rank 1 hurts connectivity most):")
for i, (node, score) in enumerate(tr.entries[:4], start=1):
    print(f"  {i}. {node:8s} score {score:.3f}")

cent = centralities(graph)
print("\nbetweenness highlights the bridge:")
top = sorted(cent.betweenness.items(), key=lambda kv: -kv[1])[:3]
for node, value in top:
    print(f"  {node:8s} {value:.2f}")

shells = kshell(graph.nodes, [tuple(e) for e in graph.edges])
print("\nk-shell indices (undirected view):")
for node in sorted(shells, key=lambda n: (-shells[n], n)):
    print(f"  {node:8s} shell {shells[node]}")
