"""De Bruijn multigraphs and exhaustive reconstruction of genomes from a spectrum.

Every string with a given k-spectrum spells an Eulerian path of the
multigraph whose nodes are (k-1)-mers and whose edges are the spectrum's
k-mers, each usable as many times as its multiplicity.  Enumerating those
paths is exponential in general, so the enumeration refuses spectra whose
total exceeds a guard bound.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .seqcore import Genome
from .spectrum import KSpectrum, compute_spectrum

__all__ = [
    "DEFAULT_GUARD",
    "DeBruijnMultigraph",
    "GuardExceeded",
    "build_graph",
    "enumerate_genomes",
    "is_k_univocal",
    "minimal_univocal_k",
]

DEFAULT_GUARD = 24


class GuardExceeded(RuntimeError):
    """The spectrum is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class DeBruijnMultigraph:
    k: int
    nodes: frozenset[str]
    edges: dict[str, int]
    # node -> outgoing edge labels in alphabet order
    out_edges: dict[str, tuple[str, ...]] = field(repr=False)

    def out_degree(self, node: str) -> int:
        return sum(self.edges[e] for e in self.out_edges.get(node, ()))

    def in_degree(self, node: str) -> int:
        return sum(m for e, m in self.edges.items() if e[1:] == node)


def build_graph(spec: KSpectrum) -> DeBruijnMultigraph:
    if not spec:
        raise ValueError("cannot build a de Bruijn graph from an empty spectrum")
    words = [w for w, _ in spec.sorted_items()]
    nodes = frozenset(w[:-1] for w in words) | frozenset(w[1:] for w in words)
    out: dict[str, list[str]] = {}
    for w in words:
        out.setdefault(w[:-1], []).append(w)
    return DeBruijnMultigraph(
        k=spec.k,
        nodes=nodes,
        edges=dict(spec.entries),
        out_edges={n: tuple(es) for n, es in out.items()},
    )


def _start_nodes(graph: DeBruijnMultigraph, order) -> list[str]:
    balance: Counter = Counter()
    for e, m in graph.edges.items():
        balance[e[:-1]] += m
        balance[e[1:]] -= m
    surplus = [n for n, b in balance.items() if b > 0]
    if any(abs(b) > 1 for b in balance.values()) or len(surplus) > 1:
        return []
    if surplus:
        return surplus
    return order([n for n in graph.nodes if n in graph.out_edges])


def enumerate_genomes(spec: KSpectrum, limit: int | None = None,
                      guard: int = DEFAULT_GUARD) -> list[str]:
    """All distinct strings whose k-spectrum equals ``spec``, in lexicographic order.

    At most ``limit`` strings are returned (the lexicographically first ones).
    Raises :class:`GuardExceeded` if ``spec.total > guard``.
    """
    if spec.total > guard:
        raise GuardExceeded(f"spectrum total {spec.total} exceeds enumeration guard {guard}")
    graph = build_graph(spec)
    alpha = spec.alphabet
    order = alpha.sorted_words if alpha else sorted
    counts = dict(graph.edges)
    out_left = Counter({n: graph.out_degree(n) for n in graph.out_edges})
    total = spec.total
    found: list[str] = []

    for start in _start_nodes(graph, order):
        word = list(start)
        remaining = total
        # frames: (edge taken to reach this node, iterator over its out-edges)
        stack = [(None, iter(graph.out_edges.get(start, ())))]
        while stack:
            _, it = stack[-1]
            for e in it:
                if not counts[e]:
                    continue
                nxt = e[1:]
                if remaining > 1 and out_left[nxt] - (nxt == e[:-1]) <= 0:
                    continue  # would strand unused edges
                if remaining == 1:
                    found.append("".join(word) + e[-1])
                    if limit is not None and len(found) >= limit:
                        return found
                    continue
                counts[e] -= 1
                out_left[e[:-1]] -= 1
                remaining -= 1
                word.append(e[-1])
                stack.append((e, iter(graph.out_edges.get(nxt, ()))))
                break
            else:
                edge, _ = stack.pop()
                if edge is not None:
                    counts[edge] += 1
                    out_left[edge[:-1]] += 1
                    remaining += 1
                    word.pop()
    return found


def _unmasked_text(g: Genome) -> str:
    if g.mask:
        raise ValueError(f"univocality is defined for unmasked genomes; {g.name!r} has masked positions")
    return g.text


def is_k_univocal(g: Genome, k: int, guard: int = DEFAULT_GUARD) -> bool:
    """True iff ``g`` is the only string with its k-spectrum."""
    text = _unmasked_text(g)
    spec = compute_spectrum(g, k)
    return enumerate_genomes(spec, limit=2, guard=guard) == [text]


def minimal_univocal_k(g: Genome, guard: int = DEFAULT_GUARD) -> int:
    """Smallest k for which ``g`` is k-univocal (linear scan from k = 1)."""
    text = _unmasked_text(g)
    for k in range(1, len(text) + 1):
        if is_k_univocal(g, k, guard):
            return k
    return len(text)
