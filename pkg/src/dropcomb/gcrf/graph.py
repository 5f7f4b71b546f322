"""Comb-shaped factor graph over a snippet.

Step 1 links the tokens of each simple utterance into a horizontal chain and
the first tokens of consecutive utterances into a vertical spine. Step 2
refines the spine: an utterance opening with an overt pronoun gets an
observed spine node carrying that pronoun's label (its own chain leaves the
spine), and an utterance opening with an interjection is skipped so the
spine joins its neighbours directly.
"""
from dataclasses import dataclass, replace
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

from ..corpus.types import Snippet, Utterance
from .lexicon import InterjectionLexicon, PronounLexicon

DEFAULT_PUNCTUATION = frozenset({'，', '。', '？', '！', '；', ',', '.', '?', '!', ';'})

Node = Tuple[Hashable, ...]


def split_compound(turn: Utterance,
                   punctuation: Iterable[str] = DEFAULT_PUNCTUATION) -> List[Utterance]:
    """Split a turn after each punctuation token.

    Punctuation stays with the fragment it closes and empty fragments are
    dropped, so no fragment consists of a leading punctuation mark.
    """
    marks = frozenset(punctuation)
    pieces: List[Utterance] = []
    current: list = []
    for token in turn.tokens:
        current.append(token)
        if token.surface in marks:
            pieces.append(turn.with_tokens(tuple(current)))
            current = []
    if current:
        pieces.append(turn.with_tokens(tuple(current)))
    return pieces


def make_splitter(punctuation: Iterable[str] = DEFAULT_PUNCTUATION
                  ) -> Callable[[Utterance], List[Utterance]]:
    """Bind ``split_compound`` to a fixed set of utterance-final marks.

    Args:
        punctuation: Tokens after which a compound turn is split

    Returns:
        A function from a turn to its simple utterances
    """
    marks = frozenset(punctuation)
    return lambda turn: split_compound(turn, marks)


@dataclass(frozen=True)
class SpineEntry:
    """A spine node: latent (the chain head of ``utterance``) or an observed OVP."""

    utterance: int
    label: Optional[int] = None

    @property
    def observed(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class CombGraph:
    """Horizontal chains, one per utterance, plus the refined spine."""

    chains: Tuple[Tuple[Tuple[int, int], ...], ...]
    spine: Tuple[SpineEntry, ...]
    first_tokens: Tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.chains)

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.chains)

    @property
    def token_count(self) -> int:
        return sum(self.lengths)

    def spine_entry(self, i: int) -> Optional[SpineEntry]:
        for entry in self.spine:
            if entry.utterance == i:
                return entry
        return None

    def attached(self) -> FrozenSet[int]:
        """Utterances whose chain head sits on the spine."""
        return frozenset(e.utterance for e in self.spine if not e.observed)

    def detached(self) -> Tuple[int, ...]:
        """Utterances whose chain is inferred on its own (skipped or OVP)."""
        attached = self.attached()
        return tuple(i for i in range(self.n) if i not in attached)

    def skipped(self) -> Tuple[int, ...]:
        on_spine = {e.utterance for e in self.spine}
        return tuple(i for i in range(self.n) if i not in on_spine)

    def observed(self) -> Tuple[SpineEntry, ...]:
        return tuple(e for e in self.spine if e.observed)

    @staticmethod
    def spine_node(entry: SpineEntry) -> Node:
        return ('ovp', entry.utterance) if entry.observed else ('tok', entry.utterance, 0)

    def nodes(self) -> List[Node]:
        nodes: List[Node] = [('tok', i, j) for chain in self.chains for (i, j) in chain]
        nodes += [self.spine_node(e) for e in self.spine if e.observed]
        return nodes

    def edges(self) -> List[Tuple[Node, Node]]:
        edges = []
        for chain in self.chains:
            for (i, j), (k, l) in zip(chain, chain[1:]):
                edges.append((('tok', i, j), ('tok', k, l)))
        for first, second in zip(self.spine, self.spine[1:]):
            edges.append((self.spine_node(first), self.spine_node(second)))
        return edges

    def components(self) -> int:
        """Connected-component count (meaningful on a forest)."""
        return len(self.nodes()) - len(self.edges())


def build_initial_graph(snippet: Snippet) -> CombGraph:
    """Step 1: one chain per utterance and a latent spine over every head."""
    chains = tuple(tuple((i, j) for j in range(len(u))) for i, u in enumerate(snippet.utterances))
    spine = tuple(SpineEntry(i) for i in range(len(snippet)))
    firsts = tuple(u.tokens[0].surface for u in snippet.utterances)
    return CombGraph(chains, spine, firsts)


def refine_ovp(graph: CombGraph, lexicon: PronounLexicon) -> CombGraph:
    """Step 2-1: replace the spine node of OVP-initial utterances by an observed node."""
    spine = tuple(
        SpineEntry(e.utterance, lexicon[graph.first_tokens[e.utterance]])
        if not e.observed and graph.first_tokens[e.utterance] in lexicon else e
        for e in graph.spine
    )
    return replace(graph, spine=spine)


def refine_interjections(graph: CombGraph, lexicon: InterjectionLexicon) -> CombGraph:
    """Step 2-2: drop latent spine nodes of interjection-initial utterances.

    Observed entries are kept, so an OVP that is also an interjection
    stays on the spine.
    """
    spine = tuple(e for e in graph.spine
                  if e.observed or graph.first_tokens[e.utterance] not in lexicon)
    return replace(graph, spine=spine)


def drop_spine(graph: CombGraph) -> CombGraph:
    """Remove every vertical edge; all chains become independent."""
    return replace(graph, spine=())


def build_graph(snippet: Snippet, pronouns: Optional[PronounLexicon] = None,
                interjections: Optional[InterjectionLexicon] = None,
                refine: bool = True, vertical: bool = True) -> CombGraph:
    """Construct the graph for ``snippet`` with the configured refinements."""
    graph = build_initial_graph(snippet)
    if refine:
        if pronouns is not None:
            graph = refine_ovp(graph, pronouns)
        if interjections is not None:
            graph = refine_interjections(graph, interjections)
    if not vertical:
        graph = drop_spine(graph)
    return graph


def validate_graph(graph: CombGraph, num_labels: Optional[int] = None) -> List[str]:
    """Return structural violations; an empty list means the graph is sound."""
    violations: List[str] = []
    positions = [e.utterance for e in graph.spine]
    if any(b <= a for a, b in zip(positions, positions[1:])):
        violations.append("spine not strictly increasing")
    if any(not 0 <= i < graph.n for i in positions):
        violations.append("spine entry refers to a missing utterance")
    for entry in graph.observed():
        if num_labels is not None and not 0 <= entry.label < num_labels:
            violations.append(f"label out of range at utterance {entry.utterance}")
    for i, chain in enumerate(graph.chains):
        if not chain:
            violations.append(f"chain {i} is empty")
        if list(chain) != [(i, j) for j in range(len(chain))]:
            violations.append(f"chain {i} does not cover its tokens in order")
    if len(graph.first_tokens) != graph.n:
        violations.append("first-token table does not match chain count")

    parent: Dict[Node, Node] = {node: node for node in graph.nodes()}

    def find(node: Node) -> Node:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for a, b in graph.edges():
        if a not in parent or b not in parent:
            violations.append(f"edge {a}-{b} touches an unknown node")
            continue
        root_a, root_b = find(a), find(b)
        if root_a == root_b:
            violations.append("graph contains a cycle")
            break
        parent[root_a] = root_b
    return violations
