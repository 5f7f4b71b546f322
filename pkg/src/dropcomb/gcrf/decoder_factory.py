"""Factory for the structured-output layer selected by the ablation mode."""
# pylint: disable=invalid-name
from typing import Optional

from ..autodiff.tensor import Tensor
from ..corpus.types import Snippet
from ..errors import CorpusError
from ..utils.logger import logger
from .graph import CombGraph, build_graph, validate_graph
from .inference import (
    Emissions,
    GcrfParams,
    LabelAssignment,
    decode,
    nll,
    token_argmax,
    token_nll,
)
from .lexicon import InterjectionLexicon, PronounLexicon

MODES = ('full', 'no_refine', 'no_vertical', 'no_gcrf')


class GcrfDecoder:
    """Joint inference over the comb graph.

    ``refine`` toggles the overt-pronoun and interjection refinements and
    ``vertical`` keeps or drops the spine.
    """

    def __init__(self, pronouns: Optional[PronounLexicon],
                 interjections: Optional[InterjectionLexicon],
                 refine: bool = True, vertical: bool = True) -> None:
        self.pronouns = pronouns
        self.interjections = interjections
        self.refine = refine
        self.vertical = vertical

    def graph(self, snippet: Snippet) -> CombGraph:
        """Build and validate the comb graph of ``snippet``.

        Raises:
            CorpusError: If the graph breaks a structural invariant
        """
        graph = build_graph(snippet, self.pronouns, self.interjections,
                            refine=self.refine, vertical=self.vertical)
        violations = validate_graph(graph)
        if violations:
            raise CorpusError(f"snippet {snippet.snippet_id}: invalid comb graph "
                              f"({'; '.join(violations)})")
        return graph

    def loss(self, graph: CombGraph, P: Emissions, params: GcrfParams,
             gold: LabelAssignment) -> Tensor:
        return nll(graph, P, params, gold)

    def predict(self, graph: CombGraph, P: Emissions, params: GcrfParams) -> LabelAssignment:
        return decode(graph, P, params).assignment


class TokenDecoder:
    """Independent per-token prediction trained by cross-entropy."""

    def graph(self, snippet: Snippet) -> CombGraph:
        return build_graph(snippet, refine=False, vertical=False)

    def loss(self, graph: CombGraph, P: Emissions, params: GcrfParams,
             gold: LabelAssignment) -> Tensor:
        return token_nll(graph, P, gold, params.k)

    def predict(self, graph: CombGraph, P: Emissions, params: GcrfParams) -> LabelAssignment:
        return token_argmax(graph, P)


class DecoderFactory:
    """Factory class for the structured-output layer."""

    @staticmethod
    def create_decoder(mode: str, pronouns: Optional[PronounLexicon] = None,
                       interjections: Optional[InterjectionLexicon] = None):
        """Create the decoder for an ablation mode.

        Args:
            mode: One of full, no_refine, no_vertical or no_gcrf
            pronouns: Overt-pronoun lexicon for spine refinement
            interjections: Interjection lexicon for spine refinement

        Returns:
            A GcrfDecoder or a TokenDecoder

        Raises:
            ValueError: If the mode is not supported
        """
        if mode == 'full':
            return GcrfDecoder(pronouns, interjections)
        if mode == 'no_refine':
            logger.info("Graph refinement disabled")
            return GcrfDecoder(pronouns, interjections, refine=False)
        if mode == 'no_vertical':
            logger.info("Vertical spine disabled")
            return GcrfDecoder(pronouns, interjections, vertical=False)
        if mode == 'no_gcrf':
            logger.info("Structured layer disabled, predicting tokens independently")
            return TokenDecoder()
        raise ValueError(f"Unsupported decoder mode: {mode}")
