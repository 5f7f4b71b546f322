"""The trainable model: emitter, transitions and structured decoder together."""
from dataclasses import asdict
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..autodiff.checkpoint import load_params, save_params
from ..autodiff.init import make_rng
from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor
from ..config import AblationConfig, ModelConfig
from ..corpus.labels import LabelSet
from ..corpus.types import Snippet
from ..corpus.vocab import Vocab
from ..errors import CheckpointError
from ..gcrf.decoder_factory import DecoderFactory
from ..gcrf.graph import CombGraph
from ..gcrf.inference import A2_NAME, GcrfParams, LabelAssignment, add_transition_params
from ..model.emitter import EmissionTable, TransformerEmitter
from ..utils.logger import logger
from .resources import Resources

GraphKey = Tuple[str, Tuple[Tuple[str, ...], ...]]


class DropCombModel:
    """Transformer emitter + GCRF layer over one parameter store.

    Args:
        resources: Label set, lexicons and windowing settings
        vocab: Word vocabulary
        model_config: Emitter hyperparameters
        ablation: Which part of the model to switch off
        seed: Seed of the initialization generator
    """

    def __init__(self, resources: Resources, vocab: Vocab, model_config: ModelConfig,
                 ablation: Optional[AblationConfig] = None, seed: int = 0) -> None:
        self.resources = resources
        self.vocab = vocab
        self.model_config = model_config
        self.ablation = ablation or AblationConfig()
        self.seed = seed
        self.store = ParamStore()
        self.emitter = TransformerEmitter(self.store, model_config, len(vocab),
                                          resources.num_speakers, resources.labels.size,
                                          make_rng(seed), vocab.sep_id)
        self.params: GcrfParams = add_transition_params(self.store, resources.labels.size)
        if self.ablation.no_vertical:
            self.store.freeze(A2_NAME)
        self.decoder = DecoderFactory.create_decoder(self.ablation.mode, resources.pronouns,
                                                     resources.interjections)
        self._graphs: Dict[GraphKey, CombGraph] = {}

    @property
    def labels(self) -> LabelSet:
        return self.resources.labels

    def graph(self, snippet: Snippet) -> CombGraph:
        """Comb graph of ``snippet``, cached by id and token surfaces."""
        key = (snippet.snippet_id, tuple(u.surfaces for u in snippet.utterances))
        graph = self._graphs.get(key)
        if graph is None:
            graph = self.decoder.graph(snippet)
            self._graphs[key] = graph
        return graph

    def emit(self, snippet: Snippet, rng: Optional[np.random.Generator] = None) -> EmissionTable:
        return self.emitter.emit(snippet, rng)

    def loss(self, snippet: Snippet, rng: Optional[np.random.Generator] = None) -> Tensor:
        """Training loss of one labeled snippet, on the tape."""
        if not snippet.is_labeled:
            raise ValueError(f"snippet {snippet.snippet_id} is not fully labeled")
        gold = LabelAssignment.of([u.gold_labels for u in snippet.utterances])
        return self.decoder.loss(self.graph(snippet), self.emit(snippet, rng), self.params, gold)

    def predict(self, snippet: Snippet) -> LabelAssignment:
        return self.decoder.predict(self.graph(snippet), self.emit(snippet), self.params)

    def predict_all(self, snippets: List[Snippet]) -> Dict[str, LabelAssignment]:
        return {s.snippet_id: self.predict(s) for s in snippets}

    def save(self, directory: Path) -> Path:
        """Persist parameters and everything needed to rebuild the model."""
        metadata = {
            'resources': self.resources.to_dict(),
            'vocab': self.vocab.to_dict(),
            'model': asdict(self.model_config),
            'ablation': asdict(self.ablation),
            'seed': self.seed,
        }
        path = save_params(self.store, Path(directory), metadata)
        logger.info(f"Checkpoint written to {directory}")
        return path

    @classmethod
    def load(cls, directory: Path) -> 'DropCombModel':
        """Rebuild a model from ``save`` output.

        Raises:
            CheckpointError: If the checkpoint is incomplete or inconsistent
        """
        store, metadata = load_params(Path(directory))
        try:
            model = cls(Resources.from_dict(metadata['resources']),
                        Vocab.from_dict(metadata['vocab']),
                        ModelConfig(**metadata['model']),
                        AblationConfig(**metadata['ablation']),
                        int(metadata.get('seed', 0)))
        except (KeyError, TypeError) as error:
            raise CheckpointError(f"Checkpoint metadata incomplete: {error}") from error
        if set(model.store.names()) != set(store.names()):
            raise CheckpointError("Checkpoint parameters do not match the model layout")
        model.store.assign(store.values())
        return model
