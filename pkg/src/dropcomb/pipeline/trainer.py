"""Maximum-likelihood training with dev-set model selection."""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..autodiff.init import make_rng
from ..autodiff.optim import Adam
from ..config import RunConfig
from ..corpus.types import Snippet
from ..corpus.vocab import build_vocab
from ..errors import ConfigError, NumericError
from ..utils.logger import logger
from .bundle import DropCombModel
from .evaluate import evaluate
from .resources import Resources

CHECKPOINT_DIR = 'checkpoint'
TRAIN_LOG = 'train_log.jsonl'


def split_dev(snippets: List[Snippet], fraction: float,
              rng: np.random.Generator) -> Tuple[List[Snippet], List[Snippet]]:
    """Hold out a seeded ``fraction`` of snippets; both parts keep document order."""
    n_dev = int(round(len(snippets) * fraction))
    n_dev = min(n_dev, len(snippets) - 1)
    if n_dev <= 0:
        return list(snippets), []
    held = set(rng.permutation(len(snippets))[:n_dev].tolist())
    train = [s for i, s in enumerate(snippets) if i not in held]
    dev = [s for i, s in enumerate(snippets) if i in held]
    return train, dev


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    precision: float
    recall: float
    f_score: float
    selected_on: str

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class TrainResult:
    checkpoint: Path
    best_f: float
    best_epoch: int
    history: List[EpochRecord] = field(default_factory=list)


class Trainer:
    """Runs the training loop described by a RunConfig.

    Random streams: ``seed`` initializes parameters, ``seed + 1`` shuffles,
    ``seed + 2`` drives dropout and ``seed + 3`` draws the dev split.
    """

    def __init__(self, config: RunConfig) -> None:
        if config.train_path is None:
            raise ConfigError("data.train must be set for training")
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.resources = Resources.from_config(config)
        self.train_snippets, self.dev_snippets, self.model = self._prepare()
        self.optimizer = Adam(self.model.store, config.learning_rate, config.beta1,
                              config.beta2, config.eps)
        self._shuffle_rng = make_rng(config.seed + 1)
        self._dropout_rng = make_rng(config.seed + 2) if config.model.dropout > 0 else None

    def _prepare(self) -> Tuple[List[Snippet], List[Snippet], DropCombModel]:
        config = self.config
        raw = self.resources.read(config.train_path)
        vocab = build_vocab(raw, config.min_freq)
        train = vocab.index_snippets(raw)
        if config.dev_path is not None:
            dev = self.resources.read(config.dev_path, vocab)
        else:
            train, dev = split_dev(train, config.dev_fraction, make_rng(config.seed + 3))
        if not dev:
            logger.warning("No development snippets; selecting the checkpoint on training F")
        logger.info(f"Training on {len(train)} snippets, {len(dev)} dev snippets, "
                    f"vocabulary {len(vocab)}, mode {config.ablation.mode}")
        model = DropCombModel(self.resources, vocab, config.model, config.ablation, config.seed)
        logger.info(f"Model has {model.store.total_size()} parameters")
        return train, dev, model

    def _check_gradients(self, snippet_id: str) -> None:
        for name, grad in self.model.store.grads().items():
            if not np.all(np.isfinite(grad)):
                raise NumericError(f"non-finite gradient for {name}", snippet_id)

    def _update(self, snippet_id: str) -> None:
        self._check_gradients(snippet_id)
        self.optimizer.step()
        self.optimizer.zero_grad()

    def train_epoch(self) -> float:
        """One shuffled pass; returns the mean per-snippet loss.

        Raises:
            NumericError: If a loss or gradient is not finite
        """
        order = self._shuffle_rng.permutation(len(self.train_snippets))
        self.optimizer.zero_grad()
        total, pending, last_id = 0.0, 0, ''
        for index in order:
            snippet = self.train_snippets[int(index)]
            loss = self.model.loss(snippet, self._dropout_rng)
            value = loss.item()
            if not np.isfinite(value):
                raise NumericError(f"non-finite loss {value}", snippet.snippet_id)
            loss.backward()
            total += value
            pending += 1
            last_id = snippet.snippet_id
            if pending == self.config.batch_size:
                self._update(last_id)
                pending = 0
        if pending:
            self._update(last_id)
        return total / max(len(self.train_snippets), 1)

    def _append_log(self, record: EpochRecord) -> None:
        with open(self.output_dir / TRAIN_LOG, 'a', encoding='utf-8') as handle:
            handle.write(json.dumps(record.to_dict()) + '\n')

    def run(self) -> TrainResult:
        """Train for the configured epochs and keep the best checkpoint."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        checkpoint = self.output_dir / CHECKPOINT_DIR
        selection = self.dev_snippets or self.train_snippets
        selected_on = 'dev' if self.dev_snippets else 'train'
        best_f, best_epoch = -1.0, 0
        history: List[EpochRecord] = []
        for epoch in range(1, self.config.epochs + 1):
            loss = self.train_epoch()
            report = evaluate(self.model, selection)
            record = EpochRecord(epoch, loss, report.precision, report.recall,
                                 report.f_score, selected_on)
            history.append(record)
            self._append_log(record)
            logger.info(f"Epoch {epoch}/{self.config.epochs}: loss {loss:.4f}, "
                        f"{selected_on} {report.summary()}")
            if report.f_score > best_f:
                best_f, best_epoch = report.f_score, epoch
                self.model.save(checkpoint)
        logger.info(f"Best {selected_on} F {best_f:.4f} at epoch {best_epoch}")
        return TrainResult(checkpoint, best_f, best_epoch, history)


def train(config: RunConfig, log_file: Optional[Path] = None) -> Path:
    """Train a model and return the path of its best checkpoint."""
    if log_file is not None or config.log_file is not None:
        logger.set_log_file(str(log_file or config.log_file))
    return Trainer(config).run().checkpoint
