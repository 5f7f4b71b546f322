"""Run configuration: YAML file -> validated dataclasses."""
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .errors import ConfigError
from .utils.logger import logger

PACKAGE_DATA = Path(__file__).resolve().parent / 'data'
DEFAULT_LABELS = PACKAGE_DATA / 'labels.txt'
DEFAULT_PRONOUNS = PACKAGE_DATA / 'pronouns.tsv'
DEFAULT_INTERJECTIONS = PACKAGE_DATA / 'interjections.txt'
DEFAULT_PUNCTUATION = ['，', '。', '？', '！', '；', ',', '.', '?', '!', ';']


def load_config(config_path: str) -> Dict[str, Any]:
    """Load configuration from YAML file.

    Args:
        config_path: Path to the configuration file

    Returns:
        Dictionary containing configuration parameters

    Raises:
        ConfigError: If the file is missing or is not valid YAML
    """
    try:
        with open(config_path, 'r', encoding='utf-8') as file:
            data = yaml.safe_load(file)
    except FileNotFoundError as error:
        logger.error(f"Configuration file not found: {config_path}")
        raise ConfigError(f"Configuration file not found: {config_path}") from error
    except yaml.YAMLError as error:
        logger.error(f"Invalid YAML configuration: {error}")
        raise ConfigError(f"Invalid YAML configuration: {error}") from error
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration root must be a mapping: {config_path}")
    return data


@dataclass
class ModelConfig:
    """Transformer emitter hyperparameters."""

    d_model: int = 32
    heads: int = 2
    layers: int = 2
    ffn_dim: int = 64
    head_hidden: int = 32
    max_len: int = 256
    dropout: float = 0.0
    residual: bool = True
    layer_norm: bool = True
    share_embeddings: bool = True

    def validate(self) -> None:
        if self.d_model < 1 or self.heads < 1 or self.d_model % self.heads:
            raise ConfigError(f"d_model ({self.d_model}) must be a positive multiple "
                              f"of heads ({self.heads})")
        if self.layers < 0 or self.ffn_dim < 1 or self.head_hidden < 1 or self.max_len < 1:
            raise ConfigError("layers >= 0, ffn_dim, head_hidden and max_len >= 1 required")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must lie in [0, 1)")


@dataclass
class AblationConfig:
    """Mutually exclusive switches removing one part of the model."""

    no_gcrf: bool = False
    no_refine: bool = False
    no_vertical: bool = False

    @property
    def mode(self) -> str:
        for name in ('no_gcrf', 'no_refine', 'no_vertical'):
            if getattr(self, name):
                return name
        return 'full'

    def validate(self) -> None:
        if sum((self.no_gcrf, self.no_refine, self.no_vertical)) > 1:
            raise ConfigError("Ablation flags no_gcrf, no_refine and no_vertical "
                              "are mutually exclusive")


@dataclass
class RunConfig:
    """Everything a training or evaluation run needs."""

    train_path: Optional[Path] = None
    dev_path: Optional[Path] = None
    test_path: Optional[Path] = None
    labels_path: Path = DEFAULT_LABELS
    pronouns_path: Path = DEFAULT_PRONOUNS
    interjections_path: Path = DEFAULT_INTERJECTIONS
    output_dir: Path = Path('runs/default')
    log_file: Optional[Path] = None
    snippet_length: int = 8
    num_speakers: int = 4
    min_freq: int = 1
    punctuation: List[str] = field(default_factory=lambda: list(DEFAULT_PUNCTUATION))
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 1
    epochs: int = 30
    seed: int = 13
    dev_fraction: float = 0.167
    model: ModelConfig = field(default_factory=ModelConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def validate(self) -> None:
        """Check ranges and that every configured path exists.

        Raises:
            ConfigError: On the first violated constraint
        """
        if self.epochs < 1:
            raise ConfigError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if self.snippet_length < 1 or self.num_speakers < 1 or self.min_freq < 1:
            raise ConfigError("snippet_length, num_speakers and min_freq must be at least 1")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be non-negative")
        if not 0.0 <= self.dev_fraction < 1.0:
            raise ConfigError("dev_fraction must lie in [0, 1)")
        self.model.validate()
        self.ablation.validate()
        for name in ('train_path', 'dev_path', 'test_path', 'labels_path',
                     'pronouns_path', 'interjections_path'):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name} does not exist: {path}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'RunConfig':
        """Build a config from the YAML layout (sections data/model/training/ablation).

        Relative paths resolve against ``base_dir`` (the config file's folder).
        """
        base = Path(base_dir) if base_dir is not None else Path('.')

        def resolve(value: Any) -> Optional[Path]:
            if value in (None, ''):
                return None
            path = Path(value)
            return path if path.is_absolute() else base / path

        section = data.get('data', {}) or {}
        training = data.get('training', {}) or {}
        try:
            model = ModelConfig(**(data.get('model', {}) or {}))
            ablation = AblationConfig(**(data.get('ablation', {}) or {}))
        except TypeError as error:
            raise ConfigError(f"Unknown configuration key: {error}") from error

        known_training = {'learning_rate', 'beta1', 'beta2', 'eps', 'batch_size',
                          'epochs', 'seed', 'dev_fraction'}
        unknown = set(training) - known_training
        if unknown:
            raise ConfigError(f"Unknown training keys: {sorted(unknown)}")

        config = cls(
            train_path=resolve(section.get('train')),
            dev_path=resolve(section.get('dev')),
            test_path=resolve(section.get('test')),
            labels_path=resolve(section.get('labels')) or DEFAULT_LABELS,
            pronouns_path=resolve(section.get('pronouns')) or DEFAULT_PRONOUNS,
            interjections_path=resolve(section.get('interjections')) or DEFAULT_INTERJECTIONS,
            output_dir=resolve(data.get('output_dir')) or base / 'runs' / 'default',
            log_file=resolve(data.get('log_file')),
            snippet_length=int(section.get('snippet_length', 8)),
            num_speakers=int(section.get('num_speakers', 4)),
            min_freq=int(section.get('min_freq', 1)),
            punctuation=list(section.get('punctuation', DEFAULT_PUNCTUATION)),
            model=model,
            ablation=ablation,
            **{key: training[key] for key in known_training if key in training},
        )
        config.validate()
        return config

    @classmethod
    def from_file(cls, config_path: str) -> 'RunConfig':
        return cls.from_dict(load_config(config_path), Path(config_path).resolve().parent)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-friendly snapshot stored in checkpoints."""
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, Path):
                data[key] = str(value)
        return data
