"""Training, evaluation, prediction and exports."""
from .bundle import DropCombModel
from .evaluate import dump_snippet_messages, evaluate, predict_records, write_predictions
from .export import export_attention, export_transitions, read_transitions
from .metrics import EvalReport, check_label_sets, evaluate_assignments, evaluate_prediction_file
from .resources import Resources
from .trainer import Trainer, TrainResult, split_dev, train

__all__ = [
    'DropCombModel',
    'EvalReport',
    'Resources',
    'TrainResult',
    'Trainer',
    'check_label_sets',
    'dump_snippet_messages',
    'evaluate',
    'evaluate_assignments',
    'evaluate_prediction_file',
    'export_attention',
    'export_transitions',
    'predict_records',
    'read_transitions',
    'split_dev',
    'train',
    'write_predictions',
]
