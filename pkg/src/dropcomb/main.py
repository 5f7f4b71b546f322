"""Main entry point for the DropComb command line."""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

from .autodiff.gradcheck import finite_diff_check
from .autodiff.init import make_rng
from .config import DEFAULT_LABELS, DEFAULT_PUNCTUATION, RunConfig
from .corpus.labels import load_label_set
from .corpus.reader import read_corpus, write_corpus
from .corpus.stats import corpus_stats
from .corpus.synth import PATTERNS, synthesize
from .corpus.types import Snippet
from .corpus.vocab import build_vocab
from .errors import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, ConfigError, DropCombError
from .gcrf.graph import make_splitter
from .pipeline.bundle import DropCombModel
from .pipeline.evaluate import dump_snippet_messages, evaluate, predict_records, write_predictions
from .pipeline.export import export_attention, export_transitions
from .pipeline.metrics import check_label_sets
from .pipeline.resources import Resources
from .pipeline.trainer import train
from .utils.logger import logger


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError so they map to exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _emit(payload: Any, out: Optional[str]) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=2)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + '\n', encoding='utf-8')
        logger.info(f"Wrote {out}")
    else:
        print(text)


def _load_model_data(args: argparse.Namespace) -> tuple:
    model = DropCombModel.load(Path(args.model))
    if getattr(args, 'labels', None):
        check_label_sets(model.labels, load_label_set(Path(args.labels)))
    return model, model.resources.read(Path(args.data), model.vocab)


def cmd_train(args: argparse.Namespace) -> int:
    config = RunConfig.from_file(args.config)
    checkpoint = train(config, Path(args.log_file) if args.log_file else None)
    print(checkpoint)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model, snippets = _load_model_data(args)
    report = evaluate(model, snippets)
    logger.info(f"Evaluation on {len(snippets)} snippets: {report.summary()}")
    if args.dump_messages:
        written = dump_snippet_messages(model, snippets, Path(args.dump_messages))
        logger.info(f"Dumped {len(written)} message tables to {args.dump_messages}")
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    model, snippets = _load_model_data(args)
    if args.out:
        write_predictions(model, snippets, Path(args.out))
    else:
        write_corpus(predict_records(model, snippets), sys.stdout)
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    labels = load_label_set(Path(args.labels) if args.labels else DEFAULT_LABELS)
    splitter = None if args.no_split else make_splitter(DEFAULT_PUNCTUATION)
    snippets = read_corpus(Path(args.data), labels, splitter=splitter,
                           snippet_length=args.snippet_length)
    report = corpus_stats(snippets, labels)
    logger.info(f"{report.dropped} dropped pronouns, "
                f"{report.initial_fraction:.1%} utterance-initial")
    if args.pairs_csv:
        with open(args.pairs_csv, 'w', newline='', encoding='utf-8') as handle:
            csv.writer(handle).writerows(report.pair_rows())
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_export_transitions(args: argparse.Namespace) -> int:
    model = DropCombModel.load(Path(args.model))
    out = args.out or f"{args.matrix}.csv"
    export_transitions(model, Path(out), args.matrix, args.include_none)
    return EXIT_OK


def _find_snippet(snippets: List[Snippet], snippet_id: str) -> Snippet:
    for snippet in snippets:
        if snippet.snippet_id == snippet_id:
            return snippet
    raise ConfigError(f"Snippet {snippet_id} not found in the corpus")


def cmd_export_attention(args: argparse.Namespace) -> int:
    model, snippets = _load_model_data(args)
    snippet = _find_snippet(snippets, args.snippet)
    if not 0 <= args.utterance < len(snippet):
        raise ConfigError(f"Utterance {args.utterance} out of range for {args.snippet} "
                          f"({len(snippet)} utterances)")
    written = export_attention(model, snippet, args.utterance, Path(args.out))
    logger.info(f"Wrote {len(written)} attention matrices to {args.out}")
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    config = RunConfig.from_file(args.config)
    if config.train_path is None:
        raise ConfigError("data.train must be set for gradcheck")
    resources = Resources.from_config(config)
    raw = resources.read(config.train_path)
    vocab = build_vocab(raw, config.min_freq)
    snippets = vocab.index_snippets(raw)[:max(args.snippets, 1)]
    model = DropCombModel(resources, vocab, config.model,
                          config.ablation, config.seed)
    rng = make_rng(config.seed)
    for name, tensor in model.store:
        if name.startswith('gcrf.'):
            tensor.data[...] = rng.normal(scale=0.5, size=tensor.shape)

    def loss_fn():
        total = model.loss(snippets[0])
        for snippet in snippets[1:]:
            total = total + model.loss(snippet)
        return total

    report = finite_diff_check(loss_fn, model.store, h=args.step, tol=args.tol,
                               sample=args.sample, rng=rng)
    logger.info(f"Gradient check over {len(report.max_error)} parameters: "
                f"worst relative error {report.worst:.3e}")
    _emit({'passed': report.passed, 'worst': report.worst, 'max_error': report.max_error,
           'flagged': [list(item) for item in report.flagged]}, args.out)
    if not report.passed:
        logger.error(f"{len(report.flagged)} gradient entries above tolerance {args.tol}")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    records = synthesize(args.pattern, args.n, make_rng(args.seed), turns=args.turns,
                         object_rate=args.object_rate)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        with open(args.out, 'w', encoding='utf-8') as handle:
            write_corpus(records, handle)
        logger.info(f"Wrote {len(records)} {args.pattern} conversations to {args.out}")
    else:
        write_corpus(records, sys.stdout)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    'train': cmd_train,
    'eval': cmd_eval,
    'predict': cmd_predict,
    'stats': cmd_stats,
    'export-transitions': cmd_export_transitions,
    'export-attention': cmd_export_attention,
    'gradcheck': cmd_gradcheck,
    'synth': cmd_synth,
}


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one sub-command per operation."""
    parser = _ArgumentParser(prog='dropcomb',
                             description="Dropped pronoun recovery with a comb-structured CRF")
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    parser.add_argument('--log-file', help='Also append log lines to this file')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('train', help='Train a model from a run configuration')
    p.add_argument('--config', required=True)

    p = sub.add_parser('eval', help='Score a checkpoint on a labeled corpus')
    p.add_argument('--model', required=True, help='Checkpoint directory')
    p.add_argument('--data', required=True)
    p.add_argument('--labels', help='Label file the corpus is annotated with')
    p.add_argument('--dump-messages', help='Directory for chain message CSV files')
    p.add_argument('--out', help='Write the report JSON here instead of stdout')

    p = sub.add_parser('predict', help='Label a corpus with a checkpoint')
    p.add_argument('--model', required=True)
    p.add_argument('--data', required=True)
    p.add_argument('--labels')
    p.add_argument('--out', help='Prediction JSONL (default: stdout)')

    p = sub.add_parser('stats', help='Dropped-pronoun statistics of a corpus')
    p.add_argument('--data', required=True)
    p.add_argument('--labels')
    p.add_argument('--snippet-length', type=int, default=8)
    p.add_argument('--no-split', action='store_true', help='Keep compound turns whole')
    p.add_argument('--pairs-csv', help='Write the initial-pronoun pair matrix as CSV')
    p.add_argument('--out')

    p = sub.add_parser('export-transitions', help='Write a transition matrix as CSV')
    p.add_argument('--model', required=True)
    p.add_argument('--matrix', choices=['A1', 'A2'], default='A2')
    p.add_argument('--include-none', action='store_true')
    p.add_argument('--out')

    p = sub.add_parser('export-attention', help='Write interaction attention weights as CSV')
    p.add_argument('--model', required=True)
    p.add_argument('--data', required=True)
    p.add_argument('--snippet', required=True, help='Snippet id, e.g. conv1#0')
    p.add_argument('--utterance', type=int, required=True)
    p.add_argument('--out', required=True, help='Output directory')

    p = sub.add_parser('gradcheck', help='Finite-difference check of the training loss')
    p.add_argument('--config', required=True)
    p.add_argument('--step', type=float, default=1e-4)
    p.add_argument('--tol', type=float, default=1e-4)
    p.add_argument('--sample', type=int, default=5, help='Entries checked per parameter')
    p.add_argument('--snippets', type=int, default=1)
    p.add_argument('--out')

    p = sub.add_parser('synth', help='Generate a synthetic dialogue corpus')
    p.add_argument('--pattern', choices=PATTERNS, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--turns', type=int, default=8)
    p.add_argument('--seed', type=int, default=13)
    p.add_argument('--object-rate', type=float, default=0.3)
    p.add_argument('--out')
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point.

    Returns:
        Exit code: 0 ok, 1 usage, 2 data error, 3 numeric failure
    """
    try:
        args = build_parser().parse_args(argv)
        logger.configure(getattr(logging, args.log_level), args.log_file)
        return COMMANDS[args.command](args)

    except DropCombError as error:
        logger.critical(f"{type(error).__name__}: {error}")
        return error.exit_code
    except (FileNotFoundError, IsADirectoryError) as error:
        logger.critical(f"File error: {error}")
        return EXIT_DATA
    except Exception as error:  # pylint: disable=broad-exception-caught
        logger.critical(f"Unexpected error: {error}")
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
