"""Tests for the dropcomb command line."""
import json
from dataclasses import replace

import pytest
import yaml
from conftest import run_config_dict, write_synth_corpus

from dropcomb.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE
from dropcomb.main import build_parser, main


@pytest.fixture
def trained(tmp_path, tiny_model_config):
    """A config file, its corpus and the checkpoint a one-epoch run leaves."""
    corpus = write_synth_corpus(tmp_path / 'train.jsonl')
    config = tmp_path / 'config.yaml'
    config.write_text(yaml.safe_dump(run_config_dict(tmp_path / 'run', corpus,
                                                     tiny_model_config), allow_unicode=True),
                      encoding='utf-8')
    assert main(['train', '--config', str(config)]) == EXIT_OK
    return config, corpus, tmp_path / 'run' / 'checkpoint'


MINIMAL_ARGS = {
    'train': ['--config', 'c.yaml'],
    'eval': ['--model', 'm', '--data', 'd'],
    'predict': ['--model', 'm', '--data', 'd'],
    'stats': ['--data', 'd'],
    'export-transitions': ['--model', 'm'],
    'export-attention': ['--model', 'm', '--data', 'd', '--snippet', 's#0',
                         '--utterance', '0', '--out', 'o'],
    'gradcheck': ['--config', 'c.yaml'],
    'synth': ['--pattern', 'reply', '--n', '1'],
}


@pytest.mark.parametrize('command', sorted(MINIMAL_ARGS))
def test_parser_accepts_every_command(command):
    """Test every operation has a sub-command with its required options."""
    args = build_parser().parse_args([command] + MINIMAL_ARGS[command])
    assert args.command == command
    assert args.log_level == 'INFO'


def test_usage_errors():
    """Test argument errors exit with the usage code."""
    assert main([]) == EXIT_USAGE
    assert main(['eval', '--data', 'x']) == EXIT_USAGE
    assert main(['synth', '--pattern', 'chitchat', '--n', '1']) == EXIT_USAGE


def test_synth_and_stats(tmp_path):
    """Test generating a corpus and reporting its statistics."""
    corpus = tmp_path / 'reply.jsonl'
    assert main(['synth', '--pattern', 'reply', '--n', '3', '--turns', '5',
                 '--out', str(corpus)]) == EXIT_OK
    lines = corpus.read_text(encoding='utf-8').splitlines()
    assert len(lines) == 3

    report_path = tmp_path / 'stats.json'
    pairs = tmp_path / 'pairs.csv'
    assert main(['stats', '--data', str(corpus), '--pairs-csv', str(pairs),
                 '--out', str(report_path)]) == EXIT_OK
    report = json.loads(report_path.read_text(encoding='utf-8'))
    # every turn after the opening drops one utterance-initial pronoun
    assert report['dropped'] >= 12
    assert pairs.exists()


def test_stats_bad_corpus(tmp_path):
    """Test a malformed corpus exits with the data code."""
    corpus = tmp_path / 'bad.jsonl'
    corpus.write_text('{"id": "c", "turns": [{"speaker": "A", "tokens": ["a"], '
                      '"labels": ["XYZ"]}]}\n', encoding='utf-8')
    assert main(['stats', '--data', str(corpus)]) == EXIT_DATA
    assert main(['stats', '--data', str(tmp_path / 'missing.jsonl')]) == EXIT_DATA


def test_train_eval_predict(trained, tmp_path):
    """Test the train, eval and predict commands end to end."""
    _, corpus, checkpoint = trained
    assert (checkpoint / 'manifest.json').exists()

    report_path = tmp_path / 'report.json'
    assert main(['eval', '--model', str(checkpoint), '--data', str(corpus),
                 '--dump-messages', str(tmp_path / 'messages'),
                 '--out', str(report_path)]) == EXIT_OK
    report = json.loads(report_path.read_text(encoding='utf-8'))
    assert 0.0 <= report['f_score'] <= 1.0
    assert list(tmp_path.joinpath('messages').glob('*_chain0.csv'))

    predictions = tmp_path / 'predictions.jsonl'
    assert main(['predict', '--model', str(checkpoint), '--data', str(corpus),
                 '--out', str(predictions)]) == EXIT_OK
    records = [json.loads(line) for line in predictions.read_text(encoding='utf-8').splitlines()]
    for record in records:
        for turn in record['turns']:
            assert len(turn['predicted']) == len(turn['tokens'])


def test_eval_label_mismatch(trained, tmp_path):
    """Test a differing --labels file is refused."""
    _, corpus, checkpoint = trained
    labels = tmp_path / 'labels.txt'
    labels.write_text('我\n你\nNone\n', encoding='utf-8')
    assert main(['eval', '--model', str(checkpoint), '--data', str(corpus),
                 '--labels', str(labels)]) == EXIT_DATA


def test_eval_missing_checkpoint(tmp_path):
    """Test a missing checkpoint exits with the data code."""
    corpus = write_synth_corpus(tmp_path / 'train.jsonl')
    assert main(['eval', '--model', str(tmp_path / 'none'), '--data', str(corpus)]) == EXIT_DATA


def test_exports(trained, tmp_path):
    """Test the transition and attention exports."""
    _, corpus, checkpoint = trained
    out = tmp_path / 'A2.csv'
    assert main(['export-transitions', '--model', str(checkpoint), '--out', str(out)]) == EXIT_OK
    header = out.read_text(encoding='utf-8').splitlines()[0].split(',')
    assert header[0] == 'from/to'
    assert 'None' not in header
    assert len(header) == 18

    attention = tmp_path / 'attention'
    assert main(['export-attention', '--model', str(checkpoint), '--data', str(corpus),
                 '--snippet', 'synth-mixed-0#0', '--utterance', '1',
                 '--out', str(attention)]) == EXIT_OK
    assert (attention / 'layer0_head0.csv').exists()
    assert main(['export-attention', '--model', str(checkpoint), '--data', str(corpus),
                 '--snippet', 'nope#0', '--utterance', '0',
                 '--out', str(attention)]) == EXIT_USAGE


def test_gradcheck_command(trained, tmp_path):
    """Test the gradient check passes on the tiny model."""
    config, _, _ = trained
    out = tmp_path / 'gradcheck.json'
    assert main(['gradcheck', '--config', str(config), '--sample', '2',
                 '--out', str(out)]) == EXIT_OK
    report = json.loads(out.read_text(encoding='utf-8'))
    assert report['passed']
    assert report['worst'] < 1e-4


def test_train_context_beyond_max_len(tmp_path, tiny_model_config):
    """Test a corpus too long for the position table exits with the data code."""
    corpus = tmp_path / 'long.jsonl'
    turns = [{'speaker': name, 'tokens': ['好'] * 10, 'labels': ['None'] * 10}
             for name in ('A', 'B')]
    corpus.write_text(json.dumps({'id': 'long', 'turns': turns}, ensure_ascii=False) + '\n',
                      encoding='utf-8')
    config = tmp_path / 'config.yaml'
    model = replace(tiny_model_config, max_len=8)
    config.write_text(yaml.safe_dump(run_config_dict(tmp_path / 'run', corpus, model),
                                     allow_unicode=True), encoding='utf-8')
    assert main(['train', '--config', str(config)]) == EXIT_DATA
