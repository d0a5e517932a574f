"""
配置层测试: 数值解析、网格、参数声明、配置文本与种子兜底
"""
from fractions import Fraction

import pytest

from core.config import (
    SEED_ENV, Config, ParamSpec, parse_config_text, parse_grid, parse_number, render_config, render_grid,
)
from core.errors import (
    EXIT_IO, EXIT_PRECONDITION, EXIT_RESOURCE_GUARD, OrderingError, PreconditionError, ResourceGuardError,
    StructuralError, exit_code_for,
)


def test_parse_number_kinds():
    assert parse_number('1/3') == Fraction(1, 3)
    assert parse_number('12') == 12 and isinstance(parse_number('12'), int)
    assert parse_number('0.25') == 0.25
    for bad in ('abc', '1/0', 'nan', 'inf', True):
        with pytest.raises(PreconditionError):
            parse_number(bad)


def test_parse_grid_ranges_and_lists():
    grid = parse_grid('n=500..2000:500; t=1..3')
    assert grid == {'n': [500, 1000, 1500, 2000], 't': [1, 2, 3]}
    assert parse_grid('n=4,6,9') == {'n': [4, 6, 9]}
    assert parse_grid(render_grid(grid)) == grid


@pytest.mark.parametrize('text', ['', 'n', 'n=5..1', 'n=1..5:0', 'n=a,b', '1n=1..2'])
def test_parse_grid_rejects(text):
    with pytest.raises(PreconditionError):
        parse_grid(text)


def test_param_spec_prob():
    spec = ParamSpec('p', 'prob')
    assert spec.parse('1/3') == Fraction(1, 3)
    assert spec.parse('1') == Fraction(1)
    assert spec.parse('0.5') == 0.5
    with pytest.raises(PreconditionError):
        spec.parse('3/2')


def test_param_spec_int_flag_choice():
    assert ParamSpec('n', 'int').parse('8') == 8
    assert ParamSpec('n', 'int').parse('4.0') == 4
    with pytest.raises(PreconditionError):
        ParamSpec('n', 'int').parse('2.5')
    assert ParamSpec('x', 'flag').parse('yes') is True
    assert ParamSpec('x', 'flag').parse('off') is False
    mode = ParamSpec('mode', 'choice', choices=('exact', 'mc'))
    assert mode.parse('mc') == 'mc'
    with pytest.raises(PreconditionError):
        mode.parse('fast')
    with pytest.raises(ValueError):
        ParamSpec('x', 'complex')


def test_parse_config_text_comments_and_dashes():
    data = parse_config_text('# 注释\nlog-level = DEBUG\n\nn = 6  # 维数\n')
    assert data == {'log_level': 'DEBUG', 'n': '6'}
    with pytest.raises(PreconditionError):
        parse_config_text('n 6')


def test_config_text_roundtrip():
    schema = [ParamSpec('n', 'int'), ParamSpec('p', 'prob'), ParamSpec('grid', 'range'), ParamSpec('x', 'flag')]
    values = {'n': 6, 'p': Fraction(1, 3), 'grid': {'n': [500, 1000]}, 'x': True, 'skip': None}
    config = Config.from_text(render_config(values, schema))
    resolved = config.resolve(schema)
    assert resolved == {'n': 6, 'p': Fraction(1, 3), 'grid': {'n': [500, 1000]}, 'x': True}


def test_resolve_rejects_unknown_and_missing():
    schema = [ParamSpec('n', 'int', required=True), ParamSpec('t', 'int', default=1)]
    with pytest.raises(PreconditionError, match='未知参数'):
        Config.from_text('n = 3\nbogus = 1').resolve(schema)
    with pytest.raises(PreconditionError, match='缺少必需参数'):
        Config.from_text('seed = 4').resolve(schema)
    assert Config.from_text('n = 3').resolve(schema) == {'n': 3, 't': 1}


def test_overrides_beat_file(tmp_path):
    path = tmp_path / 'run.conf'
    path.write_text('n = 3\nworkers = 2\n', encoding='utf-8')
    config = Config(str(path), {'n': '5', 'seed': None}, env_file=None)
    assert config.get('n') == '5'
    assert config.get_workers() == 2


def test_config_validation():
    with pytest.raises(PreconditionError):
        Config.from_text('workers = 0')
    with pytest.raises(PreconditionError):
        Config.from_text('format = xml')
    with pytest.raises(FileNotFoundError):
        Config('/nonexistent/globalcube.conf', env_file=None)


def test_seed_falls_back_to_environment(monkeypatch):
    monkeypatch.setenv(SEED_ENV, '17')
    assert Config(env_file=None).get_seed() == 17
    assert Config(overrides={'seed': '3'}, env_file=None).get_seed() == 3
    monkeypatch.delenv(SEED_ENV)
    assert Config(env_file=None).get_seed() == 0


def test_logging_config_defaults():
    assert Config.from_text('').get_logging_config() == {'level': 'INFO', 'path': None}
    assert Config.from_text('log_level = debug').get_logging_config()['level'] == 'DEBUG'


def test_exit_codes():
    assert exit_code_for(ResourceGuardError('x')) == EXIT_RESOURCE_GUARD
    assert exit_code_for(StructuralError('x')) == EXIT_PRECONDITION
    assert exit_code_for(OrderingError('x')) == EXIT_PRECONDITION
    assert exit_code_for(FileNotFoundError('x')) == EXIT_IO
    assert exit_code_for(RuntimeError('x')) == EXIT_PRECONDITION


def test_save_and_reload(tmp_path):
    path = tmp_path / 'saved.conf'
    Config.from_text('n = 6\np = 1/3').save(str(path))
    reloaded = Config(str(path), env_file=None)
    assert reloaded.resolve([ParamSpec('n', 'int'), ParamSpec('p', 'prob')]) == {'n': 6, 'p': Fraction(1, 3)}
