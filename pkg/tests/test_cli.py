"""
命令行与子命令注册表测试
"""
import json

import pytest

from main import build_campaign_parser, main
from core.errors import EXIT_CHECK_FAILED, EXIT_OK, EXIT_PRECONDITION, EXIT_RESOURCE_GUARD, EXIT_UNKNOWN_COMMAND
from campaigns.registry import CAMPAIGNS, UnknownCampaignError, get_campaign, list_campaigns


def _run(tmp_path, *argv):
    out = tmp_path / 'report.json'
    code = main(['--log-level', 'ERROR', '--output', str(out), *argv])
    data = json.loads(out.read_text(encoding='utf-8')) if out.exists() else None
    return code, data


def test_search_max(tmp_path):
    code, data = _run(tmp_path, 'search-max', '--n', '4', '--t', '1')
    assert code == EXIT_OK
    assert data['campaign'] == 'search-max'
    assert data['results']['max_size'] == 6
    assert data['results']['all_umvirates'] is True


def test_search_max_with_oracle(tmp_path):
    code, data = _run(tmp_path, 'search-max', '--n', '3', '--t', '1', '--oracle')
    assert code == EXIT_OK
    assert data['results']['oracle_max_size'] == 2
    assert all(c['holds'] for c in data['checks'])


def test_hall_bound_exact(tmp_path):
    code, data = _run(tmp_path, 'hall-bound', '--n', '2', '--p', '0.5', '--mode', 'exact')
    assert code == EXIT_OK
    assert data['results']['mu_U'] == pytest.approx(0.4375)
    assert data['results']['vacuous'] is True


def test_exact_rational_bias_is_kept(tmp_path):
    code, data = _run(tmp_path, 'hall-bound', '--n', '2', '--p', '1/2', '--mode', 'exact')
    assert code == EXIT_OK
    assert data['results']['mu_U'] == '7/16'


def test_counterexample(tmp_path):
    code, data = _run(tmp_path, 'counterexample', '--n', '8', '--t', '4')
    assert code == EXIT_OK
    assert data['results']['size'] == 26


def test_config_file_and_flags(tmp_path):
    conf = tmp_path / 'audit.conf'
    conf.write_text('n = 500\nt = 1\n', encoding='utf-8')
    code, data = _run(tmp_path, 'audit-bootstrap', '--config', str(conf))
    assert code == EXIT_OK
    assert data['config']['params']['n'] == 500


def test_csv_format(tmp_path):
    out = tmp_path / 'grid.csv'
    code = main(['--log-level', 'ERROR', '--format', 'csv', '--output', str(out),
                 'audit-claim52', '--grid', 'n=500,1000;t=1'])
    assert code == EXIT_OK
    assert out.read_text(encoding='utf-8').splitlines()[0].startswith('n,t,name')


def test_unknown_command():
    assert main(['no-such-command']) == EXIT_UNKNOWN_COMMAND
    with pytest.raises(UnknownCampaignError):
        get_campaign('no-such-command')


def test_missing_command():
    assert main([]) == EXIT_PRECONDITION


def test_missing_required_parameter(tmp_path):
    code, data = _run(tmp_path, 'search-max', '--n', '4')
    assert code == EXIT_PRECONDITION
    assert data is None


def test_invalid_bias(tmp_path):
    code, _ = _run(tmp_path, 'globalness', '--family', 'dictator:1', '--n', '3', '--p', '0')
    assert code == EXIT_PRECONDITION


def test_resource_guard(tmp_path):
    code, _ = _run(tmp_path, 'search-max', '--n', '9', '--t', '1')
    assert code == EXIT_RESOURCE_GUARD


def test_failed_check_exit_code(tmp_path):
    code, data = _run(tmp_path, 'audit-claim52', '--n', '500', '--t', '1', '--a', '100')
    assert code == EXIT_CHECK_FAILED
    assert not all(c['holds'] for c in data['checks'])


def test_catalog():
    catalog = list_campaigns()
    names = [entry['name'] for entry in catalog]
    assert len(names) == len(set(names)) == len(CAMPAIGNS)
    assert {'search-max', 'verify-ak', 'level-d-audit', 'hall-bound', 'list'} <= set(names)
    for entry in catalog:
        assert entry['description']
        json.dumps(entry, default=str)


def test_list_command(tmp_path):
    code, data = _run(tmp_path, 'list')
    assert code == EXIT_OK
    assert data['results']['count'] == len(CAMPAIGNS)


def test_campaign_parser_flags():
    parser = build_campaign_parser(CAMPAIGNS['search-max'])
    args = parser.parse_args(['--n', '4', '--t', '1', '--enumerate-all'])
    assert args.enumerate_all == 'true'
    assert args.mode is None
    with pytest.raises(SystemExit):
        parser.parse_args(['--mode', 'sideways'])


def test_json_report_carries_table(tmp_path):
    code, data = _run(tmp_path, 'level-d-audit', '--family', 'and:1,2', '--n', '4', '--g', '1', '--d-max', '3')
    assert code == EXIT_OK
    assert [row['d'] for row in data['table']] == [1, 2, 3]
    assert {'lhs', 'frame', 'implied_c2'} <= set(data['table'][0])


def test_json_report_without_table(tmp_path):
    _, data = _run(tmp_path, 'search-max', '--n', '3', '--t', '1')
    assert 'table' not in data


def test_save_config_replays_run(tmp_path):
    saved = tmp_path / 'saved.conf'
    code, first = _run(tmp_path, 'counterexample', '--n', '8', '--t', '4', '--seed', '11',
                       '--save-config', str(saved))
    assert code == EXIT_OK
    text = saved.read_text(encoding='utf-8')
    assert 'seed = 11' in text and 'save_config' not in text

    replay = tmp_path / 'replay.json'
    assert main(['--config', str(saved), '--output', str(replay), 'counterexample']) == EXIT_OK
    second = json.loads(replay.read_text(encoding='utf-8'))
    assert second['results'] == first['results']


def test_extract_global_on_subcube(tmp_path):
    code, data = _run(tmp_path, 'extract-global', '--family', 'and:1,2', '--n', '4', '--g', '1.5')
    assert code == EXIT_OK
    assert data['results']['restriction'] == '{1,2}->(1,1)'
    assert data['results']['restricted_measure'] == 1
