from pytest import mark, raises

from analysis.errors import ConfigurationError
from experiments.regimes import POLYNOMIAL_Q_LT_P
from experiments.settings import ExperimentConfig, build_resources, default_N
from utils.config import CONFIG_BLOCK_MARKER
from utils.parallel import ordered_map, worker_count
from utils.workspace import (Workspace, apply_overrides, config_block, format_key_values,
                             parse_key_values)


def test_parse_key_values():
    text = "# comment\np = 6\nq=2   # fine index\n\ns = -0.7\n"
    assert parse_key_values(text) == {'p': '6', 'q': '2', 's': '-0.7'}


@mark.parametrize("text", ("p 6\n", "= 3\n", "p = 1\np = 2\n"))
def test_parse_key_values_rejects(text):
    with raises(ConfigurationError):
        parse_key_values(text)


def test_embedded_block_is_read_back():
    values = {'p': '6.0', 'q': '2.0'}
    report = config_block(values) + "N,lambda\n1,2\n"
    assert report.startswith(CONFIG_BLOCK_MARKER)
    assert parse_key_values(report) == values


def test_apply_overrides():
    merged = apply_overrides({'p': '6', 'seed': '1'}, ['seed=5', ' samples = 4 '])
    assert merged == {'p': '6', 'seed': '5', 'samples': '4'}
    with raises(ConfigurationError):
        apply_overrides({}, ['seed'])
    with raises(ConfigurationError):
        apply_overrides({}, ['=4'])


def test_workspace_save_and_load(tmp_path):
    path = tmp_path / "run.cfg"
    assert Workspace.save(str(path), {'p': 6.0, 'q': 2.0})
    assert path.read_text() == format_key_values({'p': 6.0, 'q': 2.0})
    assert Workspace.load(str(path)) == {'p': '6.0', 'q': '2.0'}
    assert Workspace.load(str(tmp_path / "missing.cfg")) is None
    assert not Workspace.save(str(tmp_path / "no" / "such" / "dir.cfg"), {})


def test_config_round_trip():
    config = ExperimentConfig(6.0, 2.0, -0.7, N_min=2, N_max=5, candidate_families=(
        'section5', 'smooth_atom'), exclude_capped=False, k_max=3)
    mapping = config.to_mapping()
    assert mapping['s'] == '-0.7'
    assert mapping['candidate_families'] == 'section5,smooth_atom'
    assert mapping['separation'] == 'auto'
    assert mapping['exclude_capped'] == 'false'
    assert 'regime' not in mapping
    assert ExperimentConfig.from_mapping(mapping) == config
    assert config.regime == POLYNOMIAL_Q_LT_P


@mark.parametrize("values key".split(), (
    ({'p': '6', 'q': '2', 's': '-0.7', 'colour': 'red'}, 'colour'),
    ({'p': '6', 'q': '2'}, 's'),
    ({'p': '6', 'q': '2', 's': 'abc'}, 's'),
    ({'p': '6', 'q': '2', 's': '-0.7', 'samples': '0'}, 'samples'),
    ({'p': '6', 'q': '2', 's': '-0.7', 'N_min': '4', 'N_max': '3'}, 'N_max'),
    ({'p': '6', 'q': '2', 's': '-0.7', 'candidate_families': 'wavelets'}, 'candidate_families'),
    ({'p': '6', 'q': '2', 's': '-0.7', 'set_builder': 'custom'}, 'levels'),
    ({'p': '6', 'q': '2', 's': '-0.7', 'exclude_capped': 'maybe'}, 'exclude_capped'),
    ({'p': '1', 'q': '2', 's': '0'}, 'p'),
))
def test_from_mapping_names_the_bad_key(values, key):
    with raises(ConfigurationError) as info:
        ExperimentConfig.from_mapping(values)
    assert info.value.key == key


def test_build_resources_checks_smoothness():
    config = ExperimentConfig(6.0, 2.0, -0.7, j_max=10, m1=1)
    resources = build_resources(config)
    assert resources.bank.k_max == 3
    assert resources.atom.max_level == 3
    with raises(ConfigurationError):
        build_resources(config.with_values(k_max=5))


def test_default_N():
    assert [default_N(n) for n in (1, 2, 3, 4, 7, 8)] == [0, 1, 1, 2, 2, 3]
    with raises(ConfigurationError):
        default_N(0)


def test_worker_count(monkeypatch):
    monkeypatch.delenv('HPL_THREADS', raising=False)
    assert worker_count() == 1
    assert worker_count(4) == 4
    monkeypatch.setenv('HPL_THREADS', '3')
    assert worker_count() == 3
    monkeypatch.setenv('HPL_THREADS', 'many')
    assert worker_count() == 1


def test_ordered_map_keeps_order():
    assert ordered_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]
    assert ordered_map(str, [], workers=4) == []
