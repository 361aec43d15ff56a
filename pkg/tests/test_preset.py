import io
import json

import pytest

from randpoly.preset import (ConfigError,
                             FloatListSetting,
                             IntListSetting,
                             PositiveIntSetting,
                             Presets,
                             SettingStruct,
                             canonical_json,
                             config_digest,
                             load_config)

class RunSettings(SettingStruct):
    setting_types = {'trials': PositiveIntSetting,
                     'grid': IntListSetting,
                     'weights': FloatListSetting}
    defaults = {'trials': 10}

@pytest.fixture
def registry():
    registry = Presets()
    registry.register_type('run', RunSettings)
    registry.add_builtin('run:small', {'trials': 5, 'grid': [1, 2, 4]})
    return registry

def test_canonical_json_and_digest():
    assert canonical_json({'b': 1, 'a': [1.5, None]}) == '{"a":[1.5,null],"b":1}'
    assert config_digest({'a': 1, 'b': 2}) == config_digest({'b': 2, 'a': 1})
    assert len(config_digest({})) == 64

def test_defaults_fill_unspecified_keys(registry):
    setting = RunSettings.from_json({'grid': [3]}, preset_registry=registry)
    assert setting.get_value() == {'trials': 10, 'grid': [3], 'weights': None}
    assert setting['grid'] == [3]

def test_document_extends_a_preset(registry):
    setting = RunSettings.from_json({'frompreset': 'run:small', 'trials': 50}, preset_registry=registry)
    assert setting.get_value() == {'trials': 50, 'grid': [1, 2, 4], 'weights': None}
    assert setting.get_specified() == {'trials': 50}

def test_alternative_keys_replace_each_other(registry):
    class SweepSettings(RunSettings):
        alternatives = (('grid', 'weights'),)

    registry.register_type('sweep', SweepSettings)
    registry.add_builtin('sweep:coarse', {'trials': 7, 'grid': [1, 2]})
    setting = SweepSettings.from_json({'frompreset': 'sweep:coarse', 'weights': [0.5]},
                                      preset_registry=registry)
    assert setting.get_value() == {'trials': 7, 'grid': None, 'weights': [0.5]}
    # without an alternatives group the keys merge
    merged = RunSettings.from_json({'frompreset': 'run:small', 'weights': [0.5]},
                                   preset_registry=registry)
    assert merged.get_value()['grid'] == [1, 2, 4]

def test_bad_documents(registry):
    for doc in ({'trials': 0}, {'trials': 2.5}, {'grid': [4, 2]}, {'grid': []}, {'colour': 'red'},
                {'frompreset': 'run:nosuch'}, [1, 2]):
        with pytest.raises(ConfigError):
            RunSettings.from_json(doc, preset_registry=registry)

def test_config_error_names_the_key():
    e = ConfigError('trials', 0, 'must be at least 1')
    assert isinstance(e, ValueError)
    assert str(e) == "bad value 0 for trials: must be at least 1"

def test_names_and_lookup(registry):
    assert registry.names('run') == ['run:small']
    assert registry.get_value('run:small')['trials'] == 5
    with pytest.raises(ConfigError):
        registry.get_preset('run:large')

def test_preset_files(registry):
    f = io.StringIO(json.dumps({'presets': {'run:wide': {'grid': [1, 10, 100]},
                                            'plot:ignored': {'colour': 'red'}}}))
    assert registry.import_preset_file(f) == ['run:wide']
    assert registry.get_value('run:wide')['grid'] == [1, 10, 100]
    assert 'plot:ignored' not in registry.presets
    with pytest.raises(ConfigError):
        registry.read_preset_file(io.StringIO('{"presets": []}'))
    with pytest.raises(ConfigError):
        registry.read_preset_file(io.StringIO('not json'))

def test_load_config(tmp_path, registry):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'frompreset': 'run:small', 'grid': [8]}))
    assert load_config(str(path), RunSettings, registry).get_value()['grid'] == [8]
    assert load_config('run:small', RunSettings, registry).get_value()['trials'] == 5
    bad = tmp_path / 'bad.json'
    bad.write_text('{')
    with pytest.raises(ConfigError):
        load_config(str(bad), RunSettings, registry)
    with pytest.raises(ConfigError):
        load_config('run:nosuch', RunSettings, registry)
