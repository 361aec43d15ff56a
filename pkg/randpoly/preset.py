"""Typed settings read from JSON, and a registry of named
presets.

A preset is any setting value registered under a "type:name" key, such as
"experiment:cube12". A JSON document may extend a preset by naming it under
the "frompreset" key; only the keys it gives override the preset.
"""

import hashlib
import json
import math
import os

from . import log

module_logger = log.get_module_logger(__file__)

class ConfigError(ValueError):
    def __init__(self, key, value, reason):
        ValueError.__init__(self, key, value, reason)
        self.key = key
        self.value = value
        self.reason = reason

    def __str__(self):
        return "bad value %r for %s: %s" % (self.value, self.key, self.reason)

def canonical_json(value):
    return json.dumps(value, sort_keys=True, separators=(',', ':'), allow_nan=True)

def config_digest(value):
    """SHA-256 of the canonical JSON of a resolved configuration."""
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()

class Presets(object):
    def __init__(self):
        self.presets = {}
        self.setting_types = {}

    def register_type(self, type_name, type):
        self.setting_types[type_name] = type

    def add_builtin(self, name, value):
        setting_type = self.setting_types[name.split(':')[0]]
        settings = setting_type.from_value(value, preset_registry=self)
        self.add_preset(name, settings)

    def add_preset(self, name, preset):
        preset.name = name
        preset.presets = self
        self.presets[name] = preset

    def get_preset(self, name):
        if ':' not in name:
            name = name + ':builtin'
        try:
            return self.presets[name]
        except KeyError:
            raise ConfigError('preset', name, "no such preset")

    def get_value(self, name):
        return self.get_preset(name).get_value()

    def names(self, type_name=None):
        return sorted(n for n in self.presets if type_name is None or n.split(':')[0] == type_name)

    @classmethod
    def read_preset_file(cls, f):
        try:
            doc = json.load(f)
        except ValueError as e:
            raise ConfigError('preset file', getattr(f, 'name', f), "not valid JSON (%s)" % e)
        if not isinstance(doc, dict) or not isinstance(doc.get('presets', None), dict):
            raise ConfigError('preset file', getattr(f, 'name', f), 'expected {"presets": {...}}')
        return sorted(doc['presets'].items())

    def import_preset_file(self, f):
        """Register every preset of a {"presets": {"type:name": {...}}} file.

        Presets of unregistered types are skipped with a warning. Returns the
        names added.
        """
        added = []
        for name, value in self.read_preset_file(f):
            try:
                type_name, _ = name.split(':')
                setting_type = self.setting_types[type_name]
            except (KeyError, ValueError):
                module_logger.warning("skipping preset %r of unknown type", name)
                continue
            self.add_preset(name, setting_type.from_json(value, preset_registry=self))
            added.append(name)
        module_logger.info("imported %d presets from %s", len(added), getattr(f, 'name', f))
        return added

presets = Presets()

class Setting(object):
    """Extend parse and get_value to read and return values."""
    def __init__(self, frompreset=None, preset_registry=None):
        if preset_registry is None:
            preset_registry = presets
        self.frompreset = frompreset
        self.presets = preset_registry
        self.name = None

    @classmethod
    def from_json(cls, doc, key=None, preset_registry=None):
        setting = cls(preset_registry=preset_registry)
        setting.key = key
        setting.parse(doc)
        return setting

    def parse(self, doc):
        pass

    def get_value(self):
        if self.frompreset:
            return self.presets.get_value(self.frompreset)

class SimpleSetting(Setting):
    key = None

    def __init__(self, value=None, frompreset=None, preset_registry=None):
        Setting.__init__(self, frompreset, preset_registry)
        self.value = value

    def convert(self, value):
        return value

    def parse(self, doc):
        if doc is None:
            self.value = None
            return
        try:
            self.value = self.convert(doc)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(self.key or self.__class__.__name__, doc, str(e))

    def get_value(self):
        if self.value is None:
            return Setting.get_value(self)
        return self.value

    @classmethod
    def from_value(cls, value, frompreset=None, preset_registry=None):
        return cls(value, frompreset, preset_registry)

class IntSetting(SimpleSetting):
    minimum = None

    def convert(self, value):
        if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
            raise ValueError("requires an integer")
        value = int(value)
        if self.minimum is not None and value < self.minimum:
            raise ValueError("must be at least %d" % self.minimum)
        return value

class PositiveIntSetting(IntSetting):
    minimum = 1

class FloatSetting(SimpleSetting):
    def convert(self, value):
        if isinstance(value, bool):
            raise ValueError("requires a number")
        value = float(value)
        if math.isnan(value):
            raise ValueError("requires a number")
        return value

class ChoiceSetting(SimpleSetting):
    choices = ()

    def convert(self, value):
        if value not in self.choices:
            raise ValueError("must be one of %s" % ', '.join(self.choices))
        return value

class FloatListSetting(SimpleSetting):
    """A nonempty, sorted list of numbers."""
    element_type = float

    def convert(self, value):
        if isinstance(value, (str, bytes)) or not hasattr(value, '__iter__'):
            raise ValueError("requires a list")
        values = [self.element_type(v) for v in value]
        if not values:
            raise ValueError("grid must be nonempty")
        if values != sorted(values):
            raise ValueError("grid must be sorted")
        return values

class IntListSetting(FloatListSetting):
    element_type = int

class JSONSetting(SimpleSetting):
    """Any JSON object, stored as given."""
    def convert(self, value):
        if not isinstance(value, dict):
            raise ValueError("requires a JSON object")
        return value

class SettingStruct(Setting):
    """A fixed set of named settings with defaults.

    get_value() returns every declared key: the document's value, else the
    preset's, else the default. Keys in one of the alternatives groups
    replace each other: a document giving one of them drops the rest of the
    group inherited from its preset.
    """
    setting_types = {}
    defaults = {}
    alternatives = ()

    def __init__(self, settings=None, frompreset=None, preset_registry=None):
        Setting.__init__(self, frompreset, preset_registry)
        if settings is None:
            settings = dict.fromkeys(self.setting_types)
        self.settings = settings

    def __getitem__(self, key):
        return self.get_value()[key]

    @classmethod
    def from_value(cls, value, frompreset=None, preset_registry=None):
        return cls.from_json(dict(value), preset_registry=preset_registry)

    @classmethod
    def from_json(cls, doc, key=None, preset_registry=None):
        setting = cls(preset_registry=preset_registry)
        setting.parse(doc)
        return setting

    def parse(self, doc):
        if not isinstance(doc, dict):
            raise ConfigError('config', doc, "expected a JSON object")
        doc = dict(doc)
        self.frompreset = doc.pop('frompreset', None)
        if self.frompreset is not None:
            self.presets.get_preset(self.frompreset)
        unknown = sorted(set(doc) - set(self.setting_types))
        if unknown:
            raise ConfigError(unknown[0], doc[unknown[0]], "unknown configuration key")
        self.settings = {}
        for name, setting_type in self.setting_types.items():
            self.settings[name] = setting_type.from_json(doc[name], name, self.presets) if name in doc else None

    def get_specified(self):
        d = {}
        for n, setting in self.settings.items():
            if setting is None:
                continue
            d[n] = setting.get_value()
        return d

    def get_value(self):
        value = dict((n, self.defaults.get(n)) for n in self.setting_types)
        specified = self.get_specified()
        if self.frompreset:
            inherited = self.presets.get_value(self.frompreset)
            for group in self.alternatives:
                if any(n in specified for n in group):
                    inherited.update((n, self.defaults.get(n)) for n in group)
            value.update(inherited)
        value.update(specified)
        return value

def load_config(source, setting_type, preset_registry=None):
    """Build a setting from a JSON file path or a preset name."""
    if preset_registry is None:
        preset_registry = presets
    if os.path.isfile(source):
        with open(source) as f:
            try:
                doc = json.load(f)
            except ValueError as e:
                raise ConfigError('--config', source, "not valid JSON (%s)" % e)
        return setting_type.from_json(doc, preset_registry=preset_registry)
    if source in preset_registry.presets or source + ':builtin' in preset_registry.presets:
        return preset_registry.get_preset(source)
    raise ConfigError('--config', source, "neither a readable file nor a known preset")
