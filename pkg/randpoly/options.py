"""Command line parameters of actions, parsed from strings and checked against their limits."""

import math
import os

_UNSET = []

class Option(object):
    def __init__(self, propname=None, default=None, value=_UNSET, tooltip=None, required=False):
        self.propname = propname
        if value is _UNSET:
            value = default
        self.value = value
        self.default = default
        self.tooltip = tooltip or ''
        self.required = required

    def __repr__(self):
        name = object.__repr__(self).split()[0][1:]
        return "<%s %s>" % (name, self.propname)

    @property
    def dest(self):
        return self.propname.replace('-', '_')

    def parse_str(self, string):
        return string.strip()

    def from_str(self, string):
        self.value = self.parse_str(string)

StringOption = Option

class BooleanOption(Option):
    true = ['true', 'yes', '1', 'enable', 'enabled', 'on']
    false = ['false', 'no', '0', 'disable', 'disabled', 'off']

    def __init__(self, propname=None, default=False, value=_UNSET, tooltip=None, required=False):
        Option.__init__(self, propname, default, value, tooltip, required)

    def parse_str(self, string):
        word = string.strip().lower()
        if word in self.true:
            return True
        if word in self.false:
            return False
        raise ValueError('requires a truth value, such as True, NO or 1')

class FloatOption(Option):
    def __init__(self, propname=None, minimum=None, maximum=None, default=None, value=_UNSET,
                 tooltip=None, required=False):
        Option.__init__(self, propname, default, value, tooltip, required)
        self.minimum = minimum
        self.maximum = maximum

    def convert(self, string):
        try:
            value = float(string.strip())
        except ValueError:
            raise ValueError('requires a floating point number')
        if math.isnan(value):
            raise ValueError('requires a floating point number')
        return value

    def parse_str(self, string):
        value = self.convert(string)
        if self.minimum is not None and value < self.minimum:
            raise ValueError('must be at least %s' % self.minimum)
        if self.maximum is not None and value > self.maximum:
            raise ValueError('must be at most %s' % self.maximum)
        return value

class IntOption(FloatOption):
    def convert(self, string):
        try:
            return int(string.strip())
        except ValueError:
            raise ValueError('requires an integer number')

class ChoiceOption(Option):
    def __init__(self, propname=None, choices=(), default=None, value=_UNSET, tooltip=None,
                 required=False):
        Option.__init__(self, propname, default, value, tooltip, required)
        self.choices = tuple(choices)

    def parse_str(self, string):
        word = string.strip().lower()
        if word not in self.choices:
            raise ValueError('must be one of %s' % '|'.join(self.choices))
        return word

class FloatListOption(Option):
    """Comma separated numbers, e.g. 0.5,1,1.5."""
    element_option = FloatOption

    def __init__(self, propname=None, minimum=None, default=None, value=_UNSET, tooltip=None,
                 required=False):
        Option.__init__(self, propname, default, value, tooltip, required)
        self.element = self.element_option(propname, minimum=minimum)

    def parse_str(self, string):
        parts = [p for p in string.split(',') if p.strip()]
        if not parts:
            raise ValueError('requires a comma separated list')
        return [self.element.parse_str(p) for p in parts]

class IntListOption(FloatListOption):
    element_option = IntOption

class FileOption(Option):
    def parse_str(self, string):
        path = string.strip()
        if not os.path.isfile(path):
            raise ValueError('no such file')
        return path

class OptionError(ValueError):
    """Bad command line input, as (option name, value, reason)."""
    details = None
    def __init__(self, *details):
        ValueError.__init__(self, *details)
        self.details = details

    def __str__(self):
        if len(self.details) == 3:
            return "%r is not an acceptable argument for %s (%s)." % (self.details[1], self.details[0],
                                                                      self.details[2])
        return ' '.join(str(d) for d in self.details)
