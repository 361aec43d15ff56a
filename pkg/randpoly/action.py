"""Actions (one per command line subcommand), name resolution, run
manifests and deterministic CSV output."""

import os
import tempfile
import time

from . import log
from .preset import canonical_json, config_digest

module_logger = log.get_module_logger(__file__)

class Action(object):
    # action names are case insensitive and should be short descriptions separated by dashes, e.g: exact-cube
    action_name = ''
    # tooltip should be a short description of what the action does.
    tooltip = None
    # True for actions that read their parameters from --config.
    uses_config = False

    def __init__(self, seed=None, threads=1, config=None):
        self.seed = seed
        self.threads = threads
        self.config = config
        self.params = {}
        self.flags = []
        self.metadata = []

    def get_options(self):
        return []

    def set_options(self, options):
        self.params.update((o.dest, o.value) for o in options)

    def resolved_config(self):
        """Everything the output depends on, defaults included."""
        d = dict(self.params)
        d['seed'] = self.seed
        return d

    def ensure_seed(self):
        """Monte Carlo actions run with seed 0 unless given one."""
        if self.seed is None:
            self.seed = 0
            self.label_run()

    def label_run(self):
        """Put this action's seed and config digest on the active run label."""
        label = log.current_run()
        if label is not None:
            label.update(seed=self.seed, config_digest=config_digest(self.resolved_config()))

    def flag(self, name):
        if name not in self.flags:
            module_logger.warning("%s: %s", self.action_name, name)
            self.flags.append(name)

    def add_metadata(self, key, value):
        self.metadata.append((key, value))

    def run(self):
        """Return (columns, rows)."""
        raise NotImplementedError

actions = []

def register_action(action):
    name = action.action_name.lower()
    for i in range(len(actions)):
        if actions[i].action_name.lower() == name:
            actions[i] = action
            break
    else:
        actions.append(action)
    actions.sort(key=lambda a: a.action_name.lower())

def match_names(query, subject):
    query_parts = query.lower().split('-')
    subject_parts = subject.split('-')
    for i in range(len(subject_parts) - len(query_parts) + 1):
        if all(subject_parts[i + j].startswith(query_parts[j]) for j in range(len(query_parts))):
            return True
    return False

def get_action(name):
    """The action registered under name, ignoring case, or None."""
    name = name.lower()
    for a in actions:
        if a.action_name.lower() == name:
            return a
    return None

def get_actions(query):
    """Actions whose dash separated name parts start with the parts of query."""
    return [a for a in actions if match_names(query, a.action_name)]

class RunManifest(object):
    """Provenance of one output file.

    The header written into files leaves out the runtime, so identical
    (config, seed, version) give identical bytes.
    """
    def __init__(self, subcommand, config, seed, version, capacity_flags=(), metadata=(), started=None):
        self.subcommand = subcommand
        self.config = config
        self.config_digest = config_digest(config)
        self.seed = seed
        self.version = version
        self.capacity_flags = list(capacity_flags)
        self.metadata = list(metadata)
        self.started = time.perf_counter() if started is None else started
        self.runtime = None

    def stop(self):
        self.runtime = time.perf_counter() - self.started
        module_logger.info("%s finished in %.3f s", self.subcommand, self.runtime)
        return self.runtime

    def header_lines(self):
        lines = ["randpoly %s" % self.version,
                 "subcommand: %s" % self.subcommand,
                 "config_digest: %s" % self.config_digest,
                 "seed: %s" % ("none" if self.seed is None else self.seed),
                 "capacity_flags: %s" % (','.join(self.capacity_flags) or 'none'),
                 "config: %s" % canonical_json(self.config)]
        lines.extend("%s: %s" % (k, format_value(v)) for k, v in self.metadata)
        return ['# ' + line for line in lines]

def format_value(value):
    """repr exact floats, plain ints, empty for missing values."""
    if value is None:
        return ''
    if hasattr(value, 'dtype'):
        value = value.item()
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)

def format_table(columns, rows, manifest=None):
    lines = manifest.header_lines() if manifest else []
    lines.append(','.join(columns))
    for row in rows:
        lines.append(','.join(format_value(v) for v in row))
    return '\n'.join(lines) + '\n'

def write_output(text, path=None, stream=None):
    """Write text to path via a temporary file and an atomic rename, or to
    stream when no path is given."""
    if path is None or path == '-':
        stream.write(text)
        stream.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix='.randpoly-', suffix='.tmp', dir=directory)
    try:
        with os.fdopen(fd, 'w', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
