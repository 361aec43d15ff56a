"""Loggers under the "randpoly" root, stamped with the run they belong to.

Levels come from RANDPOLY_LOGLEVEL, e.g. "info" or
"randpoly.ComputeManager=debug,warning". While a subcommand runs inside
run_context(), every line the root handler writes carries its label:

    2026-01-05 12:00:01,250 - randpoly.module.simulate - INFO - [mc-threshold seed=5 config=3f1c0a9e2b7d] ...

Worker threads share the label of the run that started them.
"""

import contextlib
import functools
import logging
import os
import threading
import time

levels = {'debug': logging.DEBUG,
          'info': logging.INFO,
          'warning': logging.WARNING,
          'error': logging.ERROR,
          'critical': logging.CRITICAL}

loglevel_env_var = "RANDPOLY_LOGLEVEL"
logger_name = "randpoly"
log_format = "%(asctime)s - %(name)s - %(levelname)s - [%(run)s] %(message)s"

def get_logger(name):
    """Logger for a class or component, below the randpoly root."""
    if not name.startswith(logger_name):
        name = logger_name + '.' + name
    return logging.getLogger(name)

def get_module_logger(path):
    stem = os.path.splitext(os.path.basename(path))[0]
    return logging.getLogger('%s.module.%s' % (logger_name, stem))

class RunLabel(object):
    """Identity of one subcommand run: its name, seed and config digest.

    The seed and digest are often only known once the configuration has
    been resolved, so actions fill them in with update().
    """
    digest_width = 12

    def __init__(self, subcommand, seed=None, config_digest=None):
        self.subcommand = subcommand
        self.seed = seed
        self.config_digest = config_digest

    def update(self, **fields):
        for name, value in fields.items():
            if name not in ('subcommand', 'seed', 'config_digest'):
                raise AttributeError(name)
            if value is not None:
                setattr(self, name, value)

    def __str__(self):
        parts = [self.subcommand]
        if self.seed is not None:
            parts.append('seed=%d' % self.seed)
        if self.config_digest:
            parts.append('config=%s' % self.config_digest[:self.digest_width])
        return ' '.join(parts)

_runs = []
_runs_lock = threading.Lock()

def current_run():
    """The innermost active RunLabel, or None outside any run."""
    with _runs_lock:
        return _runs[-1] if _runs else None

@contextlib.contextmanager
def run_context(subcommand, seed=None, config_digest=None):
    label = RunLabel(subcommand, seed, config_digest)
    with _runs_lock:
        _runs.append(label)
    logger.debug("run started: %s", label)
    try:
        yield label
    finally:
        logger.debug("run finished: %s", label)
        with _runs_lock:
            _runs.remove(label)

class RunStamp(logging.Filter):
    """Sets record.run to the active run label, '-' outside runs."""
    def filter(self, record):
        label = current_run()
        record.run = str(label) if label is not None else '-'
        return True

def make_handler(stream=None):
    handler = logging.StreamHandler(stream)
    handler.setLevel(logging.NOTSET)
    handler.addFilter(RunStamp())
    handler.setFormatter(logging.Formatter(log_format))
    return handler

logger = logging.getLogger(logger_name)
handler = make_handler()
logger.addHandler(handler)
logger.setLevel(logging.WARNING)

def parseLevel(literal):
    if literal.isdigit():
        return int(literal)
    literal = literal.strip().lower()
    if literal in levels:
        return levels[literal]
    for name, level in levels.items():
        if name.startswith(literal):
            return level
    raise ValueError('no such level (%r)' % literal)

def setLevel(level):
    logger.setLevel(level)

def setLevels(literal):
    """Apply a 'name=level,name=level' string; a bare level sets the root."""
    for setting in filter(None, literal.split(',')):
        name, _, level = setting.rpartition('=')
        name = name.strip().lower() or logger_name
        level = parseLevel(level)
        if name == logger_name:
            level = max(level, 1)
        get_logger(name).setLevel(level)

def parse_env(env_var=loglevel_env_var):
    if env_var in os.environ:
        setLevels(os.environ[env_var])

parse_env()

def _timed(f, pick_logger):
    @functools.wraps(f)
    def logwrapper(*args, **kw):
        target = pick_logger(args)
        target.info("Entering: %s", f.__name__)
        t = time.perf_counter()
        return_value = f(*args, **kw)
        target.debug("Exiting: %s (%.3fs)", f.__name__, time.perf_counter() - t)
        return return_value
    return logwrapper

def trace(f):
    """Decorator logs method enter/exit (info/debug) with the instance's logger."""
    return _timed(f, lambda args: args[0].logger)

def trace_function(logger):
    """Like trace, for module level functions logging to the given logger."""
    return lambda f: _timed(f, lambda args: logger)

def format_level(name):
    return logging.getLevelName(logging.getLogger(name).getEffectiveLevel())
