#!/usr/bin/env python
"""randpoly command line client.

    randpoly SUBCOMMAND [--option VALUE ...]

Every subcommand writes one CSV table, headed by '#' lines that record the
subcommand, the resolved configuration, its digest, the seed and any
capacity flags raised. Subcommand names may be shortened to any unambiguous
dash separated prefix, e.g. "mc" for mc-threshold.

Exit codes: 0 success, 2 capacity exceeded, 3 bad input or configuration,
4 internal assertion failed.

See LICENSE.txt for copyright and license.
"""
import argparse
import logging
import sys
import time

import randpoly
from randpoly import log
from randpoly.action import (RunManifest,
                             actions,
                             format_table,
                             get_action,
                             get_actions,
                             write_output)
from randpoly.cache import cache_stats
from randpoly.geometry import SolverStallError
from randpoly.measures import CapacityError
from randpoly.options import (BooleanOption,
                              FileOption,
                              IntOption,
                              OptionError,
                              StringOption)

__version__ = randpoly.__version__
module_logger = log.get_logger('ui')

EXIT_OK = 0
EXIT_CAPACITY = 2
EXIT_INPUT = 3
EXIT_INTERNAL = 4

def global_options():
    return [StringOption('config', tooltip='Experiment JSON file or preset name, e.g. experiment:cube12.'),
            StringOption('out', tooltip='Output file (default: standard output).'),
            IntOption('seed', minimum=0, tooltip='Master seed for Monte Carlo subcommands.'),
            IntOption('threads', minimum=1, default=1, tooltip='Worker threads; never changes results.'),
            BooleanOption('quiet', tooltip='Only log errors.'),
            BooleanOption('show-log-settings', tooltip='List loggers and their levels, then exit.'),
            FileOption('preset-file', tooltip='JSON file of extra presets, {"presets": {"type:name": {...}}}.'),
            BooleanOption('list-actions', tooltip='List subcommands, then exit.'),
            BooleanOption('list-presets', tooltip='List presets, then exit.')]

class UIArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise OptionError("%s: %s" % (self.prog, message))

def make_parser(prog, options):
    parser = UIArgumentParser(prog=prog, allow_abbrev=False)
    parser.add_argument('--version', action='version', version='randpoly %s' % __version__)
    for o in options:
        kw = dict(dest=o.dest, help=o.tooltip, required=o.required, metavar=o.__class__.__name__[:-6].upper())
        if isinstance(o, BooleanOption):
            kw.update(nargs='?', const='true', metavar='BOOL')
        parser.add_argument('--' + o.propname, **kw)
    return parser

def parse_options(parser, options, argv):
    namespace = parser.parse_args(argv)
    for o in options:
        value = getattr(namespace, o.dest)
        if value is None:
            continue
        try:
            o.from_str(value)
        except ValueError as e:
            raise OptionError('--' + o.propname, value, e)
    return dict((o.dest, o.value) for o in options)

def list_actions():
    width = max(len(a.action_name) for a in actions)
    return '\n'.join("%-*s  %s" % (width, a.action_name, a.tooltip) for a in actions)

def show_log_settings():
    names = sorted(n for n in logging.Logger.manager.loggerDict if n.startswith(log.logger_name))
    return '\n'.join(name + ': ' + log.format_level(name) for name in names)

def import_presets(path):
    if path:
        with open(path) as f:
            randpoly.presets.import_preset_file(f)

def resolve_action(name):
    """The action named name, or the only one whose name parts it prefixes."""
    exact = get_action(name)
    if exact is not None:
        return exact
    matching = get_actions(name)
    if len(matching) == 1:
        return matching[0]
    if not matching:
        raise OptionError('SUBCOMMAND', name, 'no such subcommand, try --list-actions')
    raise OptionError('SUBCOMMAND', name, 'ambiguous, matches %s' % ', '.join(a.action_name for a in matching))

def run(argv, stdout=None):
    stdout = stdout or sys.stdout
    if not argv or argv[0].startswith('-'):
        options = global_options()
        parser = make_parser('randpoly', options)
        settings = parse_options(parser, options, argv)
        import_presets(settings['preset_file'])
        if settings['show_log_settings']:
            stdout.write(show_log_settings() + '\n')
            return EXIT_OK
        if settings['list_actions']:
            stdout.write(list_actions() + '\n')
            return EXIT_OK
        if settings['list_presets']:
            stdout.write('\n'.join(randpoly.presets.names()) + '\n')
            return EXIT_OK
        parser.print_usage(sys.stderr)
        raise OptionError('SUBCOMMAND', '', 'a subcommand is required, try --list-actions')
    action_class = resolve_action(argv[0])
    options = global_options()
    action = action_class()
    action_options = action.get_options()
    parser = make_parser('randpoly ' + action_class.action_name, options + action_options)
    settings = parse_options(parser, options + action_options, argv[1:])
    if settings['quiet']:
        log.setLevel(logging.ERROR)
    import_presets(settings['preset_file'])
    if settings['config'] and not action_class.uses_config:
        raise OptionError('--config', settings['config'], '%s takes no configuration' % action_class.action_name)
    action.seed = settings['seed']
    action.threads = settings['threads']
    action.config = settings['config']
    action.set_options(action_options)
    started = time.perf_counter()
    with log.run_context(action_class.action_name):
        if not action_class.uses_config:
            action.label_run()
        columns, rows = action.run()
        module_logger.info("%d rows", len(rows))
    manifest = RunManifest(action_class.action_name, action.resolved_config(), action.seed, __version__,
                           action.flags, action.metadata, started)
    manifest.stop()
    for stats in cache_stats():
        module_logger.debug("%s: %d entries, %d hits, %d misses", *stats)
    write_output(format_table(columns, rows, manifest), settings['out'], stdout)
    return EXIT_OK

def exit_code(error):
    if isinstance(error, CapacityError):
        return EXIT_CAPACITY
    if isinstance(error, (AssertionError, SolverStallError)):
        return EXIT_INTERNAL
    if isinstance(error, (ValueError, ZeroDivisionError, OSError)):
        return EXIT_INPUT
    return None

def main(argv=None):
    """Run one subcommand and return its exit code."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        return run(list(argv))
    except KeyboardInterrupt:
        sys.stderr.write("Interrupted by user\n")
        return 130
    except SystemExit as e:
        return e.code or 0
    except Exception as e:
        code = exit_code(e)
        if code is None:
            raise
        sys.stderr.write("ERROR: %s\n" % e)
        return code

if __name__ == '__main__':
    sys.exit(main() or 0)
