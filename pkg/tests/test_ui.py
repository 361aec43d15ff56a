import io
import json
import math

import pytest

from randpoly.geometry import SolverStallError
from randpoly.measures import CapacityError, LatticeBallLaw, make_cube
from randpoly.options import OptionError
from randpoly_ui import (EXIT_CAPACITY,
                         EXIT_INPUT,
                         EXIT_INTERNAL,
                         EXIT_OK,
                         exit_code,
                         main,
                         resolve_action,
                         run)

def run_table(argv):
    stdout = io.StringIO()
    assert run(argv, stdout) == EXIT_OK
    lines = stdout.getvalue().splitlines()
    header = [line for line in lines if line.startswith('#')]
    table = [line.split(',') for line in lines if not line.startswith('#')]
    return header, table[0], table[1:]

def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)

def test_exact_cube():
    header, columns, rows = run_table(['exact-cube', '--n', '10', '--N', '1024'])
    assert columns == ['N', 'F_exact', 'lower', 'upper']
    assert rows[0][0] == '1024'
    assert float(rows[0][1]) == pytest.approx(0.63230, abs=5e-6)
    assert header[0].startswith('# randpoly ')
    assert '# subcommand: exact-cube' in header
    assert '# seed: 0' in header
    assert any(line.startswith('# config_digest: ') for line in header)

def test_exact_cube_with_monte_carlo():
    _, columns, rows = run_table(['exact-cube', '--n', '6', '--N', '8,64', '--trials', '50', '--seed', '2'])
    assert columns[-2:] == ['F_hat', 'half_width']
    assert len(rows) == 2

def test_subcommand_prefixes():
    assert resolve_action('exact').action_name == 'exact-cube'
    assert resolve_action('mc').action_name == 'mc-threshold'
    with pytest.raises(OptionError):
        resolve_action('ex')
    with pytest.raises(OptionError):
        resolve_action('nosuch')

def test_koloun():
    header, columns, rows = run_table(['counterexample', '--which', 'koloun', '--w', '3'])
    assert columns == ['z1', 'z2', 'z3']
    assert rows == [['0', '0', '0']]
    assert '# candidates: 343' in header

def test_depth_one_table():
    _, columns, rows = run_table(['counterexample', '--which', 'depth1', '--n', '2,20', '--epsilon', '0.5'])
    assert columns == ['n', 'epsilon', 'expectation', 'brute_force']
    assert float(rows[0][2]) == pytest.approx(float(rows[0][3]))
    assert rows[1][3] == ''

def test_cramer_eval(tmp_path):
    path = write_json(tmp_path / 'cube.json', make_cube(3).to_json())
    _, columns, rows = run_table(['cramer-eval', '--measure', path, '--x', '1,1,1'])
    assert columns == ['x_1', 'x_2', 'x_3', 'lambda_star']
    assert float(rows[0][3]) == pytest.approx(3 * math.log(2))
    header, columns, rows = run_table(['cramer-eval', '--measure', path, '--distribution'])
    assert columns == ['value', 'prob']
    assert len(rows) == 1 and float(rows[0][1]) == pytest.approx(1.0)
    beta = [line for line in header if line.startswith('# beta: ')][0]
    assert float(beta.split(': ')[1]) == pytest.approx(0.0, abs=1e-12)

def test_cramer_eval_on_atoms(tmp_path):
    path = write_json(tmp_path / 'ball.json', LatticeBallLaw(2, 1, 1).to_json())
    _, columns, rows = run_table(['cramer-eval', '--measure', path, '--x', '0,0'])
    assert columns == ['x_1', 'x_2', 'lower', 'upper', 't']
    assert float(rows[0][2]) <= float(rows[0][3])

def test_extension_check(tmp_path):
    path = write_json(tmp_path / 'geometric.json', {'type': 'pmf1d', 'family': 'geometric', 'q': 0.5})
    header, columns, rows = run_table(['extension-check', '--measure', path, '--radii', '10,50'])
    assert columns == ['R', 'partial_sum']
    assert [r[0] for r in rows] == ['10.0', '50.0']
    assert '# log_concave: true' in header
    bumpy = write_json(tmp_path / 'bumpy.json', {'type': 'pmf1d', 'family': 'masses', 'masses': [0.2, 0.1, 0.7]})
    header, _, rows = run_table(['extension-check', '--measure', bumpy])
    assert rows == []
    assert '# log_concave: false' in header

def test_depth_eval(tmp_path):
    path = write_json(tmp_path / 'ball.json', LatticeBallLaw(2, 1, 1).to_json())
    _, columns, rows = run_table(['depth-eval', '--measure', path, '--x', '0,0'])
    assert columns == ['depth', 'method', 'bias']
    assert float(rows[0][0]) == pytest.approx(3 / 5)
    assert rows[0][1:] == ['exact_2d', 'exact']

def test_lattice_threshold():
    _, columns, rows = run_table(['lattice-threshold', '--n', '5', '--N', '1,11,50', '--trials', '0'])
    assert columns == ['N', 'lower', 'upper', 'upper_loose']
    lower = [float(r[1]) for r in rows]
    assert lower == sorted(lower)

def test_mc_threshold_from_file(tmp_path):
    path = write_json(tmp_path / 'experiment.json',
                      {'measure': make_cube(4).to_json(), 'N_grid': [1, 4, 16], 'trials': 20})
    header, columns, rows = run_table(['mc-threshold', '--config', path, '--seed', '5'])
    assert columns == ['rho', 'N', 'F_hat', 'half_width', 'marginal_fraction']
    assert [r[1] for r in rows] == ['1', '4', '16']
    assert '# seed: 5' in header

def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    argv = ['exact-cube', '--n', '5', '--N', '4,16', '--trials', '30', '--seed', '7']
    assert main(argv + ['--out', str(first)]) == EXIT_OK
    assert main(argv + ['--out', str(second), '--threads', '3']) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()

def test_bad_input_exits_with_input_code(tmp_path):
    out = tmp_path / 'out.csv'
    assert main(['exact-cube', '--n', '10', '--out', str(out)]) == EXIT_INPUT
    assert not out.exists()
    assert main(['exact-cube', '--n', 'ten', '--N', '4']) == EXIT_INPUT
    assert main(['ex']) == EXIT_INPUT
    assert main(['nosuch']) == EXIT_INPUT
    assert main([]) == EXIT_INPUT
    assert main(['exact-cube', '--n', '3', '--N', '4', '--config', 'experiment:cube10']) == EXIT_INPUT
    assert main(['mc-threshold', '--config', str(tmp_path / 'missing.json')]) == EXIT_INPUT

def test_capacity_exits_with_capacity_code():
    assert main(['counterexample', '--which', 'infmean', '--n', '2', '--K', '20000']) == EXIT_CAPACITY

def test_listings(capsys):
    assert main(['--list-actions']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'exact-cube' in out and 'mc-threshold' in out
    assert main(['--list-presets']) == EXIT_OK
    assert 'experiment:cube12' in capsys.readouterr().out
    assert main(['--version']) == EXIT_OK

def test_exit_codes():
    assert exit_code(CapacityError('x', 2, 1)) == EXIT_CAPACITY
    assert exit_code(ZeroDivisionError()) == EXIT_INPUT
    assert exit_code(OSError()) == EXIT_INPUT
    assert exit_code(AssertionError()) == EXIT_INTERNAL
    assert exit_code(SolverStallError('stalled')) == EXIT_INTERNAL
    assert exit_code(KeyError('k')) is None

def test_mc_threshold_reruns_are_byte_identical(tmp_path):
    config = write_json(tmp_path / 'experiment.json',
                        {'measure': {'type': 'lattice_ball', 'n': 3, 'r': 1, 'p': 1}, 'N_grid': [2, 7, 20],
                         'trials': 40, 'seed': 11})
    outputs = []
    for name, threads in (('a.csv', '1'), ('b.csv', '4')):
        path = tmp_path / name
        assert main(['mc-threshold', '--config', config, '--threads', threads, '--out', str(path)]) == EXIT_OK
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert b'# seed: 11' in outputs[0]

def test_preset_file_adds_presets(tmp_path, capsys):
    path = write_json(tmp_path / 'presets.json',
                      {'presets': {'experiment:tiny-from-file': {'measure': make_cube(4).to_json(),
                                                                 'N_grid': [1, 4], 'trials': 10}}})
    assert main(['--list-presets', '--preset-file', path]) == EXIT_OK
    assert 'experiment:tiny-from-file' in capsys.readouterr().out
    _, _, rows = run_table(['mc-threshold', '--preset-file', path, '--config', 'experiment:tiny-from-file'])
    assert [r[1] for r in rows] == ['1', '4']
    assert main(['mc-threshold', '--preset-file', str(tmp_path / 'missing.json')]) == EXIT_INPUT
