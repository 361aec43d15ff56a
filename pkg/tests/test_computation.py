import time

import pytest

from randpoly.computation import ComputeManager

def slow_square(x):
    time.sleep(0.001 * (x % 3))
    return x * x

@pytest.mark.parametrize('threads', [1, 4])
def test_results_come_back_in_job_order(threads):
    manager = ComputeManager(threads)
    ids = [manager.add(slow_square, i) for i in range(20)]
    assert ids == list(range(20))
    assert len(manager.jobs) == 20
    assert manager.compute_all() == [i * i for i in range(20)]
    assert manager.jobs == {}

def test_counter_keeps_running():
    manager = ComputeManager()
    manager.add(slow_square, 1)
    manager.compute_all()
    assert manager.add(slow_square, 2) == 1
    assert manager.compute_all() == [4]

def fail_on_five(x):
    if x == 5:
        raise ZeroDivisionError("trial %d" % x)
    return x

@pytest.mark.parametrize('threads', [1, 3])
def test_errors_propagate(threads):
    manager = ComputeManager(threads)
    for i in range(10):
        manager.add(fail_on_five, i)
    with pytest.raises(ZeroDivisionError):
        manager.compute_all()
    # a failed run leaves no stale jobs behind
    assert manager.jobs == {}

def test_thread_count_is_at_least_one():
    assert ComputeManager(0).threads == 1
