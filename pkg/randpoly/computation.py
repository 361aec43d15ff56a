"""Threaded execution of independent Monte Carlo trials with an ordered
reduction."""

import queue
import threading

from . import log

module_logger = log.get_module_logger(__file__)

class ComputeJob(object):
    def __init__(self, job_id, fcn, args=None):
        if args is None:
            args = ()
        self.job_id = job_id
        self.fcn = fcn
        self.args = args

    def __call__(self):
        return self.fcn(*self.args)

class TrialWorker(threading.Thread):
    """Pull jobs off a shared queue until it is empty or the run is aborted."""
    def __init__(self, jobs, results, manager):
        threading.Thread.__init__(self)
        self.daemon = True
        self.jobs = jobs
        self.results = results
        self.manager = manager
        self.error = None

    def run(self):
        while not self.manager.aborted():
            try:
                job = self.jobs.get_nowait()
            except queue.Empty:
                return
            try:
                self.results[job.job_id] = job()
            except BaseException as e:
                self.error = job.job_id, e
                self.manager.abort_all()
                return

class ComputeManager(object):
    """Job table keyed by a running counter.

    compute_all() runs every job, on `threads` worker threads when more than
    one is requested, and returns the results in job id order so that the
    reduction never depends on scheduling.
    """
    logger = log.get_logger('ComputeManager')

    def __init__(self, threads=1, jobs=None, counter=0):
        if jobs is None:
            jobs = {}
        self.threads = max(1, int(threads))
        self.jobs = jobs
        self.counter = counter
        self._abort = threading.Event()

    def add(self, fcn, *args):
        counter = self.counter
        self.jobs[counter] = ComputeJob(counter, fcn, args)
        self.counter += 1
        return counter

    def aborted(self):
        return self._abort.is_set()

    def abort_all(self):
        self._abort.set()

    @log.trace
    def compute_all(self):
        self._abort.clear()
        results = {}
        pending = [self.jobs[i] for i in sorted(self.jobs)]
        self.jobs = {}
        if self.threads == 1 or len(pending) <= 1:
            for job in pending:
                if self.aborted():
                    break
                results[job.job_id] = job()
        else:
            jobs = queue.Queue()
            for job in pending:
                jobs.put(job)
            workers = [TrialWorker(jobs, results, self) for _ in range(min(self.threads, len(pending)))]
            for w in workers:
                w.start()
            for w in workers:
                w.join()
            errors = sorted((w.error for w in workers if w.error), key=lambda e: e[0])
            if errors:
                job_id, e = errors[0]
                self.logger.error("job %d failed: %s", job_id, e)
                raise e
        if self.aborted():
            self.logger.warning("computation aborted after %d of %d jobs", len(results), len(pending))
        return [results[i] for i in sorted(results)]
