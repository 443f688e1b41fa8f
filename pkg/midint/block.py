"""
Phase-parallel model of one GPU thread block.

A kernel is a static list of phases; the boundary between two phases is a
barrier. In a phase every virtual thread runs the same body

    body(tid, shared, private) -> (writes, private)

where `shared` is a read-only view of the block's buffers, `private` is the
thread's own state carried across barriers, and `writes` is an iterable of
(buffer, index, value) triples. Writes land as soon as a thread finishes, so a
kernel whose threads race inside a phase gives schedule-dependent output.
"""
import logging
import warnings
from collections import namedtuple

import numpy as np


logger = logging.getLogger(__name__)

MAX_BLOCK_THREADS = 1024
DEFAULT_SCHEDULE_TRIALS = 8


class BufferAccessError(IndexError):
    pass


class PhaseConflictError(RuntimeError):
    pass


Phase = namedtuple('Phase', ['name', 'body'])


class PhasedKernel(object):
    """
    Params
    ----------------------------------------------------------------------------
    - config:   BlockConfig; its thread_count sizes the block
    - phases:   ordered Phase list
    - scratch:  {buffer name: length} allocated zeroed unless passed as input
    - outputs:  buffer names returned by run_phased_kernel (default: all)
    """
    def __init__(self, config, phases, scratch=None, outputs=None,
                 name='kernel'):
        self.config = config
        self.phases = [p if isinstance(p, Phase) else Phase(*p)
                       for p in phases]
        self.scratch = dict(scratch or {})
        self.outputs = outputs
        self.name = name

    def __repr__(self):
        return 'PhasedKernel({}, {} phases, {})'.format(
            self.name, len(self.phases), self.config)

    @property
    def thread_count(self):
        return self.config.thread_count


class _BufferReader(object):
    def __init__(self, name, data, reads):
        self.name = name
        self._data = data
        self._reads = reads

    def __len__(self):
        return len(self._data)

    def __getitem__(self, i):
        if not isinstance(i, (int, np.integer)) or not 0 <= i < len(self._data):
            raise BufferAccessError('{}[{}] out of range (length {})'
                                    .format(self.name, i, len(self._data)))
        if self._reads is not None:
            self._reads.add((self.name, i))
        return self._data[i]


class SharedView(object):
    """Read-only access to the block's buffers, optionally recording reads."""

    def __init__(self, buffers, reads=None):
        self._buffers = buffers
        self._reads = reads

    def __getitem__(self, name):
        try:
            data = self._buffers[name]
        except KeyError:
            raise BufferAccessError('No shared buffer named {}'.format(name))
        return _BufferReader(name, data, self._reads)

    def __contains__(self, name):
        return name in self._buffers


def _thread_order(count, rng):
    if rng is None:
        return range(count)
    return rng.permutation(count).tolist()


def run_phased_kernel(kernel, inputs, order_seed=None, validate=False):
    """
    Runs every phase of `kernel` over its threads and returns the output
    buffers as lists.

    Threads run in index order unless `order_seed` is given, in which case
    each phase uses its own seeded shuffle. With `validate` the executor
    tracks reads and writes per phase and raises PhaseConflictError when two
    threads write the same location, or one reads what another wrote.
    """
    buffers = {name: list(values) for name, values in inputs.items()}
    for name, size in kernel.scratch.items():
        buffers.setdefault(name, [0] * size)

    threads = kernel.thread_count
    if threads > MAX_BLOCK_THREADS:
        warnings.warn('{} uses {} threads, above the {} a real block allows'
                      .format(kernel.name, threads, MAX_BLOCK_THREADS))

    rng = np.random.default_rng(order_seed) if order_seed is not None else None
    privates = [None] * threads

    for phase in kernel.phases:
        writers = {}
        readers = {}
        for tid in _thread_order(threads, rng):
            reads = set() if validate else None
            writes, privates[tid] = phase.body(tid, SharedView(buffers, reads),
                                               privates[tid])
            for name, idx, value in writes or ():
                buf = buffers.get(name)
                if buf is None or not 0 <= idx < len(buf):
                    raise BufferAccessError(
                        'Thread {} wrote {}[{}] in phase {}'
                        .format(tid, name, idx, phase.name))
                buf[idx] = value
                if validate:
                    owner = writers.setdefault((name, idx), tid)
                    if owner != tid:
                        raise PhaseConflictError(
                            'Threads {} and {} both write {}[{}] in phase {}'
                            .format(owner, tid, name, idx, phase.name))
            if validate:
                for loc in reads:
                    readers.setdefault(loc, set()).add(tid)

        if validate:
            for loc, tid in writers.items():
                others = readers.get(loc, set()) - {tid}
                if others:
                    raise PhaseConflictError(
                        'Thread {} writes {}[{}] read by thread {} in phase {}'
                        .format(tid, loc[0], loc[1], min(others), phase.name))

        logger.debug('%s: phase %s done (%d threads)', kernel.name, phase.name,
                     threads)

    names = kernel.outputs if kernel.outputs is not None else sorted(buffers)
    return {name: buffers[name] for name in names}


def check_schedule_independence(kernel, inputs, trials=DEFAULT_SCHEDULE_TRIALS,
                                seed=0):
    """True iff `trials` seeded thread shuffles all match the in-order run."""
    if trials < 2:
        raise ValueError('Need at least 2 schedules, got {}'.format(trials))
    expected = run_phased_kernel(kernel, inputs)
    for trial in range(trials):
        got = run_phased_kernel(kernel, inputs, order_seed=seed + trial)
        if got != expected:
            logger.info('%s: schedule %d diverged', kernel.name, seed + trial)
            return False
    return True
