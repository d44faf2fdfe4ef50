"""Counter-based random streams, one per Monte-Carlo sample.

Each sample's generator is derived from (seed, sample_index), so any
subset of samples can be reproduced in any order and a run is bit-stable
regardless of how samples are scheduled.
"""

from numpy.random import Generator, Philox, SeedSequence


def sample_generator(seed, sample_index):
    """Independent stream for one sample of one run."""
    seq = SeedSequence(entropy=int(seed), spawn_key=(int(sample_index),))
    return Generator(Philox(seq))
