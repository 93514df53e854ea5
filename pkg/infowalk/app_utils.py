import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterator

import numpy as np

# Fixed stage slots so every stage seed can be re-derived from the top-level seed
STAGE_SLOTS = {
    "split": 0,
    "partition": 1,
    "walk": 2,
    "train": 3,
    "eval": 4,
}


def derive_seed(seed: int, stage: str, *extra: int) -> int:
    """
    Derives a 63-bit stage seed from the run seed.

    :param seed: The single top-level run seed.
    :param stage: One of STAGE_SLOTS.
    :param extra: Further integers, e.g. a trial index.
    :return: A non-negative int usable by numpy and random.Random.
    """
    if stage not in STAGE_SLOTS:
        raise ValueError(f"Unknown stage '{stage}'.")
    seq = np.random.SeedSequence([int(seed), STAGE_SLOTS[stage], *[int(e) for e in extra]])
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@contextmanager
def stage_timer(timings: Dict[str, float], name: str) -> Iterator[None]:
    """Records the wall time of a block under timings[name]."""
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = max(0.0, time.perf_counter() - start)


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
