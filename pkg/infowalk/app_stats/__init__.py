from .corpus_stats import CorpusStats, relative_entropy, walks_converged
from .walk_stats import (
    WalkInfoState,
    corr_update,
    entropy_full,
    entropy_series,
    entropy_step,
    r_squared,
    r_squared_full,
    should_terminate,
    should_terminate_full,
)
