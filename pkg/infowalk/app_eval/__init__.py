from .eval_manager import auc_from_scores, auc_from_vectors, auc_pairwise, auc_score, pair_scores, repeat_eval, results_frame
from .link_split import LinkSplit, SplitError, split_edges
