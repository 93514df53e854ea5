from .machine import Machine, Message, MovedLocal, Terminated, Walker, walk_step
from .messages import MessageCodec, WalkerMessage
from .sampler_manager import CommReport, Corpus, read_corpus, run_walks, walker_rng
from .strategies import REJECTION_CAP, NextHopSampler, WalkStrategy, huge_acceptance, node2vec_weight
