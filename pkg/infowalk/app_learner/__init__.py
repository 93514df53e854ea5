from .dsgl import (
    NegativeSampler,
    StepBatch,
    SyncResult,
    WorkerBuffers,
    batch_gradients,
    build_step,
    heldout_loss,
    sample_negatives,
    sync_full,
    sync_hotness,
    train_multiwindow,
)
from .embedding_store import (
    EmbeddingStore,
    HotnessBlock,
    StoreMismatchError,
    build_store,
    embeddings_bytes,
    hotness_blocks,
    load_embeddings,
    save_embeddings,
)
from .learner_manager import TrainParams, TrainResult, train
from .sgns import sgns_gradients, sgns_objective, sgns_pair_update
