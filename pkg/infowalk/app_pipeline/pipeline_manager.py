# File: infowalk/app_pipeline/pipeline_manager.py
import logging
import os
from typing import Any, Dict, Tuple

import numpy as np
import pandas as pd

from infowalk.app_eval.eval_manager import auc_from_vectors, auc_score, repeat_eval, results_frame
from infowalk.app_eval.link_split import LinkSplit, split_edges
from infowalk.app_file_mgt import ArtifactWorkspace, WorkspaceError
from infowalk.app_graph import CsrGraph, load_csr, load_edge_list
from infowalk.app_learner import TrainParams, TrainResult, embeddings_bytes, load_embeddings, train
from infowalk.app_partition import PartitionAssignment, edge_cut, partition_graph, read_partition
from infowalk.app_reports import generate_loss_chart, generate_walk_length_histogram, get_descriptives
from infowalk.app_sampler import CommReport, Corpus, WalkStrategy, read_corpus, run_walks
from infowalk.app_utils import derive_seed, stage_timer
from infowalk.config import RunConfig

logger = logging.getLogger(__name__)

PARTITION_FILE = "partition.txt"
PARTITION_SIZES_FILE = "partition_sizes.csv"
CORPUS_FILE = "corpus.txt"
COMM_REPORT_FILE = "comm_report.csv"
EMBEDDINGS_FILE = "embeddings.txt"
TRAINING_LOG_FILE = "training_log.csv"
EVAL_FILE = "eval.csv"
WALK_CHART_FILE = "walk_lengths.png"
LOSS_CHART_FILE = "training_loss.png"


def load_graph(config: RunConfig) -> CsrGraph:
    """Edge list by default; a '.csr' path is read as the binary cache."""
    if not config.graph:
        raise WorkspaceError("No graph given; pass --graph or set 'graph' in the config file.")
    if not os.path.exists(config.graph):
        raise WorkspaceError(f"Graph file not found: '{config.graph}'")
    if config.graph.endswith(".csr"):
        return load_csr(config.graph)
    return load_edge_list(config.graph, directed=config.directed, weighted=config.weighted)


class PipelineManager:
    """
    Runs the stages of one configuration against one output directory.

    The in-memory stages (split, partition, walk, train) take explicit seeds
    so extra evaluation trials can rerun them; the stage_* methods read the
    previous stage's artifacts, write their own and merge a section into
    the run report.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.workspace = ArtifactWorkspace(config.out)
        self.timings: Dict[str, float] = {}
        self._graph = None
        self._split = None

    # --- in-memory stages ---

    @property
    def graph(self) -> CsrGraph:
        if self._graph is None:
            self._graph = load_graph(self.config)
        return self._graph

    def split(self, seed: int) -> LinkSplit:
        return split_edges(self.graph, self.config.holdout_fraction, derive_seed(seed, "split"))

    @property
    def run_split(self) -> LinkSplit:
        """The split of the run seed; every staged command recomputes the same one."""
        if self._split is None:
            self._split = self.split(self.config.seed)
        return self._split

    def partition(self, g: CsrGraph, seed: int) -> PartitionAssignment:
        c = self.config
        return partition_graph(g, c.partitioner, c.machines, c.gamma, c.order, c.segment_count,
                               derive_seed(seed, "partition"), c.thread_count)

    def walk(self, g: CsrGraph, parts: PartitionAssignment, seed: int) -> Tuple[Corpus, CommReport]:
        c = self.config
        return run_walks(g, parts, WalkStrategy.from_config(c), c.mu, c.delta,
                         derive_seed(seed, "walk"), c.thread_count)

    def train(self, corpus: Corpus, seed: int) -> TrainResult:
        return train(corpus, self.config.machines, TrainParams.from_config(self.config, derive_seed(seed, "train")))

    def run_trial(self, trial: int, trial_seed: int) -> float:
        """AUC of one full in-memory run; trial 0 scores the stored embeddings instead."""
        if trial == 0:
            return self.score_stored(self.run_split)
        split = self.split(trial_seed)
        parts = self.partition(split.train_graph, trial_seed)
        corpus, _ = self.walk(split.train_graph, parts, trial_seed)
        result = self.train(corpus, trial_seed)
        return auc_score(result.store, split, self.config.score_vectors)

    def score_stored(self, split: LinkSplit) -> float:
        path = self.workspace.require(EMBEDDINGS_FILE, "train")
        emb = load_embeddings(path)
        if emb.shape[0] != self.graph.node_count:
            raise WorkspaceError(f"'{EMBEDDINGS_FILE}' has {emb.shape[0]} rows, graph has {self.graph.node_count} nodes.")
        return auc_from_vectors(emb, split)

    # --- staged commands ---

    def stage_partition(self) -> Dict[str, Any]:
        c = self.config
        with stage_timer(self.timings, "partition"):
            g = self.run_split.train_graph
            parts = self.partition(g, c.seed)
            saved = {
                PARTITION_FILE: self.workspace.save_file(PARTITION_FILE, parts.to_text()),
                PARTITION_SIZES_FILE: self.workspace.save_frame(PARTITION_SIZES_FILE, parts.summary_frame(g)),
            }
        payload = {
            "seconds": self.timings["partition"],
            "method": c.partitioner,
            "order": parts.order,
            "machines": parts.m,
            "sizes": parts.sizes.tolist(),
            "edge_cut": edge_cut(g, parts),
            "checksums": _checksums(saved),
        }
        self._report("partition", payload)
        return payload

    def stage_walk(self) -> Dict[str, Any]:
        c = self.config
        path = self.workspace.require(PARTITION_FILE, "partition")
        with stage_timer(self.timings, "walk"):
            g = self.run_split.train_graph
            parts = read_partition(path, g.node_count, c.machines)
            corpus, report = self.walk(g, parts, c.seed)
            saved = {
                CORPUS_FILE: self.workspace.save_file(CORPUS_FILE, corpus.to_text()),
                COMM_REPORT_FILE: self.workspace.save_frame(COMM_REPORT_FILE, report.to_frame()),
            }
        strategy = WalkStrategy.from_config(c)
        payload = {
            "seconds": self.timings["walk"],
            "strategy": strategy.kind,
            "stopping": strategy.stopping,
            **report.summary(),
            "message_size": strategy.codec().message_size(c.l_max if strategy.information_centric else c.fixed_length),
            "walk_length": get_descriptives(_as_series(corpus.lengths())),
            "total_ocn": corpus.stats.total_ocn,
            "ocn_max": corpus.stats.ocn_max,
            "checksums": _checksums(saved),
        }
        self._report("walk", payload)
        return payload

    def stage_train(self) -> Dict[str, Any]:
        c = self.config
        path = self.workspace.require(CORPUS_FILE, "walk")
        with stage_timer(self.timings, "train"):
            corpus = read_corpus(path, self.graph.node_count)
            result = self.train(corpus, c.seed)
            saved = {
                EMBEDDINGS_FILE: self.workspace.save_file(
                    EMBEDDINGS_FILE, embeddings_bytes(result.store, vectors=c.score_vectors)
                ),
                TRAINING_LOG_FILE: self.workspace.save_frame(TRAINING_LOG_FILE, result.log),
            }
        payload = {
            "seconds": self.timings["train"],
            "machines": c.machines,
            "workers": c.workers,
            "final_loss": float(result.log["loss"].iloc[-1]),
            "hotness_blocks": len(result.store.blocks),
            "synced_rows": result.sync_rows,
            "bytes_synced": result.sync_bytes,
            "checksums": _checksums(saved),
        }
        self._report("train", payload)
        return payload

    def stage_eval(self) -> Dict[str, Any]:
        c = self.config
        if self.run_split.test_size == 0:
            raise WorkspaceError("No held-out edges to score; set holdout_fraction above 0.")
        self.workspace.require(EMBEDDINGS_FILE, "train")
        with stage_timer(self.timings, "eval"):
            frame, summary = repeat_eval(self.run_trial, c.trials, c.seed)
            saved = {EVAL_FILE: self.workspace.save_frame(EVAL_FILE, results_frame(frame, summary))}
        payload = {
            "seconds": self.timings["eval"],
            "trials": c.trials,
            "test_pairs": self.run_split.test_size,
            "auc": summary["mean"],
            "auc_std": summary["std"],
            "checksums": _checksums(saved),
        }
        self._report("eval", payload)
        return payload

    def run_all(self) -> Dict[str, Any]:
        """Chains the four staged commands, then writes the charts."""
        sections = {
            "partition": self.stage_partition(),
            "walk": self.stage_walk(),
            "train": self.stage_train(),
            "eval": self.stage_eval(),
        }
        self.write_charts()
        return sections

    def write_charts(self) -> Dict[str, Any]:
        g = self.graph
        corpus = read_corpus(self.workspace.require(CORPUS_FILE, "walk"), g.node_count)
        log = _read_frame(self.workspace.require(TRAINING_LOG_FILE, "train"))
        saved = {
            WALK_CHART_FILE: self.workspace.save_file(WALK_CHART_FILE, generate_walk_length_histogram(corpus.lengths())),
            LOSS_CHART_FILE: self.workspace.save_file(LOSS_CHART_FILE, generate_loss_chart(log)),
        }
        self._report("charts", {"checksums": _checksums(saved)})
        return saved

    def _report(self, section: str, payload: Dict[str, Any]):
        report = self.workspace.load_report()
        timings = dict(report.get("timings", {}))
        timings.update({k: v for k, v in self.timings.items() if k == section})
        self.workspace.update_report("config", self.config.as_dict())
        self.workspace.update_report("timings", timings)
        self.workspace.update_report(section, payload)
        logger.info(f"--- Stage '{section}' written to {self.workspace.root} ---")


def _checksums(saved: Dict[str, Dict[str, Any]]) -> Dict[str, str]:
    return {name: info["checksum"] for name, info in saved.items()}


def _as_series(values: np.ndarray) -> pd.Series:
    return pd.Series(values, dtype="float64")


def _read_frame(path: str) -> pd.DataFrame:
    return pd.read_csv(path)
