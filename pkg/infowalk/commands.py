import functools
import logging
import os

import click

from infowalk.app_eval import SplitError
from infowalk.app_file_mgt import ArtifactWorkspace, WorkspaceError
from infowalk.app_graph import (
    GraphFormatError,
    GraphValidationError,
    clustered_powerlaw_graph,
    powerlaw_graph,
    two_cliques,
    with_random_weights,
    write_edge_list,
)
from infowalk.app_learner import StoreMismatchError
from infowalk.app_pipeline import PipelineManager
from infowalk.app_utils import setup_logging
from infowalk.config import ORDERS, PARTITIONERS, SCORE_VECTORS, STRATEGIES, ConfigError, RunConfig

logger = logging.getLogger(__name__)

# Errors a user can fix from the command line
USER_ERRORS = (
    ConfigError,
    WorkspaceError,
    GraphFormatError,
    GraphValidationError,
    SplitError,
    StoreMismatchError,
    ValueError,
    OSError,
)


def run_options(func):
    """Attaches every RunConfig flag; unset flags fall back to the config files."""
    options = [
        click.option("--graph", type=click.Path(dir_okay=False), help="Edge list (or .csr cache) to embed."),
        click.option("--directed/--undirected", default=None, help="Treat edges as directed."),
        click.option("--weighted/--unweighted", default=None, help="Read a third weight column."),
        click.option("--machines", type=int, help="Logical machines (m)."),
        click.option("--gamma", type=float, help="Partition slack factor; 1 forces exact balance."),
        click.option("--order", type=click.Choice(ORDERS + ("bfs_degree", "dfs_degree")), help="Stream order."),
        click.option("--partitioner", type=click.Choice(PARTITIONERS), help="Partitioning method."),
        click.option("--segments", type=int, help="Segments for mpgp-parallel; 0 uses the thread count."),
        click.option("--strategy", type=click.Choice(STRATEGIES), help="Next-hop rule."),
        click.option("--p", "p", type=float, help="node2vec return parameter."),
        click.option("--q", "q", type=float, help="node2vec in-out parameter."),
        click.option("--fixed-length", type=int, help="Fixed walk length; 0 selects information-centric stopping."),
        click.option("--walks-per-node", type=int, help="Rounds in fixed-length mode."),
        click.option("--mu", type=float, help="Walk-length threshold on the entropy/length R^2."),
        click.option("--delta", type=float, help="Walk-count threshold on the relative-entropy change."),
        click.option("--l-min", type=int, help="Minimum walk length before the R^2 test."),
        click.option("--l-max", type=int, help="Hard cap on walk length."),
        click.option("--max-rounds", type=int, help="Cap on information-centric rounds."),
        click.option("--dim", type=int, help="Embedding dimension (d)."),
        click.option("--window", type=int, help="Context window (w)."),
        click.option("--negatives", type=int, help="Negative samples (K)."),
        click.option("--multi-windows", type=int, help="Walks batched per worker step."),
        click.option("--epochs", type=int, help="Training epochs."),
        click.option("--lr", type=float, help="Initial learning rate."),
        click.option("--workers", type=int, help="Training threads per machine."),
        click.option("--sync-interval", type=float, help="Seconds between hotness-block syncs."),
        click.option("--sync-every", type=int, help="Batches between syncs; overrides --sync-interval when > 0."),
        click.option("--score-vectors", type=click.Choice(SCORE_VECTORS), help="Vectors exported and scored."),
        click.option("--holdout-fraction", type=float, help="Fraction of edges held out for link prediction."),
        click.option("--trials", type=int, help="Evaluation trials."),
        click.option("--seed", type=int, help="Top-level seed; every stage seed derives from it."),
        click.option("--threads", type=int, help="Worker threads; 0 uses every core."),
        click.option("--out", type=click.Path(file_okay=False), help="Output directory."),
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     help="Flat key = value TOML file layered over config.toml."),
        click.option("--verbose", is_flag=True, help="Log at DEBUG level."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(config_file, verbose, **flags) -> RunConfig:
    setup_logging(verbose)
    return RunConfig.build(config_file, flags)


def stage_command(func):
    """Builds the config, runs the stage and turns library errors into a clean exit."""
    @functools.wraps(func)
    def wrapper(config_file, verbose, **flags):
        try:
            config = build_config(config_file, verbose, **flags)
            message = func(PipelineManager(config))
        except USER_ERRORS as e:
            logger.debug("Stage failed", exc_info=True)
            raise click.ClickException(click.style(f"❌ {e}", fg="red"))
        click.echo(click.style(f"✅ {message}", fg="green", bold=True))
    return wrapper


# -----------------------------------------------------------------------------
# STAGE COMMANDS
# -----------------------------------------------------------------------------
@click.command("partition")
@run_options
@stage_command
def partition(manager: PipelineManager) -> str:
    """Partition the training graph across the logical machines."""
    result = manager.stage_partition()
    return f"Partitioned into {result['machines']} parts {result['sizes']}, edge cut {result['edge_cut']}."


@click.command("walk")
@run_options
@stage_command
def walk(manager: PipelineManager) -> str:
    """Generate the walk corpus over an existing partition."""
    result = manager.stage_walk()
    return (f"{result['walks']} walks in {result['rounds']} rounds, mean length {result['mean_walk_length']:.2f}, "
            f"{result['messages']} messages / {result['bytes']} bytes.")


@click.command("train")
@run_options
@stage_command
def train(manager: PipelineManager) -> str:
    """Train embeddings on an existing corpus."""
    result = manager.stage_train()
    return f"Trained embeddings, held-out loss {result['final_loss']:.4f}, {result['synced_rows']} rows synced."


@click.command("eval")
@run_options
@stage_command
def evaluate(manager: PipelineManager) -> str:
    """Score held-out edges against sampled non-edges (link-prediction AUC)."""
    result = manager.stage_eval()
    return f"AUC {result['auc']:.4f} (std {result['auc_std']:.4f} over {result['trials']} trials)."


@click.command("pipeline")
@run_options
@stage_command
def pipeline(manager: PipelineManager) -> str:
    """Run partition, walk, train and eval in one go."""
    sections = manager.run_all()
    return f"Pipeline finished in {manager.workspace.root}: AUC {sections['eval']['auc']:.4f}."


# -----------------------------------------------------------------------------
# COMMAND: GENERATE
# -----------------------------------------------------------------------------
@click.command("generate")
@click.option("--kind", type=click.Choice(["powerlaw", "clustered", "two-cliques"]), default="powerlaw",
              show_default=True)
@click.option("--nodes", type=int, default=1000, show_default=True, help="Node count (clique size for two-cliques).")
@click.option("--avg-degree", type=int, default=10, show_default=True)
@click.option("--blocks", type=int, default=4, show_default=True, help="Communities for 'clustered'.")
@click.option("--weighted", is_flag=True, help="Attach uniform weights in [1, 5).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Edge list to write.")
def generate(kind, nodes, avg_degree, blocks, weighted, seed, out_path):
    """Write a synthetic graph as an edge list."""
    try:
        if kind == "powerlaw":
            g = powerlaw_graph(nodes, avg_degree, seed)
        elif kind == "clustered":
            g = clustered_powerlaw_graph(nodes, blocks, avg_degree, seed=seed)
        else:
            g = two_cliques(nodes, bridge=True)
        if weighted:
            g = with_random_weights(g, seed=seed)
        workspace = ArtifactWorkspace(os.path.dirname(os.path.abspath(out_path)))
        workspace.save_file(os.path.basename(out_path), write_edge_list(g))
    except USER_ERRORS as e:
        raise click.ClickException(click.style(f"❌ {e}", fg="red"))
    click.echo(click.style(f"✅ Wrote {g.node_count} nodes / {g.edge_count} stored edges to {out_path}.",
                           fg="green", bold=True))


COMMANDS = (partition, walk, train, evaluate, pipeline, generate)
