# File: infowalk/app_sampler/machine.py
import logging
from dataclasses import dataclass
from random import Random
from typing import Dict, List, Optional, Tuple, Union

from infowalk.app_graph import CsrGraph
from infowalk.app_stats import WalkInfoState, should_terminate, should_terminate_full

from .messages import MessageCodec, WalkerMessage
from .strategies import NextHopSampler, WalkStrategy

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class Walker:
    walker_id: int
    node: Optional[int]
    prev: Optional[int]
    length: int
    info: Optional[WalkInfoState] = None
    path: Optional[List[int]] = None


@dataclass(frozen=True)
class MovedLocal:
    node: int


@dataclass(frozen=True)
class Message:
    dest: int
    message: WalkerMessage


@dataclass(frozen=True)
class Terminated:
    walker_id: int
    length: int


StepOutcome = Union[MovedLocal, Message, Terminated]


class Machine:
    """
    One logical machine. It owns a subset of the nodes, keeps the local
    frequency list of every walk that has visited one of them, and records
    the (step, node) fragments of the walks it advanced.
    """

    def __init__(self, machine_id: int, g: CsrGraph, owner: List[int], strategy: WalkStrategy,
                 mu: float, codec: MessageCodec, rngs: Dict[int, Random]):
        self.machine_id = machine_id
        self.owner = owner
        self.strategy = strategy
        self.mu = mu
        self.codec = codec
        self.rngs = rngs
        self.sampler = NextHopSampler(g, strategy)

        self.freq: Dict[int, Dict[int, int]] = {}
        self.fragments: List[Tuple[int, int, int]] = []
        self.inbox: List[bytes] = []

        self.local_steps = 0
        self.msgs_sent = 0
        self.bytes_sent = 0
        self.terminated = 0

    def owns(self, v: int) -> bool:
        return self.owner[v] == self.machine_id

    # --- walker lifecycle ---
    def start(self, walker_id: int, source: int) -> Walker:
        if not self.owns(source):
            raise ValueError(f"Machine {self.machine_id} does not own source {source}.")
        self.freq[walker_id] = {source: 1}
        self.fragments.append((walker_id, 0, source))
        info = WalkInfoState.start() if self._tracks_info else None
        path = [source] if not self.strategy.incremental else None
        return Walker(walker_id, source, None, 1, info, path)

    def enter(self, walker: Walker, v: int) -> bool:
        """Appends v to the walk; True when the walk is finished."""
        freq = self.freq.setdefault(walker.walker_id, {})
        n_before = freq.get(v, 0)
        freq[v] = n_before + 1
        self.fragments.append((walker.walker_id, walker.length, v))
        if walker.info is not None:
            walker.info = walker.info.advance(n_before)
        if walker.path is not None:
            walker.path.append(v)
        walker.prev, walker.node = walker.node, v
        walker.length += 1
        return self.finished(walker)

    def finished(self, walker: Walker) -> bool:
        s = self.strategy
        if not s.information_centric:
            return walker.length >= s.fixed_length
        if walker.path is not None:
            return should_terminate_full(walker.path, self.mu, s.l_min, s.l_max)
        return should_terminate(walker.info, self.mu, s.l_min, s.l_max)

    def terminate(self, walker: Walker):
        self.freq.pop(walker.walker_id, None)
        self.terminated += 1

    def receive(self, msg: WalkerMessage) -> Walker:
        if not self.owns(msg.node_id):
            raise ValueError(f"Machine {self.machine_id} received walker {msg.walker_id} for foreign node {msg.node_id}.")
        node = msg.prev_node
        if node is None and msg.path:
            node = msg.path[-1]
        return Walker(msg.walker_id, node, None, msg.steps, msg.info, msg.path)

    @property
    def _tracks_info(self) -> bool:
        return self.strategy.information_centric and self.strategy.incremental

    # --- superstep ---
    def superstep(self, starts: List[Tuple[int, int]]) -> Dict[int, List[bytes]]:
        """
        Launches the given (walker_id, source) walkers, then advances every
        walker delivered at the last barrier. Returns the outbox keyed by
        destination machine.
        """
        outbox: Dict[int, List[bytes]] = {}
        for walker_id, source in starts:
            walker = self.start(walker_id, source)
            if self.finished(walker):
                self.terminate(walker)
                continue
            self._run(walker, outbox)

        arrivals = sorted((self.codec.decode(p) for p in self.inbox), key=lambda m: m.walker_id)
        self.inbox = []
        for msg in arrivals:
            walker = self.receive(msg)
            if self.enter(walker, msg.node_id):
                self.terminate(walker)
                continue
            self._run(walker, outbox)
        return outbox

    def _run(self, walker: Walker, outbox: Dict[int, List[bytes]]):
        rng = self.rngs[walker.walker_id]
        while True:
            outcome = walk_step(self, walker, rng)
            if isinstance(outcome, MovedLocal):
                continue
            if isinstance(outcome, Message):
                payload = self.codec.encode(outcome.message)
                outbox.setdefault(outcome.dest, []).append(payload)
                self.msgs_sent += 1
                self.bytes_sent += len(payload)
            return

    def drain_round(self) -> List[Tuple[int, int, int]]:
        """Hands over this round's fragments and clears all per-walk state."""
        fragments, self.fragments = self.fragments, []
        if self.freq:
            logger.debug(f"Machine {self.machine_id}: dropping {len(self.freq)} local frequency lists at round end")
        self.freq = {}
        return fragments


def walk_step(machine: Machine, walker: Walker, rng: Random) -> StepOutcome:
    """One accepted move of a walker that sits on a node owned by machine."""
    v = machine.sampler.choose(walker.node, walker.prev, rng)
    if v is None:
        machine.terminate(walker)
        return Terminated(walker.walker_id, walker.length)

    if machine.owns(v):
        machine.local_steps += 1
        if machine.enter(walker, v):
            machine.terminate(walker)
            return Terminated(walker.walker_id, walker.length)
        return MovedLocal(v)

    msg = WalkerMessage(
        walker_id=walker.walker_id,
        steps=walker.length,
        node_id=v,
        info=walker.info,
        prev_node=walker.node if machine.strategy.carries_prev else None,
        path=walker.path,
    )
    return Message(dest=machine.owner[v], message=msg)
