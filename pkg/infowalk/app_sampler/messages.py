# File: infowalk/app_sampler/messages.py
import struct
from dataclasses import dataclass
from typing import List, Optional

from infowalk.app_stats import WalkInfoState

# walker_id, steps, node_id
_HEADER = struct.Struct("<qqq")
_PREV = struct.Struct("<q")
# H, L, E_H, E_L, E_HL, E_H2, E_L2
_INFO = struct.Struct("<dq5d")

MODE_INCREMENTAL = "incremental"
MODE_FIXED = "fixed"
MODE_FULL = "full"
MODES = (MODE_INCREMENTAL, MODE_FIXED, MODE_FULL)


@dataclass
class WalkerMessage:
    """
    A walker crossing to the machine that owns node_id. steps is the walk
    length before node_id is appended.
    """
    walker_id: int
    steps: int
    node_id: int
    info: Optional[WalkInfoState] = None
    prev_node: Optional[int] = None
    path: Optional[List[int]] = None


class MessageCodec:
    """
    Fixed little-endian wire layouts:

    - incremental: header + info, 80 bytes (88 with prev_node)
    - fixed: header only, 24 bytes (32 with prev_node)
    - full: header + the whole path, 24 + 8L bytes
    """

    def __init__(self, mode: str, with_prev: bool = False):
        if mode not in MODES:
            raise ValueError(f"Unknown message mode '{mode}'.")
        self.mode = mode
        # a full path already ends with the previous node
        self.with_prev = with_prev and mode != MODE_FULL

    def message_size(self, steps: int = 0) -> int:
        size = _HEADER.size + (_PREV.size if self.with_prev else 0)
        if self.mode == MODE_INCREMENTAL:
            size += _INFO.size
        elif self.mode == MODE_FULL:
            size += 8 * steps
        return size

    def encode(self, msg: WalkerMessage) -> bytes:
        parts = [_HEADER.pack(msg.walker_id, msg.steps, msg.node_id)]
        if self.with_prev:
            if msg.prev_node is None:
                raise ValueError(f"Walker {msg.walker_id}: message needs prev_node.")
            parts.append(_PREV.pack(msg.prev_node))
        if self.mode == MODE_INCREMENTAL:
            info = msg.info
            if info is None or info.L != msg.steps:
                raise ValueError(f"Walker {msg.walker_id}: info must be present with L == steps.")
            parts.append(_INFO.pack(*info.as_tuple()))
        elif self.mode == MODE_FULL:
            if msg.path is None or len(msg.path) != msg.steps:
                raise ValueError(f"Walker {msg.walker_id}: path must hold exactly {msg.steps} nodes.")
            parts.append(struct.pack(f"<{msg.steps}q", *msg.path))
        return b"".join(parts)

    def decode(self, payload: bytes) -> WalkerMessage:
        if len(payload) < _HEADER.size:
            raise ValueError(f"Message of {len(payload)} bytes is shorter than its header.")
        walker_id, steps, node_id = _HEADER.unpack_from(payload, 0)
        expected = self.message_size(steps)
        if len(payload) != expected:
            raise ValueError(f"Walker {walker_id}: expected {expected} bytes, got {len(payload)}.")

        offset = _HEADER.size
        msg = WalkerMessage(walker_id=walker_id, steps=steps, node_id=node_id)
        if self.with_prev:
            (msg.prev_node,) = _PREV.unpack_from(payload, offset)
            offset += _PREV.size
        if self.mode == MODE_INCREMENTAL:
            msg.info = WalkInfoState(*_INFO.unpack_from(payload, offset))
        elif self.mode == MODE_FULL:
            msg.path = list(struct.unpack_from(f"<{steps}q", payload, offset))
        return msg
