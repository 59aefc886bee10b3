from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

__all__ = ["Packet", "DATA", "RREQ", "RREP", "RERR", "DSDV_UPDATE", "HELLO", "CONTROL_KINDS", "UidSource"]

DATA = "data"
RREQ = "rreq"
RREP = "rrep"
RERR = "rerr"
DSDV_UPDATE = "dsdv-update"
HELLO = "hello"
CONTROL_KINDS = frozenset({RREQ, RREP, RERR, DSDV_UPDATE, HELLO})

CONTROL_SIZE = 64


@dataclass(eq=False, slots=True)
class Packet:
    uid: int
    kind: str
    src: int
    dst: int
    origin_time: float
    hop_count: int = 0
    ttl: int = 64
    source_route: tuple | None = None
    seq_no: int = 0
    size: int = CONTROL_SIZE
    body: Any = None
    salvaged: int = 0
    route_index: int = 0
    counted: bool = field(default=False)

    @property
    def is_control(self) -> bool:
        return self.kind != DATA

    def copy(self, uid: int) -> "Packet":
        return Packet(
            uid, self.kind, self.src, self.dst, self.origin_time, self.hop_count, self.ttl,
            self.source_route, self.seq_no, self.size, self.body, self.salvaged,
            self.route_index, self.counted,
        )


class UidSource:
    def __init__(self):
        self._next = itertools.count(1)

    def __call__(self) -> int:
        return next(self._next)
