"""Workspace spatial model: block placement, snap detection, attraction/repulsion.

Blocks are unit squares on a grid. The base row lives at y=0 and grows
only at its two ends, so it stays contiguous; prolongation inner blocks
live at y=1, either directly above a base block (neighbor) or above the
gap between two base blocks (passing). ``probe`` turns a dragged
position into an attract/repel/none event; ``attach`` commits the
attraction. Both share one slot model, so probe never promises an
attachment that attach would refuse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .blocks import MusicalBlock, can_connect, degrees_connect, make_block
from .errors import EngineError
from .grammar import Building, Prolongation, StructureKind, UnknownBlock, step_between
from .theory import Key, ScaleDegree


@dataclass(frozen=True)
class LayoutConfig:
    """Geometry constants, in block-width units. Placeholder values for UX tuning."""

    block_width: float = 1.0
    tenon_depth: float = 0.2
    snap_radius: float = 0.25


class WorkspaceError(EngineError):
    code = "E_WORKSPACE"


class AlreadyPlaced(WorkspaceError):
    code = "E_ALREADY_PLACED"


class NotPlaced(WorkspaceError):
    code = "E_NOT_PLACED"


class SlotOccupied(WorkspaceError):
    code = "E_SLOT_OCCUPIED"


class IncompatibleConnection(WorkspaceError):
    code = "E_INCOMPATIBLE"


class DetachNotAllowed(WorkspaceError):
    code = "E_DETACH_NOT_ALLOWED"


@dataclass(frozen=True)
class LayoutPosition:
    x: float
    y: int

    def __post_init__(self) -> None:
        if self.y not in (0, 1):
            raise ValueError("rows are 0 (base) and 1 (prolongation)")


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"
    ABOVE = "above"    # neighbor slot above a base block
    GAP = "gap"        # passing slot above the gap right of a base block

    def __str__(self) -> str:
        return self.value


class SnapKind(Enum):
    ATTRACT = "attract"
    REPEL = "repel"
    NONE = "none"


@dataclass(frozen=True)
class SnapEvent:
    kind: SnapKind
    target_id: str | None = None
    side: Side | None = None

    def __post_init__(self) -> None:
        if self.kind is SnapKind.NONE and (self.target_id or self.side):
            raise ValueError("a none event carries no target")

    @property
    def click_sound(self) -> bool:
        return self.kind is SnapKind.ATTRACT

    def to_record(self) -> dict:
        return {
            "kind": self.kind.value,
            "target_id": self.target_id,
            "side": self.side.value if self.side else None,
            "click_sound": self.click_sound,
        }


@dataclass(frozen=True)
class _Slot:
    x: float
    y: int
    target_id: str
    side: Side


class Workspace:
    """Mutable assembly area; one per session, mutations applied in order."""

    def __init__(self, key: Key, config: LayoutConfig | None = None) -> None:
        self.key = key
        self.config = config or LayoutConfig()
        self._blocks: dict[str, MusicalBlock] = {}
        self._row: list[str] = []
        self._row_origin = 0
        # Inner chains keyed by their base block: neighbor chains by the
        # anchor block, passing chains by the gap's left block.
        self._neighbors: dict[str, list[str]] = {}
        self._passings: dict[str, list[str]] = {}

    # -- block inventory ----------------------------------------------------

    def add_block(self, block: MusicalBlock) -> None:
        if block.id in self._blocks:
            raise AlreadyPlaced(f"block id {block.id!r} already in workspace",
                                block=block.id)
        self._blocks[block.id] = block

    def block(self, block_id: str) -> MusicalBlock:
        try:
            return self._blocks[block_id]
        except KeyError:
            raise UnknownBlock(f"no block {block_id!r} in workspace",
                               block=block_id) from None

    def blocks(self) -> list[MusicalBlock]:
        return list(self._blocks.values())

    def is_placed(self, block_id: str) -> bool:
        if block_id in self._row:
            return True
        return any(
            block_id in chain
            for chains in (self._neighbors, self._passings)
            for chain in chains.values()
        )

    def detached_ids(self) -> list[str]:
        return [b for b in self._blocks if not self.is_placed(b)]

    def base_row(self) -> list[MusicalBlock]:
        return [self._blocks[b] for b in self._row]

    def base_degrees(self) -> list[ScaleDegree]:
        return [b.degree for b in self.base_row()]

    def position_of(self, block_id: str) -> LayoutPosition | None:
        self.block(block_id)
        if block_id in self._row:
            return LayoutPosition(
                self._row_origin + self._row.index(block_id), 0
            )
        for anchor, chain in self._neighbors.items():
            if block_id in chain:
                ax = self._row_origin + self._row.index(anchor)
                return LayoutPosition(ax + chain.index(block_id), 1)
        for left, chain in self._passings.items():
            if block_id in chain:
                lx = self._row_origin + self._row.index(left)
                return LayoutPosition(lx + 0.5 + chain.index(block_id), 1)
        return None

    # -- placement ----------------------------------------------------------

    def place_seed(self, block_id: str, x: float = 0.0) -> LayoutPosition:
        """Start the base row with its first block; later blocks must attach."""
        self.block(block_id)
        if self._row:
            raise SlotOccupied("base row already started; attach instead")
        if self.is_placed(block_id):
            raise AlreadyPlaced(f"block {block_id!r} already placed", block=block_id)
        self._row = [block_id]
        self._row_origin = round(x)
        return LayoutPosition(self._row_origin, 0)

    def _gap_right_block(self, left_id: str) -> MusicalBlock | None:
        i = self._row.index(left_id)
        if i + 1 < len(self._row):
            return self._blocks[self._row[i + 1]]
        return None

    def _passing_complete(self, left_id: str) -> bool:
        chain = self._passings.get(left_id, [])
        right = self._gap_right_block(left_id)
        if not chain or right is None:
            return False
        degrees = [self._blocks[left_id].degree]
        degrees += [self._blocks[b].degree for b in chain]
        degrees.append(right.degree)
        steps = {step_between(a, b) for a, b in zip(degrees, degrees[1:])}
        return len(steps) == 1 and None not in steps

    def open_slots(self) -> list[_Slot]:
        """Every currently attachable slot (geometry only; no compatibility)."""
        slots: list[_Slot] = []
        if not self._row:
            return slots
        first, last = self._row[0], self._row[-1]
        x0 = self._row_origin
        slots.append(_Slot(x0 - 1, 0, first, Side.LEFT))
        slots.append(_Slot(x0 + len(self._row) - 1 + 1, 0, last, Side.RIGHT))
        for i, base_id in enumerate(self._row):
            bx = x0 + i
            chain = self._neighbors.get(base_id, [])
            if not chain:
                slots.append(_Slot(bx, 1, base_id, Side.ABOVE))
            elif len(chain) == 1:
                slots.append(_Slot(bx + 1, 1, chain[-1], Side.RIGHT))
            if i + 1 < len(self._row):
                pchain = self._passings.get(base_id, [])
                if not pchain:
                    slots.append(_Slot(bx + 0.5, 1, base_id, Side.GAP))
                elif len(pchain) == 1 and not self._passing_complete(base_id):
                    slots.append(_Slot(bx + 1.5, 1, pchain[-1], Side.RIGHT))
        return slots

    def _chain_of(self, inner_id: str) -> tuple[str, str, list[str]] | None:
        """(kind, base_block_id, chain) for an inner block, if any."""
        for anchor, chain in self._neighbors.items():
            if inner_id in chain:
                return ("neighbor", anchor, chain)
        for left, chain in self._passings.items():
            if inner_id in chain:
                return ("passing", left, chain)
        return None

    def _connection_problem(self, moving: MusicalBlock, slot: _Slot) -> str | None:
        """Why the moving block cannot occupy the slot; None when it can."""
        target = self._blocks[slot.target_id]
        if slot.side is Side.LEFT:
            if not can_connect(moving, target):
                return f"{moving.degree} cannot precede {target.degree}"
            return None
        if slot.side is Side.ABOVE:
            return self._neighbor_problem(target, [moving])
        if slot.side is Side.GAP:
            return self._passing_start_problem(target, moving)
        # Side.RIGHT: row end, neighbor-chain end, or passing-chain end.
        chain_info = self._chain_of(slot.target_id)
        if chain_info is None:
            if not can_connect(target, moving):
                return f"{target.degree} cannot precede {moving.degree}"
            return None
        kind, base_id, chain = chain_info
        if kind == "neighbor":
            anchor = self._blocks[base_id]
            return self._neighbor_problem(
                anchor, [self._blocks[b] for b in chain] + [moving]
            )
        left = self._blocks[base_id]
        right = self._gap_right_block(base_id)
        assert right is not None
        chain_blocks = [self._blocks[b] for b in chain] + [moving]
        return self._passing_chain_problem(left, chain_blocks, right)

    @staticmethod
    def _neighbor_problem(
        anchor: MusicalBlock, inner: list[MusicalBlock]
    ) -> str | None:
        chain = [anchor, *inner, anchor]
        for a, b in zip(chain, chain[1:]):
            if not can_connect(a, b):
                return f"{a.degree} cannot connect to {b.degree}"
        for blk in inner:
            if blk.degree == anchor.degree:
                return "a neighbor chord must differ from its anchor"
        return None

    def _passing_start_problem(
        self, left: MusicalBlock, moving: MusicalBlock
    ) -> str | None:
        right = self._gap_right_block(left.id)
        assert right is not None
        direction = step_between(left.degree, moving.degree)
        if direction is None:
            return f"{moving.degree} is not a step away from {left.degree}"
        if not can_connect(left, moving):
            return f"{left.degree} cannot connect to {moving.degree}"
        if step_between(moving.degree, right.degree) == direction:
            if not can_connect(moving, right):
                return f"{moving.degree} cannot connect to {right.degree}"
            return None
        # Possible first chord of a two-chord bridge: the remaining step
        # must land exactly on the gap's right block.
        bridge_value = (moving.degree.value - 1 + direction) % 7 + 1
        bridge = ScaleDegree(bridge_value)
        if step_between(bridge, right.degree) != direction:
            return f"no stepwise path from {left.degree} to {right.degree} through {moving.degree}"
        if not (degrees_connect(moving.degree, bridge)
                and degrees_connect(bridge, right.degree)):
            return f"the bridge chord {bridge} cannot complete this gap"
        return None

    @staticmethod
    def _passing_chain_problem(
        left: MusicalBlock, inner: list[MusicalBlock], right: MusicalBlock
    ) -> str | None:
        chain = [left, *inner, right]
        steps = {step_between(a.degree, b.degree) for a, b in zip(chain, chain[1:])}
        if len(steps) != 1 or None in steps:
            return "passing chords must move stepwise in one direction"
        for a, b in zip(chain, chain[1:]):
            if not can_connect(a, b):
                return f"{a.degree} cannot connect to {b.degree}"
        return None

    # -- probe / attach -----------------------------------------------------

    def probe(self, moving_id: str, pos: LayoutPosition) -> SnapEvent:
        """Snap detection for a dragged block; deterministic for equal inputs."""
        moving = self.block(moving_id)
        if self.is_placed(moving_id):
            raise AlreadyPlaced(f"block {moving_id!r} is already attached",
                                block=moving_id)
        best: tuple[float, float, str, _Slot] | None = None
        for slot in self.open_slots():
            dist = math.hypot(pos.x - slot.x, pos.y - slot.y)
            if dist > self.config.snap_radius:
                continue
            rank = (dist, slot.x, slot.target_id, slot)
            if best is None or rank[:3] < best[:3]:
                best = rank
        if best is None:
            return SnapEvent(SnapKind.NONE)
        slot = best[3]
        if self._connection_problem(moving, slot) is None:
            return SnapEvent(SnapKind.ATTRACT, slot.target_id, slot.side)
        return SnapEvent(SnapKind.REPEL, slot.target_id, slot.side)

    def attach(self, moving_id: str, target_id: str, side: Side) -> LayoutPosition:
        """Commit an attraction; errors mirror exactly what probe would refuse."""
        moving = self.block(moving_id)
        self.block(target_id)
        if self.is_placed(moving_id):
            raise AlreadyPlaced(f"block {moving_id!r} is already attached",
                                block=moving_id)
        slot = next(
            (s for s in self.open_slots()
             if s.target_id == target_id and s.side is side),
            None,
        )
        if slot is None:
            raise SlotOccupied(
                f"no open {side.value} slot on block {target_id!r}",
                block=target_id, side=side.value,
            )
        problem = self._connection_problem(moving, slot)
        if problem is not None:
            raise IncompatibleConnection(problem, block=moving_id, target=target_id)
        self._commit(moving_id, slot)
        return self.position_of(moving_id)  # type: ignore[return-value]

    def _commit(self, moving_id: str, slot: _Slot) -> None:
        if slot.y == 0:
            if slot.side is Side.LEFT:
                self._row.insert(0, moving_id)
                self._row_origin -= 1
            else:
                self._row.append(moving_id)
            return
        if slot.side is Side.ABOVE:
            self._neighbors[slot.target_id] = [moving_id]
            return
        if slot.side is Side.GAP:
            self._passings[slot.target_id] = [moving_id]
            return
        chain_info = self._chain_of(slot.target_id)
        assert chain_info is not None
        chain_info[2].append(moving_id)

    def detach(self, block_id: str) -> None:
        """Pick a block back up; only row ends and chain ends come off cleanly."""
        self.block(block_id)
        chain_info = self._chain_of(block_id)
        if chain_info is not None:
            kind, base_id, chain = chain_info
            if chain[-1] != block_id:
                raise DetachNotAllowed("only the outer chord of a chain detaches",
                                       block=block_id)
            chain.pop()
            if not chain:
                (self._neighbors if kind == "neighbor" else self._passings).pop(base_id)
            return
        if block_id not in self._row:
            raise NotPlaced(f"block {block_id!r} is not placed", block=block_id)
        if block_id not in (self._row[0], self._row[-1]):
            raise DetachNotAllowed("only row-end blocks detach", block=block_id)
        if block_id in self._neighbors or block_id in self._passings:
            raise DetachNotAllowed("detach its prolongation first", block=block_id)
        if len(self._row) >= 2 and block_id == self._row[-1]:
            prev = self._row[-2]
            if prev in self._passings:
                raise DetachNotAllowed("detach the passing chain first", block=block_id)
        if block_id == self._row[0]:
            self._row.pop(0)
            self._row_origin += 1
        else:
            self._row.pop()

    # -- conversion ---------------------------------------------------------

    def derive_building(self) -> Building:
        """The building this workspace encodes (validity checked separately)."""
        base = tuple(self.base_row())
        prolongations = []
        for anchor_id, chain in self._neighbors.items():
            prolongations.append(
                Prolongation(
                    StructureKind.NEIGHBOR,
                    self._row.index(anchor_id),
                    tuple(self._blocks[b] for b in chain),
                )
            )
        for left_id, chain in self._passings.items():
            prolongations.append(
                Prolongation(
                    StructureKind.PASSING,
                    self._row.index(left_id),
                    tuple(self._blocks[b] for b in chain),
                )
            )
        prolongations.sort(key=lambda p: (p.anchor, p.kind.value))
        return Building(self.key, base, tuple(prolongations))

    # -- persistence --------------------------------------------------------

    def to_state(self) -> dict:
        from .blocks import block_to_record

        return {
            "key": self.key.tonic.spelled_name,
            "blocks": [block_to_record(b) for b in self._blocks.values()],
            "row": list(self._row),
            "row_origin": self._row_origin,
            "neighbors": {k: list(v) for k, v in sorted(self._neighbors.items())},
            "passings": {k: list(v) for k, v in sorted(self._passings.items())},
        }

    @classmethod
    def from_state(cls, state: dict, config: LayoutConfig | None = None) -> "Workspace":
        from .blocks import block_from_record

        ws = cls(Key.of(state["key"]), config)
        for record in state["blocks"]:
            ws.add_block(block_from_record(record))
        ws._row = list(state["row"])
        ws._row_origin = int(state["row_origin"])
        ws._neighbors = {k: list(v) for k, v in state["neighbors"].items()}
        ws._passings = {k: list(v) for k, v in state["passings"].items()}
        return ws


def seed_workspace(key: Key, blocks: list[MusicalBlock] | None = None) -> Workspace:
    """A workspace preloaded with detached blocks (demo and puzzle setups)."""
    ws = Workspace(key)
    for b in blocks or []:
        ws.add_block(b)
    return ws


def default_block(degree: ScaleDegree, block_id: str | None = None) -> MusicalBlock:
    """Convenience: a default-connector block for workspace experiments."""
    return make_block(degree, block_id=block_id)
