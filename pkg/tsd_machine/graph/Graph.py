from __future__ import annotations

import copy
import hashlib
import logging
from typing import Iterable, Iterator

from tsd_machine.common.errors import GraphError
from tsd_machine.tsd_types import ARITY, NodeKind, NodeTag, Polarity, PortRef

logger = logging.getLogger(__name__)


class Node:
    """
    A proper node of the graph.
    `ins` maps in-port index to the peer out-port, `outs` lists the peer in-port of every out-port.
    Contraction in-ports keep their index when siblings are removed, so a PortRef stays valid until its port is removed.
    """
    __slots__ = ("id", "tag", "value", "opname", "ins", "outs", "box", "boundary", "next_in")

    def __init__(self, ident: int, kind: NodeKind, box: int | None):
        self.id = ident
        self.tag = kind.tag
        self.value = kind.value
        self.opname = kind.opname
        in_count, out_count = ARITY[kind.tag]
        if kind.tag is NodeTag.CONTRACTION:
            in_count = kind.fan_in
        self.ins: dict[int, PortRef | None] = {i: None for i in range(in_count)}
        self.outs: list[PortRef | None] = [None] * out_count
        self.box = box  # innermost box holding this node, for doors the box around the door's own box
        self.boundary: int | None = None  # box delimited by this node (Bang and Query only)
        self.next_in = in_count

    @property
    def kind(self) -> NodeKind:
        return NodeKind(tag=self.tag, value=self.value, opname=self.opname,
                        fan_in=len(self.ins) if self.tag is NodeTag.CONTRACTION else 0)

    def __repr__(self):
        return f"<{self.kind} #{self.id}>"


class Box:
    __slots__ = ("id", "bang", "doors", "members", "parent", "children")

    def __init__(self, ident: int, parent: int | None):
        self.id = ident
        self.bang: int | None = None
        self.doors: set[int] = set()
        self.members: set[int] = set()
        self.parent = parent
        self.children: set[int] = set()


class Graph:
    """
    Port graph with labeled nodes, edges pairing an out-port with an in-port, and nested !-boxes.
    Edges point from the consumer's out-port to the operand's in-port, i.e. along data dependencies.
    Node and box ids come from per-graph counters and are never reused.
    """

    def __init__(self):
        self._nodes: dict[int, Node] = {}
        self._boxes: dict[int, Box] = {}
        self._next_node = 0
        self._next_box = 0
        self.tombstones = 0  # removed nodes, not part of the structure or the fingerprint

    # Nodes

    def _fresh_node_id(self) -> int:
        ident = self._next_node
        self._next_node += 1
        return ident

    def add_node(self, kind: NodeKind, box: int | None = None) -> int:
        ident = self._fresh_node_id()
        self._nodes[ident] = Node(ident, kind, box)
        if box is not None:
            self._boxes[box].members.add(ident)
        return ident

    def node(self, ident: int) -> Node:
        try:
            return self._nodes[ident]
        except KeyError:
            raise GraphError(f"node {ident} does not exist") from None

    def has_node(self, ident: int) -> bool:
        return ident in self._nodes

    def tag(self, ident: int) -> NodeTag:
        return self._nodes[ident].tag

    def nodes(self) -> Iterator[Node]:
        return iter(list(self._nodes.values()))

    def node_count(self) -> int:
        return len(self._nodes)

    def cells(self) -> list[int]:
        """Cell node ids in creation order."""
        return sorted(n.id for n in self._nodes.values() if n.tag is NodeTag.CELL)

    def set_value(self, ident: int, value: int):
        self._nodes[ident].value = value

    def remove_node(self, ident: int):
        node = self._nodes[ident]
        for port in self.ports(ident):
            if self.peer(port) is not None:
                raise GraphError(f"dangling-edge: node {node!r} still connected at {port}")
        if node.box is not None and node.box in self._boxes:
            self._boxes[node.box].members.discard(ident)
        if node.boundary is not None and node.boundary in self._boxes:
            box = self._boxes[node.boundary]
            box.doors.discard(ident)
            if box.bang == ident:
                box.bang = None
        del self._nodes[ident]
        self.tombstones += 1

    # Ports and edges

    def in_ports(self, ident: int) -> list[PortRef]:
        return [PortRef(ident, i, Polarity.IN) for i in self._nodes[ident].ins]

    def out_ports(self, ident: int) -> list[PortRef]:
        return [PortRef(ident, i, Polarity.OUT) for i in range(len(self._nodes[ident].outs))]

    def ports(self, ident: int) -> list[PortRef]:
        return self.in_ports(ident) + self.out_ports(ident)

    def peer(self, port: PortRef) -> PortRef | None:
        node = self._nodes.get(port.node)
        if node is None:
            raise GraphError(f"port {port} belongs to a deleted node")
        if port.polarity is Polarity.IN:
            return node.ins[port.index]
        return node.outs[port.index]

    def _set_peer(self, port: PortRef, value: PortRef | None):
        node = self._nodes[port.node]
        if port.polarity is Polarity.IN:
            if port.index not in node.ins:
                raise GraphError(f"port {port} does not exist")
            node.ins[port.index] = value
        else:
            node.outs[port.index] = value

    def connect(self, a: PortRef, b: PortRef):
        """Create the edge {a, b}; one port must be an out-port and the other an in-port."""
        if a.polarity is b.polarity:
            raise GraphError(f"cannot connect {a} to {b}: both are {a.polarity.name.lower()}-ports")
        for port in (a, b):
            if self.peer(port) is not None:
                raise GraphError(f"port-already-connected: {port} is connected to {self.peer(port)}")
        self._set_peer(a, b)
        self._set_peer(b, a)

    def disconnect(self, a: PortRef) -> PortRef:
        """Remove the edge at a and return the former peer."""
        b = self.peer(a)
        if b is None:
            raise GraphError(f"not-connected: {a}")
        self._set_peer(a, None)
        self._set_peer(b, None)
        return b

    def splice(self, parent: PortRef | None, child: PortRef | None):
        """Connect an out-port to an in-port when both exist; a missing side leaves the other on the interface."""
        if parent is not None and child is not None:
            self.connect(parent, child)

    def add_in_port(self, ident: int) -> PortRef:
        node = self._nodes[ident]
        if node.tag is not NodeTag.CONTRACTION:
            raise GraphError(f"only contractions grow in-ports, not {node!r}")
        index = node.next_in
        node.next_in += 1
        node.ins[index] = None
        return PortRef(ident, index, Polarity.IN)

    def remove_in_port(self, port: PortRef):
        node = self._nodes[port.node]
        if node.tag is not NodeTag.CONTRACTION:
            raise GraphError(f"only contractions lose in-ports, not {node!r}")
        if node.ins[port.index] is not None:
            raise GraphError(f"in-port {port} is still connected")
        del node.ins[port.index]

    def interface(self) -> tuple[list[PortRef], list[PortRef]]:
        """Unpaired in-ports (graph outputs, e.g. the program root) and unpaired out-ports (free variables)."""
        ins, outs = [], []
        for node in self._nodes.values():
            ins.extend(PortRef(node.id, i, Polarity.IN) for i, p in node.ins.items() if p is None)
            outs.extend(PortRef(node.id, i, Polarity.OUT) for i, p in enumerate(node.outs) if p is None)
        return ins, outs

    # Boxes

    def new_box(self, parent: int | None = None) -> int:
        ident = self._next_box
        self._next_box += 1
        self._boxes[ident] = Box(ident, parent)
        if parent is not None:
            self._boxes[parent].children.add(ident)
        return ident

    def box(self, ident: int) -> Box:
        return self._boxes[ident]

    def boxes(self) -> list[Box]:
        return list(self._boxes.values())

    def add_bang(self, box: int) -> int:
        record = self._boxes[box]
        if record.bang is not None:
            raise GraphError(f"box {box} already has a principal door")
        ident = self.add_node(NodeKind.of(NodeTag.BANG), record.parent)
        self._nodes[ident].boundary = box
        record.bang = ident
        return ident

    def add_door(self, box: int) -> int:
        record = self._boxes[box]
        ident = self.add_node(NodeKind.of(NodeTag.QUERY), record.parent)
        self._nodes[ident].boundary = box
        record.doors.add(ident)
        return ident

    def box_of_bang(self, ident: int) -> int:
        node = self._nodes[ident]
        if node.tag is not NodeTag.BANG:
            raise GraphError(f"{node!r} is not a principal door")
        return node.boundary

    def descendant_boxes(self, box: int) -> list[int]:
        found, stack = [], [box]
        while stack:
            current = stack.pop()
            found.append(current)
            stack.extend(self._boxes[current].children)
        return found

    def box_contents(self, box: int) -> set[int]:
        """All nodes strictly inside the box, nested boxes included, its own doors excluded."""
        contents = set()
        for inner in self.descendant_boxes(box):
            contents |= self._boxes[inner].members
        return contents

    def box_nodes(self, box: int) -> set[int]:
        record = self._boxes[box]
        return self.box_contents(box) | record.doors | {record.bang}

    def copy_box(self, box: int) -> tuple[int, dict[int, int]]:
        """
        Deep copy of a box with its nested boxes. The copy's principal door in-port and door out-ports are left
        unconnected; the original is untouched.
        :return: (new box id, mapping from original to copied node ids)
        """
        record = self._boxes[box]
        originals = self.box_nodes(box)
        box_map: dict[int, int] = {}
        # descendant_boxes lists every parent before its children
        for inner in self.descendant_boxes(box):
            new_parent = record.parent if inner == box else box_map[self._boxes[inner].parent]
            box_map[inner] = self.new_box(new_parent)

        node_map: dict[int, int] = {}
        for ident in sorted(originals):
            original = self._nodes[ident]
            new_box = box_map.get(original.box, original.box)
            copied = self._fresh_node_id()
            node = Node(copied, NodeKind(tag=original.tag, value=original.value, opname=original.opname), new_box)
            node.ins = {i: None for i in original.ins}
            node.next_in = original.next_in
            self._nodes[copied] = node
            if new_box is not None:
                self._boxes[new_box].members.add(copied)
            if original.boundary is not None:
                node.boundary = box_map[original.boundary]
                owner = self._boxes[node.boundary]
                if original.tag is NodeTag.BANG:
                    owner.bang = copied
                else:
                    owner.doors.add(copied)
            node_map[ident] = copied

        for ident in originals:
            original = self._nodes[ident]
            for index, peer in enumerate(original.outs):
                if peer is None:
                    continue
                if peer.node in node_map:
                    self.connect(PortRef(node_map[ident], index, Polarity.OUT),
                                 PortRef(node_map[peer.node], peer.index, Polarity.IN))
                elif not (original.tag is NodeTag.QUERY and original.boundary == box):
                    raise GraphError(f"box {box} is not closed: edge {ident}.o{index} -> {peer} leaves the box")
            for index, peer in original.ins.items():
                if peer is not None and peer.node not in node_map and ident != record.bang:
                    raise GraphError(f"box {box} is not closed: edge {peer} -> {ident}.i{index} enters the box")
        logger.debug("copied box %d into box %d (%d nodes)", box, box_map[box], len(node_map))
        return box_map[box], node_map

    def open_box(self, box: int) -> PortRef | None:
        """
        Remove the box boundary: doors are spliced out and the principal door is removed.
        The contents join the surrounding box.
        :return: the in-port of the former content root
        """
        record = self._boxes[box]
        for door in list(record.doors):
            inner = self.peer(PortRef.i(door))
            outer = self.peer(PortRef.o(door))
            if inner is not None:
                self.disconnect(inner)
            if outer is not None:
                self.disconnect(outer)
            self.remove_node(door)
            self.splice(inner, outer)
        bang = record.bang
        parent = self.peer(PortRef.i(bang))
        content = self.peer(PortRef.o(bang))
        if parent is not None:
            self.disconnect(parent)
        if content is not None:
            self.disconnect(content)
        self.remove_node(bang)
        self.splice(parent, content)
        for member in record.members:
            self._nodes[member].box = record.parent
            if record.parent is not None:
                self._boxes[record.parent].members.add(member)
        for child in record.children:
            self._boxes[child].parent = record.parent
            if record.parent is not None:
                self._boxes[record.parent].children.add(child)
        if record.parent is not None:
            self._boxes[record.parent].children.discard(box)
        del self._boxes[box]
        return content

    def delete_subgraph(self, roots: Iterable[int]) -> list[PortRef]:
        """
        Delete a region of nodes. A principal door pulls its whole box into the region.
        Nothing outside may still depend on the region; edges from the region to the outside are cut.
        :return: outside in-ports that lost their consumer, for the caller to cap
        :raises GraphError: dangling-edge when an outside out-port points into the region
        """
        region = set(roots)
        doomed_boxes = []
        for ident in list(region):
            node = self._nodes[ident]
            if node.tag is NodeTag.BANG:
                doomed_boxes.extend(self.descendant_boxes(node.boundary))
                region |= self.box_nodes(node.boundary)
        for ident in region:
            for index, peer in self._nodes[ident].ins.items():
                if peer is not None and peer.node not in region:
                    raise GraphError(f"dangling-edge: {peer} still points into the deleted region at {ident}.i{index}")
        detached = []
        for ident in region:
            node = self._nodes[ident]
            for index, peer in enumerate(node.outs):
                if peer is None:
                    continue
                self.disconnect(PortRef(ident, index, Polarity.OUT))
                if peer.node not in region:
                    detached.append(peer)
        for ident in region:
            self.remove_node(ident)
        for box in doomed_boxes:
            record = self._boxes.pop(box, None)
            if record is not None and record.parent is not None and record.parent in self._boxes:
                self._boxes[record.parent].children.discard(box)
        return detached

    # Whole-graph checks

    def well_formed(self) -> list[str]:
        """Structural invariants: symmetric edges with opposite polarities, fixed arities, a forest of boxes."""
        violations = []
        for node in self._nodes.values():
            in_count, out_count = ARITY[node.tag]
            if len(node.outs) != out_count:
                violations.append(f"{node!r} has {len(node.outs)} out-ports, expected {out_count}")
            if node.tag is not NodeTag.CONTRACTION and set(node.ins) != set(range(in_count)):
                violations.append(f"{node!r} has in-ports {sorted(node.ins)}, expected {in_count}")
            for index, peer in enumerate(node.outs):
                if peer is None:
                    continue
                if peer.polarity is not Polarity.IN or peer.node not in self._nodes \
                        or self._nodes[peer.node].ins.get(peer.index, "missing") != PortRef(node.id, index, Polarity.OUT):
                    violations.append(f"asymmetric edge {node.id}.o{index} -> {peer}")
            for index, peer in node.ins.items():
                if peer is None:
                    continue
                if peer.polarity is not Polarity.OUT or peer.node not in self._nodes \
                        or peer.index >= len(self._nodes[peer.node].outs) \
                        or self._nodes[peer.node].outs[peer.index] != PortRef(node.id, index, Polarity.IN):
                    violations.append(f"asymmetric edge {peer} -> {node.id}.i{index}")
            if node.box is not None and (node.box not in self._boxes or node.id not in self._boxes[node.box].members):
                violations.append(f"{node!r} claims membership of box {node.box}")
            if node.tag in (NodeTag.BANG, NodeTag.QUERY):
                owner = self._boxes.get(node.boundary)
                if owner is None or (node.id != owner.bang and node.id not in owner.doors):
                    violations.append(f"door {node!r} belongs to no box boundary")
                elif node.box != owner.parent:
                    violations.append(f"door {node!r} is not placed in the box around box {owner.id}")
        for box in self._boxes.values():
            if box.bang is None or box.bang not in self._nodes:
                violations.append(f"box {box.id} has no principal door")
            for member in box.members:
                if member not in self._nodes or self._nodes[member].box != box.id:
                    violations.append(f"box {box.id} lists stale member {member}")
            seen, current = set(), box.parent
            while current is not None:
                if current in seen or current not in self._boxes:
                    violations.append(f"box {box.id} has a broken or cyclic parent chain")
                    break
                seen.add(current)
                current = self._boxes[current].parent
        return violations

    def fingerprint(self) -> str:
        """Structural hash of nodes, values, edges and boxes."""
        digest = hashlib.sha256()
        for ident in sorted(self._nodes):
            node = self._nodes[ident]
            digest.update(repr((ident, node.tag.value, node.value, node.opname, sorted(node.ins.items()),
                                node.outs, node.box, node.boundary)).encode())
        for ident in sorted(self._boxes):
            box = self._boxes[ident]
            digest.update(repr((ident, box.bang, sorted(box.doors), box.parent)).encode())
        return digest.hexdigest()

    def snapshot(self) -> Graph:
        return copy.deepcopy(self)
