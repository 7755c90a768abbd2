from graphviz import Digraph

from tsd_machine.tsd_types import EvalToken, NodeTag, PortRef
from .Graph import Graph

_SHAPES = {
    NodeTag.CELL: "box",
    NodeTag.BANG: "invtriangle",
    NodeTag.QUERY: "triangle",
    NodeTag.CONTRACTION: "circle",
    NodeTag.CONST: "plaintext",
    NodeTag.UNIT: "plaintext",
}


def graph_to_dot(graph: Graph, token: EvalToken | None = None, name: str = "tsd") -> str:
    """
    Render a graph as DOT text. Edges point from a node to what it depends on, boxes are clusters,
    and the token's edge (if given) is highlighted.
    """
    dot = Digraph(name=name)
    placed: dict[int | None, list] = {}
    for node in graph.nodes():
        region = node.boundary if node.boundary is not None else node.box
        placed.setdefault(region, []).append(node)

    def _emit(target, region):
        for node in sorted(placed.get(region, []), key=lambda n: n.id):
            attrs = {"shape": _SHAPES.get(node.tag, "ellipse")}
            if node.tag is NodeTag.CELL:
                attrs["style"] = "bold"
            target.node(f"n{node.id}", label=str(node.kind), **attrs)

    _emit(dot, None)

    def _cluster(target, box_id):
        with target.subgraph(name=f"cluster_{box_id}") as sub:
            sub.attr(style="dashed", label=f"!{box_id}")
            _emit(sub, box_id)
            for child in sorted(graph.box(box_id).children):
                _cluster(sub, child)

    for box in sorted(graph.boxes(), key=lambda b: b.id):
        if box.parent is None:
            _cluster(dot, box.id)

    highlighted = token.position if token is not None else None
    for node in sorted(graph.nodes(), key=lambda n: n.id):
        for index, peer in enumerate(node.outs):
            if peer is None:
                continue
            attrs = {"taillabel": f"o{index}", "headlabel": f"i{peer.index}", "fontsize": "8"}
            if highlighted in (peer, PortRef.o(node.id, index)):
                attrs.update(color="red", penwidth="2.5", label=str(token.direction))
            dot.edge(f"n{node.id}", f"n{peer.node}", **attrs)
    if highlighted is not None and graph.has_node(highlighted.node) and graph.peer(highlighted) is None:
        dot.node("token", label=str(token.direction), shape="point", color="red")
        dot.edge("token", f"n{highlighted.node}", headlabel=f"{highlighted.polarity}{highlighted.index}", color="red",
                 penwidth="2.5")
    return dot.source


def describe_port(graph: Graph, port: PortRef) -> str:
    """`<kind>.<port>` label of a port, used in traces and diagnostics."""
    if not graph.has_node(port.node):
        return f"<deleted>.{port.polarity.value}{port.index}"
    return f"{graph.node(port.node).kind}#{port.node}.{port.polarity.value}{port.index}"
