from .Graph import Graph, Node, Box
from .GraphDot import graph_to_dot, describe_port
