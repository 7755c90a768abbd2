from enum import Enum
from typing import NamedTuple


class Polarity(str, Enum):
    IN = "i"
    OUT = "o"

    def __str__(self):
        return self.value


class PortRef(NamedTuple):
    """A port of a node: `i<k>` (in-port) or `o<k>` (out-port). Hashable, used as dictionary key on hot paths."""
    node: int
    index: int
    polarity: Polarity

    def __str__(self):
        return f"{self.node}.{self.polarity.value}{self.index}"

    @staticmethod
    def i(node: int, index: int = 0) -> "PortRef":
        return PortRef(node, index, Polarity.IN)

    @staticmethod
    def o(node: int, index: int = 0) -> "PortRef":
        return PortRef(node, index, Polarity.OUT)

    @property
    def is_in(self) -> bool:
        return self.polarity is Polarity.IN
