"""
Stopping forests: nested families of stopping intervals under one root
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from .data_models import DyadicInterval
from .errors import DomainError


@dataclass
class StoppingForest:
    """Stopping intervals of one construction, with the forest parent of each node

    `parent` maps every node to its forest parent (None for the root). `value` holds the
    stopping value: γ(F) = E_F|f| for Calderón–Zygmund forests, Ψ_w(I₀, S)² for Dini forests.
    `packing` maps each node with children to Σσ(children)/σ(node).
    """

    root: DyadicInterval
    parent: Dict[DyadicInterval, Optional[DyadicInterval]] = field(default_factory=dict)
    value: Dict[DyadicInterval, float] = field(default_factory=dict)
    kind: str = "cz"
    packing: Dict[DyadicInterval, float] = field(default_factory=dict)

    def __post_init__(self):
        self.parent.setdefault(self.root, None)

    def add(self, node: DyadicInterval, parent: DyadicInterval, value: float) -> None:
        if parent not in self.parent:
            raise DomainError(f"{parent} is not a node of this forest")
        if not parent.strictly_contains(node):
            raise DomainError(f"{node} is not strictly inside {parent}")
        self.parent[node] = parent
        self.value[node] = float(value)

    def __len__(self) -> int:
        return len(self.parent)

    def __contains__(self, interval: DyadicInterval) -> bool:
        return interval in self.parent

    def nodes(self) -> List[DyadicInterval]:
        """Coarse to fine, left to right"""
        return sorted(self.parent, key=lambda I: (I.level, I.index))

    def children(self, node: DyadicInterval) -> List[DyadicInterval]:
        return sorted((n for n, p in self.parent.items() if p == node), key=lambda I: (I.level, I.index))

    def generation(self, node: DyadicInterval) -> int:
        count = 0
        while self.parent[node] is not None:
            node = self.parent[node]
            count += 1
        return count

    def parent_of(self, interval: DyadicInterval) -> DyadicInterval:
        """π(I): the smallest node containing I"""
        if not self.root.contains(interval):
            raise DomainError(f"{interval} lies outside the forest root {self.root}")
        current = interval
        while current not in self.parent:
            current = current.parent()
        return current

    def parent_ids(self, size: int) -> np.ndarray:
        """π of every heap id below `size` as a heap id, -1 outside the root"""
        out = np.full(size, -1, dtype=np.int64)
        members = {node.node_id for node in self.parent}
        root_id = self.root.node_id
        for node_id in range(root_id, size):
            interval = DyadicInterval.from_node_id(node_id)
            if not self.root.contains(interval):
                continue
            if node_id in members:
                out[node_id] = node_id
            else:
                out[node_id] = out[(node_id - 1) // 2]
        return out

    def is_grid(self) -> bool:
        """Every non-root node sits strictly inside its parent, and its parent is the smallest node above it"""
        for node, parent in self.parent.items():
            if parent is None:
                if node != self.root:
                    return False
                continue
            if not parent.strictly_contains(node) or self.parent_of(node.parent()) != parent:
                return False
        return True

    def max_packing(self) -> float:
        return max(self.packing.values(), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        """Nested {level, index, value, children}"""

        def build(node: DyadicInterval) -> Dict[str, Any]:
            return {
                "level": node.level,
                "index": node.index,
                "value": self.value.get(node),
                "children": [build(child) for child in self.children(node)],
            }

        return {"kind": self.kind, "tree": build(self.root)}
