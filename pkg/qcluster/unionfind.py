from typing import Dict, Iterable, List, Tuple


class UnionFind:
    """Disjoint sets over hashable points, with path compression."""

    def __init__(self, items: Iterable[int] = ()):
        self.forest: Dict[int, int] = {}
        self.components = 0
        for item in items:
            self.add(item)

    def add(self, k: int) -> int:
        if k not in self.forest:
            self.forest[k] = k
            self.components += 1
        return k

    def find(self, k: int) -> int:
        self.add(k)
        root = k
        while root != self.forest[root]:
            root = self.forest[root]

        node = k
        while node != self.forest[node]:
            self.forest[node], node = root, self.forest[node]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; False when already joined."""

        root_a = self.find(a)
        root_b = self.find(b)
        if root_a == root_b:
            return False
        # smaller root wins so representatives stay canonical
        if root_b < root_a:
            root_a, root_b = root_b, root_a
        self.forest[root_b] = root_a
        self.components -= 1
        return True

    def groups(self) -> List[Tuple[int, ...]]:
        buckets: Dict[int, List[int]] = {}
        for item in sorted(self.forest):
            buckets.setdefault(self.find(item), []).append(item)
        return [tuple(members) for members in buckets.values()]
