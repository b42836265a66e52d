"""Disjoint-set forest with path compression and union by size."""


class UnionFind:
    def __init__(self, size: int = 0):
        self.parent = list(range(size))
        self.size = [1] * size
        self.components = size

    def add(self) -> int:
        """Append a new singleton and return its index."""
        i = len(self.parent)
        self.parent.append(i)
        self.size.append(1)
        self.components += 1
        return i

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; False if they were already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True

    def connected(self, a: int, b: int) -> bool:
        return self.find(a) == self.find(b)

    def labels(self) -> list:
        """Component label per element, numbered by first appearance."""
        seen: dict = {}
        out = []
        for i in range(len(self.parent)):
            out.append(seen.setdefault(self.find(i), len(seen)))
        return out
