"""Indexed binary max-heap with promote-if-higher semantics."""

from __future__ import annotations

from typing import Hashable, Iterator, Optional


class IndexedPQueue:
    """Max-priority queue where each key appears at most once.

    Equal priorities pop most-recently-promoted first.  Promotions with a
    priority below ``cutoff`` are dropped.
    """

    def __init__(self, cutoff: float = 0.0):
        self.cutoff = cutoff
        # heap entries are [priority, stamp, key]
        self._heap: list[list] = []
        self._pos: dict[Hashable, int] = {}
        self._stamp = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._pos

    def __iter__(self) -> Iterator[Hashable]:
        return iter(list(self._pos))

    def priority(self, key: Hashable) -> float:
        return self._heap[self._pos[key]][0]

    def peek(self) -> Optional[tuple[Hashable, float]]:
        if not self._heap:
            return None
        top = self._heap[0]
        return top[2], top[0]

    def promote(self, key: Hashable, p: float) -> bool:
        """Insert ``key`` or raise its priority to ``p``; returns True if stored."""
        if p < self.cutoff:
            return False
        i = self._pos.get(key)
        self._stamp += 1
        if i is None:
            self._heap.append([p, self._stamp, key])
            self._pos[key] = len(self._heap) - 1
            self._sift_up(len(self._heap) - 1)
            return True
        entry = self._heap[i]
        if entry[0] >= p:
            return False
        entry[0] = p
        entry[1] = self._stamp
        self._sift_up(i)
        return True

    def pop_max(self) -> Optional[tuple[Hashable, float]]:
        """Remove and return ``(key, priority)`` of a top entry, or None when empty."""
        heap = self._heap
        if not heap:
            return None
        top = heap[0]
        last = heap.pop()
        del self._pos[top[2]]
        if heap:
            heap[0] = last
            self._pos[last[2]] = 0
            self._sift_down(0)
        return top[2], top[0]

    def clear(self) -> None:
        self._heap.clear()
        self._pos.clear()

    @staticmethod
    def _above(x: list, y: list) -> bool:
        return x[0] > y[0] or (x[0] == y[0] and x[1] > y[1])

    def _sift_up(self, i: int) -> None:
        heap, pos = self._heap, self._pos
        entry = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            pe = heap[parent]
            if not self._above(entry, pe):
                break
            heap[i] = pe
            pos[pe[2]] = i
            i = parent
        heap[i] = entry
        pos[entry[2]] = i

    def _sift_down(self, i: int) -> None:
        heap, pos = self._heap, self._pos
        n = len(heap)
        entry = heap[i]
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            right = child + 1
            if right < n and self._above(heap[right], heap[child]):
                child = right
            ce = heap[child]
            if not self._above(ce, entry):
                break
            heap[i] = ce
            pos[ce[2]] = i
            i = child
        heap[i] = entry
        pos[entry[2]] = i
