"""Seeds, matrix mutation and mutation-class exploration."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "Seed",
    "SeedError",
    "mutate_seed",
    "apply_mutation_sequence",
    "canonical_form",
    "MutationClass",
    "enumerate_mutation_class",
    "a_n_seed",
]


class SeedError(ValueError):
    pass


@dataclass(frozen=True)
class Seed:
    """Index labels, frozen subset and skew-symmetric exchange matrix.

    ``eps`` rows and columns follow the order of ``indices``.  Labels are
    opaque strings and are never renamed by mutation.
    """

    indices: tuple[str, ...]
    frozen: frozenset[str]
    eps: tuple[tuple[int, ...], ...]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        indices = tuple(str(i) for i in self.indices)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "frozen", frozenset(str(f) for f in self.frozen))
        object.__setattr__(self, "eps", tuple(tuple(int(e) for e in row) for row in self.eps))
        if len(set(indices)) != len(indices):
            raise SeedError(f"duplicate index labels: {indices}")
        if not self.frozen <= set(indices):
            raise SeedError(f"frozen labels {sorted(self.frozen - set(indices))} are not indices")
        n = len(indices)
        if len(self.eps) != n or any(len(row) != n for row in self.eps):
            raise SeedError(f"exchange matrix must be {n}x{n}")
        for a in range(n):
            for b in range(a, n):
                if self.eps[a][b] != -self.eps[b][a]:
                    raise SeedError(f"exchange matrix not skew-symmetric at ({indices[a]}, {indices[b]})")
        object.__setattr__(self, "_pos", {label: k for k, label in enumerate(indices)})

    @classmethod
    def from_matrix(cls, eps: Sequence[Sequence[int]], frozen: Iterable[str] = (), labels: Sequence[str] | None = None) -> "Seed":
        """Seed with labels ``"1".."n"`` unless ``labels`` are given."""
        if labels is None:
            labels = [str(k + 1) for k in range(len(eps))]
        return cls(tuple(labels), frozenset(frozen), tuple(tuple(r) for r in eps))

    def __len__(self):
        return len(self.indices)

    @property
    def mutable(self) -> tuple[str, ...]:
        """The non-frozen labels ``J``, in index order."""
        return tuple(i for i in self.indices if i not in self.frozen)

    def position(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise SeedError(f"unknown index {label!r}") from None

    def e(self, i: str, j: str) -> int:
        return self.eps[self._pos[i]][self._pos[j]]

    def row(self, i: str) -> dict[str, int]:
        r = self.eps[self.position(i)]
        return {j: r[b] for b, j in enumerate(self.indices)}

    def mutate(self, k: str) -> "Seed":
        return mutate_seed(self, k)

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices),
            "frozen": [i for i in self.indices if i in self.frozen],
            "eps": [list(r) for r in self.eps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "Seed":
        try:
            return cls(tuple(data["indices"]), frozenset(data.get("frozen", ())), tuple(map(tuple, data["eps"])))
        except (KeyError, TypeError) as exc:
            raise SeedError(f"malformed seed document: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "Seed":
        return cls.from_json(json.loads(text))


def a_n_seed(n: int) -> Seed:
    """Linearly oriented A_n quiver: 1 -> 2 -> ... -> n."""
    eps = [[0] * n for _ in range(n)]
    for a in range(n - 1):
        eps[a][a + 1] = 1
        eps[a + 1][a] = -1
    return Seed.from_matrix(eps)


def mutate_seed(s: Seed, k: str) -> Seed:
    k = str(k)
    kk = s.position(k)
    if k in s.frozen:
        raise SeedError(f"cannot mutate at frozen index {k!r}")
    eps = s.eps
    n = len(eps)
    new = [list(r) for r in eps]
    for a in range(n):
        eak = eps[a][kk]
        for b in range(n):
            if a == kk or b == kk:
                new[a][b] = -eps[a][b]
                continue
            ekb = eps[kk][b]
            twice = abs(eak) * ekb + eak * abs(ekb)
            assert twice % 2 == 0, "mutation correction must be even"
            new[a][b] = eps[a][b] + twice // 2
    return Seed(s.indices, s.frozen, tuple(map(tuple, new)))


def apply_mutation_sequence(s: Seed, ks: Iterable[str]) -> Seed:
    for k in ks:
        s = mutate_seed(s, k)
    return s


# -- canonical forms up to relabelling ------------------------------------


def _twin_classes(eps, block: Sequence[int]) -> list[int]:
    """Representative of each vertex under 'identical rows, no edge between'."""
    rep = {}
    out = []
    for v in block:
        for r in out:
            if eps[v][r] == 0 and all(eps[v][w] == eps[r][w] for w in range(len(eps)) if w not in (v, r)):
                rep[v] = r
                break
        else:
            out.append(v)
            rep[v] = v
    return [rep[v] for v in block]


def canonical_form(s: Seed) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Relabelling-invariant key of a seed.

    Mutable indices are placed first and frozen ones after; within each block
    any permutation is allowed.  Among all such orderings the one whose
    upper-triangular entries, read column by column, are lexicographically
    smallest wins.  Returns ``(block sizes, permuted matrix)``.
    """
    eps = s.eps
    mutable = [s.position(i) for i in s.mutable]
    frozen = [s.position(i) for i in s.indices if i in s.frozen]
    blocks = [mutable, frozen]
    n = len(eps)
    twin = _twin_classes(eps, range(n))

    best: list[int] | None = None
    best_key: list[int] | None = None

    def column(order, v):
        return [eps[u][v] for u in order]

    def search(order, key, remaining_blocks):
        nonlocal best, best_key
        if not remaining_blocks:
            if best_key is None or key < best_key:
                best, best_key = list(order), list(key)
            return
        block, rest = remaining_blocks[0], remaining_blocks[1:]
        if not block:
            search(order, key, rest)
            return
        candidates = []
        seen_twins = set()
        for v in block:
            # swapping two twins is an automorphism fixing the prefix
            if twin[v] in seen_twins:
                continue
            seen_twins.add(twin[v])
            candidates.append((column(order, v), v))
        candidates.sort()
        for col, v in candidates:
            new_key = key + col
            if best_key is not None:
                prefix = best_key[: len(new_key)]
                if new_key > prefix:
                    break
            left = [u for u in block if u != v]
            search(order + [v], new_key, [left] + rest if left else rest)

    search([], [], blocks)
    assert best is not None
    matrix = tuple(tuple(eps[a][b] for b in best) for a in best)
    return (len(mutable), len(frozen)), matrix


@dataclass
class MutationClass:
    """Breadth-first exploration of a mutation class up to relabelling.

    ``nodes`` lists canonical forms in discovery order; ``representatives``
    holds one concrete seed per node; ``edges`` are ``(node, index label,
    node)`` triples using the representative's labels.
    """

    nodes: list
    representatives: list[Seed]
    edges: list[tuple[int, str, int]]
    truncated: bool

    def __len__(self):
        return len(self.nodes)


def enumerate_mutation_class(s: Seed, max_nodes: int = 1000) -> MutationClass:
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    start = canonical_form(s)
    index = {start: 0}
    nodes = [start]
    reps = [s]
    edges = []
    truncated = False
    queue = deque([0])
    while queue:
        a = queue.popleft()
        seed = reps[a]
        for k in seed.mutable:
            t = mutate_seed(seed, k)
            key = canonical_form(t)
            b = index.get(key)
            if b is None:
                if len(nodes) >= max_nodes:
                    truncated = True
                    continue
                b = len(nodes)
                index[key] = b
                nodes.append(key)
                reps.append(t)
                queue.append(b)
            edges.append((a, k, b))
    return MutationClass(nodes, reps, edges, truncated)
