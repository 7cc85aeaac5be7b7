"""Word vectors, cosine similarity and equivalent-ingredient ranking."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, VectorFileError

DEFAULT_TAU = 0.90
DEFAULT_TOP_K = 5


@dataclass(frozen=True)
class SimilarityConfig:
    tau: float = DEFAULT_TAU
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        if not (0 < self.tau <= 1):
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")


@dataclass(frozen=True, eq=False)
class VectorStore:
    dims: int
    vectors: Mapping[str, np.ndarray]
    _unit_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.dims < 1:
            raise VectorFileError("dims must be positive")
        if not self.vectors:
            raise VectorFileError("vector store is empty")
        for token, vec in self.vectors.items():
            if token != token.lower():
                raise VectorFileError(f"token {token!r} is not lowercase")
            if len(vec) != self.dims:
                raise VectorFileError(f"token {token!r} has {len(vec)} values, expected {self.dims}")

    def __contains__(self, token: str) -> bool:
        return token in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def unit(self, phrase: str) -> np.ndarray | None:
        """Normalised phrase vector, cached; ``None`` if absent or zero."""
        try:
            return self._unit_cache[phrase]
        except KeyError:
            pass
        vec = phrase_vector(self, phrase)
        if vec is not None:
            norm = float(np.linalg.norm(vec))
            vec = vec / norm if norm > 0 else None
        self._unit_cache[phrase] = vec
        return vec


def load_vectors(path: str | Path) -> VectorStore:
    """Read ``<count> <dims>`` then ``token v1 ... vdims`` per line."""
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise VectorFileError(f"{path}:1: header must be '<count> <dims>'")
        try:
            count, dims = int(header[0]), int(header[1])
        except ValueError:
            raise VectorFileError(f"{path}:1: header must be two integers") from None
        if count < 1 or dims < 1:
            raise VectorFileError(f"{path}:1: count and dims must be positive")
        vectors: dict[str, np.ndarray] = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(" ")
            if parts == [""]:
                continue
            token, values = parts[0].lower(), parts[1:]
            if len(values) != dims:
                raise VectorFileError(
                    f"{path}:{lineno}: dimension mismatch for {token!r}: {len(values)} values, expected {dims}"
                )
            if token in vectors:
                raise VectorFileError(f"{path}:{lineno}: duplicate token {token!r}")
            try:
                vectors[token] = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise VectorFileError(f"{path}:{lineno}: non-numeric value for {token!r}") from None
    if len(vectors) != count:
        raise VectorFileError(f"{path}: header announces {count} vectors, found {len(vectors)}")
    return VectorStore(dims, vectors)


def phrase_vector(store: VectorStore, phrase: str) -> np.ndarray | None:
    """Token vector, or the mean of in-vocabulary token vectors for multiword phrases."""
    tokens = phrase.lower().split()
    found = [store.vectors[t] for t in tokens if t in store.vectors]
    if not found:
        return None
    if len(found) == 1:
        return found[0]
    return np.mean(found, axis=0)


def similarity(store: VectorStore, a: str, b: str) -> float | None:
    """Cosine similarity clamped to [0, 1]; ``None`` when either side has no vector."""
    ua, ub = store.unit(a), store.unit(b)
    if ua is None or ub is None:
        return None
    return min(1.0, max(0.0, float(np.dot(ua, ub))))


def matches(store: VectorStore, a: str, b: str, tau: float) -> bool:
    """Exact name equality, or embedding similarity at or above ``tau``."""
    if a == b:
        return True
    s = similarity(store, a, b)
    return s is not None and s >= tau


class SimilarityIndex:
    """Vocabulary matrix for fast top-k scans."""

    def __init__(self, store: VectorStore, vocab: Iterable[str]):
        self.store = store
        names = []
        rows = []
        for name in sorted(set(vocab)):
            u = store.unit(name)
            if u is not None:
                names.append(name)
                rows.append(u)
        self.names = names
        self.matrix = np.vstack(rows) if rows else np.zeros((0, store.dims))

    def top_k(self, word: str, k: int) -> list[tuple[str, float]]:
        q = self.store.unit(word)
        if q is None or not self.names:
            return []
        scores = np.clip(self.matrix @ q, 0.0, 1.0)
        # names are sorted, so a stable sort on -score breaks ties lexicographically
        order = np.argsort(-scores, kind="stable")
        out = []
        for i in order:
            name = self.names[i]
            if name == word:
                continue
            out.append((name, float(scores[i])))
            if len(out) == k:
                break
        return out


def top_k_equivalents(store: VectorStore, word: str, vocab: Iterable[str], k: int) -> list[tuple[str, float]]:
    if k < 1:
        raise ValueError("k must be >= 1")
    return SimilarityIndex(store, vocab).top_k(word, k)


@dataclass(frozen=True)
class EquivalenceMap:
    entries: Mapping[str, tuple[tuple[str, float], ...]]

    def lookup(self, name: str) -> tuple[tuple[str, float], ...] | None:
        return self.entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def build_equivalence_map(
    store: VectorStore,
    unseen: Iterable[str],
    vocab: Iterable[str],
    cfg: SimilarityConfig = SimilarityConfig(),
    index: SimilarityIndex | None = None,
) -> EquivalenceMap:
    index = index or SimilarityIndex(store, vocab)
    return EquivalenceMap({name: tuple(index.top_k(name, cfg.top_k)) for name in sorted(set(unseen))})

