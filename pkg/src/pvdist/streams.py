"""Deterministic random substreams.

Every stochastic routine takes a :class:`Stream` (root seed plus a key path)
and derives child streams by index. Work is cut into fixed-size chunks, each
chunk drawing from its own child, so results depend only on the seed and the
chunk size and never on how many workers run the chunks.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

CHUNK = 1000


@dataclass(frozen=True)
class Stream:
    seed: int
    key: tuple = ()

    def child(self, *idx: int) -> "Stream":
        return Stream(self.seed, self.key + tuple(int(i) for i in idx))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed) & (2**64 - 1), spawn_key=self.key)
        return np.random.Generator(np.random.PCG64(ss))


def as_stream(s) -> Stream:
    if isinstance(s, Stream):
        return s
    return Stream(int(s))


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("PVDIST_WORKERS", "1")))
    except ValueError:
        return 1


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(n, chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn, n: int, stream: Stream, *args, chunk: int = CHUNK) -> list:
    """Call fn(size, child_stream, *args) per chunk; results keep chunk order."""
    sizes = chunk_sizes(n, chunk)
    streams = [stream.child(i) for i in range(len(sizes))]
    workers = worker_count()
    if workers == 1 or len(sizes) == 1:
        return [fn(sz, st, *args) for sz, st in zip(sizes, streams)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, sz, st, *args) for sz, st in zip(sizes, streams)]
        return [f.result() for f in futs]
