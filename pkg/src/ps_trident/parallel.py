"""Deterministic chunk-level threading.

Work is split into fixed chunks independent of the thread count; results
are combined in chunk-index order, so outputs are bit-identical for any
number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def map_chunks(fn, chunks, threads: int = 1) -> list:
    """Apply fn to every chunk, preserving order.  threads <= 1 runs inline."""
    chunks = list(chunks)
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))
