"""Helper utility functions."""
import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel

from fblab.config import RuntimeSettings

T = TypeVar("T")
R = TypeVar("R")

CSV_HEADER = "# fblab-csv v1"


def ensure_directory(path: str) -> None:
    """
    Ensure directory exists, create if it doesn't.

    Args:
        path: Directory path.
    """
    Path(path).mkdir(parents=True, exist_ok=True)


def make_rng(seed: int) -> np.random.Generator:
    """Seeded generator; every random draw in a run goes through one of these."""
    return np.random.default_rng(seed)


def uniform_grid(size: int, margin: float = 0.0) -> np.ndarray:
    """
    Midpoint grid of ``size`` points in (margin, 1 - margin).

    Args:
        size: Number of points.
        margin: Distance kept from both endpoints.
    """
    step = (1.0 - 2.0 * margin) / size
    return margin + step * (np.arange(size) + 0.5)


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Map ``func`` over ``items`` on a thread pool, preserving order.

    numpy and scipy release the GIL inside their kernels, so threads give
    real speedups for the per-t and per-setting sweeps.

    Args:
        func: Function applied to each item.
        items: Inputs.
        threads: Worker cap; defaults to ``RuntimeSettings().threads``.
    """
    items = list(items)
    workers = threads or RuntimeSettings().threads
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))


def render_json(document: BaseModel) -> str:
    """Serialize a schema document with stable key order."""
    return json.dumps(document.model_dump(mode="json"), indent=2, sort_keys=True)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """
    Render a table as CSV with the format comment on the first line.

    Floats are written with ``repr`` so they round-trip exactly.
    """
    buffer = io.StringIO()
    buffer.write(CSV_HEADER + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()


def write_output(text: str, path: Optional[str]) -> None:
    """
    Write rendered output to ``path``, or to stdout when ``path`` is None.

    Args:
        text: Rendered document.
        path: Destination file.
    """
    if path is None:
        print(text)
        return
    parent = Path(path).parent
    if str(parent):
        ensure_directory(str(parent))
    Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
