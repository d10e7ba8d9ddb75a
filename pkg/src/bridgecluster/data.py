"""Synthetic benchmark datasets, noise injection and CSV input/output.

Default sizes and class proportions:

============  =====  =======  ======================================
name          n      classes  proportions
============  =====  =======  ======================================
impossible    3594   7        24.8 18.8 11.3 7.5 12.5 12.5 12.5 (%)
moons         1000   2        50 50
circles       1000   2        50 50
smile         1000   4        25 25 25 25
============  =====  =======  ======================================

All generators are deterministic given their ``rng`` argument.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyInput, InvalidRatio, NonNumericCell, ParseError, RaggedRows
from .numerics import as_data_matrix, as_rng

IMPOSSIBLE_PROPORTIONS = (0.248, 0.188, 0.113, 0.075, 0.125, 0.125, 0.125)


@dataclass(frozen=True)
class LabeledDataset:
    x: np.ndarray
    y: np.ndarray
    name: str = "dataset"

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def n_classes(self) -> int:
        return int(self.y.max()) + 1 if self.y.size else 0

    @property
    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=self.n_classes)

    @property
    def proportions(self) -> np.ndarray:
        return self.class_counts / self.n


def _split(n: int, parts: int) -> list[int]:
    base, extra = divmod(n, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def _labels(sizes) -> np.ndarray:
    return np.repeat(np.arange(len(sizes)), sizes)


def _jitter(x, sigma, rng):
    return x + rng.normal(scale=sigma, size=x.shape) if sigma > 0 else x


def make_moons(n: int = 1000, noise: float = 0.0, rng=None) -> LabeledDataset:
    """Two interleaving half circles (class 0 on top)."""
    if n < 2:
        raise ValueError("moons needs n >= 2")
    rng = as_rng(rng)
    n_top, n_bottom = _split(n, 2)
    a = np.linspace(0, np.pi, n_top)
    b = np.linspace(0, np.pi, n_bottom)
    top = np.column_stack([np.cos(a), np.sin(a)])
    bottom = np.column_stack([1 - np.cos(b), 0.5 - np.sin(b)])
    x = _jitter(np.vstack([top, bottom]), noise, rng)
    return LabeledDataset(x, _labels([n_top, n_bottom]), "moons")


def make_circles(n: int = 1000, ratio: float = 0.5, noise: float = 0.0, rng=None) -> LabeledDataset:
    """Concentric circles of radius 1 (class 0) and ``ratio`` (class 1)."""
    if not 0 < ratio < 1:
        raise InvalidRatio(f"radius ratio must lie in (0, 1), got {ratio}")
    rng = as_rng(rng)
    n_out, n_in = _split(n, 2)
    a = np.linspace(0, 2 * np.pi, n_out, endpoint=False)
    b = np.linspace(0, 2 * np.pi, n_in, endpoint=False)
    x = np.vstack([np.column_stack([np.cos(a), np.sin(a)]), ratio * np.column_stack([np.cos(b), np.sin(b)])])
    return LabeledDataset(_jitter(x, noise, rng), _labels([n_out, n_in]), "circles")


def make_smile(n: int = 1000, rng=None) -> LabeledDataset:
    """A smiling face: left eye, right eye, mouth, outline (classes 0..3).

    Eyes are isotropic Gaussians (sd 0.08) at ``(-0.35, 0.35)`` and
    ``(0.35, 0.35)``.  The mouth is the lower arc of a circle of radius 0.55
    about ``(0, 0.05)`` spanning angles ``[pi + 0.6, 2 pi - 0.6]``; the outline
    is the unit circle.  Both curves carry Gaussian jitter of sd 0.03.
    """
    rng = as_rng(rng)
    sizes = _split(n, 4)
    left = rng.normal(loc=(-0.35, 0.35), scale=0.08, size=(sizes[0], 2))
    right = rng.normal(loc=(0.35, 0.35), scale=0.08, size=(sizes[1], 2))
    a = rng.uniform(np.pi + 0.6, 2 * np.pi - 0.6, sizes[2])
    mouth = np.column_stack([0.55 * np.cos(a), 0.05 + 0.55 * np.sin(a)])
    mouth = _jitter(mouth, 0.03, rng)
    b = rng.uniform(0, 2 * np.pi, sizes[3])
    outline = _jitter(np.column_stack([np.cos(b), np.sin(b)]), 0.03, rng)
    return LabeledDataset(np.vstack([left, right, mouth, outline]), _labels(sizes), "smile")


def impossible_sizes(n: int) -> list[int]:
    sizes = [int(round(p * n)) for p in IMPOSSIBLE_PROPORTIONS[:-1]]
    sizes.append(n - sum(sizes))
    return sizes


def make_impossible(n: int = 3594, rng=None) -> LabeledDataset:
    """Seven shapes of mixed difficulty.

    ======  ==========================================================
    class   shape
    ======  ==========================================================
    0       upper half ring, radius 4 about the origin (sd 0.12)
    1       upper half ring, radius 2.5 about the origin (sd 0.12)
    2, 3    two interleaved spiral arms ``r = 0.3 + 0.35 theta``,
            ``theta`` in ``[0.5, 2.5 pi]``, the second arm turned by pi,
            centred at ``(0, -4)`` (sd 0.08)
    4, 5    Gaussian blobs (sd 0.3) at ``(-6.5, -3.5)`` and ``(6.5, -3.5)``
    6       Gaussian blob (sd 0.3) at ``(0, 0.6)``, inside the inner ring
    ======  ==========================================================

    Curves are sampled at evenly spaced angles before jitter, so their
    density has no gaps of its own.
    """
    rng = as_rng(rng)
    sizes = impossible_sizes(n)

    def ring(count, radius):
        a = np.linspace(0, np.pi, count)
        return _jitter(radius * np.column_stack([np.cos(a), np.sin(a)]), 0.12, rng)

    def arm(count, turn):
        theta = np.linspace(0.5, 2.5 * np.pi, count)
        r = 0.3 + 0.35 * theta
        pts = np.column_stack([r * np.cos(theta + turn), -4 + r * np.sin(theta + turn)])
        return _jitter(pts, 0.08, rng)

    parts = [
        ring(sizes[0], 4.0),
        ring(sizes[1], 2.5),
        arm(sizes[2], 0.0),
        arm(sizes[3], np.pi),
        rng.normal(loc=(-6.5, -3.5), scale=0.3, size=(sizes[4], 2)),
        rng.normal(loc=(6.5, -3.5), scale=0.3, size=(sizes[5], 2)),
        rng.normal(loc=(0.0, 0.6), scale=0.3, size=(sizes[6], 2)),
    ]
    return LabeledDataset(np.vstack(parts), _labels(sizes), "impossible")


def make_blobs(n: int, n_clusters: int = 5, dim: int = 10, spread: float = 1.0, box: float = 10.0, rng=None) -> LabeledDataset:
    """Isotropic Gaussian clusters with centres uniform in ``[-box, box]^dim``."""
    rng = as_rng(rng)
    sizes = _split(n, n_clusters)
    centres = rng.uniform(-box, box, size=(n_clusters, dim))
    x = np.vstack([rng.normal(loc=c, scale=spread, size=(s, dim)) for c, s in zip(centres, sizes)])
    return LabeledDataset(x, _labels(sizes), "blobs")


GENERATORS = {
    "impossible": lambda rng: make_impossible(3594, rng=rng),
    "moons": lambda rng: make_moons(1000, noise=0.05, rng=rng),
    "circles": lambda rng: make_circles(1000, ratio=0.5, noise=0.02, rng=rng),
    "smile": lambda rng: make_smile(1000, rng=rng),
}


def generate(name: str, rng=None) -> LabeledDataset:
    """Named dataset at its default size and noise level."""
    try:
        maker = GENERATORS[name]
    except KeyError:
        raise KeyError(f"unknown dataset {name!r}; valid names: {', '.join(sorted(GENERATORS))}") from None
    return maker(as_rng(rng))


def add_gaussian_noise(ds: LabeledDataset, sigma: float, rng=None) -> LabeledDataset:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return LabeledDataset(ds.x.copy(), ds.y.copy(), ds.name)
    x = ds.x + as_rng(rng).normal(scale=sigma, size=ds.x.shape)
    return LabeledDataset(x, ds.y.copy(), f"{ds.name}+gaussian")


def add_uniform_noise(ds: LabeledDataset, count: int, rng=None) -> LabeledDataset:
    """Append ``count`` points uniform over the bounding box, labelled as a new class."""
    if count < 0:
        raise ValueError("count must be >= 0")
    if count == 0:
        return LabeledDataset(ds.x.copy(), ds.y.copy(), ds.name)
    lo, hi = ds.x.min(axis=0), ds.x.max(axis=0)
    extra = as_rng(rng).uniform(lo, hi, size=(count, ds.x.shape[1]))
    y = np.concatenate([ds.y, np.full(count, ds.n_classes, dtype=ds.y.dtype)])
    return LabeledDataset(np.vstack([ds.x, extra]), y, f"{ds.name}+uniform")


def _factorize(values) -> np.ndarray:
    codes = {}
    return np.array([codes.setdefault(v, len(codes)) for v in values], dtype=np.intp)


def load_csv(path, has_header: bool = True, label_column=None):
    """Read a numeric CSV file.

    Returns a float matrix, or a :class:`LabeledDataset` when ``label_column``
    (an integer index, negative counts from the end) is given.  Labels are
    coded ``0..C-1`` in order of first appearance.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    start = 1 if has_header else 0
    body = [(i + 1, r) for i, r in enumerate(rows) if i >= start and any(c.strip() for c in r)]
    if not body:
        raise EmptyInput(f"{path}: no data rows")
    width = len(body[0][1])
    for line, row in body:
        if len(row) != width:
            raise RaggedRows(f"{path}: line {line} has {len(row)} fields, expected {width}", line=line)

    label_idx = None
    if label_column is not None:
        label_idx = label_column + width if label_column < 0 else label_column
        if not 0 <= label_idx < width:
            raise ParseError(f"{path}: label column {label_column} out of range for {width} columns")
        if width < 2:
            raise ParseError(f"{path}: need at least one feature column besides the label")
    features = [j for j in range(width) if j != label_idx]

    x = np.empty((len(body), len(features)))
    for r, (line, row) in enumerate(body):
        for c, j in enumerate(features):
            cell = row[j].strip()
            try:
                x[r, c] = float(cell)
            except ValueError:
                raise NonNumericCell(
                    f"{path}: line {line}, column {j + 1}: non-numeric value {cell!r}", line=line, column=j + 1
                ) from None
    if not np.all(np.isfinite(x)):
        raise ParseError(f"{path}: NaN or infinite values are not accepted")
    if label_idx is None:
        return x
    labels = _factorize(row[label_idx].strip() for _, row in body)
    return LabeledDataset(x, labels, path.stem)


def read_table(path) -> list[dict]:
    """Rows of a headed CSV report (or a JSON-lines file) as dictionaries of strings / values."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        text = fh.read()
    if not text.strip():
        raise EmptyInput(f"{path}: empty file")
    if text.lstrip().startswith("{"):
        try:
            return [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: invalid JSON", line=exc.lineno) from None
    return list(csv.DictReader(io.StringIO(text)))


def _fmt(v: float) -> str:
    return repr(float(v))


def dataset_to_csv(x, labels=None) -> str:
    x = as_data_matrix(x)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = [f"x{j}" for j in range(x.shape[1])]
    if labels is not None:
        header.append("label")
    w.writerow(header)
    for i, row in enumerate(x):
        cells = [_fmt(v) for v in row]
        if labels is not None:
            cells.append(str(int(labels[i])))
        w.writerow(cells)
    return buf.getvalue()


def save_csv(path, data, labels=None) -> None:
    """Write ``x0..x{d-1}[,label]`` with shortest round-trip float formatting."""
    if isinstance(data, LabeledDataset):
        data, labels = data.x, data.y if labels is None else labels
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dataset_to_csv(data, labels))
