"""Dataset ingestion, grouping-variable encoding, and predictor standardization.

A dataset holds an N x D block of numerical predictors, K integer-coded
grouping columns, and a response vector.  Grouping levels are re-coded to
contiguous integers 1..L in order of first appearance, and the design fed
to the GP keeps those codes unstandardized so that level spacing stays
interpretable.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

GAUSSIAN = "gaussian"
BERNOULLI = "bernoulli"
FAMILIES = (GAUSSIAN, BERNOULLI)

NUMERICAL = "numerical"
DUMMY = "dummy"


class DataError(ValueError):
    """Malformed input data or schema violation."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Complete tabular dataset with predictors, grouping codes and response.

    ``x`` is N x D float, ``groups`` is N x K of integer level codes (each
    column uses exactly the codes 1..L_k), ``y`` has length N and holds 0/1
    for the bernoulli family.  ``level_labels[k][c-1]`` is the original
    label behind code ``c`` in grouping ``k``.
    """

    x: np.ndarray
    groups: np.ndarray
    y: np.ndarray
    family: str
    predictor_names: tuple[str, ...]
    grouping_names: tuple[str, ...]
    response_name: str
    level_labels: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "groups", np.asarray(self.groups, dtype=int))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.family not in FAMILIES:
            raise DataError(f"unknown family {self.family!r}")
        if self.x.ndim != 2:
            raise DataError("x must be a 2-d array")
        n, d = self.x.shape
        if n < 1 or d < 1:
            raise DataError("need at least one observation and one predictor")
        groups = self.groups.reshape(n, -1) if self.groups.size else self.groups.reshape(n, 0)
        object.__setattr__(self, "groups", groups)
        k = groups.shape[1]
        if self.y.shape != (n,):
            raise DataError("response length does not match x")
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.y)):
            raise DataError("non-finite values in data")
        if len(self.predictor_names) != d or len(self.grouping_names) != k:
            raise DataError("name lists do not match data shape")
        for j in range(k):
            codes = np.unique(groups[:, j])
            n_levels = codes.size
            if n_levels < 2 or not np.array_equal(codes, np.arange(1, n_levels + 1)):
                raise DataError(
                    f"grouping column {self.grouping_names[j]!r} must use "
                    f"contiguous codes 1..L with L >= 2"
                )
        if self.family == BERNOULLI and not np.all(np.isin(self.y, (0.0, 1.0))):
            raise DataError("bernoulli response must be 0/1")
        if not self.level_labels:
            labels = tuple(
                tuple(str(c) for c in range(1, int(groups[:, j].max()) + 1)) for j in range(k)
            )
            object.__setattr__(self, "level_labels", labels)

    @property
    def n_obs(self) -> int:
        return self.x.shape[0]

    @property
    def n_predictors(self) -> int:
        return self.x.shape[1]

    @property
    def n_groupings(self) -> int:
        return self.groups.shape[1]

    def n_levels(self, k: int) -> int:
        return int(self.groups[:, k].max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.groups, other.groups)
            and np.array_equal(self.y, other.y)
            and self.family == other.family
            and self.predictor_names == other.predictor_names
            and self.grouping_names == other.grouping_names
            and self.response_name == other.response_name
            and self.level_labels == other.level_labels
        )


@dataclass(frozen=True)
class StandardizationParams:
    """Per-predictor means and sample standard deviations."""

    means: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class EncodedDesign:
    """N x (D+K) design: standardized predictors first, then raw level codes."""

    z: np.ndarray
    column_kinds: tuple[str, ...]

    @property
    def n_numerical(self) -> int:
        return self.column_kinds.count(NUMERICAL)

    @property
    def n_dummy(self) -> int:
        return self.column_kinds.count(DUMMY)


def encode_groups(raw_labels) -> tuple[np.ndarray, dict]:
    """Code a column of arbitrary labels as integers 1..L by first appearance.

    Returns the code vector and the invertible label -> code map.
    """
    labels = list(raw_labels)
    if not labels:
        raise DataError("empty grouping column")
    label_map: dict = {}
    codes = np.empty(len(labels), dtype=int)
    for i, lab in enumerate(labels):
        if lab not in label_map:
            label_map[lab] = len(label_map) + 1
        codes[i] = label_map[lab]
    if len(label_map) < 2:
        raise DataError("grouping column has a single level")
    return codes, label_map


def _parse_float(cell: str, column: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"unparseable numeric cell {cell!r} in column {column!r}, row {row}"
        ) from None


def load_csv_text(
    text: str,
    response_name: str,
    grouping_names,
    family: str,
) -> Dataset:
    """Parse CSV text (header row, comma-separated, '.' decimals) into a Dataset.

    Every column that is neither the response nor a grouping becomes a
    numerical predictor.  Grouping levels are coded 1..L by first appearance;
    bernoulli responses must take exactly two distinct values.
    """
    if family not in FAMILIES:
        raise DataError(f"unknown family {family!r}")
    grouping_names = tuple(grouping_names)
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError("empty CSV") from None
    header = [h.strip() for h in header]
    if response_name not in header:
        raise DataError(f"response column {response_name!r} not in header")
    for g in grouping_names:
        if g not in header:
            raise DataError(f"grouping column {g!r} not in header")
    if len(set(header)) != len(header):
        raise DataError("duplicate column names in header")
    resp_idx = header.index(response_name)
    group_idx = [header.index(g) for g in grouping_names]
    pred_idx = [
        i for i, h in enumerate(header) if i != resp_idx and i not in group_idx
    ]
    predictor_names = tuple(header[i] for i in pred_idx)
    if not predictor_names:
        raise DataError("no predictor columns left after schema assignment")

    rows = []
    for row in reader:
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue
        if len(row) != len(header):
            raise DataError(f"row {len(rows) + 1} has {len(row)} cells, expected {len(header)}")
        rows.append([c.strip() for c in row])
    if not rows:
        raise DataError("no data rows")
    for r, row in enumerate(rows):
        for cell in row:
            if cell == "":
                raise DataError(f"missing value in row {r + 1}")

    n = len(rows)
    x = np.empty((n, len(pred_idx)))
    for j, idx in enumerate(pred_idx):
        col = header[idx]
        x[:, j] = [_parse_float(rows[r][idx], col, r + 1) for r in range(n)]

    groups = np.empty((n, len(group_idx)), dtype=int)
    level_labels = []
    for j, idx in enumerate(group_idx):
        try:
            codes, label_map = encode_groups([rows[r][idx] for r in range(n)])
        except DataError as err:
            raise DataError(f"grouping column {header[idx]!r}: {err}") from None
        groups[:, j] = codes
        level_labels.append(tuple(label_map.keys()))

    raw_y = [rows[r][resp_idx] for r in range(n)]
    if family == GAUSSIAN:
        y = np.array([_parse_float(v, response_name, r + 1) for r, v in enumerate(raw_y)])
    else:
        distinct = list(dict.fromkeys(raw_y))
        if len(distinct) != 2:
            raise DataError(
                f"bernoulli response {response_name!r} has {len(distinct)} "
                f"distinct values, expected 2"
            )
        # Keep literal 0/1 responses as-is so write/load round-trips; any
        # other label pair is coded first-seen -> 0.
        try:
            parsed = {lab: float(lab) for lab in distinct}
        except ValueError:
            parsed = None
        if parsed is not None and set(parsed.values()) == {0.0, 1.0}:
            mapping = {lab: parsed[lab] for lab in distinct}
        else:
            mapping = {distinct[0]: 0.0, distinct[1]: 1.0}
        y = np.array([mapping[v] for v in raw_y])

    return Dataset(
        x=x,
        groups=groups,
        y=y,
        family=family,
        predictor_names=predictor_names,
        grouping_names=grouping_names,
        response_name=response_name,
        level_labels=tuple(level_labels),
    )


def load_csv(path, response_name: str, grouping_names, family: str) -> Dataset:
    """Load a Dataset from a CSV file.  See :func:`load_csv_text`."""
    if not os.path.exists(path):
        raise DataError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return load_csv_text(fh.read(), response_name, grouping_names, family)


def write_csv_text(dataset: Dataset) -> str:
    """Serialize a Dataset to CSV text; columns are predictors, groupings, response."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        list(dataset.predictor_names) + list(dataset.grouping_names) + [dataset.response_name]
    )
    bern = dataset.family == BERNOULLI
    for i in range(dataset.n_obs):
        row = [repr(float(v)) for v in dataset.x[i]]
        row += [dataset.level_labels[k][dataset.groups[i, k] - 1] for k in range(dataset.n_groupings)]
        yi = dataset.y[i]
        row.append(str(int(yi)) if bern else repr(float(yi)))
        writer.writerow(row)
    return buf.getvalue()


def write_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(write_csv_text(dataset))


def standardize(dataset: Dataset) -> tuple[EncodedDesign, StandardizationParams]:
    """Build the GP design: predictors to mean 0 / sd 1, group codes verbatim.

    Sample standard deviations use ddof=1.  A constant predictor column is
    rejected by name.
    """
    x = dataset.x
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1) if dataset.n_obs > 1 else np.zeros(dataset.n_predictors)
    for j, s in enumerate(stds):
        if not np.isfinite(s) or s <= 0.0:
            raise DataError(f"constant column {dataset.predictor_names[j]!r}")
    z = np.concatenate([(x - means) / stds, dataset.groups.astype(float)], axis=1)
    kinds = (NUMERICAL,) * dataset.n_predictors + (DUMMY,) * dataset.n_groupings
    return EncodedDesign(z=z, column_kinds=kinds), StandardizationParams(means=means, stds=stds)


def destandardize(z_numerical: np.ndarray, params: StandardizationParams) -> np.ndarray:
    """Invert :func:`standardize` on the numerical block."""
    return z_numerical * params.stds + params.means
