"""Time-series container and CSV / model-JSON input-output."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import IrregularSpacing, ParseError
from .kernels import OUModel

# Relative tolerance on timestamp spacing for two-column input.
SPACING_RTOL = 1e-9


@dataclass(frozen=True)
class TimeSeriesSample:
    """Equally spaced observations with spacing tau and origin t0.

    ``mean_policy`` controls how the mean is handled by estimators:
    "sample" (subtract the sample mean), "zero" (use the data as-is), or a
    float literal (subtract that value).
    """

    values: np.ndarray
    tau: float = 1.0
    t0: float = 0.0
    mean_policy: str = "sample"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise ValueError("need a 1-d series of length >= 2")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.tau * np.arange(len(self.values))

    def mean_value(self) -> float:
        """The mean implied by the mean policy."""
        if self.mean_policy == "sample":
            return float(np.mean(self.values))
        if self.mean_policy == "zero":
            return 0.0
        try:
            return float(self.mean_policy)
        except (TypeError, ValueError):
            raise ValueError(f"bad mean policy {self.mean_policy!r}")

    def centered(self) -> np.ndarray:
        return self.values - self.mean_value()

    def with_policy(self, mean_policy) -> "TimeSeriesSample":
        return TimeSeriesSample(self.values, self.tau, self.t0,
                                str(mean_policy))


def _looks_numeric(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def ingest_csv(path, mean_policy="sample") -> TimeSeriesSample:
    """Read a series from CSV: one column (value) or two (t, value).

    An optional header row is skipped.  Two-column input must be equally
    spaced to within SPACING_RTOL (relative), otherwise IrregularSpacing.
    """
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            row = [c.strip() for c in row if c.strip() != ""]
            if not row:
                continue
            if lineno == 1 and not all(_looks_numeric(c) for c in row):
                continue  # header
            if not all(_looks_numeric(c) for c in row):
                raise ParseError(f"{path}: non-numeric data on line {lineno}: "
                                 f"{row}", line=lineno)
            if len(row) not in (1, 2):
                raise ParseError(f"{path}: expected 1 or 2 columns on line "
                                 f"{lineno}, got {len(row)}", line=lineno)
            rows.append([float(c) for c in row])
    if len(rows) < 2:
        raise ParseError(f"{path}: need at least 2 data rows, got {len(rows)}")
    ncols = {len(r) for r in rows}
    if len(ncols) != 1:
        raise ParseError(f"{path}: inconsistent column counts {sorted(ncols)}")
    data = np.asarray(rows, dtype=float)
    if data.shape[1] == 1:
        return TimeSeriesSample(values=data[:, 0], tau=1.0, t0=0.0,
                                mean_policy=mean_policy)
    t, x = data[:, 0], data[:, 1]
    steps = np.diff(t)
    tau = float(np.mean(steps))
    if tau <= 0 or np.max(np.abs(steps - tau)) > SPACING_RTOL * max(abs(tau), 1e-300):
        raise IrregularSpacing(
            f"{path}: timestamps are not equally spaced "
            f"(max deviation {np.max(np.abs(steps - tau)):g} from tau={tau:g})")
    return TimeSeriesSample(values=x, tau=tau, t0=float(t[0]),
                            mean_policy=mean_policy)


def write_series_csv(path, sample: TimeSeriesSample):
    """Write `t,value` CSV with full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "value"])
        for t, v in zip(sample.times, sample.values):
            w.writerow([f"{t:.17g}", f"{v:.17g}"])


def write_table_csv(path, header, columns):
    """Write aligned columns (full precision) under ``header``."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([f"{v:.17g}" for v in row])


def load_model(path) -> OUModel:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid model JSON: {e}") from e
    return OUModel.from_dict(doc)


def save_model(path, model: OUModel):
    with open(path, "w") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")
