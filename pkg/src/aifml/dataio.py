"""Training-dataset ingestion, splitting, metrics, and bundled demo assets.

CSV dialect: comma separator, ``.`` decimal point, header row of variable
names, LF on write (CRLF tolerated on read).  Columns are matched to
system variables by exact name, in any order; extra columns are rejected.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .fml.model import FuzzySystem
from .fml.parser import parse_fml


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Dataset:
    columns: tuple[str, ...]
    values: np.ndarray  # shape (n_rows, n_cols)
    roles: tuple[str, ...]  # per column: "input" | "output"

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def take(self, indices: np.ndarray) -> "Dataset":
        return Dataset(self.columns, self.values[indices], self.roles)


def load_dataset(text: str, sys: FuzzySystem) -> Dataset:
    """Parse CSV text whose header names exactly the system's variables."""
    reader = csv.reader(io.StringIO(text))
    table = [row for row in reader if row]
    if not table:
        raise DatasetError("empty file")
    header = [h.strip() for h in table[0]]
    wanted = {v.name: v.role for v in sys.variables}
    for name in header:
        if name not in wanted:
            raise DatasetError(f"column {name!r} does not match any system variable")
    if len(set(header)) != len(header):
        raise DatasetError("duplicate column in header")
    for name in wanted:
        if name not in header:
            raise DatasetError(f"missing column for variable {name!r}")
    rows = []
    for r, row in enumerate(table[1:], start=1):
        if len(row) != len(header):
            raise DatasetError(f"row {r} has {len(row)} cells, expected {len(header)}")
        parsed = []
        for c, cell in enumerate(row):
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(f"non-numeric cell {cell!r} at row {r}, column {c + 1}") from None
            if not np.isfinite(value):
                raise DatasetError(f"non-finite cell at row {r}, column {c + 1}")
            parsed.append(value)
        rows.append(parsed)
    if not rows:
        raise DatasetError("no data rows")
    return Dataset(tuple(header), np.array(rows), tuple(wanted[h] for h in header))


def save_dataset(data: Dataset) -> str:
    """Serialize to CSV with shortest round-trip number formatting."""
    lines = [",".join(data.columns)]
    for row in data.values:
        lines.append(",".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def split(data: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle then exact partition into (train, test)."""
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError("train_fraction must lie in (0, 1)")
    if data.n_rows < 2:
        raise DatasetError("need at least 2 rows to split")
    n_train = round(train_fraction * data.n_rows)
    if n_train == 0:
        raise DatasetError("split produces an empty training set")
    if n_train == data.n_rows:
        raise DatasetError("split produces an empty test set")
    order = np.random.default_rng(seed).permutation(data.n_rows)
    return data.take(order[:n_train]), data.take(order[n_train:])


def rmse(sys: FuzzySystem, data: Dataset) -> float:
    from .pso import fitness_mse
    return float(np.sqrt(fitness_mse(sys, data)))


# ---------------------------------------------------------------------------
# Bundled demo: intelligent air conditioner
#
# Inputs temp [0,40] °C (cold/comfortable/hot) and humidity [0,100] %
# (dry/normal/humid); output ac_level [0,10] (low/medium/high); 9 rules,
# MIN/MAX/MIN/COG.  The 50-row training set is drawn from the closed-form
# target below plus seeded gaussian noise — a stand-in with documented
# provenance, not measured data.

DEMO_DATASET_SEED = 20210706
DEMO_DATASET_ROWS = 50
DEMO_NOISE_SIGMA = 0.15


def demo_target(temp, humidity):
    """Closed-form cooling demand the demo dataset is generated from."""
    return np.clip(0.35 * (np.asarray(temp, float) - 16.0)
                   + 0.03 * (np.asarray(humidity, float) - 30.0), 0.0, 10.0)


def demo_system() -> FuzzySystem:
    text = resources.files("aifml.assets").joinpath("air_conditioner.fml").read_text("utf-8")
    return parse_fml(text)


def demo_dataset() -> Dataset:
    text = resources.files("aifml.assets").joinpath("air_conditioner_train.csv").read_text("utf-8")
    return load_dataset(text, demo_system())


def generate_demo_dataset(n_rows: int = DEMO_DATASET_ROWS,
                          seed: int = DEMO_DATASET_SEED) -> Dataset:
    """Regenerate the bundled dataset (used once to produce the shipped CSV)."""
    rng = np.random.default_rng(seed)
    temp = rng.uniform(5.0, 40.0, n_rows)
    humidity = rng.uniform(20.0, 95.0, n_rows)
    ac = np.clip(demo_target(temp, humidity) + rng.normal(0.0, DEMO_NOISE_SIGMA, n_rows),
                 0.0, 10.0)
    values = np.column_stack([temp, humidity, ac])
    return Dataset(("temp", "humidity", "ac_level"), values, ("input", "input", "output"))
