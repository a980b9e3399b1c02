"""Daily bike-rental case-study data: preparation and discovery.

The raw UCI daily file (``day.csv``) carries more columns than the case
study uses.  :func:`prepare_day_csv` reduces it to three numerical
predictors, five grouping variables, and the daily-count response, renaming
columns to the names the assessment reports:

    cnt -> dailyuses, temp -> temperature, hum -> humidity,
    windspeed -> windspeed, mnth -> month, weekday -> day_of_week,
    season -> season, weathersit -> weather, holiday -> holiday

The prepared CSV is located through the HETSCAN_BIKE_CSV environment
variable or a ``data/bike_day.csv`` file under the working directory.
"""

from __future__ import annotations

import csv
import io
import os

from .data import GAUSSIAN, DataError, Dataset, load_csv

ENV_VAR = "HETSCAN_BIKE_CSV"
DEFAULT_PATH = os.path.join("data", "bike_day.csv")

COLUMN_MAP = {
    "cnt": "dailyuses",
    "temp": "temperature",
    "hum": "humidity",
    "windspeed": "windspeed",
    "mnth": "month",
    "weekday": "day_of_week",
    "season": "season",
    "weathersit": "weather",
    "holiday": "holiday",
}

RESPONSE = "dailyuses"
PREDICTORS = ("temperature", "humidity", "windspeed")
GROUPINGS = ("month", "day_of_week", "season", "weather", "holiday")


def prepare_day_csv_text(raw_text: str) -> str:
    """Reduce raw day.csv text to the case-study schema."""
    reader = csv.reader(io.StringIO(raw_text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty bike CSV") from None
    missing = [c for c in COLUMN_MAP if c not in header]
    if missing:
        raise DataError(f"bike CSV lacks expected columns: {', '.join(missing)}")
    keep = [(header.index(src), dst) for src, dst in COLUMN_MAP.items()]

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([dst for _, dst in keep])
    for row in reader:
        if not row or (len(row) == 1 and row[0].strip() == ""):
            continue
        writer.writerow([row[idx].strip() for idx, _ in keep])
    return out.getvalue()


def prepare_day_csv(src_path, dest_path) -> None:
    """Read raw day.csv and write the reduced case-study CSV."""
    with open(src_path, "r", encoding="utf-8", newline="") as fh:
        prepared = prepare_day_csv_text(fh.read())
    with open(dest_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(prepared)


def locate_bike_csv() -> str | None:
    """Path of the prepared case-study CSV, if discoverable."""
    candidate = os.environ.get(ENV_VAR, "").strip()
    if candidate:
        return candidate if os.path.exists(candidate) else None
    return DEFAULT_PATH if os.path.exists(DEFAULT_PATH) else None


def load_bike_dataset(path) -> Dataset:
    """Load the prepared CSV with the case-study schema."""
    return load_csv(path, RESPONSE, GROUPINGS, GAUSSIAN)
