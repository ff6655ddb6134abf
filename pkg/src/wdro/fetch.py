"""Download helper for the three benchmark datasets.

Files are normalised to comma-separated CSV with a header row and the row
counts are checked against the published sizes. The library itself never
touches the network; only the ``fetch-data`` CLI command calls this.
"""

from __future__ import annotations

import csv
import io
import urllib.request
from pathlib import Path

from .data import ADULT_COLUMNS, BOSTON_FEATURES, SCHEMAS, LoadReport, load_csv
from .exceptions import SchemaMismatch

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
SOURCES = {
    "wine": [f"{UCI}/wine-quality/winequality-red.csv"],
    "boston": [f"{UCI}/housing/housing.data"],
    "adult": [f"{UCI}/adult/adult.data", f"{UCI}/adult/adult.test"],
}
EXPECTED_ROWS = {"wine": 1599, "boston": 506, "adult": 48842}


def _download(url, opener):
    with opener(url) as resp:
        return resp.read().decode("utf-8")


def _to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def normalise(name, texts):
    """Turn the raw downloaded text(s) into header-first CSV text."""
    if name == "wine":
        rows = list(csv.reader(io.StringIO(texts[0]), delimiter=";"))
        return _to_csv([h.strip() for h in rows[0]], rows[1:])
    if name == "boston":
        rows = [line.split() for line in texts[0].splitlines() if line.strip()]
        return _to_csv(list(BOSTON_FEATURES) + ["medv"], rows)
    if name == "adult":
        rows = []
        for text in texts:
            for line in text.splitlines():
                if not line.strip() or line.startswith("|"):
                    continue
                rows.append([cell.strip() for cell in line.split(",")])
        return _to_csv([c for c, _ in ADULT_COLUMNS] + ["income"], rows)
    raise KeyError(name)


def fetch_dataset(name, dest_dir, opener=urllib.request.urlopen, urls=None) -> Path:
    """Download ``name`` into ``dest_dir/<name>.csv`` and verify its row count."""
    urls = SOURCES[name] if urls is None else urls
    texts = [_download(u, opener) for u in urls]
    dest = Path(dest_dir)
    dest.mkdir(parents=True, exist_ok=True)
    path = dest / f"{name}.csv"
    path.write_text(normalise(name, texts), encoding="utf-8")
    report = LoadReport(str(path))
    load_csv(path, SCHEMAS[name], report)
    if report.rows_read != EXPECTED_ROWS[name]:
        raise SchemaMismatch(
            f"{name}: downloaded {report.rows_read} rows, expected {EXPECTED_ROWS[name]}"
        )
    return path
