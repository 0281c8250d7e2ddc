"""CSV ingestion of prices and headlines, daily returns, and date alignment."""

from __future__ import annotations

import csv
import datetime as dt
import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path

from newsimpact.errors import InputError

log = logging.getLogger(__name__)

PRICE_COLUMNS = ("date", "open", "high", "low", "close", "volume")


@dataclass(frozen=True)
class PriceBar:
    date: dt.date
    open: float
    high: float
    low: float
    close: float
    volume: int


@dataclass(frozen=True)
class Headline:
    id: int
    date: dt.date
    title: str


@dataclass(frozen=True)
class ReturnSeries:
    """Daily simple returns, each dated by the later of the two closes."""

    dates: tuple[dt.date, ...]
    returns: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.returns):
            raise InputError("dates and returns must have equal length")

    def __len__(self) -> int:
        return len(self.dates)


def _parse_date(raw: str, path: Path, lineno: int) -> dt.date:
    try:
        return dt.date.fromisoformat(raw.strip())
    except ValueError:
        raise InputError(
            f"{path}:{lineno}: unparsable date {raw!r} (expected YYYY-MM-DD)"
        ) from None


def _header_map(fieldnames, required: tuple[str, ...], path: Path) -> dict[str, str]:
    """Map lowercase required column names to the actual header spellings."""
    if fieldnames is None:
        raise InputError(f"{path}: file has no header row")
    lowered = {name.strip().lower(): name for name in fieldnames if name}
    missing = [col for col in required if col not in lowered]
    if missing:
        raise InputError(f"{path}: header is missing column(s) {', '.join(missing)}")
    return {col: lowered[col] for col in required}


def load_prices(path: str | Path) -> list[PriceBar]:
    """Load OHLCV bars from CSV, sorted ascending by date.

    Rejects duplicate dates, non-positive closes, prices outside the
    low/high envelope, and anything that fails to parse.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"prices file not found: {path}")
    bars: list[PriceBar] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = _header_map(reader.fieldnames, PRICE_COLUMNS, path)
        for row in reader:
            lineno = reader.line_num
            date = _parse_date(row[cols["date"]], path, lineno)
            try:
                o = float(row[cols["open"]])
                h = float(row[cols["high"]])
                lo = float(row[cols["low"]])
                c = float(row[cols["close"]])
                vol = int(float(row[cols["volume"]]))
            except (TypeError, ValueError):
                raise InputError(f"{path}:{lineno}: malformed row (non-numeric field)") from None
            if c <= 0:
                raise InputError(f"{path}:{lineno}: non-positive close {c}")
            if not (lo <= o <= h and lo <= c <= h):
                raise InputError(f"{path}:{lineno}: open/close outside low/high range")
            if vol < 0:
                raise InputError(f"{path}:{lineno}: negative volume {vol}")
            bars.append(PriceBar(date, o, h, lo, c, vol))
    bars.sort(key=lambda b: b.date)
    for prev, cur in zip(bars, bars[1:]):
        if prev.date == cur.date:
            raise InputError(f"{path}: duplicate date {cur.date}")
    return bars


def save_prices(bars: list[PriceBar], path: str | Path) -> None:
    """Write bars back to the ingestion CSV schema (round-trips load_prices)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Date", "Open", "High", "Low", "Close", "Volume"])
        for b in bars:
            writer.writerow([b.date.isoformat(), repr(b.open), repr(b.high),
                             repr(b.low), repr(b.close), b.volume])


def load_headlines(path: str | Path) -> list[Headline]:
    """Load headlines from CSV with columns date,title (extra columns ignored).

    Rows whose title is empty after trimming are skipped; the count is
    logged as a single warning. Ids are 0-based positions among kept rows.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"headlines file not found: {path}")
    headlines: list[Headline] = []
    skipped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = _header_map(reader.fieldnames, ("date", "title"), path)
        for row in reader:
            title = (row[cols["title"]] or "").strip()
            if not title:
                skipped += 1
                continue
            date = _parse_date(row[cols["date"]], path, reader.line_num)
            headlines.append(Headline(len(headlines), date, title))
    if skipped:
        log.warning("skipped %d empty-title row(s) in %s", skipped, path)
    return headlines


def compute_returns(bars: list[PriceBar]) -> ReturnSeries:
    """Simple returns close[i]/close[i-1] - 1, dated by the later bar."""
    if len(bars) < 2:
        raise InputError(f"need at least 2 price bars to compute returns, got {len(bars)}")
    dates = tuple(b.date for b in bars[1:])
    returns = tuple(b.close / prev.close - 1.0 for prev, b in zip(bars, bars[1:]))
    return ReturnSeries(dates, returns)


def align_dates(
    headlines: list[Headline],
    series: ReturnSeries,
    lag: int = 1,
    zero_fill: bool = True,
) -> dict[dt.date, float]:
    """Map each distinct headline date to its target return.

    lag=0 targets the first trading date on or after the headline date;
    lag=1 targets the first trading date strictly after it. Dates with no
    target are mapped to 0.0 when zero_fill is on, otherwise omitted.
    """
    if lag not in (0, 1):
        raise InputError(f"lag must be 0 or 1, got {lag}")
    if not series.dates:
        raise InputError("return series is empty")
    trading = series.dates
    out: dict[dt.date, float] = {}
    for d in {h.date for h in headlines}:
        idx = bisect_left(trading, d) if lag == 0 else bisect_right(trading, d)
        if idx < len(trading):
            out[d] = series.returns[idx]
        elif zero_fill:
            out[d] = 0.0
    return out
