"""Synthetic fixture corpus with a known topic-return signal.

Generates a prices CSV and a news CSV where headlines from one topic's
vocabulary are followed by a next-day return boost. Used by the test
suite and handy for demo runs.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

TOPIC_VOCABS = (
    # boosted topic: product-launch language
    ("launch", "unveil", "iphone", "chip", "upgrade", "flagship", "debut",
     "release", "hardware", "silicon", "device", "keynote", "processor",
     "camera", "display", "battery", "sensor", "foldable", "wearable", "headset"),
    # litigation / regulation language
    ("lawsuit", "antitrust", "regulator", "probe", "fine", "appeal", "ruling",
     "settlement", "compliance", "subpoena", "injunction", "litigation",
     "monopoly", "commission", "hearing", "verdict", "plaintiff", "statute",
     "tribunal", "sanction"),
    # earnings / markets language
    ("earnings", "revenue", "quarter", "guidance", "dividend", "buyback",
     "margin", "forecast", "analyst", "estimate", "profit", "shareholder",
     "outlook", "valuation", "consensus", "downgrade", "target", "yield",
     "income", "fiscal"),
)

BOOST_TOPIC = 0


@dataclass
class FixtureSpec:
    n_days: int = 120
    n_headlines: int = 200
    boost: float = 0.005
    noise_sigma: float = 0.002
    presence_prob: float = 0.45
    start: dt.date = dt.date(2021, 1, 4)
    seed: int = 42


def trading_days(start: dt.date, n: int) -> list[dt.date]:
    """n consecutive weekdays starting at start."""
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def generate(spec: FixtureSpec = FixtureSpec()):
    """Return (price rows, news rows, true topic per headline) as plain lists."""
    rng = np.random.default_rng(spec.seed)
    days = trading_days(spec.start, spec.n_days)
    n_topics = len(TOPIC_VOCABS)

    # Which topics appear on which days; headlines only on days 0..n-2 so
    # the lag-1 target always exists.
    headlines: list[tuple[dt.date, str, int]] = []
    boosted_days: set[int] = set()
    while len(headlines) < spec.n_headlines:
        di = int(rng.integers(0, spec.n_days - 1))
        topic = int(rng.integers(n_topics))
        if rng.random() > spec.presence_prob:
            continue
        vocab = TOPIC_VOCABS[topic]
        words = rng.choice(len(vocab), size=6, replace=True)
        title = " ".join(vocab[w] for w in words).capitalize()
        headlines.append((days[di], title, topic))
        if topic == BOOST_TOPIC:
            boosted_days.add(di)

    returns = rng.normal(0.0, spec.noise_sigma, size=spec.n_days)
    for di in boosted_days:
        returns[di + 1] += spec.boost

    closes = 100.0 * np.cumprod(1.0 + returns)
    price_rows = []
    for d, close in zip(days, closes):
        spread = abs(close) * 0.01
        price_rows.append((d, close - spread / 2, close + spread, close - spread,
                           close, 1_000_000))
    headlines.sort(key=lambda r: r[0])
    news_rows = [(d, title) for d, title, _ in headlines]
    true_topics = [t for _, _, t in headlines]
    return price_rows, news_rows, true_topics


def write_fixture(out_dir: str | Path, spec: FixtureSpec = FixtureSpec()):
    """Write prices.csv and news.csv into out_dir; returns their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    price_rows, news_rows, true_topics = generate(spec)
    prices_path = out_dir / "prices.csv"
    news_path = out_dir / "news.csv"
    with prices_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Date", "Open", "High", "Low", "Close", "Volume"])
        for d, o, h, lo, c, v in price_rows:
            writer.writerow([d.isoformat(), f"{o:.6f}", f"{h:.6f}", f"{lo:.6f}",
                             f"{c:.6f}", v])
    with news_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "title"])
        for d, title in news_rows:
            writer.writerow([d.isoformat(), title])
    return prices_path, news_path, true_topics
