import datetime as dt

import pytest

from newsimpact.corpus import Headline, PriceBar


def make_headlines(titles, dates=None):
    if dates is None:
        dates = [dt.date(2024, 5, 8)] * len(titles)
    return [Headline(i, d, t) for i, (d, t) in enumerate(zip(dates, titles))]


def make_bar(date, close, volume=1000):
    return PriceBar(date, close, close * 1.01, close * 0.99, close, volume)


@pytest.fixture
def table1_prices_csv(tmp_path):
    """The five 2016 sample rows from the bundled docs."""
    path = tmp_path / "prices.csv"
    path.write_text(
        "Date,Open,High,Low,Close,Volume\n"
        "2016-02-19,21.783560,21.956014,21.738178,21.792637,141496800\n"
        "2016-02-22,21.853912,21.987791,21.765416,21.983252,137123200\n"
        "2016-02-23,21.874336,21.897027,21.454549,21.486317,127770400\n"
        "2016-02-24,21.325205,21.869792,21.175442,21.806257,145022800\n"
        "2016-02-25,21.794913,21.956020,21.613383,21.956020,110330800\n"
    )
    return path


@pytest.fixture
def news_csv(tmp_path):
    path = tmp_path / "news.csv"
    path.write_text(
        "date,title\n"
        "2024-05-08,Judge grills Apple exec about the app store\n"
        "2024-05-08,Unionized store to vote on potential strike\n"
        "2024-05-08,Music streaming firms urge the commission\n"
        "2024-05-08,The 3 Best Metaverse Stocks to Buy in May 2024\n"
        "2024-05-08,iPad event was an AI teaser for the future\n"
    )
    return path
