"""CSV ingestion of price series and option quotes, and run configuration."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from datetime import date

import numpy as np

from .errors import InvalidParameter, NonMonotoneDates, NonPositivePrice, ParseError
from .risk_neutral import OptionQuote

__all__ = [
    "PriceSeries",
    "QuoteRow",
    "RunConfig",
    "load_price_series",
    "log_returns",
    "load_option_quotes",
]


@dataclass(frozen=True)
class PriceSeries:
    """Strictly increasing dates with positive closing prices."""

    dates: tuple
    closes: np.ndarray

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != closes.size:
            raise InvalidParameter("dates and closes must have equal length")
        if closes.size < 2:
            raise InvalidParameter("need at least 2 observations")
        if np.any(closes <= 0):
            raise NonPositivePrice("closing prices must be positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise NonMonotoneDates("dates must be strictly increasing")


@dataclass(frozen=True)
class QuoteRow:
    """An option quote together with its trade date (used for weekly grouping)."""

    date: date
    quote: OptionQuote


@dataclass(frozen=True)
class RunConfig:
    """Flat key-value run configuration with documented defaults."""

    seed: int = 0
    replications: int = 5000
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    model: str = "both"
    dt: float = 1.0
    out: str | None = None

    @classmethod
    def from_mapping(cls, mapping) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise InvalidParameter(f"unknown config keys: {sorted(unknown)}")
        return cls(**mapping)


def _read_rows(path, expected_header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(f"expected header {','.join(expected_header)}", line=1)
        return list(reader)


def load_price_series(path) -> PriceSeries:
    """Parse a `date,close` CSV into a PriceSeries."""
    rows = _read_rows(path, ["date", "close"])
    dates, closes = [], []
    for i, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, got {len(row)}", line=i)
        try:
            d = date.fromisoformat(row[0].strip())
            c = float(row[1])
        except ValueError as exc:
            raise ParseError(str(exc), line=i) from exc
        if c <= 0 or not math.isfinite(c):
            raise NonPositivePrice(f"non-positive close {row[1]}", line=i)
        if dates and d <= dates[-1]:
            raise NonMonotoneDates(f"date {d} not after {dates[-1]}", line=i)
        dates.append(d)
        closes.append(c)
    return PriceSeries(tuple(dates), np.asarray(closes))


def log_returns(ps: PriceSeries) -> np.ndarray:
    """Per-row log returns log(close[i+1]/close[i]) in date order."""
    return np.diff(np.log(ps.closes))


def load_option_quotes(path) -> list[QuoteRow]:
    """Parse a `date,spot,rate,strike,maturity_days,mid_price` CSV."""
    rows = _read_rows(path, ["date", "spot", "rate", "strike", "maturity_days", "mid_price"])
    out = []
    for i, row in enumerate(rows, start=2):
        if len(row) != 6:
            raise ParseError(f"expected 6 fields, got {len(row)}", line=i)
        try:
            d = date.fromisoformat(row[0].strip())
            spot, rate, strike, maturity_days, mid = (float(v) for v in row[1:])
        except ValueError as exc:
            raise ParseError(str(exc), line=i) from exc
        try:
            quote = OptionQuote(
                strike=strike,
                maturity=maturity_days / 365.0,
                mid_price=mid,
                spot=spot,
                rate=rate,
            )
        except InvalidParameter as exc:
            raise ParseError(str(exc), line=i) from exc
        out.append(QuoteRow(d, quote))
    return out
