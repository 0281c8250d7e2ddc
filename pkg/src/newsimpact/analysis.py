"""Topic-exposure panels, OLS with full diagnostics, topic importance."""

from __future__ import annotations

import csv
import datetime as dt
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from newsimpact import corpus as corpus_mod
from newsimpact.corpus import Headline, ReturnSeries
from newsimpact.errors import InputError
from newsimpact.statfn import DistParams, cdf, inv_cdf

RANK_TOL = 1e-10
CONDITION_WARN = 1e8


@dataclass
class ExposurePanel:
    """Regression observations: binary topic dummies against aligned returns."""

    dates: list[dt.date]
    dummies: np.ndarray  # (n_obs, K) of 0/1
    target: np.ndarray  # (n_obs,)
    mode: str  # per_day | per_headline
    lag: int


@dataclass
class NormalityStats:
    skew: float
    kurtosis: float  # Pearson (non-excess); normal reference is 3
    jarque_bera: float
    jb_pvalue: float
    omnibus: float
    omnibus_pvalue: float


@dataclass
class RegressionResult:
    names: list[str]  # const first, then Topic_k
    coef: np.ndarray
    std_err: np.ndarray
    t_value: np.ndarray
    p_value: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    r2: float
    adj_r2: float
    f_stat: float
    f_pvalue: float
    durbin_watson: float
    jarque_bera: float
    jb_pvalue: float
    omnibus: float
    omnibus_pvalue: float
    skew: float
    kurtosis: float
    n_obs: int
    n_regressors: int  # topic dummies, excluding the constant
    condition_number: float
    residuals: np.ndarray


@dataclass
class ImportanceRanking:
    """(topic index, score) sorted descending; scores sum to 1."""

    entries: list[tuple[int, float]]


def build_exposures(
    headlines: list[Headline],
    labels,
    series: ReturnSeries,
    mode: str = "per_day",
    lag: int = 1,
    zero_fill: bool = True,
    n_topics: int | None = None,
) -> ExposurePanel:
    """Construct the dummy panel from clustered headlines and returns."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != len(headlines):
        raise InputError(f"{len(labels)} labels for {len(headlines)} headlines")
    if not headlines:
        raise InputError("empty headline corpus")
    if mode not in ("per_day", "per_headline"):
        raise InputError(f"unknown exposure mode {mode!r}")
    k = int(n_topics) if n_topics is not None else int(labels.max()) + 1
    if k <= 0:
        raise InputError("number of topics must be positive")
    if labels.min() < 0 or labels.max() >= k:
        raise InputError(f"topic labels must lie in [0, {k})")
    aligned = corpus_mod.align_dates(headlines, series, lag=lag, zero_fill=zero_fill)

    if mode == "per_day":
        by_date: dict[dt.date, set[int]] = {}
        for h, lab in zip(headlines, labels):
            by_date.setdefault(h.date, set()).add(int(lab))
        dates = sorted(d for d in by_date if d in aligned)
        dummies = np.zeros((len(dates), k), dtype=np.float64)
        target = np.empty(len(dates))
        for i, d in enumerate(dates):
            for lab in by_date[d]:
                dummies[i, lab] = 1.0
            target[i] = aligned[d]
    else:
        rows = [(h.date, int(lab)) for h, lab in zip(headlines, labels) if h.date in aligned]
        dates = [d for d, _ in rows]
        dummies = np.zeros((len(rows), k), dtype=np.float64)
        target = np.empty(len(rows))
        for i, (d, lab) in enumerate(rows):
            dummies[i, lab] = 1.0
            target[i] = aligned[d]
    return ExposurePanel(dates, dummies, target, mode, lag)


def durbin_watson(residuals) -> float:
    """Sum of squared successive differences over the residual sum of squares."""
    e = np.asarray(residuals, dtype=np.float64)
    if e.size < 2:
        raise InputError(f"Durbin-Watson needs at least 2 residuals, got {e.size}")
    denom = float(np.sum(e * e))
    if denom == 0.0:
        raise InputError("all residuals are zero")
    return float(np.sum(np.diff(e) ** 2)) / denom


def _skew_z(skew: float, n: int) -> float:
    # D'Agostino (1970) normalizing transform of the sample skewness.
    y = skew * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    y = y / alpha
    return delta * math.log(y + math.sqrt(y * y + 1.0))


def _kurtosis_z(kurt: float, n: int) -> float:
    # Anscombe-Glynn (1983) normalizing transform of the sample kurtosis.
    e = 3.0 * (n - 1.0) / (n + 1.0)
    var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    x = (kurt - e) / math.sqrt(var)
    sqrt_b1 = (
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / sqrt_b1 * (2.0 / sqrt_b1 + math.sqrt(1.0 + 4.0 / sqrt_b1**2))
    num = 1.0 - 2.0 / a
    den = 1.0 + x * math.sqrt(2.0 / (a - 4.0))
    term = np.sign(den) * abs(num / den) ** (1.0 / 3.0)
    return float((1.0 - 2.0 / (9.0 * a) - term) / math.sqrt(2.0 / (9.0 * a)))


def normality_tests(residuals) -> NormalityStats:
    """Moment-based residual normality diagnostics (JB and D'Agostino-Pearson)."""
    e = np.asarray(residuals, dtype=np.float64)
    n = e.size
    if n < 8:
        raise InputError(f"normality tests need n >= 8, got {n}")
    centered = e - e.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise InputError("zero residual variance")
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    skew = m3 / m2**1.5
    kurt = m4 / m2**2
    jb = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    chi2 = DistParams("chi_square", df1=2.0)
    jb_p = 1.0 - cdf(chi2, jb)
    omni = _skew_z(skew, n) ** 2 + _kurtosis_z(kurt, n) ** 2
    omni_p = 1.0 - cdf(chi2, omni)
    return NormalityStats(skew, kurt, jb, jb_p, omni, omni_p)


def _jb_small_sample(e: np.ndarray) -> tuple[float, float, float, float, float, float]:
    # Omnibus transforms are undefined below n = 8; report moments and JB only.
    centered = e - e.mean()
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        raise InputError("zero residual variance")
    skew = float(np.mean(centered**3)) / m2**1.5
    kurt = float(np.mean(centered**4)) / m2**2
    jb = e.size / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
    jb_p = 1.0 - cdf(DistParams("chi_square", df1=2.0), jb)
    return skew, kurt, jb, jb_p, math.nan, math.nan


def ols_fit(panel: ExposurePanel) -> RegressionResult:
    """OLS of target on [const | dummies] via QR, with the full diagnostic block."""
    y = np.asarray(panel.target, dtype=np.float64)
    dummies = np.asarray(panel.dummies, dtype=np.float64)
    n, k = dummies.shape
    if n <= k + 1:
        raise InputError(f"need more than K+1={k + 1} observations, got {n}")
    x = np.column_stack([np.ones(n), dummies])
    names = ["const"] + [f"Topic_{j}" for j in range(k)]

    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    bad = [names[j] for j in range(k + 1) if diag[j] < RANK_TOL * diag.max()]
    if bad:
        raise InputError(f"design matrix is rank deficient in column(s): {', '.join(bad)}")
    condition = float(np.linalg.cond(x))
    if condition > CONDITION_WARN:
        warnings.warn(
            f"design matrix condition number {condition:.3g} exceeds {CONDITION_WARN:.0e}",
            RuntimeWarning,
            stacklevel=2,
        )

    coef = np.linalg.solve(r, q.T @ y)
    resid = y - x @ coef
    df = n - k - 1
    sse = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    sigma2 = sse / df
    r_inv = np.linalg.solve(r, np.eye(k + 1))
    xtx_inv = r_inv @ r_inv.T
    std_err = np.sqrt(sigma2 * np.diag(xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_value = np.where(std_err > 0, coef / std_err, np.inf * np.sign(coef))
    tdist = DistParams("student_t", df1=float(df))
    p_value = np.array([2.0 * (1.0 - cdf(tdist, abs(t))) for t in t_value])
    t_crit = inv_cdf(tdist, 0.975)
    ci_low = coef - t_crit * std_err
    ci_high = coef + t_crit * std_err

    r2 = 1.0 - sse / sst if sst > 0 else 0.0
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / df
    if k == 0:
        f_stat, f_pvalue = math.nan, math.nan
    elif r2 >= 1.0:
        f_stat, f_pvalue = math.inf, 0.0
    else:
        f_stat = (r2 / k) / ((1.0 - r2) / df)
        # Cross-check against the sum-of-squares route.
        if sst > 0:
            f_ss = ((sst - sse) / k) / (sse / df)
            if abs(f_ss - f_stat) > 1e-10 * max(1.0, abs(f_stat)):
                raise AssertionError("F-statistic identity check failed")
        f_pvalue = 1.0 - cdf(DistParams("fisher_f", df1=float(k), df2=float(df)), f_stat)

    dw = durbin_watson(resid) if np.any(resid) else 0.0
    if not np.any(np.abs(resid) > 1e-14 * max(1.0, float(np.abs(y).max()))):
        # perfect fit: moment diagnostics are undefined
        skew = kurt = jb = jb_p = omni = omni_p = math.nan
    elif n >= 8:
        norm = normality_tests(resid)
        skew, kurt = norm.skew, norm.kurtosis
        jb, jb_p = norm.jarque_bera, norm.jb_pvalue
        omni, omni_p = norm.omnibus, norm.omnibus_pvalue
    else:
        skew, kurt, jb, jb_p, omni, omni_p = _jb_small_sample(resid)

    return RegressionResult(
        names=names,
        coef=coef,
        std_err=std_err,
        t_value=t_value,
        p_value=p_value,
        ci_low=ci_low,
        ci_high=ci_high,
        r2=r2,
        adj_r2=adj_r2,
        f_stat=f_stat,
        f_pvalue=f_pvalue,
        durbin_watson=dw,
        jarque_bera=jb,
        jb_pvalue=jb_p,
        omnibus=omni,
        omnibus_pvalue=omni_p,
        skew=skew,
        kurtosis=kurt,
        n_obs=n,
        n_regressors=k,
        condition_number=condition,
        residuals=resid,
    )


def topic_importance(coef) -> ImportanceRanking:
    """Normalize |coefficient| over the non-constant terms; sort descending."""
    coef = np.asarray(coef, dtype=np.float64)
    if coef.size < 2:
        raise InputError("need at least one topic coefficient beyond the constant")
    mags = np.abs(coef[1:])
    total = float(mags.sum())
    if total == 0.0:
        raise InputError("all topic coefficients are zero")
    scores = mags / total
    order = sorted(range(scores.size), key=lambda j: (-scores[j], j))
    return ImportanceRanking([(j, float(scores[j])) for j in order])


# ---------------------------------------------------------------------------
# Exports

TABLE_COLUMNS = (
    "Variable", "Coefficient", "Std. Error", "t-value", "P-value",
    "95% CI Lower", "95% CI Upper",
)


def regression_rows(result: RegressionResult) -> list[list[str]]:
    rows = []
    for i, name in enumerate(result.names):
        rows.append([
            name,
            f"{result.coef[i]:.6f}",
            f"{result.std_err[i]:.6f}",
            f"{result.t_value[i]:.3f}",
            f"{result.p_value[i]:.3f}",
            f"{result.ci_low[i]:.6f}",
            f"{result.ci_high[i]:.6f}",
        ])
    return rows


def diagnostics_footer(result: RegressionResult) -> list[tuple[str, str]]:
    return [
        ("R-squared", f"{result.r2:.6f}"),
        ("Adj. R-squared", f"{result.adj_r2:.6f}"),
        ("F-statistic", f"{result.f_stat:.6f}"),
        ("Prob (F-statistic)", f"{result.f_pvalue:.6f}"),
        ("Durbin-Watson", f"{result.durbin_watson:.6f}"),
        ("Jarque-Bera", f"{result.jarque_bera:.6f}"),
        ("Prob (Jarque-Bera)", f"{result.jb_pvalue:.6f}"),
        ("Omnibus", f"{result.omnibus:.6f}"),
        ("Prob (Omnibus)", f"{result.omnibus_pvalue:.6f}"),
        ("Skew", f"{result.skew:.6f}"),
        ("Kurtosis (Pearson)", f"{result.kurtosis:.6f}"),
        ("No. Observations", str(result.n_obs)),
    ]


def format_regression_table(result: RegressionResult) -> str:
    """Aligned text table mirroring the CSV export, plus a diagnostics footer."""
    rows = [list(TABLE_COLUMNS)] + regression_rows(result)
    widths = [max(len(row[j]) for row in rows) for j in range(len(TABLE_COLUMNS))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.rjust(w) if i else cell.ljust(w)
                               for i, (cell, w) in enumerate(zip(row, widths))))
    lines.insert(1, "-" * len(lines[0]))
    lines.append("")
    for label, value in diagnostics_footer(result):
        lines.append(f"{label + ':':<22}{value}")
    return "\n".join(lines) + "\n"


def write_regression_csv(result: RegressionResult, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TABLE_COLUMNS)
        writer.writerows(regression_rows(result))
        writer.writerow([])
        for label, value in diagnostics_footer(result):
            writer.writerow([label, value])


def write_importance_csv(ranking: ImportanceRanking, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Topic", "Importance Score"])
        for topic, score in ranking.entries:
            writer.writerow([f"Topic_{topic}", f"{score:.6f}"])
