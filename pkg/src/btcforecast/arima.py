"""ARIMA(p, d, q) estimation and rolling one-step forecasting.

Estimation: d-th differences, then OLS for pure AR models (q = 0) or
conditional sum-of-squares Gauss-Newton (innovations start at zero) for
q > 0, seeded from the AR-only OLS solution. Forecasts are one-step-ahead
in differenced space and integrated back against the retained series tail.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import train_test_counts

REFIT_ALWAYS = "always"
REFIT_ONCE = "once"

_GN_MAX_ITER = 200
_GN_TOL = 1e-10


class ArimaFitError(RuntimeError):
    """Estimation failed (non-convergence or unusable input)."""


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("orders must be >= 0")
        if self.p + self.q < 1 and self.d < 1:
            raise ValueError("degenerate (0,0,0) model")

    @classmethod
    def parse(cls, text: str) -> "ArimaOrder":
        """Parse a "p,d,q" string."""
        parts = [int(x) for x in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected p,d,q, got {text!r}")
        return cls(*parts)

    def __str__(self) -> str:
        return f"({self.p},{self.d},{self.q})"


@dataclass
class ArimaModel:
    """Fitted coefficients plus the history tail forecasting needs."""

    order: ArimaOrder
    intercept: float
    ar_coeffs: np.ndarray
    ma_coeffs: np.ndarray
    sigma2: float
    diff_tail: np.ndarray = field(repr=False)     # trailing values of the differenced series
    resid_tail: np.ndarray = field(repr=False)    # trailing q residuals
    level_tails: np.ndarray = field(repr=False)   # last value of each differencing level 0..d-1

    def ar_root_moduli(self) -> np.ndarray:
        """Moduli of the AR characteristic roots (stationary iff all > 1)."""
        if self.order.p == 0:
            return np.array([])
        poly = np.concatenate([[1.0], -self.ar_coeffs])
        return np.sort(np.abs(np.roots(poly[::-1])))

    def ma_root_moduli(self) -> np.ndarray:
        """Moduli of the MA characteristic roots (invertible iff all > 1)."""
        if self.order.q == 0:
            return np.array([])
        poly = np.concatenate([[1.0], self.ma_coeffs])
        return np.sort(np.abs(np.roots(poly[::-1])))

    def summary(self) -> str:
        lines = [
            f"ARIMA{self.order}",
            f"intercept: {self.intercept:.6g}",
            f"sigma2: {self.sigma2:.6g}",
        ]
        if self.order.p:
            lines.append("ar: " + " ".join(f"{v:.6g}" for v in self.ar_coeffs))
            lines.append(
                "ar root moduli: " + " ".join(f"{v:.4g}" for v in self.ar_root_moduli())
            )
        if self.order.q:
            lines.append("ma: " + " ".join(f"{v:.6g}" for v in self.ma_coeffs))
            lines.append(
                "ma root moduli: " + " ".join(f"{v:.4g}" for v in self.ma_root_moduli())
            )
        return "\n".join(lines)

    def with_observation(self, y_new: float) -> "ArimaModel":
        """Append one true observation to the history tail without refitting."""
        levels = list(self.level_tails)
        value = float(y_new)
        new_levels = []
        for j in range(self.order.d):
            new_levels.append(value)
            value = value - levels[j]
        w_new = value  # d-th difference of the appended observation
        pred = _one_step_diff(self)
        diff_tail = np.append(self.diff_tail, w_new)
        keep = max(self.order.p, 1)
        resid_tail = self.resid_tail
        if self.order.q:
            resid_tail = np.append(resid_tail, w_new - pred)[-self.order.q :]
        return ArimaModel(
            order=self.order,
            intercept=self.intercept,
            ar_coeffs=self.ar_coeffs,
            ma_coeffs=self.ma_coeffs,
            sigma2=self.sigma2,
            diff_tail=diff_tail[-keep:],
            resid_tail=resid_tail,
            level_tails=np.array(new_levels),
        )


def difference(series: np.ndarray, d: int) -> np.ndarray:
    """Apply first differences d times."""
    series = np.asarray(series, dtype=np.float64)
    if len(series) <= d:
        raise ValueError(f"series of length {len(series)} too short for d={d}")
    for _ in range(d):
        series = np.diff(series)
    return series


def difference_with_seeds(series: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Difference d times, also returning the d seed values (the first element
    of each intermediate level) that undifference needs."""
    series = np.asarray(series, dtype=np.float64)
    if len(series) <= d:
        raise ValueError(f"series of length {len(series)} too short for d={d}")
    seeds = []
    for _ in range(d):
        seeds.append(series[0])
        series = np.diff(series)
    return series, np.array(seeds)


def _compensated_cumsum(values: np.ndarray) -> np.ndarray:
    """Kahan running sums: keeps iterated integration error at ~eps instead
    of letting it accumulate with series length."""
    out = np.empty(len(values))
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        y = float(v) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[i] = total
    return out


def undifference(diffs: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Exact inverse of difference_with_seeds."""
    x = np.asarray(diffs, dtype=np.float64)
    for seed in np.asarray(seeds, dtype=np.float64)[::-1]:
        x = np.concatenate([[seed], seed + _compensated_cumsum(x)])
    return x


def _css_residuals(w: np.ndarray, c: float, ar: np.ndarray, ma: np.ndarray) -> np.ndarray:
    """Innovations for t = p..n-1, with pre-sample innovations fixed at zero."""
    p, q = len(ar), len(ma)
    n = len(w)
    eps = np.zeros(n)
    for t in range(p, n):
        pred = c
        for i in range(p):
            pred += ar[i] * w[t - 1 - i]
        for j in range(q):
            if t - 1 - j >= p:
                pred += ma[j] * eps[t - 1 - j]
        eps[t] = w[t] - pred
    return eps[p:]


def _css_jacobian(
    w: np.ndarray, c: float, ar: np.ndarray, ma: np.ndarray, include_intercept: bool
) -> np.ndarray:
    """d eps / d beta via the standard recursions, beta = [c?, ar, ma]."""
    p, q = len(ar), len(ma)
    n = len(w)
    k = (1 if include_intercept else 0) + p + q
    eps = np.zeros(n)
    deps = np.zeros((n, k))
    for t in range(p, n):
        pred = c
        row = np.zeros(k)
        col = 0
        if include_intercept:
            row[col] = -1.0
            col += 1
        for i in range(p):
            row[col + i] = -w[t - 1 - i]
            pred += ar[i] * w[t - 1 - i]
        col += p
        for j in range(q):
            if t - 1 - j >= p:
                pred += ma[j] * eps[t - 1 - j]
                row[col + j] = -eps[t - 1 - j]
                row -= ma[j] * deps[t - 1 - j]
        eps[t] = w[t] - pred
        deps[t] = row
    return deps[p:]


def _fit_ar_ols(
    w: np.ndarray, p: int, include_intercept: bool
) -> tuple[float, np.ndarray, np.ndarray]:
    """OLS regression of w_t on its p lags (plus intercept). Returns
    (intercept, ar_coeffs, residuals)."""
    n = len(w)
    if p == 0:
        c = float(np.mean(w)) if include_intercept else 0.0
        return c, np.array([]), w - c
    y = w[p:]
    lags = np.column_stack([w[p - 1 - i : n - 1 - i] for i in range(p)])
    X = np.column_stack([np.ones(len(y)), lags]) if include_intercept else lags
    if np.ptp(w) == 0.0:
        warnings.warn("constant differenced series; falling back to intercept-only fit")
        c = float(np.mean(w)) if include_intercept else 0.0
        return c, np.zeros(p), y - c
    # lstsq returns the minimum-norm solution, which stays well-defined on
    # rank-deficient lag designs (e.g. noiseless periodic series)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    if include_intercept:
        return float(beta[0]), beta[1:], y - X @ beta
    return 0.0, beta, y - X @ beta


def fit(series: np.ndarray, order: ArimaOrder, include_intercept: bool = True) -> ArimaModel:
    """Estimate an ARIMA model on the given series."""
    series = np.asarray(series, dtype=np.float64)
    p, d, q = order.p, order.d, order.q
    if len(series) <= d + p + q + 1:
        raise ValueError(f"series of length {len(series)} too short for order {order}")

    w, _ = difference_with_seeds(series, d) if d else (series.copy(), np.array([]))
    c, ar, resid = _fit_ar_ols(w, p, include_intercept)
    ma = np.zeros(q)

    if q > 0:
        c, ar, ma, resid = _fit_css_gauss_newton(w, c, ar, q, include_intercept)

    sigma2 = float(np.mean(resid**2)) if len(resid) else 0.0
    level_tails = np.array([difference(series, j)[-1] if j else series[-1] for j in range(d)])
    keep = max(p, 1)
    return ArimaModel(
        order=order,
        intercept=c,
        ar_coeffs=ar,
        ma_coeffs=ma,
        sigma2=sigma2,
        diff_tail=w[-keep:].copy(),
        resid_tail=resid[-q:].copy() if q else np.array([]),
        level_tails=level_tails,
    )


def _fit_css_gauss_newton(
    w: np.ndarray, c0: float, ar0: np.ndarray, q: int, include_intercept: bool
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Minimize the conditional sum of squared innovations over (c, ar, ma),
    Gauss-Newton with step halving, starting from the AR-only solution."""
    p = len(ar0)
    c, ar, ma = c0, ar0.copy(), np.zeros(q)
    eps = _css_residuals(w, c, ar, ma)
    sse = float(eps @ eps)
    for _ in range(_GN_MAX_ITER):
        J = _css_jacobian(w, c, ar, ma, include_intercept)
        step, *_ = np.linalg.lstsq(J, -eps, rcond=None)
        base = np.concatenate([[c] if include_intercept else [], ar, ma])
        scale = 1.0
        for _halving in range(30):
            beta = base + scale * step
            col = 0
            if include_intercept:
                c_new, col = float(beta[0]), 1
            else:
                c_new = 0.0
            ar_new = beta[col : col + p]
            ma_new = beta[col + p :]
            eps_new = _css_residuals(w, c_new, ar_new, ma_new)
            sse_new = float(eps_new @ eps_new)
            if sse_new <= sse:
                break
            scale *= 0.5
        else:
            # no improving step exists: we are at the (local) CSS minimum
            return c, ar, ma, eps
        improved = sse - sse_new
        c, ar, ma, eps, sse = c_new, ar_new, ma_new, eps_new, sse_new
        if improved <= _GN_TOL * max(sse, 1.0):
            return c, ar, ma, eps
    raise ArimaFitError(f"no convergence after {_GN_MAX_ITER} iterations; last objective {sse:.6g}")


def _one_step_diff(model: ArimaModel) -> float:
    """One-step forecast in differenced space."""
    pred = model.intercept
    for i in range(model.order.p):
        pred += model.ar_coeffs[i] * model.diff_tail[-1 - i]
    for j in range(model.order.q):
        if j < len(model.resid_tail):
            pred += model.ma_coeffs[j] * model.resid_tail[-1 - j]
    return float(pred)


def forecast_one(model: ArimaModel) -> float:
    """Next value in original units: forecast the d-th difference, then
    integrate against the retained level tails."""
    pred = _one_step_diff(model)
    for level in model.level_tails[::-1]:
        pred += level
    return float(pred)


def rolling_forecast(
    series: np.ndarray,
    order: ArimaOrder,
    train_fraction: float = 0.7,
    include_intercept: bool = True,
    refit: str = REFIT_ALWAYS,
) -> np.ndarray:
    """Static one-step forecasts over the test range: fit on the training
    prefix, then forecast / append the true value / refit, per test point."""
    if refit not in (REFIT_ALWAYS, REFIT_ONCE):
        raise ValueError(f"refit must be '{REFIT_ALWAYS}' or '{REFIT_ONCE}'")
    series = np.asarray(series, dtype=np.float64)
    n = len(series)
    n_train, n_test = train_test_counts(n, train_fraction)
    if n_test < 1:
        raise ValueError("no test range")

    def _fit_prefix(end: int) -> ArimaModel:
        try:
            return fit(series[:end], order, include_intercept)
        except (ValueError, ArimaFitError) as e:
            raise ArimaFitError(f"fit failed at index {end}: {e}") from e

    model = _fit_prefix(n_train)
    preds = np.empty(n_test)
    for k, i in enumerate(range(n_train, n)):
        preds[k] = forecast_one(model)
        if i + 1 < n:
            if refit == REFIT_ALWAYS:
                model = _fit_prefix(i + 1)
            else:
                model = model.with_observation(series[i])
    return preds
