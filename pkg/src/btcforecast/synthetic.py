"""Deterministic synthetic series for fixtures, demos, and verification."""

from __future__ import annotations

import numpy as np

from .dataset import MergedSeries

DAY = 86400


def sine_series(
    n: int = 700,
    period: float = 40.0,
    amplitude: float = 1500.0,
    base: float = 8000.0,
    bucket: int = DAY,
) -> MergedSeries:
    """Noiseless sine-shaped price series with zero sentiment."""
    i = np.arange(n)
    price = base + amplitude * np.sin(2.0 * np.pi * i / period)
    time = (i + 1) * bucket
    return MergedSeries(time, price, np.zeros(n))


def random_walk(n: int, sigma: float = 1.0, seed: int = 0, start: float = 0.0) -> np.ndarray:
    """Gaussian random walk with innovation standard deviation sigma."""
    rng = np.random.default_rng(seed)
    steps = rng.normal(0.0, sigma, size=n - 1)
    return np.concatenate([[start], start + np.cumsum(steps)])


def ar_process(
    phis,
    n: int,
    sigma: float = 1.0,
    seed: int = 0,
    c: float = 0.0,
    burn_in: int = 200,
) -> np.ndarray:
    """Simulate an AR(p) process y_t = c + sum(phi_i * y_{t-i}) + eps_t."""
    phis = np.asarray(phis, dtype=np.float64)
    p = len(phis)
    rng = np.random.default_rng(seed)
    total = n + burn_in
    eps = rng.normal(0.0, sigma, size=total)
    y = np.zeros(total)
    for t in range(total):
        acc = c + eps[t]
        for i in range(min(p, t)):
            acc += phis[i] * y[t - 1 - i]
        y[t] = acc
    return y[burn_in:]


def signal_sentiment_series(
    n: int = 400,
    step: float = 120.0,
    base: float = 9000.0,
    noise: float = 0.1,
    seed: int = 0,
    bucket: int = DAY,
) -> MergedSeries:
    """Price takes +-step moves; sentiment at t leaks the sign of the NEXT
    move (plus noise), so the sentiment column carries next-step information
    a price-only model cannot see."""
    rng = np.random.default_rng(seed)
    signs = rng.choice([-1.0, 1.0], size=n - 1)
    price = base + np.concatenate([[0.0], np.cumsum(signs * step)])
    sentiment = np.zeros(n)
    sentiment[:-1] = 0.8 * signs + rng.normal(0.0, noise, size=n - 1)
    sentiment = np.clip(sentiment, -1.0, 1.0)
    time = (np.arange(n) + 1) * bucket
    return MergedSeries(time, price, sentiment)
