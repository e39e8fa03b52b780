#!/usr/bin/env python3
"""LSTM walkthrough: train the from-scratch cell on the bundled sine
fixture and watch the loss fall.

Training is full batch with one Adam step per epoch, which makes every
run bit-reproducible for a fixed seed.
"""

from pathlib import Path

import numpy as np

from btcforecast.dataset import (
    PRICE_ONLY,
    MergedSeries,
    fit_scaler,
    scale,
    split,
    to_supervised,
    unscale_column,
)
from btcforecast.evaluation import rmse
from btcforecast.lstm import LstmConfig, predict_series, train

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

series = MergedSeries.from_csv(FIXTURES / "sine.csv")
scaler = fit_scaler(series)
ds = to_supervised(scale(series, scaler), lag=10, features=PRICE_ONLY, scaler=scaler)
train_ds, test_ds = split(ds)
print(f"{len(train_ds)} train / {len(test_ds)} test samples, lag 10")

config = LstmConfig(n_features=1, hidden_size=32, lag=10, epochs=200, learning_rate=0.01, seed=7)
model, history = train(config, train_ds)

print(f"\nbuild time {history.build_time_ms:.2f} ms, "
      f"total train time {history.train_time_ms:.0f} ms")
print("training MAE (scaled units):")
for epoch in (0, 10, 50, 100, 199):
    print(f"  epoch {epoch:>3}: {history.losses[epoch]:.5f}")

predicted = predict_series(model, test_ds)
actual = unscale_column(test_ds.targets, scaler, "price")
print(f"\ntest RMSE: {rmse(actual, predicted):.2f} USD "
      f"(series range {series.price.min():.0f}..{series.price.max():.0f})")

print("\nlast five forecasts vs truth:")
for t, a, p in list(zip(test_ds.target_times, actual, predicted))[-5:]:
    print(f"  t={t:>9}  actual {a:8.2f}  predicted {p:8.2f}")

# determinism: same seed, same data -> identical parameters
model2, _ = train(config, train_ds)
identical = all(
    np.array_equal(a, b)
    for a, b in zip(model.params().values(), model2.params().values())
)
print(f"\nretrained with the same seed -> bit-identical model: {identical}")
