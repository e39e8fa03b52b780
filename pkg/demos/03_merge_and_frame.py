#!/usr/bin/env python3
"""Dataset walkthrough: merge prices with sentiment, normalize, and frame
the series for supervised learning.

The merged table keeps exactly three columns (time, price, sentiment);
each dated row carries the last price of its bucket and the mean polarity
of the posts that arrived during it.
"""

import numpy as np

from btcforecast.dataset import (
    PRICE_AND_SENTIMENT,
    fill_missing,
    fit_scaler,
    merge,
    scale,
    split,
    to_supervised,
)

# --- merge: prices define the time axis, posts fold into their buckets
prices = [(60, 6450.0), (120, 6470.0), (180, 6465.0), (240, 6490.0)]
posts = [(70, 0.8), (95, 0.4), (200, -0.6)]
merged = merge(prices, posts, bucket=60)
print("time  price   sentiment")
for t, p, s in merged.rows():
    print(f"{t:>4}  {p:<7} {s:+.2f}")

# --- gaps forward-fill (a leading gap back-fills); missing sentiment is 0
withgaps = merge(prices, posts, bucket=60)
withgaps.price[1] = np.nan
filled = fill_missing(withgaps)
print(f"\nfilled prices: {filled.price.tolist()}")

# --- min-max scaling into [0, 1], invertible via the saved params
params = fit_scaler(filled)
scaled = scale(filled, params)
print(f"scaled prices: {np.round(scaled.price, 3).tolist()}")
print(f"price range captured by the scaler: [{params.mins[0]}, {params.maxs[0]}]")

# --- supervised framing: lag window in, next scaled price out
ds = to_supervised(scaled, lag=2, features=PRICE_AND_SENTIMENT, scaler=params)
print(f"\n{len(ds)} samples, each input window {ds.inputs.shape[1]}x{ds.inputs.shape[2]}")
print(f"first window:\n{ds.inputs[0]}")
print(f"first target (scaled next price): {ds.targets[0]:.3f}")

# --- chronological 70/30 split, no shuffling
train_ds, test_ds = split(ds, train_fraction=0.7)
print(f"\nsplit {len(ds)} samples -> {len(train_ds)} train / {len(test_ds)} test")
