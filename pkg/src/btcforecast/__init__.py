"""Bitcoin price forecasting toolkit: data ingestion, tweet sentiment,
dataset preparation, and an LSTM-vs-ARIMA benchmark."""

__version__ = "0.1.0"

from . import arima, dataset, evaluation, ingest, lstm, sentiment, synthetic

__all__ = [
    "arima",
    "dataset",
    "evaluation",
    "ingest",
    "lstm",
    "sentiment",
    "synthetic",
    "__version__",
]
