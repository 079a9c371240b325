"""Hybrid wavelet / recurrent RBF network forecaster for hourly request counts."""

from .dwt import (FilterBank, WaveletCoeffs, bior37, decompose_decimated,
                  decompose_undecimated, haar, reconstruct)
from .evaluation import evaluate, recommend_capacity, relative_error, rmse, split_series
from .ingest import TimeSeries, load_csv, load_pagecounts_dir, standardize
from .network import (TrainConfig, WrnnModel, WrnnTopology, load_model, predict_series,
                      save_model, train)

__version__ = "0.1.0"
