"""Round-trip a small price panel through the fixed-point binary codec."""

from datetime import date, timedelta

import numpy as np

from crbm.data import RawSeries, binarize, decode_series, fit_binary_codec

rng = np.random.default_rng(7)

names = ["EQ", "RATES"]
T = 500
values = np.column_stack([
    rng.normal(0.0, 1.2, size=T),
    rng.normal(0.02, 0.4, size=T),
])
dates = [date(2019, 1, 1) + timedelta(days=i) for i in range(T)]
series = RawSeries(dates, values, names)

for bits in (4, 8, 16):
    codec = fit_binary_codec(series, bits=bits)
    encoded = binarize(series, codec)
    back = decode_series(encoded)
    bin_width = (codec.maximum - codec.minimum) / (codec.n_bins - 1)
    worst = np.abs(back - values).max(axis=0)
    print(f"bits={bits:2d}  columns per row={encoded.matrix.shape[1]:3d}  "
          f"worst error={worst.round(6)}  half bin={(bin_width / 2).round(6)}")

# the first bit of each asset block is the most significant one
codec = fit_binary_codec(series, bits=8)
sweep = np.linspace(codec.minimum, codec.maximum, 9)
sweep_dates = [date(2021, 1, 1) + timedelta(days=i) for i in range(9)]
enc = binarize(RawSeries(sweep_dates, sweep, names), codec)
print("\nEQ bit patterns along a low-to-high sweep (MSB first):")
for row, value in zip(enc.matrix[:, :8].astype(int), sweep[:, 0]):
    print(f"  {value:8.4f}  ->  {''.join(map(str, row))}")
