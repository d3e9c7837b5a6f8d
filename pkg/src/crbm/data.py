"""CSV ingestion, chronological splitting, and the two model encodings.

Raw multi-asset series enter as dated CSV rows. Two invertible encodings
feed the models: a per-asset binary quantization (16 bits by default) for
the Bernoulli architecture, and z-score standardization for the Gaussian
one. Both are fitted on the training split only, so out-of-sample values
may fall outside the fitted range; binary encoding clips them.
"""

import csv
import math
from dataclasses import dataclass
from datetime import date as Date

import numpy as np

MODE_BINARY = "binary"
MODE_CONTINUOUS = "continuous"


@dataclass
class RawSeries:
    """Dated observation matrix with one column per asset.

    Rows are strictly increasing in date and contain no missing cells;
    ``n_dropped`` counts input rows discarded during ingestion.
    """

    dates: list
    values: np.ndarray
    asset_names: list[str]
    n_dropped: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("values must be a T x D matrix")
        if self.values.shape[1] < 1:
            raise ValueError("need at least one asset column")
        if len(self.dates) != self.values.shape[0]:
            raise ValueError("dates and values disagree on row count")
        if len(self.asset_names) != self.values.shape[1]:
            raise ValueError("asset_names and values disagree on column count")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values contain non-finite entries")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if not prev < cur:
                raise ValueError("dates must be strictly increasing")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]


@dataclass
class BinaryCodec:
    """Uniform linear quantizer: per-asset [min, max] split into 2^bits bins.

    The minimum encodes to all-zero bits and the maximum to all-one bits;
    bits are emitted most-significant-first.
    """

    minimum: np.ndarray
    maximum: np.ndarray
    bits_per_asset: int = 16

    def __post_init__(self):
        self.minimum = np.asarray(self.minimum, dtype=np.float64)
        self.maximum = np.asarray(self.maximum, dtype=np.float64)
        if self.minimum.shape != self.maximum.shape or self.minimum.ndim != 1:
            raise ValueError("minimum/maximum must be matching 1-D arrays")
        if not (1 <= int(self.bits_per_asset) <= 48):
            raise ValueError("bits_per_asset must be in [1, 48]")
        if np.any(self.minimum >= self.maximum):
            raise ValueError("each asset needs minimum < maximum")

    @property
    def n_assets(self) -> int:
        return self.minimum.shape[0]

    @property
    def n_bins(self) -> int:
        return 1 << int(self.bits_per_asset)


@dataclass
class ZScoreParams:
    """Per-asset mean and standard deviation fitted on the training split."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=np.float64)
        self.sigma = np.asarray(self.sigma, dtype=np.float64)
        if self.mu.shape != self.sigma.shape or self.mu.ndim != 1:
            raise ValueError("mu/sigma must be matching 1-D arrays")
        if np.any(self.sigma <= 0):
            raise ValueError("sigma must be strictly positive per asset")

    @property
    def n_assets(self) -> int:
        return self.mu.shape[0]


@dataclass
class EncodedSeries:
    """Model-ready observation matrix plus the codec needed to invert it.

    ``matrix`` is T x D' where D' = n_assets * bits in binary mode and
    D' = n_assets in continuous mode. ``dates`` is optional provenance
    carried along for diagnostics output.
    """

    matrix: np.ndarray
    mode: str
    codec: object = None
    dates: list | None = None

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.float64)
        if self.matrix.ndim != 2:
            raise ValueError("matrix must be 2-D")
        if self.mode not in (MODE_BINARY, MODE_CONTINUOUS):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("matrix contains non-finite entries")
        if self.mode == MODE_BINARY and not np.all(np.isin(self.matrix, (0.0, 1.0))):
            raise ValueError("binary mode entries must be 0 or 1")
        if self.dates is not None and len(self.dates) != self.matrix.shape[0]:
            raise ValueError("dates and matrix disagree on row count")

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_visible(self) -> int:
        return self.matrix.shape[1]


def ingest_csv(path, date_column: str | None = None) -> RawSeries:
    """Read a dated multi-asset CSV into a RawSeries.

    The header row is required; ``date_column`` names the date column
    (default: the first column). Dates must be ISO-8601. Any row with an
    unparseable date, a missing cell, or a non-finite value is dropped and
    counted in ``n_dropped``. Rows are sorted ascending by date.

    Raises FileNotFoundError for a missing file and ValueError when no
    parseable rows remain or two rows share a date.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header row required") from None
        raw_rows = list(reader)

    header = [name.strip() for name in header]
    if len(header) < 2:
        raise ValueError(f"{path}: need a date column plus at least one asset column")
    if date_column is None:
        date_idx = 0
    else:
        if date_column not in header:
            raise ValueError(f"{path}: no column named {date_column!r}")
        date_idx = header.index(date_column)
    asset_names = [name for i, name in enumerate(header) if i != date_idx]

    parsed: list[tuple[Date, list[float]]] = []
    n_dropped = 0
    for row in raw_rows:
        if len(row) != len(header):
            n_dropped += 1
            continue
        try:
            when = Date.fromisoformat(row[date_idx].strip())
            vals = [float(cell) for i, cell in enumerate(row) if i != date_idx]
        except ValueError:
            n_dropped += 1
            continue
        if not all(math.isfinite(v) for v in vals):
            n_dropped += 1
            continue
        parsed.append((when, vals))

    if not parsed:
        raise ValueError(f"{path}: no parseable rows")
    parsed.sort(key=lambda item: item[0])
    for (d1, _), (d2, _) in zip(parsed, parsed[1:]):
        if d1 == d2:
            raise ValueError(f"{path}: duplicate date {d1.isoformat()}")

    dates = [when for when, _ in parsed]
    values = np.array([vals for _, vals in parsed], dtype=np.float64)
    return RawSeries(dates, values, asset_names, n_dropped=n_dropped)


def chrono_split(series: RawSeries, boundary: Date) -> tuple[RawSeries, RawSeries]:
    """Split into (dates <= boundary, dates > boundary) preserving order.

    Raises ValueError when either side would be empty.
    """
    n_left = sum(1 for d in series.dates if d <= boundary)
    if n_left == 0:
        raise ValueError(f"boundary {boundary} precedes the first date; training side empty")
    if n_left == series.n_rows:
        raise ValueError(f"boundary {boundary} is at or after the last date; test side empty")
    left = RawSeries(series.dates[:n_left], series.values[:n_left].copy(), list(series.asset_names))
    right = RawSeries(series.dates[n_left:], series.values[n_left:].copy(), list(series.asset_names))
    return left, right


def fit_binary_codec(train: RawSeries, bits: int = 16) -> BinaryCodec:
    """Fit per-asset min/max on the training split.

    Raises ValueError for a constant column (min equals max).
    """
    if train.n_rows < 2:
        raise ValueError("need at least 2 rows to fit a codec")
    lo = train.values.min(axis=0)
    hi = train.values.max(axis=0)
    flat = np.flatnonzero(lo == hi)
    if flat.size:
        names = ", ".join(train.asset_names[i] for i in flat)
        raise ValueError(f"constant column(s) cannot be binary-encoded: {names}")
    return BinaryCodec(lo, hi, bits_per_asset=bits)


def _bin_indices(values: np.ndarray, lo, hi, bits: int) -> np.ndarray:
    """Map values to bin indices in [0, 2^bits - 1]; out-of-range values clip."""
    top = float((1 << bits) - 1)
    unit = (np.clip(values, lo, hi) - lo) / (hi - lo)
    return np.floor(unit * top + 0.5).astype(np.int64)


def _bits_msb_first(indices: np.ndarray, bits: int) -> np.ndarray:
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    return (indices[..., None] >> shifts) & 1


def encode_binary(value: float, asset: int, codec: BinaryCodec) -> np.ndarray:
    """Encode one value for one asset as its MSB-first bit vector."""
    idx = _bin_indices(np.float64(value), codec.minimum[asset], codec.maximum[asset],
                       codec.bits_per_asset)
    return _bits_msb_first(idx, codec.bits_per_asset).astype(np.uint8)


def decode_binary(bits: np.ndarray, asset: int, codec: BinaryCodec) -> float:
    """Invert encode_binary: return the center of the encoded bin."""
    bits = np.asarray(bits)
    nbits = codec.bits_per_asset
    if bits.shape != (nbits,):
        raise ValueError(f"expected {nbits} bits, got shape {bits.shape}")
    weights = 1 << np.arange(nbits - 1, -1, -1, dtype=np.int64)
    idx = int(np.dot(bits.astype(np.int64), weights))
    lo = codec.minimum[asset]
    hi = codec.maximum[asset]
    return float(lo + idx / ((1 << nbits) - 1) * (hi - lo))


def binarize(series: RawSeries, codec: BinaryCodec) -> EncodedSeries:
    """Encode a whole series: T x (D * bits) matrix, bits grouped per asset."""
    if series.n_assets != codec.n_assets:
        raise ValueError("series and codec disagree on asset count")
    idx = _bin_indices(series.values, codec.minimum, codec.maximum, codec.bits_per_asset)
    bits = _bits_msb_first(idx, codec.bits_per_asset)
    matrix = bits.reshape(series.n_rows, -1).astype(np.float64)
    return EncodedSeries(matrix, MODE_BINARY, codec=codec, dates=list(series.dates))


def fit_zscore(train: RawSeries) -> ZScoreParams:
    """Fit per-asset mean and population standard deviation on the training split."""
    if train.n_rows < 2:
        raise ValueError("need at least 2 rows to fit z-score parameters")
    mu = train.values.mean(axis=0)
    sigma = train.values.std(axis=0)  # population std, ddof=0
    flat = np.flatnonzero(sigma == 0)
    if flat.size:
        names = ", ".join(train.asset_names[i] for i in flat)
        raise ValueError(f"constant column(s) have zero standard deviation: {names}")
    return ZScoreParams(mu, sigma)


def standardize(series: RawSeries, params: ZScoreParams) -> EncodedSeries:
    """Columnwise (x - mu) / sigma."""
    if series.n_assets != params.n_assets:
        raise ValueError("series and z-score params disagree on asset count")
    matrix = (series.values - params.mu) / params.sigma
    return EncodedSeries(matrix, MODE_CONTINUOUS, codec=params, dates=list(series.dates))


def destandardize(encoded: EncodedSeries) -> np.ndarray:
    """Invert standardize: x = v * sigma + mu."""
    if encoded.mode != MODE_CONTINUOUS:
        raise ValueError("destandardize requires a continuous-mode series")
    if not isinstance(encoded.codec, ZScoreParams):
        raise ValueError("encoded series carries no z-score parameters")
    return encoded.matrix * encoded.codec.sigma + encoded.codec.mu


def decode_series(encoded: EncodedSeries) -> np.ndarray:
    """Map an encoded matrix back to raw units (T x n_assets).

    Binary mode groups columns per asset MSB-first and decodes bin centers;
    continuous mode applies the affine z-score inverse.
    """
    if encoded.mode == MODE_CONTINUOUS:
        return destandardize(encoded)
    codec = encoded.codec
    if not isinstance(codec, BinaryCodec):
        raise ValueError("binary series carries no binary codec")
    nbits = codec.bits_per_asset
    if encoded.n_visible != codec.n_assets * nbits:
        raise ValueError(
            f"bit-group misalignment: {encoded.n_visible} columns is not "
            f"{codec.n_assets} assets x {nbits} bits")
    bits = encoded.matrix.reshape(encoded.n_rows, codec.n_assets, nbits)
    weights = (1 << np.arange(nbits - 1, -1, -1, dtype=np.int64)).astype(np.float64)
    idx = bits @ weights
    top = float((1 << nbits) - 1)
    return codec.minimum + idx / top * (codec.maximum - codec.minimum)


@dataclass
class TableData:
    """Order-preserving CSV payload for fidelity comparisons.

    Unlike ingest_csv the first column is kept as an opaque label (synthetic
    output uses step indices there), rows are not sorted, and no date parsing
    is attempted.
    """

    labels: list[str]
    values: np.ndarray
    asset_names: list[str]
    n_dropped: int = 0


def read_values_csv(path) -> TableData:
    """Read a CSV of labeled numeric rows, preserving file order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, header row required") from None
        raw_rows = list(reader)

    header = [name.strip() for name in header]
    if len(header) < 2:
        raise ValueError(f"{path}: need a label column plus at least one asset column")
    asset_names = header[1:]

    labels: list[str] = []
    rows: list[list[float]] = []
    n_dropped = 0
    for row in raw_rows:
        if len(row) != len(header):
            n_dropped += 1
            continue
        try:
            vals = [float(cell) for cell in row[1:]]
        except ValueError:
            n_dropped += 1
            continue
        if not all(math.isfinite(v) for v in vals):
            n_dropped += 1
            continue
        labels.append(row[0])
        rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no parseable rows")
    return TableData(labels, np.array(rows, dtype=np.float64), asset_names, n_dropped)
