"""
Symbolic representations of numeric series.

SAX works in the time domain: each sliding window is z-normalized, reduced
with PAA and discretized against fixed N(0,1) quantile breakpoints.
SFA works in the frequency domain: each raw window is reduced to its first
Fourier coefficients and discretized against per-coefficient bins learned
on the training windows (MCB).
"""
import logging
import math
import string
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.stats
from numpy.lib.stride_tricks import sliding_window_view

from mrsqm.core.config import settings
from mrsqm.core.errors import ArgumentError, NotFittedError
from mrsqm.core.rng import RandomState, as_generator
from mrsqm.models.enums import TransformType
from mrsqm.schemas.dataset import TimeSeriesDataset
from mrsqm.schemas.symbolic import ReprConfig, SymbolicSequence

logger = logging.getLogger(__name__)

SYMBOLS = string.ascii_lowercase
ZNORM_EPS = 1e-8
# coefficients below this fraction of the window's absolute mass are rounding noise
DFT_FLUSH = 1e-9


# ---------- PARAMETER SAMPLING ----------

def representation_count(L: int, k: float) -> int:
    """Number of representations sampled for series length L and density k."""
    return max(1, math.ceil(k * math.log2(L)))


def window_grid(L: int, count: int, min_window: int = settings.MIN_WINDOW) -> List[int]:
    """
    Window sizes on an exponential scale between min_window and L.

    Exponents are spaced evenly on [log2(min_window), log2(L)] and rounded, so
    small windows are sampled more densely than large ones and none exceeds L.
    """
    if L <= min_window:
        return [L] * count
    exponents = np.linspace(math.log2(min_window), math.log2(L), count)
    windows = np.clip(np.rint(2.0 ** exponents).astype(np.int64), min_window, L)
    return [int(size) for size in windows]


def sample_configs(
    L: int,
    k: float,
    transform: Union[TransformType, str],
    rng: RandomState = None,
    word_lengths: Sequence[int] = tuple(settings.WORD_LENGTHS),
    alphabet_sizes: Sequence[int] = tuple(settings.ALPHABET_SIZES),
    numerosity_reduction: bool = settings.NUMEROSITY_REDUCTION,
    drop_dc: bool = settings.DROP_DC,
    min_window: int = settings.MIN_WINDOW,
) -> List[ReprConfig]:
    """
    Sample ceil(k * log2(L)) representation configs.

    Window sizes are deterministic grid points; word length and alphabet size
    are drawn uniformly per config, the word length clamped to the window.
    """
    if k < 1:
        raise ArgumentError(f"Density k must be >= 1, got {k}")
    if L < 1:
        raise ArgumentError(f"Series length must be >= 1, got {L}")
    transform = TransformType(transform)
    if transform == TransformType.BOTH:
        raise ArgumentError("Sample SAX and SFA configs separately")

    rng = as_generator(rng)
    configs = []
    for window in window_grid(L, representation_count(L, k), min_window):
        word_length = min(int(rng.choice(word_lengths)), window)
        alphabet_size = int(rng.choice(alphabet_sizes))
        configs.append(
            ReprConfig(
                transform=transform,
                window_size=window,
                word_length=word_length,
                alphabet_size=alphabet_size,
                numerosity_reduction=numerosity_reduction,
                drop_dc=drop_dc,
            )
        )
    logger.debug(f"Sampled {len(configs)} {transform.value} configs for L={L}, k={k}")
    return configs


# ---------- SAX ----------

def _znormalize_rows(windows: np.ndarray) -> np.ndarray:
    mean = windows.mean(axis=1, keepdims=True)
    std = windows.std(axis=1, keepdims=True)
    flat = std[:, 0] < ZNORM_EPS
    std[flat] = 1.0
    normalized = (windows - mean) / std
    normalized[flat] = 0.0
    return normalized


@lru_cache(maxsize=256)
def _paa_frames(length: int, w: int) -> Tuple[np.ndarray, np.ndarray]:
    # frame j spans samples floor(j*l/w) .. ceil((j+1)*l/w) - 1; a sample cut
    # by a fractional boundary belongs to both frames it touches
    j = np.arange(w)
    starts = (j * length) // w
    ends = -((-(j + 1) * length) // w)
    return starts, ends


def _paa_rows(windows: np.ndarray, w: int) -> np.ndarray:
    length = windows.shape[1]
    if not 1 <= w <= length:
        raise ArgumentError(f"Word length {w} must lie in 1..{length}")
    starts, ends = _paa_frames(length, w)
    out = np.empty((windows.shape[0], w), dtype=np.float64)
    for j in range(w):
        out[:, j] = windows[:, starts[j]:ends[j]].mean(axis=1)
    return out


def znormalize(segment: Sequence[float]) -> np.ndarray:
    """Zero mean, unit population std; near-constant segments map to zeros."""
    segment = np.asarray(segment, dtype=np.float64)
    if segment.size == 0:
        raise ArgumentError("Cannot z-normalize an empty segment")
    return _znormalize_rows(segment[None, :])[0]


def paa(segment: Sequence[float], w: int) -> np.ndarray:
    """Piecewise Aggregate Approximation of a segment into w frame means."""
    segment = np.asarray(segment, dtype=np.float64)
    return _paa_rows(segment[None, :], w)[0]


@lru_cache(maxsize=32)
def gaussian_breakpoints(alpha: int) -> np.ndarray:
    """The alpha - 1 equi-probable N(0,1) quantiles."""
    return scipy.stats.norm.ppf(np.arange(1, alpha, dtype=np.float64) / alpha)


def _sax_symbols(windows: np.ndarray, w: int, alpha: int) -> np.ndarray:
    reduced = _paa_rows(_znormalize_rows(windows), w)
    # symbol i for values in (beta_i, beta_i+1]
    return np.searchsorted(gaussian_breakpoints(alpha), reduced, side="left")


def sax_word(segment: Sequence[float], w: int, alpha: int) -> str:
    """SAX word of one segment."""
    segment = np.asarray(segment, dtype=np.float64)
    if segment.ndim != 1 or segment.size == 0:
        raise ArgumentError("A segment is a non-empty 1-d vector")
    if not 2 <= alpha <= len(SYMBOLS):
        raise ArgumentError(f"Alphabet size {alpha} outside 2..{len(SYMBOLS)}")
    return str(_to_words(_sax_symbols(segment[None, :], w, alpha))[0])


# ---------- SFA ----------

def dft_truncated(segment: Sequence[float], num_coeffs: int) -> np.ndarray:
    """
    First num_coeffs reals of the interleaved (real, imag) unnormalized DFT.

    X_k = sum_t x_t * exp(-2*pi*i*k*t/l), for k = 0 .. ceil(num_coeffs/2) - 1.
    """
    segment = np.asarray(segment, dtype=np.float64)
    if not 0 <= num_coeffs <= segment.size:
        raise ArgumentError(f"Cannot take {num_coeffs} coefficients of a length-{segment.size} segment")
    coeffs = np.fft.rfft(segment)[: (num_coeffs + 1) // 2]
    return np.column_stack((coeffs.real, coeffs.imag)).ravel()[:num_coeffs]


def _sliding_dft(series: np.ndarray, window: int, num_coeffs: int, drop_dc: bool) -> np.ndarray:
    """
    Interleaved DFT values of every sliding window, shape (L - window + 1, num_coeffs).

    Uses prefix sums of the frequency-shifted series, so each coefficient costs
    O(L) per series regardless of the window size. The prefix sums restart
    every `window` samples and run over the mean-centred series, so rounding
    stays at the scale of a single window however long or offset the series is.
    """
    offset = 2 if drop_dc else 0
    n_freq = min((num_coeffs + offset + 1) // 2, window // 2 + 1)
    n_windows = series.size - window + 1

    u = np.arange(series.size)
    k = np.arange(n_freq)
    phase = (np.outer(u, k) % window) * (2.0 * np.pi / window)
    level = series.mean()
    shifted = (series - level)[:, None] * np.exp(-1j * phase)

    # one spare block so the block after the last start always exists
    n_blocks = -(-series.size // window) + 1
    padded = np.zeros((n_blocks * window, n_freq), dtype=np.complex128)
    padded[: series.size] = shifted
    local = np.zeros((n_blocks, window + 1, n_freq), dtype=np.complex128)
    local[:, 1:] = np.cumsum(padded.reshape(n_blocks, window, n_freq), axis=1)

    block, start = np.divmod(np.arange(n_windows), window)
    sums = local[block, window] - local[block, start] + local[block + 1, start]
    coeffs = sums * np.exp(1j * phase[:n_windows])
    # a constant contributes to X_0 only
    coeffs[:, 0] += window * level

    interleaved = np.empty((n_windows, 2 * n_freq), dtype=np.float64)
    interleaved[:, 0::2] = coeffs.real
    interleaved[:, 1::2] = coeffs.imag
    values = np.zeros((n_windows, num_coeffs), dtype=np.float64)
    available = interleaved[:, offset:offset + num_coeffs]
    values[:, :available.shape[1]] = available

    abs_prefix = np.concatenate(([0.0], np.cumsum(np.abs(series))))
    mass = abs_prefix[window:] - abs_prefix[:n_windows]
    values[np.abs(values) < DFT_FLUSH * mass[:, None]] = 0.0
    return values


def mcb_fit(train_windows: Union[np.ndarray, Sequence[Sequence[float]]], alpha: int) -> np.ndarray:
    """
    Multiple Coefficient Binning: equi-depth edges per coefficient position.

    Args:
        train_windows: (n, w) DFT values of the training windows
        alpha: Alphabet size

    Returns:
        (w, alpha - 1) edges at the j/alpha quantiles (midpoint convention)
    """
    values = np.asarray(train_windows, dtype=np.float64)
    if values.size == 0:
        raise ArgumentError("MCB needs at least one training window")
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] < alpha:
        logger.warning(f"Fitting {alpha} bins on only {values.shape[0]} windows")
    quantiles = np.arange(1, alpha, dtype=np.float64) / alpha
    return np.quantile(values, quantiles, axis=0, method="midpoint").T.copy()


def discretize(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Symbol index = number of edges strictly below the value, per position."""
    return (values[:, :, None] > edges[None, :, :]).sum(axis=2)


def sfa_word(segment: Sequence[float], config: ReprConfig) -> str:
    """SFA word of one segment under a fitted config."""
    if config.transform != TransformType.SFA:
        raise ArgumentError(f"{config.describe()} is not an SFA representation")
    if config.bins is None:
        raise NotFittedError(f"{config.describe()} has no fitted bins")
    segment = np.asarray(segment, dtype=np.float64)
    if segment.size != config.window_size:
        raise ArgumentError(
            f"Segment length {segment.size} differs from window size {config.window_size}"
        )
    values = _sliding_dft(segment, config.window_size, config.word_length, config.drop_dc)
    return str(_to_words(discretize(values, config.bin_edges))[0])


# ---------- SEQUENCES ----------

def _to_words(symbols: np.ndarray) -> np.ndarray:
    """(n, w) symbol indices -> n fixed-width byte strings."""
    chars = np.ascontiguousarray(symbols.astype(np.uint8) + ord("a"))
    return chars.view(f"S{symbols.shape[1]}").ravel().astype(str)


def _to_sequence(words: np.ndarray, numerosity_reduction: bool) -> SymbolicSequence:
    if numerosity_reduction and words.size > 1:
        keep = np.ones(words.size, dtype=bool)
        keep[1:] = words[1:] != words[:-1]
        words = words[keep]
    return SymbolicSequence.model_construct(words=words.tolist())


def _check_length(length: int, config: ReprConfig) -> None:
    if config.window_size > length:
        raise ArgumentError(
            f"Series of length {length} is shorter than window {config.window_size} "
            f"of {config.describe()}"
        )


def _sfa_values(series: np.ndarray, config: ReprConfig) -> np.ndarray:
    return _sliding_dft(series, config.window_size, config.word_length, config.drop_dc)


def transform_series(series: Sequence[float], config: ReprConfig) -> SymbolicSequence:
    """Slide a window of length l with stride 1 and emit one word per window."""
    series = np.asarray(series, dtype=np.float64)
    _check_length(series.size, config)

    if config.transform == TransformType.SAX:
        windows = sliding_window_view(series, config.window_size)
        symbols = _sax_symbols(windows, config.word_length, config.alphabet_size)
    else:
        if config.bins is None:
            raise NotFittedError(f"{config.describe()} has no fitted bins")
        symbols = discretize(_sfa_values(series, config), config.bin_edges)
    return _to_sequence(_to_words(symbols), config.numerosity_reduction)


def transform_dataset(dataset: TimeSeriesDataset, config: ReprConfig) -> List[SymbolicSequence]:
    """Apply a frozen representation to every series."""
    _check_length(dataset.L, config)
    return [transform_series(series, config) for series in dataset.X]


def fit_transform_dataset(
    dataset: TimeSeriesDataset, config: ReprConfig
) -> Tuple[ReprConfig, List[SymbolicSequence]]:
    """
    Fit the representation's discretization on the dataset, then transform it.

    SAX has nothing to fit. SFA learns MCB bins from every training window;
    labels are not used.
    """
    _check_length(dataset.L, config)
    if config.transform == TransformType.SAX:
        return config, transform_dataset(dataset, config)

    values = [_sfa_values(series, config) for series in dataset.X]
    edges = mcb_fit(np.vstack(values), config.alphabet_size)
    fitted = config.model_copy(update={"bins": edges.tolist()})
    sequences = [
        _to_sequence(_to_words(discretize(v, edges)), config.numerosity_reduction)
        for v in values
    ]
    logger.debug(f"Fitted {fitted.describe()} on {sum(len(v) for v in values)} windows")
    return fitted, sequences


def format_sequences(sequences: Sequence[SymbolicSequence]) -> str:
    """Debug dump: one line per series, words separated by spaces."""
    return "\n".join(" ".join(sequence.words) for sequence in sequences) + "\n"
