"""One-dimensional scale filter over a geometric size pyramid.

A scale sample is a (K_f x D) matrix: column d holds the vectorized features
of the target resized to pyramid level d.  Learning is closed-form ridge
regression over circular shifts of the scale axis, with one shared scalar
denominator per scale frequency:

    numerator_k = conj(What_k) . Yhat        (per feature row k)
    denominator = sum_k conj(What_k).What_k + lam     (shared, real)
    filter_k    = numerator_k / denominator

which is the exact multi-row minimizer (the per-frequency data matrix is
rank one, so the shared denominator is not an approximation — the dense
circulant oracle in the tests confirms it).  Detection is

    E = IFFT_scale-axis( sum_k filter_k . Zhat_k ),  real part

whose argmax on the training sample reproduces the label peak at the center
level.  Online adaptation blends the numerator and denominator running terms
(never the quotient); the stored denominator includes lam so blending keeps
it bounded below by lam exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResponseError, InvalidInputError
from .tensorops import hann_window, refine_peak


@dataclass(frozen=True)
class ScalePyramid:
    """Geometric ladder of candidate target sizes around the current one."""

    factor: float
    count: int
    base_size: tuple[float, float]  # (height, width) in pixels

    def __post_init__(self):
        if self.count < 1:
            raise InvalidInputError(f"level count must be >= 1, got {self.count}")
        if self.count > 1 and self.factor <= 1:
            raise InvalidInputError(f"scale factor must be > 1, got {self.factor}")
        if min(self.base_size) <= 0:
            raise InvalidInputError(f"base size must be positive, got {self.base_size}")

    @property
    def levels(self) -> np.ndarray:
        """Integer exponents b, centered so that b=0 is the current size."""
        c = self.count // 2
        return np.arange(self.count) - c

    @property
    def center_index(self) -> int:
        return self.count // 2

    def level_sizes(self) -> np.ndarray:
        """(D, 2) exact per-level dims factor**b * (height, width)."""
        f = self.factor ** self.levels.astype(float)
        return f[:, None] * np.asarray(self.base_size, dtype=float)[None, :]

    def rescaled(self, new_size: tuple[float, float]) -> "ScalePyramid":
        return ScalePyramid(self.factor, self.count, (float(new_size[0]), float(new_size[1])))


def build_scale_pyramid(height: float, width: float, factor: float, count: int) -> ScalePyramid:
    return ScalePyramid(factor=float(factor), count=int(count), base_size=(float(height), float(width)))


def make_scale_label(count: int, sigma: float) -> np.ndarray:
    """Gaussian desired response over levels, peak exactly 1 at the center
    level, distances measured circularly for the FFT."""
    if count < 1:
        raise InvalidInputError(f"count must be >= 1, got {count}")
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be > 0, got {sigma}")
    d = np.arange(count) - count // 2
    d = d - np.round(d / count) * count
    return np.exp(-(d.astype(float) ** 2) / (2.0 * sigma**2))


@dataclass(frozen=True)
class ScaleSample:
    """Vectorized multi-scale sample: raw columns plus the tapered spectrum.

    ``matrix`` keeps the untapered columns (what samplers are tested
    against); the learning/detection spectrum applies a length-D Hann taper
    across levels first, suppressing wrap-around of the circular scale axis.
    """

    matrix: np.ndarray  # (K_f, D) real

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise InvalidInputError(f"sample matrix must be 2-D, got ndim {self.matrix.ndim}")
        if not np.all(np.isfinite(self.matrix)):
            raise InvalidInputError("sample matrix contains non-finite values")

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def count(self) -> int:
        return self.matrix.shape[1]

    @property
    def taper(self) -> np.ndarray:
        return hann_window(self.matrix.shape[1])

    @property
    def spectrum(self) -> np.ndarray:
        return np.fft.fft(self.matrix * self.taper[None, :], axis=1)


def vectorize_feature_stack(block: np.ndarray) -> np.ndarray:
    """Flatten an (M, N, G) feature block to length M*N*G: rows fastest, then
    columns within each channel, channels outermost."""
    if block.ndim != 3:
        raise InvalidInputError(f"feature block must be 3-D, got ndim {block.ndim}")
    return block.ravel(order="F")


@dataclass
class ScaleFilter:
    """Closed-form scale filter with running update terms."""

    numerator: np.ndarray  # (K_f, D) complex
    denominator: np.ndarray  # (D,) real, >= lam at every frequency
    label_hat: np.ndarray  # (D,) complex
    lam: float

    @property
    def filter_hat(self) -> np.ndarray:
        return self.numerator / self.denominator[None, :]


@dataclass(frozen=True)
class ScaleResponse:
    values: np.ndarray  # (D,) real confidence
    level: float  # refined continuous level b*
    factor: float  # chosen scale factor: pyramid factor ** b*
    score: float
    degenerate: bool = False


def scale_filter_terms(sample: ScaleSample, label: np.ndarray, lam: float):
    """Numerator and (lam-inclusive) denominator for one sample."""
    label = np.asarray(label, dtype=float)
    if label.ndim != 1 or label.shape[0] != sample.count:
        raise InvalidInputError(
            f"label length {label.shape} != sample level count {sample.count}"
        )
    if lam <= 0:
        raise InvalidInputError(f"lam must be > 0, got {lam}")
    w_hat = sample.spectrum
    y_hat = np.fft.fft(label)
    numerator = np.conj(w_hat) * y_hat[None, :]
    denominator = (w_hat * np.conj(w_hat)).real.sum(axis=0) + lam
    return numerator, denominator, y_hat


def learn_scale_filter(sample: ScaleSample, label: np.ndarray, lam: float) -> ScaleFilter:
    numerator, denominator, y_hat = scale_filter_terms(sample, label, lam)
    return ScaleFilter(numerator=numerator, denominator=denominator, label_hat=y_hat, lam=lam)


def refine_scale(values: np.ndarray, iterations: int) -> float:
    """Continuous peak position of a length-D response, in index coordinates
    (within +-0.5 of the grid argmax).  Degenerate responses return the
    argmax itself; D=1 returns 0."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("response must be a non-empty 1-D array")
    if values.size == 1:
        return 0.0
    try:
        pos, _ = refine_peak(values, iterations)
    except DegenerateResponseError:
        return float(np.argmax(values))
    return float(pos[0])


def detect_scale(
    filt: ScaleFilter,
    sample: ScaleSample,
    pyramid: ScalePyramid,
    iterations: int = 5,
) -> ScaleResponse:
    """Correlate the filter with a test sample and refine the peak level."""
    z_hat = sample.spectrum
    if z_hat.shape != filt.numerator.shape:
        raise InvalidInputError(
            f"test sample shape {z_hat.shape} != filter shape {filt.numerator.shape}"
        )
    resp_hat = (filt.filter_hat * z_hat).sum(axis=0)
    values = np.fft.ifft(resp_hat).real
    flat = values.size > 1 and np.all(values == values.flat[0])
    if not np.all(np.isfinite(values)) or flat:
        return ScaleResponse(values=values, level=0.0, factor=1.0, score=0.0, degenerate=True)
    if values.size == 1:
        return ScaleResponse(values=values, level=0.0, factor=1.0, score=float(values[0]))
    idx = refine_scale(values, iterations)
    level = idx - pyramid.center_index
    return ScaleResponse(
        values=values,
        level=float(level),
        factor=float(pyramid.factor**level),
        score=float(np.max(values)),
    )


def update_scale_filter(
    filt: ScaleFilter, new_numerator: np.ndarray, new_denominator: np.ndarray, eta: float
) -> ScaleFilter:
    """Blend running terms: (1 - eta) * old + eta * new, each term separately."""
    if not 0.0 <= eta <= 1.0:
        raise InvalidInputError(f"learning rate must be in [0, 1], got {eta}")
    if new_numerator.shape != filt.numerator.shape or new_denominator.shape != filt.denominator.shape:
        raise InvalidInputError("update term shapes do not match the filter")
    return ScaleFilter(
        numerator=(1.0 - eta) * filt.numerator + eta * new_numerator,
        denominator=(1.0 - eta) * filt.denominator + eta * new_denominator,
        label_hat=filt.label_hat,
        lam=filt.lam,
    )


def shift_label_spectrum(label_hat: np.ndarray, shift: int) -> np.ndarray:
    """Spectrum of the label circularly shifted by ``shift`` levels.

    Learning from a detection sample whose true match sits ``shift`` levels
    off-center is identical to learning a re-indexed sample against the
    centered label; the phase ramp implements that without touching data.
    """
    d = label_hat.shape[0]
    f = np.fft.fftfreq(d) * d
    return label_hat * np.exp(-2j * np.pi * f * shift / d)
