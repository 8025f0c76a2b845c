"""Projected multi-channel translation filter.

Learning minimizes, over the filter's m channels g_i (frequency domain, with
unnormalized-forward scaling),

    F(g) = sum_s w_s || sum_i Zhat_{s,i} * Ghat_i - Yhat ||^2
           + sum_i || (1/n) (What (*) Ghat_i) ||^2  +  lam * sum_i ||Ghat_i||^2

which is exactly n times the spatial-domain regularized least squares with
penalty ||w_sp . g_i||^2 — the dense form the oracle tests solve directly.
The spatial weight w_sp is 1 at the target center growing quadratically
outwards; its spectrum is truncated to the few largest coefficients per
dimension so the frequency-domain convolution (*) touches only a handful of
offsets and the conjugate-gradient operator stays cheap.

Detection: response = IFFT(sum_i filter_hat_i * Zhat_i). A training sample
reproduces the label, whose peak sits at the template center; displacement of
the target moves the response peak by the same amount.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateResponseError, InvalidInputError, NumericalFailureError
from .tensorops import hann_window, refine_peak, signed_wrap

SPATIAL_WEIGHT_GAIN = 3.0
SPATIAL_WEIGHT_CLIP = 10.0
TRUNCATED_COEFFS_PER_DIM = 5


def make_translation_label(shape: tuple[int, int], sigma: float) -> np.ndarray:
    """2D Gaussian desired response, peak 1 at the template center, laid out
    with circular distance so shifted samples pair with shifted labels."""
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be > 0, got {sigma}")
    h, w = int(shape[0]), int(shape[1])
    dy = signed_wrap(np.arange(h) - h // 2, h)
    dx = signed_wrap(np.arange(w) - w // 2, w)
    return np.exp(-(dy[:, None] ** 2 + dx[None, :] ** 2) / (2.0 * sigma**2))


@dataclass(frozen=True)
class PenaltyOperator:
    """Sparse frequency-domain convolution by the truncated spatial-weight
    spectrum, scaled so ||apply(Ghat)||^2 == n * ||w_trunc . g||^2_spatial."""

    shape: tuple[int, int]
    offsets: tuple[tuple[int, int], ...]
    coeffs: np.ndarray  # complex, parallel to offsets

    def apply(self, x: np.ndarray) -> np.ndarray:
        n = self.shape[0] * self.shape[1]
        out = np.zeros_like(x, dtype=complex)
        for (dy, dx), c in zip(self.offsets, self.coeffs):
            out += c * np.roll(x, (dy, dx), axis=(-2, -1))
        return out / n

    def apply_adjoint(self, x: np.ndarray) -> np.ndarray:
        n = self.shape[0] * self.shape[1]
        out = np.zeros_like(x, dtype=complex)
        for (dy, dx), c in zip(self.offsets, self.coeffs):
            out += np.conj(c) * np.roll(x, (-dy, -dx), axis=(-2, -1))
        return out / n

    def spatial_weight(self) -> np.ndarray:
        """The effective (truncation-smoothed) spatial weight, for oracles."""
        spec = np.zeros(self.shape, dtype=complex)
        for (dy, dx), c in zip(self.offsets, self.coeffs):
            spec[dy % self.shape[0], dx % self.shape[1]] += c
        return np.fft.ifft2(spec).real


def spatial_penalty(
    shape: tuple[int, int],
    target_cells: tuple[float, float],
    gain: float = SPATIAL_WEIGHT_GAIN,
    clip: float = SPATIAL_WEIGHT_CLIP,
    keep: int = TRUNCATED_COEFFS_PER_DIM,
) -> PenaltyOperator:
    """Build the truncated spectrum of w(t) = 1 + gain*(t/half-target)^2.

    w splits into a sum of two 1-D profiles, so its 2-D spectrum lives on the
    two frequency axes; per axis only the ``keep`` largest coefficients are
    retained.
    """
    h, w = int(shape[0]), int(shape[1])
    if h < 1 or w < 1:
        raise InvalidInputError(f"penalty shape must be positive, got {shape}")
    half = (max(float(target_cells[0]), 1.0) / 2.0, max(float(target_cells[1]), 1.0) / 2.0)
    profiles = []
    for n, hl in ((h, half[0]), (w, half[1])):
        t = signed_wrap(np.arange(n) - n // 2, n)
        profiles.append(np.minimum(0.5 + gain * (t / hl) ** 2, clip / 2.0))
    fy = np.fft.fft(profiles[0])
    fx = np.fft.fft(profiles[1])
    entries: dict[tuple[int, int], complex] = {}
    for idx in np.argsort(-np.abs(fy))[:keep]:
        k = int(idx) if idx <= h // 2 else int(idx) - h
        entries[(k, 0)] = entries.get((k, 0), 0.0) + fy[idx] * w
    for idx in np.argsort(-np.abs(fx))[:keep]:
        k = int(idx) if idx <= w // 2 else int(idx) - w
        entries[(0, k)] = entries.get((0, k), 0.0) + fx[idx] * h
    offsets = tuple(sorted(entries))
    coeffs = np.array([entries[o] for o in offsets])
    return PenaltyOperator((h, w), offsets, coeffs)


def ideal_spatial_weight(
    shape: tuple[int, int],
    target_cells: tuple[float, float],
    gain: float = SPATIAL_WEIGHT_GAIN,
    clip: float = SPATIAL_WEIGHT_CLIP,
) -> np.ndarray:
    """The untruncated spatial weight w(t) = 1 + gain*(t/half-target)^2
    (clipped), minimal (exactly 1) at the target center.  The penalty
    operator applies the spectrally truncated version of this."""
    h, w = int(shape[0]), int(shape[1])
    half = (max(float(target_cells[0]), 1.0) / 2.0, max(float(target_cells[1]), 1.0) / 2.0)
    parts = []
    for n, hl in ((h, half[0]), (w, half[1])):
        t = signed_wrap(np.arange(n) - n // 2, n)
        parts.append(np.minimum(0.5 + gain * (t / hl) ** 2, clip / 2.0))
    return parts[0][:, None] + parts[1][None, :]


def uniform_penalty(shape: tuple[int, int], value: float = 1.0) -> PenaltyOperator:
    """Constant spatial weight — the plain-ridge special case used by oracles."""
    h, w = int(shape[0]), int(shape[1])
    return PenaltyOperator((h, w), ((0, 0),), np.array([complex(value * h * w)]))


def learn_projection(features: np.ndarray, m: int) -> np.ndarray:
    """Top-m principal directions (G x m, orthonormal) of the channel
    covariance of one (windowed) feature sample."""
    data = np.asarray(features, dtype=float)
    if data.ndim != 3:
        raise InvalidInputError(f"features must be (H, W, G), got ndim {data.ndim}")
    g = data.shape[2]
    if not 1 <= m <= g:
        raise InvalidInputError(f"need 1 <= m <= {g}, got m={m}")
    flat = data.reshape(-1, g)
    centered = flat - flat.mean(axis=0)
    cov = centered.T @ centered / flat.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:m]
    basis = eigvecs[:, order]
    # deterministic sign: largest-magnitude component positive
    for j in range(basis.shape[1]):
        k = np.argmax(np.abs(basis[:, j]))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


@dataclass
class SampleMemory:
    """Weighted store of projected sample spectra with exponential decay."""

    capacity: int = 30
    decay: float = 0.025
    samples: list[np.ndarray] = field(default_factory=list)
    weights: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.capacity < 1:
            raise InvalidInputError(f"capacity must be >= 1, got {self.capacity}")
        if not 0 < self.decay <= 1:
            raise InvalidInputError(f"decay must be in (0, 1], got {self.decay}")

    def add(self, sample_hat: np.ndarray):
        if self.samples and sample_hat.shape != self.samples[0].shape:
            raise InvalidInputError(
                f"sample dims {sample_hat.shape} != memory dims {self.samples[0].shape}"
            )
        if not self.samples:
            self.samples.append(sample_hat)
            self.weights.append(1.0)
            return
        self.weights = [w * (1.0 - self.decay) for w in self.weights]
        self.samples.append(sample_hat)
        self.weights.append(self.decay)
        if len(self.samples) > self.capacity:
            drop = int(np.argmin(self.weights))
            del self.samples[drop]
            del self.weights[drop]
        total = sum(self.weights)
        self.weights = [w / total for w in self.weights]


@dataclass
class TranslationFilter:
    """Filter spectra plus everything needed to prepare samples and detect."""

    filter_hat: np.ndarray  # (m, H, W) complex
    projection: np.ndarray  # (G, m)
    label_hat: np.ndarray  # (H, W) complex
    window: np.ndarray  # (H, W)
    penalty: PenaltyOperator
    lam: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.label_hat.shape

    def prepare(self, features: np.ndarray, windowed: bool = True) -> np.ndarray:
        """Window, project, and FFT a raw (H, W, G) feature sample."""
        data = np.asarray(features, dtype=float)
        if data.shape[:2] != self.shape or data.shape[2] != self.projection.shape[0]:
            raise InvalidInputError(
                f"sample shape {data.shape} incompatible with filter {self.shape} x G={self.projection.shape[0]}"
            )
        if windowed:
            data = data * self.window[:, :, None]
        proj = data @ self.projection  # (H, W, m)
        return np.fft.fft2(np.moveaxis(proj, 2, 0), axes=(-2, -1))


def _normal_op(memory: SampleMemory, filt: TranslationFilter, g_hat: np.ndarray) -> np.ndarray:
    acc = filt.lam * g_hat
    for z, w in zip(memory.samples, memory.weights):
        resp = (z * g_hat).sum(axis=0)
        acc = acc + w * np.conj(z) * resp[None]
    acc = acc + filt.penalty.apply_adjoint(filt.penalty.apply(g_hat))
    return acc


def _rhs(memory: SampleMemory, filt: TranslationFilter) -> np.ndarray:
    b = np.zeros_like(filt.filter_hat)
    for z, w in zip(memory.samples, memory.weights):
        b = b + w * np.conj(z) * filt.label_hat[None]
    return b


def translation_objective(memory: SampleMemory, filt: TranslationFilter, g_hat: np.ndarray) -> float:
    """The learning objective F (see module docstring), for monotonicity checks."""
    total = filt.lam * float(np.vdot(g_hat, g_hat).real)
    for z, w in zip(memory.samples, memory.weights):
        resid = (z * g_hat).sum(axis=0) - filt.label_hat
        total += w * float(np.vdot(resid, resid).real)
    p = filt.penalty.apply(g_hat)
    total += float(np.vdot(p, p).real)
    return total


def learn_translation_filter(
    memory: SampleMemory,
    filt: TranslationFilter,
    max_iters: int,
    tol: float = 1e-4,
    trace: list | None = None,
) -> TranslationFilter:
    """Conjugate gradient on the normal equations, warm-started from the
    current filter.  Stops when the residual norm has dropped by ``tol``
    relative to the start, or at the iteration cap.

    The residual 2-norm legitimately oscillates during CG (only the quadratic
    objective decreases monotonically), so small upticks are tolerated; a
    non-finite iterate or a residual blown two orders of magnitude past its
    starting value raises NumericalFailureError carrying the last iterate.
    """
    if not memory.samples:
        raise InvalidInputError("sample memory is empty")
    x = filt.filter_hat.astype(complex).copy()
    b = _rhs(memory, filt)
    r = b - _normal_op(memory, filt, x)
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    r0 = np.sqrt(rs)
    if trace is not None:
        trace.append(translation_objective(memory, filt, x))
    if r0 == 0.0:
        return replace(filt, filter_hat=x)
    for _ in range(max_iters):
        ap = _normal_op(memory, filt, p)
        denom = float(np.vdot(p, ap).real)
        if denom <= 0:
            break  # numerically exhausted search direction
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(np.vdot(r, r).real)
        if trace is not None:
            trace.append(translation_objective(memory, filt, x))
        norm = np.sqrt(rs_new)
        if not np.isfinite(norm) or norm > 100.0 * r0:
            raise NumericalFailureError(
                "conjugate gradient diverged", last_iterate=x
            )
        if norm <= tol * r0:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return replace(filt, filter_hat=x)


def localize(filt: TranslationFilter, sample_hat: np.ndarray, iterations: int = 5):
    """Peak of the correlation response: (continuous (row, col), score).

    The response to the training sample peaks at the template center; a
    target displaced by d cells moves the peak by d.
    """
    if sample_hat.shape != filt.filter_hat.shape:
        raise InvalidInputError(
            f"sample shape {sample_hat.shape} != filter shape {filt.filter_hat.shape}"
        )
    resp_hat = (filt.filter_hat * sample_hat).sum(axis=0)
    response = np.fft.ifft2(resp_hat).real
    if not np.all(np.isfinite(response)) or np.all(response == 0):
        raise DegenerateResponseError("translation response is degenerate")
    pos, score = refine_peak(response, iterations)
    return pos, score, response
