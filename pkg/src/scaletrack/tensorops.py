"""Spectral primitives shared by every model in the toolkit.

Convention, fixed once for the whole package: the forward transform is
unnormalized and the inverse carries the 1/n factor (numpy's default).  All
closed-form filter equations elsewhere assume exactly this scaling.

Beyond the transform wrappers this module owns the two numeric routines that
both the translation and the scale model share: separable Hann windows and
sub-grid peak refinement by Newton iterations on the trigonometric interpolant
of a sampled response.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateResponseError, InvalidInputError


class Spectrum(NamedTuple):
    """A complex spectrum plus the axes that are frequency axes."""

    data: np.ndarray
    axes: tuple[int, ...]


def _check_tensor(x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x)
    if x.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return x


def _norm_axes(x: np.ndarray, axes: Sequence[int] | None) -> tuple[int, ...]:
    if axes is None:
        return tuple(range(x.ndim))
    out = []
    for a in axes:
        if not -x.ndim <= a < x.ndim:
            raise InvalidInputError(f"axis {a} out of range for ndim {x.ndim}")
        out.append(a % x.ndim)
    if len(set(out)) != len(out):
        raise InvalidInputError(f"duplicate axes in {axes}")
    return tuple(out)


def fft(x: np.ndarray, axes: Sequence[int] | None = None) -> Spectrum:
    """Unnormalized forward DFT along ``axes`` (all axes by default)."""
    x = _check_tensor(x, "fft input")
    ax = _norm_axes(x, axes)
    return Spectrum(np.fft.fftn(x, axes=ax), ax)


def ifft(spec: Spectrum | np.ndarray, axes: Sequence[int] | None = None) -> np.ndarray:
    """Inverse DFT with the 1/n factor.  Accepts a Spectrum or a raw array."""
    if isinstance(spec, Spectrum):
        data, ax = spec.data, spec.axes
    else:
        data = np.asarray(spec)
        ax = _norm_axes(data, axes)
    if data.size == 0:
        raise InvalidInputError("ifft input is empty")
    return np.fft.ifftn(data, axes=ax)


def hann_window(shape: int | Sequence[int]) -> np.ndarray:
    """Separable Hann window: zero at the borders, peak 1 at the center.

    A length-1 axis degenerates to [1] so windowing never annihilates a
    single-sample dimension.
    """
    if isinstance(shape, (int, np.integer)):
        shape = (int(shape),)
    shape = tuple(int(n) for n in shape)
    if any(n < 1 for n in shape):
        raise InvalidInputError(f"window shape must be positive, got {shape}")
    win = np.ones(shape)
    for axis, n in enumerate(shape):
        w1 = np.ones(1) if n == 1 else np.hanning(n)
        expand = [None] * len(shape)
        expand[axis] = slice(None)
        win = win * w1[tuple(expand)]
    return win


def circular_correlate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Circular cross-correlation c[t] = sum_s a[s] * b[(s+t) mod n].

    Computed through the correlation theorem: c = IFFT(conj(FFT(a)) * FFT(b)).
    For real inputs the real part is returned.
    """
    a = _check_tensor(a, "correlate a")
    b = _check_tensor(b, "correlate b")
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch {a.shape} vs {b.shape}")
    fa = np.fft.fftn(a)
    fb = np.fft.fftn(b)
    out = np.fft.ifftn(np.conj(fa) * fb)
    if not (np.iscomplexobj(a) or np.iscomplexobj(b)):
        out = out.real
    return out


def _signed_freqs(n: int) -> np.ndarray:
    # integer frequencies ..., -1, 0, 1, ... matching fft bin order
    return np.fft.fftfreq(n) * n


def refine_peak(response: np.ndarray, iterations: int) -> tuple[np.ndarray, float]:
    """Sub-grid peak of a sampled real response via its trigonometric interpolant.

    Starting from the grid argmax, runs Newton iterations on the band-limited
    interpolant defined by the response's DFT.  If an iteration diverges (steps
    outside +-0.5 of the argmax, or the Hessian is not negative definite) the
    estimate is clamped back to that +-0.5 box.  Returns (continuous index
    vector, interpolated peak value).

    Works for any dimensionality; the tracker uses the 1-D form on the scale
    axis and the 2-D form on translation response maps.
    """
    r = np.asarray(response, dtype=float)
    if r.size == 0:
        raise InvalidInputError("empty response")
    if not np.all(np.isfinite(r)):
        raise DegenerateResponseError("response contains non-finite values")
    if np.all(r == r.flat[0]) and r.size > 1:
        raise DegenerateResponseError("response is constant")
    if iterations < 0:
        raise InvalidInputError("iterations must be >= 0")

    shape = r.shape
    nd = r.ndim
    spec = np.fft.fftn(r)
    freqs = [_signed_freqs(n) for n in shape]
    # phase factor per axis evaluated lazily at point t
    grids = np.meshgrid(*freqs, indexing="ij")

    p0 = np.array(np.unravel_index(int(np.argmax(r)), shape), dtype=float)

    def interp(t: np.ndarray):
        phase = np.zeros(shape, dtype=complex)
        for a in range(nd):
            phase = phase + 2j * np.pi * grids[a] * (t[a] / shape[a])
        e = np.exp(phase)
        val = (spec * e).sum().real / r.size
        grad = np.array(
            [(spec * e * (2j * np.pi * grids[a] / shape[a])).sum().real / r.size for a in range(nd)]
        )
        hess = np.empty((nd, nd))
        for a in range(nd):
            for b in range(a, nd):
                h = (
                    spec
                    * e
                    * (2j * np.pi * grids[a] / shape[a])
                    * (2j * np.pi * grids[b] / shape[b])
                ).sum().real / r.size
                hess[a, b] = hess[b, a] = h
        return val, grad, hess

    t = p0.copy()
    for _ in range(iterations):
        _, grad, hess = interp(t)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        cand = t - step
        if np.any(np.abs(cand - p0) > 0.5) or not np.all(np.isfinite(cand)):
            # Newton left the trust region around the grid argmax: clamp and stop.
            t = np.clip(cand, p0 - 0.5, p0 + 0.5)
            break
        t = cand
    val, _, _ = interp(t)
    if val < r.max():  # never do worse than the grid argmax
        t, val = p0, float(r.max())
    return t, float(val)


def signed_wrap(delta: np.ndarray | float, period: int | Sequence[int]):
    """Map offsets into the signed range (-period/2, period/2]."""
    d = np.asarray(delta, dtype=float)
    p = np.asarray(period, dtype=float)
    return d - np.round(d / p) * p
