import numpy as np

from scaletrack.errors import InvalidInputError
from scaletrack.features.base import MockProvider, provider_extract
from scaletrack.features.hog import HogConfig
from scaletrack.scale import (
    ScaleSample,
    build_scale_pyramid,
    detect_scale,
    learn_scale_filter,
    make_scale_label,
    refine_scale,
    scale_filter_terms,
    shift_label_spectrum,
    update_scale_filter,
    vectorize_feature_stack,
)
from scaletrack.scale_samples import (
    baseline_scale_sample,
    build_region_batch,
    canonical_cell_grid,
    holistic_scale_sample,
    region_scale_sample,
    region_scale_sample_single,
)

rng = np.random.default_rng(11)
ok = lambda name, cond: print(("PASS " if cond else "FAIL ") + name) or (cond or (_ for _ in ()).throw(AssertionError(name)))

# --- pyramid -----------------------------------------------------------------
pyr = build_scale_pyramid(100.0, 50.0, 1.02, 17)
ok("pyramid levels -8..8", list(pyr.levels) == list(range(-8, 9)))
sizes = pyr.level_sizes()
ok("pyramid bottom size", abs(sizes[0, 0] - 100 * 1.02**-8) < 1e-12 and abs(sizes[0, 1] - 50 * 1.02**-8) < 1e-12)
ok("pyramid center size", np.allclose(sizes[8], [100.0, 50.0]))
ok("pyramid top size", abs(sizes[-1, 0] - 100 * 1.02**8) < 1e-12)
ok("pyramid D=1", list(build_scale_pyramid(10, 10, 1.02, 1).levels) == [0])

# --- label -------------------------------------------------------------------
lab = make_scale_label(17, 1.0625)
ok("label peak 1 at center", lab[8] == 1.0 and np.argmax(lab) == 8)
ok("label symmetric", np.allclose(lab, lab[::-1][np.r_[16, 0:16]][::-1]) or np.allclose(np.roll(lab[::-1], 0), lab[::-1]))
ok("label D=1", np.allclose(make_scale_label(1, 1.0), [1.0]))

# --- filter learn + self detection -------------------------------------------
K, D = 6, 17
W = rng.standard_normal((K, D))
samp = ScaleSample(matrix=W)
lam = 1e-2
filt = learn_scale_filter(samp, lab, lam)
resp = detect_scale(filt, samp, pyr)
ok("self-detection argmax center", np.argmax(resp.values) == 8)
ok("self-detection level near 0", abs(resp.level) < 0.5)
ok("self-detection factor near 1", abs(resp.factor - 1.0) < 0.02)

# --- dense circulant ridge oracle -------------------------------------------
Wt = W * samp.taper[None, :]
y = lab


def conv_matrix(w):
    M = np.zeros((D, D))
    for t in range(D):
        for s in range(D):
            M[t, s] = w[(t - s) % D]
    return M


A = np.hstack([conv_matrix(Wt[k]) for k in range(K)])  # D x KD
h_dense = np.linalg.solve(A.T @ A + lam * np.eye(K * D), A.T @ y).reshape(K, D)
h_mine = np.fft.ifft(filt.filter_hat, axis=1).real
ok("filter matches dense circulant ridge", np.max(np.abs(h_mine - h_dense)) < 1e-8)

pred_dense = A @ h_dense.ravel()
ok("self-detection equals dense ridge prediction", np.max(np.abs(resp.values - pred_dense)) < 1e-8)

# --- direct O(D^2) correlation detection oracle ------------------------------
Z = rng.standard_normal((K, D))
zs = ScaleSample(matrix=Z)
respz = detect_scale(filt, zs, pyr)
Zt = Z * zs.taper[None, :]
direct = np.zeros(D)
for t in range(D):
    for k in range(K):
        for tau in range(D):
            direct[t] += h_mine[k, tau] * Zt[k, (t - tau) % D]
ok("detection equals direct correlation", np.max(np.abs(respz.values - direct)) < 1e-10)

# --- zero sample --------------------------------------------------------------
z0 = ScaleSample(matrix=np.zeros((K, D)))
r0 = detect_scale(filt, z0, pyr)
ok("zero sample -> zero response, degenerate", np.allclose(r0.values, 0) and r0.degenerate and r0.factor == 1.0)

num0, den0, _ = scale_filter_terms(z0, lab, lam)
ok("zero sample learn: num 0 den lam", np.allclose(num0, 0) and np.allclose(den0, lam))

# --- update blending -----------------------------------------------------------
W2 = rng.standard_normal((K, D))
s2 = ScaleSample(matrix=W2)
n2, d2, _ = scale_filter_terms(s2, lab, lam)
up0 = update_scale_filter(filt, n2, d2, 0.0)
ok("eta=0 unchanged", np.allclose(up0.numerator, filt.numerator) and np.allclose(up0.denominator, filt.denominator))
up1 = update_scale_filter(filt, n2, d2, 1.0)
ok("eta=1 replaced", np.allclose(up1.numerator, n2) and np.allclose(up1.denominator, d2))
upb = update_scale_filter(filt, n2, d2, 0.025)
ok("eta=0.025 blend", np.allclose(upb.numerator, 0.975 * filt.numerator + 0.025 * n2))
ok("denominator stays >= lam", np.all(upb.denominator >= lam - 1e-15))
try:
    update_scale_filter(filt, n2, d2, 1.5)
    ok("eta out of range raises", False)
except InvalidInputError:
    ok("eta out of range raises", True)

# --- refine ---------------------------------------------------------------------
t = np.arange(32)
vals = np.cos(2 * np.pi * (t - 10.3) / 32)
ok("refine cos peak", abs(refine_scale(vals, 10) - 10.3) < 1e-6)
ok("refine D=1", refine_scale(np.array([3.0]), 5) == 0.0)
ok("refine constant -> argmax", refine_scale(np.ones(9), 5) == 0.0)

# --- shifted label spectrum -----------------------------------------------------
yh = np.fft.fft(lab)
for j in (1, -3, 5):
    sh = np.fft.ifft(shift_label_spectrum(yh, j)).real
    ok(f"shifted label j={j}", np.max(np.abs(sh - np.roll(lab, j))) < 1e-12)

# learning against shifted label puts the self-detection peak at center+j
j = 3
filt_j = learn_scale_filter(samp, np.roll(lab, j), lam)
resp_j = detect_scale(filt_j, samp, pyr)
ok("shifted-label learning shifts peak", np.argmax(resp_j.values) == 8 + j)

# equivalently via spectrum shift
num_s, den_s, _ = scale_filter_terms(samp, lab, lam)
numj = samp.spectrum.conj() * shift_label_spectrum(yh, j)[None, :]
ok("shift spectrum == rolled label terms", np.max(np.abs(numj - filt_j.numerator)) < 1e-9)

# --- vectorize order ------------------------------------------------------------
blk = np.arange(24).reshape(2, 3, 4)
v = vectorize_feature_stack(blk)
ok("vectorize F-order", v[0] == blk[0, 0, 0] and v[1] == blk[1, 0, 0] and v[2] == blk[0, 1, 0] and v[6] == blk[0, 0, 1])

# --- samplers --------------------------------------------------------------------
img = rng.random((120, 140, 3))
prov = MockProvider(stride=1, channels=6)
layer0 = prov.descriptor().layers[0].layer_id
fmap = provider_extract(prov, img, [layer0])[0]
pyr2 = build_scale_pyramid(24.0, 18.0, 1.05, 9)
canon = canonical_cell_grid((24.0, 18.0), stride=1)
ok("canonical grid small target", canon == (24, 18))

hs = holistic_scale_sample(fmap, (60.0, 70.0), pyr2, canon)
ok("holistic shape", hs.matrix.shape == (24 * 18 * 6, 9))

rb = build_region_batch(img, (60.0, 70.0), pyr2, canon)
ok("region batch stack shape", rb.stack.shape == (24, 18, 3, 9) and len(rb.rects) == 9)

rs = region_scale_sample(img, (60.0, 70.0), pyr2, prov, canon, layer0)
ok("region sample shape", rs.matrix.shape == (24 * 18 * 6, 9))
rs1 = region_scale_sample_single(img, (60.0, 70.0), pyr2, prov, canon, layer0)
ok("region batch == per-level loop", np.array_equal(rs.matrix, rs1.matrix))

# holistic == manual fractional-window composition (compose-of-primitives oracle)
from scaletrack.interpolation import resample, sample_window

cols = []
for lev in range(pyr2.count):
    sh, sw = pyr2.level_sizes()[lev]
    win = (60.0 - sh / 2, 60.0 + sh / 2, 70.0 - sw / 2, 70.0 + sw / 2)
    cols.append(vectorize_feature_stack(sample_window(fmap.data, win, canon)))
ok("holistic == per-level window composition", np.max(np.abs(hs.matrix - np.stack(cols, axis=1))) < 1e-12)

# stride-1 linear provider: feature-space pyramid ~= image-space pyramid
# (region quantizes crops to whole pixels, holistic does not; integral levels agree
# tightly, non-integral levels to sub-pixel crop accuracy)
na = np.linalg.norm(hs.matrix, axis=0) * np.linalg.norm(rs.matrix, axis=0)
cos = np.sum(hs.matrix * rs.matrix, axis=0) / na
ok("holistic ~ region on linear stride-1 provider", np.all(cos > 0.95))
center_lev = pyr2.count // 2  # level 0: window is integral (24 x 18 at integer center)
ok(
    "holistic == region at integral level",
    np.max(np.abs(hs.matrix[:, center_lev] - rs.matrix[:, center_lev])) < 1e-9,
)

# zoom correlation oracle: rescaling the frame by a^b moves the best-matching
# column to level -b (the level whose window renormalizes the zoomed target)
base_col = hs.matrix[:, center_lev]
for b in (2, -3):
    zoom = pyr2.factor ** b
    zoomed = resample(img, (round(120 * zoom), round(140 * zoom)))
    fmap_z = provider_extract(prov, zoomed, [layer0])[0]
    hz = holistic_scale_sample(fmap_z, (60.0 * zoom, 70.0 * zoom), pyr2, canon)
    sims = hz.matrix.T @ base_col / (
        np.linalg.norm(hz.matrix, axis=0) * np.linalg.norm(base_col) + 1e-12
    )
    ok(f"zoom oracle: a^{b} frame peaks at level {b}", np.argmax(sims) == center_lev + b)

gray = rng.random((100, 100))
pyr3 = build_scale_pyramid(32.0, 32.0, 1.05, 7)
bl = baseline_scale_sample(gray, (50.0, 50.0), pyr3, (32, 32), HogConfig(cell_size=4))
ok("baseline sample shape", bl.matrix.shape == (8 * 8 * 31, 7))

try:
    holistic_scale_sample(fmap, (500.0, 70.0), pyr2, canon)
    ok("center outside raises", False)
except InvalidInputError:
    ok("center outside raises", True)

# canonical grid cap
big = canonical_cell_grid((400.0, 300.0), stride=4)
ok("canonical grid capped", big[0] * big[1] <= 1024 + 64 and min(big) >= 2)

print("ALL SCALE CHECKS PASSED")
