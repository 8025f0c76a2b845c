import numpy as np

from scaletrack.errors import DegenerateResponseError, InvalidInputError
from scaletrack.translation import (
    PenaltyOperator,
    SampleMemory,
    TranslationFilter,
    learn_projection,
    learn_translation_filter,
    localize,
    make_translation_label,
    spatial_penalty,
    translation_objective,
    uniform_penalty,
)

rng = np.random.default_rng(7)
ok = lambda name, cond: print(("PASS " if cond else "FAIL ") + name) or (cond or (_ for _ in ()).throw(AssertionError(name)))

# --- learn_projection -------------------------------------------------------
X = rng.standard_normal((8, 6, 5))
C = learn_projection(X, 5)
flat = X.reshape(-1, 5)
cen = flat - flat.mean(axis=0)
rec = cen @ C @ C.T
ok("projection full-rank reconstruct", np.max(np.abs(rec - cen)) < 1e-8)
ok("projection orthonormal", np.max(np.abs(C.T @ C - np.eye(5))) < 1e-10)

X1 = np.zeros((6, 6, 4))
X1[:, :, 2] = rng.standard_normal((6, 6))
C1 = learn_projection(X1, 1)
ok("projection rank-1 channel", abs(C1[2, 0] - 1.0) < 1e-12 and np.max(np.abs(np.delete(C1, 2, axis=0))) < 1e-12)

X2 = rng.standard_normal((16, 16, 8))
C2 = learn_projection(X2, 4)
f2 = X2.reshape(-1, 8)
c2 = f2 - f2.mean(axis=0)
cov = c2.T @ c2 / c2.shape[0]
evals = np.sort(np.linalg.eigh(cov)[0])[::-1]
captured = np.trace(C2.T @ cov @ C2)
ok("projection captured variance vs dense eigh", abs(captured - evals[:4].sum()) / evals[:4].sum() < 1e-8)

try:
    learn_projection(X2, 9)
    ok("projection m>G raises", False)
except InvalidInputError:
    ok("projection m>G raises", True)

# --- penalty operator -------------------------------------------------------
pen = spatial_penalty((12, 10), (6.0, 5.0))
w_sp = pen.spatial_weight()
spec = np.zeros((12, 10), dtype=complex)
for (dy, dx), c in zip(pen.offsets, pen.coeffs):
    spec[dy % 12, dx % 10] += c
ok("penalty spectrum hermitian (weight real)", np.max(np.abs(np.fft.ifft2(spec).imag)) < 1e-10)
ok("penalty truncated weight min at center", np.unravel_index(np.argmin(w_sp), w_sp.shape) == (6, 5))
from scaletrack.translation import ideal_spatial_weight

w_ideal = ideal_spatial_weight((12, 10), (6.0, 5.0))
ok("ideal weight >= 1, min 1 at center", w_ideal.min() >= 1.0 - 1e-12 and abs(w_ideal[6, 5] - 1.0) < 1e-12)

x = rng.standard_normal((3, 12, 10)) + 1j * rng.standard_normal((3, 12, 10))
y = rng.standard_normal((3, 12, 10)) + 1j * rng.standard_normal((3, 12, 10))
lhs = np.vdot(y, pen.apply(x))
rhs_ = np.vdot(pen.apply_adjoint(y), x)
ok("penalty adjoint consistent", abs(lhs - rhs_) < 1e-9 * max(1.0, abs(lhs)))

# ||P(xhat)||^2 == n * ||w_sp * x||^2 for x real
xr = rng.standard_normal((12, 10))
xh = np.fft.fft2(xr)
n = 120
lhsn = np.vdot(pen.apply(xh), pen.apply(xh)).real
rhsn = n * np.sum((w_sp * xr) ** 2)
ok("penalty Parseval scaling", abs(lhsn - rhsn) / rhsn < 1e-9)

# --- CG vs closed form (uniform penalty, single channel, one sample) --------
H, W = 12, 10
label = make_translation_label((H, W), 1.5)
y_hat = np.fft.fft2(label)
feat = rng.standard_normal((H, W, 1))
cval = 0.7
lam = 0.01
filt = TranslationFilter(
    filter_hat=np.zeros((1, H, W), dtype=complex),
    projection=np.eye(1),
    label_hat=y_hat,
    window=np.ones((H, W)),
    penalty=uniform_penalty((H, W), cval),
    lam=lam,
)
mem = SampleMemory(capacity=5, decay=0.1)
z_hat = filt.prepare(feat, windowed=False)
mem.add(z_hat)
learned = learn_translation_filter(mem, filt, max_iters=300, tol=1e-12)
closed = np.conj(z_hat[0]) * y_hat / (np.abs(z_hat[0]) ** 2 + cval**2 + lam)
ok("CG matches closed form", np.max(np.abs(learned.filter_hat[0] - closed)) < 1e-6)

# detection on training sample reproduces label approximately near center
_, score, resp = localize(learned, z_hat)
ok("self-detection score positive", score > 0.5)

# --- huge lambda crushes filter ---------------------------------------------
filt_big = TranslationFilter(
    filter_hat=np.zeros((1, H, W), dtype=complex),
    projection=np.eye(1),
    label_hat=y_hat,
    window=np.ones((H, W)),
    penalty=uniform_penalty((H, W), 1.0),
    lam=1e6,
)
feat_unit = feat / np.linalg.norm(feat)
mem_big = SampleMemory()
mem_big.add(filt_big.prepare(feat_unit, windowed=False))
learned_big = learn_translation_filter(mem_big, filt_big, max_iters=100, tol=1e-12)
h_spatial = np.fft.ifft2(learned_big.filter_hat, axes=(-2, -1)).real
ok("lambda 1e6 crushes filter", np.linalg.norm(h_spatial) <= 1e-3)

# --- CG vs dense spatial least squares (8x8, truncated penalty, 2 samples) --
H2, W2 = 8, 8
n2 = H2 * W2
label2 = make_translation_label((H2, W2), 1.0)
y2_hat = np.fft.fft2(label2)
pen2 = spatial_penalty((H2, W2), (4.0, 4.0))
w_tr = pen2.spatial_weight()
filt2 = TranslationFilter(
    filter_hat=np.zeros((1, H2, W2), dtype=complex),
    projection=np.eye(1),
    label_hat=y2_hat,
    window=np.ones((H2, W2)),
    penalty=pen2,
    lam=0.02,
)
mem2 = SampleMemory(capacity=5, decay=0.3)
z_list = []
for s in range(2):
    f = rng.standard_normal((H2, W2, 1))
    zh = filt2.prepare(f, windowed=False)
    mem2.add(zh)
    z_list.append(np.fft.ifft2(zh[0]).real)

trace = []
learned2 = learn_translation_filter(mem2, filt2, max_iters=400, tol=1e-13, trace=trace)
g_freq = learned2.filter_hat[0]
g_sp = np.fft.ifft2(g_freq).real

# dense oracle: rows sqrt(w_s) * M_s (conv matrix), diag(w_tr), sqrt(lam) I
def conv_matrix(z):
    M = np.zeros((n2, n2))
    for ty in range(H2):
        for tx in range(W2):
            for sy in range(H2):
                for sx in range(W2):
                    M[ty * W2 + tx, sy * W2 + sx] = z[(ty - sy) % H2, (tx - sx) % W2]
    return M

rows = []
targets = []
for z, wgt in zip(z_list, mem2.weights):
    rows.append(np.sqrt(wgt) * conv_matrix(z))
    targets.append(np.sqrt(wgt) * label2.ravel())
rows.append(np.diag(w_tr.ravel()))
targets.append(np.zeros(n2))
rows.append(np.sqrt(0.02) * np.eye(n2))
targets.append(np.zeros(n2))
A = np.vstack(rows)
b = np.concatenate(targets)
g_dense = np.linalg.lstsq(A, b, rcond=None)[0].reshape(H2, W2)
ok("CG matches dense spatial solve", np.max(np.abs(g_sp - g_dense)) < 1e-6)
ok("objective monotone", all(trace[i + 1] <= trace[i] + 1e-9 * max(1, abs(trace[i])) for i in range(len(trace) - 1)))

# objective value sanity: F(g_cg) = n * spatial objective
F_freq = translation_objective(mem2, learned2, learned2.filter_hat)
F_sp = 0.0
for z, wgt in zip(z_list, mem2.weights):
    pred = conv_matrix(z) @ g_sp.ravel()
    F_sp += wgt * np.sum((pred - label2.ravel()) ** 2)
F_sp += np.sum((w_tr.ravel() * g_sp.ravel()) ** 2) + 0.02 * np.sum(g_sp**2)
ok("objective is n x spatial objective", abs(F_freq - n2 * F_sp) / (n2 * F_sp) < 1e-8)

# --- localize: self-detection and shift property -----------------------------
HL, WL = 16, 14
labelL = make_translation_label((HL, WL), 1.2)
yL_hat = np.fft.fft2(labelL)
fL = rng.standard_normal((HL, WL, 3))
filtL = TranslationFilter(
    filter_hat=np.zeros((3, HL, WL), dtype=complex),
    projection=np.eye(3),
    label_hat=yL_hat,
    window=np.ones((HL, WL)),
    penalty=uniform_penalty((HL, WL), 1.0),
    lam=0.01,
)
memL = SampleMemory()
zL = filtL.prepare(fL, windowed=False)
memL.add(zL)
filtL = learn_translation_filter(memL, filtL, max_iters=200, tol=1e-12)
pos, scoreL, _ = localize(filtL, zL)
ok("localize self-detection at center", abs(pos[0] - HL // 2) < 0.5 and abs(pos[1] - WL // 2) < 0.5)

f_shift = np.roll(fL, (3, 2), axis=(0, 1))
z_shift = filtL.prepare(f_shift, windowed=False)
pos_s, _, _ = localize(filtL, z_shift)
dy = (pos_s[0] - pos[0] + HL / 2) % HL - HL / 2
dx = (pos_s[1] - pos[1] + WL / 2) % WL - WL / 2
ok("localize shift (3,2)", abs(dy - 3) < 0.5 and abs(dx - 2) < 0.5)

try:
    localize(filtL, np.zeros_like(zL))
    ok("localize zero raises", False)
except DegenerateResponseError:
    ok("localize zero raises", True)

# --- memory rules ------------------------------------------------------------
m = SampleMemory(capacity=2, decay=0.025)
a = np.ones((1, 4, 4), dtype=complex)
m.add(a)
ok("memory first weight 1", m.weights == [1.0])
m.add(2 * a)
ok("memory decay weights", np.allclose(m.weights, [0.975, 0.025]))
m.add(3 * a)
ok("memory evicts lowest", len(m.samples) == 2 and np.allclose(m.samples[0], a) and abs(sum(m.weights) - 1) < 1e-12)
try:
    m.add(np.ones((1, 3, 3), dtype=complex))
    ok("memory dim mismatch raises", False)
except InvalidInputError:
    ok("memory dim mismatch raises", True)

print("ALL TRANSLATION CHECKS PASSED")
