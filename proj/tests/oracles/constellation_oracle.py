"""Independent brute-force oracle for the 32-point expanded 4PSK constellation.

Recomputes everything from the 4PSK alphabet and the index table in
data/constellation.txt with numpy, without touching the C++ code. The printed
values are frozen into the C++ tests.
"""
import itertools
import pathlib
from collections import Counter

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parents[2]
S = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2)


def load_table():
    rows = []
    for line in (ROOT / "data" / "constellation.txt").read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        f = [x.strip() for x in line.split(",")]
        idx = [int(x) for x in f[1].split()]
        rows.append((int(f[0]), np.array(idx).reshape(2, 2)))
    return rows


def spectrum(mats):
    c = Counter()
    for a, b in itertools.combinations(mats, 2):
        d2 = np.sum(np.abs(a - b) ** 2)
        c[round(float(d2), 9)] += 1
    return sorted(c.items())


def real_span_residual(basis, m):
    vec = lambda x: np.concatenate([x.real.ravel(), x.imag.ravel()])
    B = np.stack([vec(b) for b in basis], axis=1)
    coef, *_ = np.linalg.lstsq(B, vec(m), rcond=None)
    return float(np.linalg.norm(vec(m) - B @ coef))


table = load_table()
mats = [S[idx] for _, idx in table]
base, primed = mats[:16], mats[16:]
print("BASE", spectrum(base))
print("PRIMED", spectrum(primed))
print("FULL", spectrum(mats))

r2 = 1 / np.sqrt(2)
beta = [r2 * np.array(m, dtype=complex) for m in
        ([[1, 0], [0, -1]], [[1j, 0], [0, 1j]], [[0, 1], [1, 0]], [[0, -1j], [1j, 0]])]
U = np.diag([1, -1])
for name, unitary in (("diag(1,-1)", U), ("iI", 1j * np.eye(2)), ("-I", -np.eye(2))):
    print("theorem1 residuals", name, [round(real_span_residual(beta, b @ unitary), 12) for b in beta])
print("corollary1 residuals", sorted({round(real_span_residual(beta, m), 12) for m in primed}))
print("base residuals", sorted({round(real_span_residual(beta, m), 12) for m in base}))
chis = [np.array(c) for c in itertools.product([-1, 1], repeat=4)]
gen_base = {tuple(np.round(sum(c * b for c, b in zip(chi, beta)), 12).ravel()) for chi in chis}
print("base set equals table rows 0..15:",
      gen_base == {tuple(np.round(m, 12).ravel()) for m in base})
gen_primed = {tuple(np.round(sum(c * b for c, b in zip(chi, beta)) @ U, 12).ravel()) for chi in chis}
print("primed set equals table rows 16..31:",
      gen_primed == {tuple(np.round(m, 12).ravel()) for m in primed})

# Frozen spectrum files, same layout as the CLI's `spectrum` output.
for name, pts in (("base", base), ("primed", primed), ("full", mats)):
    lines = ["distance2,multiplicity"] + [f"{d:.12f},{n}" for d, n in spectrum(pts)]
    (ROOT / "tests" / "oracles" / f"spectrum_{name}.csv").write_text("\n".join(lines) + "\n")
