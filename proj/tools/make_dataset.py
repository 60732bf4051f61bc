#!/usr/bin/env python3
"""Regenerates data/pima_diabetes.csv, the bundled sample dataset.

The classic Pima Indians Diabetes table (768 rows, 8 numeric features,
500 negative / 268 positive) is not redistributable from its original
host, so the repo ships a deterministic synthetic reconstruction: rows
are drawn from per-class distributions matched to the published Pima
summary statistics (class-conditional means and standard deviations,
feature correlations, and the characteristic zero-inflation of the
insulin / skin-fold / blood-pressure columns), then rounded to the
original table's precision. Class counts are exact (500/268), so shape
and baseline-rate properties match the real table exactly; model scores
are comparable but not identical to those reported for the real data.

Running this script with no arguments reproduces the committed CSV
byte for byte. Requires numpy only.
"""
import argparse
import numpy as np

FEATURES = [
    "Number of times pregnant",
    "Plasma glucose concentration a 2 hours in an oral glucose tolerance test",
    "Diastolic blood pressure (mm Hg)",
    "Triceps skin fold thickness (mm)",
    "2-Hour serum insulin (mu U/ml)",
    "Body mass index (weight in kg/(height in m)^2)",
    "Diabetes pedigree function",
    "Age (years)",
]
TARGET = "Class variable"

#            preg    gluc     bp      skin    insulin  bmi     dpf     age
NEG_MEAN = [3.298, 109.98, 68.184, 19.664, 68.792, 30.304, 0.4297, 31.19]
NEG_STD  = [3.017, 26.14,  18.06,  14.89,  98.87,  7.69,   0.299,  11.67]
POS_MEAN = [4.866, 141.26, 70.825, 22.164, 100.34, 35.143, 0.5505, 37.07]
POS_STD  = [3.741, 31.94,  21.49,  17.68,  138.69, 7.26,   0.372,  10.97]

# separation multiplier calibrated so 10-fold CV logistic-regression
# accuracy on a 70% stratified train split lands near 0.769
ALPHA = 1.10
SEED = 20240601


def corr_matrix():
    c = np.full((8, 8), 0.05)
    np.fill_diagonal(c, 1.0)
    pairs = {(0, 7): 0.54, (1, 4): 0.33, (3, 5): 0.39, (3, 4): 0.44,
             (2, 7): 0.24, (2, 5): 0.28, (1, 7): 0.26, (5, 6): 0.14,
             (1, 5): 0.22, (0, 2): 0.14}
    for (i, j), v in pairs.items():
        c[i, j] = c[j, i] = v
    w, _ = np.linalg.eigh(c)
    if w.min() < 1e-6:
        c += np.eye(8) * (1e-6 - w.min())
    return c


def generate(alpha=ALPHA, seed=SEED, n_neg=500, n_pos=268):
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(corr_matrix())
    mid = (np.asarray(NEG_MEAN) + np.asarray(POS_MEAN)) / 2.0
    rows, labels = [], []
    for label, n, mu0, sd0 in ((0, n_neg, NEG_MEAN, NEG_STD), (1, n_pos, POS_MEAN, POS_STD)):
        mu = mid + alpha * (np.asarray(mu0, float) - mid)
        sd = np.asarray(sd0, float)
        z = rng.standard_normal((n, 8)) @ chol.T
        x = np.empty((n, 8))
        for j in (0, 1, 2, 3, 4, 5):
            x[:, j] = mu[j] + sd[j] * z[:, j]
        # dpf and age are right-skewed; use (shifted) lognormal marginals
        for j, shift in ((6, 0.0), (7, 20.0)):
            m, s = mu[j] - shift, sd[j]
            sig2 = np.log1p((s / m) ** 2)
            x[:, j] = shift + np.exp(np.log(m) - sig2 / 2.0 + np.sqrt(sig2) * z[:, j])
        # zero-inflation: skin-fold zeros strongly imply insulin zeros
        r_skin = 0.278 if label == 0 else 0.328
        r_ins_else = 0.292 if label == 0 else 0.308
        r_bp = 0.038 if label == 0 else 0.060
        r_glu = 0.006 if label == 0 else 0.007
        u = rng.random((n, 5))
        skin0 = u[:, 0] < r_skin
        ins0 = np.where(skin0, u[:, 1] < 0.94, u[:, 1] < r_ins_else)
        x[skin0, 3] = 0.0
        x[ins0, 4] = 0.0
        x[u[:, 2] < r_bp, 2] = 0.0
        x[u[:, 3] < r_glu, 1] = 0.0
        x[u[:, 4] < 0.014, 5] = 0.0

        def nz(col, lo, hi):
            return np.where(x[:, col] == 0.0, 0.0, np.clip(x[:, col], lo, hi))

        x[:, 0] = np.clip(np.rint(x[:, 0]), 0, 17)
        x[:, 1] = np.rint(nz(1, 44, 199))
        x[:, 2] = np.rint(nz(2, 24, 122))
        x[:, 3] = np.rint(nz(3, 7, 99))
        x[:, 4] = np.rint(nz(4, 14, 846))
        x[:, 5] = np.round(nz(5, 18.2, 67.1), 1)
        x[:, 6] = np.round(np.clip(x[:, 6], 0.078, 2.42), 3)
        x[:, 7] = np.clip(np.rint(x[:, 7]), 21, 81)
        rows.append(x)
        labels.append(np.full(n, label, dtype=int))
    X = np.vstack(rows)
    y = np.concatenate(labels)
    order = rng.permutation(len(y))
    return X[order], y[order]


def write_csv(path, X, y):
    with open(path, "w", newline="\n") as f:
        f.write(",".join(FEATURES + [TARGET]) + "\n")
        for row, label in zip(X, y):
            f.write("%d,%d,%d,%d,%d,%.1f,%.3f,%d,%d\n"
                    % (row[0], row[1], row[2], row[3], row[4], row[5], row[6], row[7], label))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out", default="data/pima_diabetes.csv")
    args = ap.parse_args()
    X, y = generate()
    write_csv(args.out, X, y)
    print(f"wrote {args.out}: {X.shape[0]} rows, {X.shape[1]} features, "
          f"{int((y == 1).sum())} positive / {int((y == 0).sum())} negative")
