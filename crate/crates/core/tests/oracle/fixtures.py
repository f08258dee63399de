"""Reference values for the statistics fixtures used by the Rust tests.

Run with numpy, scipy and statsmodels installed; paste the printed values
into the tests. Nothing here is executed by cargo.
"""
from fractions import Fraction

import numpy as np
import scipy.stats as st
import statsmodels.api as sm
from statsmodels.tsa.stattools import adfuller, kpss

np.set_printoptions(precision=17)


def show(name, v):
    print(name, repr(v))


# HAC, five observations, bandwidth 1, Bartlett weights, no small-sample factor
x = np.array([1.0, 2.0, 4.0, 3.0, 5.0])
y = np.array([1.2, 1.9, 4.1, 2.8, 5.3])
X = sm.add_constant(x)
fit = sm.OLS(y, X).fit(cov_type="HAC", cov_kwds={"maxlags": 1, "use_correction": False})
show("hac5.params", fit.params.tolist())
show("hac5.bse", fit.bse.tolist())
# by hand
e = y - X @ fit.params
u = X * e[:, None]
S = u.T @ u
g = u[1:].T @ u[:-1]
S = S + 0.5 * (g + g.T)
xtx = np.linalg.inv(X.T @ X)
V = xtx @ S @ xtx
show("hac5.hand_se", np.sqrt(np.diag(V)).tolist())

# OLS, six rows, exact rational normal equations
rows = [(1, 2, 3), (2, 1, 5), (3, 4, 4), (4, 3, 9), (5, 6, 8), (6, 5, 12)]
X6 = [[Fraction(1), Fraction(a), Fraction(b)] for a, b, _ in rows]
y6 = [Fraction(c) for _, _, c in rows]
A = [[sum(X6[r][i] * X6[r][j] for r in range(6)) for j in range(3)] for i in range(3)]
b = [sum(X6[r][i] * y6[r] for r in range(6)) for i in range(3)]
# Gauss-Jordan on rationals
M = [A[i] + [b[i]] for i in range(3)]
for c in range(3):
    p = next(r for r in range(c, 3) if M[r][c] != 0)
    M[c], M[p] = M[p], M[c]
    M[c] = [v / M[c][c] for v in M[c]]
    for r in range(3):
        if r != c:
            M[r] = [vr - M[r][c] * vc for vr, vc in zip(M[r], M[c])]
show("ols6.beta", [str(M[i][3]) for i in range(3)])
show("ols6.beta_f", [float(M[i][3]) for i in range(3)])

# KPSS, ten points, bandwidth 2
k10 = np.array([0.3, -0.1, 0.8, 1.1, 0.4, 0.9, 1.5, 1.2, 0.7, 1.9])
stat, p, lags, crit = kpss(k10, regression="c", nlags=2)
show("kpss10.stat", stat)
r = k10 - k10.mean()
eta = np.sum(np.cumsum(r) ** 2) / 100.0
s2 = (np.sum(r * r) + 2 * (2 / 3) * np.sum(r[1:] * r[:-1]) + 2 * (1 / 3) * np.sum(r[2:] * r[:-2])) / 10.0
show("kpss10.hand", eta / s2)

# ADF, sixty points of a deterministic AR(1)-like recursion
a = np.zeros(60)
for t in range(1, 60):
    a[t] = 0.6 * a[t - 1] + np.sin(1.7 * t) + 0.3 * np.cos(0.9 * t * t)
res = adfuller(a, maxlag=10, regression="c", autolag="AIC")
show("adf60.stat", res[0])
show("adf60.p", res[1])
show("adf60.usedlag", res[2])
show("adf60.nobs", res[3])
show("adf60.crit", res[4])
i80 = np.arange(80.0)
walk = np.cumsum(np.sin(0.7 * i80 * i80) + 0.2 * np.cos(1.3 * i80))
res = adfuller(walk, maxlag=3, regression="c", autolag="AIC")
show("adf_walk.stat", res[0])
show("adf_walk.p", res[1])
show("adf_walk.usedlag", res[2])

# Jarque-Bera
jb = np.array([0.1, -1.3, 2.2, 0.4, 0.0, 3.1, -0.7, 0.9, 1.6, -2.5, 0.2])
r = st.jarque_bera(jb)
show("jb.stat", r.statistic)
show("jb.p", r.pvalue)

# Mann-Whitney
a1 = [1.1, 3.4, 2.2, 5.9, 0.3, 4.4]
b1 = [2.8, 6.1, 7.3, 3.9, 5.2, 8.8, 6.6]
r = st.mannwhitneyu(a1, b1, alternative="two-sided", method="exact")
show("mw_exact.u", r.statistic)
show("mw_exact.p", r.pvalue)
rng = np.arange(55)
a2 = [float((i * 7) % 13) for i in range(25)]
b2 = [float((i * 5) % 11 + 1) for i in range(30)]
r = st.mannwhitneyu(a2, b2, alternative="two-sided", method="asymptotic", use_continuity=True)
show("mw_normal.u", r.statistic)
show("mw_normal.p", r.pvalue)

# Pearson with Fisher interval
px = [0.5, 1.9, 2.2, 3.8, 4.1, 5.5, 6.3, 7.0]
py = [1.0, 1.7, 3.5, 3.1, 5.2, 4.8, 7.9, 6.6]
r = st.pearsonr(px, py)
ci = r.confidence_interval(0.95)
show("pearson.r", r.statistic)
show("pearson.p", r.pvalue)
show("pearson.ci", (ci.low, ci.high))
