"""Regenerates data/automotive_surrogate.json.

A synthetic ten-task project with the shape of the automotive appearance
design case: 104 weakenable dependencies spread over the local DSM and the
two IDMs, a diagonal system DSM, and dependencies scaled so that rho(M)
sits just below 0.97 under the case-study interval pmf.

    python3 tools/make_surrogate.py data/automotive_surrogate.json
"""
import json
import sys

import numpy as np

M = 10
PMF = {4: 0.125, 5: 0.125, 6: 0.5, 7: 0.125, 8: 0.125}


def wtm(omega):
    w = omega * np.diag(omega)[None, :]
    np.fill_diagonal(w, 1 - np.diag(omega))
    return w


def rho(ol, os_, ols, osl):
    wl, ws = wtm(ol), wtm(os_)
    wls = ols * np.diag(ol)[None, :]
    wsl = osl * np.diag(os_)[None, :]
    z, eye = np.zeros((M, M)), np.eye(M)
    a1 = np.block([[wl, wsl, eye], [wls, ws, z], [z, z, z]])
    a2 = np.block([[wl, z, z], [wls, ws, z], [z, wsl, eye]])
    gen = sum(p * np.linalg.matrix_power(a2, h - 1) for h, p in PMF.items()) @ a1
    return max(abs(np.linalg.eigvals(gen)))


def main(out):
    rng = np.random.default_rng(1996)
    slots = [("L", i, j) for i in range(M) for j in range(M) if i != j]
    slots += [(b, i, j) for b in ("LS", "SL") for i in range(M) for j in range(M)]
    base = {k: np.zeros((M, M)) for k in ("L", "S", "LS", "SL")}
    for k in rng.choice(len(slots), 104, replace=False):
        b, i, j = slots[k]
        base[b][i, j] = rng.choice([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
    dl = np.round(rng.uniform(0.3, 0.6, M), 2)
    ds = np.round(rng.uniform(0.4, 0.7, M), 2)

    def build(c):
        ol = np.round(c * base["L"], 4)
        np.fill_diagonal(ol, dl)
        return ol, np.diag(ds), np.round(c * base["LS"], 4), np.round(c * base["SL"], 4)

    lo, hi = 0.0, 2.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if rho(*build(mid)) < 0.97:
            lo = mid
        else:
            hi = mid
    ol, os_, ols, osl = build(round(lo, 3))
    doc = {"m": M, "omega_l": ol.tolist(), "omega_s": os_.tolist(), "omega_ls": ols.tolist(),
           "omega_sl": osl.tolist(), "interval_pmf": {str(k): v for k, v in PMF.items()},
           "epsilon": 0.85, "cost_exponent_p": 1.0, "gamma": 0.1}
    with open(out, "w") as f:
        json.dump(doc, f, indent=1)


if __name__ == "__main__":
    main(sys.argv[1])
