"""Independent solver for a two-location, single-tier economy.

Writes the parameter file and the reference solution used by the tests.
Wages are normalized so that world income sum(w * L) equals 1.
"""
import json
import math

PARAMS = {
    "technology": [[1.0], [2.5]],
    "labor": [1.0, 1.6],
    "trade_cost": [[1.0, 1.7], [1.3, 1.0]],
    "labor_share": [1.0],
    "theta": 4.0,
    "sigma": 3.0,
}


def shares(w, p):
    T = [row[0] for row in p["technology"]]
    tau = p["trade_cost"]
    th = p["theta"]
    J = len(T)
    out = [[0.0] * J for _ in range(J)]
    scale = [0.0] * J
    for j in range(J):
        terms = [T[i] * (w[i] * tau[i][j]) ** (-th) for i in range(J)]
        scale[j] = sum(terms)
        for i in range(J):
            out[i][j] = terms[i] / scale[j]
    return out, scale


def normalize(w, L):
    s = sum(a * b for a, b in zip(w, L))
    return [a / s for a in w]


def excess(omega, p):
    L = p["labor"]
    w = normalize([1.0, omega], L)
    pi, _ = shares(w, p)
    income = [w[j] * L[j] for j in range(2)]
    earn0 = sum(pi[0][j] * income[j] for j in range(2))
    return earn0 - income[0]


def solve(p):
    lo, hi = 1e-6, 1e6
    for _ in range(400):
        mid = math.sqrt(lo * hi)
        # a higher relative wage abroad raises demand for location 0 labor
        if excess(mid, p) > 0:
            hi = mid
        else:
            lo = mid
    w = normalize([1.0, math.sqrt(lo * hi)], p["labor"])
    _, scale = shares(w, p)
    th, sg = p["theta"], p["sigma"]
    kappa = math.gamma((th + 1.0 - sg) / th) ** (1.0 / (1.0 - sg))
    prices = [kappa * s ** (-1.0 / th) for s in scale]
    return w, prices


if __name__ == "__main__":
    wages, prices = solve(PARAMS)
    with open("equilibrium_asymmetric.json", "w") as fh:
        json.dump(PARAMS, fh, indent=2)
        fh.write("\n")
    with open("equilibrium_asymmetric_oracle.json", "w") as fh:
        json.dump({"wages": wages, "prices": prices}, fh, indent=2)
        fh.write("\n")
