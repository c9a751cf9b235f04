import numpy as np


def random_density(dim, rng, rank=None):
    """Random mixed state from a Ginibre matrix."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_diagonal(dim, rng):
    p = rng.random(dim)
    return p / p.sum()


def enumerate_clicks(n, split, eta, dark):
    """Brute-force pattern probabilities for n photons on two on/off detectors.

    Enumerates every routing (photon i to A or B) and every detection mask
    (photon i registered or lost), 2^n x 2^n configurations, then folds in
    independent dark counts. Returns a dict keyed by pattern name.
    """
    size = 1 << n
    codes = np.arange(size)
    bits = (codes[:, None] >> np.arange(n)) & 1 if n else np.zeros((1, 0), dtype=int)
    n_ones = bits.sum(axis=1)
    p_route = split**n_ones * (1 - split) ** (n - n_ones)
    p_mask = eta**n_ones * (1 - eta) ** (n - n_ones)
    route = codes[:, None]
    mask = codes[None, :]
    hit_a = (route & mask) != 0
    hit_b = (~route & mask & (size - 1)) != 0
    weight = p_route[:, None] * p_mask[None, :]
    out = {"NONE": 0.0, "A_ONLY": 0.0, "B_ONLY": 0.0, "BOTH": 0.0}
    for da in (0, 1):
        for db in (0, 1):
            pd = (dark if da else 1 - dark) * (dark if db else 1 - dark)
            a = hit_a | bool(da)
            b = hit_b | bool(db)
            out["NONE"] += pd * weight[~a & ~b].sum()
            out["A_ONLY"] += pd * weight[a & ~b].sum()
            out["B_ONLY"] += pd * weight[~a & b].sum()
            out["BOTH"] += pd * weight[a & b].sum()
    out["A_OR_B_SINGLE"] = out["A_ONLY"] + out["B_ONLY"]
    return out


def chisq_pvalue(samples, pdf, bins=60, lo=-5.0, hi=5.0, min_expected=5.0):
    """Chi-square goodness of fit of samples against a density.

    Expected bin masses come from adaptive quadrature of ``pdf``; the tails
    are folded into the end bins and sparse bins are merged with their
    neighbours until every expected count reaches ``min_expected``.
    """
    from scipy.integrate import quad
    from scipy.stats import chisquare

    edges = np.linspace(lo, hi, bins + 1)
    mass = np.array([quad(pdf, a, b, epsabs=1e-13)[0] for a, b in zip(edges[:-1], edges[1:])])
    mass[0] += quad(pdf, -np.inf, lo)[0]
    mass[-1] += quad(pdf, hi, np.inf)[0]
    clipped = np.clip(samples, lo, np.nextafter(hi, lo))
    obs = np.histogram(clipped, edges)[0].astype(float)
    exp = mass / mass.sum() * obs.sum()
    merged_o, merged_e, acc_o, acc_e = [], [], 0.0, 0.0
    for o, e in zip(obs, exp):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            merged_o.append(acc_o)
            merged_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0:
        merged_o[-1] += acc_o
        merged_e[-1] += acc_e
    return chisquare(merged_o, merged_e).pvalue
