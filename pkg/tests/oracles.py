"""Independent reference implementations used to cross-check the package.

Everything here is written the slow, obvious way on purpose: plain loops,
no shared code with fpcil itself.
"""

import numpy as np


def fd_gradients(loss_fn, params, h=1e-5):
    """Central-difference gradient of loss_fn() w.r.t. each array in params.

    Perturbs the arrays in place and restores them.  loss_fn must read the
    current parameter values on every call.
    """
    grads = []
    for p in params:
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            ij = it.multi_index
            keep = p[ij]
            p[ij] = keep + h
            hi = loss_fn()
            p[ij] = keep - h
            lo = loss_fn()
            p[ij] = keep
            g[ij] = (hi - lo) / (2.0 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic, numeric, floor=1e-5):
    """Worst elementwise |a - n| / max(|a|, |n|, floor) over paired arrays.

    The floor keeps near-zero entries honest: for them this is an absolute
    error check against floor.
    """
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def relu_preactivation_margin(weights, biases, X):
    """Smallest |pre-activation| anywhere in a rectified forward pass.

    Central differences are only trustworthy away from the kinks; instances
    whose margin is below ~1e-3 should be redrawn before checking.
    """
    H = np.asarray(X, dtype=np.float64)
    margin = np.inf
    for W, b in zip(weights, biases):
        Z = H @ W + b
        margin = min(margin, float(np.min(np.abs(Z))))
        H = np.maximum(Z, 0.0)
    return margin


def nearest_mean_brute_force(points, prototypes):
    """Exhaustive nearest-prototype labels; ties go to the lowest class id.

    prototypes: mapping class_id -> 1-D mean vector.
    """
    labels = []
    for x in points:
        best_id, best_d = None, None
        for cid in sorted(prototypes):
            d = 0.0
            for a, b in zip(x, prototypes[cid]):
                d += (a - b) ** 2
            if best_d is None or d < best_d:
                best_id, best_d = cid, d
        labels.append(best_id)
    return np.array(labels)


def mahalanobis_brute_force(points, stats):
    """Exhaustive squared-Mahalanobis argmin via explicit inverse.

    stats: mapping class_id -> (mean, covariance).  Ties to lowest id.
    """
    inv = {cid: np.linalg.inv(cov) for cid, (_, cov) in stats.items()}
    labels = []
    for x in points:
        best_id, best_d = None, None
        for cid in sorted(stats):
            mu, _ = stats[cid]
            diff = x - mu
            d = float(diff @ inv[cid] @ diff)
            if best_d is None or d < best_d:
                best_id, best_d = cid, d
        labels.append(best_id)
    return np.array(labels)
