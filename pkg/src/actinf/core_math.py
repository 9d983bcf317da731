"""Numerically stable primitives for categorical and Dirichlet distributions.

All probability vectors live on the simplex (entries >= 0, summing to 1) and
are floored at ``PROB_FLOOR`` before any logarithm is taken, so deterministic
models with exact zeros never produce -inf. Everything here is a pure function
of its inputs.
"""

import math

import numpy as np

# Categorical parameters are floored at this value before taking logs.
PROB_FLOOR = 1e-16

# Bernoulli-number coefficients of the asymptotic expansion of the digamma
# function: psi(x) ~ ln x - 1/(2x) - sum_k c_k / x^(2k).
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
)

_lgamma = np.vectorize(math.lgamma, otypes=[float])


def floored_log(p: np.ndarray) -> np.ndarray:
    """Natural log with entries clipped up to PROB_FLOOR first."""
    return np.log(np.maximum(p, PROB_FLOOR))


def softmax(weights: np.ndarray, axis: int = -1) -> np.ndarray:
    """Map log-weights to the simplex, stabilised by max-subtraction.

    Invariant under adding a constant to all entries along ``axis``. Raises
    ValueError on non-finite input, which always signals a corrupted upstream
    computation rather than a value this module should paper over.
    """
    w = np.asarray(weights, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("softmax received non-finite log-weights")
    shifted = w - np.max(w, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def kl_categorical(p: np.ndarray, q: np.ndarray) -> float:
    """KL divergence sum_i p_i ln(p_i / q_i), with 0 ln(0/q) = 0.

    Both arguments are floored before the log, so a deterministic q cannot
    blow up the divergence beyond the floor's ~36.8 nats per entry.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"support mismatch: {p.shape} vs {q.shape}")
    terms = np.where(p > 0.0, p * (floored_log(p) - floored_log(q)), 0.0)
    return float(np.sum(terms))


def entropy(p: np.ndarray) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    terms = np.where(p > 0.0, p * floored_log(p), 0.0)
    return float(-np.sum(terms))


def digamma(x):
    """Digamma function, accurate to ~1e-10 for positive arguments.

    Uses the upward recurrence psi(x) = psi(x + 1) - 1/x to push the argument
    to >= 6, then a six-term asymptotic expansion. Accepts scalars or arrays;
    raises on any nonpositive entry.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("digamma requires strictly positive arguments")
    work = arr.copy()
    acc = np.zeros_like(work)
    for _ in range(6):
        small = work < 6.0
        if not small.any():
            break
        acc[small] -= 1.0 / work[small]
        work[small] += 1.0
    inv2 = 1.0 / (work * work)
    tail = np.zeros_like(work)
    power = inv2.copy()
    for coeff in _DIGAMMA_TAIL:
        tail += coeff * power
        power *= inv2
    result = acc + np.log(work) - 0.5 / work - tail
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(result)
    return result


def expected_log_dirichlet(counts: np.ndarray) -> np.ndarray:
    """Column-wise expectation of log-probabilities under Dirichlet counts.

    For a counts matrix whose column j parameterises one Dirichlet
    distribution, entry (i, j) of the result is psi(counts[i, j]) minus
    psi of the column total. Each column's exponentiated entries sum to
    less than 1 (Jensen).
    """
    counts = np.asarray(counts, dtype=float)
    if np.any(counts <= 0.0):
        raise ValueError("Dirichlet counts must be strictly positive")
    totals = counts.sum(axis=0, keepdims=True)
    return digamma(counts) - digamma(totals)


def kl_dirichlet(post: np.ndarray, prior: np.ndarray) -> float:
    """Sum over columns of the Dirichlet KL divergence KL(post_j || prior_j).

    Both arguments are matrices of strictly positive counts with matching
    shape; columns are treated as independent distributions.
    """
    post = np.asarray(post, dtype=float)
    prior = np.asarray(prior, dtype=float)
    if post.shape != prior.shape:
        raise ValueError(f"shape mismatch: {post.shape} vs {prior.shape}")
    if np.any(post <= 0.0) or np.any(prior <= 0.0):
        raise ValueError("Dirichlet counts must be strictly positive")
    post_tot = post.sum(axis=0)
    prior_tot = prior.sum(axis=0)
    log_beta_diff = (
        _lgamma(post_tot)
        - _lgamma(post).sum(axis=0)
        - _lgamma(prior_tot)
        + _lgamma(prior).sum(axis=0)
    )
    weighted = ((post - prior) * (digamma(post) - digamma(post_tot))).sum(axis=0)
    return float(np.sum(log_beta_diff + weighted))
