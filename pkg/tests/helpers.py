"""Random instance generators shared by the tests."""

import numpy as np


def random_covariance(rng, n, rank=None):
    rank = n if rank is None else rank
    A = rng.normal(size=(n, rank))
    return A @ A.T + (1e-3 * np.eye(n) if rank == n else 0.0)


def random_pmf(rng, shape, sparsity=0.0):
    p = rng.random(shape)
    if sparsity:
        p = np.where(rng.random(shape) < sparsity, 0.0, p)
        if p.sum() == 0:
            p.flat[0] = 1.0
    return p / p.sum()


def random_kernel(rng, n_in, n_out, sparsity=0.0):
    """Random conditional table with input axes ``n_in`` and output axes ``n_out``."""
    p = rng.random(tuple(n_in) + tuple(n_out))
    if sparsity:
        p = np.where(rng.random(p.shape) < sparsity, 0.0, p)
        p[..., 0, 0] += 1e-3
    return p / p.sum(axis=tuple(range(-len(n_out), 0)), keepdims=True)


def logdet_mi(S, A, B, C=()):
    """I(A;B|C) in bits from the four-logdet formula (non-singular blocks only)."""

    def ld(idx):
        idx = sorted(idx)
        return np.linalg.slogdet(S[np.ix_(idx, idx)])[1] if idx else 0.0

    A, B, C = set(A), set(B), set(C)
    return 0.5 * (ld(A | C) + ld(B | C) - ld(C) - ld(A | B | C)) / np.log(2)


def sample_gaussian(S, n, rng):
    w, V = np.linalg.eigh(S)
    root = V * np.sqrt(np.maximum(w, 0.0))
    return rng.standard_normal((n, S.shape[0])) @ root.T


def mc_gaussian_mi(S, A, B, C, n, rng):
    """Monte-Carlo oracle: sample covariance of ``n`` draws, plugged into the logdet formula."""
    X = sample_gaussian(S, n, rng)
    return logdet_mi(np.cov(X, rowvar=False), A, B, C)


def brute_mi(table, A, B, C=()):
    """I(A;B|C) by explicit summation over every cell (independent of the package)."""
    nd = table.ndim
    A, B, C = tuple(sorted(A)), tuple(sorted(B)), tuple(sorted(C))

    def marg(keep):
        drop = tuple(i for i in range(nd) if i not in keep)
        return table.sum(axis=drop, keepdims=True)

    pabc, pac, pbc, pc = marg(A + B + C), marg(A + C), marg(B + C), marg(C)
    total = 0.0
    for idx in np.ndindex(table.shape):
        p = table[idx]
        if p <= 0:
            continue

        def at(m):
            return m[tuple(i if m.shape[k] == table.shape[k] else 0 for k, i in enumerate(idx))]

        total += p * np.log2(at(pabc) * at(pc) / (at(pac) * at(pbc)))
    return total
