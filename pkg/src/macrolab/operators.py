"""Dense Hermitian linear algebra: eigensolves, operator functions, tensor
products, partial traces, spectral splits, channels, and seeded random draws.

All operators are plain complex numpy arrays.  Every function is pure; nothing
is mutated in place.  Random draws are deterministic functions of
(seed, tag, index) through numpy's PCG64 generator.
"""

from __future__ import annotations

import numpy as np

HERM_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
LOG_SUPPORT_RTOL = 1e-12
DIM_CAP = 4096

# RNG stream tags, one per draw type (seeded as default_rng([seed, tag, index]))
_TAG_DENSITY = 1
_TAG_UNITARY = 2
_TAG_HERMITIAN = 3
_TAG_OBSERVABLES = 4
_TAG_TEST_OP = 5
_TAG_KRAUS = 6


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def max_asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a: np.ndarray, atol: float = HERM_ATOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    asym = max_asymmetry(a)
    if asym > atol:
        raise ValueError(f"operator is not Hermitian: max asymmetry {asym:.3e}")


def check_density(rho: np.ndarray) -> None:
    check_hermitian(rho)
    tr = complex(np.trace(rho)).real
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    wmin = float(np.linalg.eigvalsh(hermitian_part(rho))[0])
    if wmin < -PSD_ATOL:
        raise ValueError(f"density matrix has negative eigenvalue {wmin:.3e}")


def check_test_operator(gamma: np.ndarray) -> None:
    check_hermitian(gamma)
    w = np.linalg.eigvalsh(hermitian_part(gamma))
    if w[0] < -PSD_ATOL or w[-1] > 1 + PSD_ATOL:
        raise ValueError(f"test operator spectrum [{w[0]:.3e}, {w[-1]:.3e}] "
                         "not contained in [0, 1]")


def eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns (w, v) with eigenvalues w ascending and eigenvector columns v so
    that h = v @ diag(w) @ v^dagger.  Rejects non-Hermitian input.
    """
    check_hermitian(h)
    return np.linalg.eigh(hermitian_part(h))


def _spectral_apply(h: np.ndarray, fn) -> np.ndarray:
    w, v = eig(h)
    return hermitian_part((v * fn(w)) @ v.conj().T)


def op_exp(h: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian operator, via its spectrum."""
    return _spectral_apply(h, np.exp)


def op_log_on_support(h: np.ndarray) -> np.ndarray:
    """Matrix log of a PSD operator, restricted to its support.

    Eigenvalues below LOG_SUPPORT_RTOL relative to the largest one are treated
    as kernel and mapped to 0 in the eigenbasis.  An eigenvalue below -1e-10
    is a domain error.
    """
    w, v = eig(h)
    if w[0] < -PSD_ATOL:
        raise ValueError(f"log of a non-PSD operator (eigenvalue {w[0]:.3e})")
    cut = LOG_SUPPORT_RTOL * max(float(w[-1]), 0.0)
    lw = np.where(w > cut, np.log(np.maximum(w, 1e-300)), 0.0)
    return hermitian_part((v * lw) @ v.conj().T)


def frechet_exp(a: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Directional derivative of expm at Hermitian a in direction e.

    Computed in a's eigenbasis with divided differences
    (exp(a_i) - exp(a_j)) / (a_i - a_j), diagonal limit exp(a_i).
    """
    if a.shape != e.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {e.shape}")
    w, v = eig(a)
    ew = np.exp(w)
    num = ew[:, None] - ew[None, :]
    den = w[:, None] - w[None, :]
    # divided-difference table; near-degenerate pairs fall back to the limit
    small = np.abs(den) < 1e-12
    phi = np.where(small, (ew[:, None] + ew[None, :]) / 2,
                   num / np.where(small, 1.0, den))
    et = v.conj().T @ e @ v
    out = v @ (phi * et) @ v.conj().T
    return hermitian_part(out) if max_asymmetry(e) <= HERM_ATOL else out


def tensor_power(rho: np.ndarray, n: int, cap: int = DIM_CAP) -> np.ndarray:
    """N-fold tensor (Kronecker) power."""
    if n < 1:
        raise ValueError("tensor power requires n >= 1")
    d = rho.shape[0]
    if d ** n > cap:
        raise ValueError(f"tensor power dimension {d ** n} exceeds cap {cap}")
    out = rho
    for _ in range(n - 1):
        out = np.kron(out, rho)
    return out


def embed_at_slot(ops_per_slot: list[np.ndarray]) -> np.ndarray:
    """Kronecker product of one operator per tensor slot, left to right."""
    out = ops_per_slot[0]
    for op in ops_per_slot[1:]:
        out = np.kron(out, op)
    return out


def partial_trace(rho_ab: np.ndarray, dims: tuple[int, int],
                  keep: str) -> np.ndarray:
    """Partial trace of a bipartite operator; keep is 'A' or 'B'."""
    da, db = dims
    if rho_ab.shape[0] != da * db:
        raise ValueError(f"dimension mismatch: operator dim {rho_ab.shape[0]} "
                         f"!= {da}*{db}")
    r = rho_ab.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("abcb->ac", r)
    if keep == "B":
        return np.einsum("abac->bc", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def pos_neg_parts(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectral split h = P - M with P, M >= 0 and P M = 0."""
    w, v = eig(h)
    pos = hermitian_part((v * np.maximum(w, 0.0)) @ v.conj().T)
    neg = hermitian_part((v * np.maximum(-w, 0.0)) @ v.conj().T)
    return pos, neg


def trace_norm(h: np.ndarray) -> float:
    pos, neg = pos_neg_parts(h)
    return float(np.trace(pos).real + np.trace(neg).real)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * trace_norm(rho - sigma)


# ---------------------------------------------------------------------------
# Seeded random suite
# ---------------------------------------------------------------------------

def _rng(seed: int, tag: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), tag, int(index)])


def _complex_gaussian(rng: np.random.Generator, dim: int,
                      cols: int | None = None) -> np.ndarray:
    cols = dim if cols is None else cols
    return rng.standard_normal((dim, cols)) + 1j * rng.standard_normal((dim, cols))


def random_density(seed: int, dim: int, index: int = 0) -> np.ndarray:
    """Full-rank Hilbert-Schmidt-style density matrix: G G^dagger normalized."""
    g = _complex_gaussian(_rng(seed, _TAG_DENSITY, index), dim)
    rho = g @ g.conj().T
    return hermitian_part(rho / np.trace(rho).real)


def random_unitary(seed: int, dim: int, index: int = 0) -> np.ndarray:
    """Haar-style unitary: QR of a complex Gaussian with phase fixing."""
    g = _complex_gaussian(_rng(seed, _TAG_UNITARY, index), dim)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_hermitian(seed: int, dim: int, index: int = 0) -> np.ndarray:
    g = _complex_gaussian(_rng(seed, _TAG_HERMITIAN, index), dim)
    return hermitian_part(g)


def random_observables(seed: int, dim: int, m: int,
                       index: int = 0) -> list[np.ndarray]:
    """m Hermitian Gaussian draws, trace-orthonormalized against the identity
    and against each other: tr(G_a) = 0, tr(G_a G_b) = delta_ab.
    """
    rng = _rng(seed, _TAG_OBSERVABLES, index)
    basis = [np.eye(dim, dtype=complex) / np.sqrt(dim)]
    out = []
    while len(out) < m:
        g = hermitian_part(_complex_gaussian(rng, dim))
        for b in basis:
            g = g - np.trace(b.conj().T @ g).real * b
        norm = np.sqrt(np.trace(g @ g).real)
        if norm < 1e-8:
            continue
        g = hermitian_part(g / norm)
        basis.append(g)
        out.append(g)
    return out


def random_test_operator(seed: int, dim: int, index: int = 0) -> np.ndarray:
    """Random test operator: Haar-style eigenbasis, uniform [0,1] spectrum."""
    rng = _rng(seed, _TAG_TEST_OP, index)
    g = _complex_gaussian(rng, dim)
    q, r = np.linalg.qr(g)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    w = rng.uniform(0.0, 1.0, dim)
    return hermitian_part((q * w) @ q.conj().T)


def random_kraus(seed: int, dim: int, n_ops: int,
                 index: int = 0) -> list[np.ndarray]:
    """Random Kraus set via a Haar-style isometry from dim to n_ops*dim."""
    g = _complex_gaussian(_rng(seed, _TAG_KRAUS, index), n_ops * dim, dim)
    q, r = np.linalg.qr(g)
    q = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    return [q[i * dim:(i + 1) * dim, :] for i in range(n_ops)]


def kraus_completeness_error(kraus: list[np.ndarray]) -> float:
    dim = kraus[0].shape[1]
    s = sum(k.conj().T @ k for k in kraus)
    return float(np.max(np.abs(s - np.eye(dim))))


def apply_channel(rho: np.ndarray, kraus: list[np.ndarray]) -> np.ndarray:
    """Apply a CPTP channel given by its Kraus operators."""
    err = kraus_completeness_error(kraus)
    if err > TRACE_ATOL:
        raise ValueError(f"incomplete Kraus set: completeness error {err:.3e}")
    out = sum(k @ rho @ k.conj().T for k in kraus)
    return hermitian_part(out)


def depolarizing_kraus(dim: int) -> list[np.ndarray]:
    """Measure-and-replace channel mapping every state to identity/dim."""
    out = []
    for i in range(dim):
        for j in range(dim):
            k = np.zeros((dim, dim), dtype=complex)
            k[i, j] = 1.0 / np.sqrt(dim)
            out.append(k)
    return out


# ---------------------------------------------------------------------------
# JSON wire format, shared by all modules
# ---------------------------------------------------------------------------

def operator_to_json(op: np.ndarray) -> dict:
    return {"dim": int(op.shape[0]),
            "re": np.real(op).tolist(),
            "im": np.imag(op).tolist()}


def operator_from_json(doc: dict) -> np.ndarray:
    dim = int(doc["dim"])
    op = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if op.shape != (dim, dim):
        raise ValueError(f"operator document shape {op.shape} != ({dim}, {dim})")
    return op
