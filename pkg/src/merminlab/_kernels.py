"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and ``MERMINLAB_NO_NUMBA``
is unset (or ``0``). Both paths implement identical arithmetic; the test suite
runs each kernel through both and compares.

Amplitude layout is little-endian: qubit ``q`` is bit ``q`` of the basis index.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLE = os.environ.get("MERMINLAB_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLE:
        raise ImportError("numba disabled by MERMINLAB_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def _split(amps: np.ndarray, q: int) -> np.ndarray:
    # view as (high, bit q, low) so that [:, 0, :] / [:, 1, :] are the pair halves
    return amps.reshape(-1, 2, 1 << q)


def apply_1q_numpy(amps: np.ndarray, q: int, u: np.ndarray) -> None:
    v = _split(amps, q)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_1q_batch_numpy(amps: np.ndarray, q: int, u: np.ndarray) -> None:
    v = amps.reshape(amps.shape[0], -1, 2, 1 << q)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, :, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_cnot_numpy(amps: np.ndarray, control: int, target: int) -> None:
    idx = np.arange(amps.size)
    sel = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    partner = sel | (1 << target)
    tmp = amps[sel].copy()
    amps[sel] = amps[partner]
    amps[partner] = tmp


def _popcount_parity(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    par = np.zeros(x.shape, dtype=np.uint64)
    while np.any(x):
        par ^= x & np.uint64(1)
        x >>= np.uint64(1)
    return par


def pauli_expect_numpy(amps: np.ndarray, flip: int, sign: int, n_y: int) -> complex:
    idx = np.arange(amps.size, dtype=np.uint64)
    par = _popcount_parity(idx & np.uint64(sign))
    signs = 1.0 - 2.0 * par.astype(np.float64)
    acc = np.sum(np.conj(amps[idx ^ np.uint64(flip)]) * amps * signs)
    return complex(acc) * (1j ** (n_y % 4))


def lhv_max_numpy(n: int, ymasks: np.ndarray, coeffs: np.ndarray) -> float:
    full = (1 << n) - 1
    u = np.arange(1 << n, dtype=np.int64)[:, None, None]  # X outcome bits
    v = np.arange(1 << n, dtype=np.int64)[None, :, None]  # Y outcome bits
    ym = ymasks[None, None, :]
    bits = (u & (full & ~ym)) | (v & ym)
    par = _popcount_parity(bits)
    vals = np.sum(coeffs[None, None, :] * (1.0 - 2.0 * par), axis=2)
    return float(vals.max())


def parity_signs_numpy(outcomes: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * _popcount_parity(outcomes).astype(np.float64)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _apply_1q_nb(amps, q, u00, u01, u10, u11):
        stride = 1 << q
        dim = amps.shape[0]
        for base in range(0, dim, 2 * stride):
            for k in range(base, base + stride):
                a0 = amps[k]
                a1 = amps[k + stride]
                amps[k] = u00 * a0 + u01 * a1
                amps[k + stride] = u10 * a0 + u11 * a1

    @njit(cache=True)
    def _apply_1q_batch_nb(amps, q, u00, u01, u10, u11):
        stride = 1 << q
        dim = amps.shape[1]
        for r in range(amps.shape[0]):
            for base in range(0, dim, 2 * stride):
                for k in range(base, base + stride):
                    a0 = amps[r, k]
                    a1 = amps[r, k + stride]
                    amps[r, k] = u00 * a0 + u01 * a1
                    amps[r, k + stride] = u10 * a0 + u11 * a1

    @njit(cache=True)
    def _apply_cnot_nb(amps, control, target):
        cbit = 1 << control
        tbit = 1 << target
        for k in range(amps.shape[0]):
            if (k & cbit) != 0 and (k & tbit) == 0:
                j = k | tbit
                tmp = amps[k]
                amps[k] = amps[j]
                amps[j] = tmp

    @njit(cache=True)
    def _parity(x):
        p = 0
        while x:
            p ^= 1
            x &= x - 1
        return p

    @njit(cache=True)
    def _pauli_expect_nb(amps, flip, sign):
        acc = 0.0 + 0.0j
        for k in range(amps.shape[0]):
            term = np.conj(amps[k ^ flip]) * amps[k]
            if _parity(k & sign):
                acc -= term
            else:
                acc += term
        return acc

    @njit(cache=True)
    def _lhv_max_nb(n, ymasks, coeffs):
        full = (1 << n) - 1
        best = -np.inf
        for u in range(1 << n):
            for v in range(1 << n):
                val = 0.0
                for t in range(ymasks.shape[0]):
                    ym = ymasks[t]
                    if _parity((u & (full & ~ym)) | (v & ym)):
                        val -= coeffs[t]
                    else:
                        val += coeffs[t]
                if val > best:
                    best = val
        return best

    @njit(cache=True)
    def _parity_signs_nb(outcomes):
        out = np.empty(outcomes.shape[0], dtype=np.float64)
        for i in range(outcomes.shape[0]):
            out[i] = -1.0 if _parity(outcomes[i]) else 1.0
        return out


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def apply_1q(amps: np.ndarray, q: int, u: np.ndarray, *, backend: str | None = None) -> None:
    """Apply a 2x2 unitary ``u`` to qubit ``q`` of ``amps`` in place."""
    if _use_numba(backend):
        _apply_1q_nb(amps, q, complex(u[0, 0]), complex(u[0, 1]), complex(u[1, 0]), complex(u[1, 1]))
    else:
        apply_1q_numpy(amps, q, u)


def apply_1q_batch(amps: np.ndarray, q: int, u: np.ndarray, *, backend: str | None = None) -> None:
    """Apply ``u`` to qubit ``q`` of every row of a (states, 2**n) array in place."""
    if _use_numba(backend):
        _apply_1q_batch_nb(amps, q, complex(u[0, 0]), complex(u[0, 1]), complex(u[1, 0]), complex(u[1, 1]))
    else:
        apply_1q_batch_numpy(amps, q, u)


def apply_cnot(amps: np.ndarray, control: int, target: int, *, backend: str | None = None) -> None:
    if _use_numba(backend):
        _apply_cnot_nb(amps, control, target)
    else:
        apply_cnot_numpy(amps, control, target)


def pauli_expect(amps: np.ndarray, flip: int, sign: int, n_y: int, *, backend: str | None = None) -> complex:
    """<psi|P|psi> for a Pauli string given as bitmasks.

    ``flip`` marks X/Y positions, ``sign`` marks Y/Z positions, ``n_y`` counts Y
    factors. Uses Y|0> = i|1>, Y|1> = -i|0>.
    """
    if _use_numba(backend):
        return complex(_pauli_expect_nb(amps, flip, sign)) * (1j ** (n_y % 4))
    return pauli_expect_numpy(amps, flip, sign, n_y)


def lhv_max(n: int, ymasks: np.ndarray, coeffs: np.ndarray, *, backend: str | None = None) -> float:
    """Max over all (a, a') in {-1,+1}^(2n) of sum_t c_t prod_i (a_i or a'_i)."""
    ymasks = np.ascontiguousarray(ymasks, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if _use_numba(backend):
        return float(_lhv_max_nb(n, ymasks, coeffs))
    return lhv_max_numpy(n, ymasks, coeffs)


def parity_signs(outcomes: np.ndarray, *, backend: str | None = None) -> np.ndarray:
    """(-1)**popcount for each integer outcome."""
    outcomes = np.ascontiguousarray(outcomes, dtype=np.int64)
    if _use_numba(backend):
        return _parity_signs_nb(outcomes)
    return parity_signs_numpy(outcomes)


def _use_numba(backend: str | None) -> bool:
    if backend is None:
        return HAVE_NUMBA
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return True
    if backend == "numpy":
        return False
    raise ValueError(f"unknown backend {backend!r}")


def active_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
