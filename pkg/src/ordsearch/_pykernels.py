"""Pure-Python/numpy reference kernels.

Used when the compiled ``_ckernels`` extension is not importable. Every
function here has the same signature and semantics as its compiled twin.
"""
import numpy as np


def flip_answer_bit(amps, n, k):
    """Return a copy of ``amps`` with the answer bit flipped on rows i >= k.

    ``amps`` is viewed as an (n, 2, W) array over (i-field, b, z).
    """
    out = np.array(amps, dtype=np.complex128, copy=True)
    if k < n:
        view = out.reshape(n, 2, -1)
        src = np.asarray(amps).reshape(n, 2, -1)
        view[k:, 0, :] = src[k:, 1, :]
        view[k:, 1, :] = src[k:, 0, :]
    return out


def index_mass(amps, n):
    """Squared amplitude mass per i-field value (length ``n``)."""
    a = np.asarray(amps).reshape(n, -1)
    return (a.real * a.real + a.imag * a.imag).sum(axis=1)


def apply_rotations(amps, ia, ib, u00, u01, u10, u11):
    """Apply a sequence of two-level rotations to ``amps`` in place.

    Rotation j acts on the pair (ia[j], ib[j]) with the 2x2 block
    [[u00, u01], [u10, u11]]. Order matters; the loop is sequential.
    """
    vec = amps.tolist()
    for a, b, c00, c01, c10, c11 in zip(
        ia.tolist(), ib.tolist(), u00.tolist(), u01.tolist(), u10.tolist(), u11.tolist()
    ):
        x = vec[a]
        y = vec[b]
        vec[a] = c00 * x + c01 * y
        vec[b] = c10 * x + c11 * y
    amps[:] = vec
    return amps
