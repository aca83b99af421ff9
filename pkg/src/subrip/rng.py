"""Seed derivation and Gaussian sampling.

Every random quantity in the package is drawn from a PCG64 stream seeded by
an unsigned 64-bit integer, so results do not depend on numpy's default
normal sampler or on how trials are scheduled across workers.

Child seeds are ``blake2b(label || master || index)`` truncated to 8 bytes
(little-endian).  Gaussians use the basic Box-Muller transform.  For ``m``
requested values, ``h = ceil(m / 2)`` and ``2h`` uniforms ``u`` are drawn from
``Generator.random``; then for ``i < h``::

    r_i        = sqrt(-2 log(1 - u[i]))
    z[i]       = r_i cos(2 pi u[h + i])
    z[h + i]   = r_i sin(2 pi u[h + i])

and the first ``m`` entries of ``z`` are returned.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * np.pi


def derive_seed(master_seed: int, index: int, stream: str = "trial") -> int:
    """Deterministic 64-bit child seed for ``(stream, master_seed, index)``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(stream.encode())
    h.update(struct.pack("<QQ", int(master_seed) & _MASK64, int(index) & _MASK64))
    return int.from_bytes(h.digest(), "little")


def uniform_stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def box_muller(u, scale=1.0):
    """Map an even-length array of uniforms on [0, 1) to standard normals
    (times ``scale``), using the layout described in the module docstring."""
    u = np.asarray(u, dtype=float)
    h = u.shape[0] // 2
    r = np.log1p(-u[:h])
    r *= -2.0 * scale * scale
    np.sqrt(r, out=r)
    theta = u[h:2 * h] * _TWO_PI
    out = np.empty(2 * h)
    np.cos(theta, out=out[:h])
    np.sin(theta, out=out[h:])
    out[:h] *= r
    out[h:] *= r
    return out


def gaussian(seed: int, size, scale=1.0) -> np.ndarray:
    """I.i.d. N(0, scale^2) array of shape ``size`` from the stream ``seed``.

    Entries fill the array in C (row-major) order.
    """
    shape = (size,) if np.isscalar(size) else tuple(size)
    m = int(np.prod(shape))
    h = (m + 1) // 2
    u = uniform_stream(seed).random(2 * h)
    return box_muller(u, scale)[:m].reshape(shape)


def gaussian_from(gen: np.random.Generator, size, scale=1.0) -> np.ndarray:
    """Same transform as :func:`gaussian`, continuing an existing stream."""
    shape = (size,) if np.isscalar(size) else tuple(size)
    m = int(np.prod(shape))
    h = (m + 1) // 2
    return box_muller(gen.random(2 * h), scale)[:m].reshape(shape)
