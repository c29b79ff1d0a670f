"""Seeded, splittable random streams.

Generator
---------
Each stream is a Philox-4x64-10 counter-based generator (numpy's
``np.random.Philox``) keyed with the 128-bit key ``(seed, stream_id)`` and a
counter starting at zero. A uniform double is ``(u64 >> 11) * 2**-53`` from one
raw 64-bit output, so every value lies in ``[0, 1)``.

Normal draws use the Box-Muller transform on consecutive uniform pairs
``(u1, u2)``::

    rad = sqrt(-2 ln(1 - u1))
    z0  = rad * cos(2 pi u2)
    z1  = rad * sin(2 pi u2)

``z0`` is returned first; ``z1`` is held as a spare and returned by the next
normal request before any new uniforms are consumed.

Stream assignment used by the optimizers: stream 0 initializes the population,
stream 1 drives the lambda schedule, streams ``2 .. N+1`` belong to the
individual local searches.
"""

import numpy as np

__all__ = ["RngStream", "make_stream", "INIT_STREAM", "LAMBDA_STREAM", "rls_stream_id"]

INIT_STREAM = 0
LAMBDA_STREAM = 1

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * np.pi


def rls_stream_id(i):
    """Stream id of the ``i``-th (zero-based) local search."""
    return 2 + i


class RngStream:
    """Deterministic uniform / standard-normal source for one logical task.

    Parameters
    ----------
    seed : int
        64-bit seed (taken modulo 2**64).
    stream_id : int
        64-bit stream identifier (taken modulo 2**64).
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self._spare = None

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def uniforms(self, n):
        """Return ``n`` uniforms in ``[0, 1)`` as a float64 array."""
        raw = self._bitgen.random_raw(int(n))
        return (raw >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)

    def next_uniform(self):
        return float(self.uniforms(1)[0])

    def normals(self, n):
        """Return ``n`` standard-normal draws (Box-Muller, spare-aware)."""
        n = int(n)
        out = np.empty(n)
        k = 0
        if n and self._spare is not None:
            out[0] = self._spare
            self._spare = None
            k = 1
        rest = n - k
        if rest > 0:
            pairs = (rest + 1) // 2
            u = self.uniforms(2 * pairs)
            rad = np.sqrt(-2.0 * np.log1p(-u[0::2]))
            ang = _TWO_PI * u[1::2]
            z = np.empty(2 * pairs)
            z[0::2] = rad * np.cos(ang)
            z[1::2] = rad * np.sin(ang)
            out[k:] = z[:rest]
            if rest % 2:
                self._spare = float(z[-1])
        return out

    def next_gaussian(self):
        return float(self.normals(1)[0])


def make_stream(seed, stream_id=0):
    """Create the stream identified by ``(seed, stream_id)``."""
    return RngStream(seed, stream_id)
