"""Symmetric unequally spaced linear arrays with uniform amplitude.

Positions are in wavelengths. An array of ``M`` elements is mirrored about
the origin: ``x_{-i} = -x_i`` and ``phi_{-i} = phi_i``. Odd ``M = 2N + 1``
arrays have a centre element at ``x_0 = 0`` (phase 0); even ``M = 2N`` arrays
do not.

Genome layout (what the optimizer sees):

* odd, ``N`` spacings ``d_1..d_N`` in ``[0.5, 1]``; ``x_k = d_1 + ... + d_k``.
* even, half-centre offset ``x_1`` in ``[0.25, 0.5]`` then ``N - 1`` spacings
  in ``[0.5, 1]``; the centre gap ``2 x_1`` is then also in ``[0.5, 1]``.
* ``position_phase`` mode appends ``N`` phases in ``[0, pi]``, one per mirrored
  pair, innermost first.

The peak sidelobe level is ``20 log10(max_S |AF| / |AF(theta0)|)`` where ``S``
is the angle grid minus the main lobe, taken as everything strictly between
the first local minima of ``|AF|`` on either side of ``theta0``.
"""

from dataclasses import dataclass

import numpy as np

from .objectives import ObjectiveSpec

__all__ = [
    "POSITION_ONLY",
    "POSITION_PHASE",
    "DegenerateLayoutError",
    "GridConfigError",
    "ArrayLayout",
    "SusaaEncoding",
    "AngleGrid",
    "genome_bounds",
    "decode_layout",
    "encode_layout",
    "array_factor",
    "mainlobe_region",
    "psll_db",
    "radiation_pattern_db",
    "susaa_objective",
    "uniform_layout",
]

POSITION_ONLY = "position_only"
POSITION_PHASE = "position_phase"
SPACING_MIN, SPACING_MAX = 0.5, 1.0
NO_SIDELOBE_DB = 0.0
_TINY = 1e-300


class DegenerateLayoutError(ValueError):
    """|AF(theta0)| vanishes, so the sidelobe ratio is undefined."""


class GridConfigError(ValueError):
    pass


@dataclass
class ArrayLayout:
    positions: np.ndarray
    phases: np.ndarray
    wavelength: float = 1.0

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        if self.positions.shape != self.phases.shape:
            raise ValueError("positions and phases must have the same length")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")

    @property
    def element_count(self):
        return self.positions.shape[0]

    def spacings(self):
        return np.diff(self.positions)

    def is_symmetric(self, tol=1e-12):
        return bool(
            np.allclose(self.positions, -self.positions[::-1], atol=tol, rtol=0)
            and np.allclose(self.phases, self.phases[::-1], atol=tol, rtol=0)
        )


@dataclass
class SusaaEncoding:
    mode: str
    element_count: int
    genome: np.ndarray = None

    def __post_init__(self):
        if self.mode not in (POSITION_ONLY, POSITION_PHASE):
            raise ValueError(f"mode must be {POSITION_ONLY!r} or {POSITION_PHASE!r}")
        self.element_count = int(self.element_count)
        if self.element_count < 2:
            raise ValueError("an array needs at least 2 elements")
        if self.genome is not None:
            self.genome = np.asarray(self.genome, dtype=float)
            if self.genome.shape != (self.dim,):
                raise ValueError(f"genome must have length {self.dim}, got {self.genome.shape}")

    @property
    def odd(self):
        return self.element_count % 2 == 1

    @property
    def half(self):
        """Number of mirrored pairs ``N``."""
        return self.element_count // 2

    @property
    def dim(self):
        return self.half * (2 if self.mode == POSITION_PHASE else 1)


@dataclass
class AngleGrid:
    theta_min: float = -90.0
    theta_max: float = 90.0
    step: float = 0.2
    theta0: float = 0.0

    def __post_init__(self):
        if not self.step > 0:
            raise GridConfigError("step must be positive")
        if not self.theta_min < self.theta_max:
            raise GridConfigError("theta_min must be below theta_max")
        k = (self.theta0 - self.theta_min) / self.step
        if abs(k - round(k)) > 1e-9 or not self.theta_min <= self.theta0 <= self.theta_max:
            raise GridConfigError("theta0 must be a grid point")

    @property
    def angles(self):
        n = int(round((self.theta_max - self.theta_min) / self.step)) + 1
        return self.theta_min + self.step * np.arange(n)

    @property
    def index0(self):
        return int(round((self.theta0 - self.theta_min) / self.step))


def genome_bounds(enc):
    """Lower and upper genome bounds for ``enc``."""
    n = enc.half
    lo = np.full(n, SPACING_MIN)
    hi = np.full(n, SPACING_MAX)
    if not enc.odd:
        lo[0], hi[0] = SPACING_MIN / 2, SPACING_MAX / 2
    if enc.mode == POSITION_PHASE:
        lo = np.concatenate([lo, np.zeros(n)])
        hi = np.concatenate([hi, np.full(n, np.pi)])
    return lo, hi


def _half_layout(enc, G):
    """Positive-side positions and pair phases for a batch of genomes."""
    n = enc.half
    pos = np.cumsum(G[:, :n], axis=1)
    if enc.mode == POSITION_PHASE:
        ph = G[:, n:]
    else:
        ph = np.zeros_like(pos)
    return pos, ph


def decode_layout(enc, genome=None, wavelength=1.0):
    """Full mirrored layout from a genome (``enc.genome`` if omitted)."""
    g = enc.genome if genome is None else np.asarray(genome, dtype=float)
    if g is None or g.shape != (enc.dim,):
        raise ValueError(f"genome must have length {enc.dim}")
    lo, hi = genome_bounds(enc)
    tol = 1e-12
    if np.any(g < lo - tol) or np.any(g > hi + tol):
        raise ValueError("genome outside its bounds")
    pos, ph = _half_layout(enc, g[None, :])
    pos, ph = pos[0], ph[0]
    if enc.odd:
        positions = np.concatenate([-pos[::-1], [0.0], pos])
        phases = np.concatenate([ph[::-1], [0.0], ph])
    else:
        positions = np.concatenate([-pos[::-1], pos])
        phases = np.concatenate([ph[::-1], ph])
    return ArrayLayout(positions * wavelength, phases, wavelength)


def encode_layout(layout, mode):
    """Inverse of :func:`decode_layout` for a symmetric layout."""
    m = layout.element_count
    x = layout.positions / layout.wavelength
    pos = x[(m + 1) // 2:]
    ph = layout.phases[(m + 1) // 2:]
    g = np.diff(np.concatenate([[0.0], pos]))
    if mode == POSITION_PHASE:
        g = np.concatenate([g, ph])
    return SusaaEncoding(mode, m, g)


def array_factor(layout, theta):
    """``|sum_i exp(j (2 pi x_i sin(theta) / wavelength + phi_i))|``; theta in degrees."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(np.deg2rad(theta))
    k = 2.0 * np.pi / layout.wavelength
    arg = k * np.multiply.outer(s, layout.positions) + layout.phases
    return np.abs(np.exp(1j * arg).sum(axis=-1))


def mainlobe_region(af, i0):
    """Indices ``(left, right)`` of the first local minima of ``af`` around ``i0``.

    The main lobe is the open interval ``(left, right)``. A side without a
    local minimum extends to the grid edge (``-1`` or ``len(af)``).
    """
    af = np.asarray(af)
    right = i0
    while right + 1 < af.size and af[right + 1] <= af[right]:
        right += 1
    if right == af.size - 1:
        right = af.size
    left = i0
    while left - 1 >= 0 and af[left - 1] <= af[left]:
        left -= 1
    if left == 0:
        left = -1
    return left, right


def psll_db(layout, grid=None):
    """Peak sidelobe level in dB relative to the response at ``grid.theta0``."""
    grid = AngleGrid() if grid is None else grid
    af = array_factor(layout, grid.angles)
    i0 = grid.index0
    peak = af[i0]
    if peak <= 1e-12 * layout.element_count:
        raise DegenerateLayoutError("array factor vanishes at theta0")
    left, right = mainlobe_region(af, i0)
    side = np.concatenate([af[:max(left + 1, 0)], af[right:]])
    if side.size == 0:
        raise GridConfigError("main lobe covers the whole angle grid")
    return float(20.0 * np.log10(side.max() / peak))


def radiation_pattern_db(layout, grid=None, floor_db=-100.0):
    """``(theta, 20 log10(|AF| / |AF(theta0)|))`` over the grid."""
    grid = AngleGrid() if grid is None else grid
    theta = grid.angles
    af = array_factor(layout, theta)
    peak = af[grid.index0]
    if peak <= 0:
        raise DegenerateLayoutError("array factor vanishes at theta0")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(af / peak)
    return theta, np.maximum(db, floor_db)


def uniform_layout(element_count, spacing=0.5):
    """Equally spaced symmetric array with zero phases."""
    m = int(element_count)
    x = (np.arange(m) - (m - 1) / 2.0) * spacing
    return ArrayLayout(x, np.zeros(m))


class _SymmetricPsll:
    """Batch sidelobe evaluator for symmetric arrays around broadside.

    The array factor of a mirrored layout is even in theta, so only the
    half grid ``[0, theta_max]`` is evaluated.
    """

    def __init__(self, enc, grid):
        if grid.theta0 != 0.0 or grid.theta_min != -grid.theta_max:
            raise GridConfigError("fast symmetric evaluation needs theta0 = 0 and a symmetric grid")
        self.enc = enc
        self.lower, self.upper = genome_bounds(enc)
        theta = grid.angles[grid.index0:]
        self.s2pi = 2.0 * np.pi * np.sin(np.deg2rad(theta))
        self.centre = 1.0 if enc.odd else 0.0

    def __call__(self, G):
        G = np.atleast_2d(G)
        if np.any(G < self.lower - 1e-12) or np.any(G > self.upper + 1e-12):
            raise ValueError("genome outside its bounds")
        pos, ph = _half_layout(self.enc, G)
        C = np.cos(pos[:, :, None] * self.s2pi)
        if self.enc.mode == POSITION_PHASE:
            re = self.centre + np.einsum("bn,bng->bg", 2.0 * np.cos(ph), C)
            im = np.einsum("bn,bng->bg", 2.0 * np.sin(ph), C)
            af = np.hypot(re, im)
        else:
            af = np.abs(self.centre + 2.0 * C.sum(axis=1))
        peak = af[:, 0]
        rising = np.diff(af, axis=1) > 0
        has_null = rising.any(axis=1)
        null = np.where(has_null, rising.argmax(axis=1), af.shape[1])
        cols = np.arange(af.shape[1])
        side = np.where(cols[None, :] >= null[:, None], af, -np.inf).max(axis=1)
        out = np.full(G.shape[0], NO_SIDELOBE_DB)
        ok = np.isfinite(side)
        out[ok] = 20.0 * np.log10(side[ok] / np.maximum(peak[ok], _TINY))
        return out


def susaa_objective(mode, element_count, grid=None):
    """Sidelobe-level minimization over genomes as an :class:`ObjectiveSpec`.

    A layout whose main lobe fills the whole grid scores ``NO_SIDELOBE_DB``.
    """
    grid = AngleGrid() if grid is None else grid
    enc = SusaaEncoding(mode, element_count)
    lo, hi = genome_bounds(enc)
    return ObjectiveSpec(
        name=f"susaa-{element_count}-{mode}",
        dim=enc.dim,
        lower=lo,
        upper=hi,
        func=_SymmetricPsll(enc, grid),
    )
