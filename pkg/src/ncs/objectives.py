"""Box-constrained benchmark problems.

Builtin functions (all minimized, global minimum value 0):

============  ======================  ===========================================
name          default domain          global optimum
============  ======================  ===========================================
sphere        [-100, 100]^D           x = 0
rosenbrock    [-30, 30]^D             x = (1, ..., 1)
ackley        [-32.768, 32.768]^D     x = 0
rastrigin     [-5.12, 5.12]^D         x = 0
griewank      [-600, 600]^D           x = 0
schwefel      [-500, 500]^D           x_d = 420.9687 (value ~1.3e-5 per dim)
weierstrass   [-0.5, 0.5]^D           x = 0
============  ======================  ===========================================

Formulas::

    sphere       sum x_d^2
    rosenbrock   sum_{d<D} 100 (x_{d+1} - x_d^2)^2 + (x_d - 1)^2
    ackley       -20 exp(-0.2 sqrt(mean x_d^2)) - exp(mean cos(2 pi x_d)) + 20 + e
    rastrigin    10 D + sum x_d^2 - 10 cos(2 pi x_d)
    griewank     1 + sum x_d^2 / 4000 - prod cos(x_d / sqrt(d))
    schwefel     418.9829 D - sum x_d sin(sqrt|x_d|)
    weierstrass  sum_d sum_k a^k cos(2 pi b^k (x_d + 0.5)) - D sum_k a^k cos(pi b^k)
                 with a = 0.5, b = 3, k = 0..20

A transformed problem evaluates ``base(R @ (x - shift)) + f_bias``.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

__all__ = [
    "BUILTINS",
    "DEFAULT_BOUNDS",
    "ObjectiveSpec",
    "TransformFileError",
    "TransformFileMissing",
    "TransformCountError",
    "NonOrthogonalRotation",
    "evaluate_builtin",
    "apply_transform",
    "load_transform_file",
    "make_problem",
]

SCHWEFEL_OPT = 420.9687
WEIERSTRASS_A = 0.5
WEIERSTRASS_B = 3.0
WEIERSTRASS_KMAX = 20
ORTHO_TOL = 1e-8


def _sphere(X):
    return np.sum(X * X, axis=-1)


def _rosenbrock(X):
    a = X[..., :-1]
    b = X[..., 1:]
    return np.sum(100.0 * (b - a * a) ** 2 + (a - 1.0) ** 2, axis=-1)


def _ackley(X):
    d = X.shape[-1]
    s1 = np.sum(X * X, axis=-1) / d
    s2 = np.sum(np.cos(2.0 * np.pi * X), axis=-1) / d
    return -20.0 * np.exp(-0.2 * np.sqrt(s1)) - np.exp(s2) + 20.0 + np.e


def _rastrigin(X):
    d = X.shape[-1]
    return 10.0 * d + np.sum(X * X - 10.0 * np.cos(2.0 * np.pi * X), axis=-1)


def _griewank(X):
    idx = np.sqrt(np.arange(1, X.shape[-1] + 1))
    return 1.0 + np.sum(X * X, axis=-1) / 4000.0 - np.prod(np.cos(X / idx), axis=-1)


def _schwefel(X):
    d = X.shape[-1]
    return 418.9829 * d - np.sum(X * np.sin(np.sqrt(np.abs(X))), axis=-1)


_WK = np.arange(WEIERSTRASS_KMAX + 1)
_WA = WEIERSTRASS_A ** _WK
_WB = WEIERSTRASS_B ** _WK


def _weierstrass(X):
    d = X.shape[-1]
    terms = _WA * np.cos(2.0 * np.pi * _WB * (X[..., None] + 0.5))
    offset = d * np.sum(_WA * np.cos(np.pi * _WB))
    return np.sum(terms, axis=(-2, -1)) - offset


BUILTINS = {
    "sphere": _sphere,
    "rosenbrock": _rosenbrock,
    "ackley": _ackley,
    "rastrigin": _rastrigin,
    "griewank": _griewank,
    "schwefel": _schwefel,
    "weierstrass": _weierstrass,
}

DEFAULT_BOUNDS = {
    "sphere": (-100.0, 100.0),
    "rosenbrock": (-30.0, 30.0),
    "ackley": (-32.768, 32.768),
    "rastrigin": (-5.12, 5.12),
    "griewank": (-600.0, 600.0),
    "schwefel": (-500.0, 500.0),
    "weierstrass": (-0.5, 0.5),
}


class TransformFileError(ValueError):
    """Base class for malformed transform data."""


class TransformFileMissing(TransformFileError, FileNotFoundError):
    pass


class TransformCountError(TransformFileError):
    pass


class NonOrthogonalRotation(TransformFileError):
    pass


def _base_function(name):
    try:
        return BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin function {name!r}; choose from {sorted(BUILTINS)}"
        ) from None


def evaluate_builtin(name, x):
    """Evaluate builtin ``name`` at ``x`` (1-D) or at each row of ``x`` (2-D)."""
    x = np.asarray(x, dtype=float)
    val = _base_function(name)(x)
    return float(val) if np.ndim(val) == 0 else val


def _check_rotation(R, dim):
    R = np.asarray(R, dtype=float)
    if R.shape != (dim, dim):
        raise TransformCountError(f"rotation must be {dim}x{dim}, got shape {R.shape}")
    err = np.max(np.abs(R.T @ R - np.eye(dim)))
    if err >= ORTHO_TOL:
        raise NonOrthogonalRotation(f"rotation is not orthogonal (max |R^T R - I| = {err:.3g})")
    return R


@dataclass
class ObjectiveSpec:
    """A bounded minimization problem.

    Either ``base`` names a builtin (optionally shifted/rotated) or ``func``
    supplies a custom batch evaluator mapping an ``(n, dim)`` array to ``n``
    values.
    """

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    base: Optional[str] = None
    shift: Optional[np.ndarray] = None
    rotation: Optional[np.ndarray] = None
    f_bias: float = 0.0
    optimum_value: Optional[float] = None
    func: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        self.dim = int(self.dim)
        if self.dim < 1:
            raise ValueError("dim must be positive")
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ValueError("bounds must be finite")
        if np.any(self.lower >= self.upper):
            raise ValueError("each lower bound must be strictly below its upper bound")
        if (self.base is None) == (self.func is None):
            raise ValueError("exactly one of base or func must be given")
        if self.base is not None:
            _base_function(self.base)
        if self.shift is not None:
            self.shift = np.asarray(self.shift, dtype=float)
            if self.shift.shape != (self.dim,):
                raise TransformCountError(
                    f"shift must have length {self.dim}, got {self.shift.shape}"
                )
        if self.rotation is not None:
            self.rotation = _check_rotation(self.rotation, self.dim)

    @property
    def width(self):
        return self.upper - self.lower

    def evaluate_batch(self, X):
        """Objective values for each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {X.shape[-1]}")
        if self.func is not None:
            return np.asarray(self.func(X), dtype=float)
        Z = X if self.shift is None else X - self.shift
        if self.rotation is not None:
            Z = Z @ self.rotation.T
        return BUILTINS[self.base](Z) + self.f_bias

    def evaluate(self, x):
        return float(self.evaluate_batch(np.asarray(x, dtype=float)[None, :])[0])

    __call__ = evaluate

    def error(self, value):
        """Function error ``value - optimum_value`` (raw value if unknown)."""
        if self.optimum_value is None:
            return float(value)
        return float(value) - self.optimum_value


def apply_transform(spec, x):
    """``base(R (x - shift)) + f_bias`` for a builtin-backed spec."""
    if spec.base is None:
        raise ValueError("apply_transform needs a builtin-backed ObjectiveSpec")
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.dim,):
        raise ValueError(f"dimension mismatch: x has shape {x.shape}, problem has dimension {spec.dim}")
    return spec.evaluate(x)


def load_transform_file(path, dim):
    """Read a shift vector and rotation matrix.

    Format: whitespace-separated decimals; the first non-empty line holds the
    ``dim`` shift values, the next ``dim`` lines the rotation rows.
    """
    path = Path(path)
    if not path.is_file():
        raise TransformFileMissing(f"transform file not found: {path}")
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split()])
        except ValueError as exc:
            raise TransformFileError(f"{path}:{lineno}: {exc}") from None
    if len(rows) != dim + 1:
        raise TransformCountError(
            f"{path}: expected {dim + 1} non-empty lines (shift + {dim} rotation rows), got {len(rows)}"
        )
    for k, row in enumerate(rows):
        if len(row) != dim:
            what = "shift line" if k == 0 else f"rotation row {k}"
            raise TransformCountError(f"{path}: {what} has {len(row)} values, expected {dim}")
    shift = np.array(rows[0])
    rotation = _check_rotation(np.array(rows[1:]), dim)
    return shift, rotation


def make_problem(name, dim, bounds=None, shift=None, rotation=None, f_bias=0.0):
    """Builtin problem ``name`` in ``dim`` dimensions with conventional bounds.

    The reported optimum value is ``f_bias`` (every builtin has minimum 0);
    this is only exact if the shifted optimum stays inside the box.
    """
    _base_function(name)
    lo, hi = DEFAULT_BOUNDS[name] if bounds is None else bounds
    return ObjectiveSpec(
        name=name,
        dim=dim,
        lower=lo,
        upper=hi,
        base=name,
        shift=shift,
        rotation=rotation,
        f_bias=f_bias,
        optimum_value=float(f_bias),
    )
