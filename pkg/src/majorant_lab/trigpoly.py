"""Trigonometric polynomials on the d-torus and their L^p norms.

A trigonometric polynomial here is f(x) = sum_n a_n e(n.x) with e(t) =
exp(2*pi*i*t), the frequencies n running over a finite set of integer
vectors and x over [0,1]^d.  Three norm routes are provided:

* uniform-grid quadrature (a Riemann sum, which has spectral accuracy for
  these integrands and is exactly the integral for even p once the grid
  outresolves the spectrum of |f|^p),
* an exact convolution route for even p = 2m, using the fact that
  ||f||_{2m}^{2m} = ||f^m||_2^2 and the coefficients of f^m are the m-fold
  convolution of the coefficient array,
* an adaptive grid-doubling route for general p >= 2 with a relative-change
  stopping rule.

All functions are pure; nothing here holds mutable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len

__all__ = [
    "FrequencySet",
    "TrigPolynomial",
    "NormResult",
    "ConvolutionBudgetError",
    "NormConvergenceError",
    "evaluate_on_grid",
    "lp_norm_quadrature",
    "lp_norm_even_exact",
    "lp_norm_adaptive",
    "l2_norm",
    "exact_even_grid",
    "is_even_integer",
]

# Largest bounding-box size (number of lattice cells) the convolution route
# will allocate before refusing.
DEFAULT_CONV_BUDGET = 1 << 24

# Total grid-point cap for the adaptive doubling loop.
DEFAULT_MAX_GRID_POINTS = 1 << 24


class ConvolutionBudgetError(RuntimeError):
    """Raised when the m-fold convolution support would exceed the memory budget."""


class NormConvergenceError(RuntimeError):
    """Raised when adaptive quadrature hits its grid budget before converging.

    Carries the last two computed values so the caller can inspect how far
    the doubling sequence got.
    """

    def __init__(self, message: str, last_value: float, prev_value: float):
        super().__init__(message)
        self.last_value = last_value
        self.prev_value = prev_value


@dataclass(frozen=True)
class FrequencySet:
    """A finite set of integer frequency vectors with box metadata.

    ``freqs`` is an ordered tuple of distinct integer vectors of length
    ``dim``.  ``box_exponents`` = (alpha_1, ..., alpha_d) record that
    coordinate i is expected to lie in [1, N^alpha_i]; ``N`` is the scale
    parameter.  The box check can be disabled for derived sets (translated
    or zero frequencies) that carry the metadata but live outside the box.
    """

    dim: int
    freqs: tuple[tuple[int, ...], ...]
    box_exponents: tuple[float, ...]
    N: int
    check_box: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if len(self.box_exponents) != self.dim:
            raise ValueError(
                f"box_exponents has length {len(self.box_exponents)}, expected dim={self.dim}"
            )
        if any(a <= 0 for a in self.box_exponents):
            raise ValueError("box_exponents must be positive")
        object.__setattr__(
            self, "freqs", tuple(tuple(int(c) for c in v) for v in self.freqs)
        )
        for v in self.freqs:
            if len(v) != self.dim:
                raise ValueError(f"frequency {v} has length {len(v)}, expected {self.dim}")
        if len(set(self.freqs)) != len(self.freqs):
            raise ValueError("frequency vectors must be distinct")
        if self.check_box:
            bounds = [math.ceil(self.N**a) for a in self.box_exponents]
            for v in self.freqs:
                for i, c in enumerate(v):
                    if c < 1 or c > bounds[i]:
                        raise ValueError(
                            f"coordinate {i} of frequency {v} outside [1, ceil(N^alpha)] = [1, {bounds[i]}]"
                        )

    @property
    def size(self) -> int:
        return len(self.freqs)

    def as_array(self) -> np.ndarray:
        """Frequencies as an (size, dim) int64 array."""
        if not self.freqs:
            return np.empty((0, self.dim), dtype=np.int64)
        return np.asarray(self.freqs, dtype=np.int64)

    def spreads(self) -> tuple[int, ...]:
        """Per-coordinate spread max - min over the support (0 for empty/singleton)."""
        if not self.freqs:
            return (0,) * self.dim
        arr = self.as_array()
        return tuple(int(s) for s in (arr.max(axis=0) - arr.min(axis=0)))

    def translated(self, shift: tuple[int, ...]) -> "FrequencySet":
        """Translate every frequency by an integer vector (box check dropped)."""
        if len(shift) != self.dim:
            raise ValueError("shift dimension mismatch")
        moved = tuple(tuple(c + s for c, s in zip(v, shift)) for v in self.freqs)
        return FrequencySet(self.dim, moved, self.box_exponents, self.N, check_box=False)


@dataclass(frozen=True)
class TrigPolynomial:
    """A FrequencySet together with one complex coefficient per frequency."""

    support: FrequencySet
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if len(self.coeffs) != self.support.size:
            raise ValueError(
                f"{len(self.coeffs)} coefficients for a support of size {self.support.size}"
            )

    def coeffs_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.complex128)

    def scaled(self, c: complex) -> "TrigPolynomial":
        return TrigPolynomial(self.support, tuple(c * a for a in self.coeffs))

    def with_coeffs(self, coeffs) -> "TrigPolynomial":
        return TrigPolynomial(self.support, tuple(coeffs))


@dataclass(frozen=True)
class NormResult:
    """An L^p norm value with method and accuracy metadata.

    ``method`` is one of "parseval", "even_convolution", "quadrature".
    ``grid`` holds per-dimension sample counts, empty for exact methods.
    ``rel_error_estimate`` is 0.0 when the value is certified exact, the
    observed last relative change for the adaptive route, and None when a
    plain quadrature carries no certification.
    """

    p: float
    value: float
    method: str
    grid: tuple[int, ...]
    rel_error_estimate: float | None

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("norm value must be nonnegative")
        if self.rel_error_estimate is not None and self.rel_error_estimate < 0:
            raise ValueError("rel_error_estimate must be nonnegative")


def _require_support(poly: TrigPolynomial) -> None:
    if poly.support.size == 0:
        raise ValueError("empty support: the zero polynomial has no frequency set here")


def evaluate_on_grid(
    poly: TrigPolynomial, grid: tuple[int, ...], alias_free: bool = True
) -> np.ndarray:
    """Evaluate f on the uniform grid x_k = (k_1/M_1, ..., k_d/M_d).

    Returns the complex array of shape ``grid`` with entry (k_1, ..., k_d)
    equal to sum_n a_n e(sum_i n_i k_i / M_i), computed by zero-embedding
    the coefficients at indices n_i mod M_i and applying an inverse FFT.
    Values at grid nodes are exact to machine precision for any M_i >= 1;
    ``alias_free`` additionally requires each M_i to strictly exceed the
    coordinate-i spread of the support, which makes the embedded residues
    distinct (needed by the norm and coefficient-extraction routines).
    """
    _require_support(poly)
    grid = tuple(int(m) for m in grid)
    d = poly.support.dim
    if len(grid) != d:
        raise ValueError(f"grid has {len(grid)} entries, expected dim={d}")
    if any(m < 1 for m in grid):
        raise ValueError("grid counts must be >= 1")
    spreads = poly.support.spreads()
    if alias_free:
        for i, (m, s) in enumerate(zip(grid, spreads)):
            if m <= s:
                raise ValueError(
                    f"grid count M_{i}={m} must exceed the coordinate spread {s} in alias-free mode"
                )
    arr = poly.support.as_array()
    emb = np.zeros(grid, dtype=np.complex128)
    idx = tuple((arr[:, i] % grid[i]) for i in range(d))
    np.add.at(emb, idx, poly.coeffs_array())
    total = int(np.prod(grid))
    return np.fft.ifftn(emb) * total


def is_even_integer(p: float) -> bool:
    return abs(p - round(p)) < 1e-12 and round(p) % 2 == 0


def _quadrature_certified(p: float, grid: tuple[int, ...], spreads: tuple[int, ...]) -> bool:
    # Even p and M_i > p * spread_i: |f|^p is a trig polynomial whose spectrum
    # the grid fully resolves, so the Riemann sum is the integral.
    return is_even_integer(p) and all(m > p * s for m, s in zip(grid, spreads))


def lp_norm_quadrature(
    poly: TrigPolynomial, p: float, grid: tuple[int, ...]
) -> NormResult:
    """L^p norm by Riemann sum on a uniform grid: ((1/|G|) sum |f|^p)^(1/p).

    The grid must be alias-free (each M_i exceeds the coordinate spread).
    For even integer p with every M_i > p * spread_i the sum equals the
    integral and the result is flagged exact (rel_error_estimate = 0);
    otherwise no error estimate is attached.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    _require_support(poly)
    values = evaluate_on_grid(poly, grid, alias_free=True)
    mag = np.abs(values)
    total = mag.size
    value = float((np.sum(mag**p) / total) ** (1.0 / p))
    spreads = poly.support.spreads()
    exact = _quadrature_certified(p, tuple(int(m) for m in grid), spreads)
    return NormResult(
        p=float(p),
        value=value,
        method="quadrature",
        grid=tuple(int(m) for m in grid),
        rel_error_estimate=0.0 if exact else None,
    )


def exact_even_grid(support: FrequencySet, p: float, fast_lengths: bool = True) -> tuple[int, ...]:
    """Smallest certified-exact quadrature grid for even integer p.

    Returns per-dimension counts p * spread_i + 1, optionally rounded up to
    FFT-friendly lengths (exactness only needs M_i > p * spread_i).
    """
    if not is_even_integer(p):
        raise ValueError(f"p={p} is not an even integer")
    counts = tuple(int(round(p)) * s + 1 for s in support.spreads())
    if fast_lengths:
        counts = tuple(int(next_fast_len(m)) for m in counts)
    return counts


def l2_norm(poly: TrigPolynomial) -> NormResult:
    """Exact L^2 norm, the l^2 norm of the coefficients."""
    _require_support(poly)
    value = float(np.linalg.norm(poly.coeffs_array()))
    return NormResult(p=2.0, value=value, method="parseval", grid=(), rel_error_estimate=0.0)


def _sparse_convolve(
    freqs_a: np.ndarray,
    coeffs_a: np.ndarray,
    freqs_b: np.ndarray,
    coeffs_b: np.ndarray,
    budget: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Linear convolution of two sparse coefficient arrays on Z^d.

    Forms all pairwise frequency sums, then compresses duplicates by
    accumulating into the bounding box of the sums.  Returns the compressed
    (freqs, coeffs) of the product polynomial.
    """
    lo = freqs_a.min(axis=0) + freqs_b.min(axis=0)
    hi = freqs_a.max(axis=0) + freqs_b.max(axis=0)
    box = hi - lo + 1
    box_size = int(np.prod(box, dtype=np.int64))
    if box_size > budget:
        raise ConvolutionBudgetError(
            f"convolution support box of {box_size} cells exceeds budget {budget}"
        )
    sums = freqs_a[:, None, :] + freqs_b[None, :, :]
    sums = sums.reshape(-1, freqs_a.shape[1])
    prods = (coeffs_a[:, None] * coeffs_b[None, :]).ravel()
    strides = np.cumprod(np.concatenate(([1], box[::-1][:-1]))).astype(np.int64)[::-1]
    lin = (sums - lo) @ strides
    acc = np.bincount(lin, weights=prods.real, minlength=box_size) + 1j * np.bincount(
        lin, weights=prods.imag, minlength=box_size
    )
    nz = np.flatnonzero(acc)
    out_freqs = np.empty((nz.size, freqs_a.shape[1]), dtype=np.int64)
    rem = nz.copy()
    for i, stride in enumerate(strides):
        out_freqs[:, i] = rem // stride + lo[i]
        rem = rem % stride
    return out_freqs, acc[nz]


def lp_norm_even_exact(
    poly: TrigPolynomial, m: int, budget: int = DEFAULT_CONV_BUDGET
) -> NormResult:
    """Exact L^{2m} norm via coefficient convolution and Parseval.

    Computes the coefficients of f^m by m-fold sparse convolution of the
    coefficient array and returns ||f^m||_2^(1/m).  The route never touches
    a spatial grid, which keeps it independent of the quadrature path.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    _require_support(poly)
    base_f = poly.support.as_array()
    base_c = poly.coeffs_array()
    cur_f, cur_c = base_f, base_c
    for _ in range(m - 1):
        cur_f, cur_c = _sparse_convolve(cur_f, cur_c, base_f, base_c, budget)
    power_sum = float(np.sum(np.abs(cur_c) ** 2))
    value = power_sum ** (1.0 / (2 * m))
    return NormResult(
        p=float(2 * m),
        value=value,
        method="even_convolution",
        grid=(),
        rel_error_estimate=0.0,
    )


def lp_norm_adaptive(
    poly: TrigPolynomial,
    p: float,
    rel_tol: float,
    max_points: int = DEFAULT_MAX_GRID_POINTS,
) -> NormResult:
    """L^p norm by grid doubling until the relative change drops below rel_tol.

    Starts from the alias-free minimum grid (spread_i + 1 per dimension) and
    doubles every dimension until two successive quadrature values differ by
    less than rel_tol in relative terms.  The reported error estimate is the
    last observed relative change.
    """
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    if not (0 < rel_tol < 1):
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    _require_support(poly)
    grid = tuple(s + 1 for s in poly.support.spreads())
    if int(np.prod(grid, dtype=np.int64)) > max_points:
        raise NormConvergenceError(
            f"alias-free minimum grid already exceeds {max_points} points",
            last_value=math.nan,
            prev_value=math.nan,
        )
    prev = lp_norm_quadrature(poly, p, grid).value
    cur = prev
    while True:
        grid = tuple(2 * m for m in grid)
        if int(np.prod(grid, dtype=np.int64)) > max_points:
            raise NormConvergenceError(
                f"adaptive quadrature exceeded {max_points} grid points before "
                f"reaching rel_tol={rel_tol}; last two values {prev!r}, {cur!r}",
                last_value=cur,
                prev_value=prev,
            )
        prev = cur
        cur = lp_norm_quadrature(poly, p, grid).value
        denom = cur if cur > 0 else 1.0
        change = abs(cur - prev) / denom
        if change < rel_tol:
            return NormResult(
                p=float(p),
                value=cur,
                method="quadrature",
                grid=grid,
                rel_error_estimate=change,
            )
