"""Coefficient optimization for exponential-sum extremal problems.

Two constrained suprema are estimated, both as certified lower bounds
(the reported value is always achieved by the reported coefficients):

* the majorant numerator  sup { ||sum a_n e(n.x)||_p : |a_n| <= 1 },
  optimized over unimodular coefficients a_n = exp(i theta_n) by a
  fixed-point phase iteration with a monotone-ascent guard (the polydisc
  objective attains its maximum on the distinguished boundary, which the
  brute-force oracle's radius scan probes on tiny instances);
* the Lambda(p) constant  K(S) = sup { ||sum a_n e(n.x)||_p : |a|_l2 <= 1 },
  by nonlinear power iteration on the unit sphere.

Both optimizers work on a fixed quadrature grid: the certified-exact grid
for even p, otherwise the grid found by adaptive doubling on the all-ones
polynomial.  ``brute_force_sup`` provides exhaustive grid-search oracles
for supports of size at most 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.fft import next_fast_len

from .randsets import SeededRng
from .trigpoly import (
    FrequencySet,
    TrigPolynomial,
    exact_even_grid,
    is_even_integer,
    lp_norm_adaptive,
)

__all__ = [
    "OptimizerConfig",
    "ExtremalResult",
    "majorant_numerator",
    "majorant_ratio",
    "lambda_p_constant",
    "brute_force_sup",
]

# Restarts tie within this absolute slack; the lowest restart index wins.
_TIE_TOL = 1e-12

# Relaxation-step halvings before a restart gives up on ascending.
_MAX_HALVINGS = 10


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 500
    rel_tol: float = 1e-8
    norm_rel_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not (0 < self.rel_tol < 1):
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if not (0 < self.norm_rel_tol < 1):
            raise ValueError(f"norm_rel_tol must lie in (0, 1), got {self.norm_rel_tol}")


@dataclass(frozen=True)
class ExtremalResult:
    """Outcome of an extremal search.

    ``value`` is the best objective over restarts and is achieved by
    ``coeffs`` (a lower bound for the true supremum).  ``converged`` is
    True when no restart ran into its iteration cap.
    """

    value: float
    coeffs: tuple[complex, ...]
    iterations_used: int
    converged: bool
    per_restart_values: tuple[float, ...]


class _TorusGrid:
    """Synthesis / analysis workspace on a fixed alias-free uniform grid."""

    def __init__(self, support: FrequencySet, grid: tuple[int, ...]):
        spreads = support.spreads()
        for i, (m, s) in enumerate(zip(grid, spreads)):
            if m <= s:
                raise ValueError(f"grid count M_{i}={m} does not exceed spread {s}")
        self.grid = tuple(int(m) for m in grid)
        self.total = int(np.prod(self.grid))
        arr = support.as_array()
        self.idx = tuple(arr[:, i] % self.grid[i] for i in range(support.dim))
        self.size = support.size

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        emb = np.zeros(self.grid, dtype=np.complex128)
        emb[self.idx] = coeffs
        return np.fft.ifftn(emb) * self.total

    def lp(self, values: np.ndarray, p: float) -> float:
        return float((np.mean(np.abs(values) ** p)) ** (1.0 / p))

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Fourier coefficients of a grid function at the support frequencies."""
        hat = np.fft.fftn(values) / self.total
        return hat[self.idx]


def _working_grid(support: FrequencySet, p: float, norm_rel_tol: float) -> tuple[int, ...]:
    if is_even_integer(p):
        return exact_even_grid(support, p)
    ones = TrigPolynomial(support, (1.0,) * support.size)
    return lp_norm_adaptive(ones, p, norm_rel_tol).grid


def _validate(support: FrequencySet, p: float) -> None:
    if support.size == 0:
        raise ValueError("empty frequency set")
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")


def _restart_phases(support_size: int, restart: int, seed: int) -> np.ndarray:
    if restart == 0:
        return np.zeros(support_size)
    gen = SeededRng(seed, restart).generator()
    return gen.uniform(0.0, 2.0 * np.pi, size=support_size)


def _restart_sphere(support_size: int, restart: int, seed: int) -> np.ndarray:
    if restart == 0:
        a = np.ones(support_size, dtype=np.complex128)
    else:
        gen = SeededRng(seed, restart).generator()
        a = gen.standard_normal(support_size) + 1j * gen.standard_normal(support_size)
        if np.linalg.norm(a) == 0:
            a = np.ones(support_size, dtype=np.complex128)
    return a / np.linalg.norm(a)


def majorant_numerator(
    support: FrequencySet, p: float, cfg: OptimizerConfig = OptimizerConfig()
) -> ExtremalResult:
    """Lower bound for sup over |a_n| <= 1 of the L^p norm of sum a_n e(n.x).

    Coefficients are restricted to the unimodular boundary a_n = exp(i
    theta_n).  Restart 0 starts from the all-ones vector, the others from
    uniform random phases.  Each sweep proposes the phase of the inner
    product of f|f|^(p-2) with e(n.x); a proposal is accepted only if the
    grid objective does not decrease, otherwise the step toward the
    proposed phases is halved, up to 10 times, before the restart stops.
    The returned value is therefore never below the all-ones objective.
    """
    _validate(support, p)
    grid = _working_grid(support, p, cfg.norm_rel_tol)
    ws = _TorusGrid(support, grid)

    best_value = -math.inf
    best_coeffs: np.ndarray | None = None
    per_restart: list[float] = []
    total_iters = 0
    converged = True

    for restart in range(cfg.restarts):
        theta = _restart_phases(ws.size, restart, cfg.seed)
        coeffs = np.exp(1j * theta)
        obj = ws.lp(ws.synthesize(coeffs), p)
        hit_cap = True
        for _ in range(cfg.max_iters):
            total_iters += 1
            f = ws.synthesize(coeffs)
            weight = f * np.abs(f) ** (p - 2.0)
            g = ws.analyze(weight)
            proposed = np.where(np.abs(g) > 0, np.angle(g), theta)
            delta = np.mod(proposed - theta + np.pi, 2.0 * np.pi) - np.pi
            step = 1.0
            accepted = False
            for _ in range(_MAX_HALVINGS + 1):
                theta_try = theta + step * delta
                coeffs_try = np.exp(1j * theta_try)
                obj_try = ws.lp(ws.synthesize(coeffs_try), p)
                if obj_try >= obj:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                hit_cap = False  # ascent stalled at a fixed point
                break
            rel_change = (obj_try - obj) / obj_try if obj_try > 0 else 0.0
            theta, coeffs, obj = theta_try, coeffs_try, obj_try
            if rel_change < cfg.rel_tol:
                hit_cap = False
                break
        if hit_cap:
            converged = False
        per_restart.append(obj)
        if obj > best_value + _TIE_TOL:
            best_value = obj
            best_coeffs = coeffs
    return ExtremalResult(
        value=best_value,
        coeffs=tuple(complex(c) for c in best_coeffs),
        iterations_used=total_iters,
        converged=converged,
        per_restart_values=tuple(per_restart),
    )


def all_ones_norm_on_grid(
    support: FrequencySet, p: float, cfg: OptimizerConfig = OptimizerConfig()
) -> float:
    """Objective of the all-ones coefficient vector on the optimizer's grid."""
    _validate(support, p)
    ws = _TorusGrid(support, _working_grid(support, p, cfg.norm_rel_tol))
    return ws.lp(ws.synthesize(np.ones(support.size, dtype=np.complex128)), p)


def majorant_ratio(
    support: FrequencySet, p: float, cfg: OptimizerConfig = OptimizerConfig()
) -> float:
    """Majorant numerator divided by the all-ones norm, on a shared grid.

    The all-ones start of restart 0 guarantees the numerator dominates the
    denominator, so the ratio is always >= 1 up to roundoff.
    """
    numerator = majorant_numerator(support, p, cfg).value
    return numerator / all_ones_norm_on_grid(support, p, cfg)


def lambda_p_constant(
    support: FrequencySet, p: float, cfg: OptimizerConfig = OptimizerConfig()
) -> ExtremalResult:
    """Lower bound for K(S) = sup over |a|_l2 <= 1 of ||sum a_n e(n.x)||_p.

    Nonlinear power iteration: from a normalized start (equal weights for
    restart 0, normalized complex Gaussians otherwise), repeatedly project
    f|f|^(p-2) back onto the support frequencies and renormalize to the
    unit sphere, recording the objective of every iterate; the best
    recorded (objective, coefficients) pair wins.
    """
    _validate(support, p)
    grid = _working_grid(support, p, cfg.norm_rel_tol)
    ws = _TorusGrid(support, grid)

    best_value = -math.inf
    best_coeffs: np.ndarray | None = None
    per_restart: list[float] = []
    total_iters = 0
    converged = True

    for restart in range(cfg.restarts):
        a = _restart_sphere(ws.size, restart, cfg.seed)
        restart_best = -math.inf
        restart_best_coeffs = a
        prev_obj = None
        hit_cap = True
        for _ in range(cfg.max_iters):
            total_iters += 1
            f = ws.synthesize(a)
            obj = ws.lp(f, p)
            if obj > restart_best:
                restart_best = obj
                restart_best_coeffs = a
            if prev_obj is not None and abs(obj - prev_obj) < cfg.rel_tol * obj:
                hit_cap = False
                break
            prev_obj = obj
            b = ws.analyze(f * np.abs(f) ** (p - 2.0))
            nb = np.linalg.norm(b)
            if nb == 0:
                hit_cap = False
                break
            a = b / nb
        if hit_cap:
            converged = False
        per_restart.append(restart_best)
        if restart_best > best_value + _TIE_TOL:
            best_value = restart_best
            best_coeffs = restart_best_coeffs
    return ExtremalResult(
        value=best_value,
        coeffs=tuple(complex(c) for c in best_coeffs),
        iterations_used=total_iters,
        converged=converged,
        per_restart_values=tuple(per_restart),
    )


def _char_matrix(support: FrequencySet, grid: tuple[int, ...]) -> np.ndarray:
    """Rows e(n.x) sampled over the flattened uniform grid."""
    rows = []
    for v in support.freqs:
        axes = [
            np.exp(2j * np.pi * c * np.arange(m) / m) for c, m in zip(v, grid)
        ]
        rows.append(reduce(np.multiply.outer, axes).ravel())
    return np.asarray(rows)


def _oracle_grid(support: FrequencySet, p: float) -> tuple[int, ...]:
    if is_even_integer(p):
        return exact_even_grid(support, p)
    return tuple(
        int(next_fast_len(max(256, 4 * math.ceil(p) * max(s, 1) + 1)))
        for s in support.spreads()
    )


def _scan_max(
    coeff_grids: list[np.ndarray], chars: np.ndarray, p: float, chunk: int = 4096
) -> tuple[float, np.ndarray]:
    """Max grid-quadrature L^p objective over a mesh of coefficient vectors.

    ``coeff_grids`` holds per-coefficient candidate values; the scan covers
    their full cartesian product in chunks.
    """
    k = len(coeff_grids)
    mesh = np.meshgrid(*coeff_grids, indexing="ij")
    combos = np.column_stack([m.ravel() for m in mesh]) if k > 0 else np.empty((1, 0))
    best = -math.inf
    best_row = combos[0]
    for start in range(0, len(combos), chunk):
        block = combos[start : start + chunk]
        values = block @ chars
        objs = (np.mean(np.abs(values) ** p, axis=1)) ** (1.0 / p)
        i = int(np.argmax(objs))
        if objs[i] > best:
            best = float(objs[i])
            best_row = block[i]
    return best, best_row


def brute_force_sup(
    support: FrequencySet,
    p: float,
    constraint: str,
    grid_density: int = 64,
    refine_rounds: int = 0,
) -> float:
    """Exhaustive grid-search oracle for the two extremal problems, |S| <= 3.

    "polydisc": scans phases theta in (2*pi/grid_density)*Z with moduli
    fixed at 1; for |S| <= 2 the scan also covers radii {0.5, 0.75, 1} as a
    check that interior moduli never win.  "sphere": scans the unit sphere
    of C^|S| through the spherical angles of R^(2|S|), refined around the
    best cell for ``refine_rounds`` extra passes.
    """
    _validate(support, p)
    if support.size > 3:
        raise ValueError(f"brute force supports |S| <= 3, got {support.size}")
    if grid_density < 8:
        raise ValueError(f"grid_density must be >= 8, got {grid_density}")
    if constraint not in ("polydisc", "sphere"):
        raise ValueError(f"constraint must be 'polydisc' or 'sphere', got {constraint!r}")
    chars = _char_matrix(support, _oracle_grid(support, p))
    k = support.size

    if constraint == "polydisc":
        phases = 2.0 * np.pi * np.arange(grid_density) / grid_density
        radii = np.array([0.5, 0.75, 1.0]) if k <= 2 else np.array([1.0])
        candidates = np.concatenate([r * np.exp(1j * phases) for r in radii])
        best, row = _scan_max([candidates] * k, chars, p)
        for _ in range(refine_rounds):
            step = 2.0 * np.pi / grid_density
            grids = []
            for c in row:
                center = np.angle(c)
                local = center + np.linspace(-step, step, grid_density)
                grids.append(np.abs(c) * np.exp(1j * local))
                step_next = 2.0 * step / (grid_density - 1)
            best_r, row = _scan_max(grids, chars, p)
            best = max(best, best_r)
            grid_density = grid_density  # density fixed; window shrinks each round
        return best

    # Unit sphere of C^k through spherical angles of R^(2k): the first
    # 2k-2 angles range over [0, pi], the last over [0, 2*pi).
    n_angles = 2 * k - 1
    widths = [np.pi] * (n_angles - 1) + [2.0 * np.pi]
    centers = [w / 2.0 for w in widths]

    def angle_grids(centers, widths):
        return [
            (c - w / 2.0) + w * (np.arange(grid_density) + 0.5) / grid_density
            for c, w in zip(centers, widths)
        ]

    def to_coeffs(angle_rows: np.ndarray) -> np.ndarray:
        x = np.empty((len(angle_rows), 2 * k))
        sin_running = np.ones(len(angle_rows))
        for j in range(n_angles):
            x[:, j] = sin_running * np.cos(angle_rows[:, j])
            sin_running = sin_running * np.sin(angle_rows[:, j])
        x[:, n_angles] = sin_running
        return x[:, 0::2] + 1j * x[:, 1::2]

    best = -math.inf
    best_angles = np.array(centers)
    cur_centers, cur_widths = list(centers), list(widths)
    for round_no in range(refine_rounds + 1):
        grids = angle_grids(cur_centers, cur_widths)
        mesh = np.meshgrid(*grids, indexing="ij")
        combos = np.column_stack([m.ravel() for m in mesh])
        for start in range(0, len(combos), 4096):
            block = combos[start : start + 4096]
            coeff_block = to_coeffs(block)
            values = coeff_block @ chars
            objs = (np.mean(np.abs(values) ** p, axis=1)) ** (1.0 / p)
            i = int(np.argmax(objs))
            if objs[i] > best:
                best = float(objs[i])
                best_angles = block[i]
        cur_centers = list(best_angles)
        cur_widths = [2.0 * w / grid_density for w in cur_widths]
    return best
