"""Random frequency-set models and their seeded samplers.

Every model is a small frozen dataclass whose invariants are checked at
construction, and ``sample(model, rng)`` draws one frequency set from it.
Randomness comes from a counter-based generator (Philox) keyed by
(master_seed, stream_id), so a sample is a pure function of the model and
the key: the same key gives the same set on every platform, and distinct
trials can use distinct stream ids and run in parallel.

Models:

* ``BernoulliSelector``: each n in [1, N] enters independently with
  probability tau = N^(-delta).
* ``PerturbedAP``: one uniform point from each window of radius s around
  the arithmetic progression b + a*j, j = 1..L.
* ``BlockUniform``: [1, N] is split into L consecutive blocks of size
  s = N/L and one uniform element is taken from each block.
* ``NestedBlock``: two-stage sampler for p > 4; a fine one-per-block set
  at exponent p1 is thinned by choosing one fine block per coarse block.
* ``CorrelatedDyadic``: a single uniform omega drives all selectors,
  j in S iff frac(2^j * omega) < tau; equal marginals, dependent joints.
* ``FullRange``: the deterministic full interval [1, N].
* ``CurveEmbedding``: push a base model through n -> n^2, n -> (n, n^2),
  or (n, m) -> (n, m, n^2 + m^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import singledispatch
from pathlib import Path

import numpy as np

from .trigpoly import FrequencySet, TrigPolynomial

__all__ = [
    "SeededRng",
    "BernoulliSelector",
    "PerturbedAP",
    "BlockUniform",
    "NestedBlock",
    "CorrelatedDyadic",
    "FullRange",
    "CurveEmbedding",
    "RandomSetModel",
    "sample",
    "embed_curve",
    "full_range",
    "dirichlet",
    "perturbed_ap_from_exponents",
    "pap_critical_p",
    "block_critical_p",
    "write_set",
    "read_set",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeededRng:
    """Counter-based random source keyed by (master_seed, stream_id).

    ``generator()`` returns a fresh numpy Generator positioned at the start
    of the keyed stream, so every consumer of the same SeededRng sees the
    same draw sequence.
    """

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream_id: int) -> "SeededRng":
        return SeededRng(self.master_seed, stream_id)


def _check(condition: bool, constraint: str) -> None:
    if not condition:
        raise ValueError(f"model invariant violated: {constraint}")


@dataclass(frozen=True)
class BernoulliSelector:
    """Independent selectors on [1, N] with inclusion probability tau = N^(-delta).

    delta = 0 (tau = 1, the full range) is allowed as a degenerate edge.
    """

    N: int
    delta: float

    def __post_init__(self):
        _check(self.N >= 1, f"BernoulliSelector needs N >= 1 (got N={self.N})")
        _check(
            0 <= self.delta < 1,
            f"BernoulliSelector needs delta in [0, 1) (got delta={self.delta})",
        )

    @property
    def tau(self) -> float:
        return float(self.N) ** (-self.delta)


@dataclass(frozen=True)
class PerturbedAP:
    """One uniform point per window [(b + a*j) - s, (b + a*j) + s], j = 1..L."""

    N: int
    L: int
    s: int
    a: int
    b: int

    def __post_init__(self):
        _check(self.L >= 1, f"PerturbedAP needs L >= 1 (got L={self.L})")
        _check(self.s >= 1, f"PerturbedAP needs s >= 1 (got s={self.s})")
        _check(2 * self.s < self.a, f"PerturbedAP needs 2*s < a (got s={self.s}, a={self.a})")
        _check(0 < self.b < self.a, f"PerturbedAP needs 0 < b < a (got b={self.b}, a={self.a})")
        _check(
            self.b + self.a * self.L + self.s <= self.N,
            f"PerturbedAP needs b + a*L + s <= N (got {self.b + self.a * self.L + self.s} > N={self.N})",
        )


@dataclass(frozen=True)
class BlockUniform:
    """One uniform element from each of L equal blocks partitioning [1, N]."""

    N: int
    L: int

    def __post_init__(self):
        _check(1 <= self.L <= self.N, f"BlockUniform needs 1 <= L <= N (got L={self.L}, N={self.N})")
        _check(
            self.N % self.L == 0,
            f"BlockUniform needs L to divide N so the blocks partition [1, N] "
            f"(got N={self.N}, L={self.L})",
        )

    @property
    def s(self) -> int:
        """Block size."""
        return self.N // self.L


@dataclass(frozen=True)
class NestedBlock:
    """Two-stage one-per-block sampler for exponents p > 4.

    A fine one-per-block set with L1 = floor(N^(2/p1)) blocks is drawn
    first; then each of the L = floor(N^(2/p)) coarse blocks keeps the fine
    point of one of its s' = floor(L1/L) fine blocks, chosen uniformly.
    """

    N: int
    p: float
    p1: float

    def __post_init__(self):
        _check(self.N >= 1, f"NestedBlock needs N >= 1 (got N={self.N})")
        _check(self.p > 4, f"NestedBlock needs p > 4 (got p={self.p})")
        _check(
            self.p / 2 < self.p1 < self.p,
            f"NestedBlock needs p/2 < p1 < p (got p={self.p}, p1={self.p1})",
        )
        _check(
            self.s_prime >= 1,
            f"NestedBlock needs s' = floor(L1/L) >= 1 (got L={self.L}, L1={self.L1})",
        )
        _check(
            self.fine_size >= 1,
            f"NestedBlock needs fine blocks of size >= 1 (got N={self.N}, L1={self.L1})",
        )

    @property
    def L(self) -> int:
        return int(float(self.N) ** (2.0 / self.p))

    @property
    def L1(self) -> int:
        return int(float(self.N) ** (2.0 / self.p1))

    @property
    def s_prime(self) -> int:
        return self.L1 // self.L

    @property
    def fine_size(self) -> int:
        return self.N // self.L1


@dataclass(frozen=True)
class CorrelatedDyadic:
    """Dyadic selectors driven by one uniform omega: j in S iff frac(2^j omega) < tau."""

    N: int
    delta: float

    def __post_init__(self):
        _check(self.N >= 1, f"CorrelatedDyadic needs N >= 1 (got N={self.N})")
        _check(
            0 <= self.delta < 1,
            f"CorrelatedDyadic needs delta in [0, 1) (got delta={self.delta})",
        )

    @property
    def tau(self) -> float:
        return float(self.N) ** (-self.delta)


@dataclass(frozen=True)
class FullRange:
    """The deterministic full range [1, N]."""

    N: int

    def __post_init__(self):
        _check(self.N >= 1, f"FullRange needs N >= 1 (got N={self.N})")


CURVE_KINDS = ("squares", "parabola", "paraboloid")


@dataclass(frozen=True)
class CurveEmbedding:
    """A base model pushed through a polynomial curve or surface map.

    For "squares" and "parabola" the base must be one-dimensional.  For
    "paraboloid" the base must be BernoulliSelector or FullRange with a
    square point count N = M^2; its selectors then act on the grid
    [1, M]^2 and the sampled pairs are mapped to (n, m, n^2 + m^2).
    """

    base: "RandomSetModel"
    kind: str

    def __post_init__(self):
        _check(self.kind in CURVE_KINDS, f"CurveEmbedding kind must be one of {CURVE_KINDS} (got {self.kind!r})")
        if self.kind == "paraboloid":
            _check(
                isinstance(self.base, (BernoulliSelector, FullRange)),
                "paraboloid embedding needs a BernoulliSelector or FullRange base "
                f"(got {type(self.base).__name__})",
            )
            m = math.isqrt(self.base.N)
            _check(
                m * m == self.base.N,
                f"paraboloid embedding needs a square point count N = M^2 (got N={self.base.N})",
            )


RandomSetModel = (
    BernoulliSelector
    | PerturbedAP
    | BlockUniform
    | NestedBlock
    | CorrelatedDyadic
    | FullRange
    | CurveEmbedding
)

_ONE_D = ((1.0,),)  # box exponents of a plain subset of [1, N]


def _one_d_set(values: np.ndarray, N: int) -> FrequencySet:
    freqs = tuple((int(v),) for v in values)
    return FrequencySet(dim=1, freqs=freqs, box_exponents=(1.0,), N=N)


@singledispatch
def sample(model, rng: SeededRng) -> FrequencySet:
    """Draw one frequency set from a model, deterministically in (model, rng)."""
    raise TypeError(f"unknown random-set model: {type(model).__name__}")


@sample.register
def _(model: BernoulliSelector, rng: SeededRng) -> FrequencySet:
    gen = rng.generator()
    mask = gen.random(model.N) < model.tau
    values = np.flatnonzero(mask) + 1
    return _one_d_set(values, model.N)


@sample.register
def _(model: PerturbedAP, rng: SeededRng) -> FrequencySet:
    gen = rng.generator()
    offsets = gen.integers(-model.s, model.s + 1, size=model.L)
    centers = model.b + model.a * np.arange(1, model.L + 1, dtype=np.int64)
    return _one_d_set(centers + offsets, model.N)


@sample.register
def _(model: BlockUniform, rng: SeededRng) -> FrequencySet:
    gen = rng.generator()
    s = model.s
    offsets = gen.integers(0, s, size=model.L)
    values = np.arange(model.L, dtype=np.int64) * s + 1 + offsets
    return _one_d_set(values, model.N)


@sample.register
def _(model: NestedBlock, rng: SeededRng) -> FrequencySet:
    gen = rng.generator()
    s1 = model.fine_size
    # One uniform point per fine block, drawn for all L1 blocks in order.
    eta = np.arange(model.L1, dtype=np.int64) * s1 + 1 + gen.integers(0, s1, size=model.L1)
    # One fine block per coarse block among its s' fine blocks.
    zeta = np.arange(model.L, dtype=np.int64) * model.s_prime + gen.integers(
        0, model.s_prime, size=model.L
    )
    return _one_d_set(eta[zeta], model.N)


@sample.register
def _(model: CorrelatedDyadic, rng: SeededRng) -> FrequencySet:
    gen = rng.generator()
    # omega is materialized as N + 64 fair bits; frac(2^j omega) < tau is
    # decided by comparing the 64-bit window starting at bit j+1 against tau
    # at 2^-64 resolution, avoiding float doubling altogether.
    bits = gen.integers(0, 2, size=model.N + 64, dtype=np.uint8)
    threshold = int(model.tau * 2.0**64)
    window = 0
    for i in range(1, 65):  # bits 2 .. 65 form the window of j = 1
        window = (window << 1) | int(bits[i])
    members = []
    for j in range(1, model.N + 1):
        if window < threshold:
            members.append(j)
        if j < model.N:
            window = ((window << 1) | int(bits[j + 64])) & _MASK64
    return _one_d_set(np.array(members, dtype=np.int64), model.N)


@sample.register
def _(model: FullRange, rng: SeededRng) -> FrequencySet:
    return full_range(model.N)


@sample.register
def _(model: CurveEmbedding, rng: SeededRng) -> FrequencySet:
    if model.kind == "paraboloid":
        base = _sample_pairs(model.base, rng)
    else:
        base = sample(model.base, rng)
    return embed_curve(base, model.kind)


def _sample_pairs(base: RandomSetModel, rng: SeededRng) -> FrequencySet:
    """Sample a subset of the grid [1, M]^2, M = sqrt(N), as a 2-d set."""
    m = math.isqrt(base.N)
    grid_n, grid_m = np.meshgrid(np.arange(1, m + 1), np.arange(1, m + 1), indexing="ij")
    pairs = np.column_stack([grid_n.ravel(), grid_m.ravel()])
    if isinstance(base, BernoulliSelector):
        gen = rng.generator()
        pairs = pairs[gen.random(len(pairs)) < base.tau]
    freqs = tuple((int(a), int(b)) for a, b in pairs)
    return FrequencySet(dim=2, freqs=freqs, box_exponents=(0.5, 0.5), N=base.N)


def embed_curve(set_in: FrequencySet, kind: str) -> FrequencySet:
    """Map a sampled set onto squares, the parabola, or the paraboloid.

    squares:    {n}      -> {n^2}            in [1, N^2]
    parabola:   {n}      -> {(n, n^2)}       in [1, N] x [1, N^2]
    paraboloid: {(n, m)} -> {(n, m, n^2+m^2)}, scale adjusted so the box
                exponents (1/2, 1/2, 1) hold for the embedded set.
    """
    if kind not in CURVE_KINDS:
        raise ValueError(f"unknown curve kind {kind!r}, expected one of {CURVE_KINDS}")
    if kind in ("squares", "parabola"):
        if set_in.dim != 1:
            raise ValueError(f"{kind} embedding needs a one-dimensional set (got dim={set_in.dim})")
        ns = [v[0] for v in set_in.freqs]
        if kind == "squares":
            return FrequencySet(
                dim=1,
                freqs=tuple((n * n,) for n in ns),
                box_exponents=(2.0,),
                N=set_in.N,
            )
        return FrequencySet(
            dim=2,
            freqs=tuple((n, n * n) for n in ns),
            box_exponents=(1.0, 2.0),
            N=set_in.N,
        )
    if set_in.dim != 2:
        raise ValueError(f"paraboloid embedding needs a two-dimensional set (got dim={set_in.dim})")
    triples = tuple((n, m, n * n + m * m) for n, m in set_in.freqs)
    heights = [t[2] for t in triples] or [1]
    scale = max(set_in.N, max(heights))
    return FrequencySet(dim=3, freqs=triples, box_exponents=(0.5, 0.5, 1.0), N=scale)


def full_range(N: int) -> FrequencySet:
    """The full frequency range [1, N]."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return _one_d_set(np.arange(1, N + 1), N)


def dirichlet(N: int) -> TrigPolynomial:
    """The all-ones exponential sum over [1, N]."""
    fs = full_range(N)
    return TrigPolynomial(fs, (1.0 + 0.0j,) * N)


def perturbed_ap_from_exponents(
    N: int, eps0: float, eps1: float, a: int | None = None, b: int | None = None
) -> PerturbedAP:
    """Build a PerturbedAP from scale exponents L = N^eps0, s = N^eps1.

    The progression offset and modulus are free parameters of the model; by
    default the modulus is the largest one that fits L windows inside [1, N]
    and the offset is s + 1.
    """
    L = int(float(N) ** eps0)
    s = int(float(N) ** eps1)
    if b is None:
        b = s + 1
    if a is None:
        a = (N - s - b) // L
    return PerturbedAP(N=N, L=L, s=s, a=a, b=b)


def pap_critical_p(L: int, s: int) -> float:
    """The exponent at which L = (L*s)^(2/p) for a perturbed progression."""
    return 2.0 * math.log(L * s) / math.log(L)


def block_critical_p(N: int, L: int) -> float:
    """The exponent at which L = N^(2/p) for a one-per-block set."""
    return 2.0 * math.log(N) / math.log(L)


def write_set(fs: FrequencySet, path: str | Path) -> None:
    """Write one frequency vector per line, comma-separated, lexicographically sorted."""
    lines = [",".join(str(c) for c in v) for v in sorted(fs.freqs)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_set(path: str | Path) -> FrequencySet:
    """Read a frequency set written by write_set.

    The file format carries no scale metadata, so the result gets box
    exponents of 1 in every coordinate and N equal to the largest
    coordinate seen.
    """
    text = Path(path).read_text(encoding="utf-8")
    freqs = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        freqs.append(tuple(int(tok) for tok in line.split(",")))
    if not freqs:
        raise ValueError(f"no frequencies found in {path}")
    dim = len(freqs[0])
    coords = [c for v in freqs for c in v]
    n = max(max(coords), 1)
    return FrequencySet(
        dim=dim,
        freqs=tuple(freqs),
        box_exponents=(1.0,) * dim,
        N=n,
        check_box=min(coords) >= 1,
    )
