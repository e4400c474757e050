"""Neural parametrization of mixtures of pure product states.

A :class:`SeparabilityStructure` lists the partitions of the parties that the
mixture is allowed to use (one partition for plain separability, several for
biseparability-style notions).  A :class:`DecompositionModel` is a one-hidden-
layer perceptron that maps a one-hot term index k to, for every partition, a
weight logit plus the raw components of one pure state per block.  Assembly
turns these raw outputs into

    rho = sum_{k, partition} w_{k,partition} * |psi_1 x psi_2 x ...><...|

with the weights normalized jointly by a softmax and every block amplitude
vector normalized by its 2-norm.  All raw network outputs pass through a
logistic sigmoid; amplitude components are mapped affinely from (0, 1) to
(-1, 1) before normalization so that arbitrary relative phases are reachable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .linalg import DensityMatrix

CHECKPOINT_VERSION = 1
_EINSUM_LETTERS = "abcdefgh"

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SeparabilityStructure:
    """Local dimensions plus the partitions available to the decomposition.

    Each partition is a tuple of blocks; each block a sorted tuple of party
    indices (0-based).  Every partition must split the full party set into at
    least two disjoint, covering blocks.
    """

    dims: tuple[int, ...]
    partitions: tuple[Partition, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if any(d < 2 for d in dims):
            raise ValueError("every local dimension must be at least 2")
        parties = set(range(len(dims)))
        parts = []
        for partition in self.partitions:
            blocks = tuple(tuple(int(i) for i in b) for b in partition)
            seen: set[int] = set()
            for b in blocks:
                if not b or list(b) != sorted(b):
                    raise ValueError(f"block {b} must be nonempty and sorted")
                if seen & set(b):
                    raise ValueError(f"blocks overlap in partition {blocks}")
                seen |= set(b)
            if seen != parties:
                raise ValueError(f"partition {blocks} does not cover all parties")
            if len(blocks) < 2:
                raise ValueError("a partition needs at least two blocks")
            if list(blocks) != sorted(blocks, key=lambda b: b[0]):
                raise ValueError(f"blocks must be ordered by first party: {blocks}")
            parts.append(blocks)
        if not parts:
            raise ValueError("at least one partition is required")
        if len(set(parts)) != len(parts):
            raise ValueError("duplicate partitions")
        object.__setattr__(self, "partitions", tuple(parts))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))


def full_separability(dims: Sequence[int]) -> SeparabilityStructure:
    """Every party in its own block."""
    dims = tuple(dims)
    return SeparabilityStructure(dims, (tuple((i,) for i in range(len(dims))),))


def fixed_partition(dims: Sequence[int], blocks: Sequence[Sequence[int]]) -> SeparabilityStructure:
    """A single, caller-chosen partition (e.g. one bipartition I | complement)."""
    part = tuple(tuple(sorted(b)) for b in blocks)
    part = tuple(sorted(part, key=lambda b: b[0]))
    return SeparabilityStructure(tuple(dims), (part,))


def _bipartitions(n: int) -> list[Partition]:
    out = []
    for mask in range(2 ** (n - 1)):
        # masks over parties 1..n-1; party 0 always in the first block
        left = (0,) + tuple(i for i in range(1, n) if mask >> (i - 1) & 1)
        right = tuple(i for i in range(1, n) if not mask >> (i - 1) & 1)
        if right:
            out.append((left, right))
    return out


def biseparable(dims: Sequence[int]) -> SeparabilityStructure:
    """All bipartitions of the parties (2^(n-1) - 1 of them)."""
    dims = tuple(dims)
    return SeparabilityStructure(dims, tuple(_bipartitions(len(dims))))


def size_constrained_biseparable(dims: Sequence[int], m: int) -> SeparabilityStructure:
    """Bipartitions whose smaller side has exactly m parties."""
    dims = tuple(dims)
    n = len(dims)
    if not 1 <= m <= n // 2:
        raise ValueError(f"m must be in [1, {n // 2}]")
    parts = []
    for left, right in _bipartitions(n):
        small = min(len(left), len(right))
        if small != m:
            continue
        parts.append((left, right) if left[0] == 0 else (right, left))
    return SeparabilityStructure(dims, tuple(parts))


def _set_partitions(items: tuple[int, ...]) -> list[list[list[int]]]:
    if not items:
        return [[]]
    first, rest = items[0], items[1:]
    out = []
    for smaller in _set_partitions(rest):
        for i, block in enumerate(smaller):
            out.append(smaller[:i] + [[first] + block] + smaller[i + 1 :])
        out.append([[first]] + smaller)
    return out


def triseparable(dims: Sequence[int]) -> SeparabilityStructure:
    """All partitions of the parties into exactly three blocks."""
    dims = tuple(dims)
    parts = []
    for p in _set_partitions(tuple(range(len(dims)))):
        if len(p) != 3:
            continue
        blocks = tuple(sorted((tuple(sorted(b)) for b in p), key=lambda b: b[0]))
        parts.append(blocks)
    return SeparabilityStructure(dims, tuple(sorted(parts)))


# --- per-partition index bookkeeping ---------------------------------------

class _PartitionLayout(NamedTuple):
    blocks: Partition
    block_dims: tuple[int, ...]
    cmap: np.ndarray      # block-order flat index -> canonical flat index
    rmap: np.ndarray      # canonical flat index -> block-order flat index
    logit_row: int
    block_rows: tuple[slice, ...]
    rows: slice           # all rows of this partition in the output vector


@lru_cache(maxsize=None)
def _layouts(structure: SeparabilityStructure) -> tuple[_PartitionLayout, ...]:
    dims = structure.dims
    total = structure.total_dim
    idx = np.arange(total).reshape(dims)
    layouts = []
    row = 0
    for blocks in structure.partitions:
        sigma = tuple(i for b in blocks for i in b)
        cmap = np.ascontiguousarray(idx.transpose(sigma)).ravel()
        rmap = np.empty(total, dtype=np.intp)
        rmap[cmap] = np.arange(total)
        block_dims = tuple(int(np.prod([dims[i] for i in b])) for b in blocks)
        logit_row = row
        r = row + 1
        block_rows = []
        for bd in block_dims:
            block_rows.append(slice(r, r + 2 * bd))
            r += 2 * bd
        layouts.append(
            _PartitionLayout(blocks, block_dims, cmap, rmap, logit_row, tuple(block_rows), slice(row, r))
        )
        row = r
    return tuple(layouts)


def output_width(structure: SeparabilityStructure) -> int:
    """Rows of the network output consumed per term index."""
    return _layouts(structure)[-1].rows.stop


def reorder_to_canonical(op: np.ndarray, dims: Sequence[int], partition: Sequence[Sequence[int]]) -> np.ndarray:
    """Bring an operator assembled blockwise back to canonical party order.

    ``op`` acts on the tensor product of the partition's blocks in their
    listed order; the result acts on parties 0..n-1 in canonical order.
    """
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    idx = np.arange(total).reshape(dims)
    sigma = tuple(i for b in partition for i in b)
    if sorted(sigma) != list(range(len(dims))):
        raise ValueError(f"partition {partition} is not a permutation of the parties")
    cmap = np.ascontiguousarray(idx.transpose(sigma)).ravel()
    rmap = np.empty(total, dtype=np.intp)
    rmap[cmap] = np.arange(total)
    op = np.asarray(op)
    if op.shape == (total,):
        return op[rmap]
    if op.shape == (total, total):
        return op[np.ix_(rmap, rmap)]
    raise ValueError(f"operator shape {op.shape} does not match dims {dims}")


# --- the model --------------------------------------------------------------

class DecompositionModel:
    """One-hidden-layer perceptron producing a mixture of pure product states."""

    def __init__(self, structure: SeparabilityStructure, k_terms: int, width: int,
                 seed: int, w1, b1, w2, b2):
        self.structure = structure
        self.k_terms = int(k_terms)
        self.width = int(width)
        self.seed = int(seed)
        self.w1 = np.asarray(w1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.w2 = np.asarray(w2, dtype=float)
        self.b2 = np.asarray(b2, dtype=float)

    def parameters(self) -> dict[str, np.ndarray]:
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def copy(self) -> "DecompositionModel":
        return DecompositionModel(self.structure, self.k_terms, self.width, self.seed,
                                  self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())


def default_k(structure: SeparabilityStructure) -> int:
    return structure.total_dim


def init_model(structure: SeparabilityStructure, k_terms: int | None = None,
               width: int = 100, seed: int = 0) -> DecompositionModel:
    """Initialize a model with zero-mean uniform weights scaled by 1/sqrt(fan-in).

    ``k_terms`` defaults to the total Hilbert space dimension and is capped at
    its square (enough terms for any separable state by Caratheodory).
    """
    if k_terms is None:
        k_terms = default_k(structure)
    k_terms = int(k_terms)
    cap = structure.total_dim ** 2
    if not 1 <= k_terms <= cap:
        raise ValueError(f"k_terms must be in [1, {cap}], got {k_terms}")
    if width < 1:
        raise ValueError("width must be positive")
    out = output_width(structure)
    rng = np.random.default_rng(seed)
    lim1 = 1.0 / np.sqrt(k_terms)
    lim2 = 1.0 / np.sqrt(width)
    w1 = rng.uniform(-lim1, lim1, size=(width, k_terms))
    b1 = np.zeros(width)
    w2 = rng.uniform(-lim2, lim2, size=(out, width))
    b2 = np.zeros(out)
    return DecompositionModel(structure, k_terms, width, seed, w1, b1, w2, b2)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - x.max())
    return e / e.sum()


class _Cache(NamedTuple):
    z1: np.ndarray
    h: np.ndarray
    y: np.ndarray
    weights: np.ndarray          # softmax weights, length K * n_partitions
    psi_hats: list[list[np.ndarray]]   # per partition, per block: (m, K) complex
    v_norms: list[list[np.ndarray]]    # per partition, per block: (K,) norms
    vs: list[list[np.ndarray]]         # per partition, per block: (2m, K) centered reals
    phis: np.ndarray             # canonical-order product vectors, (D, K * n_partitions)


def _evaluate(model: DecompositionModel) -> tuple[np.ndarray, _Cache]:
    """Assemble the mixture for all K terms at once; keep what backward needs."""
    structure = model.structure
    layouts = _layouts(structure)
    kk = model.k_terms
    z1 = model.w1 + model.b1[:, None]
    h = np.maximum(z1, 0.0)
    y = _sigmoid(model.w2 @ h + model.b2[:, None])

    total = structure.total_dim
    n_part = len(layouts)
    phis = np.empty((total, kk * n_part), dtype=complex)
    logits = np.empty(kk * n_part)
    psi_hats: list[list[np.ndarray]] = []
    v_norms: list[list[np.ndarray]] = []
    vs: list[list[np.ndarray]] = []
    for p, lay in enumerate(layouts):
        cols = slice(p * kk, (p + 1) * kk)
        logits[cols] = y[lay.logit_row]
        hats, norms, cvs = [], [], []
        prod = None
        for rows, bd in zip(lay.block_rows, lay.block_dims):
            v = 2.0 * y[rows] - 1.0
            n = np.sqrt((v * v).sum(axis=0))
            if np.any(n < 1e-12):
                raise ValueError(
                    "amplitude vector norm below 1e-12; re-initialize with a different seed"
                )
            psi = (v[:bd] + 1j * v[bd:]) / n
            hats.append(psi)
            norms.append(n)
            cvs.append(v)
            prod = psi if prod is None else (prod[:, None, :] * psi[None, :, :]).reshape(-1, kk)
        psi_hats.append(hats)
        v_norms.append(norms)
        vs.append(cvs)
        phis[lay.cmap, cols] = prod
    weights = _softmax(logits)
    rho = (phis * weights) @ phis.conj().T
    return rho, _Cache(z1, h, y, weights, psi_hats, v_norms, vs, phis)


class RawTermOutput(NamedTuple):
    logit: float
    blocks: list[np.ndarray]


def forward(model: DecompositionModel, k: int) -> list[RawTermOutput]:
    """Raw sigmoid outputs for term index k (1-based), one entry per partition."""
    if not 1 <= k <= model.k_terms:
        raise ValueError(f"k must be in [1, {model.k_terms}]")
    col = k - 1
    z1 = model.w1[:, col] + model.b1
    y = _sigmoid(model.w2 @ np.maximum(z1, 0.0) + model.b2)
    out = []
    for lay in _layouts(model.structure):
        out.append(RawTermOutput(float(y[lay.logit_row]), [y[rows].copy() for rows in lay.block_rows]))
    return out


def assemble(model: DecompositionModel) -> DensityMatrix:
    """Evaluate the model for every term and return the mixed state it encodes."""
    rho, _ = _evaluate(model)
    return DensityMatrix(rho, model.structure.dims)


def backward(model: DecompositionModel, grad_rho: np.ndarray,
             cache: _Cache | None = None) -> dict[str, np.ndarray]:
    """Chain a Hermitian gradient d(loss)/d(rho) back to parameter gradients.

    ``grad_rho`` is understood in the real inner product d(loss) =
    Tr[grad_rho . d(rho)].  Returns gradients keyed like ``parameters()``.
    """
    if cache is None:
        _, cache = _evaluate(model)
    structure = model.structure
    layouts = _layouts(structure)
    kk = model.k_terms
    g = np.asarray(grad_rho)

    gphi_all = g @ cache.phis                       # (D, K*P)
    w_grad = np.einsum("dt,dt->t", cache.phis.conj(), gphi_all).real
    logit_grad = cache.weights * (w_grad - cache.weights @ w_grad)

    dy = np.zeros_like(cache.y)
    for p, lay in enumerate(layouts):
        cols = slice(p * kk, (p + 1) * kk)
        dy[lay.logit_row] = logit_grad[cols]
        # complex gradient wrt the canonical product vectors of this partition
        gphi = 2.0 * cache.weights[cols] * gphi_all[:, cols]
        gphi_blk = gphi[lay.cmap]
        nb = len(lay.blocks)
        gt = gphi_blk.T.reshape((kk,) + lay.block_dims)
        g_subs = "k" + _EINSUM_LETTERS[:nb]
        for b, rows in enumerate(lay.block_rows):
            ops, subs = [], []
            for ob in range(nb):
                if ob == b:
                    continue
                ops.append(cache.psi_hats[p][ob].conj())
                subs.append(_EINSUM_LETTERS[ob] + "k")
            out_subs = _EINSUM_LETTERS[b] + "k"
            gpsi = np.einsum(g_subs + "," + ",".join(subs) + "->" + out_subs, gt, *ops)
            ghat = np.concatenate([gpsi.real, gpsi.imag], axis=0)      # (2m, K)
            v = cache.vs[p][b]
            n = cache.v_norms[p][b]
            vhat = v / n
            gv = (ghat - vhat * (vhat * ghat).sum(axis=0)) / n
            dy[rows] += 2.0 * gv

    dz2 = dy * cache.y * (1.0 - cache.y)
    dw2 = dz2 @ cache.h.T
    db2 = dz2.sum(axis=1)
    dh = model.w2.T @ dz2
    dz1 = dh * (cache.z1 > 0.0)
    dw1 = dz1
    db1 = dz1.sum(axis=1)
    return {"w1": dw1, "b1": db1, "w2": dw2, "b2": db2}


# --- checkpointing ----------------------------------------------------------

def save_checkpoint(model: DecompositionModel, path: str) -> None:
    """Write model parameters and structure to an .npz file (bit-exact)."""
    descr = {
        "dims": list(model.structure.dims),
        "partitions": [[list(b) for b in part] for part in model.structure.partitions],
    }
    np.savez(
        path,
        version=np.array(CHECKPOINT_VERSION),
        structure=np.array(json.dumps(descr)),
        k_terms=np.array(model.k_terms),
        width=np.array(model.width),
        seed=np.array(model.seed),
        w1=model.w1,
        b1=model.b1,
        w2=model.w2,
        b2=model.b2,
    )


def load_checkpoint(path: str) -> DecompositionModel:
    with np.load(path) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        descr = json.loads(str(data["structure"]))
        structure = SeparabilityStructure(
            tuple(descr["dims"]),
            tuple(tuple(tuple(b) for b in part) for part in descr["partitions"]),
        )
        return DecompositionModel(
            structure,
            int(data["k_terms"]),
            int(data["width"]),
            int(data["seed"]),
            data["w1"],
            data["b1"],
            data["w2"],
            data["b2"],
        )
