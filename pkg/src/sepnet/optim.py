"""Training: distance losses, the Adadelta loop, and a plain-GD baseline.

A batch is one full evaluation of the mixture over all K term indices
followed by one parameter update; an epoch is ``batches_per_epoch`` batches.
Training stops early when the best distance seen drops below
``stop_distance`` (the target is then separable for practical purposes) or
when the best distance improves by less than ``convergence_delta`` over one
epoch.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import DensityMatrix, as_matrix, hermitianize
from .model import DecompositionModel, SeparabilityStructure, _evaluate, backward, init_model

SIGN_EIGENVALUE_CUTOFF = 1e-12


class TrainingDivergedError(RuntimeError):
    """Raised when the loss turns non-finite; carries epoch and batch indices."""

    def __init__(self, epoch: int, batch: int):
        super().__init__(f"non-finite loss at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


def loss_value_and_gradient(rho_nn: np.ndarray, rho_t: np.ndarray, loss: str) -> tuple[float, np.ndarray]:
    """Distance between mixtures plus its Hermitian gradient wrt the first argument.

    The gradient G is defined through d(loss) = Tr[G d(rho_nn)].  For the
    trace distance G = U sign(L) U^dag / 2 over the eigensystem of the
    difference, with eigenvalues below 1e-12 in magnitude treated as zero;
    for the Hilbert-Schmidt distance G = diff / value (zero at zero).
    """
    diff = hermitianize(np.asarray(rho_nn) - np.asarray(rho_t))
    if loss == "trace":
        w, v = np.linalg.eigh(diff)
        value = 0.5 * float(np.abs(w).sum())
        s = np.sign(w)
        s[np.abs(w) < SIGN_EIGENVALUE_CUTOFF] = 0.0
        grad = 0.5 * (v * s) @ v.conj().T
        return value, grad
    if loss == "hs":
        value = float(np.sqrt(np.vdot(diff, diff).real))
        if value < SIGN_EIGENVALUE_CUTOFF:
            return value, np.zeros_like(diff)
        return value, diff / value
    raise ValueError(f"unknown loss {loss!r}")


def distance(a, b, loss: str = "trace") -> float:
    """Distance between two states under the named loss."""
    value, _ = loss_value_and_gradient(as_matrix(a), as_matrix(b), loss)
    return value


@dataclass
class TrainConfig:
    loss: str = "trace"
    k_terms: int | None = None
    width: int = 100
    seed: int = 0
    restarts: int = 1
    max_epochs: int = 10
    batches_per_epoch: int = 3000
    stop_distance: float = 2e-3
    # per-epoch improvement below this ends the run; 0 disables the plateau
    # stop, which helps on slowly-descending separable targets
    convergence_delta: float = 2e-4
    decay: float = 0.95        # Adadelta average decay
    stabilizer: float = 1e-6   # Adadelta epsilon


@dataclass
class TrainResult:
    distance: float
    loss: str
    status: str                # separable_stop | converged | exhausted
    epochs: int
    batches: int
    wall_time: float
    model: DecompositionModel
    state: DensityMatrix
    seed: int                  # seed of the winning restart
    history: list[tuple[int, float]] = field(default_factory=list)


def derived_seed(seed: int, index: int) -> int:
    """Deterministic child seed for restart/grid-point number ``index``."""
    return int(np.random.SeedSequence((seed, index)).generate_state(1, np.uint64)[0] >> 1)


def _train_once(target: np.ndarray, structure: SeparabilityStructure, config: TrainConfig,
                seed: int) -> tuple[float, dict, str, int, int, list[tuple[int, float]]]:
    model = init_model(structure, config.k_terms, config.width, seed)
    params = model.parameters()
    acc_g = {k: np.zeros_like(v) for k, v in params.items()}
    acc_dx = {k: np.zeros_like(v) for k, v in params.items()}
    rho_t = target
    best = np.inf
    best_params = {k: v.copy() for k, v in params.items()}
    history: list[tuple[int, float]] = []
    status = "exhausted"
    batches = 0
    epochs = 0
    prev_best = np.inf
    eps = config.stabilizer
    dec = config.decay
    stop = False
    for epoch in range(1, config.max_epochs + 1):
        epochs = epoch
        for batch in range(1, config.batches_per_epoch + 1):
            batches += 1
            rho, cache = _evaluate(model)
            value, grad_rho = loss_value_and_gradient(rho, rho_t, config.loss)
            if not np.isfinite(value):
                raise TrainingDivergedError(epoch, batch)
            if value < best:
                best = value
                for k, v in params.items():
                    np.copyto(best_params[k], v)
            if best < config.stop_distance:
                status = "separable_stop"
                stop = True
                break
            grads = backward(model, grad_rho, cache)
            for k, v in params.items():
                g = grads[k]
                ag = acc_g[k]
                ad = acc_dx[k]
                ag *= dec
                ag += (1.0 - dec) * g * g
                dx = -np.sqrt((ad + eps) / (ag + eps)) * g
                ad *= dec
                ad += (1.0 - dec) * dx * dx
                v += dx
        history.append((batches, best))
        if stop:
            break
        if prev_best - best < config.convergence_delta:
            status = "converged"
            break
        prev_best = best
    return best, best_params, status, epochs, batches, history


def train(target, structure: SeparabilityStructure, config: TrainConfig | None = None) -> TrainResult:
    """Fit the decomposition to ``target``; returns the best restart's result.

    The reported distance always corresponds to the returned model: it is the
    distance of the assembled state of the best parameters seen, not of the
    last update.
    """
    if config is None:
        config = TrainConfig()
    rho_t = as_matrix(target)
    total = structure.total_dim
    if rho_t.shape != (total, total):
        raise ValueError(f"target shape {rho_t.shape} does not match structure dimension {total}")
    t0 = time.perf_counter()
    best_result = None
    tot_epochs = 0
    tot_batches = 0
    for r in range(max(1, config.restarts)):
        seed = derived_seed(config.seed, r) if config.restarts > 1 else config.seed
        value, params, status, epochs, batches, history = _train_once(rho_t, structure, config, seed)
        tot_epochs += epochs
        tot_batches += batches
        if best_result is None or value < best_result[0]:
            best_result = (value, params, status, seed, history)
        if value < config.stop_distance:
            break
    value, params, status, seed, history = best_result
    model = init_model(structure, config.k_terms, config.width, seed)
    for k, v in model.parameters().items():
        np.copyto(v, params[k])
    state = DensityMatrix(_evaluate(model)[0], structure.dims)
    final = distance(state.matrix, rho_t, config.loss)
    return TrainResult(
        distance=final,
        loss=config.loss,
        status=status,
        epochs=tot_epochs,
        batches=tot_batches,
        wall_time=time.perf_counter() - t0,
        model=model,
        state=state,
        seed=seed,
        history=history,
    )


# --- naive gradient-descent baseline ----------------------------------------

@dataclass
class GdConfig:
    k_terms: int = 16
    rounds: int = 250
    learning_rate: float = 1.0
    lr_decay: float = 0.98
    momentum: float = 0.2
    real_only: bool = False
    loss: str = "trace"
    seed: int = 0
    # stddev of the Gaussian amplitude init; larger values start the product
    # vectors further from the unit sphere, where the normalized-gradient
    # steps are smaller and plain GD tends to stall above the true optimum
    init_scale: float = 2.0


@dataclass
class GdResult:
    distances: np.ndarray      # length rounds + 1; [0] is the initial distance
    state: DensityMatrix


def naive_gd(target, dims: tuple[int, ...], config: GdConfig | None = None) -> GdResult:
    """Directly parametrized mixture trained with momentum gradient descent.

    The free parameters are K raw mixture weights (normalized by their sum
    after clipping at zero) and one unnormalized amplitude vector per party
    per term.  With ``real_only`` the imaginary parts are pinned to zero.
    This baseline exists to be compared against :func:`train`; it is expected
    to underperform it.
    """
    if config is None:
        config = GdConfig()
    rho_t = as_matrix(target)
    rng = np.random.default_rng(config.seed)
    kk = config.k_terms
    n_parties = len(dims)
    raw_p = rng.uniform(0.5, 1.5, size=kk)
    amps = []
    for d in dims:
        a = config.init_scale * rng.standard_normal((d, kk))
        if not config.real_only:
            a = a + 1j * config.init_scale * rng.standard_normal((d, kk))
        amps.append(a.astype(complex))
    vel_p = np.zeros_like(raw_p)
    vel_a = [np.zeros_like(a) for a in amps]

    def evaluate():
        p = np.maximum(raw_p, 1e-12)
        s = p.sum()
        probs = p / s
        hats = [a / np.sqrt((a.conj() * a).real.sum(axis=0)) for a in amps]
        phi = hats[0]
        for h in hats[1:]:
            phi = (phi[:, None, :] * h[None, :, :]).reshape(-1, kk)
        rho = (phi * probs) @ phi.conj().T
        return probs, s, hats, phi, rho

    distances = np.empty(config.rounds + 1)
    lr = config.learning_rate
    for rnd in range(config.rounds + 1):
        probs, s, hats, phi, rho = evaluate()
        value, grad_rho = loss_value_and_gradient(rho, rho_t, config.loss)
        distances[rnd] = value
        if rnd == config.rounds:
            break
        gphi = grad_rho @ phi
        w_grad = np.einsum("dt,dt->t", phi.conj(), gphi).real
        # normalization of the raw weights
        gp = (w_grad - probs @ w_grad) / s
        gp = np.where(raw_p > 1e-12, gp, np.minimum(gp, 0.0))
        gphi2 = 2.0 * probs * gphi
        gt = gphi2.T.reshape((kk,) + tuple(dims))
        letters = "abcdefgh"[:n_parties]
        ga = []
        for b in range(n_parties):
            ops = [hats[ob].conj() for ob in range(n_parties) if ob != b]
            subs = [letters[ob] + "k" for ob in range(n_parties) if ob != b]
            gpsi = np.einsum("k" + letters + "," + ",".join(subs) + "->" + letters[b] + "k", gt, *ops)
            # through the 2-norm normalization, on the unnormalized amplitudes
            a = amps[b]
            n = np.sqrt((a.conj() * a).real.sum(axis=0))
            ahat = a / n
            proj = (ahat.conj() * gpsi).real.sum(axis=0)
            gau = (gpsi - ahat * proj) / n
            if config.real_only:
                gau = gau.real.astype(complex)
            ga.append(gau)
        vel_p = config.momentum * vel_p - lr * gp
        raw_p = np.maximum(raw_p + vel_p, 0.0)
        for b in range(n_parties):
            vel_a[b] = config.momentum * vel_a[b] - lr * ga[b]
            amps[b] = amps[b] + vel_a[b]
        lr *= config.lr_decay
    state = DensityMatrix(rho, tuple(dims))
    return GdResult(distances=distances, state=state)
