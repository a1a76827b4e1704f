"""Training loop for the spherical latent clustering model.

Phases: (1) reconstruction-only pretraining, (2) spherical k-means++ center
initialization in the pretrained latent space, (3) EM-style refinement where
a sharpened target Q is recomputed once per outer iteration over the full
dataset and one epoch of joint gradient updates (reconstruction + weighted
clustering objective) runs against those fixed targets. Updates maximize the
objective by descending on its negation. Training stops when fewer than a
delta fraction of hard assignments change between iterations, or at the
iteration cap.

All randomness flows from the seed stored in the model's config, so repeated
runs are bit-identical.
"""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass

import numpy as np

from .. import __version__
from .model import (
    POSTERIOR_FLOOR,
    LatentModel,
    TrainConfig,
    clustering_objective,
    encode_pair,
    reconstruction_objective,
    sharpen,
    vmf_posterior,
)
from .nn import Adam, cosine_rows_backward_wrt_b, l2_normalize, l2_normalize_backward

UNIT_NORM_TOLERANCE = 1e-6
CHECKPOINT_FORMAT = "latent_checkpoint"


@dataclass(frozen=True)
class Assignment:
    """Final clustering state: soft posteriors plus derived hard labels."""

    posteriors: np.ndarray
    labels: np.ndarray
    log_likelihood: np.ndarray
    latents: np.ndarray
    iterations: int
    converged: bool


def _check_unit_rows(x: np.ndarray, what: str) -> None:
    norms = np.linalg.norm(x, axis=-1)
    if not np.allclose(norms, 1.0, atol=UNIT_NORM_TOLERANCE):
        raise RuntimeError(f"{what} drifted off the unit sphere")


def encode_all(model: LatentModel, h_p: np.ndarray, h_o: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    """Pair latents for a whole dataset, batched; rows checked unit-norm."""
    parts = []
    for start in range(0, len(h_p), batch_size):
        z_p = model.encode_p(h_p[start : start + batch_size])
        z_o = model.encode_o(h_o[start : start + batch_size])
        parts.append(encode_pair(z_p, z_o))
    if not parts:
        return np.zeros((0, model.config.latent_dim))
    z = np.vstack(parts)
    _check_unit_rows(z, "pair latents")
    return z


def evaluate_reconstruction(model: LatentModel, h_p: np.ndarray, h_o: np.ndarray) -> float:
    r_p = model.g_p.forward(model.encode_p(h_p))
    r_o = model.g_o.forward(model.encode_o(h_o))
    return reconstruction_objective(h_p, r_p, h_o, r_o)


def _reconstruction_gradients(model: LatentModel, hb_p: np.ndarray, hb_o: np.ndarray) -> float:
    """Accumulate gradients of the negated reconstruction objective."""
    u_p = model.f_p.forward(hb_p)
    z_p = l2_normalize(u_p)
    r_p = model.g_p.forward(z_p)
    u_o = model.f_o.forward(hb_o)
    z_o = l2_normalize(u_o)
    r_o = model.g_o.forward(z_o)
    objective = reconstruction_objective(hb_p, r_p, hb_o, r_o)
    neg = -np.ones(len(hb_p))
    dz_p = model.g_p.backward(cosine_rows_backward_wrt_b(hb_p, r_p, neg))
    dz_o = model.g_o.backward(cosine_rows_backward_wrt_b(hb_o, r_o, neg))
    model.f_p.backward(l2_normalize_backward(u_p, z_p, dz_p))
    model.f_o.backward(l2_normalize_backward(u_o, z_o, dz_o))
    return objective


def pretrain(model: LatentModel, h_p: np.ndarray, h_o: np.ndarray, config: TrainConfig | None = None) -> LatentModel:
    """Reconstruction-only warm-up; per-epoch objective kept on the model."""
    config = config or model.config
    optimizer = Adam(model.parameters(), lr=config.learning_rate)
    history: list[float] = []
    n = len(h_p)
    for epoch in range(config.pretrain_epochs):
        order = model.shuffle_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            optimizer.zero_grad()
            objective = _reconstruction_gradients(model, h_p[idx], h_o[idx])
            if not np.isfinite(objective):
                raise RuntimeError(f"pretraining diverged at epoch {epoch}")
            optimizer.step()
        history.append(evaluate_reconstruction(model, h_p, h_o))
    model.last_pretrain_history = history
    return model


def _spherical_kmeans_once(z: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    n = z.shape[0]
    chosen = [int(rng.integers(n))]
    dist = np.maximum(1.0 - z @ z[chosen[0]], 0.0)
    while len(chosen) < k:
        total = dist.sum()
        if total <= 0.0:
            taken = set(chosen)
            nxt = next(i for i in range(n) if i not in taken)
        else:
            nxt = int(rng.choice(n, p=dist / total))
        chosen.append(nxt)
        dist = np.minimum(dist, np.maximum(1.0 - z @ z[nxt], 0.0))

    centers = z[chosen].copy()
    prev_labels = None
    sims = z @ centers.T
    for _ in range(100):
        labels = np.argmax(sims, axis=1)
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        prev_labels = labels
        for j in range(k):
            members = z[labels == j]
            if len(members) == 0:
                centers[j] = z[int(np.argmin(np.max(sims, axis=1)))]
                continue
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm > 0.0:
                centers[j] = mean / norm
        sims = z @ centers.T
    return centers, float(np.max(sims, axis=1).sum())


def init_centers(latents: np.ndarray, k: int, seed, n_init: int = 10) -> np.ndarray:
    """Spherical k-means with k-means++-style seeding, cosine throughout.

    `seed` may be an int, a SeedSequence, or a Generator. Runs `n_init`
    restarts and keeps the centers with the highest total point-to-center
    cosine. Empty clusters are reseeded with the point worst served by the
    current centers.
    """
    z = l2_normalize(np.asarray(latents, dtype=np.float64))
    n = z.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"cannot place {k} centers on {n} points")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    rng = np.random.default_rng(seed)

    best_centers = None
    best_score = -np.inf
    for _ in range(n_init):
        centers, score = _spherical_kmeans_once(z, k, rng)
        if score > best_score:
            best_centers = centers
            best_score = score
    return best_centers


def joint_objective(model: LatentModel, hb_p: np.ndarray, hb_o: np.ndarray, q: np.ndarray, config: TrainConfig) -> float:
    """Forward-only O_rec + lam * O_clus for a batch against fixed targets."""
    z_p = model.encode_p(hb_p)
    z_o = model.encode_o(hb_o)
    r_p = model.g_p.forward(z_p)
    r_o = model.g_o.forward(z_o)
    z = encode_pair(z_p, z_o)
    p = vmf_posterior(z, model.centers, config.kappa)
    o_rec = reconstruction_objective(hb_p, r_p, hb_o, r_o)
    return o_rec + config.lam * clustering_objective(p, q)


def joint_gradients(
    model: LatentModel,
    grad_centers: np.ndarray,
    hb_p: np.ndarray,
    hb_o: np.ndarray,
    q: np.ndarray,
    config: TrainConfig,
) -> float:
    """Accumulate gradients of -(O_rec + lam*O_clus); return the objective.

    The target q is a constant: no gradient flows through it. The clustering
    term's gradient reaches both the mixture centers and, through the pair
    latent, the encoders.
    """
    u_p = model.f_p.forward(hb_p)
    z_p = l2_normalize(u_p)
    r_p = model.g_p.forward(z_p)
    u_o = model.f_o.forward(hb_o)
    z_o = l2_normalize(u_o)
    r_o = model.g_o.forward(z_o)
    mid = (z_p + z_o) / 2.0
    z = encode_pair(z_p, z_o)
    c_hat = l2_normalize(model.centers)
    p = vmf_posterior(z, model.centers, config.kappa)

    o_rec = reconstruction_objective(hb_p, r_p, hb_o, r_o)
    o_clus = clustering_objective(p, q)
    objective = o_rec + config.lam * o_clus

    neg = -np.ones(len(hb_p))
    dz_p = model.g_p.backward(cosine_rows_backward_wrt_b(hb_p, r_p, neg))
    dz_o = model.g_o.backward(cosine_rows_backward_wrt_b(hb_o, r_o, neg))

    # d(O_clus)/d(logits) via the softmax; entries clamped by the floor
    # contribute nothing.
    g = np.where(p > POSTERIOR_FLOOR, q / np.maximum(p, POSTERIOR_FLOOR), 0.0)
    dlogits = -config.lam * (p * (g - np.sum(g * p, axis=1, keepdims=True)))
    dz = config.kappa * (dlogits @ c_hat)
    dmid = l2_normalize_backward(mid, z, dz)
    grad_centers += l2_normalize_backward(
        model.centers, c_hat, config.kappa * (dlogits.T @ z)
    )

    model.f_p.backward(l2_normalize_backward(u_p, z_p, dz_p + dmid / 2.0))
    model.f_o.backward(l2_normalize_backward(u_o, z_o, dz_o + dmid / 2.0))
    return objective


def train(h_p: np.ndarray, h_o: np.ndarray, config: TrainConfig) -> tuple[LatentModel, Assignment]:
    """Full Algorithm: pretrain, init centers, EM refinement, final posteriors."""
    h_p = np.asarray(h_p, dtype=np.float64)
    h_o = np.asarray(h_o, dtype=np.float64)
    if h_p.ndim != 2 or h_o.ndim != 2:
        raise ValueError("pair features must be 2-D matrices")
    n = h_p.shape[0]
    if h_o.shape[0] != n:
        raise ValueError("predicate and object feature counts differ")
    if n < config.k:
        raise ValueError(f"{n} pairs cannot form {config.k} clusters")

    model = LatentModel(config, h_p.shape[1], h_o.shape[1])
    pretrain(model, h_p, h_o, config)

    model.centers = init_centers(encode_all(model, h_p, h_o), config.k, model.kmeans_rng)
    grad_centers = np.zeros_like(model.centers)
    optimizer = Adam(model.parameters() + [(model.centers, grad_centers)], lr=config.learning_rate)

    prev_labels = None
    converged = False
    epochs_done = 0
    while epochs_done < config.max_iters:
        z = encode_all(model, h_p, h_o)
        p_full = vmf_posterior(z, model.centers, config.kappa)
        labels = np.argmax(p_full, axis=1)
        if prev_labels is not None and float(np.mean(labels != prev_labels)) < config.delta:
            converged = True
            break
        prev_labels = labels
        q_full = sharpen(p_full)
        order = model.shuffle_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            optimizer.zero_grad()
            objective = joint_gradients(model, grad_centers, h_p[idx], h_o[idx], q_full[idx], config)
            if not np.isfinite(objective):
                raise RuntimeError(f"training diverged at iteration {epochs_done}")
            optimizer.step()
            model.centers[...] = l2_normalize(model.centers)
        _check_unit_rows(model.centers, "mixture centers")
        epochs_done += 1

    z = encode_all(model, h_p, h_o)
    p_full = vmf_posterior(z, model.centers, config.kappa)
    log_likelihood = config.kappa * (z @ l2_normalize(model.centers).T)
    assignment = Assignment(
        posteriors=p_full,
        labels=np.argmax(p_full, axis=1),
        log_likelihood=log_likelihood,
        latents=z,
        iterations=epochs_done,
        converged=converged,
    )
    return model, assignment


def rank_pairs_per_type(assignment: Assignment, pairs) -> list[list[int]]:
    """Within each cluster, indices sorted by vMF log-likelihood descending.

    Ties break by pair frequency descending, then by (predicate_sense,
    object_head) lexicographically. `pairs` only needs those attributes.
    """
    n, k = assignment.posteriors.shape
    if len(pairs) != n:
        raise ValueError("pair list length does not match assignment")
    ranked = []
    for c in range(k):
        members = np.flatnonzero(assignment.labels == c).tolist()
        members.sort(
            key=lambda i: (
                -assignment.log_likelihood[i, c],
                -pairs[i].frequency,
                pairs[i].predicate_sense,
                pairs[i].object_head,
            )
        )
        ranked.append(members)
    return ranked


def _model_arrays(model: LatentModel) -> dict[str, np.ndarray]:
    arrays = {}
    for name, net in (("f_p", model.f_p), ("f_o", model.f_o), ("g_p", model.g_p), ("g_o", model.g_o)):
        for i, layer in enumerate(net.layers):
            arrays[f"{name}/{i}/w"] = layer.w
            arrays[f"{name}/{i}/b"] = layer.b
    arrays["centers"] = model.centers
    return arrays


def save_checkpoint(path, model: LatentModel) -> None:
    """Write a reproducible zip checkpoint: metadata JSON plus npy members.

    Member timestamps are pinned so identical models serialize to identical
    bytes; numpy's own savez embeds wall-clock zip timestamps.
    """
    config = model.config
    meta = {
        "format": CHECKPOINT_FORMAT,
        "schema_version": 1,
        "tool_version": __version__,
        "dim_p": model.dim_p,
        "dim_o": model.dim_o,
        "config": {
            "k": config.k,
            "latent_dim": config.latent_dim,
            "hidden": list(config.hidden),
            "kappa": config.kappa,
            "lam": config.lam,
            "delta": config.delta,
            "max_iters": config.max_iters,
            "learning_rate": config.learning_rate,
            "batch_size": config.batch_size,
            "pretrain_epochs": config.pretrain_epochs,
            "seed": config.seed,
        },
    }
    arrays = _model_arrays(model)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        info = zipfile.ZipInfo("meta.json", date_time=(1980, 1, 1, 0, 0, 0))
        zf.writestr(info, json.dumps(meta, sort_keys=True, separators=(",", ":")))
        for name in sorted(arrays):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(arrays[name]))
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, buf.getvalue())


def load_checkpoint(path) -> LatentModel:
    with zipfile.ZipFile(path, "r") as zf:
        try:
            meta = json.loads(zf.read("meta.json"))
        except KeyError:
            raise ValueError(f"{path}: not a model checkpoint (missing metadata)")
        if meta.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"{path}: unexpected checkpoint format {meta.get('format')!r}")
        if meta.get("schema_version") != 1:
            raise ValueError(f"{path}: unsupported schema version {meta.get('schema_version')!r}")
        raw = dict(meta["config"])
        raw["hidden"] = tuple(raw["hidden"])
        config = TrainConfig(**raw)
        model = LatentModel(config, meta["dim_p"], meta["dim_o"])
        arrays = _model_arrays(model)
        for name, target in arrays.items():
            with zf.open(name + ".npy") as fh:
                stored = np.lib.format.read_array(fh)
            if stored.shape != target.shape:
                raise ValueError(f"{path}: array {name} has shape {stored.shape}, expected {target.shape}")
            target[...] = stored
    return model
