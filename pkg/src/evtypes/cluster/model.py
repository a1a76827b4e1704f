"""Latent spherical model: paired autoencoders plus a vMF mixture head.

Two encoders map predicate-side and object-side feature vectors onto the unit
sphere in R^d; the pair representation is the renormalized midpoint of the two
latents. Cluster membership is a softmax over kappa-scaled cosines to unit
mixture directions. The vMF normalization constant is deliberately never
computed: with a shared fixed concentration it cancels in the posterior.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nn import MLP, cosine_rows, l2_normalize

POSTERIOR_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Hyper-parameters for latent training; defaults follow the CLI."""

    k: int
    latent_dim: int = 100
    hidden: tuple[int, ...] = (500, 500, 1000)
    kappa: float = 10.0
    lam: float = 0.02
    delta: float = 0.05
    max_iters: int = 100
    learning_rate: float = 0.001
    batch_size: int = 64
    pretrain_epochs: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if not self.hidden:
            raise ValueError("at least one hidden layer is required")
        if self.kappa <= 0.0:
            raise ValueError("kappa must be positive")
        if not 0.0 < self.delta:
            raise ValueError("delta must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.pretrain_epochs < 0:
            raise ValueError("pretrain_epochs must be >= 0")


class LatentModel:
    """Paired encoder/decoder networks and trainable mixture centers.

    Encoders end in a linear layer whose output is L2-normalized; decoders
    consume the normalized latent. Centers live on the unit sphere and are
    renormalized after every optimizer step by the training loop.
    """

    def __init__(self, config: TrainConfig, dim_p: int, dim_o: int):
        self.config = config
        self.dim_p = dim_p
        self.dim_o = dim_o
        root = np.random.SeedSequence(config.seed)
        seeds = root.spawn(6)
        enc_dims_p = [dim_p, *config.hidden, config.latent_dim]
        enc_dims_o = [dim_o, *config.hidden, config.latent_dim]
        dec_hidden = list(reversed(config.hidden))
        self.f_p = MLP(np.random.default_rng(seeds[0]), enc_dims_p)
        self.f_o = MLP(np.random.default_rng(seeds[1]), enc_dims_o)
        self.g_p = MLP(np.random.default_rng(seeds[2]), [config.latent_dim, *dec_hidden, dim_p])
        self.g_o = MLP(np.random.default_rng(seeds[3]), [config.latent_dim, *dec_hidden, dim_o])
        self.shuffle_rng = np.random.default_rng(seeds[4])
        self.kmeans_rng = np.random.default_rng(seeds[5])
        self.centers = np.zeros((config.k, config.latent_dim))

    def encode_p(self, h_p: np.ndarray) -> np.ndarray:
        return l2_normalize(self.f_p.forward(h_p))

    def encode_o(self, h_o: np.ndarray) -> np.ndarray:
        return l2_normalize(self.f_o.forward(h_o))

    def parameters(self):
        nets = (self.f_p, self.f_o, self.g_p, self.g_o)
        return [p for net in nets for p in net.parameters()]


def encode_pair(z_p: np.ndarray, z_o: np.ndarray) -> np.ndarray:
    """Renormalized midpoint of two unit latents.

    Antipodal inputs average to the zero vector, which has no direction;
    that is reported as an error rather than silently mapped anywhere.
    """
    mid = (z_p + z_o) / 2.0
    norms = np.linalg.norm(mid, axis=-1)
    if np.any(norms == 0.0):
        raise ValueError("pair latent collapsed to zero; inputs are antipodal")
    return mid / norms[..., None]


def vmf_posterior(z: np.ndarray, centers: np.ndarray, kappa: float) -> np.ndarray:
    """Mixture responsibilities softmax_k(kappa * cos(z, c_k)), row-stable."""
    if kappa <= 0.0:
        raise ValueError("kappa must be positive")
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    centers = np.asarray(centers, dtype=np.float64)
    z_hat = l2_normalize(z)
    c_hat = l2_normalize(centers)
    logits = kappa * (z_hat @ c_hat.T)
    logits -= logits.max(axis=1, keepdims=True)
    expd = np.exp(logits)
    return expd / expd.sum(axis=1, keepdims=True)


def sharpen(p: np.ndarray, s: np.ndarray | None = None) -> np.ndarray:
    """Square-and-renormalize target distribution.

    q_ik = (p_ik^2 / s_k) / sum_k' (p_ik'^2 / s_k') where s defaults to the
    column sums of p. Passing s explicitly lets the caller sharpen a batch
    against statistics computed over the full dataset.
    """
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    if s is None:
        s = p.sum(axis=0)
    else:
        s = np.asarray(s, dtype=np.float64)
        if s.shape != (p.shape[1],):
            raise ValueError("s must have one entry per mixture component")
    if np.any(s <= 0.0):
        raise ValueError("cluster mass must be positive to sharpen")
    num = (p * p) / s
    denom = num.sum(axis=1, keepdims=True)
    if np.any(denom == 0.0):
        raise ValueError("cannot sharpen a row with zero mass")
    return num / denom


def reconstruction_objective(h_p, r_p, h_o, r_o) -> float:
    """Sum of reconstruction cosines over both streams (to be maximized)."""
    return float(np.sum(cosine_rows(h_p, r_p)) + np.sum(cosine_rows(h_o, r_o)))


def clustering_objective(p: np.ndarray, q: np.ndarray) -> float:
    """Sum_ik q_ik ln max(p_ik, floor); q is a fixed target, never a variable."""
    p = np.atleast_2d(np.asarray(p, dtype=np.float64))
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    if p.shape != q.shape:
        raise ValueError("posterior and target shapes differ")
    return float(np.sum(q * np.log(np.maximum(p, POSTERIOR_FLOOR))))
