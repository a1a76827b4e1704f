import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evtypes.cluster import (
    POSTERIOR_FLOOR,
    Assignment,
    LatentModel,
    TrainConfig,
    clustering_objective,
    encode_pair,
    init_centers,
    load_checkpoint,
    pretrain,
    rank_pairs_per_type,
    reconstruction_objective,
    save_checkpoint,
    sharpen,
    train,
    vmf_posterior,
)
from evtypes.cluster.nn import (
    MLP,
    Adam,
    Dense,
    cosine_rows,
    cosine_rows_backward_wrt_b,
    l2_normalize,
    l2_normalize_backward,
)
from evtypes.cluster.train import evaluate_reconstruction, joint_gradients, joint_objective
from evtypes.metrics import ClusteringResult, nmi
from oracles import clustering_objective_oracle, sharpen_oracle, vmf_posterior_oracle


def tiny_config(**overrides):
    base = dict(
        k=2,
        latent_dim=4,
        hidden=(8,),
        kappa=10.0,
        lam=0.02,
        delta=0.05,
        max_iters=5,
        learning_rate=0.001,
        batch_size=64,
        pretrain_epochs=2,
        seed=7,
    )
    base.update(overrides)
    return TrainConfig(**base)


# ---------------------------------------------------------------- nn layer


def test_dense_forward_shape():
    rng = np.random.default_rng(0)
    layer = Dense(rng, 5, 3)
    out = layer.forward(rng.standard_normal((4, 5)))
    assert out.shape == (4, 3)


def test_mlp_gradients_match_finite_differences():
    rng = np.random.default_rng(3)
    net = MLP(np.random.default_rng(11), [5, 8, 3])
    x = rng.standard_normal((6, 5))
    target = rng.standard_normal((6, 3))

    def loss():
        diff = net.forward(x) - target
        return 0.5 * float(np.sum(diff * diff))

    for _, grad in net.parameters():
        grad[...] = 0.0
    net.backward(net.forward(x) - target)

    for param, grad in net.parameters():
        numeric = _numeric_grad(param, loss)
        _assert_grads_close(grad, numeric)


def test_adam_descends_quadratic():
    p = np.array([5.0, -3.0])
    g = np.zeros(2)
    opt = Adam([(p, g)], lr=0.1)
    for _ in range(500):
        opt.zero_grad()
        g += 2.0 * p
        opt.step()
    assert np.linalg.norm(p) < 1e-3


def test_l2_normalize_rows_and_zero_error():
    x = np.array([[3.0, 4.0], [0.0, 2.0]])
    y = l2_normalize(x)
    assert np.allclose(np.linalg.norm(y, axis=1), 1.0)
    with pytest.raises(ValueError):
        l2_normalize(np.zeros((1, 3)))


def test_l2_normalize_backward_matches_finite_differences():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((4, 6))
    w = rng.standard_normal((4, 6))

    def loss():
        return float(np.sum(l2_normalize(x) * w))

    analytic = l2_normalize_backward(x, l2_normalize(x), w)
    numeric = _numeric_grad(x, loss)
    _assert_grads_close(analytic, numeric)


def test_cosine_backward_matches_finite_differences():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((3, 5))
    b = rng.standard_normal((3, 5))
    dcos = rng.standard_normal(3)

    def loss():
        return float(np.sum(cosine_rows(a, b) * dcos))

    analytic = cosine_rows_backward_wrt_b(a, b, dcos)
    numeric = _numeric_grad(b, loss)
    _assert_grads_close(analytic, numeric)


def _numeric_grad(param, f, h=1e-6):
    grad = np.zeros_like(param)
    it = np.nditer(param, flags=["multi_index"])
    for _ in it:
        ix = it.multi_index
        saved = param[ix]
        param[ix] = saved + h
        f_plus = f()
        param[ix] = saved - h
        f_minus = f()
        param[ix] = saved
        grad[ix] = (f_plus - f_minus) / (2.0 * h)
    return grad


def _assert_grads_close(analytic, numeric, tol=1e-4):
    denom = np.maximum(1e-3, np.maximum(np.abs(analytic), np.abs(numeric)))
    rel = np.abs(analytic - numeric) / denom
    assert rel.max() < tol, f"max relative gradient error {rel.max():.3e}"


# ----------------------------------------------------------- vmf posterior


def test_vmf_two_centers_worked_example():
    z = np.array([[1.0, 0.0]])
    centers = np.array([[1.0, 0.0], [0.0, 1.0]])
    p = vmf_posterior(z, centers, kappa=10.0)
    expected_hot = math.exp(10.0) / (math.exp(10.0) + 1.0)
    assert p.shape == (1, 2)
    assert p[0, 0] == pytest.approx(expected_hot, abs=1e-12)
    assert p[0, 1] == pytest.approx(1.0 - expected_hot, abs=1e-12)


def test_vmf_kappa_to_zero_is_uniform():
    rng = np.random.default_rng(2)
    z = l2_normalize(rng.standard_normal((5, 8)))
    centers = l2_normalize(rng.standard_normal((4, 8)))
    p = vmf_posterior(z, centers, kappa=1e-9)
    assert np.all(np.abs(p - 0.25) < 1e-8)


def test_vmf_matches_oracle():
    rng = np.random.default_rng(9)
    z = l2_normalize(rng.standard_normal((6, 5)))
    centers = l2_normalize(rng.standard_normal((3, 5)))
    p = vmf_posterior(z, centers, kappa=10.0)
    assert np.allclose(p, vmf_posterior_oracle(z, centers, 10.0), atol=1e-10)


def test_vmf_rejects_bad_kappa():
    z = np.array([[1.0, 0.0]])
    with pytest.raises(ValueError):
        vmf_posterior(z, z, kappa=0.0)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_vmf_rows_sum_to_one_and_rotation_invariant(seed):
    rng = np.random.default_rng(seed)
    n, k, d = rng.integers(1, 7), rng.integers(1, 5), rng.integers(2, 7)
    z = l2_normalize(rng.standard_normal((n, d)))
    centers = l2_normalize(rng.standard_normal((k, d)))
    p = vmf_posterior(z, centers, kappa=10.0)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    rotation, _ = np.linalg.qr(rng.standard_normal((d, d)))
    rotated = vmf_posterior(z @ rotation, centers @ rotation, kappa=10.0)
    assert np.allclose(p, rotated, atol=1e-9)


# ----------------------------------------------------------------- sharpen


def test_sharpen_uniform_fixed_point():
    p = np.full((4, 3), 1.0 / 3.0)
    assert np.allclose(sharpen(p), p, atol=1e-12)


def test_sharpen_single_row_own_mass_cancels():
    q = sharpen(np.array([[0.8, 0.2]]))
    assert np.allclose(q, [[0.8, 0.2]], atol=1e-12)


def test_sharpen_identical_rows_proportionality():
    q = sharpen(np.array([[0.8, 0.2], [0.8, 0.2]]))
    assert np.allclose(q, [[0.8, 0.2], [0.8, 0.2]], atol=1e-12)


def test_sharpen_external_mass_sharpens():
    q = sharpen(np.array([[0.8, 0.2]]), s=np.array([1.0, 1.0]))
    assert q[0, 0] == pytest.approx(0.64 / 0.68, abs=1e-10)
    assert q[0, 1] == pytest.approx(0.04 / 0.68, abs=1e-10)


def test_sharpen_matches_oracle():
    rng = np.random.default_rng(13)
    p = rng.dirichlet(np.ones(4), size=6)
    assert np.allclose(sharpen(p), sharpen_oracle(p), atol=1e-12)


def test_sharpen_rejects_bad_mass():
    p = np.array([[0.5, 0.5]])
    with pytest.raises(ValueError):
        sharpen(p, s=np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        sharpen(p, s=np.array([1.0, 1.0, 1.0]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_sharpen_row_stochastic_and_uniform_mass_sharpening(seed):
    rng = np.random.default_rng(seed)
    n, k = rng.integers(1, 8), rng.integers(2, 6)
    p = rng.dirichlet(np.ones(k), size=n)
    q = sharpen(p)
    assert np.allclose(q.sum(axis=1), 1.0, atol=1e-12)
    # argmax preservation only holds when mass is uniform; dataset-level
    # mass deliberately boosts small clusters (see the test below)
    uniform = sharpen(p, s=np.ones(k))
    assert np.array_equal(np.argmax(uniform, axis=1), np.argmax(p, axis=1))
    assert np.all(uniform.max(axis=1) >= p.max(axis=1) - 1e-12)


def test_sharpen_dataset_mass_can_move_argmax():
    # a borderline row flips toward the low-mass cluster: (0.55, 0.45)
    # squared over s=(2.35, 0.65) gives (0.129, 0.312) before renormalizing
    p = np.array([[0.55, 0.45], [0.9, 0.1], [0.9, 0.1]])
    q = sharpen(p)
    assert np.argmax(p[0]) == 0
    assert np.argmax(q[0]) == 1


# ---------------------------------------------------------------- objectives


def test_clustering_objective_one_hot_match_is_zero():
    p = np.eye(3)
    assert clustering_objective(p, p) == pytest.approx(0.0, abs=1e-15)


def test_clustering_objective_uniform_single_row():
    p = np.array([[0.5, 0.5]])
    assert clustering_objective(p, p) == pytest.approx(-math.log(2.0), abs=1e-12)


def test_clustering_objective_zero_probability_clamped():
    p = np.array([[1.0, 0.0]])
    q = np.array([[0.0, 1.0]])
    assert clustering_objective(p, q) == pytest.approx(math.log(POSTERIOR_FLOOR), abs=1e-9)


def test_clustering_objective_shape_mismatch():
    with pytest.raises(ValueError):
        clustering_objective(np.eye(2), np.eye(3))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_clustering_objective_nonpositive_and_oracle(seed):
    rng = np.random.default_rng(seed)
    n, k = rng.integers(1, 6), rng.integers(2, 5)
    p = rng.dirichlet(np.ones(k), size=n)
    q = rng.dirichlet(np.ones(k), size=n)
    value = clustering_objective(p, q)
    assert value <= 1e-12
    assert value == pytest.approx(clustering_objective_oracle(p, q), abs=1e-10)


def test_reconstruction_objective_identity_and_orthogonal():
    rng = np.random.default_rng(4)
    h_p = rng.standard_normal((5, 3))
    h_o = rng.standard_normal((5, 4))
    assert reconstruction_objective(h_p, h_p, h_o, h_o) == pytest.approx(10.0, abs=1e-12)
    flipped = np.stack([h_p[:, 1], -h_p[:, 0], np.zeros(5)], axis=1)
    h_p2 = np.stack([h_p[:, 0], h_p[:, 1], np.zeros(5)], axis=1)
    assert reconstruction_objective(h_p2, flipped, h_o, h_o) == pytest.approx(5.0, abs=1e-12)


def test_reconstruction_objective_matches_reevaluation():
    rng = np.random.default_rng(21)
    config = tiny_config(seed=21)
    model = LatentModel(config, 5, 6)
    h_p = rng.standard_normal((3, 5))
    h_o = rng.standard_normal((3, 6))
    value = evaluate_reconstruction(model, h_p, h_o)
    total = 0.0
    for i in range(3):
        r_p = model.g_p.forward(model.encode_p(h_p[i : i + 1]))[0]
        r_o = model.g_o.forward(model.encode_o(h_o[i : i + 1]))[0]
        total += float(np.dot(h_p[i], r_p) / (np.linalg.norm(h_p[i]) * np.linalg.norm(r_p)))
        total += float(np.dot(h_o[i], r_o) / (np.linalg.norm(h_o[i]) * np.linalg.norm(r_o)))
    assert value == pytest.approx(total, abs=1e-10)


# --------------------------------------------------------------- encode_pair


def test_encode_pair_orthogonal_units():
    z = encode_pair(np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]))
    assert np.allclose(z, [[1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)]], atol=1e-12)


def test_encode_pair_antipodal_is_error():
    with pytest.raises(ValueError):
        encode_pair(np.array([[1.0, 0.0]]), np.array([[-1.0, 0.0]]))


# --------------------------------------------------------------- init_centers


def test_init_centers_each_point_when_k_equals_n():
    rng = np.random.default_rng(17)
    z = l2_normalize(rng.standard_normal((5, 6)))
    centers = init_centers(z, 5, seed=3)
    sims = z @ centers.T
    assert np.allclose(np.sort(sims.max(axis=1)), 1.0, atol=1e-9)
    assert np.allclose(np.sort(sims.max(axis=0)), 1.0, atol=1e-9)


def test_init_centers_k_one_is_normalized_mean():
    rng = np.random.default_rng(18)
    z = l2_normalize(rng.standard_normal((7, 4)) + 2.0)
    centers = init_centers(z, 1, seed=0)
    mean = z.mean(axis=0)
    assert np.allclose(centers[0], mean / np.linalg.norm(mean), atol=1e-9)


def test_init_centers_recovers_orthogonal_bundles():
    rng = np.random.default_rng(19)
    directions = np.eye(6)[:3]
    points, means = [], []
    for d in directions:
        bundle = l2_normalize(d + 0.05 * rng.standard_normal((20, 6)))
        points.append(bundle)
        mean = bundle.mean(axis=0)
        means.append(mean / np.linalg.norm(mean))
    z = np.vstack(points)
    centers = init_centers(z, 3, seed=11)
    assert np.allclose(np.linalg.norm(centers, axis=1), 1.0, atol=1e-9)
    sims = np.array(means) @ centers.T
    assert np.all(sims.max(axis=1) >= 0.99)


def test_init_centers_rejects_too_many():
    z = np.eye(3)
    with pytest.raises(ValueError):
        init_centers(z, 4, seed=0)


# ------------------------------------------------------------------ pretrain


def test_pretrain_zero_epochs_is_identity():
    config = tiny_config(pretrain_epochs=0)
    model = LatentModel(config, 5, 6)
    before = [p.copy() for p, _ in model.parameters()]
    rng = np.random.default_rng(1)
    pretrain(model, rng.standard_normal((8, 5)), rng.standard_normal((8, 6)))
    for (p, _), saved in zip(model.parameters(), before):
        assert np.array_equal(p, saved)


def test_pretrain_objective_non_decreasing():
    config = tiny_config(latent_dim=4, hidden=(16,), pretrain_epochs=10, learning_rate=0.005, seed=23)
    model = LatentModel(config, 6, 6)
    rng = np.random.default_rng(23)
    h_p = rng.standard_normal((32, 6))
    h_o = rng.standard_normal((32, 6))
    pretrain(model, h_p, h_o)
    history = model.last_pretrain_history
    assert len(history) == 10
    for earlier, later in zip(history, history[1:]):
        assert later >= earlier - 0.01 * abs(earlier)


def test_pretrain_deterministic_across_runs():
    rng = np.random.default_rng(29)
    h_p = rng.standard_normal((12, 5))
    h_o = rng.standard_normal((12, 6))
    params = []
    for _ in range(2):
        model = LatentModel(tiny_config(seed=29, pretrain_epochs=3), 5, 6)
        pretrain(model, h_p, h_o)
        params.append([p.copy() for p, _ in model.parameters()])
    for a, b in zip(params[0], params[1]):
        assert np.array_equal(a, b)


# ----------------------------------------------------------- gradient checks


def test_joint_gradients_match_finite_differences():
    config = tiny_config(seed=31, kappa=10.0, lam=0.02)
    model = LatentModel(config, 5, 7)
    rng = np.random.default_rng(31)
    h_p = rng.standard_normal((6, 5))
    h_o = rng.standard_normal((6, 7))
    model.centers = l2_normalize(rng.standard_normal((2, 4)))

    z0 = encode_pair(model.encode_p(h_p), model.encode_o(h_o))
    q = sharpen(vmf_posterior(z0, model.centers, config.kappa))

    grad_centers = np.zeros_like(model.centers)
    params = model.parameters() + [(model.centers, grad_centers)]
    for _, grad in params:
        grad[...] = 0.0
    joint_gradients(model, grad_centers, h_p, h_o, q, config)

    def loss():
        return -joint_objective(model, h_p, h_o, q, config)

    names = [f"param{i}" for i in range(len(params))]
    for name, (param, grad) in zip(names, params):
        numeric = _numeric_grad(param, loss)
        denom = np.maximum(1e-3, np.maximum(np.abs(grad), np.abs(numeric)))
        rel = np.abs(grad - numeric) / denom
        assert rel.max() < 1e-4, f"{name}: max relative error {rel.max():.3e}"


def test_reconstruction_gradients_match_finite_differences():
    from evtypes.cluster.train import _reconstruction_gradients

    config = tiny_config(seed=37)
    model = LatentModel(config, 4, 5)
    rng = np.random.default_rng(37)
    h_p = rng.standard_normal((5, 4))
    h_o = rng.standard_normal((5, 5))

    for _, grad in model.parameters():
        grad[...] = 0.0
    _reconstruction_gradients(model, h_p, h_o)

    def loss():
        return -evaluate_reconstruction(model, h_p, h_o)

    for param, grad in model.parameters():
        numeric = _numeric_grad(param, loss)
        _assert_grads_close(grad, numeric)


# --------------------------------------------------------------------- train


def test_train_single_cluster_posterior_is_ones():
    rng = np.random.default_rng(41)
    config = tiny_config(k=1, seed=41, pretrain_epochs=1, max_iters=3)
    model, assignment = train(rng.standard_normal((8, 5)), rng.standard_normal((8, 6)), config)
    assert np.array_equal(assignment.posteriors, np.ones((8, 1)))
    assert np.array_equal(assignment.labels, np.zeros(8, dtype=np.intp))
    assert assignment.converged


def test_train_rejects_more_clusters_than_pairs():
    rng = np.random.default_rng(43)
    config = tiny_config(k=5)
    with pytest.raises(ValueError):
        train(rng.standard_normal((3, 5)), rng.standard_normal((3, 6)), config)


def test_train_deterministic_same_seed():
    rng = np.random.default_rng(47)
    h_p = rng.standard_normal((20, 5))
    h_o = rng.standard_normal((20, 6))
    results = []
    for _ in range(2):
        config = tiny_config(k=3, seed=47, pretrain_epochs=2, max_iters=4)
        _, assignment = train(h_p, h_o, config)
        results.append(assignment)
    assert np.array_equal(results[0].labels, results[1].labels)
    assert np.array_equal(results[0].posteriors, results[1].posteriors)


def test_train_assignment_invariants():
    rng = np.random.default_rng(53)
    config = tiny_config(k=2, seed=53, pretrain_epochs=1, max_iters=3)
    model, assignment = train(rng.standard_normal((10, 5)), rng.standard_normal((10, 6)), config)
    assert np.allclose(assignment.posteriors.sum(axis=1), 1.0, atol=1e-6)
    assert np.array_equal(assignment.labels, np.argmax(assignment.posteriors, axis=1))
    assert np.allclose(np.linalg.norm(assignment.latents, axis=1), 1.0, atol=1e-6)
    assert np.allclose(np.linalg.norm(model.centers, axis=1), 1.0, atol=1e-6)


def test_train_separates_obvious_structure():
    rng = np.random.default_rng(59)
    truth = np.repeat(np.arange(3), 20)
    dirs_p = np.eye(8)[:3]
    dirs_o = np.eye(8)[3:6]
    h_p = np.vstack([dirs_p[c] + 0.1 * rng.standard_normal(8) for c in truth])
    h_o = np.vstack([dirs_o[c] + 0.1 * rng.standard_normal(8) for c in truth])
    config = tiny_config(
        k=3, latent_dim=8, hidden=(32,), seed=59, pretrain_epochs=5, max_iters=10, batch_size=16
    )
    _, assignment = train(h_p, h_o, config)
    result = ClusteringResult(
        predicted=tuple(int(x) for x in assignment.labels),
        reference=tuple(int(x) for x in truth),
    )
    assert nmi(result) >= 0.8


# ----------------------------------------------------------------- ranking


class _FakePair:
    def __init__(self, predicate_sense, object_head, frequency):
        self.predicate_sense = predicate_sense
        self.object_head = object_head
        self.frequency = frequency


def test_rank_pairs_orders_by_loglik():
    loglik = 10.0 * np.array([[0.5, 0.0], [0.9, 0.0], [0.1, 0.0]])
    assignment = Assignment(
        posteriors=np.array([[0.9, 0.1]] * 3),
        labels=np.zeros(3, dtype=np.intp),
        log_likelihood=loglik,
        latents=np.zeros((3, 2)),
        iterations=1,
        converged=True,
    )
    pairs = [_FakePair("a_1", "x", 1), _FakePair("b_1", "y", 1), _FakePair("c_1", "z", 1)]
    ranked = rank_pairs_per_type(assignment, pairs)
    assert ranked[0] == [1, 0, 2]
    assert ranked[1] == []


def test_rank_pairs_ties_break_by_frequency_then_name():
    loglik = np.full((3, 1), 4.2)
    assignment = Assignment(
        posteriors=np.ones((3, 1)),
        labels=np.zeros(3, dtype=np.intp),
        log_likelihood=loglik,
        latents=np.zeros((3, 2)),
        iterations=1,
        converged=True,
    )
    pairs = [_FakePair("b_1", "x", 3), _FakePair("a_1", "x", 3), _FakePair("c_1", "x", 9)]
    ranked = rank_pairs_per_type(assignment, pairs)
    assert ranked[0] == [2, 1, 0]


def test_rank_pairs_matches_cosine_sort_oracle():
    rng = np.random.default_rng(61)
    z = l2_normalize(rng.standard_normal((12, 6)))
    centers = l2_normalize(rng.standard_normal((2, 6)))
    posteriors = vmf_posterior(z, centers, kappa=10.0)
    labels = np.argmax(posteriors, axis=1)
    loglik = 10.0 * (z @ centers.T)
    assignment = Assignment(
        posteriors=posteriors,
        labels=labels,
        log_likelihood=loglik,
        latents=z,
        iterations=1,
        converged=True,
    )
    pairs = [_FakePair(f"p{i}_1", f"o{i}", 1) for i in range(12)]
    ranked = rank_pairs_per_type(assignment, pairs)
    for c in range(2):
        members = [i for i in range(12) if labels[i] == c]
        expected = sorted(members, key=lambda i: -float(z[i] @ centers[c]))
        assert ranked[c] == expected


def test_rank_pairs_length_mismatch():
    assignment = Assignment(
        posteriors=np.ones((2, 1)),
        labels=np.zeros(2, dtype=np.intp),
        log_likelihood=np.ones((2, 1)),
        latents=np.zeros((2, 2)),
        iterations=0,
        converged=False,
    )
    with pytest.raises(ValueError):
        rank_pairs_per_type(assignment, [_FakePair("a_1", "x", 1)])


# -------------------------------------------------------------- checkpoints


def test_checkpoint_round_trip_and_bytes(tmp_path):
    rng = np.random.default_rng(67)
    config = tiny_config(seed=67, pretrain_epochs=1, max_iters=2)
    model, _ = train(rng.standard_normal((6, 5)), rng.standard_normal((6, 6)), config)

    first = tmp_path / "model-a.ckpt"
    second = tmp_path / "model-b.ckpt"
    save_checkpoint(first, model)
    save_checkpoint(second, model)
    assert first.read_bytes() == second.read_bytes()

    loaded = load_checkpoint(first)
    assert loaded.config == model.config
    for (p_a, _), (p_b, _) in zip(model.parameters(), loaded.parameters()):
        assert np.array_equal(p_a, p_b)
    assert np.array_equal(loaded.centers, model.centers)


def test_checkpoint_rejects_foreign_zip(tmp_path):
    import zipfile

    path = tmp_path / "junk.ckpt"
    with zipfile.ZipFile(path, "w") as zf:
        zf.writestr("meta.json", '{"format": "something_else", "schema_version": 1}')
    with pytest.raises(ValueError):
        load_checkpoint(path)
