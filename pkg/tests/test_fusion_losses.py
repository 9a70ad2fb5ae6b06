import math

import numpy as np
import pytest

from cmretrieval.config import FusionSettings
from cmretrieval.embed.autodiff import Tensor, l2_normalize
from cmretrieval.embed.fusion import fuse, fused_dim, project
from cmretrieval.embed.gradcheck import grad_check
from cmretrieval.embed.losses import loss_cosine, loss_infonce, loss_soft_ce
from cmretrieval.embed.params import init_params
from cmretrieval.config import EmbedSettings
from cmretrieval.errors import DimMismatch, ZeroVector


def _params(strategy, d=4, hidden=10):
    cfg = FusionSettings(strategy=strategy, projection_hidden=hidden, attention_heads=2)
    embedphase = EmbedSettings(
        dim=d, hidden=6, text_buckets=32, text_bucket_dim=4,
        video_height=16, video_width=16, video_patch=8,
    )
    return cfg, init_params(embedphase, cfg, seed=0)


def test_fused_dims():
    d = 4
    for strategy, expected in (("concat", 8), ("bilinear", 16), ("attention", 4)):
        cfg, params = _params(strategy, d)
        assert fused_dim(d, cfg) == expected
        out = fuse(Tensor(np.eye(d)[:2]), Tensor(np.eye(d)[1:3]), params, cfg)
        assert out.shape == (2, expected)


def test_concat_basis_case():
    cfg, params = _params("concat")
    e0, e1 = np.eye(4)[0], np.eye(4)[1]
    out = fuse(Tensor(e0), Tensor(e1), params, cfg).data
    expected = np.zeros(8)
    expected[0] = 1.0
    expected[5] = 1.0
    assert np.array_equal(out, expected)


def test_bilinear_basis_case():
    cfg, params = _params("bilinear")
    e0, e1 = np.eye(4)[0], np.eye(4)[1]
    out = fuse(Tensor(e0), Tensor(e1), params, cfg).data
    expected = np.zeros(16)
    expected[0 * 4 + 1] = 1.0  # row-major outer product
    assert np.array_equal(out, expected)


def test_bilinear_jacobian_is_outer_product_structured(rng):
    cfg, params = _params("bilinear")
    f_m = rng.normal(size=4)
    f_v = rng.normal(size=4)
    # d(outer)[i*4+j] / d f_m[k] = delta_ik * f_v[j]
    for out_idx in range(16):
        i, j = divmod(out_idx, 4)
        m = Tensor(f_m, requires_grad=True)
        v = Tensor(f_v, requires_grad=True)
        out = fuse(m, v, params, cfg)
        seed = np.zeros(16)
        seed[out_idx] = 1.0
        out.backward(seed)
        expected_m = np.zeros(4)
        expected_m[i] = f_v[j]
        expected_v = np.zeros(4)
        expected_v[j] = f_m[i]
        assert np.allclose(m.grad, expected_m)
        assert np.allclose(v.grad, expected_v)


def test_attention_equal_tokens_mean_equals_token():
    cfg, params = _params("attention")
    x = np.random.default_rng(0).normal(size=4)
    out = fuse(Tensor(x), Tensor(x), params, cfg).data
    # with identical tokens both attention outputs coincide, so the mean
    # equals the (linearly transformed) token
    single = fuse(Tensor(np.stack([x, x])), Tensor(np.stack([x, x])), params, cfg).data
    assert np.allclose(out, single[0])
    assert np.allclose(single[0], single[1])


def test_fuse_dim_mismatch():
    cfg, params = _params("concat")
    with pytest.raises(DimMismatch):
        fuse(Tensor(np.zeros((2, 4))), Tensor(np.zeros((3, 4))), params, cfg)


def test_project_eval_deterministic_and_layernorm(rng):
    cfg, params = _params("concat")
    f_k = Tensor(rng.normal(size=(3, 8)))
    a = project(f_k, params, cfg, train=False).data
    b = project(f_k, params, cfg, train=False).data
    assert np.array_equal(a, b)
    assert a.shape == (3, 4)


def test_project_dropout_seeded_reproducible(rng):
    cfg, params = _params("concat")
    f_k = Tensor(rng.normal(size=(5, 8)))
    a = project(f_k, params, cfg, rng=np.random.default_rng(4), train=True).data
    b = project(f_k, params, cfg, rng=np.random.default_rng(4), train=True).data
    c = project(f_k, params, cfg, rng=np.random.default_rng(5), train=True).data
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_project_requires_matching_dim(rng):
    cfg, params = _params("concat")
    with pytest.raises(DimMismatch):
        project(Tensor(rng.normal(size=(2, 5))), params, cfg)


# -- losses ---------------------------------------------------------------


def test_cosine_identities():
    v = np.array([0.6, 0.8])
    assert loss_cosine(v, v).item() == pytest.approx(0.0, abs=1e-12)
    assert loss_cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])).item() == pytest.approx(1.0)
    assert loss_cosine(v, -v).item() == pytest.approx(2.0)
    with pytest.raises(ZeroVector):
        loss_cosine(np.zeros(2), v)


def test_cosine_scale_invariance(rng):
    z = rng.normal(size=8)
    t = rng.normal(size=8)
    assert loss_cosine(z, t).item() == pytest.approx(loss_cosine(z, 7.3 * t).item())


def test_soft_ce_identities(rng):
    t = rng.normal(size=6)
    p = np.exp(t - t.max())
    p /= p.sum()
    entropy = -np.sum(p * np.log(p))
    assert loss_soft_ce(t, t).item() == pytest.approx(entropy, rel=1e-10)
    # uniform prediction tends to log D
    uniform = np.zeros(4)
    peaked = np.array([9.0, -9.0, -9.0, -9.0])
    assert loss_soft_ce(uniform, peaked).item() == pytest.approx(math.log(4), rel=1e-3)


def test_soft_ce_gibbs_inequality(rng):
    for _ in range(100):
        z = rng.normal(size=10)
        t = rng.normal(size=10)
        p = np.exp(t - t.max())
        p /= p.sum()
        entropy = -np.sum(p * np.log(p))
        assert loss_soft_ce(z, t).item() >= entropy - 1e-12


def test_infonce_closed_form_and_degenerate():
    e0, e1 = np.eye(2)
    pair = np.stack([e0, e1])
    expected = -math.log(math.e**2 / (math.e**2 + 1.0))
    assert loss_infonce(pair, pair, 0.5).item() == pytest.approx(expected, rel=1e-12)
    assert loss_infonce(e0[None], e0[None], 0.5).item() == pytest.approx(0.0, abs=1e-12)


def test_infonce_permutation_invariance(rng):
    z = rng.normal(size=(6, 8))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    t = rng.normal(size=(6, 8))
    t /= np.linalg.norm(t, axis=1, keepdims=True)
    base = loss_infonce(z, t, 0.5).item()
    perm = rng.permutation(6)
    assert loss_infonce(z[perm], t[perm], 0.5).item() == pytest.approx(base, rel=1e-12)


def test_infonce_dim_mismatch():
    with pytest.raises(DimMismatch):
        loss_infonce(np.zeros((2, 4)), np.zeros((3, 4)), 0.5)


def test_losses_nonnegative(rng):
    for _ in range(50):
        z = rng.normal(size=(4, 6))
        t = rng.normal(size=(4, 6))
        assert 0.0 <= loss_cosine(z, t).item() <= 2.0
        assert loss_soft_ce(z, t).item() >= 0.0
        zn = z / np.linalg.norm(z, axis=1, keepdims=True)
        tn = t / np.linalg.norm(t, axis=1, keepdims=True)
        assert loss_infonce(zn, tn, 0.5).item() >= 0.0


def test_loss_gradients(rng):
    z = rng.normal(size=(3, 8))
    t = rng.normal(size=(3, 8))
    zn = z / np.linalg.norm(z, axis=1, keepdims=True)
    tn = t / np.linalg.norm(t, axis=1, keepdims=True)
    assert grad_check(lambda d: loss_cosine(d["z"], d["t"]), {"z": z, "t": t}) < 1e-4
    assert grad_check(lambda d: loss_soft_ce(d["z"], d["t"]), {"z": z, "t": t}) < 1e-4
    assert grad_check(lambda d: loss_infonce(d["z"], d["t"], 0.5), {"z": zn, "t": tn}) < 1e-4


def test_full_pipeline_gradients_all_strategies(rng, tiny_embed_cfg):
    from cmretrieval.embed.encoders import encode_motion_batch, encode_video_batch, video_feature_dim
    from cmretrieval.embed.params import trainable

    targets = rng.normal(size=(2, 8))
    targets /= np.linalg.norm(targets, axis=1, keepdims=True)
    for strategy in ("concat", "bilinear", "attention"):
        cfg = FusionSettings(strategy=strategy, projection_hidden=10, attention_heads=2)
        params = init_params(tiny_embed_cfg, cfg, seed=3)
        point = {
            "motion": rng.normal(size=(2, 1440)) * 0.3,
            "video": rng.uniform(size=(2, video_feature_dim(tiny_embed_cfg))),
        }
        point.update({k: v.data for k, v in trainable(params).items()})

        def pipeline(d, cfg=cfg):
            f_m = encode_motion_batch(d["motion"], d)
            f_v = encode_video_batch(d["video"], d)
            f_z = project(fuse(f_m, f_v, d, cfg), d, cfg, train=False)
            return loss_cosine(l2_normalize(f_z), Tensor(targets))

        err = grad_check(pipeline, point, max_coords_per_input=40, seed=1)
        assert err < 1e-4, (strategy, err)
