import math

import numpy as np
import pytest

from blockbp.mps import (
    MPS,
    apply_mpo_column,
    canonicalize,
    compress,
    mps_add,
    mps_inner,
    product_mps,
    to_dense,
)

from oracles import dense_mps


def random_mps(rng, dims, bond):
    sites = []
    left = 1
    for i, d in enumerate(dims):
        right = 1 if i == len(dims) - 1 else bond
        sites.append(rng.standard_normal((left, d, right)))
        left = right
    return MPS(sites)


class TestCanonicalize:
    def test_uniform_product_state(self):
        m = product_mps([2, 3, 2])
        out = canonicalize(m, "left")
        assert out.log_scale == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(to_dense(out), to_dense(m), atol=1e-12)

    @pytest.mark.parametrize("form", ["left", "right"])
    def test_unit_norm_after(self, form):
        rng = np.random.default_rng(1)
        m = random_mps(rng, [2, 3, 2, 2], 4)
        out = canonicalize(m, form)
        flat = to_dense(MPS(out.sites))  # scale excluded
        assert np.linalg.norm(flat) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("form", ["left", "right"])
    def test_isometries(self, form):
        rng = np.random.default_rng(2)
        m = random_mps(rng, [2, 2, 3], 3)
        out = canonicalize(m, form)
        sites = out.sites if form == "left" else out.sites[::-1]
        for t in sites[:-1]:
            if form == "left":
                mat = t.reshape(-1, t.shape[2])
                gram = mat.T @ mat
            else:
                mat = t.reshape(t.shape[0], -1)
                gram = mat @ mat.T
            np.testing.assert_allclose(gram, np.eye(gram.shape[0]), atol=1e-12)

    def test_norm_recovered_in_log_scale(self):
        rng = np.random.default_rng(3)
        for n_sites in (2, 4, 6):
            m = random_mps(rng, [2] * n_sites, 3)
            dense_norm = np.linalg.norm(dense_mps(m.sites))
            out = canonicalize(m, "left")
            assert math.exp(out.log_scale) == pytest.approx(dense_norm, rel=1e-10)

    def test_zero_state_flagged(self):
        m = MPS([np.zeros((1, 2, 1))])
        out = canonicalize(m, "left")
        assert out.log_scale == -math.inf

    def test_preserves_state(self):
        rng = np.random.default_rng(4)
        m = random_mps(rng, [2, 3, 2], 3)
        out = canonicalize(m, "right")
        np.testing.assert_allclose(to_dense(out), to_dense(m), atol=1e-10)


class TestInner:
    def test_unit_state_self_inner(self):
        rng = np.random.default_rng(5)
        m = canonicalize(random_mps(rng, [2, 2, 3], 3), "left")
        m = MPS(m.sites)  # drop scale: unit-normalized message
        val = mps_inner(m, m)
        assert val.sign == 1
        assert val.log_mag == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_product_states(self):
        a = MPS([np.array([1.0, 0.0]).reshape(1, 2, 1)])
        b = MPS([np.array([0.0, 1.0]).reshape(1, 2, 1)])
        assert mps_inner(a, b).sign == 0

    def test_matches_dense(self):
        rng = np.random.default_rng(6)
        a = random_mps(rng, [2, 3, 2, 2], 3)
        b = random_mps(rng, [2, 3, 2, 2], 4)
        want = float(np.sum(dense_mps(a.sites) * dense_mps(b.sites)))
        got = float(mps_inner(a, b))
        assert got == pytest.approx(want, rel=1e-10)

    def test_includes_log_scales(self):
        rng = np.random.default_rng(7)
        a = random_mps(rng, [2, 2], 2)
        b = random_mps(rng, [2, 2], 2)
        base = float(mps_inner(a, b))
        a2 = MPS(a.sites, a.log_scale + math.log(3.0))
        assert float(mps_inner(a2, b)) == pytest.approx(3.0 * base, rel=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mps_inner(product_mps([2, 2]), product_mps([2, 3]))


class TestCompressAndAdd:
    def test_compress_exact_when_unbounded(self):
        rng = np.random.default_rng(8)
        m = random_mps(rng, [2, 2, 2, 2], 4)
        out, dw = compress(m, 0)
        assert dw == pytest.approx(0.0, abs=1e-20)
        np.testing.assert_allclose(to_dense(out), to_dense(m), atol=1e-10)

    def test_compress_caps_bond(self):
        rng = np.random.default_rng(9)
        m = random_mps(rng, [2] * 6, 8)
        out, _ = compress(m, 2)
        assert out.max_bond() <= 2

    def test_add_matches_dense(self):
        rng = np.random.default_rng(10)
        a = random_mps(rng, [2, 3, 2], 3)
        b = random_mps(rng, [2, 3, 2], 2)
        out = mps_add(a, b, 0.9, -0.4)
        want = 0.9 * dense_mps(a.sites) - 0.4 * dense_mps(b.sites)
        np.testing.assert_allclose(to_dense(out), want, atol=1e-10)

    def test_add_single_site(self):
        a = MPS([np.array([1.0, 0.0]).reshape(1, 2, 1)])
        b = MPS([np.array([0.0, 2.0]).reshape(1, 2, 1)])
        out = mps_add(a, b, 1.0, 0.5)
        np.testing.assert_allclose(to_dense(out), [1.0, 1.0])


class TestApplyMpoColumn:
    @staticmethod
    def identity_column(dims):
        # (up, left, down, right) with up = down = 1
        return [np.eye(d).reshape(1, d, 1, d) for d in dims]

    def test_identity_mpo_preserves_state(self):
        rng = np.random.default_rng(11)
        m = random_mps(rng, [2, 3, 2], 3)
        out, dw = apply_mpo_column(m, self.identity_column([2, 3, 2]), 0)
        fidelity = float(mps_inner(out, m)) / (
            math.sqrt(float(mps_inner(m, m))) * math.sqrt(float(mps_inner(out, out)))
        )
        assert abs(fidelity) == pytest.approx(1.0, abs=1e-10)

    def test_unbounded_matches_dense_on_3x3(self):
        rng = np.random.default_rng(12)
        m = random_mps(rng, [2, 2, 2], 2)
        column = [
            rng.standard_normal((1, 2, 2, 2)),
            rng.standard_normal((2, 2, 2, 2)),
            rng.standard_normal((2, 2, 1, 2)),
        ]
        out, _ = apply_mpo_column(m, column, 0)
        dense_in = dense_mps(m.sites, m.log_scale)
        want = np.einsum(
            "abc,xayz,ybwv,wcqu->zvu", dense_in.reshape(2, 2, 2), *column, optimize=True
        ).reshape(2, 2, 2)
        np.testing.assert_allclose(to_dense(out), want, atol=1e-10)

    def test_output_bond_capped(self):
        rng = np.random.default_rng(13)
        m = random_mps(rng, [2] * 5, 4)
        column = [
            rng.standard_normal((1 if r == 0 else 2, 2, 1 if r == 4 else 2, 2))
            for r in range(5)
        ]
        out, _ = apply_mpo_column(m, column, 3)
        assert out.max_bond() <= 3

    def test_dimension_mismatch(self):
        m = product_mps([2, 2])
        with pytest.raises(ValueError):
            apply_mpo_column(m, self.identity_column([2, 3]), 0)
