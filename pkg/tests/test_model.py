"""Tests for separability structures and the decomposition network."""
import numpy as np
import pytest

from sepnet import (
    DecompositionModel,
    DensityMatrix,
    SeparabilityStructure,
    assemble,
    biseparable,
    default_k,
    fixed_partition,
    forward,
    full_separability,
    init_model,
    load_checkpoint,
    output_width,
    reorder_to_canonical,
    save_checkpoint,
    size_constrained_biseparable,
    tensor,
    triseparable,
)


class TestStructures:
    def test_full_separability(self):
        s = full_separability((2, 3, 2))
        assert s.partitions == (((0,), (1,), (2,)),)
        assert s.n_parties == 3
        assert s.total_dim == 12

    def test_fixed_partition_sorts_blocks(self):
        s = fixed_partition((2, 2, 2), [(2, 1), (0,)])
        assert s.partitions == (((0,), (1, 2)),)

    @pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 7)])
    def test_biseparable_counts(self, n, count):
        s = biseparable((2,) * n)
        assert len(s.partitions) == count
        for part in s.partitions:
            assert len(part) == 2
            assert part[0][0] == 0

    def test_size_constrained(self):
        one = size_constrained_biseparable((2,) * 4, 1)
        two = size_constrained_biseparable((2,) * 4, 2)
        assert len(one.partitions) == 4
        assert len(two.partitions) == 3
        for part in one.partitions:
            assert min(len(b) for b in part) == 1
        with pytest.raises(ValueError):
            size_constrained_biseparable((2,) * 4, 3)

    def test_triseparable_counts(self):
        # Stirling numbers of the second kind S(n, 3)
        assert len(triseparable((2, 2, 2)).partitions) == 1
        assert len(triseparable((2,) * 4).partitions) == 6

    def test_validation(self):
        with pytest.raises(ValueError, match="at least 2"):
            SeparabilityStructure((1, 2), (((0,), (1,)),))
        with pytest.raises(ValueError, match="overlap"):
            SeparabilityStructure((2, 2), (((0, 1), (1,)),))
        with pytest.raises(ValueError, match="cover"):
            SeparabilityStructure((2, 2, 2), (((0,), (1,)),))
        with pytest.raises(ValueError, match="two blocks"):
            SeparabilityStructure((2, 2), (((0, 1),),))
        with pytest.raises(ValueError, match="duplicate"):
            SeparabilityStructure((2, 2), (((0,), (1,)), ((0,), (1,))))
        with pytest.raises(ValueError, match="sorted"):
            SeparabilityStructure((2, 2), (((1, 0),),))


class TestReorder:
    def test_vector_two_parties(self, rng):
        a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        block_order = tensor(b, a)  # partition lists party 1 first
        canonical = reorder_to_canonical(block_order, (2, 3), ((1,), (0,)))
        assert np.allclose(canonical, tensor(a, b))

    def test_matrix_three_parties(self, rng):
        mats = [rng.standard_normal((d, d)) for d in (2, 3, 2)]
        block_order = tensor(mats[1], mats[2], mats[0])
        canonical = reorder_to_canonical(block_order, (2, 3, 2), ((1, 2), (0,)))
        assert np.allclose(canonical, tensor(*mats))

    def test_identity_partition_is_noop(self, rng):
        op = rng.standard_normal((4, 4))
        assert np.allclose(reorder_to_canonical(op, (2, 2), ((0,), (1,))), op)

    def test_errors(self):
        with pytest.raises(ValueError, match="permutation"):
            reorder_to_canonical(np.eye(4), (2, 2), ((0,), (0,)))
        with pytest.raises(ValueError, match="shape"):
            reorder_to_canonical(np.eye(3), (2, 2), ((0,), (1,)))


class TestInit:
    def test_output_width(self):
        # per partition: one weight logit + 2 * block_dim reals per block
        assert output_width(full_separability((2, 2))) == 1 + 4 + 4
        assert output_width(full_separability((2, 2, 2))) == 1 + 3 * 4
        assert output_width(biseparable((2, 2, 2))) == 3 * (1 + 4 + 8)

    def test_default_k_and_cap(self):
        s = full_separability((2, 2))
        assert default_k(s) == 4
        assert init_model(s).k_terms == 4
        assert init_model(s, k_terms=16).k_terms == 16
        with pytest.raises(ValueError, match="k_terms"):
            init_model(s, k_terms=17)
        with pytest.raises(ValueError, match="k_terms"):
            init_model(s, k_terms=0)
        with pytest.raises(ValueError, match="width"):
            init_model(s, width=0)

    def test_shapes_and_scaling(self):
        s = biseparable((2, 2, 2))
        m = init_model(s, k_terms=6, width=50, seed=3)
        out = output_width(s)
        assert m.w1.shape == (50, 6)
        assert m.w2.shape == (out, 50)
        assert np.all(m.b1 == 0) and np.all(m.b2 == 0)
        assert np.abs(m.w1).max() <= 1 / np.sqrt(6)
        assert np.abs(m.w2).max() <= 1 / np.sqrt(50)

    def test_deterministic(self):
        s = full_separability((2, 2))
        a = init_model(s, seed=11)
        b = init_model(s, seed=11)
        c = init_model(s, seed=12)
        assert np.array_equal(a.w1, b.w1) and np.array_equal(a.w2, b.w2)
        assert not np.array_equal(a.w1, c.w1)


class TestAssembly:
    def test_valid_state(self):
        s = biseparable((2, 2, 2))
        rho = assemble(init_model(s, seed=5))
        assert isinstance(rho, DensityMatrix)
        assert rho.dims == (2, 2, 2)

    def test_matches_manual_reconstruction(self):
        # independent assembly from the raw per-term outputs: softmax the
        # logits jointly over (term, partition), normalize each block
        # amplitude vector, tensor the blocks, reorder, mix
        s = biseparable((2, 2, 2))
        model = init_model(s, k_terms=3, width=20, seed=8)
        logits, projectors = [], []
        for k in range(1, model.k_terms + 1):
            for term, part in zip(forward(model, k), s.partitions):
                logits.append(term.logit)
                blocks = []
                for raw in term.blocks:
                    m = raw.shape[0] // 2
                    v = 2.0 * raw - 1.0
                    psi = (v[:m] + 1j * v[m:]) / np.linalg.norm(v)
                    blocks.append(psi)
                phi = reorder_to_canonical(tensor(*blocks), s.dims, part)
                projectors.append(np.outer(phi, phi.conj()))
        weights = np.exp(logits) / np.sum(np.exp(logits))
        expected = sum(w * p for w, p in zip(weights, projectors))
        assert np.allclose(assemble(model).matrix, expected, atol=1e-12)

    def test_forward_k_range(self):
        model = init_model(full_separability((2, 2)), k_terms=4)
        for k in (0, 5):
            with pytest.raises(ValueError, match="k must be"):
                forward(model, k)

    def test_degenerate_amplitudes_rejected(self):
        # zero second-layer weights pin every sigmoid at 1/2, which centers
        # every amplitude vector at exactly zero
        model = init_model(full_separability((2, 2)), seed=0)
        model.w2[:] = 0.0
        model.b2[:] = 0.0
        with pytest.raises(ValueError, match="norm below"):
            assemble(model)


class TestCheckpoint:
    def test_round_trip_bit_exact(self, tmp_path):
        s = biseparable((2, 2, 2))
        model = init_model(s, k_terms=5, width=30, seed=21)
        model.b2 += 0.125  # make the biases nontrivial
        path = str(tmp_path / "model.npz")
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        assert loaded.structure == s
        assert loaded.k_terms == 5 and loaded.width == 30 and loaded.seed == 21
        for key, val in model.parameters().items():
            assert np.array_equal(loaded.parameters()[key], val)
        assert np.allclose(assemble(loaded).matrix, assemble(model).matrix)

    def test_version_check(self, tmp_path):
        path = str(tmp_path / "bad.npz")
        np.savez(path, version=np.array(99))
        with pytest.raises(ValueError, match="version"):
            load_checkpoint(path)

    def test_copy_is_independent(self):
        model = init_model(full_separability((2, 2)), seed=1)
        clone = model.copy()
        clone.w1[0, 0] += 1.0
        assert model.w1[0, 0] != clone.w1[0, 0]
