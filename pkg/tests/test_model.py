import numpy as np
import pytest

from walkmeta import model
from walkmeta.errors import ParameterError


def fd_grad(p, batch, h=1e-5):
    """Central-difference gradient oracle."""
    out = np.zeros_like(p.values)
    for i in range(len(out)):
        vp, vm = p.values.copy(), p.values.copy()
        vp[i] += h
        vm[i] -= h
        out[i] = (model.loss(p.with_values(vp), batch)
                  - model.loss(p.with_values(vm), batch)) / (2 * h)
    return out


def random_batch(rng, arch, m=8):
    x = rng.uniform(-2, 2, size=(m, arch.input_dim))
    if arch.head == model.HEAD_XENT:
        y = rng.integers(0, arch.output_dim, size=m)
    else:
        y = rng.standard_normal((m, arch.output_dim)).squeeze(-1)
    return x, y


class TestArch:
    def test_param_count_1_40_1(self):
        assert model.Arch(1, (40,), 1).param_count == 121

    def test_param_count_two_hidden(self):
        # 1*40+40 + 40*40+40 + 40*1+1
        assert model.Arch(1, (40, 40), 1).param_count == 1761

    def test_bad_head(self):
        with pytest.raises(ParameterError):
            model.Arch(1, (4,), 1, "huber")


class TestInit:
    def test_biases_zero(self):
        arch = model.Arch(3, (5,), 2)
        p = model.init_params(arch, seed=0)
        layers = model._unpack(p.values, arch)
        for _, b in layers:
            assert np.all(b == 0)

    def test_deterministic(self):
        arch = model.Arch(2, (8,), 1)
        a = model.init_params(arch, seed=11)
        b = model.init_params(arch, seed=11)
        assert np.array_equal(a.values, b.values)

    def test_glorot_bounds(self):
        arch = model.Arch(4, (10,), 3)
        p = model.init_params(arch, seed=2)
        W1 = model._unpack(p.values, arch)[0][0]
        bound = np.sqrt(6.0 / (4 + 10))
        assert np.all(np.abs(W1) <= bound)


class TestLossGrad:
    def test_mse_perfect_fit(self):
        arch = model.Arch(1, (6,), 1)
        p = model.init_params(arch, seed=1)
        x = np.linspace(-1, 1, 5).reshape(-1, 1)
        y = model.predict(p, x)[:, 0]
        assert model.loss(p, (x, y)) < 1e-28
        assert np.max(np.abs(model.grad(p, (x, y)).values)) < 1e-13

    def test_xent_uniform_logits(self):
        arch = model.Arch(2, (4,), 5, model.HEAD_XENT)
        p = model.init_params(arch, seed=0)
        p = p.with_values(np.zeros(arch.param_count))  # zero weights -> uniform
        x = np.random.default_rng(0).standard_normal((6, 2))
        y = np.array([0, 1, 2, 3, 4, 0])
        assert abs(model.loss(p, (x, y)) - np.log(5)) < 1e-12

    @pytest.mark.parametrize("head,out", [(model.HEAD_MSE, 1),
                                          (model.HEAD_XENT, 5)])
    def test_grad_matches_fd(self, head, out):
        rng = np.random.default_rng(17)
        arch = model.Arch(2, (6,), out, head)
        for trial in range(20):
            p = model.init_params(arch, seed=trial)
            batch = random_batch(rng, arch)
            g = model.grad(p, batch).values
            fd = fd_grad(p, batch)
            scale = np.maximum(np.abs(g), 1e-3 * np.max(np.abs(g)))
            assert np.max(np.abs(g - fd) / scale) < 1e-5

    def test_permutation_invariance(self):
        arch = model.Arch(2, (6,), 1)
        p = model.init_params(arch, seed=3)
        rng = np.random.default_rng(4)
        x, y = random_batch(rng, arch, m=10)
        perm = rng.permutation(10)
        assert abs(model.loss(p, (x, y)) - model.loss(p, (x[perm], y[perm]))) < 1e-12

    def test_shape_mismatch(self):
        arch = model.Arch(2, (4,), 1)
        p = model.init_params(arch, seed=0)
        with pytest.raises(ParameterError):
            model.loss(p, (np.zeros((3, 5)), np.zeros(3)))

    def test_empty_batch(self):
        arch = model.Arch(2, (4,), 1)
        p = model.init_params(arch, seed=0)
        with pytest.raises(ParameterError):
            model.loss(p, (np.zeros((0, 2)), np.zeros(0)))


class TestQuadraticHead:
    ARCH = model.Arch(1, (), 6, model.HEAD_QUADRATIC)
    BATCH = (np.zeros((1, 1)), np.zeros(1))

    def test_loss_and_grad(self):
        p = model.ParamVector(np.arange(6.0), self.ARCH)
        assert model.loss(p, self.BATCH) == 0.5 * float(np.arange(6.0) @ np.arange(6.0))
        assert np.array_equal(model.grad(p, self.BATCH).values, np.arange(6.0))

    def test_hvp_is_identity(self):
        p = model.ParamVector(np.random.default_rng(0).standard_normal(6), self.ARCH)
        v = p.with_values(np.random.default_rng(1).standard_normal(6))
        hv = model.hvp(p, self.BATCH, v)
        assert np.max(np.abs(hv.values - v.values)) < 1e-8


class TestHvp:
    def setup_method(self):
        self.arch = model.Arch(1, (4,), 1)  # d = 13
        self.rng = np.random.default_rng(8)
        self.p = model.init_params(self.arch, seed=5)
        self.batch = random_batch(self.rng, self.arch, m=6)

    def test_zero_direction(self):
        v = self.p.with_values(np.zeros(13))
        assert np.all(model.hvp(self.p, self.batch, v).values == 0)

    def test_symmetry(self):
        a = self.p.with_values(self.rng.standard_normal(13))
        b = self.p.with_values(self.rng.standard_normal(13))
        ha = model.hvp(self.p, self.batch, a).values
        hb = model.hvp(self.p, self.batch, b).values
        lhs, rhs = ha @ b.values, hb @ a.values
        assert abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-12) < 1e-4

    def test_against_dense_fd_hessian(self):
        d = 13
        h = 1e-5
        H = np.zeros((d, d))
        for i in range(d):
            vp, vm = self.p.values.copy(), self.p.values.copy()
            vp[i] += h
            vm[i] -= h
            H[:, i] = (model.grad(self.p.with_values(vp), self.batch).values
                       - model.grad(self.p.with_values(vm), self.batch).values) / (2 * h)
        v = self.p.with_values(self.rng.standard_normal(d))
        hv = model.hvp(self.p, self.batch, v).values
        ref = H @ v.values
        assert np.linalg.norm(hv - ref) / np.linalg.norm(ref) < 1e-4

    def test_linearity(self):
        a = self.p.with_values(self.rng.standard_normal(13))
        b = self.p.with_values(self.rng.standard_normal(13))
        combo = self.p.with_values(0.7 * a.values - 1.3 * b.values)
        lhs = model.hvp(self.p, self.batch, combo).values
        rhs = (0.7 * model.hvp(self.p, self.batch, a).values
               - 1.3 * model.hvp(self.p, self.batch, b).values)
        assert np.linalg.norm(lhs - rhs) / max(np.linalg.norm(rhs), 1e-12) < 1e-3


class TestSerialization:
    def test_round_trip(self):
        arch = model.Arch(2, (4, 3), 2, model.HEAD_XENT)
        p = model.init_params(arch, seed=9)
        q = model.deserialize_params(model.serialize_params(p))
        assert q.arch == arch
        assert np.array_equal(q.values, p.values)

    def test_no_hidden(self):
        arch = model.Arch(3, (), 1)
        p = model.init_params(arch, seed=0)
        q = model.deserialize_params(model.serialize_params(p))
        assert q.arch == arch
