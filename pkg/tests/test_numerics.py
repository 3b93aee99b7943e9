import math

import numpy as np
import pytest

from gradcheck import finite_difference_check
from histnorm.numerics import (
    Optimizer,
    OptimizerError,
    Parameter,
    ShapeError,
    Tape,
    TapeReusedError,
    Tensor,
    kernels,
    ops,
)

rng = np.random.default_rng(2024)


class TestForwardValues:
    def test_softmax_symmetry(self):
        out = ops.softmax(Tensor([0.0, 0.0]))
        assert np.allclose(out.data, [0.5, 0.5])

    def test_softmax_closed_form(self):
        out = ops.softmax(Tensor([math.log(2.0), 0.0]))
        assert np.allclose(out.data, [2 / 3, 1 / 3])

    def test_softmax_sums_to_one(self):
        for _ in range(50):
            x = rng.standard_normal(rng.integers(1, 12)) * 10
            y = ops.softmax(Tensor(x)).data
            assert (y >= 0).all()
            assert abs(y.sum() - 1.0) <= 1e-12

    def test_matmul_identity(self):
        a = rng.standard_normal((3, 3))
        out = ops.matmul(Tensor(np.eye(3)), Tensor(a))
        assert (out.data == a).all()

    def test_matmul_shape_error_names_op(self):
        with pytest.raises(ShapeError, match="matmul"):
            ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))

    def test_add_shape_error(self):
        with pytest.raises(ShapeError, match="add"):
            ops.add(Tensor(np.ones(3)), Tensor(np.ones(4)))

    def test_xent_uniform(self):
        loss = ops.cross_entropy_loss(Tensor([0.0, 0.0]), 0)
        assert loss.item() == pytest.approx(math.log(2.0), abs=1e-12)

    def test_xent_saturated_is_stable(self):
        loss = ops.cross_entropy_loss(Tensor([1000.0, 0.0]), 0)
        assert loss.item() == pytest.approx(0.0, abs=1e-12)

    def test_xent_matches_direct_float64_eval(self):
        logits = rng.standard_normal(5)
        for target in range(5):
            direct = -math.log(math.exp(logits[target]) / np.exp(logits).sum())
            got = ops.cross_entropy_loss(Tensor(logits), target).item()
            assert got == pytest.approx(direct, rel=1e-12)

    def test_xent_target_out_of_range(self):
        with pytest.raises(IndexError):
            ops.cross_entropy_loss(Tensor([0.0, 0.0]), 2)

    def test_embedding_lookup_copies_row(self):
        table = Parameter(rng.standard_normal((4, 3)), "emb")
        row = ops.embedding_lookup(table, 2)
        assert np.allclose(row.data, table.data[2])
        with pytest.raises(IndexError):
            ops.embedding_lookup(table, 4)


def check_primitive(build_loss, params, tol=1e-4):
    worst = finite_difference_check(build_loss, params)
    assert worst <= tol, f"gradient mismatch: worst relative error {worst:.2e}"


class TestGradients:
    """Central finite differences vs tape gradients for every primitive."""

    def test_matmul_2d_2d(self):
        a = Parameter(rng.standard_normal((3, 4)), "a")
        b = Parameter(rng.standard_normal((4, 2)), "b")
        v = Tensor(rng.standard_normal(2))
        check_primitive(lambda: ops.matmul(ops.matmul(Tensor(np.ones(3)), ops.matmul(a, b)), v), [a, b])

    def test_matmul_vec_mat(self):
        a = Parameter(rng.standard_normal(4), "a")
        b = Parameter(rng.standard_normal((4, 3)), "b")
        v = Tensor(rng.standard_normal(3))
        check_primitive(lambda: ops.matmul(ops.matmul(a, b), v), [a, b])

    def test_matmul_mat_vec(self):
        a = Parameter(rng.standard_normal((3, 4)), "a")
        b = Parameter(rng.standard_normal(4), "b")
        v = Tensor(rng.standard_normal(3))
        check_primitive(lambda: ops.matmul(v, ops.matmul(a, b)), [a, b])

    def test_add_mul(self):
        a = Parameter(rng.standard_normal(5), "a")
        b = Parameter(rng.standard_normal(5), "b")
        v = Tensor(rng.standard_normal(5))
        check_primitive(lambda: ops.matmul(ops.mul(ops.add(a, b), a), v), [a, b])

    def test_concat(self):
        a = Parameter(rng.standard_normal(3), "a")
        b = Parameter(rng.standard_normal(2), "b")
        v = Tensor(rng.standard_normal(5))
        check_primitive(lambda: ops.matmul(ops.concat([a, b]), v), [a, b])

    def test_stack(self):
        a = Parameter(rng.standard_normal(4), "a")
        b = Parameter(rng.standard_normal(4), "b")
        v = Tensor(rng.standard_normal(4))
        check_primitive(lambda: ops.matmul(ops.matmul(Tensor(np.ones(2)), ops.stack([a, b])), v), [a, b])

    def test_sigmoid(self):
        x = Parameter(rng.standard_normal(6), "x")
        v = Tensor(rng.standard_normal(6))
        check_primitive(lambda: ops.matmul(ops.sigmoid(x), v), [x])

    def test_tanh(self):
        x = Parameter(rng.standard_normal(6), "x")
        v = Tensor(rng.standard_normal(6))
        check_primitive(lambda: ops.matmul(ops.tanh(x), v), [x])

    def test_softmax(self):
        x = Parameter(rng.standard_normal(6), "x")
        v = Tensor(rng.standard_normal(6))
        check_primitive(lambda: ops.matmul(ops.softmax(x), v), [x])

    def test_embedding_lookup(self):
        table = Parameter(rng.standard_normal((5, 4)), "emb")
        v = Tensor(rng.standard_normal(4))
        check_primitive(
            lambda: ops.matmul(ops.add(ops.embedding_lookup(table, 1), ops.embedding_lookup(table, 3)), v),
            [table],
        )

    def test_cross_entropy(self):
        logits = Parameter(rng.standard_normal(7), "logits")
        check_primitive(lambda: ops.cross_entropy_loss(logits, 2), [logits])

    def test_lstm_cell_all_inputs(self):
        dx, H = 3, 4
        x = Parameter(rng.standard_normal(dx), "x")
        h = Parameter(rng.standard_normal(H), "h")
        c = Parameter(rng.standard_normal(H), "c")
        W = Parameter(0.5 * rng.standard_normal((dx, 4 * H)), "W")
        U = Parameter(0.5 * rng.standard_normal((H, 4 * H)), "U")
        b = Parameter(0.5 * rng.standard_normal(4 * H), "b")
        v = Tensor(rng.standard_normal(H))

        def loss():
            h2, c2 = ops.lstm_cell(x, h, c, W, U, b)
            return ops.matmul(ops.add(h2, c2), v)

        check_primitive(loss, [x, h, c, W, U, b])

    def test_lstm_cell_chained_through_time(self):
        dx, H = 3, 4
        x1 = Parameter(rng.standard_normal(dx), "x1")
        x2 = Parameter(rng.standard_normal(dx), "x2")
        W = Parameter(0.5 * rng.standard_normal((dx, 4 * H)), "W")
        U = Parameter(0.5 * rng.standard_normal((H, 4 * H)), "U")
        b = Parameter(0.5 * rng.standard_normal(4 * H), "b")
        v = Tensor(rng.standard_normal(H))

        def loss():
            h, c = Tensor(np.zeros(H)), Tensor(np.zeros(H))
            h, c = ops.lstm_cell(x1, h, c, W, U, b)
            h, c = ops.lstm_cell(x2, h, c, W, U, b)
            return ops.matmul(h, v)

        check_primitive(loss, [x1, x2, W, U, b])

    def test_attend_both_outputs(self):
        s = Parameter(rng.standard_normal(5), "s")
        enc = Parameter(rng.standard_normal((6, 4)), "enc")
        A = Parameter(rng.standard_normal((5, 4)), "A")
        v = Tensor(rng.standard_normal(4))
        v2 = Tensor(rng.standard_normal(6))

        def loss():
            w, ctx = ops.attend(s, enc, A)
            return ops.add(ops.matmul(ctx, v), ops.matmul(w, v2))

        check_primitive(loss, [s, enc, A])

    def test_grad_of_unused_parameter_is_exactly_zero(self):
        used = Parameter(rng.standard_normal(3), "used")
        unused = Parameter(rng.standard_normal(3), "unused")
        with Tape() as tape:
            loss = ops.matmul(used, Tensor(np.ones(3)))
        tape.backward(loss)
        assert (unused.grad == 0.0).all()

    def test_sum_of_parameter_grad_is_ones(self):
        p = Parameter(rng.standard_normal(4), "p")
        with Tape() as tape:
            loss = ops.matmul(p, Tensor(np.ones(4)))
        tape.backward(loss)
        assert (p.grad == 1.0).all()


class TestTape:
    def test_backward_twice_is_error(self):
        p = Parameter(np.ones(2), "p")
        with Tape() as tape:
            loss = ops.matmul(p, Tensor(np.ones(2)))
        tape.backward(loss)
        with pytest.raises(TapeReusedError):
            tape.backward(loss)

    def test_backward_requires_scalar(self):
        p = Parameter(np.ones(2), "p")
        with Tape() as tape:
            out = ops.add(p, p)
        with pytest.raises(ValueError):
            tape.backward(out)

    def test_no_recording_outside_tape(self):
        p = Parameter(np.ones(2), "p")
        tape = Tape()
        with tape:
            ops.add(p, p)
        n_inside = len(tape)
        ops.add(p, p)
        assert len(tape) == n_inside


class TestOptimizer:
    def test_plain_sgd_definition(self):
        p = Parameter(np.array([1.0]), "p")
        opt = Optimizer([p], kind="sgd", lr=0.1, clip_norm=None)
        p.grad[...] = 1.0
        opt.step()
        assert p.data[0] == pytest.approx(0.9, abs=1e-15)

    def test_zero_grad_leaves_value(self):
        p = Parameter(np.array([1.5]), "p")
        opt = Optimizer([p], kind="sgd", lr=0.1)
        opt.step()
        assert p.data[0] == 1.5

    def test_grads_zeroed_after_step(self):
        p = Parameter(np.array([1.0, 2.0]), "p")
        opt = Optimizer([p], kind="adam")
        p.grad[...] = 3.0
        opt.step()
        assert (p.grad == 0.0).all()

    def test_nan_grad_aborts_without_update(self):
        p = Parameter(np.array([1.0]), "p")
        opt = Optimizer([p], kind="adam")
        p.grad[...] = np.nan
        with pytest.raises(OptimizerError, match="p"):
            opt.step()
        assert p.data[0] == 1.0

    def test_deterministic_updates(self):
        def run():
            p = Parameter(np.array([1.0, -2.0, 3.0]), "p")
            opt = Optimizer([p], kind="adam", lr=1e-2)
            for step in range(5):
                p.grad[...] = [0.1 * (step + 1), -0.2, 0.3]
                opt.step()
            return p.data.copy()

        assert (run() == run()).all()

    def test_clipping_bounds_update_norm(self):
        p = Parameter(np.zeros(4), "p")
        opt = Optimizer([p], kind="sgd", lr=1.0, clip_norm=1.0)
        p.grad[...] = 100.0
        opt.step()
        assert np.linalg.norm(p.data) == pytest.approx(1.0)


class TestBackendParity:
    """The numba and numpy kernel paths must agree numerically."""

    @pytest.fixture(autouse=True)
    def backends(self):
        if "numba" not in kernels.available_backends():
            pytest.skip("numba unavailable")
        self.nb = kernels.get_backend("numba")
        self.np_ = kernels.get_backend("numpy")

    def test_lstm_cell(self):
        dx, H = 5, 6
        x, h, c = rng.standard_normal(dx), rng.standard_normal(H), rng.standard_normal(H)
        W, U, b = rng.standard_normal((dx, 4 * H)), rng.standard_normal((H, 4 * H)), rng.standard_normal(4 * H)
        fa = self.nb.lstm_cell_fwd(x, h, c, W, U, b)
        fb = self.np_.lstm_cell_fwd(x, h, c, W, U, b)
        for a, b_ in zip(fa, fb):
            assert np.allclose(a, b_, rtol=1e-12, atol=1e-14)
        dh2, dc2 = rng.standard_normal(H), rng.standard_normal(H)
        ba = self.nb.lstm_cell_bwd(c, W, U, fa[2], fa[3], dh2, dc2)
        bb = self.np_.lstm_cell_bwd(c, W, U, fb[2], fb[3], dh2, dc2)
        for a, b_ in zip(ba, bb):
            assert np.allclose(a, b_, rtol=1e-12, atol=1e-14)

    def test_attend(self):
        s, enc, A = rng.standard_normal(4), rng.standard_normal((5, 3)), rng.standard_normal((4, 3))
        fa = self.nb.attend_fwd(s, enc, A)
        fb = self.np_.attend_fwd(s, enc, A)
        for a, b_ in zip(fa, fb):
            assert np.allclose(a, b_, rtol=1e-12, atol=1e-14)
        dw, dctx = rng.standard_normal(5), rng.standard_normal(3)
        ba = self.nb.attend_bwd(enc, A, fa[0], fa[2], dw, dctx)
        bb = self.np_.attend_bwd(enc, A, fb[0], fb[2], dw, dctx)
        for a, b_ in zip(ba, bb):
            assert np.allclose(a, b_, rtol=1e-12, atol=1e-14)

    def test_xent(self):
        logits = rng.standard_normal(9)
        la, pa = self.nb.xent_fwd(logits, 3)
        lb, pb = self.np_.xent_fwd(logits, 3)
        assert la == pytest.approx(lb, rel=1e-13)
        assert np.allclose(pa, pb, rtol=1e-13)
        assert np.allclose(self.nb.xent_bwd(pa, 3, 2.0), self.np_.xent_bwd(pb, 3, 2.0), rtol=1e-13)

    def test_adam(self):
        n = 64
        args = (1e-3, 0.9, 0.999, 1e-8, 0.1, 0.01, 0.5)
        pa, ga = rng.standard_normal(n), rng.standard_normal(n)
        ma, va = np.zeros(n), np.zeros(n)
        pb, gb, mb, vb = pa.copy(), ga.copy(), ma.copy(), va.copy()
        self.nb.adam_step(pa, ga, ma, va, *args)
        self.np_.adam_step(pb, gb, mb, vb, *args)
        assert np.allclose(pa, pb, rtol=1e-13)
        assert np.allclose(ma, mb, rtol=1e-13)
        assert np.allclose(va, vb, rtol=1e-13)


def test_forward_backward_deterministic():
    def run():
        local = np.random.default_rng(99)
        p = Parameter(local.standard_normal((4, 8)), "p")
        x = Tensor(local.standard_normal(4))
        with Tape() as tape:
            h, c = ops.lstm_cell(x, Tensor(np.zeros(2)), Tensor(np.zeros(2)), p, Parameter(local.standard_normal((2, 8)), "u"), Parameter(np.zeros(8), "b"))
            loss = ops.matmul(h, Tensor(local.standard_normal(2)))
        tape.backward(loss)
        return loss.item(), p.grad.copy()

    (l1, g1), (l2, g2) = run(), run()
    assert l1 == l2
    assert (g1 == g2).all()
