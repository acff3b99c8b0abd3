import math
from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetda.circuits import (
    DomainError,
    comp,
    gated_update,
    inv,
    low_circuit,
    lowcomp,
    maxidx,
    transform_s,
    transform_tc,
    transform_tl,
)
from hetda.exact import low_exact
from hetda.params import low_params, lowcomp_params, phi_optimal
from hetda.tracking import OpCounter, TrackedValue


def tracked(values, counter=None):
    counter = counter or OpCounter()
    return [TrackedValue(v, counter) for v in np.atleast_1d(values)]


class TestInv:
    def test_exact_at_one(self):
        for d in (1, 3, 7):
            (x,) = tracked([1.0])
            assert inv(x, d).value == 1.0

    @pytest.mark.parametrize("value,expected", [(0.5, 2.0), (1.5, 2.0 / 3.0)])
    def test_converges(self, value, expected):
        (x,) = tracked([value])
        assert abs(inv(x, 5).value - expected) < 1e-6

    def test_domain(self):
        for bad in (0.0, -0.5, 2.0, 2.5):
            (x,) = tracked([bad])
            with pytest.raises(DomainError):
                inv(x, 3)

    def test_depth_is_d_plus_one(self):
        (x,) = tracked([0.7])
        assert inv(x, 4).level == 5


class TestTransforms:
    def test_s_examples(self):
        assert transform_s([0.0, 0.0]).tolist() == [0.0, 0.5]
        assert transform_s([1.0, 0.0, 1.0, 0.0]).tolist() == [1.0, 0.25, 1.5, 0.75]

    def test_s_argmax_is_low_exhaustive_n4(self):
        for bits in product((0, 1), repeat=4):
            v = list(bits)
            assert int(np.argmax(transform_s(v))) == low_exact(v)

    def test_tl_examples(self):
        assert transform_tl([0.0]).tolist() == [0.5]
        assert transform_tl([1.9]).tolist() == [1.45]

    def test_tl_preserves_argmax(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            v = rng.random(6) * 2.0
            assert int(np.argmax(transform_tl(v))) == int(np.argmax(v))

    def test_tc_endpoints(self):
        assert transform_tc(0.0, 12) == 0.5
        assert transform_tc(144.0, 12) == 1.5

    @pytest.mark.parametrize("delta", [0.05, 0.1, 0.2])
    def test_tc_of_phi_squared_is_geometric_mean(self, delta):
        n = 12
        phi = phi_optimal(n, delta)
        lhs = transform_tc(phi * phi, n)
        rhs = math.sqrt(
            (0.5 + (2 * delta / n) ** 2) * (0.5 + ((1 - 2 * delta) / n) ** 2)
        )
        assert abs(lhs - rhs) < 1e-12


@given(st.lists(st.sampled_from([0, 1]), min_size=1, max_size=10))
def test_low_equals_argmax_of_shifted_vector(bits):
    assert int(np.argmax(transform_s(bits))) == low_exact(bits)


class TestMaxIdx:
    def test_alpha_ten_separation(self):
        # hand-derived tuple meeting the 2**-10 component bound for this
        # vector's top-two ratio of 2
        vs = tracked([1.4, 0.6, 0.6001, 0.7])
        b = maxidx(vs, 5, 5, 2, 4)
        assert b[0].value > 1 - 2**-10
        assert all(x.value < 2**-10 for x in b[1:])

    def test_two_entry_case(self):
        b = maxidx(tracked([1.4, 0.6]), 5, 5, 2, 5)
        assert abs(b[0].value - 1.0) < 1e-3
        assert abs(b[1].value) < 1e-3

    def test_entries_sum_to_one(self):
        b = maxidx(tracked([0.8, 1.2, 0.9]), 4, 4, 2, 6)
        assert abs(sum(x.value for x in b) - 1.0) < 1e-12

    def test_permutation_equivariance_on_leading_indices(self):
        # the last slot is special (derived as 1 - sum); permute the rest only
        base = [1.3, 0.7, 0.9, 1.1, 0.6]
        ref = [x.value for x in maxidx(tracked(base), 5, 5, 2, 6)]
        for perm in permutations(range(4)):
            shuffled = [base[p] for p in perm] + [base[4]]
            got = [x.value for x in maxidx(tracked(shuffled), 5, 5, 2, 6)]
            expected = [ref[p] for p in perm] + [ref[4]]
            assert np.allclose(got, expected, atol=1e-9)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            maxidx(tracked([0.4, 0.9]), 3, 3, 2, 3)
        with pytest.raises(DomainError):
            maxidx(tracked([0.9, 0.9]), 3, 3, 2, 3)


class TestLowCircuit:
    def setup_method(self):
        self.n = 6
        self.pl, _ = low_params(self.n, delta=0.2, epsilon=0.5)

    def test_binary_vector(self):
        r = low_circuit(tracked([0, 1, 0, 0, 0, 0]), self.pl)
        assert abs(r.value - 1.0) < 0.2

    def test_zero_vector_maps_to_n_minus_one(self):
        r = low_circuit(tracked([0.0] * self.n), self.pl)
        assert abs(r.value - (self.n - 1)) < 0.2

    def test_perturbation_invariance(self):
        rng = np.random.default_rng(9)
        eps = 0.5
        for _ in range(50):
            v = rng.integers(0, 2, size=self.n)
            jitter = (rng.random(self.n) * 2 - 1) * (eps / (2 * self.n))
            vp = np.clip(v + jitter, 0.0, 1.0)
            r = low_circuit(tracked(vp), self.pl)
            assert abs(r.value - low_exact(v)) < 0.2

    def test_depth_independent_of_values(self):
        a = low_circuit(tracked([0, 1, 0, 1, 0, 0]), self.pl)
        b = low_circuit(tracked([1, 1, 1, 1, 1, 1]), self.pl)
        assert a.level == b.level

    def test_domain_check(self):
        with pytest.raises(DomainError):
            low_circuit(tracked([0.0, 2.0, 0.0, 0.0, 0.0, 0.0]), self.pl)


class TestComp:
    def test_separation(self):
        c = OpCounter()
        a, b = TrackedValue(1.4, c), TrackedValue(0.6, c)
        assert comp(a, b, 5, 5, 2, 5).value > 0.999
        assert comp(b, a, 5, 5, 2, 5).value < 0.001

    def test_complementary_runs_sum_to_one(self):
        c = OpCounter()
        for x, y in [(1.4, 0.6), (1.01, 0.99), (0.52, 1.37)]:
            a, b = TrackedValue(x, c), TrackedValue(y, c)
            s = comp(a, b, 5, 5, 2, 5).value + comp(b, a, 5, 5, 2, 5).value
            assert abs(s - 1.0) < 1e-12

    def test_domain(self):
        c = OpCounter()
        with pytest.raises(DomainError):
            comp(TrackedValue(0.4, c), TrackedValue(0.6, c), 3, 3, 2, 3)
        with pytest.raises(DomainError):
            comp(TrackedValue(0.6, c), TrackedValue(0.6, c), 3, 3, 2, 3)


class TestLowComp:
    def setup_method(self):
        self.n = 8
        self.eta = 0.05
        self.pc, _ = lowcomp_params(self.n, delta=0.1, eta=self.eta)

    def test_equal_lows(self):
        c = OpCounter()
        om = lowcomp(TrackedValue(3.0, c), TrackedValue(3.0, c), self.pc, self.n)
        assert om.value > 1 - self.eta

    def test_adjacent_integer_lows(self):
        c = OpCounter()
        om = lowcomp(TrackedValue(3.0, c), TrackedValue(4.0, c), self.pc, self.n)
        assert om.value < self.eta

    def test_depth_independent_of_values(self):
        c = OpCounter()
        a = lowcomp(TrackedValue(0.0, c), TrackedValue(7.0, c), self.pc, self.n)
        b = lowcomp(TrackedValue(3.2, c), TrackedValue(3.1, c), self.pc, self.n)
        assert a.level == b.level
        x = comp(TrackedValue(1.4, c), TrackedValue(0.6, c), 4, 3, 2, 5)
        y = comp(TrackedValue(0.51, c), TrackedValue(1.49, c), 4, 3, 2, 5)
        assert x.level == y.level

    def test_jittered_lows_both_directions(self):
        rng = np.random.default_rng(21)
        delta = 0.1
        for _ in range(100):
            lx = int(rng.integers(0, self.n))
            ly = int(rng.integers(0, self.n))
            c = OpCounter()
            a = TrackedValue(lx + (rng.random() * 2 - 1) * delta, c)
            b = TrackedValue(ly + (rng.random() * 2 - 1) * delta, c)
            om = lowcomp(a, b, self.pc, self.n)
            if lx == ly:
                assert om.value > 1 - self.eta
            else:
                assert om.value < self.eta


class TestGatedUpdate:
    def test_omega_one_is_mod2_sum(self):
        c = OpCounter()
        xs = tracked([1, 0, 1, 0], c)
        ys = tracked([1, 1, 0, 0], c)
        out = gated_update(xs, ys, TrackedValue(1.0, c))
        assert [o.value for o in out] == [0.0, 1.0, 1.0, 0.0]

    def test_omega_zero_is_identity(self):
        c = OpCounter()
        xs = tracked([1, 0, 1], c)
        ys = tracked([0, 1, 1], c)
        out = gated_update(xs, ys, TrackedValue(0.0, c))
        assert [o.value for o in out] == [1.0, 0.0, 1.0]

    def test_near_one_omega_error_bound(self):
        eta = 1e-3
        c = OpCounter()
        xs = tracked([1, 0, 1, 0], c)
        ys = tracked([1, 1, 0, 0], c)
        out = gated_update(xs, ys, TrackedValue(1.0 - eta, c))
        exact = [0.0, 1.0, 1.0, 0.0]
        for o, e in zip(out, exact):
            assert abs(o.value - e) <= 2 * eta


class TestAccuracyContracts:
    def test_indicator_error_exhaustive_small_n(self):
        # exhaustive low-vs-shifted-argmax agreement for every bit vector
        for n in range(2, 9):
            for bits in product((0, 1), repeat=n):
                assert int(np.argmax(transform_s(bits))) == low_exact(bits)

    def test_delta_error_bound_randomized(self):
        rng = np.random.default_rng(17)
        delta, eps = 0.2, 0.5
        cache = {}
        for _ in range(300):
            n = int(rng.integers(4, 11))
            if n not in cache:
                cache[n] = low_params(n, delta, eps)
            pl, alpha = cache[n]
            v = rng.integers(0, 2, size=n)
            vp = np.clip(v + (rng.random(n) * 2 - 1) * (eps / (2 * n)), 0.0, 1.0)
            r = low_circuit(tracked(vp), pl)
            err = abs(r.value - low_exact(v))
            assert err < delta
            assert err < 1.5 * n * (n - 1) * 2.0**-alpha
