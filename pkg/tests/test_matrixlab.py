"""Matrix models, exact permutation sums, characters, Weingarten integration."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from freebessel.classical import bessel_law
from freebessel.matrixlab import (
    _trial_rng,
    dw_model_mc,
    dw_model_mc_multi,
    geodesic_count,
    glm_eval,
    glm_exact,
    hns_character_mc,
    product_model_mc,
    sample_ginibre,
    splitmix64,
    weingarten_finite_n,
)
from freebessel.partitions import ColoredWord, enumerate_nc_s, fuss_catalan, star_moment


def within_3se(report, target):
    return abs(report.estimate - target) <= 3 * report.std_error


class TestSeeding:
    def test_splitmix_deterministic_and_distinct(self):
        assert splitmix64(7, 0) == splitmix64(7, 0)
        assert splitmix64(7, 0) != splitmix64(7, 1)
        assert splitmix64(8, 0) != splitmix64(7, 0)

    def test_reports_reproducible(self):
        a = product_model_mc(2, N=32, k=2, trials=10, seed=5)
        b = product_model_mc(2, N=32, k=2, trials=10, seed=5)
        assert a == b

    def test_report_json(self):
        rep = product_model_mc(1, N=16, k=1, trials=5, seed=1)
        data = json.loads(rep.to_json())
        assert set(data) == {"statistic", "estimate", "std_error", "trials", "N", "seed"}


class TestGinibre:
    def test_entry_variance(self):
        rng = _trial_rng(3, 0)
        g = sample_ginibre(300, 300, 2.0, rng)
        samples = (np.abs(g) ** 2).ravel()
        se = samples.std(ddof=1) / math.sqrt(samples.size)
        assert abs(samples.mean() - 2.0) <= 3 * se

    def test_mean_zero(self):
        rng = _trial_rng(4, 0)
        g = sample_ginibre(200, 200, 1.0, rng)
        se = np.abs(g).std() / math.sqrt(g.size)
        assert abs(g.mean()) <= 3 * se

    def test_trace_normalization(self):
        rng = _trial_rng(5, 0)
        n = 128
        vals = []
        for _ in range(20):
            g = sample_ginibre(n, n, 1.0 / n, rng)
            vals.append((g @ g.conj().T).trace().real / n)
        se = np.std(vals, ddof=1) / math.sqrt(len(vals))
        assert abs(np.mean(vals) - 1.0) <= 3 * se

    def test_rejects_bad_variance(self):
        with pytest.raises(ValueError):
            sample_ginibre(2, 2, 0.0, _trial_rng(0, 0))


class TestProductModel:
    @pytest.mark.parametrize("s,k", [(1, 1), (2, 2), (3, 2)])
    def test_limits(self, s, k):
        rep = product_model_mc(s, N=128, k=k, trials=60, seed=11)
        assert within_3se(rep, float(fuss_catalan(s, k)))


class TestDWModel:
    def test_wishart_case(self):
        rep = dw_model_mc(1, N=128, k=2, trials=60, seed=12)
        assert within_3se(rep, 2.0)

    def test_roots_case(self):
        rep = dw_model_mc(2, N=128, k=2, trials=60, seed=13)
        assert within_3se(rep, 3.0)

    def test_non_multiple_power_vanishes(self):
        rep = dw_model_mc(2, N=128, k=1, trials=60, seed=14, power=3)
        assert abs(rep.estimate) <= 3 * rep.std_error + 0.05

    def test_matches_exact_finite_dim(self):
        for s, k, N in ((1, 2, 16), (2, 2, 16), (1, 3, 32)):
            rep = dw_model_mc(s, N=N, k=k, trials=400, seed=15)
            exact = glm_eval(glm_exact(s * k, s, "roots"), s * N)
            assert within_3se(rep, exact)

    def test_multi_matches_single(self):
        multi = dw_model_mc_multi(2, N=32, powers=[2, 4], trials=20, seed=16)
        single = dw_model_mc(2, N=32, k=2, trials=20, seed=16)
        assert multi[4].estimate == pytest.approx(single.estimate)


class TestGLMExact:
    def test_k1_identity(self):
        assert glm_exact(1, d_spec="identity") == {0: 1}

    def test_k2_identity(self):
        assert glm_exact(2, d_spec="identity") == {0: 2}

    def test_k4_roots(self):
        poly = glm_exact(4, 2, "roots")
        assert poly[0] == 3
        assert all(e <= 0 for e in poly)

    def test_constant_terms_count_partitions(self):
        for s in (1, 2, 3):
            for k in range(1, 9):
                if s * k > 8:
                    break
                poly = glm_exact(s * k, s, "roots")
                assert poly.get(0, Fraction(0)) == len(enumerate_nc_s(s, k))
                assert all(e <= 0 for e in poly)

    def test_bound(self):
        with pytest.raises(ValueError):
            glm_exact(9)

    def test_roots_requires_divisibility(self):
        with pytest.raises(ValueError):
            glm_exact(3, 2, "roots")


class TestGeodesics:
    def test_examples(self):
        assert geodesic_count(2, 1) == 1
        assert geodesic_count(2, 2) == 3
        assert geodesic_count(1, 3) == 5

    def test_matches_fuss_catalan(self):
        for s in (1, 2, 3):
            for k in range(1, 9):
                if s * k > 8:
                    break
                assert geodesic_count(s, k) == fuss_catalan(s, k)


class TestCharacters:
    def test_fixed_point_count(self):
        rep = hns_character_mc(
            1, n=200, t=1.0, trials=4000, seed=21, word=ColoredWord.from_string("u")
        )
        assert within_3se(rep, 1.0)

    def test_second_moment(self):
        rep = hns_character_mc(
            2, n=200, t=1.0, trials=4000, seed=22, word=ColoredWord.from_string("u*")
        )
        assert within_3se(rep, 1.0)

    def test_against_atom_sum(self):
        for s, text in ((3, "u*"), (2, "uu**"), (3, "uu**")):
            word = ColoredWord.from_string(text)
            target = bessel_law(s, 0.5, p_max=30).moment(word.signs).real
            rep = hns_character_mc(s, n=200, t=0.5, trials=8000, seed=23, word=word)
            assert within_3se(rep, target)

    def test_rejects_bad_t(self):
        with pytest.raises(ValueError):
            hns_character_mc(1, 50, 1.5, 10, 0, ColoredWord.from_string("u"))


class TestWeingarten:
    def test_empty_word(self):
        assert weingarten_finite_n(2, ColoredWord(()), 16, 1.0) == 1.0

    def test_pair_word_approaches_t(self):
        word = ColoredWord.from_string("u*")
        # single balanced pair partition: the value is t at every n
        for n in (8, 16, 32, 64):
            assert weingarten_finite_n(2, word, n, 1.0) == pytest.approx(1.0, abs=1e-12)
        # at t = 1/2 truncation rounding gives a genuine, shrinking error
        errors = [
            abs(weingarten_finite_n(2, word, n, 0.5) - 0.5) for n in (8, 16, 32, 64)
        ]
        assert all(e * n < 4.0 for e, n in zip(errors, (8, 16, 32, 64)))
        assert errors[-1] <= errors[0]

    def test_length_four_limit(self):
        word = ColoredWord.from_string("uu**")
        value = weingarten_finite_n(2, word, 512, 1.0)
        assert value == pytest.approx(3.0, abs=0.05)

    def test_linear_error_decay(self):
        for s in (1, 2):
            for text in ("u*", "uu**"):
                word = ColoredWord.from_string(text)
                limit = float(star_moment(s, Fraction(1, 2), word))
                errs = [
                    abs(weingarten_finite_n(s, word, n, 0.5) - limit)
                    for n in (8, 16, 32, 64)
                ]
                # error * n stays bounded along the doubling sequence
                scaled = [e * n for e, n in zip(errs, (8, 16, 32, 64))]
                assert max(scaled) <= 2 * scaled[0] + 1e-9
