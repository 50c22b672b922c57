import json
import math

import numpy as np
import pytest

from conftest import random_problem
from parsimony.design import DesignMatrix
from parsimony.errornorm import NoiseModel
from parsimony.errors import DimensionTooLarge, PerfectFit
from parsimony.ols import fit
from parsimony.oracles import (OracleConfig, ValidationOutcome, mc_error_norm_moments,
                               quad_evidence_known_sigma, quad_evidence_unknown_sigma,
                               quad_student_t_normalization, run_suite, second_moment_identity)
from parsimony.posterior import student_t_posterior
from parsimony.prior import PriorSpec


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(mc_samples=999), dict(quad_rel_tol=0.0), dict(quad_rel_tol=0.1),
                                        dict(rng_seed=-1), dict(rng_seed=2 ** 64), dict(mc_se_multiple=0.0)])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            OracleConfig(**kwargs)

    def test_streams_keyed_by_name(self):
        cfg = OracleConfig(rng_seed=7)
        a = cfg.rng("alpha").standard_normal(4)
        assert np.array_equal(a, cfg.rng("alpha").standard_normal(4))
        assert not np.array_equal(a, cfg.rng("beta").standard_normal(4))


class TestOutcome:
    def test_compare(self):
        assert ValidationOutcome.compare("x", 1.0, 1.5, 0.5).passed
        assert not ValidationOutcome.compare("x", 1.0, 1.6, 0.5).passed

    def test_json_key(self):
        d = ValidationOutcome.compare("x", 1.0, 1.0, 0.1).to_dict()
        assert d["pass"] is True and "passed" not in d
        json.dumps(d)


class TestMonteCarlo:
    def test_half_normal_seed_42(self):
        outs = mc_error_norm_moments(NoiseModel(1.0, 1), OracleConfig(rng_seed=42))
        mean = next(o for o in outs if o.check_name.endswith(".mean"))
        assert mean.analytic == pytest.approx(math.sqrt(2 / math.pi), rel=1e-15)
        assert all(o.passed for o in outs), outs

    def test_second_moment_target(self):
        outs = mc_error_norm_moments(NoiseModel(1.0, 10), OracleConfig())
        m2 = next(o for o in outs if o.check_name.endswith(".moment2"))
        assert m2.analytic == pytest.approx(10.0, rel=1e-14)
        assert m2.passed
        assert second_moment_identity(NoiseModel(3.0, 10)).passed

    def test_small_sample_widens_error(self):
        small = mc_error_norm_moments(NoiseModel(1.0, 3), OracleConfig(mc_samples=1000))
        large = mc_error_norm_moments(NoiseModel(1.0, 3), OracleConfig(mc_samples=100_000))
        for s, big in zip(small, large):
            assert s.check_name == big.check_name
            assert s.standard_error > 5 * big.standard_error
            assert math.isfinite(s.numeric)

    def test_tiny_multiple_fails(self):
        outs = mc_error_norm_moments(NoiseModel(1.0, 3), OracleConfig(mc_se_multiple=1e-15))
        assert not all(o.passed for o in outs)


class TestQuadrature:
    def test_known_sigma_n5(self, rng):
        A, y = random_problem(rng, 5, 1)
        X = DesignMatrix.from_array(A)
        out = quad_evidence_known_sigma(fit(X, y), X, NoiseModel(1.0, 5), PriorSpec(sigma=1.0), OracleConfig())
        assert out.passed
        assert abs(out.analytic - out.numeric) < 1e-6

    def test_known_sigma_m3(self, rng):
        A, y = random_problem(rng, 6, 3)
        X = DesignMatrix.from_array(A)
        with pytest.raises(DimensionTooLarge):
            quad_evidence_known_sigma(fit(X, y), X, NoiseModel(1.0, 6), PriorSpec(sigma=1.0), OracleConfig())

    def test_narrow_box_under_covers(self, rng):
        A, y = random_problem(rng, 6, 2)
        X = DesignMatrix.from_array(A)
        out = quad_evidence_known_sigma(fit(X, y), X, NoiseModel(1.0, 6), PriorSpec(sigma=1.0),
                                        OracleConfig(box_half_width=3.0))
        assert not out.passed
        # truncation only ever loses mass
        assert out.numeric < out.analytic

    def test_unknown_sigma_perfect_fit(self):
        X = DesignMatrix.from_array([[1.0], [2.0]])
        with pytest.raises(PerfectFit):
            quad_evidence_unknown_sigma(fit(X, np.array([1.0, 2.0])), X, PriorSpec(), OracleConfig())

    def test_student_t_m2(self, rng):
        A, y = random_problem(rng, 6, 2)
        X = DesignMatrix.from_array(A)
        with pytest.raises(DimensionTooLarge):
            quad_student_t_normalization(student_t_posterior(fit(X, y), X), OracleConfig())


class TestSuite:
    def test_all_pass_and_deterministic(self):
        cfg = OracleConfig(rng_seed=3, mc_samples=20_000)
        a = run_suite(cfg)
        assert all(o.passed for o in a), [o for o in a if not o.passed]
        b = run_suite(cfg)
        assert [o.to_dict() for o in a] == [o.to_dict() for o in b]
        names = [o.check_name for o in a]
        assert names == sorted(names) and len(set(names)) == len(names)
