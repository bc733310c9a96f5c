import math
import random
from fractions import Fraction

import pytest
from pydantic import ValidationError

from repulsive_strichartz.errors import ArgumentError
from repulsive_strichartz.pairs import (
    Constraint,
    Pair,
    classify_kappa,
    classify_repulsive,
    dual_pair,
    holder_pair,
    region_csv,
    sample_region,
)


def random_fraction(rng: random.Random, upper: Fraction = Fraction(1, 2)) -> Fraction:
    denominator = rng.randint(1, 60)
    return Fraction(rng.randint(0, denominator), denominator) * upper


class TestPair:
    def test_parses_strings(self):
        """Test exact parsing of exponent strings"""
        pair = Pair(q="inf", r="8/3")
        assert pair.q == math.inf
        assert pair.r == Fraction(8, 3)
        assert pair.inv_q == 0
        assert str(pair) == "(inf, 8/3)"

    def test_below_one(self):
        """Test that exponents below 1 are rejected"""
        with pytest.raises(ValidationError):
            Pair(q=Fraction(1, 2), r=2)

    def test_float_is_exact(self):
        """Test that a float exponent is held as its exact fraction"""
        assert Pair(q=1.5, r=4).q == Fraction(3, 2)

    def test_serialization(self):
        """Test that exponents serialize as strings"""
        assert Pair(q=2, r=math.inf).model_dump() == {"q": "2", "r": "inf"}


class TestClassifyRepulsive:
    @pytest.mark.parametrize("n", [1, 2, 3, 7])
    def test_infinite_q(self, n):
        """Test that (inf, 2) sits on the boundary in every dimension"""
        verdict = classify_repulsive(Pair(q=math.inf, r=2), n)
        assert verdict.admissible
        assert verdict.on_boundary
        assert not verdict.is_endpoint

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_endpoint(self, n):
        """Test the endpoint (2, 2n/(n - 2))"""
        verdict = classify_repulsive(Pair(q=2, r=Fraction(2 * n, n - 2)), n)
        assert verdict.admissible and verdict.on_boundary and verdict.is_endpoint

    def test_beyond_endpoint(self):
        """Test (2, 8) in three dimensions"""
        verdict = classify_repulsive(Pair(q=2, r=8), 3)
        assert not verdict.admissible
        assert verdict.violated == [Constraint.REPULSIVE_SUM]

    @pytest.mark.parametrize("n", [1, 3])
    def test_small_q(self, n):
        """Test that q in [1, 2) is classified, not rejected"""
        verdict = classify_repulsive(Pair(q=1.5, r=4), n)
        assert not verdict.admissible
        assert verdict.violated == [Constraint.Q_AT_LEAST_TWO]

    def test_invalid_dimension(self):
        """Test that n must be positive"""
        with pytest.raises(ArgumentError):
            classify_repulsive(Pair(q=2, r=2), 0)

    def test_monotone(self):
        """Test that lowering admissible exponents toward 2 keeps admissibility"""
        rng = random.Random(7)
        for _ in range(500):
            n = rng.randint(1, 6)
            inv_q, inv_r = random_fraction(rng), random_fraction(rng)
            if not classify_repulsive(Pair.from_reciprocals(inv_q, inv_r), n).admissible:
                continue
            lower_q = inv_q + random_fraction(rng, Fraction(1, 2) - inv_q)
            lower_r = inv_r + random_fraction(rng, Fraction(1, 2) - inv_r)
            assert classify_repulsive(Pair.from_reciprocals(lower_q, lower_r), n).admissible

    def test_reduced_fraction(self):
        """Test that equal rationals give equal verdicts"""
        assert classify_repulsive(Pair(q="12/6", r="18/3"), 3) == classify_repulsive(Pair(q=2, r=6), 3)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_brute_force(self, n):
        """Test every lattice verdict against an independent evaluation"""
        values = [Fraction(i, 254) for i in range(128)]
        for inv_q in values:
            for inv_r in values:
                verdict = classify_repulsive(Pair.from_reciprocals(inv_q, inv_r), n)
                expected = 4 * inv_q + 2 * n * inv_r >= n
                assert verdict.admissible == expected
                assert verdict.on_boundary == (4 * inv_q + 2 * n * inv_r == n)


class TestClassifyKappa:
    def test_critical_line(self):
        """Test kappa = n/2 = 1 with (2, inf)"""
        verdict = classify_kappa(Pair(q=2, r=math.inf), 1, 2)
        assert verdict.admissible

    def test_interior_pair(self):
        """Test kappa = 1, n = 2 with (4, 4)"""
        verdict = classify_kappa(Pair(q=4, r=4), 1, 2)
        assert verdict.admissible
        assert verdict.flags == []

    def test_off_line(self):
        """Test a pair off the kappa line"""
        verdict = classify_kappa(Pair(q=4, r=8), 1, 2)
        assert Constraint.KAPPA_LINE in verdict.violated

    def test_kappa_too_small(self):
        """Test that kappa < n/2 is rejected"""
        with pytest.raises(ArgumentError, match="at least n/2"):
            classify_kappa(Pair(q=4, r=4), "1/2", 2)

    def test_undefined_upper_bound(self):
        """Test the flag when kappa*q <= 2"""
        verdict = classify_kappa(Pair(q=4, r=math.inf), "1/2", 1)
        assert verdict.admissible
        assert len(verdict.flags) == 1

    def test_inclusion(self):
        """Test that kappa-admissible pairs are repulsive-admissible"""
        rng = random.Random(11)
        checked = 0
        for _ in range(400):
            n = rng.randint(1, 5)
            kappa = Fraction(n, 2) + random_fraction(rng, Fraction(4))
            inv_r = random_fraction(rng)
            inv_q = kappa * (Fraction(1, 2) - inv_r)
            if inv_q > Fraction(1, 2):
                continue
            pair = Pair.from_reciprocals(inv_q, inv_r)
            verdict = classify_kappa(pair, kappa, n)
            if verdict.admissible:
                checked += 1
                assert classify_repulsive(pair, n).admissible
        assert checked > 20


class TestSampleRegion:
    def test_coarse_lattice(self):
        """Test the 3 x 3 lattice for n = 1"""
        points = sample_region(1, 2)
        assert len(points) == 9
        corner = points[0]
        assert (corner.inv_q, corner.inv_r) == (0, 0)
        assert not corner.verdict.admissible
        assert corner.pair == Pair(q="inf", r="inf")

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_endpoint_present(self, n):
        """Test that the endpoint is sampled once, on or off the lattice"""
        points = sample_region(n, 4)
        endpoints = [p for p in points if p.verdict.is_endpoint]
        assert [(p.inv_q, p.inv_r) for p in endpoints] == [(Fraction(1, 2), Fraction(n - 2, 2 * n))]
        assert endpoints[0].pair == Pair(q=2, r=Fraction(2 * n, n - 2))

    def test_sorted(self):
        """Test the ordering by 1/q then 1/r"""
        points = sample_region(2, 8)
        keys = [(p.inv_q, p.inv_r) for p in points]
        assert keys == sorted(keys)

    def test_resolution(self):
        """Test the lower bound on the resolution"""
        with pytest.raises(ArgumentError):
            sample_region(2, 1)

    def test_csv(self):
        """Test the CSV rendering of the endpoint row"""
        text = region_csv(sample_region(3, 4))
        assert text.startswith("inv_q,inv_r,admissible,on_boundary,is_endpoint\n0,0,false,false,false\n")
        assert "\n0.5,0.16666666666666666,true,true,true\n" in text


class TestHolderPair:
    def test_mu_eight(self):
        """Test (2, 2mu/(mu - 2)) for mu = 8, n = 3"""
        pair = holder_pair(8, 3)
        assert pair == Pair(q=2, r=Fraction(8, 3))
        assert classify_repulsive(pair, 3).admissible

    def test_mu_sixteen(self):
        """Test (2, 16/7) for mu = 16 in dimensions 1, 3 and 5"""
        for n in (1, 3, 5):
            pair = holder_pair(16, n)
            assert pair == Pair(q=2, r=Fraction(16, 7))
            assert classify_repulsive(pair, n).admissible

    def test_mu_too_small(self):
        """Test that mu must exceed max(2, n)"""
        with pytest.raises(ArgumentError):
            holder_pair(3, 3)

    def test_dual(self):
        """Test the Hölder conjugate pair"""
        assert dual_pair(Pair(q=2, r=6)) == Pair(q=2, r=Fraction(6, 5))
        assert dual_pair(Pair(q=math.inf, r=2)) == Pair(q=1, r=2)
