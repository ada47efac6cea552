import random
from dataclasses import replace

import pytest

from wagstaff_bls.certify import (SMALL_METHOD, CertifyBudget, NMinusOnePocklington, ProofFactor,
                                  SmallDeterministic, proof_failure, prove_prime, verify_proof)
from wagstaff_bls.cyclotomic import phi_at_2
from wagstaff_bls.errors import CertificationIncomplete, CompositeDetected
from wagstaff_bls.pocklington import Form
from wagstaff_bls.prp import is_probable_prime
from wagstaff_bls.quad_ring import wagstaff

from oracles import sieve_primes

# primes above 2^64 that need an N - 1 proof: Wagstaff and Mersenne primes and
# large prime factors of Phi_d(2)
BIG_PRIMES = {
    "W_127": wagstaff(127),
    "W_167": wagstaff(167),
    "M_89": 2 ** 89 - 1,
    "M_127": 2 ** 127 - 1,
}


def _phi_prime_factor(d, digits):
    import sympy
    return max(q for q in sympy.factorint(phi_at_2(d)) if len(str(q)) == digits)


def test_small_prime_gets_leaf():
    assert prove_prime(43) == SmallDeterministic(43, SMALL_METHOD)
    assert verify_proof(43, prove_prime(43))


@pytest.mark.parametrize("n", [2047, 561, 3825123056546413051, 2 ** 64 + 15, 4])
def test_composites_detected(n):
    with pytest.raises(CompositeDetected):
        prove_prime(n)


def test_composite_reports_a_witness():
    with pytest.raises(CompositeDetected) as exc:
        prove_prime(2047)
    # 23 is itself a deterministic base, so the factor is reported directly
    assert exc.value.kind == "factor" and exc.value.factor == 23
    with pytest.raises(CompositeDetected) as exc:
        prove_prime(3825123056546413051)
    assert exc.value.kind == "strong" and exc.value.witness == 37


def test_prove_prime_rejects_below_2():
    with pytest.raises(ValueError):
        prove_prime(1)


def test_prove_prime_iff_prime_below_10_6():
    limit = 10 ** 6
    flags = sieve_primes(limit + 1)
    for n in range(2, limit + 1):
        if flags[n]:
            assert verify_proof(n, prove_prime(n))
        else:
            with pytest.raises(CompositeDetected):
                prove_prime(n)


@pytest.mark.parametrize("name", ["W_127", "W_167", "M_89", "M_127"])
def test_large_primes_get_n_minus_one_trees(name):
    n = BIG_PRIMES[name]
    proof = prove_prime(n)
    assert isinstance(proof, NMinusOnePocklington)
    assert verify_proof(n, proof) and is_probable_prime(n)
    if proof.form is Form.CUBE:
        assert proof.F ** 3 > n >= proof.F ** 2


@pytest.mark.parametrize("d, digits", [(107, 33), (131, 38), (145, 34), (202, 30), (231, 34)])
def test_cyclotomic_prime_factors_get_trees(d, digits):
    q = _phi_prime_factor(d, digits)
    proof = prove_prime(q)
    assert isinstance(proof, NMinusOnePocklington)
    assert verify_proof(q, proof)


def _leaves(proof):
    if isinstance(proof, SmallDeterministic):
        return [proof]
    return [leaf for f in proof.factors for leaf in _leaves(f.proof)]


def test_tree_is_finite_with_small_leaves():
    proof = prove_prime(BIG_PRIMES["M_127"])
    leaves = _leaves(proof)
    assert leaves and all(leaf.n < 2 ** 64 for leaf in leaves)


def _big_proof():
    n = BIG_PRIMES["M_127"]
    return n, prove_prime(n)


def test_witness_mutation_rejected():
    n, proof = _big_proof()
    f0 = proof.factors[0]
    bad = replace(proof, factors=(replace(f0, witness=1),) + proof.factors[1:])
    assert not verify_proof(n, bad)
    assert "witness" in proof_failure(n, bad)


def test_threshold_mutation_rejected():
    n, proof = _big_proof()
    # keep only the prime 2: F = 2 fails F^3 > n
    two = next(f for f in proof.factors if f.q == 2)
    bad = replace(proof, factors=(two,), form=Form.CUBE, discriminant=None)
    assert not verify_proof(n, bad)


def test_exponent_mutation_rejected():
    n, proof = _big_proof()
    f0 = proof.factors[0]
    bad = replace(proof, factors=(replace(f0, e=f0.e + 1),) + proof.factors[1:])
    assert not verify_proof(n, bad)


def test_wrong_n_rejected():
    assert not verify_proof(47, prove_prime(43))
    assert "not 47" in proof_failure(47, prove_prime(43))


def test_fake_leaf_rejected():
    assert not verify_proof(2047, SmallDeterministic(2047))
    assert not verify_proof(43, SmallDeterministic(43, "guess"))
    assert not verify_proof(2 ** 64 + 13, SmallDeterministic(2 ** 64 + 13))


def test_fake_sub_proof_rejected():
    n, proof = _big_proof()
    i = max(range(len(proof.factors)), key=lambda k: proof.factors[k].q)
    f = proof.factors[i]
    bad_sub = ProofFactor(f.q, f.e, f.witness, SmallDeterministic(f.q + 2))
    bad = replace(proof, factors=proof.factors[:i] + (bad_sub,) + proof.factors[i + 1:])
    assert "sub-proof" in proof_failure(n, bad)


def test_cube_form_discriminant_mutation_rejected():
    n = BIG_PRIMES["W_127"]
    p = prove_prime(n)
    assert p.form is Form.CUBE
    d = p.discriminant
    assert not verify_proof(n, replace(p, discriminant=replace(d, delta=d.delta + 1)))
    assert not verify_proof(n, replace(p, discriminant=replace(d, is_square=not d.is_square)))
    assert not verify_proof(n, replace(p, discriminant=None))
    assert not verify_proof(n, replace(p, form=Form.SQRT, discriminant=None))


def test_certification_incomplete_with_tiny_budget():
    # a safe prime n = 2q + 1: q has 100 bits and its own n - 1 cannot be split with no effort
    tiny = CertifyBudget(trial_limit=3, pm1_b1=2, rho_iterations=1, ecm_schedule=())
    n = next(x for x in range(2 ** 100 + 1, 2 ** 100 + 10 ** 6, 2)
             if is_probable_prime(x) and is_probable_prime((x - 1) // 2))
    with pytest.raises(CertificationIncomplete, match="bits needed"):
        prove_prime(n, tiny)
    assert verify_proof(n, prove_prime(n))


def test_memo_reuses_subproofs():
    memo = {}
    a = prove_prime(BIG_PRIMES["M_127"], None, memo)
    assert memo[BIG_PRIMES["M_127"]] is a
    assert prove_prime(BIG_PRIMES["M_127"], None, memo) is a


@pytest.fixture(scope="module")
def random_prime_outcomes():
    """Seeded sample of 200 primes of 20-80 digits; proof is None when the
    default budget could not factor n - 1 far enough."""
    rng = random.Random(2024)
    out = []
    for _ in range(200):
        k = rng.randint(20, 80)
        n = rng.randrange(10 ** (k - 1), 10 ** k) | 1
        while not is_probable_prime(n):
            n += 2
        try:
            out.append((n, prove_prime(n)))
        except CertificationIncomplete:
            out.append((n, None))
    proved = sum(p is not None for _, p in out)
    print(f"random primes: {proved} proved, {len(out) - proved} certification incomplete")
    return out


@pytest.mark.slow
def test_random_prime_proofs_verify(random_prime_outcomes):
    assert len(random_prime_outcomes) == 200
    for n, proof in random_prime_outcomes:
        if proof is not None:
            assert verify_proof(n, proof), n


@pytest.mark.slow
def test_random_primes_all_certified(random_prime_outcomes):
    stuck = [len(str(n)) for n, proof in random_prime_outcomes if proof is None]
    assert not stuck, f"{len(stuck)} of 200 primes not certified; digit counts {stuck}"
