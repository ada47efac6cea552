from dataclasses import replace

import pytest

from wagstaff_bls.certificate import ChuaRecord, write_certificate
from wagstaff_bls.certify import SmallDeterministic
from wagstaff_bls.pocklington import Form
from wagstaff_bls.verifier import (EXIT_FAIL, EXIT_PASS, EXIT_SCHEMA, STEP_NAMES, main,
                                   verify_certificate, verify_file)


def _swap_entry(cert, i, **changes):
    es = list(cert.entries)
    es[i] = replace(es[i], **changes)
    return replace(cert, entries=tuple(es))


def _index_of(cert, q):
    return next(i for i, e in enumerate(cert.entries) if e.q == q)


@pytest.mark.parametrize("name", ["cert7", "cert127", "cert127_cube"])
def test_prover_output_verifies(name, request):
    rep = verify_certificate(request.getfixturevalue(name))
    assert rep.passed, rep.to_text()
    assert [s.number for s in rep.steps] == list(range(1, 10))
    assert [s.name for s in rep.steps] == list(STEP_NAMES)


def _mut_exponent(c):
    return replace(c, n_digits=c.n_digits + 1)


def _mut_primality(c):
    i = _index_of(c, 127)
    return _swap_entry(c, i, proof=SmallDeterministic(127, method="trust-me"))


def _mut_valuations(c):
    return _swap_entry(c, _index_of(c, 3), e=c.entries[_index_of(c, 3)].e + 1)


def _mut_factored_part(c):
    return replace(c, R=c.R + 2)


def _mut_threshold(c):
    return replace(c, margin_bits=c.margin_bits + 1)


def _mut_witness(c):
    # 1^((N-1)/q) - 1 = 0, so the gcd condition collapses to N
    return _swap_entry(c, _index_of(c, 7), witness=1)


def _mut_discriminant(c):
    d = c.discriminant
    return replace(c, discriminant=replace(d, is_square=not d.is_square))


def _mut_condition_two(c):
    ch = c.chua
    return replace(c, chua=ChuaRecord(ch.a, ch.epsilon, ch.delta, not ch.holds))


MUTATIONS = [(1, _mut_exponent), (2, _mut_primality), (3, _mut_valuations),
             (4, _mut_factored_part), (5, _mut_threshold), (6, _mut_witness),
             (7, _mut_discriminant), (8, _mut_condition_two)]


@pytest.mark.parametrize("step, mutate", MUTATIONS, ids=[STEP_NAMES[s - 1] for s, _ in MUTATIONS])
def test_targeted_mutation_fails_exactly_one_step(step, mutate, cert127_cube):
    # re-seal so that only the targeted step can notice
    bad = mutate(cert127_cube).sealed()
    rep = verify_certificate(bad)
    assert not rep.passed
    assert rep.failed_steps == [step], rep.to_text()


def test_digest_mutation_fails_only_step_9(cert127_cube):
    bad = replace(cert127_cube, digest="f" * 64)
    rep = verify_certificate(bad)
    assert rep.failed_steps == [9]


def test_witness_mutation_on_sqrt_certificate(cert7):
    bad = _swap_entry(cert7, 0, witness=43).sealed()
    rep = verify_certificate(bad)
    assert rep.failed_steps == [6]
    assert "0 mod N" in rep.steps[5].reason


def test_discriminant_on_sqrt_form_rejected(cert7, cert127_cube):
    bad = replace(cert7, discriminant=cert127_cube.discriminant).sealed()
    assert verify_certificate(bad).failed_steps == [7]


def test_wrong_form_claim_fails_threshold(cert127):
    bad = replace(cert127, form=Form.CUBE).sealed()
    rep = verify_certificate(bad)
    assert 5 in rep.failed_steps


def test_garbage_never_raises(cert7):
    bad = replace(cert7, exponent=8, cyclotomic=(), entries=()).sealed()
    rep = verify_certificate(bad)
    assert not rep.passed
    assert len(rep.steps) == 9


def test_composite_q_rejected(cert7):
    # 21 is not prime; its leaf proof cannot replay
    bad = _swap_entry(cert7, 1, q=21, proof=SmallDeterministic(21)).sealed()
    rep = verify_certificate(bad)
    assert 2 in rep.failed_steps


def test_verify_file_exit_codes(cert7, tmp_path):
    good = tmp_path / "good.json"
    write_certificate(cert7, good)
    assert verify_file(good)[0] == EXIT_PASS
    bad = tmp_path / "bad.json"
    write_certificate(replace(cert7, digest="0" * 64), bad)
    code, text = verify_file(bad)
    assert code == EXIT_FAIL and "REJECTED" in text
    assert verify_file(tmp_path / "nope.json")[0] == EXIT_SCHEMA
    (tmp_path / "junk.json").write_text('{"format_version": "1"}')
    code, text = verify_file(tmp_path / "junk.json")
    assert code == EXIT_SCHEMA and text.startswith("schema error: $")


def test_main_prints_report(cert7, tmp_path, capsys):
    path = tmp_path / "c.json"
    write_certificate(cert7, path)
    assert main([str(path)]) == 0
    out = capsys.readouterr().out
    assert "VERIFIED" in out and "step 9" in out
