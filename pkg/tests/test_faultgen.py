import numpy as np
import pytest

from failcluster.errors import CorpusError, DomainError, GenerationError, ProgramSyntaxError
from failcluster.faultgen import (PROGRAMS, FaultKind, FaultTypeClass, FaultyVersion, Mutation,
                                  Operator, apply_mutations, enumerate_mutations, format_program,
                                  generate_corpus, interpret, label_oracle, load_corpus,
                                  parse_program, random_suite, sample_synthetic_spectrum,
                                  synthesize_version, write_corpus)
from failcluster.faultgen.language import Assign, Branch
from failcluster.faultgen.programs import MIN_TWO_PRODUCT
from failcluster.harness.config import ExperimentConfig

from conftest import MOTIVATING_SUITE

MOTIVATING_FAULTS = (
    Mutation(6, Operator.VARIABLE_SUBSTITUTION, "left", "b"),
    Mutation(9, Operator.VARIABLE_SUBSTITUTION, "right", "c"),
)


@pytest.fixture
def base():
    return parse_program(MIN_TWO_PRODUCT)


def test_statement_ids_follow_text_order(base):
    assert base.num_statements == 11
    assert base.inputs == ("a", "b", "c")
    assert isinstance(base.statement(2), Branch)
    assert base.statement(2).else_sid == 7
    assert base.statement(6) == Assign(6, "z", "a", "*", "c")
    assert base.statement(9) == Assign(9, "z", "a", "*", "b")
    with pytest.raises(KeyError):
        base.statement(12)


@pytest.mark.parametrize("canned", PROGRAMS, ids=lambda c: c.name)
def test_canned_programs_round_trip(canned):
    program = canned.program
    assert parse_program(format_program(program)) == program


@pytest.mark.parametrize("text, line", [
    ("SET z = 1\nOUT z\n", 1),
    ("IN a\nIF a < 1\n  SET z = 1\nOUT z\n", 4),
    ("IN a\nEND\nOUT a\n", 2),
    ("IN a\nSET z = a % 2\nOUT z\n", 2),
    ("IN a\nSET z = a\n", 2),
    ("IN a\nOUT a\nSET z = a\n", 3),
    ("IN a\nIF a < 1\n  SET z = 1\n", 2),
])
def test_syntax_errors_name_the_line(text, line):
    with pytest.raises(ProgramSyntaxError) as info:
        parse_program(text)
    assert info.value.line == line


def test_undecodable_program_line():
    with pytest.raises(ProgramSyntaxError) as info:
        parse_program(b"IN a\nSET z = a \xff 1\nOUT z\n")
    assert info.value.line == 2


def test_fixed_program_on_the_first_test(base):
    result = interpret(base, (1, 2, 4))
    assert result.output == 2
    assert result.trace == {1, 2, 3, 4}
    assert result.path(11) == [True] * 4 + [False] * 7


def test_faulty_program_fails_through_s6(motivating_faulty_program, base):
    faulty = interpret(motivating_faulty_program, (2, 6, 5))
    assert faulty.output == 30
    assert interpret(base, (2, 6, 5)).output == 10
    assert faulty.trace == {1, 2, 3, 5, 6}


def test_division_truncates_and_zero_crashes():
    program = parse_program("IN a b\nSET z = a / b\nOUT z\n")
    assert interpret(program, (-7, 2)).output == -3
    assert interpret(program, (7, -2)).output == -3
    crash = interpret(program, (1, 0))
    assert crash.crashed
    assert crash.output is None
    assert crash.trace == {1, 2}
    with pytest.raises(DomainError):
        interpret(program, (1,))


def test_motivating_mutations_rebuild_the_faulty_program(base, motivating_faulty_program):
    assert apply_mutations(base, MOTIVATING_FAULTS) == motivating_faulty_program
    assert [m.kind for m in MOTIVATING_FAULTS] == [FaultKind.AF, FaultKind.AF]
    assert MOTIVATING_FAULTS[0].describe() == "s6 variable-substitution left -> b"


def test_else_deletion_skips_the_else_block(base):
    mutated = apply_mutations(base, [Mutation(2, Operator.ELSE_DELETION)])
    assert "ELSE DELETED" in format_program(mutated)
    assert parse_program(format_program(mutated)) == mutated
    assert mutated.num_statements == 11
    result = interpret(mutated, (3, 2, 4))
    assert result.output == 0
    assert result.trace == {1, 2}


def test_mutation_pool(base):
    pool = enumerate_mutations(base)
    on_s4 = [m for m in pool if m.target == 4]
    # three substitutes per operand plus three other operators
    assert len(on_s4) == 9
    on_s2 = [m for m in pool if m.target == 2]
    assert {m.operator for m in on_s2} == {Operator.RELATIONAL_NEGATION, Operator.RELATIONAL_SWAP,
                                           Operator.ELSE_DELETION}
    assert len(on_s2) == 6
    assert Mutation(2, Operator.RELATIONAL_NEGATION, "op", ">=") in on_s2
    assert not any(m.target in (1, 5, 7, 10) for m in pool)


def test_constant_change():
    program = parse_program("IN a\nSET z = a + 3\nOUT z\n")
    pool = enumerate_mutations(program)
    constants = {m.replacement for m in pool if m.operator is Operator.CONSTANT_CHANGE}
    assert constants == {2, 4}
    assert interpret(apply_mutations(program, [Mutation(2, Operator.CONSTANT_CHANGE, "right", 4)]),
                     (1,)).output == 5


def test_invalid_mutations(base):
    with pytest.raises(DomainError):
        apply_mutations(base, [Mutation(6, Operator.VARIABLE_SUBSTITUTION, "left", "b"),
                               Mutation(6, Operator.ARITHMETIC_SWAP, "op", "+")])
    with pytest.raises(DomainError):
        apply_mutations(base, [Mutation(6, Operator.RELATIONAL_NEGATION, "op", ">=")])
    with pytest.raises(DomainError):
        apply_mutations(base, [Mutation(2, Operator.ARITHMETIC_SWAP, "op", "+")])
    with pytest.raises(DomainError):
        apply_mutations(base, [Mutation(40, Operator.ELSE_DELETION)])


def test_label_oracle_reproduces_the_motivating_example(base, motivating_cov, motivating_oracle):
    version = FaultyVersion(base, MOTIVATING_FAULTS, FaultTypeClass.TYPE_A)
    cov, oracle = label_oracle(version, MOTIVATING_SUITE)
    assert cov == motivating_cov
    assert oracle == motivating_oracle
    assert version.nof == 2


def test_label_oracle_drops_multi_cause_failures(base, caplog):
    mutations = (Mutation(3, Operator.RELATIONAL_NEGATION, "op", ">="),
                 Mutation(4, Operator.ARITHMETIC_SWAP, "op", "+"))
    version = FaultyVersion(base, mutations, FaultTypeClass.TYPE_H)
    # (1, 2, 4) fails under either mutation alone, (3, 2, 4) reaches neither
    cov, oracle = label_oracle(version, [(1, 2, 4), (1, 2, 1), (3, 2, 4)])
    assert oracle.dropped_multi_cause == 1
    assert oracle.dropped_interaction == 0
    assert cov.num_tests == 2
    assert cov.failed_ids == (0,)
    assert oracle.r == 1
    assert "Dropped 1 multi-cause" in caplog.text

    # the kept columns are the faulty program's paths of (1, 2, 1) and (3, 2, 4)
    faulty = version.program
    paths = [interpret(faulty, inputs).path(faulty.num_statements)
             for inputs in [(1, 2, 1), (3, 2, 4)]]
    assert np.array_equal(cov.covers, np.array(paths, dtype=bool).T)

    with pytest.raises(DomainError):
        label_oracle(version, [])


def test_synthesize_version(base):
    suite = random_suite(base, 80, seed=11, ranges=((1, 10), (1, 10), (1, 10)))
    pool = enumerate_mutations(base)
    version = synthesize_version(base, pool, 2, rng_seed=5, suite=suite)
    assert version.nof == 2
    assert len({m.target for m in version.mutations}) == 2
    assert [m.target for m in version.mutations] == sorted(m.target for m in version.mutations)
    _, oracle = label_oracle(version, suite)
    assert oracle.r == 2
    assert synthesize_version(base, pool, 2, rng_seed=5, suite=suite) == version


def test_synthesize_respects_fault_type(base):
    suite = random_suite(base, 80, seed=2, ranges=((1, 10), (1, 10), (1, 10)))
    pool = enumerate_mutations(base)
    predicate = synthesize_version(base, pool, 2, 9, suite, FaultTypeClass.TYPE_P)
    assert {m.kind for m in predicate.mutations} == {FaultKind.PF}
    assert predicate.fault_type_class is FaultTypeClass.TYPE_P
    mixed = synthesize_version(base, pool, 2, 9, suite, "TypeH")
    assert {m.kind for m in mixed.mutations} == {FaultKind.AF, FaultKind.PF}


def test_synthesize_needs_distinct_statements(base):
    only_s6 = [m for m in enumerate_mutations(base) if m.target == 6]
    with pytest.raises(GenerationError):
        synthesize_version(base, only_s6, 2, 0, MOTIVATING_SUITE)
    with pytest.raises(GenerationError):
        synthesize_version(base, only_s6, 2, 0, MOTIVATING_SUITE, FaultTypeClass.TYPE_H)


def test_random_suite_avoids_crashes():
    program = parse_program("IN a b\nSET z = a / b\nOUT z\n")
    suite = random_suite(program, 30, seed=4, ranges=((0, 3), (0, 3)))
    assert len(suite) == 30
    assert all(b != 0 for _, b in suite)
    assert suite == random_suite(program, 30, seed=4, ranges=((0, 3), (0, 3)))


def test_synthetic_spectrum_layout():
    cov, oracle = sample_synthetic_spectrum(3, 2, 5, 30, 0.0, rng_seed=1)
    assert cov.num_statements == 30
    assert cov.failed_ids == tuple(range(6))
    assert cov.passed_ids == tuple(range(6, 11))
    assert oracle.faults == (0, 0, 1, 1, 2, 2)
    region = 5
    for test_id, fault in zip(oracle.failed_ids, oracle.faults):
        path = cov.path(test_id)
        assert path[:15].tolist() == [f == fault for f in range(3) for _ in range(region)]
        assert path[15:22].all()
        assert not path[22:].any()
    for test_id in cov.passed_ids:
        assert not cov.path(test_id)[[0, 5, 10]].any()


def test_synthetic_noise_keeps_the_faults_visible():
    cov, oracle = sample_synthetic_spectrum(4, 3, 10, 40, 0.3, rng_seed=[7, 1])
    again, _ = sample_synthetic_spectrum(4, 3, 10, 40, 0.3, rng_seed=[7, 1])
    assert cov == again
    for test_id, fault in zip(oracle.failed_ids, oracle.faults):
        assert cov.path(test_id)[fault * 5]
    for test_id in cov.passed_ids:
        assert not cov.path(test_id)[[0, 5, 10, 15]].any()


@pytest.mark.parametrize("args", [(0, 1, 1, 5, 0.0), (2, 1, 1, 5, 1.0), (6, 1, 1, 5, 0.0)])
def test_synthetic_arguments_are_checked(args):
    with pytest.raises(DomainError):
        sample_synthetic_spectrum(*args, rng_seed=0)


def test_synthetic_corpus_round_trips(tmp_path):
    cfg = ExperimentConfig(seed=5, nofs=(2, 3), versions_per_level=2)
    versions = generate_corpus(cfg)
    assert [v.version_id for v in versions] == ["synthetic-n2-000", "synthetic-n2-001",
                                                "synthetic-n3-000", "synthetic-n3-001"]
    write_corpus(versions, tmp_path / "corpus")
    assert load_corpus(tmp_path / "corpus") == versions


def test_micro_corpus_round_trips(tmp_path):
    cfg = ExperimentConfig(seed=3, generator="micro", nofs=(2,), versions_per_level=1,
                           fault_types=("TypeA",), suite_size=60)
    versions = generate_corpus(cfg)
    assert versions
    for version in versions:
        assert version.oracle.r == 2
        assert version.fault_type is FaultTypeClass.TYPE_A
        assert len(version.mutations) == 2
        assert parse_program(version.program_text).num_statements > 0
    write_corpus(versions, tmp_path)
    assert load_corpus(tmp_path) == sorted(versions, key=lambda v: v.version_id)


def test_missing_corpus_directory(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "absent")
