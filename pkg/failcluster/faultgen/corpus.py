"""
Labelled multi-fault corpora.

Two generators produce them. The micro generator injects r single-statement
mutations into a canned program, runs a random suite against the base program
and labels every failing test with the one mutation that explains it. The
synthetic generator samples coverage straight from a planted model, which
scales far beyond what the micro programs can give.

On disk every version is a directory holding coverage.txt, oracle.txt,
version.env and, for micro versions, program.txt.
"""

import logging
import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from dotenv import dotenv_values

from failcluster.errors import CorpusError, DomainError, FailclusterError, GenerationError
from failcluster.evaluation import OracleLabels, format_oracle, load_oracle
from failcluster.faultgen.interpreter import interpret
from failcluster.faultgen.mutation import FaultKind, apply_mutations, enumerate_mutations
from failcluster.faultgen.language import MicroProgram, format_program
from failcluster.faultgen.programs import PROGRAMS, random_suite
from failcluster.spectrum import (CoverageRecord, Verdict, coverage_from_paths, format_coverage,
                                  load_coverage)

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 200


class FaultTypeClass(str, Enum):
    TYPE_A = "TypeA"
    TYPE_P = "TypeP"
    TYPE_H = "TypeH"

    @classmethod
    def of(cls, mutations):
        kinds = {m.kind for m in mutations}
        if kinds == {FaultKind.AF}:
            return cls.TYPE_A
        if kinds == {FaultKind.PF}:
            return cls.TYPE_P
        return cls.TYPE_H


@dataclass(frozen=True)
class FaultyVersion:
    base: MicroProgram
    mutations: Tuple
    fault_type_class: FaultTypeClass

    @property
    def nof(self):
        return len(self.mutations)

    @property
    def program(self):
        return apply_mutations(self.base, self.mutations)


def label_oracle(version, suite):
    """Coverage of the faulty program on the suite plus the fault behind each failure.

    The base program's output is the expected output. A failed test is labelled
    with the single mutation that also fails it alone; tests failing under
    several or none of them are dropped from both returned objects.
    """
    suite = [tuple(inputs) for inputs in suite]
    if not suite:
        raise DomainError("cannot label an empty test suite")

    base = version.base
    faulty = version.program
    singles = [apply_mutations(base, [m]) for m in version.mutations]
    num_statements = faulty.num_statements

    paths, verdicts, kept, cause_of = [], [], [], {}
    multi_cause = interaction = 0
    for test_id, inputs in enumerate(suite):
        expected = interpret(base, inputs)
        if expected.crashed:
            raise DomainError(f"base program crashes on input {inputs}")
        run = interpret(faulty, inputs)
        failed = _fails(run, expected)
        paths.append(run.path(num_statements))
        verdicts.append(Verdict.FAIL if failed else Verdict.PASS)
        if failed:
            causes = [i for i, program in enumerate(singles)
                      if _fails(interpret(program, inputs), expected)]
            if len(causes) > 1:
                multi_cause += 1
                continue
            if not causes:
                interaction += 1
                continue
            cause_of[test_id] = causes[0]
        kept.append(test_id)

    if multi_cause or interaction:
        logger.warning("Dropped %d multi-cause and %d interaction-only failures",
                       multi_cause, interaction)
    if not kept:
        raise DomainError("every test of the suite was dropped from the oracle")
    cov = coverage_from_paths(paths, verdicts).subset_tests(kept)
    labels = {new_id: cause_of[old_id] for new_id, old_id in enumerate(kept) if old_id in cause_of}
    oracle = OracleLabels.build(labels, dropped_multi_cause=multi_cause,
                                dropped_interaction=interaction)
    return cov, oracle


def _fails(run, expected):
    return run.crashed or run.output != expected.output


def _pick(pool, r, fault_type, rng):
    order = rng.permutation(len(pool))
    if fault_type is FaultTypeClass.TYPE_H:
        # seed with one of each kind so the version is mixed
        chosen = []
        for kind in (FaultKind.AF, FaultKind.PF):
            first = next(i for i in order if pool[i].kind is kind)
            chosen.append(pool[first])
        if chosen[0].target == chosen[1].target:
            return None
    else:
        chosen = []
    targets = {m.target for m in chosen}
    for i in order:
        if len(chosen) == r:
            break
        if pool[i].target not in targets and pool[i] not in chosen:
            chosen.append(pool[i])
            targets.add(pool[i].target)
    return chosen if len(chosen) == r else None


def synthesize_version(base, one_bug_pool, r, rng_seed, suite, fault_type=None):
    """Inject r mutations on distinct statements, resampling until every fault is visible."""
    fault_type = FaultTypeClass(fault_type) if fault_type is not None else None
    pool = list(one_bug_pool)
    if fault_type is FaultTypeClass.TYPE_A:
        pool = [m for m in pool if m.kind is FaultKind.AF]
    elif fault_type is FaultTypeClass.TYPE_P:
        pool = [m for m in pool if m.kind is FaultKind.PF]
    elif fault_type is FaultTypeClass.TYPE_H:
        if r < 2 or {m.kind for m in pool} != {FaultKind.AF, FaultKind.PF}:
            raise GenerationError(f"a mixed version needs r >= 2 and both fault kinds (r={r})")

    if r < 1:
        raise GenerationError("a faulty version needs at least one fault")
    if len({m.target for m in pool}) < r:
        raise GenerationError(
            f"pool covers {len({m.target for m in pool})} distinct statements, {r} needed")

    rng = np.random.default_rng(rng_seed)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        chosen = _pick(pool, r, fault_type, rng)
        if chosen is None:
            continue
        chosen.sort(key=lambda m: m.target)
        version = FaultyVersion(base, tuple(chosen), FaultTypeClass.of(chosen))
        try:
            _, oracle = label_oracle(version, suite)
        except DomainError:
            continue
        if oracle.r == r and oracle.reduced_from is None:
            logger.debug("Synthesized %s version after %d attempts", version.fault_type_class.value,
                         attempt)
            return version
    raise GenerationError(f"no valid {r}-fault version within {MAX_ATTEMPTS} attempts")


def sample_synthetic_spectrum(n_faults, n_failed_per_fault, n_passed, n_statements, noise,
                              rng_seed, background=0.5):
    """Coverage and oracle sampled from a planted fault model.

    Statements are laid out as n_faults equal fault regions (faulty statement
    first), then a prologue every test covers, then a region only passed tests
    reach. Noise flips any bit except a failed test's own faulty statement and
    the faulty statements in passed tests.
    """
    if min(n_faults, n_failed_per_fault, n_passed, n_statements) < 1:
        raise DomainError("all counts must be at least 1")
    if not 0.0 <= noise < 1.0:
        raise DomainError(f"noise must lie in [0, 1), got {noise}")
    if n_statements < n_faults:
        raise DomainError(f"{n_statements} statements cannot hold {n_faults} planted faults")

    rng = np.random.default_rng(rng_seed)
    region = max(1, n_statements // (2 * n_faults))
    faulty = np.arange(n_faults) * region
    rest = n_statements - n_faults * region
    prologue = np.arange(n_faults * region, n_faults * region + rest // 2)
    passed_only = np.arange(n_faults * region + rest // 2, n_statements)

    n_failed = n_faults * n_failed_per_fault
    covers = np.zeros((n_statements, n_failed + n_passed), dtype=bool)
    protected = np.zeros_like(covers)
    faults = np.repeat(np.arange(n_faults), n_failed_per_fault)
    for test_id, fault in enumerate(faults):
        covers[faulty[fault]:faulty[fault] + region, test_id] = True
        protected[faulty[fault], test_id] = True
    covers[prologue, :] = True
    passed = slice(n_failed, n_failed + n_passed)
    covers[passed_only, passed] = rng.random((len(passed_only), n_passed)) < background
    protected[faulty, passed] = True

    flips = (rng.random(covers.shape) < noise) & ~protected
    covers ^= flips

    verdicts = [Verdict.FAIL] * n_failed + [Verdict.PASS] * n_passed
    cov = CoverageRecord(covers, verdicts)
    oracle = OracleLabels.build({i: int(f) for i, f in enumerate(faults)})
    return cov, oracle


@dataclass(frozen=True)
class CorpusVersion:
    version_id: str
    coverage: CoverageRecord
    oracle: OracleLabels
    nof: Optional[int]
    fault_type: Optional[FaultTypeClass]
    generator: str
    program_text: Optional[str] = None
    mutations: Tuple[str, ...] = ()


def _synthetic_versions(cfg):
    for level, nof in enumerate(cfg.nofs):
        for v in range(cfg.versions_per_level):
            cov, oracle = sample_synthetic_spectrum(
                nof, cfg.n_failed_per_fault, cfg.n_passed, cfg.n_statements, cfg.noise,
                [cfg.seed, level, v], background=cfg.background)
            yield CorpusVersion(f"synthetic-n{nof}-{v:03d}", cov, oracle, nof, None, "synthetic")


def _micro_versions(cfg):
    for p_index, canned in enumerate(PROGRAMS):
        base = canned.program
        pool = enumerate_mutations(base)
        suite = random_suite(base, cfg.suite_size, [cfg.seed, p_index], canned.input_ranges)
        for nof in cfg.nofs:
            for t_index, fault_type in enumerate(cfg.fault_types):
                for v in range(cfg.versions_per_level):
                    version_id = f"micro-{canned.name}-n{nof}-{fault_type.value}-{v:03d}"
                    try:
                        version = synthesize_version(base, pool, nof,
                                                     [cfg.seed, p_index, nof, t_index, v],
                                                     suite, fault_type)
                    except GenerationError as exc:
                        logger.warning("Skipping %s: %s", version_id, exc)
                        continue
                    cov, oracle = label_oracle(version, suite)
                    yield CorpusVersion(version_id, cov, oracle, nof, version.fault_type_class,
                                        "micro", format_program(version.program),
                                        tuple(m.describe() for m in version.mutations))


def generate_corpus(cfg):
    """Build the corpus described by an ExperimentConfig."""
    if cfg.generator == "synthetic":
        versions = list(_synthetic_versions(cfg))
    else:
        versions = list(_micro_versions(cfg))
    logger.info("Generated %d %s versions", len(versions), cfg.generator)
    return versions


def write_corpus(versions, directory):
    os.makedirs(directory, exist_ok=True)
    for version in versions:
        path = os.path.join(directory, version.version_id)
        os.makedirs(path, exist_ok=True)
        with open(os.path.join(path, "coverage.txt"), "w", newline="\n") as file:
            file.write(format_coverage(version.coverage))
        with open(os.path.join(path, "oracle.txt"), "w", newline="\n") as file:
            file.write(format_oracle(version.oracle))
        meta = [f"generator={version.generator}"]
        if version.nof is not None:
            meta.append(f"nof={version.nof}")
        if version.fault_type is not None:
            meta.append(f"fault_type={version.fault_type.value}")
        if version.mutations:
            meta.append(f'mutations="{"; ".join(version.mutations)}"')
        with open(os.path.join(path, "version.env"), "w", newline="\n") as file:
            file.write("\n".join(meta) + "\n")
        if version.program_text is not None:
            with open(os.path.join(path, "program.txt"), "w", newline="\n") as file:
                file.write(version.program_text)
    logger.info("Wrote %d versions to %s", len(versions), directory)


def _load_version(directory, version_id):
    path = os.path.join(directory, version_id)
    coverage = load_coverage(os.path.join(path, "coverage.txt"))
    oracle = load_oracle(os.path.join(path, "oracle.txt"))
    meta = dotenv_values(os.path.join(path, "version.env"))
    if set(oracle.failed_ids) != set(coverage.failed_ids):
        raise CorpusError(version_id, "oracle and coverage disagree on the failed tests")
    program_path = os.path.join(path, "program.txt")
    program_text = None
    if os.path.exists(program_path):
        with open(program_path) as file:
            program_text = file.read()
    nof = meta.get("nof")
    fault_type = meta.get("fault_type")
    mutations = meta.get("mutations")
    return CorpusVersion(
        version_id=version_id,
        coverage=coverage,
        oracle=oracle,
        nof=int(nof) if nof else None,
        fault_type=FaultTypeClass(fault_type) if fault_type else None,
        generator=meta.get("generator") or "external",
        program_text=program_text,
        mutations=tuple(mutations.split("; ")) if mutations else (),
    )


def load_corpus(directory):
    """Every version directory under `directory`, sorted by version id."""
    if not os.path.isdir(directory):
        raise CorpusError(directory, "corpus directory does not exist")
    versions = []
    for version_id in sorted(os.listdir(directory)):
        if not os.path.isdir(os.path.join(directory, version_id)):
            continue
        try:
            versions.append(_load_version(directory, version_id))
        except CorpusError:
            raise
        except (FailclusterError, OSError, ValueError) as exc:
            raise CorpusError(version_id, str(exc)) from exc
    logger.info("Loaded %d versions from %s", len(versions), directory)
    return versions
