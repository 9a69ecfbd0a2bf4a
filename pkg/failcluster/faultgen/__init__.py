"""
Fault injection for desk-scale corpora: a tiny branching language with an
interpreter, assignment and predicate mutation operators, r-fault synthesis
with oracle labelling, and a planted-model spectrum sampler.
"""

from failcluster.faultgen.corpus import (CorpusVersion, FaultTypeClass, FaultyVersion,
                                         generate_corpus, label_oracle, load_corpus,
                                         sample_synthetic_spectrum, synthesize_version,
                                         write_corpus)
from failcluster.faultgen.interpreter import ExecutionResult, interpret
from failcluster.faultgen.language import MicroProgram, format_program, parse_program
from failcluster.faultgen.mutation import (FaultKind, Mutation, Operator, apply_mutations,
                                           enumerate_mutations)
from failcluster.faultgen.programs import PROGRAMS, random_suite

__all__ = [
    'CorpusVersion', 'FaultTypeClass', 'FaultyVersion', 'generate_corpus', 'label_oracle',
    'load_corpus', 'sample_synthetic_spectrum', 'synthesize_version', 'write_corpus',
    'ExecutionResult', 'interpret', 'MicroProgram', 'format_program', 'parse_program',
    'FaultKind', 'Mutation', 'Operator', 'apply_mutations', 'enumerate_mutations',
    'PROGRAMS', 'random_suite',
]
