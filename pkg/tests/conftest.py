import pytest

from failcluster.evaluation import OracleLabels
from failcluster.faultgen.language import parse_program
from failcluster.spectrum import parse_coverage

# product of the two smallest inputs, with faults at s6 and s9
MOTIVATING_COVERAGE = """\
# t1..t10, s1..s11
statements=11 tests=10
11110000000 P
11000011011 P
11000011100 F
11000011100 F
11101100000 F
11000011011 P
11000011100 F
11101100000 F
11000011011 P
11000011100 F
"""

MOTIVATING_FAULTY_PROGRAM = """\
IN a b c
IF a < b
  IF b < c
    SET z = a * b
  ELSE
    SET z = b * c
  END
ELSE
  IF a < c
    SET z = a * c
  ELSE
    SET z = b * c
  END
END
OUT z
"""

MOTIVATING_SUITE = [(1, 2, 4), (4, 3, 2), (3, 2, 4), (5, 1, 6), (2, 6, 5),
                    (6, 5, 1), (7, 5, 8), (5, 7, 3), (8, 1, 2), (8, 6, 9)]

T3, T4, T5, T7, T8, T10 = 2, 3, 4, 6, 7, 9


@pytest.fixture
def motivating_cov():
    return parse_coverage(MOTIVATING_COVERAGE)


@pytest.fixture
def motivating_oracle():
    # fault 0 at s6 explains t5 and t8; fault 1 at s9 explains the rest
    return OracleLabels.build({T3: 1, T4: 1, T5: 0, T7: 1, T8: 0, T10: 1})


@pytest.fixture
def motivating_faulty_program():
    return parse_program(MOTIVATING_FAULTY_PROGRAM)
