"""Canned base programs and random test suites for them."""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from failcluster.faultgen.interpreter import interpret
from failcluster.faultgen.language import parse_program

logger = logging.getLogger(__name__)

# product of the two smallest of three numbers
MIN_TWO_PRODUCT = """\
IN a b c
IF a < b
  IF b < c
    SET z = a * b
  ELSE
    SET z = a * c
  END
ELSE
  IF a < c
    SET z = a * b
  ELSE
    SET z = b * c
  END
END
OUT z
"""

# 0 not a triangle, 1 equilateral, 2 isosceles, 3 scalene
TRIANGLE = """\
IN a b c
SET kind = 3
SET ab = a + b
SET bc = b + c
SET ac = a + c
IF ab <= c
  SET kind = 0
ELSE
  IF bc <= a
    SET kind = 0
  ELSE
    IF ac <= b
      SET kind = 0
    ELSE
      IF a == b
        IF b == c
          SET kind = 1
        ELSE
          SET kind = 2
        END
      ELSE
        IF b == c
          SET kind = 2
        ELSE
          IF a == c
            SET kind = 2
          END
        END
      END
    END
  END
END
OUT kind
"""

SPREAD_SCORE = """\
IN a b c
SET hi = a
SET lo = a
IF b > hi
  SET hi = b
END
IF c > hi
  SET hi = c
END
IF b < lo
  SET lo = b
END
IF c < lo
  SET lo = c
END
SET span = hi - lo
SET sum = a + b
SET sum = sum + c
SET mid = sum - hi
SET mid = mid - lo
SET avg = sum / 3
SET score = span * 2
SET score = score + mid
IF avg > mid
  SET score = score - avg
ELSE
  SET score = score + 1
END
OUT score
"""

# order total after volume and loyalty discounts, in percent
DISCOUNT = """\
IN price qty level
SET total = price * qty
SET rate = 0
IF qty >= 10
  SET rate = 5
  IF qty >= 50
    SET rate = 10
  END
END
IF level == 2
  SET rate = rate + 3
ELSE
  IF level > 2
    SET rate = rate + 6
  END
END
SET cut = total * rate
SET cut = cut / 100
SET total = total - cut
IF total < 0
  SET total = 0
END
OUT total
"""


@dataclass(frozen=True)
class CannedProgram:
    name: str
    text: str
    input_ranges: Tuple[Tuple[int, int], ...]

    @property
    def program(self):
        return parse_program(self.text)


PROGRAMS = (
    CannedProgram("min_two_product", MIN_TWO_PRODUCT, ((1, 10), (1, 10), (1, 10))),
    CannedProgram("triangle", TRIANGLE, ((1, 8), (1, 8), (1, 8))),
    CannedProgram("spread_score", SPREAD_SCORE, ((-10, 10), (-10, 10), (-10, 10))),
    CannedProgram("discount", DISCOUNT, ((1, 40), (1, 80), (0, 4))),
)


def random_suite(program, size, seed, ranges=None):
    """Draw `size` input tuples (inclusive ranges) on which the program does not crash."""
    ranges = ranges or tuple((0, 20) for _ in program.inputs)
    low = np.array([lo for lo, _ in ranges])
    high = np.array([hi for _, hi in ranges]) + 1
    rng = np.random.default_rng(seed)

    suite = []
    attempts = 0
    while len(suite) < size and attempts < 20 * size:
        attempts += 1
        inputs = tuple(int(v) for v in rng.integers(low, high))
        if not interpret(program, inputs).crashed:
            suite.append(inputs)
    if len(suite) < size:
        logger.warning("Only %d of %d requested inputs avoid a crash", len(suite), size)
    return suite
