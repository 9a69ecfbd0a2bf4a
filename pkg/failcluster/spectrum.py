"""
Coverage ingestion and spectrum computation.

A coverage file is plain text:

    statements=<J> tests=<P>
    <J characters of 0/1> <P or F>      (one line per test, P lines)

Row i is test t_{i+1}, column j is statement s_{j+1}. Lines starting with '#'
are comments. Internally tests and statements are 0-based indices.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Tuple

import numpy as np

from failcluster.errors import CoverageParseError, DomainError

logger = logging.getLogger(__name__)

_HEADER = re.compile(r"^statements=(\d+)\s+tests=(\d+)$")
_ROW = re.compile(r"^([01]+) (\S+)$")


class Verdict(str, Enum):
    PASS = "P"
    FAIL = "F"


@dataclass(frozen=True, eq=False)
class CoverageRecord:
    """Binary statement coverage plus per-test verdicts.

    covers is a read-only boolean matrix shaped [statement x test].
    """
    covers: np.ndarray
    verdicts: Tuple[Verdict, ...]

    def __post_init__(self):
        covers = np.array(self.covers, dtype=bool)
        if covers.ndim != 2:
            raise DomainError("coverage matrix must be two dimensional")
        if covers.shape[1] != len(self.verdicts):
            raise DomainError(
                f"coverage has {covers.shape[1]} test columns but {len(self.verdicts)} verdicts")
        covers.setflags(write=False)
        object.__setattr__(self, "covers", covers)
        object.__setattr__(self, "verdicts", tuple(Verdict(v) for v in self.verdicts))

    @property
    def num_statements(self):
        return self.covers.shape[0]

    @property
    def num_tests(self):
        return self.covers.shape[1]

    @property
    def failed_ids(self):
        return tuple(i for i, v in enumerate(self.verdicts) if v is Verdict.FAIL)

    @property
    def passed_ids(self):
        return tuple(i for i, v in enumerate(self.verdicts) if v is Verdict.PASS)

    def path(self, test_id):
        """Coverage column (execution path) of one test."""
        return self.covers[:, test_id]

    def subset_tests(self, test_ids):
        """New record keeping only the given test columns, in the given order."""
        test_ids = list(test_ids)
        return CoverageRecord(self.covers[:, test_ids], tuple(self.verdicts[i] for i in test_ids))

    def __eq__(self, other):
        if not isinstance(other, CoverageRecord):
            return NotImplemented
        return self.verdicts == other.verdicts and np.array_equal(self.covers, other.covers)

    __hash__ = None


@dataclass(frozen=True)
class SuiteSelection:
    """A test suite drawn from a CoverageRecord: failed ids F plus passed ids S."""
    failed_ids: Tuple[int, ...]
    passed_ids: Tuple[int, ...]

    @classmethod
    def full(cls, cov):
        return cls(cov.failed_ids, cov.passed_ids)

    def validate(self, cov):
        failed, passed = set(self.failed_ids), set(self.passed_ids)
        if len(failed) != len(self.failed_ids) or len(passed) != len(self.passed_ids):
            raise DomainError("suite selection contains duplicate test ids")
        if failed & passed:
            raise DomainError(f"tests {sorted(failed & passed)} selected as both failed and passed")
        for test_id in self.failed_ids + self.passed_ids:
            if not 0 <= test_id < cov.num_tests:
                raise DomainError(f"test id {test_id} out of range for {cov.num_tests} tests")
        for test_id in self.failed_ids:
            if cov.verdicts[test_id] is not Verdict.FAIL:
                raise DomainError(f"test {test_id} is selected as failed but passed")
        for test_id in self.passed_ids:
            if cov.verdicts[test_id] is not Verdict.PASS:
                raise DomainError(f"test {test_id} is selected as passed but failed")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Per-statement spectrum counts for one test suite."""
    n_cf: np.ndarray
    n_uf: np.ndarray
    n_cs: np.ndarray
    n_us: np.ndarray
    n_f: int
    n_s: int

    def __post_init__(self):
        for name in ("n_cf", "n_uf", "n_cs", "n_us"):
            counts = np.array(getattr(self, name), dtype=np.int64)
            counts.setflags(write=False)
            object.__setattr__(self, name, counts)

    @property
    def num_statements(self):
        return len(self.n_cf)

    @property
    def n_c(self):
        return self.n_cf + self.n_cs

    @property
    def n_u(self):
        return self.n_uf + self.n_us

    @property
    def n(self):
        return self.n_f + self.n_s

    def row(self, statement):
        """Counts of one statement as a dict keyed by notation."""
        return {
            "n_cf": int(self.n_cf[statement]),
            "n_uf": int(self.n_uf[statement]),
            "n_cs": int(self.n_cs[statement]),
            "n_us": int(self.n_us[statement]),
            "n_c": int(self.n_c[statement]),
            "n_u": int(self.n_u[statement]),
            "n_s": self.n_s,
            "n_f": self.n_f,
            "n": self.n,
        }


def text_lines(text, on_bad_line):
    """Lines of a str, or of UTF-8 bytes decoded one line at a time.

    on_bad_line(line_no) builds the exception raised for an undecodable line.
    """
    if not isinstance(text, bytes):
        return text.splitlines()
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError:
            raise on_bad_line(line_no) from None
    return lines


def parse_coverage(text):
    """Parse coverage-file text (str or bytes) into a validated CoverageRecord."""
    lines = text_lines(text, lambda line_no: CoverageParseError(line_no, "invalid UTF-8"))

    header = None
    rows = []
    verdicts = []
    last_line = 0
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        last_line = line_no
        if header is None:
            match = _HEADER.match(line)
            if not match:
                raise CoverageParseError(line_no, f"malformed header {line!r}")
            header = (int(match.group(1)), int(match.group(2)))
            if header[0] == 0:
                raise CoverageParseError(line_no, "no statements")
            if header[1] == 0:
                raise CoverageParseError(line_no, "no tests")
            header_line = line_no
            continue

        num_statements, num_tests = header
        match = _ROW.match(line)
        if not match:
            raise CoverageParseError(line_no, f"malformed coverage row {line!r}")
        bits, verdict = match.groups()
        if len(bits) != num_statements:
            raise CoverageParseError(
                line_no, f"row has {len(bits)} statements, header declares {num_statements}")
        if verdict not in ("P", "F"):
            raise CoverageParseError(line_no, f"verdict must be P or F, got {verdict!r}")
        if len(rows) == num_tests:
            raise CoverageParseError(line_no, f"more than the {num_tests} declared test rows")
        rows.append([c == "1" for c in bits])
        verdicts.append(Verdict(verdict))

    if header is None:
        raise CoverageParseError(max(last_line, 1), "missing header")
    if len(rows) != header[1]:
        raise CoverageParseError(
            last_line or header_line, f"expected {header[1]} test rows, found {len(rows)}")

    covers = np.array(rows, dtype=bool).T
    return CoverageRecord(covers, tuple(verdicts))


def load_coverage(path):
    with open(path, "rb") as file:
        return parse_coverage(file.read())


def format_coverage(cov):
    lines = [f"statements={cov.num_statements} tests={cov.num_tests}"]
    for test_id in range(cov.num_tests):
        bits = "".join("1" if b else "0" for b in cov.covers[:, test_id])
        lines.append(f"{bits} {cov.verdicts[test_id].value}")
    return "\n".join(lines) + "\n"


def compute_spectrum(cov, sel):
    """Spectrum counts of every statement over the tests in sel."""
    sel.validate(cov)
    failed = list(sel.failed_ids)
    passed = list(sel.passed_ids)

    n_cf = cov.covers[:, failed].sum(axis=1) if failed else np.zeros(cov.num_statements, dtype=int)
    n_cs = cov.covers[:, passed].sum(axis=1) if passed else np.zeros(cov.num_statements, dtype=int)
    n_f, n_s = len(failed), len(passed)
    return Spectrum(n_cf=n_cf, n_uf=n_f - n_cf, n_cs=n_cs, n_us=n_s - n_cs, n_f=n_f, n_s=n_s)


def coverage_from_paths(paths: Iterable[Iterable[bool]], verdicts):
    """Build a record from per-test execution paths (rows are tests)."""
    rows = np.array([list(p) for p in paths], dtype=bool)
    if rows.size == 0:
        raise DomainError("no execution paths given")
    return CoverageRecord(rows.T, tuple(verdicts))
