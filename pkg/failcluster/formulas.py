"""
Risk evaluation formulas (REFs), their equivalence groups, and ranking lists.

Every formula is total: 0/0 evaluates to 0 and x/0 to +inf (or -inf for a
negative numerator), so no score is ever NaN.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from failcluster.errors import DomainError

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12


class RefId(str, Enum):
    NAISH1 = "Naish1"
    NAISH2 = "Naish2"
    JACCARD = "Jaccard"
    ANDERBERG = "Anderberg"
    SORENSEN_DICE = "SorensenDice"
    DICE = "Dice"
    GOODMAN = "Goodman"
    TARANTULA = "Tarantula"
    QE = "Qe"
    CBI_INC = "CbiInc"
    WONG2 = "Wong2"
    HAMANN = "Hamann"
    SIMPLE_MATCHING = "SimpleMatching"
    SOKAL = "Sokal"
    ROGERS_TANIMOTO = "RogersTanimoto"
    HAMMING_ETC = "HammingEtc"
    EUCLID = "Euclid"
    WONG1 = "Wong1"
    RUSSEL_RAO = "RusselRao"
    BINARY = "Binary"
    SCOTT = "Scott"
    ROGOT1 = "Rogot1"
    KULCZYNSKI2 = "Kulczynski2"
    OCHIAI = "Ochiai"
    M2 = "M2"
    AMPLE2 = "Ample2"
    WONG3 = "Wong3"
    ARITHMETIC_MEAN = "ArithmeticMean"
    COHEN = "Cohen"
    FLEISS = "Fleiss"
    CROSSTAB = "Crosstab"
    DSTAR = "DStar"
    GP02 = "GP02"
    GP03 = "GP03"
    GP19 = "GP19"

    @classmethod
    def parse(cls, text):
        """Look up a formula by name ignoring case, spaces and punctuation."""
        key = _normalise(text)
        for ref in cls:
            if _normalise(ref.value) == key:
                return ref
        raise DomainError(f"unknown risk evaluation formula {text!r}")


def _normalise(text):
    return re.sub(r"[^0-9a-z]", "", str(text).lower())


@dataclass(frozen=True)
class RefGroup:
    group_id: int
    members: Tuple[RefId, ...]
    representative: RefId

    @property
    def name(self):
        return f"Group{self.group_id}"


R = RefId
GROUPS = (
    RefGroup(1, (R.NAISH2,), R.NAISH2),
    RefGroup(2, (R.JACCARD, R.ANDERBERG, R.SORENSEN_DICE, R.DICE, R.GOODMAN, R.M2, R.NAISH1,
                 R.DSTAR), R.JACCARD),
    RefGroup(3, (R.TARANTULA, R.QE, R.CBI_INC, R.KULCZYNSKI2, R.OCHIAI), R.TARANTULA),
    RefGroup(4, (R.WONG2, R.HAMANN, R.SIMPLE_MATCHING, R.SOKAL, R.ROGERS_TANIMOTO,
                 R.HAMMING_ETC, R.EUCLID), R.WONG2),
    RefGroup(5, (R.WONG1, R.BINARY, R.RUSSEL_RAO), R.WONG1),
    RefGroup(6, (R.SCOTT, R.ROGOT1), R.SCOTT),
    RefGroup(7, (R.AMPLE2, R.ARITHMETIC_MEAN, R.COHEN, R.CROSSTAB), R.AMPLE2),
    RefGroup(8, (R.WONG3,), R.WONG3),
    RefGroup(9, (R.FLEISS,), R.FLEISS),
    RefGroup(10, (R.GP02,), R.GP02),
    RefGroup(11, (R.GP03,), R.GP03),
    RefGroup(12, (R.GP19,), R.GP19),
)
del R

_GROUP_OF = {ref: group for group in GROUPS for ref in group.members}


def group_of(ref):
    return _GROUP_OF[RefId(ref)]


def representatives():
    return tuple(group.representative for group in GROUPS)


def resolve_refs(text):
    """Resolve a comma separated list of formula names, GroupN names or 'all-groups'."""
    refs = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        key = _normalise(part)
        if key == "allgroups":
            refs.extend(representatives())
        elif key == "all":
            refs.extend(RefId)
        elif re.fullmatch(r"group\d+", key):
            group_id = int(key[5:])
            if not 1 <= group_id <= len(GROUPS):
                raise DomainError(f"unknown formula group {part!r}")
            refs.append(GROUPS[group_id - 1].representative)
        else:
            refs.append(RefId.parse(part))
    if not refs:
        raise DomainError("no risk evaluation formula selected")
    # keep first occurrence order
    return tuple(dict.fromkeys(refs))


def _div(num, den):
    num, den = np.broadcast_arrays(np.asarray(num, dtype=float), np.asarray(den, dtype=float))
    out = np.zeros(num.shape, dtype=float)
    nonzero = den != 0
    np.divide(num, den, out=out, where=nonzero)
    out[~nonzero & (num > 0)] = np.inf
    out[~nonzero & (num < 0)] = -np.inf
    return out


class _Counts:
    """Float views of a Spectrum, suite totals broadcast per statement."""

    def __init__(self, spectrum):
        self.cf = spectrum.n_cf.astype(float)
        self.uf = spectrum.n_uf.astype(float)
        self.cs = spectrum.n_cs.astype(float)
        self.us = spectrum.n_us.astype(float)
        self.nc = self.cf + self.cs
        self.nu = self.uf + self.us
        ones = np.ones_like(self.cf)
        self.nf = ones * spectrum.n_f
        self.ns = ones * spectrum.n_s
        self.n = ones * spectrum.n


def _naish1(c):
    return np.where(c.cf < c.nf, -1.0, c.ns - c.cs)


def _tarantula(c):
    fail_ratio = _div(c.cf, c.nf)
    pass_ratio = _div(c.cs, c.ns)
    return _div(fail_ratio, fail_ratio + pass_ratio)


def _wong3(c):
    h = np.where(c.cs <= 2, c.cs,
                 np.where(c.cs <= 10, 2 + 0.1 * (c.cs - 2), 2.8 + 0.001 * (c.cs - 10)))
    return c.cf - h


def _crosstab(c):
    observed = (c.cf, c.cs, c.uf, c.us)
    expected = (c.nc * c.nf / np.where(c.n == 0, 1, c.n),
                c.nc * c.ns / np.where(c.n == 0, 1, c.n),
                c.nu * c.nf / np.where(c.n == 0, 1, c.n),
                c.nu * c.ns / np.where(c.n == 0, 1, c.n))
    chi_square = sum(_div((o - e) ** 2, e) for o, e in zip(observed, expected))
    phi = _div(c.cf, c.nf) - _div(c.cs, c.ns)
    return np.where(phi > 0, chi_square, np.where(phi < 0, -chi_square, 0.0))


_FORMULAS = {
    RefId.NAISH1: _naish1,
    RefId.NAISH2: lambda c: c.cf - _div(c.cs, c.ns + 1),
    RefId.JACCARD: lambda c: _div(c.cf, c.nf + c.cs),
    RefId.ANDERBERG: lambda c: _div(c.cf, c.cf + 2 * (c.uf + c.cs)),
    RefId.SORENSEN_DICE: lambda c: _div(2 * c.cf, 2 * c.cf + c.uf + c.cs),
    RefId.DICE: lambda c: _div(2 * c.cf, c.nf + c.cs),
    RefId.GOODMAN: lambda c: _div(2 * c.cf - c.uf - c.cs, 2 * c.cf + c.uf + c.cs),
    RefId.TARANTULA: _tarantula,
    RefId.QE: lambda c: _div(c.cf, c.nc),
    RefId.CBI_INC: lambda c: _div(c.cf, c.nc) - _div(c.nf, c.n),
    RefId.WONG2: lambda c: c.cf - c.cs,
    RefId.HAMANN: lambda c: _div(c.cf + c.us - c.uf - c.cs, c.n),
    RefId.SIMPLE_MATCHING: lambda c: _div(c.cf + c.us, c.n),
    RefId.SOKAL: lambda c: _div(2 * (c.cf + c.us), 2 * (c.cf + c.us) + c.uf + c.cs),
    RefId.ROGERS_TANIMOTO: lambda c: _div(c.cf + c.us, c.cf + c.us + 2 * (c.uf + c.cs)),
    RefId.HAMMING_ETC: lambda c: c.cf + c.us,
    RefId.EUCLID: lambda c: np.sqrt(c.cf + c.us),
    RefId.WONG1: lambda c: c.cf.copy(),
    RefId.RUSSEL_RAO: lambda c: _div(c.cf, c.n),
    RefId.BINARY: lambda c: np.where(c.cf < c.nf, 0.0, 1.0),
    RefId.SCOTT: lambda c: _div(4 * c.cf * c.us - 4 * c.uf * c.cs - (c.uf - c.cs) ** 2,
                                (2 * c.cf + c.uf + c.cs) * (2 * c.us + c.uf + c.cs)),
    RefId.ROGOT1: lambda c: 0.5 * (_div(c.cf, 2 * c.cf + c.uf + c.cs)
                                   + _div(c.us, 2 * c.us + c.uf + c.cs)),
    RefId.KULCZYNSKI2: lambda c: 0.5 * (_div(c.cf, c.nf) + _div(c.cf, c.nc)),
    RefId.OCHIAI: lambda c: _div(c.cf, np.sqrt(c.nf * c.nc)),
    RefId.M2: lambda c: _div(c.cf, c.cf + c.us + 2 * (c.uf + c.cs)),
    RefId.AMPLE2: lambda c: _div(c.cf, c.nf) - _div(c.cs, c.ns),
    RefId.WONG3: _wong3,
    RefId.ARITHMETIC_MEAN: lambda c: _div(2 * c.cf * c.us - 2 * c.uf * c.cs,
                                          c.nc * c.nu + c.nf * c.ns),
    RefId.COHEN: lambda c: _div(2 * c.cf * c.us - 2 * c.uf * c.cs, c.nc * c.ns + c.nf * c.nu),
    RefId.FLEISS: lambda c: _div(4 * c.cf * c.us - 4 * c.uf * c.cs - (c.uf - c.cs) ** 2,
                                 (2 * c.cf + c.uf + c.cs) + (2 * c.us + c.uf + c.cs)),
    RefId.CROSSTAB: _crosstab,
    # exponent fixed at 2
    RefId.DSTAR: lambda c: _div(c.cf ** 2, c.uf + c.cs),
    RefId.GP02: lambda c: 2 * (c.cf + np.sqrt(c.us)) + np.sqrt(c.cs),
    RefId.GP03: lambda c: np.sqrt(np.abs(c.cf ** 2 - np.sqrt(c.cs))),
    RefId.GP19: lambda c: c.cf * np.sqrt(np.abs(c.cs - c.cf + c.uf - c.us)),
}


def suspiciousness(ref, spectrum):
    """Score every statement of a spectrum with one formula."""
    scores = np.asarray(_FORMULAS[RefId(ref)](_Counts(spectrum)), dtype=float)
    if np.isnan(scores).any():
        raise DomainError(f"{RefId(ref).value} produced NaN on a spectrum")
    scores.setflags(write=False)
    return scores


@dataclass(frozen=True)
class RankingList:
    """1-based tie-collapsed position of every statement."""
    positions: Tuple[int, ...]

    def __len__(self):
        return len(self.positions)

    def as_array(self):
        return np.asarray(self.positions, dtype=np.int64)


def _tied(a, b):
    return a == b or abs(a - b) <= TIE_TOLERANCE


def rank(scores):
    """Rank statements by descending score; a tie takes the position where it begins."""
    scores = np.asarray(scores, dtype=float)
    order = np.argsort(-scores, kind="stable")
    positions = np.zeros(len(scores), dtype=np.int64)
    run_start = 1
    for position, statement in enumerate(order):
        if position > 0 and not _tied(scores[statement], scores[order[position - 1]]):
            run_start = position + 1
        positions[statement] = run_start
    return RankingList(tuple(int(p) for p in positions))
