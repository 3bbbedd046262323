"""CNF formulas: DIMACS parsing/serialization, evaluation, and exhaustive model counting.

Variables are 0-based internally (x_0 .. x_{n-1}) and 1-based in DIMACS.
An assignment is also handled as an integer u whose bit i is the value of x_i.
"""
import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from services.config import BoostConfig
from services.errors import CapacityError, DimacsParseError
from utils.logging import log_structured


@dataclass(frozen=True)
class Literal:
    var: int
    negated: bool = False

    def to_dimacs(self):
        return -(self.var + 1) if self.negated else self.var + 1

    @classmethod
    def from_dimacs(cls, code):
        return cls(abs(code) - 1, code < 0)

    def satisfied_by(self, bits):
        return bool(bits[self.var]) != self.negated


@dataclass(frozen=True)
class Clause:
    literals: Tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ValueError('a clause needs at least one literal')

    def __len__(self):
        return len(self.literals)

    def satisfied_by(self, bits):
        return any(lit.satisfied_by(bits) for lit in self.literals)


@dataclass(frozen=True)
class CnfFormula:
    n: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"variable count must be nonnegative (got {self.n})")
        if not self.clauses:
            raise ValueError('a formula needs at least one clause')
        for j, clause in enumerate(self.clauses):
            for lit in clause.literals:
                if not 0 <= lit.var < self.n:
                    raise ValueError(f"clause {j} references x{lit.var}, outside [0, {self.n})")

    @property
    def m(self):
        return len(self.clauses)

    @property
    def literal_count(self):
        return sum(len(c) for c in self.clauses)

    @classmethod
    def from_lists(cls, n, clauses: Iterable[Sequence[int]]):
        """Build from 1-based signed DIMACS-style clause lists."""
        return cls(n, tuple(Clause(tuple(Literal.from_dimacs(code) for code in c)) for c in clauses))


@dataclass(frozen=True)
class Assignment:
    bits: Tuple[int, ...]

    @classmethod
    def from_int(cls, u, n):
        return cls(tuple((u >> i) & 1 for i in range(n)))

    def to_int(self):
        return sum(bit << i for i, bit in enumerate(self.bits))

    def __len__(self):
        return len(self.bits)


@dataclass(frozen=True)
class ModelCount:
    k_s: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k_s <= 2 ** self.n:
            raise ValueError(f"model count {self.k_s} outside [0, 2^{self.n}]")


# =================== DIMACS ===================

def parse_dimacs(text: Union[bytes, str]) -> CnfFormula:
    if isinstance(text, bytes):
        try:
            text = text.decode('ascii')
        except UnicodeDecodeError as e:
            raise DimacsParseError(f"input is not ASCII text: {e}")

    header = None
    clauses = []
    current = []
    current_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('c'):
            continue
        if line.startswith('%'):
            # SATLIB end-of-data marker
            break
        if line.startswith('p'):
            if header is not None:
                raise DimacsParseError('duplicate problem header', lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != 'cnf':
                raise DimacsParseError(f"malformed header {line!r}, expected 'p cnf <n> <m>'", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsParseError(f"non-integer header fields in {line!r}", lineno)
            if n < 0 or m < 1:
                raise DimacsParseError(f"header needs n >= 0 and m >= 1 (got n={n}, m={m})", lineno)
            header = (n, m)
            continue
        if header is None:
            raise DimacsParseError('clause data before the problem header', lineno)
        n = header[0]
        for tok in line.split():
            try:
                code = int(tok)
            except ValueError:
                raise DimacsParseError(f"not an integer literal: {tok!r}", lineno)
            if code == 0:
                if not current:
                    raise DimacsParseError('empty clause', lineno)
                clauses.append(_dedup(current))
                current = []
                continue
            if abs(code) > n:
                raise DimacsParseError(f"variable index {abs(code)} exceeds n={n}", lineno)
            if not current:
                current_line = lineno
            current.append(code)

    if header is None:
        raise DimacsParseError('missing problem header')
    if current:
        raise DimacsParseError('final clause is not terminated by 0', current_line)
    n, m = header
    if len(clauses) != m:
        raise DimacsParseError(f"header declares {m} clauses but {len(clauses)} were found")
    return CnfFormula.from_lists(n, clauses)


def _dedup(codes):
    # x and ~x may both stay; only exact repeats go
    return list(dict.fromkeys(codes))


def serialize_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    for clause in f.clauses:
        lines.append(' '.join(str(lit.to_dimacs()) for lit in clause.literals) + ' 0')
    return '\n'.join(lines) + '\n'


def fingerprint(f: CnfFormula) -> str:
    return hashlib.sha256(serialize_dimacs(f).encode()).hexdigest()[:16]


# =================== EVALUATION ===================

def evaluate(f: CnfFormula, a: Assignment) -> bool:
    if len(a) != f.n:
        raise ValueError(f"assignment has {len(a)} bits, formula has {f.n} variables")
    return all(clause.satisfied_by(a.bits) for clause in f.clauses)


def satisfied_mask(f: CnfFormula, assignments: np.ndarray) -> np.ndarray:
    """Vectorized evaluate over integer-encoded assignments (bit i = x_i)."""
    u = np.asarray(assignments, dtype=np.uint64)
    result = np.ones(u.shape, dtype=bool)
    for clause in f.clauses:
        sat = np.zeros(u.shape, dtype=bool)
        for lit in clause.literals:
            bit = ((u >> np.uint64(lit.var)) & np.uint64(1)).astype(bool)
            sat |= ~bit if lit.negated else bit
        result &= sat
        if not result.any():
            break
    return result


def satisfying_table(f: CnfFormula) -> np.ndarray:
    """[evaluate(f, u)] for every u in [0, 2^n), as a bool array."""
    if f.n > BoostConfig.SAMPLER_TABLE_MAX_VARS:
        raise CapacityError(f"truth table needs n <= {BoostConfig.SAMPLER_TABLE_MAX_VARS} (got n={f.n})")
    return satisfied_mask(f, np.arange(2 ** f.n, dtype=np.uint64))


def count_models(f: CnfFormula, cap=None, workers=1) -> ModelCount:
    cap = BoostConfig.ENUM_CAP_DEFAULT if cap is None else cap
    if f.n > cap:
        raise CapacityError(f"count_models enumerates 2^n assignments; n={f.n} exceeds the cap of {cap}")
    total = 2 ** f.n
    chunk = BoostConfig.ENUM_CHUNK
    bounds = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]

    def count_chunk(span):
        lo, hi = span
        return int(np.count_nonzero(satisfied_mask(f, np.arange(lo, hi, dtype=np.uint64))))

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            k_s = sum(pool.map(count_chunk, bounds))
    else:
        k_s = sum(count_chunk(span) for span in bounds)
    log_structured('DEBUG', 'Models counted', n=f.n, m=f.m, k_s=k_s, chunks=len(bounds))
    return ModelCount(k_s, f.n)


def random_kcnf(n: int, m: int, rng: np.random.Generator, k: int = 3) -> CnfFormula:
    """m clauses of min(k, n) distinct variables each, signs fair."""
    if n < 1 or m < 1:
        raise ValueError(f"random formula needs n >= 1 and m >= 1 (got n={n}, m={m})")
    width = min(k, n)
    clauses = []
    for _ in range(m):
        chosen = rng.choice(n, size=width, replace=False)
        signs = rng.integers(0, 2, size=width)
        clauses.append([int(v + 1) * (-1 if s else 1) for v, s in zip(chosen, signs)])
    return CnfFormula.from_lists(n, clauses)
