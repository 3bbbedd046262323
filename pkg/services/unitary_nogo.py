"""UB(N) single steps D_{k+1} = L(U . D_k (x) H) and the monotonicity they cannot escape.

State layout: kron(D_k, H), data bit most significant, so index i = b * 2^h + j.
Probabilities are squared magnitudes: d_k = P(D_k = 0) = |a0|^2.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag, qr

from services.config import BoostConfig
from services.errors import ConfigError, InstanceError
from services.performance_monitor import PerformanceMonitor
from utils.logging import log_structured

PHASE_CHECKS = 20


def _complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _encode_complex(values):
    return [[float(z.real), float(z.imag)] for z in np.ravel(values)]


@dataclass(frozen=True)
class QubitState:
    a0: complex
    a1: complex

    def __post_init__(self):
        norm = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm - 1.0) > BoostConfig.NORM_TOL:
            raise InstanceError(f"qubit amplitudes must have unit norm (got {norm!r})")

    @property
    def p0(self):
        return abs(self.a0) ** 2

    @property
    def vector(self):
        return np.array([self.a0, self.a1], dtype=complex)

    @classmethod
    def zero(cls, phase=0.0):
        return cls(complex(np.exp(1j * phase)), 0j)

    @classmethod
    def one(cls):
        return cls(0j, 1 + 0j)

    @classmethod
    def random(cls, rng):
        v = _complex_gaussian(rng, 2)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))


@dataclass(frozen=True, eq=False)
class HiddenRegister:
    h: int
    H: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.H, dtype=complex)
        if vec.shape != (2 ** self.h,):
            raise InstanceError(f"hidden register for h={self.h} needs {2 ** self.h} amplitudes (got {vec.shape})")
        norm = np.linalg.norm(vec)
        if norm < 1e-8:
            raise InstanceError('degenerate hidden register: norm is ~0')
        if abs(norm - 1.0) > BoostConfig.NORM_TOL:
            raise InstanceError(f"hidden register must be a unit vector (norm {norm!r})")
        object.__setattr__(self, 'H', vec)

    @classmethod
    def random(cls, h, rng):
        v = _complex_gaussian(rng, 2 ** h)
        return cls(h, v / np.linalg.norm(v))

    @classmethod
    def basis(cls, h, j=0):
        v = np.zeros(2 ** h, dtype=complex)
        v[j] = 1.0
        return cls(h, v)


@dataclass(frozen=True, eq=False)
class LogicFunction:
    """Truth table over the h+1 input bits (index = b * 2^h + j)."""
    h: int
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=bool)
        if table.shape != (2 ** (self.h + 1),):
            raise InstanceError(f"logic function for h={self.h} needs {2 ** (self.h + 1)} entries")
        object.__setattr__(self, 'table', table)

    @property
    def T_L(self):
        return np.flatnonzero(self.table)

    @property
    def F_L(self):
        return np.flatnonzero(~self.table)

    @classmethod
    def data_bit(cls, h):
        """Output = the data qubit's bit."""
        return cls(h, np.arange(2 ** (h + 1)) >= 2 ** h)

    @classmethod
    def constant(cls, h, value):
        return cls(h, np.full(2 ** (h + 1), bool(value)))

    @classmethod
    def random(cls, h, rng):
        """Uniform over tables with both T_L and F_L nonempty."""
        while True:
            table = rng.integers(0, 2, size=2 ** (h + 1)).astype(bool)
            if table.any() and not table.all():
                return cls(h, table)


def build_basis_matrix(H: HiddenRegister) -> np.ndarray:
    """X = diag(R, R) with R's rows an orthonormal basis starting at conj(H).

    X . (a H ; b H) = a e_0 + b e_{2^h}.
    """
    h0 = np.conj(H.H)
    if np.linalg.norm(h0) < 1e-8:
        raise InstanceError('degenerate hidden register: norm is ~0')
    dim = h0.shape[0]
    rows = []
    for candidate in [h0] + [np.eye(dim, dtype=complex)[j] for j in range(dim)]:
        v = candidate.astype(complex)
        # two passes of modified Gram-Schmidt
        for _ in range(2):
            for q in rows:
                v = v - np.vdot(q, v) * q
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            rows.append(v / norm)
        if len(rows) == dim:
            break
    R = np.array(rows)
    return block_diag(R, R)


def _complete_unitary(col0, rng):
    """Haar-style unitary whose first column is exactly col0 (a unit vector)."""
    dim = col0.shape[0]
    z = _complex_gaussian(rng, (dim, dim))
    z[:, 0] = col0
    q, r = qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


@dataclass(frozen=True, eq=False)
class UnitaryBoostInstance:
    h: int
    H: HiddenRegister
    L: LogicFunction
    U: np.ndarray
    X: np.ndarray = field(init=False)
    A: np.ndarray = field(init=False)

    def __post_init__(self):
        dim = 2 ** (self.h + 1)
        U = np.asarray(self.U, dtype=complex)
        if U.shape != (dim, dim):
            raise InstanceError(f"U must be {dim}x{dim} for h={self.h} (got {U.shape})")
        if self.H.h != self.h or self.L.h != self.h:
            raise InstanceError('hidden register, logic function and instance disagree on h')
        if self.unitarity_error_of(U) > BoostConfig.ALGEBRA_TOL:
            raise InstanceError(f"U is not unitary (error {self.unitarity_error_of(U):.3e})")
        X = build_basis_matrix(self.H)
        object.__setattr__(self, 'U', U)
        object.__setattr__(self, 'X', X)
        # X is unitary, so X^-1 = X^dagger
        object.__setattr__(self, 'A', U @ X.conj().T)

    @staticmethod
    def unitarity_error_of(M):
        return float(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[0]))))

    @property
    def unitarity_error(self):
        return self.unitarity_error_of(self.U)

    @property
    def mfp_mass(self):
        """sum over F_L of |A_{i,0}|^2; equals 1 exactly when [1,0] is a magnitude fixed point."""
        return float(np.sum(np.abs(self.A[self.L.F_L, 0]) ** 2))

    @property
    def is_mfp(self):
        return abs(self.mfp_mass - 1.0) <= BoostConfig.ALGEBRA_TOL

    def to_dict(self):
        return {
            'h': self.h,
            'H': _encode_complex(self.H.H),
            'L_table': [int(x) for x in self.L.table],
            'U': [_encode_complex(row) for row in self.U],
            'mfp_mass': self.mfp_mass,
        }


def make_mfp_instance(h: int, L: LogicFunction, rng, H: Optional[HiddenRegister] = None) -> UnitaryBoostInstance:
    """Column 0 of A lives on F_L, so [1,0] is carried to output 0 with certainty."""
    F = L.F_L
    if F.size == 0:
        raise InstanceError('L is constant true: no transformation keeps d = 1 at [1,0]')
    H = H or HiddenRegister.random(h, rng)
    col0 = np.zeros(2 ** (h + 1), dtype=complex)
    v = _complex_gaussian(rng, F.size)
    col0[F] = v / np.linalg.norm(v)
    A = _complete_unitary(col0, rng)
    return UnitaryBoostInstance(h, H, L, A @ build_basis_matrix(H))


def make_control_instance(h: int, L: LogicFunction, rng, H: Optional[HiddenRegister] = None) -> UnitaryBoostInstance:
    """Same construction without the support constraint: column 0 of A spreads over T_L too."""
    if L.T_L.size == 0:
        raise InstanceError('L is constant false: every instance keeps d = 1')
    H = H or HiddenRegister.random(h, rng)
    v = _complex_gaussian(rng, 2 ** (h + 1))
    A = _complete_unitary(v / np.linalg.norm(v), rng)
    return UnitaryBoostInstance(h, H, L, A @ build_basis_matrix(H))


def identity_instance(h: int, H: Optional[HiddenRegister] = None) -> UnitaryBoostInstance:
    H = H or HiddenRegister.basis(h)
    return UnitaryBoostInstance(h, H, LogicFunction.data_bit(h), np.eye(2 ** (h + 1), dtype=complex))


def apply_step(inst: UnitaryBoostInstance, D_k: QubitState):
    """(d_{k+1}, {'p0', 'p1'}) for one L(U . D_k (x) H) step."""
    state = np.kron(D_k.vector, inst.H.H)
    if state.shape[0] != inst.U.shape[0]:
        raise InstanceError(f"state of size {state.shape[0]} does not fit U of size {inst.U.shape[0]}")
    probs = np.abs(inst.U @ state) ** 2
    d_next = float(np.sum(probs[inst.L.F_L]))
    return d_next, {'p0': d_next, 'p1': float(np.sum(probs[inst.L.T_L]))}


def decompose_step(inst: UnitaryBoostInstance, D_k: QubitState) -> dict:
    """Direct d_{k+1} next to the two-column decomposition a A_0 + b A_{2^h} and its cross term Y."""
    F = inst.L.F_L
    col0 = inst.A[F, 0]
    col1 = inst.A[F, 2 ** inst.h]
    a, b = D_k.a0, D_k.a1
    s0 = float(np.sum(np.abs(col0) ** 2))
    s1 = float(np.sum(np.abs(col1) ** 2))
    Y = np.conj(a) * b * np.vdot(col0, col1)
    closed = abs(a) ** 2 * s0 + abs(b) ** 2 * s1 + 2.0 * float(Y.real)
    direct, _ = apply_step(inst, D_k)
    return {'direct': direct, 'closed_form': closed, 'reduced_form': abs(a) ** 2 + abs(b) ** 2 * s1,
            'Y': complex(Y), 'abs_Y': float(abs(Y))}


def phase_closure_error(inst: UnitaryBoostInstance, thetas: Sequence[float]) -> float:
    """max over theta of |1 - P(output 0)| for input [e^{i theta}, 0]."""
    worst = 0.0
    for theta in thetas:
        d_next, _ = apply_step(inst, QubitState.zero(theta))
        worst = max(worst, abs(1.0 - d_next))
    return worst


# =================== SWEEP ===================

@dataclass
class NogoReport:
    trials: int
    h_values: list
    min_slack: float = math.inf
    max_abs_Y: float = 0.0
    max_closed_form_gap: float = 0.0
    max_unitarity_error: float = 0.0
    max_mfp_defect: float = 0.0
    max_phase_error: float = 0.0
    violations: int = 0
    control_trials: int = 0
    control_group_violations: int = 0
    violating_instance: Optional[dict] = None

    @property
    def holds(self):
        return self.violations == 0

    def to_dict(self):
        return {
            'trials': self.trials,
            'h_values': list(self.h_values),
            'min_slack': self.min_slack,
            'max_abs_Y': self.max_abs_Y,
            'max_closed_form_gap': self.max_closed_form_gap,
            'max_unitarity_error': self.max_unitarity_error,
            'max_mfp_defect': self.max_mfp_defect,
            'max_phase_error': self.max_phase_error,
            'violations': self.violations,
            'control_trials': self.control_trials,
            'control_group_violations': self.control_group_violations,
            'violating_instance': self.violating_instance,
            'holds': self.holds,
        }


def _trial_rng(seed, h, trial, group=0):
    # counter words: [0, trial, h, group]
    counter = (group << 192) | (h << 128) | (trial << 64)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def _mfp_trial(h, seed, trial, slack):
    rng = _trial_rng(seed, h, trial)
    inst = make_mfp_instance(h, LogicFunction.random(h, rng), rng)
    D = QubitState.random(rng)
    parts = decompose_step(inst, D)
    fixed_point, _ = apply_step(inst, QubitState.zero())
    step_slack = min(parts['direct'] - D.p0, fixed_point - 1.0)
    return {
        'slack': step_slack,
        'violated': step_slack < -slack,
        'abs_Y': parts['abs_Y'],
        'gap': max(abs(parts['direct'] - parts['closed_form']), abs(parts['direct'] - parts['reduced_form'])),
        'unitarity': inst.unitarity_error,
        'mfp_defect': abs(inst.mfp_mass - 1.0),
        'phase': phase_closure_error(inst, rng.uniform(0.0, 2 * math.pi, PHASE_CHECKS)),
    }


def _control_trial(h, seed, trial, slack):
    rng = _trial_rng(seed, h, trial, group=1)
    inst = make_control_instance(h, LogicFunction.random(h, rng), rng)
    worst = None
    for D in (QubitState.random(rng), QubitState.zero()):
        d_next, _ = apply_step(inst, D)
        if d_next < D.p0 - slack and worst is None:
            worst = {'instance': inst.to_dict(), 'D_k': _encode_complex(D.vector), 'd_k': D.p0, 'd_next': d_next}
    return worst


def verify_monotone(h_values: Sequence[int], trials: int, seed: int = 0, control: bool = True,
                    slack: Optional[float] = None, workers: int = 1, run_id=None) -> NogoReport:
    """Random mfp instances per h: d_{k+1} >= d_k - slack on every one. Failures are counted, not raised."""
    slack = BoostConfig.MONOTONE_SLACK if slack is None else slack
    h_values = sorted(set(int(h) for h in h_values))
    for h in h_values:
        if not 0 <= h <= BoostConfig.H_CAP:
            raise ConfigError(f"h must lie in [0, {BoostConfig.H_CAP}] (got {h})")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1 (got {trials})")

    report = NogoReport(trials=trials, h_values=h_values)
    jobs = [(h, t) for h in h_values for t in range(trials)]
    with PerformanceMonitor.timed('verify_monotone'), ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda job: _mfp_trial(job[0], seed, job[1], slack), jobs))
        controls = list(pool.map(lambda job: _control_trial(job[0], seed, job[1], slack), jobs)) if control else []

    for r in results:
        report.min_slack = min(report.min_slack, r['slack'])
        report.max_abs_Y = max(report.max_abs_Y, r['abs_Y'])
        report.max_closed_form_gap = max(report.max_closed_form_gap, r['gap'])
        report.max_unitarity_error = max(report.max_unitarity_error, r['unitarity'])
        report.max_mfp_defect = max(report.max_mfp_defect, r['mfp_defect'])
        report.max_phase_error = max(report.max_phase_error, r['phase'])
        report.violations += int(r['violated'])
    report.control_trials = len(controls)
    for found in controls:
        if found is not None:
            report.control_group_violations += 1
            if report.violating_instance is None:
                report.violating_instance = found

    log_structured('INFO', 'No-go sweep finished', run_id, trials=trials, h_values=h_values,
                   violations=report.violations, control_group_violations=report.control_group_violations,
                   min_slack=report.min_slack, max_abs_Y=report.max_abs_Y)
    if report.violations:
        log_structured('ERROR', 'Monotonicity violated on mfp instances', run_id, violations=report.violations)
    return report
