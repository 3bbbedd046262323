"""LB(N) circuit construction: sources, literal NOTs, clause OR trees, the conjunction tree,
and N clone-and-OR boosting stages, with fan-in-K decomposition and Theorem 2 accounting.
"""
import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from services.cnf_core import Assignment, CnfFormula
from services.errors import ConfigError
from services.exact_boost import BoostParams
from utils.logging import log_structured


class GateKind(enum.Enum):
    SOURCE = 'SOURCE'
    NOT = 'NOT'
    AND = 'AND'
    OR = 'OR'
    CLONE = 'CLONE'


@dataclass(frozen=True)
class TreeGate:
    # refs < n_inputs are tree inputs; ref n_inputs + j is gate j
    inputs: Tuple[int, ...]
    layer: int


@dataclass(frozen=True)
class GateTree:
    kind: GateKind
    n_inputs: int
    fan_in: int
    gates: Tuple[TreeGate, ...]
    output: int
    depth: int

    @property
    def gate_count(self):
        return len(self.gates)

    def evaluate(self, values: Sequence[int]) -> int:
        if len(values) != self.n_inputs:
            raise ValueError(f"tree takes {self.n_inputs} inputs (got {len(values)})")
        wires = list(values)
        op = all if self.kind is GateKind.AND else any
        for gate in self.gates:
            wires.append(int(op(wires[r] for r in gate.inputs)))
        return int(wires[self.output])


def decompose_gate(M: int, K: int, kind: GateKind = GateKind.OR) -> GateTree:
    """M-ary AND/OR as ceil((M-1)/(K-1)) gates of at most K inputs, depth ceil(log_K M).

    The first gate absorbs the remainder (M-1) mod (K-1) so every later gate is full;
    gates are then filled K at a time, left to right, one layer after another, with
    leftovers passed to the next layer.
    """
    if K < 2:
        raise ConfigError(f"fan-in K must be >= 2 (got {K})")
    if M < 1:
        raise ConfigError(f"gate needs at least one input (got {M})")
    if kind not in (GateKind.AND, GateKind.OR):
        raise ConfigError(f"only AND/OR gates decompose (got {kind.value})")

    gates: List[TreeGate] = []
    # (ref, layer at which the wire is available)
    pending = [(i, 0) for i in range(M)]
    layer = 0
    remainder = (M - 1) % (K - 1)
    while len(pending) > 1:
        layer += 1
        nxt = []
        rest = pending
        if layer == 1 and remainder:
            head, rest = pending[:remainder + 1], pending[remainder + 1:]
            gates.append(TreeGate(tuple(r for r, _ in head), layer))
            nxt.append((M + len(gates) - 1, layer))
        full = len(rest) // K if len(rest) + len(nxt) > K else 0
        for g in range(full):
            group = rest[g * K:(g + 1) * K]
            gates.append(TreeGate(tuple(r for r, _ in group), layer))
            nxt.append((M + len(gates) - 1, layer))
        leftovers = rest[full * K:]
        if not nxt and len(leftovers) <= K:
            gates.append(TreeGate(tuple(r for r, _ in leftovers), layer))
            nxt.append((M + len(gates) - 1, layer))
            leftovers = []
        pending = nxt + leftovers
    output = pending[0][0]
    return GateTree(kind, M, K, tuple(gates), output, layer)


def gate_count_formula(M: int, K: int) -> int:
    return -(-(M - 1) // (K - 1)) if M > 1 else 0


def log_ceil(M: int, K: int) -> int:
    """ceil(log_K M) in integer arithmetic."""
    depth, reach = 0, 1
    while reach < M:
        reach *= K
        depth += 1
    return depth


# =================== CIRCUIT ===================

@dataclass(frozen=True)
class Node:
    id: int
    kind: GateKind
    inputs: Tuple[int, ...]
    label: str
    stage: str
    layer: int


@dataclass(frozen=True)
class BoostCircuit:
    nodes: Tuple[Node, ...]
    n: int
    m: int
    N: int
    K: int
    sources: Tuple[int, ...]
    clause_outputs: Tuple[int, ...]
    clause_depths: Tuple[int, ...]
    d0: int
    stages: Tuple[int, ...]  # D_1..D_N node ids
    output: int

    @property
    def depth(self):
        return max(node.layer for node in self.nodes)


class _Builder:
    def __init__(self, K):
        self.K = K
        self.nodes: List[Node] = []

    def add(self, kind, inputs, label, stage):
        layer = 1 + max((self.nodes[i].layer for i in inputs), default=-1)
        node = Node(len(self.nodes), kind, tuple(inputs), label, stage, layer)
        self.nodes.append(node)
        return node.id

    def tree(self, kind, wires, label, stage):
        """Instantiate decompose_gate over concrete wire ids; M=1 is a plain wire."""
        tree = decompose_gate(len(wires), self.K, kind)
        refs = list(wires)
        for j, gate in enumerate(tree.gates):
            gate_label = label if tree.n_inputs + j == tree.output else f"{label}.{j}"
            refs.append(self.add(kind, [refs[r] for r in gate.inputs], gate_label, stage))
        return refs[tree.output], tree


def build_lb_circuit(f: CnfFormula, p: BoostParams, run_id=None) -> BoostCircuit:
    if p.N < f.n:
        log_structured('WARN', 'Boosting level below variable count; Theorem 1 wants N >= n',
                       run_id, N=p.N, n=f.n)
    b = _Builder(p.K)

    # step 1
    sources = [b.add(GateKind.SOURCE, [], f"X{i}", 'sources') for i in range(f.n)]

    # step 2: one NOT per negated literal occurrence, one OR tree per clause
    clause_outputs, clause_depths = [], []
    for j, clause in enumerate(f.clauses):
        wires = []
        for lit in clause.literals:
            if lit.var >= f.n:
                raise ConfigError(f"clause {j} references x{lit.var} >= n={f.n}")
            if lit.negated:
                wires.append(b.add(GateKind.NOT, [sources[lit.var]], f"~X{lit.var}@C{j}", 'literals'))
            else:
                wires.append(sources[lit.var])
        out, tree = b.tree(GateKind.OR, wires, f"C{j}", 'clauses')
        clause_outputs.append(out)
        clause_depths.append(tree.depth)

    # step 3
    d0, _ = b.tree(GateKind.AND, clause_outputs, 'D0', 'conjunction')

    # step 4: D_v = D_{v-1} OR C(D_{v-1})
    stages = []
    prev = d0
    for v in range(1, p.N + 1):
        clone = b.add(GateKind.CLONE, [prev], f"C(D{v - 1})", 'boost')
        prev = b.add(GateKind.OR, [prev, clone], f"D{v}", 'boost')
        stages.append(prev)

    circuit = BoostCircuit(
        nodes=tuple(b.nodes), n=f.n, m=f.m, N=p.N, K=p.K,
        sources=tuple(sources), clause_outputs=tuple(clause_outputs),
        clause_depths=tuple(clause_depths), d0=d0, stages=tuple(stages), output=prev,
    )
    log_structured('DEBUG', 'LB circuit built', run_id, nodes=len(b.nodes), depth=circuit.depth)
    return circuit


def evaluate_circuit(c: BoostCircuit, a: Assignment) -> Dict[int, int]:
    """Deterministic semantics: CLONE is plain fan-out of its input's value."""
    if len(a) != c.n:
        raise ValueError(f"assignment has {len(a)} bits, circuit has {c.n} sources")
    values: Dict[int, int] = {}
    for node in c.nodes:
        if node.kind is GateKind.SOURCE:
            values[node.id] = int(a.bits[c.sources.index(node.id)])
        elif node.kind is GateKind.NOT:
            values[node.id] = 1 - values[node.inputs[0]]
        elif node.kind is GateKind.CLONE:
            values[node.id] = values[node.inputs[0]]
        elif node.kind is GateKind.AND:
            values[node.id] = int(all(values[i] for i in node.inputs))
        else:
            values[node.id] = int(any(values[i] for i in node.inputs))
    return values


# =================== RESOURCES ===================

@dataclass(frozen=True)
class ResourceReport:
    gate_count: Dict[str, int]
    depth: int
    depth_steps_2_3: int
    clause_or_depths: Tuple[int, ...]
    conjunction_gates: int
    boost_depth: int
    time_coefficients: Dict[str, int]
    time_model: float
    theorem2_bound: float
    theorem2_simplified: float
    params: Dict[str, int] = field(default_factory=dict)

    def to_dict(self):
        return {
            'params': dict(self.params),
            'gate_count': dict(self.gate_count),
            'depth': self.depth,
            'depth_steps_2_3': self.depth_steps_2_3,
            'clause_or_depths': list(self.clause_or_depths),
            'conjunction_gates': self.conjunction_gates,
            'boost_depth': self.boost_depth,
            'time_model': {
                'symbolic': (f"{self.time_coefficients['t_q']}*t_q + {self.time_coefficients['t_K']}*t_K"
                             f" + {self.time_coefficients['t_C']}*t_C"),
                'coefficients': dict(self.time_coefficients),
                'total': self.time_model,
            },
            'theorem2_bound': self.theorem2_bound,
            'theorem2_simplified': self.theorem2_simplified,
        }


def report_resources(c: BoostCircuit, t_q=1.0, t_K=1.0, t_C=1.0) -> ResourceReport:
    counts = {kind.value: 0 for kind in GateKind}
    for node in c.nodes:
        counts[node.kind.value] += 1
    conjunction_gates = sum(1 for node in c.nodes if node.stage == 'conjunction')
    depth23 = c.nodes[c.d0].layer
    # T_1 + T_2..T_3 + T_4
    coefficients = {'t_q': c.n, 't_K': depth23 + c.N, 't_C': c.N}
    total = t_q * c.n + t_K * depth23 + (t_K + t_C) * c.N
    log_n = log_ceil(max(c.n, 1), c.K)
    bound = t_q * c.n + t_K * c.m * log_n + (t_K + t_C) * c.N
    t = max(t_q, t_K, t_C)
    simplified = t * (c.N + c.m * log_n)
    return ResourceReport(
        gate_count=counts,
        depth=c.depth,
        depth_steps_2_3=depth23,
        clause_or_depths=c.clause_depths,
        conjunction_gates=conjunction_gates,
        boost_depth=c.nodes[c.output].layer - depth23,
        time_coefficients=coefficients,
        time_model=total,
        theorem2_bound=bound,
        theorem2_simplified=simplified,
        params={'n': c.n, 'm': c.m, 'N': c.N, 'K': c.K},
    )


def circuit_to_json(c: BoostCircuit, report: Optional[ResourceReport] = None):
    report = report or report_resources(c)
    return {
        'params': {'n': c.n, 'm': c.m, 'N': c.N, 'K': c.K},
        'nodes': [
            {'id': node.id, 'kind': node.kind.value, 'inputs': list(node.inputs),
             'label': node.label, 'stage': node.stage, 'layer': node.layer}
            for node in c.nodes
        ],
        'output': c.output,
        'resources': report.to_dict(),
    }
