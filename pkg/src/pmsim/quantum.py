"""Peres-Mermin square on two qubits, Lüders sequential measurements, and the
63 moment operators.

Basis order is |00>, |01>, |10>, |11> with the first tensor factor acting on
the first qubit and sigma_z = diag(1, -1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import IncompatibleSequence, InvalidState, ZeroProbabilityOutcome
from .exact import I, Matrix, imag_part, is_psd, mat_rank, real_part

LABELS = ("A", "B", "C", "a", "b", "c", "α", "β", "γ")
POSITION = {lab: (k // 3 + 1, k % 3 + 1) for k, lab in enumerate(LABELS)}
LABEL_AT = {pos: lab for lab, pos in POSITION.items()}

# ASCII spellings accepted on input (command line, files).
ALIASES = {"alpha": "α", "beta": "β", "gamma": "γ"}


def canonical_label(name: str) -> str:
    name = name.strip()
    name = ALIASES.get(name.lower(), name)
    if name not in POSITION:
        raise KeyError(f"unknown observable {name!r}")
    return name


ID2 = Matrix.identity(2)
SX = Matrix.from_rows([[0, 1], [1, 0]])
SY = Matrix.from_rows([[0, -I], [I, 0]])
SZ = Matrix.from_rows([[1, 0], [0, -1]])
ID4 = Matrix.identity(4)

_FACTORS = {
    "A": (SZ, ID2), "B": (ID2, SZ), "C": (SZ, SZ),
    "a": (ID2, SX), "b": (SX, ID2), "c": (SX, SX),
    "α": (SZ, SX), "β": (SX, SZ), "γ": (SY, SY),
}


@lru_cache(maxsize=None)
def build_square() -> dict:
    """The nine two-qubit observables keyed by label."""
    ops = {lab: f0.kron(f1) for lab, (f0, f1) in _FACTORS.items()}
    for lab, op in ops.items():
        assert op.is_hermitian(), lab
        assert op @ op == ID4, lab
    return ops


def observable(label: str) -> Matrix:
    return build_square()[canonical_label(label)]


@dataclass(frozen=True)
class Context:
    name: str
    members: tuple
    sign: int


@lru_cache(maxsize=None)
def contexts() -> tuple:
    """Rows R1..R3 then columns C1..C3; only the third column has sign -1."""
    out = []
    for r in range(1, 4):
        out.append(Context(f"R{r}", tuple(LABEL_AT[r, c] for c in range(1, 4)), 1))
    for c in range(1, 4):
        out.append(Context(f"C{c}", tuple(LABEL_AT[r, c] for r in range(1, 4)),
                           -1 if c == 3 else 1))
    sq = build_square()
    for ctx in out:
        x, y, t = (sq[m] for m in ctx.members)
        assert x.commutes_with(y) and x.commutes_with(t) and y.commutes_with(t), ctx
        assert x @ y @ t == ID4.scale(ctx.sign), ctx
    return tuple(out)


def context_of(labels) -> Context:
    """The context containing every label in ``labels``.

    A sequence that repeats one observable only is assigned the first context
    (row) containing it.  Raises IncompatibleSequence otherwise.
    """
    labels = [canonical_label(x) for x in labels]
    distinct = list(dict.fromkeys(labels))
    for ctx in contexts():
        if all(x in ctx.members for x in distinct):
            return ctx
    for i, x in enumerate(distinct):
        for y in distinct[i + 1:]:
            if not any(x in c.members and y in c.members for c in contexts()):
                raise IncompatibleSequence(
                    f"observables {x} and {y} do not share a context", pair=(x, y))
    raise IncompatibleSequence(f"no single context contains {distinct}")


def projector(label: str, outcome: int) -> Matrix:
    """Pi_{x|X} = (1 + x X) / 2."""
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome}")
    return (ID4 + observable(label).scale(outcome)).scale(Fraction(1, 2))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumState:
    """Density matrix with Gaussian-rational entries.  Invariants are checked
    on construction; use :meth:`unchecked` for trusted intermediate values."""

    rho: Matrix

    def __post_init__(self):
        validate_density(self.rho)

    @classmethod
    def unchecked(cls, rho: Matrix) -> "QuantumState":
        obj = object.__new__(cls)
        object.__setattr__(obj, "rho", rho)
        return obj


def validate_density(rho: Matrix) -> None:
    if rho.shape != (4, 4):
        raise InvalidState("shape", f"expected 4x4, got {rho.rows}x{rho.cols}")
    if not rho.is_hermitian():
        raise InvalidState("hermitian", "rho differs from its conjugate transpose")
    if rho.trace() != 1:
        raise InvalidState("trace", f"trace is {rho.trace()}, expected 1")
    if not is_psd(rho):
        raise InvalidState("psd", "rho is not positive semidefinite")


def maximally_mixed() -> QuantumState:
    return QuantumState(ID4.scale(Fraction(1, 4)))


def singlet() -> QuantumState:
    """(|01> - |10>)/sqrt(2); the state with <C> = <c> = <γ> = -1."""
    h = Fraction(1, 2)
    return QuantumState(Matrix.from_rows([
        [0, 0, 0, 0],
        [0, h, -h, 0],
        [0, -h, h, 0],
        [0, 0, 0, 0],
    ]))


def basis_state(k: int) -> QuantumState:
    """Projector on the computational basis vector |k>, k in 0..3."""
    return QuantumState(Matrix.diag([1 if i == k else 0 for i in range(4)]))


def gram_state(g: Matrix) -> QuantumState:
    """G^dagger G normalized to unit trace."""
    m = g.dagger() @ g
    tr = m.trace()
    if tr == 0:
        raise InvalidState("trace", "Gram matrix of the zero matrix")
    return QuantumState(m.scale(1 / real_part(tr)))


def _expect(rho: Matrix, op: Matrix) -> Fraction:
    val = (rho @ op).trace()
    if imag_part(val) != 0:
        raise AssertionError(f"expectation value {val} is not real")
    return real_part(val)


def luders_update(state: QuantumState, label: str, outcome: int) -> QuantumState:
    """Post-measurement state Pi rho Pi / tr(rho Pi)."""
    pi = projector(label, outcome)
    p = _expect(state.rho, pi)
    if p == 0:
        raise ZeroProbabilityOutcome(
            f"outcome {outcome:+d} of {canonical_label(label)} has probability 0")
    return QuantumState.unchecked((pi @ state.rho @ pi).scale(1 / p))


def seq_prob(state: QuantumState, inputs, outputs) -> Fraction:
    """Probability of observing ``outputs`` for the measurement sequence
    ``inputs`` (all from one context).  Impossible strings give 0."""
    inputs = [canonical_label(x) for x in inputs]
    outputs = list(outputs)
    if len(inputs) != len(outputs):
        raise ValueError("inputs and outputs differ in length")
    if not inputs:
        return Fraction(1)
    context_of(inputs)
    prob = Fraction(1)
    cur = state
    for x, o in zip(inputs, outputs):
        pi = projector(x, o)
        p = _expect(cur.rho, pi)
        if p == 0:
            return Fraction(0)
        prob *= p
        cur = QuantumState.unchecked((pi @ cur.rho @ pi).scale(1 / p))
    return prob


def outcome_table(state: QuantumState, inputs) -> dict:
    """All 2^n outcome strings of ``inputs`` mapped to their probabilities."""
    inputs = [canonical_label(x) for x in inputs]
    context_of(inputs)
    return {outs: seq_prob(state, inputs, outs)
            for outs in product((1, -1), repeat=len(inputs))}


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentIndex:
    """One of the 63 moments.  ``kind`` is 'single', 'pair' or 'sandwich';
    ``j`` runs 1..63 in canonical order."""

    kind: str
    labels: tuple
    j: int

    def __str__(self):
        if self.kind == "single":
            return f"<{self.labels[0]}>"
        x, y = self.labels
        if self.kind == "pair":
            return f"<{x}{y}>"
        return f"<{x}{y}{x}>"


@lru_cache(maxsize=None)
def moment_indices() -> tuple:
    out = [MomentIndex("single", (lab,), k + 1) for k, lab in enumerate(LABELS)]
    for ctx in contexts():
        x, y, t = ctx.members
        for p in ((x, y), (x, t), (y, t)):
            out.append(MomentIndex("pair", p, len(out) + 1))
    for ctx in contexts():
        x, y, t = ctx.members
        for p in ((x, y), (x, t), (y, t)):
            out.append(MomentIndex("sandwich", p, len(out) + 1))
            out.append(MomentIndex("sandwich", p[::-1], len(out) + 1))
    assert len(out) == 63
    return tuple(out)


def moment_j(kind: str, *labels) -> int:
    """Canonical index of a moment; pair labels are unordered."""
    labels = tuple(canonical_label(x) for x in labels)
    for m in moment_indices():
        if m.kind != kind:
            continue
        if m.labels == labels or (kind == "pair" and m.labels == labels[::-1]):
            return m.j
    raise KeyError(f"no {kind} moment for {labels}")


@lru_cache(maxsize=None)
def z_catalog() -> dict:
    """Map j -> Hermitian operator Z_j with q_j = tr(rho Z_j)."""
    sq = build_square()
    cat = {}
    for m in moment_indices():
        if m.kind == "single":
            z = sq[m.labels[0]]
        elif m.kind == "pair":
            z = sq[m.labels[0]] @ sq[m.labels[1]]
        else:
            x, y = m.labels
            z = Matrix.zeros(4, 4)
            for o in (1, -1):
                pi = projector(x, o)
                z = z + pi @ sq[y] @ pi
            assert z == sq[y], m
        assert z.is_hermitian() and z.trace() == 0, m
        cat[m.j] = z
    return cat


def q_vector(state: QuantumState) -> tuple:
    cat = z_catalog()
    return tuple(_expect(state.rho, cat[j]) for j in range(1, 64))


def moment_space_dim(js=None) -> int:
    """Rank of {vec(Z_j)} for the given indices (default: all 63)."""
    cat = z_catalog()
    js = range(1, 64) if js is None else js
    rows = []
    for j in js:
        # real coordinates of a Hermitian matrix: Re and Im of every entry
        v = cat[j].vec()
        rows.append([real_part(x) for x in v] + [imag_part(x) for x in v])
    return mat_rank(Matrix.from_rows(rows))


def operator_from_moments(coeffs, constant=0) -> Matrix:
    """constant * 1 + sum_j coeffs[j-1] * Z_j."""
    cat = z_catalog()
    w = ID4.scale(constant)
    for j, c in enumerate(coeffs, start=1):
        if c:
            w = w + cat[j].scale(c)
    return w


def sequence_distributions(state: QuantumState, members, depth: int) -> dict:
    """inputs -> {outputs: probability} for every sequence of length 1..depth
    over ``members`` (which must be compatible).

    Walks the prefix tree carrying the unnormalized post-measurement operator
    Pi_n...Pi_1 rho Pi_1...Pi_n, whose trace is the probability of the prefix;
    each node costs two matrix products.  Zero-probability strings are
    omitted.
    """
    members = [canonical_label(x) for x in members]
    context_of(members)
    out = {}
    level = [((), (), state.rho)]
    for _ in range(depth):
        nxt = []
        for ins, outs, sigma in level:
            for x in members:
                dist = out.setdefault(ins + (x,), {})
                for o in (1, -1):
                    pi = projector(x, o)
                    s2 = pi @ sigma @ pi
                    p = real_part(s2.trace())
                    if p:
                        dist[outs + (o,)] = p
                        nxt.append((ins + (x,), outs + (o,), s2))
        level = nxt
    return out
