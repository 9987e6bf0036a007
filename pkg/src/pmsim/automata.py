"""Deterministic three-state automata and the 240-behavior family.

Tables are indexed ``table[s][(row, col)]`` with states 1..3 and grid
positions 1..3; inputs are observable labels mapped to grid positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import ConstructionInvalid
from .quantum import LABEL_AT, POSITION, canonical_label, context_of, contexts, moment_indices

STATES = (1, 2, 3)
POSITIONS = tuple((r, c) for r in range(1, 4) for c in range(1, 4))


def _grid(rows) -> dict:
    return {(r + 1, c + 1): rows[r][c] for r in range(3) for c in range(3)}


@dataclass(frozen=True)
class DetAutomaton:
    """Output table ``outputs[s][pos]`` in {+1,-1} and transition table
    ``transitions[s][pos]`` in {1,2,3}.  Stored as nested tuples so that the
    object is hashable; build with :meth:`from_grids`."""

    outputs: tuple
    transitions: tuple

    @classmethod
    def from_grids(cls, outputs, transitions) -> "DetAutomaton":
        """``outputs``/``transitions``: three 3x3 nested lists, one per state."""
        o = tuple(tuple(_grid(g)[p] for p in POSITIONS) for g in outputs)
        t = tuple(tuple(_grid(g)[p] for p in POSITIONS) for g in transitions)
        for s in o:
            if any(x not in (1, -1) for x in s):
                raise ValueError("outputs must be +1/-1")
        for s in t:
            if any(x not in STATES for x in s):
                raise ValueError("transitions must be states 1..3")
        return cls(o, t)

    def output(self, s: int, pos) -> int:
        return self.outputs[s - 1][POSITIONS.index(pos)]

    def next_state(self, s: int, pos) -> int:
        return self.transitions[s - 1][POSITIONS.index(pos)]

    def step(self, s: int, label: str):
        k = POSITIONS.index(POSITION[label])
        return self.outputs[s - 1][k], self.transitions[s - 1][k]

    def output_grid(self, s: int) -> list:
        row = self.outputs[s - 1]
        return [list(row[3 * r:3 * r + 3]) for r in range(3)]

    def transition_grid(self, s: int) -> list:
        row = self.transitions[s - 1]
        return [list(row[3 * r:3 * r + 3]) for r in range(3)]


def base_automaton() -> DetAutomaton:
    """Three-state automaton that respects every deterministic prediction for
    compatible sequences, from any initial state."""
    o1 = [[1, 1, 1], [1, 1, 1], [1, 1, 1]]
    o2 = [[1, 1, 1], [-1, 1, -1], [-1, -1, 1]]
    o3 = [[1, -1, -1], [1, 1, 1], [-1, -1, 1]]
    t1 = [[1, 1, 2], [1, 1, 3], [1, 1, 1]]
    t2 = [[2, 1, 2], [2, 2, 2], [2, 3, 2]]
    t3 = [[3, 3, 3], [1, 3, 3], [2, 3, 3]]
    return DetAutomaton.from_grids([o1, o2, o3], [t1, t2, t3])


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def flip_patterns() -> tuple:
    """The 16 sign patterns with every row and column product +1.

    Pattern ``f`` flips position (1,1), (1,2), (2,1), (2,2) when bit 0, 1, 2, 3
    of ``f`` is set; the third row and column are forced by parity.
    """
    out = []
    for f in range(16):
        g = [[1] * 3 for _ in range(3)]
        for bit, (r, c) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            if f >> bit & 1:
                g[r][c] = -1
        for r in range(2):
            g[r][2] = g[r][0] * g[r][1]
        for c in range(3):
            g[2][c] = g[0][c] * g[1][c]
        out.append(tuple(tuple(r) for r in g))
    for g in out:
        assert all(g[r][0] * g[r][1] * g[r][2] == 1 for r in range(3))
        assert all(g[0][c] * g[1][c] * g[2][c] == 1 for c in range(3))
    assert len(set(out)) == 16
    return tuple(out)


PERM_NAMES = ("id", "rows12", "rows13", "rows23", "cols12")


def perm_map(k: int):
    """Position relabeling of permutation ``k``: new position -> old position."""
    name = PERM_NAMES[k]
    if name == "id":
        return lambda p: p
    if name == "cols12":
        swap = {1: 2, 2: 1, 3: 3}
        return lambda p: (p[0], swap[p[1]])
    a, b = int(name[4]), int(name[5])
    swap = {a: b, b: a}
    return lambda p: (swap.get(p[0], p[0]), p[1])


def apply_transform(aut: DetAutomaton, flip, perm: int) -> DetAutomaton:
    """Relabel positions by ``perm`` (o'(p) = o(perm(p)), same for t), then
    multiply outputs by the flip pattern.  ``flip`` is a 3x3 sign grid or an
    index into :func:`flip_patterns`."""
    if isinstance(flip, int):
        flip = flip_patterns()[flip]
    pm = perm_map(perm)
    outs, trans = [], []
    for s in STATES:
        outs.append(tuple(aut.output(s, pm(p)) * flip[p[0] - 1][p[1] - 1]
                          for p in POSITIONS))
        trans.append(tuple(aut.next_state(s, pm(p)) for p in POSITIONS))
    return DetAutomaton(tuple(outs), tuple(trans))


@dataclass(frozen=True)
class Behavior:
    automaton: DetAutomaton
    s0: int
    lam: int
    flip: int = 0
    perm: int = 0


def lambda_index(flip: int, perm: int, s0: int) -> int:
    return (flip * 5 + perm) * 3 + (s0 - 1) + 1


def _make_family(base: DetAutomaton) -> list:
    out = []
    for f in range(16):
        for p in range(5):
            aut = apply_transform(base, f, p)
            for s0 in STATES:
                out.append(Behavior(aut, s0, lambda_index(f, p, s0), f, p))
    return out


def enumerate_behaviors(base: DetAutomaton | None = None, depth: int = 5) -> tuple:
    """All 240 behaviors in canonical lambda order (flip-major, then
    permutation, then initial state).  Each is validated; a failure raises
    ConstructionInvalid carrying the violation report."""
    if base is None:
        return _family()
    return _validated(_make_family(base), depth)


def _validated(family, depth):
    for b in family:
        rep = deterministic_check(b, depth)
        if rep is not None:
            raise ConstructionInvalid(f"behavior λ={b.lam} violates a deterministic prediction",
                                      report=rep)
        if not ell_independence_check(b):
            raise ConstructionInvalid(f"behavior λ={b.lam} has length-dependent transitions")
    return tuple(family)


@lru_cache(maxsize=1)
def _family() -> tuple:
    return _validated(_make_family(base_automaton()), 5)


def behavior(lam: int) -> Behavior:
    return _family()[lam - 1]


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

def run(b: Behavior, inputs) -> tuple:
    """Deterministic outcome string for a compatible input sequence."""
    inputs = [canonical_label(x) for x in inputs]
    if inputs:
        context_of(inputs)
    return _run(b.automaton, b.s0, inputs)


def _run(aut: DetAutomaton, s: int, inputs) -> tuple:
    out = []
    for x in inputs:
        o, s = aut.step(s, x)
        out.append(o)
    return tuple(out)


def v_vector(b: Behavior) -> tuple:
    """The 63 moment values of a single behavior."""
    vals = []
    for m in moment_indices():
        if m.kind == "single":
            vals.append(_run(b.automaton, b.s0, m.labels)[0])
        elif m.kind == "pair":
            x, y = _run(b.automaton, b.s0, m.labels)
            vals.append(x * y)
        else:
            vals.append(_run(b.automaton, b.s0, m.labels)[1])
    return tuple(vals)


@lru_cache(maxsize=1)
def behavior_matrix() -> tuple:
    """64 rows (row 0 all ones, rows 1..63 the moment values) by 240 columns,
    as a tuple of row tuples."""
    cols = [(1,) + v_vector(b) for b in _family()]
    return tuple(zip(*cols))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    context: str
    inputs: tuple
    outputs: tuple
    reason: str

    def __str__(self):
        ins = ",".join(self.inputs)
        outs = ",".join(f"{o:+d}" for o in self.outputs)
        return f"context {self.context}: inputs ({ins}) gave ({outs}): {self.reason}"


def deterministic_check(b: Behavior, depth: int = 5):
    """Return None if every compatible sequence of length <= depth respects
    repeatability and the context product rule, else the first Violation.

    The enumeration is a depth-first walk over the automaton state, so each
    prefix is run once.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    aut = b.automaton
    for ctx in contexts():
        stack = [((), (), b.s0, {})]
        while stack:
            ins, outs, s, known = stack.pop()
            if len(ins) == depth:
                continue
            for x in ctx.members:
                o, s2 = aut.step(s, x)
                ins2, outs2 = ins + (x,), outs + (o,)
                if x in known and known[x] != o:
                    return Violation(ctx.name, ins2, outs2, f"{x} did not repeat its value")
                k2 = dict(known)
                k2[x] = o
                if len(k2) == 3:
                    prod = k2[ctx.members[0]] * k2[ctx.members[1]] * k2[ctx.members[2]]
                    if prod != ctx.sign:
                        return Violation(ctx.name, ins2, outs2,
                                         f"product of outcomes is {prod:+d}, expected {ctx.sign:+d}")
                stack.append((ins2, outs2, s2, k2))
    return None


def ell_independence_check(b: Behavior) -> bool:
    """Repeating an input does not move the state further: t(t(s,X),X) = t(s,X)
    for every state reachable as an initial state and every input."""
    aut = b.automaton
    for s in STATES:
        for p in POSITIONS:
            s1 = aut.next_state(s, p)
            if aut.next_state(s1, p) != s1:
                return False
    return True


def ensemble_prob(weights: dict, inputs, outputs) -> Fraction:
    """sum_lambda p(lambda) [run(lambda, inputs) == outputs]."""
    inputs = [canonical_label(x) for x in inputs]
    outputs = tuple(outputs)
    if inputs:
        context_of(inputs)
    total = Fraction(0)
    for lam, w in weights.items():
        if w and _run(behavior(lam).automaton, behavior(lam).s0, inputs) == outputs:
            total += w
    return total


def label_at(pos) -> str:
    return LABEL_AT[pos]


def all_sequences(members, max_len: int):
    for n in range(1, max_len + 1):
        yield from product(members, repeat=n)
