"""Layered circuits over the native gate set, with a plain-text serialization.

Text format, one gate per line::

    # comment
    t 0 1 1.5707963267948966 0.0 0.0
    int 2 3 3.141592653589793
    ---
    c-int 4 0 1 3.141592653589793

``KIND site... param...``; the site count is fixed by the kind, and a
``c-`` prefix marks a qubit-controlled gate whose control site comes first.
``---`` closes a layer.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fock import FockBasis
from .gates import ARITY, TWO_LEVEL, GateSpec, apply_gates, apply_to_columns
from .register import FERMION


def gate_support(gate: GateSpec, kinds: Sequence[str] | None = None, strings: bool = True) -> frozenset[int]:
    """Sites a gate touches, including the Jordan-Wigner string of hopping-type gates.

    With ``strings=False`` only the gate's own sites count.  Every native gate
    is parity-even on its sites, so gates on disjoint site sets commute either
    way; the strings only matter when layers are applied as independent
    kernels on one shared buffer.
    """
    sites = set(gate.all_sites)
    if strings and gate.kind in TWO_LEVEL:
        lo, hi = min(gate.sites), max(gate.sites)
        span = range(lo, hi + 1)
        if kinds is not None:
            span = [s for s in span if kinds[s] == FERMION]
        sites.update(span)
    return frozenset(sites)


@dataclass
class Circuit:
    layers: list[list[GateSpec]] = field(default_factory=list)
    kinds: tuple[str, ...] | None = None
    strings: bool = True  # count Jordan-Wigner strings as part of a gate's support

    @classmethod
    def from_gates(
        cls, gates: Iterable[GateSpec], kinds: Sequence[str] | None = None, strings: bool = True
    ) -> "Circuit":
        """Pack gates into layers as early as possible without reordering overlapping gates."""
        kinds = tuple(kinds) if kinds is not None else None
        layers: list[list[GateSpec]] = []
        used: list[set[int]] = []
        last_touch: dict[int, int] = {}
        for g in gates:
            sup = gate_support(g, kinds, strings)
            at = 1 + max((last_touch.get(s, -1) for s in sup), default=-1)
            while at < len(layers) and used[at] & sup:
                at += 1
            if at == len(layers):
                layers.append([])
                used.append(set())
            layers[at].append(g)
            used[at] |= sup
            for s in sup:
                last_touch[s] = max(last_touch.get(s, -1), at)
        return cls(layers, kinds, strings)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> list[GateSpec]:
        return [g for layer in self.layers for g in layer]

    def gate_counts(self) -> dict[str, int]:
        return dict(Counter(("c-" if g.control is not None else "") + g.kind for g in self.gates))

    def check_layers(self) -> None:
        """Raise if any layer holds gates with overlapping supports."""
        for n, layer in enumerate(self.layers):
            seen: set[int] = set()
            for g in layer:
                sup = gate_support(g, self.kinds, self.strings)
                if seen & sup:
                    raise ValueError(f"layer {n} has overlapping supports at sites {sorted(seen & sup)}")
                seen |= sup

    def inverse(self) -> "Circuit":
        layers = [[g.inverse() for g in reversed(layer)] for layer in reversed(self.layers)]
        return Circuit(layers, self.kinds, self.strings)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.layers + other.layers, self.kinds or other.kinds, self.strings and other.strings)

    def run(self, state):
        return apply_gates(self.gates, state)

    def unitary(self, basis: FockBasis) -> np.ndarray:
        return apply_to_columns(self.gates, basis, np.eye(basis.dim, dtype=np.complex128))

    # -- text form ---------------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for n, layer in enumerate(self.layers):
            if n:
                lines.append("---")
            for g in layer:
                kind = g.kind if g.control is None else "c-" + g.kind
                fields = [kind, *map(str, g.all_sites), *map(repr, g.params)]
                lines.append(" ".join(fields))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, kinds: Sequence[str] | None = None, strings: bool = True) -> "Circuit":
        layers: list[list[GateSpec]] = [[]]
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line == "---":
                layers.append([])
                continue
            tok = line.split()
            kind = tok[0]
            controlled = kind.startswith("c-")
            if controlled:
                kind = kind[2:]
            if kind not in ARITY:
                raise ValueError(f"line {lineno}: unknown gate kind {tok[0]!r}")
            n_sites, n_par = ARITY[kind]
            n_sites += controlled
            if len(tok) != 1 + n_sites + n_par:
                raise ValueError(f"line {lineno}: expected {n_sites} sites and {n_par} parameters")
            try:
                sites = [int(x) for x in tok[1 : 1 + n_sites]]
                params = [float(x) for x in tok[1 + n_sites :]]
                if controlled:
                    g = GateSpec(kind, sites[1:], params, sites[0])
                else:
                    g = GateSpec(kind, sites, params)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            layers[-1].append(g)
        if not layers[-1]:
            layers.pop()
        circ = cls(layers, tuple(kinds) if kinds is not None else None, strings)
        circ.check_layers()
        return circ
