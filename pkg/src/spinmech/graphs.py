"""DOT rendering of reconstructed machines.

One digraph per recurrent class; nodes are causal states annotated with
their probabilities, edges carry "symbol | probability" labels. Block
machines label edges with the emitted block rendered one character per
spin; spin machines with the single emitted spin.
"""

from .lattice import BlockSpace
from .machine import Machine, MachineSet
from .markov import SUPPORT_FLOOR


def _quote(text: str) -> str:
    return '"{}"'.format(text.replace('"', r"\""))


def machine_to_dot(machine: Machine, space: BlockSpace, name: str) -> str:
    """Render one machine as a DOT digraph."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for r in range(machine.n_states):
        label = f"C{r}\\np={machine.partition.probs[r]:.6g}"
        lines.append(f"  {_quote(f'C{r}')} [shape=circle label={_quote(label)}];")
    for r in range(machine.n_states):
        for k, symbol in enumerate(machine.symbols):
            prob = machine.emission[r, k]
            if prob <= SUPPORT_FLOOR:
                continue
            target = machine.successor[r, k]
            if machine.kind == "block":
                sym_label = space.label(symbol)
            else:
                sym_label = space.alphabet.symbol(symbol)
            edge_label = f"{sym_label} | {prob:.6g}"
            lines.append(
                f"  {_quote(f'C{r}')} -> {_quote(f'C{target}')} "
                f"[label={_quote(edge_label)}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


def machines_to_dot(machine_set: MachineSet, space: BlockSpace) -> str:
    """Render every recurrent class, one digraph per class."""
    parts = []
    for index, machine in enumerate(machine_set.machines):
        parts.append(machine_to_dot(machine, space, f"{machine_set.kind}_class{index}"))
    return "\n".join(parts)
