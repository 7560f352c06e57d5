"""Gate-level intermediate representation with Toffoli cost tallies.

Gates act on globally numbered qubits grouped into named registers. The cost
accounting follows the temp-AND convention: TempAndCompute and Toffoli (and
CSwap, which hides one Toffoli) each count 1; TempAndUncompute is free because
it is realized by measurement and classical feedforward. Depth is ASAP
layering over the counted gates only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Gate variant names; these strings are also the dump format's opcodes.
X = "X"
CNOT = "CNOT"
TOFFOLI = "Toffoli"
TEMP_AND = "TempAndCompute"
TEMP_AND_UNDO = "TempAndUncompute"
CSWAP = "CSwap"
MEASURE_X = "MeasureXRegister"
PHASE_Z = "ClassicalPhaseZ"
# Gate-set extension: an oracle gate permuting dest -> (dest +/- src) mod N
# for dest < N and acting as identity otherwise. Used only by the exact
# functional adder backend; it books zero Toffolis.
MOD_ADD = "ModAddOracle"

GATE_ARITY = {X: 1, CNOT: 2, TOFFOLI: 3, TEMP_AND: 3, TEMP_AND_UNDO: 3, CSWAP: 3}
COUNTED = frozenset({TOFFOLI, TEMP_AND, CSWAP})
ROLES = ("exponent", "multiplicand", "lookup", "target", "unary", "ancilla", "pad")


class UnknownQubit(KeyError):
    """A gate referenced a qubit outside every register."""


@dataclass(frozen=True)
class Gate:
    """One gate. qubits are (controls..., target) for X/CNOT/Toffoli/TempAnd,
    (control, a, b) for CSwap, the measured register (low bit first) for
    MeasureXRegister, and the conditioned-on-1 qubits for ClassicalPhaseZ.

    slot names a transcript entry: the outcome destination for a measurement,
    or with mask the parity condition parity(transcript[slot] & mask) gating a
    ClassicalPhaseZ. ModAddOracle uses dest_len/modulus/sign: the first
    dest_len qubits are the destination, the rest the source operand.
    """

    name: str
    qubits: tuple[int, ...]
    slot: str | None = None
    mask: int = 0
    modulus: int = 0
    sign: int = 1
    dest_len: int = 0

    def __post_init__(self) -> None:
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name} operands must be distinct: {self.qubits}")
        arity = GATE_ARITY.get(self.name)
        if arity is not None and len(self.qubits) != arity:
            raise ValueError(f"{self.name} takes {arity} qubits, got {len(self.qubits)}")
        if self.name == MEASURE_X and (not self.qubits or self.slot is None):
            raise ValueError("MeasureXRegister needs qubits and a slot")
        if self.name == PHASE_Z and not self.qubits:
            raise ValueError("ClassicalPhaseZ needs at least one qubit")
        if self.name == MOD_ADD:
            if not 0 < self.dest_len < len(self.qubits):
                raise ValueError("ModAddOracle needs dest and source qubits")
            if self.modulus < 2 or self.sign not in (1, -1):
                raise ValueError("ModAddOracle needs modulus >= 2 and sign +/-1")


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]
    role: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"unknown register role {self.role!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"register {self.name} repeats qubits")

    def __len__(self) -> int:
        return len(self.qubits)


@dataclass(frozen=True)
class Tally:
    toffoli_count: int
    toffoli_depth: int
    qubit_highwater: int
    measurement_depth: int


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence over named registers.

    slots lists the transcript slot names in the order their measurements
    appear. result_register, when set, names the register holding the
    computation's output (builders that rename registers record it here).
    """

    gates: tuple[Gate, ...]
    registers: tuple[Register, ...]
    slots: tuple[str, ...] = ()
    result_register: str | None = None

    def __post_init__(self) -> None:
        owned = set()
        for reg in self.registers:
            for q in reg.qubits:
                if q in owned:
                    raise ValueError(f"qubit {q} appears in two registers")
                owned.add(q)
        for gate in self.gates:
            for q in gate.qubits:
                if q not in owned:
                    raise UnknownQubit(q)

    @property
    def num_qubits(self) -> int:
        return sum(len(reg) for reg in self.registers)

    def register(self, name: str) -> Register:
        for reg in self.registers:
            if reg.name == name:
                return reg
        raise KeyError(name)


def tally(circuit: Circuit) -> Tally:
    """Cost tally of a circuit.

    toffoli_count sums the counted gates (Toffoli, TempAndCompute, CSwap).
    toffoli_depth is ASAP layering: each counted gate lands one layer after
    the deepest prior counted gate sharing any qubit; uncounted gates are
    invisible to the layering. qubit_highwater is the total register
    allocation (all registers live for the whole circuit). measurement_depth
    counts measurement events, which are inherently serial here: each
    feeds classical corrections consumed before the next.
    """
    count = 0
    depth = 0
    measurements = 0
    layer: dict[int, int] = {}
    for gate in circuit.gates:
        if gate.name in COUNTED:
            count += 1
            at = 1 + max((layer.get(q, 0) for q in gate.qubits), default=0)
            for q in gate.qubits:
                layer[q] = at
            depth = max(depth, at)
        elif gate.name == MEASURE_X:
            measurements += 1
    return Tally(count, depth, circuit.num_qubits, measurements)


def dump_circuit(circuit: Circuit) -> str:
    """One line per gate: `Variant q1 q2 ... [key=value ...]`, preceded by
    register header lines. Round-trips through load_circuit."""
    lines = []
    for reg in circuit.registers:
        ids = " ".join(str(q) for q in reg.qubits)
        lines.append(f"register {reg.name} {reg.role} {ids}")
    if circuit.result_register:
        lines.append(f"result {circuit.result_register}")
    for gate in circuit.gates:
        parts = [gate.name] + [str(q) for q in gate.qubits]
        if gate.name == MEASURE_X:
            parts.append(f"slot={gate.slot}")
        elif gate.name == PHASE_Z and gate.slot is not None:
            parts.append(f"cond={gate.slot}:{gate.mask:x}")
        elif gate.name == MOD_ADD:
            parts.append(f"dest={gate.dest_len}")
            parts.append(f"mod={gate.modulus}")
            parts.append(f"sign={gate.sign:+d}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def load_circuit(text: str) -> Circuit:
    """Parse the dump_circuit format."""
    registers: list[Register] = []
    gates: list[Gate] = []
    slots: list[str] = []
    result = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "register":
            registers.append(Register(parts[1], tuple(int(q) for q in parts[3:]), parts[2]))
            continue
        if parts[0] == "result":
            result = parts[1]
            continue
        name = parts[0]
        qubits: list[int] = []
        extras: dict[str, str] = {}
        for token in parts[1:]:
            if "=" in token:
                key, value = token.split("=", 1)
                extras[key] = value
            else:
                qubits.append(int(token))
        kwargs: dict = {}
        if "slot" in extras:
            kwargs["slot"] = extras["slot"]
        if "cond" in extras:
            slot, mask = extras["cond"].split(":")
            kwargs["slot"] = slot
            kwargs["mask"] = int(mask, 16)
        if "dest" in extras:
            kwargs["dest_len"] = int(extras["dest"])
            kwargs["modulus"] = int(extras["mod"])
            kwargs["sign"] = int(extras["sign"])
        gate = Gate(name, tuple(qubits), **kwargs)
        if gate.name == MEASURE_X:
            slots.append(gate.slot)  # type: ignore[arg-type]
        gates.append(gate)
    return Circuit(tuple(gates), tuple(registers), tuple(slots), result)


class CircuitBuilder:
    """Mutable assembler for Circuits: allocates qubits, names slots, and
    collects gates. Builders in builders.py drive this."""

    def __init__(self) -> None:
        self._gates: list[Gate] = []
        self._registers: list[Register] = []
        self._slots: list[str] = []
        self._next_qubit = 0
        self.result_register: str | None = None

    def add_register(self, name: str, size: int, role: str) -> tuple[int, ...]:
        qubits = tuple(range(self._next_qubit, self._next_qubit + size))
        self._next_qubit += size
        self._registers.append(Register(name, qubits, role))
        return qubits

    def rename(self, old: str, new: str) -> None:
        """Swap two register names in place (zero-cost logical swap)."""
        renamed = []
        for reg in self._registers:
            if reg.name == old:
                renamed.append(Register(new, reg.qubits, reg.role))
            elif reg.name == new:
                renamed.append(Register(old, reg.qubits, reg.role))
            else:
                renamed.append(reg)
        self._registers = renamed

    def new_slot(self, prefix: str) -> str:
        slot = f"{prefix}.{len(self._slots)}"
        self._slots.append(slot)
        return slot

    def emit(self, gate: Gate) -> None:
        self._gates.append(gate)

    def x(self, q: int) -> None:
        self.emit(Gate(X, (q,)))

    def cnot(self, control: int, target: int) -> None:
        self.emit(Gate(CNOT, (control, target)))

    def toffoli(self, c1: int, c2: int, target: int) -> None:
        self.emit(Gate(TOFFOLI, (c1, c2, target)))

    def temp_and(self, c1: int, c2: int, target: int) -> None:
        self.emit(Gate(TEMP_AND, (c1, c2, target)))

    def temp_and_undo(self, c1: int, c2: int, target: int) -> None:
        self.emit(Gate(TEMP_AND_UNDO, (c1, c2, target)))

    def cswap(self, control: int, a: int, b: int) -> None:
        self.emit(Gate(CSWAP, (control, a, b)))

    def measure_x(self, qubits: tuple[int, ...], slot: str) -> None:
        self.emit(Gate(MEASURE_X, qubits, slot=slot))

    def phase_z(self, qubits: tuple[int, ...], slot: str | None = None, mask: int = 0) -> None:
        self.emit(Gate(PHASE_Z, qubits, slot=slot, mask=mask))

    def mod_add(
        self, dest: tuple[int, ...], src: tuple[int, ...], modulus: int, sign: int
    ) -> None:
        self.emit(
            Gate(MOD_ADD, dest + src, modulus=modulus, sign=sign, dest_len=len(dest))
        )

    def build(self) -> Circuit:
        return Circuit(
            tuple(self._gates),
            tuple(self._registers),
            tuple(self._slots),
            self.result_register,
        )


def invert_gates(gates: list[Gate] | tuple[Gate, ...]) -> list[Gate]:
    """Reverse a measurement-free gate sequence. X/CNOT/Toffoli/CSwap and
    ClassicalPhaseZ are self-inverse; temp-ANDs swap compute/uncompute roles;
    ModAddOracle flips sign."""
    inverted = []
    for gate in reversed(gates):
        if gate.name == TEMP_AND:
            inverted.append(Gate(TEMP_AND_UNDO, gate.qubits))
        elif gate.name == TEMP_AND_UNDO:
            inverted.append(Gate(TEMP_AND, gate.qubits))
        elif gate.name == MOD_ADD:
            inverted.append(
                Gate(
                    MOD_ADD,
                    gate.qubits,
                    modulus=gate.modulus,
                    sign=-gate.sign,
                    dest_len=gate.dest_len,
                )
            )
        elif gate.name == MEASURE_X:
            raise ValueError("cannot invert across a measurement")
        else:
            inverted.append(gate)
    return inverted
