import pytest

from wmodexp.circuit import (
    CSWAP,
    MOD_ADD,
    TEMP_AND,
    TEMP_AND_UNDO,
    TOFFOLI,
    Circuit,
    CircuitBuilder,
    Gate,
    Register,
    Tally,
    UnknownQubit,
    dump_circuit,
    invert_gates,
    load_circuit,
    tally,
)


def circuit_over(width, gates, **kwargs):
    regs = (Register("work", tuple(range(width)), "ancilla"),)
    return Circuit(tuple(gates), regs, **kwargs)


class TestTally:
    def test_empty(self):
        t = tally(circuit_over(3, []))
        assert t == Tally(0, 0, 3, 0)

    def test_disjoint_toffolis_depth_one(self):
        gates = [Gate(TOFFOLI, (3 * k, 3 * k + 1, 3 * k + 2)) for k in range(4)]
        t = tally(circuit_over(12, gates))
        assert t.toffoli_count == 4
        assert t.toffoli_depth == 1

    def test_serial_chain(self):
        # Oracle: interval scheduling of gates sharing qubit 0 is strictly serial.
        gates = [Gate(TOFFOLI, (0, k + 1, k + 5)) for k in range(4)]
        t = tally(circuit_over(9, gates))
        assert t.toffoli_count == 4
        assert t.toffoli_depth == 4

    def test_temp_and_undo_is_free(self):
        gates = [Gate(TEMP_AND, (0, 1, 2)), Gate(TEMP_AND_UNDO, (0, 1, 2))]
        t = tally(circuit_over(3, gates))
        assert t.toffoli_count == 1
        assert t.toffoli_depth == 1

    def test_cswap_counts_one(self):
        t = tally(circuit_over(3, [Gate(CSWAP, (0, 1, 2))]))
        assert t.toffoli_count == 1

    def test_mod_add_books_zero(self):
        gate = Gate(MOD_ADD, (0, 1, 2, 3), modulus=3, sign=1, dest_len=2)
        t = tally(circuit_over(4, [gate]))
        assert t.toffoli_count == 0

    def test_depth_never_exceeds_count(self):
        gates = [Gate(TOFFOLI, (0, 1, 2)), Gate(TOFFOLI, (3, 4, 5)), Gate(TOFFOLI, (0, 3, 6))]
        t = tally(circuit_over(7, gates))
        assert t.toffoli_depth <= t.toffoli_count
        assert t.toffoli_depth == 2


class TestValidation:
    def test_unknown_qubit(self):
        with pytest.raises(UnknownQubit):
            circuit_over(2, [Gate(TOFFOLI, (0, 1, 5))])

    def test_duplicate_operand(self):
        with pytest.raises(ValueError):
            Gate(TOFFOLI, (0, 0, 1))

    def test_overlapping_registers(self):
        regs = (
            Register("a", (0, 1), "ancilla"),
            Register("b", (1, 2), "ancilla"),
        )
        with pytest.raises(ValueError):
            Circuit((), regs)

    def test_bad_role(self):
        with pytest.raises(ValueError):
            Register("a", (0,), "scratch")


class TestDumpFormat:
    def build_sample(self):
        cb = CircuitBuilder()
        a = cb.add_register("addr", 2, "exponent")
        d = cb.add_register("data", 3, "lookup")
        cb.x(a[0])
        cb.toffoli(a[0], a[1], d[0])
        cb.temp_and(a[0], a[1], d[1])
        cb.measure_x(d, cb.new_slot("m"))
        cb.phase_z((a[0],), slot="m.0", mask=0x5)
        cb.phase_z((a[1],))
        cb.mod_add((d[0], d[1]), (a[0], a[1]), 3, -1)
        cb.result_register = "data"
        return cb.build()

    def test_round_trip(self):
        circuit = self.build_sample()
        text = dump_circuit(circuit)
        again = load_circuit(text)
        assert again == circuit
        assert dump_circuit(again) == text

    def test_one_gate_per_line(self):
        circuit = self.build_sample()
        gate_lines = [
            line
            for line in dump_circuit(circuit).splitlines()
            if line and not line.startswith(("register", "result"))
        ]
        assert len(gate_lines) == len(circuit.gates)


class TestBuilderHelpers:
    def test_rename_swaps(self):
        cb = CircuitBuilder()
        cb.add_register("left", 2, "multiplicand")
        cb.add_register("right", 2, "target")
        cb.rename("left", "right")
        circuit = cb.build()
        assert circuit.register("right").qubits == (0, 1)
        assert circuit.register("left").qubits == (2, 3)

    def test_invert_gates(self):
        gates = [
            Gate(TEMP_AND, (0, 1, 2)),
            Gate(TOFFOLI, (0, 1, 3)),
            Gate(MOD_ADD, (0, 1, 2, 3), modulus=3, sign=1, dest_len=2),
        ]
        inv = invert_gates(gates)
        assert inv[0].name == MOD_ADD and inv[0].sign == -1
        assert inv[2].name == TEMP_AND_UNDO

    def test_invert_refuses_measurement(self):
        with pytest.raises(ValueError):
            invert_gates([Gate("MeasureXRegister", (0,), slot="m")])
