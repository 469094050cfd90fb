"""OpenQASM 2.0 subset: parser and emitter.

Supported statements: qreg, creg, the gates x z s sdg t tdg h rx rz cx ccx,
measure, barrier, and single-bit classical control `if(c==1) x|z ...;`.
`include "qelib1.inc"` is accepted and ignored. Custom gate definitions are
rejected. Qubit indices flatten registers in declaration order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .circuits import Circuit, GateKind


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


@dataclass
class QasmProgram:
    """Parsed program before flattening to a Circuit."""
    version: str
    qregs: dict[str, int]
    cregs: dict[str, int]
    statements: list = field(default_factory=list)


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<real>(\d+\.\d*|\.\d+)([eE][+-]?\d+)?|\d+[eE][+-]?\d+)
  | (?P<int>\d+)
  | (?P<id>[a-zA-Z_][a-zA-Z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<op>==|->|[-+*/()\[\],;{}])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    return tokens


_GATE_ARITY = {
    "x": 1, "z": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1, "h": 1,
    "rx": 1, "rz": 1, "cx": 2, "ccx": 3,
}
_PARAM_GATES = {"rx", "rz"}


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise QasmError("unexpected end of input", last.line, last.col)
        self.pos += 1
        return tok

    def _expect(self, text: str) -> _Token:
        tok = self._next()
        if tok.text != text:
            raise QasmError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def _expect_kind(self, kind: str) -> _Token:
        tok = self._next()
        if tok.kind != kind:
            raise QasmError(f"expected {kind}, found {tok.text!r}", tok.line, tok.col)
        return tok

    # -- angle expressions ------------------------------------------------
    # expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
    # factor := ['-'] (real | int | 'pi' | '(' expr ')')
    def _expr(self) -> float:
        value = self._term()
        while True:
            tok = self._peek()
            if tok and tok.text in ("+", "-"):
                self._next()
                rhs = self._term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def _term(self) -> float:
        value = self._factor()
        while True:
            tok = self._peek()
            if tok and tok.text in ("*", "/"):
                self._next()
                rhs = self._factor()
                if tok.text == "/":
                    if rhs == 0:
                        raise QasmError("division by zero in angle", tok.line, tok.col)
                    value /= rhs
                else:
                    value *= rhs
            else:
                return value

    def _factor(self) -> float:
        tok = self._next()
        if tok.text == "-":
            return -self._factor()
        if tok.text == "(":
            value = self._expr()
            self._expect(")")
            return value
        if tok.kind in ("real", "int"):
            return float(tok.text)
        if tok.text == "pi":
            return math.pi
        raise QasmError(f"bad angle term {tok.text!r}", tok.line, tok.col)

    # -- program ----------------------------------------------------------
    def parse(self) -> QasmProgram:
        tok = self._expect("OPENQASM")
        version = self._expect_kind("real").text
        if version != "2.0":
            raise QasmError(f"unsupported OPENQASM version {version}", tok.line, tok.col)
        self._expect(";")
        prog = QasmProgram(version, {}, {})
        while self._peek() is not None:
            self._statement(prog)
        return prog

    def _declared(self, prog: QasmProgram, name: str, tok: _Token) -> None:
        if name in prog.qregs or name in prog.cregs:
            raise QasmError(f"duplicate register name {name!r}", tok.line, tok.col)

    def _statement(self, prog: QasmProgram) -> None:
        tok = self._next()
        if tok.text == "include":
            inc = self._expect_kind("str")
            if inc.text != '"qelib1.inc"':
                raise QasmError(f"unsupported include {inc.text}", inc.line, inc.col)
            self._expect(";")
        elif tok.text in ("qreg", "creg"):
            name_tok = self._expect_kind("id")
            self._declared(prog, name_tok.text, name_tok)
            self._expect("[")
            size = int(self._expect_kind("int").text)
            self._expect("]")
            self._expect(";")
            if size < 1:
                raise QasmError("register size must be >= 1", name_tok.line, name_tok.col)
            (prog.qregs if tok.text == "qreg" else prog.cregs)[name_tok.text] = size
        elif tok.text == "measure":
            q = self._qubit_ref(prog)
            self._expect("->")
            c = self._bit_ref(prog)
            self._expect(";")
            prog.statements.append(("measure", q, c))
        elif tok.text == "barrier":
            qubits = [self._qubit_operands(prog)]
            while self._peek() and self._peek().text == ",":
                self._next()
                qubits.append(self._qubit_operands(prog))
            self._expect(";")
            flat = [q for group in qubits for q in group]
            prog.statements.append(("barrier", flat))
        elif tok.text == "if":
            self._expect("(")
            name_tok = self._expect_kind("id")
            creg = name_tok.text
            if creg not in prog.cregs:
                raise QasmError(f"undeclared creg {creg!r}", name_tok.line, name_tok.col)
            if prog.cregs[creg] != 1:
                raise QasmError("classical control requires a single-bit creg",
                                name_tok.line, name_tok.col)
            self._expect("==")
            val_tok = self._expect_kind("int")
            if val_tok.text != "1":
                raise QasmError("only `== 1` conditions are supported",
                                val_tok.line, val_tok.col)
            self._expect(")")
            gate_tok = self._next()
            if gate_tok.text not in ("x", "z"):
                raise QasmError(f"unsupported conditioned gate {gate_tok.text!r}",
                                gate_tok.line, gate_tok.col)
            q = self._qubit_ref(prog)
            self._expect(";")
            bit = self._flatten_bit(prog, creg, 0)
            prog.statements.append(("cc_" + gate_tok.text, bit, q))
        elif tok.text == "gate" or tok.text == "opaque":
            raise QasmError("custom gate definitions are not supported", tok.line, tok.col)
        elif tok.kind == "id" and tok.text in _GATE_ARITY:
            name = tok.text
            params: tuple[float, ...] = ()
            if name in _PARAM_GATES:
                self._expect("(")
                params = (self._expr(),)
                self._expect(")")
            operands = [self._qubit_ref(prog)]
            while self._peek() and self._peek().text == ",":
                self._next()
                operands.append(self._qubit_ref(prog))
            self._expect(";")
            if len(operands) != _GATE_ARITY[name]:
                raise QasmError(f"{name} expects {_GATE_ARITY[name]} operand(s), "
                                f"got {len(operands)}", tok.line, tok.col)
            prog.statements.append(("gate", name, params, operands))
        else:
            raise QasmError(f"unsupported statement {tok.text!r}", tok.line, tok.col)

    def _qubit_operands(self, prog: QasmProgram) -> list[tuple[str, int]]:
        """One barrier operand: q[i] or a whole register q."""
        name_tok = self._expect_kind("id")
        name = name_tok.text
        if name not in prog.qregs:
            raise QasmError(f"undeclared qreg {name!r}", name_tok.line, name_tok.col)
        if self._peek() and self._peek().text == "[":
            self._next()
            idx = int(self._expect_kind("int").text)
            self._expect("]")
            self._check_bounds(prog.qregs[name], name, idx, name_tok)
            return [(name, idx)]
        return [(name, i) for i in range(prog.qregs[name])]

    def _qubit_ref(self, prog: QasmProgram) -> tuple[str, int]:
        name_tok = self._expect_kind("id")
        name = name_tok.text
        if name not in prog.qregs:
            raise QasmError(f"undeclared qreg {name!r}", name_tok.line, name_tok.col)
        self._expect("[")
        idx = int(self._expect_kind("int").text)
        self._expect("]")
        self._check_bounds(prog.qregs[name], name, idx, name_tok)
        return (name, idx)

    def _bit_ref(self, prog: QasmProgram) -> tuple[str, int]:
        name_tok = self._expect_kind("id")
        name = name_tok.text
        if name not in prog.cregs:
            raise QasmError(f"undeclared creg {name!r}", name_tok.line, name_tok.col)
        self._expect("[")
        idx = int(self._expect_kind("int").text)
        self._expect("]")
        self._check_bounds(prog.cregs[name], name, idx, name_tok)
        return (name, idx)

    @staticmethod
    def _check_bounds(size: int, name: str, idx: int, tok: _Token) -> None:
        if not 0 <= idx < size:
            raise QasmError(f"index {idx} out of bounds for {name}[{size}]",
                            tok.line, tok.col)

    def _flatten_bit(self, prog: QasmProgram, name: str, idx: int) -> int:
        offset = 0
        for rname, size in prog.cregs.items():
            if rname == name:
                return offset + idx
            offset += size
        raise QasmError(f"undeclared creg {name!r}")


def parse_program(text: str) -> QasmProgram:
    return _Parser(text).parse()


def _to_circuit(prog: QasmProgram) -> Circuit:
    qoffsets, offset = {}, 0
    for name, size in prog.qregs.items():
        qoffsets[name] = offset
        offset += size
    num_qubits = offset
    boffsets, offset = {}, 0
    for name, size in prog.cregs.items():
        boffsets[name] = offset
        offset += size
    num_bits = offset

    def q(ref): return qoffsets[ref[0]] + ref[1]

    circuit = Circuit(num_qubits, num_bits)
    for stmt in prog.statements:
        if stmt[0] == "gate":
            _, name, params, operands = stmt
            circuit.add(GateKind(name), [q(r) for r in operands], params)
        elif stmt[0] == "measure":
            _, qref, cref = stmt
            circuit.measure(q(qref), boffsets[cref[0]] + cref[1])
        elif stmt[0] == "barrier":
            circuit.barrier(*[q(r) for r in stmt[1]])
        elif stmt[0] == "cc_x":
            circuit.cc_x(stmt[1], q(stmt[2]))
        elif stmt[0] == "cc_z":
            circuit.cc_z(stmt[1], q(stmt[2]))
    return circuit


def parse_qasm(text: str) -> Circuit:
    """Parse QASM text into a flat-indexed Circuit. Gate order is preserved;
    qubit indices flatten registers in declaration order."""
    return _to_circuit(parse_program(text))


_EMIT_NAMES = {
    GateKind.X: "x", GateKind.Z: "z", GateKind.S: "s", GateKind.SDG: "sdg",
    GateKind.T: "t", GateKind.TDG: "tdg", GateKind.H: "h",
    GateKind.RX: "rx", GateKind.RZ: "rz", GateKind.CX: "cx", GateKind.CCX: "ccx",
}


def emit_qasm(circuit: Circuit) -> str:
    """Emit a circuit as OpenQASM 2.0 text.

    Classical bits become single-bit cregs (b0, b1, ...) so that
    classically-controlled corrections can be written as `if(bk==1) ...`.
    parse_qasm(emit_qasm(c)) reproduces c gate for gate.
    """
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";',
             f"qreg q[{circuit.num_qubits}];"]
    for b in range(circuit.num_bits):
        lines.append(f"creg b{b}[1];")
    for gate in circuit.gates:
        if gate.kind in _EMIT_NAMES:
            name = _EMIT_NAMES[gate.kind]
            args = ",".join(f"q[{i}]" for i in gate.qubits)
            if gate.params:
                params = ",".join(repr(p) for p in gate.params)
                lines.append(f"{name}({params}) {args};")
            else:
                lines.append(f"{name} {args};")
        elif gate.kind == GateKind.MEASURE:
            lines.append(f"measure q[{gate.qubits[0]}] -> b{gate.bits[0]}[0];")
        elif gate.kind == GateKind.BARRIER:
            args = ",".join(f"q[{i}]" for i in gate.qubits)
            lines.append(f"barrier {args};")
        elif gate.kind == GateKind.CC_X:
            lines.append(f"if(b{gate.bits[0]}==1) x q[{gate.qubits[0]}];")
        elif gate.kind == GateKind.CC_Z:
            lines.append(f"if(b{gate.bits[0]}==1) z q[{gate.qubits[0]}];")
        else:
            raise QasmError(f"gate kind {gate.kind.value} has no QASM form")
    return "\n".join(lines) + "\n"
