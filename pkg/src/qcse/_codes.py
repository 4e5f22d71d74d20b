"""Integer opcodes shared by the kernel backends.

Both kernel modules consume gates as flat arrays of (code, q0, q1, angle);
the codes below are the single source of truth for that encoding. q1 is
ignored for single-qubit gates, angle for non-rotation gates.
"""

KIND_H = 0
KIND_X = 1
KIND_Y = 2
KIND_Z = 3
KIND_RX = 4
KIND_RZ = 5
KIND_CNOT = 6
KIND_CZ = 7
KIND_CRZ = 8

CODE_OF_KIND = {
    "H": KIND_H,
    "X": KIND_X,
    "Y": KIND_Y,
    "Z": KIND_Z,
    "RX": KIND_RX,
    "RZ": KIND_RZ,
    "CNOT": KIND_CNOT,
    "CZ": KIND_CZ,
    "CRZ": KIND_CRZ,
}

ROTATION_KINDS = frozenset({"RX", "RZ", "CRZ"})
TWO_QUBIT_KINDS = frozenset({"CNOT", "CZ", "CRZ"})
