"""State expressions and JSON state files.

Expression grammar::

    mixture := term ('+' term)*
    term    := [NUMBER '*'] product
    product := factor ('*' factor)*
    factor  := NAME '(' [arg (',' arg)*] ')' | 'file:' PATH

with atoms ``ghz(n)``, ``w(n)``, ``bell(psip|psim|phip|phim)``,
``ket(bits)`` and ``rand(d_1, ..., d_k, seed)``. ``*`` between factors
is the tensor product, parties composing left to right.

File formats (row-major amplitudes, party 1 slowest)::

    {"dims": [2, 2], "amps": [[re, im], ...]}
    {"dims": [2, 2], "matrix": [[[re, im], ...], ...]}
"""

import json
import re
from pathlib import Path

import numpy as np

from . import states
from .exceptions import ArgumentError, DimensionError, ParseError, StateFileError
from .tensor import DensityMatrix, PureState, kron

_TOKEN = re.compile(
    r"\s*(?:(?P<file>file:[^\s*+]+)|(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[*+(),]))"
)


def _tokenize(text):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            pos += len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, normalize):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.normalize = normalize

    def peek(self, k=0):
        return self.toks[self.i + k]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def mixture(self):
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.take()
            terms.append(self.term())
        self.take("end")
        return terms

    def term(self):
        tok = self.peek()
        weight = None
        if tok[0] == "num" and self.peek(1)[1] == "*":
            weight = float(tok[1])
            self.i += 2
        return weight, tok[2], self.product()

    def product(self):
        factors = [self.factor()]
        while self.peek()[1] == "*":
            self.take()
            factors.append(self.factor())
        if len(factors) == 1:
            return factors[0]
        for f in factors:
            if isinstance(f, DensityMatrix):
                raise ParseError("density-matrix files cannot be tensored", self.peek()[2])
        return kron(*factors)

    def factor(self):
        kind, value, pos = self.peek()
        if kind == "file":
            self.take()
            return load_state_file(value[len("file:"):], normalize=self.normalize)
        if kind != "name":
            raise ParseError(f"expected a state atom, found {value or 'end of input'!r}", pos)
        self.take()
        self.take("op", "(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.take()[1:])
            while self.peek()[1] == ",":
                self.take()
                args.append(self.take()[1:])
        self.take("op", ")")
        return _atom(value, args, pos)


def _int_arg(arg, what):
    text, pos = arg
    if not text.isdigit():
        raise ParseError(f"{what} must be a non-negative integer, got {text!r}", pos)
    return int(text)


def _atom(name, args, pos):
    try:
        if name in ("ghz", "w"):
            if len(args) != 1:
                raise ParseError(f"{name}() takes one argument", pos)
            n = _int_arg(args[0], "n")
            return states.ghz(n) if name == "ghz" else states.w(n)
        if name == "bell":
            if len(args) != 1:
                raise ParseError("bell() takes one argument", pos)
            return states.bell(args[0][0])
        if name == "ket":
            if len(args) != 1:
                raise ParseError("ket() takes one argument", pos)
            text, apos = args[0]
            if not text or set(text) - {"0", "1"}:
                raise ParseError(f"ket() needs a bitstring, got {text!r}", apos)
            return states.ket(text)
        if name == "rand":
            if len(args) < 2:
                raise ParseError("rand() needs at least one dimension and a seed", pos)
            dims = [_int_arg(a, "dimension") for a in args[:-1]]
            seed = _int_arg(args[-1], "seed")
            return states.rand(dims, seed)
    except ArgumentError as exc:
        raise ParseError(str(exc), pos) from exc
    raise ParseError(f"unknown state atom {name!r}", pos)


def parse_state(text: str, normalize: bool = False) -> PureState:
    """Parse a pure-state expression such as ``"bell(psim)*ket(0)"``."""
    p = _Parser(text, normalize)
    weight, pos, st = p.term()
    if weight is not None:
        raise ParseError("weights are only allowed in mixtures", pos)
    p.take("end")
    if not isinstance(st, PureState):
        raise ParseError("expected a pure state, got a density matrix", 0)
    return st


def parse_mixture(text: str, normalize: bool = False) -> DensityMatrix:
    """Parse ``"p1 * SPEC1 + p2 * SPEC2 ..."`` into a density matrix.

    A single unweighted term is the corresponding pure (or file) state.
    Weights must sum to 1 unless ``normalize`` is set.
    """
    terms = _Parser(text, normalize).mixture()
    if len(terms) > 1 and any(w is None for w, _, _ in terms):
        pos = next(p for w, p, _ in terms if w is None)
        raise ParseError("every term of a mixture needs a weight", pos)
    weights = np.array([1.0 if w is None else w for w, _, _ in terms])
    total = weights.sum()
    if abs(total - 1) > 1e-9:
        if not normalize:
            raise ArgumentError(f"mixture weights sum to {total:.12g}, not 1")
        weights = weights / total
    dims = terms[0][2].dims
    mat = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for wgt, pos, st in zip(weights, (p for _, p, _ in terms), (s for _, _, s in terms)):
        if st.dims != dims:
            raise DimensionError(f"mixture term at position {pos} has dims {st.dims}, expected {dims}")
        m = st.matrix if isinstance(st, DensityMatrix) else np.outer(st.amps, st.amps.conj())
        mat += wgt * m
    return DensityMatrix(dims, mat)


def _pairs(values):
    return [[float(z.real), float(z.imag)] for z in values]


def _complex(pairs, where):
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{where}: {exc}") from exc
    if arr.ndim < 2 or arr.shape[-1] != 2:
        raise StateFileError(f"{where}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json(obj) -> dict:
    if isinstance(obj, PureState):
        return {"dims": list(obj.dims), "amps": _pairs(obj.amps)}
    if isinstance(obj, DensityMatrix):
        return {"dims": list(obj.dims), "matrix": [_pairs(row) for row in obj.matrix]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_state_file(obj, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(obj)))


def load_state_file(path, normalize: bool = False):
    """Read a pure-state (``amps``) or density-matrix (``matrix``) file."""
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise StateFileError(f"no such state file: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot read state file {path}: {exc}") from exc
    if not isinstance(data, dict) or "dims" not in data:
        raise StateFileError(f"{path}: expected an object with 'dims'")
    # norm and PSD violations propagate as numeric errors, not file errors
    if "amps" in data:
        return PureState(data["dims"], _complex(data["amps"], path), normalize=normalize)
    if "matrix" in data:
        return DensityMatrix(data["dims"], _complex(data["matrix"], path))
    raise StateFileError(f"{path}: expected 'amps' or 'matrix'")
