"""Line-oriented netlist language for optical bench descriptions.

Grammar ('#' starts a comment, statements are one per line):

    source NAME { key = value, ... }
    element NAME : KIND { key = value, ... }
    detector NAME : SPCM { key = value, ... }
    connect NAME.port -> NAME.port

Names are [A-Za-z_][A-Za-z0-9_]* and share one namespace. Values are
decimal numbers with an optional unit suffix (deg, rad, nm) or bare
identifiers; identifier values cover the scan symbols scan_phi,
scan_psi, scan_theta and the phase scope enum. The brace block may be
omitted when a statement has no parameters.

Element kinds and ports:

    BS      in1 in2 -> out1 out2   50:50 splitter
    PBS     in1 in2 -> out1 out2   polarizing splitter
    HWP     in -> out              half-wave plate, angle = plate angle
    PHASE   in -> out              phi = number or scan symbol,
                                   scope = both | h_only | v_only
    MIRROR  in -> out              global sign flip

Sources expose a single `out` port (keys: wavelength, intensity, and the
polarization components h_re, h_im, v_re, v_im, default vertical).
Detectors expose a single `in` port; `channel = 1` and `channel = 2`
mark the counting channels, unmarked detectors are monitors.

parse raises for malformed text, unknown kinds, duplicate names and
references to unknown ports. Structural problems that still yield a
well-formed description (dangling or doubly-driven ports, cycles, loss)
are reported by validate as Violation entries.
"""

import os
import re
from dataclasses import dataclass, field

import numpy as np
from importlib import resources

from . import optics

SCAN_SYMBOLS = ("scan_phi", "scan_psi", "scan_theta")

ELEMENT_PORTS = {
    "BS": (("in1", "in2"), ("out1", "out2")),
    "PBS": (("in1", "in2"), ("out1", "out2")),
    "HWP": (("in",), ("out",)),
    "PHASE": (("in",), ("out",)),
    "MIRROR": (("in",), ("out",)),
}

DETECTOR_KINDS = ("SPCM",)

ISOMETRY_TOL = 1e-10

BUILTIN_CIRCUITS = ("franson_modified", "franson_original")


class CircuitError(Exception):
    """Base class for netlist errors."""


class CircuitSyntaxError(CircuitError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class UnknownElementKindError(CircuitError):
    def __init__(self, kind, line):
        super().__init__(f"line {line}: unknown element kind '{kind}'")
        self.kind = kind
        self.line = line


class DuplicateNameError(CircuitError):
    def __init__(self, name, line):
        super().__init__(f"line {line}: duplicate name '{name}'")
        self.name = name
        self.line = line


class UnknownPortError(CircuitError):
    def __init__(self, reference, line, reason):
        super().__init__(f"line {line}: {reason}: '{reference}'")
        self.reference = reference
        self.line = line


class MissingBindingError(CircuitError):
    def __init__(self, symbol):
        super().__init__(f"no value bound for {symbol}")
        self.symbol = symbol


class CircuitGraphError(CircuitError):
    """Raised when a plan cannot be built from the description."""


@dataclass(frozen=True)
class Value:
    """One parameter value: a number with an optional unit, or a symbol."""

    number: float | None = None
    unit: str | None = None
    symbol: str | None = None

    def render(self):
        if self.symbol is not None:
            return self.symbol
        if self.number == int(self.number) and abs(self.number) < 1e15:
            text = str(int(self.number))
        else:
            text = repr(self.number)
        return text if self.unit is None else f"{text} {self.unit}"

    def angle_rad(self):
        if self.unit == "deg":
            return self.number * np.pi / 180.0
        return self.number


@dataclass(frozen=True)
class Source:
    name: str
    params: dict
    line: int = field(default=0, compare=False)

    def wavelength_nm(self):
        value = self.params.get("wavelength")
        return 532.0 if value is None else value.number

    def intensity(self):
        value = self.params.get("intensity")
        return 1.0 if value is None else value.number

    def polarization(self):
        """Normalized Jones vector, vertical unless component keys are set."""
        comp = {k: v.number for k, v in self.params.items() if k in _POL_KEYS}
        vec = np.array(
            [
                complex(comp.get("h_re", 0.0), comp.get("h_im", 0.0)),
                complex(comp.get("v_re", 1.0 if not comp else 0.0), comp.get("v_im", 0.0)),
            ]
        )
        norm = np.sqrt(optics.intensity(vec))
        if norm == 0.0:
            return np.array([0.0 + 0.0j, 1.0 + 0.0j])
        return vec / norm


@dataclass(frozen=True)
class Element:
    name: str
    kind: str
    params: dict
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Detector:
    name: str
    params: dict
    line: int = field(default=0, compare=False)

    def channel(self):
        value = self.params.get("channel")
        return 0 if value is None else int(value.number)


@dataclass(frozen=True)
class Connection:
    src: str
    src_port: str
    dst: str
    dst_port: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CircuitSpec:
    """Parsed netlist, statements kept in declaration order."""

    statements: tuple

    @property
    def sources(self):
        return tuple(s for s in self.statements if isinstance(s, Source))

    @property
    def elements(self):
        return tuple(s for s in self.statements if isinstance(s, Element))

    @property
    def detectors(self):
        return tuple(s for s in self.statements if isinstance(s, Detector))

    @property
    def connections(self):
        return tuple(s for s in self.statements if isinstance(s, Connection))

    @property
    def scan_bindings(self):
        """Map (element name, parameter key) -> scan symbol."""
        out = {}
        for el in self.elements:
            if el.kind != "PHASE":
                continue
            value = el.params["phi"]
            if value.symbol is not None:
                out[(el.name, "phi")] = value.symbol
        return out


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str
    message: str


# tokenizer

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<arrow>->)"
    r"|(?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[{}=,:.])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize_line(text, line_no):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise CircuitSyntaxError(
                f"unexpected character {text[pos]!r}", line_no, pos + 1
            )
        kind = match.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, match.group(), pos + 1))
        pos = match.end()
    tokens.append(_Token("eol", "", len(text) + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens, line_no):
        self.tokens = tokens
        self.line = line_no
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected):
        tok = self.peek()
        found = "end of line" if tok.kind == "eol" else repr(tok.text)
        raise CircuitSyntaxError(f"expected {expected}, found {found}", self.line, tok.column)

    def expect_id(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "id":
            self.fail(what)
        return self.advance()

    def expect_text(self, text):
        tok = self.peek()
        if tok.text != text:
            self.fail(f"'{text}'")
        return self.advance()

    def expect_eol(self):
        if self.peek().kind != "eol":
            self.fail("end of line")


# parameter schemas

_POL_KEYS = ("h_re", "h_im", "v_re", "v_im")
_ANGLE_UNITS = (None, "deg", "rad")
_KNOWN_UNITS = ("deg", "rad", "nm")


def _check_number(value, key, cursor, units=(None,)):
    if value.symbol is not None:
        raise CircuitSyntaxError(
            f"parameter '{key}' takes a numeric value, got '{value.symbol}'", cursor.line
        )
    if value.unit not in units:
        allowed = ", ".join(u for u in units if u) or "no unit"
        raise CircuitSyntaxError(
            f"parameter '{key}' takes {allowed}, got '{value.unit}'", cursor.line
        )


def _check_source_param(key, value, cursor):
    if key == "wavelength":
        _check_number(value, key, cursor, (None, "nm"))
        if value.number <= 0:
            raise CircuitSyntaxError("wavelength must be positive", cursor.line)
    elif key == "intensity":
        _check_number(value, key, cursor)
        if value.number < 0:
            raise CircuitSyntaxError("intensity must be nonnegative", cursor.line)
    elif key in _POL_KEYS:
        _check_number(value, key, cursor)
    else:
        raise CircuitSyntaxError(f"unknown source parameter '{key}'", cursor.line)


def _check_element_param(kind, key, value, cursor):
    if kind == "HWP" and key == "angle":
        _check_number(value, key, cursor, _ANGLE_UNITS)
    elif kind == "PHASE" and key == "phi":
        if value.symbol is not None:
            if value.symbol not in SCAN_SYMBOLS:
                raise CircuitSyntaxError(
                    f"unknown scan symbol '{value.symbol}'", cursor.line
                )
        else:
            _check_number(value, key, cursor, _ANGLE_UNITS)
    elif kind == "PHASE" and key == "scope":
        if value.symbol not in optics.PHASE_SCOPES:
            raise CircuitSyntaxError(
                "scope must be one of both, h_only, v_only", cursor.line
            )
    else:
        raise CircuitSyntaxError(f"unknown parameter '{key}' for {kind}", cursor.line)


def _check_detector_param(key, value, cursor):
    if key != "channel":
        raise CircuitSyntaxError(f"unknown detector parameter '{key}'", cursor.line)
    _check_number(value, key, cursor)
    if value.number != int(value.number) or value.number < 0:
        raise CircuitSyntaxError("channel must be a nonnegative integer", cursor.line)


def _parse_value(cursor):
    tok = cursor.peek()
    if tok.kind == "number":
        cursor.advance()
        unit = None
        if cursor.peek().kind == "id":
            unit = cursor.advance().text
            if unit not in _KNOWN_UNITS:
                raise CircuitSyntaxError(
                    f"unknown unit '{unit}'", cursor.line, cursor.tokens[cursor.i - 1].column
                )
        return Value(number=float(tok.text), unit=unit)
    if tok.kind == "id":
        cursor.advance()
        return Value(symbol=tok.text)
    cursor.fail("a value")


def _parse_params(cursor):
    params = {}
    if cursor.peek().text != "{":
        return params
    cursor.advance()
    if cursor.peek().text == "}":
        cursor.advance()
        return params
    while True:
        key = cursor.expect_id("parameter name").text
        if key in params:
            raise CircuitSyntaxError(f"duplicate parameter '{key}'", cursor.line)
        cursor.expect_text("=")
        params[key] = _parse_value(cursor)
        tok = cursor.peek()
        if tok.text == ",":
            cursor.advance()
            continue
        if tok.text == "}":
            cursor.advance()
            return params
        cursor.fail("',' or '}'")


def _parse_port_ref(cursor):
    name = cursor.expect_id("an element name").text
    cursor.expect_text(".")
    port = cursor.expect_id("a port name").text
    return name, port


def parse(text):
    """Parse netlist text into a CircuitSpec."""
    statements = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0]
        if not stripped.strip():
            continue
        cursor = _Cursor(_tokenize_line(stripped, line_no), line_no)
        keyword = cursor.peek()
        if keyword.kind != "id" or keyword.text not in (
            "source",
            "element",
            "detector",
            "connect",
        ):
            cursor.fail("'source', 'element', 'detector' or 'connect'")
        cursor.advance()
        if keyword.text == "source":
            name = cursor.expect_id("a source name").text
            params = _parse_params(cursor)
            cursor.expect_eol()
            for key, value in params.items():
                _check_source_param(key, value, cursor)
            statements.append(Source(name, params, line_no))
        elif keyword.text == "element":
            name = cursor.expect_id("an element name").text
            cursor.expect_text(":")
            kind = cursor.expect_id("an element kind").text
            if kind not in ELEMENT_PORTS:
                raise UnknownElementKindError(kind, line_no)
            params = _parse_params(cursor)
            cursor.expect_eol()
            for key, value in params.items():
                _check_element_param(kind, key, value, cursor)
            if kind == "HWP" and "angle" not in params:
                raise CircuitSyntaxError("HWP requires an angle", line_no)
            if kind == "PHASE" and "phi" not in params:
                raise CircuitSyntaxError("PHASE requires phi", line_no)
            statements.append(Element(name, kind, params, line_no))
        elif keyword.text == "detector":
            name = cursor.expect_id("a detector name").text
            cursor.expect_text(":")
            kind = cursor.expect_id("a detector kind").text
            if kind not in DETECTOR_KINDS:
                raise UnknownElementKindError(kind, line_no)
            params = _parse_params(cursor)
            cursor.expect_eol()
            for key, value in params.items():
                _check_detector_param(key, value, cursor)
            statements.append(Detector(name, params, line_no))
        else:
            src, src_port = _parse_port_ref(cursor)
            cursor.expect_text("->")
            dst, dst_port = _parse_port_ref(cursor)
            cursor.expect_eol()
            statements.append(Connection(src, src_port, dst, dst_port, line_no))

    spec = CircuitSpec(tuple(statements))
    if not spec.sources:
        raise CircuitSyntaxError("no source declared", 1)

    named = {}
    for st in spec.statements:
        if isinstance(st, Connection):
            continue
        if st.name in named:
            raise DuplicateNameError(st.name, st.line)
        named[st.name] = st

    for conn in spec.connections:
        _resolve_port(named, conn.src, conn.src_port, "output", conn.line)
        _resolve_port(named, conn.dst, conn.dst_port, "input", conn.line)
    return spec


def _resolve_port(named, name, port, direction, line):
    ref = f"{name}.{port}"
    st = named.get(name)
    if st is None:
        raise UnknownPortError(ref, line, "unknown name")
    if isinstance(st, Source):
        ports = ("out",) if direction == "output" else ()
    elif isinstance(st, Detector):
        ports = ("in",) if direction == "input" else ()
    else:
        ins, outs = ELEMENT_PORTS[st.kind]
        ports = outs if direction == "output" else ins
    if port not in ports:
        raise UnknownPortError(ref, line, f"not an {direction} port")


def serialize(spec):
    """Render a CircuitSpec as canonical netlist text.

    One statement per line in declaration order, normalized spacing,
    braces omitted when a statement has no parameters. Idempotent:
    parse(serialize(spec)) equals spec.
    """
    lines = []
    for st in spec.statements:
        if isinstance(st, Source):
            lines.append(f"source {st.name}{_render_params(st.params)}")
        elif isinstance(st, Element):
            lines.append(f"element {st.name} : {st.kind}{_render_params(st.params)}")
        elif isinstance(st, Detector):
            lines.append(f"detector {st.name} : SPCM{_render_params(st.params)}")
        else:
            lines.append(f"connect {st.src}.{st.src_port} -> {st.dst}.{st.dst_port}")
    return "\n".join(lines) + "\n"


def _render_params(params):
    if not params:
        return ""
    inner = ", ".join(f"{key} = {value.render()}" for key, value in params.items())
    return " { " + inner + " }"


# validation


def validate(spec):
    """Check structural invariants, returning a list of Violation entries.

    Empty list means valid: every input port driven exactly once, every
    output port consumed exactly once (detectors terminate), no cycles,
    and the source-to-detector map is an isometry within 1e-10.
    """
    violations = []
    inputs = {}
    outputs = {}
    for st in spec.statements:
        if isinstance(st, Source):
            outputs[(st.name, "out")] = 0
        elif isinstance(st, Element):
            ins, outs = ELEMENT_PORTS[st.kind]
            for p in ins:
                inputs[(st.name, p)] = 0
            for p in outs:
                outputs[(st.name, p)] = 0
        elif isinstance(st, Detector):
            inputs[(st.name, "in")] = 0
    for conn in spec.connections:
        outputs[(conn.src, conn.src_port)] += 1
        inputs[(conn.dst, conn.dst_port)] += 1

    for (name, port), count in inputs.items():
        if count == 0:
            violations.append(
                Violation("dangling-port", f"{name}.{port}", "input port has no driver")
            )
        elif count > 1:
            violations.append(
                Violation(
                    "doubly-driven-port",
                    f"{name}.{port}",
                    f"input port driven by {count} connections",
                )
            )
    for (name, port), count in outputs.items():
        if count == 0:
            violations.append(
                Violation(
                    "dangling-port", f"{name}.{port}", "output port is not terminated"
                )
            )
        elif count > 1:
            violations.append(
                Violation(
                    "doubly-driven-port",
                    f"{name}.{port}",
                    f"output port feeds {count} connections",
                )
            )

    cycle = _find_cycle(spec)
    if cycle:
        violations.append(
            Violation("cycle", " -> ".join(cycle), "connections form a cycle")
        )

    if not violations:
        deviation = isometry_deviation(compile_plan(spec))
        if deviation > ISOMETRY_TOL:
            violations.append(
                Violation(
                    "not-lossless",
                    "circuit",
                    f"source-to-detector map deviates from an isometry by {deviation:.3e}",
                )
            )
    return violations


def _adjacency(spec):
    nodes = [st.name for st in spec.statements if not isinstance(st, Connection)]
    edges = {}
    for conn in spec.connections:
        edges.setdefault(conn.src, set()).add(conn.dst)
    return nodes, edges


def _find_cycle(spec):
    nodes, edges = _adjacency(spec)
    state = {name: 0 for name in nodes}  # 0 new, 1 active, 2 done

    for start in nodes:
        if state[start] != 0:
            continue
        stack = [(start, iter(sorted(edges.get(start, ()))))]
        state[start] = 1
        path = [start]
        while stack:
            name, it = stack[-1]
            advanced = False
            for nxt in it:
                if state.get(nxt, 2) == 1:
                    return path[path.index(nxt):] + [nxt]
                if state.get(nxt, 2) == 0:
                    state[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(sorted(edges.get(nxt, ())))))
                    advanced = True
                    break
            if not advanced:
                state[name] = 2
                path.pop()
                stack.pop()
    return None


# compilation and evaluation


@dataclass(frozen=True)
class PlanSource:
    name: str
    amplitude: np.ndarray  # (2,) complex, sqrt(intensity) * unit polarization
    wavelength_nm: float


@dataclass(frozen=True)
class PlanStep:
    name: str
    kind: str
    inputs: tuple  # ((producer name, port), ...) matching the kind's input ports
    angle: float = 0.0
    phi: float | None = None
    symbol: str | None = None
    scope: str = "both"


@dataclass(frozen=True)
class EvaluationPlan:
    sources: tuple
    steps: tuple  # topologically ordered, detectors included as SPCM steps
    detectors: tuple  # ((name, channel), ...) in declaration order
    scan_symbols: frozenset


def compile_plan(spec):
    """Lower a validated CircuitSpec to a topologically ordered plan.

    Precondition: validate(spec) returned no violations. Cycles and
    missing drivers raise CircuitGraphError here as a safety net.
    """
    driver = {}
    for conn in spec.connections:
        driver[(conn.dst, conn.dst_port)] = (conn.src, conn.src_port)

    by_name = {st.name: st for st in spec.statements if not isinstance(st, Connection)}
    nodes, edges = _adjacency(spec)
    order_index = {name: i for i, name in enumerate(nodes)}

    indegree = {name: 0 for name in nodes}
    for src, dsts in edges.items():
        for dst in dsts:
            indegree[dst] += 1
    ready = sorted((name for name, deg in indegree.items() if deg == 0), key=order_index.get)
    topo = []
    while ready:
        name = ready.pop(0)
        topo.append(name)
        for nxt in sorted(edges.get(name, ()), key=order_index.get):
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                ready.append(nxt)
        ready.sort(key=order_index.get)
    if len(topo) != len(nodes):
        raise CircuitGraphError("connections form a cycle")

    sources = []
    steps = []
    symbols = set()
    for name in topo:
        st = by_name[name]
        if isinstance(st, Source):
            amplitude = np.sqrt(st.intensity()) * st.polarization()
            sources.append(PlanSource(st.name, amplitude, st.wavelength_nm()))
            continue
        if isinstance(st, Detector):
            kind, in_ports = "SPCM", ("in",)
        else:
            kind = st.kind
            in_ports, _ = ELEMENT_PORTS[kind]
        try:
            inputs = tuple(driver[(name, p)] for p in in_ports)
        except KeyError as exc:
            raise CircuitGraphError(f"input port {name}.{exc.args[0][1]} has no driver") from None
        angle = 0.0
        phi = None
        symbol = None
        scope = "both"
        if isinstance(st, Element):
            if kind == "HWP":
                angle = st.params["angle"].angle_rad()
            elif kind == "PHASE":
                value = st.params["phi"]
                if value.symbol is not None:
                    symbol = value.symbol
                    symbols.add(symbol)
                else:
                    phi = value.angle_rad()
                scope_value = st.params.get("scope")
                if scope_value is not None:
                    scope = scope_value.symbol
        steps.append(PlanStep(name, kind, inputs, angle, phi, symbol, scope))

    detectors = tuple((d.name, d.channel()) for d in spec.detectors)
    return EvaluationPlan(tuple(sources), tuple(steps), detectors, frozenset(symbols))


def _binding_value(bindings, symbol):
    short = symbol[len("scan_"):]
    if bindings is not None:
        if symbol in bindings:
            return np.asarray(bindings[symbol], dtype=np.float64)
        if short in bindings:
            return np.asarray(bindings[short], dtype=np.float64)
    raise MissingBindingError(symbol)


def evaluate(plan, bindings=None, source_fields=None):
    """Propagate fields through the plan, returning detector name -> field.

    bindings maps scan symbols (or the short names phi, psi, theta) to
    scalars or arrays; arrays broadcast together and evaluate the whole
    batch in one pass. source_fields optionally overrides the emitted
    field of named sources, e.g. with unit basis vectors.
    """
    fields = {}
    for src in plan.sources:
        if source_fields is not None and src.name in source_fields:
            emitted = np.asarray(source_fields[src.name], dtype=np.complex128)
        else:
            emitted = src.amplitude
        fields[(src.name, "out")] = emitted

    results = {}
    for step in plan.steps:
        ins = tuple(fields[key] for key in step.inputs)
        if step.kind == "BS":
            out1, out2 = optics.bs_apply(*ins)
            fields[(step.name, "out1")] = out1
            fields[(step.name, "out2")] = out2
        elif step.kind == "PBS":
            out1, out2 = optics.pbs_apply(*ins)
            fields[(step.name, "out1")] = out1
            fields[(step.name, "out2")] = out2
        elif step.kind == "HWP":
            fields[(step.name, "out")] = optics.hwp_apply(ins[0], step.angle)
        elif step.kind == "PHASE":
            phi = step.phi if step.symbol is None else _binding_value(bindings, step.symbol)
            fields[(step.name, "out")] = optics.phase_apply(ins[0], phi, step.scope)
        elif step.kind == "MIRROR":
            fields[(step.name, "out")] = optics.mirror_apply(ins[0])
        else:  # SPCM
            results[step.name] = ins[0]

    shape = np.broadcast_shapes(*(f.shape for f in results.values()))
    return {name: np.broadcast_to(f, shape).copy() for name, f in results.items()}


def counting_channels(plan):
    """Names of the channel-1 and channel-2 detectors, in channel order."""
    marked = {ch: name for name, ch in plan.detectors if ch > 0}
    if sorted(marked) != [1, 2]:
        raise CircuitGraphError("expected exactly two counting channels (1 and 2)")
    return marked[1], marked[2]


def transfer_matrix(plan, bindings=None):
    """Linear map from stacked source components to stacked detector components.

    Scan symbols default to 0; the map is evaluated once per source basis
    vector. Rows follow detector declaration order, columns source order,
    each expanded as (horizontal, vertical).
    """
    if bindings is None:
        bindings = {}
    full = {sym: np.asarray(bindings.get(sym, bindings.get(sym[5:], 0.0)), float)
            for sym in plan.scan_symbols}
    n_src = len(plan.sources)
    batch = 2 * n_src
    overrides = {}
    for i, src in enumerate(plan.sources):
        basis = np.zeros((batch, 2), dtype=np.complex128)
        basis[2 * i, 0] = 1.0
        basis[2 * i + 1, 1] = 1.0
        overrides[src.name] = basis
    out = evaluate(plan, full, source_fields=overrides)
    rows = []
    for name, _channel in plan.detectors:
        f = out[name]
        rows.append(f[:, 0])
        rows.append(f[:, 1])
    return np.array(rows)


def isometry_deviation(plan):
    """Max elementwise deviation of M*M from the identity on source space."""
    m = transfer_matrix(plan)
    gram = m.conj().T @ m
    return float(np.abs(gram - np.eye(gram.shape[0])).max())


# builtin corpus


def builtin_circuit_text(name):
    """Return the text of a shipped circuit ('franson_modified' or 'franson_original')."""
    if name not in BUILTIN_CIRCUITS:
        raise KeyError(f"no builtin circuit named '{name}'")
    return resources.files(__package__).joinpath(f"circuits/{name}.circuit").read_text()


def load_circuit(ref):
    """Parse a circuit from a filesystem path or a builtin name.

    An existing file wins; otherwise the name, with or without a
    .circuit suffix, selects a shipped circuit.
    """
    ref = str(ref)
    if not os.path.exists(ref):
        name = ref[:-8] if ref.endswith(".circuit") else ref
        if name in BUILTIN_CIRCUITS:
            return parse(builtin_circuit_text(name))
    with open(ref, "r", encoding="utf-8") as fh:
        return parse(fh.read())
