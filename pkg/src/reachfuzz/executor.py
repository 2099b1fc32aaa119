"""Instrumented execution of a program on an input sequence.

An execution consumes one symbol per step and feeds two fitness maps:
a 65,536-byte branch-pair map (index = (prev_tag >> 1) XOR tag(block),
saturating hit counts, classified into logarithmic buckets) and a
65,536-bit state map indexed by an FNV-1a hash of the global valuation
after each completed step. The previous-tag register persists across
steps within one run, so branch pairs capture cross-step sequencing.

Two equivalent engines are provided: a CFG-walking interpreter that can
record full block traces, and a compiled target that turns program +
plan + tags into generated Python for campaign-scale throughput. Both
implement identical semantics; the test suite cross-checks them against
the AST reference interpreter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cfg import Branch, Cfg, Exit, ExitKind, Jump, build_cfg
from .frontend import (
    Assign,
    Binary,
    IntLit,
    Name,
    Program,
    Unary,
    eval_expr,
)
from .instrument import InstrumentationPlan

MAP_SIZE = 65536  # branch-pair byte map entries; also state-map bit count
STATE_BYTES = MAP_SIZE // 8
DEFAULT_MAX_STEPS = 4096
DEFAULT_STATE_KEY_CAP = 10**6

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_U64 = (1 << 64) - 1

STATUS_OK = "ok"
STATUS_ERROR = "error"
STATUS_INVALID = "invalid_input"
STATUS_STEP_LIMIT = "step_limit"
_STATUS_BY_CODE = (STATUS_OK, STATUS_ERROR, STATUS_INVALID, STATUS_STEP_LIMIT)


def _build_bucket_lut() -> bytes:
    lut = bytearray(256)
    for n in range(256):
        if n == 0:
            v = 0x00
        elif n == 1:
            v = 0x01
        elif n == 2:
            v = 0x02
        elif n == 3:
            v = 0x04
        elif n <= 7:
            v = 0x08
        elif n <= 15:
            v = 0x10
        elif n <= 31:
            v = 0x20
        elif n <= 127:
            v = 0x40
        else:
            v = 0x80
        lut[n] = v
    return bytes(lut)


BUCKET_LUT = _build_bucket_lut()


def classify_counts(raw: int) -> int:
    """Bucket bitmask for a raw hit count (0, 1, 2, 3, 4-7, ... 128-255)."""
    return BUCKET_LUT[raw]


def state_key(values) -> int:
    """FNV-1a 64-bit over little-endian 8-byte two's-complement encodings.

    Values are hashed in declaration order; the empty valuation hashes to
    the offset basis. Bit-exact by construction.
    """
    h = FNV_OFFSET
    for v in values:
        for byte in (v & _U64).to_bytes(8, "little"):
            h = ((h ^ byte) * FNV_PRIME) & _U64
    return h


def state_index(key: int) -> int:
    return key % MAP_SIZE


@dataclass(frozen=True)
class ExecResult:
    """Everything one execution produced.

    counts is the local 65,536-byte branch map with raw saturating hit
    counts; touched lists exactly the nonzero indices (first-touch order).
    state_keys/state_indices are per completed step, in step order.
    """

    status: str
    error_id: "int | None"
    steps: int
    counts: bytearray
    touched: "tuple[int, ...]"
    state_keys: "tuple[int, ...]"
    state_indices: "tuple[int, ...]"
    outputs: "tuple[int, ...]"
    final_values: "tuple[int, ...]"
    trace: "tuple[int, ...] | None" = None


@dataclass(frozen=True)
class NoveltyReport:
    new_branch_bits: bool
    new_state_bits: bool


@dataclass
class GlobalMaps:
    """Campaign-global coverage state: virgin branch buckets + state bits.

    Bits are only ever set; merging is idempotent and order-insensitive
    for the final bit state. The exact key set exists for statistics only
    and is capped.
    """

    virgin_branch: bytearray = field(default_factory=lambda: bytearray(MAP_SIZE))
    state_bits: bytearray = field(default_factory=lambda: bytearray(STATE_BYTES))
    state_keys: set = field(default_factory=set)
    state_key_cap: int = DEFAULT_STATE_KEY_CAP

    def merge_and_report(self, result: ExecResult) -> NoveltyReport:
        new_branch = False
        virgin = self.virgin_branch
        counts = result.counts
        lut = BUCKET_LUT
        for idx in result.touched:
            mask = lut[counts[idx]]
            cur = virgin[idx]
            if mask & ~cur:
                virgin[idx] = cur | mask
                new_branch = True
        new_state = False
        bits = self.state_bits
        keys = self.state_keys
        cap = self.state_key_cap
        for key in result.state_keys:
            idx = key & 0xFFFF
            b = bits[idx >> 3]
            m = 1 << (idx & 7)
            if not b & m:
                bits[idx >> 3] = b | m
                new_state = True
            if len(keys) < cap:
                keys.add(key)
        return NoveltyReport(new_branch, new_state)

    def branch_bit_count(self) -> int:
        return int.from_bytes(self.virgin_branch, "little").bit_count()

    def state_bit_count(self) -> int:
        return int.from_bytes(self.state_bits, "little").bit_count()


# --- CFG-walking interpreter ------------------------------------------------


def interpret_run(
    program: Program,
    g: Cfg,
    plan: InstrumentationPlan,
    input_seq,
    max_steps: int = DEFAULT_MAX_STEPS,
    record_trace: bool = False,
) -> ExecResult:
    """Reference engine: walk the CFG block by block with explicit probes."""
    if g.tags is None:
        raise ValueError("cfg carries no tag table")
    tags = g.tags
    instrumented = plan.instrumented
    env = {name: value for name, value in program.globals}
    names = program.global_names()
    lo, hi = program.alphabet_lo, program.alphabet_hi

    counts = bytearray(MAP_SIZE)
    touched: "list[int]" = []
    keys: "list[int]" = []
    outputs: "list[int]" = []
    trace: "list[int]" = []
    prev = tags[g.entry]
    status = STATUS_OK
    error_id = None
    steps = 0

    for sym in input_seq:
        if steps >= max_steps:
            status = STATUS_STEP_LIMIT
            break
        if sym < lo or sym > hi:
            status = STATUS_INVALID
            break
        env[program.param] = sym
        bid = g.entry
        exited = None
        while exited is None:
            if record_trace:
                trace.append(bid)
            if bid in instrumented:
                idx = (prev >> 1) ^ tags[bid]
                c = counts[idx]
                if c == 0:
                    counts[idx] = 1
                    touched.append(idx)
                elif c < 255:
                    counts[idx] = c + 1
                prev = tags[bid]
            blk = g.block(bid)
            for st in blk.stmts:
                if isinstance(st, Assign):
                    env[st.name] = eval_expr(st.expr, env)
                else:
                    outputs.append(st.value)
            term = blk.term
            if isinstance(term, Jump):
                bid = term.target
            elif isinstance(term, Branch):
                bid = term.then_id if eval_expr(term.cond, env) != 0 else term.else_id
            else:
                exited = term
        if exited.kind is ExitKind.OK:
            steps += 1
            keys.append(state_key([env[n] for n in names]))
        elif exited.kind is ExitKind.ERROR:
            status = STATUS_ERROR
            error_id = exited.error_id
            break
        else:
            status = STATUS_INVALID
            break

    key_tuple = tuple(keys)
    return ExecResult(
        status=status,
        error_id=error_id,
        steps=steps,
        counts=counts,
        touched=tuple(touched),
        state_keys=key_tuple,
        state_indices=tuple(k & 0xFFFF for k in key_tuple),
        outputs=tuple(outputs),
        final_values=tuple(env[n] for n in names),
        trace=tuple(trace) if record_trace else None,
    )


# --- compiled target --------------------------------------------------------

_WRAP_BIAS = 1 << 63


def _wrap_src(inner: str) -> str:
    return f"((({inner}) + {_WRAP_BIAS}) & {_U64}) - {_WRAP_BIAS}"


class _ExprGen:
    """Translate expressions to Python source.

    Arithmetic is congruent mod 2^64, so intermediate results stay
    unwrapped and a single wrap is applied where a value becomes
    observable: assignments, emits, comparison operands, truth tests.
    Names and literals are always already in wrapped form.
    """

    def __init__(self, rename: dict):
        self.rename = rename

    def value(self, e) -> str:
        """Source congruent to the value mod 2^64 (may exceed i64 range)."""
        if isinstance(e, IntLit):
            return repr(e.value)
        if isinstance(e, Name):
            return self.rename[e.ident]
        if isinstance(e, Unary):
            if e.op == "-":
                return f"(-{self.value(e.operand)})"
            return f"(0 if {self.truth(e.operand)} else 1)"
        if e.op in ("+", "-", "*"):
            return f"({self.value(e.lhs)} {e.op} {self.value(e.rhs)})"
        if e.op in ("&&", "||"):
            return f"(1 if {self.truth(e)} else 0)"
        return f"(1 if {self.wrapped(e.lhs)} {e.op} {self.wrapped(e.rhs)} else 0)"

    def wrapped(self, e) -> str:
        """Source for the exact signed-64 value."""
        if isinstance(e, (IntLit, Name)):
            return self.value(e)
        if isinstance(e, Unary) and e.op == "!":
            return self.value(e)
        if isinstance(e, Binary) and e.op not in ("+", "-", "*"):
            return self.value(e)
        return f"({_wrap_src(self.value(e))})"

    def truth(self, e) -> str:
        if isinstance(e, IntLit):
            return "True" if e.value else "False"
        if isinstance(e, Unary) and e.op == "!":
            return f"(not {self.truth(e.operand)})"
        if isinstance(e, Binary):
            if e.op == "&&":
                return f"({self.truth(e.lhs)} and {self.truth(e.rhs)})"
            if e.op == "||":
                return f"({self.truth(e.lhs)} or {self.truth(e.rhs)})"
            if e.op not in ("+", "-", "*"):
                return f"({self.wrapped(e.lhs)} {e.op} {self.wrapped(e.rhs)})"
        return f"({self.wrapped(e)} != 0)"


def _emit_body(
    g: Cfg,
    instrumented: frozenset,
    gen: _ExprGen,
    lines: "list[str]",
    bid: int,
    stop: "int | None",
    depth: int,
) -> None:
    """Emit structured Python for the block subgraph from bid up to stop.

    The lowering only produces series-parallel DAGs, so every branch
    carries the join hint needed to rebuild if/else nesting.
    """
    pad = "    " * depth
    tags = g.tags
    while bid != stop:
        blk = g.block(bid)
        if bid in instrumented:
            t = tags[bid]
            lines.append(f"{pad}i = (prev >> 1) ^ {t}")
            lines.append(f"{pad}c = m[i]")
            lines.append(f"{pad}if c == 0:")
            lines.append(f"{pad}    m[i] = 1")
            lines.append(f"{pad}    t.append(i)")
            lines.append(f"{pad}elif c < 255:")
            lines.append(f"{pad}    m[i] = c + 1")
            lines.append(f"{pad}prev = {t}")
        for st in blk.stmts:
            if isinstance(st, Assign):
                lines.append(f"{pad}{gen.rename[st.name]} = {gen.wrapped(st.expr)}")
            else:
                lines.append(f"{pad}out.append({st.value})")
        term = blk.term
        if isinstance(term, Jump):
            bid = term.target
            continue
        if isinstance(term, Exit):
            if term.kind is ExitKind.ERROR:
                lines.append(f"{pad}st = 1")
                lines.append(f"{pad}err = {term.error_id}")
                lines.append(f"{pad}break")
            elif term.kind is ExitKind.INVALID_INPUT:
                lines.append(f"{pad}st = 2")
                lines.append(f"{pad}break")
            # ok-exits fall through to the step epilogue
            return
        join = term.join_id
        then_id, else_id = term.then_id, term.else_id
        if then_id == else_id:
            # both arms empty: condition is pure, nothing to evaluate
            bid = then_id
            continue
        if then_id == join:
            lines.append(f"{pad}if not {gen.truth(term.cond)}:")
            _emit_arm(g, instrumented, gen, lines, else_id, join, depth + 1)
        else:
            lines.append(f"{pad}if {gen.truth(term.cond)}:")
            _emit_arm(g, instrumented, gen, lines, then_id, join, depth + 1)
            if else_id != join:
                lines.append(f"{pad}else:")
                _emit_arm(g, instrumented, gen, lines, else_id, join, depth + 1)
        if join is None:
            return
        bid = join


def _emit_arm(g, instrumented, gen, lines, bid, stop, depth) -> None:
    mark = len(lines)
    _emit_body(g, instrumented, gen, lines, bid, stop, depth)
    if len(lines) == mark:
        lines.append("    " * depth + "pass")


def _generate_source(program: Program, g: Cfg, instrumented: frozenset) -> str:
    rename = {name: f"_g{i}" for i, (name, _) in enumerate(program.globals)}
    rename[program.param] = "_s"
    gen = _ExprGen(rename)
    gvars = [rename[name] for name in program.global_names()]
    tuple_src = "(" + "".join(v + ", " for v in gvars) + ")"

    lines = [
        "def _target(seq, max_steps, m, t, sk, kc, out, _fnv=state_key):",
    ]
    for (name, init) in program.globals:
        lines.append(f"    {rename[name]} = {init}")
    lines.append(f"    prev = {g.tags[g.entry]}")
    lines.append("    st = 0")
    lines.append("    err = -1")
    lines.append("    steps = 0")
    lines.append("    for _s in seq:")
    lines.append("        if steps >= max_steps:")
    lines.append("            st = 3")
    lines.append("            break")
    lines.append(
        f"        if _s < {program.alphabet_lo} or _s > {program.alphabet_hi}:"
    )
    lines.append("            st = 2")
    lines.append("            break")
    _emit_body(g, instrumented, gen, lines, g.entry, None, 2)
    lines.append("        steps += 1")
    lines.append(f"        v = {tuple_src}")
    lines.append("        e = kc.get(v)")
    lines.append("        if e is None:")
    lines.append("            k = _fnv(v)")
    lines.append("            i = k & 0xFFFF")
    lines.append("            e = (k, i >> 3, 1 << (i & 7))")
    lines.append("            kc[v] = e")
    lines.append("        sk.append(e)")
    lines.append(f"    return st, err, steps, {tuple_src}")
    return "\n".join(lines) + "\n"


@dataclass
class CompiledTarget:
    """A program + plan + tag table compiled to a Python function.

    fn(seq, max_steps, counts, touched, state_entries, key_cache, outputs)
    -> (status_code, error_id, steps, final_values); callers own the
    buffers, so campaign loops can reuse scratch storage across runs.
    state_entries collects one cached (key, byte_index, bit_mask) triple
    per completed step so map merging needs no per-step arithmetic.
    """

    program: Program
    instrumented: frozenset
    fn: "object"
    source: str
    key_cache: dict = field(default_factory=dict)

    def run(self, input_seq, max_steps: int = DEFAULT_MAX_STEPS) -> ExecResult:
        counts = bytearray(MAP_SIZE)
        touched: "list[int]" = []
        entries: "list[tuple[int, int, int]]" = []
        outputs: "list[int]" = []
        code, err, steps, final = self.fn(
            input_seq, max_steps, counts, touched, entries, self.key_cache, outputs
        )
        key_tuple = tuple(e[0] for e in entries)
        return ExecResult(
            status=_STATUS_BY_CODE[code],
            error_id=err if code == 1 else None,
            steps=steps,
            counts=counts,
            touched=tuple(touched),
            state_keys=key_tuple,
            state_indices=tuple(k & 0xFFFF for k in key_tuple),
            outputs=tuple(outputs),
            final_values=final,
        )


def compile_target(program: Program, g: Cfg, plan: InstrumentationPlan) -> CompiledTarget:
    if g.tags is None:
        raise ValueError("cfg carries no tag table")
    source = _generate_source(program, g, plan.instrumented)
    namespace = {"state_key": state_key}
    exec(compile(source, "<compiled-target>", "exec"), namespace)
    return CompiledTarget(
        program=program,
        instrumented=plan.instrumented,
        fn=namespace["_target"],
        source=source,
    )


def compile_step(program: Program):
    """Uninstrumented single-step function for exhaustive exploration.

    Returns step(values_tuple, symbol) -> (status, error_id, new_values)
    built from the same code generator as the campaign target, so both
    engines share one set of semantics.
    """
    g = _bare_cfg(program)
    rename = {name: f"_g{i}" for i, (name, _) in enumerate(program.globals)}
    rename[program.param] = "_s"
    gen = _ExprGen(rename)
    gvars = [rename[name] for name in program.global_names()]
    tuple_src = "(" + "".join(v + ", " for v in gvars) + ")"
    unpack = "".join(v + ", " for v in gvars)

    lines = ["def _step(values, _s):"]
    if gvars:
        lines.append(f"    {unpack}= values")
    lines.append("    out = []")
    lines.append("    st = 0")
    lines.append("    err = -1")
    lines.append(f"    if _s < {program.alphabet_lo} or _s > {program.alphabet_hi}:")
    lines.append("        st = 2")
    lines.append("    else:")
    lines.append("        for _ in (0,):")
    _emit_body(g, frozenset(), gen, lines, g.entry, None, 3)
    lines.append(f"    return st, err, {tuple_src}")
    source = "\n".join(lines) + "\n"
    namespace: dict = {}
    exec(compile(source, "<compiled-step>", "exec"), namespace)
    return namespace["_step"]


def _bare_cfg(program: Program) -> Cfg:
    g = build_cfg(program)
    return Cfg(blocks=g.blocks, entry=g.entry, tags={b.id: 0 for b in g.blocks})


_COMPILE_CACHE: dict = {}


def run(
    program: Program,
    g: Cfg,
    plan: InstrumentationPlan,
    input_seq,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> ExecResult:
    """Compile-and-run convenience wrapper with a target cache."""
    if g.tags is None:
        raise ValueError("cfg carries no tag table")
    key = (program, plan.instrumented, tuple(sorted(g.tags.items())))
    target = _COMPILE_CACHE.get(key)
    if target is None:
        target = compile_target(program, g, plan)
        _COMPILE_CACHE[key] = target
    return target.run(input_seq, max_steps)
