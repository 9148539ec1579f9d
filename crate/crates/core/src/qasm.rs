//! OpenQASM 2 reader and writer with probabilistic-gate annotations.
//!
//! Probabilistic gates are written as comment-delimited blocks whose bodies
//! are ordinary gate statements:
//!
//! ```text
//! // @prob begin qubits=0 p=4.0000000000000002e-1 writes=
//! x q[0];
//! // @prob branch p=5.9999999999999998e-1 writes=
//! // @prob end
//! ```
//!
//! `writes=` takes a comma-separated list of `clbit:bit` pairs. Qubit and
//! clbit numbers in annotations are flat indices across all registers.

use std::fmt;

use thiserror::Error;

use crate::circuit::{Branch, Circuit, CircuitError, Instruction, ProbabilisticGate};
use crate::gate::{format_float, Gate, GateKind};

/// Largest total register width accepted by the parser.
pub const MAX_WIRES: usize = 1 << 20;
const MAX_EXPR_DEPTH: usize = 64;

/// 1-based line and half-open column range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub line: usize,
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn join(self, other: SourceSpan) -> SourceSpan {
        if self.line == other.line {
            SourceSpan { line: self.line, start: self.start.min(other.start), end: self.end.max(other.end) }
        } else {
            self
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.start)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QasmError {
    #[error("{span}: {message}")]
    Parse { message: String, span: SourceSpan },
    #[error("{span}: unsupported gate `{name}`")]
    UnsupportedGate { name: String, span: SourceSpan },
    #[error("{span}: {message}")]
    Wire { message: String, span: SourceSpan },
}

impl QasmError {
    pub fn span(&self) -> SourceSpan {
        match self {
            QasmError::Parse { span, .. } | QasmError::UnsupportedGate { span, .. } | QasmError::Wire { span, .. } => {
                *span
            }
        }
    }
}

fn parse_err<T>(message: impl Into<String>, span: SourceSpan) -> Result<T, QasmError> {
    Err(QasmError::Parse { message: message.into(), span })
}

fn wire_err<T>(message: impl Into<String>, span: SourceSpan) -> Result<T, QasmError> {
    Err(QasmError::Wire { message: message.into(), span })
}

fn circuit_err(e: CircuitError, span: SourceSpan) -> QasmError {
    match e {
        CircuitError::QubitOutOfRange { .. }
        | CircuitError::ClbitOutOfRange { .. }
        | CircuitError::DuplicateQubit(_)
        | CircuitError::BranchQubit(_) => QasmError::Wire { message: e.to_string(), span },
        other => QasmError::Parse { message: other.to_string(), span },
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Sym(&'static str),
    Directive(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

const SYMBOLS: [&str; 13] = ["->", "==", "[", "]", "(", ")", ",", ";", "+", "-", "*", "/", "{"];

fn lex(src: &str) -> Result<Vec<Token>, QasmError> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let span = |start: usize, end: usize| SourceSpan { line: lineno + 1, start: start + 1, end: end + 1 };
        while i < chars.len() {
            let ch = chars[i];
            if ch.is_whitespace() {
                i += 1;
            } else if ch == '/' && chars.get(i + 1) == Some(&'/') {
                let rest: String = chars[i + 2..].iter().collect();
                if let Some(body) = rest.trim_start().strip_prefix("@prob") {
                    out.push(Token { tok: Tok::Directive(body.trim().to_string()), span: span(i, chars.len()) });
                }
                break;
            } else if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), span: span(start, i) });
            } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                out.push(Token { tok: Tok::Num(chars[start..i].iter().collect()), span: span(start, i) });
            } else if ch == '"' {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i == chars.len() {
                    return parse_err("unterminated string", span(start, i));
                }
                i += 1;
                out.push(Token { tok: Tok::Str(chars[start + 1..i - 1].iter().collect()), span: span(start, i) });
            } else {
                let sym = SYMBOLS.iter().find(|s| {
                    let s: Vec<char> = s.chars().collect();
                    chars[i..].starts_with(&s)
                });
                match sym {
                    Some(s) => {
                        out.push(Token { tok: Tok::Sym(s), span: span(i, i + s.len()) });
                        i += s.len();
                    }
                    None => return parse_err(format!("unexpected character `{ch}`"), span(i, i + 1)),
                }
            }
        }
    }
    Ok(out)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

struct OpenProb {
    qubits: Vec<usize>,
    branches: Vec<Branch>,
    span: SourceSpan,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    items: Vec<(Instruction, SourceSpan)>,
    prob: Option<OpenProb>,
}

/// Parses program text into a validated circuit.
pub fn parse(src: &str) -> Result<Circuit, QasmError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, qregs: Vec::new(), cregs: Vec::new(), items: Vec::new(), prob: None };
    p.program()?;
    let n_qubits = p.qregs.iter().map(|r| r.size).sum();
    let n_clbits = p.cregs.iter().map(|r| r.size).sum();
    let mut circuit = Circuit::new(n_qubits, n_clbits);
    for (inst, span) in p.items {
        circuit.push(inst).map_err(|e| circuit_err(e, span))?;
    }
    Ok(circuit)
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn last_span(&self) -> SourceSpan {
        self.toks.last().map(|t| t.span).unwrap_or_default()
    }

    fn next(&mut self) -> Result<Token, QasmError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => parse_err("unexpected end of input", self.last_span()),
        }
    }

    fn expect(&mut self, sym: &'static str) -> Result<SourceSpan, QasmError> {
        let t = self.next()?;
        if t.tok == Tok::Sym(sym) {
            Ok(t.span)
        } else {
            parse_err(format!("expected `{sym}`"), t.span)
        }
    }

    fn eat(&mut self, sym: &'static str) -> bool {
        if self.peek().is_some_and(|t| t.tok == Tok::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), QasmError> {
        let t = self.next()?;
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            _ => parse_err("expected identifier", t.span),
        }
    }

    fn integer(&mut self) -> Result<(usize, SourceSpan), QasmError> {
        let t = self.next()?;
        match &t.tok {
            Tok::Num(s) if s.bytes().all(|b| b.is_ascii_digit()) => match s.parse() {
                Ok(v) => Ok((v, t.span)),
                Err(_) => parse_err("integer too large", t.span),
            },
            _ => parse_err("expected integer", t.span),
        }
    }

    fn program(&mut self) -> Result<(), QasmError> {
        if self.peek().is_some_and(|t| t.tok == Tok::Ident("OPENQASM".into())) {
            self.pos += 1;
            let t = self.next()?;
            if !matches!(t.tok, Tok::Num(_)) {
                return parse_err("expected version number", t.span);
            }
            self.expect(";")?;
        }
        while self.pos < self.toks.len() {
            self.statement()?;
        }
        if let Some(open) = &self.prob {
            return parse_err("unterminated @prob block", open.span);
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let t = self.next()?;
        let (word, span) = match t.tok {
            Tok::Directive(body) => return self.directive(&body, t.span),
            Tok::Ident(w) => (w, t.span),
            _ => return parse_err("expected statement", t.span),
        };
        if self.prob.is_some() && matches!(word.as_str(), "measure" | "reset" | "if" | "qreg" | "creg") {
            return parse_err("only gates are allowed inside a @prob block", span);
        }
        match word.as_str() {
            "include" => {
                let t = self.next()?;
                if !matches!(t.tok, Tok::Str(_)) {
                    return parse_err("expected file name", t.span);
                }
                self.expect(";")?;
            }
            "qreg" | "creg" => self.declaration(word == "qreg", span)?,
            "measure" => {
                let q = self.qubit_arg()?;
                self.expect("->")?;
                let c = self.clbit_arg()?;
                let end = self.expect(";")?;
                self.items.push((Instruction::Measure { qubit: q, clbit: c }, span.join(end)));
            }
            "reset" => {
                let q = self.qubit_arg()?;
                let end = self.expect(";")?;
                self.items.push((Instruction::Reset { qubit: q }, span.join(end)));
            }
            "barrier" => {
                while !self.eat(";") {
                    self.next()?;
                }
            }
            "if" => {
                self.expect("(")?;
                let clbit = self.condition_bit()?;
                self.expect("==")?;
                let (value, vspan) = self.integer()?;
                if value > 1 {
                    return parse_err("condition value must be 0 or 1", vspan);
                }
                self.expect(")")?;
                let (name, gspan) = self.ident()?;
                let gate = self.gate_call(&name, gspan)?;
                self.items.push((Instruction::CondGate { clbit, value: value == 1, gate }, span));
            }
            "gate" | "opaque" => return parse_err("gate definitions are not supported", span),
            _ => {
                let gate = self.gate_call(&word, span)?;
                match &mut self.prob {
                    Some(open) => open.branches.last_mut().expect("open block has a branch").ops.push(gate),
                    None => self.items.push((Instruction::Gate(gate), span)),
                }
            }
        }
        Ok(())
    }

    fn declaration(&mut self, quantum: bool, span: SourceSpan) -> Result<(), QasmError> {
        let (name, _) = self.ident()?;
        self.expect("[")?;
        let (size, sspan) = self.integer()?;
        self.expect("]")?;
        self.expect(";")?;
        let regs = if quantum { &mut self.qregs } else { &mut self.cregs };
        if regs.iter().any(|r| r.name == name) {
            return parse_err(format!("register `{name}` declared twice"), span);
        }
        let offset: usize = regs.iter().map(|r| r.size).sum();
        if offset + size > MAX_WIRES {
            return parse_err("register too large", sspan);
        }
        regs.push(Register { name, offset, size });
        Ok(())
    }

    fn indexed(&mut self, quantum: bool) -> Result<usize, QasmError> {
        let (name, span) = self.ident()?;
        self.expect("[")?;
        let (index, ispan) = self.integer()?;
        self.expect("]")?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = regs.iter().find(|r| r.name == name) else {
            return wire_err(format!("unknown register `{name}`"), span);
        };
        if index >= reg.size {
            return wire_err(format!("index {index} out of range for `{name}[{}]`", reg.size), ispan);
        }
        Ok(reg.offset + index)
    }

    fn qubit_arg(&mut self) -> Result<usize, QasmError> {
        self.indexed(true)
    }

    fn clbit_arg(&mut self) -> Result<usize, QasmError> {
        self.indexed(false)
    }

    /// `c[i]`, or a bare one-bit register name.
    fn condition_bit(&mut self) -> Result<usize, QasmError> {
        let is_bare = matches!(self.toks.get(self.pos + 1), Some(t) if t.tok != Tok::Sym("["));
        if !is_bare {
            return self.clbit_arg();
        }
        let (name, span) = self.ident()?;
        match self.cregs.iter().find(|r| r.name == name) {
            Some(r) if r.size == 1 => Ok(r.offset),
            Some(_) => parse_err("conditions must test a single clbit", span),
            None => wire_err(format!("unknown register `{name}`"), span),
        }
    }

    fn gate_call(&mut self, name: &str, span: SourceSpan) -> Result<Gate, QasmError> {
        let mut params = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                params.push(self.expr(0)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let mut qubits = vec![self.qubit_arg()?];
        while self.eat(",") {
            qubits.push(self.qubit_arg()?);
        }
        let end = self.expect(";")?;
        let span = span.join(end);
        let canonical = match name {
            "u" | "U" => "u3",
            "CX" => "cx",
            other => other,
        };
        if !GateKind::is_known_name(canonical) {
            return Err(QasmError::UnsupportedGate { name: name.to_string(), span });
        }
        let Some(kind) = GateKind::from_name(canonical, &params) else {
            return parse_err(format!("wrong number of parameters for `{name}`"), span);
        };
        Gate::new(kind, qubits).map_err(|e| circuit_err(e, span))
    }

    fn expr(&mut self, depth: usize) -> Result<f64, QasmError> {
        let mut acc = self.term(depth)?;
        loop {
            if self.eat("+") {
                acc += self.term(depth)?;
            } else if self.eat("-") {
                acc -= self.term(depth)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<f64, QasmError> {
        let mut acc = self.unary(depth)?;
        loop {
            if self.eat("*") {
                acc *= self.unary(depth)?;
            } else if self.eat("/") {
                acc /= self.unary(depth)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self, depth: usize) -> Result<f64, QasmError> {
        if depth > MAX_EXPR_DEPTH {
            return parse_err("expression nested too deeply", self.last_span());
        }
        if self.eat("-") {
            return Ok(-self.unary(depth + 1)?);
        }
        let t = self.next()?;
        match t.tok {
            Tok::Num(s) => s.parse().or_else(|_| parse_err("malformed number", t.span)),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            Tok::Sym("(") => {
                let v = self.expr(depth + 1)?;
                self.expect(")")?;
                Ok(v)
            }
            _ => parse_err("expected expression", t.span),
        }
    }

    fn directive(&mut self, body: &str, span: SourceSpan) -> Result<(), QasmError> {
        let mut words = body.split_whitespace();
        let command = words.next().unwrap_or("");
        let mut qubits = None;
        let mut prob = None;
        let mut writes = Vec::new();
        for word in words {
            let Some((key, value)) = word.split_once('=') else {
                return parse_err(format!("expected key=value, found `{word}`"), span);
            };
            match key {
                "qubits" => qubits = Some(int_list(value, span)?),
                "p" => match value.parse::<f64>() {
                    Ok(p) => prob = Some(p),
                    Err(_) => return parse_err(format!("malformed probability `{value}`"), span),
                },
                "writes" => writes = write_list(value, span)?,
                _ => return parse_err(format!("unknown @prob key `{key}`"), span),
            }
        }
        let branch = |prob: Option<f64>, writes| match prob {
            Some(p) => Ok(Branch::new(Vec::new(), p).with_writes(writes)),
            None => parse_err("missing p=", span),
        };
        match command {
            "begin" => {
                if self.prob.is_some() {
                    return parse_err("nested @prob block", span);
                }
                let Some(qubits) = qubits else {
                    return parse_err("missing qubits=", span);
                };
                self.prob = Some(OpenProb { qubits, branches: vec![branch(prob, writes)?], span });
            }
            "branch" => match &mut self.prob {
                Some(open) => open.branches.push(branch(prob, writes)?),
                None => return parse_err("@prob branch outside a block", span),
            },
            "end" => {
                let Some(open) = self.prob.take() else {
                    return parse_err("@prob end outside a block", span);
                };
                let pg = ProbabilisticGate::new(open.qubits, open.branches).map_err(|e| circuit_err(e, open.span))?;
                self.items.push((Instruction::ProbGate(pg), open.span));
            }
            other => return parse_err(format!("unknown @prob command `{other}`"), span),
        }
        Ok(())
    }
}

fn int_list(value: &str, span: SourceSpan) -> Result<Vec<usize>, QasmError> {
    value
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().or_else(|_| parse_err(format!("malformed index `{s}`"), span)))
        .collect()
}

fn write_list(value: &str, span: SourceSpan) -> Result<Vec<(usize, bool)>, QasmError> {
    value
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            let parsed = s.split_once(':').and_then(|(c, b)| Some((c.parse().ok()?, b)));
            match parsed {
                Some((c, "0")) => Ok((c, false)),
                Some((c, "1")) => Ok((c, true)),
                _ => parse_err(format!("malformed write `{s}`"), span),
            }
        })
        .collect()
}

/// Canonical text for `c`; [`parse`] reads it back to an equal circuit.
pub fn serialize(c: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if c.n_qubits() > 0 {
        out += &format!("qreg q[{}];\n", c.n_qubits());
    }
    if c.n_clbits() > 0 {
        out += &format!("creg c[{}];\n", c.n_clbits());
    }
    for inst in c.instructions() {
        match inst {
            Instruction::Gate(g) => out += &format!("{g};\n"),
            Instruction::Measure { qubit, clbit } => out += &format!("measure q[{qubit}] -> c[{clbit}];\n"),
            Instruction::Reset { qubit } => out += &format!("reset q[{qubit}];\n"),
            Instruction::CondGate { clbit, value, gate } => {
                out += &format!("if (c[{clbit}]=={}) {gate};\n", u8::from(*value))
            }
            Instruction::ProbGate(pg) => {
                let qubits: Vec<String> = pg.qubits.iter().map(|q| q.to_string()).collect();
                for (i, b) in pg.branches.iter().enumerate() {
                    let writes: Vec<String> =
                        b.clbit_writes.iter().map(|(c, v)| format!("{c}:{}", u8::from(*v))).collect();
                    if i == 0 {
                        out += &format!("// @prob begin qubits={} ", qubits.join(","));
                    } else {
                        out += "// @prob branch ";
                    }
                    out += &format!("p={} writes={}\n", format_float(b.prob), writes.join(","));
                    for g in &b.ops {
                        out += &format!("{g};\n");
                    }
                }
                out += "// @prob end\n";
            }
        }
    }
    out
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed IR: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid circuit: {0}")]
    Invalid(#[from] CircuitError),
}

/// Pretty-printed JSON form of the IR.
pub fn to_json(c: &Circuit) -> String {
    serde_json::to_string_pretty(c).expect("circuit serializes")
}

pub fn from_json(s: &str) -> Result<Circuit, JsonError> {
    let c: Circuit = serde_json::from_str(s)?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_program() {
        let c = parse("qreg q[1]; creg c[1]; h q[0]; measure q[0] -> c[0];").unwrap();
        let mut want = Circuit::new(1, 1);
        want.gate(Gate::h(0)).unwrap().measure(0, 0).unwrap();
        assert_eq!(c, want);
    }

    #[test]
    fn empty_circuit_is_header_only() {
        let text = serialize(&Circuit::new(2, 1));
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[1];\n");
    }

    #[test]
    fn probabilistic_x_block() {
        let mut c = Circuit::new(1, 0);
        c.prob_gate(ProbabilisticGate::with_probability(Gate::x(0), 0.4).unwrap()).unwrap();
        let text = serialize(&c);
        assert!(text.contains("// @prob begin qubits=0 p=4.0000000000000002e-1 writes=\nx q[0];\n// @prob branch p="));
        assert!(text.ends_with("// @prob end\n"));
        assert_eq!(parse(&text).unwrap(), c);
        assert_eq!(serialize(&parse(&text).unwrap()), text);
    }

    #[test]
    fn expressions_and_aliases() {
        let c = parse("qreg q[2]; rz(-pi/2) q[0]; U(pi, 0, 2*(1+1)) q[1]; CX q[0],q[1];").unwrap();
        assert_eq!(c.instructions()[0], Instruction::Gate(Gate::rz(-std::f64::consts::FRAC_PI_2, 0)));
        assert_eq!(
            c.instructions()[1],
            Instruction::Gate(Gate::new(GateKind::U(std::f64::consts::PI, 0.0, 4.0), vec![1]).unwrap())
        );
        assert_eq!(c.instructions()[2], Instruction::Gate(Gate::cx(0, 1)));
    }

    #[test]
    fn conditionals_and_multiple_registers() {
        let src = "qreg a[1]; qreg b[2]; creg m[1]; creg n[2];\nmeasure b[1] -> n[0];\nif (n[0]==1) x a[0];\nif (m==0) h b[0];";
        let c = parse(src).unwrap();
        assert_eq!(c.n_qubits(), 3);
        assert_eq!(c.n_clbits(), 3);
        assert_eq!(c.instructions()[0], Instruction::Measure { qubit: 2, clbit: 1 });
        assert_eq!(c.instructions()[1], Instruction::CondGate { clbit: 1, value: true, gate: Gate::x(0) });
        assert_eq!(c.instructions()[2], Instruction::CondGate { clbit: 0, value: false, gate: Gate::h(1) });
    }

    #[test]
    fn error_kinds() {
        let e = parse("qreg q[1];\nfoo q[0];").unwrap_err();
        assert!(matches!(e, QasmError::UnsupportedGate { ref name, .. } if name == "foo"));
        assert_eq!(e.span().line, 2);

        let e = parse("qreg q[1];\nh q[3];").unwrap_err();
        assert!(matches!(e, QasmError::Wire { .. }));
        assert_eq!(e.span(), SourceSpan { line: 2, start: 5, end: 6 });

        assert!(matches!(parse("qreg q[2]; cx q[0],q[0];"), Err(QasmError::Wire { .. })));
        assert!(matches!(parse("qreg q[1]; h q[0]"), Err(QasmError::Parse { .. })));
        assert!(matches!(parse("qreg q[1]; rx q[0];"), Err(QasmError::Parse { .. })));
        assert!(matches!(parse("qreg q[1]; rx(0/0) q[0];"), Err(QasmError::Parse { .. })));
        assert!(matches!(parse("qreg q[1];\n// @prob begin qubits=0 p=1 writes=\n"), Err(QasmError::Parse { .. })));
        assert!(matches!(
            parse("qreg q[1];\n// @prob begin qubits=0 p=0.5 writes=\n// @prob end\n"),
            Err(QasmError::Parse { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut c = Circuit::new(2, 1);
        c.gate(Gate::ry(0.3, 1))
            .unwrap()
            .measure(1, 0)
            .unwrap()
            .cond_gate(0, true, Gate::cx(1, 0))
            .unwrap()
            .prob_gate(ProbabilisticGate::with_probability(Gate::z(0), 0.25).unwrap())
            .unwrap();
        let text = to_json(&c);
        assert!(text.contains("\"op\": \"cond_gate\""));
        assert_eq!(from_json(&text).unwrap(), c);
        let bad = text.replace("\"clbit\": 0", "\"clbit\": 7");
        assert!(matches!(from_json(&bad), Err(JsonError::Invalid(_))));
    }

    proptest! {
        #[test]
        fn never_panics_on_arbitrary_text(s in "\\PC{0,200}") {
            let _ = parse(&s);
        }

        #[test]
        fn never_panics_on_token_soup(
            words in proptest::collection::vec(
                prop_oneof![
                    Just("qreg"), Just("creg"), Just("q"), Just("c"), Just("["), Just("]"), Just("("),
                    Just(")"), Just(";"), Just(","), Just("->"), Just("=="), Just("measure"), Just("reset"),
                    Just("if"), Just("h"), Just("cx"), Just("rx"), Just("pi"), Just("-"), Just("/"), Just("0"),
                    Just("1"), Just("2"), Just("1e308"), Just("\n// @prob begin qubits=0 p=1 writes=0:1\n"),
                    Just("\n// @prob branch p=0\n"), Just("\n// @prob end\n"), Just("\""),
                ],
                0..60,
            )
        ) {
            let _ = parse(&words.join(" "));
        }
    }
}
