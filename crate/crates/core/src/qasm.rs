//! OpenQASM 2.0 subset: parsing into [`Circuit`] and canonical emission.
//!
//! Gate names are built in (no `include` expansion). Supported statements are
//! `qreg`, `creg`, `barrier` (ignored), `measure` and the gates `x z h s sdg t
//! tdg sx sxdg rz rx u3 cx swap ccx cswap`. Angles accept `pi`, numeric
//! literals, `+ - * /`, unary minus and parentheses.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let syntax = |line, col, msg: &str| Error::Syntax { line, col, msg: msg.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |i: &mut usize, col: &mut usize, k: usize| {
            *i += k;
            *col += k;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            advance(&mut i, &mut col, 1);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut col, 1);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut col, 1);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                advance(&mut i, &mut col, 1);
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                advance(&mut i, &mut col, 1);
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    advance(&mut i, &mut col, 1);
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut col, 1);
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| syntax(l0, c0, &format!("malformed number {s:?}")))?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
        } else if c == '"' {
            let start = i + 1;
            advance(&mut i, &mut col, 1);
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                advance(&mut i, &mut col, 1);
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(syntax(l0, c0, "unterminated string"));
            }
            out.push(Token { tok: Tok::Str(chars[start..i].iter().collect()), line: l0, col: c0 });
            advance(&mut i, &mut col, 1);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, line: l0, col: c0 });
            advance(&mut i, &mut col, 2);
        } else if "[](),;+-*/".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            advance(&mut i, &mut col, 1);
        } else {
            return Err(syntax(l0, c0, &format!("unexpected character {c:?}")));
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, msg: &str) -> Error {
        Error::Syntax { line: t.line, col: t.col, msg: msg.to_string() }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(Self::error_at(&t, &format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Err(Self::error_at(&t, "expected an identifier")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
            _ => Err(Self::error_at(&t, "expected a non-negative integer")),
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        while let Tok::Sym(c @ ('+' | '-')) = self.peek().tok {
            self.next();
            let r = self.term()?;
            v = if c == '+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.factor()?;
        while let Tok::Sym(c @ ('*' | '/')) = self.peek().tok {
            self.next();
            let r = self.factor()?;
            v = if c == '*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn factor(&mut self) -> Result<f64> {
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(*v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            Tok::Sym('-') => Ok(-self.factor()?),
            Tok::Sym('+') => self.factor(),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            _ => Err(Self::error_at(&t, "expected an angle expression")),
        }
    }

    /// `name[index]` resolved against the given registers to a global index.
    fn operand(&mut self, quantum: bool) -> Result<(usize, Token)> {
        let (name, t) = self.ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = regs.iter().find(|r| r.name == name) else {
            return Err(Error::UndeclaredRegister { name, line: t.line, col: t.col });
        };
        let (offset, size) = (reg.offset, reg.size);
        if self.peek().tok != Tok::Sym('[') {
            return Err(Self::error_at(self.peek(), "whole-register operands are not supported; expected '['"));
        }
        self.next();
        let it = self.peek().clone();
        let index = self.integer()?;
        self.expect_sym(']')?;
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size, line: it.line, col: it.col });
        }
        Ok((offset + index, t))
    }

    fn declare(&mut self, quantum: bool) -> Result<()> {
        let (name, t) = self.ident()?;
        self.expect_sym('[')?;
        let size = self.integer()?;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        let regs = if quantum { &mut self.qregs } else { &mut self.cregs };
        if regs.iter().any(|r| r.name == name) {
            return Err(Self::error_at(&t, &format!("register {name} declared twice")));
        }
        let offset = regs.iter().map(|r| r.size).sum();
        regs.push(Register { name, offset, size });
        Ok(())
    }

    fn parse(mut self) -> Result<Circuit> {
        let mut gates = Vec::new();
        let mut measurements = Vec::new();
        if let Tok::Ident(s) = &self.peek().tok {
            if s == "OPENQASM" {
                self.next();
                let t = self.next();
                if !matches!(t.tok, Tok::Num(v) if v == 2.0) {
                    return Err(Self::error_at(&t, "only OPENQASM 2.0 is supported"));
                }
                self.expect_sym(';')?;
            }
        }
        loop {
            let t = self.peek().clone();
            let name = match &t.tok {
                Tok::Eof => break,
                Tok::Ident(s) => s.clone(),
                _ => return Err(Self::error_at(&t, "expected a statement")),
            };
            self.next();
            match name.as_str() {
                "include" => {
                    let s = self.next();
                    if !matches!(s.tok, Tok::Str(_)) {
                        return Err(Self::error_at(&s, "expected a file name string"));
                    }
                    self.expect_sym(';')?;
                }
                "qreg" => self.declare(true)?,
                "creg" => self.declare(false)?,
                "barrier" => {
                    self.operand(true)?;
                    while self.peek().tok == Tok::Sym(',') {
                        self.next();
                        self.operand(true)?;
                    }
                    self.expect_sym(';')?;
                }
                "measure" => {
                    let (q, _) = self.operand(true)?;
                    let a = self.next();
                    if a.tok != Tok::Arrow {
                        return Err(Self::error_at(&a, "expected '->'"));
                    }
                    let (c, _) = self.operand(false)?;
                    self.expect_sym(';')?;
                    measurements.push((q, c));
                }
                _ => gates.push(self.gate(&name, &t)?),
            }
        }
        let num_qubits = self.qregs.iter().map(|r| r.size).sum();
        let mut c = Circuit::from_gates(num_qubits, gates);
        c.measurements = measurements;
        Ok(c)
    }

    fn gate(&mut self, name: &str, t: &Token) -> Result<Gate> {
        let (n_params, n_qubits) = match name {
            "x" | "z" | "h" | "s" | "sdg" | "t" | "tdg" | "sx" | "sxdg" => (0, 1),
            "rz" | "rx" => (1, 1),
            "u3" => (3, 1),
            "cx" | "swap" => (0, 2),
            "ccx" | "cswap" => (0, 3),
            _ => return Err(Error::UnsupportedGate { name: name.to_string(), line: t.line, col: t.col }),
        };
        let mut params = Vec::new();
        if n_params > 0 {
            self.expect_sym('(')?;
            for k in 0..n_params {
                if k > 0 {
                    self.expect_sym(',')?;
                }
                let at = self.peek().clone();
                let v = self.expr()?;
                if !v.is_finite() {
                    return Err(Self::error_at(&at, "angle is not finite"));
                }
                params.push(v);
            }
            self.expect_sym(')')?;
        }
        let mut qs = Vec::new();
        for k in 0..n_qubits {
            if k > 0 {
                self.expect_sym(',')?;
            }
            let (q, qt) = self.operand(true)?;
            if qs.contains(&q) {
                return Err(Self::error_at(&qt, "repeated qubit operand"));
            }
            qs.push(q);
        }
        self.expect_sym(';')?;
        use Gate::*;
        Ok(match name {
            "x" => X(qs[0]),
            "z" => Z(qs[0]),
            "h" => H(qs[0]),
            "s" => S(qs[0]),
            "sdg" => Sdg(qs[0]),
            "t" => T(qs[0]),
            "tdg" => Tdg(qs[0]),
            "sx" => SX(qs[0]),
            "sxdg" => SXdg(qs[0]),
            "rz" => RZ(qs[0], params[0]),
            "rx" => RX(qs[0], params[0]),
            "u3" => U3(qs[0], params[0], params[1], params[2]),
            "cx" => CX(qs[0], qs[1]),
            "swap" => Swap(qs[0], qs[1]),
            "ccx" => CCX(qs[0], qs[1], qs[2]),
            _ => CSwap(qs[0], qs[1], qs[2]),
        })
    }
}

/// Parses OpenQASM 2.0 text. Registers are concatenated in declaration order.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let toks = lex(text)?;
    Parser { toks, pos: 0, qregs: Vec::new(), cregs: Vec::new() }.parse()
}

/// Largest denominator tried when printing an angle as a fraction of π.
const MAX_PI_DENOMINATOR: i64 = 64;

/// Prints an angle as `k*pi/d` when that expression parses back to exactly the
/// same value, otherwise with 17 significant digits.
pub fn format_angle(theta: f64) -> String {
    if theta == 0.0 {
        return String::from("0");
    }
    for d in 1..=MAX_PI_DENOMINATOR {
        let k = (theta / PI * d as f64).round();
        if k == 0.0 || k.abs() > 1e6 {
            continue;
        }
        let k = k as i64;
        if gcd(k.unsigned_abs(), d as u64) != 1 {
            continue;
        }
        let text = pi_fraction(k, d);
        if parse_angle(&text) == Some(theta) {
            return text;
        }
    }
    format!("{theta:.16e}")
}

fn pi_fraction(k: i64, d: i64) -> String {
    let num = match k {
        1 => String::from("pi"),
        -1 => String::from("-pi"),
        _ => format!("{k}*pi"),
    };
    if d == 1 {
        num
    } else {
        format!("{num}/{d}")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn parse_angle(text: &str) -> Option<f64> {
    let toks = lex(text).ok()?;
    let mut p = Parser { toks, pos: 0, qregs: Vec::new(), cregs: Vec::new() };
    let v = p.expr().ok()?;
    (p.peek().tok == Tok::Eof).then_some(v)
}

/// Canonical OpenQASM 2.0 text: header, one `q` register, an optional `c`
/// register sized for the measurements, one statement per line.
pub fn emit_qasm(c: &Circuit) -> Result<String> {
    c.check()?;
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits);
    if let Some(bits) = c.measurements.iter().map(|&(_, b)| b + 1).max() {
        let _ = writeln!(out, "creg c[{bits}];");
    }
    for g in &c.gates {
        out.push_str(g.name());
        let (angles, n) = g.angles();
        if n > 0 {
            out.push('(');
            for (k, a) in angles[..n].iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                out.push_str(&format_angle(*a));
            }
            out.push(')');
        }
        for (k, q) in g.qubits().iter().enumerate() {
            out.push_str(if k == 0 { " " } else { "," });
            let _ = write!(out, "q[{q}]");
        }
        out.push_str(";\n");
    }
    for &(q, b) in &c.measurements {
        let _ = writeln!(out, "measure q[{q}] -> c[{b}];");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{seed_circuit, GateSpec};

    #[test]
    fn parses_minimal_program() {
        let c = parse_qasm("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c, Circuit::from_gates(2, alloc::vec![Gate::CX(0, 1)]));
    }

    #[test]
    fn emits_pi_fractions() {
        let c = Circuit::from_gates(1, alloc::vec![Gate::RZ(0, PI / 4.0), Gate::RX(0, -3.0 * PI / 4.0), Gate::RZ(0, 0.1)]);
        let text = emit_qasm(&c).unwrap();
        assert!(text.contains("rz(pi/4) q[0];"));
        assert!(text.contains("rx(-3*pi/4) q[0];"));
        assert!(text.contains("rz(1.0000000000000001e-1) q[0];"));
        assert_eq!(parse_qasm(&text).unwrap().gates, c.gates);
    }

    #[test]
    fn roundtrip_is_byte_identical() {
        for spec in GateSpec::ALL {
            let text = emit_qasm(&seed_circuit(spec)).unwrap();
            assert_eq!(emit_qasm(&parse_qasm(&text).unwrap()).unwrap(), text);
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_qasm("qreg q[1];\ncz q[0],q[0];"), Err(Error::UnsupportedGate { line: 2, col: 1, .. })));
        assert!(matches!(parse_qasm("qreg q[1];\nh r[0];"), Err(Error::UndeclaredRegister { line: 2, col: 3, .. })));
        assert!(matches!(parse_qasm("qreg q[1];\nh q[3];"), Err(Error::IndexOutOfRange { index: 3, size: 1, line: 2, col: 5 })));
        assert!(matches!(parse_qasm("qreg q[2];\ncx q[0] q[1];"), Err(Error::Syntax { line: 2, col: 9, .. })));
        assert!(matches!(parse_qasm("qreg q[2];\ncx q[1],q[1];"), Err(Error::Syntax { line: 2, .. })));
    }

    #[test]
    fn measurements_and_barriers() {
        let c = parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncreg c[2];\nh q[0];\nbarrier q[0],q[1];\nmeasure q[1] -> c[0];\n").unwrap();
        assert_eq!(c.gates, alloc::vec![Gate::H(0)]);
        assert_eq!(c.measurements, alloc::vec![(1, 0)]);
    }
}
