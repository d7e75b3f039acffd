//! Plain-text circuit files.
//!
//! ```text
//! # three qutrits
//! DIM 3
//! QUDITS 2
//! F q0
//! CZ^2 q0 q1
//! DEP 0.01 q0 q1
//! MEASX q1
//! ```
//!
//! `DIM` and `QUDITS` come first. Qudit indices refer to the register as it
//! stands at that line, so `MEASX` and `DISCARD` shift later qudits down by
//! one. `COSET_REDUCE` takes whitespace-separated generators such as
//! `X1Z0@q0*X0Z1@q1` and must be the last instruction.

use ept_core::channels::{axis_depolarizing, depolarizing, Axis, PauliChannelTable};
use ept_core::clifford::{automorphism_of, GateSpec};
use ept_core::modarith::gcd;
use ept_core::{ErrorProbabilityTensor, PauliLabel, StabilizerBasis};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(GateSpec),
    Channel {
        table: PauliChannelTable<f64>,
        qudits: Vec<usize>,
    },
    MeasureX(usize),
    Discard(usize),
    CosetReduce(Vec<PauliLabel>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub line: usize,
    pub op: Op,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    pub modulus: u32,
    pub qudits: usize,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    out
}

struct LineParser<'a> {
    line: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

impl<'a> LineParser<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error(self.end_column, format!("expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn finish(&self) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(t) => Err(self.error(t.column, format!("unexpected '{}'", t.text))),
            None => Ok(()),
        }
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<(T, usize)> {
        let tok = self.next(what)?;
        let value = tok
            .text
            .parse()
            .map_err(|_| self.error(tok.column, format!("expected {what}, got '{}'", tok.text)))?;
        Ok((value, tok.column))
    }

    fn prefixed(&mut self, prefix: char, what: &str) -> Result<(u64, usize)> {
        let tok = self.next(what)?;
        let value = tok
            .text
            .strip_prefix(prefix)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| {
                self.error(tok.column, format!("expected {what}, got '{}'", tok.text))
            })?;
        Ok((value, tok.column))
    }

    fn qudit(&mut self, width: usize) -> Result<usize> {
        let (q, column) = self.prefixed('q', "qudit such as q0")?;
        let q = q as usize;
        if q >= width {
            return Err(self.error(
                column,
                format!("qudit q{q} out of range for {width} qudits"),
            ));
        }
        Ok(q)
    }

    fn probability(&mut self) -> Result<f64> {
        let (f, column): (f64, usize) = self.number("error rate")?;
        if !(0.0..=1.0).contains(&f) {
            return Err(self.error(column, format!("error rate {f} outside [0, 1]")));
        }
        Ok(f)
    }

    fn power(&self, tok: Token<'_>, name: &str) -> Result<u32> {
        match tok.text.strip_prefix(name) {
            Some("") => Ok(1),
            Some(rest) => rest
                .strip_prefix('^')
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| {
                    self.error(tok.column, format!("malformed power in '{}'", tok.text))
                }),
            None => unreachable!(),
        }
    }
}

/// Parses a circuit file.
pub fn parse_circuit(text: &str) -> Result<CircuitProgram> {
    let mut modulus: Option<u32> = None;
    let mut qudits: Option<usize> = None;
    let mut width = 0usize;
    let mut steps = Vec::new();
    let mut reduced = false;

    for (idx, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: idx + 1,
            end_column: raw
                .split('#')
                .next()
                .unwrap_or("")
                .trim_end()
                .chars()
                .count()
                + 1,
            tokens,
            pos: 0,
        };
        let head = p.next("instruction")?;
        match head.text {
            "DIM" | "QUDITS" if !steps.is_empty() => {
                return Err(p.error(
                    head.column,
                    format!("{} must precede instructions", head.text),
                ));
            }
            "DIM" => {
                let (m, column): (u32, usize) = p.number("qudit dimension")?;
                if m < 2 {
                    return Err(p.error(column, "qudit dimension must be at least 2"));
                }
                modulus = Some(m);
                p.finish()?;
                continue;
            }
            "QUDITS" => {
                let (n, column): (usize, usize) = p.number("number of qudits")?;
                if n == 0 {
                    return Err(p.error(column, "need at least one qudit"));
                }
                qudits = Some(n);
                width = n;
                p.finish()?;
                continue;
            }
            _ => {}
        }
        let m = match (modulus, qudits) {
            (Some(m), Some(_)) => m,
            _ => return Err(p.error(head.column, "DIM and QUDITS must come first")),
        };
        if reduced {
            return Err(CliError::IllegalInstruction {
                line: p.line,
                message: "no instruction may follow COSET_REDUCE".into(),
            });
        }
        let op = match head.text {
            "F" => Op::Gate(GateSpec::Fourier {
                qudit: p.qudit(width)?,
            }),
            "M" => {
                let (l, column): (u64, usize) = p.number("multiplier")?;
                let l = (l % m as u64) as u32;
                if gcd(l as u64, m as u64) != 1 {
                    return Err(p.error(column, format!("multiplier {l} is not a unit modulo {m}")));
                }
                Op::Gate(GateSpec::MultiplyBy {
                    multiplier: l,
                    qudit: p.qudit(width)?,
                })
            }
            "PAULI" => {
                let (r, _) = p.prefixed('x', "X exponent such as x1")?;
                let (s, _) = p.prefixed('z', "Z exponent such as z0")?;
                let q = p.qudit(width)?;
                Op::Gate(GateSpec::Pauli {
                    label: PauliLabel::single(q, r, s, width, m)?,
                })
            }
            t if t.starts_with("CX") || t.starts_with("CZ") => {
                let name = &t[..2];
                let power = (p.power(head, name)? as u64 % m as u64) as u32;
                let c = p.qudit(width)?;
                let column = p.tokens.get(p.pos).map_or(p.end_column, |t| t.column);
                let target = p.qudit(width)?;
                if c == target {
                    return Err(p.error(column, "control and target must differ"));
                }
                let gate = if name == "CX" {
                    GateSpec::cx(c, target, power, m)?
                } else {
                    GateSpec::cz(c, target, power, m)?
                };
                Op::Gate(gate)
            }
            "DEP" => {
                let f = p.probability()?;
                let mut qs = vec![p.qudit(width)?];
                while p.pos < p.tokens.len() {
                    let column = p.tokens[p.pos].column;
                    let q = p.qudit(width)?;
                    if qs.contains(&q) {
                        return Err(p.error(column, format!("qudit q{q} listed twice")));
                    }
                    qs.push(q);
                }
                Op::Channel {
                    table: depolarizing(f, m, qs.len())?,
                    qudits: qs,
                }
            }
            "DEPX" | "DEPZ" => {
                let f = p.probability()?;
                let axis = if head.text == "DEPX" {
                    Axis::XOnly
                } else {
                    Axis::ZOnly
                };
                Op::Channel {
                    table: axis_depolarizing(f, axis, m)?,
                    qudits: vec![p.qudit(width)?],
                }
            }
            "MEASX" | "DISCARD" => {
                if width == 1 {
                    return Err(CliError::IllegalInstruction {
                        line: p.line,
                        message: "cannot remove the last qudit".into(),
                    });
                }
                let q = p.qudit(width)?;
                width -= 1;
                if head.text == "MEASX" {
                    Op::MeasureX(q)
                } else {
                    Op::Discard(q)
                }
            }
            "COSET_REDUCE" => {
                let mut gens = Vec::new();
                while p.pos < p.tokens.len() {
                    let tok = p.next("generator")?;
                    let g = PauliLabel::parse(tok.text, width, m)
                        .map_err(|e| p.error(tok.column, e.to_string()))?;
                    gens.push(g);
                }
                if gens.is_empty() {
                    return Err(p.error(p.end_column, "expected at least one generator"));
                }
                reduced = true;
                Op::CosetReduce(gens)
            }
            other => return Err(p.error(head.column, format!("unknown instruction '{other}'"))),
        };
        p.finish()?;
        steps.push(Step { line: p.line, op });
    }

    match (modulus, qudits) {
        (Some(modulus), Some(qudits)) => Ok(CircuitProgram {
            modulus,
            qudits,
            steps,
        }),
        _ => Err(CliError::Parse {
            line: text.lines().count().max(1),
            column: 1,
            message: "missing DIM or QUDITS".into(),
        }),
    }
}

/// Result of running a circuit: the tensor, or its coset table if the
/// circuit ends with `COSET_REDUCE`.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOutput {
    Tensor(ErrorProbabilityTensor<f64>),
    Cosets(ept_core::CosetTable<f64>),
}

impl CircuitOutput {
    pub fn to_csv(&self) -> String {
        match self {
            CircuitOutput::Tensor(t) => t.to_csv(),
            CircuitOutput::Cosets(c) => c.to_csv(),
        }
    }
}

/// Propagates an error-free tensor through the program.
pub fn run_circuit(program: &CircuitProgram, dense_cap: u128) -> Result<CircuitOutput> {
    let m = program.modulus;
    let mut p = ErrorProbabilityTensor::identity_with_cap(m, program.qudits, dense_cap)?;
    for step in &program.steps {
        let at_line = |e: ept_core::Error| match e {
            e if e.is_cap_exceeded() => CliError::Core(e),
            e => CliError::IllegalInstruction {
                line: step.line,
                message: e.to_string(),
            },
        };
        p = match &step.op {
            Op::Gate(g) => {
                let auto = automorphism_of(g, p.num_qudits(), m).map_err(at_line)?;
                p.apply_clifford(&auto).map_err(at_line)?
            }
            Op::Channel { table, qudits } => p.apply_channel_on(table, qudits).map_err(at_line)?,
            Op::MeasureX(q) => p.measure_x(*q).map_err(at_line)?,
            Op::Discard(q) => p.discard_qudit(*q).map_err(at_line)?,
            Op::CosetReduce(gens) => {
                let basis =
                    StabilizerBasis::new(m, p.num_qudits(), gens.clone()).map_err(at_line)?;
                return Ok(CircuitOutput::Cosets(
                    p.coset_reduce(&basis).map_err(at_line)?,
                ));
            }
        };
    }
    Ok(CircuitOutput::Tensor(p))
}
