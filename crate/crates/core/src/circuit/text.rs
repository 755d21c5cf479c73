//! Line-oriented circuit text format.
//!
//! ```text
//! # comments and blank lines are ignored
//! qubit q0
//! qubit q1
//! rot q0 0.6013                 # h, x, rot, rx, ry, rz, p
//! u q0 re im re im re im re im  # explicit 2x2 unitary, row-major
//! crot q0=1 q1 0.785            # controlled form: c<gate> <control>=<0|1> <target> [angle]
//! swap q0 q1
//! cswap q2=1 q0 q1
//! measure q0 -> c0
//! ```
//!
//! Qubits used without a `qubit` line are declared on first use. A file may
//! hold several circuits, each opened by a `circuit <name>` line.

use num_complex::Complex64;

use super::{Circuit, Gate, Instruction, Measurement};
use crate::error::{Error, Result};
use crate::statevector::GateMatrix;

pub fn emit(circuit: &Circuit) -> String {
    let mut out = String::new();
    for q in circuit.qubits() {
        out.push_str(&format!("qubit {q}\n"));
    }
    for inst in circuit.instructions() {
        out.push_str(&emit_instruction(inst));
        out.push('\n');
    }
    for m in circuit.measurements() {
        out.push_str(&format!("measure {} -> {}\n", m.qubit, m.label));
    }
    out
}

/// Emits named circuits as `circuit <name>` sections.
pub fn emit_many<'a>(circuits: impl IntoIterator<Item = (&'a str, &'a Circuit)>) -> String {
    circuits.into_iter().map(|(name, c)| format!("circuit {name}\n{}", emit(c))).collect::<Vec<_>>().join("\n")
}

fn gate_args(gate: &Gate) -> String {
    match gate {
        Gate::Unitary(m) => m.entries().iter().map(|z| format!(" {} {}", z.re, z.im)).collect(),
        g => g.angle().map(|t| format!(" {t}")).unwrap_or_default(),
    }
}

fn emit_instruction(inst: &Instruction) -> String {
    match inst {
        Instruction::Single { gate, target } => format!("{} {target}{}", gate.mnemonic(), gate_args(gate)),
        Instruction::Controlled { gate, control, control_value, target } => {
            format!("c{} {control}={control_value} {target}{}", gate.mnemonic(), gate_args(gate))
        }
        Instruction::Swap { a, b } => format!("swap {a} {b}"),
        Instruction::ControlledSwap { control, control_value, a, b } => {
            format!("cswap {control}={control_value} {a} {b}")
        }
    }
}

/// Parses a single circuit.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut builder = Parser::default();
    for (n, raw) in text.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if line.starts_with("circuit ") {
            return Err(Error::Parse { line: n + 1, message: "unexpected section header".into() });
        }
        builder.line(line, n + 1)?;
    }
    builder.finish()
}

/// Parses a file of `circuit <name>` sections.
pub fn parse_many(text: &str) -> Result<Vec<(String, Circuit)>> {
    let mut out = Vec::new();
    let mut current: Option<(String, Parser)> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix("circuit ") {
            if let Some((name, p)) = current.take() {
                out.push((name, p.finish()?));
            }
            current = Some((name.trim().to_string(), Parser::default()));
            continue;
        }
        match current.as_mut() {
            Some((_, p)) => p.line(line, n + 1)?,
            None => return Err(Error::Parse { line: n + 1, message: "instruction before `circuit` header".into() }),
        }
    }
    if let Some((name, p)) = current {
        out.push((name, p.finish()?));
    }
    Ok(out)
}

fn strip(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

#[derive(Default)]
struct Parser {
    qubits: Vec<String>,
    instructions: Vec<Instruction>,
    measurements: Vec<Measurement>,
}

impl Parser {
    fn declare(&mut self, name: &str) {
        if !self.qubits.iter().any(|q| q == name) {
            self.qubits.push(name.to_string());
        }
    }

    fn line(&mut self, line: &str, n: usize) -> Result<()> {
        let err = |message: String| Error::Parse { line: n, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        let (op, args) = (words[0], &words[1..]);
        let expect_args = |count: usize| {
            if args.len() == count {
                Ok(())
            } else {
                Err(err(format!("`{op}` takes {count} operands, got {}", args.len())))
            }
        };
        match op {
            "qubit" => {
                expect_args(1)?;
                if self.qubits.iter().any(|q| q == args[0]) {
                    return Err(err(format!("qubit `{}` declared twice", args[0])));
                }
                self.qubits.push(args[0].to_string());
            }
            "measure" => {
                if args.len() != 3 || args[1] != "->" {
                    return Err(err("expected `measure <qubit> -> <label>`".into()));
                }
                self.declare(args[0]);
                self.measurements.push(Measurement::new(args[0], args[2]));
            }
            "swap" => {
                expect_args(2)?;
                self.declare(args[0]);
                self.declare(args[1]);
                self.instructions.push(Instruction::swap(args[0], args[1]));
            }
            "cswap" => {
                expect_args(3)?;
                let (control, value) = parse_control(args[0]).map_err(err)?;
                for q in [control, args[1], args[2]] {
                    self.declare(q);
                }
                self.instructions.push(Instruction::controlled_swap(control, value, args[1], args[2]));
            }
            _ => {
                let params = args.get(1..).unwrap_or(&[]);
                if let Ok(gate) = parse_gate(op, params) {
                    let target = args.first().copied().ok_or_else(|| err(format!("`{op}` needs a target")))?;
                    self.declare(target);
                    self.instructions.push(Instruction::single(gate, target));
                } else if let Some(inner) = op.strip_prefix('c') {
                    if args.len() < 2 {
                        return Err(err(format!("`{op}` needs a control and a target")));
                    }
                    let (control, value) = parse_control(args[0]).map_err(err)?;
                    let gate = parse_gate(inner, &args[2..]).map_err(err)?;
                    self.declare(control);
                    self.declare(args[1]);
                    self.instructions.push(Instruction::controlled(gate, control, value, args[1]));
                } else {
                    return Err(err(parse_gate(op, params).unwrap_err()));
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<Circuit> {
        Circuit::build(self.qubits, self.instructions, self.measurements)
    }
}

fn parse_control(arg: &str) -> std::result::Result<(&str, u8), String> {
    let (name, value) = arg.split_once('=').ok_or_else(|| format!("control `{arg}` must look like `<qubit>=<0|1>`"))?;
    match value {
        "0" => Ok((name, 0)),
        "1" => Ok((name, 1)),
        v => Err(format!("control value must be 0 or 1, got `{v}`")),
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

fn parse_gate(mnemonic: &str, params: &[&str]) -> std::result::Result<Gate, String> {
    let angle = || -> std::result::Result<f64, String> {
        match params {
            [t] => parse_number(t),
            _ => Err(format!("`{mnemonic}` takes one angle")),
        }
    };
    let bare = |g: Gate| if params.is_empty() { Ok(g) } else { Err(format!("`{mnemonic}` takes no angle")) };
    match mnemonic {
        "h" => bare(Gate::H),
        "x" => bare(Gate::X),
        "rot" => Ok(Gate::Rot(angle()?)),
        "rx" => Ok(Gate::Rx(angle()?)),
        "ry" => Ok(Gate::Ry(angle()?)),
        "rz" => Ok(Gate::Rz(angle()?)),
        "p" => Ok(Gate::Phase(angle()?)),
        "u" => {
            if params.len() != 8 {
                return Err("`u` takes 8 numbers (re im for each entry)".into());
            }
            let nums = params.iter().map(|s| parse_number(s)).collect::<std::result::Result<Vec<_>, _>>()?;
            let entries = nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            GateMatrix::new(entries).map(Gate::Unitary).map_err(|e| e.to_string())
        }
        other => Err(format!("unknown gate `{other}`")),
    }
}
