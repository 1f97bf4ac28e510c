//! Circuit description files.
//!
//! One directive per line, `#` starts a comment:
//!
//! ```text
//! photons 2
//! source spdc                # or one `input <label> <re> <im>` line per amplitude
//! pbs 1
//! hwp 1 R
//! postselect
//! hadamard 1 R
//! phase 2 L pi/2
//! bs LR:HH LR:VV adjustable  # optional t=re,im r=re,im phase=x; default 50:50
//! detect D1 LR:VV
//! herald D5
//! target 0100 0 -1           # calibration target, one amplitude per line
//! ```

use num_complex::Complex64;

use super::circuit::{Circuit, Item, Source};
use super::element::{BeamSplitter, Element, Mode, Port};
use crate::error::{Error, Result};
use crate::hilbert::{Arm, BasisConvention, Ket};
use crate::parse::{content_lines, parse_complex};
use crate::parse_angle;

fn at<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

fn photon_arg(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad photon index `{token}`")))
}

fn arm_arg(token: &str, line: usize) -> Result<Arm> {
    at(line, token.parse())
}

fn complex_pair(value: &str, line: usize) -> Result<Complex64> {
    let (re, im) = value
        .split_once(',')
        .ok_or_else(|| Error::parse(line, format!("expected `re,im`, got `{value}`")))?;
    parse_complex(re, im, line)
}

fn parse_bs(args: &[&str], photons: usize, line: usize) -> Result<BeamSplitter> {
    let [a, b, rest @ ..] = args else {
        return Err(Error::parse(line, "`bs` needs two modes"));
    };
    let a = at(line, Mode::parse(a, photons))?;
    let b = at(line, Mode::parse(b, photons))?;
    let (mut t, mut r, mut phase, mut adjustable) = (None, None, 0.0, false);
    for opt in rest {
        match opt.split_once('=') {
            Some(("t", v)) => t = Some(complex_pair(v, line)?),
            Some(("r", v)) => r = Some(complex_pair(v, line)?),
            Some(("phase", v)) => phase = at(line, parse_angle(v))?,
            None if *opt == "adjustable" => adjustable = true,
            _ => return Err(Error::parse(line, format!("unknown beam-splitter option `{opt}`"))),
        }
    }
    let bs = match (t, r) {
        (None, None) => at(line, BeamSplitter::balanced(a, b))?,
        (Some(t), Some(r)) => at(line, BeamSplitter::new(a, b, t, r, phase))?,
        _ => return Err(Error::parse(line, "give both `t=` and `r=` or neither")),
    };
    Ok(bs.with_adjustable(adjustable))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = content_lines(text).peekable();
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty circuit file"))?;
    let photons = match first.split_whitespace().collect::<Vec<_>>()[..] {
        ["photons", n] => photon_arg(n, line)?,
        _ => return Err(Error::parse(line, "first directive must be `photons <n>`")),
    };
    let conv = at(line, BasisConvention::new(photons))?;

    let mut source: Option<Source> = None;
    let mut inputs: Vec<(usize, Complex64)> = Vec::new();
    let mut targets: Vec<(usize, Complex64)> = Vec::new();
    let mut body: Vec<(usize, Vec<&str>)> = Vec::new();
    let mut herald: Option<(usize, String)> = None;
    let mut last = line;
    let mut source_line = line;
    for (line, text) in lines {
        last = line;
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields[..] {
            ["source", "spdc"] => {
                if source.is_some() || !inputs.is_empty() {
                    return Err(Error::parse(line, "source given twice"));
                }
                source = Some(Source::Spdc);
                source_line = line;
            }
            ["input", label, re, im] | ["target", label, re, im] => {
                let idx = at(line, conv.parse_label(label))?;
                let amp = parse_complex(re, im, line)?;
                let list = if fields[0] == "input" {
                    if source.is_some() {
                        return Err(Error::parse(line, "source given twice"));
                    }
                    source_line = line;
                    &mut inputs
                } else {
                    &mut targets
                };
                if list.iter().any(|&(k, _)| k == idx) {
                    return Err(Error::parse(line, format!("label `{label}` repeated")));
                }
                list.push((idx, amp));
            }
            ["herald", label] => {
                if herald.is_some() {
                    return Err(Error::parse(line, "herald given twice"));
                }
                herald = Some((line, label.to_string()));
            }
            _ => body.push((line, fields)),
        }
    }
    let source = match source {
        Some(s) => s,
        None if !inputs.is_empty() => {
            let k = at(last, Ket::from_amplitudes(conv, inputs))?;
            Source::State(k)
        }
        None => return Err(Error::parse(last, "no `source` or `input` lines")),
    };
    let mut circuit = at(source_line, Circuit::new(photons, source))?;

    for (line, fields) in body {
        match fields[..] {
            ["pbs", p] => at(line, circuit.push_gate(Element::Pbs { photon: photon_arg(p, line)? }))?,
            ["hwp", p, a] => at(
                line,
                circuit.push_gate(Element::Hwp { photon: photon_arg(p, line)?, arm: arm_arg(a, line)? }),
            )?,
            ["hadamard", p, a] => at(
                line,
                circuit.push_gate(Element::Hadamard {
                    photon: photon_arg(p, line)?,
                    arm: arm_arg(a, line)?,
                }),
            )?,
            ["mirror", p, a] => at(
                line,
                circuit.push_gate(Element::Mirror { photon: photon_arg(p, line)?, arm: arm_arg(a, line)? }),
            )?,
            ["phase", p, a, x] => at(
                line,
                circuit.push_gate(Element::PhaseShifter {
                    photon: photon_arg(p, line)?,
                    arm: arm_arg(a, line)?,
                    phase: at(line, parse_angle(x))?,
                }),
            )?,
            ["bs", ref args @ ..] => {
                let bs = parse_bs(args, photons, line)?;
                at(line, circuit.push_gate(Element::BeamSplitter(bs)))?;
            }
            ["detect", label, port] => {
                let port = at(line, Port::parse(port, photons))?;
                at(line, circuit.push_detector(label, port))?;
            }
            ["postselect"] => at(line, circuit.mark_postselect())?,
            [] => {}
            [word, ..] => return Err(Error::parse(line, format!("unknown or malformed directive `{word}`"))),
        }
    }
    if let Some((line, label)) = herald {
        if !circuit.labels().contains(&label) {
            return Err(Error::parse(line, format!("herald `{label}` is not bound to any port")));
        }
        circuit.set_herald(&label);
    }
    if !targets.is_empty() {
        let k = at(last, Ket::from_amplitudes(conv, targets))?;
        at(last, circuit.set_target(k))?;
    }
    Ok(circuit)
}

impl Circuit {
    /// Serializes to the format read by [`parse_circuit`]; floats use their
    /// shortest round-trip form.
    pub fn to_text(&self) -> String {
        let conv = self.convention();
        let mut out = format!("photons {}\n", self.photons());
        match self.source() {
            Source::Spdc => out.push_str("source spdc\n"),
            Source::State(k) => {
                for (idx, a) in k.iter() {
                    out.push_str(&format!("input {} {:?} {:?}\n", conv.label(idx), a.re, a.im));
                }
            }
        }
        for item in self.items() {
            match item {
                Item::Gate(e) => out.push_str(&format!("{e}\n")),
                Item::Detect { label, port } => out.push_str(&format!("detect {label} {port}\n")),
                Item::PostSelect => out.push_str("postselect\n"),
            }
        }
        if let Some(h) = self.herald() {
            out.push_str(&format!("herald {h}\n"));
        }
        if let Some(t) = self.target() {
            for (idx, a) in t.iter() {
                out.push_str(&format!("target {} {:?} {:?}\n", conv.label(idx), a.re, a.im));
            }
        }
        out
    }
}
