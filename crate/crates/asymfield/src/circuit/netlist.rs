//! Line-oriented netlist format for scattering networks.
//!
//! One statement per line, `#` starts a comment, identifiers are
//! `[A-Za-z_][A-Za-z0-9_]*`. Statement order is free except that `mode`
//! and `dipole` must each appear exactly once:
//!
//! ```text
//! mode n=<f> ng=<f> aeff=<f m^2> lambda0=<f m> [l=<f m>]
//! dipole p=<f C·m> [nocc=<int>]
//! coupler <id> sigma=<f> fwd=<inA,inB,outA,outB> bwd=<inA,inB,outA,outB>
//! segment <id> phase=<f rad>|length=<f m> [atten=<f>] fwd=<in,out> bwd=<in,out>
//! scatterer <id> rho=<f> ccw=<in,out> cw=<in,out>
//! port <label> in=<link> out=<link>
//! probe segment=<id> offset=<f>
//! ```
//!
//! Unknown keys are hard errors; a silent typo in a coupling constant
//! would corrupt the physics.

use std::fmt;

use super::{Circuit, CircuitBuilder, CircuitError, Element};
use crate::emission::{DipoleSpec, ModeContext};

#[derive(Debug, Clone, PartialEq)]
pub enum NetlistError {
    Syntax { line: usize, column: usize, message: String },
    Invalid { diagnostics: Vec<String> },
}

impl fmt::Display for NetlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetlistError::Syntax { line, column, message } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            NetlistError::Invalid { diagnostics } => {
                write!(f, "invalid circuit: {}", diagnostics.join("; "))
            }
        }
    }
}

impl std::error::Error for NetlistError {}

/// A token plus its 1-based column in the source line.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token { text: &line[s..], column: s + 1 });
    }
    tokens
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Copy)]
struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err<T>(&self, column: usize, message: impl Into<String>) -> Result<T, NetlistError> {
        Err(NetlistError::Syntax { line: self.line, column, message: message.into() })
    }
}

/// Key/value fields of one statement, consumed as they are read so that
/// leftovers can be reported as unknown keys.
struct Fields<'c, 'a> {
    ctx: &'c LineCtx,
    pairs: Vec<(Token<'a>, &'a str)>,
    used: Vec<bool>,
}

impl<'c, 'a> Fields<'c, 'a> {
    fn new(ctx: &'c LineCtx, tokens: &[Token<'a>]) -> Result<Self, NetlistError> {
        let mut pairs = Vec::new();
        for tok in tokens {
            match tok.text.split_once('=') {
                Some((key, value)) if !key.is_empty() && !value.is_empty() => {
                    pairs.push((Token { text: key, column: tok.column }, value));
                }
                _ => {
                    return ctx.err(tok.column, format!("expected key=value, found `{}`", tok.text))
                }
            }
        }
        let used = vec![false; pairs.len()];
        Ok(Self { ctx, pairs, used })
    }

    fn take(&mut self, key: &str) -> Result<Option<(&'a str, usize)>, NetlistError> {
        let mut found = None;
        for (i, (k, v)) in self.pairs.iter().enumerate() {
            if k.text == key {
                if self.used[i] {
                    continue;
                }
                if found.is_some() {
                    return self.ctx.err(k.column, format!("duplicate key `{key}`"));
                }
                self.used[i] = true;
                found = Some((*v, k.column));
            }
        }
        Ok(found)
    }

    fn require(&mut self, key: &str) -> Result<(&'a str, usize), NetlistError> {
        match self.take(key)? {
            Some(hit) => Ok(hit),
            None => self.ctx.err(1, format!("missing required key `{key}`")),
        }
    }

    fn finish(self) -> Result<(), NetlistError> {
        for (i, (k, _)) in self.pairs.iter().enumerate() {
            if !self.used[i] {
                return self.ctx.err(k.column, format!("unknown key `{}`", k.text));
            }
        }
        Ok(())
    }
}

fn parse_number(ctx: &LineCtx, value: &str, column: usize) -> Result<f64, NetlistError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => ctx.err(column, format!("expected a finite number, found `{value}`")),
    }
}

fn parse_links<const N: usize>(
    ctx: &LineCtx,
    value: &str,
    column: usize,
) -> Result<[String; N], NetlistError> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != N {
        return ctx.err(column, format!("expected {N} comma-separated links, found `{value}`"));
    }
    let mut out = std::array::from_fn(|_| String::new());
    for (i, part) in parts.iter().enumerate() {
        if !is_identifier(part) {
            return ctx.err(column, format!("`{part}` is not a valid identifier"));
        }
        out[i] = part.to_string();
    }
    Ok(out)
}

enum PhaseSpec {
    Phase(f64),
    Length(f64),
}

enum Statement {
    Mode { n: f64, ng: f64, aeff: f64, lambda0: f64, len: Option<f64> },
    Dipole { p: f64, nocc: u32 },
    Coupler { id: String, sigma: f64, fwd: [String; 4], bwd: [String; 4] },
    Segment { id: String, phase: PhaseSpec, atten: f64, fwd: [String; 2], bwd: [String; 2] },
    Scatterer { id: String, rho: f64, ccw: [String; 2], cw: [String; 2] },
    Port { label: String, input: String, output: String },
    Probe { segment: String, offset: f64 },
}

fn element_id<'a>(ctx: &LineCtx, tokens: &[Token<'a>]) -> Result<(&'a str, usize), NetlistError> {
    match tokens.get(1) {
        Some(tok) if is_identifier(tok.text) => Ok((tok.text, 2)),
        Some(tok) => ctx.err(tok.column, format!("`{}` is not a valid identifier", tok.text)),
        None => ctx.err(1, "missing identifier"),
    }
}

fn parse_statement(ctx: &LineCtx, tokens: &[Token<'_>]) -> Result<Statement, NetlistError> {
    let keyword = &tokens[0];
    match keyword.text {
        "mode" => {
            let mut fields = Fields::new(ctx, &tokens[1..])?;
            let (n, nc) = fields.require("n")?;
            let (ng, ngc) = fields.require("ng")?;
            let (aeff, ac) = fields.require("aeff")?;
            let (lambda0, lc) = fields.require("lambda0")?;
            let len = match fields.take("l")? {
                Some((v, c)) => Some(parse_number(ctx, v, c)?),
                None => None,
            };
            fields.finish()?;
            Ok(Statement::Mode {
                n: parse_number(ctx, n, nc)?,
                ng: parse_number(ctx, ng, ngc)?,
                aeff: parse_number(ctx, aeff, ac)?,
                lambda0: parse_number(ctx, lambda0, lc)?,
                len,
            })
        }
        "dipole" => {
            let mut fields = Fields::new(ctx, &tokens[1..])?;
            let (p, pc) = fields.require("p")?;
            let nocc = match fields.take("nocc")? {
                Some((v, c)) => match v.parse::<u32>() {
                    Ok(n) => n,
                    Err(_) => {
                        return ctx.err(c, format!("expected a non-negative integer, found `{v}`"))
                    }
                },
                None => 0,
            };
            fields.finish()?;
            Ok(Statement::Dipole { p: parse_number(ctx, p, pc)?, nocc })
        }
        "coupler" => {
            let (id, skip) = element_id(ctx, tokens)?;
            let mut fields = Fields::new(ctx, &tokens[skip..])?;
            let (sigma, sc) = fields.require("sigma")?;
            let (fwd, fc) = fields.require("fwd")?;
            let (bwd, bc) = fields.require("bwd")?;
            fields.finish()?;
            Ok(Statement::Coupler {
                id: id.to_string(),
                sigma: parse_number(ctx, sigma, sc)?,
                fwd: parse_links::<4>(ctx, fwd, fc)?,
                bwd: parse_links::<4>(ctx, bwd, bc)?,
            })
        }
        "segment" => {
            let (id, skip) = element_id(ctx, tokens)?;
            let mut fields = Fields::new(ctx, &tokens[skip..])?;
            let phase = match (fields.take("phase")?, fields.take("length")?) {
                (Some((v, c)), None) => PhaseSpec::Phase(parse_number(ctx, v, c)?),
                (None, Some((v, c))) => PhaseSpec::Length(parse_number(ctx, v, c)?),
                (Some(_), Some((_, c))) => {
                    return ctx.err(c, "give either phase= or length=, not both")
                }
                (None, None) => return ctx.err(1, "missing required key `phase` (or `length`)"),
            };
            let atten = match fields.take("atten")? {
                Some((v, c)) => parse_number(ctx, v, c)?,
                None => 1.0,
            };
            let (fwd, fc) = fields.require("fwd")?;
            let (bwd, bc) = fields.require("bwd")?;
            fields.finish()?;
            Ok(Statement::Segment {
                id: id.to_string(),
                phase,
                atten,
                fwd: parse_links::<2>(ctx, fwd, fc)?,
                bwd: parse_links::<2>(ctx, bwd, bc)?,
            })
        }
        "scatterer" => {
            let (id, skip) = element_id(ctx, tokens)?;
            let mut fields = Fields::new(ctx, &tokens[skip..])?;
            let (rho, rc) = fields.require("rho")?;
            let (ccw, cc) = fields.require("ccw")?;
            let (cw, wc) = fields.require("cw")?;
            fields.finish()?;
            Ok(Statement::Scatterer {
                id: id.to_string(),
                rho: parse_number(ctx, rho, rc)?,
                ccw: parse_links::<2>(ctx, ccw, cc)?,
                cw: parse_links::<2>(ctx, cw, wc)?,
            })
        }
        "port" => {
            let (label, skip) = element_id(ctx, tokens)?;
            let mut fields = Fields::new(ctx, &tokens[skip..])?;
            let (input, ic) = fields.require("in")?;
            let (output, oc) = fields.require("out")?;
            fields.finish()?;
            if !is_identifier(input) {
                return ctx.err(ic, format!("`{input}` is not a valid identifier"));
            }
            if !is_identifier(output) {
                return ctx.err(oc, format!("`{output}` is not a valid identifier"));
            }
            Ok(Statement::Port {
                label: label.to_string(),
                input: input.to_string(),
                output: output.to_string(),
            })
        }
        "probe" => {
            let mut fields = Fields::new(ctx, &tokens[1..])?;
            let (segment, sc) = fields.require("segment")?;
            let (offset, oc) = fields.require("offset")?;
            fields.finish()?;
            if !is_identifier(segment) {
                return ctx.err(sc, format!("`{segment}` is not a valid identifier"));
            }
            Ok(Statement::Probe {
                segment: segment.to_string(),
                offset: parse_number(ctx, offset, oc)?,
            })
        }
        other => ctx.err(keyword.column, format!("unknown statement `{other}`")),
    }
}

/// Parse a netlist document into a validated [`Circuit`].
pub fn parse_netlist(text: &str) -> Result<Circuit, NetlistError> {
    let mut statements = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let ctx = LineCtx { line: idx + 1 };
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        statements.push((ctx, parse_statement(&ctx, &tokens)?));
    }

    let mut mode = None;
    let mut dipole = None;
    for (ctx, statement) in &statements {
        match statement {
            Statement::Mode { n, ng, aeff, lambda0, len } => {
                if mode.is_some() {
                    return ctx.err(1, "duplicate mode statement");
                }
                let mut m = ModeContext::new(*lambda0, *n, *ng, *aeff);
                m.resonator_len = *len;
                mode = Some(m);
            }
            Statement::Dipole { p, nocc } => {
                if dipole.is_some() {
                    return ctx.err(1, "duplicate dipole statement");
                }
                dipole = Some(DipoleSpec::new(*p, *nocc));
            }
            _ => {}
        }
    }
    let mode = mode.ok_or_else(|| NetlistError::Syntax {
        line: 0,
        column: 1,
        message: "missing mode statement".to_string(),
    })?;
    let dipole = dipole.ok_or_else(|| NetlistError::Syntax {
        line: 0,
        column: 1,
        message: "missing dipole statement".to_string(),
    })?;

    let k0 = mode.k0();
    let mut builder = CircuitBuilder::new(mode, dipole);
    let mut saw_probe = false;
    for (ctx, statement) in &statements {
        let lift = |e: CircuitError| NetlistError::Syntax {
            line: ctx.line,
            column: 1,
            message: e.to_string(),
        };
        match statement {
            Statement::Mode { .. } | Statement::Dipole { .. } => {}
            Statement::Coupler { id, sigma, fwd, bwd } => {
                builder
                    .coupler(
                        id,
                        *sigma,
                        std::array::from_fn(|i| fwd[i].as_str()),
                        std::array::from_fn(|i| bwd[i].as_str()),
                    )
                    .map_err(lift)?;
            }
            Statement::Segment { id, phase, atten, fwd, bwd } => {
                let phase = match phase {
                    PhaseSpec::Phase(p) => *p,
                    PhaseSpec::Length(l) => k0 * l,
                };
                builder
                    .segment(id, phase, *atten, [&fwd[0], &fwd[1]], [&bwd[0], &bwd[1]])
                    .map_err(lift)?;
            }
            Statement::Scatterer { id, rho, ccw, cw } => {
                builder.scatterer(id, *rho, [&ccw[0], &ccw[1]], [&cw[0], &cw[1]]).map_err(lift)?;
            }
            Statement::Port { label, input, output } => {
                builder.port(label, input, output).map_err(lift)?;
            }
            Statement::Probe { segment, offset } => {
                saw_probe = true;
                builder.probe(segment, *offset).map_err(lift)?;
            }
        }
    }
    if !saw_probe {
        return Err(NetlistError::Syntax {
            line: 0,
            column: 1,
            message: "missing probe statement".to_string(),
        });
    }
    builder.finish().map_err(|e| match e {
        CircuitError::Invalid(diagnostics) => NetlistError::Invalid { diagnostics },
        other => NetlistError::Syntax { line: 0, column: 1, message: other.to_string() },
    })
}

impl Circuit {
    /// Serialize back to netlist text; `parse_netlist` of the output is
    /// structurally identical to `self` (`{:?}` float formatting is exact).
    pub fn to_netlist(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let m = &self.mode;
        write!(out, "mode n={:?} ng={:?} aeff={:?} lambda0={:?}", m.n, m.n_g, m.a_eff, m.lambda0)
            .unwrap();
        if let Some(l) = m.resonator_len {
            write!(out, " l={l:?}").unwrap();
        }
        out.push('\n');
        writeln!(out, "dipole p={:?} nocc={}", self.dipole.moment, self.dipole.n_occ).unwrap();
        let name = |l: &super::LinkId| self.link_name(*l);
        for element in &self.elements {
            match element {
                Element::Coupler(c) => {
                    writeln!(
                        out,
                        "coupler {} sigma={:?} fwd={},{},{},{} bwd={},{},{},{}",
                        c.id,
                        c.sigma,
                        name(&c.fwd.in_a),
                        name(&c.fwd.in_b),
                        name(&c.fwd.out_a),
                        name(&c.fwd.out_b),
                        name(&c.bwd.in_a),
                        name(&c.bwd.in_b),
                        name(&c.bwd.out_a),
                        name(&c.bwd.out_b),
                    )
                    .unwrap();
                }
                Element::Segment(s) => {
                    write!(out, "segment {} phase={:?}", s.id, s.phase).unwrap();
                    if s.atten != 1.0 {
                        write!(out, " atten={:?}", s.atten).unwrap();
                    }
                    writeln!(
                        out,
                        " fwd={},{} bwd={},{}",
                        name(&s.fwd.0),
                        name(&s.fwd.1),
                        name(&s.bwd.0),
                        name(&s.bwd.1),
                    )
                    .unwrap();
                }
                Element::Scatterer(s) => {
                    writeln!(
                        out,
                        "scatterer {} rho={:?} ccw={},{} cw={},{}",
                        s.id,
                        s.rho,
                        name(&s.ccw.0),
                        name(&s.ccw.1),
                        name(&s.cw.0),
                        name(&s.cw.1),
                    )
                    .unwrap();
                }
            }
        }
        for port in &self.ports {
            writeln!(
                out,
                "port {} in={} out={}",
                port.label,
                name(&port.input),
                name(&port.output)
            )
            .unwrap();
        }
        if let Some(probe) = &self.probe {
            writeln!(out, "probe segment={} offset={:?}", probe.segment, probe.offset).unwrap();
        }
        out
    }
}
