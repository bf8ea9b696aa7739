//! Workspace files: one ring, one superpotential, an optional group action
//! and any number of named factorizations and equivariant structures.
//!
//! The text format is line oriented; `#` starts a comment. Top-level lines:
//!
//! ```text
//! ring 2 q                 # number of variables, field (q or p:PRIME)
//! W = x1^3 + x2^3
//! weights 1 1              # optional; the degree of W is implied
//! action 3 : 1 1           # one line per cyclic factor: order : exponents
//! sl_check                 # optional: reject actions outside SL
//! factorization K
//!   p0 = x1, x2; -x2^2, x1^2   # rows separated by ';', entries by ','
//!   p1 = x1^2, -x2; x2^2, x1
//!   degrees0 = 0; 1            # optional grading data
//!   degrees1 = 1; 2
//!   p0_degree = 0
//! structure E on K
//!   chars0 = 0; 1              # one character per generator,
//!   chars1 = 1; 2              # residues separated by ','
//! ```
//!
//! Attribute lines are indented. Every object is verified on load.
//! JSON files carrying the same data are accepted too.

use serde::{Deserialize, Serialize};

use crate::action::{ActionJson, Character, GroupAction};
use crate::equivariant::EquivariantStructure;
use crate::error::{Error, Result};
use crate::factorization::{infer_grading, FactorizationJson, MatrixFactorization};
use crate::matrix::PolyMatrix;
use crate::poly::{Polynomial, TermJson};
use crate::scalar::Field;
use crate::weights::WeightSystem;

#[derive(Clone, Debug)]
pub struct Workspace {
    pub nvars: usize,
    pub field: Field,
    pub w: Polynomial,
    /// Weights given explicitly in the file.
    pub weights: Option<WeightSystem>,
    pub action: Option<GroupAction>,
    pub sl_check: bool,
    factorizations: Vec<(String, MatrixFactorization, usize)>,
    structures: Vec<(String, String, EquivariantStructure, usize)>,
}

/// Verification outcome of one named object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectReport {
    pub name: String,
    pub kind: String,
    pub line: usize,
    pub ok: bool,
    pub residuals: Vec<String>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

/// Moves an error from a sub-parser (reporting line 1) to its place in the file.
fn relocate(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Parse { column: c, message, .. } => parse_err(line, column + c - 1, message),
        other => parse_err(line, column, other.to_string()),
    }
}

/// A piece of a line together with its 1-based starting column.
#[derive(Clone, Copy)]
struct Span<'a> {
    text: &'a str,
    column: usize,
}

impl<'a> Span<'a> {
    fn trim(self) -> Span<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Span { text: self.text.trim(), column: self.column + lead }
    }

    fn split(self, sep: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, c) in self.text.char_indices() {
            if c == sep {
                out.push(Span { text: &self.text[start..i], column: self.column + start });
                start = i + c.len_utf8();
            }
        }
        out.push(Span { text: &self.text[start..], column: self.column + start });
        out
    }

    fn words(self) -> Vec<Span<'a>> {
        self.split(' ').into_iter().filter(|s| !s.text.trim().is_empty()).map(Span::trim).collect()
    }

    fn int<T: std::str::FromStr>(self, line: usize, what: &str) -> Result<T> {
        self.text.parse().map_err(|_| parse_err(line, self.column, format!("expected {what}, found {:?}", self.text)))
    }
}

#[derive(Default)]
struct Pending {
    name: String,
    line: usize,
    on: Option<String>,
    attrs: Vec<Attr>,
}

struct Attr {
    key: String,
    value: String,
    column: usize,
    line: usize,
}

impl Attr {
    fn span(&self) -> Span<'_> {
        Span { text: &self.value, column: self.column }
    }
}

enum Block {
    Factorization(Pending),
    Structure(Pending),
}

impl Workspace {
    pub fn new(w: Polynomial) -> Workspace {
        Workspace {
            nvars: w.nvars(),
            field: w.field(),
            w,
            weights: None,
            action: None,
            sl_check: false,
            factorizations: Vec::new(),
            structures: Vec::new(),
        }
    }

    pub fn with_action(mut self, action: GroupAction) -> Result<Workspace> {
        if !action.is_invariant(&self.w) {
            return Err(Error::NotInvariant);
        }
        self.action = Some(action);
        Ok(self)
    }

    pub fn add_factorization(&mut self, name: &str, p: MatrixFactorization) {
        self.factorizations.push((name.to_string(), p, 0));
    }

    pub fn add_structure(&mut self, name: &str, on: &str, e: EquivariantStructure) {
        self.structures.push((name.to_string(), on.to_string(), e, 0));
    }

    pub fn factorization_names(&self) -> Vec<&str> {
        self.factorizations.iter().map(|(n, ..)| n.as_str()).collect()
    }

    pub fn structure_names(&self) -> Vec<&str> {
        self.structures.iter().map(|(n, ..)| n.as_str()).collect()
    }

    pub fn factorizations(&self) -> impl Iterator<Item = (&str, &MatrixFactorization)> {
        self.factorizations.iter().map(|(n, p, _)| (n.as_str(), p))
    }

    pub fn structures(&self) -> impl Iterator<Item = (&str, &EquivariantStructure)> {
        self.structures.iter().map(|(n, _, e, _)| (n.as_str(), e))
    }

    pub fn factorization(&self, name: &str) -> Result<&MatrixFactorization> {
        self.factorizations
            .iter()
            .find(|(n, ..)| n == name)
            .map(|(_, p, _)| p)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn structure(&self, name: &str) -> Result<&EquivariantStructure> {
        self.structures
            .iter()
            .find(|(n, ..)| n == name)
            .map(|(_, _, e, _)| e)
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    /// Reads a workspace (text or JSON) and verifies every object.
    pub fn load(src: &str) -> Result<Workspace> {
        let ws = Workspace::load_unverified(src)?;
        for r in ws.verify_all() {
            if !r.ok {
                return Err(Error::NotFactorization(format!(
                    "{} {} (line {}): {}",
                    r.kind,
                    r.name,
                    r.line,
                    r.residuals.first().map(String::as_str).unwrap_or("")
                )));
            }
        }
        Ok(ws)
    }

    /// Reads a workspace without checking the factorization identities.
    /// Syntax, grading and invariance of `W` are still checked.
    pub fn load_unverified(src: &str) -> Result<Workspace> {
        if src.trim_start().starts_with('{') {
            let json: WorkspaceJson = serde_json::from_str(src)?;
            Workspace::from_json(&json)
        } else {
            Workspace::parse_text(src)
        }
    }

    pub fn verify_all(&self) -> Vec<ObjectReport> {
        let mut out = Vec::new();
        for (name, p, line) in &self.factorizations {
            let v = p.verify();
            out.push(ObjectReport {
                name: name.clone(),
                kind: "factorization".into(),
                line: *line,
                ok: v.ok,
                residuals: v
                    .residuals
                    .iter()
                    .map(|r| format!("{} - W*id has entry ({}, {}) = {}", r.product, r.row, r.col, r.value))
                    .collect(),
            });
        }
        for (name, _, e, line) in &self.structures {
            let c = e.check();
            out.push(ObjectReport {
                name: name.clone(),
                kind: "structure".into(),
                line: *line,
                ok: c.ok,
                residuals: c
                    .offending
                    .iter()
                    .map(|o| format!("{}[{},{}] monomial {} has the wrong character", o.which, o.row, o.col, o.monomial))
                    .collect(),
            });
        }
        out
    }

    fn parse_text(src: &str) -> Result<Workspace> {
        let mut ring: Option<(usize, Field)> = None;
        let mut w: Option<Polynomial> = None;
        let mut weights: Option<(Vec<u32>, usize)> = None;
        let mut factors: Vec<(u64, Vec<u64>)> = Vec::new();
        let mut action_line = 0;
        let mut sl_check = false;
        let mut blocks: Vec<Block> = Vec::new();

        for (idx, raw) in src.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let span = Span { text: content, column: 1 };
            let indented = content.starts_with(' ') || content.starts_with('\t');
            if indented {
                let body = span.trim();
                let parts = body.split('=');
                if parts.len() != 2 {
                    return Err(parse_err(line, body.column, "expected `key = value`"));
                }
                let value = parts[1].trim();
                let attr = Attr { key: parts[0].trim().text.to_string(), value: value.text.to_string(), column: value.column, line };
                match blocks.last_mut() {
                    Some(Block::Factorization(p)) | Some(Block::Structure(p)) => p.attrs.push(attr),
                    None => return Err(parse_err(line, 1, "attribute outside of a factorization or structure")),
                }
                continue;
            }
            let words = span.words();
            let head = words[0];
            match head.text {
                "ring" => {
                    let n = words.get(1).ok_or_else(|| parse_err(line, head.column, "ring needs a variable count"))?;
                    let nvars: usize = n.int(line, "a variable count")?;
                    let field = match words.get(2) {
                        Some(f) => f.text.parse().map_err(|e: Error| relocate(e, line, f.column))?,
                        None => Field::Rational,
                    };
                    ring = Some((nvars, field));
                }
                "W" => {
                    let (nvars, field) = ring.ok_or_else(|| parse_err(line, 1, "W before ring"))?;
                    let parts = span.split('=');
                    if parts.len() != 2 {
                        return Err(parse_err(line, head.column, "expected `W = polynomial`"));
                    }
                    let v = parts[1].trim();
                    let p = Polynomial::parse(v.text, nvars, field).map_err(|e| relocate(e, line, v.column))?;
                    if p.is_zero() {
                        return Err(parse_err(line, v.column, "the superpotential must be non-zero"));
                    }
                    w = Some(p);
                }
                "weights" => {
                    let ws = words[1..].iter().map(|s| s.int(line, "a positive weight")).collect::<Result<Vec<u32>>>()?;
                    weights = Some((ws, line));
                }
                "action" => {
                    let order = words.get(1).ok_or_else(|| parse_err(line, head.column, "action needs an order"))?;
                    let order: u64 = order.int(line, "a group order")?;
                    match words.get(2) {
                        Some(c) if c.text == ":" => {}
                        Some(c) => return Err(parse_err(line, c.column, "expected `:`")),
                        None => return Err(parse_err(line, content.len() + 1, "expected `: exponents`")),
                    }
                    let exps = words[3..].iter().map(|s| s.int(line, "an exponent")).collect::<Result<Vec<u64>>>()?;
                    factors.push((order, exps));
                    action_line = line;
                }
                "sl_check" => sl_check = true,
                "factorization" | "structure" => {
                    let name = words.get(1).ok_or_else(|| parse_err(line, head.column, "missing name"))?;
                    let mut pending = Pending { name: name.text.to_string(), line, ..Default::default() };
                    if head.text == "structure" {
                        match (words.get(2), words.get(3)) {
                            (Some(on), Some(base)) if on.text == "on" => pending.on = Some(base.text.to_string()),
                            _ => return Err(parse_err(line, name.column, "expected `structure NAME on FACTORIZATION`")),
                        }
                        blocks.push(Block::Structure(pending));
                    } else {
                        blocks.push(Block::Factorization(pending));
                    }
                }
                other => return Err(parse_err(line, head.column, format!("unknown directive {other:?}"))),
            }
        }

        let (nvars, field) = ring.ok_or_else(|| parse_err(1, 1, "missing `ring` line"))?;
        let w = w.ok_or_else(|| parse_err(1, 1, "missing `W = ...` line"))?;
        let mut ws = Workspace::new(w);
        ws.nvars = nvars;
        ws.field = field;
        ws.sl_check = sl_check;
        if let Some((weights, line)) = weights {
            if weights.len() != nvars {
                return Err(parse_err(line, 1, format!("expected {nvars} weights")));
            }
            let system = weight_system(&ws.w, weights).map_err(|e| parse_err(line, 1, e.to_string()))?;
            ws.weights = Some(system);
        }
        if !factors.is_empty() {
            let (orders, exps): (Vec<u64>, Vec<Vec<u64>>) = factors.into_iter().unzip();
            let action = GroupAction::new(orders, exps, nvars).map_err(|e| parse_err(action_line, 1, e.to_string()))?;
            if sl_check && !action.is_special_linear() {
                return Err(parse_err(action_line, 1, "the action is not special linear"));
            }
            ws = ws.with_action(action)?;
        }
        for block in blocks {
            match block {
                Block::Factorization(p) => {
                    let mf = ws.build_factorization(&p)?;
                    ws.factorizations.push((p.name, mf, p.line));
                }
                Block::Structure(p) => {
                    let e = ws.build_structure(&p)?;
                    ws.structures.push((p.name, p.on.unwrap_or_default(), e, p.line));
                }
            }
        }
        Ok(ws)
    }

    fn attr<'p>(p: &'p Pending, key: &str) -> Option<(Span<'p>, usize)> {
        p.attrs.iter().find(|a| a.key == key).map(|a| (a.span(), a.line))
    }

    fn check_keys(p: &Pending, allowed: &[&str]) -> Result<()> {
        for a in &p.attrs {
            if !allowed.contains(&a.key.as_str()) {
                return Err(parse_err(a.line, a.column, format!("unknown attribute {:?}", a.key)));
            }
        }
        Ok(())
    }

    fn matrix(&self, p: &Pending, key: &str) -> Result<PolyMatrix> {
        let (v, line) = Workspace::attr(p, key)
            .ok_or_else(|| parse_err(p.line, 1, format!("{} is missing `{key}`", p.name)))?;
        let mut rows = Vec::new();
        for row in v.split(';') {
            let mut entries = Vec::new();
            for e in row.split(',') {
                let e = e.trim();
                entries.push(Polynomial::parse(e.text, self.nvars, self.field).map_err(|err| relocate(err, line, e.column))?);
            }
            rows.push(entries);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(parse_err(line, v.column, "rows of different lengths"));
        }
        PolyMatrix::from_rows(rows, self.nvars, self.field).map_err(|e| parse_err(line, v.column, e.to_string()))
    }

    fn int_list(p: &Pending, key: &str) -> Result<Option<Vec<i64>>> {
        match Workspace::attr(p, key) {
            None => Ok(None),
            Some((v, line)) => v.split(';').into_iter().map(|s| s.trim().int(line, "an integer")).collect::<Result<_>>().map(Some),
        }
    }

    fn build_factorization(&self, p: &Pending) -> Result<MatrixFactorization> {
        Workspace::check_keys(p, &["p0", "p1", "degrees0", "degrees1", "p0_degree"])?;
        let p0 = self.matrix(p, "p0")?;
        let p1 = self.matrix(p, "p1")?;
        let located = |e: Error| match e {
            e @ Error::Parse { .. } => e,
            other => parse_err(p.line, 1, format!("{}: {other}", p.name)),
        };
        let d0 = Workspace::int_list(p, "degrees0")?;
        let d1 = Workspace::int_list(p, "degrees1")?;
        let e0 = match Workspace::attr(p, "p0_degree") {
            Some((v, line)) => v.trim().int(line, "an integer")?,
            None => 0,
        };
        let explicit = self.weights.clone();
        match (d0, d1) {
            (Some(d0), Some(d1)) => {
                let ws = match explicit {
                    Some(ws) => ws,
                    None => crate::weights::detect_weights(&self.w)?
                        .ok_or_else(|| parse_err(p.line, 1, "degrees given but W is not quasi-homogeneous"))?,
                };
                MatrixFactorization::graded(self.w.clone(), ws, d0, d1, e0, p0, p1).map_err(located)
            }
            (None, None) => match explicit {
                Some(ws) => {
                    let (d0, d1) = infer_grading(&ws, &p0, &p1).map_err(located)?;
                    MatrixFactorization::graded(self.w.clone(), ws, d0, d1, 0, p0, p1).map_err(located)
                }
                None => MatrixFactorization::new(self.w.clone(), p0, p1).map_err(located),
            },
            _ => Err(parse_err(p.line, 1, "give both degrees0 and degrees1 or neither")),
        }
    }

    fn characters(&self, p: &Pending, key: &str) -> Result<Vec<Character>> {
        let (v, line) = Workspace::attr(p, key)
            .ok_or_else(|| parse_err(p.line, 1, format!("{} is missing `{key}`", p.name)))?;
        v.split(';')
            .into_iter()
            .map(|c| {
                c.split(',')
                    .into_iter()
                    .map(|r| r.trim().int(line, "a residue"))
                    .collect::<Result<Vec<u64>>>()
                    .map(Character)
            })
            .collect()
    }

    fn build_structure(&self, p: &Pending) -> Result<EquivariantStructure> {
        Workspace::check_keys(p, &["chars0", "chars1"])?;
        let action = self.action.clone().ok_or_else(|| parse_err(p.line, 1, "structure without an `action` line"))?;
        let on = p.on.as_deref().unwrap_or_default();
        let base = self.factorization(on).map_err(|_| parse_err(p.line, 1, format!("unknown factorization {on:?}")))?;
        let c0 = self.characters(p, "chars0")?;
        let c1 = self.characters(p, "chars1")?;
        EquivariantStructure::new(base.clone(), action, c0, c1).map_err(|e| parse_err(p.line, 1, format!("{}: {e}", p.name)))
    }

    /// Reads the whole workspace over another field. Coefficients must be
    /// rational; reduction modulo a prime fails on denominators divisible by it.
    pub fn change_field(&self, field: Field) -> Result<Workspace> {
        let mut out = Workspace::new(self.w.change_field(field)?);
        out.weights = self.weights.clone();
        out.action = self.action.clone();
        out.sl_check = self.sl_check;
        for (name, p, line) in &self.factorizations {
            out.factorizations.push((name.clone(), p.change_field(field)?, *line));
        }
        for (name, on, e, line) in &self.structures {
            let base = out.factorization(on)?.clone();
            let e = EquivariantStructure::new(base, e.action().clone(), e.chars0().to_vec(), e.chars1().to_vec())?;
            out.structures.push((name.clone(), on.clone(), e, *line));
        }
        Ok(out)
    }

    /// The text form; `Workspace::load(&ws.to_text())` gives back the same data.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("ring {} {}\n", self.nvars, self.field));
        out.push_str(&format!("W = {}\n", self.w));
        if let Some(ws) = &self.weights {
            out.push_str(&format!("weights {}\n", join(ws.weights.iter(), " ")));
        }
        if let Some(a) = &self.action {
            for (m, e) in a.orders().iter().zip(a.exponents()) {
                out.push_str(&format!("action {m} : {}\n", join(e.iter(), " ")));
            }
            if self.sl_check {
                out.push_str("sl_check\n");
            }
        }
        for (name, p, _) in &self.factorizations {
            out.push_str(&format!("\nfactorization {name}\n"));
            out.push_str(&format!("  p0 = {}\n", matrix_text(p.p0())));
            out.push_str(&format!("  p1 = {}\n", matrix_text(p.p1())));
            if p.is_graded() {
                out.push_str(&format!("  degrees0 = {}\n", join(p.module0().degrees.iter(), "; ")));
                out.push_str(&format!("  degrees1 = {}\n", join(p.module1().degrees.iter(), "; ")));
                out.push_str(&format!("  p0_degree = {}\n", p.p0_degree()));
            }
        }
        for (name, on, e, _) in &self.structures {
            out.push_str(&format!("\nstructure {name} on {on}\n"));
            out.push_str(&format!("  chars0 = {}\n", join(e.chars0().iter(), "; ")));
            out.push_str(&format!("  chars1 = {}\n", join(e.chars1().iter(), "; ")));
        }
        out
    }

    pub fn to_json(&self) -> WorkspaceJson {
        WorkspaceJson {
            nvars: self.nvars,
            field: self.field.to_string(),
            w: self.w.to_json(),
            weights: self.weights.as_ref().map(|ws| ws.weights.clone()),
            action: self.action.as_ref().map(|a| a.to_json(self.sl_check)),
            factorizations: self
                .factorizations
                .iter()
                .map(|(name, p, _)| NamedFactorization { name: name.clone(), data: p.to_json() })
                .collect(),
            structures: self
                .structures
                .iter()
                .map(|(name, on, e, _)| NamedStructure {
                    name: name.clone(),
                    on: on.clone(),
                    chars0: e.chars0().iter().map(|c| c.0.clone()).collect(),
                    chars1: e.chars1().iter().map(|c| c.0.clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &WorkspaceJson) -> Result<Workspace> {
        let field: Field = json.field.parse()?;
        let w = Polynomial::from_json(&json.w, json.nvars, field)?;
        if w.is_zero() {
            return Err(Error::ZeroSuperpotential);
        }
        let mut ws = Workspace::new(w);
        if let Some(weights) = &json.weights {
            ws.weights = Some(weight_system(&ws.w, weights.clone())?);
        }
        if let Some(a) = &json.action {
            ws.sl_check = a.sl_check;
            ws = ws.with_action(GroupAction::from_json(a, json.nvars)?)?;
        }
        for (line, f) in json.factorizations.iter().enumerate() {
            let mut data = f.data.clone();
            if data.weights.is_none() {
                data.weights = json.weights.clone();
            }
            if data.field.is_none() {
                data.field = Some(json.field.clone());
            }
            if data.w.is_empty() {
                data.w = json.w.clone();
            }
            let p = MatrixFactorization::from_json(&data)?;
            if p.w() != &ws.w {
                return Err(Error::Usage(format!("factorization {} has a different W", f.name)));
            }
            ws.factorizations.push((f.name.clone(), p, line + 1));
        }
        for (line, s) in json.structures.iter().enumerate() {
            let action = ws.action.clone().ok_or_else(|| Error::Usage("structures need an action".into()))?;
            let base = ws.factorization(&s.on)?.clone();
            let e = EquivariantStructure::new(
                base,
                action,
                s.chars0.iter().cloned().map(Character).collect(),
                s.chars1.iter().cloned().map(Character).collect(),
            )?;
            ws.structures.push((s.name.clone(), s.on.clone(), e, line + 1));
        }
        Ok(ws)
    }
}

fn weight_system(w: &Polynomial, weights: Vec<u32>) -> Result<WeightSystem> {
    let degree = w.monomials().next().map(|m| m.weighted_degree(&weights)).unwrap_or(0);
    let ws = WeightSystem::new(weights, degree as u32)?;
    if !ws.is_quasi_homogeneous(w) {
        return Err(Error::Grading(format!("W = {w} is not homogeneous for the given weights")));
    }
    Ok(ws)
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>, sep: &str) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn matrix_text(m: &PolyMatrix) -> String {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkspaceJson {
    pub nvars: usize,
    pub field: String,
    #[serde(rename = "W")]
    pub w: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionJson>,
    #[serde(default)]
    pub factorizations: Vec<NamedFactorization>,
    #[serde(default)]
    pub structures: Vec<NamedStructure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedFactorization {
    pub name: String,
    #[serde(flatten)]
    pub data: FactorizationJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedStructure {
    pub name: String,
    pub on: String,
    pub chars0: Vec<Vec<u64>>,
    pub chars1: Vec<Vec<u64>>,
}
