//! Line-oriented model files.
//!
//! ```text
//! clocks: x, y
//! params: p in [0, 2]; q in [0, 2]
//! init: l0
//! loc l0 inv: x <= p
//! loc l1
//! edge l0 -> l1 on a when 1 <= x & x <= 2*p reset {x}
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::pta::{ClockAtom, Edge, ParamBounds, Pta};
use super::ModelError;
use crate::poly::{format_expr, parse_conjunction, LinearTerm, TextError};

struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl Line<'_> {
    fn col(&self, byte: usize) -> usize {
        self.text[..byte].chars().count() + 1
    }

    fn err(&self, byte: usize, msg: impl Into<String>) -> ModelError {
        ModelError::Syntax {
            line: self.no,
            column: self.col(byte),
            message: msg.into(),
        }
    }

    fn text_err(&self, byte: usize, e: TextError) -> ModelError {
        let e = e.shifted(self.no, self.col(byte));
        ModelError::Syntax {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Byte offset of `sub` inside `whole` (both slices of the same string).
fn offset(whole: &str, sub: &str) -> usize {
    sub.as_ptr() as usize - whole.as_ptr() as usize
}

/// Finds a whole-word keyword at or after `from`.
fn find_word(s: &str, word: &str, from: usize) -> Option<usize> {
    let mut start = from;
    while let Some(i) = s[start..].find(word) {
        let at = start + i;
        let before = s[..at].chars().next_back();
        let after = s[at + word.len()..].chars().next();
        let boundary = |c: Option<char>| c.map_or(true, |c| !(c.is_alphanumeric() || c == '_'));
        if boundary(before) && boundary(after) {
            return Some(at);
        }
        start = at + word.len();
    }
    None
}

#[derive(Default)]
struct Draft {
    clocks: Option<Vec<String>>,
    params: Vec<(String, ParamBounds)>,
    params_seen: bool,
    init: Option<(String, usize)>,
    locs: Vec<(String, Option<(usize, usize, String)>)>,
    edges: Vec<EdgeDraft>,
}

struct EdgeDraft {
    line: usize,
    source: (String, usize),
    target: (String, usize),
    action: String,
    guard: Option<(usize, String)>,
    resets: Vec<(String, usize)>,
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<Pta, ModelError> {
    let mut d = Draft::default();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let line = Line { no: i + 1, text: raw };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let start = offset(raw, trimmed);
        if let Some(rest) = trimmed.strip_prefix("clocks:") {
            if d.clocks.is_some() {
                return Err(line.err(start, "clocks declared twice"));
            }
            let mut cs = Vec::new();
            for item in rest.split(',') {
                let name = item.trim();
                if name.is_empty() && rest.trim().is_empty() {
                    break;
                }
                if !is_ident(name) {
                    return Err(line.err(offset(raw, item), format!("invalid clock name `{name}`")));
                }
                cs.push(name.to_string());
            }
            d.clocks = Some(cs);
        } else if let Some(rest) = trimmed.strip_prefix("params:") {
            if d.params_seen {
                return Err(line.err(start, "params declared twice"));
            }
            d.params_seen = true;
            for item in rest.split(';') {
                if item.trim().is_empty() {
                    continue;
                }
                d.params.push(parse_param(&line, raw, item)?);
            }
        } else if let Some(rest) = trimmed.strip_prefix("init:") {
            let name = rest.trim();
            if !is_ident(name) {
                return Err(line.err(offset(raw, rest), "expected a location name"));
            }
            d.init = Some((name.to_string(), line.no));
        } else if trimmed.starts_with("loc ") || trimmed == "loc" {
            let rest = &trimmed[3..];
            let (name_part, inv) = match rest.find("inv:") {
                Some(k) => (&rest[..k], Some(&rest[k + 4..])),
                None => (rest, None),
            };
            let name = name_part.trim();
            if !is_ident(name) {
                return Err(line.err(offset(raw, name_part), "expected a location name"));
            }
            let inv = inv.map(|s| (line.no, offset(raw, s), s.to_string()));
            d.locs.push((name.to_string(), inv));
        } else if trimmed.starts_with("edge ") {
            d.edges.push(parse_edge(&line, raw, &trimmed[5..])?);
        } else {
            return Err(line.err(start, "expected `clocks:`, `params:`, `init:`, `loc` or `edge`"));
        }
    }
    build(d, text)
}

fn parse_param(line: &Line, raw: &str, item: &str) -> Result<(String, ParamBounds), ModelError> {
    let at = offset(raw, item);
    let Some(k) = find_word(item, "in", 0) else {
        return Err(line.err(at, format!("parameter `{}` is missing bounds `in [a, b]`", item.trim())));
    };
    let name = item[..k].trim();
    if !is_ident(name) {
        return Err(line.err(at, format!("invalid parameter name `{name}`")));
    }
    let range = item[k + 2..].trim();
    let bad = || line.err(at + k + 2, format!("expected `[a, b]` with integer bounds for `{name}`"));
    let inner = range.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
    let (a, b) = inner.split_once(',').ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    Ok((name.to_string(), ParamBounds { lower: a, upper: b }))
}

fn parse_edge(line: &Line, raw: &str, rest: &str) -> Result<EdgeDraft, ModelError> {
    let base = offset(raw, rest);
    let arrow = rest.find("->").ok_or_else(|| line.err(base, "expected `->`"))?;
    let src = rest[..arrow].trim();
    if !is_ident(src) {
        return Err(line.err(base, "expected a source location"));
    }
    let after = arrow + 2;
    let on = find_word(rest, "on", after).ok_or_else(|| line.err(base + after, "expected `on <action>`"))?;
    let dst = rest[after..on].trim();
    if !is_ident(dst) {
        return Err(line.err(base + after, "expected a target location"));
    }
    let when = find_word(rest, "when", on);
    let reset = find_word(rest, "reset", on);
    if let (Some(w), Some(r)) = (when, reset) {
        if r < w {
            return Err(line.err(base + r, "`reset` must come after `when`"));
        }
    }
    let act_end = when.or(reset).unwrap_or(rest.len());
    let act = rest[on + 2..act_end].trim();
    if !is_ident(act) {
        return Err(line.err(base + on + 2, "expected an action name"));
    }
    let guard = when.map(|w| {
        let end = reset.unwrap_or(rest.len());
        (base + w + 4, rest[w + 4..end].to_string())
    });
    let mut resets = Vec::new();
    if let Some(r) = reset {
        let body = rest[r + 5..].trim();
        let body_at = base + offset(rest, body);
        let inner = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| line.err(body_at, "expected `{clock, ...}`"))?;
        for item in inner.split(',') {
            let name = item.trim();
            if name.is_empty() && inner.trim().is_empty() {
                break;
            }
            if !is_ident(name) {
                return Err(line.err(base + offset(rest, item), format!("invalid clock name `{name}`")));
            }
            resets.push((name.to_string(), line.col(base + offset(rest, item))));
        }
    }
    Ok(EdgeDraft {
        line: line.no,
        source: (src.to_string(), line.col(base)),
        target: (dst.to_string(), line.col(base + after)),
        action: act.to_string(),
        guard,
        resets,
    })
}

fn build(d: Draft, text: &str) -> Result<Pta, ModelError> {
    let lines: Vec<&str> = text.lines().collect();
    let clocks = d.clocks.unwrap_or_default();
    let params: Vec<String> = d.params.iter().map(|(n, _)| n.clone()).collect();
    let bounds: Vec<ParamBounds> = d.params.iter().map(|(_, b)| *b).collect();
    let locations: Vec<String> = d.locs.iter().map(|(n, _)| n.clone()).collect();
    let syntax = |line: usize, column: usize, message: String| ModelError::Syntax { line, column, message };

    let (init_name, init_line) = d.init.ok_or_else(|| ModelError::Invalid(vec!["missing `init:` declaration".into()]))?;
    let initial = locations
        .iter()
        .position(|l| *l == init_name)
        .ok_or_else(|| syntax(init_line, 1, format!("unknown location `{init_name}`")))?;

    let atoms = |no: usize, at: usize, text: &str| -> Result<Vec<ClockAtom>, ModelError> {
        let line = Line { no, text: lines[no - 1] };
        let conj = parse_conjunction(text).map_err(|e| line.text_err(at, e))?;
        conj.into_iter()
            .map(|a| to_clock_atom(&clocks, &params, a).map_err(|m| line.err(at, m)))
            .collect()
    };

    let mut invariants = Vec::new();
    for (_, inv) in &d.locs {
        invariants.push(match inv {
            Some((no, at, t)) => atoms(*no, *at, t)?,
            None => Vec::new(),
        });
    }
    let mut edges = Vec::new();
    for e in &d.edges {
        let find_loc = |(n, col): &(String, usize)| {
            locations
                .iter()
                .position(|l| l == n)
                .ok_or_else(|| syntax(e.line, *col, format!("unknown location `{n}`")))
        };
        let source = find_loc(&e.source)?;
        let target = find_loc(&e.target)?;
        let guard = match &e.guard {
            Some((at, t)) => atoms(e.line, *at, t)?,
            None => Vec::new(),
        };
        let mut resets = Vec::new();
        for (r, col) in &e.resets {
            let i = clocks
                .iter()
                .position(|c| c == r)
                .ok_or_else(|| syntax(e.line, *col, format!("unknown clock `{r}`")))?;
            if !resets.contains(&i) {
                resets.push(i);
            }
        }
        resets.sort_unstable();
        edges.push(Edge {
            source,
            guard,
            action: e.action.clone(),
            resets,
            target,
        });
    }
    let pta = Pta {
        clocks,
        params,
        bounds,
        locations,
        initial,
        invariants,
        edges,
    };
    pta.validate()?;
    Ok(pta)
}

fn to_clock_atom(clocks: &[String], params: &[String], a: crate::poly::AtomicConstraint) -> Result<ClockAtom, String> {
    let mut clock = None;
    let mut bound = LinearTerm::constant(-a.term.constant_part());
    for (name, c) in a.term.coeffs() {
        if let Some(i) = clocks.iter().position(|x| x == name) {
            if clock.is_some() {
                return Err("a constraint may mention only one clock".into());
            }
            clock = Some((i, c.clone()));
        } else if params.contains(name) {
            bound = bound.plus_var(name.clone(), -c);
        } else {
            return Err(format!("unknown name `{name}`"));
        }
    }
    let Some((clock, c)) = clock else {
        return Err("each constraint must compare a clock to a parameter expression".into());
    };
    if !c.abs().is_one() {
        return Err(format!("clock `{}` must have coefficient 1", clocks[clock]));
    }
    // c·x - bound ⋈ 0
    let (rel, bound) = if c.is_positive() {
        (a.rel, bound)
    } else {
        (a.rel.flipped(), bound.scaled(&BigInt::from(-1)))
    };
    Ok(ClockAtom { clock, rel, bound })
}

fn term_text(pta: &Pta, t: &LinearTerm) -> String {
    let coeffs: Vec<BigInt> = pta.params.iter().map(|p| t.coeff(p)).collect();
    format_expr(&coeffs, t.constant_part(), |i| pta.params[i].clone())
}

fn atoms_text(pta: &Pta, atoms: &[ClockAtom]) -> String {
    if atoms.is_empty() {
        return "true".into();
    }
    atoms
        .iter()
        .map(|a| format!("{} {} {}", pta.clocks[a.clock], a.rel.symbol(), term_text(pta, &a.bound)))
        .collect::<Vec<_>>()
        .join(" & ")
}

/// Canonical model text; `parse_model(print_model(a)) == a`.
pub fn print_model(pta: &Pta) -> String {
    let mut out = String::new();
    out.push_str(&format!("clocks: {}\n", pta.clocks.join(", ")));
    if !pta.params.is_empty() {
        let ps: Vec<String> = pta
            .params
            .iter()
            .zip(&pta.bounds)
            .map(|(p, b)| format!("{p} in [{}, {}]", b.lower, b.upper))
            .collect();
        out.push_str(&format!("params: {}\n", ps.join("; ")));
    }
    out.push_str(&format!("init: {}\n", pta.locations[pta.initial]));
    for (l, inv) in pta.locations.iter().zip(&pta.invariants) {
        if inv.is_empty() {
            out.push_str(&format!("loc {l}\n"));
        } else {
            out.push_str(&format!("loc {l} inv: {}\n", atoms_text(pta, inv)));
        }
    }
    for e in &pta.edges {
        out.push_str(&format!(
            "edge {} -> {} on {}",
            pta.locations[e.source], pta.locations[e.target], e.action
        ));
        if !e.guard.is_empty() {
            out.push_str(&format!(" when {}", atoms_text(pta, &e.guard)));
        }
        if !e.resets.is_empty() {
            let rs: Vec<&str> = e.resets.iter().map(|&r| pta.clocks[r].as_str()).collect();
            out.push_str(&format!(" reset {{{}}}", rs.join(", ")));
        }
        out.push('\n');
    }
    out
}
