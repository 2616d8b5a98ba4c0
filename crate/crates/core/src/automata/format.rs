//! Line-oriented automaton format; see `docs/automaton-format.md`.
//!
//! ```text
//! states 2
//! initial 0
//! deterministic 1
//! atoms a b
//! alphabet powerset
//! 0 --*--> 0
//! 0 --eps--> 1
//! 1 --{a}--> 1 !
//! 1 --{a,b}--> 1 !
//! ```

use std::fmt::Write;

use super::{Ldba, LdbaBuilder, Symbol};
use crate::{Error, Result};

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

#[derive(Default)]
struct Header {
    states: Option<usize>,
    initial: Option<usize>,
    deterministic: Vec<usize>,
    atoms: Vec<String>,
    alphabet: Option<Vec<Vec<String>>>,
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| fmt_err(line, format!("expected state index, found `{tok}`")))
}

fn parse_set(text: &str, line: usize) -> Result<Vec<String>> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| fmt_err(line, format!("expected `{{...}}`, found `{text}`")))?;
    Ok(inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect())
}

/// Splits `{a,b} {c}` into set tokens, tolerating spaces inside braces.
fn split_sets(text: &str, line: usize) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let end = rest
            .find('}')
            .ok_or_else(|| fmt_err(line, "unterminated `{`"))?;
        out.push(parse_set(&rest[..=end], line)?);
        rest = rest[end + 1..].trim_start();
    }
    Ok(out)
}

enum Label {
    Symbol(Vec<String>),
    Eps,
    Wildcard,
}

fn symbol(b: &LdbaBuilder, names: &[String], line: usize) -> Result<Symbol> {
    let mut sym = 0;
    for n in names {
        let i = b
            .atoms()
            .iter()
            .position(|a| a == n)
            .ok_or_else(|| fmt_err(line, format!("unknown letter: atom `{n}` not declared")))?;
        sym |= 1 << i;
    }
    Ok(sym)
}

fn start(h: &Header, line: usize) -> Result<LdbaBuilder> {
    let n = h.states.ok_or_else(|| fmt_err(line, "missing `states` header"))?;
    let initial = h.initial.ok_or_else(|| fmt_err(line, "missing `initial` header"))?;
    let mut b = LdbaBuilder::new(n, initial, &h.deterministic, h.atoms.clone(), None)
        .map_err(|m| fmt_err(line, m))?;
    if let Some(sets) = &h.alphabet {
        let mut alphabet = Vec::with_capacity(sets.len());
        for s in sets {
            alphabet.push(symbol(&b, s, line)?);
        }
        b = LdbaBuilder::new(n, initial, &h.deterministic, h.atoms.clone(), Some(alphabet))
            .map_err(|m| fmt_err(line, m))?;
    }
    Ok(b)
}

pub fn load_automaton(text: &str) -> Result<Ldba> {
    let mut header = Header::default();
    let mut builder: Option<LdbaBuilder> = None;
    let mut wildcards: Vec<(usize, usize, bool, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((lhs, rhs)) = content.split_once("-->") {
            if builder.is_none() {
                builder = Some(start(&header, line)?);
            }
            let b = builder.as_mut().unwrap();
            let (src, label) = lhs
                .split_once("--")
                .ok_or_else(|| fmt_err(line, "expected `q --label--> q'`"))?;
            let q = parse_index(src.trim(), line)?;
            let label = match label.trim() {
                "eps" => Label::Eps,
                "*" => Label::Wildcard,
                l => Label::Symbol(parse_set(l, line)?),
            };
            let mut toks = rhs.split_whitespace();
            let to = parse_index(
                toks.next().ok_or_else(|| fmt_err(line, "missing target state"))?,
                line,
            )?;
            let accepting = match toks.next() {
                None => false,
                Some("!") => true,
                Some(t) => return Err(fmt_err(line, format!("unexpected `{t}`"))),
            };
            if let Some(t) = toks.next() {
                return Err(fmt_err(line, format!("unexpected `{t}`")));
            }
            match label {
                Label::Eps => {
                    if accepting {
                        return Err(fmt_err(line, "epsilon transitions cannot be accepting"));
                    }
                    b.epsilon(q, to).map_err(|m| fmt_err(line, m))?;
                }
                Label::Symbol(names) => {
                    let sym = symbol(b, &names, line)?;
                    b.transition(q, sym, to, accepting).map_err(|m| fmt_err(line, m))?;
                }
                Label::Wildcard => {
                    if wildcards.iter().any(|w| w.0 == q) {
                        return Err(fmt_err(line, format!("determinism violation: second wildcard from {q}")));
                    }
                    wildcards.push((q, to, accepting, line));
                }
            }
            continue;
        }
        if builder.is_some() {
            return Err(fmt_err(line, "header lines must precede transitions"));
        }
        let (key, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match key {
            "states" => header.states = Some(parse_index(rest, line)?),
            "initial" => header.initial = Some(parse_index(rest, line)?),
            "deterministic" => {
                header.deterministic = rest
                    .split_whitespace()
                    .map(|t| parse_index(t, line))
                    .collect::<Result<_>>()?
            }
            "atoms" => header.atoms = rest.split_whitespace().map(String::from).collect(),
            "alphabet" => {
                header.alphabet = if rest == "powerset" { None } else { Some(split_sets(rest, line)?) }
            }
            _ => return Err(fmt_err(line, format!("unknown header `{key}`"))),
        }
    }
    let mut b = match builder {
        Some(b) => b,
        None => start(&header, text.lines().count().max(1))?,
    };
    let n = header.states.unwrap_or(0);
    for (q, to, accepting, line) in wildcards {
        if q >= n {
            return Err(fmt_err(line, format!("dangling state index {q}")));
        }
        for i in 0..b.alphabet().len() {
            if !b.has_transition(q, i) {
                b.transition_index(q, i, to, accepting)
                    .map_err(|m| fmt_err(line, m))?;
            }
        }
    }
    Ok(b.build())
}

fn symbol_text(a: &Ldba, sym: Symbol) -> String {
    let names: Vec<_> = (0..a.atoms.len())
        .filter(|i| sym >> i & 1 == 1)
        .map(|i| a.atoms[i].as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Writes every transition explicitly; [`load_automaton`] reads it back to an
/// equal value.
pub fn serialize_automaton(a: &Ldba) -> String {
    let mut out = String::new();
    writeln!(out, "states {}", a.n).unwrap();
    writeln!(out, "initial {}", a.initial).unwrap();
    let det: Vec<String> = (0..a.n)
        .filter(|&q| a.deterministic[q])
        .map(|q| q.to_string())
        .collect();
    writeln!(out, "deterministic {}", det.join(" ")).unwrap();
    writeln!(out, "atoms {}", a.atoms.join(" ")).unwrap();
    let powerset: Vec<Symbol> = (0..1u64 << a.atoms.len()).collect();
    if a.alphabet == powerset {
        writeln!(out, "alphabet powerset").unwrap();
    } else {
        let sets: Vec<String> = a.alphabet.iter().map(|&s| symbol_text(a, s)).collect();
        writeln!(out, "alphabet {}", sets.join(" ")).unwrap();
    }
    for q in 0..a.n {
        for (i, &sym) in a.alphabet.iter().enumerate() {
            if let Some(to) = a.delta[q][i] {
                let mark = if a.acc[q][i] { " !" } else { "" };
                writeln!(out, "{q} --{}--> {to}{mark}", symbol_text(a, sym)).unwrap();
            }
        }
        for &to in &a.epsilon[q] {
            writeln!(out, "{q} --eps--> {to}").unwrap();
        }
    }
    out
}
