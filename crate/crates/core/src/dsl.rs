//! Line-oriented network description format.
//!
//! ```text
//! species S1 S2
//! reaction r1: S1 + S2 -> 2 S1 + S2 @ mass_action 1
//! reaction r2: . -> S1 @ poly "x2^2"   # '.' is the empty complex
//! init 10 10
//! ```
//!
//! Rates are positive integers or `p/q`. Polynomials may name species
//! directly or use `x1..xN` in declaration order.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_traits::Signed;
use thiserror::Error;

use crate::network::{PropensityKind, ReactionNetwork};
use crate::polynomial::Polynomial;
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DslError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, DslError> {
    Err(DslError {
        line,
        message: message.into(),
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Strips a trailing `#` comment that is not inside a quoted string.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_complex(src: &str, species: &[String], line: usize) -> Result<Vec<u32>, DslError> {
    let mut counts = vec![0u32; species.len()];
    let src = src.trim();
    if src == "." {
        return Ok(counts);
    }
    if src.is_empty() {
        return err(line, "empty complex (write '.' for no species)");
    }
    for term in src.split('+') {
        let parts: Vec<&str> = term.split_whitespace().collect();
        let (mult, name) = match parts.as_slice() {
            [name] => (1u32, *name),
            [k, name] => match k.parse::<u32>() {
                Ok(k) if k > 0 => (k, *name),
                _ => return err(line, format!("invalid multiplicity '{k}'")),
            },
            [] => return err(line, "missing species in complex"),
            _ => return err(line, format!("cannot parse complex term '{}'", term.trim())),
        };
        let Some(i) = species.iter().position(|s| s == name) else {
            return err(line, format!("unknown species '{name}'"));
        };
        counts[i] = counts[i].checked_add(mult).ok_or_else(|| DslError {
            line,
            message: "multiplicity overflow".to_string(),
        })?;
    }
    Ok(counts)
}

fn parse_reaction(
    rest: &str,
    net: &mut ReactionNetwork,
    names: &mut HashSet<String>,
    line: usize,
) -> Result<(), DslError> {
    let Some((name, body)) = rest.split_once(':') else {
        return err(line, "expected 'reaction NAME: LHS -> RHS @ KIND ARG'");
    };
    let name = name.trim();
    if !is_ident(name) {
        return err(line, format!("invalid reaction name '{name}'"));
    }
    if !names.insert(name.to_string()) {
        return err(line, format!("duplicate reaction '{name}'"));
    }
    let Some((scheme, law)) = body.split_once('@') else {
        return err(line, "missing '@ mass_action RATE' or '@ poly \"EXPR\"'");
    };
    let Some((lhs, rhs)) = scheme.split_once("->") else {
        return err(line, "missing '->'");
    };
    let species = net.species_names().to_vec();
    let reactants = parse_complex(lhs, &species, line)?;
    let products = parse_complex(rhs, &species, line)?;
    let law = law.trim();
    let (kind, arg) = law.split_once(char::is_whitespace).unwrap_or((law, ""));
    let arg = arg.trim();
    match kind {
        "mass_action" => {
            let Some(rate) = parse_rational(arg) else {
                return err(line, format!("invalid rate '{arg}'"));
            };
            if !rate.is_positive() {
                return err(line, format!("rate must be positive, got {arg}"));
            }
            net.add_mass_action(name, &reactants, &products, rate)
                .or_else(|e| err(line, e.to_string()))
        }
        "poly" => {
            let Some(expr) = arg.strip_prefix('"').and_then(|s| s.strip_suffix('"')) else {
                return err(line, "polynomial must be a double-quoted string");
            };
            let poly = Polynomial::parse(expr, species.len(), &species).or_else(|e| err(line, e.to_string()))?;
            net.add_raw(name, &reactants, &products, poly)
                .or_else(|e| err(line, e.to_string()))
        }
        "" => err(line, "missing propensity after '@'"),
        other => err(line, format!("unknown propensity kind '{other}'")),
    }
}

pub fn parse_network(src: &str) -> Result<ReactionNetwork, DslError> {
    let mut net: Option<ReactionNetwork> = None;
    let mut names = HashSet::new();
    let mut init = None;
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        let (keyword, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        match keyword {
            "species" => {
                if net.is_some() {
                    return err(line, "species must be declared once, before reactions");
                }
                let list: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if list.is_empty() {
                    return err(line, "no species declared");
                }
                let mut seen = HashSet::new();
                for s in &list {
                    if !is_ident(s) {
                        return err(line, format!("invalid species name '{s}'"));
                    }
                    if !seen.insert(s) {
                        return err(line, format!("duplicate species '{s}'"));
                    }
                }
                net = Some(ReactionNetwork::new(list));
            }
            "reaction" => {
                let Some(n) = net.as_mut() else {
                    return err(line, "reaction before species declaration");
                };
                parse_reaction(rest, n, &mut names, line)?;
            }
            "init" => {
                let Some(n) = net.as_ref() else {
                    return err(line, "init before species declaration");
                };
                if init.is_some() {
                    return err(line, "duplicate init line");
                }
                let values: Result<Vec<i64>, _> = rest
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<i64>)
                    .collect();
                let Ok(values) = values else {
                    return err(line, "init values must be integers");
                };
                if values.len() != n.n_species() {
                    return err(
                        line,
                        format!("init has {} values for {} species", values.len(), n.n_species()),
                    );
                }
                if values.iter().any(|&v| v < 0) {
                    return err(line, "init values must be nonnegative");
                }
                init = Some(values);
            }
            other => return err(line, format!("unknown declaration '{other}'")),
        }
    }
    let Some(mut net) = net else {
        return err(src.lines().count().max(1), "no species declaration");
    };
    net.init = init;
    Ok(net)
}

fn render_complex(counts: &[u32], species: &[String]) -> String {
    let terms: Vec<String> = counts
        .iter()
        .zip(species)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, s)| if c == 1 { s.clone() } else { format!("{c} {s}") })
        .collect();
    if terms.is_empty() {
        ".".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Renders a network in the format accepted by [`parse_network`].
pub fn to_dsl(net: &ReactionNetwork) -> String {
    let species = net.species_names();
    let mut out = format!("species {}\n", species.join(" "));
    for r in net.reactions() {
        let law = match &r.kind {
            PropensityKind::MassAction { rate } => format!("mass_action {}", format_rational(rate)),
            PropensityKind::Raw => format!("poly \"{}\"", r.propensity),
        };
        let _ = writeln!(
            out,
            "reaction {}: {} -> {} @ {}",
            r.name,
            render_complex(&r.reactants, species),
            render_complex(&r.products, species),
            law
        );
    }
    if let Some(init) = &net.init {
        let vals: Vec<String> = init.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "init {}", vals.join(" "));
    }
    out
}
