use std::collections::BTreeSet;

use polyparam::model::Pta;
use polyparam::poly::parse_rational;
use polyparam::Rational;

/// A property as written on the command line, before names are resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropertySpec {
    Reach(Vec<String>),
    Unavoid(Vec<String>),
    Trace(Vec<(String, Rational)>),
}

impl PropertySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PropertySpec::Reach(_) => "EF",
            PropertySpec::Unavoid(_) => "AF",
            PropertySpec::Trace(_) => "TP",
        }
    }
}

/// `EF {l1, l2}`, `AF {l1}` or `TP at p=1, q=2`.
pub fn parse_property(text: &str) -> Result<PropertySpec, String> {
    let text = text.trim();
    let (head, rest) = text.split_at(text.find(char::is_whitespace).unwrap_or(text.len()));
    let rest = rest.trim();
    match head {
        "EF" | "AF" => {
            let inner = rest
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| format!("expected `{head} {{l1, ...}}`, got `{text}`"))?;
            let names: Vec<String> = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect();
            if names.is_empty() {
                return Err(format!("`{head}` needs at least one location"));
            }
            Ok(if head == "EF" {
                PropertySpec::Reach(names)
            } else {
                PropertySpec::Unavoid(names)
            })
        }
        "TP" => {
            let body = rest
                .strip_prefix("at")
                .filter(|b| b.is_empty() || b.starts_with(char::is_whitespace))
                .ok_or_else(|| format!("expected `TP at p=1, ...`, got `{text}`"))?;
            let mut values = Vec::new();
            for part in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, value) = part
                    .split_once('=')
                    .ok_or_else(|| format!("expected `name=value`, got `{part}`"))?;
                let value = parse_rational(value.trim()).map_err(|e| format!("`{part}`: {e}"))?;
                if !value.is_integer() {
                    return Err(format!("reference values must be integers, got `{part}`"));
                }
                values.push((name.trim().to_string(), value));
            }
            Ok(PropertySpec::Trace(values))
        }
        _ => Err(format!("unknown property `{text}`; expected EF, AF or TP")),
    }
}

pub fn resolve_locations(pta: &Pta, names: &[String]) -> Result<BTreeSet<usize>, String> {
    names
        .iter()
        .map(|n| pta.location_index(n).ok_or_else(|| format!("unknown location `{n}`")))
        .collect()
}

/// Values in parameter declaration order; every parameter exactly once.
pub fn resolve_valuation(pta: &Pta, values: &[(String, Rational)]) -> Result<Vec<Rational>, String> {
    let mut out: Vec<Option<Rational>> = vec![None; pta.params.len()];
    for (name, v) in values {
        let i = pta
            .params
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| format!("unknown parameter `{name}`"))?;
        if out[i].replace(v.clone()).is_some() {
            return Err(format!("parameter `{name}` given twice"));
        }
    }
    out.into_iter()
        .zip(&pta.params)
        .map(|(v, p)| v.ok_or_else(|| format!("no reference value for parameter `{p}`")))
        .collect()
}
