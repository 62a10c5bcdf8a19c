//! Short command-line forms for domains, properties, testers and functions.

use std::sync::Arc;

use symtest_core::property::{format_rational, parse_rational, PropertySpec};
use symtest_core::tester::{DensityTester, SampleTester, TesterSpec};
use symtest_core::{BoolFunction, Domain, DomainRef, DomainSpec, Property, Rational};

use crate::config::default_tester;
use crate::error::{HarnessError, Result};

fn bad(what: &str, text: &str) -> HarnessError {
    HarnessError::Validation(format!("cannot parse {what} {text:?}"))
}

fn num<T: std::str::FromStr>(what: &str, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| bad(what, text))
}

/// `line:N`, `grid:N^D`, `fp:P^N`, `graph:N`, `indexed:N`.
pub fn parse_domain(text: &str) -> Result<DomainRef> {
    let (kind, arg) = text.split_once(':').ok_or_else(|| bad("domain", text))?;
    let pair = |what| -> Result<(&str, &str)> { arg.split_once('^').ok_or_else(|| bad(what, text)) };
    let spec = match kind {
        "line" => DomainSpec::Line { n: num("domain", arg)? },
        "grid" => {
            let (n, d) = pair("domain")?;
            DomainSpec::Hypergrid {
                n: num("domain", n)?,
                d: num("domain", d)?,
            }
        }
        "fp" => {
            let (p, n) = pair("domain")?;
            DomainSpec::VectorSpace {
                p: num("domain", p)?,
                n: num("domain", n)?,
            }
        }
        "graph" => DomainSpec::GraphEdges { n: num("domain", arg)? },
        "indexed" => DomainSpec::Indexed { size: num("domain", arg)? },
        _ => return Err(bad("domain", text)),
    };
    Ok(Arc::new(Domain::new(spec)?))
}

/// `monotone`, `noteq:BITS`, `symmetric:C1,C2,…`, `granular-cover:EPS`, or
/// `json:{…}` holding a property spec.
pub fn parse_property(dom: &DomainRef, text: &str) -> Result<Property> {
    let (kind, arg) = text.split_once(':').unwrap_or((text, ""));
    let spec = match kind {
        "monotone" => PropertySpec::Monotone,
        "noteq" => PropertySpec::Noteq {
            g: parse_function(dom, arg)?.to_hex(),
        },
        "symmetric" => PropertySpec::FullySymmetric {
            counts: arg.split(',').map(|c| num("count", c)).collect::<Result<_>>()?,
        },
        "granular-cover" => PropertySpec::GranularCover { epsilon: arg.into() },
        "json" => serde_json::from_str(arg).map_err(|e| HarnessError::Validation(format!("property json: {e}")))?,
        _ => return Err(bad("property", text)),
    };
    Ok(spec.build(dom)?)
}

/// `auto` (the default tester for the property), `monotonicity`, `density`,
/// `violation-pair`, `constant:P:S`, `label:BITS:S`, or `json:{…}`.
pub fn parse_tester(dom: &DomainRef, property: &Property, epsilon: Rational, text: &str) -> Result<SampleTester> {
    let mut fields = text.splitn(3, ':');
    let kind = fields.next().unwrap_or_default();
    let spec = match kind {
        "auto" => return default_tester(dom, property, epsilon),
        "monotonicity" => TesterSpec::Monotonicity {
            epsilon: format_rational(&epsilon),
        },
        "density" => {
            let kp = property
                .as_kpart()
                .ok_or_else(|| HarnessError::Validation("the density tester needs a k-part symmetric property".into()))?;
            return Ok(SampleTester::density(DensityTester::new(kp.clone(), epsilon)?));
        }
        "violation-pair" => TesterSpec::ViolationPair,
        "constant" => TesterSpec::Constant {
            p: fields.next().ok_or_else(|| bad("tester", text))?.into(),
            s: num("tester", fields.next().unwrap_or("1"))?,
        },
        "label" => TesterSpec::LabelMatch {
            expected: parse_function(dom, fields.next().ok_or_else(|| bad("tester", text))?)?.to_bit_str(),
            s: num("tester", fields.next().unwrap_or("1"))?,
        },
        "json" => serde_json::from_str(&text[5..]).map_err(|e| HarnessError::Validation(format!("tester json: {e}")))?,
        _ => return Err(bad("tester", text)),
    };
    Ok(spec.build(dom)?)
}

/// A bit string `f(0)…f(n−1)` or `0x`-prefixed hex.
pub fn parse_function(dom: &DomainRef, text: &str) -> Result<BoolFunction> {
    let text = text.trim();
    Ok(if text.starts_with("0x") {
        BoolFunction::from_hex(dom.clone(), text)?
    } else {
        BoolFunction::from_bit_str(dom.clone(), text)?
    })
}

pub fn parse_ratio(what: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|_| bad(what, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_domain("grid:4^2").unwrap().size(), 16);
        assert_eq!(parse_domain("graph:4").unwrap().size(), 6);
        assert!(parse_domain("cube:3").is_err());
        let line = parse_domain("line:8").unwrap();
        let mono = parse_property(&line, "monotone").unwrap();
        assert!(mono.is_monotone());
        let t = parse_tester(&line, &mono, Rational::new(1, 2), "auto").unwrap();
        assert!(t.as_density().is_some());
        let f = parse_function(&line, "00001111").unwrap();
        assert_eq!(parse_function(&line, &format!("0x{}", f.to_hex())).unwrap(), f);
        let sym = parse_property(&line, "symmetric:0,8").unwrap();
        assert!(sym.contains(&BoolFunction::ones(line.clone())));
        assert!(parse_tester(&line, &sym, Rational::new(1, 2), "label:11110000:2").is_ok());
    }
}
