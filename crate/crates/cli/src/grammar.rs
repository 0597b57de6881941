//! Text grammars: ring specifications, ring elements, Witt vector
//! literals and frame descriptors.
//!
//! Ring specs: `Fq(p=2,k=3)`, `Zmod(p=3,a=2)`,
//! `Quot(Fq(p=2,k=1); vars=[x]; rels=[x^4])`,
//! `Eps(Fq(p=2,k=1); rank=1)`.
//! Elements print as reduced polynomial strings (`1 + x + 2*x^2`).
//! Witt literals: `W[p=2;n=3](a0,a1,a2)`.
//! Frames: `TWF(R; n=3)`, `WF(R; N=6)`, `REL(B -> A; n=3)`.

use std::fmt::Write as _;
use wittcalc_core::error::Error;
use wittcalc_core::frame::{relative_frame, truncated_witt_frame, witt_frame, Frame, FrameKind};
use wittcalc_core::ring::{NamedMonomial, Relation, Ring, RingDescriptor, RingElement};
use wittcalc_core::witt::WittVector;

pub type Result<T> = std::result::Result<T, String>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(msg.into())
}

// ----- ring specifications -----

pub fn parse_ring(spec: &str) -> Result<Ring> {
    let desc = parse_ring_descriptor(spec)?;
    Ring::new(desc).map_err(|e| format!("invalid ring {spec}: {e}"))
}

pub fn parse_ring_descriptor(spec: &str) -> Result<RingDescriptor> {
    let s = spec.trim();
    let (head, body) = split_call(s)?;
    match head {
        "Fq" => {
            let kv = parse_kv_list(body)?;
            let p = kv_u64(&kv, "p")?;
            let k = kv_u64(&kv, "k").unwrap_or(1) as u32;
            if k == 1 {
                Ok(RingDescriptor::PrimeField { p })
            } else {
                Ok(RingDescriptor::FiniteField { p, k })
            }
        }
        "Zmod" => {
            let kv = parse_kv_list(body)?;
            Ok(RingDescriptor::IntegersModPPower {
                p: kv_u64(&kv, "p")?,
                a: kv_u64(&kv, "a")? as u32,
            })
        }
        "Quot" => {
            let parts = split_top(body, ';');
            if parts.len() != 3 {
                return err("Quot needs base; vars=[..]; rels=[..]");
            }
            let base = parse_ring_descriptor(&parts[0])?;
            let vars = parse_bracket_list(parts[1].trim(), "vars")?;
            let rel_strs = parse_bracket_list(parts[2].trim(), "rels")?;
            let rels = rel_strs
                .iter()
                .map(|r| parse_relation(r))
                .collect::<Result<Vec<_>>>()?;
            Ok(RingDescriptor::PolynomialQuotient {
                base: Box::new(base),
                vars,
                rels,
            })
        }
        "Eps" => {
            let parts = split_top(body, ';');
            if parts.len() != 2 {
                return err("Eps needs base; rank=r");
            }
            let base = parse_ring_descriptor(&parts[0])?;
            let kv = parse_kv_list(parts[1].trim())?;
            Ok(RingDescriptor::SquareZeroExtension {
                base: Box::new(base),
                rank: kv_u64(&kv, "rank")? as u32,
            })
        }
        _ => err(format!("unknown ring constructor {head}")),
    }
}

pub fn ring_to_spec(ring: &Ring) -> String {
    descriptor_to_spec(ring.descriptor())
}

pub fn descriptor_to_spec(desc: &RingDescriptor) -> String {
    match desc {
        RingDescriptor::PrimeField { p } => format!("Fq(p={p},k=1)"),
        RingDescriptor::FiniteField { p, k } => format!("Fq(p={p},k={k})"),
        RingDescriptor::IntegersModPPower { p, a } => format!("Zmod(p={p},a={a})"),
        RingDescriptor::PolynomialQuotient { base, vars, rels } => {
            let rels: Vec<String> = rels.iter().map(relation_to_string).collect();
            format!(
                "Quot({}; vars=[{}]; rels=[{}])",
                descriptor_to_spec(base),
                vars.join(","),
                rels.join(",")
            )
        }
        RingDescriptor::SquareZeroExtension { base, rank } => {
            format!("Eps({}; rank={rank})", descriptor_to_spec(base))
        }
        RingDescriptor::Lifted { of, pad } => {
            format!("Lift({}; pad={pad})", descriptor_to_spec(of))
        }
    }
}

fn relation_to_string(rel: &Relation) -> String {
    match rel {
        Relation::MonomialZero(m) => named_to_string(m),
        Relation::Binomial { lhs, coeff, rhs } => {
            if *coeff == 1 {
                format!("{}-{}", named_to_string(lhs), named_to_string(rhs))
            } else {
                format!(
                    "{}-{}*{}",
                    named_to_string(lhs),
                    coeff,
                    named_to_string(rhs)
                )
            }
        }
    }
}

fn named_to_string(m: &NamedMonomial) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|(v, e)| {
            if *e == 1 {
                v.clone()
            } else {
                format!("{v}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn parse_relation(s: &str) -> Result<Relation> {
    let s = s.trim();
    // monomial, or "lhs - c*rhs"
    if let Some(idx) = find_top_minus(s) {
        let lhs = parse_named_monomial(&s[..idx])?;
        let rest = s[idx + 1..].trim();
        // optional integer coefficient
        let (coeff, mono) = match rest.split_once('*') {
            Some((c, m)) if c.trim().parse::<i64>().is_ok() => {
                (c.trim().parse::<i64>().unwrap(), m)
            }
            _ => (1, rest),
        };
        let rhs = parse_named_monomial(mono)?;
        Ok(Relation::Binomial { lhs, coeff, rhs })
    } else {
        Ok(Relation::MonomialZero(parse_named_monomial(s)?))
    }
}

fn find_top_minus(s: &str) -> Option<usize> {
    s.char_indices().find(|&(_, c)| c == '-').map(|(i, _)| i)
}

fn parse_named_monomial(s: &str) -> Result<NamedMonomial> {
    let s = s.trim();
    if s == "1" {
        return Ok(Vec::new());
    }
    s.split('*')
        .map(|f| {
            let f = f.trim();
            match f.split_once('^') {
                Some((v, e)) => {
                    let e: u32 = e
                        .trim()
                        .parse()
                        .map_err(|_| format!("bad exponent in {f}"))?;
                    Ok((v.trim().to_string(), e))
                }
                None => Ok((f.to_string(), 1)),
            }
        })
        .collect()
}

// ----- elements -----

pub fn parse_element(ring: &Ring, s: &str) -> Result<RingElement> {
    let s = s.trim();
    if s.is_empty() {
        return err("empty element");
    }
    let mut terms: Vec<(NamedMonomial, i64)> = Vec::new();
    // split into signed terms
    let mut rest = s;
    let mut sign = 1i64;
    loop {
        rest = rest.trim_start();
        if rest.starts_with('+') {
            sign = 1;
            rest = &rest[1..];
            continue;
        }
        if rest.starts_with('-') {
            sign = -1;
            rest = &rest[1..];
            continue;
        }
        if rest.is_empty() {
            break;
        }
        let end = rest
            .char_indices()
            .find(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        rest = &rest[end..];
        // term = [coeff *] monomial-factors
        let mut coeff: i64 = 1;
        let mut mono: NamedMonomial = Vec::new();
        for f in term.split('*') {
            let f = f.trim();
            if f.is_empty() {
                continue;
            }
            if let Ok(c) = f.parse::<i64>() {
                coeff = coeff
                    .checked_mul(c)
                    .ok_or_else(|| "coefficient overflow".to_string())?;
            } else {
                match f.split_once('^') {
                    Some((v, e)) => {
                        let e: u32 = e
                            .trim()
                            .parse()
                            .map_err(|_| format!("bad exponent in {f}"))?;
                        mono.push((v.trim().to_string(), e));
                    }
                    None => mono.push((f.to_string(), 1)),
                }
            }
        }
        terms.push((mono, sign * coeff));
        sign = 1;
    }
    ring.element_from_terms(&terms)
        .map_err(|e| format!("bad element {s}: {e}"))
}

pub fn element_to_string(x: &RingElement) -> String {
    let ring = x.ring();
    let basis_terms: Vec<String> = {
        let coeffs = match x.coefficients_on_basis() {
            Ok(c) => c,
            Err(_) => return "<unprintable>".into(),
        };
        let basis = ring.basis().expect("finite ring");
        basis
            .iter()
            .zip(&coeffs)
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| {
                let mono =
                    m.0.iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| {
                            let v = &ring.vars()[i];
                            if e == 1 {
                                v.clone()
                            } else {
                                format!("{v}^{e}")
                            }
                        })
                        .collect::<Vec<_>>()
                        .join("*");
                if mono.is_empty() {
                    format!("{c}")
                } else if c == 1 {
                    mono
                } else {
                    format!("{c}*{mono}")
                }
            })
            .collect()
    };
    if basis_terms.is_empty() {
        "0".into()
    } else {
        basis_terms.join(" + ")
    }
}

// ----- Witt vector literals -----

pub fn parse_witt_literal(ring: &Ring, s: &str) -> Result<WittVector> {
    let s = s.trim();
    if !s.starts_with("W[") {
        return err(format!("expected W[p=..;n=..](..): {s}"));
    }
    let close = s.find(']').ok_or("missing ] in Witt literal")?;
    let header = &s[2..close];
    let kvs = parse_kv_list(&header.replace(';', ","))?;
    let p = kv_u64(&kvs, "p")?;
    let n = kv_u64(&kvs, "n")? as usize;
    if p != ring.prime() {
        return err("Witt literal prime differs from the ring");
    }
    let rest = s[close + 1..].trim();
    if !rest.starts_with('(') || !rest.ends_with(')') {
        return err("missing coordinate list");
    }
    let coords = split_top(&rest[1..rest.len() - 1], ',');
    if coords.len() != n {
        return err(format!("expected {n} coordinates, got {}", coords.len()));
    }
    let coords = coords
        .iter()
        .map(|c| parse_element(ring, c))
        .collect::<Result<Vec<_>>>()?;
    WittVector::new(ring.clone(), coords).map_err(|e| e.to_string())
}

pub fn witt_to_literal(w: &WittVector) -> String {
    let mut out = String::new();
    let _ = write!(out, "W[p={};n={}](", w.ring().prime(), w.len());
    let coords: Vec<String> = w.coords().iter().map(element_to_string).collect();
    out.push_str(&coords.join(","));
    out.push(')');
    out
}

pub fn witt_to_strings(w: &WittVector) -> Vec<String> {
    w.coords().iter().map(element_to_string).collect()
}

pub fn witt_from_strings(ring: &Ring, coords: &[String]) -> Result<WittVector> {
    let coords = coords
        .iter()
        .map(|c| parse_element(ring, c))
        .collect::<Result<Vec<_>>>()?;
    WittVector::new(ring.clone(), coords).map_err(|e| e.to_string())
}

// ----- frames -----

pub fn parse_frame(spec: &str) -> Result<Frame> {
    let s = spec.trim();
    let (head, body) = split_call(s)?;
    match head {
        "TWF" | "WF" => {
            let parts = split_top(body, ';');
            if parts.len() != 2 {
                return err(format!("{head} needs (ring; level)"));
            }
            let ring = parse_ring(parts[0].trim())?;
            let kv = parse_kv_list(parts[1].trim())?;
            if head == "TWF" {
                let n = kv_u64(&kv, "n")? as usize;
                truncated_witt_frame(&ring, n).map_err(|e| e.to_string())
            } else {
                let n = kv_u64(&kv, "N").or_else(|_| kv_u64(&kv, "n"))? as usize;
                witt_frame(&ring, n).map_err(|e| e.to_string())
            }
        }
        "REL" => {
            let parts = split_top(body, ';');
            if parts.len() != 2 {
                return err("REL needs (B -> A; n=..)");
            }
            let rings = split_top(parts[0].trim(), '>');
            let b_spec = rings[0].trim().trim_end_matches('-').trim();
            let b_desc = parse_ring_descriptor(b_spec)?;
            let RingDescriptor::SquareZeroExtension { base, rank } = &b_desc else {
                return err("REL thickening must be a square-zero extension (Eps ring)");
            };
            if rings.len() == 2 {
                let a_desc = parse_ring_descriptor(rings[1].trim())?;
                if a_desc != **base {
                    return err("REL target ring is not the base of the thickening");
                }
            }
            let a = Ring::new((**base).clone()).map_err(|e| e.to_string())?;
            let th = a.square_zero_extension(*rank).map_err(|e| e.to_string())?;
            let kv = parse_kv_list(parts[1].trim())?;
            let n = kv_u64(&kv, "n")? as usize;
            relative_frame(&th, n).map_err(|e| e.to_string())
        }
        _ => err(format!("unknown frame constructor {head}")),
    }
}

pub fn frame_to_spec(frame: &Frame) -> String {
    match frame.kind() {
        FrameKind::TruncatedWitt { level } => {
            format!("TWF({}; n={level})", ring_to_spec(frame.ring()))
        }
        FrameKind::WittPrecision { precision } => {
            format!("WF({}; N={precision})", ring_to_spec(frame.ring()))
        }
        FrameKind::Relative { level, thickening } => format!(
            "REL({} -> {}; n={level})",
            ring_to_spec(&thickening.ambient),
            ring_to_spec(&thickening.base)
        ),
    }
}

// ----- low-level helpers -----

fn split_call(s: &str) -> Result<(&str, &str)> {
    let open = s.find('(').ok_or_else(|| format!("expected '(': {s}"))?;
    if !s.ends_with(')') {
        return err(format!("expected closing ')': {s}"));
    }
    Ok((&s[..open], &s[open + 1..s.len() - 1]))
}

/// Splits on `sep` at parenthesis/bracket depth zero.
fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(cur.clone());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_kv_list(s: &str) -> Result<Vec<(String, String)>> {
    split_top(s, ',')
        .iter()
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| format!("expected key=value: {p}"))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn kv_u64(kv: &[(String, String)], key: &str) -> Result<u64> {
    kv.iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| format!("missing {key}"))?
        .1
        .parse()
        .map_err(|_| format!("bad value for {key}"))
}

fn parse_bracket_list(s: &str, key: &str) -> Result<Vec<String>> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected {key}=[..]"))?;
    if k.trim() != key {
        return err(format!("expected {key}, got {k}"));
    }
    let v = v.trim();
    if !v.starts_with('[') || !v.ends_with(']') {
        return err(format!("{key} must be a [..] list"));
    }
    Ok(split_top(&v[1..v.len() - 1], ',')
        .iter()
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect())
}

pub fn core_err_to_string(e: Error) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_specs_round_trip() {
        for spec in [
            "Fq(p=2,k=3)",
            "Zmod(p=3,a=2)",
            "Quot(Fq(p=2,k=1); vars=[x]; rels=[x^4])",
            "Eps(Fq(p=2,k=1); rank=1)",
            "Eps(Quot(Fq(p=2,k=1); vars=[x]; rels=[x^4]); rank=2)",
        ] {
            let ring = parse_ring(spec).unwrap();
            let printed = ring_to_spec(&ring);
            let again = parse_ring(&printed).unwrap();
            assert!(ring == again, "{spec} -> {printed}");
        }
    }

    #[test]
    fn element_round_trip() {
        let r = parse_ring("Quot(Fq(p=2,k=1); vars=[x]; rels=[x^4])").unwrap();
        let x = parse_element(&r, "1 + x + x^2").unwrap();
        assert_eq!(element_to_string(&x), "1 + x + x^2");
        let z = parse_element(&r, "x^4").unwrap();
        assert!(z.is_zero());
        let m = parse_element(&r, "1 - x").unwrap();
        assert_eq!(element_to_string(&m), "1 + x");
    }

    #[test]
    fn witt_literals() {
        let r = parse_ring("Fq(p=2,k=2)").unwrap();
        let w = parse_witt_literal(&r, "W[p=2;n=3](g,1,0)").unwrap();
        assert_eq!(w.len(), 3);
        let lit = witt_to_literal(&w);
        let again = parse_witt_literal(&r, &lit).unwrap();
        assert_eq!(w, again);
    }

    #[test]
    fn frame_specs() {
        for spec in [
            "TWF(Fq(p=2,k=1); n=3)",
            "WF(Fq(p=2,k=2); N=6)",
            "REL(Eps(Fq(p=2,k=1); rank=1) -> Fq(p=2,k=1); n=3)",
        ] {
            let fr = parse_frame(spec).unwrap();
            let printed = frame_to_spec(&fr);
            let again = parse_frame(&printed).unwrap();
            assert!(fr == again, "{spec} -> {printed}");
        }
    }

    #[test]
    fn binomial_relations_parse() {
        let rel = parse_relation("x^4-2*y").unwrap();
        match rel {
            Relation::Binomial { coeff, .. } => assert_eq!(coeff, 2),
            _ => panic!("expected binomial"),
        }
    }
}
