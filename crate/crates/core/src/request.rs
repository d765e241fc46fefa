//! Request handling shared by the CLI and the C interface: polynomial
//! parsing, JSON rendering, and the command dispatcher.

use serde_json::{json, Value};

use crate::basefield::BaseField;
use crate::diskoid::{min_disk_of_roots, Diskoid};
use crate::dynres::{degree_bounds, mrl_search, semistable_check, RatMap};
use crate::elliptic::{semistable_model, WModel};
use crate::errors::{MclError, Result};
use crate::extfield::ExtField;
use crate::field::{FElem, Field, StepKind};
use crate::maclane::IndVal;
use crate::poly::Poly;
use crate::val::Val;

// ----- polynomial expression parsing -----

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Z,
    T,
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = vec![];
    let mut it = Lexer { chars: s.chars().peekable() };
    while let Some(&c) = it.chars.peek() {
        match c {
            ' ' | '\t' => {
                it.chars.next();
            }
            '0'..='9' => {
                let mut n = String::new();
                while let Some(&d) = it.chars.peek() {
                    if d.is_ascii_digit() {
                        n.push(d);
                        it.chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Num(n));
            }
            'z' | 'Z' | 'x' | 'X' => {
                it.chars.next();
                out.push(Tok::Z);
            }
            't' | 'T' => {
                it.chars.next();
                out.push(Tok::T);
            }
            'p' | 'P' => {
                it.chars.next();
                out.push(Tok::Pi);
            }
            '+' => {
                it.chars.next();
                out.push(Tok::Plus);
            }
            '-' => {
                it.chars.next();
                out.push(Tok::Minus);
            }
            '*' => {
                it.chars.next();
                out.push(Tok::Star);
            }
            '/' => {
                it.chars.next();
                out.push(Tok::Slash);
            }
            '^' => {
                it.chars.next();
                out.push(Tok::Caret);
            }
            '(' => {
                it.chars.next();
                out.push(Tok::LParen);
            }
            ')' => {
                it.chars.next();
                out.push(Tok::RParen);
            }
            _ => return Err(MclError::Usage(format!("unexpected character '{}'", c))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    field: &'a Field,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                let t = self.term()?;
                t.neg(self.field)
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(self.field, &t);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(self.field, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    let t = self.power()?;
                    acc = acc.mul(self.field, &t);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let t = self.power()?;
                    if t.degree() != 0 {
                        return Err(MclError::Usage("division by a nonconstant".into()));
                    }
                    acc = acc.scale(self.field, &self.field.inv(&t.coeff_in(self.field, 0)));
                }
                // implicit multiplication: 2z, 3(z+1)
                Some(Tok::Z) | Some(Tok::T) | Some(Tok::Pi) | Some(Tok::LParen) => {
                    let t = self.power()?;
                    acc = acc.mul(self.field, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.next();
            match self.next() {
                Some(Tok::Num(n)) => {
                    let e: u64 =
                        n.parse().map_err(|_| MclError::Usage("bad exponent".into()))?;
                    Ok(base.pow(self.field, e))
                }
                _ => Err(MclError::Usage("expected an exponent after ^".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Tok::Num(n)) => {
                let v: i64 = n.parse().map_err(|_| MclError::Usage("number too large".into()))?;
                Ok(Poly::constant(self.field.from_int(v)))
            }
            Some(Tok::Z) => Ok(Poly::x(self.field)),
            Some(Tok::T) => {
                let b = self.field.bottom().clone();
                match b.kind {
                    crate::basefield::BaseKind::PAdic(_) => {
                        Err(MclError::Usage("t is only available over function-field bases".into()))
                    }
                    _ => Ok(Poly::constant(self.field.from_base(&b.t_elem()))),
                }
            }
            Some(Tok::Pi) => Ok(Poly::constant(self.field.uniformizer())),
            Some(Tok::Minus) => {
                let a = self.atom()?;
                Ok(a.neg(self.field))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(MclError::Usage("missing closing parenthesis".into())),
                }
            }
            other => Err(MclError::Usage(format!("unexpected token {:?}", other))),
        }
    }
}

/// Parse a polynomial in z: either an expression like `z^4+20*z^2+292`
/// (with `t` for the function-field variable and `p` for the uniformizer)
/// or a coefficient list `[c0,c1,...]`.
pub fn parse_poly(field: &Field, s: &str) -> Result<Poly> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner.strip_suffix(']').ok_or(MclError::Usage("missing ]".into()))?;
        let mut coeffs = vec![];
        for part in inner.split(',') {
            coeffs.push(parse_constant(field, part)?);
        }
        return Ok(Poly::new(field, coeffs));
    }
    let toks = lex(s)?;
    let mut p = Parser { toks: &toks, pos: 0, field };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(MclError::Usage("trailing input after polynomial".into()));
    }
    Ok(out)
}

/// Parse a constant coefficient (an expression without z).
pub fn parse_constant(field: &Field, s: &str) -> Result<FElem> {
    let p = parse_poly(field, s)?;
    if p.degree() > 0 {
        return Err(MclError::Usage("expected a constant".into()));
    }
    Ok(p.coeff_in(field, 0))
}

// ----- rendering -----

pub fn val_json(v: &Val) -> Value {
    Value::String(format!("{}", v))
}

/// Render a field element readably: base elements print exactly; extension
/// elements print as polynomials in the generator `g`.
pub fn elem_string(field: &Field, x: &FElem) -> String {
    match (field, x) {
        (Field::Base(_), FElem::K(k)) => format!("{}", k),
        (Field::Ext(s), FElem::Ext(cs)) => {
            if cs.is_empty() {
                return "0".into();
            }
            let mut parts = vec![];
            for (i, c) in cs.iter().enumerate() {
                if s.below.is_zero(c) {
                    continue;
                }
                let cs_str = elem_string(&s.below, c);
                let t = match i {
                    0 => cs_str,
                    1 => format!("({})*g", cs_str),
                    _ => format!("({})*g^{}", cs_str, i),
                };
                parts.push(t);
            }
            parts.join(" + ")
        }
        _ => unreachable!(),
    }
}

pub fn poly_json(field: &Field, p: &Poly) -> Value {
    Value::Array(p.coeffs.iter().map(|c| Value::String(elem_string(field, c))).collect())
}

pub fn poly_pretty(field: &Field, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut parts = vec![];
    for (i, c) in p.coeffs.iter().enumerate() {
        if field.is_zero(c) {
            continue;
        }
        let cs = elem_string(field, c);
        let t = match (i, cs.as_str()) {
            (0, _) => cs,
            (1, "1") => "z".into(),
            (1, _) => format!("{}*z", cs),
            (_, "1") => format!("z^{}", i),
            (_, _) => format!("{}*z^{}", cs, i),
        };
        parts.push(t);
    }
    parts.reverse();
    parts.join(" + ")
}

pub fn chain_json(chain: &IndVal) -> Value {
    let field = &chain.field;
    let stages: Vec<Value> = chain
        .stages
        .iter()
        .map(|st| {
            json!({
                "phi": poly_json(field, &st.phi),
                "phi_pretty": poly_pretty(field, &st.phi),
                "mu": format!("{}", st.mu),
                "tau": st.tau,
                "f_rel": st.f_rel,
            })
        })
        .collect();
    Value::Array(stages)
}

pub fn diskoid_json(d: &Diskoid) -> Value {
    let base = d.ext.base();
    json!({
        "phi": poly_json(&base, &d.phi()),
        "phi_pretty": poly_pretty(&base, &d.phi()),
        "s": format!("{}", d.s),
        "r": format!("{}", d.r),
        "disks": d.disks,
    })
}

pub fn ext_json(ext: &ExtField) -> Value {
    let nf = ext.normal_form();
    let base = ext.base();
    json!({
        "e": ext.e,
        "f": ext.f,
        "degree": ext.degree(),
        "defining": poly_pretty(&base, &ext.defining()),
        "unramified": nf.unramified,
        "eisenstein": nf.eisenstein.map(|p| poly_pretty(&base, &p)),
    })
}

/// Describe a tower field: per-step degrees and kinds.
pub fn field_json(base: &Field, l: &Field) -> Value {
    let mut steps = vec![];
    let mut cur = l.clone();
    while &cur != base {
        match cur {
            Field::Base(_) => break,
            Field::Ext(s) => {
                let kind = match &s.kind {
                    StepKind::Chain(_) => "general",
                    StepKind::Radical => "radical",
                    StepKind::Unram(_) => "unramified",
                };
                steps.push(json!({
                    "kind": kind,
                    "degree": s.h.degree(),
                    "poly": poly_pretty(&s.below, &s.h),
                }));
                cur = s.below.clone();
            }
        }
    }
    steps.reverse();
    json!({
        "e": l.abs_e() / base.abs_e(),
        "f": l.abs_f() / base.abs_f(),
        "degree": l.tower_degree() / base.tower_degree(),
        "steps": steps,
    })
}

/// Figure-style DOT rendering of an approximant chain with diskoid
/// parameters on the edges.
pub fn chain_dot(chain: &IndVal) -> String {
    let field = &chain.field;
    let mut out = String::from("digraph approximants {\n  rankdir=LR;\n  node [shape=box];\n");
    for (i, st) in chain.stages.iter().enumerate() {
        out.push_str(&format!(
            "  v{} [label=\"V{}: {}\"];\n",
            i + 1,
            i + 1,
            poly_pretty(field, &st.phi).replace('"', "'")
        ));
        if i > 0 {
            out.push_str(&format!(
                "  v{} -> v{} [label=\"D(phi{}, {})\"];\n",
                i,
                i + 1,
                i + 1,
                chain.stages[i].mu
            ));
        }
    }
    out.push_str("}\n");
    out
}

// ----- command dispatch -----

pub fn base_from_spec(spec: &str) -> Result<Field> {
    BaseField::parse_spec(spec)
        .map(Field::base)
        .ok_or_else(|| MclError::Usage(format!("unknown base field spec '{}'", spec)))
}

/// Execute one JSON request {"cmd": ..., "base": ..., ...}.
pub fn run_request(req: &Value) -> Result<Value> {
    let cmd = req
        .get("cmd")
        .and_then(|c| c.as_str())
        .ok_or_else(|| MclError::Usage("missing cmd".into()))?;
    match cmd {
        "bounds" => {
            let p = req.get("p").and_then(|v| v.as_u64()).ok_or(MclError::Usage("missing p".into()))?;
            let d = req.get("d").and_then(|v| v.as_u64()).ok_or(MclError::Usage("missing d".into()))?;
            if d < 2 {
                return Err(MclError::Usage("d must be at least 2".into()));
            }
            let b = degree_bounds(p, d);
            Ok(json!({"p": b.p, "d": b.d, "A": b.a, "B": b.b,
                      "q_d": b.q_d, "q_d_plus_1": b.q_dp1, "q_d_minus_1": b.q_dm1}))
        }
        _ => {
            let base = req
                .get("base")
                .and_then(|b| b.as_str())
                .ok_or_else(|| MclError::Usage("missing base".into()))?;
            let field = base_from_spec(base)?;
            run_with_base(cmd, &field, req)
        }
    }
}

fn input_poly(field: &Field, req: &Value) -> Result<Poly> {
    let s = req
        .get("input")
        .and_then(|v| v.as_str())
        .ok_or_else(|| MclError::Usage("missing input polynomial".into()))?;
    parse_poly(field, s)
}

fn run_with_base(cmd: &str, field: &Field, req: &Value) -> Result<Value> {
    match cmd {
        "approximants" => {
            let f = input_poly(field, req)?.monic(field);
            let chain = IndVal::approximants(field, &f)?;
            let (e, fr) = chain.ext_invariants();
            Ok(json!({
                "chain": chain_json(&chain),
                "e": e,
                "f": fr,
                "degree": f.degree(),
            }))
        }
        "ramified-approx" => {
            let f = input_poly(field, req)?.monic(field);
            let w = crate::wtr::ramified_approx(field, &f)?;
            Ok(json!({
                "phi": poly_json(field, &w.phi),
                "phi_pretty": poly_pretty(field, &w.phi),
                "e": w.ext.e,
                "f": w.ext.f,
                "j": w.j,
                "disk": w.disk.as_ref().map(diskoid_json),
                "ext": ext_json(&w.ext),
            }))
        }
        "min-disk" => {
            let f = input_poly(field, req)?.monic(field);
            let d = min_disk_of_roots(field, &f)?;
            Ok(diskoid_json(&d))
        }
        "diskoid-val" => {
            let phi_s = req
                .get("phi")
                .and_then(|v| v.as_str())
                .ok_or_else(|| MclError::Usage("missing phi".into()))?;
            let s_str = req
                .get("s")
                .and_then(|v| v.as_str())
                .ok_or_else(|| MclError::Usage("missing s".into()))?;
            let s = Val::parse(s_str).ok_or_else(|| MclError::Usage("bad s".into()))?;
            let phi = parse_poly(field, phi_s)?.monic(field);
            let g = input_poly(field, req)?;
            let ext = ExtField::new(field, &phi)?;
            let d = Diskoid::new(ext, s);
            let v = d.valuation(&g)?;
            Ok(json!({
                "diskoid": diskoid_json(&d),
                "value": format!("{}", v),
            }))
        }
        "ec-semistable" => {
            let mut a = vec![];
            for key in ["a1", "a2", "a3", "a4", "a6"] {
                let s = req
                    .get(key)
                    .and_then(|v| v.as_str())
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| "0".into());
                a.push(parse_constant(field, &s)?);
            }
            let w = WModel::new(field, [a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()]);
            let res = semistable_model(&w)?;
            let lf = &res.field;
            Ok(json!({
                "L": field_json(field, lf),
                "degree": res.degree,
                "reduction": res.reduction.as_str(),
                "model": [
                    elem_string(lf, &res.model.a1),
                    elem_string(lf, &res.model.a2),
                    elem_string(lf, &res.model.a3),
                    elem_string(lf, &res.model.a4),
                    elem_string(lf, &res.model.a6),
                ],
                "transform": {
                    "u": elem_string(lf, &res.transform.u),
                    "r": elem_string(lf, &res.transform.r),
                    "s": elem_string(lf, &res.transform.s),
                    "t": elem_string(lf, &res.transform.t),
                },
            }))
        }
        "dyn-ordres" => {
            let f = parse_ratmap(field, req)?;
            Ok(json!({
                "ordres": format!("{}", f.ordres()),
                "good_reduction": f.ordres() == Val::zero(),
            }))
        }
        "dyn-semistable" => {
            let f = parse_ratmap(field, req)?;
            let res = mrl_search(&f)?;
            let b = degree_bounds(field.residue_char(), f.d as u64);
            let meets_b = res.ordres_min != Val::zero() || res.degree <= b.b;
            Ok(json!({
                "center": elem_string(&res.center.field, &res.center.alpha),
                "center_field_degree": res.center.degree,
                "t": format!("{}", res.t),
                "L": field_json(field, &res.field),
                "ordres_before": format!("{}", res.ordres_before),
                "ordres_after": format!("{}", res.ordres_min),
                "bounds": {"A": b.a, "B": b.b},
                "degree_within_A": res.degree <= b.a,
                "good_reduction_within_B": meets_b,
            }))
        }
        "dyn-check" => {
            let f = parse_ratmap(field, req)?;
            let cert = semistable_check(&f)?;
            Ok(json!({
                "semistable": cert.ok,
                "slopes": cert.slopes.iter().map(|(l, s)| json!({"direction": l, "slope": format!("{}", s)})).collect::<Vec<_>>(),
            }))
        }
        other => Err(MclError::Usage(format!("unknown command '{}'", other))),
    }
}

fn parse_ratmap(field: &Field, req: &Value) -> Result<RatMap> {
    let d = req
        .get("deg")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| MclError::Usage("missing deg".into()))? as usize;
    // coefficient lists read in natural polynomial order: "p,0,0" is p*z^2
    let parse_side = |key: &str| -> Result<Vec<FElem>> {
        let s = req
            .get(key)
            .and_then(|v| v.as_str())
            .ok_or_else(|| MclError::Usage(format!("missing {}", key)))?;
        let mut out = vec![];
        for part in s.split(',') {
            out.push(parse_constant(field, part)?);
        }
        if out.len() != d + 1 {
            return Err(MclError::Usage(format!(
                "{} needs {} coefficients, got {}",
                key,
                d + 1,
                out.len()
            )));
        }
        out.reverse();
        Ok(out)
    };
    let c0 = parse_side("f0")?;
    let c1 = parse_side("f1")?;
    RatMap::new(field, d, c0, c1)
}

/// Error payload for exit-code-2 responses.
pub fn error_json(e: &MclError) -> Value {
    let (kind, detail) = match e {
        MclError::NotIrreducible(cert) => (
            "not_irreducible",
            json!({"stage": cert.stage, "detail": cert.detail}),
        ),
        MclError::Usage(m) => ("usage", json!(m)),
        other => ("domain", json!(format!("{}", other))),
    };
    json!({"error": kind, "certificate": detail})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let k = base_from_spec("qp:2").unwrap();
        let f = parse_poly(&k, "z^4+20*z^2+292").unwrap();
        assert_eq!(f, Poly::from_ints(&k, &[292, 0, 20, 0, 1]));
        let g = parse_poly(&k, "[292,0,20,0,1]").unwrap();
        assert_eq!(f, g);
        let h = parse_poly(&k, "(z+1)^2 - z^2 - 2z").unwrap();
        assert_eq!(h, Poly::from_ints(&k, &[1]));
        let w = parse_poly(&k, "z^2 - 1/2").unwrap();
        assert_eq!(w.coeff_in(&k, 0), k.from_rational(-1, 2));
        // uniformizer token
        let u = parse_poly(&k, "p^3").unwrap();
        assert_eq!(u, Poly::from_ints(&k, &[8]));
    }

    #[test]
    fn parse_function_field() {
        let k = base_from_spec("fpt:2").unwrap();
        let f = parse_poly(&k, "z^2 - t").unwrap();
        assert_eq!(f.degree(), 2);
        let qt = base_from_spec("qt").unwrap();
        let g = parse_poly(&qt, "z^2 - 2*t + 1/3").unwrap();
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn request_bounds() {
        let out = run_request(&json!({"cmd": "bounds", "p": 2, "d": 2})).unwrap();
        assert_eq!(out["A"], 3);
        assert_eq!(out["B"], 2);
    }

    #[test]
    fn request_approximants_paper() {
        let out = run_request(&json!({
            "cmd": "approximants",
            "base": "qp:2",
            "input": "z^4+20*z^2+292",
        }))
        .unwrap();
        let chain = out["chain"].as_array().unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0]["mu"], "1/2");
        assert_eq!(chain[1]["mu"], "4");
        assert_eq!(chain[1]["phi_pretty"], "z^2 + 2");
        assert_eq!(chain[2]["mu"], "inf");
    }

    #[test]
    fn request_min_disk_paper() {
        let out = run_request(&json!({
            "cmd": "min-disk",
            "base": "qp:2",
            "input": "z^4+20*z^2+292",
        }))
        .unwrap();
        assert_eq!(out["s"], "3");
        assert_eq!(out["r"], "3/2");
        assert_eq!(out["disks"], 1);
        assert_eq!(out["phi_pretty"], "z^2 + 2");
    }

    #[test]
    fn request_errors_carry_certificates() {
        let err = run_request(&json!({
            "cmd": "approximants",
            "base": "qp:2",
            "input": "z^2-1",
        }))
        .unwrap_err();
        let payload = error_json(&err);
        assert_eq!(payload["error"], "not_irreducible");
    }
}
