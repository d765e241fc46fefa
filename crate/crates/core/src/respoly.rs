//! Polynomials over a residue field (F_q or Q): arithmetic, factorization,
//! and separability bookkeeping.
//!
//! Factorization over F_q runs squarefree decomposition, distinct-degree
//! splitting, then equal-degree splitting with a deterministically seeded
//! generator, so results are stable across runs. Over Q the degree is capped
//! at 4 (rational roots, quadratic discriminants, and the resolvent cubic).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

use crate::basefield::{ResElem, ResField};
use crate::errors::MclError;
use crate::fq::{FqElem, FqField};

/// Dense polynomial over a residue field. Invariant: no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResPoly {
    pub field: ResField,
    pub coeffs: Vec<ResElem>,
}

impl ResPoly {
    pub fn new(field: ResField, mut coeffs: Vec<ResElem>) -> ResPoly {
        while coeffs.last().map_or(false, |c| field.is_zero(c)) {
            coeffs.pop();
        }
        ResPoly { field, coeffs }
    }

    pub fn zero(field: ResField) -> ResPoly {
        ResPoly { field, coeffs: vec![] }
    }

    pub fn one(field: ResField) -> ResPoly {
        let c = field.one();
        ResPoly { field, coeffs: vec![c] }
    }

    pub fn constant(field: ResField, c: ResElem) -> ResPoly {
        ResPoly::new(field, vec![c])
    }

    pub fn x(field: ResField) -> ResPoly {
        let z = field.zero();
        let o = field.one();
        ResPoly { field, coeffs: vec![z, o] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> ResElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn lc(&self) -> ResElem {
        self.coeffs.last().cloned().expect("lc of zero")
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.lc() == self.field.one()
    }

    pub fn add(&self, other: &ResPoly) -> ResPoly {
        let f = &self.field;
        let mut out = vec![f.zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = f.add(&out[i], c);
        }
        ResPoly::new(f.clone(), out)
    }

    pub fn neg(&self) -> ResPoly {
        let f = &self.field;
        ResPoly { field: f.clone(), coeffs: self.coeffs.iter().map(|c| f.neg(c)).collect() }
    }

    pub fn sub(&self, other: &ResPoly) -> ResPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ResPoly) -> ResPoly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return ResPoly::zero(f.clone());
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = f.mul(a, b);
                out[i + j] = f.add(&out[i + j], &t);
            }
        }
        ResPoly::new(f.clone(), out)
    }

    pub fn scale(&self, k: &ResElem) -> ResPoly {
        let f = &self.field;
        ResPoly::new(f.clone(), self.coeffs.iter().map(|c| f.mul(c, k)).collect())
    }

    pub fn monic(&self) -> ResPoly {
        self.scale(&self.field.inv(&self.lc()))
    }

    pub fn divmod(&self, other: &ResPoly) -> (ResPoly, ResPoly) {
        let f = self.field.clone();
        assert!(!other.is_zero(), "division by zero polynomial");
        if self.degree() < other.degree() {
            return (ResPoly::zero(f), self.clone());
        }
        let inv_lead = f.inv(&other.lc());
        let n = other.coeffs.len();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![f.zero(); rem.len() - n + 1];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + n - 1], &inv_lead);
            if !f.is_zero(&c) {
                for (i, b) in other.coeffs.iter().enumerate() {
                    let t = f.mul(&c, b);
                    rem[k + i] = f.sub(&rem[k + i], &t);
                }
            }
            quot[k] = c;
        }
        rem.truncate(n - 1);
        (ResPoly::new(f.clone(), quot), ResPoly::new(f, rem))
    }

    pub fn rem(&self, other: &ResPoly) -> ResPoly {
        self.divmod(other).1
    }

    pub fn div_exact(&self, other: &ResPoly) -> ResPoly {
        let (q, r) = self.divmod(other);
        assert!(r.is_zero(), "non-exact division");
        q
    }

    pub fn gcd(&self, other: &ResPoly) -> ResPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if !a.is_zero() {
            a = a.monic();
        }
        a
    }

    pub fn derivative(&self) -> ResPoly {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return ResPoly::zero(f.clone());
        }
        let p = f.characteristic();
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let k = match f {
                ResField::Fq(fq) => ResElem::Fq(fq.constant((i as u64) % p.max(1))),
                ResField::Q => ResElem::Q(BigRational::from(BigInt::from(i))),
            };
            out.push(f.mul(c, &k));
        }
        ResPoly::new(f.clone(), out)
    }

    pub fn pow_mod(&self, mut e: u128, m: &ResPoly) -> ResPoly {
        let mut acc = ResPoly::one(self.field.clone());
        let mut sq = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).rem(m);
            }
            sq = sq.mul(&sq).rem(m);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: &ResElem) -> ResElem {
        let f = &self.field;
        let mut acc = f.zero();
        for c in self.coeffs.iter().rev() {
            acc = f.mul(&acc, x);
            acc = f.add(&acc, c);
        }
        acc
    }

    /// Substitute x -> x + a.
    pub fn translate(&self, a: &ResElem) -> ResPoly {
        let f = self.field.clone();
        let shift = ResPoly::new(f.clone(), vec![a.clone(), f.one()]);
        let mut acc = ResPoly::zero(f);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&shift);
            acc = acc.add(&ResPoly::constant(self.field.clone(), c.clone()));
        }
        acc
    }

    /// Total lexicographic order used for deterministic factor choices:
    /// by degree, then by coefficient vectors (F_q coefficient-lex; Q by value).
    pub fn lex_key(&self) -> Vec<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| match c {
                ResElem::Fq(x) => x.coeffs.iter().map(|&u| u as i64).collect(),
                ResElem::Q(x) => {
                    // not a genuine total order on Q, but deterministic: compare by (num, den) strings is overkill;
                    // use a stable numeric surrogate
                    let n = x.numer().to_string();
                    let d = x.denom().to_string();
                    let mut v: Vec<i64> = n.bytes().map(|b| b as i64).collect();
                    v.push(-1);
                    v.extend(d.bytes().map(|b| b as i64));
                    v
                }
            })
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        if self.degree() < 1 {
            return false;
        }
        match factor(self) {
            Ok(fs) => fs.len() == 1 && fs[0].1 == 1 && fs[0].0.degree() == self.degree(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for ResPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if self.field.is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = match c {
                ResElem::Fq(x) => format!("{}", x),
                ResElem::Q(x) => format!("{}", x),
            };
            match i {
                0 => write!(f, "{}", cs)?,
                1 => write!(f, "({})*y", cs)?,
                _ => write!(f, "({})*y^{}", cs, i)?,
            }
        }
        Ok(())
    }
}

/// n with all factors of p removed.
pub fn p_free_part(n: u64, p: u64) -> u64 {
    assert!(n >= 1);
    if p < 2 {
        return n;
    }
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n
}

/// Number of distinct roots in an algebraic closure. Over the perfect fields
/// used here this is the degree of the radical.
pub fn separable_degree(g: &ResPoly) -> u64 {
    assert!(g.degree() >= 1, "separable degree of a constant");
    let fs = factor(g).expect("factorization failed");
    fs.iter().map(|(f, _)| f.degree() as u64).sum()
}

/// Factor into monic irreducibles with multiplicities; product times the
/// leading coefficient re-multiplies to the input.
pub fn factor(g: &ResPoly) -> Result<Vec<(ResPoly, u64)>, MclError> {
    assert!(!g.is_zero(), "factor of zero");
    match &g.field {
        ResField::Fq(_) => Ok(factor_fq(&g.monic())),
        ResField::Q => factor_q(&g.monic()),
    }
}

// ---------- F_q factorization ----------

fn fq_field(g: &ResPoly) -> Arc<FqField> {
    match &g.field {
        ResField::Fq(f) => f.clone(),
        _ => unreachable!(),
    }
}

fn factor_fq(g: &ResPoly) -> Vec<(ResPoly, u64)> {
    let mut out: Vec<(ResPoly, u64)> = vec![];
    for (part, mult) in squarefree_parts(g) {
        for irr in factor_squarefree(&part) {
            merge_factor(&mut out, irr, mult);
        }
    }
    out.sort_by_key(|(f, _)| (f.degree(), f.lex_key()));
    out
}

fn merge_factor(out: &mut Vec<(ResPoly, u64)>, f: ResPoly, m: u64) {
    for (g, k) in out.iter_mut() {
        if *g == f {
            *k += m;
            return;
        }
    }
    out.push((f, m));
}

/// Squarefree decomposition over F_q, handling the p-th power case via
/// Frobenius roots. Returns (squarefree part, multiplicity) pairs.
fn squarefree_parts(g: &ResPoly) -> Vec<(ResPoly, u64)> {
    let fq = fq_field(g);
    let p = fq.p;
    if g.degree() == 0 {
        return vec![];
    }
    let d = g.derivative();
    if d.is_zero() {
        // g = h(x^p); take p-th root of coefficients
        let mut coeffs = vec![];
        for (i, c) in g.coeffs.iter().enumerate() {
            if i % p as usize == 0 {
                let x = match c {
                    ResElem::Fq(e) => ResElem::Fq(fq.pth_root(e)),
                    _ => unreachable!(),
                };
                coeffs.push(x);
            } else {
                assert!(g.field.is_zero(c));
            }
        }
        let h = ResPoly::new(g.field.clone(), coeffs);
        return squarefree_parts(&h).into_iter().map(|(f, m)| (f, m * p)).collect();
    }
    let mut out = vec![];
    let mut c = g.gcd(&d);
    let mut w = g.div_exact(&c);
    let mut i = 1u64;
    while w.degree() > 0 {
        let y = w.gcd(&c);
        let fac = w.div_exact(&y);
        if fac.degree() > 0 {
            out.push((fac, i));
        }
        w = y.clone();
        c = c.div_exact(&y);
        i += 1;
    }
    if c.degree() > 0 {
        // remaining part has zero derivative; the recursion peels its p-th roots
        out.extend(squarefree_parts(&c));
    }
    out
}

/// Distinct-degree then equal-degree splitting of a monic squarefree input.
fn factor_squarefree(g: &ResPoly) -> Vec<ResPoly> {
    let fq = fq_field(g);
    let q = fq.q() as u128;
    let mut out = vec![];
    let x = ResPoly::x(g.field.clone());
    let mut rest = g.clone();
    let mut frob = x.clone(); // x^(q^d) mod rest, recomputed as rest shrinks
    let mut d = 0i64;
    while rest.degree() > 0 {
        d += 1;
        if rest.degree() < 2 * d {
            out.push(rest.monic());
            break;
        }
        frob = frob.pow_mod(q, &rest);
        let split = frob.sub(&x).gcd(&rest);
        if split.degree() > 0 {
            for f in equal_degree_split(&split, d as u64) {
                out.push(f);
            }
            rest = rest.div_exact(&split);
            frob = frob.rem(&rest);
        }
    }
    out
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut s = self.0;
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        self.0 = s;
        s
    }
}

fn seed_from(g: &ResPoly) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for key in g.lex_key() {
        for v in key {
            h ^= v as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h | 1
}

/// Cantor-Zassenhaus equal-degree splitting (deterministically seeded).
fn equal_degree_split(g: &ResPoly, d: u64) -> Vec<ResPoly> {
    let fq = fq_field(g);
    if g.degree() as u64 == d {
        return vec![g.monic()];
    }
    let q = fq.q() as u128;
    let mut rng = XorShift(seed_from(g));
    let field = g.field.clone();
    loop {
        // random element of F_q[x]/(g)
        let deg = g.degree() as usize;
        let mut coeffs = vec![];
        for _ in 0..deg {
            let idx = rng.next() % fq.q();
            let mut cs = vec![];
            let mut m = idx;
            for _ in 0..fq.f {
                cs.push(m % fq.p);
                m /= fq.p;
            }
            while cs.last() == Some(&0) {
                cs.pop();
            }
            coeffs.push(ResElem::Fq(FqElem { coeffs: cs }));
        }
        let a = ResPoly::new(field.clone(), coeffs);
        if a.degree() < 1 {
            continue;
        }
        let h = if fq.p == 2 {
            // trace map: a + a^2 + a^4 + ... (f*d terms)
            let mut acc = a.clone();
            let mut t = a.clone();
            let steps = fq.f as u64 * d;
            for _ in 1..steps {
                t = t.mul(&t).rem(g);
                acc = acc.add(&t).rem(g);
            }
            acc
        } else {
            let e = (q.pow(d as u32) - 1) / 2;
            a.pow_mod(e, g).sub(&ResPoly::one(field.clone()))
        };
        let split = h.gcd(g);
        if split.degree() > 0 && split.degree() < g.degree() {
            let mut out = equal_degree_split(&split, d);
            out.extend(equal_degree_split(&g.div_exact(&split), d));
            return out;
        }
    }
}

/// Roots of g in its own coefficient field, sorted deterministically.
pub fn roots(g: &ResPoly) -> Vec<ResElem> {
    let mut out = vec![];
    match factor(g) {
        Ok(fs) => {
            for (f, _) in fs {
                if f.degree() == 1 {
                    // monic x + c: root = -c
                    let c = f.coeff(0);
                    out.push(g.field.neg(&c));
                }
            }
        }
        Err(_) => {}
    }
    out.sort_by_key(|r| match r {
        ResElem::Fq(x) => x.coeffs.iter().map(|&u| u as i64).collect::<Vec<_>>(),
        ResElem::Q(_) => vec![],
    });
    out
}

/// Roots of `small.modulus` inside `big` (coefficients embedded as constants).
/// Used to build canonical embeddings F_{p^a} -> F_{p^b}.
pub fn fq_poly_roots_embedded(small: &FqField, big: &Arc<FqField>) -> Vec<FqElem> {
    let field = ResField::Fq(big.clone());
    let coeffs: Vec<ResElem> =
        small.modulus.coeffs.iter().map(|&c| ResElem::Fq(big.constant(c))).collect();
    let g = ResPoly::new(field, coeffs);
    roots(&g)
        .into_iter()
        .map(|r| match r {
            ResElem::Fq(x) => x,
            _ => unreachable!(),
        })
        .collect()
}

// ---------- Q factorization (degree <= 4) ----------

fn factor_q(g: &ResPoly) -> Result<Vec<(ResPoly, u64)>, MclError> {
    if g.degree() > 4 {
        return Err(MclError::DegreeTooLargeOverQ(g.degree() as u64));
    }
    let mut fs: Vec<(ResPoly, u64)> = vec![];
    factor_q_rec(g, &mut fs)?;
    let mut out: Vec<(ResPoly, u64)> = vec![];
    for (f, m) in fs {
        merge_factor(&mut out, f, m);
    }
    out.sort_by_key(|(f, _)| (f.degree(), f.lex_key()));
    Ok(out)
}

fn qc(g: &ResPoly, i: usize) -> BigRational {
    match g.coeff(i) {
        ResElem::Q(x) => x,
        _ => unreachable!(),
    }
}

fn factor_q_rec(g: &ResPoly, out: &mut Vec<(ResPoly, u64)>) -> Result<(), MclError> {
    let field = g.field.clone();
    let n = g.degree();
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        out.push((g.monic(), 1));
        return Ok(());
    }
    // try a rational root
    if let Some(r) = rational_root(g)? {
        let lin = ResPoly::new(field.clone(), vec![ResElem::Q(-&r), ResElem::Q(BigRational::one())]);
        let rest = g.div_exact(&lin);
        out.push((lin, 1));
        return factor_q_rec(&rest, out);
    }
    match n {
        2 => {
            out.push((g.monic(), 1));
            Ok(())
        }
        3 => {
            // no rational root: irreducible over Q
            out.push((g.monic(), 1));
            Ok(())
        }
        4 => {
            // no rational root; try splitting into two monic quadratics via the resolvent cubic
            if let Some((q1, q2)) = quartic_quadratic_split(g)? {
                factor_q_rec(&q1, out)?;
                factor_q_rec(&q2, out)
            } else {
                out.push((g.monic(), 1));
                Ok(())
            }
        }
        _ => Err(MclError::DegreeTooLargeOverQ(n as u64)),
    }
}

fn big_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    let n = big_sqrt_exact(x.numer())?;
    let d = big_sqrt_exact(x.denom())?;
    Some(BigRational::new(n, d))
}

fn divisors_bounded(n: &BigInt) -> Result<Vec<BigInt>, MclError> {
    // all positive divisors via trial division; errors out on huge prime content
    let mut n = n.abs();
    if n.is_zero() {
        return Ok(vec![]);
    }
    let mut primes: Vec<(BigInt, u32)> = vec![];
    let mut d = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &(&d * &d) <= &n {
        if (&n % &d).is_zero() {
            let mut k = 0;
            while (&n % &d).is_zero() {
                n = &n / &d;
                k += 1;
            }
            primes.push((d.clone(), k));
        }
        d += 1;
        if d > bound {
            return Err(MclError::FactorSearchExceeded);
        }
    }
    if n > BigInt::one() {
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, k) in primes {
        let mut next = vec![];
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=k {
                next.push(d * &pw);
                pw = &pw * &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    Ok(divs)
}

fn rational_root(g: &ResPoly) -> Result<Option<BigRational>, MclError> {
    // monic over Q; clear denominators: roots of a0 + a1 x + ... + x^n
    // substitute x = y / m (m = lcm of denominators) to get integer monic in y
    let n = g.degree() as usize;
    let mut m = BigInt::one();
    for i in 0..n {
        m = m.lcm(qc(g, i).denom());
    }
    // integer coefficients of y-polynomial: b_i = a_i * m^(n-i)
    let mut b = vec![];
    for i in 0..=n {
        let ai = qc(g, i);
        let scale = m.pow((n - i) as u32);
        let bi = ai * BigRational::from(scale);
        assert!(bi.denom().is_one());
        b.push(bi.numer().clone());
    }
    if b[0].is_zero() {
        return Ok(Some(BigRational::zero()));
    }
    let divs = divisors_bounded(&b[0])?;
    for d in divs {
        for sign in [1i32, -1] {
            let cand = if sign == 1 { d.clone() } else { -&d };
            // evaluate integer monic poly at cand
            let mut acc = BigInt::zero();
            for c in b.iter().rev() {
                acc = acc * &cand + c;
            }
            if acc.is_zero() {
                return Ok(Some(BigRational::new(cand, m)));
            }
        }
    }
    Ok(None)
}

/// Split a monic rational quartic with no rational roots into two monic
/// quadratics, if possible, via rational roots of the resolvent cubic.
fn quartic_quadratic_split(g: &ResPoly) -> Result<Option<(ResPoly, ResPoly)>, MclError> {
    let field = g.field.clone();
    // depress: x -> x - a3/4
    let a3 = qc(g, 3);
    let shift = ResElem::Q(-&a3 / BigRational::from(BigInt::from(4)));
    let dep = g.translate(&shift);
    let p = qc(&dep, 2);
    let q = qc(&dep, 1);
    let r = qc(&dep, 0);
    // resolvent: u^3 - p u^2 - 4 r u + (4 p r - q^2); factorization x^4+px^2+qx+r =
    // (x^2 + sx + t1)(x^2 - sx + t2) with s^2 = u - p for a resolvent root u... use
    // the classical form: try s^2 = u where u is a root of u^3 + 2p u^2 + (p^2-4r) u - q^2.
    let two = BigRational::from(BigInt::from(2));
    let four = BigRational::from(BigInt::from(4));
    let res = ResPoly::new(
        field.clone(),
        vec![
            ResElem::Q(-(&q * &q)),
            ResElem::Q(&p * &p - &four * &r),
            ResElem::Q(&two * &p),
            ResElem::Q(BigRational::one()),
        ],
    );
    // rational roots u with u = s^2 a rational square
    let mut cand = res.clone();
    loop {
        let root = match rational_root(&cand)? {
            Some(u) => u,
            None => return Ok(None),
        };
        let lin =
            ResPoly::new(field.clone(), vec![ResElem::Q(-&root), ResElem::Q(BigRational::one())]);
        cand = cand.div_exact(&lin);
        if root.is_zero() {
            if cand.degree() == 0 {
                return Ok(None);
            }
            continue;
        }
        if let Some(s) = rational_sqrt(&root) {
            let u = root.clone();
            // t1 + t2 = p + u, t1 - t2 = q/s  => t1, t2
            let sum = &p + &u;
            let diff = &q / &s;
            let t1 = (&sum - &diff) / &two;
            let t2 = (&sum + &diff) / &two;
            // depressed quartic factors as (x^2 + s x + t1)(x^2 - s x + t2)
            let f1 = ResPoly::new(
                field.clone(),
                vec![ResElem::Q(t1), ResElem::Q(s.clone()), ResElem::Q(BigRational::one())],
            );
            let f2 = ResPoly::new(
                field.clone(),
                vec![ResElem::Q(t2), ResElem::Q(-&s), ResElem::Q(BigRational::one())],
            );
            assert_eq!(f1.mul(&f2), dep, "resolvent split check");
            // undo the shift: x -> x + a3/4
            let unshift = ResElem::Q(&a3 / &four);
            return Ok(Some((f1.translate(&unshift), f2.translate(&unshift))));
        }
        if cand.degree() == 0 {
            return Ok(None);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq_poly(p: u64, f: u32, coeffs: &[u64]) -> ResPoly {
        let field = ResField::Fq(Arc::new(FqField::canonical(p, f)));
        let cs = coeffs
            .iter()
            .map(|&c| match &field {
                ResField::Fq(fq) => ResElem::Fq(fq.constant(c)),
                _ => unreachable!(),
            })
            .collect();
        ResPoly::new(field, cs)
    }

    fn q_poly(coeffs: &[i64]) -> ResPoly {
        let cs = coeffs.iter().map(|&c| ResElem::Q(BigRational::from(BigInt::from(c)))).collect();
        ResPoly::new(ResField::Q, cs)
    }

    #[test]
    fn factor_examples_f2() {
        // x^2 + 1 over F_2 = (x+1)^2
        let g = fq_poly(2, 1, &[1, 0, 1]);
        let fs = factor(&g).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0, fq_poly(2, 1, &[1, 1]));
        assert_eq!(fs[0].1, 2);

        // x^4 + x + 1 irreducible over F_2 (no roots, not divisible by x^2+x+1)
        let g = fq_poly(2, 1, &[1, 1, 0, 0, 1]);
        let fs = factor(&g).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].1, 1);
        assert_eq!(fs[0].0.degree(), 4);
    }

    #[test]
    fn factor_examples_f3() {
        // x^2 + 1 irreducible over F_3
        let g = fq_poly(3, 1, &[1, 0, 1]);
        assert!(g.is_irreducible());
    }

    #[test]
    fn factor_remultiplies() {
        let mut s = XorShift(12345);
        for p in [2u64, 3, 5] {
            let field = ResField::Fq(Arc::new(FqField::prime(p)));
            for _ in 0..60 {
                let deg = (s.next() % 6 + 1) as usize;
                let mut coeffs: Vec<ResElem> = (0..deg)
                    .map(|_| match &field {
                        ResField::Fq(fq) => ResElem::Fq(fq.constant(s.next() % p)),
                        _ => unreachable!(),
                    })
                    .collect();
                coeffs.push(field.one());
                let g = ResPoly::new(field.clone(), coeffs);
                let fs = factor(&g).unwrap();
                let mut prod = ResPoly::one(field.clone());
                let mut total = 0;
                for (f, m) in &fs {
                    assert!(f.is_monic());
                    for _ in 0..*m {
                        prod = prod.mul(f);
                        total += f.degree();
                    }
                }
                assert_eq!(prod, g, "re-multiplication for {}", g);
                assert_eq!(total, g.degree());
            }
        }
    }

    #[test]
    fn separable_degrees() {
        // (x+1)^2 over F_2 -> 1
        assert_eq!(separable_degree(&fq_poly(2, 1, &[1, 0, 1])), 1);
        // x^2+x+1 over F_2 -> 2
        assert_eq!(separable_degree(&fq_poly(2, 1, &[1, 1, 1])), 2);
        // x^4 + x^2 = (x^2+x)^2 over F_2 -> 2
        assert_eq!(separable_degree(&fq_poly(2, 1, &[0, 0, 1, 0, 1])), 2);
        // squarefree over Q keeps its degree
        assert_eq!(separable_degree(&q_poly(&[-1, 0, 1])), 2);
    }

    #[test]
    fn p_free_parts() {
        assert_eq!(p_free_part(12, 2), 3);
        assert_eq!(p_free_part(8, 2), 1);
        assert_eq!(p_free_part(15, 2), 15);
    }

    #[test]
    fn q_factor_small() {
        // x^2 - 1 = (x-1)(x+1)
        let fs = factor(&q_poly(&[-1, 0, 1])).unwrap();
        assert_eq!(fs.len(), 2);
        // x^2 + 1 irreducible
        assert!(q_poly(&[1, 0, 1]).is_irreducible());
        // x^4 + 4 = (x^2-2x+2)(x^2+2x+2)
        let fs = factor(&q_poly(&[4, 0, 0, 0, 1])).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|(f, m)| f.degree() == 2 && *m == 1));
        // x^3 - 2 irreducible over Q
        assert!(q_poly(&[-2, 0, 0, 1]).is_irreducible());
        // degree cap respected
        let e = factor(&q_poly(&[1, 0, 0, 0, 0, 1]));
        assert!(matches!(e, Err(MclError::DegreeTooLargeOverQ(_))));
    }

    #[test]
    fn fq_extension_factor() {
        // over F_4: x^2 + x + 1 = (x + w)(x + w + 1)
        let f4 = Arc::new(FqField::canonical(2, 2));
        let field = ResField::Fq(f4.clone());
        let g = ResPoly::new(
            field.clone(),
            vec![ResElem::Fq(f4.one()), ResElem::Fq(f4.one()), ResElem::Fq(f4.one())],
        );
        let fs = factor(&g).unwrap();
        assert_eq!(fs.len(), 2);
        let rs = roots(&g);
        assert_eq!(rs.len(), 2);
    }

    #[test]
    fn embeddings_consistent() {
        let f2 = FqField::canonical(2, 2);
        let f16 = Arc::new(FqField::canonical(2, 4));
        let img = crate::fq::embedding(&f2, &f16);
        // the image must satisfy the small modulus
        let field = ResField::Fq(f16.clone());
        let coeffs: Vec<ResElem> =
            f2.modulus.coeffs.iter().map(|&c| ResElem::Fq(f16.constant(c))).collect();
        let m = ResPoly::new(field, coeffs);
        assert!(m.eval(&ResElem::Fq(img)) == ResElem::Fq(f16.zero()));
    }
}
