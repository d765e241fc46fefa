//! Rational maps on the projective line: normalized resultants, conjugation,
//! the resultant function along directions of the analytic line, and the
//! minimal-resultant search with its degree bounds.

use crate::errors::{MclError, Result};
use crate::field::{radical_step, FElem, Field};
use crate::maclane::local_branches;
use crate::poly::Poly;
use crate::val::Val;
use crate::wtr;

/// A degree-d rational map, stored as a pair of binary forms
/// F(X, Y) = sum c[i] X^i Y^(d-i) with unit content.
#[derive(Clone, Debug)]
pub struct RatMap {
    pub field: Field,
    pub d: usize,
    pub c0: Vec<FElem>,
    pub c1: Vec<FElem>,
}

/// An invertible 2x2 matrix acting as a Moebius transformation.
#[derive(Clone, Debug)]
pub struct Mobius {
    pub a: FElem,
    pub b: FElem,
    pub c: FElem,
    pub d: FElem,
}

impl Mobius {
    pub fn identity(field: &Field) -> Mobius {
        Mobius { a: field.one(), b: field.zero(), c: field.zero(), d: field.one() }
    }

    pub fn det(&self, field: &Field) -> FElem {
        field.sub(&field.mul(&self.a, &self.d), &field.mul(&self.b, &self.c))
    }

    pub fn compose(&self, field: &Field, other: &Mobius) -> Mobius {
        Mobius {
            a: field.add(&field.mul(&self.a, &other.a), &field.mul(&self.b, &other.c)),
            b: field.add(&field.mul(&self.a, &other.b), &field.mul(&self.b, &other.d)),
            c: field.add(&field.mul(&self.c, &other.a), &field.mul(&self.d, &other.c)),
            d: field.add(&field.mul(&self.c, &other.b), &field.mul(&self.d, &other.d)),
        }
    }
}

impl RatMap {
    /// Build and normalize a rational map from coefficient vectors (length
    /// d+1 each, X-power index).
    pub fn new(field: &Field, d: usize, c0: Vec<FElem>, c1: Vec<FElem>) -> Result<RatMap> {
        if d < 2 {
            return Err(MclError::Usage("rational maps need degree at least 2".into()));
        }
        if c0.len() != d + 1 || c1.len() != d + 1 {
            return Err(MclError::DegreeMismatch);
        }
        let mut map = RatMap { field: field.clone(), d, c0, c1 };
        map.normalize()?;
        if field.is_zero(&map.resultant()) {
            return Err(MclError::NotCoprime);
        }
        Ok(map)
    }

    /// Rescale both forms by a power of the uniformizer so the minimum
    /// coefficient valuation is zero.
    pub fn normalize(&mut self) -> Result<()> {
        let f = &self.field;
        let mut m = Val::Infinity;
        for c in self.c0.iter().chain(self.c1.iter()) {
            let v = f.valuation(c);
            if v < m {
                m = v;
            }
        }
        if m == Val::Infinity {
            return Err(MclError::Usage("zero map".into()));
        }
        if m != Val::zero() {
            let den = f.value_den();
            let k = m.mul_int(den);
            assert_eq!(k.denom(), 1);
            let s = f.pow(&f.uniformizer(), -k.numer());
            for c in self.c0.iter_mut() {
                *c = f.mul(c, &s);
            }
            for c in self.c1.iter_mut() {
                *c = f.mul(c, &s);
            }
        }
        Ok(())
    }

    /// The Sylvester resultant of the binary pair (degree bookkeeping by
    /// form length, not polynomial degree).
    pub fn resultant(&self) -> FElem {
        form_resultant(&self.field, self.d, &self.c0, &self.c1)
    }

    /// The valuation of the resultant of the normalized pair.
    pub fn ordres(&self) -> Val {
        self.field.valuation(&self.resultant())
    }

    /// f(infinity) as a projective pair (the top coefficients).
    pub fn value_at_infinity(&self) -> (FElem, FElem) {
        (self.c0[self.d].clone(), self.c1[self.d].clone())
    }

    /// Conjugation sigma^{-1} o f o sigma, renormalized.
    pub fn conjugate(&self, sigma: &Mobius) -> Result<RatMap> {
        let f = &self.field;
        if f.is_zero(&sigma.det(f)) {
            return Err(MclError::Usage("conjugation needs an invertible matrix".into()));
        }
        let g0 = form_compose(f, self.d, &self.c0, sigma);
        let g1 = form_compose(f, self.d, &self.c1, sigma);
        // projective inverse [[d, -b], [-c, a]] applied to the output pair
        let mut h0 = vec![f.zero(); self.d + 1];
        let mut h1 = vec![f.zero(); self.d + 1];
        for i in 0..=self.d {
            h0[i] = f.sub(&f.mul(&sigma.d, &g0[i]), &f.mul(&sigma.b, &g1[i]));
            h1[i] = f.sub(&f.mul(&sigma.a, &g1[i]), &f.mul(&sigma.c, &g0[i]));
        }
        RatMap::new(f, self.d, h0, h1)
    }

    /// Projective equality: equal up to a common scalar.
    pub fn same_map(&self, other: &RatMap) -> bool {
        if self.d != other.d {
            return false;
        }
        let f = &self.field;
        let mine: Vec<&FElem> = self.c0.iter().chain(self.c1.iter()).collect();
        let theirs: Vec<&FElem> = other.c0.iter().chain(other.c1.iter()).collect();
        let idx = match mine.iter().position(|c| !f.is_zero(c)) {
            Some(i) => i,
            None => return false,
        };
        if f.is_zero(theirs[idx]) {
            return false;
        }
        let lam = f.div(theirs[idx], mine[idx]);
        mine.iter().zip(theirs.iter()).all(|(a, b)| f.is_zero(&f.sub(&f.mul(a, &lam), b)))
    }
}

/// Sylvester resultant of two binary forms of formal degree d given by
/// coefficient vectors of length d+1.
pub fn form_resultant(field: &Field, d: usize, c0: &[FElem], c1: &[FElem]) -> FElem {
    let size = 2 * d;
    let mut mat = vec![vec![field.zero(); size]; size];
    for row in 0..d {
        for i in 0..=d {
            mat[row][row + d - i] = c0[i].clone();
        }
    }
    for row in 0..d {
        for i in 0..=d {
            mat[d + row][row + d - i] = c1[i].clone();
        }
    }
    let mut det = field.one();
    for col in 0..size {
        let mut piv = None;
        for r in col..size {
            if !field.is_zero(&mat[r][col]) {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { return field.zero() };
        if piv != col {
            mat.swap(piv, col);
            det = field.neg(&det);
        }
        det = field.mul(&det, &mat[col][col]);
        let inv = field.inv(&mat[col][col]);
        for r in col + 1..size {
            if field.is_zero(&mat[r][col]) {
                continue;
            }
            let fac = field.mul(&mat[r][col], &inv);
            for c in col..size {
                let t = field.mul(&fac, &mat[col][c]);
                mat[r][c] = field.sub(&mat[r][c], &t);
            }
        }
    }
    det
}

/// F(aX + bY, cX + dY) for a binary form of formal degree d.
fn form_compose(field: &Field, d: usize, c: &[FElem], m: &Mobius) -> Vec<FElem> {
    let lin_pow = |p: &FElem, q: &FElem, n: usize| -> Vec<Vec<FElem>> {
        let mut out = vec![vec![field.one()]];
        for k in 1..=n {
            let prev = &out[k - 1];
            let mut cur = vec![field.zero(); k + 1];
            for (i, pc) in prev.iter().enumerate() {
                let t1 = field.mul(pc, p);
                cur[i + 1] = field.add(&cur[i + 1], &t1);
                let t2 = field.mul(pc, q);
                cur[i] = field.add(&cur[i], &t2);
            }
            out.push(cur);
        }
        out
    };
    let top = lin_pow(&m.a, &m.b, d);
    let bot = lin_pow(&m.c, &m.d, d);
    let mut out = vec![field.zero(); d + 1];
    for (i, ci) in c.iter().enumerate() {
        if field.is_zero(ci) {
            continue;
        }
        let u = &top[i];
        let v = &bot[d - i];
        for (j, uj) in u.iter().enumerate() {
            for (k, vk) in v.iter().enumerate() {
                let t = field.mul(ci, &field.mul(uj, vk));
                out[j + k] = field.add(&out[j + k], &t);
            }
        }
    }
    out
}

/// A candidate center for the resultant search: an element of the base or of
/// a weakly totally ramified extension of it.
#[derive(Clone, Debug)]
pub struct Center {
    pub field: Field,
    pub alpha: FElem,
    /// Degree of the center's field over the base.
    pub degree: u64,
    pub label: String,
}

/// ordres of f conjugated by z -> u z + alpha with v(u) = t, in closed form:
/// composition multiplies the resultant by det(sigma)^(d^2 + d), so only the
/// coefficient valuations of the conjugated pair are needed.
pub fn ordres_at(f: &RatMap, center: &Center, t: Val) -> Val {
    let l = &center.field;
    let d = f.d;
    let (lu, u) = element_of_value(l, t);
    let alpha = crate::elliptic::embed_chain(l, &lu, &center.alpha);
    let c0: Vec<FElem> =
        f.c0.iter().map(|c| crate::elliptic::embed_chain(&f.field, &lu, c)).collect();
    let c1: Vec<FElem> =
        f.c1.iter().map(|c| crate::elliptic::embed_chain(&f.field, &lu, c)).collect();
    let sigma = Mobius { a: u, b: alpha, c: lu.zero(), d: lu.one() };
    let g0 = form_compose(&lu, d, &c0, &sigma);
    let g1 = form_compose(&lu, d, &c1, &sigma);
    // projective inverse [[1, -alpha], [0, u]]
    let mut m_min = Val::Infinity;
    for i in 0..=d {
        let h0 = lu.sub(&g0[i], &lu.mul(&sigma.b, &g1[i]));
        let h1 = lu.mul(&sigma.a, &g1[i]);
        for c in [&h0, &h1] {
            let v = lu.valuation(c);
            if v < m_min {
                m_min = v;
            }
        }
    }
    f.ordres().add(&t.mul_int((d * d + d) as i64)).sub(&m_min.mul_int(2 * d as i64))
}

/// An element of exact valuation t over l, adjoining a radical root of the
/// uniformizer when t leaves the value group.
fn element_of_value(l: &Field, t: Val) -> (Field, FElem) {
    if t == Val::zero() {
        return (l.clone(), l.one());
    }
    let den = l.value_den();
    let scaled = t.mul_int(den);
    if scaled.denom() == 1 {
        let u = l.pow(&l.uniformizer(), scaled.numer());
        (l.clone(), u)
    } else {
        let b = scaled.denom();
        let l2 = radical_step(l, b, &l.uniformizer());
        let u = l2.pow(&l2.gen(), scaled.mul_int(b).numer());
        (l2, u)
    }
}

/// Candidate centers: the origin plus ramified-approximation representatives
/// of the local branches of the fixed-point polynomial and of the preimages
/// of f(infinity).
pub fn candidate_centers(f: &RatMap) -> Result<Vec<Center>> {
    let field = &f.field;
    let d = f.d;
    let mut polys: Vec<(Poly, &'static str)> = vec![];
    let f0 = Poly::new(field, f.c0.clone());
    let f1 = Poly::new(field, f.c1.clone());
    let fixed = f0.sub(field, &f1.mul(field, &Poly::x(field)));
    if fixed.degree() >= 1 {
        polys.push((fixed, "fixed-point"));
    }
    let (top0, top1) = f.value_at_infinity();
    let pre = if field.is_zero(&top1) {
        f1.clone()
    } else {
        let a = field.div(&top0, &top1);
        f0.sub(field, &f1.scale(field, &a))
    };
    if pre.degree() >= 1 {
        polys.push((pre, "preimage"));
    }
    let p = field.residue_char();
    let mut out =
        vec![Center { field: field.clone(), alpha: field.zero(), degree: 1, label: "origin".into() }];
    for (poly, label) in polys {
        let budget = 5;
        let branches = local_branches(field, &poly, budget)?;
        for br in branches {
            let j = wtr::wtr_index(&br.chain, p);
            let key = br.chain.stages[j - 1].phi.clone();
            if key.degree() == 1 {
                let a = field.neg(&key.coeff_in(field, 0));
                out.push(Center {
                    field: field.clone(),
                    alpha: a,
                    degree: 1,
                    label: format!("{} branch", label),
                });
            } else {
                let ext = wtr::stage_extension(&br.chain, j)?;
                let deg = ext.degree();
                out.push(Center {
                    field: ext.field.clone(),
                    alpha: ext.field.gen(),
                    degree: deg,
                    label: format!("{} branch", label),
                });
            }
        }
    }
    Ok(out)
}

/// Result of the minimal-resultant search.
#[derive(Clone, Debug)]
pub struct MrlResult {
    pub center: Center,
    pub t: Val,
    /// Field of the conjugation: the center's field plus the radical step.
    pub field: Field,
    pub degree: u64,
    pub ordres_before: Val,
    pub ordres_min: Val,
}

/// Minimize the conjugated resultant over the candidate directions: convex
/// bracketing on the integer grid, then exhaustive denominators up to d+1
/// within the bracket. Ties break toward smaller field degree, then smaller
/// parameter denominator.
pub fn mrl_search(f: &RatMap) -> Result<MrlResult> {
    let centers = candidate_centers(f)?;
    let before = f.ordres();
    let mut best: Option<(Val, Center, Val)> = None;
    for center in centers {
        let (tmin, smin) = minimize_direction(f, &center)?;
        let better = match &best {
            None => true,
            Some((s, c, t)) => {
                smin < *s
                    || (smin == *s
                        && (center.degree < c.degree
                            || (center.degree == c.degree && tmin.denom() < t.denom())))
            }
        };
        if better {
            best = Some((smin, center, tmin));
        }
    }
    let (smin, center, tmin) = best.ok_or(MclError::Internal("no candidate centers".into()))?;
    if smin > before {
        return Err(MclError::Internal("search missed the identity direction".into()));
    }
    let (lfield, _) = element_of_value(&center.field, tmin);
    let degree = lfield.tower_degree() / f.field.tower_degree();
    Ok(MrlResult { center, t: tmin, field: lfield, degree, ordres_before: before, ordres_min: smin })
}

fn minimize_direction(f: &RatMap, center: &Center) -> Result<(Val, Val)> {
    let d = f.d as i64;
    let s0 = ordres_at(f, center, Val::zero());
    let cap = 4 * (s0.numer().abs() / s0.denom().max(1) + 2) * (d + 1);
    let sv = |t: i64| ordres_at(f, center, Val::int(t));
    let mut lo = -1i64;
    let mut hi = 1i64;
    let mut s_lo = sv(lo);
    let mut s_hi = sv(hi);
    while s_lo < s0 && lo > -cap {
        lo *= 2;
        s_lo = sv(lo);
    }
    while s_hi < s0 && hi < cap {
        hi *= 2;
        s_hi = sv(hi);
    }
    if lo <= -cap || hi >= cap {
        return Err(MclError::SearchBudgetExceeded("direction bracketing".into()));
    }
    let mut best_t = Val::zero();
    let mut best_s = s0;
    let mut t = lo;
    while t <= hi {
        let s = sv(t);
        if s < best_s {
            best_s = s;
            best_t = Val::int(t);
        }
        t += 1;
    }
    let center_int = best_t.floor();
    for den in 2..=(d + 1) {
        for num in (center_int - 1) * den..=(center_int + 1) * den {
            let tq = Val::new(num, den);
            let s = ordres_at(f, center, tq);
            if s < best_s || (s == best_s && tq.denom() < best_t.denom()) {
                best_s = s;
                best_t = tq;
            }
        }
    }
    Ok((best_t, best_s))
}

/// Semistability certificate: at the current coordinates, every one-sided
/// slope of the resultant function toward a candidate center (or toward
/// infinity) is nonnegative. Soundness comes from the minimal locus lying in
/// the convex hull of the fixed points and the preimages of f(infinity).
#[derive(Clone, Debug)]
pub struct SlopeCertificate {
    pub ok: bool,
    pub slopes: Vec<(String, Val)>,
}

pub fn semistable_check(f: &RatMap) -> Result<SlopeCertificate> {
    let d = f.d as i64;
    // no breakpoint of the piecewise-affine function lies in (0, eps]
    let eps = Val::new(1, (d + 1) * (d + 2));
    let s0 = f.ordres();
    let centers = candidate_centers(f)?;
    let mut slopes = vec![];
    let mut ok = true;
    for center in &centers {
        let s_eps = ordres_at(f, center, eps);
        let slope = s_eps.sub(&s0).mul_int(eps.denom()).div_int(eps.numer());
        if slope < Val::zero() {
            ok = false;
        }
        slopes.push((center.label.clone(), slope));
    }
    let origin =
        Center { field: f.field.clone(), alpha: f.field.zero(), degree: 1, label: "infinity".into() };
    let s_neg = ordres_at(f, &origin, eps.neg());
    let slope_inf = s_neg.sub(&s0).mul_int(eps.denom()).div_int(eps.numer());
    if slope_inf < Val::zero() {
        ok = false;
    }
    slopes.push(("infinity".into(), slope_inf));
    Ok(SlopeCertificate { ok, slopes })
}

/// The degree bounds A(p, d) and B(p, d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeBounds {
    pub p: u64,
    pub d: u64,
    pub q_dp1: u64,
    pub q_dm1: u64,
    pub q_d: u64,
    pub a: u64,
    pub b: u64,
}

fn qpart(p: u64, n: u64) -> u64 {
    if p == 0 {
        return 1;
    }
    let mut q = 1;
    let mut n = n;
    while n > 0 && n % p == 0 {
        q *= p;
        n /= p;
    }
    q
}

pub fn degree_bounds(p: u64, d: u64) -> DegreeBounds {
    assert!(d >= 2);
    let q_dp1 = qpart(p, d + 1);
    let q_dm1 = qpart(p, d - 1);
    let q_d = qpart(p, d);
    let a = (d + 1) * q_dp1.max(q_dm1);
    let b = if p > 0 && d % p == 0 {
        (d - 1) * q_d
    } else if p > 0 && d % p == 1 {
        d * q_dm1
    } else {
        d + 1
    };
    DegreeBounds { p, d, q_dp1, q_dm1, q_d, a, b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    fn pz2(field: &Field, p: i64) -> RatMap {
        RatMap::new(
            field,
            2,
            vec![field.zero(), field.zero(), field.from_int(p)],
            vec![field.one(), field.zero(), field.zero()],
        )
        .unwrap()
    }

    #[test]
    fn ordres_examples() {
        let k = q2();
        let f = RatMap::new(
            &k,
            2,
            vec![k.zero(), k.zero(), k.one()],
            vec![k.one(), k.zero(), k.zero()],
        )
        .unwrap();
        assert_eq!(f.ordres(), Val::zero());
        let f = pz2(&k, 2);
        assert_eq!(f.ordres(), Val::int(2));
        // closed quadratic form (af-cd)^2 - (ae-bd)(bf-ce) for
        // (aX^2+bXY+cY^2, dX^2+eXY+fY^2): here (2X^2+2Y^2, Y^2) gives 4
        let a = k.from_int(2);
        let f2 = RatMap::new(
            &k,
            2,
            vec![a.clone(), k.zero(), a.clone()],
            vec![k.one(), k.zero(), k.zero()],
        )
        .unwrap();
        assert_eq!(f2.ordres(), Val::int(2));
    }

    #[test]
    fn normalization() {
        let k = q2();
        let f = RatMap::new(
            &k,
            2,
            vec![k.zero(), k.zero(), k.from_int(2)],
            vec![k.from_int(2), k.zero(), k.zero()],
        )
        .unwrap();
        let m: Val = f.c0.iter().chain(f.c1.iter()).map(|c| k.valuation(c)).min().unwrap();
        assert_eq!(m, Val::zero());
        assert!(matches!(
            RatMap::new(&k, 2, vec![k.zero(), k.zero(), k.one()], vec![
                k.zero(),
                k.zero(),
                k.one()
            ],),
            Err(MclError::NotCoprime)
        ));
    }

    #[test]
    fn conjugation_group_action() {
        let k = q2();
        let f = pz2(&k, 2);
        let id = Mobius::identity(&k);
        assert!(f.conjugate(&id).unwrap().same_map(&f));
        let mut s: u64 = 77;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        for _ in 0..20 {
            let mut rand_m = |next: &mut dyn FnMut() -> u64| loop {
                let m = Mobius {
                    a: k.from_int((next() % 7) as i64 - 3),
                    b: k.from_int((next() % 7) as i64 - 3),
                    c: k.from_int((next() % 7) as i64 - 3),
                    d: k.from_int((next() % 7) as i64 - 3),
                };
                if !k.is_zero(&m.det(&k)) {
                    return m;
                }
            };
            let sigma = rand_m(&mut next);
            let tau = rand_m(&mut next);
            let lhs = f.conjugate(&sigma).unwrap().conjugate(&tau).unwrap();
            let rhs = f.conjugate(&sigma.compose(&k, &tau)).unwrap();
            assert!(lhs.same_map(&rhs), "right action law");
        }
    }

    #[test]
    fn ordres_invariance_under_integral_units() {
        let k = q2();
        let f = pz2(&k, 2);
        let mut s: u64 = 99;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut done = 0;
        while done < 50 {
            let m = Mobius {
                a: k.from_int((next() % 9) as i64 - 4),
                b: k.from_int((next() % 9) as i64 - 4),
                c: k.from_int((next() % 9) as i64 - 4),
                d: k.from_int((next() % 9) as i64 - 4),
            };
            let det = m.det(&k);
            if k.is_zero(&det) || k.valuation(&det) != Val::zero() {
                continue;
            }
            let integral = [&m.a, &m.b, &m.c, &m.d]
                .iter()
                .all(|x| k.is_zero(x) || k.valuation(x) >= Val::zero());
            if !integral {
                continue;
            }
            done += 1;
            let g = f.conjugate(&m).unwrap();
            assert_eq!(g.ordres(), f.ordres());
        }
    }

    #[test]
    fn ordres_at_closed_form() {
        let k = q2();
        let f = pz2(&k, 2);
        let origin = Center { field: k.clone(), alpha: k.zero(), degree: 1, label: "o".into() };
        assert_eq!(ordres_at(&f, &origin, Val::int(0)), Val::int(2));
        assert_eq!(ordres_at(&f, &origin, Val::int(-1)), Val::zero());
        let sigma = Mobius { a: k.from_int(2), b: k.zero(), c: k.zero(), d: k.one() };
        let g = f.conjugate(&sigma).unwrap();
        assert_eq!(g.ordres(), ordres_at(&f, &origin, Val::int(1)));
    }

    #[test]
    fn convexity_along_directions() {
        let k = q2();
        let f = pz2(&k, 2);
        let origin = Center { field: k.clone(), alpha: k.zero(), degree: 1, label: "o".into() };
        for (a, b) in [(-2i64, 0i64), (-1, 1), (0, 2), (-3, 1)] {
            let sa = ordres_at(&f, &origin, Val::int(a));
            let sb = ordres_at(&f, &origin, Val::int(b));
            let sm = ordres_at(&f, &origin, Val::new(a + b, 2));
            assert!(sm.mul_int(2) <= sa.add(&sb));
        }
    }

    #[test]
    fn mrl_search_pz2() {
        let k = q2();
        let f = pz2(&k, 2);
        let res = mrl_search(&f).unwrap();
        assert_eq!(res.ordres_min, Val::zero());
        assert_eq!(res.t, Val::int(-1));
        assert_eq!(res.ordres_before, Val::int(2));
        let g = RatMap::new(
            &k,
            2,
            vec![k.zero(), k.zero(), k.one()],
            vec![k.one(), k.zero(), k.zero()],
        )
        .unwrap();
        let res = mrl_search(&g).unwrap();
        assert_eq!(res.ordres_min, Val::zero());
        assert_eq!(res.degree, 1);
    }

    #[test]
    fn semistable_check_examples() {
        let k = q2();
        let good = RatMap::new(
            &k,
            2,
            vec![k.zero(), k.zero(), k.one()],
            vec![k.one(), k.zero(), k.zero()],
        )
        .unwrap();
        assert!(semistable_check(&good).unwrap().ok);
        let bad = pz2(&k, 2);
        assert!(!semistable_check(&bad).unwrap().ok);
    }

    #[test]
    fn degree_bounds_pinned() {
        let b = degree_bounds(2, 2);
        assert_eq!((b.a, b.b), (3, 2));
        assert!(b.a <= 9);
        let b = degree_bounds(0, 5);
        assert_eq!((b.a, b.b), (6, 6));
        let b = degree_bounds(3, 4);
        assert_eq!((b.a, b.b), (15, 12));
        assert!(b.b <= 4 * 3);
    }
}
