//! Weierstrass models, reduction types, and the semistable-model search over
//! weakly totally ramified extensions, split by residue characteristic.
//!
//! Completion-rational points that steer the constructions (torsion
//! x-coordinates, distinguished 2-torsion roots) are handled through
//! refinable rational proxies; every choice they guide is re-verified
//! exactly on the final model, so proxies never leak into results.

use crate::basefield::{ResElem, ResField};
use crate::errors::{MclError, Result};
use crate::extfield::ExtField;
use crate::field::{radical_step, FElem, Field};
use crate::maclane::{local_branches, IndVal};
use crate::poly::Poly;
use crate::respoly::{factor, ResPoly};
use crate::val::Val;
use crate::wtr;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reduction {
    Good,
    Multiplicative,
    Additive,
}

impl Reduction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reduction::Good => "good",
            Reduction::Multiplicative => "multiplicative",
            Reduction::Additive => "additive",
        }
    }
}

/// A Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Clone, Debug)]
pub struct WModel {
    pub field: Field,
    pub a1: FElem,
    pub a2: FElem,
    pub a3: FElem,
    pub a4: FElem,
    pub a6: FElem,
}

#[derive(Clone, Debug)]
pub struct Invariants {
    pub b2: FElem,
    pub b4: FElem,
    pub b6: FElem,
    pub b8: FElem,
    pub delta: FElem,
    pub c4: FElem,
    pub c6: FElem,
}

/// A coordinate change (x, y) = (u^2 x' + r, u^3 y' + u^2 s x' + t).
#[derive(Clone, Debug)]
pub struct Transform {
    pub u: FElem,
    pub r: FElem,
    pub s: FElem,
    pub t: FElem,
}

impl Transform {
    pub fn identity(field: &Field) -> Transform {
        Transform { u: field.one(), r: field.zero(), s: field.zero(), t: field.zero() }
    }

    /// Composition: apply self first, then other in the new coordinates.
    pub fn then(&self, field: &Field, other: &Transform) -> Transform {
        let u1sq = field.mul(&self.u, &self.u);
        let u1cu = field.mul(&u1sq, &self.u);
        Transform {
            u: field.mul(&self.u, &other.u),
            r: field.add(&self.r, &field.mul(&u1sq, &other.r)),
            s: field.add(&self.s, &field.mul(&self.u, &other.s)),
            t: field.add(
                &self.t,
                &field.add(
                    &field.mul(&u1cu, &other.t),
                    &field.mul(&u1sq, &field.mul(&self.s, &other.r)),
                ),
            ),
        }
    }

    pub fn embed(&self, up: &Field) -> Transform {
        Transform {
            u: up.embed(&self.u),
            r: up.embed(&self.r),
            s: up.embed(&self.s),
            t: up.embed(&self.t),
        }
    }
}

impl WModel {
    pub fn new(field: &Field, a: [FElem; 5]) -> WModel {
        let [a1, a2, a3, a4, a6] = a;
        WModel { field: field.clone(), a1, a2, a3, a4, a6 }
    }

    pub fn from_ints(field: &Field, a: [i64; 5]) -> WModel {
        WModel::new(
            field,
            [
                field.from_int(a[0]),
                field.from_int(a[1]),
                field.from_int(a[2]),
                field.from_int(a[3]),
                field.from_int(a[4]),
            ],
        )
    }

    pub fn invariants(&self) -> Invariants {
        let f = &self.field;
        let two = f.from_int(2);
        let four = f.from_int(4);
        let b2 = f.add(&f.mul(&self.a1, &self.a1), &f.mul(&four, &self.a2));
        let b4 = f.add(&f.mul(&two, &self.a4), &f.mul(&self.a1, &self.a3));
        let b6 = f.add(&f.mul(&self.a3, &self.a3), &f.mul(&four, &self.a6));
        let b8 = {
            let t1 = f.mul(&f.mul(&self.a1, &self.a1), &self.a6);
            let t2 = f.mul(&four, &f.mul(&self.a2, &self.a6));
            let t3 = f.mul(&self.a1, &f.mul(&self.a3, &self.a4));
            let t4 = f.mul(&self.a2, &f.mul(&self.a3, &self.a3));
            let t5 = f.mul(&self.a4, &self.a4);
            f.sub(&f.add(&f.add(&t1, &t2), &t4), &f.add(&t3, &t5))
        };
        let c4 = f.sub(&f.mul(&b2, &b2), &f.mul(&f.from_int(24), &b4));
        let c6 = {
            let t1 = f.mul(&b2, &f.mul(&b2, &b2));
            let t2 = f.mul(&f.from_int(36), &f.mul(&b2, &b4));
            let t3 = f.mul(&f.from_int(216), &b6);
            f.sub(&f.add(&f.neg(&t1), &t2), &t3)
        };
        let delta = {
            let t1 = f.mul(&f.mul(&b2, &b2), &b8);
            let t2 = f.mul(&f.from_int(8), &f.mul(&b4, &f.mul(&b4, &b4)));
            let t3 = f.mul(&f.from_int(27), &f.mul(&b6, &b6));
            let t4 = f.mul(&f.from_int(9), &f.mul(&b2, &f.mul(&b4, &b6)));
            f.sub(&f.add(&f.neg(&t1), &t4), &f.add(&t2, &t3))
        };
        debug_assert!(f.is_zero(&f.sub(
            &f.mul(&four, &b8),
            &f.sub(&f.mul(&b2, &b6), &f.mul(&b4, &b4))
        )));
        debug_assert!(f.is_zero(&f.sub(
            &f.mul(&f.from_int(1728), &delta),
            &f.sub(&f.mul(&c4, &f.mul(&c4, &c4)), &f.mul(&c6, &c6))
        )));
        Invariants { b2, b4, b6, b8, delta, c4, c6 }
    }

    pub fn j_invariant(&self) -> Result<FElem> {
        let f = &self.field;
        let inv = self.invariants();
        if f.is_zero(&inv.delta) {
            return Err(MclError::SingularModel);
        }
        let c43 = f.mul(&inv.c4, &f.mul(&inv.c4, &inv.c4));
        Ok(f.div(&c43, &inv.delta))
    }

    pub fn is_integral(&self) -> bool {
        let f = &self.field;
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
            .iter()
            .all(|a| f.valuation(a) >= Val::zero())
    }

    pub fn transform(&self, t: &Transform) -> WModel {
        let f = &self.field;
        let Transform { u, r, s, t: tt } = t;
        let two = f.from_int(2);
        let three = f.from_int(3);
        // numerators of the standard coordinate-change formulas
        let n1 = f.add(&self.a1, &f.mul(&two, s));
        let n2 = f.sub(
            &f.add(&self.a2, &f.mul(&three, r)),
            &f.add(&f.mul(s, &self.a1), &f.mul(s, s)),
        );
        let n3 = f.add(&self.a3, &f.add(&f.mul(r, &self.a1), &f.mul(&two, tt)));
        let n4 = f.sub(
            &f.add(
                &f.add(&self.a4, &f.mul(&f.mul(&two, r), &self.a2)),
                &f.mul(&three, &f.mul(r, r)),
            ),
            &f.add(
                &f.mul(s, &self.a3),
                &f.add(
                    &f.mul(&f.add(tt, &f.mul(r, s)), &self.a1),
                    &f.mul(&f.mul(&two, s), tt),
                ),
            ),
        );
        let n6 = f.sub(
            &f.add(
                &f.add(&self.a6, &f.mul(r, &self.a4)),
                &f.add(&f.mul(&f.mul(r, r), &self.a2), &f.mul(r, &f.mul(r, r))),
            ),
            &f.add(
                &f.mul(tt, &self.a3),
                &f.add(&f.mul(tt, tt), &f.mul(&f.mul(r, tt), &self.a1)),
            ),
        );
        // divide by powers of u, inverting once (and not at all for u = 1)
        let one = f.one();
        if *u == one {
            return WModel { field: f.clone(), a1: n1, a2: n2, a3: n3, a4: n4, a6: n6 };
        }
        let ui = f.inv(u);
        let ui2 = f.mul(&ui, &ui);
        let ui3 = f.mul(&ui2, &ui);
        let ui4 = f.mul(&ui2, &ui2);
        let ui6 = f.mul(&ui4, &ui2);
        WModel {
            field: f.clone(),
            a1: f.mul(&n1, &ui),
            a2: f.mul(&n2, &ui2),
            a3: f.mul(&n3, &ui3),
            a4: f.mul(&n4, &ui4),
            a6: f.mul(&n6, &ui6),
        }
    }

    pub fn embed(&self, up: &Field) -> WModel {
        WModel {
            field: up.clone(),
            a1: up.embed(&self.a1),
            a2: up.embed(&self.a2),
            a3: up.embed(&self.a3),
            a4: up.embed(&self.a4),
            a6: up.embed(&self.a6),
        }
    }

    /// A congruent model with small coefficients (errors of valuation >= m);
    /// reduction data below m is unchanged.
    pub fn truncated(&self, m: i64) -> WModel {
        let f = &self.field;
        WModel {
            field: f.clone(),
            a1: f.truncate_mod(&self.a1, m),
            a2: f.truncate_mod(&self.a2, m),
            a3: f.truncate_mod(&self.a3, m),
            a4: f.truncate_mod(&self.a4, m),
            a6: f.truncate_mod(&self.a6, m),
        }
    }
}

/// Reduction type of an integral model: good iff v(delta) = 0, multiplicative
/// iff v(delta) > 0 and v(c4) = 0, additive otherwise.
pub fn reduction_type(w: &WModel) -> Result<Reduction> {
    if !w.is_integral() {
        return Err(MclError::NonIntegralModel);
    }
    // classification only reads valuations near zero, so a truncated copy
    // gives the same answer much faster; fall back to exact arithmetic if
    // the discriminant valuation is too close to the cutoff
    let wt = w.truncated(64);
    let f = &wt.field;
    let inv = wt.invariants();
    if !f.is_zero(&inv.delta) && f.valuation(&inv.delta) < Val::int(48) {
        return Ok(if f.valuation(&inv.delta) == Val::zero() {
            Reduction::Good
        } else if f.valuation(&inv.c4) == Val::zero() {
            Reduction::Multiplicative
        } else {
            Reduction::Additive
        });
    }
    let f = &w.field;
    let inv = w.invariants();
    if f.is_zero(&inv.delta) {
        return Err(MclError::SingularModel);
    }
    if f.valuation(&inv.delta) == Val::zero() {
        Ok(Reduction::Good)
    } else if f.valuation(&inv.c4) == Val::zero() {
        Ok(Reduction::Multiplicative)
    } else {
        Ok(Reduction::Additive)
    }
}

/// Residue-coincidence criterion for y^2 = (x - a)(x - b)(x - c) with
/// integral roots (residue characteristic away from 2).
pub fn roots_reduction(field: &Field, a: &FElem, b: &FElem, c: &FElem) -> Result<Reduction> {
    for x in [a, b, c] {
        if field.valuation(x) < Val::zero() {
            return Err(MclError::NonIntegralModel);
        }
    }
    let ra = field.reduce_unit(a)?;
    let rb = field.reduce_unit(b)?;
    let rc = field.reduce_unit(c)?;
    let n = [ra == rb, ra == rc, rb == rc].iter().filter(|x| **x).count();
    Ok(match n {
        0 => Reduction::Good,
        1 => Reduction::Multiplicative,
        _ => Reduction::Additive,
    })
}

/// The 3-division polynomial 3x^4 + b2 x^3 + 3 b4 x^2 + 3 b6 x + b8.
pub fn psi3(w: &WModel) -> Poly {
    let f = &w.field;
    let inv = w.invariants();
    let three = f.from_int(3);
    Poly::new(
        f,
        vec![
            inv.b8.clone(),
            f.mul(&three, &inv.b6),
            f.mul(&three, &inv.b4),
            inv.b2.clone(),
            three,
        ],
    )
}

/// Reduction type from the root-multiplicity pattern of the reduced
/// 3-division polynomial (residue characteristic away from 3).
pub fn psi3_reduction_type(w: &WModel) -> Result<Reduction> {
    if w.field.residue_char() == 3 {
        return Err(MclError::ResidueCharThree);
    }
    if !w.is_integral() {
        return Err(MclError::NonIntegralModel);
    }
    // the root pattern of the reduced quartic only sees the model modulo pi
    let w = &w.truncated(64);
    let f = &w.field;
    let p3 = psi3(w);
    let kappa = f.residue_field();
    let mut coeffs = vec![];
    for c in p3.coeffs.iter() {
        coeffs.push(f.reduce_unit(c)?);
    }
    let reduced = ResPoly::new(kappa.clone(), coeffs);
    assert_eq!(reduced.degree(), 4, "the leading coefficient 3 is a unit here");
    let fs = factor(&reduced.monic())?;
    let mut pattern: Vec<u64> = vec![];
    for (g, m) in &fs {
        for _ in 0..g.degree() {
            pattern.push(*m);
        }
    }
    pattern.sort();
    Ok(match pattern.as_slice() {
        [1, 1, 1, 1] => Reduction::Good,
        [1, 3] => Reduction::Multiplicative,
        [4] => Reduction::Additive,
        _ => return Err(MclError::PatternViolation),
    })
}

/// The result of the semistable-model search.
#[derive(Clone, Debug)]
pub struct SemistableResult {
    /// The working field L (a tower over the input base).
    pub field: Field,
    pub e: u64,
    pub f: u64,
    pub degree: u64,
    pub model: WModel,
    pub reduction: Reduction,
    pub transform: Transform,
}

// ----- rational proxies for completion points -----

/// A refinable rational approximation of a degree-1 local branch root.
#[derive(Clone, Debug)]
struct ProxyRoot {
    chain: IndVal,
    target: Poly,
}

impl ProxyRoot {
    fn center(&self) -> FElem {
        let field = &self.chain.field;
        let key = self.chain.key_poly();
        assert_eq!(key.degree(), 1);
        field.neg(&key.coeff_in(field, 0))
    }

    fn precision(&self) -> Val {
        let field = &self.chain.field;
        field.valuation(&self.target.eval(field, &self.center()))
    }

    /// One refinement step along the branch.
    fn refine(&mut self) -> Result<()> {
        let chain = &self.chain;
        let field = &chain.field;
        let f = &self.target;
        let r = chain.residual_polynomial(f)?;
        let (strip, h) = IndVal::strip_x(&r);
        let dir = if strip > 0 {
            chain.key_poly().clone()
        } else {
            let mut fs = factor(&h.monic())?;
            fs.retain(|(g, _)| g.degree() == 1);
            if fs.is_empty() {
                return Err(MclError::Internal("rational branch lost its linear direction".into()));
            }
            fs.sort_by_key(|(g, _)| g.lex_key());
            chain.lift_key(&fs[0].0)?
        };
        let cs = f.phi_expansion(field, &dir);
        if cs[0].is_zero() {
            self.chain = chain.augment(&dir, Val::Infinity)?;
            return Ok(());
        }
        let vdir = chain.evaluate(&dir);
        let pts: Vec<(i64, Val)> = cs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as i64, chain.evaluate(c)))
            .collect();
        let slopes = crate::maclane::lower_hull_slopes(&pts);
        let mu = slopes
            .iter()
            .map(|(s, _)| s.neg())
            .filter(|m| *m > vdir)
            .max()
            .ok_or_else(|| MclError::Internal("no descending slope during refinement".into()))?;
        self.chain = self.chain.augment(&dir, mu)?;
        Ok(())
    }

    fn refine_until(&mut self, target: Val, max_steps: usize) -> Result<()> {
        for _ in 0..max_steps {
            if self.precision() >= target || self.chain.is_terminal() {
                return Ok(());
            }
            self.refine()?;
        }
        if self.precision() >= target {
            Ok(())
        } else {
            Err(MclError::SearchBudgetExceeded("proxy refinement".into()))
        }
    }
}

/// Rational roots of f over the completion, one refinable proxy per
/// degree-1 local branch. Branch exploration stays shallow: proxies refine
/// on demand.
fn rational_root_proxies(field: &Field, f: &Poly) -> Result<Vec<ProxyRoot>> {
    let f = f.monic(field);
    let branches = local_branches(field, &f, 5)?;
    Ok(proxies_from_branches(&f, branches))
}

fn proxies_from_branches(f: &Poly, branches: Vec<crate::maclane::Branch>) -> Vec<ProxyRoot> {
    let mut out = vec![];
    for br in branches {
        if br.chain.key_poly().degree() == 1 {
            out.push(ProxyRoot { chain: br.chain, target: f.clone() });
        }
    }
    out
}

/// Valuation distances from a (refined) proxy root to the other roots of its
/// target: the Newton polygon of f(z + a) without the proxy's own slope.
fn distances_to_other_roots(p: &ProxyRoot) -> Vec<Val> {
    let field = &p.chain.field;
    let f = &p.target;
    let shifted = f.translate(field, &p.center());
    let np = shifted.newton_polygon(field);
    let mut all: Vec<Val> = vec![];
    for (slope, len) in &np.segments {
        for _ in 0..*len {
            all.push(slope.neg());
        }
    }
    all.sort();
    if np.z_mult == 0 && !all.is_empty() {
        // the largest finite slope approximates the proxy root itself
        all.pop();
    }
    for _ in 1..np.z_mult {
        all.push(Val::Infinity);
    }
    all.sort();
    all
}

/// Public wrapper for a refinable rational proxy of a completion point.
#[derive(Clone, Debug)]
pub struct ProxyHandle(ProxyRoot);

impl ProxyHandle {
    pub fn value(&self) -> FElem {
        self.0.center()
    }

    pub fn precision(&self) -> Val {
        self.0.precision()
    }

    pub fn refine(&mut self, extra: Val) -> Result<()> {
        match self.0.precision() {
            Val::Infinity => Ok(()),
            p => self.0.refine_until(p.add(&extra), 60),
        }
    }
}

/// The 2-torsion root alpha of a separable cubic with
/// v(beta - gamma) > v(alpha - beta) = v(alpha - gamma).
pub fn distinguished_two_torsion(field: &Field, f: &Poly) -> Result<ProxyHandle> {
    let f = f.monic(field);
    if f.degree() != 3 {
        return Err(MclError::Usage("a separable cubic is required".into()));
    }
    let pairs = wtr::all_pairwise_differences(field, &f);
    // ordered pairs: [d1 x4, d2 x2] with d2 > d1 for the isolated-root shape
    if pairs.len() != 6 || pairs[0] == pairs[5] {
        return Err(MclError::NotPotentialMultiplicative);
    }
    let d1 = pairs[0];
    if pairs[1] != d1 || pairs[2] != d1 || pairs[3] != d1 || pairs[4] <= d1 {
        return Err(MclError::NotPotentialMultiplicative);
    }
    let mut proxies = rational_root_proxies(field, &f)?;
    for p in proxies.iter_mut() {
        p.refine_until(d1.mul_int(3).add(&Val::int(3)), 40)?;
        let d = distances_to_other_roots(p);
        if d.len() == 2 && d[0] == d1 && d[1] == d1 {
            return Ok(ProxyHandle(p.clone()));
        }
    }
    Err(MclError::NotPotentialMultiplicative)
}

/// The x-coordinate of the distinguished 3-torsion point: the root of the
/// 3-division polynomial farther from the other three than they are from
/// each other.
pub fn distinguished_three_torsion(w: &WModel) -> Result<ProxyHandle> {
    let field = &w.field;
    let p3 = psi3(w).monic(field);
    let pairs = wtr::all_pairwise_differences(field, &p3);
    if pairs.len() != 12 {
        return Err(MclError::Internal("quartic difference count".into()));
    }
    let d1 = pairs[0];
    let at_min = pairs.iter().filter(|d| **d == d1).count();
    if at_min != 6 {
        return Err(MclError::NotPotentialMultiplicative);
    }
    let mut proxies = rational_root_proxies(field, &p3)?;
    for p in proxies.iter_mut() {
        p.refine_until(d1.mul_int(4).add(&Val::int(3)), 40)?;
        let d = distances_to_other_roots(p);
        if d.len() == 3 && d.iter().all(|x| *x == d1) {
            return Ok(ProxyHandle(p.clone()));
        }
    }
    Err(MclError::NotPotentialMultiplicative)
}

// ----- the semistable model search -----

/// Working state: the current model over the current tower field and the
/// transform composed so far (over that field).
#[derive(Clone)]
struct Workspace {
    base: Field,
    model: WModel,
    transform: Transform,
}

impl Workspace {
    fn new(w: &WModel) -> Workspace {
        Workspace {
            base: w.field.clone(),
            model: w.clone(),
            transform: Transform::identity(&w.field),
        }
    }

    fn apply(&mut self, t: Transform) {
        self.model = self.model.transform(&t);
        self.transform = self.transform.then(&self.model.field, &t);
    }

    fn extend(&mut self, up: &Field) {
        self.model = self.model.embed(up);
        self.transform = self.transform.embed(up);
    }

    fn degree(&self) -> u64 {
        self.model.field.tower_degree() / self.base.tower_degree()
    }
}

/// A model with semistable reduction over a separable weakly totally
/// ramified extension.
pub fn semistable_model(w: &WModel) -> Result<SemistableResult> {
    let f = &w.field;
    let inv = w.invariants();
    if f.is_zero(&inv.delta) {
        return Err(MclError::SingularModel);
    }
    let p = f.residue_char();
    let j_in = w.j_invariant()?;
    let mut ws = Workspace::new(w);
    match p {
        2 => char2_semistable(&mut ws)?,
        3 => char3_semistable(&mut ws)?,
        _ => short_form_semistable(&mut ws)?,
    }
    let model = ws.model.clone();
    let lf = model.field.clone();
    if !model.is_integral() {
        return Err(MclError::Internal("result model is not integral".into()));
    }
    let red = if p == 2 { psi3_reduction_type(&model)? } else { reduction_type(&model)? };
    if red == Reduction::Additive {
        return Err(MclError::Internal("result model is not semistable".into()));
    }
    let j_out = model.j_invariant()?;
    let j_lift = embed_chain(&ws.base, &lf, &j_in);
    if j_out != j_lift {
        return Err(MclError::Internal("j-invariant changed".into()));
    }
    let e = lf.abs_e() / ws.base.abs_e();
    let fdeg = lf.abs_f() / ws.base.abs_f();
    if fdeg != 1 {
        return Err(MclError::Internal("extension is not weakly totally ramified".into()));
    }
    Ok(SemistableResult {
        field: lf,
        e,
        f: fdeg,
        degree: ws.degree(),
        model,
        reduction: red,
        transform: ws.transform.clone(),
    })
}

/// Lift an element through the tower from an ancestor field.
pub fn embed_chain(from: &Field, to: &Field, x: &FElem) -> FElem {
    if to == from {
        return x.clone();
    }
    match to {
        Field::Base(_) => panic!("target is not above the source"),
        Field::Ext(s) => {
            let below = embed_chain(from, &s.below, x);
            to.embed(&below)
        }
    }
}

// ----- residue characteristic away from 2 and 3: short form -----

fn short_form_semistable(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let two = f.from_int(2);
    let s = f.neg(&f.div(&ws.model.a1, &two));
    let t = f.neg(&f.div(&ws.model.a3, &two));
    ws.apply(Transform { u: f.one(), r: f.zero(), s, t });
    let r = f.neg(&f.div(&ws.model.a2, &f.from_int(3)));
    ws.apply(Transform { u: f.one(), r, s: f.zero(), t: f.zero() });
    // now y^2 = x^3 + A x + B
    let a = ws.model.a4.clone();
    let b = ws.model.a6.clone();
    let va = if f.is_zero(&a) { Val::Infinity } else { f.valuation(&a).mul_int(3) };
    let vb = if f.is_zero(&b) { Val::Infinity } else { f.valuation(&b).mul_int(2) };
    let n = Val::min(va, vb);
    let den = f.value_den();
    let n_int = n.mul_int(den);
    assert_eq!(n_int.denom(), 1, "short-form valuations lie in the value group");
    let n_scaled = n_int.numer();
    let g = 12 / gcd_i64(n_scaled, 12);
    if g == 1 {
        let u = f.pow(&f.uniformizer(), n_scaled / 12);
        ws.apply(Transform { u, r: f.zero(), s: f.zero(), t: f.zero() });
    } else {
        let l = radical_step(&f, g, &f.uniformizer());
        ws.extend(&l);
        let u = l.pow(&l.gen(), n_scaled * g / 12);
        ws.apply(Transform { u, r: l.zero(), s: l.zero(), t: l.zero() });
    }
    Ok(())
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

// ----- residue characteristic 3 -----

fn char3_semistable(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let two = f.from_int(2);
    let s = f.neg(&f.div(&ws.model.a1, &two));
    let t = f.neg(&f.div(&ws.model.a3, &two));
    ws.apply(Transform { u: f.one(), r: f.zero(), s, t });
    let cubic = current_cubic(ws);
    let j = ws.model.j_invariant()?;
    if f.valuation(&j) < Val::zero() {
        return char3_multiplicative(ws, &cubic);
    }
    let branches = local_branches(&f, &cubic, 5)?;
    if branches.iter().any(|b| b.chain.key_poly().degree() == 1) {
        return char3_case_rational_root(ws, &cubic);
    }
    let chain = IndVal::approximants(&f, &cubic)?;
    let (e, _) = chain.ext_invariants();
    if e == 3 {
        // weakly totally ramified cubic: base-change, exact root
        let ext = ExtField::from_chain(&f, chain);
        ws.extend(&ext.field);
        let l = ext.field.clone();
        ws.apply(Transform { u: l.one(), r: l.gen(), s: l.zero(), t: l.zero() });
        return char3_after_translation(ws);
    }
    // unramified cubic: translate by the rational center of the minimal disk
    let w = wtr::ramified_approx(&f, &cubic)?;
    if w.phi.degree() != 1 {
        return Err(MclError::Internal("unramified cubic should give a rational center".into()));
    }
    let b = f.neg(&w.phi.coeff_in(&f, 0));
    ws.apply(Transform { u: f.one(), r: b, s: f.zero(), t: f.zero() });
    let shifted = current_cubic(ws);
    let np = shifted.newton_polygon(&f);
    let rv = np
        .single_slope()
        .map(|s| s.neg())
        .ok_or_else(|| MclError::Internal("unramified cubic with mixed root valuations".into()))?;
    scale_x_by(ws, rv)
}

/// The cubic x^3 + a2 x^2 + a4 x + a6 of a model with a1 = a3 = 0.
fn current_cubic(ws: &Workspace) -> Poly {
    let f = &ws.model.field;
    Poly::new(f, vec![ws.model.a6.clone(), ws.model.a4.clone(), ws.model.a2.clone(), f.one()])
}

/// With a 2-torsion root at the origin (to proxy precision), scale by the
/// minimum valuation of the quadratic cofactor's roots.
fn char3_after_translation(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let cubic = current_cubic(ws);
    let pts: Vec<(i64, Val)> = cubic
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !f.is_zero(c))
        .map(|(j, c)| (j as i64, f.valuation(c)))
        .collect();
    let slopes = crate::maclane::lower_hull_slopes(&pts);
    let rv = slopes
        .iter()
        .map(|(s, _)| s.neg())
        .min()
        .ok_or_else(|| MclError::Internal("missing cofactor slopes".into()))?;
    scale_x_by(ws, rv)
}

/// Scale (x, y) -> (pi^rv x, pi^(3rv/2) y): u has value rv/2, adjoining a
/// radical root of the uniformizer when rv/2 leaves the value group.
fn scale_x_by(ws: &mut Workspace, rv: Val) -> Result<()> {
    let f = ws.model.field.clone();
    if rv == Val::zero() {
        return Ok(());
    }
    let den = f.value_den();
    let w = rv.div_int(2).mul_int(den); // target exponent in units of 1/den
    let b = w.denom();
    if b == 1 {
        let u = f.pow(&f.uniformizer(), w.numer());
        ws.apply(Transform { u, r: f.zero(), s: f.zero(), t: f.zero() });
    } else {
        let l = radical_step(&f, b, &f.uniformizer());
        ws.extend(&l);
        let u = l.pow(&l.gen(), w.mul_int(b).numer());
        ws.apply(Transform { u, r: l.zero(), s: l.zero(), t: l.zero() });
    }
    Ok(())
}

fn char3_case_rational_root(ws: &mut Workspace, cubic: &Poly) -> Result<()> {
    let f = ws.model.field.clone();
    let mut proxies = rational_root_proxies(&f, cubic)?;
    for proxy in proxies.iter_mut() {
        for attempt in 0..8 {
            let goal = Val::int(8 + 8 * attempt as i64);
            if proxy.refine_until(goal, 40).is_err() {
                break;
            }
            let mut trial = ws.clone();
            trial.apply(Transform { u: f.one(), r: proxy.center(), s: f.zero(), t: f.zero() });
            if char3_after_translation(&mut trial).is_ok()
                && trial.model.is_integral()
                && matches!(
                    reduction_type(&trial.model),
                    Ok(Reduction::Good) | Ok(Reduction::Multiplicative)
                )
            {
                *ws = trial;
                return Ok(());
            }
        }
    }
    Err(MclError::SearchBudgetExceeded("rational-root translation".into()))
}

fn char3_multiplicative(ws: &mut Workspace, cubic: &Poly) -> Result<()> {
    let f = ws.model.field.clone();
    let mut alpha = distinguished_two_torsion(&f, cubic)?;
    for _ in 0..8 {
        let mut trial = ws.clone();
        trial.apply(Transform { u: f.one(), r: alpha.value(), s: f.zero(), t: f.zero() });
        if char3_after_translation(&mut trial).is_ok()
            && trial.model.is_integral()
            && matches!(reduction_type(&trial.model), Ok(Reduction::Multiplicative))
        {
            *ws = trial;
            return Ok(());
        }
        alpha.refine(Val::int(8))?;
    }
    Err(MclError::SearchBudgetExceeded("distinguished two-torsion translation".into()))
}

// ----- residue characteristic 2 -----

fn char2_semistable(ws: &mut Workspace) -> Result<()> {
    let j = ws.model.j_invariant()?;
    let f = ws.model.field.clone();
    if f.valuation(&j) < Val::zero() {
        return char2_multiplicative(ws);
    }
    char2_good(ws, 0)
}

fn char2_multiplicative(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let mut x0 = distinguished_three_torsion(&ws.model)?;
    for _ in 0..8 {
        let mut trial = ws.clone();
        trial.apply(Transform { u: f.one(), r: x0.value(), s: f.zero(), t: f.zero() });
        let g = Poly::new(&f, vec![f.neg(&trial.model.a6), trial.model.a3.clone(), f.one()]);
        match y_branch(&f, &g, 32)? {
            YBranch::Rational(mut y0) => {
                for _ in 0..8 {
                    let mut t2 = trial.clone();
                    t2.apply(Transform { u: f.one(), r: f.zero(), s: f.zero(), t: y0.value() });
                    if flex_and_settle(&mut t2).is_ok()
                        && t2.model.is_integral()
                        && matches!(psi3_reduction_type(&t2.model), Ok(Reduction::Multiplicative))
                    {
                        *ws = t2;
                        return Ok(());
                    }
                    if y0.refine(Val::int(8)).is_err() {
                        break;
                    }
                }
            }
            YBranch::Ramified(ext) => {
                let mut t2 = trial.clone();
                t2.extend(&ext.field);
                let l = ext.field.clone();
                t2.apply(Transform { u: l.one(), r: l.zero(), s: l.zero(), t: l.gen() });
                if flex_and_settle(&mut t2).is_ok()
                    && t2.model.is_integral()
                    && matches!(psi3_reduction_type(&t2.model), Ok(Reduction::Multiplicative))
                {
                    *ws = t2;
                    return Ok(());
                }
            }
            YBranch::Unramified => {
                // multiplicative already over the current field; minimize
                let mut t2 = trial.clone();
                if semistabilize(&mut t2, 24).is_ok()
                    && matches!(psi3_reduction_type(&t2.model), Ok(Reduction::Multiplicative))
                {
                    *ws = t2;
                    return Ok(());
                }
            }
        }
        x0.refine(Val::int(8))?;
    }
    Err(MclError::SearchBudgetExceeded("potential multiplicative settlement".into()))
}

enum YBranch {
    Rational(ProxyHandle),
    Ramified(ExtField),
    Unramified,
}

/// Classify the fiber quadratic y^2 + a3 y - a6 over the working field. The
/// defining data is truncated first: the branch structure is unchanged once
/// the precision passes the relevant valuations, and the verification loops
/// retry with more precision on failure.
fn y_branch(field: &Field, g: &Poly, precision: i64) -> Result<YBranch> {
    let g = Poly::new(
        field,
        g.coeffs.iter().map(|c| field.truncate_mod(c, precision)).collect(),
    );
    let g = &g;
    match IndVal::approximants(field, g) {
        Ok(chain) => {
            let (_, fr) = chain.ext_invariants();
            if fr == 2 {
                Ok(YBranch::Unramified)
            } else {
                Ok(YBranch::Ramified(ExtField::from_chain(field, chain)))
            }
        }
        Err(MclError::NotIrreducible(_)) => {
            let mut proxies = rational_root_proxies(field, &g.monic(field))?;
            let p = proxies
                .drain(..)
                .next()
                .ok_or_else(|| MclError::Internal("split quadratic without rational branch".into()))?;
            Ok(YBranch::Rational(ProxyHandle(p)))
        }
        Err(e) => Err(e),
    }
}

/// With a 3-torsion point at the origin (to proxy precision), pass to the
/// flex form y^2 + a xy + b y = x^3 and rescale into a semistable model.
fn flex_and_settle(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    if f.is_zero(&ws.model.a3) {
        return Err(MclError::Internal("degenerate tangent at the 3-torsion point".into()));
    }
    let s = f.div(&ws.model.a4, &ws.model.a3);
    ws.apply(Transform { u: f.one(), r: f.zero(), s, t: f.zero() });
    let a = ws.model.a1.clone();
    let b = ws.model.a3.clone();
    let va3 = if f.is_zero(&a) { Val::Infinity } else { f.valuation(&a).mul_int(3) };
    let vb = f.valuation(&b);
    if va3 <= vb {
        ws.apply(Transform { u: a, r: f.zero(), s: f.zero(), t: f.zero() });
        Ok(())
    } else {
        let den = f.value_den();
        let m = vb.mul_int(den);
        assert_eq!(m.denom(), 1);
        let m = m.numer();
        if m % 3 == 0 {
            let u = f.pow(&f.uniformizer(), m / 3);
            ws.apply(Transform { u, r: f.zero(), s: f.zero(), t: f.zero() });
        } else {
            let l = radical_step(&f, 3, &f.uniformizer());
            ws.extend(&l);
            let u = l.pow(&l.gen(), m);
            ws.apply(Transform { u, r: l.zero(), s: l.zero(), t: l.zero() });
        }
        Ok(())
    }
}

/// Potential good reduction in residue characteristic 2.
fn char2_good(ws: &mut Workspace, depth: usize) -> Result<()> {
    if depth > 2 {
        return Err(MclError::SearchBudgetExceeded("three-torsion recursion".into()));
    }
    let f = ws.model.field.clone();
    let p3 = psi3(&ws.model).monic(&f);
    let branches = local_branches(&f, &p3, 5)?;
    if branches.iter().any(|b| b.chain.key_poly().degree() == 1) {
        let proxies = proxies_from_branches(&p3, branches);
        return char2_rational_psi3_root(ws, proxies, depth);
    }
    for br in &branches {
        if !br.terminal {
            continue;
        }
        let (e, fr) = br.chain.ext_invariants();
        if fr == 1 && crate::respoly::p_free_part(e.max(1), 2) == 1 {
            // a 3-division root over a weakly totally wildly ramified extension
            let ext = ExtField::from_chain(&f, br.chain.clone());
            ws.extend(&ext.field);
            let l = ext.field.clone();
            ws.apply(Transform { u: l.one(), r: l.gen(), s: l.zero(), t: l.zero() });
            let p3b = psi3(&ws.model).monic(&l);
            let proxies = rational_root_proxies(&l, &p3b)?;
            return char2_rational_psi3_root(ws, proxies, depth + 1);
        }
    }
    // equispaced 3-division roots
    let (r_ext, m) = wtr::equispaced_quartic(&f, &p3)?;
    let center = if r_ext.is_trivial() {
        branch_center(&f, &p3)?
    } else {
        ws.extend(&r_ext.field);
        r_ext.field.gen()
    };
    let l = ws.model.field.clone();
    ws.apply(Transform { u: l.one(), r: center, s: l.zero(), t: l.zero() });
    // u with v(u^2) = m
    let l = ws.model.field.clone();
    let den = l.value_den();
    let me = m.div_int(2).mul_int(den);
    let bb = me.denom();
    if bb == 1 {
        let u = l.pow(&l.uniformizer(), me.numer());
        ws.apply(Transform { u, r: l.zero(), s: l.zero(), t: l.zero() });
    } else {
        let l2 = radical_step(&l, bb, &l.uniformizer());
        ws.extend(&l2);
        let u = l2.pow(&l2.gen(), me.mul_int(bb).numer());
        ws.apply(Transform { u, r: l2.zero(), s: l2.zero(), t: l2.zero() });
    }
    if ws.model.field.characteristic() == 0 {
        char2_case5_char0(ws)
    } else {
        char2_case5_char2(ws)
    }
}

/// A rational center of the minimal 3-division disk when the approximation
/// element is rational: the first-stage key center of a branch.
fn branch_center(field: &Field, p3: &Poly) -> Result<FElem> {
    let branches = local_branches(field, p3, 10)?;
    for br in &branches {
        let st = &br.chain.stages[0];
        if st.phi.degree() == 1 {
            return Ok(field.neg(&st.phi.coeff_in(field, 0)));
        }
    }
    Ok(field.zero())
}

fn char2_rational_psi3_root(
    ws: &mut Workspace,
    mut proxies: Vec<ProxyRoot>,
    depth: usize,
) -> Result<()> {
    let f = ws.model.field.clone();
    let _ = depth;
    for proxy in proxies.iter_mut() {
        for attempt in 0..6 {
            let goal = Val::int(8 + 8 * attempt as i64);
            if proxy.refine_until(goal, 40).is_err() {
                break;
            }
            let mut trial = ws.clone();
            trial.apply(Transform { u: f.one(), r: proxy.center(), s: f.zero(), t: f.zero() });
            let g = Poly::new(&f, vec![f.neg(&trial.model.a6), trial.model.a3.clone(), f.one()]);
            let t_phase = std::time::Instant::now();
            let next = match y_branch(&f, &g, 24 + 24 * attempt as i64) {
                Ok(b) => b,
                Err(_) => continue,
            };
            crate::log_info(&format!(
                "attempt {}: y_branch {:?} -> {}",
                attempt,
                t_phase.elapsed(),
                match &next {
                    YBranch::Rational(_) => "rational",
                    YBranch::Ramified(_) => "ramified",
                    YBranch::Unramified => "unramified",
                }
            ));
            match next {
                YBranch::Rational(mut y0) => {
                    for _ in 0..6 {
                        let mut t2 = trial.clone();
                        t2.apply(Transform {
                            u: f.one(),
                            r: f.zero(),
                            s: f.zero(),
                            t: y0.value(),
                        });
                        if flex_and_settle(&mut t2).is_ok()
                            && t2.model.is_integral()
                            && semistable_psi3(&t2.model)
                        {
                            *ws = t2;
                            return Ok(());
                        }
                        if y0.refine(Val::int(8)).is_err() {
                            break;
                        }
                    }
                }
                YBranch::Ramified(ext) => {
                    let mut t2 = trial.clone();
                    t2.extend(&ext.field);
                    let l = ext.field.clone();
                    t2.apply(Transform { u: l.one(), r: l.zero(), s: l.zero(), t: l.gen() });
                    let t_phase = std::time::Instant::now();
                    let a = flex_and_settle(&mut t2).is_ok();
                    crate::log_info(&format!("ram flex {:?}", t_phase.elapsed()));
                    let t_phase = std::time::Instant::now();
                    let b = a && t2.model.is_integral();
                    crate::log_info(&format!("ram integ {:?}", t_phase.elapsed()));
                    let t_phase = std::time::Instant::now();
                    let c = b && semistable_psi3(&t2.model);
                    crate::log_info(&format!("ram psi3 {:?}", t_phase.elapsed()));
                    if c {
                        *ws = t2;
                        return Ok(());
                    }
                }
                YBranch::Unramified => {
                    // semistable over the base or over a cube root of pi
                    let mut t2 = trial.clone();
                    if semistabilize(&mut t2, 24).is_ok() && semistable_psi3(&t2.model) {
                        *ws = t2;
                        return Ok(());
                    }
                    let mut t3 = trial.clone();
                    let l = radical_step(&f, 3, &f.uniformizer());
                    t3.extend(&l);
                    if semistabilize(&mut t3, 24).is_ok() && semistable_psi3(&t3.model) {
                        *ws = t3;
                        return Ok(());
                    }
                }
            }
        }
    }
    Err(MclError::SearchBudgetExceeded("rational three-torsion settlement".into()))
}

fn semistable_psi3(m: &WModel) -> bool {
    matches!(
        psi3_reduction_type(m),
        Ok(Reduction::Good) | Ok(Reduction::Multiplicative)
    )
}

/// Case: characteristic-zero base with the minimal 3-division disk already
/// the unit disk. Clear a1, a3, then shear back using a square-root
/// approximation of a corner coefficient.
fn char2_case5_char0(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let two = f.from_int(2);
    let s = f.neg(&f.div(&ws.model.a1, &two));
    let t = f.neg(&f.div(&ws.model.a3, &two));
    ws.apply(Transform { u: f.one(), r: f.zero(), s, t });
    let a2p = ws.model.a2.clone();
    let a4p = ws.model.a4.clone();
    let a6p = ws.model.a6.clone();
    let va = f.valuation(&f.mul(&f.from_int(4), &a2p));
    let vc = f.valuation(&f.mul(&f.from_int(4), &a6p));
    if va == Val::zero() {
        let target = Poly::new(&f, vec![f.neg(&a2p), f.zero(), f.one()]);
        let s_elem = approx_quadratic_root(ws, &target)?;
        let l = ws.model.field.clone();
        let a4l = embed_chain(&f, &l, &a4p);
        let t_elem = l.div(&a4l, &l.mul(&l.from_int(2), &s_elem));
        ws.apply(Transform { u: l.one(), r: l.zero(), s: s_elem, t: t_elem });
        Ok(())
    } else if vc == Val::zero() {
        let target = Poly::new(&f, vec![f.neg(&a6p), f.zero(), f.one()]);
        let t_elem = approx_quadratic_root(ws, &target)?;
        let l = ws.model.field.clone();
        let a4l = embed_chain(&f, &l, &a4p);
        let s_elem = l.div(&a4l, &l.mul(&l.from_int(2), &t_elem));
        ws.apply(Transform { u: l.one(), r: l.zero(), s: s_elem, t: t_elem });
        Ok(())
    } else {
        Err(MclError::Internal("no unit corner coefficient after normalization".into()))
    }
}

/// Case: characteristic-2 base. The approximation runs on
/// z^2 + a1' z + a2' (or z^2 + a3' z + a6').
fn char2_case5_char2(ws: &mut Workspace) -> Result<()> {
    let f = ws.model.field.clone();
    let a1p = ws.model.a1.clone();
    let a3p = ws.model.a3.clone();
    if !f.is_zero(&a1p) && f.valuation(&a1p) == Val::zero() {
        let target = Poly::new(&f, vec![ws.model.a2.clone(), a1p.clone(), f.one()]);
        let s_elem = approx_quadratic_root(ws, &target)?;
        let l = ws.model.field.clone();
        let a1l = embed_chain(&f, &l, &a1p);
        let a3l = embed_chain(&f, &l, &a3p);
        let a4l = embed_chain(&f, &l, &ws.model.a4);
        let t_elem = l.div(&l.add(&a4l, &l.mul(&s_elem, &a3l)), &a1l);
        ws.apply(Transform { u: l.one(), r: l.zero(), s: s_elem, t: t_elem });
        Ok(())
    } else if !f.is_zero(&a3p) && f.valuation(&a3p) == Val::zero() {
        let target = Poly::new(&f, vec![ws.model.a6.clone(), a3p.clone(), f.one()]);
        let t_elem = approx_quadratic_root(ws, &target)?;
        let l = ws.model.field.clone();
        let a1l = embed_chain(&f, &l, &a1p);
        let a3l = embed_chain(&f, &l, &a3p);
        let a4l = embed_chain(&f, &l, &ws.model.a4);
        let s_elem = l.div(&l.add(&a4l, &l.mul(&t_elem, &a1l)), &a3l);
        ws.apply(Transform { u: l.one(), r: l.zero(), s: s_elem, t: t_elem });
        Ok(())
    } else {
        Err(MclError::Internal("no unit corner coefficient after normalization".into()))
    }
}

/// An element s in a weakly totally ramified extension of degree at most 2
/// with target(s) small; may extend the workspace field. The element is the
/// generator of the approximation key's field, or a refined rational proxy
/// when the quadratic splits.
fn approx_quadratic_root(ws: &mut Workspace, target: &Poly) -> Result<FElem> {
    let f = ws.model.field.clone();
    let target = &Poly::new(
        &f,
        target.coeffs.iter().map(|c| f.truncate_mod(c, 48)).collect(),
    );
    match IndVal::approximants(&f, target) {
        Ok(_) => {
            let w = wtr::ramified_approx(&f, target)?;
            if w.phi.degree() == 1 {
                Ok(f.neg(&w.phi.coeff_in(&f, 0)))
            } else {
                let ext = w.ext.clone();
                ws.extend(&ext.field);
                Ok(ext.field.gen())
            }
        }
        Err(MclError::NotIrreducible(_)) => {
            let mut proxies = rational_root_proxies(&f, &target.monic(&f))?;
            let p = proxies
                .first_mut()
                .ok_or_else(|| MclError::Internal("split quadratic without rational root".into()))?;
            p.refine_until(Val::int(16), 60)?;
            Ok(p.center())
        }
        Err(e) => Err(e),
    }
}

// ----- semistabilization by digit normalization and downscaling -----

/// Greedy minimization toward a semistable integral model, used where the
/// case analysis guarantees a semistable model over the current field but
/// the direct coordinates live in an unramified extension. Searches
/// coordinate digits level by level, downscaling by the uniformizer whenever
/// the valuation pattern allows it.
fn semistabilize(ws: &mut Workspace, budget: usize) -> Result<()> {
    let f = ws.model.field.clone();
    // initial integral scaling
    let vals: Vec<Val> = [
        (&ws.model.a1, 1i64),
        (&ws.model.a2, 2),
        (&ws.model.a3, 3),
        (&ws.model.a4, 4),
        (&ws.model.a6, 6),
    ]
    .iter()
    .filter(|(a, _)| !f.is_zero(a))
    .map(|(a, w)| f.valuation(a).div_int(*w))
    .collect();
    if let Some(minv) = vals.iter().min() {
        let den = f.value_den();
        let k = minv.mul_int(den).floor();
        if k != 0 {
            let u = f.pow(&f.uniformizer(), k);
            ws.apply(Transform { u, r: f.zero(), s: f.zero(), t: f.zero() });
        }
    }
    for _ in 0..budget {
        let inv = ws.model.invariants();
        if f.is_zero(&inv.delta) {
            return Err(MclError::SingularModel);
        }
        if f.valuation(&inv.delta) == Val::zero() || f.valuation(&inv.c4) == Val::zero() {
            return Ok(());
        }
        if !digit_normalize(ws, 9)? {
            return Err(MclError::NoCertifiedCandidate("semistabilization stalled".into()));
        }
        let u = f.uniformizer();
        ws.apply(Transform { u, r: f.zero(), s: f.zero(), t: f.zero() });
    }
    Err(MclError::SearchBudgetExceeded("semistabilization".into()))
}

/// Search digits of (r, s, t) level by level until the valuations reach
/// v(a_i) >= i (weights 1, 2, 3, 4, 6), so a uniformizer downscale is legal.
fn digit_normalize(ws: &mut Workspace, max_level: usize) -> Result<bool> {
    let f = ws.model.field.clone();
    let kappa = f.residue_field();
    let reps: Vec<FElem> = match &kappa {
        ResField::Fq(fq) if fq.q() <= 4 => fq
            .all_elements()
            .into_iter()
            .map(|e| f.lift_res(&ResElem::Fq(e)))
            .collect(),
        _ => return Ok(false),
    };
    let score = |m: &WModel| -> Val {
        let f = &m.field;
        [(&m.a1, 1i64), (&m.a2, 2), (&m.a3, 3), (&m.a4, 4), (&m.a6, 6)]
            .iter()
            .map(|(a, w)| match f.valuation(a) {
                Val::Infinity => Val::int(1000),
                x => x.div_int(*w),
            })
            .min()
            .unwrap()
    };
    let goal = Val::int(1);
    let mut frontier: Vec<(WModel, Transform)> = vec![(ws.model.clone(), Transform::identity(&f))];
    let pi = f.uniformizer();
    for level in 0..max_level {
        for (m, t) in &frontier {
            if score(m) >= goal {
                ws.apply(t.clone());
                return Ok(true);
            }
        }
        let shift = f.pow(&pi, level as i64);
        let mut next: Vec<(Val, WModel, Transform)> = vec![];
        for (m, t) in &frontier {
            for dr in &reps {
                for dsx in &reps {
                    for dtx in &reps {
                        let step = Transform {
                            u: f.one(),
                            r: f.mul(dr, &shift),
                            s: f.mul(dsx, &shift),
                            t: f.mul(dtx, &shift),
                        };
                        let m2 = m.transform(&step);
                        let t2 = t.then(&f, &step);
                        let sc = score(&m2);
                        next.push((sc, m2, t2));
                    }
                }
            }
        }
        next.sort_by(|a, b| b.0.cmp(&a.0));
        next.truncate(12);
        frontier = next.into_iter().map(|(_, m, t)| (m, t)).collect();
    }
    for (m, t) in &frontier {
        if score(m) >= goal {
            ws.apply(t.clone());
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;

    fn q5() -> Field {
        Field::base(BaseField::padic(5))
    }

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    #[test]
    fn invariants_plugin() {
        let k = q5();
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 1]);
        let inv = w.invariants();
        assert_eq!(inv.b2, k.zero());
        assert_eq!(inv.b4, k.zero());
        assert_eq!(inv.b6, k.from_int(4));
        assert_eq!(inv.b8, k.zero());
        assert_eq!(inv.delta, k.from_int(-432));
        assert_eq!(inv.c4, k.zero());
        let w = WModel::from_ints(&k, [0, 0, 1, 0, 0]);
        let inv = w.invariants();
        assert_eq!(inv.b6, k.one());
        assert_eq!(inv.delta, k.from_int(-27));
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 0]);
        assert!(matches!(w.j_invariant(), Err(MclError::SingularModel)));
    }

    #[test]
    fn reduction_type_examples() {
        let k = q5();
        let w = WModel::from_ints(&k, [0, 1, 0, 0, 5]);
        assert_eq!(reduction_type(&w).unwrap(), Reduction::Multiplicative);
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 5]);
        assert_eq!(reduction_type(&w).unwrap(), Reduction::Additive);
        let w = WModel::from_ints(&k, [0, 0, 0, 1, 0]);
        assert_eq!(reduction_type(&w).unwrap(), Reduction::Good);
    }

    #[test]
    fn roots_reduction_examples() {
        let k = q5();
        let p = k.from_int(5);
        assert_eq!(roots_reduction(&k, &k.zero(), &k.one(), &p).unwrap(), Reduction::Multiplicative);
        assert_eq!(
            roots_reduction(&k, &k.zero(), &k.one(), &k.from_int(2)).unwrap(),
            Reduction::Good
        );
        assert_eq!(
            roots_reduction(&k, &k.zero(), &p, &k.from_int(10)).unwrap(),
            Reduction::Additive
        );
    }

    #[test]
    fn psi3_examples() {
        let k = q5();
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 1]);
        assert_eq!(psi3(&w), Poly::from_ints(&k, &[0, 12, 0, 0, 3]));
        let w = WModel::from_ints(&k, [0, 0, 1, 0, 0]);
        assert_eq!(psi3(&w), Poly::from_ints(&k, &[0, 3, 0, 0, 3]));
        let w = WModel::from_ints(&k, [1, 2, 3, 4, 5]);
        let sheared =
            w.transform(&Transform { u: k.one(), r: k.zero(), s: k.from_int(7), t: k.zero() });
        assert_eq!(psi3(&w), psi3(&sheared));
        let translated =
            w.transform(&Transform { u: k.one(), r: k.zero(), s: k.zero(), t: k.from_int(3) });
        assert_eq!(psi3(&w), psi3(&translated));
    }

    #[test]
    fn psi3_transformation_law() {
        let k = q5();
        let mut s: u64 = 41;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut done = 0;
        while done < 50 {
            let w = WModel::from_ints(
                &k,
                [
                    (next() % 9) as i64 - 4,
                    (next() % 9) as i64 - 4,
                    (next() % 9) as i64 - 4,
                    (next() % 9) as i64 - 4,
                    (next() % 9) as i64 + 1,
                ],
            );
            if k.is_zero(&w.invariants().delta) {
                continue;
            }
            done += 1;
            let u = k.from_int([1, 2, 5, 10][(next() % 4) as usize]);
            let r = k.from_int((next() % 7) as i64 - 3);
            let sx = k.from_int((next() % 7) as i64 - 3);
            let tx = k.from_int((next() % 7) as i64 - 3);
            let moved = w.transform(&Transform { u: u.clone(), r: r.clone(), s: sx, t: tx });
            let p_orig = psi3(&w);
            let p_new = psi3(&moved);
            // p_new(x) = u^{-8} p_orig(u^2 x + r)
            let u2 = k.mul(&u, &u);
            let u8 = k.pow(&u, 8);
            let sub = p_orig
                .compose(&k, &Poly::new(&k, vec![r.clone(), u2.clone()]))
                .scale(&k, &k.inv(&u8));
            assert_eq!(p_new, sub);
        }
    }

    #[test]
    fn psi3_reduction_patterns() {
        let k = q5();
        let w = WModel::from_ints(&k, [0, 0, 0, 1, 0]);
        assert_eq!(psi3_reduction_type(&w).unwrap(), Reduction::Good);
        let w = WModel::from_ints(&k, [0, 1, 0, 0, 5]);
        assert_eq!(psi3_reduction_type(&w).unwrap(), Reduction::Multiplicative);
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 5]);
        assert_eq!(psi3_reduction_type(&w).unwrap(), Reduction::Additive);
    }

    #[test]
    fn distinguished_two_torsion_examples() {
        let k = q5();
        let f = Poly::from_ints(&k, &[0, 1])
            .mul(&k, &Poly::from_ints(&k, &[-1, 1]))
            .mul(&k, &Poly::from_ints(&k, &[-5, 1]));
        let p = distinguished_two_torsion(&k, &f).unwrap();
        let r = k.reduce_unit(&p.value()).unwrap();
        assert_eq!(r, k.residue_field().one());
        let g = Poly::from_ints(&k, &[0, 1])
            .mul(&k, &Poly::from_ints(&k, &[-1, 1]))
            .mul(&k, &Poly::from_ints(&k, &[-2, 1]));
        assert!(matches!(
            distinguished_two_torsion(&k, &g),
            Err(MclError::NotPotentialMultiplicative)
        ));
    }

    #[test]
    fn semistable_q5_pinned() {
        let k = q5();
        // y^2 = x^3 + 5: degree 6, good
        let w = WModel::from_ints(&k, [0, 0, 0, 0, 5]);
        let res = semistable_model(&w).unwrap();
        assert_eq!(res.degree, 6);
        assert_eq!(res.reduction, Reduction::Good);
        assert_eq!(res.f, 1);
        // y^2 = x^3 + x^2 + 5: degree 1, multiplicative
        let w = WModel::from_ints(&k, [0, 1, 0, 0, 5]);
        let res = semistable_model(&w).unwrap();
        assert_eq!(res.degree, 1);
        assert_eq!(res.reduction, Reduction::Multiplicative);
        // already good: stays home
        let w = WModel::from_ints(&k, [0, 0, 0, 1, 0]);
        let res = semistable_model(&w).unwrap();
        assert_eq!(res.degree, 1);
        assert_eq!(res.reduction, Reduction::Good);
    }

    #[test]
    fn semistable_q3_small() {
        let k = Field::base(BaseField::padic(3));
        for a in [[0i64, 0, 0, 0, 3], [0, 1, 0, 0, 3], [0, 0, 0, 1, 0], [1, 0, 1, 0, 2]] {
            let w = WModel::from_ints(&k, a);
            if k.is_zero(&w.invariants().delta) {
                continue;
            }
            let res = semistable_model(&w).unwrap();
            assert!(res.degree <= 12 && 12 % res.degree == 0, "degree {} for {:?}", res.degree, a);
            assert_eq!(res.f, 1);
        }
    }

    #[test]
    fn semistable_q2_small() {
        let k = q2();
        for a in [[0i64, 0, 0, 1, 1], [1, 0, 0, 0, 1], [1, 1, 1, 1, 1], [0, 0, 1, 0, 0]] {
            let w = WModel::from_ints(&k, a);
            if k.is_zero(&w.invariants().delta) {
                continue;
            }
            let res = semistable_model(&w).unwrap();
            assert!(res.degree <= 24 && 24 % res.degree == 0, "degree {} for {:?}", res.degree, a);
            assert_eq!(res.f, 1);
        }
    }
}
