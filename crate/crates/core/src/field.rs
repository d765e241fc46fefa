//! A valued field: a supported base field or a finite extension tower above
//! one. Extension steps are certified locally irreducible, so every level is
//! a field and valuations extend uniquely.
//!
//! Elements of an extension are polynomials in the step generator with
//! coefficients one level down. All arithmetic is exact.

use std::sync::Arc;

use crate::basefield::{BaseField, KElem, ResElem, ResField};
use crate::fq::{apply_embedding, FqElem, FqField};
use crate::maclane::IndVal;
use crate::poly::Poly;
use crate::respoly::ResPoly;
use crate::val::Val;

/// How an extension step was certified and how its residue data is computed.
#[derive(Clone, Debug)]
pub enum StepKind {
    /// General step defined by the terminal key of an inductive valuation
    /// chain over the field below.
    Chain(IndVal),
    /// Radical Eisenstein-type step z^b - c with gcd(b, den * v(c)) giving a
    /// fresh totally ramified piece; residue field unchanged.
    Radical,
    /// Unramified step: the step polynomial lifts a monic irreducible
    /// residual polynomial coefficientwise.
    Unram(ResPoly),
}

/// One extension step over `below`.
#[derive(Clone, Debug)]
pub struct ExtStep {
    pub below: Field,
    pub h: Poly,
    pub kind: StepKind,
    pub e_rel: u64,
    pub f_rel: u64,
    /// v(L^x) = (1/den)Z in the absolute normalization v(K^x) = Z.
    pub den: i64,
    pub res: ResField,
    /// Unram steps: image of the generator of the residue field below.
    pub emb_below: Option<FqElem>,
    /// Unram steps: residue of the step generator (a root of the lifted psi).
    pub gen_res: Option<FqElem>,
    /// The step generator has nonnegative valuation (soundness condition for
    /// coefficientwise truncation).
    pub gen_integral: bool,
}

#[derive(Clone, Debug)]
pub enum Field {
    Base(BaseField),
    Ext(Arc<ExtStep>),
}

/// An element of a `Field`: a base element, or a polynomial of degree
/// < deg(h) in the step generator with coefficients one level down.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FElem {
    K(KElem),
    Ext(Vec<FElem>),
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        match (self, other) {
            (Field::Base(a), Field::Base(b)) => a == b,
            (Field::Ext(a), Field::Ext(b)) => {
                Arc::ptr_eq(a, b) || (a.below == b.below && a.h == b.h)
            }
            _ => false,
        }
    }
}

impl Field {
    pub fn base(base: BaseField) -> Field {
        Field::Base(base)
    }

    pub fn bottom(&self) -> &BaseField {
        match self {
            Field::Base(b) => b,
            Field::Ext(s) => s.below.bottom(),
        }
    }

    pub fn step(&self) -> Option<&Arc<ExtStep>> {
        match self {
            Field::Base(_) => None,
            Field::Ext(s) => Some(s),
        }
    }

    /// Total degree of the tower over the base field.
    pub fn tower_degree(&self) -> u64 {
        match self {
            Field::Base(_) => 1,
            Field::Ext(s) => s.below.tower_degree() * (s.h.degree() as u64),
        }
    }

    /// Absolute ramification index over the base field.
    pub fn abs_e(&self) -> u64 {
        match self {
            Field::Base(_) => 1,
            Field::Ext(s) => s.below.abs_e() * s.e_rel,
        }
    }

    /// Absolute residue degree over the base field.
    pub fn abs_f(&self) -> u64 {
        match self {
            Field::Base(_) => 1,
            Field::Ext(s) => s.below.abs_f() * s.f_rel,
        }
    }

    /// The value group is (1/den)Z.
    pub fn value_den(&self) -> i64 {
        match self {
            Field::Base(_) => 1,
            Field::Ext(s) => s.den,
        }
    }

    pub fn residue_char(&self) -> u64 {
        self.bottom().residue_char()
    }

    pub fn characteristic(&self) -> u64 {
        self.bottom().characteristic()
    }

    pub fn residue_field(&self) -> ResField {
        match self {
            Field::Base(b) => b.residue_field(),
            Field::Ext(s) => s.res.clone(),
        }
    }

    pub fn zero(&self) -> FElem {
        match self {
            Field::Base(b) => FElem::K(b.zero()),
            Field::Ext(_) => FElem::Ext(vec![]),
        }
    }

    pub fn one(&self) -> FElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FElem {
        match self {
            Field::Base(b) => FElem::K(b.from_int(n)),
            Field::Ext(s) => {
                let c = s.below.from_int(n);
                if s.below.is_zero(&c) {
                    FElem::Ext(vec![])
                } else {
                    FElem::Ext(vec![c])
                }
            }
        }
    }

    pub fn from_rational(&self, num: i64, den: i64) -> FElem {
        self.div(&self.from_int(num), &self.from_int(den))
    }

    /// Lift an element of the field below into this field.
    pub fn embed(&self, x: &FElem) -> FElem {
        match self {
            Field::Base(_) => x.clone(),
            Field::Ext(s) => {
                if s.below.is_zero(x) {
                    FElem::Ext(vec![])
                } else {
                    FElem::Ext(vec![x.clone()])
                }
            }
        }
    }

    /// Lift a bottom base-field element through the whole tower.
    pub fn from_base(&self, x: &KElem) -> FElem {
        match self {
            Field::Base(_) => FElem::K(x.clone()),
            Field::Ext(s) => {
                let below = s.below.from_base(x);
                self.embed(&below)
            }
        }
    }

    /// The generator of the top extension step.
    pub fn gen(&self) -> FElem {
        match self {
            Field::Base(_) => panic!("base field has no generator"),
            Field::Ext(s) => FElem::Ext(vec![s.below.zero(), s.below.one()]),
        }
    }

    fn coeffs<'a>(&self, x: &'a FElem) -> &'a [FElem] {
        match x {
            FElem::Ext(c) => c,
            FElem::K(_) => panic!("expected extension element"),
        }
    }

    pub fn is_zero(&self, x: &FElem) -> bool {
        match (self, x) {
            (Field::Base(b), FElem::K(k)) => b.is_zero(k),
            (Field::Ext(_), FElem::Ext(c)) => c.is_empty(),
            _ => panic!("element/field mismatch"),
        }
    }

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        match self {
            Field::Base(f) => match (a, b) {
                (FElem::K(x), FElem::K(y)) => FElem::K(f.add(x, y)),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => {
                let (ca, cb) = (self.coeffs(a), self.coeffs(b));
                let mut out = vec![s.below.zero(); ca.len().max(cb.len())];
                for (i, c) in ca.iter().enumerate() {
                    out[i] = c.clone();
                }
                for (i, c) in cb.iter().enumerate() {
                    out[i] = s.below.add(&out[i], c);
                }
                trim(&s.below, &mut out);
                FElem::Ext(out)
            }
        }
    }

    pub fn neg(&self, a: &FElem) -> FElem {
        match self {
            Field::Base(f) => match a {
                FElem::K(x) => FElem::K(f.neg(x)),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => FElem::Ext(self.coeffs(a).iter().map(|c| s.below.neg(c)).collect()),
        }
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        match self {
            Field::Base(f) => match (a, b) {
                (FElem::K(x), FElem::K(y)) => FElem::K(f.mul(x, y)),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => {
                let (ca, cb) = (self.coeffs(a), self.coeffs(b));
                if ca.is_empty() || cb.is_empty() {
                    return FElem::Ext(vec![]);
                }
                let mut out = vec![s.below.zero(); ca.len() + cb.len() - 1];
                for (i, x) in ca.iter().enumerate() {
                    if s.below.is_zero(x) {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        let t = s.below.mul(x, y);
                        out[i + j] = s.below.add(&out[i + j], &t);
                    }
                }
                let red = reduce_mod_h(s, out);
                FElem::Ext(red)
            }
        }
    }

    pub fn inv(&self, a: &FElem) -> FElem {
        assert!(!self.is_zero(a), "inverse of zero");
        match self {
            Field::Base(f) => match a {
                FElem::K(x) => FElem::K(f.inv(x)),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => {
                // extended Euclid in below[z] against h
                let below = &s.below;
                let ap = Poly::new(below, self.coeffs(a).to_vec());
                let (mut r0, mut r1) = (s.h.clone(), ap);
                let (mut t0, mut t1) = (Poly::zero(), Poly::constant(below.one()));
                while !r1.is_zero() {
                    let (q, r) = r0.divmod(below, &r1);
                    let t = t0.sub(below, &q.mul(below, &t1));
                    r0 = r1;
                    r1 = r;
                    t0 = t1;
                    t1 = t;
                }
                assert!(r0.degree() == 0, "inverse failed; step polynomial not irreducible?");
                let c = below.inv(&r0.coeff(0));
                let inv = t0.scale(below, &c);
                let mut coeffs = inv.coeffs;
                trim(below, &mut coeffs);
                FElem::Ext(coeffs)
            }
        }
    }

    pub fn div(&self, a: &FElem, b: &FElem) -> FElem {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &FElem, n: i64) -> FElem {
        if n == 0 {
            return self.one();
        }
        let (base, mut n) = if n < 0 { (self.inv(a), (-n) as u64) } else { (a.clone(), n as u64) };
        let mut acc = self.one();
        let mut sq = base;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            n >>= 1;
        }
        acc
    }

    /// Rough size of the largest coefficient, in bits.
    pub fn elem_bits(&self, x: &FElem) -> u64 {
        match (self, x) {
            (Field::Base(_), FElem::K(k)) => match k {
                crate::basefield::KElem::Rat(c) => (c.numer().bits() + c.denom().bits()) as u64,
                crate::basefield::KElem::FpT(f) => {
                    (f.num.coeffs.len() + f.den.coeffs.len()) as u64 * 4
                }
                crate::basefield::KElem::QT(f) => {
                    let mut total = 0u64;
                    for c in f.num.iter().chain(f.den.iter()) {
                        total = total.max((c.numer().bits() + c.denom().bits()) as u64);
                    }
                    total + (f.num.len() + f.den.len()) as u64
                }
            },
            (Field::Ext(s), FElem::Ext(cs)) => {
                cs.iter().map(|c| s.below.elem_bits(c)).max().unwrap_or(0)
            }
            _ => panic!("element/field mismatch"),
        }
    }

    /// Replace x by a congruent element modulo pi^m: the difference has
    /// valuation at least m. Returns x unchanged when truncation would not
    /// be sound (negative generator valuations) or does not apply.
    pub fn truncate_mod(&self, x: &FElem, m: i64) -> FElem {
        match self {
            Field::Base(b) => match x {
                FElem::K(k) => FElem::K(b.truncate_mod(k, m)),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => {
                let cs = self.coeffs(x);
                if cs.is_empty() {
                    return x.clone();
                }
                if !s.gen_integral {
                    return x.clone();
                }
                let mut out: Vec<FElem> =
                    cs.iter().map(|c| s.below.truncate_mod(c, m)).collect();
                trim(&s.below, &mut out);
                FElem::Ext(out)
            }
        }
    }

    /// The valuation, in the absolute normalization v(K^x) = Z.
    pub fn valuation(&self, x: &FElem) -> Val {
        match self {
            Field::Base(b) => match x {
                FElem::K(k) => b.valuation(k),
                _ => panic!("element/field mismatch"),
            },
            Field::Ext(s) => {
                let cs = self.coeffs(x);
                if cs.is_empty() {
                    return Val::Infinity;
                }
                match &s.kind {
                    StepKind::Radical => {
                        let vc = s.below.valuation(&s.radical_c());
                        let b = s.h.degree();
                        let vg = vc.div_int(b); // value of the generator
                        let mut best = Val::Infinity;
                        for (j, c) in cs.iter().enumerate() {
                            let v = s.below.valuation(c).add(&vg.mul_int(j as i64));
                            if v < best {
                                best = v;
                            }
                        }
                        best
                    }
                    StepKind::Unram(_) => {
                        let mut best = Val::Infinity;
                        for c in cs.iter() {
                            let v = s.below.valuation(c);
                            if v < best {
                                best = v;
                            }
                        }
                        best
                    }
                    StepKind::Chain(chain) => {
                        // the terminal-stage identity; for large elements run
                        // it on truncations (a reading below the cutoff is
                        // exact), doubling the precision as needed
                        let big = s.gen_integral
                            && cs.iter().any(|c| s.below.elem_bits(c) > 1024);
                        if !big {
                            let g = Poly::new(&s.below, cs.to_vec());
                            return chain.terminal_value(&g);
                        }
                        let mut m = 64i64;
                        loop {
                            let cut: Vec<FElem> =
                                cs.iter().map(|c| s.below.truncate_mod(c, m)).collect();
                            let g = Poly::new(&s.below, cut);
                            let v = chain.terminal_value(&g);
                            if v < Val::int(m) {
                                return v;
                            }
                            if m > (1 << 16) {
                                let g = Poly::new(&s.below, cs.to_vec());
                                return chain.terminal_value(&g);
                            }
                            m *= 4;
                        }
                    }
                }
            }
        }
    }

    /// An element of minimal positive valuation 1/value_den().
    pub fn uniformizer(&self) -> FElem {
        match self {
            Field::Base(b) => FElem::K(b.uniformizer()),
            Field::Ext(s) => match &s.kind {
                StepKind::Radical => {
                    // v(gen) = v(c)/b with gcd conditions; combine with the
                    // uniformizer below to reach 1/den
                    let vc = s.below.valuation(&s.radical_c());
                    let b = s.h.degree();
                    let dbelow = s.below.value_den();
                    // v(gen) = a/(b*dbelow) with gcd(a,b) = 1
                    let a = vc.mul_int(dbelow).numer();
                    // find x, y with x*a + y*b = 1  => gen^x * pi_below^y has value 1/(b*dbelow)
                    let (x, y) = ext_gcd(a, b);
                    let gx = self.pow(&self.gen(), x);
                    let py = self.pow(&self.embed(&s.below.uniformizer()), y);
                    let u = self.mul(&gx, &py);
                    debug_assert_eq!(self.valuation(&u), Val::new(1, s.den));
                    u
                }
                StepKind::Unram(_) => self.embed(&s.below.uniformizer()),
                StepKind::Chain(chain) => {
                    let mono = chain.uniformizer_monomial();
                    let u = self.poly_at_gen(&mono);
                    debug_assert_eq!(self.valuation(&u), Val::new(1, s.den));
                    u
                }
            },
        }
    }

    /// Evaluate a polynomial over the field below at the step generator.
    pub fn poly_at_gen(&self, g: &Poly) -> FElem {
        match self {
            Field::Base(_) => panic!("base field has no generator"),
            Field::Ext(s) => {
                let r = g.rem(&s.below, &s.h);
                let mut coeffs = r.coeffs;
                trim(&s.below, &mut coeffs);
                FElem::Ext(coeffs)
            }
        }
    }

    /// Reduce an element of valuation >= 0 into the residue field
    /// (positive valuation reduces to zero).
    pub fn reduce_unit(&self, x: &FElem) -> crate::errors::Result<ResElem> {
        let v = self.valuation(x);
        if v < Val::zero() {
            return Err(crate::errors::MclError::NegativeValuation);
        }
        if v > Val::zero() {
            return Ok(self.residue_field().zero());
        }
        match self {
            Field::Base(b) => match x {
                FElem::K(k) => Ok(b.reduce_unit(k)),
                _ => unreachable!(),
            },
            Field::Ext(s) => {
                let cs = self.coeffs(x);
                match &s.kind {
                    StepKind::Radical => s.below.reduce_unit(&cs[0]),
                    StepKind::Unram(_) => {
                        let big = match &s.res {
                            ResField::Fq(f) => f.clone(),
                            _ => unreachable!("unramified steps have finite residue fields"),
                        };
                        let below_res = s.below.residue_field();
                        let emb = s.emb_below.as_ref().unwrap();
                        let genr = s.gen_res.as_ref().unwrap();
                        let mut acc = big.zero();
                        let mut genpow = big.one();
                        for c in cs.iter() {
                            let r = s.below.reduce_unit(c)?;
                            let r = match (&below_res, r) {
                                (ResField::Fq(small), ResElem::Fq(e)) => {
                                    apply_embedding(small, &big, emb, &e)
                                }
                                _ => unreachable!(),
                            };
                            acc = big.add(&acc, &big.mul(&r, &genpow));
                            genpow = big.mul(&genpow, genr);
                        }
                        Ok(ResElem::Fq(acc))
                    }
                    StepKind::Chain(chain) => {
                        // the residue only depends on the element modulo the
                        // maximal ideal; shrink huge coefficients first when
                        // the chain data makes that sound
                        let integral_chain = s.gen_integral
                            && chain
                                .stages
                                .iter()
                                .all(|st| st.mu == Val::Infinity || st.mu >= Val::zero());
                        let big = cs.iter().any(|c| s.below.elem_bits(c) > 1024);
                        let g = if integral_chain && big {
                            Poly::new(
                                &s.below,
                                cs.iter().map(|c| s.below.truncate_mod(c, 48)).collect(),
                            )
                        } else {
                            Poly::new(&s.below, cs.to_vec())
                        };
                        chain.residue_of_terminal_unit(&g)
                    }
                }
            }
        }
    }

    /// A canonical multiplicative-section-free lift of a residue element.
    pub fn lift_res(&self, r: &ResElem) -> FElem {
        if self.residue_field().is_zero(r) {
            return self.zero();
        }
        match self {
            Field::Base(b) => FElem::K(b.lift_res(r)),
            Field::Ext(s) => match &s.kind {
                StepKind::Radical => self.embed(&s.below.lift_res(r)),
                StepKind::Unram(_) => {
                    let big = match &s.res {
                        ResField::Fq(f) => f.clone(),
                        _ => unreachable!(),
                    };
                    let small = match s.below.residue_field() {
                        ResField::Fq(f) => f.clone(),
                        _ => unreachable!(),
                    };
                    let rr = match r {
                        ResElem::Fq(e) => e.clone(),
                        _ => panic!("residue mismatch"),
                    };
                    // write r in the basis gen_res^j * emb(small basis) and lift coefficients
                    let emb = s.emb_below.as_ref().unwrap();
                    let genr = s.gen_res.as_ref().unwrap();
                    let d = s.f_rel as usize;
                    let fs = small.f as usize;
                    let p = big.p;
                    let n = d * fs;
                    assert_eq!(n, big.f as usize);
                    // columns: emb(w_small^i) * gen^j
                    let mut cols: Vec<Vec<u64>> = vec![];
                    for j in 0..d {
                        for i in 0..fs {
                            let wi = small.pow(&small.gen(), i as u64);
                            let wi = if fs == 1 { small.one() } else { wi };
                            let e = apply_embedding(&small, &big, emb, &wi);
                            let e = big.mul(&e, &big.pow(genr, j as u64));
                            let mut v = e.coeffs.clone();
                            v.resize(n, 0);
                            cols.push(v);
                        }
                    }
                    let mut target = rr.coeffs.clone();
                    target.resize(n, 0);
                    let sol = fp_solve(p, &cols, &target).expect("residue basis is a basis");
                    // reassemble
                    let mut out = vec![s.below.zero(); d];
                    for j in 0..d {
                        let mut cs = vec![0u64; fs];
                        for i in 0..fs {
                            cs[i] = sol[j * fs + i];
                        }
                        while cs.last() == Some(&0) {
                            cs.pop();
                        }
                        let small_elem = ResElem::Fq(FqElem { coeffs: cs });
                        out[j] = s.below.lift_res(&small_elem);
                    }
                    trim(&s.below, &mut out);
                    FElem::Ext(out)
                }
                StepKind::Chain(chain) => {
                    let g = chain.lift_residue(r);
                    self.poly_at_gen(&g)
                }
            },
        }
    }
}

impl ExtStep {
    /// For radical steps z^b - c: the element c.
    pub fn radical_c(&self) -> FElem {
        assert!(matches!(self.kind, StepKind::Radical));
        self.below.neg(&self.h.coeff(0))
    }
}

fn trim(field: &Field, v: &mut Vec<FElem>) {
    while v.last().map_or(false, |c| field.is_zero(c)) {
        v.pop();
    }
}

fn reduce_mod_h(s: &ExtStep, coeffs: Vec<FElem>) -> Vec<FElem> {
    let below = &s.below;
    let g = Poly::new(below, coeffs);
    let r = g.rem(below, &s.h);
    let mut out = r.coeffs;
    trim(below, &mut out);
    out
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64) {
    // returns (x, y) with x*a + y*b = gcd(a, b) = 1 here
    let (mut old_r, mut r) = (a, b);
    let (mut old_x, mut x) = (1i64, 0i64);
    let (mut old_y, mut y) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_x, x) = (x, old_x - q * x);
        (old_y, y) = (y, old_y - q * y);
    }
    assert!(old_r == 1 || old_r == -1, "exponents not coprime");
    if old_r == -1 {
        (-old_x, -old_y)
    } else {
        (old_x, old_y)
    }
}

/// Solve sum_i x_i * cols[i] = target over F_p. Columns are vectors of equal
/// length; returns None if inconsistent.
pub fn fp_solve(p: u64, cols: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    let n = target.len();
    let m = cols.len();
    // build augmented matrix rows x (cols+1)
    let mut mat = vec![vec![0u64; m + 1]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            mat[i][j] = col[i] % p;
        }
    }
    for i in 0..n {
        mat[i][m] = target[i] % p;
    }
    let inv = |a: u64| -> u64 {
        // p prime
        let mut t: i128 = 0;
        let mut new_t: i128 = 1;
        let mut r: i128 = p as i128;
        let mut new_r: i128 = (a % p) as i128;
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        t.rem_euclid(p as i128) as u64
    };
    let mut pivots = vec![];
    let mut row = 0;
    for col in 0..m {
        let mut sel = None;
        for i in row..n {
            if mat[i][col] % p != 0 {
                sel = Some(i);
                break;
            }
        }
        let Some(sel) = sel else { continue };
        mat.swap(row, sel);
        let iv = inv(mat[row][col]);
        for j in col..=m {
            mat[row][j] = (mat[row][j] as u128 * iv as u128 % p as u128) as u64;
        }
        for i in 0..n {
            if i != row && mat[i][col] != 0 {
                let f = mat[i][col];
                for j in col..=m {
                    let t = (mat[row][j] as u128 * f as u128 % p as u128) as u64;
                    mat[i][j] = (mat[i][j] + p - t) % p;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == n {
            break;
        }
    }
    // check consistency
    for i in row..n {
        if mat[i][m] != 0 {
            return None;
        }
    }
    let mut sol = vec![0u64; m];
    for (r, c) in pivots {
        sol[c] = mat[r][m];
    }
    Some(sol)
}

/// Construct a radical step z^b - c over `below`; requires that the step is
/// Eisenstein-like: writing v(c) = a / value_den(below), gcd(a, b) = 1.
pub fn radical_step(below: &Field, b: i64, c: &FElem) -> Field {
    assert!(b >= 1);
    let vc = below.valuation(c);
    assert!(vc.is_finite(), "radical of zero");
    let a = vc.mul_int(below.value_den());
    assert_eq!(a.denom(), 1, "value not in the group below");
    assert_eq!(gcd_i64(a.numer(), b), 1, "radical step requires coprime exponent data");
    if b == 1 {
        // trivial step; avoid stacking
        return below.clone();
    }
    let mut coeffs = vec![below.neg(c)];
    for _ in 1..b {
        coeffs.push(below.zero());
    }
    coeffs.push(below.one());
    let h = Poly::new(below, coeffs);
    let den = below.value_den() * b;
    let gen_integral = vc >= Val::zero();
    Field::Ext(Arc::new(ExtStep {
        below: below.clone(),
        h,
        kind: StepKind::Radical,
        e_rel: b as u64,
        f_rel: 1,
        den,
        res: below.residue_field(),
        emb_below: None,
        gen_res: None,
        gen_integral,
    }))
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Construct an unramified step: lift the monic irreducible `psi` over the
/// residue field of `below` coefficientwise.
pub fn unram_step(below: &Field, psi: &ResPoly) -> Field {
    assert!(psi.is_monic() && psi.degree() >= 1);
    let d = psi.degree() as u64;
    if d == 1 {
        return below.clone();
    }
    let below_res = below.residue_field();
    let (p, f_old) = match &below_res {
        ResField::Fq(fq) => (fq.p, fq.f),
        ResField::Q => panic!("unramified steps over Q residue are out of scope"),
    };
    let coeffs: Vec<FElem> = psi.coeffs.iter().map(|c| below.lift_res(c)).collect();
    let h = Poly::new(below, coeffs);
    let big = Arc::new(FqField::canonical(p, f_old * d as u32));
    let small = match &below_res {
        ResField::Fq(fq) => fq.clone(),
        _ => unreachable!(),
    };
    let emb = crate::fq::embedding(&small, &big);
    // root of psi embedded into big
    let big_field = ResField::Fq(big.clone());
    let psi_big = ResPoly::new(
        big_field.clone(),
        psi.coeffs
            .iter()
            .map(|c| match c {
                ResElem::Fq(e) => ResElem::Fq(apply_embedding(&small, &big, &emb, e)),
                _ => unreachable!(),
            })
            .collect(),
    );
    let rs = crate::respoly::roots(&psi_big);
    let gen_res = match rs.into_iter().next().expect("lifted residual has a root upstairs") {
        ResElem::Fq(e) => e,
        _ => unreachable!(),
    };
    Field::Ext(Arc::new(ExtStep {
        below: below.clone(),
        h,
        kind: StepKind::Unram(psi.clone()),
        e_rel: 1,
        f_rel: d,
        den: below.value_den(),
        res: big_field,
        emb_below: Some(emb),
        gen_res: Some(gen_res),
        gen_integral: true,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;

    #[test]
    fn radical_tower_valuations() {
        let k = Field::base(BaseField::padic(2));
        let two = k.from_int(2);
        let l = radical_step(&k, 2, &two); // Q_2(sqrt 2)
        assert_eq!(l.value_den(), 2);
        assert_eq!(l.abs_e(), 2);
        assert_eq!(l.abs_f(), 1);
        let g = l.gen();
        assert_eq!(l.valuation(&g), Val::new(1, 2));
        let u = l.uniformizer();
        assert_eq!(l.valuation(&u), Val::new(1, 2));
        // gen^2 = 2
        let g2 = l.mul(&g, &g);
        assert_eq!(g2, l.from_int(2));
        // arithmetic: (1+g)(1-g) = 1 - 2 = -1
        let a = l.add(&l.one(), &g);
        let b = l.sub(&l.one(), &g);
        assert_eq!(l.mul(&a, &b), l.from_int(-1));
        let inv = l.inv(&a);
        assert_eq!(l.mul(&a, &inv), l.one());
    }

    #[test]
    fn unram_tower_residues() {
        let k = Field::base(BaseField::padic(2));
        let rf = k.residue_field();
        // psi = y^2 + y + 1 over F_2
        let one = rf.one();
        let psi = ResPoly::new(rf.clone(), vec![one.clone(), one.clone(), one.clone()]);
        let l = unram_step(&k, &psi);
        assert_eq!(l.abs_e(), 1);
        assert_eq!(l.abs_f(), 2);
        let g = l.gen();
        assert_eq!(l.valuation(&g), Val::zero());
        let r = l.reduce_unit(&g).unwrap();
        // the residue of the generator satisfies psi
        let lr = l.residue_field();
        let val = ResPoly::new(
            lr.clone(),
            vec![lr.one(), lr.one(), lr.one()],
        )
        .eval(&r);
        assert!(lr.is_zero(&val));
        // lift then reduce round-trips
        let back = l.lift_res(&r);
        assert_eq!(l.reduce_unit(&back).unwrap(), r);
    }
}
