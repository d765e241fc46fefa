//! Certified finite extensions: a locally irreducible defining polynomial
//! with its approximant chain, the (e, f) invariants, and the two-step
//! (unramified then Eisenstein) normal form.

use std::sync::Arc;

use crate::basefield::{ResElem, ResField};
use crate::errors::{MclError, Result};
use crate::field::{ExtStep, FElem, Field, StepKind};
use crate::maclane::IndVal;
use crate::poly::Poly;
use crate::val::Val;

/// A certified finite extension L = K[z]/(h) of a valued field.
#[derive(Clone, Debug)]
pub struct ExtField {
    /// The extension as a valued field (a Chain step over the base).
    pub field: Field,
    pub e: u64,
    pub f: u64,
}

impl ExtField {
    /// Certify h by running the method of approximants and wrap the terminal
    /// chain as a field extension step.
    pub fn new(base: &Field, h: &Poly) -> Result<ExtField> {
        if h.degree() < 1 || !h.is_monic(base) {
            return Err(MclError::Usage("extensions need a monic nonconstant polynomial".into()));
        }
        let chain = IndVal::approximants(base, h)?;
        Ok(ExtField::from_chain(base, chain))
    }

    /// Wrap an already-terminal approximant chain (the chain key is h).
    pub fn from_chain(base: &Field, chain: IndVal) -> ExtField {
        assert!(chain.is_terminal());
        let (e, f) = chain.ext_invariants();
        let h = chain.key_poly().clone();
        if h.degree() == 1 {
            // trivial extension: stay on the base field
            return ExtField { field: base.clone(), e: 1, f: 1 };
        }
        let kappa = chain.residue();
        let den = base.value_den() * e as i64;
        let gen_integral = chain.terminal_value(&Poly::x(base)) >= crate::val::Val::zero();
        let field = Field::Ext(Arc::new(ExtStep {
            below: base.clone(),
            h,
            kind: StepKind::Chain(chain),
            e_rel: e,
            f_rel: f,
            den,
            res: kappa,
            emb_below: None,
            gen_res: None,
            gen_integral,
        }));
        ExtField { field, e, f }
    }

    pub fn base(&self) -> Field {
        match &self.field {
            Field::Base(_) => self.field.clone(),
            Field::Ext(s) => s.below.clone(),
        }
    }

    pub fn degree(&self) -> u64 {
        self.e * self.f
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.field, Field::Base(_)) || self.degree() == 1
    }

    /// Defining polynomial over the base (z for the trivial extension).
    pub fn defining(&self) -> Poly {
        match &self.field {
            Field::Base(b) => Poly::x(&Field::Base(b.clone())),
            Field::Ext(s) => s.h.clone(),
        }
    }

    pub fn chain(&self) -> Option<&IndVal> {
        match &self.field {
            Field::Ext(s) => match &s.kind {
                StepKind::Chain(c) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }

    /// The distinguished root of h as an element of the extension.
    pub fn root(&self) -> FElem {
        match &self.field {
            Field::Base(b) => Field::Base(b.clone()).zero(),
            Field::Ext(_) => self.field.gen(),
        }
    }

    /// v(g(alpha)) for the distinguished root alpha, via the resultant.
    pub fn valuation_of(&self, g: &Poly) -> Val {
        match &self.field {
            Field::Base(b) => {
                let f = Field::Base(b.clone());
                // the trivial extension is rooted at 0
                f.valuation(&g.coeff_in(&f, 0))
            }
            Field::Ext(s) => {
                let r = s.h.resultant(&s.below, g);
                s.below.valuation(&r).div_int(s.h.degree())
            }
        }
    }

    /// Residue of a unit g(alpha).
    pub fn residue_of(&self, g: &Poly) -> Result<ResElem> {
        if self.valuation_of(g) != Val::zero() {
            return Err(MclError::NotAUnit);
        }
        match &self.field {
            Field::Base(b) => {
                let f = Field::Base(b.clone());
                f.reduce_unit(&g.coeff_in(&f, 0))
            }
            Field::Ext(s) => {
                let g = g.rem(&s.below, &s.h);
                match &s.kind {
                    StepKind::Chain(chain) => chain.residue_of_terminal_unit(&g),
                    _ => unreachable!("extension fields wrap chain steps"),
                }
            }
        }
    }

    /// Two-step normal form data: the modulus of the residue field and, when
    /// the residue extension is trivial, the exact Eisenstein polynomial of
    /// the distinguished uniformizer over the base.
    pub fn normal_form(&self) -> NormalForm {
        let unramified = match self.field.residue_field() {
            ResField::Fq(fq) => Some(fq.modulus.coeffs.clone()),
            ResField::Q => None,
        };
        let eisenstein = if self.f == 1 && !self.is_trivial() {
            let s = self.field.step().unwrap();
            let chain = self.chain().unwrap();
            let mono = chain.uniformizer_monomial();
            Some(charpoly_of(&s.below, &s.h, &mono))
        } else {
            None
        };
        NormalForm { unramified, eisenstein }
    }
}

/// Normal-form report: residue-field modulus over F_p (None for Q), and the
/// Eisenstein polynomial over the base when the residue extension is trivial.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub unramified: Option<Vec<u64>>,
    pub eisenstein: Option<Poly>,
}

/// Characteristic polynomial of u(alpha) over the base: prod_i (w - u(alpha_i)),
/// computed as Res_z(h(z), w - u(z)) by fraction-free elimination.
pub fn charpoly_of(base: &Field, h: &Poly, u: &Poly) -> Poly {
    // eliminate z; coefficients of both inputs are polynomials in w
    let a: Vec<Poly> = h.coeffs.iter().map(|c| Poly::constant(c.clone())).collect();
    let mut b: Vec<Poly> = u
        .coeffs
        .iter()
        .map(|c| Poly::constant(base.neg(c)))
        .collect();
    // the constant coefficient (in z) picks up + w
    b[0] = b[0].add(base, &Poly::x(base));
    crate::poly::resultant_bivariate(base, &a, &b)
}

/// Compositum of two certified extensions of the same base: scan small
/// integers lambda and certify alpha + lambda beta via its resultant
/// minimal polynomial.
pub fn primitive_element(base: &Field, h1: &Poly, h2: &Poly) -> Result<ExtField> {
    if h2.degree() == 1 {
        return ExtField::new(base, h1);
    }
    if h1.degree() == 1 {
        return ExtField::new(base, h2);
    }
    let n1 = h1.degree();
    let n2 = h2.degree();
    let bound = 2 * n1 * n2;
    for lam in 1..=bound {
        let r = two_var_resultant(base, h1, h2, lam);
        if r.degree() != n1 * n2 {
            continue;
        }
        let r = r.monic(base);
        // lambda must separate the root sums
        let deriv = r.derivative(base);
        if deriv.is_zero() || r.gcd(base, &deriv).degree() != 0 {
            continue;
        }
        match ExtField::new(base, &r) {
            Ok(ext) => return Ok(ext),
            Err(MclError::NotIrreducible(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(MclError::PrimitiveSearchExhausted)
}

/// Res_x(h1(x), h2(z - lam*x)) as a polynomial in z.
fn two_var_resultant(base: &Field, h1: &Poly, h2: &Poly, lam: i64) -> Poly {
    let a: Vec<Poly> = h1.coeffs.iter().map(|c| Poly::constant(c.clone())).collect();
    // h2(z - lam x): x^k coefficient = sum_m h2_m C(m,k) (-lam)^k z^(m-k)
    let mut b: Vec<Poly> = vec![Poly::zero(); h2.coeffs.len()];
    let neg_lam = base.from_int(-lam);
    for (m, cm) in h2.coeffs.iter().enumerate() {
        let mut lampow = base.one();
        for k in 0..=m {
            let coef = base.mul(cm, &base.mul(&crate::poly::binom_elem(base, m, k), &lampow));
            let mut zpow = vec![base.zero(); m - k];
            zpow.push(coef);
            b[k] = b[k].add(base, &Poly::new(base, zpow));
            lampow = base.mul(&lampow, &neg_lam);
        }
    }
    crate::poly::resultant_bivariate(base, &a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;
    use crate::respoly::ResPoly;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    #[test]
    fn eisenstein_quadratic() {
        let k = q2();
        let h = Poly::from_ints(&k, &[2, 0, 1]);
        let l = ExtField::new(&k, &h).unwrap();
        assert_eq!((l.e, l.f), (2, 1));
        assert_eq!(l.valuation_of(&Poly::x(&k)), Val::new(1, 2));
        assert_eq!(l.valuation_of(&Poly::from_ints(&k, &[12])), Val::int(2));
        let nf = l.normal_form();
        let eis = nf.eisenstein.unwrap();
        assert_eq!(eis.monic(&k), h);
        // residue of 1 + alpha is 1 (Eisenstein expansion constant term)
        let r = l.residue_of(&Poly::from_ints(&k, &[1, 1])).unwrap();
        assert_eq!(r, l.field.residue_field().one());
    }

    #[test]
    fn unramified_quadratic() {
        let k = q2();
        let h = Poly::from_ints(&k, &[1, 1, 1]);
        let l = ExtField::new(&k, &h).unwrap();
        assert_eq!((l.e, l.f), (1, 2));
        let nf = l.normal_form();
        assert_eq!(nf.unramified.unwrap(), vec![1, 1, 1]);
        let r = l.residue_of(&Poly::x(&k)).unwrap();
        let kappa = l.field.residue_field();
        let psi = ResPoly::new(kappa.clone(), vec![kappa.one(), kappa.one(), kappa.one()]);
        assert!(kappa.is_zero(&psi.eval(&r)));
    }

    #[test]
    fn linear_extension_is_base() {
        let k = q2();
        let a = k.from_int(5);
        let h = Poly::x_minus(&k, &a);
        let l = ExtField::new(&k, &h).unwrap();
        assert!(l.is_trivial());
    }

    #[test]
    fn compositum_of_ramified_and_unramified() {
        let k = q2();
        let h1 = Poly::from_ints(&k, &[2, 0, 1]);
        let h2 = Poly::from_ints(&k, &[1, 1, 1]);
        let l = primitive_element(&k, &h1, &h2).unwrap();
        assert_eq!(l.degree(), 4);
        assert_eq!((l.e, l.f), (2, 2));
    }

    #[test]
    fn compositum_with_linear_is_unchanged() {
        let k = q2();
        let h1 = Poly::from_ints(&k, &[2, 0, 1]);
        let h2 = Poly::from_ints(&k, &[-7, 1]);
        let l = primitive_element(&k, &h1, &h2).unwrap();
        assert_eq!((l.e, l.f), (2, 1));
    }

    #[test]
    fn oracle_equivalence_random() {
        // v(Res(h, g))/deg h equals the stabilized approximant value, exact
        let mut s: u64 = 0xABCDEF;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let bases = [BaseField::padic(2), BaseField::padic(3), BaseField::laurent_fp(2)];
        for b in bases {
            let k = Field::base(b.clone());
            let mut done = 0;
            let mut tries = 0;
            while done < 12 && tries < 500 {
                tries += 1;
                let d = (next() % 4 + 2) as usize;
                let mut cs: Vec<FElem> =
                    (0..d).map(|_| k.from_int((next() % 19) as i64 - 9)).collect();
                cs.push(k.one());
                let h = Poly::new(&k, cs);
                if h.degree() < 2 {
                    continue;
                }
                let chain = match IndVal::approximants(&k, &h) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                let ext = ExtField::from_chain(&k, chain.clone());
                if ext.is_trivial() {
                    continue;
                }
                done += 1;
                for _ in 0..4 {
                    let dg = (next() % 5 + 1) as usize;
                    let g = Poly::new(
                        &k,
                        (0..=dg).map(|_| k.from_int((next() % 13) as i64 - 6)).collect(),
                    );
                    if g.is_zero() {
                        continue;
                    }
                    let via_res = ext.valuation_of(&g);
                    let via_chain = chain.stabilized_value(&g);
                    assert_eq!(via_res, via_chain, "oracle mismatch for {:?} over {:?}", g, b);
                }
            }
            assert!(done >= 8, "not enough certified samples over {:?}", b);
        }
    }
}
