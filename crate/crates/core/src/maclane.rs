//! Inductive valuations on K[z]: augmentation chains, residual polynomials,
//! key polynomials, and the method of approximants.
//!
//! Chains are kept in collapsed form with strictly increasing key degrees;
//! a same-degree refinement replaces the last stage. Residual normalization
//! uses canonical equivalence-unit monomials pi^a0 * prod phi_l^{a_l} with
//! the stage exponents a_l in [0, tau_l), so residuals are reproducible.

use std::fmt::Write as _;

use crate::basefield::{ResElem, ResField};
use crate::errors::{IrredCert, MclError, Result};
use crate::field::{fp_solve, FElem, Field};
use crate::fq::{apply_embedding, FqElem, FqField};
use crate::poly::Poly;
use crate::respoly::{factor, ResPoly};
use crate::val::Val;
use std::sync::Arc;

/// Canonical monomial pi^base_exp * prod_l phi_l^{phi_exps[l]}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub base_exp: i64,
    pub phi_exps: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub phi: Poly,
    pub mu: Val,
    /// Relative ramification index of mu over the previous value group
    /// (1 for an infinite stage).
    pub tau: i64,
    /// Residual polynomial of phi over the previous stage (the marker `x`
    /// for the first stage).
    pub psi: ResPoly,
    pub f_rel: u64,
    /// Flattened residue field through this stage.
    pub kappa: ResField,
    /// Image of the previous residue field generator inside kappa.
    emb_prev: Option<FqElem>,
    /// Image of the previous residual variable inside kappa.
    x_image: ResElem,
    /// Value group through this stage is (1/den)Z.
    pub den: i64,
    /// Equivalence-unit monomial of value tau * mu (finite stages).
    q_monomial: Option<Monomial>,
}

/// An inductive valuation: a chain of augmentation stages over a valued field.
#[derive(Clone, Debug)]
pub struct IndVal {
    pub field: Field,
    pub stages: Vec<Stage>,
}

/// Classification returned by `is_key`.
#[derive(Clone, Debug)]
pub enum KeyClass {
    /// Equivalent to the current key polynomial (augment in place).
    Same,
    /// A new direction with the given monic irreducible residual.
    New(ResPoly),
}

impl IndVal {
    /// First-stage valuation [v, V(z - a) = mu].
    pub fn first(field: &Field, center: &FElem, mu: Val) -> Result<IndVal> {
        let phi = Poly::x_minus(field, center);
        let base_den = field.value_den();
        let (tau, den) = match mu {
            Val::Infinity => (1, base_den),
            m => {
                let t = m.order_in_group(base_den);
                (t, base_den * t)
            }
        };
        let kappa = field.residue_field();
        let q_monomial = match mu {
            Val::Infinity => None,
            m => Some(Monomial { base_exp: m.mul_int(tau).mul_int(base_den).numer(), phi_exps: vec![] }),
        };
        let x_marker = ResPoly::x(kappa.clone());
        Ok(IndVal {
            field: field.clone(),
            stages: vec![Stage {
                phi,
                mu,
                tau,
                psi: x_marker,
                f_rel: 1,
                kappa: kappa.clone(),
                emb_prev: None,
                x_image: kappa.zero(),
                den,
                q_monomial,
            }],
        })
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn last(&self) -> &Stage {
        self.stages.last().unwrap()
    }

    pub fn is_terminal(&self) -> bool {
        self.last().mu == Val::Infinity
    }

    pub fn key_poly(&self) -> &Poly {
        &self.last().phi
    }

    pub fn residue(&self) -> ResField {
        self.last().kappa.clone()
    }

    fn den_at(&self, upto: usize) -> i64 {
        if upto == 0 {
            self.field.value_den()
        } else {
            self.stages[upto - 1].den
        }
    }

    /// Prefix chain of the first `upto` stages.
    pub fn prefix(&self, upto: usize) -> IndVal {
        IndVal { field: self.field.clone(), stages: self.stages[..upto].to_vec() }
    }

    // ----- evaluation -----

    pub fn evaluate(&self, g: &Poly) -> Val {
        self.eval_at(self.stages.len(), g)
    }

    fn eval_at(&self, upto: usize, g: &Poly) -> Val {
        if g.is_zero() {
            return Val::Infinity;
        }
        if upto == 0 {
            assert!(g.degree() <= 0, "constant expected below the first stage");
            return self.field.valuation(&g.coeff(0));
        }
        let st = &self.stages[upto - 1];
        let cs = g.phi_expansion(&self.field, &st.phi);
        let mut best = Val::Infinity;
        for (m, c) in cs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = self.eval_at(upto - 1, c).add(&st.mu.mul_int(m as i64));
            if v < best {
                best = v;
            }
        }
        best
    }

    // ----- canonical monomials -----

    /// Decompose w in the value group through stage `upto` as
    /// sum a_l mu_l + a_0 / base_den with a_l in [0, tau_l).
    fn canonical_monomial(&self, upto: usize, w: Val) -> Monomial {
        let mut w = w;
        let mut exps = vec![0i64; upto];
        for l in (0..upto).rev() {
            let st = &self.stages[l];
            let tau = st.tau;
            if tau > 1 {
                let prev_den = self.den_at(l);
                let mut found = false;
                for a in 0..tau {
                    let rest = w.sub(&st.mu.mul_int(a));
                    if rest.in_group(prev_den) {
                        exps[l] = a;
                        w = rest;
                        found = true;
                        break;
                    }
                }
                assert!(found, "value not in the stage group");
            }
        }
        let base = w.mul_int(self.field.value_den());
        assert_eq!(base.denom(), 1, "value not in the base group");
        Monomial { base_exp: base.numer(), phi_exps: exps }
    }

    fn monomial_poly(&self, m: &Monomial) -> Poly {
        let field = &self.field;
        let pi = field.uniformizer();
        let scalar = field.pow(&pi, m.base_exp);
        let mut out = Poly::constant(scalar);
        for (l, &e) in m.phi_exps.iter().enumerate() {
            assert!(e >= 0);
            if e > 0 {
                out = out.mul(field, &self.stages[l].phi.pow(field, e as u64));
            }
        }
        out
    }

    // ----- reduction / residuals -----

    /// Map a residual polynomial over the stage-(i-1) structure into the
    /// stage-i residue field: embed coefficients, evaluate at x_image.
    fn map_into_stage(&self, i: usize, r: &ResPoly) -> ResElem {
        let st = &self.stages[i - 1];
        let kappa = &st.kappa;
        if i == 1 {
            assert!(r.degree() <= 0, "first-stage coefficients are constants");
            return if r.is_zero() { kappa.zero() } else { r.coeff(0) };
        }
        let mut acc = kappa.zero();
        for c in r.coeffs.iter().rev() {
            acc = kappa.mul(&acc, &st.x_image);
            let c_up = self.embed_const(i, c);
            acc = kappa.add(&acc, &c_up);
        }
        acc
    }

    /// Embed a constant of kappa_{i-1} into kappa_i.
    fn embed_const(&self, i: usize, c: &ResElem) -> ResElem {
        let st = &self.stages[i - 1];
        match (&st.emb_prev, c) {
            (None, c) => c.clone(),
            (Some(emb), ResElem::Fq(e)) => {
                let small = match if i >= 2 { &self.stages[i - 2].kappa } else { &st.kappa } {
                    ResField::Fq(f) => f.clone(),
                    _ => unreachable!(),
                };
                let big = match &st.kappa {
                    ResField::Fq(f) => f.clone(),
                    _ => unreachable!(),
                };
                ResElem::Fq(apply_embedding(&small, &big, emb, e))
            }
            _ => unreachable!(),
        }
    }

    /// Graded reduction of g at stage `upto`; requires eval_at(upto, g) = 0.
    /// Returns an element of kappa_upto[x].
    fn reduce(&self, upto: usize, g: &Poly) -> ResPoly {
        assert!(upto >= 1);
        let st = &self.stages[upto - 1];
        let kappa = st.kappa.clone();
        let cs = g.phi_expansion(&self.field, &st.phi);
        let mut out_coeffs: Vec<ResElem> = vec![];
        for (m, c) in cs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let vc = self.eval_at(upto - 1, c);
            let total = vc.add(&st.mu.mul_int(m as i64));
            if !total.is_zero() {
                assert!(total > Val::zero(), "reduce requires value 0");
                continue;
            }
            assert!(m as i64 % st.tau == 0, "contributing index not tau-aligned");
            let j = (m as i64 / st.tau) as usize;
            let contrib = if upto == 1 {
                // c and Q are scalars
                let prod = if j == 0 {
                    c.coeff(0)
                } else {
                    let q = self
                        .monomial_poly(st.q_monomial.as_ref().expect("finite stage"))
                        .coeff(0);
                    self.field.mul(&c.coeff(0), &self.field.pow(&q, j as i64))
                };
                self.field.reduce_unit(&prod).expect("unit reduction")
            } else {
                let h = if j == 0 {
                    c.clone()
                } else {
                    let q = self.monomial_poly(st.q_monomial.as_ref().expect("finite stage"));
                    c.mul(&self.field, &q.pow(&self.field, j as u64))
                };
                let r = self.reduce(upto - 1, &h);
                self.map_into_stage(upto, &r)
            };
            while out_coeffs.len() <= j {
                out_coeffs.push(kappa.zero());
            }
            out_coeffs[j] = kappa.add(&out_coeffs[j], &contrib);
        }
        ResPoly::new(kappa, out_coeffs)
    }

    /// The residual polynomial of g: the reduction of g times the canonical
    /// equivalence-unit monomial of value -V(g). The result may carry an
    /// x^k factor when the key equivalence-divides g; `strip` separates it.
    pub fn residual_polynomial(&self, g: &Poly) -> Result<ResPoly> {
        let v = self.evaluate(g);
        if v == Val::Infinity {
            return Err(MclError::InfiniteValue);
        }
        let n = self.stages.len();
        let m = self.canonical_monomial(n, v.neg());
        let gm = g.mul(&self.field, &self.monomial_poly(&m));
        Ok(self.reduce(n, &gm))
    }

    /// Split a residual as x^k * h with h(0) != 0.
    pub fn strip_x(r: &ResPoly) -> (usize, ResPoly) {
        if r.is_zero() {
            return (0, r.clone());
        }
        let k = r.coeffs.iter().position(|c| !r.field.is_zero(c)).unwrap();
        (k, ResPoly::new(r.field.clone(), r.coeffs[k..].to_vec()))
    }

    // ----- residue lifting -----

    /// Decompose c in kappa_n over kappa_{n-1}: c = sum emb(a_k) x_image^k.
    fn tower_decompose(&self, i: usize, c: &ResElem) -> Vec<ResElem> {
        let st = &self.stages[i - 1];
        let frel = st.f_rel as usize;
        if frel == 1 && st.emb_prev.is_none() {
            // kappa_i == kappa_{i-1}
            return vec![c.clone()];
        }
        let big = match &st.kappa {
            ResField::Fq(f) => f.clone(),
            _ => unreachable!("nontrivial residue extensions are finite"),
        };
        let small = match &self.stages[i - 2].kappa {
            ResField::Fq(f) => f.clone(),
            _ => unreachable!(),
        };
        let emb = st.emb_prev.as_ref().unwrap();
        let ximg = match &st.x_image {
            ResElem::Fq(e) => e.clone(),
            _ => unreachable!(),
        };
        let p = big.p;
        let n = big.f as usize;
        let fs = small.f as usize;
        assert_eq!(n, frel * fs);
        let mut cols = vec![];
        for k in 0..frel {
            for ibase in 0..fs {
                let wb = if fs == 1 { small.one() } else { small.pow(&small.gen(), ibase as u64) };
                let e = apply_embedding(&small, &big, emb, &wb);
                let e = big.mul(&e, &big.pow(&ximg, k as u64));
                let mut v = e.coeffs.clone();
                v.resize(n, 0);
                cols.push(v);
            }
        }
        let cc = match c {
            ResElem::Fq(e) => e.clone(),
            _ => unreachable!(),
        };
        let mut target = cc.coeffs.clone();
        target.resize(n, 0);
        let sol = fp_solve(p, &cols, &target).expect("tower basis is a basis");
        let mut out = vec![];
        for k in 0..frel {
            let mut cs = vec![0u64; fs];
            cs.copy_from_slice(&sol[k * fs..(k + 1) * fs]);
            while cs.last() == Some(&0) {
                cs.pop();
            }
            out.push(ResElem::Fq(FqElem { coeffs: cs }));
        }
        out
    }

    /// Lift a nonzero constant of kappa_upto to a polynomial of degree
    /// < deg(phi_upto) with value 0 whose reduction is exactly that constant.
    fn lift_elem(&self, upto: usize, c: &ResElem) -> Poly {
        let field = &self.field;
        if upto == 0 {
            return Poly::constant(field.lift_res(c));
        }
        let st = &self.stages[upto - 1];
        assert!(!st.kappa.is_zero(c), "lift of zero");
        if upto == 1 {
            return Poly::constant(field.lift_res(c));
        }
        let prev = &self.stages[upto - 2];
        let parts = self.tower_decompose(upto, c);
        let mut out = Poly::zero();
        for (k, a) in parts.iter().enumerate() {
            if self.stages[upto - 2].kappa.is_zero(a) {
                continue;
            }
            let w_val = prev.mu.mul_int(prev.tau).mul_int(-(k as i64));
            let wk = self.canonical_monomial(upto - 1, w_val);
            let wk_poly = self.monomial_poly(&wk);
            let phipow = prev.phi.pow(field, (prev.tau as u64) * k as u64);
            let mono = phipow.mul(field, &wk_poly);
            // rho_k = reduce(upto-1, mono) must be c_k * x^k
            let rho = self.reduce(upto - 1, &mono);
            assert_eq!(rho.degree(), k as i64, "monomial reduction shape");
            let ck = rho.coeff(k);
            for (d, coef) in rho.coeffs.iter().enumerate() {
                if d != k {
                    assert!(rho.field.is_zero(coef), "monomial reduction shape");
                }
            }
            let adj = prev.kappa.div(a, &ck);
            let lifted = self.lift_elem(upto - 1, &adj);
            out = out.add(field, &lifted.mul(field, &mono));
        }
        // keep the representative under the key degree
        if out.degree() >= st.phi.degree() {
            out = out.rem(field, &st.phi);
        }
        debug_assert!(self.eval_at(upto, &out).is_zero());
        debug_assert_eq!(self.reduce(upto, &out), ResPoly::constant(st.kappa.clone(), c.clone()));
        out
    }

    // ----- keys and augmentation -----

    /// Test whether phi is a key polynomial for this valuation; distinguishes
    /// the same-class case (an in-place refinement germ) from new directions.
    pub fn is_key(&self, phi: &Poly) -> Result<KeyClass> {
        let field = &self.field;
        if phi.degree() < 1 || !phi.is_monic(field) {
            return Err(MclError::InvalidKey("key polynomials are monic and nonconstant".into()));
        }
        let st = self.last();
        if st.mu == Val::Infinity {
            return Err(MclError::InvalidKey("cannot augment past an infinite stage".into()));
        }
        let d = st.phi.degree();
        if phi.degree() % d != 0 {
            return Err(MclError::InvalidKey(format!(
                "degree {} is not a multiple of the stage degree {}",
                phi.degree(),
                d
            )));
        }
        let m_top = phi.degree() / d;
        let v = self.evaluate(phi);
        if v != st.mu.mul_int(m_top) {
            return Err(MclError::InvalidKey(format!(
                "value {} differs from the top-term value {}",
                v,
                st.mu.mul_int(m_top)
            )));
        }
        if m_top == 1 {
            let c = phi.sub(field, &st.phi);
            let vc = self.evaluate(&c);
            if vc > st.mu {
                return Ok(KeyClass::Same);
            }
            // vc == mu: new linear direction (forces tau = 1)
        } else if m_top % st.tau != 0 {
            return Err(MclError::InvalidKey("top index not aligned with the ramification".into()));
        }
        let r = self.residual_polynomial(phi)?;
        let (strip, h) = IndVal::strip_x(&r);
        if strip != 0 {
            return Err(MclError::InvalidKey("key is equivalence-divisible by the stage key".into()));
        }
        if h.degree() != m_top / st.tau {
            return Err(MclError::InvalidKey("residual degree mismatch".into()));
        }
        let h = h.monic();
        if !h.is_irreducible() {
            return Err(MclError::InvalidKey("residual is reducible".into()));
        }
        Ok(KeyClass::New(h))
    }

    /// Construct a key polynomial for this valuation lifting the monic
    /// irreducible residual psi.
    pub fn lift_key(&self, psi: &ResPoly) -> Result<Poly> {
        let field = &self.field;
        let n = self.stages.len();
        let st = self.last();
        if st.mu == Val::Infinity {
            return Err(MclError::InvalidKey("cannot lift past an infinite stage".into()));
        }
        let kappa = &st.kappa;
        assert!(psi.is_monic() && psi.degree() >= 1);
        // the class of x itself is the current key
        if psi.degree() == 1 && kappa.is_zero(&psi.coeff(0)) {
            return Ok(st.phi.clone());
        }
        let dd = psi.degree() as u64;
        let tau = st.tau as u64;
        let total_val = st.mu.mul_int((tau * dd) as i64);
        let norm = self.canonical_monomial(n, total_val.neg());
        let norm_poly = self.monomial_poly(&norm);
        let q_poly = self.monomial_poly(st.q_monomial.as_ref().unwrap());
        // top correction constant: residual of phi^(tau*D) * norm
        let delta = |j: u64, mj_poly: &Poly| -> ResElem {
            let mono =
                mj_poly.mul(field, &norm_poly).mul(field, &q_poly.pow(field, j));
            let r = self.reduce(n, &mono);
            assert_eq!(r.degree(), 0, "unit monomial reduces to a constant");
            r.coeff(0)
        };
        let one_poly = Poly::constant(field.one());
        let gamma_top = delta(dd, &one_poly);
        let mut phi = st.phi.pow(field, tau * dd);
        for j in 0..dd {
            let cj = psi.coeff(j as usize);
            if kappa.is_zero(&cj) {
                continue;
            }
            let target = kappa.mul(&cj, &gamma_top);
            let mj = self.canonical_monomial(n, st.mu.mul_int((tau * (dd - j)) as i64));
            let mj_poly = self.monomial_poly(&mj);
            let dj = delta(j, &mj_poly);
            let adj = kappa.div(&target, &dj);
            let lifted = self.lift_elem(n, &adj);
            phi = phi.add(field, &lifted.mul(field, &mj_poly).mul(field, &st.phi.pow(field, tau * j)));
        }
        // verification is part of the contract
        match self.is_key(&phi)? {
            KeyClass::New(h) => {
                if &h != psi {
                    return Err(MclError::Internal(format!(
                        "lifted key residual {} does not match {}",
                        h, psi
                    )));
                }
            }
            KeyClass::Same => {
                return Err(MclError::Internal("lifted key collapsed to the same class".into()))
            }
        }
        Ok(phi)
    }

    /// Augment by a key polynomial and a larger key value. Same-degree keys
    /// replace the last stage (collapsed chains).
    pub fn augment(&self, phi: &Poly, mu: Val) -> Result<IndVal> {
        let st = self.last();
        let d = st.phi.degree();
        if phi.degree() < d {
            return Err(MclError::InvalidKey("key degree may not drop".into()));
        }
        // validate against the correct prefix
        let prefix_len = if phi.degree() == d { self.stages.len() - 1 } else { self.stages.len() };
        if prefix_len == self.stages.len() {
            match self.is_key(phi)? {
                KeyClass::New(_) | KeyClass::Same => {}
            }
            let v = self.evaluate(phi);
            if mu <= v {
                return Err(MclError::KeyValueTooSmall);
            }
        } else {
            let v = self.evaluate(phi);
            if mu <= v {
                return Err(MclError::KeyValueTooSmall);
            }
        }
        self.augment_at(prefix_len, phi, mu)
    }

    /// Internal: append a stage with key phi and value mu over the prefix.
    fn augment_at(&self, prefix_len: usize, phi: &Poly, mu: Val) -> Result<IndVal> {
        let field = &self.field;
        if prefix_len == 0 {
            assert_eq!(phi.degree(), 1);
            let a = field.neg(&phi.coeff_in(field, 0));
            let mut v = IndVal::first(field, &a, mu)?;
            v.field = field.clone();
            return Ok(v);
        }
        let prefix = self.prefix(prefix_len);
        let prev = prefix.last();
        if prev.mu == Val::Infinity {
            return Err(MclError::InvalidKey("cannot augment past an infinite stage".into()));
        }
        let vphi = prefix.evaluate(phi);
        if mu <= vphi {
            return Err(MclError::KeyValueTooSmall);
        }
        // residual of phi over the prefix defines the new residue extension
        let r = prefix.residual_polynomial(phi)?;
        let (strip, h) = IndVal::strip_x(&r);
        if strip != 0 {
            return Err(MclError::InvalidKey("key is equivalence-divisible by the stage key".into()));
        }
        let psi = h.monic();
        if psi.degree() == 0 {
            return Err(MclError::InvalidKey("equivalence unit cannot be a key".into()));
        }
        if !psi.is_irreducible() {
            return Err(MclError::InvalidKey("residual is reducible".into()));
        }
        let f_rel = psi.degree() as u64;
        let prev_den = prefix.den_at(prefix_len);
        let (tau, den) = match mu {
            Val::Infinity => (1, prev_den),
            m => {
                let t = m.order_in_group(prev_den);
                (t, prev_den * t)
            }
        };
        // new residue field
        let (kappa, emb_prev, x_image) = if f_rel == 1 {
            let x_img = prev.kappa.neg(&psi.coeff(0));
            (prev.kappa.clone(), None, x_img)
        } else {
            match &prev.kappa {
                ResField::Fq(small) => {
                    let big = Arc::new(FqField::canonical(small.p, small.f * f_rel as u32));
                    let emb = crate::fq::embedding(small, &big);
                    let big_field = ResField::Fq(big.clone());
                    let psi_big = ResPoly::new(
                        big_field.clone(),
                        psi.coeffs
                            .iter()
                            .map(|c| match c {
                                ResElem::Fq(e) => ResElem::Fq(apply_embedding(small, &big, &emb, e)),
                                _ => unreachable!(),
                            })
                            .collect(),
                    );
                    let root = crate::respoly::roots(&psi_big)
                        .into_iter()
                        .next()
                        .expect("irreducible residual has a root upstairs");
                    (big_field, Some(emb), root)
                }
                ResField::Q => {
                    return Err(MclError::UnsupportedResidue(format!(
                        "residual extension of degree {} over Q",
                        f_rel
                    )))
                }
            }
        };
        let q_monomial = match mu {
            Val::Infinity => None,
            m => {
                let mono = prefix.canonical_monomial(prefix_len, m.mul_int(tau));
                Some(mono)
            }
        };
        let mut stages = prefix.stages;
        stages.push(Stage {
            phi: phi.clone(),
            mu,
            tau,
            psi,
            f_rel,
            kappa,
            emb_prev,
            x_image,
            den,
            q_monomial,
        });
        Ok(IndVal { field: field.clone(), stages })
    }

    // ----- approximants -----

    /// MacLane's method of approximants for a monic polynomial certified
    /// locally irreducible along the way; reducibility surfaces as a
    /// certificate error.
    pub fn approximants(field: &Field, f: &Poly) -> Result<IndVal> {
        if f.degree() < 1 || !f.is_monic(field) {
            return Err(MclError::Usage("approximants need a monic nonconstant input".into()));
        }
        if f.degree() == 1 {
            let a = field.neg(&f.coeff_in(field, 0));
            return IndVal::first(field, &a, Val::Infinity);
        }
        let np = f.newton_polygon(field);
        if np.z_mult > 0 {
            return Err(MclError::NotIrreducible(IrredCert {
                stage: 1,
                detail: format!("z^{} divides the input", np.z_mult),
            }));
        }
        let slope = match np.single_slope() {
            Some(s) => s,
            None => {
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: 1,
                    detail: format!(
                        "Newton polygon has {} slopes: {:?}",
                        np.segments.len(),
                        np.segments
                    ),
                }))
            }
        };
        let mut chain = IndVal::first(field, &field.zero(), slope.neg())?;
        let budget = 6 * f.degree() as usize + 48;
        for _ in 0..budget {
            if chain.is_terminal() {
                return Ok(chain);
            }
            let stage_n = chain.stages.len();
            if chain.key_poly().degree() == f.degree() {
                if let Ok(_) = chain.is_key(f) {
                    return chain.augment(f, Val::Infinity);
                }
            }
            let r = chain.residual_polynomial(f)?;
            let (strip, h) = IndVal::strip_x(&r);
            if strip != 0 {
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: stage_n,
                    detail: format!("residual x^{} * ({}) splits the input", strip, h),
                }));
            }
            let hm = h.monic();
            let factors = factor(&hm)?;
            if factors.len() > 1 {
                let desc: Vec<String> = factors.iter().map(|(g, m)| format!("({})^{}", g, m)).collect();
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: stage_n,
                    detail: format!("residual factors as {}", desc.join(" * ")),
                }));
            }
            if factors.is_empty() {
                return Err(MclError::Internal("constant residual in the approximant loop".into()));
            }
            let psi = factors[0].0.clone();
            let st = chain.last();
            let next_deg = st.tau * psi.degree() * st.phi.degree();
            if f.degree() % next_deg != 0 {
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: stage_n,
                    detail: format!(
                        "stage degree {} does not divide the input degree {}",
                        next_deg,
                        f.degree()
                    ),
                }));
            }
            let phi_next = chain.lift_key(&psi)?;
            // the new key value comes from the Newton polygon of the expansion
            let cs = f.phi_expansion(field, &phi_next);
            if cs[0].is_zero() {
                if phi_next.degree() == f.degree() {
                    // f equals the lifted key exactly
                    return chain.augment(&phi_next, Val::Infinity);
                }
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: stage_n,
                    detail: format!("exact proper factor of degree {}", phi_next.degree()),
                }));
            }
            let pts: Vec<(i64, Val)> = cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j as i64, chain.evaluate(c)))
                .collect();
            let hull = lower_hull_slopes(&pts);
            if hull.len() != 1 {
                return Err(MclError::NotIrreducible(IrredCert {
                    stage: stage_n,
                    detail: format!("expansion polygon has {} slopes", hull.len()),
                }));
            }
            let mu_next = hull[0].0.neg();
            chain = chain.augment(&phi_next, mu_next)?;
            crate::log_trace(&format!(
                "approximant stage {}: key degree {}, value {}",
                chain.stages.len(),
                chain.key_poly().degree(),
                mu_next
            ));
        }
        Err(MclError::SearchBudgetExceeded("approximant stage budget".into()))
    }

    // ----- extension invariants and terminal-chain services -----

    /// (e, f) of the terminal extension.
    pub fn ext_invariants(&self) -> (u64, u64) {
        assert!(self.is_terminal(), "invariants need a terminal chain");
        let mut e = 1u64;
        let mut f = 1u64;
        for st in &self.stages {
            if st.mu != Val::Infinity {
                e *= st.tau as u64;
            }
            f *= st.f_rel;
        }
        (e, f)
    }

    /// A monomial in the keys and the uniformizer below whose value is
    /// 1/e relative to the field below (the extension uniformizer).
    pub fn uniformizer_monomial(&self) -> Poly {
        assert!(self.is_terminal());
        let n = self.stages.len() - 1; // finite prefix
        let den = self.den_at(n);
        let m = self.prefix(n).canonical_monomial(n, Val::new(1, den));
        self.prefix(n).monomial_poly(&m)
    }

    /// v(g(alpha)) for a root alpha of the terminal key: reduce mod the key
    /// and evaluate through the finite prefix (the terminal-stage identity).
    pub fn terminal_value(&self, g: &Poly) -> Val {
        assert!(self.is_terminal());
        let h = &self.last().phi;
        let r = g.rem(&self.field, h);
        if r.is_zero() {
            return Val::Infinity;
        }
        self.eval_at(self.stages.len() - 1, &r)
    }

    /// Residue of a unit g(alpha) for the terminal extension, deg g < deg h.
    pub fn residue_of_terminal_unit(&self, g: &Poly) -> Result<ResElem> {
        assert!(self.is_terminal());
        let n = self.stages.len();
        let v = self.eval_at(n - 1, &g.rem(&self.field, &self.last().phi));
        if v != Val::zero() {
            return Err(MclError::NotAUnit);
        }
        let r = self.reduce(n, g);
        assert!(r.degree() <= 0);
        Ok(if r.is_zero() { self.last().kappa.zero() } else { r.coeff(0) })
    }

    /// Lift a residue-field element to a polynomial representative of a unit.
    pub fn lift_residue(&self, r: &ResElem) -> Poly {
        assert!(self.is_terminal());
        self.lift_elem(self.stages.len(), r)
    }

    /// The valuation v(g(alpha)) through the stabilized evaluate route: raise
    /// the final key value until the expansion minimum sits at the constant
    /// term alone.
    pub fn stabilized_value(&self, g: &Poly) -> Val {
        assert!(self.is_terminal());
        let field = &self.field;
        let n = self.stages.len();
        let h = &self.last().phi;
        let cs = g.phi_expansion(field, h);
        if cs[0].is_zero() {
            return Val::Infinity;
        }
        let a0 = self.eval_at(n - 1, &cs[0]);
        // find M with a0 < a_m + m*M for all m >= 1, then re-evaluate
        let prev = self.prefix(n - 1);
        let base = prev.evaluate(h);
        let mut bound = base.add(&Val::int(1));
        for (m, c) in cs.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let am = self.eval_at(n - 1, c);
            // need M > (a0 - am)/m
            let need = a0.sub(&am).div_int(m as i64).add(&Val::int(1));
            if need > bound {
                bound = need;
            }
        }
        // evaluate [prefix, V(h) = bound](g) and check the minimum is unique at m = 0
        let mut best = a0;
        let mut unique = true;
        for (m, c) in cs.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            let v = self.eval_at(n - 1, c).add(&bound.mul_int(m as i64));
            if v < best {
                best = v;
                unique = false;
            } else if v == best {
                unique = false;
            }
        }
        assert!(unique, "stabilization failed");
        best
    }
}

/// One local branch of a possibly reducible polynomial: an augmentation chain
/// descending toward a cluster of its roots.
#[derive(Clone, Debug)]
pub struct Branch {
    pub chain: IndVal,
    /// The chain is terminal: its key is an exact local factor.
    pub terminal: bool,
}

/// Explore the directions of all local factors of a monic polynomial. Each
/// returned branch either ends in a terminal stage (an exact local factor
/// realized as a key polynomial) or was cut off by the stage budget.
/// Branches are produced in a deterministic order: residual factors sorted
/// lexicographically, expansion slopes from steepest descent.
pub fn local_branches(field: &Field, f: &Poly, max_stages: usize) -> Result<Vec<Branch>> {
    let f = f.monic(field);
    if f.degree() < 1 {
        return Err(MclError::Usage("branch analysis needs a nonconstant input".into()));
    }
    let mut out = vec![];
    if f.degree() == 1 {
        let a = field.neg(&f.coeff_in(field, 0));
        out.push(Branch { chain: IndVal::first(field, &a, Val::Infinity)?, terminal: true });
        return Ok(out);
    }
    let np = f.newton_polygon(field);
    if np.z_mult > 0 {
        // z-adic branch
        let z_chain = IndVal::first(field, &field.zero(), Val::Infinity)?;
        out.push(Branch { chain: z_chain, terminal: true });
    }
    if np.z_mult as i64 == f.degree() {
        return Ok(out);
    }
    for (slope, _) in &np.segments {
        let v1 = IndVal::first(field, &field.zero(), slope.neg())?;
        descend_branch(field, &f, v1, max_stages, &mut out)?;
    }
    Ok(out)
}

fn descend_branch(
    field: &Field,
    f: &Poly,
    chain: IndVal,
    budget: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    if chain.is_terminal() {
        out.push(Branch { chain, terminal: true });
        return Ok(());
    }
    if budget == 0 {
        out.push(Branch { chain, terminal: false });
        return Ok(());
    }
    if chain.key_poly().degree() == f.degree() {
        if chain.is_key(f).is_ok() {
            let t = chain.augment(f, Val::Infinity)?;
            out.push(Branch { chain: t, terminal: true });
            return Ok(());
        }
    }
    let r = chain.residual_polynomial(f)?;
    let (strip, h) = IndVal::strip_x(&r);
    let mut directions: Vec<Poly> = vec![];
    if strip > 0 {
        // roots clustering with the current key
        directions.push(chain.key_poly().clone());
    }
    if h.degree() > 0 {
        let mut factors = factor(&h.monic())?;
        factors.sort_by_key(|(g, _)| (g.degree(), g.lex_key()));
        for (psi, _) in factors {
            directions.push(chain.lift_key(&psi)?);
        }
    }
    for phi in directions {
        let cs = f.phi_expansion(field, &phi);
        if cs[0].is_zero() {
            // exact local factor
            let t = chain.augment(&phi, Val::Infinity)?;
            out.push(Branch { chain: t, terminal: true });
        }
        let vphi = chain.evaluate(&phi);
        let pts: Vec<(i64, Val)> = cs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as i64, chain.evaluate(c)))
            .collect();
        let mut slopes = lower_hull_slopes(&pts);
        // steepest (deepest) first
        slopes.sort_by(|a, b| a.0.cmp(&b.0));
        for (slope, _) in slopes {
            let mu = slope.neg();
            if mu <= vphi {
                continue;
            }
            let next = chain.augment(&phi, mu)?;
            descend_branch(field, f, next, budget - 1, out)?;
        }
    }
    Ok(())
}

/// Lower convex hull slopes of (index, value) points: (slope, length) pairs.
pub fn lower_hull_slopes(pts: &[(i64, Val)]) -> Vec<(Val, u64)> {
    let mut hull: Vec<(i64, Val)> = vec![];
    for &(j, v) in pts {
        while hull.len() >= 2 {
            let (j1, v1) = hull[hull.len() - 2];
            let (j2, v2) = hull[hull.len() - 1];
            let lhs = v.sub(&v1).mul_int(j2 - j1);
            let rhs = v2.sub(&v1).mul_int(j - j1);
            if rhs >= lhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((j, v));
    }
    hull.windows(2)
        .map(|w| {
            let (j1, v1) = w[0];
            let (j2, v2) = w[1];
            (v2.sub(&v1).div_int(j2 - j1), (j2 - j1) as u64)
        })
        .collect()
}

/// Chain description used by serialization and tracing.
pub fn describe_chain(chain: &IndVal) -> String {
    let mut s = String::new();
    for (i, st) in chain.stages.iter().enumerate() {
        let _ = write!(
            s,
            "V{}: deg {} mu {} tau {} f_rel {}; ",
            i + 1,
            st.phi.degree(),
            st.mu,
            st.tau,
            st.f_rel
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    fn poly(field: &Field, cs: &[i64]) -> Poly {
        Poly::from_ints(field, cs)
    }

    #[test]
    fn paper_example_chain() {
        let k = q2();
        let f = poly(&k, &[292, 0, 20, 0, 1]);
        let chain = IndVal::approximants(&k, &f).unwrap();
        assert_eq!(chain.stages.len(), 3);
        // V1 = [v, V1(z) = 1/2]
        assert_eq!(chain.stages[0].phi, Poly::x(&k));
        assert_eq!(chain.stages[0].mu, Val::new(1, 2));
        assert_eq!(chain.stages[0].tau, 2);
        // V2 = [V1, V2(z^2+2) = 4]
        assert_eq!(chain.stages[1].phi, poly(&k, &[2, 0, 1]));
        assert_eq!(chain.stages[1].mu, Val::int(4));
        assert_eq!(chain.stages[1].tau, 1);
        // terminal stage: f itself
        assert_eq!(chain.stages[2].phi, f);
        assert_eq!(chain.stages[2].mu, Val::Infinity);
        // invariants: e = 2, f = 2 for the full quartic field
        assert_eq!(chain.ext_invariants(), (2, 2));
    }

    #[test]
    fn evaluate_paper_values() {
        let k = q2();
        let f = poly(&k, &[292, 0, 20, 0, 1]);
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        assert_eq!(v1.evaluate(&poly(&k, &[2, 0, 1])), Val::int(1));
        let v2 = v1.augment(&poly(&k, &[2, 0, 1]), Val::int(4)).unwrap();
        assert_eq!(v2.evaluate(&f), Val::int(8));
        // constants restrict to v
        assert_eq!(v2.evaluate(&poly(&k, &[12])), Val::int(2));
    }

    #[test]
    fn residual_paper_values() {
        let k = q2();
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        // residual of z^2 + 2 at V1 is y + 1 over F_2
        let r = v1.residual_polynomial(&poly(&k, &[2, 0, 1])).unwrap();
        let rf = r.field.clone();
        assert_eq!(r.degree(), 1);
        assert_eq!(r.coeff(0), rf.one());
        assert_eq!(r.coeff(1), rf.one());
        // residual of a unit constant
        let r = v1.residual_polynomial(&poly(&k, &[7])).unwrap();
        assert_eq!(r.degree(), 0);
        assert_eq!(r.coeff(0), rf.one());
    }

    #[test]
    fn is_key_cases() {
        let k = q2();
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        // z^2 + 2 is a new key
        match v1.is_key(&poly(&k, &[2, 0, 1])).unwrap() {
            KeyClass::New(psi) => assert_eq!(psi.degree(), 1),
            _ => panic!("expected a new class"),
        }
        // z itself is the same class
        match v1.is_key(&Poly::x(&k)).unwrap() {
            KeyClass::Same => {}
            _ => panic!("expected the same class"),
        }
        // z^2 (value 1, residual x) is equivalence-divisible: not a key
        assert!(v1.is_key(&poly(&k, &[0, 0, 1])).is_err());
    }

    #[test]
    fn lift_key_recovers_stage_two() {
        let k = q2();
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        let rf = v1.residue();
        let psi = ResPoly::new(rf.clone(), vec![rf.one(), rf.one()]); // y + 1
        let phi = v1.lift_key(&psi).unwrap();
        assert_eq!(phi, poly(&k, &[2, 0, 1]));
    }

    #[test]
    fn augment_guards() {
        let k = q2();
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        let phi = poly(&k, &[2, 0, 1]);
        // equal value is rejected
        assert!(matches!(v1.augment(&phi, Val::int(1)), Err(MclError::KeyValueTooSmall)));
        // infinite augmentation works
        let term = v1.augment(&phi, Val::Infinity).unwrap();
        assert!(term.is_terminal());
        assert_eq!(term.ext_invariants(), (2, 1));
    }

    #[test]
    fn linear_and_reducible() {
        let k = q2();
        let lin = IndVal::approximants(&k, &poly(&k, &[-3, 1])).unwrap();
        assert!(lin.is_terminal());
        assert_eq!(lin.stages.len(), 1);
        // z^2 - 1 = (z-1)(z+1) over Q_2: certificate
        match IndVal::approximants(&k, &poly(&k, &[-1, 0, 1])) {
            Err(MclError::NotIrreducible(cert)) => {
                assert!(cert.stage >= 1);
            }
            other => panic!("expected a certificate, got {:?}", other.map(|c| describe_chain(&c))),
        }
    }

    #[test]
    fn unramified_invariants() {
        let k = q2();
        let chain = IndVal::approximants(&k, &poly(&k, &[1, 1, 1])).unwrap();
        assert_eq!(chain.ext_invariants(), (1, 2));
    }

    #[test]
    fn purely_inseparable_invariants() {
        for p in [2i64, 3] {
            let k = Field::base(BaseField::laurent_fp(p as u64));
            let t = k.from_base(&match &k {
                Field::Base(b) => b.t_elem(),
                _ => unreachable!(),
            });
            // z^p - t
            let mut cs = vec![k.neg(&t)];
            for _ in 1..p {
                cs.push(k.zero());
            }
            cs.push(k.one());
            let f = Poly::new(&k, cs);
            let chain = IndVal::approximants(&k, &f).unwrap();
            assert_eq!(chain.ext_invariants(), (p as u64, 1));
        }
    }

    #[test]
    fn same_degree_refinement_collapses() {
        let k = q2();
        // z^2 + 2z + 6 is irreducible over Q_2 (disc = -20, not a square);
        // the approximants refine a quadratic key in place at least once
        let f = poly(&k, &[6, 2, 1]);
        let chain = IndVal::approximants(&k, &f).unwrap();
        assert!(chain.is_terminal());
        let mut last = 0;
        for st in &chain.stages {
            assert!(st.phi.degree() > last, "degrees must rise strictly: {}", describe_chain(&chain));
            last = st.phi.degree();
        }
        assert_eq!(chain.ext_invariants(), (2, 1));
    }

    #[test]
    fn residue_of_units_in_f4() {
        let k = q2();
        let chain = IndVal::approximants(&k, &poly(&k, &[1, 1, 1])).unwrap();
        // residue of z is a generator of F_4: it satisfies y^2 + y + 1
        let r = chain.residue_of_terminal_unit(&Poly::x(&k)).unwrap();
        let kappa = chain.residue();
        let psi = ResPoly::new(kappa.clone(), vec![kappa.one(), kappa.one(), kappa.one()]);
        assert!(kappa.is_zero(&psi.eval(&r)));
        // lift then reduce round-trips
        let lifted = chain.lift_residue(&r);
        assert_eq!(chain.residue_of_terminal_unit(&lifted).unwrap(), r);
    }

    #[test]
    fn stabilized_matches_resultant() {
        let k = q2();
        let h = poly(&k, &[2, 0, 1]);
        let chain = IndVal::approximants(&k, &h).unwrap();
        let g = Poly::x(&k);
        let via_res = {
            let r = h.resultant(&k, &g);
            k.valuation(&r).div_int(h.degree())
        };
        assert_eq!(via_res, Val::new(1, 2));
        assert_eq!(chain.stabilized_value(&g), Val::new(1, 2));
    }
}
