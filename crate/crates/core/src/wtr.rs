//! Ramified approximation: weakly totally wildly ramified elements inside
//! Galois-invariant disks, the residue-characteristic-zero rational center,
//! the refinement for possibly reducible inputs, separable perturbation, and
//! the equispaced-quartic analysis used in residue characteristic 2.

use crate::diskoid::{root_difference_valuations, Diskoid, MPhi};
use crate::errors::{MclError, Result};
use crate::extfield::ExtField;
use crate::field::{FElem, Field};
use crate::maclane::{local_branches, IndVal};
use crate::poly::Poly;
use crate::respoly::p_free_part;
use crate::val::Val;

/// Result of a ramified approximation: a separable key polynomial whose
/// roots lie in every disk containing the input's roots, together with the
/// (weakly totally wildly ramified) extension it generates.
#[derive(Clone, Debug)]
pub struct WtrResult {
    pub phi: Poly,
    pub ext: ExtField,
    /// Index of the chosen approximant stage.
    pub j: usize,
    /// Certificate: the disk about the input's roots with membership of
    /// phi's roots verified.
    pub disk: Option<Diskoid>,
}

/// Largest stage index j with trivial residue growth through stage j and
/// p-power ramification strictly before it.
pub fn wtr_index(chain: &IndVal, p: u64) -> usize {
    let mut j = 0;
    for (i, st) in chain.stages.iter().enumerate() {
        let idx = i + 1;
        if st.f_rel != 1 {
            break;
        }
        if i > 0 {
            let tau_prev = chain.stages[i - 1].tau as u64;
            let wild = if p == 0 { tau_prev == 1 } else { p_free_part(tau_prev, p) == 1 };
            if !wild {
                j = idx;
                break;
            }
        }
        j = idx;
    }
    j.max(1)
}

pub fn is_separable(field: &Field, f: &Poly) -> bool {
    if f.degree() == 1 {
        return true;
    }
    let d = f.derivative(field);
    if d.is_zero() {
        return false;
    }
    f.gcd(field, &d).degree() == 0
}

/// The extension defined by the key of stage j of a chain.
pub fn stage_extension(chain: &IndVal, j: usize) -> Result<ExtField> {
    let base = chain.field.clone();
    let phi = chain.stages[j - 1].phi.clone();
    if phi.degree() == 1 {
        let a = base.neg(&phi.coeff_in(&base, 0));
        return Ok(ExtField::from_chain(&base, IndVal::first(&base, &a, Val::Infinity)?));
    }
    let term = chain.prefix(j - 1).augment(&phi, Val::Infinity)?;
    Ok(ExtField::from_chain(&base, term))
}

/// Ramified approximation for a certified locally irreducible input over a
/// base of positive residue characteristic: the deepest approximant stage
/// with trivial residue growth and wild ramification, made separable, with
/// the minimal-disk membership certificate verified.
pub fn ramified_approx(base: &Field, f: &Poly) -> Result<WtrResult> {
    let p = base.residue_char();
    if p == 0 {
        return Err(MclError::ResidueCharZero);
    }
    let chain = IndVal::approximants(base, f)?;
    let j = wtr_index(&chain, p);
    let mut phi = chain.stages[j - 1].phi.clone();
    let mut ext = stage_extension(&chain, j)?;
    if !is_separable(base, &phi) {
        let (e0, f0) = (ext.e, ext.f);
        let mut t = perturbation_target(&chain, f, &phi);
        let mut fixed = None;
        for _ in 0..24 {
            let cand = separable_perturb(base, &phi, t)?;
            if let Ok(c2) = IndVal::approximants(base, &cand) {
                let ext2 = ExtField::from_chain(base, c2);
                if (ext2.e, ext2.f) == (e0, f0) {
                    fixed = Some((cand, ext2));
                    break;
                }
            }
            t = t.mul_int(2);
        }
        let (cand, ext2) =
            fixed.ok_or_else(|| MclError::NoCertifiedCandidate("separable perturbation".into()))?;
        phi = cand;
        ext = ext2;
    }
    // disk certificate against the minimal disk about the input's roots
    let disk = if f.degree() >= 2 && phi.degree() < f.degree() {
        let f_ext = ExtField::new(base, f)?;
        let diffs = root_difference_valuations(&f_ext);
        let r = *diffs.first().unwrap();
        if r == Val::Infinity {
            None
        } else {
            let m = MPhi::for_ext(&ext);
            let d = Diskoid::new(ext.clone(), m.apply(r));
            if !d.member(&f_ext) {
                return Err(MclError::NoCertifiedCandidate("membership certificate failed".into()));
            }
            Some(d)
        }
    } else {
        None
    };
    debug_assert_eq!(ext.f, 1);
    debug_assert_eq!(p_free_part(ext.e.max(1), p), 1);
    Ok(WtrResult { phi, ext, j, disk })
}

fn perturbation_target(chain: &IndVal, f: &Poly, phi: &Poly) -> Val {
    // comfortably above every value the chain compares
    let prefix = chain.prefix(chain.len() - 1);
    let mut t = Val::int(2);
    let vf = prefix.evaluate(f);
    if vf.is_finite() && vf > t {
        t = vf;
    }
    let vphi = prefix.evaluate(phi);
    if vphi.is_finite() && vphi.mul_int(2) > t {
        t = vphi.mul_int(2);
    }
    t.add(&Val::int(2))
}

/// Residue characteristic zero: the rational element -c_{n-1}/(n c_n) of
/// every disk containing the roots of f, with an exact certificate.
pub fn char0_center(base: &Field, f: &Poly) -> Result<FElem> {
    if base.residue_char() != 0 {
        return Err(MclError::Usage("rational centers apply in residue characteristic 0".into()));
    }
    let n = f.degree();
    if n < 1 {
        return Err(MclError::Usage("nonconstant input required".into()));
    }
    let cn = f.lc();
    let cn1 = f.coeff_in(base, (n - 1) as usize);
    let b = base.neg(&base.div(&cn1, &base.mul(&base.from_int(n), &cn)));
    if n >= 2 {
        // v(f(b)) >= n * r_min puts b in the minimal disk about the roots
        let r = min_pairwise_difference(base, f);
        if let Val::Finite(_, _) = r {
            let fb = f.eval(base, &b);
            let need = r.mul_int(n);
            if base.valuation(&fb) < need {
                return Err(MclError::NoCertifiedCandidate("rational center certificate".into()));
            }
        }
    }
    Ok(b)
}

/// Smallest pairwise root-difference valuation, over the base field.
pub fn min_pairwise_difference(base: &Field, f: &Poly) -> Val {
    all_pairwise_differences(base, f).into_iter().next().unwrap_or(Val::Infinity)
}

/// Valuations of all pairwise root differences (i != j) with multiplicity,
/// sorted ascending; infinite entries mark repeated roots. Computed from the
/// difference resultant Res_x(f(x), f(x+z)) over the base, so no extension
/// arithmetic is needed.
pub fn all_pairwise_differences(base: &Field, f: &Poly) -> Vec<Val> {
    let f = f.monic(base);
    let n = f.degree();
    assert!(n >= 2);
    // coefficients of f(x) and f(x+z) as polynomials in z
    let a: Vec<Poly> = f.coeffs.iter().map(|c| Poly::constant(c.clone())).collect();
    let mut b: Vec<Poly> = vec![Poly::zero(); f.coeffs.len()];
    for (m, cm) in f.coeffs.iter().enumerate() {
        for k in 0..=m {
            // contribution c_m * C(m, k) * z^(m-k) to the x^k coefficient
            let coef = base.mul(cm, &crate::poly::binom_elem(base, m, k));
            let mut zpow = vec![base.zero(); m - k];
            zpow.push(coef);
            b[k] = b[k].add(base, &Poly::new(base, zpow));
        }
    }
    let delta = crate::poly::resultant_bivariate(base, &a, &b);
    let np = delta.newton_polygon(base);
    let mut out = vec![];
    for _ in n as u64..np.z_mult {
        out.push(Val::Infinity);
    }
    for (slope, len) in &np.segments {
        for _ in 0..*len {
            out.push(slope.neg());
        }
    }
    out.sort();
    out
}

/// Sharpened approximation for a possibly reducible input whose roots are
/// contained in the diskoid D: follow residual branches deterministically and
/// return the deepest certified stage with [K(alpha):K] <= q, the p-part of
/// deg f.
pub fn ax_refinement(base: &Field, f: &Poly, d: &Diskoid) -> Result<WtrResult> {
    let p = base.residue_char();
    if p == 0 {
        let b = char0_center(base, f)?;
        let lin = Poly::x_minus(base, &b);
        let ext = ExtField::new(base, &lin)?;
        return Ok(WtrResult { phi: lin, ext, j: 1, disk: Some(d.clone()) });
    }
    let q = {
        let mut q = 1u64;
        let mut n = f.degree() as u64;
        while n % p == 0 {
            q *= p;
            n /= p;
        }
        q
    };
    let budget = f.degree() as usize + 2;
    let branches = local_branches(base, f, budget)?;
    for br in &branches {
        let j = wtr_index(&br.chain, p);
        for i in (1..=j).rev() {
            let ext = stage_extension(&br.chain, i)?;
            if ext.degree() > q {
                continue;
            }
            let phi = br.chain.stages[i - 1].phi.clone();
            let ok = if phi.degree() == 1 {
                let a = base.neg(&phi.coeff_in(base, 0));
                d.ext.valuation_of(&Poly::x_minus(base, &a)) >= d.r
            } else {
                d.member(&ext)
            };
            if !ok {
                continue;
            }
            let mut phi = phi;
            let mut ext = ext;
            if !is_separable(base, &phi) {
                let mut t = Val::int(4).add(&d.s).add(&d.s);
                if !t.is_finite() {
                    t = Val::int(8);
                }
                let mut fixed = None;
                for _ in 0..24 {
                    let cand = separable_perturb(base, &phi, t)?;
                    if let Ok(c2) = IndVal::approximants(base, &cand) {
                        let e2 = ExtField::from_chain(base, c2);
                        if (e2.e, e2.f) == (ext.e, ext.f) && d.member(&e2) {
                            fixed = Some((cand, e2));
                            break;
                        }
                    }
                    t = t.mul_int(2);
                }
                match fixed {
                    Some((c, e2)) => {
                        phi = c;
                        ext = e2;
                    }
                    None => continue,
                }
            }
            debug_assert_eq!(ext.f, 1);
            return Ok(WtrResult { phi, ext, j: i, disk: Some(d.clone()) });
        }
    }
    Err(MclError::NoCertifiedCandidate(format!(
        "no stage of degree <= {} certified inside the disk across {} branches",
        q,
        branches.len()
    )))
}

/// Make an inseparable polynomial separable by adding cz with v(c) >= target;
/// already-separable inputs are returned unchanged.
pub fn separable_perturb(base: &Field, f: &Poly, target: Val) -> Result<Poly> {
    if is_separable(base, f) {
        return Ok(f.clone());
    }
    if base.characteristic() == 0 {
        return Err(MclError::Internal("inseparable polynomial in characteristic zero".into()));
    }
    let pi = base.uniformizer();
    let mut k = target.ceil().max(1);
    for _ in 0..64 {
        let c = base.pow(&pi, k * base.value_den());
        let cand = f.add(base, &Poly::new(base, vec![base.zero(), c]));
        if is_separable(base, &cand) {
            return Ok(cand);
        }
        k *= 2;
    }
    Err(MclError::SearchBudgetExceeded("separable perturbation".into()))
}

/// Equispaced-quartic analysis in residue characteristic 2: either a weakly
/// totally ramified quartic root of f, or an element generating a separable
/// weakly totally ramified extension of degree dividing 2 inside the minimal
/// disk of f; returns the extension and the common difference valuation r,
/// which lies in the extension's value group.
pub fn equispaced_quartic(base: &Field, f: &Poly) -> Result<(ExtField, Val)> {
    if base.residue_char() != 2 {
        return Err(MclError::Usage("equispaced quartics arise in residue characteristic 2".into()));
    }
    let f = f.monic(base);
    if f.degree() != 4 {
        return Err(MclError::Usage("quartic input required".into()));
    }
    if !is_separable(base, &f) {
        return Err(MclError::Usage("separable input required".into()));
    }
    let diffs = all_pairwise_differences(base, &f);
    let r = diffs[0];
    if diffs.iter().any(|x| *x != r) {
        return Err(MclError::NotEquispaced);
    }
    // v(f(beta)) >= 4r certifies beta inside the minimal disk of f
    let need = r.mul_int(4);
    let branches = local_branches(base, &f, 6)?;
    // first alternative: a weakly totally ramified root of f itself
    for br in &branches {
        if !br.terminal {
            continue;
        }
        if br.chain.key_poly().degree() == 4 {
            let (_, fr) = br.chain.ext_invariants();
            if fr == 1 {
                let ext = ExtField::from_chain(base, br.chain.clone());
                return Ok((ext, r));
            }
        }
    }
    // otherwise: an approximation element of degree dividing 2
    let mut best: Option<ExtField> = None;
    for br in &branches {
        let j = wtr_index(&br.chain, 2);
        for i in (1..=j).rev() {
            let ext = stage_extension(&br.chain, i)?;
            if ext.degree() > 2 {
                continue;
            }
            let phi = &br.chain.stages[i - 1].phi;
            let inside = if phi.degree() == 1 {
                let a = base.neg(&phi.coeff_in(base, 0));
                base.valuation(&f.eval(base, &a)) >= need
            } else {
                match ExtField::new(base, phi) {
                    Ok(e) => e.valuation_of(&f) >= need,
                    Err(_) => false,
                }
            };
            if !inside {
                continue;
            }
            if best.as_ref().map_or(true, |b| ext.degree() <= b.degree()) {
                best = Some(ext);
            }
            break;
        }
    }
    let ext = best.ok_or(MclError::NoCertifiedCandidate("equispaced quartic center".into()))?;
    let e = ext.e.max(1) as i64;
    if !r.mul_int(e).in_group(base.value_den()) {
        return Err(MclError::NoCertifiedCandidate(
            "difference valuation missed the value group".into(),
        ));
    }
    Ok((ext, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;
    use crate::diskoid::min_disk_of_roots;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    #[test]
    fn paper_remark_quartic() {
        // z^4+2z^3+4z^2+12z+12: the approximation produces a quadratic with
        // e = 2, f = 1, close to z^2 + 2 inside the radius-3/2 disk
        let k = q2();
        let f = Poly::from_ints(&k, &[12, 12, 4, 2, 1]);
        let w = ramified_approx(&k, &f).unwrap();
        assert_eq!(w.phi.degree(), 2);
        assert_eq!((w.ext.e, w.ext.f), (2, 1));
        let d = w.disk.clone().unwrap();
        assert_eq!(d.r, Val::new(3, 4));
        let sqrt_m2 = ExtField::new(&k, &Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        let m = MPhi::for_ext(&sqrt_m2);
        let d32 = Diskoid::new(sqrt_m2.clone(), m.apply(Val::new(3, 2)));
        assert!(d32.member(&w.ext));
        let m2 = MPhi::for_ext(&w.ext);
        let d32b = Diskoid::new(w.ext.clone(), m2.apply(Val::new(3, 2)));
        assert!(d32b.member(&sqrt_m2));
    }

    #[test]
    fn paper_example_quartic() {
        let k = q2();
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let w = ramified_approx(&k, &f).unwrap();
        assert_eq!(w.phi, Poly::from_ints(&k, &[2, 0, 1]));
        assert_eq!(w.j, 2);
        assert_eq!((w.ext.e, w.ext.f), (2, 1));
    }

    #[test]
    fn linear_input_trivial() {
        let k = q2();
        let f = Poly::from_ints(&k, &[-5, 1]);
        let w = ramified_approx(&k, &f).unwrap();
        assert_eq!(w.phi.degree(), 1);
        assert!(w.ext.is_trivial());
    }

    #[test]
    fn char0_center_examples() {
        let qt = Field::base(BaseField::laurent_q());
        let t = qt.from_base(&BaseField::laurent_q().t_elem());
        let f = Poly::new(&qt, vec![qt.neg(&t), qt.zero(), qt.one()]);
        let b = char0_center(&qt, &f).unwrap();
        assert!(qt.is_zero(&b));
        assert_eq!(min_pairwise_difference(&qt, &f), Val::new(1, 2));
        let a = qt.from_int(7);
        let lin = Poly::x_minus(&qt, &a);
        assert_eq!(char0_center(&qt, &lin).unwrap(), a);
        let a2 = qt.mul(&a, &a);
        let g = Poly::new(&qt, vec![qt.sub(&a2, &t), qt.mul(&qt.from_int(-2), &a), qt.one()]);
        assert_eq!(char0_center(&qt, &g).unwrap(), a);
    }

    #[test]
    fn char0_center_random_certificates() {
        let qt = Field::base(BaseField::laurent_q());
        let t = qt.from_base(&BaseField::laurent_q().t_elem());
        let mut s: u64 = 0x5EED;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut done = 0;
        while done < 50 {
            let d = (next() % 3 + 2) as usize;
            let mut cs: Vec<FElem> = (0..d)
                .map(|_| {
                    let a = (next() % 9) as i64 - 4;
                    let b = (next() % 3) as i64;
                    qt.add(&qt.from_int(a), &qt.mul(&qt.from_int(b), &t))
                })
                .collect();
            cs.push(qt.one());
            let f = Poly::new(&qt, cs);
            if f.degree() < 2 || !is_separable(&qt, &f) {
                continue;
            }
            char0_center(&qt, &f).unwrap();
            done += 1;
        }
    }

    #[test]
    fn purely_inseparable_wtr() {
        for p in [2u64, 3] {
            let k = Field::base(BaseField::laurent_fp(p));
            let t = k.from_base(&BaseField::laurent_fp(p).t_elem());
            let mut cs = vec![k.neg(&t)];
            for _ in 1..p {
                cs.push(k.zero());
            }
            cs.push(k.one());
            let f = Poly::new(&k, cs);
            let w = ramified_approx(&k, &f).unwrap();
            assert_eq!((w.ext.e, w.ext.f), (p, 1));
            assert!(is_separable(&k, &w.phi));
        }
    }

    #[test]
    fn perturbation_displacement_closed_form() {
        // displacement valuation of the roots of f + cz is
        // (v(c) + v(alpha) - v(a_q)) / q for f = z^q - t
        let k = Field::base(BaseField::laurent_fp(2));
        let t = k.from_base(&BaseField::laurent_fp(2).t_elem());
        for (q, vals) in [(2u64, vec![2i64, 4, 8]), (4, vec![2, 4, 8])] {
            for vc in vals {
                let mut cs = vec![k.neg(&t)];
                for _ in 1..q {
                    cs.push(k.zero());
                }
                cs.push(k.one());
                let f = Poly::new(&k, cs);
                let pert = {
                    let pi = k.uniformizer();
                    let c = k.pow(&pi, vc);
                    f.add(&k, &Poly::new(&k, vec![k.zero(), c]))
                };
                let expected = Val::int(vc).add(&Val::new(1, q as i64)).div_int(q as i64);
                let ext = ExtField::new(&k, &f).unwrap();
                let l = &ext.field;
                let lifted: Vec<FElem> = pert.coeffs.iter().map(|c| l.embed(c)).collect();
                let pl = Poly::new(l, lifted).translate(l, &ext.root());
                let np = pl.newton_polygon(l);
                let min_root_val = np.segments.iter().map(|(s, _)| s.neg()).max().unwrap();
                assert_eq!(min_root_val, expected, "q={} vc={}", q, vc);
            }
        }
    }

    #[test]
    fn separable_perturb_identity_on_separable() {
        let k = Field::base(BaseField::laurent_fp(2));
        let f = Poly::from_ints(&k, &[1, 1, 1]);
        assert_eq!(separable_perturb(&k, &f, Val::int(5)).unwrap(), f);
    }

    #[test]
    fn ax_refinement_examples() {
        let k = q2();
        let f = Poly::from_ints(&k, &[2, 0, 1]).mul(&k, &Poly::from_ints(&k, &[1, 1, 1]));
        let unit = Diskoid::new(ExtField::new(&k, &Poly::x(&k)).unwrap(), Val::zero());
        let w = ax_refinement(&k, &f, &unit).unwrap();
        assert!(w.ext.degree() <= 4);
        assert_eq!(w.ext.f, 1);
        let g = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let dmin = min_disk_of_roots(&k, &g).unwrap();
        let w2 = ax_refinement(&k, &g, &dmin).unwrap();
        assert_eq!(w2.ext.degree(), 2);
        // cubic over Q_2: q = 1 forces a rational point
        let c = Poly::from_ints(&k, &[1, 1, 0, 1]);
        let wide = Diskoid::new(ExtField::new(&k, &Poly::x(&k)).unwrap(), Val::zero());
        let w3 = ax_refinement(&k, &c, &wide).unwrap();
        assert_eq!(w3.ext.degree(), 1);
    }

    #[test]
    fn equispaced_unramified_quartic() {
        let k = q2();
        // the 5th cyclotomic polynomial: unramified quartic, all root
        // differences at valuation 0, so a rational center exists
        let f = Poly::from_ints(&k, &[1, 1, 1, 1, 1]);
        let (ext, r) = equispaced_quartic(&k, &f).unwrap();
        assert_eq!(r, Val::zero());
        assert!(ext.degree() <= 2);
        assert!(r.mul_int(ext.e.max(1) as i64).in_group(1));
    }

    #[test]
    fn equispaced_rejects_unequal() {
        let k = q2();
        // an Eisenstein quartic has differences at two levels (3/4 and 5/4)
        let f = Poly::from_ints(&k, &[-2, 0, 0, 0, 1]);
        assert!(matches!(equispaced_quartic(&k, &f), Err(MclError::NotEquispaced)));
        // distinct rational roots at mixed distances
        let g = Poly::from_ints(&k, &[0, 1])
            .mul(&k, &Poly::from_ints(&k, &[-1, 1]))
            .mul(&k, &Poly::from_ints(&k, &[-2, 1]))
            .mul(&k, &Poly::from_ints(&k, &[-4, 1]));
        assert!(matches!(equispaced_quartic(&k, &g), Err(MclError::NotEquispaced)));
    }
}
