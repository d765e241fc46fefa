//! Diskoids D(phi, s): Galois orbits of disks, the piecewise-affine pairing
//! between per-disk radius and diskoid parameter, infimum valuations, and
//! branch multiplicities.

use crate::errors::{MclError, Result};
use crate::extfield::ExtField;
use crate::field::Field;
use crate::maclane::IndVal;
use crate::poly::Poly;
use crate::respoly::{p_free_part, separable_degree, ResPoly};
use crate::val::Val;

/// Valuations v(a - a_i) from a fixed root a of phi to the other roots,
/// listed with multiplicity (deg phi - 1 entries; repeated roots contribute
/// infinite entries). Computed from the Newton polygon of phi(z + alpha)
/// over the extension defined by phi.
pub fn root_difference_valuations(ext: &ExtField) -> Vec<Val> {
    let h = ext.defining();
    let l = &ext.field;
    assert!(h.degree() >= 2, "need at least two roots");
    let base = ext.base();
    // lift h into L[z] and translate by the distinguished root
    let coeffs = h.coeffs.iter().map(|c| lift_into(&base, l, c)).collect();
    let hl = Poly::new(l, coeffs);
    let shifted = hl.translate(l, &ext.root());
    let np = shifted.newton_polygon(l);
    let mut out = vec![];
    // the root itself contributes z_mult; extra z-powers are infinite diffs
    assert!(np.z_mult >= 1, "the distinguished root must vanish exactly");
    for _ in 1..np.z_mult {
        out.push(Val::Infinity);
    }
    for (slope, len) in &np.segments {
        for _ in 0..*len {
            out.push(slope.neg());
        }
    }
    assert_eq!(out.len() as i64, h.degree() - 1);
    out.sort();
    out
}

fn lift_into(base: &Field, l: &Field, c: &crate::field::FElem) -> crate::field::FElem {
    if l == base {
        c.clone()
    } else {
        l.embed(c)
    }
}

/// The strictly increasing piecewise-affine function M(r) = r + sum min(r, d_i)
/// pairing per-disk radius r with the diskoid parameter s.
#[derive(Clone, Debug)]
pub struct MPhi {
    /// Sorted root-difference valuations (infinite entries allowed).
    pub diffs: Vec<Val>,
}

impl MPhi {
    pub fn for_ext(ext: &ExtField) -> MPhi {
        if ext.defining().degree() < 2 {
            return MPhi { diffs: vec![] }
        }
        MPhi { diffs: root_difference_valuations(ext) }
    }

    pub fn apply(&self, r: Val) -> Val {
        if r == Val::Infinity {
            return Val::Infinity;
        }
        let mut s = r;
        for d in &self.diffs {
            s = s.add(&Val::min(r, *d));
        }
        s
    }

    /// Exact inverse of the piecewise-affine map.
    pub fn invert(&self, s: Val) -> Val {
        if s == Val::Infinity {
            return Val::Infinity;
        }
        // breakpoints at the finite difference values
        let mut bps: Vec<Val> = self.diffs.iter().copied().filter(|d| d.is_finite()).collect();
        bps.dedup();
        // slope below the first breakpoint counts every difference
        let mut lo: Option<Val> = None; // last breakpoint at or below the solution
        for b in &bps {
            if self.apply(*b) <= s {
                lo = Some(*b);
            } else {
                break;
            }
        }
        match lo {
            None => {
                // segment before the first breakpoint: slope = 1 + #diffs
                let slope = 1 + self.diffs.len() as i64;
                let anchor = bps.first().copied();
                match anchor {
                    None => s, // linear M(r) = r
                    Some(b) => {
                        let fb = self.apply(b);
                        b.sub(&fb.sub(&s).div_int(slope))
                    }
                }
            }
            Some(b) => {
                let fb = self.apply(b);
                if fb == s {
                    return b;
                }
                // slope above b: 1 + #{d > b}
                let slope = 1 + self.diffs.iter().filter(|d| **d > b).count() as i64;
                b.add(&s.sub(&fb).div_int(slope))
            }
        }
    }
}

/// A diskoid D(phi, s) with its derived per-disk radius and disk count.
#[derive(Clone, Debug)]
pub struct Diskoid {
    pub ext: ExtField,
    pub s: Val,
    /// Per-disk radius with M_phi(r) = s.
    pub r: Val,
    /// Number of disks in the Galois orbit.
    pub disks: u64,
}

impl Diskoid {
    pub fn new(ext: ExtField, s: Val) -> Diskoid {
        let m = MPhi::for_ext(&ext);
        let r = m.invert(s);
        debug_assert_eq!(m.apply(r), s);
        let deg = ext.defining().degree().max(1) as u64;
        let per_disk = 1 + m.diffs.iter().filter(|d| **d >= r).count() as u64;
        assert!(deg % per_disk == 0, "disk orbit size must divide the degree");
        Diskoid { ext, s, r, disks: deg / per_disk }
    }

    pub fn phi(&self) -> Poly {
        self.ext.defining()
    }

    /// Do all roots of (the certified) h lie in this diskoid?
    pub fn member(&self, h: &ExtField) -> bool {
        h.valuation_of(&self.phi()) >= self.s
    }

    /// The infimum valuation on the diskoid, evaluated at g: build the
    /// inductive representation of V_{phi, s} along the approximant chain of
    /// phi and evaluate.
    pub fn valuation(&self, g: &Poly) -> Result<Val> {
        if !self.s.is_finite() {
            return Err(MclError::InfiniteValue);
        }
        let v = self.inductive_representation()?;
        Ok(v.evaluate(g))
    }

    /// An inductive valuation representing the infimum on D(phi, s).
    pub fn inductive_representation(&self) -> Result<IndVal> {
        let base = self.ext.base();
        let phi = self.phi();
        if phi.degree() == 1 {
            let a = base.neg(&phi.coeff_in(&base, 0));
            return IndVal::first(&base, &a, self.s);
        }
        let chain = match self.ext.chain() {
            Some(c) => c.clone(),
            None => IndVal::approximants(&base, &phi)?,
        };
        // walk the chain: find the deepest stage whose own disk still
        // contains ours, then augment its successor key at the right value
        let r = self.r;
        let n = chain.len();
        let mut j = 0usize; // stages 1..=j have per-disk radius <= r
        for i in 1..n {
            let st = &chain.stages[i - 1];
            let ri = if st.phi.degree() == 1 {
                st.mu
            } else {
                let sub = ExtField::from_chain(
                    &base,
                    chain.prefix(i - 1).augment(&st.phi, Val::Infinity)?,
                );
                MPhi::for_ext(&sub).invert(st.mu)
            };
            if ri <= r {
                j = i;
            } else {
                break;
            }
        }
        // the next key after stage j (or the first key for j = 0)
        if j == n {
            unreachable!("terminal stage has infinite radius");
        }
        let next_key = chain.stages[j].phi.clone();
        let u = if next_key.degree() == 1 {
            r
        } else {
            let sub =
                ExtField::from_chain(&base, chain.prefix(j).augment(&next_key, Val::Infinity)?);
            MPhi::for_ext(&sub).apply(r)
        };
        if j == 0 {
            let a = base.neg(&next_key.coeff_in(&base, 0));
            IndVal::first(&base, &a, u)
        } else {
            chain.prefix(j).augment(&next_key, u)
        }
    }
}

/// The minimal single disk containing all roots of f, expressed as a diskoid
/// about the ramified-approximation key.
pub fn min_disk_of_roots(base: &Field, f: &Poly) -> Result<Diskoid> {
    let f_ext = ExtField::new(base, f)?;
    if f.degree() < 2 {
        return Err(MclError::Usage("minimal disks need at least two roots".into()));
    }
    let diffs = root_difference_valuations(&f_ext);
    let r = *diffs.first().expect("nonempty difference multiset");
    if r == Val::Infinity {
        return Err(MclError::PurelyInseparableLocal);
    }
    let center = if base.residue_char() == 0 {
        let b = crate::wtr::char0_center(base, f)?;
        ExtField::new(base, &Poly::x_minus(base, &b))?
    } else {
        crate::wtr::ramified_approx(base, f)?.ext
    };
    let m = MPhi::for_ext(&center);
    let s = m.apply(r);
    let d = Diskoid::new(center, s);
    assert_eq!(d.disks, 1, "the minimal disk about all roots is a single disk");
    assert_eq!(d.r, r);
    // the input's roots really lie in the disk
    assert!(d.member(&f_ext), "minimal-disk membership certificate");
    Ok(d)
}

/// Branch multiplicity at the type II point of V toward the direction of the
/// monic irreducible residual psi (psi distinct from the residual variable):
/// deg_sep(psi) * deg_sep(eta) * tau^(p), with the eta data read off from the
/// subdisk combinatorics of the stage key.
pub fn branch_multiplicity(v: &IndVal, psi: &ResPoly) -> Result<u64> {
    let st = v.last();
    if st.mu == Val::Infinity {
        return Err(MclError::InfiniteValue);
    }
    if psi.degree() < 1 || !psi.is_monic() {
        return Err(MclError::Usage("directions are monic irreducible residuals".into()));
    }
    if psi.degree() == 1 && psi.field.is_zero(&psi.coeff(0)) {
        return Err(MclError::Usage("the residual variable is not a transverse direction".into()));
    }
    let p = v.field.residue_char();
    let ds_psi = separable_degree(psi);
    let phi = st.phi.clone();
    let eta_sep = if phi.degree() == 1 {
        1
    } else {
        let n = v.len();
        let sub = ExtField::from_chain(&v.field, v.prefix(n - 1).augment(&phi, Val::Infinity)?);
        let m = MPhi::for_ext(&sub);
        let r = m.invert(st.mu);
        let in_disk = 1 + m.diffs.iter().filter(|d| **d >= r).count() as u64;
        let in_subdisk = 1 + m.diffs.iter().filter(|d| **d > r).count() as u64;
        assert!(in_disk % in_subdisk == 0, "subdisk orbit size divides");
        in_disk / in_subdisk
    };
    let taup = if p == 0 {
        assert!(st.tau == 1, "tame infinite directions only in residue characteristic 0");
        1
    } else {
        p_free_part(st.tau as u64, p)
    };
    Ok(ds_psi * eta_sep * taup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;
    use crate::field::FElem;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    #[test]
    fn diffs_of_ramified_quadratic() {
        let k = q2();
        let ext = ExtField::new(&k, &Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        // roots +-sqrt(-2) differ by 2 sqrt(-2): valuation 3/2
        assert_eq!(root_difference_valuations(&ext), vec![Val::new(3, 2)]);
    }

    #[test]
    fn diffs_of_unramified_quadratic() {
        let k = q2();
        let ext = ExtField::new(&k, &Poly::from_ints(&k, &[1, 1, 1])).unwrap();
        assert_eq!(root_difference_valuations(&ext), vec![Val::zero()]);
    }

    #[test]
    fn diffs_oracle_difference_resultant() {
        // all-pairs multiset from Res_x(f(x), f(x+z)) equals deg f copies of
        // the per-root multiset
        let k = q2();
        for cs in [[2i64, 0, 1], [1, 1, 1], [6, 2, 1]] {
            let f = Poly::from_ints(&k, &cs);
            let ext = ExtField::new(&k, &f).unwrap();
            let per_root = root_difference_valuations(&ext);
            let all_pairs = difference_resultant_valuations(&k, &f);
            let deg = f.degree() as usize;
            assert_eq!(all_pairs.len(), per_root.len() * deg);
            // each per-root value appears deg-many times
            for v in &per_root {
                let c1 = per_root.iter().filter(|x| *x == v).count();
                let c2 = all_pairs.iter().filter(|x| *x == v).count();
                assert_eq!(c2, c1 * deg);
            }
        }
    }

    /// Independent oracle: valuations of all pairwise root differences from
    /// the Newton polygon of Res_x(f(x), f(x+z)) / z^deg over the base field.
    pub fn difference_resultant_valuations(k: &Field, f: &Poly) -> Vec<Val> {
        let n = (f.degree() * f.degree()) as usize;
        let mut xs = vec![];
        let mut ys = vec![];
        let mut i = 0i64;
        while xs.len() <= n {
            let zi = k.from_int(i);
            i += 1;
            let shifted = f.translate(k, &zi);
            let r = f.resultant(k, &shifted);
            xs.push(zi);
            ys.push(r);
        }
        // interpolate Res_x(f(x), f(x+z)) in z
        let mut acc = Poly::zero();
        for a in 0..xs.len() {
            let mut num = Poly::constant(k.one());
            let mut den = k.one();
            for b in 0..xs.len() {
                if a == b {
                    continue;
                }
                num = num.mul(k, &Poly::x_minus(k, &xs[b]));
                den = k.mul(&den, &k.sub(&xs[a], &xs[b]));
            }
            let c = k.div(&ys[a], &den);
            acc = acc.add(k, &num.scale(k, &c));
        }
        let np = acc.newton_polygon(k);
        let mut out = vec![];
        for _ in f.degree() as u64..np.z_mult {
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

    #[test]
    fn m_phi_paper_example() {
        let k = q2();
        let ext = ExtField::new(&k, &Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        let m = MPhi::for_ext(&ext);
        // M(r) = r + min(r, 3/2)
        assert_eq!(m.apply(Val::new(3, 2)), Val::int(3));
        assert_eq!(m.invert(Val::int(3)), Val::new(3, 2));
        assert_eq!(m.invert(Val::int(4)), Val::new(5, 2));
        // bijectivity on a sample of rationals
        for i in -6..10 {
            let r = Val::new(i, 4);
            assert_eq!(m.invert(m.apply(r)), r);
        }
    }

    #[test]
    fn min_disk_paper_examples() {
        let k = q2();
        // z^4 + 20z^2 + 292: minimal disk is D(z^2+2, 3)
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let d = min_disk_of_roots(&k, &f).unwrap();
        assert_eq!(d.phi(), Poly::from_ints(&k, &[2, 0, 1]));
        assert_eq!(d.s, Val::int(3));
        assert_eq!(d.r, Val::new(3, 2));
        assert_eq!(d.disks, 1);
        // z^4+2z^3+4z^2+12z+12: minimal disk radius 3/4
        let g = Poly::from_ints(&k, &[12, 12, 4, 2, 1]);
        let d2 = min_disk_of_roots(&k, &g).unwrap();
        assert_eq!(d2.r, Val::new(3, 4));
        // the quadratic key z^2+2 lies inside the quartic's minimal disk
        let alpha = ExtField::new(&k, &Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        assert!(d2.member(&alpha));
    }

    #[test]
    fn min_disk_unramified_radius_zero() {
        let k = q2();
        let f = Poly::from_ints(&k, &[1, 1, 1]);
        let d = min_disk_of_roots(&k, &f).unwrap();
        assert_eq!(d.r, Val::zero());
    }

    #[test]
    fn membership_examples() {
        let k = q2();
        let phi = Poly::from_ints(&k, &[2, 0, 1]);
        let ext = ExtField::new(&k, &phi).unwrap();
        let d4 = Diskoid::new(ext.clone(), Val::int(4));
        // own roots: v = infinity >= 4
        assert!(d4.member(&ext));
        // 0 is not in D(z^2+2, 4): v(phi(0)) = 1
        let zero_ext = ExtField::new(&k, &Poly::x(&k)).unwrap();
        assert!(!d4.member(&zero_ext));
    }

    #[test]
    fn diskoid_valuation_examples() {
        let k = q2();
        let phi = Poly::from_ints(&k, &[2, 0, 1]);
        let ext = ExtField::new(&k, &phi).unwrap();
        let d = Diskoid::new(ext, Val::int(4));
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        assert_eq!(d.valuation(&f).unwrap(), Val::int(8));
        // V_{phi,s}(phi) = s
        assert_eq!(d.valuation(&phi).unwrap(), Val::int(4));
        // Gauss-type valuation on the unit disk
        let z = ExtField::new(&k, &Poly::x(&k)).unwrap();
        let g = Diskoid::new(z, Val::int(1));
        assert_eq!(g.valuation(&Poly::from_ints(&k, &[0, 0, 1])).unwrap(), Val::int(2));
    }

    #[test]
    fn nested_diskoids_along_chains() {
        let k = q2();
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let chain = IndVal::approximants(&k, &f).unwrap();
        // s = mu_i * deg(phi_{i+1}) / deg(phi_i) < mu_{i+1}
        for w in chain.stages.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.mu == Val::Infinity || b.mu == Val::Infinity {
                continue;
            }
            let s = a.mu.mul_int(b.phi.degree()).div_int(a.phi.degree());
            assert!(s < b.mu);
        }
        // membership: the deeper stage key's roots lie in the shallower diskoid
        let st1 = &chain.stages[0];
        let d1 = Diskoid::new(
            ExtField::new(&k, &st1.phi).unwrap_or_else(|_| panic!()),
            st1.mu,
        );
        let phi2 = chain.stages[1].phi.clone();
        let e2 = ExtField::new(&k, &phi2).unwrap();
        assert!(d1.member(&e2));
    }

    #[test]
    fn branch_multiplicity_paper_case() {
        let k = q2();
        // V2 for z^4+20z^2+292, direction = residual of f (y^2+y+1): m = 2
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let chain = IndVal::approximants(&k, &f).unwrap();
        let v2 = chain.prefix(2);
        let r = v2.residual_polynomial(&f).unwrap();
        let (strip, h) = IndVal::strip_x(&r);
        assert_eq!(strip, 0);
        let psi = h.monic();
        assert_eq!(psi.degree(), 2);
        assert_eq!(branch_multiplicity(&v2, &psi).unwrap(), 2);
    }

    #[test]
    fn branch_multiplicity_tau_erased() {
        let k = q2();
        // V1 = [ord2, V(z) = 1/2]: tau = 2, p = 2, so the tau factor is erased
        let v1 = IndVal::first(&k, &k.zero(), Val::new(1, 2)).unwrap();
        let r = v1.residual_polynomial(&Poly::from_ints(&k, &[2, 0, 1])).unwrap();
        let psi = r.monic();
        assert_eq!(branch_multiplicity(&v1, &psi).unwrap(), 1);
    }
}
