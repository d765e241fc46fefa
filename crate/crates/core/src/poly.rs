//! Dense univariate polynomials over a valued field, with the operations the
//! valuation machinery needs: phi-adic expansion, resultants, Newton polygons.

use crate::errors::{MclError, Result};
use crate::field::{FElem, Field};
use crate::val::Val;

/// Polynomial in z. Invariant: no trailing zeros (empty = zero polynomial).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub coeffs: Vec<FElem>,
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<FElem>) -> Poly {
        while coeffs.last().map_or(false, |c| field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: FElem) -> Poly {
        Poly { coeffs: vec![c] }
    }

    pub fn x(field: &Field) -> Poly {
        Poly { coeffs: vec![field.zero(), field.one()] }
    }

    pub fn x_minus(field: &Field, a: &FElem) -> Poly {
        Poly { coeffs: vec![field.neg(a), field.one()] }
    }

    pub fn from_ints(field: &Field, cs: &[i64]) -> Poly {
        Poly::new(field, cs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    /// Coefficient that must be present; use `coeff_in` for zero-filled access.
    pub fn coeff(&self, i: usize) -> FElem {
        self.coeffs[i].clone()
    }

    /// Coefficient with an explicit field for a correct zero.
    pub fn coeff_in(&self, field: &Field, i: usize) -> FElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| field.zero())
    }

    pub fn lc(&self) -> FElem {
        self.coeffs.last().cloned().expect("leading coefficient of zero")
    }

    pub fn is_monic(&self, field: &Field) -> bool {
        !self.is_zero() && field.is_zero(&field.sub(&self.lc(), &field.one()))
    }

    pub fn add(&self, field: &Field, other: &Poly) -> Poly {
        let mut out = vec![field.zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = c.clone();
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = field.add(&out[i], c);
        }
        Poly::new(field, out)
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| field.neg(c)).collect() }
    }

    pub fn sub(&self, field: &Field, other: &Poly) -> Poly {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &Field, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if field.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = field.mul(a, b);
                out[i + j] = field.add(&out[i + j], &t);
            }
        }
        Poly::new(field, out)
    }

    pub fn scale(&self, field: &Field, k: &FElem) -> Poly {
        Poly::new(field, self.coeffs.iter().map(|c| field.mul(c, k)).collect())
    }

    pub fn monic(&self, field: &Field) -> Poly {
        self.scale(field, &field.inv(&self.lc()))
    }

    pub fn pow(&self, field: &Field, mut n: u64) -> Poly {
        let mut acc = Poly::constant(field.one());
        let mut sq = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(field, &sq);
            }
            sq = sq.mul(field, &sq);
            n >>= 1;
        }
        acc
    }

    pub fn divmod(&self, field: &Field, other: &Poly) -> (Poly, Poly) {
        assert!(!other.is_zero(), "division by the zero polynomial");
        if self.degree() < other.degree() {
            return (Poly::zero(), self.clone());
        }
        let inv_lead = field.inv(&other.lc());
        let n = other.coeffs.len();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![field.zero(); rem.len() - n + 1];
        for k in (0..quot.len()).rev() {
            let c = field.mul(&rem[k + n - 1], &inv_lead);
            if !field.is_zero(&c) {
                for (i, b) in other.coeffs.iter().enumerate() {
                    let t = field.mul(&c, b);
                    rem[k + i] = field.sub(&rem[k + i], &t);
                }
            }
            quot[k] = c;
        }
        rem.truncate(n - 1);
        (Poly::new(field, quot), Poly::new(field, rem))
    }

    pub fn try_divmod(&self, field: &Field, other: &Poly) -> Result<(Poly, Poly)> {
        if other.is_zero() {
            return Err(MclError::DivisionByZeroPoly);
        }
        Ok(self.divmod(field, other))
    }

    pub fn rem(&self, field: &Field, other: &Poly) -> Poly {
        self.divmod(field, other).1
    }

    pub fn div_exact(&self, field: &Field, other: &Poly) -> Poly {
        let (q, r) = self.divmod(field, other);
        assert!(r.is_zero(), "non-exact polynomial division");
        q
    }

    pub fn gcd(&self, field: &Field, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(field, &b);
            a = b;
            b = r;
        }
        if !a.is_zero() {
            a = a.monic(field);
        }
        a
    }

    pub fn derivative(&self, field: &Field) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(field.mul(c, &field.from_int(i as i64)));
        }
        Poly::new(field, out)
    }

    pub fn eval(&self, field: &Field, x: &FElem) -> FElem {
        let mut acc = field.zero();
        for c in self.coeffs.iter().rev() {
            acc = field.mul(&acc, x);
            acc = field.add(&acc, c);
        }
        acc
    }

    /// f(g(z)).
    pub fn compose(&self, field: &Field, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(field, g);
            acc = acc.add(field, &Poly::constant(c.clone()));
        }
        acc
    }

    /// f(z + a).
    pub fn translate(&self, field: &Field, a: &FElem) -> Poly {
        self.compose(field, &Poly::new(field, vec![a.clone(), field.one()]))
    }

    /// f(u z).
    pub fn scale_var(&self, field: &Field, u: &FElem) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut upow = field.one();
        for c in self.coeffs.iter() {
            out.push(field.mul(c, &upow));
            upow = field.mul(&upow, u);
        }
        Poly::new(field, out)
    }

    /// The unique expansion f = sum c_m phi^m with deg c_m < deg phi.
    pub fn phi_expansion(&self, field: &Field, phi: &Poly) -> Vec<Poly> {
        assert!(phi.is_monic(field) && phi.degree() >= 1, "expansion base must be monic nonconstant");
        let mut out = vec![];
        let mut rest = self.clone();
        if rest.is_zero() {
            return vec![Poly::zero()];
        }
        while !rest.is_zero() {
            let (q, r) = rest.divmod(field, phi);
            out.push(r);
            rest = q;
        }
        out
    }

    /// Resultant of self and other via a polynomial remainder sequence over
    /// the (fraction) field. Res(f, 1) = 1, Res with a zero polynomial is 0
    /// when the other has positive degree.
    pub fn resultant(&self, field: &Field, other: &Poly) -> FElem {
        let (f, g) = (self, other);
        if f.is_zero() || g.is_zero() {
            return field.zero();
        }
        if f.degree() == 0 && g.degree() == 0 {
            return field.one();
        }
        let mut a = f.clone();
        let mut b = g.clone();
        let mut acc = field.one();
        let mut negate = false;
        if a.degree() < b.degree() {
            if (a.degree() * b.degree()) % 2 == 1 {
                negate = !negate;
            }
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            if b.degree() == 0 {
                acc = field.mul(&acc, &field.pow(&b.lc(), a.degree()));
                break;
            }
            let r = a.rem(field, &b);
            if r.is_zero() {
                return field.zero();
            }
            // Res(a,b) = (-1)^(deg a * deg b) * lc(b)^(deg a - deg r) * Res(b, r)
            if (a.degree() * b.degree()) % 2 == 1 {
                negate = !negate;
            }
            acc = field.mul(&acc, &field.pow(&b.lc(), a.degree() - r.degree()));
            a = b;
            b = r;
        }
        if negate {
            field.neg(&acc)
        } else {
            acc
        }
    }

    pub fn discriminant(&self, field: &Field) -> FElem {
        let d = self.degree();
        assert!(d >= 1);
        let res = self.resultant(field, &self.derivative(field));
        let lc_inv = field.inv(&self.lc());
        let mut r = field.mul(&res, &lc_inv);
        // sign (-1)^(d(d-1)/2)
        if (d * (d - 1) / 2) % 2 == 1 {
            r = field.neg(&r);
        }
        r
    }

    pub fn newton_polygon(&self, field: &Field) -> NewtonPolygon {
        assert!(!self.is_zero(), "Newton polygon of zero");
        let pts: Vec<(i64, Val)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !field.is_zero(c))
            .map(|(j, c)| (j as i64, field.valuation(c)))
            .collect();
        let z_mult = pts.first().map(|(j, _)| *j).unwrap_or(0) as u64;
        NewtonPolygon::from_points(z_mult, &pts)
    }
}

/// Resultant in the eliminated variable x of two polynomials whose x-
/// coefficients are themselves polynomials over the field (in a second
/// variable): Sylvester determinant via fraction-free Bareiss elimination,
/// so no rational-function arithmetic is needed.
pub fn resultant_bivariate(field: &Field, a: &[Poly], b: &[Poly]) -> Poly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while a.last().map_or(false, |p| p.is_zero()) {
        a.pop();
    }
    while b.last().map_or(false, |p| p.is_zero()) {
        b.pop();
    }
    if a.is_empty() || b.is_empty() {
        return Poly::zero();
    }
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 && n == 0 {
        return Poly::constant(field.one());
    }
    if m == 0 {
        return a[0].pow(field, n as u64);
    }
    if n == 0 {
        return b[0].pow(field, m as u64);
    }
    let size = m + n;
    let zero = Poly::zero();
    let mut mat = vec![vec![zero.clone(); size]; size];
    for row in 0..n {
        for (i, c) in a.iter().enumerate() {
            mat[row][row + m - i] = c.clone();
        }
    }
    for row in 0..m {
        for (i, c) in b.iter().enumerate() {
            mat[n + row][row + n - i] = c.clone();
        }
    }
    let mut sign = false;
    let mut prev = Poly::constant(field.one());
    for col in 0..size {
        let mut piv = None;
        for r in col..size {
            if !mat[r][col].is_zero() {
                piv = Some(r);
                break;
            }
        }
        let Some(piv) = piv else { return Poly::zero() };
        if piv != col {
            mat.swap(piv, col);
            sign = !sign;
        }
        for r in col + 1..size {
            for c2 in col + 1..size {
                let t1 = mat[col][col].mul(field, &mat[r][c2]);
                let t2 = mat[r][col].mul(field, &mat[col][c2]);
                mat[r][c2] = t1.sub(field, &t2).div_exact(field, &prev);
            }
            mat[r][col] = Poly::zero();
        }
        prev = mat[col][col].clone();
        if prev.is_zero() {
            return Poly::zero();
        }
    }
    let det = mat[size - 1][size - 1].clone();
    if sign {
        det.neg(field)
    } else {
        det
    }
}

/// Binomial coefficient as a field element.
pub fn binom_elem(field: &Field, m: usize, k: usize) -> FElem {
    let mut c: i128 = 1;
    for i in 0..k {
        c = c * (m - i) as i128 / (i + 1) as i128;
    }
    field.from_int(c as i64)
}

/// The lower convex hull of (index, coefficient valuation), as segments of
/// strictly increasing slope, plus the z-adic multiplicity handled separately
/// (coefficients below the first nonzero index contribute no point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Multiplicity of z dividing the polynomial (the "infinite slope" part).
    pub z_mult: u64,
    /// Hull vertices (j, v(c_j)), left to right.
    pub vertices: Vec<(i64, Val)>,
    /// (slope, horizontal length), slopes strictly increasing.
    pub segments: Vec<(Val, u64)>,
}

impl NewtonPolygon {
    fn from_points(z_mult: u64, pts: &[(i64, Val)]) -> NewtonPolygon {
        // monotone chain lower hull; points already sorted by j
        let mut hull: Vec<(i64, Val)> = vec![];
        for &(j, v) in pts {
            while hull.len() >= 2 {
                let (j1, v1) = hull[hull.len() - 2];
                let (j2, v2) = hull[hull.len() - 1];
                // keep if (j2,v2) is strictly below the segment (j1,v1)-(j,v):
                // cross product (j2-j1)*(v-v1) - (j-j1)*(v2-v1) > 0 keeps j2
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
        let mut segments = vec![];
        for w in hull.windows(2) {
            let (j1, v1) = w[0];
            let (j2, v2) = w[1];
            let slope = v2.sub(&v1).div_int(j2 - j1);
            segments.push((slope, (j2 - j1) as u64));
        }
        NewtonPolygon { z_mult, vertices: hull, segments }
    }

    /// Root valuations with multiplicity: negated slopes, lengths as counts,
    /// excluding the z_mult roots at valuation infinity.
    pub fn root_valuations(&self) -> Vec<(Val, u64)> {
        self.segments.iter().map(|(s, l)| (s.neg(), *l)).collect()
    }

    pub fn single_slope(&self) -> Option<Val> {
        if self.segments.len() == 1 {
            Some(self.segments[0].0)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basefield::BaseField;

    fn q2() -> Field {
        Field::base(BaseField::padic(2))
    }

    #[test]
    fn arith_examples() {
        let k = q2();
        let f = Poly::from_ints(&k, &[2, 0, 1]); // z^2 + 2
        let sq = f.mul(&k, &f);
        assert_eq!(sq, Poly::from_ints(&k, &[4, 0, 4, 0, 1]));
        let t = Poly::from_ints(&k, &[0, 0, 1]).translate(&k, &k.one());
        assert_eq!(t, Poly::from_ints(&k, &[1, 2, 1]));
    }

    #[test]
    fn divmod_remultiplies() {
        let k = q2();
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let g = Poly::from_ints(&k, &[2, 0, 1]);
        let (q, r) = f.divmod(&k, &g);
        let back = q.mul(&k, &g).add(&k, &r);
        assert_eq!(back, f);
        assert!(r.degree() < g.degree());
    }

    #[test]
    fn phi_expansion_paper_example() {
        let k = q2();
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let phi = Poly::from_ints(&k, &[2, 0, 1]);
        let cs = f.phi_expansion(&k, &phi);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], Poly::from_ints(&k, &[256]));
        assert_eq!(cs[1], Poly::from_ints(&k, &[16]));
        assert_eq!(cs[2], Poly::from_ints(&k, &[1]));
        // round trip
        let mut acc = Poly::zero();
        for (m, c) in cs.iter().enumerate() {
            acc = acc.add(&k, &c.mul(&k, &phi.pow(&k, m as u64)));
        }
        assert_eq!(acc, f);
    }

    #[test]
    fn resultant_examples() {
        let k = q2();
        let f = Poly::from_ints(&k, &[2, 0, 1]);
        let z = Poly::x(&k);
        assert_eq!(f.resultant(&k, &z), k.from_int(2));
        // Res(z - a, g) = g(a)
        let a = k.from_int(3);
        let lin = Poly::x_minus(&k, &a);
        let g = Poly::from_ints(&k, &[1, 2, 7]);
        assert_eq!(lin.resultant(&k, &g), g.eval(&k, &a));
        // Res(f, 1) = 1
        assert_eq!(f.resultant(&k, &Poly::constant(k.one())), k.one());
    }

    #[test]
    fn resultant_sign_law_and_sylvester() {
        let k = q2();
        let mut s: u64 = 7;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        for _ in 0..40 {
            let df = (next() % 4 + 1) as usize;
            let dg = (next() % 4 + 1) as usize;
            let f = Poly::new(
                &k,
                (0..=df).map(|i| k.from_int(if i == df { 1 + (next() % 3) as i64 } else { (next() % 11) as i64 - 5 })).collect(),
            );
            let g = Poly::new(
                &k,
                (0..=dg).map(|i| k.from_int(if i == dg { 1 + (next() % 3) as i64 } else { (next() % 11) as i64 - 5 })).collect(),
            );
            if f.degree() < 1 || g.degree() < 1 {
                continue;
            }
            let rfg = f.resultant(&k, &g);
            let rgf = g.resultant(&k, &f);
            let sign = if (f.degree() * g.degree()) % 2 == 1 { -1 } else { 1 };
            assert_eq!(rfg, k.mul(&rgf, &k.from_int(sign)));
            // Sylvester determinant oracle
            let syl = sylvester_det(&k, &f, &g);
            assert_eq!(rfg, syl);
        }
    }

    /// Sylvester matrix determinant, used as an independent oracle.
    pub fn sylvester_det(field: &Field, f: &Poly, g: &Poly) -> FElem {
        let m = f.degree() as usize;
        let n = g.degree() as usize;
        let size = m + n;
        let mut mat = vec![vec![field.zero(); size]; size];
        for row in 0..n {
            for (i, c) in f.coeffs.iter().enumerate() {
                mat[row][row + m - i] = c.clone();
            }
        }
        for row in 0..m {
            for (i, c) in g.coeffs.iter().enumerate() {
                mat[n + row][row + n - i] = c.clone();
            }
        }
        // Gaussian elimination with exact division
        let mut det = field.one();
        let mut mat = mat;
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
                for c2 in col..size {
                    let t = field.mul(&fac, &mat[col][c2]);
                    mat[r][c2] = field.sub(&mat[r][c2], &t);
                }
            }
        }
        det
    }

    #[test]
    fn newton_polygon_paper_examples() {
        let k = q2();
        // z^4 + 20 z^2 + 292: single slope -1/2, length 4
        let f = Poly::from_ints(&k, &[292, 0, 20, 0, 1]);
        let np = f.newton_polygon(&k);
        assert_eq!(np.segments, vec![(Val::new(-1, 2), 4)]);
        // z^4+2z^3+4z^2+12z+12: hull of (0,2),(1,2),(2,2),(3,1),(4,0) -> single slope -1/2
        let g = Poly::from_ints(&k, &[12, 12, 4, 2, 1]);
        let np = g.newton_polygon(&k);
        assert_eq!(np.segments, vec![(Val::new(-1, 2), 4)]);
        // z - 4: slope -2
        let h = Poly::from_ints(&k, &[-4, 1]);
        assert_eq!(h.newton_polygon(&k).segments, vec![(Val::int(-2), 1)]);
    }

    #[test]
    fn newton_polygon_slope_sum() {
        // sum of (negated slope * length) = v(c_0) for monic f with c_0 != 0
        let k = q2();
        let mut s: u64 = 99;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        for _ in 0..50 {
            let d = (next() % 5 + 1) as usize;
            let mut cs: Vec<i64> = (0..d).map(|_| (next() % 64) as i64 + 1).collect();
            cs.push(1);
            let f = Poly::from_ints(&k, &cs);
            let np = f.newton_polygon(&k);
            let mut total = Val::zero();
            for (slope, len) in &np.segments {
                total = total.add(&slope.neg().mul_int(*len as i64));
            }
            assert_eq!(total, k.valuation(&f.coeff_in(&k, 0)));
        }
    }
}
