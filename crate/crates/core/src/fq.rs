//! Small finite fields F_{p^f} with an explicit modulus, and dense
//! polynomial arithmetic over F_p used to represent their elements.
//!
//! The modulus of F_{p^f} is always the lexicographically least monic
//! irreducible of degree f over F_p, so equal fields compare equal and
//! golden outputs are stable.

use std::fmt;
use std::sync::Arc;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn invmod(a: u64, p: u64) -> u64 {
    // extended Euclid; p prime, a != 0 mod p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not invertible");
    (t.rem_euclid(p as i128)) as u64
}

/// Dense polynomial over F_p; invariant: no trailing zeros (empty = zero).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpPoly {
    pub p: u64,
    pub coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> FpPoly {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        let mut f = FpPoly { p, coeffs };
        f.trim();
        f
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn zero(p: u64) -> FpPoly {
        FpPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> FpPoly {
        FpPoly { p, coeffs: vec![1] }
    }

    pub fn constant(p: u64, c: u64) -> FpPoly {
        FpPoly::new(p, vec![c])
    }

    pub fn x(p: u64) -> FpPoly {
        FpPoly { p, coeffs: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports -1.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn lc(&self) -> u64 {
        *self.coeffs.last().expect("lc of zero")
    }

    pub fn ord_t(&self) -> i64 {
        self.coeffs.iter().position(|&c| c != 0).expect("ord of zero") as i64
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] = *c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] = (out[i] + c) % p;
        }
        let mut f = FpPoly { p, coeffs: out };
        f.trim();
        f
    }

    pub fn neg(&self) -> FpPoly {
        let p = self.p;
        FpPoly { p, coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect() }
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(a, b, p)) % p;
            }
        }
        let mut f = FpPoly { p, coeffs: out };
        f.trim();
        f
    }

    pub fn scale(&self, k: u64) -> FpPoly {
        let p = self.p;
        let mut f = FpPoly { p, coeffs: self.coeffs.iter().map(|&c| mulmod(c, k, p)).collect() };
        f.trim();
        f
    }

    pub fn divmod(&self, other: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!other.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.degree() < other.degree() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv_lead = invmod(other.lc(), p);
        let mut rem = self.coeffs.clone();
        let n = other.coeffs.len();
        let mut quot = vec![0u64; rem.len() - n + 1];
        for k in (0..quot.len()).rev() {
            let c = mulmod(rem[k + n - 1], inv_lead, p);
            quot[k] = c;
            if c != 0 {
                for (i, &b) in other.coeffs.iter().enumerate() {
                    let t = mulmod(c, b, p);
                    rem[k + i] = (rem[k + i] + p - t) % p;
                }
            }
        }
        let mut q = FpPoly { p, coeffs: quot };
        let mut r = FpPoly { p, coeffs: rem };
        q.trim();
        r.trim();
        r.coeffs.truncate(n - 1);
        r.trim();
        (q, r)
    }

    pub fn rem(&self, other: &FpPoly) -> FpPoly {
        self.divmod(other).1
    }

    pub fn div_exact(&self, other: &FpPoly) -> FpPoly {
        let (q, r) = self.divmod(other);
        assert!(r.is_zero(), "non-exact division");
        q
    }

    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if !a.is_zero() {
            let inv = invmod(a.lc(), a.p);
            a = a.scale(inv);
        }
        a
    }

    pub fn monic(&self) -> FpPoly {
        self.scale(invmod(self.lc(), self.p))
    }

    pub fn derivative(&self) -> FpPoly {
        let p = self.p;
        if self.coeffs.len() <= 1 {
            return FpPoly::zero(p);
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(mulmod(c, (i as u64) % p, p));
        }
        let mut f = FpPoly { p, coeffs: out };
        f.trim();
        f
    }

    pub fn pow_mod(&self, mut e: u64, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.p);
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

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mulmod(acc, x, p) + c) % p;
        }
        acc
    }

    /// Irreducibility over F_p by the standard Frobenius criterion.
    pub fn is_irreducible(&self) -> bool {
        let p = self.p;
        let n = self.degree();
        if n <= 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let g = self.monic();
        let x = FpPoly::x(p);
        // x^(p^n) == x mod g
        let mut frob = x.clone();
        for _ in 0..n {
            frob = frob.pow_mod(p, &g);
        }
        if frob != x.rem(&g) {
            return false;
        }
        // gcd(x^(p^(n/q)) - x, g) == 1 for prime divisors q of n
        let mut m = n as u64;
        let mut primes = vec![];
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                primes.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            primes.push(m);
        }
        for q in primes {
            let k = (n as u64) / q;
            let mut fr = x.clone();
            for _ in 0..k {
                fr = fr.pow_mod(p, &g);
            }
            let diff = fr.sub(&x.rem(&g));
            if g.gcd(&diff).degree() != 0 {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => {
                    if c == 1 {
                        write!(f, "t")?
                    } else {
                        write!(f, "{}*t", c)?
                    }
                }
                _ => {
                    if c == 1 {
                        write!(f, "t^{}", i)?
                    } else {
                        write!(f, "{}*t^{}", c, i)?
                    }
                }
            }
        }
        Ok(())
    }
}

/// The field F_{p^f} = F_p[w]/(modulus).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FqField {
    pub p: u64,
    pub f: u32,
    pub modulus: FpPoly,
}

/// An element of F_{p^f}: a polynomial in the generator w of degree < f.
/// Invariant: no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FqElem {
    pub coeffs: Vec<u64>,
}

impl FqElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl FqField {
    pub fn prime(p: u64) -> FqField {
        FqField { p, f: 1, modulus: FpPoly::x(p) }
    }

    /// The canonical F_{p^f}: lexicographically least monic irreducible modulus,
    /// ordered by (c_0, c_1, ..., c_{f-1}).
    pub fn canonical(p: u64, f: u32) -> FqField {
        if f == 1 {
            return FqField::prime(p);
        }
        let mut counter = vec![0u64; f as usize];
        loop {
            let mut coeffs = counter.clone();
            coeffs.push(1);
            let cand = FpPoly::new(p, coeffs);
            if cand.degree() == f as i64 && cand.is_irreducible() {
                return FqField { p, f, modulus: cand };
            }
            // increment base-p counter
            let mut i = 0;
            loop {
                counter[i] += 1;
                if counter[i] < p {
                    break;
                }
                counter[i] = 0;
                i += 1;
                assert!(i < f as usize, "no irreducible found");
            }
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn zero(&self) -> FqElem {
        FqElem { coeffs: vec![] }
    }

    pub fn one(&self) -> FqElem {
        FqElem { coeffs: vec![1] }
    }

    pub fn constant(&self, c: u64) -> FqElem {
        let c = c % self.p;
        if c == 0 {
            self.zero()
        } else {
            FqElem { coeffs: vec![c] }
        }
    }

    /// The generator w (for f = 1 this is 0 = the image of x).
    pub fn gen(&self) -> FqElem {
        if self.f == 1 {
            self.zero()
        } else {
            FqElem { coeffs: vec![0, 1] }
        }
    }

    fn from_poly(&self, g: FpPoly) -> FqElem {
        let r = g.rem(&self.modulus);
        FqElem { coeffs: r.coeffs }
    }

    fn to_poly(&self, a: &FqElem) -> FpPoly {
        FpPoly { p: self.p, coeffs: a.coeffs.clone() }
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.from_poly(self.to_poly(a).add(&self.to_poly(b)))
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.from_poly(self.to_poly(a).sub(&self.to_poly(b)))
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        self.from_poly(self.to_poly(a).neg())
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.from_poly(self.to_poly(a).mul(&self.to_poly(b)))
    }

    pub fn inv(&self, a: &FqElem) -> FqElem {
        assert!(!a.is_zero(), "inverse of zero");
        // extended Euclid over F_p[x]
        let (mut r0, mut r1) = (self.modulus.clone(), self.to_poly(a));
        let (mut t0, mut t1) = (FpPoly::zero(self.p), FpPoly::one(self.p));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        assert!(r0.degree() == 0, "element not invertible");
        let s = invmod(r0.lc(), self.p);
        self.from_poly(t0.scale(s))
    }

    pub fn pow(&self, a: &FqElem, mut e: u64) -> FqElem {
        let mut acc = self.one();
        let mut sq = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// p-th root (Frobenius inverse; the residue fields here are perfect).
    pub fn pth_root(&self, a: &FqElem) -> FqElem {
        let e = self.q() / self.p; // a^(q/p) since a^q = a
        self.pow(a, e)
    }

    /// Enumerate all field elements in lexicographic coefficient order.
    pub fn all_elements(&self) -> Vec<FqElem> {
        let mut out = vec![];
        let n = self.f as usize;
        let total = self.q();
        for idx in 0..total {
            let mut coeffs = vec![0u64; n];
            let mut m = idx;
            for c in coeffs.iter_mut() {
                *c = m % self.p;
                m /= self.p;
            }
            while coeffs.last() == Some(&0) {
                coeffs.pop();
            }
            out.push(FqElem { coeffs });
        }
        out
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => {
                    if c == 1 {
                        write!(f, "w")?
                    } else {
                        write!(f, "{}*w", c)?
                    }
                }
                _ => {
                    if c == 1 {
                        write!(f, "w^{}", i)?
                    } else {
                        write!(f, "{}*w^{}", c, i)?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Deterministic embedding data F_{p^a} -> F_{p^b} for a | b: the chosen
/// image of the generator of the small field.
pub fn embedding(small: &FqField, big: &Arc<FqField>) -> FqElem {
    assert_eq!(small.p, big.p);
    assert!(big.f % small.f == 0, "no embedding");
    if small.f == 1 {
        return big.zero(); // generator of F_p is the image of x under x -> 0... the prime field embeds via constants
    }
    // least root of small.modulus in big, in coefficient-lex order
    let roots = crate::respoly::fq_poly_roots_embedded(small, big);
    roots.into_iter().next().expect("embedding root exists")
}

/// Map an element through embedding data: evaluate its polynomial at the image.
pub fn apply_embedding(_small: &FqField, big: &FqField, gen_image: &FqElem, a: &FqElem) -> FqElem {
    let mut acc = big.zero();
    for c in a.coeffs.iter().rev() {
        acc = big.mul(&acc, gen_image);
        acc = big.add(&acc, &big.constant(*c));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        let f4 = FqField::canonical(2, 2);
        assert_eq!(f4.modulus, FpPoly::new(2, vec![1, 1, 1])); // x^2+x+1
        let f8 = FqField::canonical(2, 3);
        assert_eq!(f8.modulus, FpPoly::new(2, vec![1, 1, 0, 1])); // x^3+x+1
        let f9 = FqField::canonical(3, 2);
        assert!(f9.modulus.is_irreducible());
    }

    #[test]
    fn field_axioms_f4() {
        let f4 = FqField::canonical(2, 2);
        let w = f4.gen();
        let w2 = f4.mul(&w, &w);
        // w^2 = w + 1
        assert_eq!(w2, f4.add(&w, &f4.one()));
        assert_eq!(f4.mul(&w, &f4.inv(&w)), f4.one());
        assert_eq!(f4.pow(&w, 3), f4.one());
    }

    #[test]
    fn irreducibility() {
        assert!(FpPoly::new(2, vec![1, 1, 0, 0, 1]).is_irreducible()); // x^4+x+1
        assert!(!FpPoly::new(2, vec![1, 0, 1]).is_irreducible()); // x^2+1 = (x+1)^2
        assert!(FpPoly::new(3, vec![1, 0, 1]).is_irreducible()); // x^2+1 over F_3
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f8 = FqField::canonical(2, 3);
        for a in f8.all_elements() {
            let b = f8.pth_root(&a);
            assert_eq!(f8.pow(&b, 2), a);
        }
    }
}
