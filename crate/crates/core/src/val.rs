//! Exact valuation values: reduced rationals extended by +infinity.

use std::cmp::Ordering;
use std::fmt;

/// A valuation value: a reduced rational or +infinity. Infinity is maximal
/// for the order and absorbing for addition.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    Finite(i64, i64),
    Infinity,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Val {
    pub fn new(num: i64, den: i64) -> Val {
        assert!(den != 0, "zero denominator");
        Val::reduced(num as i128, den as i128)
    }

    fn reduced(num: i128, den: i128) -> Val {
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Val::Finite(0, 1);
        }
        let g = gcd_i128(n, d);
        let (n, d) = (n / g, d / g);
        assert!(
            n >= i64::MIN as i128 && n <= i64::MAX as i128 && d <= i64::MAX as i128,
            "valuation overflow"
        );
        Val::Finite(n as i64, d as i64)
    }

    pub fn int(n: i64) -> Val {
        Val::Finite(n, 1)
    }

    pub fn zero() -> Val {
        Val::Finite(0, 1)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Val::Finite(_, _))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Val::Finite(0, _))
    }

    pub fn numer(&self) -> i64 {
        match self {
            Val::Finite(n, _) => *n,
            Val::Infinity => panic!("numer of infinity"),
        }
    }

    pub fn denom(&self) -> i64 {
        match self {
            Val::Finite(_, d) => *d,
            Val::Infinity => panic!("denom of infinity"),
        }
    }

    pub fn add(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Finite(a, b), Val::Finite(c, d)) => {
                Val::reduced(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
            }
            _ => Val::Infinity,
        }
    }

    /// Finite subtraction; panics if either side is infinite.
    pub fn sub(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Finite(a, b), Val::Finite(c, d)) => {
                Val::reduced(*a as i128 * *d as i128 - *c as i128 * *b as i128, *b as i128 * *d as i128)
            }
            _ => panic!("sub with infinity"),
        }
    }

    pub fn neg(&self) -> Val {
        match self {
            Val::Finite(n, d) => Val::Finite(-n, *d),
            Val::Infinity => panic!("neg of infinity"),
        }
    }

    pub fn mul_int(&self, k: i64) -> Val {
        match self {
            Val::Finite(n, d) => {
                if k == 0 {
                    Val::zero()
                } else {
                    Val::reduced(*n as i128 * k as i128, *d as i128)
                }
            }
            Val::Infinity => {
                // k * infinity with k = 0 arises as an empty sum of values
                if k == 0 {
                    Val::zero()
                } else {
                    assert!(k > 0, "negative multiple of infinity");
                    Val::Infinity
                }
            }
        }
    }

    pub fn mul(&self, other: &Val) -> Val {
        match (self, other) {
            (Val::Finite(a, b), Val::Finite(c, d)) => Val::reduced(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => Val::Infinity,
        }
    }

    pub fn div_int(&self, k: i64) -> Val {
        assert!(k != 0);
        match self {
            Val::Finite(n, d) => Val::reduced(*n as i128, *d as i128 * k as i128),
            Val::Infinity => Val::Infinity,
        }
    }

    /// Is this value in the group (1/e)Z?
    pub fn in_group(&self, e: i64) -> bool {
        match self {
            Val::Finite(n, d) => (*n as i128 * e as i128) % (*d as i128) == 0,
            Val::Infinity => false,
        }
    }

    /// Least tau >= 1 with tau * self in (1/e)Z.
    pub fn order_in_group(&self, e: i64) -> i64 {
        match self {
            Val::Finite(_, d) => {
                let g = gcd_i128(*d as i128, e as i128);
                (*d as i128 / g) as i64
            }
            Val::Infinity => panic!("order of infinity"),
        }
    }

    pub fn floor(&self) -> i64 {
        match self {
            Val::Finite(n, d) => (*n as i128).div_euclid(*d as i128) as i64,
            Val::Infinity => panic!("floor of infinity"),
        }
    }

    pub fn ceil(&self) -> i64 {
        match self {
            Val::Finite(n, d) => -((-*n as i128).div_euclid(*d as i128)) as i64,
            Val::Infinity => panic!("ceil of infinity"),
        }
    }

    pub fn min(a: Val, b: Val) -> Val {
        if a <= b {
            a
        } else {
            b
        }
    }
}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Val) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Val) -> Ordering {
        match (self, other) {
            (Val::Infinity, Val::Infinity) => Ordering::Equal,
            (Val::Infinity, _) => Ordering::Greater,
            (_, Val::Infinity) => Ordering::Less,
            (Val::Finite(a, b), Val::Finite(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
        }
    }
}

impl fmt::Debug for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Infinity => write!(f, "inf"),
            Val::Finite(n, 1) => write!(f, "{}", n),
            Val::Finite(n, d) => write!(f, "{}/{}", n, d),
        }
    }
}

impl Val {
    /// Parse "num/den" or "num" or "inf".
    pub fn parse(s: &str) -> Option<Val> {
        let s = s.trim();
        if s == "inf" || s == "infinity" {
            return Some(Val::Infinity);
        }
        if let Some((a, b)) = s.split_once('/') {
            let n: i64 = a.trim().parse().ok()?;
            let d: i64 = b.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Val::new(n, d))
        } else {
            let n: i64 = s.parse().ok()?;
            Some(Val::int(n))
        }
    }
}
