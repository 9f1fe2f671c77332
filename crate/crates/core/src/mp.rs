//! Thin extended-precision real type used by the coefficient engine.
//!
//! Wraps `astro_float::BigFloat` with a fixed working precision so that engine
//! code can be written with ordinary operators.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

#[derive(Debug, Clone)]
pub(crate) struct Mp {
    v: BigFloat,
    prec: usize,
}

impl Mp {
    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(i: i64, prec: usize) -> Self {
        Mp { v: BigFloat::from_i64(i, prec), prec }
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Mp { v: BigFloat::from_f64(x, prec), prec }
    }

    fn wrap(&self, v: BigFloat) -> Self {
        Mp { v, prec: self.prec }
    }

    #[cfg(test)]
    pub fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.prec, RM))
    }

    pub fn exp(&self) -> Self {
        CONSTS.with(|cc| self.wrap(self.v.exp(self.prec, RM, &mut cc.borrow_mut())))
    }

    pub fn mul_i(&self, k: i64) -> Self {
        self * &Mp::from_i64(k, self.prec)
    }

    pub fn div_i(&self, k: i64) -> Self {
        self / &Mp::from_i64(k, self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    #[cfg(test)]
    pub fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }

    /// Nearest `f64` (ties are not treated specially; the error is below one ulp).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let Some((words, _, sign, exp, _)) = self.v.as_raw_parts() else {
            return f64::NAN;
        };
        let n = words.len();
        // mantissa is 0.w[n-1] w[n-2] ... in [1/2, 1)
        let hi = words[n - 1] as f64;
        let lo = if n > 1 { words[n - 2] as f64 } else { 0.0 };
        let frac = hi + lo * 2f64.powi(-64);
        let mag = ldexp(frac, exp as i64 - 64);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }
}

fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= 2f64.powi(1000);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= 2f64.powi(-1000);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(k as i32)
}

impl PartialEq for Mp {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident) => {
        impl $tr<&Mp> for &Mp {
            type Output = Mp;
            fn $f(self, rhs: &Mp) -> Mp {
                let p = self.prec.max(rhs.prec);
                Mp { v: self.v.$f(&rhs.v, p, RM), prec: p }
            }
        }
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $f(self, rhs: Mp) -> Mp {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Mp> for Mp {
            type Output = Mp;
            fn $f(self, rhs: &Mp) -> Mp {
                (&self).$f(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        self.wrap(self.v.clone().neg())
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        -&self
    }
}
