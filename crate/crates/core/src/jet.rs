//! Second-order forward-mode dual numbers, so that one generic evaluation
//! of a surface-tension function yields its value and first and second
//! derivative along one coordinate.

use std::ops::{Add, Mul, Neg, Sub};

pub trait Real: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn cst(v: f64) -> Self;
    fn val(self) -> f64;
    fn scale(self, k: f64) -> Self;
}

impl Real for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn val(self) -> f64 {
        self
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub fn var(v: f64) -> Self {
        Self { v, d: 1.0, dd: 0.0 }
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d: self.d + o.d,
            dd: self.dd + o.dd,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        Jet {
            v: self.v - o.v,
            d: self.d - o.d,
            dd: self.dd - o.dd,
        }
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet {
            v: -self.v,
            d: -self.d,
            dd: -self.dd,
        }
    }
}

impl Real for Jet {
    #[inline]
    fn cst(v: f64) -> Self {
        Jet { v, d: 0.0, dd: 0.0 }
    }
    #[inline]
    fn val(self) -> f64 {
        self.v
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        Jet {
            v: self.v * k,
            d: self.d * k,
            dd: self.dd * k,
        }
    }
}

/// Half-width of the interval on which the polynomial primitives are used
/// as-is; outside it they continue as their second-order Taylor polynomial,
/// so second derivatives stay bounded.
pub const REG_BOUND: f64 = 1.1;

/// `raw` inside `[-REG_BOUND, REG_BOUND]`, quadratic continuation outside.
/// `taylor(b)` must return `raw`'s value, first and second derivative at `b`.
#[inline]
pub fn regularized<T: Real>(x: T, raw: impl Fn(T) -> T, taylor: impl Fn(f64) -> [f64; 3]) -> T {
    let xv = x.val();
    let b = if xv > REG_BOUND {
        REG_BOUND
    } else if xv < -REG_BOUND {
        -REG_BOUND
    } else {
        return raw(x);
    };
    let [v, d, dd] = taylor(b);
    let t = x - T::cst(b);
    T::cst(v) + t.scale(d) + (t * t).scale(0.5 * dd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        // f(x) = x^3 at x = 2: 8, 12, 12
        let x = Jet::var(2.0);
        let y = x * x * x;
        assert_eq!((y.v, y.d, y.dd), (8.0, 12.0, 12.0));
    }

    #[test]
    fn regularized_is_c2() {
        let raw = |x: Jet| x * x * x;
        let taylor = |b: f64| [b * b * b, 3.0 * b * b, 6.0 * b];
        let h = 1e-7;
        let a = regularized(Jet::var(REG_BOUND - h), raw, taylor);
        let b = regularized(Jet::var(REG_BOUND + h), raw, taylor);
        assert!((a.v - b.v).abs() < 1e-5);
        assert!((a.d - b.d).abs() < 1e-5);
        assert!((a.dd - b.dd).abs() < 1e-5);
        let far = regularized(Jet::var(5.0), raw, taylor);
        assert_eq!(far.dd, 6.0 * REG_BOUND);
    }
}
