//! f64 intrinsics, routed through `std` or `libm` depending on the build.

#![allow(dead_code)]

macro_rules! unary {
    ($name:ident, $std:ident, $libm:ident) => {
        #[inline]
        pub fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$std()
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x)
            }
        }
    };
}

unary!(abs, abs, fabs);
unary!(sqrt, sqrt, sqrt);
unary!(exp, exp, exp);
unary!(ln, ln, log);
unary!(floor, floor, floor);
unary!(ceil, ceil, ceil);

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powf(y)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, y)
    }
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    #[cfg(feature = "std")]
    {
        x.powi(n)
    }
    #[cfg(not(feature = "std"))]
    {
        libm::pow(x, n as f64)
    }
}

/// Euclidean remainder in [0, |m|).
#[inline]
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.rem_euclid(m)
    }
    #[cfg(not(feature = "std"))]
    {
        let r = x - floor(x / m) * m;
        if r >= m {
            0.0
        } else {
            r
        }
    }
}

/// ln(d choose k) via a log-factorial sum; exact enough for d in the
/// thousands (error accumulates like d * eps).
pub fn ln_binomial(d: u32, k: u32) -> f64 {
    debug_assert!(k <= d);
    ln_factorial(d) - ln_factorial(k) - ln_factorial(d - k)
}

fn ln_factorial(n: u32) -> f64 {
    let mut acc = 0.0;
    for i in 2..=n as u64 {
        acc += ln(i as f64);
    }
    acc
}

/// Compensated (Kahan) accumulator; keeps reductions deterministic and
/// accurate regardless of term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}
