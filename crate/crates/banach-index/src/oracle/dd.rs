//! Double-double arithmetic: ~31 significant digits from unevaluated
//! (hi, lo) f64 pairs. Needed where the closed-form identity checks demand
//! absolute error far below one ulp of the result (2^p reaches 65536, whose
//! ulp is 1.5e-11, while the check wants 1e-12).

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

pub(crate) const PI_2: Dd = Dd {
    hi: 1.5707963267948966,
    lo: 6.123233995736766e-17,
};

const LN2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468138462996e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, x);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * x);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    /// Multiply by 2^e (exact).
    fn ldexp(self, e: i32) -> Dd {
        let f = 2.0f64.powi(e);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    /// exp(x) for moderate |x| (the callers stay within |x| < 30).
    pub fn exp(self) -> Dd {
        let m = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(m)).mul_f64(1.0 / 512.0);
        // expm1 by Taylor: |r| <= ln2/1024 ~ 6.8e-4, terms to r^11 reach 1e-38
        let mut term = r;
        let mut sum = r;
        for k in 2..=11 {
            term = term.mul(r).div(Dd::from_f64(k as f64));
            sum = sum.add(term);
        }
        // square back up 9 times in expm1 form: s <- 2s + s^2
        let mut s = sum;
        for _ in 0..9 {
            s = s.mul_f64(2.0).add(s.mul(s));
        }
        s.add(Dd::ONE).ldexp(m as i32)
    }

    /// ln(x) for x > 0, by Newton iteration on exp.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            // y + x*exp(-y) - 1 converges quadratically to ln x
            y = y.add(self.mul(y.neg().exp())).sub(Dd::ONE);
        }
        y
    }

    /// x^a for x >= 0 (0 maps to 0, for positive exponents).
    pub fn pow(self, a: Dd) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        a.mul(self.ln()).exp()
    }
}

fn cos_taylor(x: Dd) -> Dd {
    // sum (-1)^k x^(2k)/(2k)!; |x| <= pi/4 keeps every term benign
    let x2 = x.mul(x);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..=16 {
        let d = (2 * k - 1) as f64 * (2 * k) as f64;
        term = term.mul(x2).div(Dd::from_f64(-d));
        sum = sum.add(term);
    }
    sum
}

fn sin_taylor(x: Dd) -> Dd {
    let x2 = x.mul(x);
    let mut term = x;
    let mut sum = x;
    for k in 1..=16 {
        let d = (2 * k) as f64 * (2 * k + 1) as f64;
        term = term.mul(x2).div(Dd::from_f64(-d));
        sum = sum.add(term);
    }
    sum
}

/// (cos t, sin t) for t in [0, pi/2]. Arguments above pi/4 are reflected
/// through pi/2 so neither series suffers cancellation.
pub(crate) fn cos_sin(theta: f64) -> (Dd, Dd) {
    let t = Dd::from_f64(theta);
    if theta <= std::f64::consts::FRAC_PI_4 {
        (cos_taylor(t), sin_taylor(t))
    } else {
        let w = PI_2.sub(t);
        (sin_taylor(w), cos_taylor(w))
    }
}
