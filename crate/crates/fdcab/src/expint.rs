//! Exponential integral E1(x) for positive real arguments.
//!
//! The genie-aided zero-forcing rate needs `e^x · E1(x)`, which stays finite
//! for arbitrarily large `x` even though `e^x` alone overflows; [`e1_scaled`]
//! computes the product directly. Series expansion below 1, continued
//! fraction above (the classic specfun split).

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E1(x) = ∫_x^∞ e^(-t)/t dt for x > 0.
pub fn e1(x: f64) -> f64 {
    assert!(x >= 0.0, "e1 is only defined for nonnegative x");
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        // E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k * k!)
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..=40 {
            let kf = k as f64;
            term *= -kf * x / ((kf + 1.0) * (kf + 1.0));
            sum += term;
            if term.abs() <= sum.abs() * 1e-16 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + x * sum
    } else {
        (-x).exp() * e1_scaled(x)
    }
}

/// e^x · E1(x), numerically stable for large x (tends to 1/x).
pub fn e1_scaled(x: f64) -> f64 {
    assert!(x > 0.0, "e1_scaled requires x > 0");
    if x <= 1.0 {
        return x.exp() * e1(x);
    }
    // Lentz-style evaluation of the continued fraction
    //   e^x E1(x) = 1 / (x + 1/(1 + 1/(x + 2/(1 + 2/(x + ...)))))
    let terms = ((80.0 / x) as usize) + 20;
    let mut t = 0.0;
    for k in (1..=terms).rev() {
        let kf = k as f64;
        t = kf / (1.0 + kf / (x + t));
    }
    1.0 / (x + t)
}
