//! Error function, its complement, and their inverses.
//!
//! `erf` and `erfc` follow the FreeBSD msun rational approximations, which
//! carry the notice below. The inverses start from a single-precision
//! rational guess and polish it with Halley iterations on `erf`/`erfc`, so
//! their accuracy is bounded by the forward functions (a few ulps).
//!
//! ====================================================
//! Copyright (C) 1993 by Sun Microsystems, Inc. All rights reserved.
//!
//! Developed at SunPro, a Sun Microsystems, Inc. business.
//! Permission to use, copy, modify, and distribute this
//! software is freely granted, provided that this notice
//! is preserved.
//! ====================================================

use std::f64::consts::PI;

const ERX: f64 = 8.45062911510467529297e-01;

// erf on [0, 0.84375]
const EFX: f64 = 1.28379167095512586316e-01;
const EFX8: f64 = 1.02703333676410069053e+00;
const PP: [f64; 5] = [
    1.28379167095512558561e-01,
    -3.25042107247001499370e-01,
    -2.84817495755985104766e-02,
    -5.77027029648944159157e-03,
    -2.37630166566501626084e-05,
];
const QQ: [f64; 5] = [
    3.97917223959155352819e-01,
    6.50222499887672944485e-02,
    5.08130628187576562776e-03,
    1.32494738004321644526e-04,
    -3.96022827877536812320e-06,
];

// erf on [0.84375, 1.25]
const PA: [f64; 7] = [
    -2.36211856075265944077e-03,
    4.14856118683748331666e-01,
    -3.72207876035701323847e-01,
    3.18346619901161753674e-01,
    -1.10894694282396677476e-01,
    3.54783043256182359371e-02,
    -2.16637559486879084300e-03,
];
const QA: [f64; 6] = [
    1.06420880400844228286e-01,
    5.40397917702171048937e-01,
    7.18286544141962662868e-02,
    1.26171219808761642112e-01,
    1.36370839120290507362e-02,
    1.19844998467991074170e-02,
];

// erfc on [1.25, 1/0.35]
const RA: [f64; 8] = [
    -9.86494403484714822705e-03,
    -6.93858572707181764372e-01,
    -1.05586262253232909814e+01,
    -6.23753324503260060396e+01,
    -1.62396669462573470355e+02,
    -1.84605092906711035994e+02,
    -8.12874355063065934246e+01,
    -9.81432934416914548592e+00,
];
const SA: [f64; 8] = [
    1.96512716674392571292e+01,
    1.37657754143519042600e+02,
    4.34565877475229228821e+02,
    6.45387271733267880336e+02,
    4.29008140027567833386e+02,
    1.08635005541779435134e+02,
    6.57024977031928170135e+00,
    -6.04244152148580987438e-02,
];

// erfc on [1/0.35, 28]
const RB: [f64; 7] = [
    -9.86494292470009928597e-03,
    -7.99283237680523006574e-01,
    -1.77579549177547519889e+01,
    -1.60636384855821916062e+02,
    -6.37566443368389627722e+02,
    -1.02509513161107724954e+03,
    -4.83519191608651397019e+02,
];
const SB: [f64; 7] = [
    3.03380607434824582924e+01,
    3.25792512996573918826e+02,
    1.53672958608443695994e+03,
    3.19985821950859553908e+03,
    2.55305040643316442583e+03,
    4.74528541206955367215e+02,
    -2.24409524465858183362e+01,
];

const VERY_TINY: f64 = 2.848094538889218e-306;
const SMALL: f64 = 3.725_290_298_461_914e-9; // 2^-28
const TINY: f64 = 1.387_778_780_781_445_7e-17; // 2^-56

/// Horner evaluation, constant term first.
#[inline]
fn poly(z: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// `1 + z*(c0 + z*(c1 + ...))`
#[inline]
fn poly1(z: f64, coeffs: &[f64]) -> f64 {
    1.0 + z * poly(z, coeffs)
}

/// erfc(x) for x >= 1.25 via exp(-x^2 - 0.5625 + R/S) / x.
fn erfc_tail(x: f64) -> f64 {
    let s = 1.0 / (x * x);
    let (r, ss) = if x < 1.0 / 0.35 {
        (poly(s, &RA), poly1(s, &SA))
    } else {
        (poly(s, &RB), poly1(s, &SB))
    };
    // x rounded to 20 bits keeps -z*z exact.
    let z = f64::from_bits(x.to_bits() & 0xffff_ffff_0000_0000);
    (-z * z - 0.5625).exp() * ((z - x) * (z + x) + r / ss).exp() / x
}

pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.84375 {
        if ax < SMALL {
            if ax < VERY_TINY {
                0.125 * (8.0 * ax + EFX8 * ax)
            } else {
                ax + EFX * ax
            }
        } else {
            let z = ax * ax;
            ax + ax * (poly(z, &PP) / poly1(z, &QQ))
        }
    } else if ax < 1.25 {
        let s = ax - 1.0;
        ERX + poly(s, &PA) / poly1(s, &QA)
    } else if ax >= 6.0 {
        1.0
    } else {
        1.0 - erfc_tail(ax)
    };
    value.copysign(x)
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let negative = x < 0.0;
    if ax < 0.84375 {
        let t = if ax < TINY {
            ax
        } else {
            let z = ax * ax;
            let y = poly(z, &PP) / poly1(z, &QQ);
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }
    if ax < 1.25 {
        let s = ax - 1.0;
        let pq = poly(s, &PA) / poly1(s, &QA);
        return if negative { 1.0 + ERX + pq } else { 1.0 - ERX - pq };
    }
    if ax < 28.0 {
        if negative && ax > 6.0 {
            return 2.0;
        }
        let r = erfc_tail(ax);
        return if negative { 2.0 - r } else { r };
    }
    if negative {
        2.0
    } else {
        0.0
    }
}

/// Giles' single-precision approximation of erfinv, parameterised by
/// `w = -ln((1 - y)(1 + y))` so the tail can be fed an exact `w`.
fn erfinv_guess(y: f64, w: f64) -> f64 {
    let p = if w < 5.0 {
        let w = w - 2.5;
        poly(
            w,
            &[
                1.50140941,
                0.246640727,
                -0.00417768164,
                -0.00125372503,
                0.00021858087,
                -4.39150654e-06,
                -3.5233877e-06,
                3.43273939e-07,
                2.81022636e-08,
            ],
        )
    } else {
        let w = w.sqrt() - 3.0;
        poly(
            w,
            &[
                2.83297682,
                1.00167406,
                0.00943887047,
                -0.0076224613,
                0.00573950773,
                -0.00367342844,
                0.00134934322,
                0.000100950558,
                -0.000200214257,
            ],
        )
    };
    p * y
}

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const MAX_HALLEY_STEPS: usize = 60;

/// Halley refinement of `g(x) = target`, where `g' = sign * 2/sqrt(pi) exp(-x^2)`.
fn halley(mut x: f64, target: f64, g: fn(f64) -> f64, sign: f64) -> f64 {
    for _ in 0..MAX_HALLEY_STEPS {
        let f = g(x) - target;
        let df = sign * TWO_OVER_SQRT_PI * (-x * x).exp();
        if df == 0.0 {
            break;
        }
        let newton = f / df;
        // g'' = -2x g'
        let step = newton / (1.0 + x * newton);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    x
}

/// Inverse of [`erf`] on (-1, 1). Returns ±inf at ±1 and NaN outside.
pub fn erfinv(y: f64) -> f64 {
    if y.is_nan() || y.abs() > 1.0 {
        return f64::NAN;
    }
    if y == 1.0 {
        return f64::INFINITY;
    }
    if y == -1.0 {
        return f64::NEG_INFINITY;
    }
    if y == 0.0 {
        return y;
    }
    if y.abs() > 0.5 {
        // 1 - |y| is exact here (Sterbenz), and the complement is better
        // conditioned near the ends.
        return erfcinv(1.0 - y.abs()).copysign(y);
    }
    let w = -((1.0 - y) * (1.0 + y)).ln();
    halley(erfinv_guess(y, w), y, erf, 1.0)
}

/// Inverse of [`erfc`] on (0, 2). Accurate for arguments down to the
/// smallest normal double.
pub fn erfcinv(q: f64) -> f64 {
    if q.is_nan() || !(0.0..=2.0).contains(&q) {
        return f64::NAN;
    }
    if q == 0.0 {
        return f64::INFINITY;
    }
    if q == 2.0 {
        return f64::NEG_INFINITY;
    }
    if q > 1.0 {
        return -erfcinv(2.0 - q);
    }
    if q >= 0.5 {
        let y = 1.0 - q;
        if y == 0.0 {
            return 0.0;
        }
        let w = -(q * (2.0 - q)).ln();
        return halley(erfinv_guess(y, w), y, erf, 1.0);
    }
    let w = -(q * (2.0 - q)).ln();
    let guess = if w < 36.0 {
        erfinv_guess(1.0 - q, w)
    } else {
        // erfc(x) ~ exp(-x^2) / (x sqrt(pi))
        let x0 = (-q.ln()).sqrt();
        (-(q * PI.sqrt() * x0).ln()).sqrt()
    };
    halley(guess, q, erfc, -1.0)
}
