//! Special functions and quadrature used by the oracles and limit laws.

use crate::scalar::{lit, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(x: T) -> T {
    // x is the shifted argument (z - 1)
    let mut acc = lit::<T>(LANCZOS_COEF[0]);
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += lit::<T>(c) / (x + lit(k as f64));
    }
    acc
}

/// Natural log of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x)
    } else {
        let z = x - T::one();
        let t = z + lit(LANCZOS_G) + half;
        half * (T::PI() + T::PI()).ln() + (z + half) * t.ln() - t + lanczos_sum(z).ln()
    }
}

/// Γ(x) for real x away from the poles.
pub fn gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        let pi = T::PI();
        pi / ((pi * x).sin() * gamma(T::one() - x))
    } else {
        let z = x - T::one();
        let t = z + lit(LANCZOS_G) + half;
        (T::PI() + T::PI()).sqrt() * t.powf(z + half) * (-t).exp() * lanczos_sum(z)
    }
}

/// 1/Γ(x), entire; zero at the non-positive integers.
pub fn recip_gamma<T: Real>(x: T) -> T {
    if x <= T::zero() && x == x.floor() {
        return T::zero();
    }
    if x < lit(0.5) {
        let pi = T::PI();
        gamma(T::one() - x) * (pi * x).sin() / pi
    } else {
        T::one() / gamma(x)
    }
}

/// Regularized incomplete beta function I_x(a, b).
pub fn incomplete_beta<T: Real>(a: T, b: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    let two = lit::<T>(2.0);
    if x < (a + T::one()) / (a + b + two) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        T::one() - front * beta_continued_fraction(b, a, T::one() - x) / b
    }
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = lit::<T>(1e-300).max(T::min_positive_value());
    let eps = T::epsilon();
    let one = T::one();
    let two = lit::<T>(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = lit::<T>(m as f64);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h *= del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the 7-point rule on the odd-indexed Kronrod nodes.
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * lit(GK_WEIGHTS[7]);
    let mut gauss = fc * lit(G_WEIGHTS[3]);
    for j in 0..7 {
        let dx = half_len * lit(GK_NODES[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * lit(GK_WEIGHTS[j]);
        if j % 2 == 1 {
            gauss += pair * lit(G_WEIGHTS[j / 2]);
        }
    }
    (kronrod * half_len, ((kronrod - gauss) * half_len).abs())
}

const MAX_SUBINTERVALS: usize = 2000;

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimate falls below `abs_tol` or below the rounding floor of the sum.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, abs_tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let (whole, err) = gk15(f, a, b);
    let mut parts = vec![(a, b, whole, err)];
    let floor = lit::<T>(50.0) * T::epsilon();
    while parts.len() < MAX_SUBINTERVALS {
        let total = parts.iter().fold(T::zero(), |acc, p| acc + p.2);
        let total_err = parts.iter().fold(T::zero(), |acc, p| acc + p.3);
        if total_err <= abs_tol.max(floor * total.abs()) {
            break;
        }
        let (worst, _) =
            parts.iter().enumerate().fold(
                (0, T::neg_infinity()),
                |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best },
            );
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = lit::<T>(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let (l, el) = gk15(f, lo, mid);
        let (r, er) = gk15(f, mid, hi);
        parts.push((lo, mid, l, el));
        parts.push((mid, hi, r, er));
    }
    parts.iter().fold(T::zero(), |acc, p| acc + p.2)
}
