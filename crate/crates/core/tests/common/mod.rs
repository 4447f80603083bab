//! Independent numerical oracles shared by the integration and acceptance suites.
//!
//! Nothing here calls into the model code: the quadrature rules, the KS test,
//! the bisection quantile and the literal closed forms are written from scratch
//! so they can check the library rather than restate it.

#![allow(dead_code)]

/// 15-point Kronrod nodes/weights on [-1, 1] (positive half, centre first)
/// with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adapt<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&mut f, a, b, tol, 40)
}

/// Breakpoints `0, 1e-3, 1e-2, ..., ≤ upper, upper` for integrands on long ranges.
pub fn log_breaks(upper: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    let mut t = 1e-3;
    while t < upper {
        v.push(t);
        t *= 10.0;
    }
    v.push(upper);
    v
}

/// Integral over `[0, upper]` split at decades.
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, upper: f64, tol: f64) -> f64 {
    let b = log_breaks(upper);
    let per = tol / b.len() as f64;
    b.windows(2).map(|w| adapt(&mut f, w[0], w[1], per, 40)).sum()
}

/// Iterated double integral over `[0, bx] × [0, by]`.
pub fn integrate_quadrant<F: Fn(f64, f64) -> f64>(f: F, bx: f64, by: f64, tol: f64) -> f64 {
    integrate_half_line(|x| integrate_half_line(|y| f(x, y), by, tol * 0.1), bx, tol)
}

/// Iterated double integral over the unit square.
pub fn integrate_unit_square<F: Fn(f64, f64) -> f64>(f: F, tol: f64) -> f64 {
    integrate(|u| integrate(|v| f(u, v), 0.0, 1.0, tol * 0.1), 0.0, 1.0, tol)
}

/// ITL closed forms evaluated literally with raw powers.
pub fn itl_cdf_raw(x: f64, xi: f64) -> f64 {
    1.0 - (x + 1.0).powf(-2.0 * xi) * (2.0 * x + 1.0).powf(xi)
}

pub fn itl_sf_raw(x: f64, xi: f64) -> f64 {
    (x + 1.0).powf(-2.0 * xi) * (2.0 * x + 1.0).powf(xi)
}

pub fn itl_pdf_raw(x: f64, xi: f64) -> f64 {
    2.0 * xi * x * (x + 1.0).powf(-(2.0 * xi + 1.0)) * (2.0 * x + 1.0).powf(xi - 1.0)
}

/// Smallest `B` (searching by doubling) with `S(B) < target` for shape `xi`.
pub fn tail_bound(xi: f64, target: f64) -> f64 {
    let mut b = 1.0;
    while itl_sf_raw(b, xi) >= target {
        b *= 2.0;
    }
    b
}

/// Bracket-by-doubling then bisection inverse of a nondecreasing CDF.
pub fn bisection_quantile<F: Fn(f64) -> f64>(cdf: F, q: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while cdf(hi) < q {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// Brute-force sample Kendall tau-a (no ties expected), `O(n²)`.
pub fn kendall_tau_brute(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += ((x[i] - x[j]) * (y[i] - y[j])).signum();
        }
    }
    s / (n * (n - 1) / 2) as f64
}

/// The bivariate closed forms written out term by term with raw powers.
pub mod literal {
    /// Joint CDF: copula composition of the ITL marginals.
    pub fn joint_cdf(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        let f1 = super::itl_cdf_raw(x, a);
        let f2 = super::itl_cdf_raw(y, b);
        f1 * f2 * (1.0 + d * (1.0 - f1) * (1.0 - f2))
    }

    /// Joint density, expanded.
    pub fn joint_pdf(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        4.0 * a * b * x * y
            * (x + 1.0).powf(-(2.0 * a + 1.0))
            * (2.0 * x + 1.0).powf(a - 1.0)
            * (y + 1.0).powf(-(2.0 * b + 1.0))
            * (2.0 * y + 1.0).powf(b - 1.0)
            * (1.0
                + d * ((2.0 * (2.0 * x + 1.0).powf(a) / (x + 1.0).powf(2.0 * a)) - 1.0)
                    * ((2.0 * (2.0 * y + 1.0).powf(b) / (y + 1.0).powf(2.0 * b)) - 1.0))
    }

    /// Joint survival in the alternative form `φ₁φ₂(1 + δφ₁φ₂)`, expanded.
    pub fn survival_eq31(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        let den = (x + 1.0).powf(2.0 * a) * (y + 1.0).powf(2.0 * b);
        let num = (2.0 * x + 1.0).powf(a) * (2.0 * y + 1.0).powf(b);
        num * (d * num / den + 1.0) / den
    }

    /// Joint hazard as a single expanded fraction.
    pub fn hazard(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        let num = 4.0 * a * b * x * y
            * (d * (2.0 * (x + 1.0).powf(-2.0 * a) * (2.0 * x + 1.0).powf(a) - 1.0)
                * (2.0 * (y + 1.0).powf(-2.0 * b) * (2.0 * y + 1.0).powf(b) - 1.0)
                + 1.0);
        let den = (x + 1.0)
            * (2.0 * x + 1.0)
            * (y + 1.0)
            * (2.0 * y + 1.0)
            * (d * (2.0 * x + 1.0).powf(a)
                * (x + 1.0).powf(-2.0 * a)
                * (y + 1.0).powf(-2.0 * b)
                * (2.0 * y + 1.0).powf(b)
                + 1.0);
        num / den
    }

    /// Expanded reversed-hazard expression with `(1 - 2φᵢ)` factors.
    pub fn reversed_hazard(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        let ax = (x + 1.0).powf(2.0 * a);
        let by = (y + 1.0).powf(2.0 * b);
        let gx = (2.0 * x + 1.0).powf(a);
        let gy = (2.0 * y + 1.0).powf(b);
        let num = 4.0 * a * b * x * y
            * (2.0 * x + 1.0).powf(a - 1.0)
            * (2.0 * y + 1.0).powf(b - 1.0)
            * (d * (ax - 2.0 * gx) * (by - 2.0 * gy) + ax * by);
        let den = (x + 1.0) * (y + 1.0) * (ax - 2.0 * gx) * (by - 2.0 * gy) * (d * gx * gy + ax * by);
        num / den
    }

    /// Conditional density of X given Y = y, expanded.
    pub fn conditional_x_given_y(x: f64, y: f64, a: f64, b: f64, d: f64) -> f64 {
        2.0 * a * x
            * (x + 1.0).powf(-2.0 * a - 1.0)
            * (2.0 * x + 1.0).powf(a - 1.0)
            * (d * (2.0 * (x + 1.0).powf(-2.0 * a) * (2.0 * x + 1.0).powf(a) - 1.0)
                * (2.0 * (y + 1.0).powf(-2.0 * b) * (2.0 * y + 1.0).powf(b) - 1.0)
                + 1.0)
    }
}
