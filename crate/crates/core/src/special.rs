//! Scalar special functions: log-gamma, log-space binomial coefficients,
//! log-beta and the regularized incomplete beta function.
//!
//! Large-argument paths use Stirling-remainder and `bd0` deviance forms so
//! that the big logarithmic terms never cancel against each other.

use std::f64::consts::PI;

use crate::error::{Result, SnbError};

/// ln(sqrt(2*pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Threshold above which the Stirling remainder series is used directly.
const STIRLING_MIN: f64 = 15.0;

const CF_MAX_ITER: usize = 300;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

/// A probability carried on the natural-log scale; `-inf` is an exact zero.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value > 0.0 {
            return Err(SnbError::domain(format!(
                "log-probability must lie in [-inf, 0], got {value}"
            )));
        }
        Ok(LogProb(value))
    }

    pub fn from_prob(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(SnbError::domain(format!("probability must lie in [0, 1], got {p}")));
        }
        Ok(LogProb(p.ln()))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl std::ops::Mul for LogProb {
    type Output = LogProb;

    fn mul(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 + rhs.0)
    }
}

// Lanczos approximation, g = 607/128, 15 terms.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEF: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || x <= 0.0 {
        return f64::NAN;
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma(x + 1.0) - x.ln();
    }
    if x >= STIRLING_MIN {
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_remainder(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// lnΓ(x) - [(x - 1/2) ln x - x + ln sqrt(2π)].
fn stirling_remainder(x: f64) -> f64 {
    if x < STIRLING_MIN {
        return ln_gamma(x) - ((x - 0.5) * x.ln() - x + LN_SQRT_2PI);
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
}

/// ln n! - [(n + 1/2) ln n - n + ln sqrt(2π)], exact table for small n.
fn stirlerr(n: u64) -> f64 {
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_26,
        0.041_340_695_955_409_29,
        0.027_677_925_684_998_34,
        0.020_790_672_103_765_09,
        0.016_644_691_189_821_19,
        0.013_876_128_823_070_75,
        0.011_896_709_945_891_77,
        0.010_411_265_261_972_1,
        0.009_255_462_182_712_733,
        0.008_330_563_433_362_871,
        0.007_573_675_487_951_841,
        0.006_942_840_107_209_53,
        0.006_408_994_188_004_207,
        0.005_951_370_112_758_848,
        0.005_554_733_551_962_801,
    ];
    if (n as usize) < TABLE.len() {
        return TABLE[n as usize];
    }
    // lnΓ(n + 1) remainder equals the remainder of lnΓ(n) since both share
    // the same series in 1/n.
    stirling_remainder(n as f64)
}

/// Deviance term `x ln(x / m) + m - x`, accurate when `x` is close to `m`.
pub(crate) fn bd0(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut sum = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let next = sum + ej / (2 * j + 1) as f64;
            if next == sum {
                return next;
            }
            sum = next;
        }
        return sum;
    }
    x * (x / m).ln() + m - x
}

/// Exact binomial coefficient for `n <= 20` (fits in u64 and f64 exactly).
fn choose_small(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// `ln C(n, k)`.
///
/// Exact integer arithmetic for `n <= 20`; beyond that the coefficient is
/// assembled from Stirling remainders plus an entropy term, which keeps the
/// result within a few ulps for `n` up to 10^6.
pub fn log_choose(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(SnbError::domain(format!("log_choose requires k <= n, got n={n}, k={k}")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    if n <= 20 {
        return Ok((choose_small(n, k) as f64).ln());
    }
    let m = n - k;
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    // k ln(n/k) + m ln(n/m), each written as ln1p of a positive ratio.
    let entropy = kf * (mf / kf).ln_1p() + mf * (kf / mf).ln_1p();
    let corr = stirlerr(n) - stirlerr(k) - stirlerr(m);
    let half_log = 0.5 * (nf / (2.0 * PI * kf * mf)).ln();
    Ok(entropy + corr + half_log)
}

/// Same as [`log_choose`] for arguments already known to be valid.
pub(crate) fn ln_choose_unchecked(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    log_choose(n, k).unwrap_or(f64::NEG_INFINITY)
}

/// `ln B(a, b) = lnΓ(a) + lnΓ(b) - lnΓ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(SnbError::domain(format!(
            "log_beta requires finite a > 0 and b > 0, got a={a}, b={b}"
        )));
    }
    Ok(ln_beta_unchecked(a, b))
}

pub(crate) fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    let (small, big) = if a <= b { (a, b) } else { (b, a) };
    let sum = small + big;
    if small >= STIRLING_MIN {
        // Stirling form: every logarithm is of a ratio below one.
        return LN_SQRT_2PI
            + (small - 0.5) * (small / sum).ln()
            + (big - 0.5) * (big / sum).ln()
            - 0.5 * sum.ln()
            + stirling_remainder(small)
            + stirling_remainder(big)
            - stirling_remainder(sum);
    }
    if big >= STIRLING_MIN {
        // lnΓ(big) - lnΓ(big + small) without cancelling two large values.
        let ratio = -(big - 0.5) * (small / big).ln_1p() - small * sum.ln() + small
            + stirling_remainder(big)
            - stirling_remainder(sum);
        return ln_gamma(small) + ratio;
    }
    ln_gamma(small) + ln_gamma(big) - ln_gamma(sum)
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued fraction (modified Lentz) with the usual symmetry switch when
/// `x > (a + 1) / (a + b + 2)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(SnbError::domain(format!("reg_inc_beta requires 0 <= x <= 1, got {x}")));
    }
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(SnbError::domain(format!(
            "reg_inc_beta requires finite a > 0 and b > 0, got a={a}, b={b}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let value = if x > (a + 1.0) / (a + b + 2.0) {
        1.0 - inc_beta_cf_series(1.0 - x, b, a)?
    } else {
        inc_beta_cf_series(x, a, b)?
    };
    Ok(value.clamp(0.0, 1.0))
}

/// `x^a (1-x)^b / B(a, b)` evaluated without large-term cancellation.
fn inc_beta_prefactor(x: f64, a: f64, b: f64) -> f64 {
    if a.min(b) >= STIRLING_MIN {
        let total = a + b;
        let dev = bd0(a, x * total) + bd0(b, (1.0 - x) * total);
        let corr =
            stirling_remainder(a) + stirling_remainder(b) - stirling_remainder(total);
        return (-dev - corr).exp() * (a * b / (2.0 * PI * total)).sqrt();
    }
    (a * x.ln() + b * (-x).ln_1p() - ln_beta_unchecked(a, b)).exp()
}

fn inc_beta_cf_series(x: f64, a: f64, b: f64) -> Result<f64> {
    let front = inc_beta_prefactor(x, a, b);
    if front == 0.0 {
        return Ok(0.0);
    }
    let cf = beta_continued_fraction(x, a, b)?;
    Ok(front * cf / a)
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(SnbError::Accuracy {
        message: format!(
            "incomplete beta continued fraction did not converge in {CF_MAX_ITER} iterations \
             (x={x}, a={a}, b={b})"
        ),
        estimate: h,
    })
}
