//! Special functions for t/F inference and chi-square thresholds.
//!
//! The regularized incomplete beta function is the workhorse: both t and F
//! tail probabilities reduce to it. Its prefactor is evaluated in the log
//! domain so tail probabilities far below 1e-300 keep a usable base-10
//! logarithm even when the double value underflows; every p-value in this
//! crate is therefore available both as a double and as a log10.

use crate::error::{Error, Result};

const CF_EPS: f64 = 1e-15;
const CF_FPMIN: f64 = 1e-300;
const CF_MAX_ITER: usize = 500;
const ROOT_TOL: f64 = 1e-10;
const ROOT_MAX_ITER: usize = 300;

/// Natural log of the gamma function for x > 0 (Lanczos, g = 7, n = 9).
/// Returns NaN outside the domain.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Lentz continued fraction for the incomplete beta (valid when x is below
/// the symmetry switch point (a+1)/(a+b+2)).
fn beta_cf(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_FPMIN {
        d = CF_FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence(format!(
        "incomplete beta continued fraction at x={x}, a={a}, b={b}"
    )))
}

fn check_beta_domain(x: f64, a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "incomplete beta requires a > 0 and b > 0, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "incomplete beta requires x in [0,1], got {x}"
        )));
    }
    Ok(())
}

/// ln of the continued-fraction piece evaluated on its convergent side,
/// tagged with whether the symmetry swap was applied.
struct LnIncBeta {
    swapped: bool,
    ln_piece: f64,
}

fn ln_inc_beta_piece(x: f64, a: f64, b: f64) -> Result<LnIncBeta> {
    let swapped = x >= (a + 1.0) / (a + b + 2.0);
    let (xx, aa, bb) = if swapped { (1.0 - x, b, a) } else { (x, a, b) };
    // ln of x^a (1-x)^b / (a·B(a,b)), all in the log domain.
    let ln_front = aa * xx.ln() + bb * (-xx).ln_1p() - ln_beta(aa, bb) - aa.ln();
    let cf = beta_cf(xx, aa, bb)?;
    Ok(LnIncBeta {
        swapped,
        ln_piece: ln_front + cf.ln(),
    })
}

/// Regularized incomplete beta I_x(a, b).
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_domain(x, a, b)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let parts = ln_inc_beta_piece(x, a, b)?;
    let piece = parts.ln_piece.exp();
    let value = if parts.swapped { 1.0 - piece } else { piece };
    Ok(value.clamp(0.0, 1.0))
}

/// Natural log of I_x(a, b), finite down to arbitrarily deep tails
/// (−inf exactly at x = 0).
pub fn ln_regularized_incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    check_beta_domain(x, a, b)?;
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let parts = ln_inc_beta_piece(x, a, b)?;
    if parts.swapped {
        // I = 1 - J with J < 1 on the convergent side.
        Ok((-parts.ln_piece.exp()).ln_1p())
    } else {
        Ok(parts.ln_piece)
    }
}

fn check_df(df: f64, what: &str) -> Result<()> {
    if !(df > 0.0) {
        return Err(Error::Domain(format!(
            "{what} requires positive degrees of freedom, got {df}"
        )));
    }
    Ok(())
}

/// Two-sided p-value of a t statistic: p = I_x(df/2, 1/2) with
/// x = df/(df + t²).
pub fn t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    check_df(df, "t_two_sided_p")?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, df / 2.0, 0.5)
}

/// Base-10 log of the two-sided t p-value; stays finite where the double
/// underflows.
pub fn t_two_sided_log10_p(t: f64, df: f64) -> Result<f64> {
    check_df(df, "t_two_sided_log10_p")?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = df / (df + t * t);
    Ok(ln_regularized_incomplete_beta(x, df / 2.0, 0.5)? / std::f64::consts::LN_10)
}

/// Survival function of the F distribution: I_x(d2/2, d1/2) with
/// x = d2/(d2 + d1·f).
pub fn f_sf(f: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1, "f_sf")?;
    check_df(d2, "f_sf")?;
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("f_sf requires f >= 0, got {f}")));
    }
    let x = d2 / (d2 + d1 * f);
    regularized_incomplete_beta(x, d2 / 2.0, d1 / 2.0)
}

/// Base-10 log of the F survival function.
pub fn f_sf_log10(f: f64, d1: f64, d2: f64) -> Result<f64> {
    check_df(d1, "f_sf_log10")?;
    check_df(d2, "f_sf_log10")?;
    if !(f >= 0.0) {
        return Err(Error::Domain(format!("f_sf requires f >= 0, got {f}")));
    }
    let x = d2 / (d2 + d1 * f);
    Ok(ln_regularized_incomplete_beta(x, d2 / 2.0, d1 / 2.0)? / std::f64::consts::LN_10)
}

/// Quantile of the t distribution, found by bisecting `t_two_sided_p`
/// (monotone in |t|) to an interval of width 1e-10.
pub fn t_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df, "t_quantile")?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "t_quantile requires p in (0,1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let upper = p.max(1.0 - p);
    let alpha = 2.0 * (1.0 - upper);
    let mut hi = 1.0;
    let mut iter = 0;
    while t_two_sided_p(hi, df)? > alpha {
        hi *= 2.0;
        iter += 1;
        if iter > 1100 {
            return Err(Error::NonConvergence(format!(
                "t_quantile bracket expansion at p={p}, df={df}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..ROOT_MAX_ITER {
        if hi - lo <= ROOT_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if t_two_sided_p(mid, df)? > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo > ROOT_TOL {
        return Err(Error::NonConvergence(format!(
            "t_quantile bisection at p={p}, df={df}"
        )));
    }
    let t = 0.5 * (lo + hi);
    Ok(if p >= 0.5 { t } else { -t })
}

/// Regularized lower incomplete gamma P(a, x) (series below a+1, continued
/// fraction above), used for chi-square thresholds.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("gamma_p requires a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("gamma_p requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_front = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..=CF_MAX_ITER {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * CF_EPS {
                return Ok((sum.ln() + ln_front).exp().clamp(0.0, 1.0));
            }
        }
        Err(Error::NonConvergence(format!(
            "incomplete gamma series at a={a}, x={x}"
        )))
    } else {
        // Lentz continued fraction for Q(a, x).
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / CF_FPMIN;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=CF_MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < CF_FPMIN {
                d = CF_FPMIN;
            }
            c = b + an / c;
            if c.abs() < CF_FPMIN {
                c = CF_FPMIN;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < CF_EPS {
                let q = (ln_front + h.ln()).exp();
                return Ok((1.0 - q).clamp(0.0, 1.0));
            }
        }
        Err(Error::NonConvergence(format!(
            "incomplete gamma continued fraction at a={a}, x={x}"
        )))
    }
}

/// Chi-square quantile, bisecting the regularized gamma CDF.
pub fn chi_square_quantile(p: f64, df: f64) -> Result<f64> {
    check_df(df, "chi_square_quantile")?;
    if !(p >= 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "chi_square_quantile requires p in [0,1), got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let cdf = |x: f64| gamma_p(df / 2.0, x / 2.0);
    let mut hi = df.max(1.0);
    let mut iter = 0;
    while cdf(hi)? < p {
        hi *= 2.0;
        iter += 1;
        if iter > 1100 {
            return Err(Error::NonConvergence(format!(
                "chi_square_quantile bracket expansion at p={p}, df={df}"
            )));
        }
    }
    let mut lo = 0.0;
    for _ in 0..ROOT_MAX_ITER {
        if hi - lo <= ROOT_TOL * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Split a base-10 log into a (mantissa, exponent) pair with the mantissa in
/// [1, 10), so deep tail probabilities survive serialization in the familiar
/// scientific form.
pub fn mantissa_exponent(log10_value: f64) -> (f64, i32) {
    let exponent = log10_value.floor();
    let mantissa = 10f64.powf(log10_value - exponent);
    (mantissa, exponent as i32)
}
