//! Number formatting and report emission shared by all subcommands.
//!
//! Reports print twelve significant digits; values matching a small
//! rational (denominator up to 10^4, within 1e-12) carry the fraction
//! alongside so table entries stay recognizably exact.

use serde::Serialize;

pub const SIG_DIGITS: usize = 12;

/// Formats with a fixed number of significant digits.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = x.abs().log10().floor() as i32;
    if mag >= sig as i32 || mag < -4 {
        format!("{:.*e}", sig - 1, x)
    } else {
        let decimals = (sig as i32 - 1 - mag).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

/// Nearest fraction with denominator at most 10^4, if within 1e-12.
pub fn approx_fraction(x: f64) -> Option<(i64, u64)> {
    if !x.is_finite() || x.abs() > 1e7 {
        return None;
    }
    let neg = x < 0.0;
    let mut a = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0u64, a.floor() as i64, 1u64);
    if q1 > 0 && (x.abs() - p1 as f64).abs() <= 1e-12 {
        return Some((if neg { -p1 } else { p1 }, 1));
    }
    for _ in 0..40 {
        let frac = a - a.floor();
        if frac < 1e-15 {
            break;
        }
        a = 1.0 / frac;
        let ai = a.floor();
        if ai.is_nan() || ai >= 1e15 {
            break;
        }
        let p2 = (ai as i64).checked_mul(p1)?.checked_add(p0)?;
        let q2 = (ai as u64).checked_mul(q1)?.checked_add(q0)?;
        if q2 > 10_000 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x.abs() - p1 as f64 / q1 as f64).abs() <= 1e-12 {
            break;
        }
    }
    if q1 == 0 {
        return None;
    }
    let approx = p1 as f64 / q1 as f64;
    if (x.abs() - approx).abs() <= 1e-12 {
        Some((if neg { -p1 } else { p1 }, q1))
    } else {
        None
    }
}

/// Twelve significant digits, with the matching fraction when one exists.
pub fn fmt_value(x: f64) -> String {
    let base = fmt_sig(x, SIG_DIGITS);
    match approx_fraction(x) {
        Some((p, q)) if q > 1 => format!("{base} (= {p}/{q})"),
        _ => base,
    }
}

/// A log-scale value with its probability-scale counterpart; the log is
/// omitted from machine output when it is minus infinity.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogValue {
    pub log: Option<f64>,
    pub value: f64,
}

impl LogValue {
    pub fn new(log: f64) -> LogValue {
        LogValue {
            log: log.is_finite().then_some(log),
            value: log.exp(),
        }
    }

    pub fn render(&self) -> String {
        match self.log {
            Some(l) => format!("{} (log {})", fmt_value(self.value), fmt_sig(l, SIG_DIGITS)),
            None => "0 (log -inf)".to_string(),
        }
    }
}

impl From<coarsedata::LogLikelihood> for LogValue {
    fn from(l: coarsedata::LogLikelihood) -> LogValue {
        LogValue::new(l.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_forms() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(0.5, 12), "0.500000000000");
        assert_eq!(fmt_sig(1.0 / 27.0, 12), "0.0370370370370");
        assert_eq!(fmt_sig(1e-5, 12), "1.00000000000e-5");
        assert_eq!(fmt_sig(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn fraction_recovery() {
        assert_eq!(approx_fraction(0.5), Some((1, 2)));
        assert_eq!(approx_fraction(1.0 / 3.0), Some((1, 3)));
        assert_eq!(approx_fraction(4.0 / 27.0), Some((4, 27)));
        assert_eq!(approx_fraction(1.0 / 2916.0), Some((1, 2916)));
        assert_eq!(approx_fraction(-2.0 / 3.0), Some((-2, 3)));
        assert_eq!(approx_fraction(0.123456789), None);
        assert_eq!(approx_fraction(1.0), Some((1, 1)));
        // Denominators past the cap are not reported.
        assert_eq!(approx_fraction(1.0 / 10_007.0), None);
    }

    #[test]
    fn values_carry_fractions() {
        assert_eq!(fmt_value(0.25), "0.250000000000 (= 1/4)");
        assert_eq!(fmt_value(1.0), "1.00000000000");
    }
}
