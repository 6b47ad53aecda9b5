//! CSV and PGM writers. Numbers carry 17 significant digits.

use revdiff_core::Complex64;

/// `x_m,re,im,abs2`, one row per sample.
pub fn correlation_csv(x: &[f64], correlation: &[Complex64]) -> String {
    let mut out = String::from("x_m,re,im,abs2\n");
    for (x, c) in x.iter().zip(correlation) {
        out.push_str(&format!("{x:.16e},{:.16e},{:.16e},{:.16e}\n", c.re, c.im, c.norm_sqr()));
    }
    out
}

/// `x_m,i_plus,i_minus,diff,sum`.
pub fn ports_csv(x: &[f64], i_plus: &[f64], i_minus: &[f64]) -> String {
    let mut out = String::from("x_m,i_plus,i_minus,diff,sum\n");
    for ((x, p), m) in x.iter().zip(i_plus).zip(i_minus) {
        out.push_str(&format!("{x:.16e},{p:.16e},{m:.16e},{:.16e},{:.16e}\n", p - m, p + m));
    }
    out
}

/// Binary P5 image, min-max scaled to 0..=255. A flat image is all zeros.
pub fn pgm(width: usize, height: usize, values: &[f64]) -> Vec<u8> {
    assert_eq!(values.len(), width * height, "image size mismatch");
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    let range = hi - lo;
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(values.iter().map(|v| {
        if range > 0.0 && range.is_finite() {
            ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    out
}
