//! Arithmetic on the circle R/Z.
//!
//! Every coordinate in the crate lives in `[0, 1)`. Products of large
//! integers with reals are reduced without ever forming the full product,
//! so `n·α mod 1` keeps ~1e-16 absolute accuracy for any `n` that fits in
//! an `i64`.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `x - floor(x)`, clamped so that the result is strictly below 1.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `m·a mod 1` evaluated with an error-free product.
///
/// For `|m| ≤ 2^53` the product is split as `p + e` with `p = fl(m·a)` and
/// `e` recovered exactly by a fused multiply-add; `p - floor(p)` is exact,
/// so the only rounding is in the final additions. Larger `m` are split into
/// 32-bit limbs, using that `a·2^32` is representable.
#[inline]
pub fn frac_mul(m: i64, a: f64) -> f64 {
    const EXACT: i64 = 1 << 53;
    if m == 0 || a == 0.0 {
        return 0.0;
    }
    if (-EXACT..=EXACT).contains(&m) {
        let mf = m as f64;
        let p = mf * a;
        let e = mf.mul_add(a, -p);
        frac(frac(p) + e)
    } else {
        let hi = m >> 32;
        let lo = m & 0xFFFF_FFFF;
        frac(frac_mul(hi, a * 4_294_967_296.0) + frac_mul(lo, a))
    }
}

/// `m·a mod 1` for an `i128` multiplier.
pub fn frac_mul_wide(m: i128, a: f64) -> f64 {
    if let Ok(small) = i64::try_from(m) {
        return frac_mul(small, a);
    }
    let hi = (m >> 32) as i64;
    let lo = (m & 0xFFFF_FFFF) as i64;
    frac(frac_mul(hi, a * 4_294_967_296.0) + frac_mul(lo, a))
}

/// `(a·b) mod 1` with the rounding error of the product carried along.
#[inline]
pub fn frac_prod(a: f64, b: f64) -> f64 {
    let p = a * b;
    let e = a.mul_add(b, -p);
    frac(frac(p) + e)
}

/// `m·(a·b) mod 1`, treating the real product `a·b` exactly.
pub fn frac_mul_prod(m: i64, a: f64, b: f64) -> f64 {
    let p = a * b;
    let e = a.mul_add(b, -p);
    frac(frac_mul(m, p) + frac_mul_small_real(m, e))
}

// `m·e mod 1` when `e` is a tiny rounding residual.
fn frac_mul_small_real(m: i64, e: f64) -> f64 {
    frac((m as f64) * e)
}

/// Signed distance from `x` to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn centered(x: f64) -> f64 {
    let r = frac(x);
    if r > 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Distance between two points of R/Z.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    centered(a - b).abs()
}

/// `e(t) = exp(2πi t)`, with `t` first reduced mod 1.
#[inline]
pub fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * frac(t)).sin_cos();
    Complex64::new(c, s)
}

/// `|1 - e(θ)| = 2|sin(πθ)|`.
#[inline]
pub fn one_minus_e_abs(theta: f64) -> f64 {
    2.0 * (std::f64::consts::PI * centered(theta)).sin().abs()
}

/// Normalized geometric sum `G_N(θ) = (1/N) Σ_{n<N} e(nθ)`.
///
/// `e(Nθ)` is formed from `N·θ mod 1` with [`frac_mul`], so the closed form
/// stays accurate for `N` up to `2^53`.
pub fn geometric_mean(theta: f64, n: u64) -> Complex64 {
    let theta = frac(theta);
    let nf = n as f64;
    if theta == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let denom = Complex64::new(1.0, 0.0) - e(theta);
    if denom.norm() < 1e-300 {
        return Complex64::new(1.0, 0.0);
    }
    let numer = Complex64::new(1.0, 0.0) - e(frac_mul(n as i64, theta));
    numer / denom / nf
}

/// `|G_N(θ)| ≤ 2 / (N |1 - e(θ)|)`, or 1 when θ is an integer.
pub fn geometric_bound(theta: f64, n: u64) -> f64 {
    let d = one_minus_e_abs(theta);
    if d == 0.0 {
        1.0
    } else {
        (2.0 / (n as f64 * d)).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_stays_in_unit_interval() {
        assert_eq!(frac(-1e-300), 0.0);
        assert_eq!(frac(2.25), 0.25);
        assert!(frac(-0.25) - 0.75 < 1e-16);
    }

    #[test]
    fn frac_mul_matches_integer_reference() {
        // a = 3/8 is exact; m·a mod 1 has a closed form on eighths.
        for m in [1i64, 7, 1 << 40, (1 << 60) + 3, -5, -(1 << 58) - 1] {
            let expect = ((m.rem_euclid(8)) * 3 % 8) as f64 / 8.0;
            assert_eq!(frac_mul(m, 0.375), expect, "m = {m}");
        }
    }

    #[test]
    fn frac_mul_golden_large_n() {
        // 10^12 · α mod 1 against a 128-bit fixed-point evaluation of the double α.
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let bits = alpha.to_bits();
        let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let exp = ((bits >> 52) & 0x7ff) as i32 - 1075; // alpha = mant · 2^exp
        let n: u128 = 1_000_000_000_000;
        let prod = n * mant as u128;
        let shift = (-exp) as u32;
        let frac_bits = prod & ((1u128 << shift) - 1);
        let expect = frac_bits as f64 / (1u128 << shift) as f64;
        assert!((frac_mul(n as i64, alpha) - expect).abs() < 1e-15);
    }

    #[test]
    fn geometric_mean_matches_direct_sum() {
        let theta = 0.3819660112501051;
        let n = 1000;
        let mut direct = Complex64::new(0.0, 0.0);
        for k in 0..n {
            direct += e(k as f64 * theta);
        }
        direct /= n as f64;
        assert!((geometric_mean(theta, n) - direct).norm() < 1e-12);
        assert!(geometric_mean(theta, n).norm() <= geometric_bound(theta, n) + 1e-15);
        assert_eq!(geometric_mean(0.0, 17), Complex64::new(1.0, 0.0));
    }
}
