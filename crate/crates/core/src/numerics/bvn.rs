//! Bivariate standard normal CDF.
//!
//! Port of Alan Genz's `BVND` from TVPACK (Drezner & Wesolowsky 1989 with
//! Genz's double-precision modifications). For |ρ| < 0.925 it integrates the
//! ρ-derivative of the CDF with Gauss-Legendre quadrature in the asin(ρ)
//! variable; closer to ±1 it uses the tail expansion about the singular
//! correlation plus a quadrature of the remainder.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use super::normal::norm_cdf;
use super::{Correlation, Probability};

const TWO_PI: f64 = 2.0 * PI;

// (weight, abscissa) pairs on [-1, 0); each is also used mirrored.
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5, -0.932_469_514_203_152_2),
    (0.360_761_573_048_138_4, -0.661_209_386_466_264_5),
    (0.467_913_934_572_690_4, -0.238_619_186_083_197_0),
];
const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_77, -0.981_560_634_246_719_1),
    (0.106_939_325_995_318_3, -0.904_117_256_370_475_0),
    (0.160_078_328_543_346_4, -0.769_902_674_194_305_0),
    (0.203_167_426_723_065_9, -0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, -0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, -0.125_233_408_511_469_2),
];
const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12, -0.993_128_599_185_094_9),
    (0.040_601_429_800_386_94, -0.963_971_927_277_913_8),
    (0.062_672_048_334_109_06, -0.912_234_428_251_325_9),
    (0.083_276_741_576_704_75, -0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, -0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, -0.636_053_680_726_515_0),
    (0.131_688_638_449_176_6, -0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, -0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, -0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, -0.076_526_521_133_497_33),
];

fn rule(abs_r: f64) -> &'static [(f64, f64)] {
    if abs_r < 0.3 {
        &GL6
    } else if abs_r < 0.75 {
        &GL12
    } else {
        &GL20
    }
}

/// Upper orthant probability P(X > h, Y > k) for finite h, k and |r| < 1
/// (|r| = 1 is handled too, via the limiting formulas).
fn bvnd(h: f64, k: f64, r: f64) -> f64 {
    let quad = rule(r.abs());
    let mut hk = h * k;

    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        let mut bvn = 0.0;
        for &(w, x) in quad {
            for sx in [x, -x] {
                let sn = (0.5 * asr * (sx + 1.0)).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return bvn * asr / (2.0 * TWO_PI) + norm_cdf(-h) * norm_cdf(-k);
    }

    let mut k = k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let mut bvn = 0.0;
    if r.abs() < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * (-0.5 * (b_s / a_s + hk)).exp()
            * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
        if hk > -160.0 {
            let b = b_s.sqrt();
            bvn -= (-0.5 * hk).exp()
                * TWO_PI.sqrt()
                * norm_cdf(-b / a)
                * b
                * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
        }
        a *= 0.5;
        for &(w, x) in quad {
            let xs = (a * (x + 1.0)).powi(2);
            let rs = (1.0 - xs).sqrt();
            bvn += a
                * w
                * ((-b_s / (2.0 * xs) - hk / (1.0 + rs)).exp() / rs
                    - (-0.5 * (b_s / xs + hk)).exp() * (1.0 + c * xs * (1.0 + d * xs)));
            let xs = a_s * (1.0 - x).powi(2) / 4.0;
            let rs = (1.0 - xs).sqrt();
            bvn += a
                * w
                * (-0.5 * (b_s / xs + hk)).exp()
                * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                    - (1.0 + c * xs * (1.0 + d * xs)));
        }
        bvn = -bvn / TWO_PI;
    }
    if r > 0.0 {
        bvn + norm_cdf(-h.max(k))
    } else {
        let mut out = -bvn;
        if k > h {
            if h < 0.0 {
                out += norm_cdf(k) - norm_cdf(h);
            } else {
                out += norm_cdf(-h) - norm_cdf(-k);
            }
        }
        out
    }
}

/// P(Z₁ ≤ x, Z₂ ≤ y) for a standard bivariate normal with correlation `rho`,
/// without argument checks. Infinite limits are accepted.
pub fn bvn(x: f64, y: f64, rho: f64) -> f64 {
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return norm_cdf(y);
    }
    if y == f64::INFINITY {
        return norm_cdf(x);
    }
    // Canonical argument order makes the result exactly symmetric.
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let (px, py) = (norm_cdf(lo), norm_cdf(hi));
    let raw = if rho == 0.0 {
        px * py
    } else if rho >= 1.0 {
        px
    } else if rho <= -1.0 {
        (px + py - 1.0).max(0.0)
    } else {
        bvnd(-lo, -hi, rho)
    };
    // Fréchet bounds; rounding can push the lower bound an ulp past the upper.
    let upper = px.min(py);
    raw.clamp((px + py - 1.0).max(0.0).min(upper), upper)
}

/// Checked bivariate normal CDF.
pub fn bvn_cdf(x: f64, y: f64, rho: Correlation) -> Probability {
    Probability::clamped(bvn(x, y, rho.value()))
}
