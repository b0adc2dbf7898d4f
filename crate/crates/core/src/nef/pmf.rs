//! Binomial and Poisson point probabilities via Loader's saddle-point
//! expansion ("Fast and accurate computation of binomial probabilities",
//! 2000), which keeps full relative precision far into the tails.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

const LN_2PI: f64 = 1.837_877_066_409_345_483_560_659_472_811;

/// stirlerr(n) = ln n! - ln(√(2π) n^(n+1/2) e^-n) at n = 0..=15.
const STIRLERR_SMALL: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_094,
    0.027_677_925_684_998_339_149,
    0.020_790_672_103_765_093_112,
    0.016_644_691_189_821_192_163,
    0.013_876_128_823_070_747_999,
    0.011_896_709_945_891_770_095,
    0.010_411_265_261_972_096_497,
    0.009_255_462_182_712_732_917_7,
    0.008_330_563_433_362_871_256_5,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_865_7,
    0.006_408_994_188_004_207_068_4,
    0.005_951_370_112_758_847_735_6,
    0.005_554_733_551_962_801_371,
];

fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        return STIRLERR_SMALL[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term x ln(x/np) + np - x, computed without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

/// P(X = x) for X ~ Binomial(n, p), with q = 1 - p supplied separately.
pub(crate) fn dbinom(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if x > n {
        return 0.0;
    }
    if p == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    // Evaluate from the smaller count so the result is exactly symmetric under
    // (x, p, q) -> (n - x, q, p).
    if 2 * x > n {
        return dbinom(n - x, n, q, p);
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if x == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let xf = x as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// P(X = x) for X ~ Poisson(lambda).
pub(crate) fn dpois(x: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if x == 0 {
        return (-lambda).exp();
    }
    let xf = x as f64;
    (-stirlerr(x) - bd0(xf, lambda)).exp() / (2.0 * PI * xf).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn stirlerr_is_continuous_across_table_edge() {
        let direct = |n: u64| {
            let nf = n as f64;
            ln_factorial(n) - (nf + 0.5) * nf.ln() + nf - 0.5 * LN_2PI
        };
        for n in 1..=40 {
            assert!((stirlerr(n) - direct(n)).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn small_binomial_rows() {
        for (x, want) in [(0, 0.25), (1, 0.5), (2, 0.25)] {
            assert!((dbinom(x, 2, 0.5, 0.5) - want).abs() <= 1e-15);
        }
        let total: f64 = (0..=300).map(|x| dbinom(x, 300, 0.37, 0.63)).sum();
        for x in 0..=301 {
            assert_eq!(dbinom(x, 301, 0.5, 0.5), dbinom(301 - x, 301, 0.5, 0.5));
            assert_eq!(dbinom(x, 301, 0.3, 0.7), dbinom(301 - x, 301, 0.7, 0.3));
        }
        assert!((total - 1.0).abs() < 1e-13);
        // 10 choose 3 * 0.2^3 * 0.8^7
        let want = 120.0 * 0.008 * 0.8f64.powi(7);
        assert!((dbinom(3, 10, 0.2, 0.8) - want).abs() < 1e-16);
    }

    #[test]
    fn poisson_values() {
        assert!((dpois(0, 2.0) - (-2.0f64).exp()).abs() < 1e-17);
        let want = 2.0f64.powi(5) * (-2.0f64).exp() / 120.0;
        assert!((dpois(5, 2.0) - want).abs() < 1e-16);
        let total: f64 = (0..2000).map(|x| dpois(x, 800.0)).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }
}
