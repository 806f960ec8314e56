use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative change from `before` to `after` as a fraction (0.5 = +50%).
pub fn percent_change(before: f64, after: f64) -> Result<f64> {
    if before == 0.0 || !before.is_finite() || !after.is_finite() {
        return Err(Error::Undefined(format!(
            "percent change from {before} to {after} is undefined"
        )));
    }
    Ok((after - before) / before)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-tailed.
    pub p: f64,
}

/// Two-sample, two-tailed t-test without assuming equal variances.
pub fn welch_ttest(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Input(format!(
            "t-test needs at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::Input("samples contain non-finite values".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (qa, qb) = (variance(a) / na, variance(b) / nb);
    let diff = mean(a) - mean(b);
    let se2 = qa + qb;
    if se2 == 0.0 {
        let df = na + nb - 2.0;
        return Ok(if diff == 0.0 {
            TTestResult { t: 0.0, df, p: 1.0 }
        } else {
            TTestResult {
                t: diff.signum() * f64::INFINITY,
                df,
                p: 0.0,
            }
        });
    }
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        p: student_t_two_tailed(t, df),
    })
}

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
pub fn student_t_two_tailed(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
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
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

/// I_x(a, b) by the continued fraction, evaluated with the modified Lentz
/// method.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        for coef in [
            even,
            -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0)),
        ] {
            d = 1.0 + coef * d;
            if d.abs() < TINY {
                d = TINY;
            }
            c = 1.0 + coef / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            h *= d * c;
        }
        if (d * c - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, StudentsT};

    fn oracle_p(t: f64, df: f64) -> f64 {
        2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs())
    }

    #[test]
    fn percent_change_values() {
        let pct = |a, b| (percent_change(a, b).unwrap() * 1000.0).round() / 10.0;
        assert_eq!(pct(1.830, 2.745), 50.0);
        assert_eq!(pct(9.66, 10.9), 12.8);
        assert_eq!(pct(2.962, 3.218), 8.6);
        assert_eq!(pct(1.554, 2.667), 71.6);
        assert_eq!(pct(1.280, 1.850), 44.5);
        assert_eq!(percent_change(3.0, 3.0).unwrap(), 0.0);
        assert!(matches!(percent_change(0.0, 1.0), Err(Error::Undefined(_))));
    }

    #[test]
    fn small_example() {
        let r = welch_ttest(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((r.t + 1.224_744_871_391_589).abs() < 1e-12);
        assert!((r.df - 4.0).abs() < 1e-12);
        assert!((r.p - 0.287_864_134_726_690_8).abs() < 1e-9, "{}", r.p);
    }

    #[test]
    fn degenerate_samples() {
        let r = welch_ttest(&[2.0, 2.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        assert!(r.df > 0.0);
        let r = welch_ttest(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.p, 0.0);
        assert_eq!(r.t, f64::NEG_INFINITY);
        let same = [1.0, 4.0, 2.5, 7.0];
        let r = welch_ttest(&same, &same).unwrap();
        assert_eq!((r.t, r.p), (0.0, 1.0));
        assert!(matches!(
            welch_ttest(&[1.0], &[1.0, 2.0]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn incomplete_beta_known_values() {
        assert!((regularized_incomplete_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-14);
        assert!((regularized_incomplete_beta(2.0, 3.0, 0.4) - 0.5248).abs() < 1e-12);
        assert!((regularized_incomplete_beta(0.5, 0.5, 0.5) - 0.5).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn matches_reference_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let na = rng.gen_range(3..=50);
            let nb = rng.gen_range(3..=50);
            let shift: f64 = rng.gen_range(-2.0..2.0);
            let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0.0..10.0)).collect();
            let b: Vec<f64> = (0..nb)
                .map(|_| rng.gen_range(0.0..10.0) * rng.gen_range(0.5..2.0) + shift)
                .collect();
            let r = welch_ttest(&a, &b).unwrap();
            assert!((r.p - oracle_p(r.t, r.df)).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn p_is_symmetric_and_bounded(
            a in proptest::collection::vec(-100.0f64..100.0, 2..30),
            b in proptest::collection::vec(-100.0f64..100.0, 2..30),
        ) {
            let ab = welch_ttest(&a, &b).unwrap();
            let ba = welch_ttest(&b, &a).unwrap();
            prop_assert!((0.0..=1.0).contains(&ab.p));
            prop_assert!(ab.df > 0.0);
            prop_assert!((ab.p - ba.p).abs() < 1e-12);
            prop_assert!((ab.t + ba.t).abs() < 1e-9 * ab.t.abs().max(1.0));
        }

        #[test]
        fn percent_changes_compose(a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let r_ab = percent_change(a, b).unwrap();
            let r_ba = percent_change(b, a).unwrap();
            prop_assert!(((1.0 + r_ab) * (1.0 + r_ba) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn t_tail_matches_reference(t in -20.0f64..20.0, df in 0.5f64..500.0) {
            prop_assert!((student_t_two_tailed(t, df) - oracle_p(t, df)).abs() < 1e-8);
        }
    }
}
