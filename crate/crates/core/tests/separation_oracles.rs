//! Independent checks of the separation-model distributions: direct
//! convolution, closed-form moments, plain Riemann sums and sampling.

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rid_rvo::separation::*;

/// Midpoint-rule integral, deliberately unrelated to the library quadrature.
fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

fn convolved_half_normals(x: f64, si: f64, sj: f64) -> f64 {
    let hn = |t: f64, s: f64| (2.0 / PI).sqrt() / s * (-t * t / (2.0 * s * s)).exp();
    midpoint(|t| hn(t, si) * hn(x - t, sj), 0.0, x, 4000)
}

#[test]
fn densities_integrate_to_one() {
    let tri = midpoint(|x| triangular_mac_pdf(x, AF_MAX).unwrap(), 0.0, AF_MAX, 200_000);
    assert!((tri - 1.0).abs() < 1e-6, "triangular {tri}");
    for sigma in [1.9, 3.5, 4.85, 10.0] {
        let hn = midpoint(|x| half_normal_pdf(x, sigma).unwrap(), 0.0, 40.0 * sigma, 200_000);
        assert!((hn - 1.0).abs() < 1e-6, "half-normal {sigma}: {hn}");
        let sum = midpoint(|x| loc_error_sum_pdf(x, sigma, sigma).unwrap(), 0.0, 60.0 * sigma, 200_000);
        assert!((sum - 1.0).abs() < 1e-6, "sum {sigma}: {sum}");
    }
    let mixed = midpoint(|x| loc_error_sum_pdf(x, 1.9, 10.0).unwrap(), 0.0, 600.0, 200_000);
    assert!((mixed - 1.0).abs() < 1e-6);
}

#[test]
fn sum_density_equals_direct_convolution() {
    for (si, sj) in [(1.9, 1.9), (3.5, 10.0), (4.85, 4.85), (10.0, 1.9)] {
        for k in 1..40 {
            let x = k as f64 * 0.1 * (si + sj);
            let got = loc_error_sum_pdf(x, si, sj).unwrap();
            let want = convolved_half_normals(x, si, sj);
            assert!((got - want).abs() < 1e-6 * want.max(1e-3), "({si},{sj}) x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn sum_mean_equals_closed_form() {
    for (si, sj) in [(1.9, 1.9), (3.5, 3.5), (4.85, 4.85), (10.0, 10.0), (1.9, 10.0)] {
        let closed = (si + sj) * (2.0 / PI).sqrt();
        let got = loc_error_sum_mean(si, sj).unwrap();
        assert!((got - closed).abs() < 1e-6, "{got} vs {closed}");
    }
}

#[test]
fn cdf_matches_midpoint_integral() {
    for x in [1.0, 5.0, 17.3, 40.0] {
        let got = loc_error_sum_cdf(x, 3.5, 3.5).unwrap();
        let want = midpoint(|t| loc_error_sum_pdf(t, 3.5, 3.5).unwrap(), 0.0, x, 100_000);
        assert!((got - want).abs() < 1e-7);
    }
}

#[test]
fn frozen_quantiles_and_means() {
    // values from this implementation, pinned against regressions
    let frozen = [(1.9, 3.0320, 9.3526), (3.5, 5.5852, 17.2285), (4.85, 7.7395, 23.8738), (10.0, 15.9577, 49.2244)];
    for (sigma, mean, q) in frozen {
        assert!((loc_error_sum_mean(sigma, sigma).unwrap() - mean).abs() < 1e-3);
        assert!((loc_error_sum_quantile(0.999, sigma, sigma).unwrap() - q).abs() < 1e-3);
    }
}

#[test]
fn histogram_of_sampled_sums_matches_density() {
    let (si, sj) = (10.0, 10.0);
    let n = 1_000_000;
    let bins = 50;
    let width = 1.5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = vec![0usize; bins];
    for _ in 0..n {
        let x = sample_half_normal(&mut rng, si) + sample_half_normal(&mut rng, sj);
        let b = (x / width) as usize;
        if b < bins {
            counts[b] += 1;
        }
    }
    let expected: Vec<f64> = (0..bins)
        .map(|b| {
            let lo = b as f64 * width;
            loc_error_sum_cdf(lo + width, si, sj).unwrap() - loc_error_sum_cdf(lo, si, sj).unwrap()
        })
        .collect();
    let peak = expected.iter().cloned().fold(0.0, f64::max);
    let max_dev =
        counts.iter().zip(&expected).map(|(&c, &p)| (c as f64 / n as f64 - p).abs() / peak).fold(0.0, f64::max);
    assert!(max_dev < 0.02, "max bin deviation {max_dev}");
}

#[test]
fn sampled_quantile_agrees_with_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut xs: Vec<f64> =
        (0..400_000).map(|_| sample_half_normal(&mut rng, 3.5) + sample_half_normal(&mut rng, 3.5)).collect();
    xs.sort_by(f64::total_cmp);
    let empirical = xs[(0.999 * xs.len() as f64) as usize];
    let q = loc_error_sum_quantile(0.999, 3.5, 3.5).unwrap();
    assert!((empirical - q).abs() / q < 0.02, "{empirical} vs {q}");
}

#[test]
fn radial_error_magnitude_is_half_normal_and_bearing_uniform() {
    let sigma = 10.0;
    let n = 50_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mags = Vec::with_capacity(n);
    let mut east = 0usize;
    for _ in 0..n {
        let e = sample_radial_error(&mut rng, sigma);
        mags.push(e.norm());
        if e.x > 0.0 {
            east += 1;
        }
    }
    mags.sort_by(f64::total_cmp);
    let ks = mags
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = half_normal_cdf(x, sigma).unwrap();
            (f - k as f64 / n as f64).abs().max(((k + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic
    assert!(ks < 1.63 / (n as f64).sqrt(), "KS {ks}");
    assert!((east as f64 / n as f64 - 0.5).abs() < 0.01);
}

#[test]
fn mobility_quantile_is_three_sigma_at_997() {
    let c3 = SpeedCategory::CATEGORY_3;
    let q = relative_displacement_quantile(0.997, c3, c3, 0.1).unwrap();
    let sd = 0.1 * (2.0f64).sqrt() * (30.7 - 15.4) / 3.0;
    assert!((q - (3.08 + 3.0 * sd)).abs() < 1e-12);
    assert!((q - 5.24).abs() < 0.01);
    assert!(relative_displacement_quantile(0.997, c3, c3, 1.0).unwrap() >= 52.0);
}

#[test]
fn worked_unmac_examples() {
    let b = pairwise_unmac_from_airframes(7.5, 7.5, 30.0, 30.0, 30.7, 30.7, 0.1).unwrap();
    assert!((b.unmac_radius - 73.64).abs() < 1e-9);
    let b = pairwise_unmac_from_airframes(2.0, 2.0, 5.0, 5.0, 10.0, 10.0, 0.1).unwrap();
    assert!((b.unmac_radius - 14.0).abs() < 1e-12);
    let b = pairwise_unmac_from_airframes(3.0, 5.0, 0.0, 0.0, 0.0, 0.0, 0.1).unwrap();
    assert_eq!(b.unmac_radius, b.mac_radius);
    assert!(pairwise_unmac_from_airframes(3.0, 5.0, -1.0, 0.0, 0.0, 0.0, 0.1).is_err());
}

proptest! {
    #[test]
    fn unmac_is_monotone_in_every_input(
        d in 0.1f64..7.5, eps in 0.0f64..50.0, v in 0.0f64..50.0, dt in 0.01f64..1.0, bump in 0.01f64..5.0,
    ) {
        let base = pairwise_unmac_from_airframes(d, d, eps, eps, v, v, dt).unwrap().unmac_radius;
        let bumped = [
            pairwise_unmac_from_airframes(d + bump, d, eps, eps, v, v, dt).unwrap(),
            pairwise_unmac_from_airframes(d, d, eps + bump, eps, v, v, dt).unwrap(),
            pairwise_unmac_from_airframes(d, d, eps, eps, v + bump, v, dt).unwrap(),
            pairwise_unmac_from_airframes(d, d, eps, eps, v, v, dt + bump).unwrap(),
        ];
        for b in bumped {
            prop_assert!(b.unmac_radius > base);
            prop_assert!(b.unmac_radius >= b.mac_radius);
        }
    }

    #[test]
    fn stadium_contains_its_swept_disks(
        d in 0.1f64..7.5, eps in 0.0f64..20.0, vx in -40.0f64..40.0, vy in -40.0f64..40.0, s in 0.0f64..1.0,
    ) {
        let st = unmac_known_direction(d, eps, rid_rvo::Vec2::new(vx, vy), 0.1).unwrap();
        let origin = rid_rvo::Vec2::new(1.0, -2.0);
        let centre = origin + st.displacement * s;
        prop_assert!(st.contains(origin, centre));
        let unknown = unmac_diameter_unknown_dir(d, eps, (vx * vx + vy * vy).sqrt(), 0.1).unwrap();
        prop_assert!(st.max_extent() <= unknown + 1e-9);
    }

    #[test]
    fn quantile_inverts_cdf(p in 0.05f64..0.999, si in 0.5f64..15.0, sj in 0.5f64..15.0) {
        let q = loc_error_sum_quantile(p, si, sj).unwrap();
        let back = loc_error_sum_cdf(q, si, sj).unwrap();
        prop_assert!((back - p).abs() < 1e-5);
    }
}
