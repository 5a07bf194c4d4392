//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are printed in
//! order and uncaptured. Criteria listed in `KNOWN_FAILURES` are reported but
//! do not fail the target; any other failure does.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rid_rvo::analysis::{self, AnalysisParams};
use rid_rvo::remoteid::{decode, encode, MessageFormat, RemoteIdMessage, UavId};
use rid_rvo::rvo::{point_in_vo, rvo_cone_margin, rvo_value, RvoConstraint};
use rid_rvo::separation::*;
use rid_rvo::sim::{run_monte_carlo, MonteCarloResult, ScenarioConfig};
use rid_rvo::{Error, Vec2};
use statrs::distribution::{Beta, ContinuousCDF};

/// Criteria that cannot pass as stated; the reasons are in the README.
const KNOWN_FAILURES: &[u32] = &[2];

struct Line {
    id: u32,
    pass: bool,
    title: &'static str,
    detail: String,
}

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1(tables: &analysis::AnalysisTables, secs: f64) -> Line {
    let expected = [(1.9, 9.34), (3.5, 17.3), (4.85, 23.94), (10.0, 49.5)];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (sigma, q) in expected {
        let v = tables.loc_quantile(sigma, sigma).map(|r| r.q999).unwrap_or(f64::NAN);
        worst = worst.max(rel(v, q));
        got.push(format!("{v:.2}"));
    }
    Line {
        id: 1,
        pass: worst <= 0.03 && secs < 10.0,
        title: "localization 99.9% quantiles within 3%, analyze < 10 s",
        detail: format!(
            "q = [{}] vs [9.34, 17.3, 23.94, 49.5], worst {:.2}%, {secs:.2} s",
            got.join(", "),
            100.0 * worst
        ),
    }
}

fn criterion_2(tables: &analysis::AnalysisTables) -> Line {
    let expected = [(1.9, 3.0), (3.5, 5.6), (4.85, 7.4), (10.0, 16.0)];
    let mut parts = Vec::new();
    let mut pass = true;
    for (sigma, m) in expected {
        let v = tables.loc_quantile(sigma, sigma).map(|r| r.mean).unwrap_or(f64::NAN);
        let ok = rel(v, m) <= 0.03;
        pass &= ok;
        parts.push(format!("{v:.3}{}", if ok { "" } else { "(!)" }));
    }
    Line {
        id: 2,
        pass,
        title: "localization sum means within 3% of 3 / 5.6 / 7.4 / 16 m",
        detail: format!("means = [{}]", parts.join(", ")),
    }
}

fn criterion_3() -> Line {
    let mut worst: f64 = 0.0;
    worst = worst.max((midpoint(|x| triangular_mac_pdf(x, AF_MAX).unwrap(), 0.0, AF_MAX, 200_000) - 1.0).abs());
    for sigma in [1.9, 3.5, 4.85, 10.0] {
        worst = worst.max((midpoint(|x| half_normal_pdf(x, sigma).unwrap(), 0.0, 40.0 * sigma, 200_000) - 1.0).abs());
        worst = worst
            .max((midpoint(|x| loc_error_sum_pdf(x, sigma, sigma).unwrap(), 0.0, 60.0 * sigma, 200_000) - 1.0).abs());
    }

    let (sigma, n, bins, width) = (10.0, 1_000_000, 50, 1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut counts = vec![0usize; bins];
    for _ in 0..n {
        let x = sample_half_normal(&mut rng, sigma) + sample_half_normal(&mut rng, sigma);
        if let Some(c) = counts.get_mut((x / width) as usize) {
            *c += 1;
        }
    }
    let expected: Vec<f64> = (0..bins)
        .map(|b| {
            let lo = b as f64 * width;
            loc_error_sum_cdf(lo + width, sigma, sigma).unwrap() - loc_error_sum_cdf(lo, sigma, sigma).unwrap()
        })
        .collect();
    let peak = expected.iter().cloned().fold(0.0, f64::max);
    let dev = counts.iter().zip(&expected).map(|(&c, &p)| (c as f64 / n as f64 - p).abs() / peak).fold(0.0, f64::max);
    Line {
        id: 3,
        pass: worst <= 1e-6 && dev < 0.02,
        title: "densities integrate to 1 (1e-6); 10^6-sample histogram within 2%",
        detail: format!("max |integral - 1| = {worst:.1e}, max bin deviation {:.3}% of peak", 100.0 * dev),
    }
}

fn sampled_min_distance(r: Vec2, w: Vec2, t0: f64, t1: f64) -> f64 {
    (0..=10_000).map(|k| (r + w * (t0 + (t1 - t0) * k as f64 / 10_000.0)).norm()).fold(f64::INFINITY, f64::min)
}

fn criterion_4() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checked, mut agreed) = ([0usize; 3], [0usize; 3]);
    for _ in 0..10_000 {
        let mut v = |s: f64| Vec2::new(rng.random_range(-s..s), rng.random_range(-s..s));
        let (p_i, p_j, v_i, v_j, v_new) = (v(100.0), v(100.0), v(30.0), v(30.0), v(30.0));
        let radius = rng.random_range(1.0..40.0);
        let r = p_i - p_j;
        let near_boundary = |f: f64| f.abs() <= 1e-6 * r.norm_sq();
        let horizon = |w: Vec2| if w.norm() == 0.0 { 1.0 } else { 4.0 * r.norm() / w.norm() + 1.0 };
        let forward = |w: Vec2| {
            let rw = r.dot(w);
            if w.norm_sq() == 0.0 || rw >= 0.0 {
                r.norm_sq() - radius * radius
            } else {
                r.norm_sq() - rw * rw / w.norm_sq() - radius * radius
            }
        };

        let w = v_new - v_j;
        let hit = sampled_min_distance(r, w, 0.0, horizon(w)) < radius;
        if !near_boundary(forward(w)) {
            checked[0] += 1;
            agreed[0] += (point_in_vo(p_i, p_j, v_new, v_j, radius).unwrap() == hit) as usize;
        }

        let c = RvoConstraint::new(p_i, p_j, v_i, v_j, radius).unwrap();
        let w = v_new * 2.0 - v_i - v_j;
        let m = rvo_cone_margin(&c, v_new);
        if !near_boundary(m) {
            checked[1] += 1;
            agreed[1] += ((m >= 0.0) != (sampled_min_distance(r, w, 0.0, horizon(w)) < radius)) as usize;
        }
        let f = rvo_value(&c, v_new);
        if !near_boundary(f) {
            checked[2] += 1;
            let t = horizon(w);
            agreed[2] += ((f >= 0.0) != (sampled_min_distance(r, w, -t, t) < radius)) as usize;
        }
    }
    let rates: Vec<f64> = (0..3).map(|k| agreed[k] as f64 / checked[k] as f64).collect();
    Line {
        id: 4,
        pass: rates.iter().all(|&x| x >= 0.999),
        title: "VO/RVO feasibility agrees with brute-force extrapolation >= 99.9%",
        detail: format!(
            "point_in_vo {:.4}% ({}), forward rvo {:.4}% ({}), two-sided rvo_value {:.4}% ({})",
            100.0 * rates[0],
            checked[0],
            100.0 * rates[1],
            checked[1],
            100.0 * rates[2],
            checked[2]
        ),
    }
}

struct Sims {
    circle: Vec<MonteCarloResult>,
    square: Vec<MonteCarloResult>,
    safe_secs: f64,
}

fn simulate_all() -> Sims {
    let mut safe_secs = 0.0;
    let mut run = |cfg: ScenarioConfig, runs: usize| -> Vec<MonteCarloResult> {
        MessageFormat::ALL
            .iter()
            .map(|&p| {
                let t = Instant::now();
                let r = run_monte_carlo(&cfg.clone().with_policy(p), runs).expect("simulation");
                if p.must_be_safe() {
                    safe_secs += t.elapsed().as_secs_f64();
                }
                r
            })
            .collect()
    };
    let circle = run(ScenarioConfig::circle8(), 500);
    let square = run(ScenarioConfig::square24(), 100);
    Sims { circle, square, safe_secs }
}

fn summary(results: &[MonteCarloResult], p: MessageFormat) -> &rid_rvo::sim::PolicySummary {
    &results.iter().find(|r| r.config.policy == p).unwrap().summary
}

fn criterion_5(s: &Sims) -> Line {
    let mut parts = Vec::new();
    let mut pass = s.safe_secs < 900.0;
    for (name, res) in [("circle8", &s.circle), ("square24", &s.square)] {
        for p in [MessageFormat::Standard, MessageFormat::Candidate1, MessageFormat::Candidate2] {
            let r = res.iter().find(|r| r.config.policy == p).unwrap();
            let worst = r.outcomes.iter().map(|o| o.mac_count).max().unwrap_or(0);
            pass &= worst == 0;
            parts.push(format!("{name}/{p} {}x max {worst}", r.outcomes.len()));
        }
    }
    Line {
        id: 5,
        pass,
        title: "safe policies: mac_count = 0 in every run (circle 500, square 100), < 15 min",
        detail: format!("{}; {:.0} s", parts.join(", "), s.safe_secs),
    }
}

fn criterion_6(s: &Sims) -> Line {
    let sm = summary(&s.circle, MessageFormat::SnmacBaseline);
    let k = sm.runs_with_mac as f64;
    let n = sm.runs as f64;
    // Clopper-Pearson lower bound of the 95% interval
    let lower = if k == 0.0 { 0.0 } else { Beta::new(k, n - k + 1.0).unwrap().inverse_cdf(0.025) };
    Line {
        id: 6,
        pass: lower > 0.0,
        title: "sNMAC baseline (sigma = 10) has a positive MAC rate over 500 circle runs",
        detail: format!(
            "{} of {} runs with a MAC, rate {:.3}, 95% CI lower bound {lower:.3}",
            sm.runs_with_mac, sm.runs, sm.mac_rate
        ),
    }
}

fn criterion_7(s: &Sims) -> Line {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, res) in [("circle8", &s.circle), ("square24", &s.square)] {
        let m = |p| summary(res, p).median_time.unwrap_or(f64::NAN);
        let (sn, std, c1, c2) = (
            m(MessageFormat::SnmacBaseline),
            m(MessageFormat::Standard),
            m(MessageFormat::Candidate1),
            m(MessageFormat::Candidate2),
        );
        let ok = sn <= c2 && c2 <= c1 && c1 < std && std >= 1.4 * c2;
        pass &= ok;
        parts.push(format!(
            "{name}: snmac {sn:.2} <= c2 {c2:.2} <= c1 {c1:.2} < standard {std:.2}, standard/c2 {:.2}{}",
            std / c2,
            if ok { "" } else { " (!)" }
        ));
    }
    Line {
        id: 7,
        pass,
        title: "median mission time ordering and standard >= 1.4 x candidate 2",
        detail: parts.join("; "),
    }
}

fn criterion_8() -> Line {
    let dir = tempfile::tempdir().unwrap();
    let mut same = true;
    let mut sizes = Vec::new();
    for layout in ["circle8", "square24"] {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{layout}-{k}"));
            let status = Command::new(env!("CARGO_BIN_EXE_rid-rvo"))
                .args(["simulate", "--layout", layout, "--runs", "4", "--seed", "11", "--out"])
                .arg(&out)
                .output()
                .unwrap();
            same &= status.status.success();
            outputs.push(std::fs::read(out.join("runs.csv")).unwrap_or_default());
        }
        same &= !outputs[0].is_empty() && outputs[0] == outputs[1];
        sizes.push(format!("{layout} {} bytes", outputs[0].len()));
    }
    Line { id: 8, pass: same, title: "repeated simulate gives byte-identical runs.csv", detail: sizes.join(", ") }
}

fn random_message(rng: &mut ChaCha8Rng) -> (RemoteIdMessage, MessageFormat) {
    let format = MessageFormat::ALL[rng.random_range(0..4)];
    let mut cm = || rng.random::<i32>() as f64 / 100.0;
    let (px, py, vx, vy, cx, cy) = (cm(), cm(), cm(), cm(), cm(), cm());
    let msg = RemoteIdMessage {
        uav_id: UavId(rng.random()),
        timestamp: rng.random_range(0..(1u64 << 48)) as f64 / 1e6,
        position: Vec2::new(px, py),
        velocity: Vec2::new(vx, vy),
        control_station: Vec2::new(cx, cy),
        emergency: rng.random(),
        loc_error: format.carries_loc_error().then(|| rng.random::<u16>() as f64 / 100.0),
        airframe: format.carries_airframe().then(|| rng.random_range(1..=750u16) as f64 / 100.0),
    };
    (msg, format)
}

fn criterion_9() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut round_trips = 0;
    let mut rejected = 0;
    let mut malformed = 0;
    for _ in 0..10_000 {
        let (msg, format) = random_message(&mut rng);
        let frame = encode(&msg, format).unwrap();
        if decode(&frame).ok() == Some((msg.clone(), format)) {
            round_trips += 1;
        }
        // wrong lengths
        for len in [0, frame.len() - 1, frame.len() + 1, 60] {
            let mut b = frame.clone();
            b.resize(len, 0);
            malformed += 1;
            rejected += matches!(decode(&b), Err(Error::MalformedMessage(_))) as usize;
        }
        // reserved flag bits
        let mut b = frame.clone();
        b[46] |= 1 << rng.random_range(3..8);
        malformed += 1;
        rejected += matches!(decode(&b), Err(Error::MalformedMessage(_))) as usize;
    }
    Line {
        id: 9,
        pass: round_trips == 10_000 && rejected == malformed,
        title: "codec: 10^4 random messages round-trip; malformed length/flags rejected",
        detail: format!("{round_trips}/10000 exact round trips, {rejected}/{malformed} malformed frames rejected"),
    }
}

fn criterion_10(tables: &analysis::AnalysisTables) -> Line {
    let q = |dt| tables.mobility_row(3, 3, dt).map(|r| r.q997).unwrap_or(f64::NAN);
    let rows: Vec<_> = tables.mobility.iter().filter(|r| r.category_i == 3 && r.category_j == 3).collect();
    let monotone = rows.windows(2).all(|w| w[0].dt < w[1].dt && w[0].q997 < w[1].q997);
    let (fast, slow) = (q(0.1), q(1.0));
    Line {
        id: 10,
        pass: fast <= 6.0 && slow >= 52.0 && monotone,
        title: "category-3 mobility term (99.7%): <= 6 m at 0.1 s, >= 52 m at 1 s, monotone",
        detail: format!("{fast:.3} m at 0.1 s, {slow:.3} m at 1 s, monotone in dt: {monotone}"),
    }
}

fn main() -> ExitCode {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let tables = analysis::analyze(&AnalysisParams::default()).expect("analysis");
    analysis::write_tables(&tables, dir.path()).expect("tables");
    let analyze_secs = t.elapsed().as_secs_f64();

    let mut lines = vec![criterion_1(&tables, analyze_secs), criterion_2(&tables), criterion_3(), criterion_4()];
    let sims = simulate_all();
    lines.extend([
        criterion_5(&sims),
        criterion_6(&sims),
        criterion_7(&sims),
        criterion_8(),
        criterion_9(),
        criterion_10(&tables),
    ]);

    let mut unexpected = 0;
    println!();
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        let note = if !l.pass && KNOWN_FAILURES.contains(&l.id) { " [known deviation]" } else { "" };
        println!("[{tag}] criterion {:>2}: {}{note} -- {}", l.id, l.title, l.detail);
        if !l.pass && !KNOWN_FAILURES.contains(&l.id) {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} passed, {unexpected} unexpected failure(s)", lines.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
