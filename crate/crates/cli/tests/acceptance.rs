//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]`/`[FAIL]` line with the measured quantities before asserting.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::HashMap;
use std::fs;
use std::process::Command;

use mber_core::airlink::{receive, ChannelRealization, NoiseMode, SymbolVector};
use mber_core::eval::{
    ber_at, db_to_linear, exact_mi, exhaustive_oracle, iteration_stats, mi_at, prepare_channels, snr_at_ber,
    BerRecord, Dims, PreparedChannel, Scheme, Transmitter,
};
use mber_core::numerics::{stack, Purpose, SeededRng};
use mber_core::pm_solver::{gradient, objective, solve_pm, SolverConfig, StackedTransmit};
use mber_core::precoders::{wf, zf, RHO_Q};
use num_complex::Complex64;
use rayon::prelude::*;

const SEED: u64 = 2024;

fn report(id: u32, name: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2} {name}: {detail}");
}

fn interior_point(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    (0..2 * n).map(|_| 0.6 * (2.0 * rng.below(1 << 30) as f64 / (1u64 << 30) as f64 - 1.0)).collect()
}

fn det_at(ch: &ChannelRealization, x: &[f64], s: &SymbolVector) -> f64 {
    objective(ch, &StackedTransmit::new(x.to_vec()).unwrap(), s).unwrap().det_p
}

#[test]
fn c01_gradient_matches_finite_differences() {
    let mut rng = SeededRng::new(SEED, 1);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for id in 0..100 {
        let ch = ChannelRealization::draw(SEED, id, 0, 4, 32);
        let s = SymbolVector::random(&mut rng, 4);
        let x = interior_point(&mut rng, 32);
        let g = gradient(&ch, &x, &s).unwrap();
        let fd: Vec<f64> = (0..x.len())
            .map(|k| {
                let (mut up, mut dn) = (x.clone(), x.clone());
                up[k] += h;
                dn[k] -= h;
                (det_at(&ch, &up, &s) - det_at(&ch, &dn, &s)) / (2.0 * h)
            })
            .collect();
        let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(num / den);
    }
    let pass = worst <= 1e-5;
    report(1, "gradient vs central differences", pass, format!("worst relative error {worst:.2e} (limit 1e-5)"));
    assert!(pass);
}

#[test]
fn c02_stacked_objective_matches_complex_form() {
    let mut rng = SeededRng::new(SEED, 2);
    let mut worst = 0.0f64;
    for id in 0..100 {
        let ch = ChannelRealization::draw(SEED, 1000 + id, 0, 4, 32);
        let s = SymbolVector::random(&mut rng, 4);
        let xp = interior_point(&mut rng, 32);
        let x: Vec<Complex64> = (0..32).map(|i| Complex64::new(xp[i], xp[32 + i])).collect();
        let r = ch.h().mul_vec(&x).unwrap();
        let state = objective(&ch, &StackedTransmit::new(xp).unwrap(), &s).unwrap();
        for (m, (rm, sm)) in r.iter().zip(s.symbols()).enumerate() {
            let z = rm * sm.conj();
            let reference = (z * z).re;
            worst = worst.max((state.p[m] - reference).abs() / reference.abs().max(1.0));
        }
    }
    let pass = worst <= 1e-12;
    report(2, "stacked-real P vs complex arithmetic", pass, format!("worst deviation {worst:.2e} (limit 1e-12)"));
    assert!(pass);
}

/// Fraction of channels reaching `0.999x` and `0.9x` of the exhaustive optimum.
fn oracle_ratios(antennas: usize, users: usize) -> (f64, f64, f64) {
    let cfg = SolverConfig::default();
    let ratios: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|id| {
            let ch = ChannelRealization::draw(SEED, 5000 + id, 0, users, antennas);
            let mut rng = SeededRng::for_task(SEED, 5000 + id, Purpose::Symbols, 0);
            let s = SymbolVector::random(&mut rng, users);
            let (_, best) = exhaustive_oracle(&ch, &s).unwrap();
            let sol = solve_pm(&ch, &s, &cfg).unwrap();
            det_at(&ch, &stack(&sol.x_q), &s) / best
        })
        .collect();
    let frac = |t: f64| ratios.iter().filter(|&&r| r >= t).count() as f64 / ratios.len() as f64;
    let worst = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    (frac(0.999), frac(0.9), worst)
}

#[test]
fn c03_quantized_pm_vs_exhaustive_search() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, m) in [(4, 1), (6, 2)] {
        let (near, within, worst) = oracle_ratios(n, m);
        pass &= near >= 0.9 && within >= 1.0;
        detail.push(format!(
            "N={n},M={m}: {:.0}% >= 0.999x, {:.0}% >= 0.9x, worst ratio {worst:.3}",
            100.0 * near,
            100.0 * within
        ));
    }
    report(3, "PM + quantization vs exhaustive det(P)", pass, detail.join("; "));
    assert!(pass);
}

fn reference_channels() -> Vec<PreparedChannel> {
    prepare_channels(Dims::new(32, 4), 100, SEED, Some(&SolverConfig::with_epsilon(1e-6))).unwrap()
}

fn curve(prepared: &[PreparedChannel], scheme: Scheme, grid: &[f64]) -> Vec<BerRecord> {
    grid.iter()
        .map(|&etx| ber_at(prepared, scheme, etx, 2000, NoiseMode::Awgn, SEED).unwrap())
        .collect()
}

#[test]
fn c04_ber_curve_reproduction() {
    let prepared = reference_channels();
    let grid: Vec<f64> = (0..8).map(|k| -2.0 + 2.0 * k as f64).collect();
    let pm = snr_at_ber(&curve(&prepared, Scheme::Pm, &grid), 1e-3).unwrap();
    let wfq = snr_at_ber(&curve(&prepared, Scheme::Wfq, &grid), 1e-3).unwrap();
    let pass = (pm - 5.08).abs() <= 1.0 && wfq - pm >= 2.0;
    report(
        4,
        "BER at 1e-3",
        pass,
        format!("PM {pm:.2} dB (5.08 +/- 1.0), WFQ {wfq:.2} dB, gap {:.2} dB (>= 2.0)", wfq - pm),
    );
    assert!(pass);
}

#[test]
fn c05_scheme_ordering_at_8db() {
    let prepared = reference_channels();
    let at = |scheme| ber_at(&prepared, scheme, 8.0, 2000, NoiseMode::Awgn, SEED).unwrap();
    let (pm, wfq, wf) = (at(Scheme::Pm), at(Scheme::Wfq), at(Scheme::Wf));
    let separated = |lo: &BerRecord, hi: &BerRecord| {
        hi.ber - lo.ber >= 3.0 * (lo.std_err.powi(2) + hi.std_err.powi(2)).sqrt()
    };
    let pass = separated(&pm, &wfq) && separated(&wfq, &wf);
    report(
        5,
        "ber(PM) < ber(WFQ) < ber(WF) at 8 dB",
        pass,
        format!("PM {:.2e}, WFQ {:.2e}, WF {:.2e}", pm.ber, wfq.ber, wf.ber),
    );
    assert!(pass);
}

#[test]
fn c06_mi_saturation() {
    let prepared = prepare_channels(Dims::new(32, 4), 50, SEED, Some(&SolverConfig::default())).unwrap();
    let mean = mi_at(&prepared, Scheme::Pm, 15.0, NoiseMode::Awgn).unwrap().mi_bpcu;
    let tx_max = prepared
        .iter()
        .map(|pc| {
            let tx = Transmitter::for_scheme(Scheme::Pm, pc, db_to_linear(15.0)).unwrap();
            exact_mi(&pc.channel, &tx, NoiseMode::Awgn).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = mean >= 7.8 && tx_max <= 8.0;
    report(6, "PM exact MI at 15 dB", pass, format!("mean {mean:.4} bpcu (>= 7.8), max {tx_max:.6} (<= 8)"));
    assert!(pass);
}

#[test]
fn c07_iteration_counts() {
    let prepared = prepare_channels(Dims::new(32, 4), 100, SEED, None).unwrap();
    let rows = iteration_stats(&prepared, &[1e-3, 1e-4, 1e-6], &SolverConfig::default()).unwrap();
    let targets = [11.0, 18.0, 43.0];
    let in_band = rows
        .iter()
        .zip(targets)
        .all(|(r, t)| (r.mean_iterations - t).abs() <= 0.5 * t);
    let monotone = rows.windows(2).all(|w| w[1].mean_iterations >= w[0].mean_iterations);
    let pass = in_band && monotone;
    let means: Vec<String> = rows.iter().map(|r| format!("{:.1}", r.mean_iterations)).collect();
    report(7, "mean iterations", pass, format!("{} (targets 11 / 18 / 43 +/- 50%)", means.join(" / ")));
    assert!(pass);
}

#[test]
fn c08_baseline_identities() {
    let mut zf_worst = 0.0f64;
    let mut wf_worst = 0.0f64;
    for id in 0..100 {
        let ch = ChannelRealization::draw(SEED, 8000 + id, 0, 4, 32);
        let w = zf(&ch).unwrap().w;
        let residual = ch.h().matmul(&w).unwrap().sub(&mber_core::ComplexMatrix::identity(4)).unwrap();
        zf_worst = zf_worst.max(residual.frobenius_norm());
        for etx_db in [-5.0, 5.0, 15.0] {
            let etx = db_to_linear(etx_db);
            let w = wf(&ch, etx, 1.0).unwrap().w;
            let power = w.gram_rows().trace().re;
            wf_worst = wf_worst.max((power - etx).abs() / etx);
        }
    }
    let rho_exact = RHO_Q == 1.0 - 2.0 / std::f64::consts::PI;
    let pass = zf_worst <= 1e-10 && wf_worst <= 1e-8 && rho_exact;
    report(
        8,
        "baseline identities",
        pass,
        format!("ZF residual {zf_worst:.1e}, WF power error {wf_worst:.1e}, rho_q exact {rho_exact}"),
    );
    assert!(pass);
}

/// Plug-in estimate from the empirical joint histogram of `(s, s_hat)`.
fn plug_in_mi(pc: &PreparedChannel, tx: &Transmitter<'_>, samples: usize, stream: u64) -> f64 {
    let users = pc.channel.users();
    let mut rng = SeededRng::new(SEED, stream);
    let mut joint: HashMap<(usize, usize), f64> = HashMap::new();
    for _ in 0..samples {
        let s = SymbolVector::random(&mut rng, users);
        let x = tx.signal(&s);
        let hat = receive(&pc.channel, &x, NoiseMode::Awgn, &mut rng);
        *joint.entry((s.index(), hat.index())).or_default() += 1.0;
    }
    let total = samples as f64;
    let mut p_s: HashMap<usize, f64> = HashMap::new();
    let mut p_hat: HashMap<usize, f64> = HashMap::new();
    for (&(a, b), &c) in &joint {
        *p_s.entry(a).or_default() += c / total;
        *p_hat.entry(b).or_default() += c / total;
    }
    joint
        .iter()
        .map(|(&(a, b), &c)| {
            let p = c / total;
            p * (p / (p_s[&a] * p_hat[&b])).log2()
        })
        .sum()
}

#[test]
fn c09_exact_mi_vs_monte_carlo() {
    let prepared = prepare_channels(Dims::new(8, 2), 10, SEED, Some(&SolverConfig::default())).unwrap();
    let grid = [-5.0, 0.0, 5.0];
    let gaps: Vec<f64> = prepared
        .par_iter()
        .enumerate()
        .map(|(i, pc)| {
            let scheme = Scheme::ALL[i % Scheme::ALL.len()];
            let tx = Transmitter::for_scheme(scheme, pc, db_to_linear(grid[i % grid.len()])).unwrap();
            let exact = exact_mi(&pc.channel, &tx, NoiseMode::Awgn).unwrap();
            (exact - plug_in_mi(pc, &tx, 1_000_000, 90_000 + i as u64)).abs()
        })
        .collect();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    let pass = worst <= 0.02;
    report(9, "exact MI vs plug-in Monte Carlo", pass, format!("worst gap {worst:.4} bpcu over 10 instances (limit 0.02)"));
    assert!(pass);
}

#[test]
fn c10_reruns_are_byte_identical() {
    let dir = tempfile::TempDir::new().unwrap();
    let config = dir.path().join("exp.toml");
    fs::write(
        &config,
        "master_seed = 11\nchannels = 8\nsymbols_per_channel = 300\n\
         etx_db_grid = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]\n[dims]\nantennas = 8\nusers = 2\n",
    )
    .unwrap();
    let run = |cmd: &str, config: &std::path::Path, out: &str, threads: &str| {
        let out = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_mber"))
            .args([cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads])
            .status()
            .unwrap();
        assert!(status.success(), "{cmd} failed");
        out
    };
    let mut mismatched = Vec::new();
    for (cmd, file) in [("ber", "ber.csv"), ("mi", "mi.csv"), ("table", "table.csv"), ("lut-dump", "lut.csv")] {
        let a = run(cmd, &config, &format!("{cmd}-1"), "1");
        let b = run(cmd, &config, &format!("{cmd}-4"), "4");
        let saved = a.join(format!("{cmd}.config.toml"));
        let c = run(cmd, &saved, &format!("{cmd}-re"), "3");
        let bytes = |d: &std::path::Path| fs::read(d.join(file)).unwrap();
        if bytes(&a) != bytes(&b) || bytes(&a) != bytes(&c) {
            mismatched.push(cmd);
        }
    }
    let pass = mismatched.is_empty();
    report(
        10,
        "rerun determinism across thread counts",
        pass,
        if pass { "ber, mi, table, lut-dump identical at 1/3/4 threads".into() } else { format!("differs: {mismatched:?}") },
    );
    assert!(pass);
}
