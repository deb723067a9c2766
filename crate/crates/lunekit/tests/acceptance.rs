//! End-to-end acceptance gate. Each test prints exactly one
//! "criterion N (...): PASS|FAIL" line; tolerances are pinned here.

use std::sync::OnceLock;
use std::time::Instant;

use lunekit::lune::{rho, rho_derivative, rho_domain};
use lunekit::{
    run_all, run_formula_oracle, run_phase_transitions, CorpusSpec, Curvature, DomainRow,
    VerificationReport,
};

/// (κ, λ) cells covering every branch of the inradius formula.
const CELLS: [(f64, f64); 5] = [(1.0, 1.0), (0.0, 1.0), (-1.0, 2.0), (-1.0, 1.0), (-1.0, 0.5)];
const CORPUS_DOMAINS_PER_CELL: usize = 200;
const CORPUS_SEED: u64 = 11;
const CORPUS_H: f64 = 1e-3;

struct Corpus {
    report: VerificationReport,
    build_secs: f64,
}

static CORPUS: OnceLock<Corpus> = OnceLock::new();

fn corpus() -> &'static Corpus {
    CORPUS.get_or_init(|| {
        let spec = CorpusSpec::standard(CORPUS_DOMAINS_PER_CELL, CORPUS_SEED, CORPUS_H);
        let t = Instant::now();
        let report = run_all(&spec).expect("corpus verification run");
        Corpus {
            report,
            build_secs: t.elapsed().as_secs_f64(),
        }
    })
}

fn verdict(n: u32, name: &str, ok: bool) {
    println!(
        "criterion {n} ({name}): {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} ({name}) failed");
}

fn kv(k: f64) -> Curvature {
    Curvature::new(k).unwrap()
}

/// Finite grid top for a cell: L_λ when bounded, else the same 12/λ cap the
/// corpus harness uses.
fn grid_top(kappa: f64, lambda: f64) -> f64 {
    let dom = rho_domain(kv(kappa), lambda).unwrap();
    if dom.is_bounded() {
        dom.upper
    } else {
        12.0 / lambda
    }
}

#[test]
fn criterion_1_formula_vs_geometry_oracle() {
    let spec = CorpusSpec::standard(1, CORPUS_SEED, CORPUS_H);
    let t = Instant::now();
    let oracle = run_formula_oracle(&spec).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let ok = oracle.ok && oracle.max_error < 1e-6 && secs < 10.0;
    println!(
        "  max |closed form - construction| = {:.3e} over {} cells x 10 lengths in {secs:.2}s",
        oracle.max_error,
        oracle.rows.len()
    );
    verdict(1, "formula vs geometry oracle", ok);
}

#[test]
fn criterion_2_endpoint_identities() {
    let t = Instant::now();
    let mut ok = true;
    for (kappa, lambda) in CELLS {
        let at_zero = rho(kv(kappa), lambda, 0.0).unwrap();
        if at_zero != 0.0 {
            println!("  rho({kappa},{lambda},0) = {at_zero:e}, expected exactly 0");
            ok = false;
        }
    }
    // compact F_lambda cells: the full-perimeter lune closes into F_lambda
    for (kappa, lambda) in [(1.0, 1.0), (0.0, 1.0), (-1.0, 2.0)] {
        let dom = rho_domain(kv(kappa), lambda).unwrap();
        let full = rho(kv(kappa), lambda, dom.upper).unwrap();
        let radius = lunekit::curves::f_lambda_radius(kv(kappa), lambda)
            .unwrap()
            .expect("compact cell has a radius");
        if (full - radius).abs() > 1e-9 {
            println!(
                "  rho({kappa},{lambda},L_max) = {full:.12}, radius = {radius:.12}"
            );
            ok = false;
        }
    }
    ok = ok && t.elapsed().as_secs_f64() < 1.0;
    verdict(2, "endpoint identities", ok);
}

#[test]
fn criterion_3_monotonicity_and_derivative() {
    let t = Instant::now();
    let mut ok = true;
    for (kappa, lambda) in CELLS {
        let top = grid_top(kappa, lambda);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..100 {
            // interior grid: margins keep the FD stencil inside I_lambda
            let length = top * (0.01 + 0.96 * i as f64 / 99.0);
            let v = rho(kv(kappa), lambda, length).unwrap();
            if v <= prev {
                println!("  not strictly increasing at kappa={kappa} lambda={lambda} L={length}");
                ok = false;
            }
            prev = v;
            let d = rho_derivative(kv(kappa), lambda, length).unwrap();
            if !(d > 0.0) {
                println!("  derivative not positive at kappa={kappa} lambda={lambda} L={length}");
                ok = false;
            }
            let delta = 1e-5 * top.min(1.0);
            let fd = (rho(kv(kappa), lambda, length + delta).unwrap()
                - rho(kv(kappa), lambda, length - delta).unwrap())
                / (2.0 * delta);
            if (fd - d).abs() > 1e-6 * d.abs().max(1.0) {
                println!(
                    "  FD mismatch at kappa={kappa} lambda={lambda} L={length}: {fd:e} vs {d:e}"
                );
                ok = false;
            }
        }
    }
    ok = ok && t.elapsed().as_secs_f64() < 1.0;
    verdict(3, "monotonicity and derivative", ok);
}

#[test]
fn criterion_4_phase_transitions() {
    let t = Instant::now();
    let phase = run_phase_transitions(&[1.0], &[1.0, 4.0, 10.0]).unwrap();
    let mut ok = true;
    for table in &phase.tables {
        if !table.monotone {
            println!("  gaps not monotone in eps at L={}", table.length);
            ok = false;
        }
        let &(eps, circle, hyper, flat_pos, flat_neg) = table
            .rows
            .iter()
            .find(|r| r.0 == 1e-4)
            .expect("eps = 1e-4 row");
        // branch gaps at the lambda -> k boundary evaluated at eps = 1e-4
        for (name, gap) in [("circle->horocycle", circle), ("hypercycle->horocycle", hyper)] {
            if !(gap < 1e-6) {
                println!("  L={} {name} gap at eps={eps:.0e}: {gap:.3e} (required < 1e-6)", table.length);
                ok = false;
            }
        }
        // kappa -> 0 probes at |kappa| = eps^2 = 1e-8; NaN marks L outside
        // the flat branch's domain (L > 2*pi at lambda=1), skipped
        for (name, gap) in [("kappa->+0", flat_pos), ("kappa->-0", flat_neg)] {
            if gap.is_finite() && !(gap < 1e-6) {
                println!("  L={} {name} gap: {gap:.3e} (required < 1e-6)", table.length);
                ok = false;
            }
        }
    }
    ok = ok && t.elapsed().as_secs_f64() < 1.0;
    verdict(4, "phase transitions", ok);
}

fn rows() -> &'static [DomainRow] {
    &corpus().report.rows
}

#[test]
fn criterion_5_main_inequality_at_corpus_scale() {
    let c = corpus();
    let eps_h = c.report.eps.eps_h;
    let cut = c.report.spec.tolerances.profile_lune_cut;
    let mut ok = true;
    println!(
        "  {} rows, eps_h = {eps_h:.3e}, corpus built in {:.1}s",
        rows().len(),
        c.build_secs
    );
    if !(eps_h < 5e-3) {
        println!("  calibrated eps_h {eps_h:e} above the expected 5e-3");
        ok = false;
    }
    for row in rows() {
        if let Some(e) = &row.error {
            println!("  row {}:{} seed {}: {e}", row.cell, row.index, row.seed);
            ok = false;
            continue;
        }
        if row.slack < -eps_h {
            println!(
                "  slack {:.3e} < -eps_h at {}:{} seed {}",
                row.slack, row.cell, row.index, row.seed
            );
            ok = false;
        }
        if row.is_lune && row.slack.abs() >= 1e-4 {
            println!(
                "  lune row {}:{} seed {}: |slack| = {:.3e}",
                row.cell, row.index, row.seed, row.slack.abs()
            );
            ok = false;
        }
        if !row.is_lune && row.profile_distance > cut && !(row.slack > 0.0) {
            println!(
                "  non-lune row {}:{} seed {}: slack {:.3e} not strictly positive",
                row.cell, row.index, row.seed, row.slack
            );
            ok = false;
        }
    }
    if !(c.build_secs < 300.0) {
        println!("  corpus run took {:.1}s (required < 300s single-threaded)", c.build_secs);
        ok = false;
    }
    verdict(5, "main inradius inequality at corpus scale", ok);
}

#[test]
fn criterion_6_symmetrization_machinery() {
    let t = Instant::now();
    let mut ok = true;
    for row in rows() {
        if row.error.is_some() {
            ok = false;
            continue;
        }
        if row.chord_residual >= 1e-6 {
            println!(
                "  chord residual {:.3e} at {}:{} seed {}",
                row.chord_residual, row.cell, row.index, row.seed
            );
            ok = false;
        }
        if row.chord_arc_imbalance >= 1e-8 {
            println!(
                "  chord arc imbalance {:.3e} at {}:{} seed {}",
                row.chord_arc_imbalance, row.cell, row.index, row.seed
            );
            ok = false;
        }
        if row.chord_antisymmetry >= 1e-8 {
            println!(
                "  chord antisymmetry {:.3e} at {}:{} seed {}",
                row.chord_antisymmetry, row.cell, row.index, row.seed
            );
            ok = false;
        }
        if !row.reflect_convex {
            println!(
                "  reflected ring not lambda-convex at {}:{} seed {} (margin {:.3e})",
                row.cell, row.index, row.seed, row.reflect_margin
            );
            ok = false;
        }
    }
    ok = ok && t.elapsed().as_secs_f64() < 60.0;
    verdict(6, "symmetrization machinery", ok);
}

#[test]
fn criterion_7_blaschke_rolling() {
    let mut ok = true;
    let mut checked = [0usize; CELLS.len()];
    for row in rows() {
        match row.rolling_ok {
            Some(true) => checked[row.cell] += 1,
            Some(false) => {
                println!(
                    "  rolling violation {:?} at {}:{} seed {}",
                    row.rolling_violation, row.cell, row.index, row.seed
                );
                ok = false;
            }
            None => {}
        }
    }
    for (cell, &n) in checked.iter().enumerate() {
        if n < 20 {
            println!("  cell {cell}: only {n} rolling checks (expected 20)");
            ok = false;
        }
    }
    verdict(7, "Blaschke rolling", ok);
}

#[test]
fn criterion_8_conservation_checks() {
    let mut ok = true;
    for row in rows() {
        if row.error.is_some() {
            ok = false;
            continue;
        }
        if row.gauss_bonnet_residual >= 10.0 * CORPUS_H {
            println!(
                "  Gauss-Bonnet residual {:.3e} at {}:{} seed {}",
                row.gauss_bonnet_residual, row.cell, row.index, row.seed
            );
            ok = false;
        }
    }
    // scaling covariance: kappa -> kappa/c^2, lambda -> lambda/c, L -> c*L
    // must carry rho -> c*rho
    for (kappa, lambda) in CELLS {
        let top = grid_top(kappa, lambda);
        for i in 0..10 {
            let length = top * (0.05 + 0.9 * i as f64 / 9.0);
            let base = rho(kv(kappa), lambda, length).unwrap();
            for c in [0.5, 2.0, 10.0] {
                let scaled = rho(kv(kappa / (c * c)), lambda / c, c * length).unwrap();
                let err = (scaled - c * base).abs();
                if err > 1e-9 * (c * base).abs().max(1.0) {
                    println!(
                        "  scaling c={c} broken at kappa={kappa} lambda={lambda} L={length}: {err:e}"
                    );
                    ok = false;
                }
            }
        }
    }
    verdict(8, "conservation-style checks", ok);
}

#[test]
fn criterion_9_conjecture_explorations() {
    let c = corpus();
    // exploratory: violations are reported loudly but never fail the suite
    for (name, exp) in [
        ("equal-area inradius", &c.report.area_exploration),
        ("equal-perimeter circumradius", &c.report.circumradius_exploration),
    ] {
        println!(
            "  {name}: {} applicable of {} rows, {} violations, min slack {:.3e}",
            exp.n_applicable,
            exp.n_rows,
            exp.violations.len(),
            exp.min_slack
        );
        for (cell, index, seed, slack) in &exp.violations {
            println!(
                "  WARNING {name} violation at {cell}:{index} seed {seed}: slack {slack:.3e}"
            );
        }
    }
    let completed = c.report.area_exploration.n_rows == rows().len()
        && c.report.circumradius_exploration.n_rows == rows().len();
    verdict(9, "conjecture explorations (non-gating)", completed);
}
