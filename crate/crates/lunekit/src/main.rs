//! lunekit command line: evaluate the sharp inradius bound, construct and
//! render lunes and generated λ-convex domains, and run verification
//! corpora.
//!
//! Exit codes: 0 success, 2 domain/projection violation, 3 file I/O,
//! 4 generation failure, 5 gating verification failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use lunekit::error::Error;
use lunekit::files::{DomainFile, DomainMetadata};
use lunekit::kernel::{exp_map, log_dir, Curvature, ModelPoint, TangentVector};
use lunekit::lune::{build_lune, rho, rho_branch, rho_domain, Lune};
use lunekit::render::{Projection, RenderScene, Style};
use lunekit::verify::{domain_seed, run_all, write_csv, CorpusSpec};
use lunekit::{balanced_chord, circumradius, generate_lambda_convex, inradius};

#[derive(Parser)]
#[command(
    name = "lunekit",
    version,
    about = "Sharp inradius bounds for lambda-convex domains on constant-curvature surfaces"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ProjectionArg {
    Plane,
    PoincareDisk,
    OrthographicSphere,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Annotation {
    Inradius,
    Circumradius,
    Chord,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the lune inradius bound and report the active branch.
    Rho {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        json: bool,
    },
    /// Construct the lune of a given boundary length and write it out.
    Lune {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// Generate random λ-convex domains as domain JSON files.
    Gen {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n_supports: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
    },
    /// Run the verification corpus described by a spec file.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Render a domain JSON file to SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, value_enum)]
        annotate: Vec<Annotation>,
        #[arg(long, value_enum)]
        projection: Option<ProjectionArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    ExitCode::from(code)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) => 3,
        Error::GenerationFailed(_) => 4,
        Error::ProjectionMismatch { .. } => 2,
        Error::LengthOutOfDomain { .. }
        | Error::InvalidCurvature(_)
        | Error::InvalidLambda(_)
        | Error::ParamOutOfRange { .. } => 2,
        _ => 1,
    }
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Rho {
            kappa,
            lambda,
            length,
            json,
        } => cmd_rho(kappa, lambda, length, json),
        Cmd::Lune {
            kappa,
            lambda,
            length,
            out,
            svg,
            h,
        } => cmd_lune(kappa, lambda, length, &out, svg.as_deref(), h),
        Cmd::Gen {
            kappa,
            lambda,
            seed,
            n_supports,
            count,
            out,
            h,
        } => cmd_gen(kappa, lambda, seed, n_supports, count, &out, h),
        Cmd::Verify { spec, report, csv } => cmd_verify(&spec, &report, csv.as_deref()),
        Cmd::Render {
            input,
            svg,
            annotate,
            projection,
        } => cmd_render(&input, &svg, &annotate, projection),
    }
}

fn cmd_rho(kappa: f64, lambda: f64, length: f64, json: bool) -> Result<u8, Error> {
    let kappa = Curvature::new(kappa)?;
    let dom = rho_domain(kappa, lambda)?;
    if !dom.contains(length) {
        eprintln!(
            "error: length {length} lies outside I_lambda = (0, {})",
            if dom.is_bounded() {
                format!("{:.12}", dom.upper)
            } else {
                "inf".to_string()
            }
        );
        return Ok(2);
    }
    let value = rho(kappa, lambda, length)?;
    let branch = rho_branch(kappa, lambda)?.label();
    if json {
        println!(
            "{}",
            serde_json::json!({
                "kappa": kappa.kappa(),
                "lambda": lambda,
                "length": length,
                "rho": value,
                "branch": branch,
            })
        );
    } else {
        println!("{value:.12} branch {branch}");
    }
    Ok(0)
}

fn lune_scene(lune: &Lune, h: f64) -> Result<RenderScene, Error> {
    let projection = Projection::default_for(lune.kappa);
    let mut scene = RenderScene::new(lune.kappa, projection)?;
    // each boundary arc as its own polyline
    for arc in &lune.arcs {
        scene.add_polyline(arc.sample(h.max(1e-3), false), false, Style::line("black", 2.0))?;
    }
    scene.add_marker(lune.center, Some("m".to_string()), Style::line("#3366cc", 1.0))?;
    scene.add_metric_circle(
        &lune.center,
        lune.inradius_numeric()?,
        Style::dashed("#3366cc", 1.5),
    )?;
    Ok(scene)
}

fn cmd_lune(
    kappa: f64,
    lambda: f64,
    length: f64,
    out: &Path,
    svg: Option<&Path>,
    h: f64,
) -> Result<u8, Error> {
    let kappa = Curvature::new(kappa)?;
    let dom = rho_domain(kappa, lambda)?;
    if !dom.contains(length) {
        eprintln!(
            "error: length {length} lies outside I_lambda = (0, {})",
            if dom.is_bounded() {
                format!("{:.12}", dom.upper)
            } else {
                "inf".to_string()
            }
        );
        return Ok(2);
    }
    let lune = build_lune(kappa, lambda, length)?;
    let ring = lune.sample_boundary(h);
    let file = DomainFile::from_ring(
        kappa,
        lambda,
        &ring,
        DomainMetadata {
            seed: 0,
            h,
            generator: "lune".to_string(),
        },
    );
    write_json(out, &file)?;
    if let Some(path) = svg {
        std::fs::write(path, lune_scene(&lune, h)?.to_svg())?;
    }
    println!(
        "lune kappa={} lambda={} L={} inradius={:.9} -> {}",
        kappa.kappa(),
        lambda,
        length,
        lune.inradius_numeric()?,
        out.display()
    );
    Ok(0)
}

fn cmd_gen(
    kappa: f64,
    lambda: f64,
    seed: u64,
    n_supports: usize,
    count: usize,
    out: &Path,
    h: f64,
) -> Result<u8, Error> {
    let kappa = Curvature::new(kappa)?;
    std::fs::create_dir_all(out)?;
    for i in 0..count {
        let s = domain_seed(seed, 0, i);
        let d = generate_lambda_convex(kappa, lambda, s, n_supports, h)?;
        let file = DomainFile::from_ring(
            kappa,
            lambda,
            d.boundary(),
            DomainMetadata {
                seed: s,
                h,
                generator: "supports".to_string(),
            },
        );
        write_json(&out.join(format!("domain_{i:04}.json")), &file)?;
    }
    println!("wrote {count} domains to {}", out.display());
    Ok(0)
}

fn cmd_verify(spec_path: &Path, report_path: &Path, csv: Option<&Path>) -> Result<u8, Error> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec: CorpusSpec = serde_json::from_str(&text)?;
    let report = run_all(&spec)?;
    write_json(report_path, &report)?;
    if let Some(path) = csv {
        let mut buf = Vec::new();
        write_csv(&report.rows, &mut buf)?;
        std::fs::write(path, buf)?;
    }
    for cell in &report.cells {
        println!(
            "cell {} (kappa={}, lambda={}): {} rows, min slack {:+.3e}, {} failures",
            cell.cell, cell.kappa, cell.lambda, cell.n_rows, cell.min_slack, cell.failures
        );
    }
    println!(
        "formula oracle: max error {:.3e} ({})",
        report.formula_oracle.max_error,
        if report.formula_oracle.ok { "ok" } else { "FAIL" }
    );
    for exploration in [
        ("area", &report.area_exploration),
        ("circumradius", &report.circumradius_exploration),
    ] {
        let (name, e) = exploration;
        if e.violations.is_empty() {
            println!(
                "{name} exploration: {} applicable rows, no violations (min slack {:+.3e})",
                e.n_applicable, e.min_slack
            );
        } else {
            println!(
                "WARNING: {name} exploration found {} violation(s), min slack {:+.3e} \
                 — exploratory, not gating, but worth a close look",
                e.violations.len(),
                e.min_slack
            );
        }
    }
    if report.gating_ok {
        println!("verification passed");
        Ok(0)
    } else {
        for f in &report.gating_failures {
            eprintln!("FAIL: {f}");
        }
        Ok(5)
    }
}

fn cmd_render(
    input: &Path,
    svg: &Path,
    annotate: &[Annotation],
    projection: Option<ProjectionArg>,
) -> Result<u8, Error> {
    let text = std::fs::read_to_string(input)?;
    let file: DomainFile = serde_json::from_str(&text)?;
    let d = file.to_domain()?;
    let kappa = d.kappa();
    let projection = match projection {
        Some(ProjectionArg::Plane) => Projection::Plane,
        Some(ProjectionArg::PoincareDisk) => Projection::PoincareDisk,
        Some(ProjectionArg::OrthographicSphere) => {
            let (_, center) = inradius(&d, 1e-6)?;
            Projection::OrthographicSphere {
                view_center: Some(center),
            }
        }
        None => Projection::default_for(kappa),
    };
    let mut scene = RenderScene::new(kappa, projection)?;
    scene.add_polyline(d.boundary().to_vec(), true, Style::line("black", 2.0))?;
    for a in annotate {
        match a {
            Annotation::Inradius => {
                let (r, center) = inradius(&d, 1e-8)?;
                scene.add_marker(center, Some(format!("r={r:.6}")), Style::line("#3366cc", 1.0))?;
                scene.add_metric_circle(&center, r, Style::dashed("#3366cc", 1.5))?;
            }
            Annotation::Circumradius => {
                let (radius, center) = circumradius(&d, 1e-8)?;
                scene.add_marker(
                    center,
                    Some(format!("R={radius:.6}")),
                    Style::line("#cc3333", 1.0),
                )?;
                scene.add_metric_circle(&center, radius, Style::dashed("#cc3333", 1.5))?;
            }
            Annotation::Chord => {
                let (_, incenter) = inradius(&d, 1e-8)?;
                let chord = balanced_chord(&d, &incenter)?;
                scene.add_polyline(
                    sample_geodesic(&chord.p_star, &chord.q_star, 64)?,
                    false,
                    Style::line("#228833", 1.5),
                )?;
                scene.add_marker(chord.p_star, Some("p*".to_string()), Style::line("#228833", 1.0))?;
                scene.add_marker(chord.q_star, Some("q*".to_string()), Style::line("#228833", 1.0))?;
                scene.add_marker(chord.m, Some("m".to_string()), Style::line("#228833", 1.0))?;
            }
        }
    }
    std::fs::write(svg, scene.to_svg())?;
    println!("wrote {}", svg.display());
    Ok(0)
}

fn sample_geodesic(a: &ModelPoint, b: &ModelPoint, n: usize) -> Result<Vec<ModelPoint>, Error> {
    let dist = lunekit::distance(a, b)?;
    let v = TangentVector::new_unit(*a, log_dir(a, b)?)?;
    (0..=n)
        .map(|j| exp_map(&v, dist * j as f64 / n as f64))
        .collect()
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
