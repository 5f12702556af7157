//! The worked examples: projected sphere frames, band frames on the Möbius
//! band and Klein bottle, and the zero scan on the sphere.

use std::fs;
use std::path::Path;

use mpf_core::atlas::{
    band_field, identification_residual, project_ambient_field, sample_band, sphere_frame, FrameField,
    GluedSquare, ParamGrid, Surface, UnitSphere,
};
use mpf_core::bundle::{
    loop_holonomy, sphere_obstruction, HolonomyClass, HolonomyReport, ObstructionReport,
};
use mpf_core::{dilate, DMatrix, Frame, Tolerances};

use crate::report::{Check, DemoReport};
use crate::{CliError, DemoName};

pub struct DemoConfig {
    pub name: DemoName,
    pub resolution: usize,
    pub tol: Tolerances,
    pub holonomy: bool,
    pub seed: u64,
    pub refine_depth: usize,
}

struct Outcome {
    field: FrameField,
    checks: Vec<Check>,
    holonomy: Option<(FrameField, HolonomyReport)>,
    obstruction: Option<ObstructionReport>,
}

fn parseval_check(field: &FrameField, tol: &Tolerances) -> Check {
    Check::at_most("worst Parseval residual", field.parseval_summary(tol.parseval).worst, tol.parseval)
}

fn sphere(cfg: &DemoConfig) -> Result<Outcome, CliError> {
    let s = UnitSphere;
    let grid = ParamGrid::structured(s.domain(), cfg.resolution, cfg.resolution, s.grid_margin())?;
    let pf = project_ambient_field(&s, &Frame::standard_basis(3), &grid, &cfg.tol)?;
    let mut deviation: f64 = 0.0;
    for (idx, sample) in pf.field.samples.iter().enumerate() {
        let p = s.embed(sample.uv[0], sample.uv[1]);
        let explicit = sphere_frame([p[0], p[1], p[2]])?;
        deviation = deviation.max((pf.ambient_frame(idx).matrix() - explicit.matrix()).amax());
    }
    let checks = vec![
        parseval_check(&pf.field, &cfg.tol),
        Check::at_most("max deviation from explicit sphere frame", deviation, 1e-12),
    ];
    Ok(Outcome { field: pf.field, checks, holonomy: None, obstruction: None })
}

fn band(cfg: &DemoConfig, surface: GluedSquare) -> Result<Outcome, CliError> {
    let name = surface.name().to_string();
    let field = band_field(&name, cfg.resolution, cfg.resolution)?;
    let mut checks = vec![parseval_check(&field, &cfg.tol)];
    for gluing in surface.identifications() {
        let r = identification_residual(&field, &gluing)?;
        checks.push(Check::at_most(&format!("identification residual ({})", gluing.name), r, cfg.tol.orthogonality));
    }
    let holonomy = if cfg.holonomy {
        // the v-loop at u = 1/2 crosses the twisted edge once
        let path = sample_band(&name, &ParamGrid::segment([0.5, 0.0], [0.5, 1.0], cfg.resolution))?;
        let twist = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let seed = dilate(&path.samples[0].frame, &cfg.tol)?.complement;
        let report = loop_holonomy(&path, &seed, Some(&twist), &cfg.tol, cfg.refine_depth)?;
        checks.push(Check::at_most("holonomy orthogonality residual", report.residual, cfg.tol.parseval));
        let nontrivial = f64::from(u8::from(report.classification == HolonomyClass::Nontrivial));
        checks.push(Check::at_least("twisted loop holonomy nontrivial", nontrivial, 1.0));
        checks.push(Check::at_most("twisted loop holonomy determinant", report.determinant, 0.0));
        Some((path, report))
    } else {
        None
    };
    Ok(Outcome { field, checks, holonomy, obstruction: None })
}

fn obstruction(cfg: &DemoConfig) -> Result<Outcome, CliError> {
    use std::f64::consts::PI;
    let s = UnitSphere;
    let (n_polar, n_azimuth) = (cfg.resolution, 2 * cfg.resolution);
    let du = (PI - 2.0 * s.grid_margin()[0]) / (n_polar - 1) as f64;
    let dv = 2.0 * PI / (n_azimuth - 1) as f64;
    // every cell diagonal holds a grid point within half of it from each zero
    let zero_tol = du.hypot(dv);
    let report = sphere_obstruction(n_polar, n_azimuth, zero_tol, &cfg.tol)?;
    let grid = ParamGrid::structured(s.domain(), n_polar, n_azimuth, s.grid_margin())?;
    let field = project_ambient_field(&s, &Frame::standard_basis(3), &grid, &cfg.tol)?.field;
    let fewest = report.hits_per_zero.iter().copied().min().unwrap_or(0) as f64;
    let checks = vec![
        parseval_check(&field, &cfg.tol),
        Check::at_least("fewest hits at an analytic zero", fewest, 1.0),
        Check::at_most("farthest hit from an analytic zero", report.max_hit_distance, 1.5 * zero_tol),
    ];
    Ok(Outcome { field, checks, holonomy: None, obstruction: Some(report) })
}

fn demo_name(name: DemoName) -> &'static str {
    match name {
        DemoName::Sphere => "sphere",
        DemoName::Mobius => "mobius",
        DemoName::Klein => "klein",
        DemoName::Obstruction => "obstruction",
    }
}

/// Runs the demo and writes `field.json`, `field.csv`, `report.json` and,
/// with a holonomy run, the loop `path.json` and `holonomy.json` into `dir`.
pub fn run(cfg: &DemoConfig, dir: &Path) -> Result<bool, CliError> {
    let outcome = match cfg.name {
        DemoName::Sphere => sphere(cfg)?,
        DemoName::Mobius => band(cfg, GluedSquare::mobius())?,
        DemoName::Klein => band(cfg, GluedSquare::klein())?,
        DemoName::Obstruction => obstruction(cfg)?,
    };
    fs::create_dir_all(dir)?;
    let mut files = vec!["field.json".to_string(), "field.csv".to_string(), "report.json".to_string()];
    fs::write(dir.join("field.json"), outcome.field.to_json()?)?;
    let mut csv = Vec::new();
    outcome.field.write_csv(&mut csv)?;
    fs::write(dir.join("field.csv"), csv)?;
    if let Some((path, h)) = &outcome.holonomy {
        fs::write(dir.join("path.json"), path.to_json()?)?;
        fs::write(dir.join("holonomy.json"), serde_json::to_string_pretty(h)?)?;
        files.push("path.json".into());
        files.push("holonomy.json".into());
    }
    let passed = outcome.checks.iter().all(|c| c.passed);
    let report = DemoReport {
        demo: demo_name(cfg.name).into(),
        resolution: cfg.resolution,
        seed: cfg.seed,
        tolerances: cfg.tol,
        files,
        checks: outcome.checks,
        passed,
        holonomy: outcome.holonomy.map(|(_, h)| h),
        obstruction: outcome.obstruction,
    };
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    report.print();
    Ok(passed)
}
