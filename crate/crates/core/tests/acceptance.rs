//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mpf_core::atlas::{
    band_field, identification_residual, project_ambient_field, sample_band, sphere_frame,
    EdgeGluing, FrameField, GluedSquare, ParamGrid, Surface, UnitSphere,
};
use mpf_core::bundle::{
    continue_complement, det_normalized_field, loop_holonomy, refine_path, sphere_obstruction,
    HolonomyClass, HolonomyReport,
};
use mpf_core::random::{gaussian_frame, rng};
use mpf_core::{
    analysis, det_normalized_complement, dilate, expected_parseval_dimension, frame_spectrum,
    is_parseval, parseval_normalize, parseval_tangent_dimension, project_frame, synthesis, DMatrix,
    DVector, Frame, Tolerances,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.sample(StandardNormal))
}

/// Parseval normalization of a Gaussian frame, redrawn if singular.
fn parseval_frame(r: &mut ChaCha8Rng, n: usize, k: usize) -> Frame {
    loop {
        let g = gaussian_frame(r, n, k).unwrap();
        if let Ok(f) = parseval_normalize(&g, 1e-9) {
            return f;
        }
    }
}

/// `‖Iₖ − MᵀM‖` and `‖Iₖ − MMᵀ‖`, the larger of the two, computed entrywise.
fn orthogonality_residual(m: &DMatrix<f64>) -> f64 {
    let k = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let delta = if i == j { 1.0 } else { 0.0 };
            let cols: f64 = (0..k).map(|r| m[(r, i)] * m[(r, j)]).sum();
            let rows: f64 = (0..k).map(|c| m[(i, c)] * m[(j, c)]).sum();
            worst = worst.max((cols - delta).abs()).max((rows - delta).abs());
        }
    }
    worst
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn timed(limit: Duration, start: Instant) -> (bool, String) {
    let elapsed = start.elapsed();
    (elapsed < limit, format!("{:.2}s", elapsed.as_secs_f64()))
}

fn dilation_correctness() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(101);
    let shapes = [(2, 1), (3, 2), (4, 2), (5, 3), (6, 4)];
    let frames: Vec<Frame> =
        (0..200).map(|i| shapes[i % shapes.len()]).map(|(k, n)| parseval_frame(&mut r, n, k)).collect();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut top_rows_equal = true;
    for f in &frames {
        let m = dilate(f, &tol).map_err(|e| e.to_string())?.stacked();
        worst = worst.max(orthogonality_residual(&m));
        for i in 0..f.n() {
            for j in 0..f.k() {
                top_rows_equal &= m[(i, j)].to_bits() == f.matrix()[(i, j)].to_bits();
            }
        }
    }
    let (fast, time) = timed(Duration::from_secs(5), start);
    check(
        worst <= 1e-10 && top_rows_equal && fast,
        format!("worst residual {worst:.2e}, top rows bit-equal {top_rows_equal}, {time}"),
    )
}

fn dimension_formula() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(202);
    let start = Instant::now();
    let mut measured = Vec::new();
    let mut ok = true;
    for ((k, n), want) in [((3, 2), 3), ((4, 2), 5), ((5, 3), 9), ((4, 3), 6)] {
        ok &= expected_parseval_dimension(k, n) == want;
        for _ in 0..5 {
            let f = parseval_frame(&mut r, n, k);
            let d = parseval_tangent_dimension(&f, tol.fd_step, tol.rank, &tol)
                .map_err(|e| e.to_string())?;
            ok &= d == want;
            measured.push(d);
        }
    }
    let (fast, time) = timed(Duration::from_secs(30), start);
    check(ok && fast, format!("dimensions {measured:?}, {time}"))
}

fn frame_formulas() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(303);
    let start = Instant::now();
    let mut sphere_gap: f64 = 0.0;
    let mut oracle_gap: f64 = 0.0;
    for _ in 0..1000 {
        let p = gaussian_vector(&mut r, 3).normalize();
        let proj = DMatrix::identity(3, 3) - &p * p.transpose();
        let projected = project_frame(&Frame::standard_basis(3), &proj, &tol).map_err(|e| e.to_string())?;
        let direct = sphere_frame([p[0], p[1], p[2]]).map_err(|e| e.to_string())?;
        sphere_gap = sphere_gap.max((projected.matrix() - direct.matrix()).amax());
        // column i is eᵢ − pᵢp
        let hand = DMatrix::from_fn(3, 3, |row, col| (if row == col { 1.0 } else { 0.0 }) - p[col] * p[row]);
        oracle_gap = oracle_gap.max((direct.matrix() - hand).amax());
    }
    let band = band_field("mobius", 100, 100).map_err(|e| e.to_string())?;
    let band_worst = band.parseval_summary(1e-14).worst;
    let (fast, time) = timed(Duration::from_secs(5), start);
    check(
        sphere_gap <= 1e-12 && oracle_gap <= 1e-12 && band_worst <= 1e-14 && fast,
        format!(
            "sphere gap {sphere_gap:.2e}, hand oracle gap {oracle_gap:.2e}, band residual {band_worst:.2e}, {time}"
        ),
    )
}

fn worst_over(field: &FrameField, gluings: &[EdgeGluing]) -> Result<f64, String> {
    gluings.iter().try_fold(0.0f64, |acc, g| {
        identification_residual(field, g).map(|r| acc.max(r)).map_err(|e| e.to_string())
    })
}

fn quotient_well_defined() -> Outcome {
    let band = band_field("mobius", 100, 100).map_err(|e| e.to_string())?;
    let mut constant = band.clone();
    let fixed = band.samples[0].frame.clone();
    for s in &mut constant.samples {
        s.frame = fixed.clone();
    }
    let edge_samples = band.samples.iter().filter(|s| s.uv[1] == 1.0).count();
    let mobius = GluedSquare::mobius().identifications();
    let klein = GluedSquare::klein().identifications();
    let m = worst_over(&band, &mobius)?;
    let kl = worst_over(&band, &klein)?;
    let cm = worst_over(&constant, &mobius)?;
    let ck = worst_over(&constant, &klein)?;
    check(
        edge_samples == 100 && m <= 1e-10 && kl <= 1e-10 && (cm - 2.0).abs() < 1e-12 && (ck - 2.0).abs() < 1e-12,
        format!("mobius {m:.2e}, klein {kl:.2e}, constant control {cm:.3}/{ck:.3}, {edge_samples} edge samples"),
    )
}

fn uniqueness_at_codimension_one() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(505);
    let mut cross_gap: f64 = 0.0;
    for _ in 0..500 {
        let f = parseval_frame(&mut r, 2, 3);
        let g = det_normalized_complement(&f, &tol).map_err(|e| e.to_string())?;
        let row = |i: usize| [f.matrix()[(i, 0)], f.matrix()[(i, 1)], f.matrix()[(i, 2)]];
        let c = cross(row(0), row(1));
        for (j, cj) in c.iter().enumerate() {
            cross_gap = cross_gap.max((g.matrix()[(0, j)] - cj).abs());
        }
    }
    let path = sample_band("mobius", &ParamGrid::segment([0.5, 0.0], [0.5, 1.0], 400))
        .map_err(|e| e.to_string())?;
    let pointwise = det_normalized_field(&path, &tol).map_err(|e| e.to_string())?;
    let continued = continue_complement(&path, &pointwise.complements[0], &tol).map_err(|e| e.to_string())?;
    let path_gap = pointwise
        .complements
        .iter()
        .zip(&continued.complements)
        .map(|(a, b)| (a.matrix() - b.matrix()).amax())
        .fold(0.0, f64::max);
    check(
        cross_gap <= 1e-10 && path_gap <= 1e-8,
        format!("cross-product gap {cross_gap:.2e}, continuation gap {path_gap:.2e}"),
    )
}

fn mobius_holonomy(path: &FrameField, tol: &Tolerances) -> Result<HolonomyReport, String> {
    let twist = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
    let seed = dilate(&path.samples[0].frame, tol).map_err(|e| e.to_string())?.complement;
    loop_holonomy(path, &seed, Some(&twist), tol, 0).map_err(|e| e.to_string())
}

fn equator_holonomy(path: &FrameField, tol: &Tolerances) -> Result<HolonomyReport, String> {
    let seed = dilate(&path.samples[0].frame, tol).map_err(|e| e.to_string())?.complement;
    loop_holonomy(path, &seed, None, tol, 0).map_err(|e| e.to_string())
}

fn holonomy() -> Outcome {
    let tol = Tolerances::default();
    let mobius = sample_band("mobius", &ParamGrid::segment([0.5, 0.0], [0.5, 1.0], 400))
        .map_err(|e| e.to_string())?;
    let sphere = UnitSphere;
    let equator = project_ambient_field(
        &sphere,
        &Frame::standard_basis(3),
        &ParamGrid::segment([PI / 2.0, 0.0], [PI / 2.0, 2.0 * PI], 400),
        &tol,
    )
    .map_err(|e| e.to_string())?
    .field;
    let m = mobius_holonomy(&mobius, &tol)?;
    let e = equator_holonomy(&equator, &tol)?;
    let m_gap = (m.holonomy_matrix() + DMatrix::identity(1, 1)).amax();
    let e_dist = e.distance_from_identity;
    let m_fine = mobius_holonomy(&refine_path(&mobius, &tol).map_err(|e| e.to_string())?, &tol)?;
    let e_fine = equator_holonomy(&refine_path(&equator, &tol).map_err(|e| e.to_string())?, &tol)?;
    check(
        m.classification == HolonomyClass::Nontrivial
            && m_gap <= 1e-6
            && e.classification == HolonomyClass::Trivial
            && e_dist <= 1e-6
            && m_fine.classification == m.classification
            && e_fine.classification == e.classification,
        format!(
            "mobius H = {:.12}, equator ‖H − I‖ = {e_dist:.2e}, halved classes {:?}/{:?}",
            m.holonomy[0][0], m_fine.classification, e_fine.classification
        ),
    )
}

fn obstruction() -> Outcome {
    let tol = Tolerances::default();
    let report = sphere_obstruction(100, 200, 0.03, &tol).map_err(|e| e.to_string())?;
    // recompute against the analytic zeros (0, ±1, 0) on the sphere itself
    let sphere = UnitSphere;
    let mut per_pole = [0usize; 2];
    let mut worst: f64 = 0.0;
    for hit in &report.hits {
        let p = sphere.embed(hit.uv[0], hit.uv[1]);
        let pole = usize::from(p[1] < 0.0);
        let zero = [PI / 2.0, if pole == 0 { PI / 2.0 } else { 3.0 * PI / 2.0 }];
        worst = worst.max((hit.uv[0] - zero[0]).hypot(hit.uv[1] - zero[1]));
        per_pole[pole] += 1;
    }
    check(
        !report.hits.is_empty() && worst <= 0.05 && per_pole.iter().all(|&c| c >= 1),
        format!("{} hits, per pole {per_pole:?}, farthest {worst:.4}", report.hits.len()),
    )
}

fn reconstruction_gap(f: &Frame, r: &mut ChaCha8Rng) -> f64 {
    (0..100)
        .map(|_| {
            let x = gaussian_vector(r, f.n());
            let back = synthesis(f, &analysis(f, &x).unwrap()).unwrap();
            (back - &x).norm() / x.norm()
        })
        .fold(0.0, f64::max)
}

fn reconstruction() -> Outcome {
    let tol = Tolerances::default();
    let mut r = rng(808);
    let mut frames: Vec<Frame> = Vec::new();
    for (k, n) in [(2, 1), (3, 2), (4, 2), (5, 3), (6, 4), (4, 3)] {
        for _ in 0..20 {
            let f = parseval_frame(&mut r, n, k);
            frames.push(dilate(&f, &tol).map_err(|e| e.to_string())?.complement);
            frames.push(f);
        }
    }
    let band = band_field("klein", 40, 40).map_err(|e| e.to_string())?;
    frames.extend(band.frames().cloned());
    let sphere = UnitSphere;
    let grid = ParamGrid::structured(sphere.domain(), 30, 30, sphere.grid_margin()).map_err(|e| e.to_string())?;
    let pf = project_ambient_field(&sphere, &Frame::standard_basis(3), &grid, &tol).map_err(|e| e.to_string())?;
    frames.extend(pf.field.frames().cloned());
    let worst = frames.iter().map(|f| reconstruction_gap(f, &mut r)).fold(0.0, f64::max);

    let base = parseval_frame(&mut r, 3, 7);
    let noise = gaussian_frame(&mut r, 3, 7).unwrap();
    let mut sandwich = true;
    let mut gaps = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6] {
        let s = frame_spectrum(&Frame::from_matrix(base.matrix() + noise.matrix() * eps).unwrap());
        sandwich &= s.lower <= 1.0 && 1.0 <= s.upper;
        gaps.push((1.0 - s.lower).max(s.upper - 1.0));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]) && *gaps.last().unwrap() < 1e-5;
    let all_parseval = frames.iter().all(|f| is_parseval(f, 1e-8).parseval);
    check(
        worst <= 1e-8 && sandwich && shrinking && all_parseval,
        format!(
            "{} frames, worst relative error {worst:.2e}, A ≤ 1 ≤ B {sandwich}, bound gap {:.2e} → {:.2e}",
            frames.len(),
            gaps[0],
            gaps.last().unwrap()
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("dilation correctness", dilation_correctness),
        ("dimension formula", dimension_formula),
        ("frame formulas", frame_formulas),
        ("quotient well-definedness", quotient_well_defined),
        ("uniqueness at k = n + 1", uniqueness_at_codimension_one),
        ("holonomy", holonomy),
        ("obstruction", obstruction),
        ("reconstruction", reconstruction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

