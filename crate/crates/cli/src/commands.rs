use std::f64::consts::{PI, TAU};
use std::fs;
use std::io::Write;
use std::path::Path;

use dpw_core::factorization::iwasawa_su2_samples;
use dpw_core::frobenius::{analytic_monodromy, build_frobenius, frobenius_value, isotropy_kernel};
use dpw_core::holonomy::{closing_residual, monodromy, OdeConfig};
use dpw_core::potentials::{k_equivalence_certificate, make_xi, max_residual, reduction_chain};
use dpw_core::surface::{
    closure_defect, export_defects_csv, export_mesh, fit_cylinder, generate_frames, read_points_csv, verify_cmc,
    write_obj, DomainGrid, InitialData, SurfaceConfig, SurfaceMesh,
};
use dpw_core::sym::{AmbientPoint, MeanCurvature};
use dpw_core::{CircleGrid, Exec, LoopSamples, Mat2, Potential, ZPoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{GridKind, RealForm, RunConfig};
use crate::report::Report;
use crate::CliError;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exec(cfg: &RunConfig) -> Exec {
    if cfg.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn ode(cfg: &RunConfig) -> OdeConfig {
    OdeConfig { tol: cfg.tolerances.ode, ..Default::default() }
}

fn potential(cfg: &RunConfig) -> Result<Potential, CliError> {
    if cfg.potential.vacuum {
        return Ok(Potential::vacuum());
    }
    Ok(make_xi(cfg.potential.k, cfg.c()?)?)
}

fn domain(cfg: &RunConfig) -> Result<DomainGrid, CliError> {
    let g = &cfg.grid;
    let kind = match g.kind {
        GridKind::Auto if cfg.potential.vacuum => GridKind::Rect,
        GridKind::Auto if cfg.potential.k >= 0 => GridKind::Disk,
        GridKind::Auto => GridKind::Annulus,
        k => k,
    };
    Ok(match kind {
        GridKind::Annulus => DomainGrid::annulus(g.r0, g.r1, g.theta_max, g.n_r, g.n_theta)?,
        GridKind::Disk => DomainGrid::disk(g.r1, g.theta_max, g.n_r, g.n_theta)?,
        GridKind::Rect => DomainGrid::rect(g.x0, g.x1, g.y0, g.y1, g.nx, g.ny)?,
        GridKind::Auto => unreachable!(),
    })
}

/// Identity at the origin for potentials holomorphic there; otherwise data at the first grid
/// point (the Frobenius solution for k = −1, the identity for other k).
fn initial_data(cfg: &RunConfig, xi: &Potential, domain: &DomainGrid) -> Result<InitialData, CliError> {
    if xi.is_regular_at_origin() {
        return Ok(InitialData::identity_at_origin());
    }
    let base = ZPoint::principal(domain.point(0, 0));
    if cfg.potential.k == -1 {
        Ok(InitialData::frobenius(cfg.c()?, base))
    } else {
        Ok(InitialData::identity_at(base))
    }
}

fn surface_config(cfg: &RunConfig) -> SurfaceConfig {
    SurfaceConfig { n_lambda: cfg.lambda.samples, ode: ode(cfg), exec: exec(cfg) }
}

fn seam_closes(domain: &DomainGrid) -> bool {
    domain.angular_range().is_some_and(|t| (t - TAU).abs() < 1e-12)
}

pub fn gen(cfg: &RunConfig) -> Result<bool, CliError> {
    if cfg.real_form == RealForm::Su11 {
        return Err(CliError::config("gen produces SU(2) surfaces only; set real_form = \"su2\""));
    }
    let xi = potential(cfg)?;
    let dom = domain(cfg)?;
    let init = initial_data(cfg, &xi, &dom)?;
    let h = MeanCurvature::new(cfg.h)?;
    let l0 = cfg.lambda0();
    let frames = generate_frames(&xi, &dom, &init, &surface_config(cfg))?;
    let mesh = frames.surface(h, l0)?;
    fs::create_dir_all(&cfg.output.dir)?;
    let (obj, csv) = export_mesh(&mesh, &cfg.output.dir.join(format!("{}.obj", cfg.output.name)))?;

    let (rows, cols) = dom.dims();
    println!("potential: {}", xi.descriptor());
    println!("initial data: {}", init.label());
    println!("grid: {rows} x {cols} {dom:?}");
    println!("lambda samples: {}, lambda0 = {:.6}{:+.6}i, H = {}", cfg.lambda.samples, l0.re, l0.im, cfg.h);
    println!("splitting residual: {:.3e}", frames.split_residual);
    println!("mesh: {}", obj.display());
    println!("points: {}", csv.display());
    if rows >= 3 && cols >= 3 {
        match verify_cmc(&mesh, 1) {
            Ok(r) => println!("cmc deviation: {:.3e} (mean H {:.6})", r.max_deviation, r.mean),
            Err(e) => println!("cmc deviation: not available ({e})"),
        }
    }
    if cfg.potential.vacuum {
        let fit = fit_cylinder(&mesh)?;
        println!(
            "cylinder fit: radius {:.9} (expected {:.9}), residual {:.3e}",
            fit.radius,
            1.0 / (2.0 * cfg.h.abs()),
            fit.residual
        );
    }
    if seam_closes(&dom) {
        let m = (cfg.potential.k == -1 && !cfg.potential.vacuum)
            .then(|| -> Result<LoopSamples, CliError> {
                let sol = build_frobenius(cfg.c()?, 2, 8)?;
                Ok(frames.lambda_grid.sample(&analytic_monodromy(&sol)))
            })
            .transpose()?;
        let d = closure_defect(&frames, h, l0, m.as_ref())?;
        let path = cfg.output.dir.join(format!("{}_defects.csv", cfg.output.name));
        export_defects_csv(&d, &path)?;
        println!("seam defect: {:.3e}", d.sup);
        for (r, x) in &d.table {
            println!("  r = {r:.6}  defect {x:.3e}");
        }
        if let Some(e) = d.prediction_error {
            println!("monodromy prediction error: {e:.3e}");
        }
        println!("defect table: {}", path.display());
        if d.sup > cfg.tolerances.closing {
            println!("warning: surface does not close (seam defect {:.3e} > {:.1e})", d.sup, cfg.tolerances.closing);
        }
    }
    Ok(true)
}

pub fn monodromy_cmd(cfg: &RunConfig, radius: f64, csv: Option<&Path>) -> Result<bool, CliError> {
    if !(radius > 0.0) {
        return Err(CliError::config("monodromy radius must be positive"));
    }
    let xi = potential(cfg)?;
    let z0 = ZPoint::principal(cx(radius, 0.0));
    let grid = CircleGrid::new(cfg.lambda.samples)?;
    let frob = cfg.potential.k == -1 && !cfg.potential.vacuum;
    let c = cfg.c()?;
    let init = move |l: Complex64| if frob { frobenius_value(c, &z0, l) } else { Mat2::identity() };
    let rep = monodromy(&xi, z0, &grid, &init, &ode(cfg), exec(cfg))?;
    match csv {
        Some(p) => {
            let mut f = std::io::BufWriter::new(fs::File::create(p)?);
            rep.write_csv(&mut f)?;
            f.flush()?;
        }
        None => rep.write_csv(std::io::stdout().lock())?,
    }
    let closing = (0..rep.len()).filter(|&i| closing_residual(&rep, i, cfg.tolerances.closing).closes).count();
    eprintln!("potential: {}", xi.descriptor());
    eprintln!("min distance to +/-id: {:.9e}", rep.min_distance_to_center());
    eprintln!("max |trace - 2|: {:.3e}", rep.max_trace_defect());
    eprintln!("max |det - 1|: {:.3e}", rep.det_defect);
    eprintln!("closing lambda samples: {closing} of {}", rep.len());
    Ok(true)
}

fn random_samples(n: usize, seed: u64) -> Vec<(ZPoint, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z = Complex64::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(-PI..PI));
            let l = Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-PI..PI));
            (ZPoint::principal(z), l)
        })
        .collect()
}

fn verify_gauges(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let (k, c) = (cfg.potential.k, cfg.c()?);
    let samples = random_samples(100, cfg.seed);
    r.info(format!("k = {k}, c = {c}, 100 samples, seed {}", cfg.seed));
    let eq = k_equivalence_certificate(k, c, &samples)?;
    r.below(&format!("xi_{k} ~ xi_{} under z -> 1/z and reflection", eq.partner), eq.max_residual, cfg.tolerances.gauge);
    if k == -2 && c.im == 0.0 && c.re > 0.0 {
        let lambdas: Vec<Complex64> = samples.iter().map(|s| s.1).collect();
        let chain = reduction_chain(c.re, &lambdas)?;
        for (i, (got, want)) in chain.stages.iter().zip(chain.expected_stages()).enumerate() {
            r.below(&format!("reduction stage {}", i + 1), max_residual(got, &want, &samples), cfg.tolerances.gauge);
        }
        let sc = c.re.sqrt();
        let target = Potential::new("target", false, move |z, l| Mat2::pauli(1).scale(sc / (l * z.z)));
        r.below("reduced potential sqrt(c)/lambda offdiag(1,1) dz/z", max_residual(chain.final_potential(), &target, &samples), cfg.tolerances.gauge);
    }
    Ok(())
}

fn verify_frobenius(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let c = cfg.c()?;
    let n_z = cfg.truncation.n_z.max(2);
    let sol = build_frobenius(c, n_z, 2 * n_z as i32 + 4)?;
    r.info(format!("c = {c}, N_z = {n_z}"));
    r.below("dL - L xi coefficients", sol.residual_norm()?, cfg.tolerances.frobenius);
    r.below("second-column ODE", sol.column_ode_residual()?.max_norm_through(n_z - 1), cfg.tolerances.frobenius);
    r.below("printed series form", sol.printed_form_mismatch, cfg.tolerances.frobenius);
    let grid = CircleGrid::new(cfg.lambda.samples)?;
    let z0 = ZPoint::principal(cx(1.0, 0.0));
    let init = move |l: Complex64| frobenius_value(c, &z0, l);
    let rep = monodromy(&make_xi(-1, c)?, z0, &grid, &init, &OdeConfig { tol: 1e-12, ..Default::default() }, exec(cfg))?;
    let expect = grid.sample(&analytic_monodromy(&sol));
    r.below("integrated monodromy vs id + 2 pi i D", rep.m.max_distance(&expect), cfg.tolerances.numeric);
    Ok(())
}

fn verify_isotropy(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let c = cfg.c()?;
    let k = isotropy_kernel(c, cfg.truncation.n_z, cfg.truncation.n_lambda, exec(cfg))?;
    for l in k.report().lines() {
        r.info(l);
    }
    r.equal("isotropy kernel dimension", k.dimension, 1);
    Ok(())
}

fn random_split(rng: &mut ChaCha8Rng, grid: &CircleGrid) -> (LoopSamples, LoopSamples) {
    let mut r = || rng.gen_range(-0.5..0.5);
    let (a0, a2, b1, b3) = (r(), cx(r(), r()), cx(r(), r()), cx(r(), r()));
    let (y0, p, q, s) = (r(), cx(r(), r()), cx(r(), r()), cx(r(), r()));
    let pts = grid.points();
    let f = pts
        .iter()
        .map(|&l| {
            let alpha = a0 + 2.0 * (a2 * l * l).re;
            let beta = b1 * l + (b3.conj() * l.inv().powi(3) + b3 * l.powi(3)) * 0.5;
            Mat2::new(cx(0.0, alpha), beta, -beta.conj(), cx(0.0, -alpha)).exp()
        })
        .collect();
    let b = pts
        .iter()
        .map(|&l| (Mat2::diag(cx(y0, 0.0), cx(-y0, 0.0)) + Mat2::offdiag(p, q).scale(l) + Mat2::diag(s, -s).scale(l * l)).exp())
        .collect();
    (LoopSamples { values: f }, LoopSamples { values: b })
}

fn verify_iwasawa(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let grid = CircleGrid::new(cfg.lambda.samples.max(32))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut ef, mut eb, mut unit, mut b0_defect): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let n = 10;
    for _ in 0..n {
        let (f, b) = random_split(&mut rng, &grid);
        let sp = iwasawa_su2_samples(&f.mul(&b), &grid)?;
        ef = ef.max(sp.f.max_distance(&f));
        eb = eb.max(grid.sample(&sp.b).max_distance(&b));
        unit = unit.max(sp.unitarity_defect);
        let b0 = sp.b.coeff(0);
        let sign = if b0.a11.re > 0.0 && b0.a22.re > 0.0 { 0.0 } else { 1.0 };
        b0_defect = b0_defect.max(b0.a21.norm() + b0.a11.im.abs() + b0.a22.im.abs() + sign);
    }
    r.info(format!("{n} random F*B products, seed {}, {} lambda samples", cfg.seed, grid.len()));
    r.below("unitary factor round trip", ef, cfg.tolerances.numeric);
    r.below("positive factor round trip", eb, cfg.tolerances.numeric);
    r.below("F unitary pointwise", unit, cfg.tolerances.numeric);
    r.below("B(0) real positive diagonal", b0_defect, 1e-12);
    let pts = grid.points();
    let mut vac: f64 = 0.0;
    for z in [cx(0.3, -0.2), cx(-0.5, 0.4)] {
        let l = LoopSamples { values: pts.iter().map(|&x| Mat2::pauli(1).scale(z / x).exp()).collect() };
        let exact = LoopSamples { values: pts.iter().map(|&x| Mat2::pauli(1).scale(z / x - x * z.conj()).exp()).collect() };
        vac = vac.max(iwasawa_su2_samples(&l, &grid)?.f.max_distance(&exact));
    }
    r.below("vacuum closed-form splitting", vac, cfg.tolerances.numeric);
    Ok(())
}

fn verify_nonclosing(cfg: &RunConfig, r: &mut Report) -> Result<(), CliError> {
    let c = cfg.c()?;
    let xi = make_xi(-1, c)?;
    let grid = CircleGrid::new(cfg.lambda.samples)?;
    let z0 = ZPoint::principal(cx(1.0, 0.0));
    let init = move |l: Complex64| frobenius_value(c, &z0, l);
    let rep = monodromy(&xi, z0, &grid, &init, &OdeConfig { tol: 1e-12, ..Default::default() }, exec(cfg))?;
    r.info(format!("xi_-1, c = {c}, {} lambda samples, {} lambda0 values", grid.len(), cfg.lambda.sweep));
    let rho = rep.rho_plus.iter().fold(0.0f64, |a, b| a.max((b - TAU * c.norm()).abs()));
    r.below("||M - id|| = 2 pi |c| at every lambda", rho, 1e-6);
    r.above("min over lambda of min ||M -/+ id||", rep.min_distance_to_center(), cfg.tolerances.closing);
    r.below("|trace M - 2|", rep.max_trace_defect(), 1e-8);

    let g = &cfg.grid;
    let dom = DomainGrid::annulus(g.r0, g.r1, TAU, g.n_r, g.n_theta)?;
    let frames = generate_frames(&xi, &dom, &InitialData::frobenius(c, ZPoint::principal(dom.point(0, 0))), &SurfaceConfig {
        n_lambda: cfg.lambda.samples,
        ode: OdeConfig { tol: 1e-12, ..Default::default() },
        exec: exec(cfg),
    })?;
    let m = frames.lambda_grid.sample(&analytic_monodromy(&build_frobenius(c, 2, 8)?));
    let h = MeanCurvature::new(cfg.h)?;
    let (mut margin, mut pred): (f64, f64) = (f64::INFINITY, 0.0);
    for k in 0..cfg.lambda.sweep {
        let l0 = Complex64::from_polar(1.0, cfg.lambda.t0 + TAU * k as f64 / cfg.lambda.sweep as f64);
        let d = closure_defect(&frames, h, l0, Some(&m))?;
        margin = margin.min(d.sup);
        pred = pred.max(d.prediction_error.unwrap_or(f64::INFINITY));
    }
    r.above("seam defect margin over the lambda0 sweep", margin, cfg.tolerances.closing);
    r.below("seam defect vs monodromy prediction", pred, 1e-6);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Gauges,
    Frobenius,
    Isotropy,
    Iwasawa,
    Nonclosing,
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Result<bool, CliError> {
    let mut r = Report::new(format!("verify {}", format!("{suite:?}").to_lowercase()));
    match suite {
        Suite::Gauges => verify_gauges(cfg, &mut r)?,
        Suite::Frobenius => verify_frobenius(cfg, &mut r)?,
        Suite::Isotropy => verify_isotropy(cfg, &mut r)?,
        Suite::Iwasawa => verify_iwasawa(cfg, &mut r)?,
        Suite::Nonclosing => verify_nonclosing(cfg, &mut r)?,
    }
    print!("{}", r.render());
    if let Some(f) = r.first_failure() {
        eprintln!("check failed: {} (measured {}, tolerance {})", f.name, f.measured, f.tolerance);
    }
    Ok(r.passed())
}

/// Point CSV from `gen` back to OBJ.
pub fn export(input: &Path, output: &Path) -> Result<bool, CliError> {
    let (rows, cols, pts) = read_points_csv(input)?;
    let dom = DomainGrid::rect(0.0, 1.0, 0.0, 1.0, rows, cols)?;
    let mesh = SurfaceMesh::new(
        dom,
        pts.into_iter().map(AmbientPoint::euclidean).collect(),
        cx(1.0, 0.0),
        format!("from {}", input.display()),
        0.5,
    );
    let mut f = std::io::BufWriter::new(fs::File::create(output)?);
    write_obj(&mesh, &mut f)?;
    f.flush()?;
    println!("wrote {} ({rows} x {cols} points)", output.display());
    Ok(true)
}
