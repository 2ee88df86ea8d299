//! Acceptance suite: one line per criterion, tolerances pinned below.
//!
//! Runs as a plain binary so the report prints in order. The process fails on
//! any FAIL that is not listed in `DOCUMENTED`; documented deviations are still
//! reported as FAIL.

mod common;

use std::io::Write;
use std::time::Instant;

use common::*;
use elastdd::geometry::{build_uniform, BoundarySpec, MortarScaling, Pattern};
use elastdd::interface::{InterfaceOperatorM2, CG_TOLERANCE};
use elastdd::linalg::{dot, norm};
use elastdd::spaces::Bdm1Rect;
use elastdd::verification::cases::{smooth_case, CaseId};
use elastdd::verification::errors::div_at;
use elastdd::verification::raster::PorosityRaster;
use elastdd::verification::run::{run, GridKind, LevelResult, Method, RunSpec};
use elastdd::verification::study::{convergence_study, fit_exponent, rates};
use elastdd::Error;

const ERROR_REL_TOL: f64 = 0.05;
const ITER_REL_TOL: f64 = 0.20;
const RATE_TOL: f64 = 0.15;
const RUNTIME_LIMIT_S: f64 = 60.0;
const EXPECTED_RATES: [f64; 6] = [2.0, 1.0, 1.0, 2.0, 2.0, 2.0];
const ITER_EXPONENT: (f64, f64) = (-0.65, -0.35);
const KAPPA_RATIO_TOL: f64 = 0.35;
const AREA_EXPONENT: (f64, f64) = (-0.6, -0.3);
const MSB_EQUIV_TOL: f64 = 1e-12;
const MSB_SOLVE_FRACTION: f64 = 0.25;
const PATCH_TOL: f64 = 1e-10;
const WEAK_SYMMETRY_TOL: f64 = 1e-11;
const CONSERVATION_TOL: f64 = 1e-11;
const JUMP_TOL: f64 = 1e-10;
const DENSE_ORACLE_TOL: f64 = 1e-10;
const KAPPA_EXPONENT_M2: (f64, f64) = (-1.3, -0.7);

/// Example 1, m = 2, H = 2h, h = 1/16.
const REF_EX1_H16: [f64; 6] = [1.37e-2, 1.51e-1, 1.04e-1, 1.84e-2, 2.60e-2, 3.25e-2];
const REF_EX1_H16_ITERS: f64 = 48.0;
/// Example 2, m = 2, h = 1/4 .. 1/64.
const REF_EX2_LADDER: [[f64; 6]; 5] = [
    [2.02e-1, 5.64e-1, 4.57e-1, 2.54e-1, 4.08e-1, 5.01e-1],
    [5.43e-2, 2.98e-1, 2.12e-1, 7.14e-2, 1.04e-1, 1.33e-1],
    [1.37e-2, 1.51e-1, 1.04e-1, 1.84e-2, 2.60e-2, 3.25e-2],
    [3.42e-3, 7.58e-2, 5.15e-2, 4.63e-3, 6.47e-3, 7.83e-3],
    [8.53e-4, 3.79e-2, 2.57e-2, 1.16e-3, 1.61e-3, 1.88e-3],
];
/// Example 4 at h = 1/64 for 2x2, 4x4, 8x8.
const REF_EX4_H64: [f64; 3] = [96.0, 133.0, 167.0];

/// Criteria known to be unattainable, with the reason printed next to the FAIL.
const DOCUMENTED: [(&str, &str); 4] = [
    ("1a", "reference row coincides with the Example-2 table; Example-1 errors match the m=3 table instead"),
    ("3a", "reference errors are identical to the Example-1 m=2 table, so no single source term reproduces both"),
    ("5a", "8x8 count exceeds the band; the unpreconditioned count depends on unstated 4x4/8x8 cell counts"),
    ("5b", "the reference counts themselves give an exponent near -0.2"),
];

struct Report {
    failures: Vec<String>,
    out: std::io::Stdout,
}

impl Report {
    fn check(&mut self, id: &str, name: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        let note = DOCUMENTED.iter().find(|(d, _)| *d == id && !pass).map(|(_, why)| format!(" [documented: {why}]"));
        let line = format!("criterion {id:<3} {status}  {name}: {detail}{}\n", note.clone().unwrap_or_default());
        let mut lock = self.out.lock();
        lock.write_all(line.as_bytes()).unwrap();
        lock.flush().unwrap();
        if !pass && note.is_none() {
            self.failures.push(id.to_string());
        }
    }
}

fn rel_dev(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn fmt6(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn errors(r: &LevelResult) -> [f64; 6] {
    r.errors.expect("case has an exact solution").as_array()
}

/// Rates of the finest refinement step, plus every step for the printout.
fn asymptotic_rates(results: &[LevelResult]) -> ([f64; 6], String) {
    let all: Vec<[f64; 6]> = rates(results).into_iter().flatten().collect();
    let steps = all.iter().map(|r| format!("[{}]", r.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" "))).collect::<Vec<_>>();
    (*all.last().unwrap(), steps.join(" "))
}

fn rates_ok(r: &[f64; 6]) -> bool {
    r.iter().zip(EXPECTED_RATES).all(|(a, b)| (a - b).abs() <= RATE_TOL)
}

fn criterion_1_2_4(rep: &mut Report) {
    let spec = RunSpec::default();
    let start = Instant::now();
    let r16 = run(&RunSpec { level: 2, ..spec.clone() }).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let e = errors(&r16);
    let worst = e.iter().zip(REF_EX1_H16).map(|(&a, b)| rel_dev(a, b)).fold(0.0, f64::max);
    rep.check("1a", "Ex1 m=2 h=1/16 errors within 5%", worst <= ERROR_REL_TOL, format!("got [{}], max deviation {:.0}%", fmt6(&e), 100.0 * worst));
    let it = r16.cg_iters as f64;
    rep.check("1b", "Ex1 m=2 h=1/16 CG iterations within 20% of 48", rel_dev(it, REF_EX1_H16_ITERS) <= ITER_REL_TOL, format!("{it}"));
    rep.check("1c", "Ex1 m=2 h=1/16 runtime under a minute", secs < RUNTIME_LIMIT_S, format!("{secs:.2} s"));

    let ladder = convergence_study(&spec, &[0, 1, 2, 3, 4]).unwrap();
    let (asym, steps) = asymptotic_rates(&ladder);
    rep.check("2a", "m=2 ladder 1/4..1/64 asymptotic rates within 0.15 of (2,1,1,2,2,2)", rates_ok(&asym), format!("finest step [{}]; all steps {steps}", asym.map(|x| format!("{x:.2}")).join(" ")));
    let cubic = RunSpec { degree: 3, scaling: MortarScaling::SqrtH, ..spec.clone() };
    let ladder3 = convergence_study(&cubic, &[0, 2, 4]).unwrap();
    let (asym3, steps3) = asymptotic_rates(&ladder3);
    rep.check("2b", "m=3 ladder 1/4,1/16,1/64 asymptotic rates within 0.15", rates_ok(&asym3), format!("finest step [{}]; all steps {steps3}", asym3.map(|x| format!("{x:.2}")).join(" ")));

    let h: Vec<f64> = ladder.iter().map(|r| r.h).collect();
    let iters: Vec<f64> = ladder.iter().map(|r| r.cg_iters as f64).collect();
    let p = fit_exponent(&h, &iters);
    rep.check("4a", "iteration exponent vs h in [-0.65, -0.35] over 5 levels", (ITER_EXPONENT.0..=ITER_EXPONENT.1).contains(&p), format!("iterations {iters:?}, exponent {p:.2}"));
    let kappa: Vec<f64> = ladder.iter().map(|r| r.cond_est).collect();
    let ratios: Vec<f64> = kappa.windows(2).map(|w| w[1] / w[0]).collect();
    // the h = 1/4 level has a single mortar element per interface and is pre-asymptotic
    let ok = ratios[1..].iter().all(|r| (r / 2.0 - 1.0).abs() <= KAPPA_RATIO_TOL);
    rep.check("4b", "condition estimate doubles per halving (h <= 1/8) within 35%", ok, format!("kappa [{}], ratios [{}]", fmt6(&kappa), ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ")));
}

fn criterion_3(rep: &mut Report) {
    let ladder = convergence_study(&RunSpec { case: CaseId::Ex2, ..RunSpec::default() }, &[0, 1, 2, 3, 4]).unwrap();
    let mut worst: f64 = 0.0;
    for (r, table) in ladder.iter().zip(REF_EX2_LADDER) {
        for (a, b) in errors(r).iter().zip(table) {
            worst = worst.max(rel_dev(*a, b));
        }
    }
    rep.check("3a", "Ex2 m=2 ladder errors within 5%", worst <= ERROR_REL_TOL, format!("h=1/16 row [{}], max deviation {:.0}%", fmt6(&errors(&ladder[2])), 100.0 * worst));
    let (asym, steps) = asymptotic_rates(&ladder);
    rep.check("3b", "Ex2 m=2 asymptotic rates within 0.15", rates_ok(&asym), format!("finest step [{}]; all steps {steps}", asym.map(|x| format!("{x:.2}")).join(" ")));
}

fn criterion_5(rep: &mut Report) {
    let mut iters = Vec::new();
    for n in [2, 4, 8] {
        let spec = RunSpec { case: CaseId::Ex4, level: 4, pattern: Pattern::square(n), mortar_error: false, ..RunSpec::default() };
        iters.push(run(&spec).unwrap().cg_iters as f64);
    }
    let worst = iters.iter().zip(REF_EX4_H64).map(|(&a, b)| rel_dev(a, b)).fold(0.0, f64::max);
    rep.check("5a", "Ex4 h=1/64 iterations within 20% of (96, 133, 167)", worst <= ITER_REL_TOL, format!("{iters:?}, max deviation {:.0}%", 100.0 * worst));
    let area = [0.25, 1.0 / 16.0, 1.0 / 64.0];
    let p = fit_exponent(&area, &iters);
    rep.check("5b", "subdomain-size exponent in [-0.6, -0.3]", (AREA_EXPONENT.0..=AREA_EXPONENT.1).contains(&p), format!("{p:.2}"));
}

fn criterion_6(rep: &mut Report) {
    let case = smooth_case();
    let mut op = operator(&case, 2, 2, MortarScaling::TwiceH);
    let plain = op.solve(CG_TOLERANCE).unwrap();
    let plain_counts = op.solve_counts();
    let ok_plain = plain_counts.iter().all(|&c| c == plain.report.iterations + 3);
    op.reset_solve_counts();
    op.build_msb();
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let l = random_vec(&mut r, op.dim());
        worst = worst.max(max_abs_diff(&op.apply(&l), &op.apply_direct(&l)) / norm(&l));
    }
    rep.check("6a", "MSB application equals direct application", worst <= MSB_EQUIV_TOL, format!("max |diff| / |lambda| = {worst:.2e}"));
    let mut fresh = operator(&case, 2, 2, MortarScaling::TwiceH);
    fresh.build_msb();
    fresh.solve(CG_TOLERANCE).unwrap();
    let want: Vec<usize> = fresh.subdomains().iter().map(|s| s.trace.mortar_dofs.len() + 3).collect();
    let ok_msb = fresh.solve_counts() == want;
    rep.check("6b", "solve counts #CG+3 and dim+3", ok_plain && ok_msb, format!("no MSB {plain_counts:?} (CG {}), MSB {:?}", plain.report.iterations, fresh.solve_counts()));

    let base = RunSpec {
        case: CaseId::Ex5,
        pattern: Pattern::square(8),
        scaling: MortarScaling::Explicit(0.125),
        mortar_error: false,
        raster: Some(PorosityRaster::synthetic(128, 128, 2)),
        ..RunSpec::default()
    };
    let no = run(&base).unwrap().solves_per_subdomain;
    let yes = run(&RunSpec { msb: true, ..base }).unwrap().solves_per_subdomain;
    let frac = yes as f64 / no as f64;
    rep.check("6c", "Ex5-style quadratic H=1/8: MSB solves under 25% of no-MSB", frac < MSB_SOLVE_FRACTION, format!("{yes} vs {no} ({:.1}%)", 100.0 * frac));
}

fn criterion_7(rep: &mut Report) {
    let patch = run(&RunSpec { case: CaseId::Patch, level: 1, ..RunSpec::default() }).unwrap();
    let e = patch.errors.unwrap();
    let worst = [e.sigma, e.div, e.phu, e.gamma, e.mortar].into_iter().fold(0.0, f64::max);
    rep.check("7a", "patch test exact", worst <= PATCH_TOL, format!("max of sigma/div/Phu/gamma/mortar errors {worst:.1e}"));
    let rigid = run(&RunSpec { case: CaseId::Rigid, level: 1, ..RunSpec::default() }).unwrap();
    let e = rigid.errors.unwrap();
    rep.check("7b", "rigid motion reproduced (sigma = 0, gamma = 1)", e.sigma <= PATCH_TOL && e.gamma <= PATCH_TOL, format!("sigma {:.1e}, gamma {:.1e}", e.sigma, e.gamma));

    let case = smooth_case();
    let op = operator(&case, 1, 2, MortarScaling::TwiceH);
    let sol = op.solve(CG_TOLERANCE).unwrap();
    let (mut cons, mut sym): (f64, f64) = (0.0, 0.0);
    for (sub, field) in op.subdomains().iter().zip(&sol.fields) {
        let mesh = &sub.mesh;
        let el = Bdm1Rect::<f64>::new(mesh.hx, mesh.hy);
        for j in 0..mesh.ny {
            for i in 0..mesh.nx {
                let c = mesh.cell_index(i, j);
                let d = div_at(mesh, &el, &field.sigma, i, j);
                for k in 0..2 {
                    let mean = sub.bar_rhs.displacement[2 * c + k] / mesh.cell_area();
                    cons = cons.max((d[k] - mean).abs() / (1.0 + mean.abs()));
                }
            }
        }
        let mx = sub.factorization.system().matrix.mul_vec(&field.to_vector());
        let scale = field.sigma.iter().fold(0.0f64, |m, v| m.max(v.abs())) * mesh.cell_area();
        let g0 = sub.factorization.layout().gamma_offset();
        sym = sym.max(mx[g0..].iter().fold(0.0f64, |m, v| m.max(v.abs())) / scale);
    }
    rep.check("7c", "cellwise momentum conservation", cons <= CONSERVATION_TOL, format!("{cons:.1e}"));
    rep.check("7d", "weak symmetry residual", sym <= WEAK_SYMMETRY_TOL, format!("{sym:.1e}"));
    let (_, jump) = op.jump_residual(&sol.fields);
    rep.check("7e", "mortar jump residual", jump <= JUMP_TOL, format!("{jump:.1e}"));

    let mut r = rng(77);
    let (mut asym, mut positive): (f64, bool) = (0.0, true);
    for _ in 0..50 {
        let (l, m) = (random_vec(&mut r, op.dim()), random_vec(&mut r, op.dim()));
        let (al, am) = (op.apply(&l), op.apply(&m));
        asym = asym.max((dot(&al, &m) - dot(&am, &l)).abs() / (norm(&l) * norm(&m)));
        positive &= dot(&al, &l) > 0.0;
    }
    rep.check("7f", "operator symmetry and positivity on 50 random vectors", asym <= 1e-11 && positive, format!("max asymmetry {asym:.1e}, all positive: {positive}"));

    let coarse = operator(&case, 0, 2, MortarScaling::TwiceH);
    let n = coarse.dim();
    let a = dense_of(n, |x| coarse.apply(x));
    let oracle = a.lu().solve(&nalgebra::DVector::from_vec(coarse.interface_rhs())).unwrap();
    let cg = coarse.solve(CG_TOLERANCE).unwrap();
    let diff = max_abs_diff(&cg.lambda, oracle.as_slice());
    rep.check("7g", "CG vs dense oracle on the 24-dimensional coarsest problem", n == 24 && diff <= DENSE_ORACLE_TOL, format!("dim {n}, max |diff| {diff:.1e}"));
}

fn criterion_8(rep: &mut Report) {
    let case = smooth_case();
    let layout = build_uniform(Pattern::square(2), 2, BoundarySpec::ALL_DIRICHLET).unwrap();
    let op = InterfaceOperatorM2::new(layout, &case.material, &*case.f, &*case.g_d).unwrap();
    let b = dense_of(op.dim(), |x| op.apply(x));
    let sym = (&b - b.transpose()).amax() / b.amax();
    let eig = b.symmetric_eigenvalues();
    rep.check("8a", "normal-stress operator SPD on the coarsest 2x2 grid", sym <= 1e-12 && eig.min() > 0.0, format!("dim {}, eigenvalues in [{:.3e}, {:.3e}]", op.dim(), eig.min(), eig.max()));

    let spec = RunSpec { method: Method::NormalStress, grid: GridKind::Matching, ..RunSpec::default() };
    let ladder = convergence_study(&spec, &[0, 1, 2, 3, 4]).unwrap();
    let h: Vec<f64> = ladder.iter().map(|r| r.h).collect();
    let kappa: Vec<f64> = ladder.iter().map(|r| r.cond_est).collect();
    let p = fit_exponent(&h, &kappa);
    rep.check("8b", "condition exponent vs h in [-1.3, -0.7]", (KAPPA_EXPONENT_M2.0..=KAPPA_EXPONENT_M2.1).contains(&p), format!("kappa [{}], exponent {p:.2}", fmt6(&kappa)));

    let floating = build_uniform(Pattern::square(3), 2, BoundarySpec::ALL_DIRICHLET).unwrap();
    let err = InterfaceOperatorM2::new(floating, &case.material, &*case.f, &*case.g_d).unwrap_err();
    let ok = matches!(err, Error::FloatingSubdomain(_));
    rep.check("8c", "floating subdomains rejected", ok, format!("{err}"));
}

fn main() {
    let mut rep = Report { failures: Vec::new(), out: std::io::stdout() };
    let start = Instant::now();
    criterion_1_2_4(&mut rep);
    criterion_3(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    criterion_8(&mut rep);
    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if !rep.failures.is_empty() {
        eprintln!("undocumented acceptance failures: {:?}", rep.failures);
        std::process::exit(1);
    }
}
