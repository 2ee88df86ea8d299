//! One complete solve: build the layout, solve the interface problem, recover
//! the subdomain fields and measure errors.

use std::time::Instant;

use crate::geometry::{
    build_checkerboard_on, build_decomposition, build_mortar_grids, coarseness_warnings, Continuity, Layout, MortarScaling,
    Pattern,
};
use crate::interface::{InterfaceOperatorM1, InterfaceOperatorM2, InterfaceSolution};
use crate::spaces::{check_mortar_solvability, MortarBasis, MortarSpace, SubdomainTrace};
use crate::verification::cases::{make_case, CaseId, ManufacturedCase};
use crate::verification::errors::{compute_errors, ErrorReport};
use crate::verification::raster::PorosityRaster;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Displacement mortar.
    Displacement,
    /// Normal-stress multiplier on matching grids.
    NormalStress,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridKind {
    /// Non-matching `2 : 3` checkerboard.
    Checkerboard,
    /// Same grid in every subdomain.
    Matching,
}

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub case: CaseId,
    pub method: Method,
    pub degree: usize,
    pub continuity: Continuity,
    /// Mortar basis seen by the interface iteration.
    pub mortar_basis: MortarBasis,
    pub scaling: MortarScaling,
    pub grid: GridKind,
    /// Refinement level: nominal `h = 1 / (4 * 2^level)` regardless of the pattern.
    pub level: u32,
    pub pattern: Pattern,
    pub tol: f64,
    pub msb: bool,
    pub raster: Option<PorosityRaster>,
    /// Fine cells per side of the porosity problem.
    pub fine_cells: usize,
    pub mortar_error: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            case: CaseId::Ex1,
            method: Method::Displacement,
            degree: 2,
            continuity: Continuity::Discontinuous,
            mortar_basis: MortarBasis::default(),
            scaling: MortarScaling::TwiceH,
            grid: GridKind::Checkerboard,
            level: 0,
            pattern: Pattern::square(2),
            tol: crate::interface::CG_TOLERANCE,
            msb: false,
            raster: None,
            fine_cells: 128,
            mortar_error: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LevelResult {
    pub level: u32,
    pub h: f64,
    /// Mortar element size (`NaN` when the mortar follows the trace grid or for the normal-stress method).
    pub big_h: f64,
    pub errors: Option<ErrorReport>,
    pub cg_iters: usize,
    pub cond_est: f64,
    pub solves_per_subdomain: usize,
    pub interface_dim: usize,
    /// Largest mortar dimension adjacent to one subdomain.
    pub max_local_dim: usize,
    pub jump_residual: f64,
    pub solvability_constant: f64,
    pub warnings: Vec<String>,
    pub seconds: f64,
}

fn log2_exact(n: usize) -> Option<u32> {
    n.is_power_of_two().then(|| n.trailing_zeros())
}

/// Layout for a run spec.
pub fn build_layout(spec: &RunSpec, case: &ManufacturedCase) -> Result<Layout> {
    let p = spec.pattern;
    if spec.case == CaseId::Ex5 {
        if spec.fine_cells % p.cols != 0 || spec.fine_cells % p.rows != 0 {
            return Err(Error::Config(format!("{} fine cells do not split over {p}", spec.fine_cells)));
        }
        let (cx, cy) = (spec.fine_cells / p.cols, spec.fine_cells / p.rows);
        return build_decomposition(case.domain, p, case.boundary, 1.0 / spec.fine_cells as f64, |_, _| (cx, cy));
    }
    let grid = if spec.method == Method::NormalStress { GridKind::Matching } else { spec.grid };
    match grid {
        GridKind::Checkerboard => {
            if p.rows != p.cols {
                return Err(Error::Config(format!("checkerboard pattern {p} must be square")));
            }
            let n = log2_exact(p.cols)
                .ok_or_else(|| Error::Config(format!("pattern size {} must be a power of two", p.cols)))?;
            let sub_level = (spec.level + 1)
                .checked_sub(n)
                .ok_or_else(|| Error::Config(format!("level {} too coarse for pattern {p}", spec.level)))?;
            build_checkerboard_on(case.domain, sub_level, p, case.boundary)
        }
        GridKind::Matching => {
            let total = 4usize << spec.level;
            if total % p.cols != 0 || total % p.rows != 0 {
                return Err(Error::Config(format!("level {} gives {total} cells, which do not split over {p}", spec.level)));
            }
            let (cx, cy) = (total / p.cols, total / p.rows);
            let h = case.domain.width() / total as f64;
            build_decomposition(case.domain, p, case.boundary, h, |_, _| (cx, cy))
        }
    }
}

/// `L^2(Gamma)` projection of the exact displacement onto the mortar space.
pub fn project_exact(layout: &Layout, mortar: &MortarSpace, u: &(dyn Fn(f64, f64) -> [f64; 2] + Sync)) -> Vec<f64> {
    let ifaces = &layout.decomposition.interfaces;
    mortar.project_function(|t, g| {
        let (x, y) = ifaces[g].point(t);
        u(x, y)
    })
}

pub fn run(spec: &RunSpec) -> Result<LevelResult> {
    let start = Instant::now();
    if spec.degree == 0 && spec.method == Method::Displacement && spec.scaling != MortarScaling::TraceMatching {
        return Err(Error::Config("mortar degree must be at least 1".into()));
    }
    let case = make_case(&spec.case, spec.raster.as_ref())?;
    let layout = build_layout(spec, &case)?;
    let h = layout.decomposition.nominal_h;
    match spec.method {
        Method::Displacement => run_m1(spec, &case, layout, h, start),
        Method::NormalStress => run_m2(spec, &case, layout, h, start),
    }
}

fn run_m1(spec: &RunSpec, case: &ManufacturedCase, layout: Layout, h: f64, start: Instant) -> Result<LevelResult> {
    let (degree, continuity) = if spec.scaling == MortarScaling::TraceMatching {
        (1, Continuity::Discontinuous)
    } else {
        (spec.degree, spec.continuity)
    };
    let grids = build_mortar_grids(&layout, spec.scaling, degree, continuity)?;
    let warnings = coarseness_warnings(&layout, &grids);
    let big_h = spec.scaling.resolve(h).unwrap_or(f64::NAN);
    let mortar = MortarSpace::new(grids).with_basis(spec.mortar_basis);
    let traces: Vec<_> =
        layout.meshes.iter().map(|m| SubdomainTrace::new(m, &layout.decomposition, &mortar)).collect();
    let solvability = check_mortar_solvability(&layout, &mortar, &traces).into_result()?;
    let max_local_dim = traces.iter().map(|t| t.mortar_dofs.len()).max().unwrap_or(0);
    let f = case.f.clone();
    let g_d = case.g_d.clone();
    let mut op = InterfaceOperatorM1::new(layout, mortar, &case.material, &*f, &*g_d)?;
    if spec.msb && op.dim() > 0 {
        op.build_msb();
    }
    let InterfaceSolution { lambda, fields, report } = op.solve(spec.tol)?;
    let (_, jump) = op.jump_residual(&fields);
    let mut errors = case.exact.as_ref().map(|ex| compute_errors(op.layout(), &fields, ex));
    if let (Some(err), Some(ex), true) = (errors.as_mut(), case.exact.as_ref(), spec.mortar_error && op.dim() > 0) {
        let ph = project_exact(op.layout(), op.mortar(), &*ex.u);
        let diff: Vec<f64> = ph.iter().zip(&lambda).map(|(a, b)| a - b).collect();
        let num = op.energy(&diff).max(0.0);
        let den = op.energy(&ph).max(0.0);
        err.mortar = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    }
    Ok(LevelResult {
        level: spec.level,
        h,
        big_h,
        errors,
        cg_iters: report.iterations,
        cond_est: report.cond_est,
        solves_per_subdomain: report.solves,
        interface_dim: op.dim(),
        max_local_dim,
        jump_residual: jump,
        solvability_constant: solvability.constant(),
        warnings,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_m2(spec: &RunSpec, case: &ManufacturedCase, layout: Layout, h: f64, start: Instant) -> Result<LevelResult> {
    let f = case.f.clone();
    let g_d = case.g_d.clone();
    let op = InterfaceOperatorM2::new(layout, &case.material, &*f, &*g_d)?;
    let InterfaceSolution { fields, report, .. } = op.solve(spec.tol)?;
    let errors = case.exact.as_ref().map(|ex| compute_errors(op.layout(), &fields, ex));
    Ok(LevelResult {
        level: spec.level,
        h,
        big_h: f64::NAN,
        errors,
        cg_iters: report.iterations,
        cond_est: report.cond_est,
        solves_per_subdomain: report.solves,
        interface_dim: op.dim(),
        max_local_dim: 0,
        jump_residual: 0.0,
        solvability_constant: f64::NAN,
        warnings: Vec::new(),
        seconds: start.elapsed().as_secs_f64(),
    })
}
