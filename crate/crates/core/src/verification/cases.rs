//! Test problems with closed-form solutions, plus the heterogeneous
//! porosity-driven problem.

use std::sync::Arc;

use crate::geometry::{BoundaryKind, BoundarySpec, Rect};
use crate::spaces::{Lame, MaterialField};
use crate::verification::raster::PorosityRaster;
use crate::{Error, Result};

type Field2 = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;
type Tensor2 = Arc<dyn Fn(f64, f64) -> [[f64; 2]; 2] + Send + Sync>;
type Scalar2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Closed-form displacement with first and second derivatives.
///
/// `grad[a][b] = d_b u_a`, `hess[a][b][c] = d_b d_c u_a`.
#[derive(Clone)]
pub struct Displacement {
    pub u: Field2,
    pub grad: Tensor2,
    pub hess: Arc<dyn Fn(f64, f64) -> [[[f64; 2]; 2]; 2] + Send + Sync>,
}

/// Lame field with its gradient (zero away from material jumps).
#[derive(Clone)]
pub struct LameLaw {
    pub lame: Arc<dyn Fn(f64, f64) -> Lame<f64> + Send + Sync>,
    /// `(grad lambda, grad mu)`.
    pub grad: Arc<dyn Fn(f64, f64) -> ([f64; 2], [f64; 2]) + Send + Sync>,
}

/// Exact solution fields.
#[derive(Clone)]
pub struct Exact {
    pub u: Field2,
    pub sigma: Tensor2,
    pub gamma: Scalar2,
    /// `div sigma`.
    pub div_sigma: Field2,
}

#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub domain: Rect,
    pub boundary: BoundarySpec,
    pub material: MaterialField,
    pub exact: Option<Exact>,
    pub f: Field2,
    pub g_d: Field2,
}

impl std::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).field("boundary", &self.boundary).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CaseId {
    Ex1,
    Ex2,
    Ex4,
    Ex5,
    Patch,
    Rigid,
}

impl std::str::FromStr for CaseId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "ex1" => Ok(CaseId::Ex1),
            "2" | "ex2" => Ok(CaseId::Ex2),
            "4" | "ex4" => Ok(CaseId::Ex4),
            "5" | "ex5" => Ok(CaseId::Ex5),
            "patch" => Ok(CaseId::Patch),
            "rigid" => Ok(CaseId::Rigid),
            other => Err(Error::Config(format!("unknown example '{other}'"))),
        }
    }
}

impl std::fmt::Display for CaseId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseId::Ex1 => "ex1",
            CaseId::Ex2 => "ex2",
            CaseId::Ex4 => "ex4",
            CaseId::Ex5 => "ex5",
            CaseId::Patch => "patch",
            CaseId::Rigid => "rigid",
        };
        f.write_str(s)
    }
}

/// Poisson ratio of the smooth-coefficient problem.
pub const EX1_NU: f64 = 0.2;
/// Porosity at which the effective modulus vanishes.
pub const POROSITY_CUTOFF: f64 = 0.5;
/// Poisson ratio used with the porosity-driven modulus.
pub const EX5_NU: f64 = 0.2;

/// Lame pair from Young's modulus and Poisson ratio, in the form used by the
/// smooth-coefficient benchmark.
pub fn lame_from_young(e: f64, nu: f64) -> Lame<f64> {
    Lame::new(e * nu / ((1.0 - nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + 2.0 * nu)))
}

/// `E = 100 (1 - phi / c)^2.1`.
pub fn porosity_modulus(phi: f64) -> f64 {
    100.0 * (1.0 - phi / POROSITY_CUTOFF).powf(2.1)
}

pub fn make_case(id: &CaseId, raster: Option<&PorosityRaster>) -> Result<ManufacturedCase> {
    Ok(match id {
        CaseId::Ex1 | CaseId::Ex4 => {
            let mut c = smooth_case();
            c.name = id.to_string();
            c
        }
        CaseId::Ex2 => discontinuous_case(),
        CaseId::Patch => patch_case(),
        CaseId::Rigid => rigid_case(),
        CaseId::Ex5 => {
            let raster = raster.ok_or_else(|| Error::Config("ex5 needs a porosity raster".into()))?;
            porosity_case(raster)?
        }
    })
}

/// Build the full case from a displacement and a material law, with
/// `f = div sigma` from the product rule.
pub fn from_displacement(name: &str, disp: Displacement, law: LameLaw) -> ManufacturedCase {
    let sigma: Tensor2 = {
        let (grad, lame) = (disp.grad.clone(), law.lame.clone());
        Arc::new(move |x, y| {
            let g = grad(x, y);
            let l = lame(x, y);
            let eps = [[g[0][0], 0.5 * (g[0][1] + g[1][0])], [0.5 * (g[0][1] + g[1][0]), g[1][1]]];
            l.stress_from_strain(eps)
        })
    };
    let gamma: Scalar2 = {
        let grad = disp.grad.clone();
        Arc::new(move |x, y| {
            let g = grad(x, y);
            0.5 * (g[1][0] - g[0][1])
        })
    };
    let div_sigma: Field2 = {
        let (grad, hess, lame, dl) = (disp.grad.clone(), disp.hess.clone(), law.lame.clone(), law.grad.clone());
        Arc::new(move |x, y| {
            let g = grad(x, y);
            let h = hess(x, y);
            let l = lame(x, y);
            let (glam, gmu) = dl(x, y);
            let div = g[0][0] + g[1][1];
            let grad_div = [h[0][0][0] + h[1][1][0], h[0][0][1] + h[1][1][1]];
            let mut out = [0.0; 2];
            for a in 0..2 {
                let mut s = glam[a] * div + l.lambda * grad_div[a];
                for b in 0..2 {
                    s += gmu[b] * (g[a][b] + g[b][a]) + l.mu * (h[a][b][b] + h[b][a][b]);
                }
                out[a] = s;
            }
            out
        })
    };
    let lame = law.lame.clone();
    let material = MaterialField::new(move |x, y| lame(x, y));
    let exact = Exact { u: disp.u.clone(), sigma, gamma, div_sigma: div_sigma.clone() };
    ManufacturedCase {
        name: name.to_string(),
        domain: Rect::UNIT,
        boundary: BoundarySpec::ALL_DIRICHLET,
        material,
        exact: Some(exact),
        f: div_sigma,
        g_d: disp.u,
    }
}

pub fn smooth_displacement() -> Displacement {
    Displacement {
        u: Arc::new(|x, y| {
            [
                x.powi(3) * y.powi(4) + x * x + (x * y).sin() * y.cos(),
                x.powi(4) * y.powi(3) + y * y + (x * y).cos() * x.sin(),
            ]
        }),
        grad: Arc::new(|x, y| {
            let (sxy, cxy) = (x * y).sin_cos();
            let (sy, cy) = y.sin_cos();
            let (sx, cx) = x.sin_cos();
            [
                [
                    3.0 * x * x * y.powi(4) + 2.0 * x + y * cxy * cy,
                    4.0 * x.powi(3) * y.powi(3) + x * cxy * cy - sxy * sy,
                ],
                [
                    4.0 * x.powi(3) * y.powi(3) - y * sxy * sx + cxy * cx,
                    3.0 * x.powi(4) * y * y + 2.0 * y - x * sxy * sx,
                ],
            ]
        }),
        hess: Arc::new(|x, y| {
            let (sxy, cxy) = (x * y).sin_cos();
            let (sy, cy) = y.sin_cos();
            let (sx, cx) = x.sin_cos();
            let u1xx = 6.0 * x * y.powi(4) + 2.0 - y * y * sxy * cy;
            let u1xy = 12.0 * x * x * y.powi(3) + cxy * cy - x * y * sxy * cy - y * cxy * sy;
            let u1yy = 12.0 * x.powi(3) * y * y - x * x * sxy * cy - 2.0 * x * cxy * sy - sxy * cy;
            let u2xx = 12.0 * x * x * y.powi(3) - y * y * cxy * sx - 2.0 * y * sxy * cx - cxy * sx;
            let u2xy = 12.0 * x.powi(3) * y * y - sxy * sx - x * y * cxy * sx - x * sxy * cx;
            let u2yy = 6.0 * x.powi(4) * y + 2.0 - x * x * cxy * sx;
            [[[u1xx, u1xy], [u1xy, u1yy]], [[u2xx, u2xy], [u2xy, u2yy]]]
        }),
    }
}

/// `E = sin(3 pi x) sin(3 pi y) + 5`, `nu = 0.2`.
pub fn smooth_law() -> LameLaw {
    let unit = lame_from_young(1.0, EX1_NU);
    let young = |x: f64, y: f64| (3.0 * std::f64::consts::PI * x).sin() * (3.0 * std::f64::consts::PI * y).sin() + 5.0;
    LameLaw {
        lame: Arc::new(move |x, y| {
            let e = young(x, y);
            Lame::new(unit.lambda * e, unit.mu * e)
        }),
        grad: Arc::new(move |x, y| {
            let k = 3.0 * std::f64::consts::PI;
            let ge = [k * (k * x).cos() * (k * y).sin(), k * (k * x).sin() * (k * y).cos()];
            ([unit.lambda * ge[0], unit.lambda * ge[1]], [unit.mu * ge[0], unit.mu * ge[1]])
        }),
    }
}

pub fn smooth_case() -> ManufacturedCase {
    from_displacement("ex1", smooth_displacement(), smooth_law())
}

/// Both components equal `w = x^2 y^3 (1 - sin(pi x))`.
pub fn discontinuous_displacement() -> Displacement {
    use std::f64::consts::PI;
    fn parts(x: f64, y: f64) -> (f64, [f64; 2], [f64; 3]) {
        let (s, c) = (PI * x).sin_cos();
        let w = x * x * y.powi(3) * (1.0 - s);
        let wx = 2.0 * x * y.powi(3) * (1.0 - s) - PI * x * x * y.powi(3) * c;
        let wy = 3.0 * x * x * y * y * (1.0 - s);
        let wxx = 2.0 * y.powi(3) * (1.0 - s) - 4.0 * PI * x * y.powi(3) * c + PI * PI * x * x * y.powi(3) * s;
        let wxy = 6.0 * x * y * y * (1.0 - s) - 3.0 * PI * x * x * y * y * c;
        let wyy = 6.0 * x * x * y * (1.0 - s);
        (w, [wx, wy], [wxx, wxy, wyy])
    }
    Displacement {
        u: Arc::new(|x, y| {
            let w = parts(x, y).0;
            [w, w]
        }),
        grad: Arc::new(|x, y| {
            let g = parts(x, y).1;
            [g, g]
        }),
        hess: Arc::new(|x, y| {
            let [a, b, c] = parts(x, y).2;
            let h = [[a, b], [b, c]];
            [h, h]
        }),
    }
}

/// `lambda = mu = 1` for `x < 1/2`, `10` otherwise.
pub fn discontinuous_law() -> LameLaw {
    LameLaw {
        lame: Arc::new(|x, _| if x < 0.5 { Lame::new(1.0, 1.0) } else { Lame::new(10.0, 10.0) }),
        grad: Arc::new(|_, _| ([0.0; 2], [0.0; 2])),
    }
}

pub fn discontinuous_case() -> ManufacturedCase {
    from_displacement("ex2", discontinuous_displacement(), discontinuous_law())
}

fn unit_law() -> LameLaw {
    LameLaw { lame: Arc::new(|_, _| Lame::new(1.0, 1.0)), grad: Arc::new(|_, _| ([0.0; 2], [0.0; 2])) }
}

/// `u = (x, y)`, `lambda = mu = 1`, so `sigma = 4 I`.
pub fn patch_case() -> ManufacturedCase {
    let disp = Displacement {
        u: Arc::new(|x, y| [x, y]),
        grad: Arc::new(|_, _| [[1.0, 0.0], [0.0, 1.0]]),
        hess: Arc::new(|_, _| [[[0.0; 2]; 2]; 2]),
    };
    from_displacement("patch", disp, unit_law())
}

/// Infinitesimal rotation `u = (-y, x)`: zero stress, unit rotation.
pub fn rigid_case() -> ManufacturedCase {
    let disp = Displacement {
        u: Arc::new(|x, y| [-y, x]),
        grad: Arc::new(|_, _| [[0.0, -1.0], [1.0, 0.0]]),
        hess: Arc::new(|_, _| [[[0.0; 2]; 2]; 2]),
    };
    from_displacement("rigid", disp, unit_law())
}

/// Porosity-driven modulus on the unit square: `u = (0.1, 0)` on the left,
/// `u = 0` on the right, traction free on top and bottom, no body force.
pub fn porosity_case(raster: &PorosityRaster) -> Result<ManufacturedCase> {
    raster.validate(POROSITY_CUTOFF)?;
    let r = raster.clone();
    let unit = lame_from_young(1.0, EX5_NU);
    let material = MaterialField::new(move |x, y| {
        let e = porosity_modulus(r.at(x, y));
        Lame::new(unit.lambda * e, unit.mu * e)
    });
    Ok(ManufacturedCase {
        name: "ex5".into(),
        domain: Rect::UNIT,
        boundary: BoundarySpec([BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Neumann]),
        material,
        exact: None,
        f: Arc::new(|_, _| [0.0, 0.0]),
        g_d: Arc::new(|x, _| if x < 0.5 { [0.1, 0.0] } else { [0.0, 0.0] }),
    })
}

/// Largest deviation between `f` and a Richardson-extrapolated central
/// difference of the exact stress, over `points`.
pub fn fd_self_check(case: &ManufacturedCase, points: &[(f64, f64)]) -> f64 {
    let Some(exact) = &case.exact else { return 0.0 };
    let sigma = &exact.sigma;
    let d = |x: f64, y: f64, h: f64| {
        let dx = |a: usize, b: usize| (sigma(x + h, y)[a][b] - sigma(x - h, y)[a][b]) / (2.0 * h);
        let dy = |a: usize, b: usize| (sigma(x, y + h)[a][b] - sigma(x, y - h)[a][b]) / (2.0 * h);
        [dx(0, 0) + dy(0, 1), dx(1, 0) + dy(1, 1)]
    };
    let mut worst: f64 = 0.0;
    for &(x, y) in points {
        let h = 1e-3;
        let (a, b) = (d(x, y, h), d(x, y, h / 2.0));
        let f = (case.f)(x, y);
        for c in 0..2 {
            let rich = (4.0 * b[c] - a[c]) / 3.0;
            worst = worst.max((rich - f[c]).abs() / (1.0 + f[c].abs()));
        }
    }
    worst
}
