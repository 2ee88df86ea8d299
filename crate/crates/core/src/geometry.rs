//! Rectangular domain decompositions, per-subdomain tensor grids and mortar grids.
//!
//! Subdomains are indexed row-major from the bottom-left corner: subdomain
//! `(r, c)` (row `r` along y, column `c` along x) has index `r * cols + c`.
//! Every interface is stored with `lo < hi`, and its unit normal points from
//! `lo` to `hi`, which is always `+x` or `+y`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const GEOM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 };

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Sign of the outward normal relative to the global `+x` / `+y` edge normal.
    pub fn outward_sign(self) -> f64 {
        match self {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Prescribed displacement.
    Dirichlet,
    /// Zero normal stress.
    Neumann,
}

/// Classification of one side of a subdomain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideClass {
    Interface(usize),
    Boundary(BoundaryKind),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Interface segment `Gamma_ij` between subdomains `lo < hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interface {
    pub id: usize,
    pub lo: usize,
    pub hi: usize,
    /// Direction of the normal (from `lo` to `hi`).
    pub normal: Axis,
    /// Fixed coordinate of the segment (x for a vertical interface).
    pub position: f64,
    /// Tangential extent.
    pub start: f64,
    pub end: f64,
}

impl Interface {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    /// Physical point at tangential coordinate `t`.
    pub fn point(&self, t: f64) -> (f64, f64) {
        match self.normal {
            Axis::X => (self.position, t),
            Axis::Y => (t, self.position),
        }
    }

    /// Sides of `lo` and `hi` that meet at this interface.
    pub fn sides(&self) -> (Side, Side) {
        match self.normal {
            Axis::X => (Side::Right, Side::Left),
            Axis::Y => (Side::Top, Side::Bottom),
        }
    }

    pub fn side_of(&self, subdomain: usize) -> Option<Side> {
        match (self.normal, subdomain) {
            (Axis::X, s) if s == self.lo => Some(Side::Right),
            (Axis::X, s) if s == self.hi => Some(Side::Left),
            (Axis::Y, s) if s == self.lo => Some(Side::Top),
            (Axis::Y, s) if s == self.hi => Some(Side::Bottom),
            _ => None,
        }
    }
}

/// Boundary condition type on each side of the outer domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundarySpec(pub [BoundaryKind; 4]);

impl BoundarySpec {
    pub const ALL_DIRICHLET: BoundarySpec = BoundarySpec([BoundaryKind::Dirichlet; 4]);

    pub fn kind(&self, side: Side) -> BoundaryKind {
        self.0[side.index()]
    }
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self::ALL_DIRICHLET
    }
}

/// Subdomain arrangement `rows x cols`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub rows: usize,
    pub cols: usize,
}

impl Pattern {
    pub fn square(n: usize) -> Self {
        Self { rows: n, cols: n }
    }

    pub fn count(&self) -> usize {
        self.rows * self.cols
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Config(format!("pattern '{s}' is not of the form NxM")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("pattern '{s}' is not of the form NxM")))
        };
        Ok(Self { rows: parse(a)?, cols: parse(b)? })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

/// Uniform tensor grid on one subdomain.
///
/// Edge numbering: vertical edges first, `v(i, j) = j * (nx + 1) + i` for the
/// edge at `x0 + i hx` spanning cell row `j`; then horizontal edges
/// `nv + j * nx + i` for the edge at `y0 + j hy` spanning cell column `i`.
/// Vertices are `j * (nx + 1) + i`, cells `j * nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdomainMesh {
    pub index: usize,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub sides: [SideClass; 4],
}

impl SubdomainMesh {
    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn num_vertices(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    pub fn num_vertical_edges(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn num_edges(&self) -> usize {
        self.num_vertical_edges() + self.nx * (self.ny + 1)
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn vertical_edge(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn horizontal_edge(&self, i: usize, j: usize) -> usize {
        self.num_vertical_edges() + j * self.nx + i
    }

    /// Cell edges in local order (left, right, bottom, top).
    pub fn cell_edges(&self, i: usize, j: usize) -> [usize; 4] {
        [
            self.vertical_edge(i, j),
            self.vertical_edge(i + 1, j),
            self.horizontal_edge(i, j),
            self.horizontal_edge(i, j + 1),
        ]
    }

    /// Cell vertices in local order (bottom-left, bottom-right, top-left, top-right).
    pub fn cell_vertices(&self, i: usize, j: usize) -> [usize; 4] {
        [
            self.vertex_index(i, j),
            self.vertex_index(i + 1, j),
            self.vertex_index(i, j + 1),
            self.vertex_index(i + 1, j + 1),
        ]
    }

    pub fn cell_origin(&self, i: usize, j: usize) -> (f64, f64) {
        (self.rect.x0 + i as f64 * self.hx, self.rect.y0 + j as f64 * self.hy)
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Cell diameter.
    pub fn h(&self) -> f64 {
        self.hx.hypot(self.hy)
    }

    /// Edges along one side of the subdomain, in increasing tangential order.
    pub fn side_edges(&self, side: Side) -> Vec<usize> {
        match side {
            Side::Left => (0..self.ny).map(|j| self.vertical_edge(0, j)).collect(),
            Side::Right => (0..self.ny).map(|j| self.vertical_edge(self.nx, j)).collect(),
            Side::Bottom => (0..self.nx).map(|i| self.horizontal_edge(i, 0)).collect(),
            Side::Top => (0..self.nx).map(|i| self.horizontal_edge(i, self.ny)).collect(),
        }
    }

    /// Tangential extent of the `k`-th edge along `side`.
    pub fn side_edge_bounds(&self, side: Side, k: usize) -> (f64, f64) {
        match side {
            Side::Left | Side::Right => {
                let a = self.rect.y0 + k as f64 * self.hy;
                (a, a + self.hy)
            }
            Side::Bottom | Side::Top => {
                let a = self.rect.x0 + k as f64 * self.hx;
                (a, a + self.hx)
            }
        }
    }

    /// Edge length of the trace grid along `side`.
    pub fn side_edge_length(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hy,
            Side::Bottom | Side::Top => self.hx,
        }
    }

    pub fn side_class(&self, side: Side) -> SideClass {
        self.sides[side.index()]
    }

    pub fn touches_dirichlet(&self) -> bool {
        self.sides.iter().any(|s| *s == SideClass::Boundary(BoundaryKind::Dirichlet))
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub domain: Rect,
    pub pattern: Pattern,
    pub subdomains: Vec<Rect>,
    pub interfaces: Vec<Interface>,
    pub boundary: BoundarySpec,
    /// Reported mesh size: the cell width of the coarser checkerboard color.
    pub nominal_h: f64,
}

impl Decomposition {
    pub fn num_subdomains(&self) -> usize {
        self.subdomains.len()
    }

    /// Interfaces adjacent to subdomain `i`, in increasing id order.
    pub fn interfaces_of(&self, i: usize) -> impl Iterator<Item = &Interface> {
        self.interfaces.iter().filter(move |g| g.lo == i || g.hi == i)
    }

    pub fn dirichlet_edges(&self) -> Vec<Side> {
        Side::ALL.into_iter().filter(|&s| self.boundary.kind(s) == BoundaryKind::Dirichlet).collect()
    }

    pub fn neumann_edges(&self) -> Vec<Side> {
        Side::ALL.into_iter().filter(|&s| self.boundary.kind(s) == BoundaryKind::Neumann).collect()
    }
}

/// Subdomain layout plus grids.
#[derive(Clone, Debug)]
pub struct Layout {
    pub decomposition: Decomposition,
    pub meshes: Vec<SubdomainMesh>,
}

/// Build a `rows x cols` decomposition of `domain` where subdomain `(r, c)` gets
/// `cells(r, c) = (nx, ny)` cells.
pub fn build_decomposition(
    domain: Rect,
    pattern: Pattern,
    boundary: BoundarySpec,
    nominal_h: f64,
    cells: impl Fn(usize, usize) -> (usize, usize),
) -> Result<Layout> {
    if pattern.rows == 0 || pattern.cols == 0 {
        return Err(Error::Geometry(format!("empty subdomain pattern {pattern}")));
    }
    if !(domain.width() > 0.0 && domain.height() > 0.0) {
        return Err(Error::Geometry("domain has non-positive extent".into()));
    }
    if !boundary.0.contains(&BoundaryKind::Dirichlet) {
        return Err(Error::Geometry("the Dirichlet boundary must have positive measure".into()));
    }
    let (rows, cols) = (pattern.rows, pattern.cols);
    let dx = domain.width() / cols as f64;
    let dy = domain.height() / rows as f64;
    let idx = |r: usize, c: usize| r * cols + c;

    let mut subdomains = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            subdomains.push(Rect {
                x0: domain.x0 + c as f64 * dx,
                y0: domain.y0 + r as f64 * dy,
                x1: if c + 1 == cols { domain.x1 } else { domain.x0 + (c + 1) as f64 * dx },
                y1: if r + 1 == rows { domain.y1 } else { domain.y0 + (r + 1) as f64 * dy },
            });
        }
    }

    let mut interfaces = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let rect = subdomains[idx(r, c)];
            if c + 1 < cols {
                interfaces.push(Interface {
                    id: interfaces.len(),
                    lo: idx(r, c),
                    hi: idx(r, c + 1),
                    normal: Axis::X,
                    position: rect.x1,
                    start: rect.y0,
                    end: rect.y1,
                });
            }
            if r + 1 < rows {
                interfaces.push(Interface {
                    id: interfaces.len(),
                    lo: idx(r, c),
                    hi: idx(r + 1, c),
                    normal: Axis::Y,
                    position: rect.y1,
                    start: rect.x0,
                    end: rect.x1,
                });
            }
        }
    }

    let mut meshes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let index = idx(r, c);
            let rect = subdomains[index];
            let (nx, ny) = cells(r, c);
            if nx == 0 || ny == 0 {
                return Err(Error::Geometry(format!("subdomain {index} has an empty grid")));
            }
            let mut sides = [SideClass::Boundary(BoundaryKind::Dirichlet); 4];
            for side in Side::ALL {
                let neighbor = match side {
                    Side::Left => (c > 0).then(|| idx(r, c - 1)),
                    Side::Right => (c + 1 < cols).then(|| idx(r, c + 1)),
                    Side::Bottom => (r > 0).then(|| idx(r - 1, c)),
                    Side::Top => (r + 1 < rows).then(|| idx(r + 1, c)),
                };
                sides[side.index()] = match neighbor {
                    Some(n) => {
                        let (lo, hi) = (index.min(n), index.max(n));
                        let g = interfaces.iter().find(|g| g.lo == lo && g.hi == hi).expect("interface exists");
                        SideClass::Interface(g.id)
                    }
                    None => SideClass::Boundary(boundary.kind(side)),
                };
            }
            meshes.push(SubdomainMesh {
                index,
                rect,
                nx,
                ny,
                hx: rect.width() / nx as f64,
                hy: rect.height() / ny as f64,
                sides,
            });
        }
    }

    Ok(Layout {
        decomposition: Decomposition { domain, pattern, subdomains, interfaces, boundary, nominal_h },
        meshes,
    })
}

/// Non-matching checkerboard on the unit square: subdomain `(r, c)` gets
/// `(2 * 2^levels)^2` cells when `r + c` is even and `(3 * 2^levels)^2` otherwise.
pub fn build_checkerboard(levels: u32, pattern: Pattern) -> Result<Layout> {
    build_checkerboard_on(Rect::UNIT, levels, pattern, BoundarySpec::ALL_DIRICHLET)
}

pub fn build_checkerboard_on(domain: Rect, levels: u32, pattern: Pattern, boundary: BoundarySpec) -> Result<Layout> {
    if pattern.rows != pattern.cols {
        return Err(Error::Geometry(format!("checkerboard pattern must be square, got {pattern}")));
    }
    let scale = 1usize << levels;
    let even = 2 * scale;
    let odd = 3 * scale;
    let nominal_h = domain.width() / (pattern.cols * even) as f64;
    build_decomposition(domain, pattern, boundary, nominal_h, |r, c| {
        if (r + c) % 2 == 0 {
            (even, even)
        } else {
            (odd, odd)
        }
    })
}

/// Matching grids with `cells x cells` cells in every subdomain.
pub fn build_uniform(pattern: Pattern, cells: usize, boundary: BoundarySpec) -> Result<Layout> {
    let domain = Rect::UNIT;
    let nominal_h = domain.width() / (pattern.cols * cells) as f64;
    build_decomposition(domain, pattern, boundary, nominal_h, |_, _| (cells, cells))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Continuity {
    Discontinuous,
    Continuous,
}

/// How the mortar element size `H` is derived from the nominal `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MortarScaling {
    /// `H = 2h`.
    TwiceH,
    /// `H = sqrt(h)`.
    SqrtH,
    Explicit(f64),
    /// Reuse the trace grid of the finer side of each interface.
    TraceMatching,
}

impl MortarScaling {
    pub fn resolve(&self, h: f64) -> Option<f64> {
        match *self {
            MortarScaling::TwiceH => Some(2.0 * h),
            MortarScaling::SqrtH => Some(h.sqrt()),
            MortarScaling::Explicit(big_h) => Some(big_h),
            MortarScaling::TraceMatching => None,
        }
    }
}

impl FromStr for MortarScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "2h" => Ok(Self::TwiceH),
            "sqrt" | "sqrth" | "sqrt(h)" | "h^1/2" => Ok(Self::SqrtH),
            "trace" | "matching" => Ok(Self::TraceMatching),
            other => {
                let v = other.strip_prefix("h=").unwrap_or(other);
                let value = if let Some((a, b)) = v.split_once('/') {
                    a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b)
                } else {
                    v.parse::<f64>().ok()
                };
                match value {
                    Some(h) if h > 0.0 => Ok(Self::Explicit(h)),
                    _ => Err(Error::Config(format!("unknown mortar scaling '{s}'"))),
                }
            }
        }
    }
}

/// 1-D partition of one interface carrying the mortar space.
#[derive(Clone, Debug, PartialEq)]
pub struct MortarGrid {
    pub interface: usize,
    /// Segment end points in tangential coordinates, increasing.
    pub breakpoints: Vec<f64>,
    pub degree: usize,
    pub continuity: Continuity,
}

impl MortarGrid {
    pub fn num_segments(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn segment(&self, s: usize) -> (f64, f64) {
        (self.breakpoints[s], self.breakpoints[s + 1])
    }

    pub fn max_segment(&self) -> f64 {
        self.breakpoints.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Partition every interface uniformly according to `scaling`.
pub fn build_mortar_grids(
    layout: &Layout,
    scaling: MortarScaling,
    degree: usize,
    continuity: Continuity,
) -> Result<Vec<MortarGrid>> {
    if continuity == Continuity::Continuous && degree == 0 {
        return Err(Error::Mortar("continuous mortars need degree >= 1".into()));
    }
    let decomp = &layout.decomposition;
    let mut grids = Vec::with_capacity(decomp.interfaces.len());
    for g in &decomp.interfaces {
        let len = g.length();
        let nseg = match scaling.resolve(decomp.nominal_h) {
            Some(big_h) => {
                let ratio = len / big_h;
                let n = ratio.round();
                if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
                    return Err(Error::Mortar(format!(
                        "H = {big_h} does not evenly partition interface {} of length {len}",
                        g.id
                    )));
                }
                n as usize
            }
            None => {
                let (a, b) = g.sides();
                let ea = layout.meshes[g.lo].side_edges(a).len();
                let eb = layout.meshes[g.hi].side_edges(b).len();
                ea.max(eb)
            }
        };
        let breakpoints = (0..=nseg)
            .map(|k| if k == nseg { g.end } else { g.start + len * k as f64 / nseg as f64 })
            .collect();
        grids.push(MortarGrid { interface: g.id, breakpoints, degree, continuity });
    }
    Ok(grids)
}

/// Interfaces whose mortar grid is finer than both adjacent trace grids.
pub fn coarseness_warnings(layout: &Layout, grids: &[MortarGrid]) -> Vec<String> {
    let mut out = Vec::new();
    for grid in grids {
        let g = &layout.decomposition.interfaces[grid.interface];
        let (a, b) = g.sides();
        let ha = layout.meshes[g.lo].side_edge_length(a);
        let hb = layout.meshes[g.hi].side_edge_length(b);
        let big_h = grid.max_segment();
        if big_h + GEOM_TOL < ha.min(hb) {
            out.push(format!(
                "interface {}: mortar size {big_h} is finer than both trace grids ({ha}, {hb}); the mortar \
                 space is likely too rich",
                g.id
            ));
        } else if big_h + GEOM_TOL < ha.max(hb) {
            out.push(format!(
                "interface {}: mortar size {big_h} is finer than the coarser trace grid ({})",
                g.id,
                ha.max(hb)
            ));
        }
    }
    out
}
