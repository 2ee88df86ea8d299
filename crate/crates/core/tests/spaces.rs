mod common;

use common::*;
use elastdd::geometry::{
    build_checkerboard, build_decomposition, build_uniform, BoundarySpec, MortarScaling, Pattern, Rect,
};
use elastdd::linalg::dense_solve;
use elastdd::quadrature::GaussRule;
use elastdd::spaces::bdm::edge_shape;
use elastdd::spaces::{check_mortar_solvability, MortarBasis, MortarSpace, SubdomainTrace};
use elastdd::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Two subdomains side by side on `[0, 2] x [0, 1]`, each with `cells x cells`
/// cells, glued along `x = 1` by one mortar segment of the given degree.
fn strip(cells: usize, degree: usize) -> (elastdd::geometry::Layout, MortarSpace, Vec<SubdomainTrace>) {
    let domain = Rect { x0: 0.0, y0: 0.0, x1: 2.0, y1: 1.0 };
    let layout = build_decomposition(domain, Pattern { rows: 1, cols: 2 }, BoundarySpec::ALL_DIRICHLET, 1.0 / cells as f64, |_, _| {
        (cells, cells)
    })
    .unwrap();
    let mortar = mortar_for(&layout, degree, MortarScaling::Explicit(1.0), MortarBasis::Orthonormal);
    let tr = traces(&layout, &mortar);
    (layout, mortar, tr)
}

/// Value of a trace function at tangential coordinate `t` on edge `e` of side `s`.
fn trace_value(trace: &SubdomainTrace, eta: &[f64], s: usize, e: usize, t: f64) -> [f64; 2] {
    let side = &trace.sides[s];
    let (a, b) = side.bounds[e];
    let l = edge_shape((t - a) / (b - a));
    let mut out = [0.0; 2];
    for c in 0..2 {
        for q in 0..2 {
            out[c] += l[q] * eta[side.slot(e, c, q)];
        }
    }
    out
}

#[test]
fn constant_mortar_gives_constant_trace() {
    let layout = build_checkerboard(0, Pattern::square(2)).unwrap();
    let mortar = mortar_for(&layout, 2, MortarScaling::TwiceH, MortarBasis::Orthonormal);
    let mu = mortar.project_function(|_, _| [1.0, 0.0]);
    for tr in traces(&layout, &mortar) {
        let eta = tr.project_mortar(&mortar, &mu);
        for side in &tr.sides {
            for e in 0..side.edges.len() {
                for q in 0..2 {
                    assert!((eta[side.slot(e, 0, q)] - 1.0).abs() < 1e-13);
                    assert!(eta[side.slot(e, 1, q)].abs() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn trace_space_functions_are_unchanged() {
    // Linear mortar functions lie in the trace space of every side.
    let layout = build_checkerboard(0, Pattern::square(2)).unwrap();
    let mortar = mortar_for(&layout, 2, MortarScaling::TwiceH, MortarBasis::Orthonormal);
    let f = |t: f64, g: usize| [2.0 * t - 0.3 + g as f64, 1.0 - 4.0 * t];
    let mu = mortar.project_function(f);
    for tr in traces(&layout, &mortar) {
        let eta = tr.project_mortar(&mortar, &mu);
        for (s, side) in tr.sides.iter().enumerate() {
            for (e, &(a, b)) in side.bounds.iter().enumerate() {
                for t in [a, 0.5 * (a + b), b] {
                    let v = trace_value(&tr, &eta, s, e, t);
                    let w = f(t, side.interface);
                    assert!((v[0] - w[0]).abs() < 1e-13 && (v[1] - w[1]).abs() < 1e-13);
                }
            }
        }
    }
}

/// Piecewise-linear `L^2` projection of `f` onto two equal edges of `[0, 1]`,
/// from the dense Gram system in the monomial basis `{1, t}` of each edge.
fn gram_projection(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> f64 {
    let rule = GaussRule::<f64>::new(8);
    let mut a = vec![0.0; 16];
    let mut rhs = vec![0.0; 4];
    for e in 0..2 {
        let (lo, hi) = (0.5 * e as f64, 0.5 * (e + 1) as f64);
        for (&p, &w) in rule.points.iter().zip(&rule.weights) {
            let t = lo + (hi - lo) * p;
            let basis = [1.0, t];
            for i in 0..2 {
                rhs[2 * e + i] += w * (hi - lo) * basis[i] * f(t);
                for j in 0..2 {
                    a[(2 * e + i) * 4 + 2 * e + j] += w * (hi - lo) * basis[i] * basis[j];
                }
            }
        }
    }
    let c = dense_solve(4, &a, &rhs).unwrap();
    move |t: f64| {
        let e = if t < 0.5 { 0 } else { 1 };
        c[2 * e] + c[2 * e + 1] * t
    }
}

#[test]
fn quadratic_mortar_onto_two_edges_matches_gram_oracle() {
    let (_, mortar, tr) = strip(2, 2);
    let mu = mortar.project_function(|t, _| [t * t, 0.0]);
    let oracle = gram_projection(|t| t * t);
    for trace in &tr {
        let eta = trace.project_mortar(&mortar, &mu);
        for e in 0..2 {
            for k in 0..=4 {
                let t = 0.5 * e as f64 + 0.125 * k as f64;
                let v = trace_value(trace, &eta, 0, e, t);
                assert!((v[0] - oracle(t)).abs() < 1e-13, "t = {t}: {} vs {}", v[0], oracle(t));
                assert!(v[1].abs() < 1e-14);
            }
        }
    }
}

#[test]
fn linear_trace_onto_quadratic_mortar_matches_gram_oracle() {
    let (_, mortar, tr) = strip(2, 2);
    let mut rng = rng(7);
    let trace = &tr[0];
    let eta = random_vec(&mut rng, trace.len());
    let projected = trace.project_to_mortar(&mortar, &eta);
    // Oracle: monomials {1, t, t^2} on [0, 1], dense 3x3 Gram solve per component.
    let rule = GaussRule::<f64>::new(6);
    for c in 0..2 {
        let mut a = vec![0.0; 9];
        let mut rhs = vec![0.0; 3];
        for e in 0..2 {
            let (lo, hi) = trace.sides[0].bounds[e];
            for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                let t = lo + (hi - lo) * p;
                let basis = [1.0, t, t * t];
                let v = trace_value(trace, &eta, 0, e, t)[c];
                for i in 0..3 {
                    rhs[i] += w * (hi - lo) * basis[i] * v;
                    for j in 0..3 {
                        a[3 * i + j] += w * (hi - lo) * basis[i] * basis[j];
                    }
                }
            }
        }
        let coef = dense_solve(3, &a, &rhs).unwrap();
        for k in 0..=8 {
            let t = k as f64 / 8.0;
            let want = coef[0] + coef[1] * t + coef[2] * t * t;
            let got = mortar.evaluate(&projected, 0, t)[c];
            assert!((got - want).abs() < 1e-12, "comp {c}, t = {t}: {got} vs {want}");
        }
    }
}

#[test]
fn zero_trace_projects_to_zero() {
    let (_, mortar, tr) = strip(3, 2);
    let zero = vec![0.0; tr[1].len()];
    assert!(tr[1].project_to_mortar(&mortar, &zero).iter().all(|&v| v == 0.0));
}

/// `int_{Gamma_i} mu . eta` by quadrature on every trace edge.
fn direct_pairing(mortar: &MortarSpace, trace: &SubdomainTrace, mu: &[f64], eta: &[f64]) -> f64 {
    let rule = GaussRule::<f64>::new(6);
    let mut acc = 0.0;
    for (s, side) in trace.sides.iter().enumerate() {
        let grid = mortar.grid(side.interface);
        for (e, &(a, b)) in side.bounds.iter().enumerate() {
            // split at mortar breakpoints so the integrand is polynomial per piece
            let mut cuts: Vec<f64> = grid.breakpoints.iter().copied().filter(|&t| t > a && t < b).collect();
            cuts.insert(0, a);
            cuts.push(b);
            for w2 in cuts.windows(2) {
                for (&p, &w) in rule.points.iter().zip(&rule.weights) {
                    let t = w2[0] + (w2[1] - w2[0]) * p;
                    let m = mortar.evaluate(mu, side.interface, t);
                    let v = trace_value(trace, eta, s, e, t);
                    acc += w * (w2[1] - w2[0]) * (m[0] * v[0] + m[1] * v[1]);
                }
            }
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn projection_adjointness(seed in any::<u64>(), degree in 1usize..4) {
        let layout = build_checkerboard(1, Pattern::square(2)).unwrap();
        let mortar = mortar_for(&layout, degree, MortarScaling::TwiceH, MortarBasis::Orthonormal);
        let tr = traces(&layout, &mortar);
        let mut r = rng(seed);
        let mu = random_vec(&mut r, mortar.dim());
        for trace in &tr {
            let eta = random_vec(&mut r, trace.len());
            let direct = direct_pairing(&mortar, trace, &mu, &eta);
            let via_q = trace.inner(&trace.project_mortar(&mortar, &mu), &eta);
            let via_qt = mortar.inner(&mu, &trace.project_to_mortar(&mortar, &eta));
            let scale = 1.0 + direct.abs();
            prop_assert!((via_q - direct).abs() <= 1e-12 * scale);
            prop_assert!((via_qt - direct).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn projections_are_idempotent(seed in any::<u64>()) {
        let layout = build_checkerboard(1, Pattern::square(2)).unwrap();
        let mortar = mortar_for(&layout, 2, MortarScaling::TwiceH, MortarBasis::Orthonormal);
        let mut r = rng(seed);
        let c = random_vec(&mut r, 4);
        let f = move |t: f64, _g: usize| [c[0] * (5.0 * t).sin() + c[1], c[2] * t * t * t + c[3]];
        let rule = GaussRule::<f64>::new(6);
        for trace in traces(&layout, &mortar) {
            let once = trace.project_function(|g, t| f(t, g), &rule);
            let twice = trace.project_function(|g, t| {
                let s = trace.sides.iter().position(|s| s.interface == g).unwrap();
                let side = &trace.sides[s];
                let e = side.bounds.iter().position(|&(a, b)| t >= a - 1e-15 && t <= b + 1e-15).unwrap();
                trace_value(&trace, &once, s, e, t)
            }, &rule);
            prop_assert!(max_abs_diff(&once, &twice) <= 1e-13);
        }
        let once = mortar.project_function(f);
        let twice = mortar.project_function(|t, g| mortar.evaluate(&once, g, t));
        prop_assert!(max_abs_diff(&once, &twice) <= 1e-13);
    }
}

#[test]
fn checkerboard_quadratic_mortar_is_solvable() {
    let layout = build_checkerboard(0, Pattern::square(2)).unwrap();
    let mortar = mortar_for(&layout, 2, MortarScaling::TwiceH, MortarBasis::Orthonormal);
    let report = check_mortar_solvability(&layout, &mortar, &traces(&layout, &mortar));
    assert!(report.is_ok());
    assert!(report.constant() > 0.5);
}

#[test]
fn trace_matching_mortar_has_unit_constant() {
    let layout = build_uniform(Pattern::square(2), 3, BoundarySpec::ALL_DIRICHLET).unwrap();
    let mortar = mortar_for(&layout, 1, MortarScaling::TraceMatching, MortarBasis::Orthonormal);
    let report = check_mortar_solvability(&layout, &mortar, &traces(&layout, &mortar));
    for g in &report.interfaces {
        assert!((g.sigma_min - 1.0).abs() < 1e-12, "{g:?}");
    }
}

#[test]
fn cubic_mortar_over_single_edges_is_rank_deficient() {
    let (layout, mortar, tr) = strip(1, 3);
    let report = check_mortar_solvability(&layout, &mortar, &tr);
    // Oracle: L^2-normalized projections of orthonormal cubics onto the linear
    // trace of the single edge, stacked for both (identical) sides.
    let rule = GaussRule::<f64>::new(8);
    let legendre = |k: usize, t: f64| elastdd::spaces::mortar::orthonormal_legendre::<f64>(k, t, 1.0);
    // orthonormal linear basis on [0, 1]: 1 and sqrt(3)(2t - 1)
    let lin = |j: usize, t: f64| if j == 0 { 1.0 } else { 3f64.sqrt() * (2.0 * t - 1.0) };
    let mut q = DMatrix::<f64>::zeros(8, 4);
    for j in 0..2 {
        for k in 0..4 {
            let v: f64 = rule.points.iter().zip(&rule.weights).map(|(&t, &w)| w * lin(j, t) * legendre(k, t)).sum();
            for side in 0..2 {
                q[(4 * side + j, k)] = v;
            }
        }
    }
    let sv = q.singular_values();
    let rank = sv.iter().filter(|&&s| s > 1e-10 * sv.max()).count();
    assert_eq!(rank, 2);
    assert!(!report.is_ok());
    assert_eq!(report.violated(), vec![0]);
    assert!(matches!(report.into_result(), Err(Error::Solvability(v)) if v == vec![0]));
}
