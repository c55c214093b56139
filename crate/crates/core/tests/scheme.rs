mod common;

use std::sync::Arc;

use common::*;
use induction_sbp::{
    boundary_trace, experiment2, experiment3, p_energy, sample_velocity, BoundaryData, DissipationScaling, Grid2D,
    InductionScheme, MagneticField, SbpOperator, SbpOrder, Side, VelocityCoeffs,
};
use proptest::prelude::*;

const ORDERS: [SbpOrder; 2] = [SbpOrder::Second, SbpOrder::Fourth];

fn order_strategy() -> impl Strategy<Value = SbpOrder> {
    prop_oneof![Just(SbpOrder::Second), Just(SbpOrder::Fourth)]
}

fn swirl(x: f64, y: f64) -> [f64; 2] {
    [1.0 + 0.5 * y - 0.3 * x * x, -0.4 + x * y]
}

fn smooth_data(x: f64, y: f64) -> [f64; 2] {
    [(1.3 * x).sin() * (0.7 * y).cos(), (x - y).exp() * 0.2]
}

fn scheme_on(
    grid: Grid2D<f64>,
    order: SbpOrder,
    velocity: fn(f64, f64) -> [f64; 2],
    g: BoundaryData<f64>,
    theta: f64,
) -> InductionScheme<f64> {
    InductionScheme::new(grid, order, Arc::new(velocity), g, theta).unwrap()
}

fn rhs(scheme: &InductionScheme<f64>, v: &[f64], t: f64) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    scheme.rhs_into(v, t, &mut out).unwrap();
    out
}

fn p_inner(a: &[f64], b: &[f64], px: &[f64], py: &[f64]) -> f64 {
    let n = px.len() * py.len();
    let mut s = 0.0;
    for c in 0..2 {
        for (i, wx) in px.iter().enumerate() {
            for (j, wy) in py.iter().enumerate() {
                let k = c * n + i * py.len() + j;
                s += wx * wy * a[k] * b[k];
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_free_rhs_equals_dense_assembly(
        order in order_strategy(),
        npx in 8usize..=8,
        npy in 8usize..=8,
        theta in 0.5f64..2.0,
        dissipation in prop_oneof![Just(None), Just(Some(false)), Just(Some(true))],
        alpha in 0.1f64..3.0,
        seed in any::<u64>(),
    ) {
        let grid = Grid2D::new(-0.5, 1.0, 0.0, 0.8, npx, npy).unwrap();
        let g = BoundaryData::Exact(Arc::new(|x, y, _| smooth_data(x, y)));
        let mut scheme = scheme_on(grid, order, swirl, g, theta);
        if let Some(upwind) = dissipation {
            let s = if upwind { DissipationScaling::Upwind } else { DissipationScaling::Accurate };
            scheme = scheme.with_dissipation(s, alpha).unwrap();
        }
        let dense = DenseScheme::assemble(&DenseSetup {
            order: order.order(),
            x: (-0.5, 1.0),
            y: (0.0, 0.8),
            npx,
            npy,
            velocity: &swirl,
            theta,
            dissipation: dissipation.map(|u| (u, alpha)),
            sat: true,
        });
        let v = random_vec(&mut rng(seed), 2 * grid.len());
        let ours = rhs(&scheme, &v, 0.0);
        let reference = dense.rhs(&v, &smooth_data);
        prop_assert!(max_abs_diff(&ours, &reference) <= 1e-13 * (1.0 + alpha) / grid.dx().min(grid.dy()));
    }

    #[test]
    fn rhs_is_linear_for_zero_data(
        order in order_strategy(),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 12, 10).unwrap();
        let scheme = scheme_on(grid, order, swirl, BoundaryData::Zero, 1.0)
            .with_dissipation(DissipationScaling::Accurate, 1.0)
            .unwrap();
        let mut r = rng(seed);
        let v1 = random_vec(&mut r, 2 * grid.len());
        let v2 = random_vec(&mut r, 2 * grid.len());
        let combo: Vec<f64> = v1.iter().zip(&v2).map(|(x, y)| a * x + b * y).collect();
        let lhs = rhs(&scheme, &combo, 0.3);
        let (r1, r2) = (rhs(&scheme, &v1, 0.3), rhs(&scheme, &v2, 0.3));
        let expected: Vec<f64> = r1.iter().zip(&r2).map(|(x, y)| a * x + b * y).collect();
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(&lhs, &expected) <= 1e-12 * scale);
    }

    #[test]
    fn sat_only_touches_boundary_nodes(order in order_strategy(), seed in any::<u64>()) {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 11, 13).unwrap();
        let with = scheme_on(grid, order, swirl, BoundaryData::Zero, 1.0);
        let without = with.clone().without_sat();
        let v = random_vec(&mut rng(seed), 2 * grid.len());
        let (a, b) = (rhs(&with, &v, 0.0), rhs(&without, &v, 0.0));
        for c in 0..2 {
            for i in 0..grid.npx {
                for j in 0..grid.npy {
                    let k = c * grid.len() + grid.index(i, j);
                    let edge = i == 0 || j == 0 || i == grid.npx - 1 || j == grid.npy - 1;
                    if !edge {
                        prop_assert_eq!(a[k], b[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn advection_decouples_components(order in order_strategy(), seed in any::<u64>()) {
        let grid = Grid2D::new(0.0, 1.0, 0.0, 1.0, 10, 9).unwrap();
        let ox = SbpOperator::new(order, grid.npx, grid.dx()).unwrap();
        let oy = SbpOperator::new(order, grid.npy, grid.dy()).unwrap();
        let mut coeffs: VelocityCoeffs<f64> = sample_velocity(Arc::new(swirl), &grid, &ox, &oy).unwrap();
        for d in [&mut coeffs.du1dx, &mut coeffs.du1dy, &mut coeffs.du2dx, &mut coeffs.du2dy] {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        let scheme = InductionScheme::from_parts(grid, ox, oy, coeffs, None, BoundaryData::Zero, None).unwrap();
        let n = grid.len();
        let mut v = random_vec(&mut rng(seed), 2 * n);
        let base = rhs(&scheme, &v, 0.0);
        for x in &mut v[n..] {
            *x = -3.0 * *x + 1.0;
        }
        let changed = rhs(&scheme, &v, 0.0);
        prop_assert_eq!(&base[..n], &changed[..n]);
        prop_assert!(base[n..] != changed[n..]);
    }
}

#[test]
fn semi_discrete_energy_is_dissipated() {
    let grid = Grid2D::square(0.0, 1.0, 16).unwrap();
    let mut r = rng(11);
    for order in ORDERS {
        for theta in [0.5, 1.0] {
            for diss in [None, Some(DissipationScaling::Accurate), Some(DissipationScaling::Upwind)] {
                let mut scheme = scheme_on(grid, order, |_, _| [1.0, 2.0], BoundaryData::Zero, theta);
                if let Some(s) = diss {
                    scheme = scheme.with_dissipation(s, 3.0).unwrap();
                }
                let px = scheme.op_x().norm_diagonal();
                let py = scheme.op_y().norm_diagonal();
                for _ in 0..1000 {
                    let v = random_vec(&mut r, 2 * grid.len());
                    let q = p_inner(&v, &rhs(&scheme, &v, 0.0), &px, &py);
                    let e = p_inner(&v, &v, &px, &py);
                    assert!(q <= 1e-12 * e, "{order:?} θ={theta} {diss:?}: {q}");
                }
            }
        }
    }
}

#[test]
fn free_stream_is_a_steady_state() {
    for order in ORDERS {
        let grid = Grid2D::new(-1.0, 2.0, 0.0, 1.0, 13, 11).unwrap();
        let g = BoundaryData::Exact(Arc::new(|_, _, _| [0.7, -1.2]));
        let scheme = scheme_on(grid, order, |_, _| [1.0, -2.0], g, 1.0)
            .with_dissipation(DissipationScaling::Upwind, 3.0)
            .unwrap();
        let v = MagneticField::from_fn(grid, |_, _| [0.7, -1.2]);
        let out = scheme.compute_rhs(&v, 0.0).unwrap();
        assert!(out.as_slice().iter().all(|x| x.abs() < 1e-13));
    }
}

/// `-(u . grad) B + (B . grad) u - B div u` for the rotation `u = (-y, x)`.
fn rotation_tendency(x: f64, y: f64) -> [f64; 2] {
    let [b1, b2] = smooth_data(x, y);
    let (u1, u2) = (-y, x);
    let db1dx = 1.3 * (1.3 * x).cos() * (0.7 * y).cos();
    let db1dy = -0.7 * (1.3 * x).sin() * (0.7 * y).sin();
    let db2dx = 0.2 * (x - y).exp();
    let db2dy = -0.2 * (x - y).exp();
    [-(u1 * db1dx + u2 * db1dy) - b2, -(u1 * db2dx + u2 * db2dy) + b1]
}

#[test]
fn manufactured_residual_converges() {
    // Residual of the semi-discrete operator on a smooth field whose trace
    // is also the boundary data.
    let residual = |order: SbpOrder, cells: usize| {
        let grid = Grid2D::square(-1.0, 1.0, cells).unwrap();
        let g = BoundaryData::Exact(Arc::new(|x, y, _| smooth_data(x, y)));
        let scheme = scheme_on(grid, order, |x, y| [-y, x], g, 1.0);
        let v = MagneticField::from_fn(grid, smooth_data);
        let out = scheme.compute_rhs(&v, 0.0).unwrap();
        let exact = MagneticField::from_fn(grid, rotation_tendency);
        let diff: Vec<f64> = out.as_slice().iter().zip(exact.as_slice()).map(|(a, b)| a - b).collect();
        let diff = MagneticField::from_vec(grid, diff).unwrap();
        let closure = order.closure_rows();
        let mut interior = 0.0f64;
        for c in [diff.b1(), diff.b2()] {
            for i in closure..grid.npx - closure {
                for j in closure..grid.npy - closure {
                    interior = interior.max(c[grid.index(i, j)].abs());
                }
            }
        }
        let global = p_energy(&diff, scheme.op_x(), scheme.op_y()).unwrap().sqrt();
        (interior, global)
    };
    // Interior truncation matches the stencil order; the closure rows are
    // one (order 2) or two (order 4) orders lower and cost half an order in
    // the P-norm.
    for (order, inner, global) in [(SbpOrder::Second, 2.0, 1.4), (SbpOrder::Fourth, 4.0, 2.4)] {
        let (a, b, c) = (residual(order, 20), residual(order, 40), residual(order, 80));
        for (e0, e1) in [(a, b), (b, c)] {
            assert!((e0.0 / e1.0).log2() > inner - 0.4, "{order:?} interior {a:?} {b:?} {c:?}");
            assert!((e0.1 / e1.1).log2() > global, "{order:?} global {a:?} {b:?} {c:?}");
        }
    }
}

#[test]
fn velocity_gradient_converges() {
    let err = |order: SbpOrder, cells: usize| {
        let grid = Grid2D::square(0.0, 2.0, cells).unwrap();
        let ox = SbpOperator::new(order, grid.npx, grid.dx()).unwrap();
        let oy = SbpOperator::new(order, grid.npy, grid.dy()).unwrap();
        let c = sample_velocity(Arc::new(|x: f64, _| [x.sin(), 0.0]), &grid, &ox, &oy).unwrap();
        let exact = grid.sample(|x, _| x.cos());
        let interior = (order.closure_rows()..grid.npx - order.closure_rows())
            .flat_map(|i| (0..grid.npy).map(move |j| (i, j)))
            .map(|(i, j)| (c.du1dx[grid.index(i, j)] - exact[grid.index(i, j)]).abs())
            .fold(0.0f64, f64::max);
        assert!(c.du1dy.iter().chain(&c.du2dx).chain(&c.du2dy).all(|v| v.abs() < 1e-13));
        interior
    };
    for order in ORDERS {
        let rate = (err(order, 20) / err(order, 40)).log2();
        assert!(rate > order.order() as f64 - 0.2, "{order:?} {rate}");
    }
}

#[test]
fn constant_velocity_has_zero_gradients() {
    let grid = Grid2D::<f64>::square(0.0, 1.0, 10).unwrap();
    for order in ORDERS {
        let op = SbpOperator::new(order, grid.npx, grid.dx()).unwrap();
        let c = sample_velocity(Arc::new(|_, _| [1.0, 2.0]), &grid, &op, &op).unwrap();
        assert!(c.lam_x.iter().all(|&v| v == 1.0) && c.lam_y.iter().all(|&v| v == 2.0));
        for d in [&c.du1dx, &c.du1dy, &c.du2dx, &c.du2dy] {
            assert!(d.iter().all(|v| v.abs() < 1e-13));
        }
    }
}

#[test]
fn non_finite_velocity_is_located() {
    let grid = Grid2D::square(0.0, 1.0, 10).unwrap();
    let op = SbpOperator::new(SbpOrder::Second, grid.npx, grid.dx()).unwrap();
    let err = sample_velocity(
        Arc::new(|x: f64, y: f64| if x > 0.55 && y < 0.05 { [f64::NAN, 0.0] } else { [1.0, 0.0] }),
        &grid,
        &op,
        &op,
    )
    .unwrap_err();
    assert!(err.to_string().contains("(6, 0)"), "{err}");
}

#[test]
fn boundary_traces() {
    let g2 = experiment2::<f64>();
    let grid = g2.grid(10).unwrap();
    for side in Side::ALL {
        assert!(boundary_trace(&BoundaryData::Zero, &grid, side, 1.7)
            .unwrap()
            .iter()
            .all(|v| *v == [0.0, 0.0]));
        let trace = boundary_trace(&g2.boundary_data(), &grid, side, 0.0).unwrap();
        for (k, v) in trace.iter().enumerate() {
            let (i, j) = side.node(&grid, k);
            assert_eq!(*v, (g2.initial)(grid.x(i), grid.y(j)));
        }
    }

    let g3 = experiment3::<f64>();
    let grid = g3.grid(20).unwrap();
    let trace = boundary_trace(&g3.boundary_data(), &grid, Side::XMin, 0.25).unwrap();
    for (j, v) in trace.iter().enumerate() {
        assert_eq!(*v, (g3.initial)(-0.25, grid.y(j) - 0.5));
    }
}
