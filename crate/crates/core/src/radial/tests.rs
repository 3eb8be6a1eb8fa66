use proptest::prelude::*;

use super::*;
use crate::barriers::derive_growth_params;

fn grid(radius: f64, cells: usize, dim: usize) -> RadialGrid {
    build_grid(radius, cells, dim).unwrap()
}

#[test]
fn laplacian_of_constant_vanishes() {
    let f = Field::constant(grid(2.0, 40, 3), 4.2);
    assert!(discrete_laplacian(&f).iter().all(|&v| v.abs() < 1e-12));
}

#[test]
fn laplacian_exact_on_r_squared() {
    for n in 1..=6 {
        let g = grid(3.0, 60, n);
        let f = Field::from_fn(g, 0.0, |r| r * r);
        let lap = discrete_laplacian(&f);
        assert_eq!(lap.len(), 60);
        for (j, v) in lap.iter().enumerate() {
            assert!((v - 2.0 * n as f64).abs() < 1e-9, "n = {n}, j = {j}: {v}");
        }
    }
}

#[test]
fn laplacian_second_order_on_smooth_profile() {
    // Δ(1+r²)^½ in three dimensions = s^(−3/2) + 2 s^(−1/2), s = 1 + r²
    let exact = |r: f64| {
        let s = 1.0 + r * r;
        s.powf(-1.5) + 2.0 * s.powf(-0.5)
    };
    let err = |cells: usize| {
        let g = grid(2.0, cells, 3);
        let f = Field::from_fn(g, 0.0, |r| (1.0 + r * r).sqrt());
        let lap = discrete_laplacian(&f);
        g.nodes()
            .zip(&lap)
            .map(|(r, v)| (v - exact(r)).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(40), err(80));
    assert!(coarse / fine > 3.5, "ratio {}", coarse / fine);
}

#[test]
fn diffusion_keeps_constants_under_zero_flux() {
    let f = Field::constant(grid(1.0, 50, 2), 0.75);
    let out = diffusion_substep(&f, 0.3, &BoundaryCondition::NeumannZero).unwrap();
    let worst = out.values.iter().map(|v| (v - 0.75).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
    assert_eq!(out.time, 0.3);
}

#[test]
fn diffusion_maximum_principle() {
    let g = grid(1.0, 50, 3);
    let f = Field::from_fn(g, 0.0, |r| 1.0 + (5.0 * r).sin().abs());
    for bc in [BoundaryCondition::NeumannZero, BoundaryCondition::DirichletConstant(1.2)] {
        let out = diffusion_substep(&f, 0.01, &bc).unwrap();
        assert!(out.max() <= f.max().max(1.2) + 1e-14);
        assert!(out.min() >= f.min().min(1.2) - 1e-14);
    }
}

#[test]
fn diffusion_of_r_squared_grows_by_two_n_dt() {
    let (n, dt) = (3usize, 1e-4);
    let g = grid(1.0, 100, n);
    let f = Field::from_fn(g, 0.0, |r| r * r);
    let out = diffusion_substep(&f, dt, &BoundaryCondition::DirichletConstant(1.0)).unwrap();
    // explicit Euler reference: u + dt·Lu = r² + 2n·dt away from the boundary
    for (j, r) in g.nodes().enumerate().filter(|(_, r)| *r < 0.5) {
        let euler = r * r + 2.0 * n as f64 * dt;
        assert!((out.values[j] - euler).abs() < 1e-9, "r = {r}");
    }
}

#[test]
fn extrapolated_diffusion_is_second_order() {
    let g = grid(1.0, 40, 2);
    let u0 = Field::from_fn(g, 0.0, |r| 1.0 + (1.0 - r * r).powi(2));
    let bc = BoundaryCondition::DirichletConstant(1.0);
    let run = |steps: usize, scheme| {
        let mut f = u0.clone();
        for _ in 0..steps {
            f = diffusion_substep_with(&f, 0.1 / steps as f64, &bc, scheme).unwrap();
        }
        f
    };
    let reference = run(2048, DiffusionScheme::Extrapolated);
    let err = |steps, scheme| {
        let f = run(steps, scheme);
        f.values.iter().zip(&reference.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    };
    let ratio2 = err(16, DiffusionScheme::Extrapolated) / err(32, DiffusionScheme::Extrapolated);
    let ratio1 = err(16, DiffusionScheme::BackwardEuler) / err(32, DiffusionScheme::BackwardEuler);
    assert!(ratio2 > 3.5, "extrapolated ratio {ratio2}");
    assert!(ratio1 > 1.7 && ratio1 < 2.5, "backward Euler ratio {ratio1}");
}

#[test]
fn step_reproduces_homogeneous_closed_form() {
    let g = grid(1.0, 20, 3);
    let cfg = SolverConfig {
        dt_init: 0.01,
        ..SolverConfig::new(1.0, 1.0)
    };
    let f = Field::constant(g, 1.0);
    let (next, dt, extinct) = step(&f, &cfg, &BoundaryCondition::NeumannZero).unwrap();
    assert_eq!(dt, 0.01);
    assert!(extinct.is_empty());
    let exact = (1.0 - 2.0 * dt).sqrt();
    assert!(next.values.iter().all(|v| (v - exact).abs() < 1e-14));
}

#[test]
fn step_shrinks_dt_near_floor() {
    let g = grid(1.0, 20, 1);
    let cfg = SolverConfig::new(1.0, 1.0);
    let f = Field::constant(g, 1e-3);
    let (next, dt, _) = step(&f, &cfg, &BoundaryCondition::NeumannZero).unwrap();
    assert!(dt <= 0.1 * 1e-6 / 2.0 * (1.0 + 1e-12));
    assert!(next.min() > 0.0);
}

#[test]
fn homogeneous_extinction_time() {
    let g = grid(1.0, 16, 3);
    let cfg = SolverConfig {
        dt_init: 1e-4,
        ..SolverConfig::new(1.0, 0.6)
    };
    let traj = simulate(&Field::constant(g, 1.0), &cfg, &BoundaryCondition::NeumannZero).unwrap();
    let t = traj.extinction_time.expect("extinct");
    assert!((t - 0.5).abs() < 1e-3, "{t}");
    assert!(traj.snapshots.windows(2).all(|w| w[1].time > w[0].time));
    assert!(traj.snapshots.iter().all(|s| s.values.iter().all(|&v| v > 0.0)));
}

#[test]
fn zero_horizon_gives_single_snapshot() {
    let g = grid(1.0, 16, 3);
    let u0 = Field::constant(g, 1.0);
    let traj = simulate(&u0, &SolverConfig::new(1.0, 0.0), &BoundaryCondition::NeumannZero).unwrap();
    assert_eq!(traj.snapshots.len(), 1);
    assert_eq!(traj.snapshots[0], u0);
    assert_eq!(traj.extinction_time, None);
}

#[test]
fn envelope_run_stays_above_lower_barrier() {
    let env = derive_growth_params(1.0, 3, 0.5, 0.5, 0.5, None).unwrap();
    let g = grid(10.0, 200, 3);
    let u0 = Field::try_from_r2(g, 0.0, |r2| env.lower().eval(r2, 0.0)).unwrap();
    let cfg = SolverConfig {
        dt_init: 5e-3,
        ..SolverConfig::new(1.0, 1.0)
    };
    let traj = simulate(&u0, &cfg, &BoundaryCondition::barrier(env.lower())).unwrap();
    assert_eq!(traj.extinction_time, None);
    for s in &traj.snapshots {
        let floor = (1.0 + 2.0 * s.time).sqrt();
        assert!(s.values[0] >= floor - 1e-3, "t = {}: {}", s.time, s.values[0]);
    }
}

#[test]
fn simulate_rejects_inconsistent_boundary() {
    let g = grid(1.0, 16, 3);
    let err = simulate(
        &Field::constant(g, 1.0),
        &SolverConfig::new(1.0, 0.1),
        &BoundaryCondition::DirichletConstant(2.0),
    )
    .unwrap_err();
    assert!(matches!(err, crate::Error::Precondition(_)));
}

#[test]
fn snapshots_round_trip_through_csv() {
    let g = grid(1.5, 12, 2);
    let fields = vec![
        Field::from_fn(g, 0.0, |r| 1.0 / 3.0 + r.exp()),
        Field::from_fn(g, 0.1 + 1e-17, |r| std::f64::consts::PI * (1.0 + r * r)),
    ];
    let mut buf = Vec::new();
    io::write_snapshots(&mut buf, &fields).unwrap();
    let back = io::read_snapshots(&buf[..], 2).unwrap();
    assert_eq!(back, fields);
}

fn field_strategy(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.2f64..3.0, cells + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_step_preserves_order(
        low in field_strategy(24),
        bump in field_strategy(24),
        dt_init in 1e-4f64..0.05,
        neumann in any::<bool>(),
    ) {
        let g = grid(1.0, 24, 3);
        let mut low = low;
        let mut high: Vec<f64> = low.iter().zip(&bump).map(|(a, b)| a + 0.1 * b).collect();
        let bc = if neumann {
            BoundaryCondition::NeumannZero
        } else {
            low[24] = 1.0;
            high[24] = 1.0;
            BoundaryCondition::DirichletConstant(1.0)
        };
        let cfg = SolverConfig { dt_init, ..SolverConfig::new(1.0, 1.0) };
        let lo = Field::new(g, low, 0.0).unwrap();
        let hi = Field::new(g, high, 0.0).unwrap();
        // step both with the step size of the lower field
        let mut a = Integrator::new(g, cfg, bc).unwrap();
        let mut b = Integrator::new(g, cfg, bc).unwrap();
        let dt = a.choose_dt(&lo, f64::INFINITY);
        let (mut lo2, mut hi2) = (lo.clone(), hi.clone());
        a.advance(&mut lo2, dt).unwrap();
        b.advance(&mut hi2, dt).unwrap();
        for (x, y) in lo2.values.iter().zip(&hi2.values) {
            prop_assert!(*x <= *y + 1e-10);
            prop_assert!(*x > 0.0);
        }
    }
}
