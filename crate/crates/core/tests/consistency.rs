use bec_phonon::decoherence::{
    nonclassical_depth, nonclassical_depth_evolution, occupation_evolution, purity_evolution,
    squeezing_evolution, Relaxation,
};
use bec_phonon::gaussian::{params_from_state, state_from_params, SymplecticConvention};
use bec_phonon::lyapunov::{evolve_closed_form, LindbladChannel};
use bec_phonon::three_body::ThreeBodyParams;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

#[test]
fn closed_form_metrics_match_evolved_covariance() {
    let conv = SymplecticConvention::default();
    // (mu0, r0, psi, omega', n_th, gamma)
    let cases = [
        (1.0, 10.0, 0.0, 0.0, 0.0, 0.7397),
        (1.0, 10.0, 0.0, 0.0, 0.3, 0.7397),
        (0.7, 1.3, 0.9, 5.0, 0.2, 1.0),
        (0.4, 0.2, 2.0, 1.0, 2.5, 0.3),
        (1.0, 2.0, 4.0, 30.0, 0.0, 2.0),
    ];
    for &(mu0, r0, psi, omega, n_th, gamma) in &cases {
        let s0 = state_from_params(mu0, r0, psi, [0.0, 0.0], conv).unwrap();
        let ch = LindbladChannel::thermal(gamma, omega, n_th, conv).unwrap();
        let mu_inf = 1.0 / (1.0 + 2.0 * n_th);
        let p = Relaxation::new(mu0, r0, mu_inf, gamma).unwrap();
        let n0 = s0.occupation();
        for i in 0..200 {
            let t = 8.0 / gamma * i as f64 / 199.0;
            let s = evolve_closed_form(&s0, &ch, t).unwrap();
            let q = params_from_state(&s).unwrap();
            let ctx = format!("case {mu0} {r0} {psi} {omega} {n_th} at t = {t}");
            assert!(
                rel(q.mu, purity_evolution(&p, t).unwrap()) < 1e-10,
                "mu {ctx}"
            );
            assert!(
                rel(q.r, squeezing_evolution(&p, t).unwrap()) < 1e-10,
                "r {ctx}"
            );
            assert!(
                rel(q.n, occupation_evolution(n0, n_th, gamma, t).unwrap()) < 1e-10,
                "N {ctx}"
            );
            let tau = nonclassical_depth_evolution(&p, t).unwrap();
            assert!(
                (nonclassical_depth(&s).unwrap() - tau).abs() < 1e-10,
                "tau {ctx}"
            );
            if r0 > 1e-6 && omega == 0.0 {
                assert!((q.psi - psi).abs() < 1e-12, "psi {ctx}");
            }
        }
    }
}

fn rk4_density(p: &ThreeBodyParams, t_end: f64, steps: usize) -> Vec<(f64, f64)> {
    let f = |n: f64| -p.l3 * n * n * n;
    let h = t_end / steps as f64;
    let mut n = p.n0;
    let mut out = vec![(0.0, n)];
    for i in 0..steps {
        let k1 = f(n);
        let k2 = f(n + 0.5 * h * k1);
        let k3 = f(n + 0.5 * h * k2);
        let k4 = f(n + h * k3);
        n += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((i + 1) as f64 * h, n));
    }
    out
}

#[test]
fn three_body_density_matches_ode_integration() {
    let p = ThreeBodyParams::rubidium(3.2444e20).unwrap();
    let t_end = 5.0 * p.half_life();
    for (t, n) in rk4_density(&p, t_end, 20_000) {
        let exact = p.density(t).unwrap();
        assert!(rel(n, exact) < 1e-8, "t = {t}");
        assert!(rel(p.rate(t).unwrap(), p.l3 * exact * exact) < 1e-15);
    }
}
