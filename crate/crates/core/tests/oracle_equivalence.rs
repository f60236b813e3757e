//! The residue-plus-branch-cut assembly of `S(rho, t)` agrees with an
//! independent Bromwich inversion, and the inversion does not depend on the
//! line abscissa.

use fzwave::kernel::{spectral_kernel, QuadratureConfig};
use fzwave::laplace_oracle::{bromwich_invert, BromwichConfig};
use fzwave::ModelParams;

fn params() -> ModelParams {
    ModelParams::new(0.25, 0.45, 0.1, 0.01).unwrap()
}

#[test]
fn assembly_matches_bromwich_inversion() {
    let q = QuadratureConfig::default();
    let c = BromwichConfig::default();
    for rho in [0.5, 1.0, 2.0] {
        for t in [0.5, 1.0, 2.0] {
            let s = spectral_kernel(rho, t, &params(), &q).unwrap().total;
            let b = bromwich_invert(rho, t, &params(), &c).unwrap();
            assert!((s - b).abs() <= 1e-5 * s.abs().max(1.0), "rho {rho} t {t}: {s} vs {b}");
        }
    }
}

#[test]
fn bromwich_is_abscissa_independent() {
    for rho in [0.5, 2.0] {
        for t in [0.5, 2.0] {
            let v: Vec<f64> = [0.5, 1.0, 2.0]
                .iter()
                .map(|&s0| bromwich_invert(rho, t, &params(), &BromwichConfig { s0, ..Default::default() }).unwrap())
                .collect();
            for x in &v {
                assert!((x - v[0]).abs() <= 1e-5 * v[0].abs().max(1.0), "rho {rho} t {t}: {v:?}");
            }
        }
    }
}
