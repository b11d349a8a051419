// scratch probe (not committed)
use bell_core::gaussian::{make_twb_cov, wigner_of_cov, TwbParams};
use bell_core::ips::{ips_state, IpsParams};
use bell_core::oracle::quadrature::{integrate, IntegrandWeight, QuadratureSpec};

fn main() {
    let state = wigner_of_cov(&make_twb_cov(&TwbParams::new(0.5).unwrap())).unwrap();
    let (ips, p11) = ips_state(&state, &IpsParams::from_tau(0.99).unwrap()).unwrap();
    println!("p11 = {p11:.6e}");
    let masses: Vec<f64> = ips.terms().iter().map(|t| t.integral()).collect();
    println!("masses = {masses:?}");
    for tol in [1e-6, 1e-7] {
        let spec = QuadratureSpec { rel_tol: tol, ..QuadratureSpec::default() };
        let t0 = std::time::Instant::now();
        match integrate(&ips, IntegrandWeight::Unit, &spec) {
            Ok(est) => println!("tol={tol:.0e}: value={:.12} bound={:.3e} regions={} in {:?}", est.value, est.error_bound, est.regions, t0.elapsed()),
            Err(e) => println!("tol={tol:.0e}: FAIL {e} in {:?}", t0.elapsed()),
        }
    }
    let t0 = std::time::Instant::now();
    let spec = QuadratureSpec { rel_tol: 1e-6, ..QuadratureSpec::default() };
    match integrate(&ips, IntegrandWeight::QuadrantSign { theta: 0.0, phi: -std::f64::consts::FRAC_PI_4 }, &spec) {
        Ok(est) => println!("sign: value={:.10} bound={:.3e} regions={} in {:?}", est.value, est.error_bound, est.regions, t0.elapsed()),
        Err(e) => println!("sign: FAIL {e} in {:?}", t0.elapsed()),
    }
}
