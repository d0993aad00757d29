mod common;

use common::*;

#[test]
fn integrator_handles_known_integrals() {
    // int_0^inf x^2 e^-x dx = 2
    let v = integrate_positive(|x| x * x * (-x).exp(), 0.0, 1.0, 1e-14);
    assert!((v - 2.0).abs() < 1e-12, "{v}");
    // int_0^inf 1 / (1 + x^2) dx = pi / 2
    let v = integrate_positive(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-14);
    assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12, "{v}");
    // int_0^inf x^(-1/2) e^-x dx = sqrt(pi)
    let v = integrate_positive(|x| (-x).exp() / x.sqrt(), 0.0, 1.0, 1e-14);
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{v}");
}
