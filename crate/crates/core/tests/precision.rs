//! The analytical layer evaluates in either precision.

use udn_rate::analytics::{pcov_approx_full, pcov_exact_full};
use udn_rate::{load_model_from_ratio, rate_quadrature, solve_c, NetworkParamsF32, PcovKind};

#[test]
fn f32_tracks_f64() {
    for beta in [2.5f64, 3.0, 4.0, 5.0] {
        let c64 = solve_c(beta).unwrap();
        let c32 = solve_c(beta as f32).unwrap();
        assert!((c32.value() as f64 - c64.value()).abs() < 1e-5);
        for gamma in [0.1f64, 1.0, 10.0, 100.0] {
            let e64 = pcov_exact_full(gamma, beta).unwrap();
            let e32 = pcov_exact_full(gamma as f32, beta as f32).unwrap();
            assert!((e32 as f64 - e64).abs() < 1e-5, "beta {beta} gamma {gamma}");
            let a64 = pcov_approx_full(gamma, beta, &c64).unwrap();
            let a32 = pcov_approx_full(gamma as f32, beta as f32, &c32).unwrap();
            assert!((a32 as f64 - a64).abs() < 1e-5);
        }
    }
}

#[test]
fn f32_rate_and_load() {
    let r64 = rate_quadrature(4.0f64, 0.5, PcovKind::Exact).unwrap().value;
    let r32 = rate_quadrature(4.0f32, 0.5, PcovKind::Exact).unwrap().value;
    assert!((r32 as f64 - r64).abs() < 1e-4, "{r32} vs {r64}");
    let l = load_model_from_ratio(2.0f32).unwrap();
    assert!((l.p_active + l.p_inactive - 1.0).abs() < 1e-6);
    assert!(NetworkParamsF32::new(1e-4, 0.0, 2.0, 1.0, 1.0, 0.0).is_err());
}
