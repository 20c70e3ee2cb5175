//! End to end: a weight parsed from JSON, its moment table, the kernel on
//! both routes, and the zeros of the profile.

use bergman::kernel::{KernelEvaluator, KernelPath};
use bergman::moments::moment_table;
use bergman::weights::RadialWeightSpec;
use bergman::zeros::kernel_zeros;
use num_complex::Complex64;

#[test]
fn weight_to_zeros() {
    let spec = RadialWeightSpec::from_json(r#"{"family":"mittag_leffler","n":0,"alpha":2,"m":0.75}"#).unwrap();
    let table = moment_table(&spec, 300, 1e-12).unwrap();
    assert!(table.is_log_convex());

    let series = KernelEvaluator::series(table).unwrap();
    let closed = KernelEvaluator::for_weight(&spec, None).unwrap();
    assert_eq!(closed.path(), KernelPath::Closed);
    for (z, w) in [
        (Complex64::new(1.5, -0.5), Complex64::new(-0.7, 2.0)),
        (Complex64::new(-3.0, 0.2), Complex64::new(2.0, 0.1)),
    ] {
        let a = series.eval(z, w, 1e-12).unwrap().complex();
        let b = closed.eval(z, w, 1e-12).unwrap().complex();
        assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{z}, {w}: {a} vs {b}");
    }

    // both routes see the same zeros in the first variable; the series route
    // sums double-precision moments, which near |s| = 7.6 cannot place a zero
    // closer than ~1e-6
    let w = Complex64::new(0.8, 0.6);
    let zc = kernel_zeros(&closed, w, 8.0, 1e-10).unwrap();
    let zs = kernel_zeros(&series, w, 8.0, 1e-5).unwrap();
    assert_eq!(zc.count, 3);
    assert_eq!(zs.count, zc.count);
    assert!(
        zs.failures.is_empty() && zc.failures.is_empty(),
        "{:?} {:?}",
        zs.failures,
        zc.failures
    );
    let closed_zeros = zc.zeros_complex();
    for a in zs.zeros_complex() {
        let nearest = closed_zeros
            .iter()
            .map(|b| (a - b).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest < 1e-5,
            "{a}: nearest closed-form zero at distance {nearest:.1e}"
        );
    }

    // asking for more than the moments support is reported, not faked
    let tight = kernel_zeros(&series, w, 8.0, 1e-10).unwrap();
    assert!(
        tight.failures.iter().any(|f| f.contains("only locate it to within")),
        "{:?}",
        tight.failures
    );
}
