use lagspec_core::combinatorics::{build_tables_by_recursion, PillarCountTable};
use lagspec_core::moments::{moment_closed_form, moment_recursion, AspectRatio};
use lagspec_core::spectral::{cdf_at_sorted, density, support_endpoints, SpectralLaw};
use num_rational::BigRational;

#[test]
fn half_ratio_third_moment_is_33_over_32() {
    let y: AspectRatio = "1/2".parse().unwrap();
    let m3 = moment_closed_form(3, &y).unwrap();
    assert_eq!(m3, BigRational::new(33.into(), 32.into()));
    assert_eq!(moment_recursion(3, &y).unwrap().get(3), Some(&m3));
}

#[test]
fn unit_ratio_moments() {
    let y: AspectRatio = "1".parse().unwrap();
    let m = moment_recursion(3, &y).unwrap();
    let want: Vec<BigRational> = [1, 3, 12].iter().map(|&v| BigRational::from_integer(v.into())).collect();
    assert_eq!(m.values, want);
}

#[test]
fn closed_form_and_recursion_tables_agree() {
    let rec = build_tables_by_recursion(25).unwrap();
    let closed = PillarCountTable::from_closed_form(25).unwrap();
    for k in 1..=25 {
        assert_eq!(rec.f_row(k), closed.f_row(k), "k = {k}");
        assert_eq!(rec.g_row(k), closed.g_row(k), "k = {k}");
    }
}

#[test]
fn law_table_is_consistent_with_pointwise_evaluation() {
    for y in [0.25, 0.5, 1.0, 3.0] {
        let law = SpectralLaw::new(y, 65).unwrap();
        let e = support_endpoints(y).unwrap();
        assert_eq!(law.endpoints, e);
        let xs: Vec<f64> = law.grid.iter().map(|p| p.x).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs.iter().all(|&x| x >= e.a && x <= e.b));
        let cdf = cdf_at_sorted(y, &xs).unwrap();
        for (p, f) in law.grid.iter().zip(cdf) {
            assert_eq!(p.cdf, f);
            assert_eq!(p.density, density(p.x, y).unwrap());
        }
        assert!((law.grid.last().unwrap().cdf - 1.0).abs() < 1e-6);
    }
}
