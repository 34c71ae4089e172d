use blaschke_lab::asymptotics::{dyadic_ks, norm_sweep, NormSweep, SweepOptions};
use blaschke_lab::coefficients::coeffs_of_power;
use blaschke_lab::orlicz::luxemburg_norm;
use blaschke_lab::{BlaschkeProduct, CoeffOptions, CoefficientSeries, Complex64, NormKind, OrliczFunction};
use proptest::prelude::*;

/// Taylor coefficients of `B^k` up to `len` by truncated series products, no FFT.
fn taylor_power(zeros: &[Complex64], k: usize, len: usize) -> Vec<Complex64> {
    let factor = |l: Complex64| -> Vec<Complex64> {
        if l.norm() == 0.0 {
            let mut f = vec![Complex64::new(0.0, 0.0); len];
            if len > 1 {
                f[1] = Complex64::new(1.0, 0.0);
            }
            return f;
        }
        let u = l / l.norm();
        let geo: Vec<Complex64> = (0..len).map(|n| l.conj().powu(n as u32)).collect();
        (0..len)
            .map(|n| u * (l * geo[n] - if n > 0 { geo[n - 1] } else { Complex64::new(0.0, 0.0) }))
            .collect()
    };
    let mul = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); len];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate().take(len - i) {
                c[i + j] += x * y;
            }
        }
        c
    };
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    b[0] = Complex64::new(1.0, 0.0);
    for &l in zeros {
        b = mul(&b, &factor(l));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    out[0] = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        out = mul(&out, &b);
    }
    out
}

#[test]
fn fft_coefficients_match_taylor_expansion() {
    let zeros = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::new(-0.3, 0.4),
    ];
    let b = BlaschkeProduct::new(zeros.to_vec()).unwrap();
    for k in [1, 3, 7] {
        let s = coeffs_of_power(&b, k, &CoeffOptions::default()).unwrap();
        let oracle = taylor_power(&zeros, k, 200);
        for (j, c) in oracle.iter().enumerate() {
            assert!((s.coeffs()[j] - c).norm() <= 1e-12, "k={k} j={j}");
        }
    }
}

#[test]
fn sweep_csv_round_trip() {
    let b = BlaschkeProduct::default_product();
    let sweep = norm_sweep(&b, &NormKind::L2, &dyadic_ks(1, 64), &SweepOptions::default()).unwrap();
    let mut buf = Vec::new();
    sweep.write_csv(&mut buf).unwrap();
    let back = NormSweep::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.ks, sweep.ks);
    assert_eq!(back.values, sweep.values);
    assert_eq!(back.norm_kind, "l2");
    assert_eq!(back.blaschke.unwrap().zeros(), b.zeros());
}

fn series() -> impl Strategy<Value = CoefficientSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..80)
        .prop_map(|v| CoefficientSeries::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_steps_never_increase_norms(s in series(), r in 0.01f64..0.999, n in 0usize..100, p in 2.5f64..6.0) {
        let phi = OrliczFunction::power(p).unwrap();
        let before = luxemburg_norm(&phi, &s, 1e-12).unwrap().value;
        let after = luxemburg_norm(&phi, &s.dilate(r).unwrap().truncate(n), 1e-12).unwrap().value;
        prop_assert!(after <= before * (1.0 + 1e-10));
    }

    #[test]
    fn valuation_of_products_of_powers(k1 in 1usize..20, k2 in 1usize..20) {
        let b = BlaschkeProduct::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.2)]).unwrap();
        let opts = CoeffOptions::default();
        let a = coeffs_of_power(&b, k1, &opts).unwrap();
        let c = coeffs_of_power(&b, k2, &opts).unwrap();
        prop_assert_eq!(a.multiply(&c).structural_valuation(), Some(2 * (k1 + k2)));
    }

    #[test]
    fn product_of_powers_is_power_of_sum(k1 in 1usize..40, k2 in 1usize..40) {
        let b = BlaschkeProduct::default_product();
        let opts = CoeffOptions::default();
        let prod = coeffs_of_power(&b, k1, &opts).unwrap().multiply(&coeffs_of_power(&b, k2, &opts).unwrap());
        let direct = coeffs_of_power(&b, k1 + k2, &opts).unwrap();
        let n = direct.len().min(prod.len());
        let diff = prod.truncate(n - 1).sub(&direct.truncate(n - 1));
        prop_assert!(diff.l2_norm() <= 1e-10);
    }
}
