use std::sync::{Arc, LazyLock};

use proptest::prelude::*;

use hankel_besov::bessel::normalized_j;
use hankel_besov::convolution::translate;
use hankel_besov::cwt::cwt;
use hankel_besov::hankel::{plan, HankelPlan};
use hankel_besov::kernels::{calibrate_d_constant, DKernelCalibration};
use hankel_besov::wavelet::{make_wavelet, Wavelet, WaveletProfile};
use hankel_besov::{lp_norm, GridSpec, MeasureParams, RadialGrid, SampledFunction};

struct Fx {
    grid: Arc<RadialGrid>,
    plan: HankelPlan,
    cal: DKernelCalibration,
    wavelet: Wavelet,
}

static FX: LazyLock<Fx> = LazyLock::new(|| {
    let p = MeasureParams::new(1.0).unwrap();
    let grid = Arc::new(RadialGrid::new(&p, GridSpec::default()).unwrap());
    let plan = plan(&p, &grid, &grid).unwrap();
    let wavelet = make_wavelet(&p, WaveletProfile::HankelMexican(1), &plan).unwrap();
    Fx {
        cal: calibrate_d_constant(&p).unwrap(),
        grid,
        plan,
        wavelet,
    }
});

fn gauss(w: f64, c: f64) -> SampledFunction {
    SampledFunction::from_fn(&FX.grid, |t| (-(t - c).powi(2) / (2.0 * w * w)).exp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, w1 in 0.5..2.0f64, w2 in 0.5..2.0f64) {
        let (f, g) = (gauss(w1, 0.0), gauss(w2, 1.0));
        let lhs = FX.plan.forward(&f.axpby(a, &g, b).unwrap()).unwrap();
        let rhs = FX.plan.forward(&f).unwrap().axpby(a, &FX.plan.forward(&g).unwrap(), b).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn round_trip_on_smooth_radial_functions(w in 0.5..2.0f64, c in 0.0..3.0f64) {
        let f = SampledFunction::from_fn(&FX.grid, |t| (1.0 + c * t * t) * (-t * t / (2.0 * w * w)).exp()).unwrap();
        let back = FX.plan.inverse(&FX.plan.forward(&f).unwrap()).unwrap();
        let e = lp_norm(&back.sub(&f).unwrap(), 2.0).unwrap() / lp_norm(&f, 2.0).unwrap();
        prop_assert!(e <= 1e-6, "{e:e}");
    }

    #[test]
    fn translation_is_positive_and_contracting(y in 0.01..8.0f64, w in 0.5..1.5f64) {
        let f = gauss(w, 0.0);
        let t = translate(&FX.cal, &f, y).unwrap();
        prop_assert!(t.values().iter().all(|&v| v >= -1e-12));
        for p in [1.0, 2.0, 4.0] {
            prop_assert!(lp_norm(&t, p).unwrap() <= (1.0 + 1e-4) * lp_norm(&f, p).unwrap());
        }
    }

    #[test]
    fn kernel_is_bounded_by_one(mu in 0.0..3.0f64, z in 0.0..200.0f64) {
        prop_assert!(normalized_j(mu, z).abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn cwt_is_linear(a in -2.0..2.0f64, w in 0.5..2.0f64) {
        let scales = [0.25, 0.5, 1.0, 2.0];
        let (f, g) = (gauss(w, 0.0), gauss(1.0, 0.5));
        let sum = cwt(&FX.plan, &f.axpby(a, &g, 1.0).unwrap(), &FX.wavelet, &scales).unwrap();
        let bf = cwt(&FX.plan, &f, &FX.wavelet, &scales).unwrap();
        let bg = cwt(&FX.plan, &g, &FX.wavelet, &scales).unwrap();
        for k in 0..scales.len() {
            for ((s, x), y) in sum.row(k).iter().zip(bf.row(k)).zip(bg.row(k)) {
                prop_assert!((s - (a * x + y)).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn wavelet_spec_round_trips(n in 1u32..6) {
        let p = WaveletProfile::HankelMexican(n);
        prop_assert_eq!(p.to_string().parse::<WaveletProfile>().unwrap(), p);
    }
}
