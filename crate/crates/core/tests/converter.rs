use proptest::prelude::*;
use simadc_core::adc::{self, calibrate_lut, count_states, nrmsd, transfer_curve_from, AdcParams, Conversion};
use simadc_core::device::{DeviceStack, StateBit};
use simadc_core::llg::IntegratorParams;
use simadc_core::magnet::{Magnet, MagnetConfig};
use simadc_core::stats::pearson;

#[test]
fn mean_mx_and_duty_anticorrelate_across_sweep() {
    let magnet = Magnet::new(MagnetConfig::low_barrier()).unwrap();
    let adc = AdcParams { t_s: 1e-6, ..Default::default() };
    let conv = adc::convert_all(&magnet, &DeviceStack::default(), &IntegratorParams::default(), &adc, &adc.voltages()).unwrap();
    let mx: Vec<f64> = conv.iter().map(|c| c.mean_mx).collect();
    let duty: Vec<f64> = conv.iter().map(|c| c.duty()).collect();
    assert!(pearson(&mx, &duty) < -0.95);
    assert!(conv.iter().all(|c| c.c_out <= c.n_samples && c.n_samples == 1000));
}

proptest! {
    #[test]
    fn count_matches_naive(bits in prop::collection::vec(any::<bool>(), 1..2000), cut in 0usize..2000) {
        let stream: Vec<StateBit> = bits.iter().map(|&b| StateBit(b)).collect();
        let n = cut.min(stream.len());
        let ones = count_states(&stream, n).unwrap();
        let zeros = stream[..n].iter().filter(|b| !b.0).count() as u64;
        prop_assert_eq!(ones + zeros, n as u64);
        prop_assert_eq!(ones, bits[..n].iter().filter(|&&b| b).count() as u64);
    }

    #[test]
    fn nrmsd_invariant_under_affine_y(ys in prop::collection::vec(-100.0f64..100.0, 5..20), a in 0.1f64..50.0, b in -1e3f64..1e3) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y + 3.0 * i as f64)).collect();
        let moved: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, a * y + b)).collect();
        let (n0, n1) = (nrmsd(&pts).unwrap(), nrmsd(&moved).unwrap());
        prop_assert!((n0 - n1).abs() <= 1e-6 * n0.max(1.0), "{n0} {n1}");
    }

    #[test]
    fn lut_is_monotone_and_total(noise in prop::collection::vec(-300i64..300, 17), bits in 1u32..9) {
        let adc = AdcParams { bits: 4, ..Default::default() };
        let n = adc.n_samples().unwrap();
        let conv: Vec<Conversion> = adc
            .voltages()
            .iter()
            .zip(&noise)
            .map(|(&v, &e)| {
                let c = ((v + 0.4) / 0.8 * n as f64) as i64 + e;
                Conversion { v_in: v, mean_mx: -v, c_out: c.clamp(0, n as i64) as u64, n_samples: n }
            })
            .collect();
        let mut curve = transfer_curve_from(&conv, &adc).unwrap();
        curve.bits = bits;
        let lut = calibrate_lut(&curve).unwrap();
        let table = lut.table();
        prop_assert_eq!(table.len() as u64, n + 1);
        prop_assert!(table.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(table.iter().all(|&c| c < (1u32 << bits)));
    }
}
