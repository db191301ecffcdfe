use proptest::prelude::*;
use simadc_core::device::{DeviceStack, MtjParams, SenseParams, StateBit};
use simadc_core::vector::Vec3;

proptest! {
    #[test]
    fn resistance_bounded_and_monotone(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, phi in 0.0f64..6.3) {
        let mtj = MtjParams::default();
        let at = |c: f64| {
            let s = (1.0 - c * c).sqrt();
            mtj.resistance(Vec3::new(c, s * phi.cos(), s * phi.sin()))
        };
        let (r1, r2) = (at(c1), at(c2));
        prop_assert!(r1 >= mtj.r_p * (1.0 - 1e-12) && r1 <= mtj.r_ap * (1.0 + 1e-12));
        if c1 < c2 {
            prop_assert!(r1 >= r2);
        }
    }

    #[test]
    fn read_state_steps_once_at_r_ref(r in 1e5f64..1e7) {
        let s = DeviceStack::default().sense;
        prop_assert_eq!(s.read_state(r), StateBit(r > s.r_ref));
    }

    #[test]
    fn state_invariant_under_read_scaling(c in -1.0f64..1.0, k in 0.1f64..10.0) {
        let dev = DeviceStack::default();
        let scaled = SenseParams { v_read: k * dev.sense.v_read, v_threshold: k * dev.sense.v_threshold, ..dev.sense.clone() };
        let r = dev.mtj.resistance(Vec3::new(c, (1.0 - c * c).sqrt(), 0.0));
        prop_assert_eq!(dev.sense.read_state(r), scaled.read_state(r));
    }

    #[test]
    fn read_current_bracketed(c in -1.0f64..1.0) {
        let dev = DeviceStack::default();
        let s = &dev.sense;
        let r = dev.mtj.resistance(Vec3::new(c, (1.0 - c * c).sqrt(), 0.0));
        let i = s.read_current(r);
        prop_assert!(i >= s.v_read / (s.r_ref + dev.mtj.r_ap) * (1.0 - 1e-12));
        prop_assert!(i <= s.v_read / (s.r_ref + dev.mtj.r_p) * (1.0 + 1e-12));
    }
}

#[test]
fn me_polarity_maps_input_to_oxide() {
    let dev = DeviceStack::default();
    assert_eq!(dev.me_voltage(0.4), -0.4);
    let flipped = DeviceStack { me_polarity: 1.0, ..dev };
    assert_eq!(flipped.me_voltage(0.4), 0.4);
}
