//! Cross-module consistency between sensitivities and quantum Fisher
//! information.

use std::f64::consts::PI;

use catgrav::metrology::{qfi_mcq_closed, qfi_mq_closed, sensitivity_mcq_closed, sensitivity_mq_closed};
use catgrav::model::MechanicalParams;
use catgrav::Error;
use proptest::prelude::*;

fn bound_holds(s: catgrav::Result<f64>, qfi: f64, t: f64) -> Result<(), TestCaseError> {
    match s {
        Ok(s) => {
            prop_assert!(s >= (t / qfi).sqrt() * (1.0 - 1e-6), "S = {s:e} below sqrt(t/F) = {:e}", (t / qfi).sqrt())
        }
        Err(Error::InsensitivePoint(_) | Error::DegenerateStatistics(_)) => {}
        Err(e) => return Err(TestCaseError::fail(e.to_string())),
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mq_sensitivity_respects_cramer_rao(phase in 0.05f64..6.2, drive in 1e-3f64..0.5, log_m in -14.0f64..-8.0) {
        let base = MechanicalParams::default();
        let m = 10f64.powf(log_m);
        let p = MechanicalParams { mass: m, counter_force: base.counter_force * m / base.mass, ..base }
            .with_mq_rabi(drive * base.omega);
        let t = phase / p.omega;
        let qfi = qfi_mq_closed(&p, t).unwrap().value;
        bound_holds(sensitivity_mq_closed(&p, t, false).map(|s| s.value), qfi, t)?;
    }

    #[test]
    fn mcq_sensitivity_respects_cramer_rao(phase in 0.05f64..6.2, drive in 0.05f64..1.5, alpha in 1.0f64..6.0) {
        let p = MechanicalParams::default().with_alpha(alpha).with_mcq_rabi(drive * PI / 4.0 * 62_831.853_071_795_86).unwrap();
        let t = phase / p.omega;
        let qfi = qfi_mcq_closed(&p, t).unwrap().value;
        bound_holds(sensitivity_mcq_closed(&p, t, false).map(|s| s.value), qfi, t)?;
    }
}
