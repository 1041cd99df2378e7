#![no_main]
use catgrav::config::{Scale, SweepAxis, SweepVariable};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() < 19 {
        return;
    }
    let min = f64::from_le_bytes(data[0..8].try_into().unwrap());
    let max = f64::from_le_bytes(data[8..16].try_into().unwrap());
    let points = u16::from_le_bytes([data[16], data[17]]) as usize;
    let scale = if data[18] & 1 == 0 { Scale::Linear } else { Scale::Log };
    let Ok(axis) = SweepAxis::new(SweepVariable::Mass, min, max, points, scale) else {
        return;
    };
    let v = axis.values();
    assert_eq!(v.len(), points);
    assert_eq!((v[0], v[points - 1]), (min, max));
    assert!(v.iter().all(|x| !x.is_nan()));
});
