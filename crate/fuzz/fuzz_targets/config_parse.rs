#![no_main]
use catgrav::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = ExperimentConfig::from_toml_str(text) else {
        return;
    };
    for axis in &cfg.sweeps {
        let v = axis.values();
        assert_eq!(v.len(), axis.points);
        assert_eq!(v[0], axis.min);
        assert_eq!(v[v.len() - 1], axis.max);
    }
    let _ = cfg.baseline_or_reference();
    let again = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).expect("serialized config parses");
    assert_eq!(cfg, again);
});
