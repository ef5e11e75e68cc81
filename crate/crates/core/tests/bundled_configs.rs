use std::path::Path;

use asa_sim::channel::PeriodKind;
use asa_sim::config;
use asa_sim::oracle::BaselineMode;

#[test]
fn homogeneous_k4_has_reference_values() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/homogeneous_k4.cfg");
    let cfg = config::parse_config(&path).unwrap();
    assert_eq!((cfg.channels.len(), cfg.users.len()), (4, 4));
    for ch in &cfg.channels {
        assert_eq!(ch.on_dist().kind(), PeriodKind::Geometric);
        assert_eq!(ch.on_dist().mean(), 3.23);
        assert_eq!(ch.off_dist().mean(), 1.43);
    }
    assert!(cfg.users.iter().all(|u| u.rate == 0.5 && u.entry == 0));
    assert_eq!((cfg.l0, cfg.c, cfg.horizon, cfg.runs), (24, 12, 5000, 20));
    assert_eq!(cfg.baseline, BaselineMode::Analytic);
}

#[test]
fn every_bundled_config_validates() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        config::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 7);
}
