#![allow(dead_code)]

use fronts::shooting::{self, FrontProfile, ShootConfig};
use std::collections::HashMap;
use std::io::Write;
use std::sync::{Mutex, OnceLock};

/// Gradual profiles are shared between tests of one binary.
pub fn gradual(v: f64) -> FrontProfile {
    static CACHE: OnceLock<Mutex<HashMap<u64, FrontProfile>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&v.to_bits()) {
        return p.clone();
    }
    let p = shooting::front_profile(v, &ShootConfig::default()).expect("gradual profile");
    cache.lock().unwrap().entry(v.to_bits()).or_insert(p).clone()
}

/// Bisected critical velocity at bracket tolerance 1e-6 and its steep profile.
pub fn steep() -> &'static (f64, FrontProfile) {
    static STEEP: OnceLock<(f64, FrontProfile)> = OnceLock::new();
    STEEP.get_or_init(|| {
        let cfg = ShootConfig::default();
        let r = shooting::find_v_star(0.5, 2.0, 1e-6, &cfg).expect("bisection");
        (r.v_star, shooting::steep_profile(r.v_star, &cfg).expect("steep profile"))
    })
}

/// One verdict line, written past the test harness's output capture.
pub fn verdict(id: &str, name: &str, pass: bool, detail: &str) {
    let line = format!("ACCEPTANCE {id:>2} {name}: {} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}
