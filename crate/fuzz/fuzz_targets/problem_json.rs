#![no_main]

use libfuzzer_sys::fuzz_target;
use miura_scatter::problem::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = RunConfig::from_json(text) else { return };
    // Sampling is linear in the grid size; skip configs that only measure memory.
    if cfg.problem.grid.n > 1 << 16 || cfg.n_k > 1 << 16 {
        return;
    }
    let _ = cfg.validate();
});
