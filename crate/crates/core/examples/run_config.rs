//! Presets and the flat `key = value` config text, plus the hash that
//! checkpoints record.
//!
//! cargo run --example run_config

use slgad::config::PRESETS;
use slgad::RunConfig;

fn main() -> slgad::Result<()> {
    for name in PRESETS {
        let p = RunConfig::preset(name)?;
        println!("{name:<12} lr {:<7} epochs {:<4} K {} D' {:<3} R {}", p.lr, p.epochs, p.k, p.d_hidden, p.rounds);
    }

    let mut cfg = RunConfig::preset("citeseer")?;
    cfg.apply_text("# tweak a couple of settings\nbeta = 0.8\nmode = con-only\n")?;
    print!("\n{}", cfg.to_text());
    println!("hash {}", cfg.hash());

    let mut bad = cfg.clone();
    bad.alpha = 0.0;
    bad.beta = 0.0;
    bad.k = 0;
    println!("\nvalidation: {}", bad.validate().unwrap_err());
    Ok(())
}
