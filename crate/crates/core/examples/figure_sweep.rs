//! One figure sweep at reduced size.
//!
//! cargo run --release --example figure_sweep -- fig3a /tmp/fig3a

use std::path::PathBuf;

use sa_lab::experiments::{reproduce_figure, FigureId, FigureOverrides};

fn main() -> sa_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let id: FigureId = args.next().as_deref().unwrap_or("fig1").parse()?;
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join(id.name()));
    let overrides = FigureOverrides {
        runs: Some(200),
        horizon: Some(5_000),
        ..Default::default()
    };
    let report = reproduce_figure(id, &out, &overrides, 1)?;
    for s in &report.sweeps {
        let slope = s.slope.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
        println!("{} = {:<5} final mean error {:.4e}  slope {slope}", id.parameter(), s.value, s.final_mean_error);
    }
    println!("expected ordering holds: {}", report.ordering_holds());
    println!("{} files in {}", report.outputs.len(), out.display());
    Ok(())
}
