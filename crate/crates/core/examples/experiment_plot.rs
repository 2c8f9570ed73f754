//! Run a small TOML experiment and render it as SVG next to the CSVs.

use std::path::Path;

use ddsim::experiment::{run_experiment, ExperimentConfig};
use ddsim::plot::{render_svg, PlotStyle};

const CONFIG: &str = r#"
name = "demo"
seed = 11
n_realizations = 10
dt = 0.1
horizon = 10.0
group = "GZY"

[system]
n_qubits = 4
alpha = 1.0

[[curve]]
protocol = "PDD"

[[curve]]
protocol = "SRPD"
"#;

fn main() -> ddsim::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let (curves, _) = run_experiment(&cfg, Path::new("."))?;
    let traces: Vec<_> = curves.into_iter().map(|c| c.trace).collect();
    let out = std::env::temp_dir().join("ddsim_demo.svg");
    std::fs::write(&out, render_svg(&traces, &PlotStyle::default())?).expect("write svg");
    for t in &traces {
        println!("{}: final F = {:.4}", t.name, t.mean.last().unwrap());
    }
    println!("wrote {}", out.display());
    Ok(())
}
