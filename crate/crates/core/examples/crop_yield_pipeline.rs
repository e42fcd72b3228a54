//! The full command pipeline on the bundled 17-season table, written to a
//! temporary directory (or $QRFSJ_OUTPUT_DIR).

use std::path::PathBuf;

use qrfsj::cli::{
    cmd_evaluate, cmd_explain, cmd_forecast, cmd_train, EvaluateOptions, ExplainOptions, ForecastOptions, RunConfig,
};

fn main() -> qrfsj::Result<()> {
    let out = std::env::var_os("QRFSJ_OUTPUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("qrfsj-pipeline"));
    let config = RunConfig {
        input_csv: concat!(env!("CARGO_MANIFEST_DIR"), "/data/synthetic_yield.csv").into(),
        output_dir: out.clone(),
        ..Default::default()
    };
    let summary = cmd_train(&config)?;
    println!("trained on {} seasons, holding out {}", summary.n_train, summary.n_test);
    print!("{}", summary.stats.to_table());

    let model = out.join("model.json");
    let forecast = cmd_forecast(&ForecastOptions {
        model: model.clone(),
        query_csv: out.join("test.csv"),
        level: config.confidence_level,
        emit_density: true,
        tau_grid_size: config.tau_grid_size,
        output_dir: out.clone(),
    })?;
    println!();
    print!("{}", forecast.to_table());

    let eval = cmd_evaluate(&EvaluateOptions {
        model: model.clone(),
        test_csv: out.join("test.csv"),
        level: config.confidence_level,
        output_dir: out.clone(),
    })?;
    println!();
    print!("{}", eval.to_table());

    let explain = cmd_explain(&ExplainOptions {
        model,
        data_csv: out.join("train.csv"),
        top_k: 3,
        output_dir: out.clone(),
    })?;
    println!();
    print!("{}", explain.importance.to_table());
    println!("\noutputs in {}", out.display());
    Ok(())
}
