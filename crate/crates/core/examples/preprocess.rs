//! Impute, describe, normalise and split the bundled yield table.
//!
//! cargo run --example preprocess

use qrfsj::dataset::{chronological_split, knn_impute, load_csv, min_max_normalize, summary_stats_raw};

fn main() -> qrfsj::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/synthetic_yield.csv");
    let raw = load_csv(path)?;
    let missing: Vec<_> = raw
        .rows()
        .iter()
        .flat_map(|r| {
            r.features
                .iter()
                .zip(raw.feature_names())
                .filter(|(v, _)| v.is_none())
                .map(move |(_, name)| format!("{}:{name}", r.year))
        })
        .collect();
    println!("{} seasons, missing cells: {}", raw.len(), missing.join(" "));

    let imputed = knn_impute(&raw, 3)?;
    for row in imputed.rows() {
        for (v, name) in row.features.iter().zip(raw.feature_names()) {
            if missing.contains(&format!("{}:{name}", row.year)) {
                println!("  {} {name} <- {:.3}", row.year, v.unwrap());
            }
        }
    }

    print!("{}", summary_stats_raw(&imputed)?.to_table());

    let (data, params) = min_max_normalize(&imputed)?;
    for f in &params.features {
        println!("{:<10} [{:.2}, {:.2}]", f.name, f.min, f.max);
    }
    let (train, test) = chronological_split(&data, 0.8)?;
    println!(
        "train {}..={} ({} rows), test {}..={} ({} rows)",
        train.years()[0],
        train.years()[train.len() - 1],
        train.len(),
        test.years()[0],
        test.years()[test.len() - 1],
        test.len()
    );
    Ok(())
}
