//! The command-line workflow driven in-process: simulate intraday bars,
//! build measures, fit, forecast and evaluate. Files go to a directory given
//! as the first argument (default `./regarch-pipeline`).
//!
//! ```text
//! cargo run --release --example cli_pipeline -- /tmp/pipeline
//! ```

use std::path::{Path, PathBuf};

fn run(args: &[&str]) {
    println!("$ regarch {}", args.join(" "));
    let code = regarch::cli::run(std::iter::once("regarch").chain(args.iter().copied()));
    assert_eq!(code, 0, "command failed");
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "regarch-pipeline".into()),
    );
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/heston.toml");
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();

    run(&[
        "simulate",
        "--config",
        &config.to_string_lossy(),
        "--out-dir",
        &p(""),
    ]);
    run(&[
        "measures",
        "--bars",
        &p("bars.csv"),
        "--measures",
        "all",
        "--lambda2m",
        "2.0",
        "--out",
        &p("measures.csv"),
    ]);
    run(&[
        "describe",
        "--input",
        &p("measures.csv"),
        "--kind",
        "rv",
        "--log",
        "--out",
        &p("describe_log_rv.json"),
    ]);
    run(&[
        "fit",
        "--returns",
        &p("returns.csv"),
        "--measures",
        &p("measures.csv"),
        "--kinds",
        "rk",
        "--model",
        "regarch",
        "--out",
        &p("fit_regarch.json"),
    ]);
    for (model, kinds) in [
        ("garch", None),
        ("regarch", Some("rv")),
        ("regarch", Some("rk")),
    ] {
        let label = format!(
            "{model}{}",
            kinds.map(|k| format!("_{k}")).unwrap_or_default()
        );
        let out = p(&format!("forecast_{label}.csv"));
        let (returns, measures) = (p("returns.csv"), p("measures.csv"));
        let mut args = vec![
            "forecast",
            "--returns",
            &returns,
            "--model",
            model,
            "--refit-stride",
            "10",
        ];
        if let Some(k) = kinds {
            args.extend(["--measures", &measures, "--kinds", k]);
        }
        args.extend(["--out", &out]);
        run(&args);
    }
    run(&[
        "evaluate",
        "--forecast",
        &format!("garch={}", p("forecast_garch.csv")),
        "--forecast",
        &format!("regarch_rv={}", p("forecast_regarch_rv.csv")),
        "--forecast",
        &format!("regarch_rk={}", p("forecast_regarch_rk.csv")),
        "--proxy",
        &p("true_variance.csv"),
        "--returns",
        &p("returns.csv"),
        "--out",
        &p("evaluation.json"),
    ]);
    let eval = std::fs::read_to_string(dir.join("evaluation.json")).expect("evaluation written");
    println!("{eval}");
}
