//! `femcrit solve` and `femcrit fss`.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 solver error, 4 analysis
//! error (no crossing, degenerate extrapolation).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use femcrit::pipeline::{cmd_fss, cmd_solve, exit_code, RunConfig};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "femcrit", version, about = "Two-electron atom solves and critical-charge scaling runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One ground-state solve; writes energies.csv and result.json.
    Solve(SolveArgs),
    /// Crossings, extrapolation and optional data collapse.
    Fss(FssArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// hf, hf-wigner, lda, exact (scaled form), exact-direct or synthetic.
    #[arg(long)]
    method: Option<String>,
    /// c0 or c1.
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    rcut: Option<f64>,
    #[arg(long)]
    growth: Option<f64>,
    /// Angular elements of the three-variable mesh.
    #[arg(long)]
    angular: Option<usize>,
    /// analytic or numeric one-electron threshold.
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    charge: Option<f64>,
}

#[derive(Args)]
struct FssArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    n_step: Option<usize>,
    #[arg(long)]
    delta_n: Option<usize>,
    #[arg(long)]
    z_min: Option<f64>,
    #[arg(long)]
    z_max: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Also scan nu for the best data collapse.
    #[arg(long)]
    collapse: bool,
}

fn set(map: &mut Map<String, Value>, path: &[&str], value: Option<Value>) {
    let Some(value) = value else { return };
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut node = map;
    for p in parents {
        let entry = node.entry(*p).or_insert_with(|| json!({}));
        if !entry.is_object() {
            *entry = json!({});
        }
        node = entry.as_object_mut().expect("object");
    }
    node.insert((*last).to_owned(), value);
}

fn base(common: &Common) -> Result<Map<String, Value>, femcrit::Error> {
    let mut map = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| femcrit::Error::Config(format!("{}: {e}", path.display())))?;
            match serde_json::from_str(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(femcrit::Error::Config("configuration must be a JSON object".into())),
                Err(e) => return Err(femcrit::Error::Config(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    let method = common.method.as_ref().map(|m| m.to_ascii_lowercase().replace('-', "_"));
    set(&mut map, &["method"], method.map(Value::from));
    set(&mut map, &["basis"], common.basis.as_ref().map(|b| Value::from(b.to_ascii_lowercase())));
    set(&mut map, &["mesh", "r_cut"], common.rcut.map(Value::from));
    set(&mut map, &["mesh", "growth"], common.growth.map(Value::from));
    set(&mut map, &["mesh", "angular"], common.angular.map(Value::from));
    set(&mut map, &["threshold"], common.threshold.as_ref().map(|t| Value::from(t.to_ascii_lowercase())));
    set(&mut map, &["cache_dir"], common.cache_dir.as_ref().map(|p| Value::from(p.to_string_lossy())));
    set(&mut map, &["output_dir"], common.out.as_ref().map(|p| Value::from(p.to_string_lossy())));
    Ok(map)
}

fn run(cli: Cli) -> femcrit::Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let mut map = base(&args.common)?;
            set(&mut map, &["mesh", "elements"], args.elements.map(Value::from));
            set(&mut map, &["charge"], args.charge.map(Value::from));
            let config = RunConfig::from_value(Value::Object(map))?;
            let report = cmd_solve(&config)?;
            let e = &report.energies;
            println!(
                "{} Z={} N={} E_tot={:.6}{} -> {}",
                e.method,
                e.z,
                e.elements,
                e.e_tot,
                if report.from_cache { " (cached)" } else { "" },
                config.output_dir.display()
            );
        }
        Command::Fss(args) => {
            let mut map = base(&args.common)?;
            set(&mut map, &["fss", "n_min"], args.n_min.map(Value::from));
            set(&mut map, &["fss", "n_max"], args.n_max.map(Value::from));
            set(&mut map, &["fss", "n_step"], args.n_step.map(Value::from));
            set(&mut map, &["fss", "delta_n"], args.delta_n.map(Value::from));
            set(&mut map, &["fss", "z_min"], args.z_min.map(Value::from));
            set(&mut map, &["fss", "z_max"], args.z_max.map(Value::from));
            set(&mut map, &["fss", "omega"], args.omega.map(Value::from));
            if args.collapse {
                let fss = map.get("fss").and_then(|f| f.get("collapse")).cloned();
                if fss.is_none() || fss == Some(Value::Null) {
                    set(&mut map, &["fss", "collapse"], Some(json!({})));
                }
            }
            let config = RunConfig::from_value(Value::Object(map))?;
            let report = cmd_fss(&config)?;
            let s = &report.summary;
            println!(
                "{}: Z_c = {:.6} +- {:.1e}, alpha = {:.6} +- {:.1e}{} ({} crossings) -> {}",
                s.method,
                s.z_c,
                s.z_c_err,
                s.alpha,
                s.alpha_err,
                s.nu.map(|nu| format!(", nu = {nu:.3}")).unwrap_or_default(),
                s.sizes.len(),
                config.output_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("femcrit: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
