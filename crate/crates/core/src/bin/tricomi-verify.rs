use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tricomi::bounds::{catalog, Auxiliary, DominanceId};
use tricomi::measure::MomentIdentity;
use tricomi::turanian::{sharpness_scan, SharpnessLimit};
use tricomi::verify::{eval_point, parse_list, run, write_report, EvalTarget, RunConfig, Suite};
use tricomi::Error;

#[derive(Parser)]
#[command(name = "tricomi-verify", version, about = "Verify Turán-type inequalities for the Tricomi function")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites over a parameter grid and write a report
    Run(RunArgs),
    /// Evaluate one quantity at one point
    Eval(EvalArgs),
    /// Print the bound, dominance, limit and moment catalog as JSON
    Catalog,
    /// Tabulate a limit scan at one (a, c)
    Sharpness(SharpnessArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    /// key = value file; flags given on the command line take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated suite names
    #[arg(long)]
    suites: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    grid_a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    grid_c: Option<String>,
    #[arg(long)]
    grid_x: Option<String>,
    /// Per-suite tolerance as suite=value, repeatable
    #[arg(long = "tol", value_name = "SUITE=VALUE")]
    tol: Vec<String>,
    /// Per-suite tolerance flags: --tol-kernel-crosscheck, --tol-ode-residual, ...
    #[arg(long, hide = true)]
    tol_kernel_crosscheck: Option<f64>,
    #[arg(long, hide = true)]
    tol_ode_residual: Option<f64>,
    #[arg(long, hide = true)]
    tol_derivative: Option<f64>,
    #[arg(long, hide = true)]
    tol_moments: Option<f64>,
    #[arg(long, hide = true)]
    tol_stieltjes: Option<f64>,
    #[arg(long, hide = true)]
    tol_bounds: Option<f64>,
    #[arg(long, hide = true)]
    tol_dominance: Option<f64>,
    #[arg(long, hide = true)]
    tol_sharpness: Option<f64>,
    #[arg(long, hide = true)]
    tol_monotonicity: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Also write a JSON copy of a CSV report
    #[arg(long)]
    json: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Suppress the summary on standard error
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvalArgs {
    /// psi, turanian:<kind>, ratio:<kind>, phi:<t>, bound:<id>, dominance:<id>, aux:<f|g|h>
    what: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    x: f64,
    /// Print JSON instead of key=value
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SharpnessArgs {
    /// Limit name, e.g. zeta, eta, both_at_zero
    limit: String,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    c: f64,
    /// Comma-separated x sequence; defaults to the limit's own
    #[arg(long)]
    x: Option<String>,
}

fn build_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &args.config {
        cfg.apply_file(p)?;
    }
    let pairs = [
        ("suites", &args.suites),
        ("grid_a", &args.grid_a),
        ("grid_c", &args.grid_c),
        ("grid_x", &args.grid_x),
        ("format", &args.format),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    for t in &args.tol {
        let (suite, v) = t
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("--tol expects suite=value, got '{t}'")))?;
        suite.parse::<Suite>()?;
        cfg.set(&format!("tol_{suite}"), v)?;
    }
    let flags = [("kernel_crosscheck", args.tol_kernel_crosscheck), ("ode_residual", args.tol_ode_residual), ("derivative", args.tol_derivative), ("moments", args.tol_moments), ("stieltjes", args.tol_stieltjes), ("bounds", args.tol_bounds), ("dominance", args.tol_dominance), ("sharpness", args.tol_sharpness), ("monotonicity", args.tol_monotonicity)];
    for (suite, v) in flags {
        if let Some(v) = v {
            cfg.set(&format!("tol_{suite}"), &v.to_string())?;
        }
    }
    if let Some(p) = &args.out {
        cfg.out = Some(p.clone());
    }
    if args.json {
        cfg.json_mirror = true;
    }
    if let Some(j) = args.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg).and_then(|r| write_report(&cfg, &r).map(|_| r)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if !args.quiet {
        eprint!("{}", report.summary_text());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let target: EvalTarget = match args.what.parse() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match eval_point(args.a, args.c, args.x, &target) {
        Ok(out) => {
            if args.json {
                println!("{}", serde_json::to_string(&out).expect("serializable output"));
            } else {
                println!("{}", out.line());
            }
            if out.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ (Error::Region { .. } | Error::Domain(_) | Error::ParameterPole { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}

fn cmd_catalog() -> ExitCode {
    let bounds: Vec<_> = catalog()
        .iter()
        .map(|s| {
            serde_json::json!({
                "id": s.id.name(),
                "target": format!("{:?}", s.target),
                "side": format!("{:?}", s.side),
                "region": s.region_string(),
                "statement": s.statement,
                "anchor": s.anchor,
                "gated": s.gated,
            })
        })
        .collect();
    let dominance: Vec<_> = DominanceId::ALL
        .iter()
        .map(|d| {
            let s = d.spec();
            serde_json::json!({
                "id": d.name(),
                "claimed": s.claimed.name(),
                "competitor": s.competitor.name(),
                "threshold": s.threshold,
                "region": s.region_string(),
                "anchor": s.anchor,
            })
        })
        .collect();
    let limits: Vec<_> = SharpnessLimit::ALL
        .iter()
        .map(|&id| {
            let l = SharpnessLimit::new(id);
            serde_json::json!({ "name": l.name(), "kind": l.kind.name(), "region": l.region() })
        })
        .collect();
    let moments: Vec<_> = MomentIdentity::POWERS
        .iter()
        .map(|&power| {
            let m = MomentIdentity { power };
            serde_json::json!({ "id": m.id(), "power": power, "region": m.region() })
        })
        .collect();
    let aux: Vec<_> = Auxiliary::ALL
        .iter()
        .map(|f| serde_json::json!({ "name": f.name(), "increasing": f.increasing(), "region": f.region() }))
        .collect();
    let doc = serde_json::json!({
        "bounds": bounds,
        "dominance": dominance,
        "limits": limits,
        "moments": moments,
        "auxiliary": aux,
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable catalog"));
    ExitCode::SUCCESS
}

fn cmd_sharpness(args: SharpnessArgs) -> ExitCode {
    let result = (|| {
        let limit = SharpnessLimit::from_name(&args.limit)?;
        let seq = match &args.x {
            Some(s) => parse_list(s)?,
            None => limit.default_sequence().to_vec(),
        };
        sharpness_scan(limit, args.a, args.c, &seq)
    })();
    match result {
        Ok(scan) => {
            println!("# {} a={} c={} limit={:.16e}", scan.limit.name(), scan.a, scan.c, scan.limit_value);
            println!("x,value,deviation,budget,inconclusive");
            for p in &scan.points {
                println!("{:.16e},{:.16e},{:.16e},{:.16e},{}", p.x, p.value, p.deviation, p.budget, p.inconclusive);
            }
            let contraction = scan.last_contraction().map(|r| format!("{r:.6e}")).unwrap_or_else(|| "none".into());
            let extrapolated = scan.extrapolated().map(|r| format!("{r:.16e}")).unwrap_or_else(|| "none".into());
            println!(
                "# eventually_decreasing={} last_contraction={contraction} extrapolated={extrapolated}",
                scan.eventually_decreasing()
            );
            ExitCode::SUCCESS
        }
        Err(e @ (Error::Region { .. } | Error::Domain(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(4)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Catalog => cmd_catalog(),
        Command::Sharpness(a) => cmd_sharpness(a),
    }
}
