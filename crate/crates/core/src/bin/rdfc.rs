use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use rdfc::discrete::{self, BscMixtureParams, JointPmf, MaxtraceMode};
use rdfc::fbl::{self, DiscreteSource, FblConfig, GaussianSource, InfoSource};
use rdfc::gaussian::{self, GaussianLdpConfig, ParamRanges, PdfForm};
use rdfc::quadrature::QuadratureSpec;
use rdfc::report::{CsvTable, Field, RunManifest};
use rdfc::synth::{self, CoordinationScheme, SynthesisConfig};
use rdfc::tables::{self, TableReport};
use rdfc::Error;

#[derive(Parser)]
#[command(name = "rdfc", version, about = "Coordination and privacy calculators for randomized distributed function computation")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the artifact here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Units of rate inputs and information-valued outputs.
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    units: Units,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Units {
    Bits,
    Nats,
}

impl Units {
    fn to_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v * std::f64::consts::LN_2,
        }
    }

    fn from_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / std::f64::consts::LN_2,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// WCI lower bound and I(X;Y) for one clipped-Gaussian configuration.
    Gaussian(GaussianArgs),
    /// Recompute the Gaussian reference table.
    Table1(TableArgs),
    /// Recompute the random-response reference table.
    Table2(TableArgs),
    /// Witsenhausen bound, entropies and LDP audit for a random-response joint.
    Rr(RrArgs),
    /// Random search over (sigma_x, epsilon, delta).
    Sweep(SweepArgs),
    /// Finite-blocklength delta_n over a list of blocklengths.
    Fbl(FblArgs),
    /// Exact channel-synthesis experiment.
    Synth(SynthArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum PdfChoice {
    Exact,
    Literal,
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, allow_hyphen_values = true)]
    sigma_x: f64,
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    clip: f64,
    #[arg(long, value_enum, default_value_t = PdfChoice::Exact)]
    pdf_form: PdfChoice,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb: f64,
}

#[derive(Copy, Clone, ValueEnum)]
enum MaxtraceChoice {
    Auto,
    Exhaustive,
    Assignment,
}

#[derive(Args)]
struct RrArgs {
    /// Mixture parameters p1,p2,p3,p4,c,d.
    #[arg(long, value_delimiter = ',', conflicts_with = "joint")]
    bsc: Option<Vec<f64>>,
    /// JSON file holding {"k": .., "q": [..]}.
    #[arg(long)]
    joint: Option<PathBuf>,
    /// Also report the smallest delta making P(Y|X) (epsilon, delta)-LDP.
    #[arg(long)]
    audit_eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = MaxtraceChoice::Auto)]
    maxtrace: MaxtraceChoice,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.7])]
    sigma_x_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0])]
    eps_range: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.001, 0.01])]
    delta_range: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    clip: f64,
    /// Keep only rows where the WCI bound exceeds I(X;Y).
    #[arg(long)]
    flagged_only: bool,
}

#[derive(Args)]
struct FblArgs {
    /// Uniform independent k x k joint.
    #[arg(long, conflicts_with_all = ["joint", "bsc", "gaussian"])]
    independent: Option<usize>,
    /// JSON file holding {"k": .., "q": [..]}.
    #[arg(long, conflicts_with_all = ["bsc", "gaussian"])]
    joint: Option<PathBuf>,
    /// Mixture parameters p1,p2,p3,p4,c,d.
    #[arg(long, value_delimiter = ',', conflicts_with = "gaussian")]
    bsc: Option<Vec<f64>>,
    /// Clipped-Gaussian source sigma_x,epsilon,delta (C = 1).
    #[arg(long, value_delimiter = ',')]
    gaussian: Option<Vec<f64>>,
    /// Rate per symbol, in --units.
    #[arg(long)]
    rate: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [10u64, 20, 30, 40, 50, 60, 70, 80, 90, 100])]
    n_list: Vec<u64>,
    /// Target epsilon of the synthesized mechanism.
    #[arg(long, default_value_t = 1.0)]
    epsilon: f64,
    /// Target delta of the synthesized mechanism.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long = "k-const", default_value_t = 1.0)]
    k_const: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// JSON file with p_u, p_x_given_u, p_y_given_u.
    #[arg(long, conflicts_with = "bsc_flip")]
    scheme: Option<PathBuf>,
    /// Binary scheme: U uniform, X and Y each BSC(flip) of U.
    #[arg(long, default_value_t = 0.2)]
    bsc_flip: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 6, 8])]
    n_list: Vec<usize>,
    /// Message rate, in --units.
    #[arg(long)]
    rate: f64,
    /// Common-randomness rate, in --units.
    #[arg(long, default_value_t = 0.0)]
    rate0: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
}

enum Failure {
    Mismatch(String),
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Runtime(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// A command's rendered artifact plus what goes into its manifest.
struct Artifact {
    body: String,
    params: serde_json::Value,
    seeds: Vec<u64>,
}

fn emit(global: &Global, command: &str, art: Artifact) -> CmdResult {
    match &global.out {
        None => {
            print!("{}", art.body);
            Ok(())
        }
        Some(path) => {
            let result = (|| {
                rdfc::report::write_atomic(path, art.body.as_bytes())?;
                let mut m = RunManifest::new(command, std::env::args().skip(1).collect(), art.params, art.seeds);
                m.outputs.push(path.display().to_string());
                m.write(&RunManifest::path_for(path))
            })();
            if result.is_err() {
                let _ = std::fs::remove_file(path);
            }
            Ok(result?)
        }
    }
}

fn json_body<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn expect_len(flag: &str, v: &[f64], n: usize) -> Result<(), Failure> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{flag} takes {n} comma-separated values, got {}", v.len())))
    }
}

fn bsc_joint(p: &[f64]) -> Result<JointPmf, Failure> {
    expect_len("bsc", p, 6)?;
    Ok(discrete::bsc_mixture(&BscMixtureParams::from_array([p[0], p[1], p[2], p[3], p[4], p[5]]))?)
}

fn cmd_gaussian(g: &Global, a: &GaussianArgs) -> CmdResult {
    let cfg = GaussianLdpConfig {
        sigma_x: a.sigma_x,
        clip_c: a.clip,
        epsilon: a.eps,
        delta: a.delta,
    };
    let joint = gaussian::build_joint(&cfg)?;
    let quad = QuadratureSpec::default();
    let form = match a.pdf_form {
        PdfChoice::Exact => PdfForm::ConvolutionExact,
        PdfChoice::Literal => PdfForm::BetaBar,
    };
    let point = gaussian::wci_lower_bound(&joint)?;
    let mi = gaussian::mutual_information_with(&joint, &quad, form)?;
    let (wci, mi_u) = (g.units.from_nats(point.wci_lower), g.units.from_nats(mi));
    let ratio = point.wci_lower / mi;
    let body = match g.format {
        Format::Json => json_body(&json!({
            "sigma_x": cfg.sigma_x, "epsilon": cfg.epsilon, "delta": cfg.delta, "clip_c": cfg.clip_c,
            "sigma_z_sq": joint.sigma_z_sq, "wci_lower": wci, "mutual_info": mi_u, "ratio": ratio,
            "units": g.units,
        })),
        Format::Csv => {
            let mut t = CsvTable::new(&["sigma_x", "epsilon", "delta", "clip_c", "sigma_z_sq", "wci_lower", "mutual_info", "ratio"]);
            t.push(vec![
                cfg.sigma_x.into(),
                cfg.epsilon.into(),
                cfg.delta.into(),
                cfg.clip_c.into(),
                joint.sigma_z_sq.into(),
                wci.into(),
                mi_u.into(),
                ratio.into(),
            ]);
            t.render()
        }
    };
    emit(g, "gaussian", Artifact { body, params: json!(cfg), seeds: vec![] })
}

fn table_body(format: Format, report: &TableReport) -> String {
    match format {
        Format::Json => json_body(report),
        Format::Csv => {
            let mut t = CsvTable::new(&["row", "column", "computed", "reference", "pass"]);
            for r in &report.rows {
                for c in &r.cells {
                    t.push(vec![r.row.into(), c.column.as_str().into(), c.computed.into(), c.reference.into(), c.pass.into()]);
                }
            }
            t.render()
        }
    }
}

fn cmd_table(g: &Global, which: &str, a: &TableArgs) -> CmdResult {
    let report = if which == "table1" {
        tables::check_table1(&QuadratureSpec::default(), a.perturb)?
    } else {
        tables::check_table2(a.perturb)?
    };
    let cells: usize = report.rows.iter().map(|r| r.cells.len()).sum();
    eprintln!("{which}: {}/{cells} cells within tolerance", cells - report.failures());
    emit(
        g,
        which,
        Artifact {
            body: table_body(g.format, &report),
            params: json!({ "perturb": a.perturb }),
            seeds: vec![],
        },
    )?;
    if report.pass() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{which}: {} cell(s) outside tolerance", report.failures())))
    }
}

fn cmd_rr(g: &Global, a: &RrArgs) -> CmdResult {
    let q = match (&a.bsc, &a.joint) {
        (Some(p), _) => bsc_joint(p)?,
        (None, Some(path)) => read_json(path)?,
        (None, None) => return Err(Failure::Usage("rr needs --bsc or --joint".into())),
    };
    let padded = if q.k() < 3 { q.pad_to(3)? } else { q.clone() };
    let mode = match a.maxtrace {
        MaxtraceChoice::Auto => MaxtraceMode::Auto,
        MaxtraceChoice::Exhaustive => MaxtraceMode::Exhaustive,
        MaxtraceChoice::Assignment => MaxtraceMode::Assignment,
    };
    let w = discrete::wci_lower_bound_discrete_with(&padded, mode)?;
    let (hx, hy) = discrete::marginal_entropies(&q);
    let mi = discrete::mutual_information_discrete(&q);
    let audit = a.audit_eps.map(|e| discrete::ldp_audit(&q, e)).transpose()?;
    let u = |v: f64| g.units.from_nats(v);
    let fields: Vec<(&str, f64)> = vec![
        ("h_x", u(hx)),
        ("h_y", u(hy)),
        ("h_joint", u(w.h_joint)),
        ("mutual_info", u(mi)),
        ("maxtr", w.maxtr),
        ("wci_lower", u(w.wci_lower)),
        ("wci_raw", u(w.raw)),
        ("ratio", w.wci_lower / mi),
        ("min_h_over_wci", hx.min(hy) / w.wci_lower),
    ];
    let body = match g.format {
        Format::Json => {
            let mut m: serde_json::Map<String, serde_json::Value> =
                fields.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            m.insert("k".into(), json!(q.k()));
            m.insert("branch".into(), json!(w.branch));
            if let (Some(e), Some(d)) = (a.audit_eps, audit) {
                m.insert("audit_epsilon".into(), json!(e));
                m.insert("audit_delta".into(), json!(d));
            }
            m.insert("units".into(), json!(g.units));
            json_body(&m)
        }
        Format::Csv => {
            let mut header: Vec<&str> = fields.iter().map(|f| f.0).collect();
            let mut row: Vec<Field> = fields.iter().map(|f| f.1.into()).collect();
            if let (Some(e), Some(d)) = (a.audit_eps, audit) {
                header.extend(["audit_epsilon", "audit_delta"]);
                row.extend([e.into(), d.into()]);
            }
            let mut t = CsvTable::new(&header);
            t.push(row);
            t.render()
        }
    };
    emit(g, "rr", Artifact { body, params: json!({ "joint": q }), seeds: vec![] })
}

fn cmd_sweep(g: &Global, a: &SweepArgs) -> CmdResult {
    expect_len("sigma-x-range", &a.sigma_x_range, 2)?;
    expect_len("eps-range", &a.eps_range, 2)?;
    expect_len("delta-range", &a.delta_range, 2)?;
    let ranges = ParamRanges {
        sigma_x: (a.sigma_x_range[0], a.sigma_x_range[1]),
        epsilon: (a.eps_range[0], a.eps_range[1]),
        delta: (a.delta_range[0], a.delta_range[1]),
        clip_c: a.clip,
    };
    let rows: Vec<_> = gaussian::sweep(&ranges, a.count, g.seed, &QuadratureSpec::default())?
        .into_iter()
        .filter(|r| !a.flagged_only || r.flagged)
        .map(|mut r| {
            r.wci_lower = g.units.from_nats(r.wci_lower);
            r.mutual_info = g.units.from_nats(r.mutual_info);
            r
        })
        .collect();
    let body = match g.format {
        Format::Json => json_body(&rows),
        Format::Csv => {
            let mut t = CsvTable::new(&["index", "sigma_x", "epsilon", "delta", "wci_lower", "mutual_info", "ratio", "flagged"]);
            for r in &rows {
                t.push(vec![
                    r.index.into(),
                    r.sigma_x.into(),
                    r.epsilon.into(),
                    r.delta.into(),
                    r.wci_lower.into(),
                    r.mutual_info.into(),
                    r.ratio.into(),
                    r.flagged.into(),
                ]);
            }
            t.render()
        }
    };
    emit(
        g,
        "sweep",
        Artifact {
            body,
            params: json!({ "ranges": ranges, "count": a.count, "flagged_only": a.flagged_only }),
            seeds: vec![g.seed],
        },
    )
}

fn cmd_fbl(g: &Global, a: &FblArgs) -> CmdResult {
    let source = if let Some(path) = &a.joint {
        InfoSource::Discrete(DiscreteSource::new(read_json(path)?))
    } else if let Some(p) = &a.bsc {
        InfoSource::Discrete(DiscreteSource::new(bsc_joint(p)?))
    } else if let Some(p) = &a.gaussian {
        expect_len("gaussian", p, 3)?;
        let joint = gaussian::build_joint(&GaussianLdpConfig::unit_clip(p[0], p[1], p[2]))?;
        InfoSource::Gaussian(GaussianSource::new(joint))
    } else {
        let k = a.independent.unwrap_or(2);
        if k < 2 {
            return Err(Failure::Usage("--independent needs k >= 2".into()));
        }
        let uniform = vec![1.0 / k as f64; k];
        InfoSource::Discrete(DiscreteSource::new(JointPmf::product(&uniform, &uniform)?))
    };
    let cfg = FblConfig {
        rate_r: g.units.to_nats(a.rate),
        n: a.n_list.first().copied().unwrap_or(1),
        epsilon: a.epsilon,
        delta: a.delta,
        a: a.a,
        k_const: a.k_const,
    };
    let rows = fbl::delta_n_curve(&source, &cfg, &a.n_list)?;
    let body = match g.format {
        Format::Json => json_body(&json!({ "config": cfg, "results": rows })),
        Format::Csv => {
            let mut t = CsvTable::new(&["n", "rho_star", "branch", "exponent", "delta_cap_n", "ln_delta_cap_n", "delta_n"]);
            for r in &rows {
                let branch = match r.branch {
                    fbl::RhoBranch::Half => "half",
                    fbl::RhoBranch::Interior => "interior",
                };
                t.push(vec![
                    r.n.into(),
                    r.rho_star.into(),
                    branch.into(),
                    g.units.from_nats(r.exponent).into(),
                    r.delta_cap_n.into(),
                    r.ln_delta_cap_n.into(),
                    r.delta_n.into(),
                ]);
            }
            t.render()
        }
    };
    emit(
        g,
        "fbl",
        Artifact {
            body,
            params: json!({ "config": cfg, "n_list": a.n_list }),
            seeds: vec![],
        },
    )
}

fn cmd_synth(g: &Global, a: &SynthArgs) -> CmdResult {
    let scheme = match &a.scheme {
        Some(path) => read_json(path)?,
        None => CoordinationScheme::binary_symmetric(a.bsc_flip)?,
    };
    let (rate_r, rate_r0) = (g.units.to_nats(a.rate), g.units.to_nats(a.rate0));
    let region = synth::rate_region_check(&scheme, rate_r, rate_r0);
    eprintln!(
        "I(X;U) = {:.6}, I(XY;U) = {:.6} nats; R ok: {}, R+R0 ok: {}",
        region.i_xu, region.i_xyu, region.ok_r, region.ok_sum
    );
    let mut outcomes = Vec::with_capacity(a.n_list.len());
    for &n in &a.n_list {
        let cfg = SynthesisConfig {
            scheme: scheme.clone(),
            n,
            rate_r,
            rate_r0,
            trials: a.trials,
            seed: g.seed,
        };
        outcomes.push(synth::synthesis_experiment(&cfg)?);
    }
    let body = match g.format {
        Format::Json => json_body(&json!({ "region": region, "outcomes": outcomes })),
        Format::Csv => {
            let mut t = CsvTable::new(&["trial", "n", "R", "R0", "tv"]);
            for o in &outcomes {
                for tr in &o.trials {
                    t.push(vec![tr.trial.into(), o.n.into(), a.rate.into(), a.rate0.into(), tr.tv.into()]);
                }
            }
            t.render()
        }
    };
    for o in &outcomes {
        eprintln!("n = {}: M = {}, M0 = {}, median TV = {:.6}", o.n, o.m, o.m0, o.median_tv);
    }
    emit(
        g,
        "synth",
        Artifact {
            body,
            params: json!({ "scheme": scheme, "n_list": a.n_list, "rate_r": rate_r, "rate_r0": rate_r0, "trials": a.trials }),
            seeds: vec![g.seed],
        },
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Gaussian(a) => cmd_gaussian(g, a),
        Command::Table1(a) => cmd_table(g, "table1", a),
        Command::Table2(a) => cmd_table(g, "table2", a),
        Command::Rr(a) => cmd_rr(g, a),
        Command::Sweep(a) => cmd_sweep(g, a),
        Command::Fbl(a) => cmd_fbl(g, a),
        Command::Synth(a) => cmd_synth(g, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("mismatch: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
