//! Command-line front end: instance generation, evaluation, MILP emission,
//! solving and the two-phase alpha-sweep pipeline.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wifiplan::aploc::{solve_exact, solve_local_search, PsapBudget, DEFAULT_SCENARIO_CAP};
use wifiplan::efficiency::{eval_design, eval_pcs};
use wifiplan::freqassign::{solve_exact_fa, FaBudget};
use wifiplan::instance::{self, GeneratorConfig, InstanceError, Propagation};
use wifiplan::milp::{
    build_psap_enum, build_psap_lin, build_wfap_enum, build_wfap_h, build_wfap_h2, emit_lp,
    LinVariant, MilpError, DEFAULT_ROW_BUDGET,
};
use wifiplan::pipeline::{run_pipeline, write_artifacts, write_csv, PipelineConfig, SolverChoice};
use wifiplan::{Alpha, Cover, Instance, Topology};

#[derive(Parser)]
#[command(
    name = "wifiplan",
    about = "Wi-Fi planning: AP location and frequency assignment maximizing access efficiency"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random 2D instance and write it as JSON.
    Generate(GenerateArgs),
    /// Evaluate a design solution on an instance.
    Evaluate(EvaluateArgs),
    /// Build a formulation and emit it as an LP file.
    Emit(EmitArgs),
    /// Solve AP location (with --alpha) or frequency assignment (with --sites).
    Solve(SolveArgs),
    /// Run the two-phase alpha sweep and write CSV + JSON artifacts.
    Pipeline(PipelineArgs),
}

#[derive(Args, Clone)]
struct GenArgs {
    /// Number of test points.
    #[arg(long)]
    tps: usize,
    /// Number of candidate sites.
    #[arg(long)]
    css: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Side length of the square area.
    #[arg(long, default_value_t = 30.0)]
    area: f64,
    /// Use isotropic propagation with this coverage radius.
    #[arg(long)]
    isotropic: Option<f64>,
    /// Anisotropic propagation: minimum sector radius.
    #[arg(long, default_value_t = 2.0)]
    radius_min: f64,
    /// Anisotropic propagation: maximum sector radius.
    #[arg(long, default_value_t = 6.0)]
    radius_max: f64,
    /// Anisotropic propagation: number of angular sectors.
    #[arg(long, default_value_t = 16)]
    sectors: usize,
    /// Number of frequencies stored in the instance.
    #[arg(long, default_value_t = 3)]
    num_freqs: usize,
}

impl GenArgs {
    fn config(&self) -> GeneratorConfig {
        let propagation = match self.isotropic {
            Some(radius) => Propagation::Isotropic { radius },
            None => Propagation::Anisotropic {
                num_sectors: self.sectors,
                radius_min: self.radius_min,
                radius_max: self.radius_max,
            },
        };
        GeneratorConfig {
            num_tps: self.tps,
            num_css: self.css,
            area_side: self.area,
            propagation,
            rate_thresholds: instance::DEFAULT_RATE_THRESHOLDS.to_vec(),
            num_frequencies: self.num_freqs,
            rng_seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenArgs,
    /// Output path for the instance JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Installed sites, e.g. "0,3,5".
    #[arg(long)]
    sites: String,
    /// Frequency map, e.g. "0:0,3:1,5:0"; prints e(S,f).
    #[arg(long)]
    freq_map: Option<String>,
    /// Separation parameter; prints the partial-separation efficiency.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulationArg {
    #[value(name = "lin-a")]
    LinA,
    #[value(name = "lin-b")]
    LinB,
    #[value(name = "psap-l")]
    PsapL,
    #[value(name = "wfap-h")]
    WfapH,
    #[value(name = "wfap-h2")]
    WfapH2,
    #[value(name = "wfap-l")]
    WfapL,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    formulation: FormulationArg,
    /// Output path; defaults to `<instance>_<formulation>_<alpha|F>.lp`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Separation parameter (AP location formulations).
    #[arg(long)]
    alpha: Option<f64>,
    /// Installed sites (frequency assignment formulations).
    #[arg(long)]
    sites: Option<String>,
    /// Number of frequencies (frequency assignment formulations).
    #[arg(long)]
    freqs: Option<usize>,
    /// Per-TP scenario/subset enumeration cap.
    #[arg(long, default_value_t = DEFAULT_SCENARIO_CAP)]
    cap: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Exact,
    Local,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Solve AP location for this separation parameter.
    #[arg(long)]
    alpha: Option<f64>,
    /// Solve frequency assignment for this fixed cover.
    #[arg(long)]
    sites: Option<String>,
    /// Number of frequencies for frequency assignment.
    #[arg(long, default_value_t = 3)]
    freqs: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Exact)]
    solver: SolverArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// Maximum sites for the exact AP location search.
    #[arg(long, default_value_t = 20)]
    budget_sites: usize,
}

#[derive(Args)]
struct PipelineArgs {
    /// Existing instance to load; otherwise one is generated.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    tps: usize,
    #[arg(long, default_value_t = 15)]
    css: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30.0)]
    area: f64,
    #[arg(long)]
    isotropic: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    radius_min: f64,
    #[arg(long, default_value_t = 6.0)]
    radius_max: f64,
    #[arg(long, default_value_t = 16)]
    sectors: usize,
    /// Alpha grid, e.g. "0,0.2,0.4,0.6,0.8,1".
    #[arg(long, default_value = "0,0.2,0.4,0.6,0.8,1")]
    alphas: String,
    /// Frequency counts to assign, e.g. "2,3".
    #[arg(long, default_value = "2,3")]
    freqs: String,
    /// Output directory for report.csv and run artifacts.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    budget_sites: usize,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    solver: SolverArg,
    #[arg(long, default_value_t = 200)]
    iters: usize,
}

#[derive(Debug)]
enum CliError {
    /// Infeasible or oversized input; exit code 1.
    Domain(String),
    /// I/O or parse failure; exit code 2.
    Io(String),
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Io(_) | InstanceError::Parse(_) => CliError::Io(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<MilpError> for CliError {
    fn from(e: MilpError) -> Self {
        match e {
            MilpError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::Domain(msg.into())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| domain(format!("cannot parse {what} entry {s:?}")))
        })
        .collect()
}

fn parse_freq_map(text: &str) -> Result<wifiplan::topology::FrequencyMap, CliError> {
    let mut map = wifiplan::topology::FrequencyMap::new();
    for part in text.split(',').filter(|s| !s.is_empty()) {
        let (site, freq) = part
            .split_once(':')
            .ok_or_else(|| domain(format!("freq-map entry {part:?} is not site:freq")))?;
        map.insert(
            site.trim()
                .parse()
                .map_err(|_| domain(format!("bad site in {part:?}")))?,
            freq.trim()
                .parse()
                .map_err(|_| domain(format!("bad frequency in {part:?}")))?,
        );
    }
    Ok(map)
}

fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Ok(instance::load(path)?)
}

fn alpha_of(value: f64) -> Result<Alpha, CliError> {
    Alpha::new(value).map_err(|e| domain(e.to_string()))
}

fn cover_of(topo: &Topology, sites: &str) -> Result<Cover, CliError> {
    let ids: Vec<usize> = parse_list(sites, "site")?;
    for &j in &ids {
        if j >= topo.num_css() {
            return Err(domain(format!("site {j} does not exist")));
        }
    }
    Cover::new(topo, ids).map_err(|e| domain(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Generate(args) => {
            let inst = instance::generate(&args.gen.config())?;
            instance::save(&inst, &args.out)?;
            println!("wrote {}", args.out.display());
        }
        Cmd::Evaluate(args) => {
            let inst = load_instance(&args.instance)?;
            let topo = Topology::build(&inst);
            let cover = cover_of(&topo, &args.sites)?;
            match (&args.freq_map, args.alpha) {
                (Some(map_text), None) => {
                    let freq = parse_freq_map(map_text)?;
                    for &j in cover.sites() {
                        if !freq.contains_key(&j) {
                            return Err(domain(format!("freq-map misses site {j}")));
                        }
                    }
                    let value = eval_design(&topo, &cover, &freq).map_err(|e| domain(e.to_string()))?;
                    println!("{}", value.total);
                }
                (None, Some(a)) => {
                    let value =
                        eval_pcs(&topo, &cover, alpha_of(a)?).map_err(|e| domain(e.to_string()))?;
                    println!("{}", value.total);
                }
                _ => return Err(domain("provide exactly one of --freq-map or --alpha")),
            }
        }
        Cmd::Emit(args) => {
            let inst = load_instance(&args.instance)?;
            let topo = Topology::build(&inst);
            let need_alpha = || {
                args.alpha
                    .ok_or_else(|| domain("this formulation needs --alpha"))
                    .and_then(alpha_of)
            };
            let need_cover = || {
                args.sites
                    .as_deref()
                    .ok_or_else(|| domain("this formulation needs --sites"))
                    .and_then(|s| cover_of(&topo, s))
            };
            let need_freqs = || args.freqs.ok_or_else(|| domain("this formulation needs --freqs"));
            let need_23 = || {
                need_freqs().and_then(|f| {
                    if f == 2 || f == 3 {
                        Ok(f)
                    } else {
                        Err(domain("the partition formulations support --freqs 2 or 3"))
                    }
                })
            };
            let form_name = |a: &FormulationArg| match a {
                FormulationArg::LinA => "lin-a",
                FormulationArg::LinB => "lin-b",
                FormulationArg::PsapL => "psap-l",
                FormulationArg::WfapH => "wfap-h",
                FormulationArg::WfapH2 => "wfap-h2",
                FormulationArg::WfapL => "wfap-l",
            };
            let model = match args.formulation {
                FormulationArg::LinA => build_psap_lin(&topo, need_alpha()?, LinVariant::LinA),
                FormulationArg::LinB => build_psap_lin(&topo, need_alpha()?, LinVariant::LinB),
                FormulationArg::PsapL => build_psap_enum(&topo, need_alpha()?, args.cap)?,
                FormulationArg::WfapH => build_wfap_h(&topo, &need_cover()?, need_freqs()?)?,
                FormulationArg::WfapH2 => {
                    build_wfap_h2(&topo, &need_cover()?, need_23()?, DEFAULT_ROW_BUDGET)?
                }
                FormulationArg::WfapL => {
                    build_wfap_enum(&topo, &need_cover()?, need_23()?, args.cap)?
                }
            };
            let out = match &args.out {
                Some(path) => path.clone(),
                None => {
                    let stem = args
                        .instance
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "instance".into());
                    let param = match args.formulation {
                        FormulationArg::LinA | FormulationArg::LinB | FormulationArg::PsapL => {
                            format!("{}", args.alpha.unwrap_or_default())
                        }
                        _ => format!("{}", args.freqs.unwrap_or_default()),
                    };
                    PathBuf::from(format!("{stem}_{}_{param}.lp", form_name(&args.formulation)))
                }
            };
            emit_lp(&model, &out)?;
            println!("wrote {}", out.display());
        }
        Cmd::Solve(args) => {
            let inst = load_instance(&args.instance)?;
            let topo = Topology::build(&inst);
            match (&args.sites, args.alpha) {
                (Some(sites), None) => {
                    let cover = cover_of(&topo, sites)?;
                    let res = solve_exact_fa(&topo, &cover, args.freqs, &FaBudget::default())
                        .map_err(|e| domain(e.to_string()))?;
                    let map = res
                        .assignment
                        .iter()
                        .map(|(j, f)| format!("{j}:{f}"))
                        .collect::<Vec<_>>()
                        .join(",");
                    println!("assignment {map}");
                    println!("objective {}", res.value.total);
                    println!("status {}", res.proof_status);
                }
                (None, Some(a)) => {
                    let alpha = alpha_of(a)?;
                    let res = match args.solver {
                        SolverArg::Local => {
                            solve_local_search(&topo, alpha, args.seed, args.iters)
                        }
                        _ => solve_exact(
                            &topo,
                            alpha,
                            &PsapBudget {
                                max_sites_exact: args.budget_sites,
                                max_nodes: None,
                            },
                        ),
                    };
                    let sites = res
                        .cover
                        .sites()
                        .iter()
                        .map(|j| j.to_string())
                        .collect::<Vec<_>>()
                        .join(",");
                    println!("cover {sites}");
                    println!("objective {}", res.objective);
                    println!("status {}", res.proof_status);
                }
                _ => return Err(domain("provide exactly one of --alpha or --sites")),
            }
        }
        Cmd::Pipeline(args) => {
            let (inst, generated) = match &args.instance {
                Some(path) => (load_instance(path)?, false),
                None => {
                    let gen = GenArgs {
                        tps: args.tps,
                        css: args.css,
                        seed: args.seed,
                        area: args.area,
                        isotropic: args.isotropic,
                        radius_min: args.radius_min,
                        radius_max: args.radius_max,
                        sectors: args.sectors,
                        num_freqs: 3,
                    };
                    (instance::generate(&gen.config())?, true)
                }
            };
            let alphas: Vec<f64> = parse_list(&args.alphas, "alpha")?;
            for &a in &alphas {
                alpha_of(a)?;
            }
            let freqs: Vec<usize> = parse_list(&args.freqs, "frequency count")?;
            if freqs.contains(&0) {
                return Err(domain("frequency counts must be at least 1"));
            }
            let topo = Topology::build(&inst);
            let cfg = PipelineConfig {
                alphas,
                freqs,
                budget_sites: args.budget_sites,
                solver: match args.solver {
                    SolverArg::Auto => SolverChoice::Auto,
                    SolverArg::Exact => SolverChoice::Exact,
                    SolverArg::Local => SolverChoice::Local,
                },
                seed: args.seed,
                local_iters: args.iters,
            };
            std::fs::create_dir_all(&args.out).map_err(|e| CliError::Io(e.to_string()))?;
            if generated {
                instance::save(&inst, &args.out.join("instance.json"))?;
            }
            let (report, artifacts) = run_pipeline(&topo, &cfg);
            write_csv(&report, &cfg.freqs, &args.out.join("report.csv"))
                .map_err(|e| CliError::Io(e.to_string()))?;
            write_artifacts(&artifacts, &args.out).map_err(|e| CliError::Io(e.to_string()))?;
            println!("wrote {}", args.out.join("report.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
