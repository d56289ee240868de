mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use empeq::ccost::{calibrate_game, cc_equilibrium_check, ControlCostGame, ControlCostSpline};
use empeq::corpus;
use empeq::empirical::{empirical_membership, enumerate_empirical, Decision, DEFAULT_DELTA_SCHEDULE};
use empeq::format::{format_number, game_from_json, game_to_json, profile_from_json, round_sig};
use empeq::monotone::{
    is_m_weakly_payoff_monotone, is_payoff_monotone, is_weakly_payoff_monotone, region_csv, region_fraction,
    sample_monotone_region, RegionKind, DEFAULT_TOL,
};
use empeq::nash::enumerate_nash;
use empeq::qre::{default_lambda_schedule, qrf_regularity_audit, trace_logit_path, Qrf};
use empeq::refine::{classify, filter_undominated, Status, DEFAULT_EPSILON_SCHEDULE};
use empeq::{Error, Game, MixedProfile};
use serde_json::{json, Map, Value};

use report::{num, render};

/// Normal-form game analysis: Nash refinements, payoff monotonicity,
/// logit paths, control-cost splines and empirical equilibrium.
#[derive(Parser)]
#[command(name = "empeq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GameSource {
    /// Game file, or the name of a bundled game.
    #[arg(long)]
    game: Option<String>,
    /// Bundled game name.
    #[arg(long)]
    corpus: Option<String>,
}

#[derive(Args)]
struct GameArgs {
    #[command(flatten)]
    source: GameSource,
    /// Parameter c1 of gamma2c.
    #[arg(long, default_value_t = 2.0)]
    c1: f64,
    /// Parameter c2 of gamma2c.
    #[arg(long, default_value_t = 2.0)]
    c2: f64,
}

#[derive(Args)]
struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Report wall-clock time on stderr.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Weak,
    Strict,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate Nash equilibria with undominated, perfect and proper flags.
    Nash {
        #[command(flatten)]
        game: GameArgs,
        /// Comma-separated epsilon schedule for the perfect and proper checks.
        #[arg(long, value_delimiter = ',')]
        epsilon_schedule: Option<Vec<f64>>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monotonicity verdicts for one profile.
    Wpm {
        #[command(flatten)]
        game: GameArgs,
        /// Profile file, or inline JSON.
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also check m-weak payoff monotonicity.
        #[arg(long)]
        m: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample the monotone region of a game with two actions per player.
    Region {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = Kind::Weak)]
        kind: Kind,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Trace the logit equilibrium path from the centroid.
    Trace {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 1e3)]
        lambda_max: f64,
        /// Starting profile for the solve at lambda 0 (file or inline JSON).
        #[arg(long)]
        start: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Empirical equilibrium membership of one profile or of every equilibrium.
    Empirical {
        #[command(flatten)]
        game: GameArgs,
        /// Candidate profile (file or inline JSON); omit to classify all equilibria.
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, value_delimiter = ',')]
        delta_schedule: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Control-cost splines.
    Ccost {
        #[command(subcommand)]
        command: CcostCommand,
    },
    /// Bundled games.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Subcommand)]
enum CcostCommand {
    /// Calibrate one spline per player so that the profile is an equilibrium.
    Build {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Start of the hyperbolic tail; defaults to half the smallest probability.
        #[arg(long)]
        y0: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the first-order conditions of a control-cost equilibrium.
    Check {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        splines: PathBuf,
        #[arg(long)]
        profile: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tabulate spline values and derivatives.
    Show {
        #[arg(long)]
        splines: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample the regularity axioms of the induced quantal response functions.
    Audit {
        #[arg(long)]
        splines: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// List bundled games.
    List,
    /// Print a bundled game file.
    Emit {
        name: String,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        #[arg(long, default_value_t = 2.0)]
        c2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit codes.
const OK: u8 = 0;
const INCONCLUSIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } | Error::RootFinder { .. } => INCONCLUSIVE,
            _ => INPUT_ERROR,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: INPUT_ERROR,
        message: message.into(),
    }
}

/// Text to emit and whether the analysis was inconclusive.
struct Output {
    text: String,
    inconclusive: bool,
}

impl Output {
    fn done(text: String) -> Self {
        Output {
            text,
            inconclusive: false,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}

fn load_game(args: &GameArgs) -> Result<(String, Game), Failure> {
    let c = (args.c1, args.c2);
    match (&args.source.game, &args.source.corpus) {
        (Some(g), None) => {
            let path = Path::new(g);
            if path.exists() {
                let text = read(path)?;
                let game = game_from_json(&text).map_err(|e| input_error(format!("{}: {}", g, e)))?;
                Ok((g.clone(), game))
            } else if corpus::NAMES.contains(&g.as_str()) {
                Ok((g.clone(), corpus::by_name(g, c)?))
            } else {
                Err(input_error(format!("{}: no such file or bundled game", g)))
            }
        }
        (None, Some(name)) => Ok((name.clone(), corpus::by_name(name, c)?)),
        _ => Err(input_error("one of --game or --corpus is required")),
    }
}

/// Profile from a file path or inline JSON text.
fn load_profile(g: &Game, arg: &str) -> Result<MixedProfile, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    profile_from_json(g, &text).map_err(|e| input_error(format!("profile: {}", e)))
}

fn load_splines(path: &Path) -> Result<Vec<(String, ControlCostSpline)>, Failure> {
    let text = read(path)?;
    let root: Value = serde_json::from_str(&text)
        .map_err(|e| input_error(format!("{}: line {} column {}: {}", path.display(), e.line(), e.column(), e)))?;
    let obj = root
        .as_object()
        .ok_or_else(|| input_error(format!("{}: expected an object keyed by player", path.display())))?;
    obj.iter()
        .map(|(player, v)| {
            ControlCostSpline::from_json(&v.to_string())
                .map(|s| (player.clone(), s))
                .map_err(|e| input_error(format!("{}: {}: {}", path.display(), player, e)))
        })
        .collect()
}

fn format_of(out: &OutArgs, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(input_error("this subcommand does not support the requested --format"))
    }
}

fn run_nash(game: &GameArgs, schedule: Option<Vec<f64>>, out: &OutArgs) -> Result<Output, Failure> {
    format_of(out, Format::Json, &[Format::Json])?;
    let (name, g) = load_game(game)?;
    let schedule = schedule.unwrap_or_else(|| DEFAULT_EPSILON_SCHEDULE.to_vec());
    let e = enumerate_nash(&g)?;
    let und = filter_undominated(&g, &e);
    let mut inconclusive = false;
    let mut tag = |p: &MixedProfile| -> Result<Value, Failure> {
        let t = classify(&g, p, &schedule)?;
        inconclusive |= t.perfect.status == Status::Inconclusive || t.proper.status == Status::Inconclusive;
        Ok(json!({
            "profile": report::profile(&g, p),
            "undominated": t.undominated,
            "perfect": report::refinement(&g, &t.perfect),
            "proper": report::refinement(&g, &t.proper),
        }))
    };
    let isolated = e.isolated.iter().map(&mut tag).collect::<Result<Vec<_>, _>>()?;
    let mut components = Vec::new();
    for (c, face) in e.components.iter().zip(&und.components) {
        let extreme = c.extreme_points().iter().map(&mut tag).collect::<Result<Vec<_>, _>>()?;
        components.push(json!({
            "vertices": report::component(&g, c),
            "undominated_face": face.as_ref().map(|f| report::component(&g, f)),
            "extreme_points": extreme,
        }));
    }
    let v = json!({
        "game": name,
        "epsilon_schedule": schedule.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "equilibria": isolated,
        "components": components,
        "diagnostics": e.diagnostics,
    });
    Ok(Output {
        text: render(&v),
        inconclusive,
    })
}

fn run_wpm(game: &GameArgs, profile: &str, tol: f64, m: Option<f64>, out: &OutArgs) -> Result<Output, Failure> {
    format_of(out, Format::Json, &[Format::Json])?;
    let (name, g) = load_game(game)?;
    let p = load_profile(&g, profile)?;
    let mut v = Map::new();
    v.insert("game".into(), name.into());
    v.insert("profile".into(), report::profile(&g, &p));
    v.insert("interior".into(), p.is_interior().into());
    v.insert(
        "weakly_payoff_monotone".into(),
        report::monotonicity(&g, &is_weakly_payoff_monotone(&g, &p, tol)?),
    );
    v.insert(
        "payoff_monotone".into(),
        report::monotonicity(&g, &is_payoff_monotone(&g, &p, tol)?),
    );
    if let Some(m) = m {
        v.insert("m".into(), num(m));
        v.insert(
            "m_weakly_payoff_monotone".into(),
            report::monotonicity(&g, &is_m_weakly_payoff_monotone(&g, &p, m, tol)?),
        );
    }
    Ok(Output::done(render(&Value::Object(v))))
}

fn run_region(game: &GameArgs, resolution: usize, kind: Kind, out: &OutArgs) -> Result<Output, Failure> {
    let format = format_of(out, Format::Csv, &[Format::Csv, Format::Json])?;
    let (name, g) = load_game(game)?;
    let kind = match kind {
        Kind::Weak => RegionKind::Weak,
        Kind::Strict => RegionKind::Strict,
    };
    let points = sample_monotone_region(&g, resolution, kind)?;
    let text = match format {
        Format::Csv => region_csv(&points),
        Format::Json => render(&json!({
            "game": name,
            "kind": if kind == RegionKind::Weak { "weak" } else { "strict" },
            "resolution": resolution,
            "points": points.len(),
            "satisfied": points.iter().filter(|p| p.satisfied).count(),
            "area": num(region_fraction(&points)),
        })),
    };
    Ok(Output::done(text))
}

fn run_trace(game: &GameArgs, lambda_max: f64, start: Option<&str>, out: &OutArgs) -> Result<Output, Failure> {
    let format = format_of(out, Format::Csv, &[Format::Csv, Format::Json])?;
    let (name, g) = load_game(game)?;
    if !(lambda_max > 1e-2 && lambda_max.is_finite()) {
        return Err(input_error("--lambda-max must be a finite number above 0.01"));
    }
    let start = match start {
        Some(s) => load_profile(&g, s)?,
        None => MixedProfile::uniform(&g.action_counts()),
    };
    let path = trace_logit_path(&g, &default_lambda_schedule(lambda_max), &start)?;
    let text = match format {
        Format::Csv => path.to_csv(&g),
        Format::Json => render(&json!({
            "game": name,
            "points": path.points.iter().map(|p| json!({
                "lambda": p.lambda.map(num),
                "profile": report::profile(&g, &p.profile),
                "residual": num(p.residual),
            })).collect::<Vec<_>>(),
            "nearest_nash": path.nearest_nash.as_ref().map(|(p, d)| json!({
                "profile": report::profile(&g, p),
                "distance": num(*d),
            })),
            "diagnostics": path.diagnostics,
        })),
    };
    Ok(Output::done(text))
}

fn run_empirical(
    game: &GameArgs,
    profile: Option<&str>,
    schedule: Option<Vec<f64>>,
    m: f64,
    out: &OutArgs,
) -> Result<Output, Failure> {
    format_of(out, Format::Json, &[Format::Json])?;
    let (name, g) = load_game(game)?;
    let schedule = schedule.unwrap_or_else(|| DEFAULT_DELTA_SCHEDULE.to_vec());
    let mut v = Map::new();
    v.insert("game".into(), name.into());
    v.insert("m".into(), num(m));
    v.insert("delta_schedule".into(), schedule.iter().map(|&x| num(x)).collect());
    let inconclusive;
    match profile {
        Some(s) => {
            let p = load_profile(&g, s)?;
            let verdict = empirical_membership(&g, &p, &schedule, m)?;
            inconclusive = verdict.decision == Decision::Inconclusive;
            v.insert("profile".into(), report::profile(&g, &p));
            v.insert("verdict".into(), report::membership(&g, &verdict));
        }
        None => {
            let r = enumerate_empirical(&g, &schedule, m)?;
            inconclusive = r
                .isolated
                .iter()
                .chain(r.components.iter().flat_map(|c| c.grid.iter().map(|p| &p.verdict)))
                .any(|x| x.decision == Decision::Inconclusive);
            v.insert(
                "equilibria".into(),
                r.nash
                    .isolated
                    .iter()
                    .zip(&r.isolated)
                    .map(|(p, x)| json!({"profile": report::profile(&g, p), "verdict": report::membership(&g, x)}))
                    .collect(),
            );
            v.insert(
                "components".into(),
                r.components.iter().map(|c| report::component_membership(&g, c)).collect(),
            );
        }
    }
    Ok(Output {
        text: render(&Value::Object(v)),
        inconclusive,
    })
}

fn spline_summary(s: &ControlCostSpline) -> Value {
    json!({
        "epsilon": num(s.epsilon()),
        "y0": num(s.y0()),
        "breakpoints": s.breakpoints().iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "slopes": s.slopes().iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "values": s.values().iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "tail_coefficient": num(s.tail_coefficient()),
        "sup_norm": num(s.sup_norm()),
    })
}

fn run_ccost(cmd: &CcostCommand) -> Result<Output, Failure> {
    match cmd {
        CcostCommand::Build {
            game,
            profile,
            epsilon,
            y0,
            out,
        } => {
            format_of(out, Format::Json, &[Format::Json])?;
            let (_, g) = load_game(game)?;
            let p = load_profile(&g, profile)?;
            let y0 = y0.unwrap_or_else(|| p.flat().into_iter().fold(1.0, f64::min) / 2.0);
            let ccg = calibrate_game(&g, &p, *epsilon, y0)?;
            // Splines are written at full precision so that `check` reproduces
            // the calibration exactly.
            let mut v = Map::new();
            for (name, s) in g.players().iter().zip(ccg.splines()) {
                let value = serde_json::to_value(s).map_err(|e| input_error(e.to_string()))?;
                v.insert(name.clone(), value);
            }
            Ok(Output::done(render(&Value::Object(v))))
        }
        CcostCommand::Check {
            game,
            splines,
            profile,
            out,
        } => {
            format_of(out, Format::Json, &[Format::Json])?;
            let (name, g) = load_game(game)?;
            let p = load_profile(&g, profile)?;
            let mut named = load_splines(splines)?;
            let mut ordered = Vec::new();
            for player in g.players() {
                let k = named
                    .iter()
                    .position(|(n, _)| n == player)
                    .ok_or_else(|| input_error(format!("{}: no spline for player {}", splines.display(), player)))?;
                ordered.push(named.swap_remove(k).1);
            }
            if let Some((extra, _)) = named.first() {
                return Err(input_error(format!("{}: {} is not a player", splines.display(), extra)));
            }
            let ccg = ControlCostGame::new(g.clone(), ordered)?;
            let c = cc_equilibrium_check(&ccg, &p)?;
            let per_player: Map<String, Value> =
                g.players().iter().cloned().zip(c.per_player.iter().map(|&x| num(x))).collect();
            Ok(Output::done(render(&json!({
                "game": name,
                "equilibrium": c.equilibrium,
                "max_defect": num(c.max_defect),
                "per_player": per_player,
            }))))
        }
        CcostCommand::Show { splines, points, out } => {
            let format = format_of(out, Format::Csv, &[Format::Csv, Format::Json])?;
            if *points == 0 {
                return Err(input_error("--points must be positive"));
            }
            let named = load_splines(splines)?;
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("player,y,value,derivative\n");
                    for (player, sp) in &named {
                        for k in 1..=*points {
                            let y = k as f64 / *points as f64;
                            s.push_str(&format!(
                                "{},{},{},{}\n",
                                player,
                                format_number(y),
                                round_csv(sp.value(y)),
                                round_csv(sp.derivative(y))
                            ));
                        }
                    }
                    s
                }
                Format::Json => {
                    let v: Map<String, Value> = named.iter().map(|(n, s)| (n.clone(), spline_summary(s))).collect();
                    render(&Value::Object(v))
                }
            };
            Ok(Output::done(text))
        }
        CcostCommand::Audit {
            splines,
            samples,
            seed,
            out,
        } => {
            format_of(out, Format::Json, &[Format::Json])?;
            let named = load_splines(splines)?;
            let mut v = Map::new();
            let mut clean = true;
            for (player, s) in named {
                let r = qrf_regularity_audit(&Qrf::ControlCost(Box::new(s)), *samples, *seed);
                clean &= r.is_clean();
                v.insert(
                    player,
                    json!({
                        "samples": r.samples,
                        "clean": r.is_clean(),
                        "counterexamples": r.counterexamples.iter().map(|c| json!({
                            "axiom": c.axiom.as_str(),
                            "input": c.input.iter().map(|&x| num(x)).collect::<Vec<_>>(),
                            "detail": c.detail,
                        })).collect::<Vec<_>>(),
                    }),
                );
            }
            Ok(Output {
                text: render(&Value::Object(v)),
                inconclusive: !clean,
            })
        }
    }
}

fn round_csv(x: f64) -> String {
    format_number(round_sig(x, 17))
}

fn run_corpus(cmd: &CorpusCommand) -> Result<(Output, Option<PathBuf>), Failure> {
    match cmd {
        CorpusCommand::List => {
            let mut s = String::new();
            for name in corpus::NAMES {
                s.push_str(&format!("{}\t{}\n", name, corpus::describe(name).unwrap_or("")));
            }
            Ok((Output::done(s), None))
        }
        CorpusCommand::Emit { name, c1, c2, out } => {
            let g = corpus::by_name(name, (*c1, *c2))?;
            Ok((Output::done(game_to_json(&g)), out.clone()))
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Output, Option<PathBuf>, bool), Failure> {
    let (result, out) = match &cli.command {
        Command::Nash {
            game,
            epsilon_schedule,
            out,
        } => (run_nash(game, epsilon_schedule.clone(), out), out),
        Command::Wpm {
            game,
            profile,
            tol,
            m,
            out,
        } => (run_wpm(game, profile, *tol, *m, out), out),
        Command::Region {
            game,
            resolution,
            kind,
            out,
        } => (run_region(game, *resolution, *kind, out), out),
        Command::Trace {
            game,
            lambda_max,
            start,
            out,
        } => (run_trace(game, *lambda_max, start.as_deref(), out), out),
        Command::Empirical {
            game,
            profile,
            delta_schedule,
            m,
            out,
        } => (run_empirical(game, profile.as_deref(), delta_schedule.clone(), *m, out), out),
        Command::Ccost { command } => {
            let out = match command {
                CcostCommand::Build { out, .. }
                | CcostCommand::Check { out, .. }
                | CcostCommand::Show { out, .. }
                | CcostCommand::Audit { out, .. } => out,
            };
            (run_ccost(command), out)
        }
        Command::Corpus { command } => {
            let (o, path) = run_corpus(command)?;
            return Ok((o, path, false));
        }
    };
    Ok((result?, out.out.clone(), out.timings))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match dispatch(&cli) {
        Ok((output, path, timings)) => {
            match path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, &output.text) {
                        eprintln!("error: {}: {}", p.display(), e);
                        return ExitCode::from(INPUT_ERROR);
                    }
                }
                None => print!("{}", output.text),
            }
            if timings {
                eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
            }
            if output.inconclusive {
                eprintln!("analysis inconclusive");
                ExitCode::from(INCONCLUSIVE)
            } else {
                ExitCode::from(OK)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
