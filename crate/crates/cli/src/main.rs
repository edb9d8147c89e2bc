//! `mcr`: solve min-cost reachability games and run the micro-grid
//! scheduling pipeline from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mcr_core::game::is_turn_based;
use mcr_core::io::{
    parse_game, write_metrics_csv, BillReportEntry, CertificateEntry, CertificateFile, GridNeFile,
    IoError, InstanceFile, MetricsFile, PlayEntry, PlayFile, ScheduleFile,
    ValueMapFile, VERSION,
};
use mcr_core::microgrid::{
    bill_schedule, evaluate_profile, generate_from_seed, ne_schedule, optimal_coalition_schedule,
    penalized_check, run_experiment, BillingMode, ExperimentConfig, GenConfig, GridInstance,
};
use mcr_core::nash::{check_ne_outcome, construct_ne_heuristic, HeuristicOutcome};
use mcr_core::transforms::{coalition_game_at, turnify_round_robin};
use mcr_core::zerosum::{solve, Method};
use mcr_core::{ConcurrentGame, PlayerId};

/// Exit codes besides 0 (success) and 1 (bad input).
const NOT_AN_EQUILIBRIUM: u8 = 2;
const INFINITE_VALUE: u8 = 3;

#[derive(Parser)]
#[command(name = "mcr", version, about = "Min-cost reachability games and micro-grid scheduling")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write data here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against every well-formedness rule.
    Validate { game: PathBuf },
    /// Value of a player's coalition game.
    SolveZerosum {
        game: PathBuf,
        /// Player name or 1-based index.
        #[arg(long)]
        player: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Build a Nash equilibrium outcome, or report why none was found.
    FindNe {
        game: PathBuf,
        /// Longest candidate play tried after the first outcome fails.
        #[arg(long)]
        horizon: Option<usize>,
        /// Split concurrent steps into turns, players in index order.
        #[arg(long)]
        turnify: bool,
    },
    /// Check whether a play is a Nash equilibrium outcome.
    CheckNe {
        game: PathBuf,
        /// A play file, or vertex names separated by commas.
        play: String,
    },
    #[command(subcommand)]
    Grid(GridCommand),
}

#[derive(Subcommand)]
enum GridCommand {
    /// Schedule minimizing imported energy when the houses cooperate.
    Schedule { instance: PathBuf },
    /// Equilibrium of the billed, turn-based game with deviation penalties.
    Ne {
        instance: PathBuf,
        #[arg(long, value_enum)]
        billing: Option<BillingArg>,
        #[arg(long)]
        credit_exports: bool,
        #[arg(long, default_value_t = 0)]
        order_seed: u64,
    },
    /// Energy and bills of a schedule against the cooperative optimum.
    Eval { instance: PathBuf, schedule: PathBuf },
    /// Random instance.
    Gen {
        #[arg(long)]
        houses: usize,
        /// Tasks per house.
        #[arg(long)]
        tasks: usize,
        #[arg(long, default_value_t = 8)]
        slots: u32,
        #[arg(long)]
        seed: u64,
    },
    /// Averages over random instances, one table row.
    Bench {
        #[arg(long)]
        houses: usize,
        /// Tasks per house.
        #[arg(long)]
        tasks: usize,
        #[arg(long)]
        cases: usize,
        #[arg(long, default_value_t = 8)]
        slots: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        billing: Option<BillingArg>,
        #[arg(long)]
        credit_exports: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Backward,
    Iterate,
}

#[derive(Clone, Copy, ValueEnum)]
enum BillingArg {
    Balanced,
    Literal,
}

impl From<BillingArg> for BillingMode {
    fn from(b: BillingArg) -> Self {
        match b {
            BillingArg::Balanced => BillingMode::Balanced,
            BillingArg::Literal => BillingMode::Literal,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_game(path: &Path) -> Result<ConcurrentGame> {
    parse_game(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_instance(path: &Path) -> Result<GridInstance> {
    InstanceFile::parse(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn find_player(game: &ConcurrentGame, s: &str) -> Result<PlayerId> {
    if let Some(p) = game.players().find(|&p| game.player_name(p) == s) {
        return Ok(p);
    }
    let p = s
        .parse::<usize>()
        .ok()
        .and_then(PlayerId::from_one_based)
        .ok_or_else(|| anyhow!("unknown player `{s}`"))?;
    game.check_player(p)?;
    Ok(p)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Validate { game } => match parse_game(&read(game)?) {
            Ok(_) => Ok(0),
            Err(IoError::Invalid(diagnostics)) => {
                for d in diagnostics {
                    eprintln!("{}: {d}", game.display());
                }
                Ok(1)
            }
            Err(e) => Err(e).with_context(|| format!("in {}", game.display())),
        },
        Command::SolveZerosum {
            game,
            player,
            method,
        } => {
            let g = load_game(game)?;
            let p = find_player(&g, player)?;
            let root = g.initial().ok_or_else(|| anyhow!("game has no initial vertex"))?;
            let cg = coalition_game_at(&g, p, root)?;
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Backward => Method::Backward,
                MethodArg::Iterate => Method::Iterate,
            };
            let vm = solve(&cg.zs, method)?;
            let file = ValueMapFile::new(g.player_name(p), &cg.zs, &vm);
            emit(cli, &file.emit())?;
            Ok(if file.initial_value.is_finite() { 0 } else { INFINITE_VALUE })
        }
        Command::FindNe {
            game,
            horizon,
            turnify,
        } => {
            let mut g = load_game(game)?;
            if *turnify {
                let order: Vec<PlayerId> = g.players().collect();
                g = turnify_round_robin(&g, &order)?.game;
            } else if is_turn_based(&g).is_none() {
                bail!("game is not turn-based; pass --turnify");
            }
            let start = g.initial().ok_or_else(|| anyhow!("game has no initial vertex"))?;
            match construct_ne_heuristic(&g, start, *horizon)? {
                HeuristicOutcome::Found(cert) => {
                    emit(cli, &CertificateFile::found(&g, &cert).emit())?;
                    Ok(0)
                }
                HeuristicOutcome::Failed(report) => {
                    let file = CertificateFile::failed(&g, &report);
                    eprintln!("no equilibrium found; every candidate outcome has a profitable deviation:");
                    for c in std::iter::once(&file.certificate).chain(&file.candidates) {
                        report_failures(c);
                    }
                    if file.truncated {
                        eprintln!("  (candidate list truncated)");
                    }
                    emit(cli, &file.emit())?;
                    Ok(NOT_AN_EQUILIBRIUM)
                }
            }
        }
        Command::CheckNe { game, play } => {
            let g = load_game(game)?;
            let entry = if Path::new(play).is_file() {
                PlayFile::parse(&read(Path::new(play))?)?.play
            } else {
                PlayEntry::Finite(play.split(',').map(|s| s.trim().to_string()).collect())
            };
            let p = entry.to_play(&g)?;
            let cert = check_ne_outcome(&g, &p)?;
            let file = CertificateFile::found(&g, &cert);
            emit(cli, &file.emit())?;
            if cert.valid {
                eprintln!("valid");
                Ok(0)
            } else {
                eprintln!("not an equilibrium outcome:");
                report_failures(&file.certificate);
                Ok(NOT_AN_EQUILIBRIUM)
            }
        }
        Command::Grid(cmd) => grid(cli, cmd),
    }
}

fn report_failures(c: &CertificateEntry) {
    let play = match &c.play {
        PlayEntry::Finite(v) => v.join(" "),
        PlayEntry::Lasso { prefix, cycle } if prefix.is_empty() => format!("({})^w", cycle.join(" ")),
        PlayEntry::Lasso { prefix, cycle } => format!("{} ({})^w", prefix.join(" "), cycle.join(" ")),
    };
    let mut players: Vec<&str> = c.failing().map(|f| f.player.as_str()).collect();
    players.dedup();
    eprintln!("  play {play}: deviating player(s) {}", players.join(", "));
    for f in c.failing() {
        eprintln!(
            "    {} at {} (position {}) plays {} -> {}: {} > {} + {}",
            f.player, f.at, f.position, f.action, f.to, f.lhs, f.deviation_payoff, f.retaliation
        );
    }
}

fn grid(cli: &Cli, cmd: &GridCommand) -> Result<u8> {
    match cmd {
        GridCommand::Schedule { instance } => {
            let inst = load_instance(instance)?;
            let (s, e_min) = optimal_coalition_schedule(&inst)?;
            eprintln!("E_min = {e_min}");
            emit(cli, &ScheduleFile::from_schedule(&inst, &s, Some(e_min)).emit())?;
            Ok(0)
        }
        GridCommand::Ne {
            instance,
            billing,
            credit_exports,
            order_seed,
        } => {
            let mut inst = load_instance(instance)?;
            if let Some(b) = billing {
                inst.billing = (*b).into();
            }
            inst.credit_exports |= credit_exports;
            let ne = ne_schedule(&inst, *order_seed)?;
            let run = penalized_check(&ne)?;
            let mut bills = bill_schedule(&inst, &ne.schedule);
            bills.penalties = ne.floor_bills();
            let names = |ps: &[PlayerId]| -> Vec<String> {
                ps.iter().map(|p| inst.houses[p.0].id.clone()).collect()
            };
            let file = GridNeFile {
                version: VERSION,
                order: ne.turn.orders.iter().map(|o| names(o)).collect(),
                penalties: ne.floor_bills(),
                negative_penalties: names(&run.negative_floor),
                valid_without_penalty: ne.certificate.valid,
                certificate: CertificateEntry::from_certificate(&run.game.game, &run.certificate),
                schedule: ScheduleFile::from_schedule(&inst, &ne.schedule, None),
                bills: BillReportEntry::from_report(&inst, &bills),
            };
            emit(cli, &file.emit())?;
            if !run.negative_floor.is_empty() {
                eprintln!(
                    "warning: negative penalty for {}",
                    file.negative_penalties.join(", ")
                );
            }
            if run.certificate.valid {
                Ok(0)
            } else {
                eprintln!("outcome is not an equilibrium of the penalized game:");
                report_failures(&file.certificate);
                Ok(NOT_AN_EQUILIBRIUM)
            }
        }
        GridCommand::Eval { instance, schedule } => {
            let inst = load_instance(instance)?;
            let s = ScheduleFile::parse(&read(schedule)?)
                .with_context(|| format!("in {}", schedule.display()))?
                .to_schedule(&inst)?;
            let m = evaluate_profile(&inst, &s)?;
            emit(cli, &MetricsFile::from_metrics(&m).emit())?;
            Ok(0)
        }
        GridCommand::Gen {
            houses,
            tasks,
            slots,
            seed,
        } => {
            let inst = generate_from_seed(
                *seed,
                GenConfig {
                    houses: *houses,
                    tasks_per_house: *tasks,
                    slots: *slots,
                },
            );
            emit(cli, &InstanceFile::emit(&inst))?;
            Ok(0)
        }
        GridCommand::Bench {
            houses,
            tasks,
            cases,
            slots,
            seed,
            billing,
            credit_exports,
        } => {
            let mut cfg = ExperimentConfig::new(*houses, *tasks, *cases, *seed);
            cfg.slots = *slots;
            if let Some(b) = billing {
                cfg.billing = (*b).into();
            }
            cfg.credit_exports = *credit_exports;
            let report = run_experiment(&cfg)?;
            emit(cli, &write_metrics_csv(&[report.row])?)?;
            Ok(0)
        }
    }
}
