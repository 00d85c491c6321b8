//! Command-line front end: every subcommand reads JSON files, runs one
//! operation and produces a JSON body with a `status` field and an exit code.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::arena::{self, Color, InitializedArena, Player};
use crate::chain::evaluate;
use crate::characterize::{self, WitnessFamily};
use crate::construct::{cover_witness, product_arena, Coverage};
use crate::fixtures;
use crate::json::{self, ArenaJson, SkeletonJson, StrategyJson};
use crate::memory::{m_max, trivial_skeleton, MemorySkeleton};
use crate::objective::{Context, Objective};
use crate::random::{self, ArenaSpec, Owners};
use crate::rational::{self, Rational};
use crate::solve::{self, Counterexample, DeviationClass, HypothesisPolicy, LiftOptions, SolveOptions, SynthOptions};
use crate::strategy::{MemorylessStrategy, Strategy};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "aifm", version, about = "Memory skeletons and strategy synthesis for stochastic games")]
pub struct Cli {
    /// Initialized arena (JSON).
    #[arg(long, global = true)]
    pub arena: Option<PathBuf>,
    /// Memory skeleton (JSON); the trivial skeleton when omitted.
    #[arg(long, global = true)]
    pub skeleton: Option<PathBuf>,
    /// weak-parity | reach:<c> | disc-expect:<λ> | disc-threshold:<λ>[:<θ>]
    #[arg(long, global = true, default_value = "weak-parity")]
    pub objective: String,
    /// Enumeration cap; defaults to AIFM_CAP or 2000000.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Seed for the generators; solvers use no randomness.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON body to this file.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Product of the arena with the skeleton.
    Product,
    /// Whether the skeleton covers the arena.
    Cover,
    /// Split of the arena on a state.
    Split {
        #[arg(long)]
        state: String,
    },
    /// Exact values of a profile.
    Eval {
        #[arg(long)]
        profile: PathBuf,
        /// Color word read before the start, e.g. "1 0".
        #[arg(long)]
        history: Option<String>,
    },
    /// Optimal Mealy strategy on the skeleton for a one-player arena.
    SolveMdp {
        /// 1 or 2; inferred from the arena when omitted.
        #[arg(long)]
        player: Option<u8>,
        /// Include the value of every enumerated strategy.
        #[arg(long)]
        table: bool,
    },
    /// Equilibrium of Mealy strategies on the skeleton product.
    SolveGame {
        /// Skeleton of P2; the trivial one when omitted.
        #[arg(long)]
        skeleton2: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Warn)]
        policy: PolicyArg,
        #[arg(long, default_value_t = solve::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Whether a profile is a Nash equilibrium.
    CheckNe {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = DeviationArg::Memoryless)]
        deviations: DeviationArg,
    },
    /// Whether a profile is subgame perfect.
    CheckSp {
        #[arg(long)]
        profile: PathBuf,
    },
    /// Subgame-perfect profile by prefix refinement.
    RefineSp {
        #[arg(long, default_value_t = solve::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Monotony of two one-player branches after words reaching a memory state.
    CheckMonotony(BranchArgs),
    /// Selectivity of two one-player branches merged at their states.
    CheckSelectivity(BranchArgs),
    /// Arena on which the skeleton is not enough.
    Counterexample {
        #[arg(value_enum)]
        family: CounterexampleFamily,
        #[arg(long)]
        lambda: String,
    },
    /// Regression fixtures as JSON.
    Fixtures {
        #[arg(long)]
        name: Option<String>,
        /// With --name, the arena itself or a skeleton over its colors
        #[arg(long, value_enum, default_value_t = Emit::Arena, requires = "name")]
        emit: Emit,
    },
    /// Random arenas from the seed.
    Generate {
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
        #[arg(long, default_value_t = 2)]
        max_actions: usize,
        #[arg(long, value_enum, default_value_t = OwnersArg::Both)]
        owners: OwnersArg,
        #[arg(long)]
        deterministic: bool,
    },
}

#[derive(Debug, clap::Args)]
pub struct BranchArgs {
    /// Memory state of the skeleton.
    #[arg(long)]
    pub m: String,
    /// Comma-separated words reaching `m`, colors separated by spaces; an
    /// empty entry is the empty word. The shortest word when omitted.
    #[arg(long)]
    pub words: Option<String>,
    /// Start state of the first branch, in `--arena`.
    #[arg(long)]
    pub state1: String,
    /// Keep only this action at `state1`.
    #[arg(long)]
    pub restrict1: Option<String>,
    /// Arena of the second branch; `--arena` when omitted.
    #[arg(long)]
    pub arena2: Option<PathBuf>,
    /// Start state of the second branch; `state1` when omitted.
    #[arg(long)]
    pub state2: Option<String>,
    #[arg(long)]
    pub restrict2: Option<String>,
    /// Skeleton the branch values are computed with; m_max by default for
    /// weak parity, required otherwise.
    #[arg(long)]
    pub eval: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Warn,
    Abort,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DeviationArg {
    Memoryless,
    /// Mealy strategies on the skeleton.
    Mealy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CounterexampleFamily {
    Disc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Emit {
    Arena,
    Max,
    Trivial,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OwnersArg {
    P1,
    P2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fails,
    Error,
    CapExceeded,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fails => 1,
            Status::Error => 2,
            Status::CapExceeded => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fails => "fails",
            Status::Error => "error",
            Status::CapExceeded => "cap-exceeded",
        }
    }

    fn of_error(e: &Error) -> Status {
        match e {
            Error::EnumerationCapExceeded { .. } | Error::RecursionBudgetExceeded { .. } => Status::CapExceeded,
            Error::HypothesisFailed(_) | Error::InputNotNE(_) => Status::Fails,
            _ => Status::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub body: Json,
    pub code: i32,
    /// Help or version text requested on the command line.
    pub text: Option<String>,
}

impl CommandResult {
    fn new(status: Status, mut body: Json) -> Self {
        body["status"] = json!(status.name());
        CommandResult { body, code: status.code(), text: None }
    }

    fn error(status: Status, message: String) -> Self {
        CommandResult::new(status, json!({ "message": message }))
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("serializable");
        s.push('\n');
        s
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let mut r = CommandResult::new(Status::Ok, json!({}));
                r.text = Some(e.to_string());
                return r;
            }
            return CommandResult::error(Status::Error, e.to_string());
        }
    };
    let mut result = match run(&cli) {
        Ok((status, body)) => CommandResult::new(status, body),
        Err(e) => CommandResult::error(Status::of_error(&e), e.to_string()),
    };
    if let Some(path) = &cli.json_out {
        if let Err(e) = std::fs::write(path, result.render()) {
            result = CommandResult::error(Status::Error, format!("cannot write {}: {e}", path.display()));
        }
    }
    result
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> Json {
    serde_json::to_value(v).expect("serializable")
}

fn rat(r: &Rational) -> Json {
    json!(rational::format(r))
}

fn per_initial(values: &[(String, Rational)]) -> Json {
    Json::Object(values.iter().map(|(s, v)| (s.clone(), rat(v))).collect())
}

fn word_json(w: &[Color]) -> Json {
    json!(crate::word_string(w))
}

fn context_json(ctx: &Context) -> Json {
    match ctx {
        Context::WeakParity(max) => json!({ "max": max.as_ref().map(rational::format) }),
        Context::Reach(seen) => json!({ "seen": seen }),
        Context::Disc { offset, scale } => json!({ "offset": rat(offset), "scale": rat(scale) }),
    }
}

fn strategy_json(s: &Strategy) -> Result<Json, Error> {
    Ok(to_json(&StrategyJson::from_strategy(s)?))
}

fn counterexample_json(c: &Counterexample) -> Result<Json, Error> {
    Ok(json!({
        "player": c.player,
        "state": c.state,
        "context": context_json(&c.context),
        "deviation": strategy_json(&c.deviation)?,
        "before": rat(&c.before),
        "after": rat(&c.after),
    }))
}

fn verdict_json(v: &solve::Verdict) -> Result<Json, Error> {
    Ok(json!({
        "holds": v.holds,
        "checked": v.checked.to_string(),
        "counterexample": v.counterexample.as_ref().map(counterexample_json).transpose()?,
    }))
}

fn verdict_status(holds: bool) -> Status {
    if holds {
        Status::Ok
    } else {
        Status::Fails
    }
}

/// `"1 0,,2"` → `[[1, 0], [], [2]]`; `ε` also denotes the empty word.
pub fn parse_words(text: &str) -> Result<Vec<Vec<Color>>, Error> {
    text.split(',').map(parse_word).collect()
}

pub fn parse_word(text: &str) -> Result<Vec<Color>, Error> {
    let text = text.trim();
    if text == "ε" {
        return Ok(Vec::new());
    }
    text.split_whitespace().map(|c| rational::parse(c).map_err(|e| Error::Input(e.to_string()))).collect()
}

struct Inputs<'a> {
    cli: &'a Cli,
}

impl Inputs<'_> {
    fn cap(&self) -> u64 {
        self.cli.cap.unwrap_or_else(solve::default_cap)
    }

    fn objective(&self) -> Result<Objective, Error> {
        self.cli.objective.parse()
    }

    fn arena(&self) -> Result<InitializedArena, Error> {
        let path = self.cli.arena.as_ref().ok_or_else(|| Error::Input("--arena is required".to_string()))?;
        json::parse_arena(&unwrap_field(read(path)?, "arena")?)
    }

    fn skeleton_file(&self) -> Result<Option<MemorySkeleton>, Error> {
        self.cli.skeleton.as_ref().map(|p| json::parse_skeleton(&unwrap_field(read(p)?, "skeleton")?)).transpose()
    }

    /// The given skeleton, or the trivial one over `colors`.
    fn skeleton_or_trivial(&self, colors: &[Color]) -> Result<MemorySkeleton, Error> {
        Ok(self.skeleton_file()?.unwrap_or_else(|| trivial_skeleton(colors)))
    }

    fn required_skeleton(&self) -> Result<MemorySkeleton, Error> {
        self.skeleton_file()?.ok_or_else(|| Error::Input("--skeleton is required".to_string()))
    }
}

fn run(cli: &Cli) -> Result<(Status, Json), Error> {
    let inp = Inputs { cli };
    match &cli.command {
        Command::Product => {
            let a = inp.arena()?;
            let k = inp.skeleton_or_trivial(&a.arena().colors())?;
            let (p, map) = product_arena(&a, &k)?;
            Ok((Status::Ok, json!({ "arena": to_json(&ArenaJson::from_arena(&p)), "map": to_json(&map.forward) })))
        }
        Command::Cover => {
            let a = inp.arena()?;
            let k = inp.skeleton_or_trivial(&a.arena().colors())?;
            let c = cover_witness(&a, &k)?;
            let status = verdict_status(matches!(c, Coverage::Covered(_)));
            Ok((status, to_json(&c)))
        }
        Command::Split { state } => {
            let a = inp.arena()?;
            let (s, labels) = arena::split(&a, state)?;
            Ok((Status::Ok, json!({ "arena": to_json(&ArenaJson::from_arena(&s)), "labeling": to_json(&labels) })))
        }
        Command::Eval { profile, history } => {
            let a = inp.arena()?;
            let obj = inp.objective()?;
            let profile = json::parse_profile(&read(profile)?)?;
            let word = history.as_deref().map(parse_word).transpose()?.unwrap_or_default();
            let ctx = obj.shift(&obj.initial_context(), &word);
            let values = evaluate(&a, &profile, &obj, &ctx)?;
            let values: Vec<(String, Rational)> =
                a.initial_names().into_iter().zip(values.into_iter().map(|v| v.amount)).collect();
            Ok((Status::Ok, json!({ "objective": obj.to_string(), "context": context_json(&ctx), "values": per_initial(&values) })))
        }
        Command::SolveMdp { player, table } => solve_mdp(&inp, *player, *table),
        Command::SolveGame { skeleton2, policy, budget } => {
            let a = inp.arena()?;
            let obj = inp.objective()?;
            let k1 = inp.skeleton_or_trivial(&a.arena().colors())?;
            let k2 = match skeleton2 {
                Some(p) => json::parse_skeleton(&read(p)?)?,
                None => trivial_skeleton(k1.alphabet()),
            };
            let policy = match policy {
                PolicyArg::Warn => HypothesisPolicy::Warn,
                PolicyArg::Abort => HypothesisPolicy::Abort,
            };
            let opts = LiftOptions { synth: SynthOptions { cap: inp.cap(), budget: *budget }, policy };
            let r = solve::lift_two_player(&a, &k1, &k2, &obj, opts)?;
            Ok((
                Status::Ok,
                json!({
                    "objective": obj.to_string(),
                    "skeleton": to_json(&SkeletonJson::from_skeleton(&r.skeleton)),
                    "profile": { "p1": strategy_json(&r.p1.clone().into())?, "p2": strategy_json(&r.p2.clone().into())? },
                    "values": per_initial(&r.values),
                    "product_states": r.product_states,
                    "trace": to_json(&r.synthesis.trace),
                    "warnings": r.warnings,
                }),
            ))
        }
        Command::CheckNe { profile, deviations } => {
            let a = inp.arena()?;
            let obj = inp.objective()?;
            let profile = json::parse_profile(&read(profile)?)?;
            let class = match deviations {
                DeviationArg::Memoryless => DeviationClass::Memoryless,
                DeviationArg::Mealy => DeviationClass::Mealy(inp.skeleton_or_trivial(&a.arena().colors())?),
            };
            let v = solve::check_ne(&a, &obj, &profile, &class, inp.cap())?;
            Ok((verdict_status(v.holds), verdict_json(&v)?))
        }
        Command::CheckSp { profile } => {
            let a = inp.arena()?;
            let obj = inp.objective()?;
            let k = inp.skeleton_or_trivial(&a.arena().colors())?;
            let profile = json::parse_profile(&read(profile)?)?;
            let r = solve::check_sp(&a, &k, &obj, &profile, inp.cap())?;
            let mut body = verdict_json(&r.verdict)?;
            body["pairs"] = json!(r.pairs.len());
            body["violation"] = match &r.violation {
                Some((s, ctx, w)) => json!({ "state": s, "context": context_json(ctx), "history": word_json(w) }),
                None => Json::Null,
            };
            body["note"] = json!(r.note);
            Ok((verdict_status(r.verdict.holds), body))
        }
        Command::RefineSp { budget } => {
            let a = inp.arena()?;
            let obj = inp.objective()?;
            let k = inp.skeleton_or_trivial(&a.arena().colors())?;
            let r = solve::refine_to_sp(&a, &k, &obj, SynthOptions { cap: inp.cap(), budget: *budget })?;
            let log: Vec<Json> = r
                .log
                .iter()
                .map(|it| match &it.violation {
                    Some((s, ctx, w)) => json!({
                        "state": s, "context": context_json(ctx), "history": word_json(w), "head": it.head,
                    }),
                    None => json!({ "state": Json::Null }),
                })
                .collect();
            Ok((
                Status::Ok,
                json!({
                    "mode": to_json(&r.mode),
                    "profile": { "p1": strategy_json(&r.p1.clone().into())?, "p2": strategy_json(&r.p2.clone().into())? },
                    "iterations": r.iterations,
                    "bound": r.bound.to_string(),
                    "log": log,
                }),
            ))
        }
        Command::CheckMonotony(args) => branches(&inp, args, false),
        Command::CheckSelectivity(args) => branches(&inp, args, true),
        Command::Counterexample { family: CounterexampleFamily::Disc, lambda } => {
            let k = inp.required_skeleton()?;
            let lambda = rational::parse(lambda).map_err(|e| Error::Input(e.to_string()))?;
            let (a, r) = characterize::counterexample_discounted(&k, &lambda, inp.cap())?;
            Ok((
                Status::Ok,
                json!({
                    "arena": to_json(&ArenaJson::from_arena(&a)),
                    "objective": r.objective.to_string(),
                    "n": r.shape.n,
                    "m": r.shape.m,
                    "lambda": rat(&r.shape.lambda),
                    "c_b": rat(&r.shape.c_b),
                    "c_l": rat(&r.shape.c_l),
                    "counter": to_json(&SkeletonJson::from_skeleton(&r.shape.counter)),
                    "optimal": rat(&r.optimal),
                    "mealy_best": rat(&r.mealy_best),
                    "gap": rat(&r.gap),
                }),
            ))
        }
        Command::Fixtures { name, emit } => match name {
            Some(n) => {
                let a = fixtures::by_name(n).ok_or_else(|| {
                    Error::Input(format!("unknown fixture {n}; known: {}", fixtures::NAMES.join(", ")))
                })?;
                let colors = a.arena().colors();
                let body = match emit {
                    Emit::Arena => json!({ "name": n, "arena": to_json(&ArenaJson::from_arena(&a)) }),
                    Emit::Max => json!({ "name": n, "skeleton": to_json(&SkeletonJson::from_skeleton(&m_max(&colors)?)) }),
                    Emit::Trivial => {
                        json!({ "name": n, "skeleton": to_json(&SkeletonJson::from_skeleton(&trivial_skeleton(&colors))) })
                    }
                };
                Ok((Status::Ok, body))
            }
            None => {
                let all: BTreeMap<&str, Json> = fixtures::NAMES
                    .iter()
                    .map(|n| (*n, to_json(&ArenaJson::from_arena(&fixtures::by_name(n).expect("registered")))))
                    .collect();
                Ok((Status::Ok, json!({ "fixtures": all })))
            }
        },
        Command::Generate { count, max_states, max_actions, owners, deterministic } => {
            if *max_states == 0 || *max_actions == 0 {
                return Err(Error::Input("--max-states and --max-actions must be positive".to_string()));
            }
            let owners = match owners {
                OwnersArg::P1 => Owners::Only(Player::One),
                OwnersArg::P2 => Owners::Only(Player::Two),
                OwnersArg::Both => Owners::Both,
            };
            let spec = ArenaSpec {
                max_states: *max_states,
                max_actions: *max_actions,
                colors: random::weak_parity_colors(),
                owners,
                deterministic: *deterministic,
            };
            let mut rng = random::rng(cli.seed);
            let arenas: Vec<Json> =
                (0..*count).map(|_| to_json(&ArenaJson::from_arena(&random::arena(&mut rng, &spec)))).collect();
            Ok((Status::Ok, json!({ "seed": cli.seed, "arenas": arenas })))
        }
    }
}

fn solve_mdp(inp: &Inputs, player: Option<u8>, table: bool) -> Result<(Status, Json), Error> {
    let a = inp.arena()?;
    let obj = inp.objective()?;
    let k = inp.skeleton_or_trivial(&a.arena().colors())?;
    let player = match player {
        Some(n) => Player::from_number(n).ok_or_else(|| Error::Input(format!("no player {n}")))?,
        None if !a.has_choice(Player::Two) => Player::One,
        None if !a.has_choice(Player::One) => Player::Two,
        None => return Err(Error::NotOnePlayer(Player::One)),
    };
    let opts = SolveOptions { cap: inp.cap(), keep_table: table };
    let (mealy, r) = solve::mdp_solve_with_memory(&a, &k, &obj, player, opts)?;
    let table: Option<Vec<Json>> = r.table.as_ref().map(|rows| {
        rows.iter()
            .map(|(s, vs): &(MemorylessStrategy, Vec<Rational>)| {
                json!({ "strategy": to_json(&s.choice), "values": vs.iter().map(rat).collect::<Vec<_>>() })
            })
            .collect()
    });
    Ok((
        Status::Ok,
        json!({
            "objective": obj.to_string(),
            "player": player,
            "value": rat(&r.value),
            "per_initial": per_initial(&r.per_initial),
            "uniform": r.uniform,
            "strategy": strategy_json(&mealy.into())?,
            "enumerated": r.enumerated.to_string(),
            "table": table,
        }),
    ))
}

fn restricted(a: InitializedArena, state: &str, action: &Option<String>) -> Result<InitializedArena, Error> {
    match action {
        None => Ok(a),
        Some(x) => {
            let keep = BTreeMap::from([(state.to_string(), BTreeSet::from([x.clone()]))]);
            Ok(arena::subarena(&a, &keep)?)
        }
    }
}

fn branches(inp: &Inputs, args: &BranchArgs, selectivity: bool) -> Result<(Status, Json), Error> {
    let obj = inp.objective()?;
    let k = inp.required_skeleton()?;
    let a1 = inp.arena()?;
    let a2 = match &args.arena2 {
        Some(p) => json::parse_arena(&read(p)?)?,
        None => a1.clone(),
    };
    let s2 = args.state2.clone().unwrap_or_else(|| args.state1.clone());
    let b1 = restricted(a1.from_state(&args.state1)?, &args.state1, &args.restrict1)?;
    let b2 = restricted(a2.from_state(&s2)?, &s2, &args.restrict2)?;
    let family = match &args.words {
        Some(w) => WitnessFamily::new(&k, &args.m, parse_words(w)?, "given")?,
        None => WitnessFamily::representative(&k, &args.m)?,
    };
    let mut colors: Vec<Color> = k.alphabet().to_vec();
    colors.extend(b1.arena().colors());
    colors.extend(b2.arena().colors());
    colors.sort();
    colors.dedup();
    let eval = match &args.eval {
        Some(p) => json::parse_skeleton(&read(p)?)?,
        None => characterize::default_eval_skeleton(&obj, &colors)
            .ok_or_else(|| Error::Input(format!("--eval is required for {obj}")))?,
    };
    let branches = [(&b1, args.state1.as_str()), (&b2, s2.as_str())];
    if selectivity {
        let v = characterize::check_selectivity(&obj, &k, branches, &family, &eval, inp.cap())?;
        Ok((verdict_status(v.holds), to_json(&v)))
    } else {
        let v = characterize::check_monotony(&obj, &k, branches, &family, &eval, inp.cap())?;
        Ok((verdict_status(v.holds), to_json(&v)))
    }
}

/// Accepts either a bare document or a CLI output carrying it under `field`.
fn unwrap_field(text: String, field: &str) -> Result<String, Error> {
    let v: Json = serde_json::from_str(&text).map_err(|e| Error::Input(e.to_string()))?;
    match v.get(field) {
        Some(inner) if v.get("status").is_some() => Ok(inner.to_string()),
        _ => Ok(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn words_parse() {
        assert_eq!(parse_words(",1 0").unwrap(), vec![vec![], vec![int(1), int(0)]]);
        assert_eq!(parse_words("ε").unwrap(), vec![Vec::<Color>::new()]);
        assert!(parse_words("0.5").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        let r = dispatch(["aifm", "frobnicate"]);
        assert_eq!(r.code, 2);
        assert_eq!(r.body["status"], "error");
        let r = dispatch(["aifm", "product"]);
        assert_eq!(r.code, 2);
    }

    #[test]
    fn help_is_text() {
        let r = dispatch(["aifm", "--help"]);
        assert_eq!(r.code, 0);
        assert!(r.text.unwrap().contains("solve-mdp"));
    }

    #[test]
    fn fixture_names() {
        let r = dispatch(["aifm", "fixtures", "--name", "fig3"]);
        assert_eq!(r.code, 0);
        let a = serde_json::from_value::<ArenaJson>(r.body["arena"].clone()).unwrap().to_arena().unwrap();
        assert_eq!(a, fixtures::weak_parity());
        assert_eq!(dispatch(["aifm", "fixtures", "--name", "nope"]).code, 2);
    }
}
