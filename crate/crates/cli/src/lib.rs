//! The `jalg` command line: file formats wired to the core checks, with a
//! JSON report per command and a short human summary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use jalg_core::agenda::{check_pseudo_rich, image, is_provably_equivalent_to_variable, is_strictly_contingent, Agenda};
use jalg_core::aggregation::{verify_bijection, AggregationError, Aggregator, DecisionCriterion, Profile, Setting};
use jalg_core::algebra::{
    boolean_signature, distributive_lattice, enumerate_homomorphisms, is_homomorphism, lattice_signature,
    modal_signature, mv_signature, AlgebraError, FiniteAlgebra, Odometer, Poset, DEFAULT_HOM_BUDGET,
};
use jalg_core::impossibility::{dictator_report, ImpossibilityError};
use jalg_core::modal::{bao_from_frame, dietrich_summary, KripkeFrame, ModalError, MAX_SEARCH_WORLDS};
use jalg_core::semantics::{check_selfextensionality, LogicError, Matrix};
use jalg_core::syntax::Signature;
use serde_json::{json, Map, Value};
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "jalg", version, about = "Judgment aggregation checks over finite algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Pseudo-richness, strict contingency and equivalence to variables.
    CheckAgenda,
    /// Homomorphisms `B^N → B` against qualifying aggregators, with round trips.
    VerifyBijection,
    /// Decisive coalitions, ultrafilter axioms and dictators over 2.
    ClassifyDictators,
    /// Dietrich's conditions for the subjunctive and material readings.
    CheckSubjunctive,
    /// Bounded search for a failure of the congruence property.
    CheckSelfext,
    /// Every homomorphism `B^N → B`.
    EnumerateHoms,
    /// Applies a decision criterion to a profile.
    Aggregate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckAgenda => "check-agenda",
            Command::VerifyBijection => "verify-bijection",
            Command::ClassifyDictators => "classify-dictators",
            Command::CheckSubjunctive => "check-subjunctive",
            Command::CheckSelfext => "check-selfext",
            Command::EnumerateHoms => "enumerate-homs",
            Command::Aggregate => "aggregate",
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// `classical`, `lukasiewicz:K`, `lukasiewicz-degree:K`,
    /// `lattice:chain:K`, `lattice:antichain:K`, `frame:PATH`, or a matrix JSON file.
    #[arg(long, global = true, default_value = "classical")]
    pub logic: String,
    /// Agenda JSON file: `{"signature_ref": ..., "formulas": [...]}`.
    #[arg(long, global = true)]
    pub agenda: Option<PathBuf>,
    /// Agenda formula; repeatable, added to `--agenda`.
    #[arg(long = "formula", short = 'f', global = true)]
    pub formulas: Vec<String>,
    #[arg(long, short = 'n', global = true, default_value_t = 2)]
    pub electorate: usize,
    /// Closure depth for strong systematicity and selfextensionality.
    #[arg(long, global = true, default_value_t = 2)]
    pub depth: usize,
    /// Upper bound on enumerated candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_HOM_BUDGET)]
    pub budget: u64,
    /// Maximum number of worlds in frame searches.
    #[arg(long, global = true, default_value_t = 3)]
    pub frame_bound: usize,
    /// Number of variables for `check-selfext`.
    #[arg(long, global = true, default_value_t = 2)]
    pub vars: usize,
    /// Criterion JSON file: `{"electorate": N, "table": [...]}`.
    #[arg(long, global = true)]
    pub criterion: Option<PathBuf>,
    /// Profile JSON file: a list of attitude maps.
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            logic: "classical".into(),
            agenda: None,
            formulas: Vec::new(),
            electorate: 2,
            depth: 2,
            budget: DEFAULT_HOM_BUDGET,
            frame_bound: 3,
            vars: 2,
            criterion: None,
            profile: None,
            out: None,
            json: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

impl From<LogicError> for CliError {
    fn from(e: LogicError) -> Self {
        match e {
            LogicError::Algebra(AlgebraError::BudgetExceeded { .. })
            | LogicError::Closure(_)
            | LogicError::FragmentTooLarge { .. }
            | LogicError::ValuationBudget { .. } => CliError::Budget(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => input(e),
        }
    }
}

impl From<AggregationError> for CliError {
    fn from(e: AggregationError) -> Self {
        match e {
            AggregationError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            AggregationError::Logic(e) => e.into(),
            AggregationError::Algebra(e) => e.into(),
            _ => input(e),
        }
    }
}

impl From<ModalError> for CliError {
    fn from(e: ModalError) -> Self {
        input(e)
    }
}

impl From<ImpossibilityError> for CliError {
    fn from(e: ImpossibilityError) -> Self {
        input(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: Value,
    pub passed: bool,
    pub summary: String,
}

impl CommandOutput {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_size(text: &str, what: &str) -> Result<usize, CliError> {
    text.parse()
        .map_err(|_| input(format!("`{text}` is not a valid {what}")))
}

/// Resolves a `--logic` value.
pub fn load_logic(name: &str) -> Result<Matrix, CliError> {
    if name == "classical" {
        return Ok(Matrix::classical());
    }
    if let Some(k) = name.strip_prefix("lukasiewicz-degree:") {
        return Ok(Matrix::lukasiewicz_degree(parse_size(k, "chain length")?)?);
    }
    if let Some(k) = name.strip_prefix("lukasiewicz:") {
        return Ok(Matrix::lukasiewicz(parse_size(k, "chain length")?)?);
    }
    if let Some(k) = name.strip_prefix("lattice:chain:") {
        let alg = distributive_lattice(&Poset::chain(parse_size(k, "poset size")?))?;
        return Ok(Matrix::degree(alg)?);
    }
    if let Some(k) = name.strip_prefix("lattice:antichain:") {
        let alg = distributive_lattice(&Poset::antichain(parse_size(k, "poset size")?))?;
        return Ok(Matrix::degree(alg)?);
    }
    if let Some(path) = name.strip_prefix("frame:") {
        let frame = KripkeFrame::from_json_value(&read_json(Path::new(path))?)?;
        return Ok(Matrix::degree(bao_from_frame(&frame)?)?);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(input(format!("unknown logic `{name}`")));
    }
    Ok(Matrix::from_json_value(&read_json(path)?)?)
}

/// Named signatures accepted by an agenda's `signature_ref`.
pub fn named_signature(name: &str) -> Option<Signature> {
    match name {
        "boolean" | "classical" => Some(boolean_signature()),
        "modal" | "bao" => Some(modal_signature()),
        "mv" | "lukasiewicz" => Some(mv_signature()),
        "lattice" => Some(lattice_signature()),
        _ => None,
    }
}

pub fn load_agenda(cfg: &RunConfig, matrix: &Matrix) -> Result<Agenda, CliError> {
    if cfg.agenda.is_none() && cfg.formulas.is_empty() {
        return Err(input("an agenda is required: pass --agenda FILE or --formula F"));
    }
    let mut formulas = Vec::new();
    if let Some(path) = &cfg.agenda {
        let ag = Agenda::from_json_value(matrix.clone(), &read_json(path)?, named_signature)?;
        formulas.extend(ag.formulas().iter().cloned());
    }
    let extra: Vec<&str> = cfg.formulas.iter().map(String::as_str).collect();
    formulas.extend(Agenda::parse(matrix.clone(), &extra)?.formulas().iter().cloned());
    Ok(Agenda::new(matrix.clone(), formulas)?)
}

fn config_echo(command: Command, cfg: &RunConfig) -> Value {
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    json!({
        "command": command.name(),
        "logic": cfg.logic,
        "agenda": path(&cfg.agenda),
        "formulas": cfg.formulas,
        "electorate": cfg.electorate,
        "depth": cfg.depth,
        "budget": cfg.budget,
        "frame_bound": cfg.frame_bound,
        "vars": cfg.vars,
        "criterion": path(&cfg.criterion),
        "profile": path(&cfg.profile),
    })
}

fn finish(command: Command, cfg: &RunConfig, mut body: Map<String, Value>, passed: bool, summary: String) -> CommandOutput {
    body.insert("config".into(), config_echo(command, cfg));
    body.insert("version".into(), json!(VERSION));
    body.insert("passed".into(), json!(passed));
    CommandOutput {
        report: Value::Object(body),
        passed,
        summary,
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn cmd_check_agenda(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let ag = load_agenda(cfg, &matrix)?;
    let b = ag.algebra();
    let mut rows = Vec::new();
    let mut contingent = Vec::new();
    for f in ag.formulas() {
        let sc = is_strictly_contingent(f, b)?;
        if sc {
            contingent.push(f.to_string());
        }
        let img: Vec<&str> = image(f, b)?.into_iter().map(|a| b.label(a)).collect();
        rows.push(json!({
            "formula": f.to_string(),
            "equivalent_to": is_provably_equivalent_to_variable(f, &matrix)?,
            "strictly_contingent": sc,
            "image": img,
        }));
    }
    let pr = jalg_core::agenda::pseudo_richness(&ag)?;
    let witnesses = check_pseudo_rich(&ag, pr.level())?.unwrap_or_default();
    let summary = format!(
        "pseudo-rich: {}\nstrictly contingent: {}\n",
        pr.level(),
        if contingent.is_empty() { "none".to_string() } else { contingent.join(", ") }
    );
    let body = object(json!({
        "pseudo_rich": pr.level(),
        "witnesses": to_value(&witnesses),
        "strictly_contingent": contingent,
        "formulas": rows,
        "max_arity": b.signature().max_arity(),
    }));
    Ok(finish(Command::CheckAgenda, cfg, body, true, summary))
}

pub fn cmd_verify_bijection(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let ag = load_agenda(cfg, &matrix)?;
    let s = Setting::with_budget(ag, cfg.electorate, cfg.budget)?;
    let r = verify_bijection(&s, cfg.depth, cfg.budget)?;
    let summary = format!(
        "homomorphisms: {}\nqualifying aggregators: {}\nround trips: {}\npareto: {}\n",
        r.homs, r.aggregators, r.roundtrips, r.pareto
    );
    let passed = r.passes();
    Ok(finish(Command::VerifyBijection, cfg, object(to_value(&r)), passed, summary))
}

fn two_element(matrix: &Matrix) -> Result<&FiniteAlgebra, CliError> {
    let b = matrix.algebra();
    if b.size() != 2 {
        return Err(input(format!("dictator classification needs a two-element algebra, got {}", b.size())));
    }
    Ok(b)
}

fn load_criterion(cfg: &RunConfig, k: usize) -> Result<Option<DecisionCriterion>, CliError> {
    cfg.criterion
        .as_ref()
        .map(|p| DecisionCriterion::from_json_value(&read_json(p)?, k).map_err(CliError::from))
        .transpose()
}

pub fn cmd_classify_dictators(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let b = two_element(&matrix)?;
    if let Some(f) = load_criterion(cfg, 2)? {
        let r = dictator_report(&f, b)?;
        let summary = format!(
            "homomorphism: {}\nultrafilter: {}\ndictator: {}\n{}",
            r.homomorphism,
            r.ultrafilter,
            r.dictator.map_or("none".into(), |i| i.to_string()),
            r.violations.iter().map(|v| format!("  {v}\n")).collect::<String>()
        );
        let passed = r.dictator.is_some();
        return Ok(finish(Command::ClassifyDictators, cfg, object(to_value(&r)), passed, summary));
    }
    let n = cfg.electorate;
    let maps = 2f64.powf(2f64.powf(n as f64));
    if maps > cfg.budget as f64 {
        return Err(CliError::Budget(format!("{maps} maps over {n} voters exceed {}", cfg.budget)));
    }
    let mut agree = true;
    let mut dictators = Vec::new();
    let mut count = 0usize;
    for table in Odometer::new(1 << n, 2) {
        count += 1;
        let f = DecisionCriterion::new(2, n, table)?;
        let r = dictator_report(&f, b)?;
        agree &= r.consistent();
        if let Some(i) = r.dictator {
            dictators.push(json!({ "dictator": i, "table": f.table() }));
        }
    }
    let summary = format!(
        "maps: {count}\ndictatorial: {}\nhomomorphism ⟺ ultrafilter ⟺ dictator: {}\n",
        dictators.len(),
        agree
    );
    let body = object(json!({
        "maps": count,
        "homomorphisms": dictators.len(),
        "dictators": dictators,
        "consistent": agree,
    }));
    Ok(finish(Command::ClassifyDictators, cfg, body, agree, summary))
}

pub fn cmd_check_subjunctive(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let bound = cfg.frame_bound;
    let s = dietrich_summary(bound, bound.clamp(1, MAX_SEARCH_WORLDS))?;
    let summary = format!(
        "subjunctive (a): {}\nsubjunctive (b): {}\nmaterial (a): {}\nmaterial (b): {}\n⊥ derivation: {}\n{}",
        s.a,
        s.b,
        s.material_a,
        s.material_b,
        s.bottom_derivation,
        if s.subjunctive.insufficient_bound {
            format!("no witness for some consistency within {bound} worlds; try a larger --frame-bound\n")
        } else {
            String::new()
        }
    );
    let passed = s.as_expected();
    Ok(finish(Command::CheckSubjunctive, cfg, object(to_value(&s)), passed, summary))
}

pub fn cmd_check_selfext(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let vars: Vec<String> = (1..=cfg.vars).map(|i| format!("x{i}")).collect();
    let r = check_selfextensionality(&matrix, &vars, cfg.depth)?;
    let summary = match &r.witness {
        None => format!(
            "selfextensional up to depth {} over {} variables ({} classes)\n",
            r.depth,
            vars.len(),
            r.equivalence_classes
        ),
        Some(w) => format!(
            "not selfextensional: {:?} ≡ {:?} but `{}` separates them\n",
            w.left, w.right, w.connective
        ),
    };
    let passed = r.selfextensional;
    Ok(finish(Command::CheckSelfext, cfg, object(to_value(&r)), passed, summary))
}

pub fn cmd_enumerate_homs(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let b = matrix.algebra();
    let power = b.power(cfg.electorate)?;
    let homs = enumerate_homomorphisms(&power, b, cfg.budget)?;
    let rows: Vec<Value> = homs
        .iter()
        .map(|h| {
            let f = DecisionCriterion::new(b.size(), cfg.electorate, h.map().to_vec()).expect("homomorphisms are total");
            json!({ "table": h.map(), "projection": f.projection_of(b.size()) })
        })
        .collect();
    let projections = rows.iter().filter(|r| !r["projection"].is_null()).count();
    let summary = format!(
        "homomorphisms {}^{} → {}: {} ({} projections)\n",
        b.size(),
        cfg.electorate,
        b.size(),
        homs.len(),
        projections
    );
    let body = object(json!({ "count": homs.len(), "projections": projections, "homomorphisms": rows }));
    Ok(finish(Command::EnumerateHoms, cfg, body, true, summary))
}

pub fn cmd_aggregate(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let matrix = load_logic(&cfg.logic)?;
    let ag = load_agenda(cfg, &matrix)?;
    let k = ag.algebra().size();
    let f = load_criterion(cfg, k)?.ok_or_else(|| input("aggregate needs --criterion"))?;
    let path = cfg.profile.as_ref().ok_or_else(|| input("aggregate needs --profile"))?;
    let profile = Profile::from_json_value(&ag, &read_json(path)?)?;
    let s = Setting::with_budget(ag, f.electorate(), cfg.budget)?;
    if profile.electorate() != f.electorate() {
        return Err(input(format!(
            "profile has {} voters, criterion {}",
            profile.electorate(),
            f.electorate()
        )));
    }
    let homomorphism = is_homomorphism(f.table(), s.power(), s.algebra())?.holds();
    let voters_rational: Vec<bool> = profile.0.iter().map(|a| s.is_rational(a)).collect();
    let output = s.apply_criterion(&f, &profile);
    let rational = s.is_rational(&output);
    let in_domain = Aggregator::Criterion(f).apply(&s, &profile).is_some();
    let summary = format!(
        "output: {}\nrational output: {rational}\ncriterion is a homomorphism: {homomorphism}\n",
        output.to_json_value(s.agenda())
    );
    let body = object(json!({
        "output": output.to_json_value(s.agenda()),
        "rational": rational,
        "voters_rational": voters_rational,
        "profile_rational": in_domain,
        "homomorphism": homomorphism,
    }));
    Ok(finish(Command::Aggregate, cfg, body, rational, summary))
}

pub fn run(command: Command, cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    match command {
        Command::CheckAgenda => cmd_check_agenda(cfg),
        Command::VerifyBijection => cmd_verify_bijection(cfg),
        Command::ClassifyDictators => cmd_classify_dictators(cfg),
        Command::CheckSubjunctive => cmd_check_subjunctive(cfg),
        Command::CheckSelfext => cmd_check_selfext(cfg),
        Command::EnumerateHoms => cmd_enumerate_homs(cfg),
        Command::Aggregate => cmd_aggregate(cfg),
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Value) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
