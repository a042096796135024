//! Subcommand behavior: load inputs, run the pipeline, build a report.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use cqa_core::compiler::{compile_query_program, compile_repair_program, CompileOptions, RepairMode};
use cqa_core::cqa::{self, evaluate_k_query, repair_run, wfs_consistent_answers, CqaOptions};
use cqa_core::grounder::{ground_with, DomainDeclaration, GroundProgram};
use cqa_core::oracle::{
    enumerate_repairs_bruteforce, naive_outcome, random_ground_program, random_problem, BicKind, CorpusShape, Metric,
    NaiveOutcome,
};
use cqa_core::parser::{
    emit_dlv, parse_domain, parse_instance, parse_problem, parse_program, parse_query, ConstraintSet,
};
use cqa_core::solver::{self, SolveOptions};
use cqa_core::{wfs, AnswerSet, DatabaseInstance, KQuery, Literal, Program, RuleKind, Schema};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Agreement, QueryCounts, RepairCounts, RepairEntry, Report, Status};
use crate::{exit, Command, Format, Mode, Problem, ProgramSource, QueryArg, RunConfig};

/// Mismatches listed in an oracle report; the counts cover all of them.
const LISTED_MISMATCHES: usize = 5;
/// Atoms in the random ground programs of `oracle-check`.
const ORACLE_PROGRAM_ATOMS: usize = 5;

/// Runs a subcommand and renders its report. Never panics on bad input.
pub fn run(command: &Command, config: &RunConfig) -> (String, u8) {
    let (report, code) = match execute(command, config) {
        Ok(done) => done,
        Err(e) => error_report(&e),
    };
    if let Report::Error { message, .. } = &report {
        eprintln!("cqa: {message}");
    }
    let text = match (config.format, &report) {
        (Format::Text, Report::Error { .. }) => String::new(),
        (Format::Text, _) => report.to_text(),
        (Format::Json, _) => report.to_json(),
    };
    (text, code)
}

fn error_report(e: &anyhow::Error) -> (Report, u8) {
    let core = e.chain().find_map(|c| c.downcast_ref::<cqa_core::Error>());
    let (kind, code) = match core {
        Some(cqa_core::Error::ResourceLimit(_) | cqa_core::Error::UniverseTooLarge { .. }) => {
            ("resource_limit", exit::RESOURCE_LIMIT)
        }
        Some(cqa_core::Error::Inconsistent) => ("inconsistent_program", exit::INCONSISTENT_PROGRAM),
        Some(cqa_core::Error::EmptyCore) => ("no_admissible_repair", exit::NO_ADMISSIBLE_REPAIR),
        _ => ("input", exit::INPUT_ERROR),
    };
    let report = Report::Error {
        status: Status::Error,
        kind,
        message: format!("{e:#}"),
    };
    (report, code)
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Ok => exit::SUCCESS,
        Status::NoAdmissibleRepair => exit::NO_ADMISSIBLE_REPAIR,
        Status::Error => exit::INPUT_ERROR,
    }
}

fn execute(command: &Command, config: &RunConfig) -> Result<(Report, u8)> {
    let report = match command {
        Command::Repair { problem } => repair(problem, config)?,
        Command::Query {
            problem,
            query,
            well_founded,
        } => query_answers(problem, query, *well_founded, config)?,
        Command::Core { source, all } => core(source, *all, config)?,
        Command::Wfs { source, all } => well_founded(source, *all, config)?,
        Command::Ground { source } => {
            let (g, _) = ground_source(source, config)?;
            Report::Program {
                status: Status::Ok,
                rules: g.rules.iter().map(ToString::to_string).collect(),
            }
        }
        Command::Compile { problem, query } => compile(problem, query, config)?,
        Command::OracleCheck { count } => {
            let report = oracle_check(*count, config)?;
            let code = match &report {
                Report::OracleCheck { mismatches, .. } if !mismatches.is_empty() => exit::ORACLE_DISAGREEMENT,
                _ => exit::SUCCESS,
            };
            return Ok((report, code));
        }
    };
    let status = match &report {
        Report::Repair { status, .. } | Report::Query { status, .. } | Report::Core { status, .. } => *status,
        _ => Status::Ok,
    };
    Ok((report, exit_code(status)))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_optional(path: Option<&Path>) -> Result<String> {
    path.map(read).transpose().map(Option::unwrap_or_default)
}

fn options(config: &RunConfig) -> Result<CqaOptions> {
    let domain = if config.domain == "active" {
        DomainDeclaration::Active
    } else {
        let path = Path::new(&config.domain);
        let d = parse_domain(&read(path)?).with_context(|| format!("in {}", path.display()))?;
        DomainDeclaration::Finite(d)
    };
    Ok(CqaOptions {
        compile: CompileOptions {
            mode: config.mode.into(),
            stabilizer: config.stabilizer.into(),
            ric: config.ric.into(),
        },
        domain,
        ground: Default::default(),
        max_branches: config.max_branches,
    })
}

fn load_problem(problem: &Problem) -> Result<(DatabaseInstance, ConstraintSet)> {
    let facts = read_optional(problem.facts.as_deref())?;
    let ics = read_optional(problem.ics.as_deref())?;
    parse_instance(&facts, Schema::new()).with_context(|| format!("in {}", display(problem.facts.as_deref())))?;
    parse_problem(&facts, &ics).with_context(|| format!("in {}", display(problem.ics.as_deref())))
}

fn display(path: Option<&Path>) -> String {
    path.map_or_else(|| "<empty>".to_string(), |p| p.display().to_string())
}

fn load_query(q: &QueryArg, schema: &Schema) -> Result<Option<KQuery>> {
    let text = match (&q.query, &q.query_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Ok(None),
    };
    Ok(Some(parse_query(&text, schema).context("in query")?))
}

fn require_query(q: &QueryArg, schema: &Schema) -> Result<KQuery> {
    load_query(q, schema)?.ok_or_else(|| anyhow::anyhow!("a query is required (--q or --query-file)"))
}

fn check_universe(g: &GroundProgram, config: &RunConfig) -> Result<()> {
    if g.universe.len() > config.max_universe {
        return Err(cqa_core::Error::UniverseTooLarge {
            size: g.universe.len(),
            bound: config.max_universe,
        }
        .into());
    }
    Ok(())
}

fn repair(problem: &Problem, config: &RunConfig) -> Result<Report> {
    let (r, ics) = load_problem(problem)?;
    let opts = options(config)?;
    let program = compile_repair_program(&ics, &r.schema, &opts.compile)?;
    check_universe(&ground_with(&program, &opts.domain, &r, opts.ground)?, config)?;
    let run = repair_run(&r, &ics, &opts)?;
    let strings = |s: &BTreeSet<cqa_core::Atom>| s.iter().map(ToString::to_string).collect();
    Ok(Report::Repair {
        status: run.status().into(),
        repairs: run
            .repairs
            .iter()
            .map(|rep| RepairEntry {
                facts: strings(rep.instance.facts()),
                inserted: strings(&rep.inserted),
                deleted: strings(&rep.deleted),
            })
            .collect(),
        counts: RepairCounts {
            candidates: run.candidates.len(),
            answer_sets: run.answer_sets.len(),
            repairs: run.repairs.len(),
        },
    })
}

fn query_answers(problem: &Problem, query: &QueryArg, well_founded: bool, config: &RunConfig) -> Result<Report> {
    let (r, ics) = load_problem(problem)?;
    let q = require_query(query, &r.schema)?;
    let opts = options(config)?;
    let result = match (q.as_basic(), well_founded) {
        (Some(f), _) => {
            let (g, _) = cqa::query_ground_program(f, &r, &ics, &opts)?;
            check_universe(&g, config)?;
            if well_founded {
                wfs_consistent_answers(f, &r, &ics, &opts)?
            } else {
                cqa::consistent_answers(f, &r, &ics, &opts)?
            }
        }
        (None, true) => bail!("the well-founded evaluation needs a query without K"),
        (None, false) => evaluate_k_query(&q, &r, &ics, &opts)?,
    };
    Ok(Report::Query {
        status: result.status.into(),
        counts: QueryCounts {
            repairs: result.repairs_count,
            answers: result.answers.len(),
        },
        variables: result.variables,
        answers: result.answers.into_iter().collect(),
        certified_exact: result.certified_exact,
    })
}

fn query_mode(mode: Mode) -> RepairMode {
    match mode {
        Mode::Dalal => RepairMode::Dalal,
        Mode::Winslett | Mode::Defaults => RepairMode::Winslett,
    }
}

/// The repair or user program, with the query program appended when a
/// query is given.
fn source_program(source: &ProgramSource, config: &RunConfig) -> Result<(DatabaseInstance, Program, CqaOptions)> {
    let opts = options(config)?;
    let (r, mut program) = match &source.program {
        Some(path) => {
            let facts = read_optional(source.problem.facts.as_deref())?;
            let r = parse_instance(&facts, Schema::new())
                .with_context(|| format!("in {}", display(source.problem.facts.as_deref())))?;
            let p = parse_program(&read(path)?, &r.schema).with_context(|| format!("in {}", path.display()))?;
            (r, p)
        }
        None => {
            let (r, ics) = load_problem(&source.problem)?;
            let p = compile_repair_program(&ics, &r.schema, &opts.compile)?;
            (r, p)
        }
    };
    if let Some(q) = load_query(&source.query, &r.schema)? {
        let Some(f) = q.as_basic() else {
            bail!("only queries without K can be added to a program");
        };
        program.extend(
            compile_query_program(f, query_mode(config.mode), &r.schema)?
                .program
                .into_rules(),
        );
    }
    Ok((r, program, opts))
}

fn ground_source(source: &ProgramSource, config: &RunConfig) -> Result<(GroundProgram, CqaOptions)> {
    let (r, program, opts) = source_program(source, config)?;
    let g = ground_with(&program, &opts.domain, &r, opts.ground)?;
    check_universe(&g, config)?;
    Ok((g, opts))
}

fn fact_literals(g: &GroundProgram) -> BTreeSet<Literal> {
    g.rules
        .iter()
        .filter(|r| r.kind == RuleKind::Fact && r.body.is_empty())
        .flat_map(|r| r.head.iter().cloned())
        .collect()
}

fn shown(lits: &BTreeSet<Literal>, hidden: &BTreeSet<Literal>) -> Vec<String> {
    lits.iter()
        .filter(|l| !hidden.contains(l))
        .map(ToString::to_string)
        .collect()
}

fn core(source: &ProgramSource, all: bool, config: &RunConfig) -> Result<Report> {
    let (g, opts) = ground_source(source, config)?;
    let solve = SolveOptions {
        e_mode: config.mode == Mode::Defaults,
        strong: false,
        max_branches: opts.max_branches,
    };
    let sets: Vec<AnswerSet> = solver::answer_sets(&g, &solve)?;
    let sets = solver::filter_strong(sets, &solver::strong_constraints(&g));
    let sets = solver::optimize_weak(sets, &solver::weak_constraints(&g));
    let hidden = if all { BTreeSet::new() } else { fact_literals(&g) };
    let (status, core) = match wfs::core(&sets) {
        Ok(c) => (Status::Ok, shown(&c, &hidden)),
        Err(cqa_core::Error::EmptyCore) => (Status::NoAdmissibleRepair, Vec::new()),
        Err(e) => return Err(e.into()),
    };
    Ok(Report::Core {
        status,
        core,
        answer_sets: sets.len(),
    })
}

fn well_founded(source: &ProgramSource, all: bool, config: &RunConfig) -> Result<Report> {
    let (g, _) = ground_source(source, config)?;
    let w = wfs::well_founded(&g)?;
    let hidden = if all { BTreeSet::new() } else { fact_literals(&g) };
    Ok(Report::Wfs {
        status: Status::Ok,
        true_literals: shown(w.interpretation.true_set(), &hidden),
        false_literals: shown(w.interpretation.false_set(), &hidden),
        undefined: shown(&w.undefined(), &hidden),
        rounds: w.rounds,
    })
}

fn compile(problem: &Problem, query: &QueryArg, config: &RunConfig) -> Result<Report> {
    let (r, ics) = load_problem(problem)?;
    let opts = options(config)?;
    let mut program = compile_repair_program(&ics, &r.schema, &opts.compile)?;
    if let Some(q) = load_query(query, &r.schema)? {
        let Some(f) = q.as_basic() else {
            bail!("only queries without K compile to a single program");
        };
        program.extend(
            compile_query_program(f, query_mode(config.mode), &r.schema)?
                .program
                .into_rules(),
        );
    }
    Ok(Report::Program {
        status: Status::Ok,
        rules: emit_dlv(&program).lines().map(str::to_string).collect(),
    })
}

/// Repairs and answer sets on seeded random inputs, compared with
/// exhaustive enumeration.
fn oracle_check(count: usize, config: &RunConfig) -> Result<Report> {
    const KINDS: [BicKind; 4] = [
        BicKind::FunctionalDependency,
        BicKind::Inclusion,
        BicKind::Range,
        BicKind::Exclusion,
    ];
    let mut opts = options(config)?;
    opts.domain = DomainDeclaration::Active;
    let metric = match config.mode {
        Mode::Dalal => Metric::Cardinality,
        Mode::Winslett | Mode::Defaults => Metric::SetInclusion,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut mismatches = Vec::new();
    let mut repairs = Agreement { checked: 0, agreed: 0 };
    for _ in 0..count {
        let (r, ics, facts, text) = random_problem(&mut rng, CorpusShape::default(), &KINDS)?;
        let expected: BTreeSet<_> = enumerate_repairs_bruteforce(&r, &ics, None, metric)?
            .into_iter()
            .map(|rep| rep.instance.facts().clone())
            .collect();
        let got = match cqa::repairs_of(&r, &ics, &opts) {
            Ok(reps) => reps.into_iter().map(|rep| rep.instance.facts().clone()).collect(),
            Err(cqa_core::Error::Inconsistent) => BTreeSet::new(),
            Err(e) => return Err(e.into()),
        };
        repairs.checked += 1;
        if got == expected {
            repairs.agreed += 1;
        } else {
            mismatches.push(format!("repairs of facts `{}` under `{}`", facts.trim(), text.trim()));
        }
    }
    let mut answer_sets = Agreement { checked: 0, agreed: 0 };
    let solve = SolveOptions {
        max_branches: config.max_branches,
        ..SolveOptions::default()
    };
    for _ in 0..count {
        let (g, text) = random_ground_program(&mut rng, ORACLE_PROGRAM_ATOMS)?;
        let agree = match (naive_outcome(&g, false)?, solver::answer_sets(&g, &solve)) {
            (NaiveOutcome::AnswerSets(want), Ok(got)) => {
                want.into_iter().collect::<BTreeSet<_>>() == got.into_iter().collect::<BTreeSet<_>>()
            }
            (NaiveOutcome::Contradictory, Err(cqa_core::Error::Inconsistent)) => true,
            (_, Err(e @ cqa_core::Error::ResourceLimit(_))) => return Err(e.into()),
            _ => false,
        };
        answer_sets.checked += 1;
        if agree {
            answer_sets.agreed += 1;
        } else {
            mismatches.push(format!("answer sets of `{}`", text.trim().replace('\n', " ")));
        }
    }
    let total = mismatches.len();
    mismatches.truncate(LISTED_MISMATCHES);
    if total > LISTED_MISMATCHES {
        mismatches.push(format!("and {} more", total - LISTED_MISMATCHES));
    }
    Ok(Report::OracleCheck {
        status: if total == 0 { Status::Ok } else { Status::Error },
        seed: config.seed,
        repairs,
        answer_sets,
        mismatches,
    })
}
