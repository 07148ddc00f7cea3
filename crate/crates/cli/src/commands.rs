use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use sds_core::affine::{has_fixed_point, lift_relation, spec_fixed_point, tilde_matrix};
use sds_core::conjecture::{
    check_conjecture2, check_conjecture3, orbit_restriction_sample, ConjectureReport, Family,
    DEFAULT_CONJECTURE_CAP,
};
use sds_core::phase::{state_cap_from_env, survey_update_orders, DEFAULT_SURVEY_BUDGET};
use sds_core::system::{affine_decomposition, MAX_N};
use sds_core::{PhaseGraph, RuleVector, SdsSpec, State, UpdateOrder};

use crate::table::{brute_grid, closed_grid, grid_diff, sampled_mismatches, PeriodGrid};
use crate::{
    domain, usage, CliError, Command, ConjectureChoice, Engine, FixedPointChoice, PhaseFormat,
    Produced, SpecArgs, TableFormat,
};

type CmdResult = Result<Produced, CliError>;

pub(crate) fn dispatch(command: &Command) -> CmdResult {
    match command {
        Command::Simulate {
            spec,
            state,
            steps,
            trace,
        } => simulate(spec, state, *steps, *trace),
        Command::PhaseSpace { spec, format } => phase_space(spec, *format),
        Command::PeriodTable {
            n_min,
            n_max,
            r_max,
            fixed_point,
            engine,
            format,
            sample_rules,
            seed,
        } => period_table(
            *n_min,
            *n_max,
            *r_max,
            *fixed_point,
            *engine,
            *format,
            *sample_rules,
            *seed,
        ),
        Command::InvariantFactors { spec, lift } => invariant_factors(spec, *lift),
        Command::FixedPoint { spec } => fixed_point(spec),
        Command::SurveyOrders { spec, budget } => survey_orders(spec, *budget),
        Command::CheckConjectures {
            conj,
            m,
            n_min,
            n_max,
            r_max,
            cap,
        } => check_conjectures(*conj, m, *n_min, *n_max, *r_max, *cap),
        Command::ExportDot { spec } => phase_space(spec, PhaseFormat::Dot),
    }
}

fn build_spec(args: &SpecArgs) -> Result<SdsSpec, CliError> {
    let n = args.n;
    let rules_text = match &args.rules {
        None => "P".repeat(n),
        Some(r) if r.chars().count() == 1 => r.repeat(n),
        Some(r) => r.clone(),
    };
    let rules: RuleVector = rules_text.parse().map_err(|e| usage(format!("--rules: {e}")))?;
    if rules.n() != n {
        return Err(usage(format!(
            "--rules has {} letters but --n is {n}",
            rules.n()
        )));
    }
    let order = UpdateOrder::parse(&args.order, n).map_err(|e| usage(format!("--order: {e}")))?;
    SdsSpec::new(rules, order, args.m).map_err(|e| usage(e.to_string()))
}

fn require_binary(spec: &SdsSpec, what: &str) -> Result<(), CliError> {
    if spec.modulus() != 2 {
        return Err(usage(format!("{what} needs --m 2")));
    }
    Ok(())
}

fn simulate(args: &SpecArgs, state: &str, steps: u64, trace: bool) -> CmdResult {
    let spec = build_spec(args)?;
    let start = State::parse(state, spec.modulus()).map_err(|e| usage(format!("--state: {e}")))?;
    if start.n() != spec.n() {
        return Err(usage(format!(
            "--state has {} digits but --n is {}",
            start.n(),
            spec.n()
        )));
    }
    let mut out = String::new();
    let mut cur = start;
    for _ in 0..steps {
        cur = spec.apply(&cur).map_err(domain)?;
        if trace {
            let _ = writeln!(out, "{cur}");
        }
    }
    if !trace {
        let _ = writeln!(out, "{cur}");
    }
    Ok(Produced::text(out))
}

fn phase_space(args: &SpecArgs, format: PhaseFormat) -> CmdResult {
    let spec = build_spec(args)?;
    let graph = PhaseGraph::build(&spec, state_cap_from_env()).map_err(domain)?;
    let text = match format {
        PhaseFormat::Dot => graph.to_dot().map_err(domain)?,
        PhaseFormat::Csv => graph.orbit_decomposition().to_csv(spec.n()),
        PhaseFormat::Json => graph.orbit_decomposition().to_json(&spec) + "\n",
        PhaseFormat::Text => {
            let table = graph.orbit_decomposition();
            let mut out = format!("{spec}\nstates {}\n", table.total_states);
            for (r, c) in &table.entries {
                let _ = writeln!(out, "period {r}: {c}");
            }
            out
        }
    };
    Ok(Produced::text(text))
}

#[allow(clippy::too_many_arguments)]
fn period_table(
    n_min: u64,
    n_max: u64,
    r_max: u64,
    fixed_point: FixedPointChoice,
    engine: Engine,
    format: TableFormat,
    sample_rules: usize,
    seed: u64,
) -> CmdResult {
    if n_min < 3 || n_min > n_max || n_max > MAX_N as u64 {
        return Err(usage(format!(
            "need 3 <= --n-min <= --n-max <= {MAX_N}, got {n_min}..{n_max}"
        )));
    }
    if r_max == 0 {
        return Err(usage("--r-max must be at least 1"));
    }
    if sample_rules > 0 && engine == Engine::Closed {
        return Err(usage("--sample-rules needs --engine brute or both"));
    }
    let classes: &[bool] = match fixed_point {
        FixedPointChoice::Yes => &[true],
        FixedPointChoice::No => &[false],
        FixedPointChoice::Both => &[true, false],
    };
    let cap = state_cap_from_env();
    let render = |g: &PeriodGrid| match format {
        TableFormat::Text => g.to_text(),
        TableFormat::Csv => g.to_csv(),
        TableFormat::Json => g.to_json(),
    };
    let closed = || closed_grid(classes, n_min, n_max, r_max).map_err(CliError::Domain);
    let brute = || brute_grid(classes, n_min, n_max, r_max, cap).map_err(CliError::Domain);
    let (grid, note) = match engine {
        Engine::Closed => (closed()?, None),
        Engine::Brute => (brute()?, None),
        Engine::Both => {
            let c = closed()?;
            let b = brute()?;
            if let Some(diff) = grid_diff(&c, &b) {
                return Err(CliError::Mismatch(diff));
            }
            let note = format!(
                "closed form and brute force agree on all {} entries",
                c.entry_count()
            );
            (c, Some(note))
        }
    };
    let mut note = note;
    if sample_rules > 0 {
        let bad = sampled_mismatches(&grid, sample_rules, seed, cap).map_err(CliError::Domain)?;
        if !bad.is_empty() {
            return Err(CliError::Mismatch(bad.join("\n") + "\n"));
        }
        let extra = format!(
            "{sample_rules} random rule vectors per n (seed {seed}) match their class rows"
        );
        note = Some(match note {
            Some(n) => format!("{n}\n{extra}"),
            None => extra,
        });
    }
    Ok(Produced {
        text: render(&grid),
        note,
        append: false,
    })
}

fn invariant_factors(args: &SpecArgs, lift: bool) -> CmdResult {
    let spec = build_spec(args)?;
    require_binary(&spec, "invariant-factors")?;
    let form = affine_decomposition(&spec).map_err(domain)?;
    let factors = form.matrix.invariant_factors().map_err(domain)?;
    let mut out = String::new();
    let _ = writeln!(out, "invariant factors: {factors}");
    let _ = writeln!(out, "characteristic polynomial: {}", form.matrix.char_poly().map_err(domain)?);
    let _ = writeln!(out, "minimal polynomial: {}", form.matrix.min_poly().map_err(domain)?);
    if lift {
        let t = tilde_matrix(&form.matrix, &form.offset).map_err(domain)?;
        let lifted = t.invariant_factors().map_err(domain)?;
        let _ = writeln!(out, "offset: {}", form.offset);
        let _ = writeln!(out, "lift invariant factors: {lifted}");
        let _ = writeln!(out, "lift relation: {:?}", lift_relation(&factors, &lifted));
    }
    Ok(Produced::text(out))
}

fn fixed_point(args: &SpecArgs) -> CmdResult {
    let spec = build_spec(args)?;
    require_binary(&spec, "fixed-point")?;
    let form = affine_decomposition(&spec).map_err(domain)?;
    let report = has_fixed_point(&form.matrix, &form.offset).map_err(domain)?;
    let text = match report.witness {
        Some(w) => format!("fixed point: yes\nwitness: {w}\n"),
        None => "fixed point: no\n".to_string(),
    };
    debug_assert_eq!(spec_fixed_point(&spec).map(|r| r.exists).ok(), Some(report.exists));
    Ok(Produced::text(text))
}

fn survey_orders(args: &SpecArgs, budget: Option<u128>) -> CmdResult {
    let spec = build_spec(args)?;
    let survey = survey_update_orders(&spec, budget.unwrap_or(DEFAULT_SURVEY_BUDGET)).map_err(domain)?;
    let mut out = format!(
        "{} update orders, {} classes\n",
        survey.orders_examined,
        survey.class_count()
    );
    for (table, orders) in &survey.classes {
        let _ = writeln!(
            out,
            "{{{}}}: {} orders, e.g. {}",
            table.canonical_key(),
            orders.len(),
            orders[0]
        );
    }
    Ok(Produced::text(out))
}

fn check_conjectures(
    conj: ConjectureChoice,
    moduli: &[u32],
    n_min: usize,
    n_max: usize,
    r_max: u64,
    cap: Option<u64>,
) -> CmdResult {
    if n_min < 3 || n_min > n_max || n_max > MAX_N {
        return Err(usage(format!(
            "need 3 <= --n-min <= --n-max <= {MAX_N}, got {n_min}..{n_max}"
        )));
    }
    if moduli.is_empty() || moduli.iter().any(|&m| m < 2) {
        return Err(usage("--m needs moduli of at least 2"));
    }
    if r_max == 0 {
        return Err(usage("--r-max must be at least 1"));
    }
    if conj == ConjectureChoice::Three {
        if let Some(m) = moduli.iter().find(|m| !m.is_power_of_two()) {
            return Err(usage(format!("conjecture 3 needs powers of 2, got m={m}")));
        }
    }
    let cap = cap.unwrap_or(DEFAULT_CONJECTURE_CAP);
    let want = |k: ConjectureChoice| conj == k || conj == ConjectureChoice::All;
    let grid: Vec<(u32, usize)> = moduli
        .iter()
        .flat_map(|&m| (n_min..=n_max).map(move |n| (m, n)))
        .collect();

    let mut out = String::new();
    if want(ConjectureChoice::One) {
        for &m in moduli {
            for family in Family::BOTH {
                for r in 1..=r_max {
                    let s = orbit_restriction_sample(m, family, n_min..=n_max, r, cap).map_err(domain)?;
                    let line = json!({
                        "conj": 1,
                        "family": family.to_string(),
                        "m": m,
                        "r": r,
                        "observed": s.observed,
                        "per_n": s.per_n.iter().map(|(n, c)| (n.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
                    });
                    let _ = writeln!(out, "{line}");
                }
            }
        }
    }
    let mut report = ConjectureReport::default();
    if want(ConjectureChoice::Two) {
        let parts: Vec<ConjectureReport> = grid
            .par_iter()
            .map(|&(m, n)| check_conjecture2(m, n, r_max, cap))
            .collect::<Result<_, _>>()
            .map_err(domain)?;
        parts.into_iter().for_each(|p| report.extend(p));
    }
    if want(ConjectureChoice::Three) {
        let parts: Vec<ConjectureReport> = grid
            .par_iter()
            .filter(|(m, _)| m.is_power_of_two())
            .map(|&(m, n)| check_conjecture3(m, n, cap))
            .collect::<Result<_, _>>()
            .map_err(domain)?;
        parts.into_iter().for_each(|p| report.extend(p));
    }
    out.push_str(&report.to_json_lines().map_err(domain)?);
    let note = format!(
        "{} cells, {} violated, {} skipped",
        report.cells.len(),
        report.violations().count(),
        report.skipped().count()
    );
    Ok(Produced {
        text: out,
        note: Some(note),
        append: true,
    })
}
