//! Integer programs in LP file format.
//!
//! Two programs are available:
//!
//! * [`LpVariant::Preemptive`]: binary `x_j_m_t` (job `j` on node `m` in slot
//!   `t`), with `z_j_m` and `w_j_t` selecting the job's node set and slot set
//!   so every admitted job runs on the same `q_j` nodes in each of its `p_j`
//!   slots.
//! * [`LpVariant::EqualJobs`]: binary start indicators `s_j_t`, start counts
//!   `n_t` and node demand `e_t`.
//!
//! Both maximize `sum v_j y_j - sum b_t aux_t` with `aux_t >= e_t - g_t` and
//! `aux_t >= 0`, which equals the pooled brown cost at any optimum. Variables
//! outside a job's window are never created.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::green::GreenTrace;
use crate::model::{Job, SimConfig};
use crate::pricing::Tariff;

use super::OfflineSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpVariant {
    Preemptive,
    EqualJobs,
}

impl FromStr for LpVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "preemptive" => Ok(LpVariant::Preemptive),
            "equal-jobs" | "equal" => Ok(LpVariant::EqualJobs),
            other => Err(Error::InvalidConfig(format!(
                "unknown LP variant {other:?} (expected preemptive or equal-jobs)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn parse(token: &str) -> Option<Self> {
        match token {
            "<=" | "=<" | "<" => Some(Sense::Le),
            ">=" | "=>" | ">" => Some(Sense::Ge),
            "=" => Some(Sense::Eq),
            _ => None,
        }
    }
}

pub type Terms = Vec<(String, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Terms,
    pub sense: Sense,
    pub rhs: f64,
}

/// Variable bound; `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub var: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// A mixed-integer program with a maximization objective. Variables are
/// non-negative unless a [`Bound`] says otherwise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpModel {
    pub comment: String,
    pub objective: Terms,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(String, f64)]) {
    for (i, (var, coef)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let sign = if coef.is_sign_negative() { '-' } else { '+' };
        let mag = coef.abs();
        if mag == 1.0 {
            let _ = write!(out, " {sign} {var}");
        } else {
            let _ = write!(out, " {sign} {mag} {var}");
        }
    }
}

fn write_names(out: &mut String, names: &[String]) {
    for chunk in names.chunks(TERMS_PER_LINE) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
}

impl LpModel {
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        for line in self.comment.lines() {
            let _ = writeln!(out, "\\ {line}");
        }
        out.push_str("Maximize\n obj:");
        write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_terms(&mut out, &c.terms);
            let _ = writeln!(out, " {} {}", c.sense.symbol(), c.rhs);
        }
        if !self.bounds.is_empty() {
            out.push_str("Bounds\n");
            for b in &self.bounds {
                let _ = match (b.lower, b.upper) {
                    (None, None) => writeln!(out, " {} free", b.var),
                    (Some(lo), None) => writeln!(out, " {} >= {lo}", b.var),
                    (None, Some(hi)) => writeln!(out, " -inf <= {} <= {hi}", b.var),
                    (Some(lo), Some(hi)) => writeln!(out, " {lo} <= {} <= {hi}", b.var),
                };
            }
        }
        if !self.binaries.is_empty() {
            out.push_str("Binaries\n");
            write_names(&mut out, &self.binaries);
        }
        if !self.generals.is_empty() {
            out.push_str("Generals\n");
            write_names(&mut out, &self.generals);
        }
        out.push_str("End\n");
        out
    }

    pub fn write(&self, mut out: impl Write) -> Result<()> {
        out.write_all(self.to_lp_string().as_bytes())?;
        Ok(())
    }

    /// Reads the subset of the LP format produced by [`LpModel::to_lp_string`]:
    /// one maximization objective, labelled rows, simple bounds and integer
    /// declarations.
    pub fn parse(text: &str) -> Result<Self> {
        let mut model = LpModel::default();
        let mut comment = Vec::new();
        let mut section = Section::Preamble;
        let mut rows: Vec<(usize, String)> = Vec::new();
        let mut bounds: Vec<(usize, String)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if let Some(c) = line.strip_prefix('\\') {
                if section == Section::Preamble {
                    comment.push(c.strip_prefix(' ').unwrap_or(c).to_string());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if let Some(next) = Section::header(line) {
                if next == Section::Minimize {
                    return Err(lp_error(lineno, "only maximization models are supported"));
                }
                section = next;
                continue;
            }
            match section {
                Section::Preamble | Section::End => return Err(lp_error(lineno, format!("unexpected text {line:?}"))),
                Section::Maximize | Section::Minimize | Section::SubjectTo => rows.push((lineno, line.to_string())),
                Section::Bounds => bounds.push((lineno, line.to_string())),
                Section::Binaries => model.binaries.extend(line.split_whitespace().map(String::from)),
                Section::Generals => model.generals.extend(line.split_whitespace().map(String::from)),
            }
        }
        model.comment = comment.join("\n");

        let mut objective_seen = false;
        for row in split_rows(&rows)? {
            if row.sense.is_none() {
                if objective_seen {
                    return Err(lp_error(row.line, "row without a relation"));
                }
                objective_seen = true;
                model.objective = row.terms;
                continue;
            }
            let (sense, rhs) = (row.sense.unwrap(), row.rhs);
            model.constraints.push(Constraint {
                name: row.name.unwrap_or_else(|| format!("r{}", model.constraints.len())),
                terms: row.terms,
                sense,
                rhs,
            });
        }
        for (lineno, line) in bounds {
            model.bounds.push(parse_bound(lineno, &line)?);
        }
        Ok(model)
    }

    fn variables(&self) -> BTreeSet<&str> {
        let mut vars: BTreeSet<&str> = self.objective.iter().map(|(v, _)| v.as_str()).collect();
        for c in &self.constraints {
            vars.extend(c.terms.iter().map(|(v, _)| v.as_str()));
        }
        vars.extend(self.binaries.iter().map(String::as_str));
        vars.extend(self.generals.iter().map(String::as_str));
        vars
    }

    pub fn num_variables(&self) -> usize {
        self.variables().len()
    }

    /// Objective value of an assignment; missing variables count as 0.
    pub fn evaluate(&self, values: &HashMap<String, f64>) -> f64 {
        dot(&self.objective, values)
    }

    /// Every violated constraint, bound or integrality requirement.
    pub fn violations(&self, values: &HashMap<String, f64>, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.constraints {
            let lhs = dot(&c.terms, values);
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs + tol,
                Sense::Ge => lhs >= c.rhs - tol,
                Sense::Eq => (lhs - c.rhs).abs() <= tol,
            };
            if !ok {
                out.push(format!("{}: {} {} {}", c.name, lhs, c.sense.symbol(), c.rhs));
            }
        }
        let value = |v: &str| values.get(v).copied().unwrap_or(0.0);
        let explicit: HashMap<&str, &Bound> = self.bounds.iter().map(|b| (b.var.as_str(), b)).collect();
        for var in self.variables() {
            let x = value(var);
            let (lo, hi) = match explicit.get(var) {
                Some(b) => (b.lower, b.upper),
                None => (Some(0.0), None),
            };
            if lo.is_some_and(|lo| x < lo - tol) || hi.is_some_and(|hi| x > hi + tol) {
                out.push(format!("{var} = {x} outside bounds"));
            }
        }
        for var in &self.binaries {
            let x = value(var);
            if (x - 0.0).abs() > tol && (x - 1.0).abs() > tol {
                out.push(format!("{var} = {x} is not binary"));
            }
        }
        for var in &self.generals {
            let x = value(var);
            if (x - x.round()).abs() > tol {
                out.push(format!("{var} = {x} is not integral"));
            }
        }
        out
    }
}

fn dot(terms: &[(String, f64)], values: &HashMap<String, f64>) -> f64 {
    terms
        .iter()
        .map(|(v, c)| c * values.get(v).copied().unwrap_or(0.0))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Maximize,
    Minimize,
    SubjectTo,
    Bounds,
    Binaries,
    Generals,
    End,
}

impl Section {
    fn header(line: &str) -> Option<Self> {
        match line.to_ascii_lowercase().as_str() {
            "maximize" | "maximum" | "max" => Some(Section::Maximize),
            "minimize" | "minimum" | "min" => Some(Section::Minimize),
            "subject to" | "such that" | "st" | "s.t." => Some(Section::SubjectTo),
            "bounds" | "bound" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "generals" | "general" | "gen" => Some(Section::Generals),
            "end" => Some(Section::End),
            _ => None,
        }
    }
}

fn lp_error(line: usize, message: impl Into<String>) -> Error {
    Error::parse(std::path::Path::new("<lp>"), line, message)
}

struct Row {
    line: usize,
    name: Option<String>,
    terms: Terms,
    sense: Option<Sense>,
    rhs: f64,
}

fn split_rows(lines: &[(usize, String)]) -> Result<Vec<Row>> {
    let mut tokens: Vec<(usize, &str)> = Vec::new();
    for (lineno, line) in lines {
        tokens.extend(line.split_whitespace().map(|t| (*lineno, t)));
    }
    let mut rows = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let line = tokens[i].0;
        let mut row = Row {
            line,
            name: None,
            terms: Vec::new(),
            sense: None,
            rhs: 0.0,
        };
        if let Some(name) = tokens[i].1.strip_suffix(':') {
            row.name = Some(name.to_string());
            i += 1;
        }
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        while i < tokens.len() {
            let (lineno, tok) = tokens[i];
            if tok.ends_with(':') {
                break;
            }
            i += 1;
            if let Some(sense) = Sense::parse(tok) {
                let mut rhs_sign = 1.0;
                let mut rhs_tok = tokens.get(i).map(|t| t.1);
                if matches!(rhs_tok, Some("-") | Some("+")) {
                    rhs_sign = if rhs_tok == Some("-") { -1.0 } else { 1.0 };
                    i += 1;
                    rhs_tok = tokens.get(i).map(|t| t.1);
                }
                let rhs: f64 = rhs_tok
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| lp_error(lineno, "relation without a numeric right-hand side"))?;
                i += 1;
                row.sense = Some(sense);
                row.rhs = rhs_sign * rhs;
                break;
            }
            match tok {
                "+" => sign = 1.0,
                "-" => sign = -sign,
                _ => {
                    if let Ok(x) = tok.parse::<f64>() {
                        coef = Some(coef.unwrap_or(1.0) * x);
                    } else {
                        row.terms.push((tok.to_string(), sign * coef.unwrap_or(1.0)));
                        sign = 1.0;
                        coef = None;
                    }
                }
            }
        }
        if coef.is_some() {
            return Err(lp_error(line, "dangling coefficient"));
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_number(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        t => t.parse().ok(),
    }
}

fn parse_bound(lineno: usize, line: &str) -> Result<Bound> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let finite = |x: f64| x.is_finite().then_some(x);
    let bad = || lp_error(lineno, format!("unsupported bound {line:?}"));
    match toks[..] {
        [var, free] if free.eq_ignore_ascii_case("free") => Ok(Bound {
            var: var.to_string(),
            lower: None,
            upper: None,
        }),
        [lo, "<=", var, "<=", hi] => Ok(Bound {
            var: var.to_string(),
            lower: finite(parse_number(lo).ok_or_else(bad)?),
            upper: finite(parse_number(hi).ok_or_else(bad)?),
        }),
        [var, op, x] => {
            let x = parse_number(x).ok_or_else(bad)?;
            match Sense::parse(op).ok_or_else(bad)? {
                Sense::Ge => Ok(Bound {
                    var: var.to_string(),
                    lower: finite(x),
                    upper: None,
                }),
                Sense::Le => Ok(Bound {
                    var: var.to_string(),
                    lower: Some(0.0),
                    upper: finite(x),
                }),
                Sense::Eq => Ok(Bound {
                    var: var.to_string(),
                    lower: Some(x),
                    upper: Some(x),
                }),
            }
        }
        _ => Err(bad()),
    }
}

fn y(j: &Job) -> String {
    format!("y_{}", j.id)
}
fn x(j: &Job, m: usize, t: usize) -> String {
    format!("x_{}_{}_{}", j.id, m, t)
}
fn z(j: &Job, m: usize) -> String {
    format!("z_{}_{}", j.id, m)
}
fn w(j: &Job, t: usize) -> String {
    format!("w_{}_{}", j.id, t)
}
fn s(j: &Job, t: usize) -> String {
    format!("s_{}_{}", j.id, t)
}
fn aux(t: usize) -> String {
    format!("aux_{t}")
}
fn n(t: usize) -> String {
    format!("n_{t}")
}
fn e(t: usize) -> String {
    format!("e_{t}")
}

fn sorted_jobs(jobs: &[Job], config: &SimConfig) -> Result<Vec<Job>> {
    let mut ids = std::collections::HashSet::new();
    for j in jobs {
        j.validate(config)?;
        if !ids.insert(j.id) {
            return Err(Error::DuplicatePlacement(j.id));
        }
    }
    let mut sorted = jobs.to_vec();
    sorted.sort_by_key(|j| j.id);
    Ok(sorted)
}

/// Builds the chosen program for an instance. The output is a pure function
/// of its inputs, so repeated emission is byte-identical.
pub fn emit_lp(
    jobs: &[Job],
    green: &GreenTrace,
    tariff: &Tariff,
    config: &SimConfig,
    variant: LpVariant,
) -> Result<LpModel> {
    config.validate()?;
    tariff.validate(config)?;
    let jobs = sorted_jobs(jobs, config)?;
    let horizon = config.horizon_slots;
    let costs = tariff.unit_costs(config);

    let mut model = LpModel {
        comment: format!(
            "greensched {} model: {} jobs, {} slots, {} machines",
            match variant {
                LpVariant::Preemptive => "preemptive",
                LpVariant::EqualJobs => "equal-jobs",
            },
            jobs.len(),
            horizon,
            config.machines
        ),
        ..LpModel::default()
    };
    for j in &jobs {
        model.objective.push((y(j), tariff.job_revenue(j, config)));
    }
    for (t, c) in costs.iter().enumerate().take(horizon) {
        model.objective.push((aux(t), -c));
    }
    match variant {
        LpVariant::Preemptive => preemptive_rows(&mut model, &jobs, green, config),
        LpVariant::EqualJobs => equal_jobs_rows(&mut model, &jobs, green, config),
    }
    Ok(model)
}

fn preemptive_rows(model: &mut LpModel, jobs: &[Job], green: &GreenTrace, config: &SimConfig) {
    let machines = config.machines;
    let window = |j: &Job| j.release..=j.deadline;
    let rows = &mut model.constraints;

    // One job per node and slot.
    for m in 0..machines {
        for t in 0..config.horizon_slots {
            let terms: Terms = jobs
                .iter()
                .filter(|j| window(j).contains(&t))
                .map(|j| (x(j, m, t), 1.0))
                .collect();
            if !terms.is_empty() {
                rows.push(Constraint {
                    name: format!("node_{m}_{t}"),
                    terms,
                    sense: Sense::Le,
                    rhs: 1.0,
                });
            }
        }
    }
    for j in jobs {
        let p = j.proc_time as f64;
        let q = j.nodes as f64;
        for m in 0..machines {
            let mut terms: Terms = window(j).map(|t| (x(j, m, t), 1.0)).collect();
            terms.push((z(j, m), -p));
            rows.push(Constraint {
                name: format!("fixed_{}_{m}", j.id),
                terms,
                sense: Sense::Eq,
                rhs: 0.0,
            });
        }
        for t in window(j) {
            let mut terms: Terms = (0..machines).map(|m| (x(j, m, t), 1.0)).collect();
            terms.push((w(j, t), -q));
            rows.push(Constraint {
                name: format!("parallel_{}_{t}", j.id),
                terms,
                sense: Sense::Eq,
                rhs: 0.0,
            });
        }
        let mut terms: Terms = (0..machines).map(|m| (z(j, m), 1.0)).collect();
        terms.push((y(j), -q));
        rows.push(Constraint {
            name: format!("nodeset_{}", j.id),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
        let mut terms: Terms = window(j).map(|t| (w(j, t), 1.0)).collect();
        terms.push((y(j), -p));
        rows.push(Constraint {
            name: format!("slotset_{}", j.id),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
        let mut terms: Terms = (0..machines)
            .flat_map(|m| window(j).map(move |t| (x(j, m, t), 1.0)))
            .collect();
        terms.push((y(j), -(p * q)));
        rows.push(Constraint {
            name: format!("finish_{}", j.id),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    for t in 0..config.horizon_slots {
        let mut terms: Terms = vec![(aux(t), 1.0)];
        for j in jobs.iter().filter(|j| window(j).contains(&t)) {
            terms.extend((0..machines).map(|m| (x(j, m, t), -1.0)));
        }
        rows.push(Constraint {
            name: format!("brown_{t}"),
            terms,
            sense: Sense::Ge,
            rhs: 0.0 - green.at(t) as f64,
        });
    }

    for j in jobs {
        model.binaries.push(y(j));
        model.binaries.extend((0..machines).map(|m| z(j, m)));
        model.binaries.extend(window(j).map(|t| w(j, t)));
        for m in 0..machines {
            model.binaries.extend(window(j).map(|t| x(j, m, t)));
        }
    }
}

fn equal_jobs_rows(model: &mut LpModel, jobs: &[Job], green: &GreenTrace, config: &SimConfig) {
    let starts = |j: &Job| j.release..=j.latest_start().expect("validated job fits its window");
    let uniform = jobs
        .windows(2)
        .all(|w| (w[0].proc_time, w[0].nodes) == (w[1].proc_time, w[1].nodes));
    let rows = &mut model.constraints;

    for j in jobs {
        let mut terms: Terms = starts(j).map(|t| (s(j, t), 1.0)).collect();
        terms.push((y(j), -1.0));
        rows.push(Constraint {
            name: format!("start_{}", j.id),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    for t in 0..config.horizon_slots {
        let mut terms: Terms = jobs
            .iter()
            .filter(|j| starts(j).contains(&t))
            .map(|j| (s(j, t), 1.0))
            .collect();
        terms.push((n(t), -1.0));
        rows.push(Constraint {
            name: format!("starts_{t}"),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    for t in 0..config.horizon_slots {
        let mut terms: Terms = vec![(e(t), 1.0)];
        match jobs.first() {
            Some(first) if uniform => {
                let lo = (t + 1).saturating_sub(first.proc_time);
                terms.extend((lo..=t).map(|k| (n(k), -(first.nodes as f64))));
            }
            _ => {
                for j in jobs {
                    let lo = (t + 1).saturating_sub(j.proc_time);
                    terms.extend(
                        starts(j)
                            .filter(|k| (lo..=t).contains(k))
                            .map(|k| (s(j, k), -(j.nodes as f64))),
                    );
                }
            }
        }
        rows.push(Constraint {
            name: format!("demand_{t}"),
            terms,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    for t in 0..config.horizon_slots {
        rows.push(Constraint {
            name: format!("capacity_{t}"),
            terms: vec![(e(t), 1.0)],
            sense: Sense::Le,
            rhs: config.machines as f64,
        });
        rows.push(Constraint {
            name: format!("brown_{t}"),
            terms: vec![(aux(t), 1.0), (e(t), -1.0)],
            sense: Sense::Ge,
            rhs: 0.0 - green.at(t) as f64,
        });
    }

    for j in jobs {
        model.binaries.push(y(j));
        model.binaries.extend(starts(j).map(|t| s(j, t)));
    }
    model.generals.extend((0..config.horizon_slots).map(n));
    model.generals.extend((0..config.horizon_slots).map(e));
}

/// Variable values that encode `solution` in the program built by
/// [`emit_lp`] for the same instance.
pub fn solution_values(
    solution: &OfflineSolution,
    jobs: &[Job],
    green: &GreenTrace,
    config: &SimConfig,
    variant: LpVariant,
) -> HashMap<String, f64> {
    let mut values = HashMap::new();
    let schedule = &solution.schedule;
    for j in jobs {
        let Some(p) = schedule.placement(j.id) else {
            continue;
        };
        values.insert(y(j), 1.0);
        match variant {
            LpVariant::Preemptive => {
                let nodes = &solution
                    .nodes
                    .iter()
                    .find(|a| a.job_id == j.id)
                    .expect("every placement has a node set")
                    .nodes;
                for &m in nodes {
                    values.insert(z(j, m), 1.0);
                    for &t in &p.active_slots {
                        values.insert(x(j, m, t), 1.0);
                    }
                }
                for &t in &p.active_slots {
                    values.insert(w(j, t), 1.0);
                }
            }
            LpVariant::EqualJobs => {
                values.insert(s(j, p.start()), 1.0);
                *values.entry(n(p.start())).or_insert(0.0) += 1.0;
            }
        }
    }
    for (t, &d) in schedule.demand().iter().enumerate() {
        if variant == LpVariant::EqualJobs {
            values.insert(e(t), d as f64);
        }
        values.insert(aux(t), d.saturating_sub(green.at(t)) as f64);
    }
    debug_assert_eq!(schedule.demand().len(), config.horizon_slots);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::{solve_nonpreemptive_exact, solve_preemptive_exact, Limits};

    fn config(machines: usize, horizon: usize) -> SimConfig {
        SimConfig {
            machines,
            horizon_slots: horizon,
            ..SimConfig::default()
        }
    }

    #[test]
    fn smallest_model_round_trips() {
        let cfg = config(1, 2);
        let jobs = [Job::new(1, 0, 1, 1, 1)];
        let model = emit_lp(
            &jobs,
            &GreenTrace::zeros(2),
            &Tariff::default(),
            &cfg,
            LpVariant::EqualJobs,
        )
        .unwrap();
        let text = model.to_lp_string();
        for var in ["y_1", "s_1_0", "s_1_1", "aux_0", "aux_1"] {
            assert!(text.contains(var), "{var} missing from\n{text}");
        }
        assert_eq!(LpModel::parse(&text).unwrap(), model);
    }

    #[test]
    fn equal_jobs_demand_counts_running_starts() {
        let cfg = config(4, 6);
        let jobs = [Job::new(1, 0, 5, 3, 2), Job::new(2, 1, 5, 3, 2)];
        let model = emit_lp(
            &jobs,
            &GreenTrace::zeros(6),
            &Tariff::default(),
            &cfg,
            LpVariant::EqualJobs,
        )
        .unwrap();
        let row = model.constraints.iter().find(|c| c.name == "demand_4").unwrap();
        let expect: Terms = vec![
            ("e_4".into(), 1.0),
            ("n_2".into(), -2.0),
            ("n_3".into(), -2.0),
            ("n_4".into(), -2.0),
        ];
        assert_eq!(row.terms, expect);
    }

    #[test]
    fn exact_solutions_satisfy_their_programs() {
        let cfg = config(2, 6);
        let green = GreenTrace::new(vec![0, 1, 2, 2, 0, 1]);
        let tariff = Tariff::default();
        let jobs = [
            Job::new(1, 0, 5, 2, 1),
            Job::new(2, 1, 4, 2, 2),
            Job::new(3, 0, 3, 3, 1),
        ];
        for variant in [LpVariant::Preemptive, LpVariant::EqualJobs] {
            let sol = match variant {
                LpVariant::Preemptive => solve_preemptive_exact(&jobs, &green, &tariff, &cfg, &Limits::preemptive()),
                LpVariant::EqualJobs => {
                    solve_nonpreemptive_exact(&jobs, &green, &tariff, &cfg, &Limits::nonpreemptive())
                }
            }
            .unwrap();
            let model = emit_lp(&jobs, &green, &tariff, &cfg, variant).unwrap();
            let values = solution_values(&sol, &jobs, &green, &cfg, variant);
            assert_eq!(model.violations(&values, 1e-9), Vec::<String>::new());
            assert!((model.evaluate(&values) - sol.net_profit).abs() < 1e-12);
        }
    }

    #[test]
    fn parser_accepts_hand_written_models() {
        let text = "\\ note\nMaximize\n obj: 2 a + 3 b\nSubject To\n c1: a + b <= 4\n c2: - a\n   + b >= - 1\nBounds\n b <= 3\n -inf <= a <= 2\nGenerals\n a b\nEnd\n";
        let m = LpModel::parse(text).unwrap();
        assert_eq!(m.comment, "note");
        assert_eq!(m.constraints[1].terms, vec![("a".into(), -1.0), ("b".into(), 1.0)]);
        assert_eq!(m.constraints[1].rhs, -1.0);
        assert_eq!(m.bounds[1].lower, None);
        let values: HashMap<String, f64> = [("a".into(), 1.0), ("b".into(), 3.0)].into();
        assert_eq!(m.evaluate(&values), 11.0);
        assert!(m.violations(&values, 0.0).is_empty());
        assert!(LpModel::parse("Minimize\n obj: a\nEnd\n").is_err());
    }
}
