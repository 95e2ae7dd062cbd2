//! Check execution: per-check context, assertion bookkeeping and the
//! scenario runner.

use std::collections::BTreeMap;
use std::time::Instant;

use modindex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::build::{mix, seeded_rng};
use crate::checks::{self, OpDef};
use crate::scenario::{Scenario, ScenarioError};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "==",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub identity: String,
    pub value: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
}

impl Assertion {
    fn holds(relation: Relation, value: f64, bound: f64) -> bool {
        match relation {
            Relation::Le => value <= bound,
            Relation::Ge => value >= bound,
            Relation::Eq => value == bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub op: String,
    pub module: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub assertions: Vec<Assertion>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub summary: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Seconds; kept out of the JSON document so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: f64,
}

impl CheckReport {
    pub fn passed_assertions(&self) -> usize {
        self.assertions.iter().filter(|a| a.pass).count()
    }

    /// The failing assertion with the largest violation, else the `<=`
    /// assertion closest to its bound.
    pub fn worst(&self) -> Option<&Assertion> {
        if let Some(a) = self.assertions.iter().find(|a| !a.pass) {
            return Some(a);
        }
        self.assertions
            .iter()
            .filter(|a| a.relation == Relation::Le && a.bound > 0.0)
            .max_by(|a, b| (a.value / a.bound).total_cmp(&(b.value / b.bound)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub summary: Summary,
    pub checks: Vec<CheckReport>,
    pub inputs: Scenario,
    #[serde(skip)]
    pub wall_time: f64,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.errors == 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.id == id)
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    /// 0 uses the rayon default.
    pub jobs: usize,
}

/// State handed to one check while it runs.
pub struct Ctx {
    pub rng: ChaCha8Rng,
    seed: u64,
    trial: u64,
    tol_check: Option<f64>,
    tol_global: Option<f64>,
    tol_named: BTreeMap<String, f64>,
    assertions: Vec<Assertion>,
    values: BTreeMap<String, Value>,
    summary: Vec<String>,
    warnings: Vec<String>,
}

impl Ctx {
    pub fn new(seed: u64, index: u64) -> Ctx {
        Ctx {
            rng: seeded_rng(seed, index),
            seed,
            trial: 0,
            tol_check: None,
            tol_global: None,
            tol_named: BTreeMap::new(),
            assertions: Vec::new(),
            values: BTreeMap::new(),
            summary: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Runs `f` with a generator that depends only on the scenario seed,
    /// the current trial and `local`, so equal `seeded` specs agree.
    pub fn with_seed<T>(&mut self, local: u64, f: impl FnOnce(&mut Ctx) -> T) -> T {
        let fresh = seeded_rng(mix(self.seed, self.trial), local);
        let saved = std::mem::replace(&mut self.rng, fresh);
        let out = f(self);
        self.rng = saved;
        out
    }

    pub fn trials(&mut self, n: usize, mut f: impl FnMut(&mut Ctx, usize) -> anyhow::Result<()>) -> anyhow::Result<()> {
        for k in 0..n.max(1) {
            self.trial = k as u64;
            f(self, k)?;
        }
        self.trial = 0;
        Ok(())
    }

    fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tol_named.get(name).copied().or(self.tol_check).or(self.tol_global).unwrap_or(default)
    }

    fn record(&mut self, name: &str, identity: &str, value: f64, relation: Relation, bound: f64) {
        let pass = Assertion::holds(relation, value, bound);
        if let Some(a) = self.assertions.iter_mut().find(|a| a.name == name) {
            // repeated assertions keep the worst instance
            let worse = match relation {
                _ if a.pass && !pass => true,
                _ if !a.pass && pass => false,
                Relation::Le => value > a.value || value.is_nan(),
                Relation::Ge => value < a.value || value.is_nan(),
                Relation::Eq => false,
            };
            if worse {
                a.value = value;
                a.pass = pass;
            }
            return;
        }
        self.assertions.push(Assertion { name: name.into(), identity: identity.into(), value, relation, bound, pass });
    }

    /// `value ≤ tolerance`; the tolerance can be overridden by the scenario.
    pub fn le(&mut self, name: &str, identity: &str, value: f64, default_tol: f64) {
        let tol = self.tolerance(name, default_tol);
        self.record(name, identity, value, Relation::Le, tol);
    }

    /// `value ≥ bound`; used for witnesses that an identity fails.
    pub fn ge(&mut self, name: &str, identity: &str, value: f64, bound: f64) {
        self.record(name, identity, value, Relation::Ge, bound);
    }

    pub fn eq(&mut self, name: &str, identity: &str, value: f64, want: f64) {
        self.record(name, identity, value, Relation::Eq, want);
    }

    pub fn holds(&mut self, name: &str, identity: &str, cond: bool) {
        self.record(name, identity, if cond { 1.0 } else { 0.0 }, Relation::Eq, 1.0);
    }

    pub fn value(&mut self, name: &str, v: impl Into<Value>) {
        self.values.insert(name.into(), v.into());
    }

    pub fn value_f(&mut self, name: &str, v: f64) {
        self.values.insert(name.into(), num(v));
    }

    pub fn value_c(&mut self, name: &str, z: Complex64) {
        self.values.insert(name.into(), Value::Array(vec![num(z.re), num(z.im)]));
    }

    pub fn summary(&mut self, line: impl Into<String>) {
        let line = line.into();
        if !self.summary.contains(&line) {
            self.summary.push(line);
        }
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(format!("{v}")))
}

/// Type-checks every check's parameters without running anything.
pub fn validate(sc: &Scenario) -> Result<(), ScenarioError> {
    for (i, ch) in sc.checks.iter().enumerate() {
        let op = checks::find(&ch.op).ok_or_else(|| ScenarioError::Invalid {
            path: format!("checks[{i}].op"),
            message: format!("unknown operation {:?}", ch.op),
        })?;
        let params = sc.resolved_params(i)?;
        (op.validate)(&params).map_err(|message| ScenarioError::Invalid { path: format!("checks[{i}].params"), message })?;
    }
    Ok(())
}

fn run_one(sc: &Scenario, i: usize, op: &OpDef, params: &Value, seed: u64, opts: &RunOptions) -> CheckReport {
    let decl = &sc.checks[i];
    let mut ctx = Ctx::new(seed, i as u64);
    ctx.tol_check = decl.tolerance;
    ctx.tol_global = opts.tolerance;
    ctx.tol_named = decl.tolerances.clone();
    let start = Instant::now();
    let outcome = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (op.run)(params, &mut ctx))) {
        Ok(r) => r,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            Err(anyhow::anyhow!("panicked: {}", msg.unwrap_or_else(|| "unknown".into())))
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let (status, error) = match outcome {
        Err(e) => (Status::Error, Some(format!("{e:#}"))),
        Ok(()) if ctx.assertions.iter().all(|a| a.pass) => (Status::Pass, None),
        Ok(()) => (Status::Fail, None),
    };
    CheckReport {
        id: sc.check_id(i),
        op: op.name.into(),
        module: op.module.into(),
        status,
        error,
        assertions: ctx.assertions,
        values: ctx.values,
        summary: ctx.summary,
        warnings: ctx.warnings,
        wall_time,
    }
}

pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Result<Report, ScenarioError> {
    validate(sc)?;
    let seed = opts.seed.unwrap_or(sc.seed);
    let mut inputs = sc.clone();
    inputs.seed = seed;
    let work: Vec<(usize, &'static OpDef, Value)> = (0..sc.checks.len())
        .map(|i| Ok((i, checks::find(&sc.checks[i].op).expect("validated"), sc.resolved_params(i)?)))
        .collect::<Result<_, ScenarioError>>()?;

    let start = Instant::now();
    let exec = || work.par_iter().map(|(i, op, p)| run_one(sc, *i, op, p, seed, opts)).collect::<Vec<_>>();
    let checks = if opts.jobs > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build() {
            Ok(pool) => pool.install(exec),
            Err(_) => exec(),
        }
    } else {
        exec()
    };
    let wall_time = start.elapsed().as_secs_f64();

    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let summary = Summary { checks: checks.len(), passed: count(Status::Pass), failed: count(Status::Fail), errors: count(Status::Error) };
    Ok(Report { report_version: REPORT_VERSION, scenario: sc.name.clone(), seed, summary, checks, inputs, wall_time })
}
