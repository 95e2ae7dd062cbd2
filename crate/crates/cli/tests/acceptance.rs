//! End-to-end acceptance over the shipped scenarios. Prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use modindex_cli::{emit, run_scenario, CheckReport, Format, Report, RunOptions, Scenario};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn load(name: &str) -> Scenario {
    Scenario::parse(&std::fs::read_to_string(scenario_path(name)).unwrap()).unwrap()
}

struct Corpus {
    reports: BTreeMap<String, Report>,
}

impl Corpus {
    fn report(&self, scenario: &str) -> Result<&Report, String> {
        self.reports.get(scenario).ok_or_else(|| format!("scenario {scenario} missing"))
    }

    fn check(&self, scenario: &str, id: &str) -> Result<&CheckReport, String> {
        let c = self.report(scenario)?.check(id).ok_or_else(|| format!("{scenario}/{id} missing"))?;
        match &c.error {
            Some(e) => Err(format!("{scenario}/{id}: {e}")),
            None => Ok(c),
        }
    }

    fn value(&self, scenario: &str, id: &str, name: &str) -> Result<f64, String> {
        let c = self.check(scenario, id)?;
        c.assertions.iter().find(|a| a.name == name).map(|a| a.value).ok_or_else(|| format!("{scenario}/{id}: no assertion {name}"))
    }

    fn trials(&self, scenario: &str, id: &str) -> Result<u64, String> {
        let r = self.report(scenario)?;
        let i = (0..r.inputs.checks.len()).find(|&i| r.inputs.check_id(i) == id).ok_or_else(|| format!("{id} missing"))?;
        Ok(r.inputs.checks[i].params.get("trials").and_then(|v| v.as_u64()).unwrap_or(1))
    }

    fn ids(&self, scenario: &str, op: &str) -> Result<Vec<String>, String> {
        Ok(self.report(scenario)?.checks.iter().filter(|c| c.op == op).map(|c| c.id.clone()).collect())
    }

    fn secs(&self, scenario: &str, ids: &[String]) -> Result<f64, String> {
        ids.iter().map(|id| self.check(scenario, id).map(|c| c.wall_time)).sum()
    }
}

fn below(what: &str, v: f64, tol: f64) -> Result<String, String> {
    if v < tol {
        Ok(format!("{what} {v:.2e} < {tol:.0e}"))
    } else {
        Err(format!("{what} {v:.3e} not below {tol:.0e}"))
    }
}

fn need(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn max_over(c: &Corpus, scenario: &str, ids: &[String], name: &str) -> Result<f64, String> {
    ids.iter().map(|id| c.value(scenario, id, name)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

fn connes_continuation(c: &Corpus) -> Result<String, String> {
    let ids: Vec<String> = (2..=6).map(|m| format!("continuation_m{m}")).collect();
    let pairs: u64 = ids.iter().map(|id| c.trials("connes_continuation", id)).sum::<Result<_, _>>()?;
    need(pairs >= 100, format!("only {pairs} state pairs"))?;
    let worst = max_over(c, "connes_continuation", &ids, "expected")?;
    let secs = c.secs("connes_continuation", &ids)?;
    need(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("{pairs} pairs, n = 2..6, {} in {secs:.2} s", below("worst", worst, 1e-9)?))
}

fn scaling(c: &Corpus) -> Result<String, String> {
    let ids: Vec<String> = ["0.5", "2", "7"].iter().map(|l| format!("scaling_{l}")).collect();
    below("λ ∈ {0.5, 2, 7}: worst", max_over(c, "connes_continuation", &ids, "expected")?, 1e-10)
}

fn geometric(c: &Corpus) -> Result<String, String> {
    let s = "chemical_potential";
    let id = "geometric_abelian".to_string();
    let n = c.trials(s, &id)?;
    need(n >= 50, format!("{n} charges"))?;
    let d = c.value(s, &id, "expected")?;
    let g = c.value(s, &id, "gauge_invariance")?.max(c.value(s, &id, "phase_independence")?);
    Ok(format!("{n} charges, {}, {}", below("|d - 1|", d, 1e-9)?, below("gauge sweep", g, 1e-9)?))
}

fn chemical(c: &Corpus) -> Result<String, String> {
    let s = "chemical_potential";
    let a = c.value(s, "mu_abelian", "asymmetry")?;
    let n = c.trials(s, "mu_abelian")?;
    let t = c.value(s, "mu_time_reversal", "time_reversal")?;
    Ok(format!("{n} charges, {}, {}", below("|μ + μ̄|", a, 1e-10)?, below("time-reversal |μ|", t, 1e-9)?))
}

fn free_energy(c: &Corpus) -> Result<String, String> {
    let s = "free_energy";
    let id = "free_energy_abelian".to_string();
    let n = c.trials(s, &id)?;
    need(n >= 20, format!("{n} instances"))?;
    let worst = ["gns_vs_cocycle", "gns_vs_entropy", "cocycle_vs_entropy"]
        .iter()
        .map(|k| c.value(s, &id, k))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let secs = c.secs(s, &[id])?;
    need(secs < 10.0, format!("took {secs:.2} s"))?;
    Ok(format!("{n} instances, {} in {secs:.2} s", below("pairwise", worst, 1e-8)?))
}

fn horizon(c: &Corpus) -> Result<String, String> {
    let ids = c.ids("horizon", "black_hole_identity")?;
    let worst = max_over(c, "horizon", &ids, "identity")?;
    let log2 = c.value("horizon", "multiplicity_vs_vacuum", "expected")?;
    let lhs = c.check("horizon", "multiplicity_vs_vacuum")?.values.get("lhs").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    need((lhs - std::f64::consts::LN_2).abs() < 1e-9, format!("lhs = {lhs}"))?;
    Ok(format!("{} checks, {}, log 2 case off by {log2:.1e}", ids.len(), below("residual", worst, 1e-9)?))
}

fn witten(c: &Corpus) -> Result<String, String> {
    let s = "witten";
    let id = "index_random".to_string();
    let n = c.trials(s, &id)?;
    need(n >= 50, format!("{n} systems"))?;
    let i = c.value(s, &id, "integer")?;
    let t = c.value(s, &id, "temperature_independent")?;
    let r = c.value(s, &id, "rank_nullity")?;
    need(r < 1e-9, format!("rank-nullity mismatch {r:e}"))?;
    Ok(format!("{n} systems, {}, {}", below("integrality", i, 1e-9)?, below("β spread", t, 1e-9)?))
}

fn relative(c: &Corpus) -> Result<String, String> {
    let ids = c.ids("witten", "relative_index")?;
    need(!ids.is_empty(), "no relative_index checks")?;
    Ok(format!("{} checks, {}", ids.len(), below("two-sided", max_over(c, "witten", &ids, "two_sided")?, 1e-10)?))
}

fn deformation(c: &Corpus) -> Result<String, String> {
    let n = c.trials("witten", "deformation_odd")?;
    need(n >= 20, format!("{n} perturbations"))?;
    let v = c.value("witten", "deformation_odd", "invariance")?;
    let w = c.value("witten", "deformation_even", "witness")?;
    need(w > 1e-3, format!("even control only moves by {w:e}"))?;
    Ok(format!("{n} odd q, {}, even control {w:.2e} > 1e-3", below("drift", v, 1e-9)?))
}

fn jlo(c: &Corpus) -> Result<String, String> {
    let evals = c.ids("jlo", "jlo_eval")?;
    let charged = c.ids("jlo", "jlo_charged")?;
    let t0 = max_over(c, "jlo", &evals, "tau0")?;
    let t12 = max_over(c, "jlo", &evals, "tau1")?.max(max_over(c, "jlo", &evals, "tau2")?);
    let closed = max_over(c, "jlo", &evals, "closed")?;
    let two = max_over(c, "jlo", &charged, "factorization")?;
    need(t0 < 1e-10, format!("τ_0(1) off by {t0:e}"))?;
    need(t12 < 1e-10, format!("τ_1, τ_2 off by {t12:e}"))?;
    let all: Vec<String> = c.report("jlo")?.checks.iter().map(|x| x.id.clone()).collect();
    let secs = c.secs("jlo", &all)?;
    need(secs < 60.0, format!("took {secs:.1} s"))?;
    Ok(format!("{}, {} in {secs:.1} s", below("(b+B)τ", closed, 1e-5)?, below("two-path", two, 1e-5)?))
}

fn fusion(c: &Corpus) -> Result<String, String> {
    let s = "fusion";
    let fib = c.value(s, "pf_fibonacci", "expected")?;
    let ids: Vec<String> = ["z3", "z4", "z5", "s3"].iter().map(|g| format!("amenable_rep_{g}")).collect();
    let norm = max_over(c, s, &ids, "amenable")?;
    let hom = max_over(c, s, &c.ids(s, "pf_dimension")?, "homomorphism")?;
    Ok(format!("{}, {}, {}", below("golden ratio", fib, 1e-12)?, below("‖m^σ‖ - d", norm, 1e-12)?, below("homomorphism", hom, 1e-10)?))
}

fn double(c: &Corpus) -> Result<String, String> {
    let s = "double_s3";
    let ids: Vec<String> = (2..=5).map(|n| format!("relations_z{n}")).collect();
    let mut worst: f64 = 0.0;
    for id in &ids {
        let ch = c.check(s, id)?;
        need(ch.assertions.iter().all(|a| a.pass), format!("{id} failed"))?;
        worst = ch.assertions.iter().filter(|a| a.bound == 1e-12).map(|a| a.value).fold(worst, f64::max);
    }
    need(worst < 1e-12, format!("relations off by {worst:e}"))?;
    let s3 = c.value(s, "double_s3", "sum_of_squares")?;
    let q8 = c.value(s, "double_q8", "sum_of_squares")?;
    need(s3 == 36.0 && q8 == 64.0, format!("D(S_3) {s3}, D(Q_8) {q8}"))?;
    Ok(format!("Z_2..Z_5 relations worst {worst:.1e}, D(S_3) = 36, D(Q_8) = 64"))
}

fn conjugates(c: &Corpus) -> Result<String, String> {
    let s = "conjugates";
    let conj = max_over(c, s, &["conjugate_s3".into(), "conjugate_direct_sum".into()], "conjugate_equations")?;
    let gauge = max_over(c, s, &c.ids(s, "frobenius_map")?, "gauge_independence")?;
    let add = max_over(c, s, &c.ids(s, "intrinsic_dimension")?, "additivity")?;
    need(add < 1e-12, format!("additivity off by {add:e}"))?;
    Ok(format!("{}, {}, additivity {add:.1e}", below("conjugate equations", conj, 1e-12)?, below("Frobenius gauge", gauge, 1e-10)?))
}

fn determinism() -> Result<String, String> {
    for name in ["qsys_basics", "witten"] {
        let sc = load(name);
        let a = run_scenario(&sc, &RunOptions::default()).map_err(|e| e.to_string())?;
        let b = run_scenario(&sc, &RunOptions { jobs: 1, ..Default::default() }).map_err(|e| e.to_string())?;
        let (a, b) = (emit(&a, Format::Json).unwrap(), emit(&b, Format::Json).unwrap());
        need(a == b, format!("{name}: in-process reports differ"))?;
    }
    let path = scenario_path("connes_continuation");
    let exe = || Command::new(env!("CARGO_BIN_EXE_modindex")).arg("run").arg(&path).output().map_err(|e| e.to_string());
    let (x, y) = (exe()?, exe()?);
    need(x.status.success() && !x.stdout.is_empty(), "binary run failed")?;
    need(x.stdout == y.stdout, "binary reports differ")?;
    Ok(format!("in-process and double binary execution byte-identical ({} bytes)", x.stdout.len()))
}

fn main() {
    let names = [
        "qsys_basics",
        "connes_continuation",
        "chemical_potential",
        "free_energy",
        "horizon",
        "witten",
        "jlo",
        "fusion",
        "conjugates",
        "double_s3",
    ];
    let reports = names.iter().map(|n| (n.to_string(), run_scenario(&load(n), &RunOptions::default()).unwrap())).collect();
    let c = Corpus { reports };

    type Crit = fn(&Corpus) -> Result<String, String>;
    let criteria: [(&str, Crit); 13] = [
        ("Connes continuation", connes_continuation),
        ("scaling oracle", scaling),
        ("geometric dimension", geometric),
        ("chemical potential", chemical),
        ("free energy", free_energy),
        ("black hole identity", horizon),
        ("Witten index", witten),
        ("relative index", relative),
        ("deformation invariance", deformation),
        ("JLO cocycle", jlo),
        ("fusion dimensions", fusion),
        ("quantum double", double),
        ("conjugates", conjugates),
    ];
    let mut failed = 0;
    let mut line = |k: usize, name: &str, r: Result<String, String>| {
        match r {
            Ok(msg) => println!("PASS {k:>2} {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {k:>2} {name}: {msg}");
            }
        }
    };
    for (k, (name, f)) in criteria.iter().enumerate() {
        line(k + 1, name, f(&c));
    }
    line(14, "determinism", determinism());

    let total: usize = c.reports.values().map(|r| r.summary.checks).sum();
    let bad: Vec<String> = c
        .reports
        .values()
        .flat_map(|r| r.checks.iter().filter(|x| x.status != modindex_cli::Status::Pass).map(move |x| format!("{}/{}", r.scenario, x.id)))
        .collect();
    println!("corpus: {}/{total} checks pass{}", total - bad.len(), if bad.is_empty() { String::new() } else { format!(" ({})", bad.join(", ")) });
    if failed > 0 || !bad.is_empty() {
        std::process::exit(1);
    }
}
