//! Benchmark manifests and the CSV results table.
//!
//! ```toml
//! [defaults]
//! target = "chimera:4,1,2"
//! time_limit = 300
//!
//! [[run]]
//! id = "triangle"
//! source = "complete:3"
//! method = "oracle"
//!
//! [[sweep]]
//! id = "structured-z{zeta}-s{seed}"
//! source = "structured:{zeta},0.5,0.5,{seed}"
//! methods = ["monolithic", "decomposition"]
//! [sweep.params]
//! zeta = [0, 1, 2, 3]
//! seed = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
//! ```
//!
//! Sweeps expand to the cartesian product of `params` (first key varies
//! slowest) times `methods`; `{name}` placeholders in `id`, `source` and
//! `target` are substituted. A `seed` parameter also becomes the run seed.
//!
//! CSV columns, one row per run in manifest order:
//! `instance,method,objective,status,size,bound,gap,time,iterations,cuts,note`.
//! `time` is wall-clock seconds; failed runs have status `error` and the
//! message in `note`.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use indexmap::IndexMap;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::resolve_graph;
use crate::{run_method, seconds, Method, ObjectiveArg, RunConfig};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub target: Option<String>,
    pub method: Option<String>,
    pub objective: Option<String>,
    pub k: Option<usize>,
    pub time_limit: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunEntry {
    pub id: Option<String>,
    pub source: String,
    pub target: Option<String>,
    pub method: Option<String>,
    pub objective: Option<String>,
    pub k: Option<usize>,
    pub time_limit: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub id: String,
    pub source: String,
    pub target: Option<String>,
    pub methods: Option<Vec<String>>,
    pub objective: Option<String>,
    pub k: Option<usize>,
    pub time_limit: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: IndexMap<String, Vec<toml::Value>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(default)]
    pub run: Vec<RunEntry>,
    #[serde(default)]
    pub sweep: Vec<Sweep>,
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    toml::from_str(text).context("parsing bench manifest")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: String,
    pub source: String,
    pub target: String,
    pub method: String,
    pub objective: String,
    pub k: Option<usize>,
    pub time_limit: Option<f64>,
    pub seed: u64,
}

fn render(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn substitute(template: &str, binding: &[(&str, String)]) -> String {
    let mut s = template.to_string();
    for (name, value) in binding {
        s = s.replace(&format!("{{{name}}}"), value);
    }
    s
}

/// Flattens runs and sweeps into jobs, in manifest order.
pub fn expand(manifest: &Manifest) -> Result<Vec<Job>> {
    let d = &manifest.defaults;
    let mut jobs = Vec::new();
    let target_or = |t: &Option<String>, what: &str| -> Result<String> {
        t.clone().or_else(|| d.target.clone()).with_context(|| format!("{what}: no target and no default target"))
    };
    for (i, r) in manifest.run.iter().enumerate() {
        let id = r.id.clone().unwrap_or_else(|| format!("run{i}"));
        jobs.push(Job {
            target: target_or(&r.target, &id)?,
            source: r.source.clone(),
            method: r.method.clone().or_else(|| d.method.clone()).unwrap_or_else(|| "decomposition".into()),
            objective: r.objective.clone().or_else(|| d.objective.clone()).unwrap_or_else(|| "min-size".into()),
            k: r.k.or(d.k),
            time_limit: r.time_limit.or(d.time_limit),
            seed: r.seed.or(d.seed).unwrap_or(0),
            id,
        });
    }
    for s in &manifest.sweep {
        let keys: Vec<&str> = s.params.keys().map(String::as_str).collect();
        let values: Vec<Vec<String>> = s.params.values().map(|vs| vs.iter().map(render).collect()).collect();
        if values.iter().any(Vec::is_empty) {
            bail!("sweep `{}`: empty parameter list", s.id);
        }
        let methods = s.methods.clone().or_else(|| d.method.clone().map(|m| vec![m])).unwrap_or_else(|| vec!["decomposition".into()]);
        let total: usize = values.iter().map(Vec::len).product();
        for index in 0..total {
            let mut rest = index;
            let mut binding = vec![(String::new(), String::new()); keys.len()];
            for (slot, vs) in values.iter().enumerate().rev() {
                binding[slot] = (keys[slot].to_string(), vs[rest % vs.len()].clone());
                rest /= vs.len();
            }
            let binding: Vec<(&str, String)> = binding.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
            let seed = match binding.iter().find(|(k, _)| *k == "seed") {
                Some((_, v)) => v.parse().with_context(|| format!("sweep `{}`: seed `{v}` is not an integer", s.id))?,
                None => s.seed.or(d.seed).unwrap_or(0),
            };
            let id = substitute(&s.id, &binding);
            let target = substitute(&target_or(&s.target, &id)?, &binding);
            for method in &methods {
                jobs.push(Job {
                    id: id.clone(),
                    source: substitute(&s.source, &binding),
                    target: target.clone(),
                    method: method.clone(),
                    objective: s.objective.clone().or_else(|| d.objective.clone()).unwrap_or_else(|| "min-size".into()),
                    k: s.k.or(d.k),
                    time_limit: s.time_limit.or(d.time_limit),
                    seed,
                });
            }
        }
    }
    Ok(jobs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub method: String,
    pub objective: String,
    pub status: String,
    pub size: Option<usize>,
    pub bound: Option<i64>,
    pub gap: Option<String>,
    pub time: String,
    pub iterations: usize,
    pub cuts: usize,
    pub note: String,
}

fn run_job(job: &Job) -> BenchRow {
    let start = Instant::now();
    let mut row = BenchRow {
        instance: job.id.clone(),
        method: job.method.clone(),
        objective: job.objective.clone(),
        status: "error".into(),
        size: None,
        bound: None,
        gap: None,
        time: String::new(),
        iterations: 0,
        cuts: 0,
        note: String::new(),
    };
    let result = (|| -> Result<_> {
        let method = Method::parse(&job.method)?;
        let objective = ObjectiveArg::parse(&job.objective)?;
        let source = resolve_graph(&job.source, job.seed).context("source graph")?;
        let target = resolve_graph(&job.target, job.seed).context("target graph")?;
        let mut cfg = RunConfig::new(method, objective);
        cfg.k = job.k;
        cfg.time_limit = job.time_limit;
        run_method(&cfg, &target, &source, None)
    })();
    match result {
        Ok(out) => {
            row.status = out.status.as_str().into();
            row.size = out.size();
            row.bound = Some(out.best_bound);
            row.gap = out.gap().map(|g| format!("{g:.4}"));
            row.iterations = out.stats.iterations;
            row.cuts = out.stats.cuts;
            row.note = out.reason.unwrap_or_default();
        }
        Err(e) => row.note = format!("{e:#}"),
    }
    row.time = seconds(start.elapsed());
    row
}

/// Runs every job on a pool of `threads` workers; rows keep job order.
pub fn run_jobs(jobs: &[Job], threads: usize) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| jobs.par_iter().map(run_job).collect()))
}

pub fn to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["instance", "method", "objective", "status", "size", "bound", "gap", "time", "iterations", "cuts", "note"])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_expansion_order() {
        let m = parse_manifest(
            r#"
            [defaults]
            target = "chimera:4,1,2"
            [[sweep]]
            id = "s-z{zeta}-s{seed}"
            source = "structured:{zeta},0.5,0.5,{seed}"
            methods = ["monolithic", "decomposition"]
            [sweep.params]
            zeta = [0, 1]
            seed = [5, 6, 7]
            "#,
        )
        .unwrap();
        let jobs = expand(&m).unwrap();
        assert_eq!(jobs.len(), 12);
        assert_eq!(jobs[0].id, "s-z0-s5");
        assert_eq!(jobs[0].method, "monolithic");
        assert_eq!(jobs[1].method, "decomposition");
        assert_eq!(jobs[2].id, "s-z0-s6");
        assert_eq!(jobs[6].source, "structured:1,0.5,0.5,5");
        assert_eq!(jobs[6].seed, 5);
    }

    #[test]
    fn missing_target_is_reported() {
        let m = parse_manifest("[[run]]\nsource = \"complete:3\"\n").unwrap();
        assert!(expand(&m).is_err());
    }

    #[test]
    fn bad_rows_do_not_stop_the_run() {
        let m = parse_manifest(
            "[defaults]\ntarget = \"cycle:4\"\n[[run]]\nsource = \"complete:3\"\n[[run]]\nsource = \"nope:1\"\n",
        )
        .unwrap();
        let rows = run_jobs(&expand(&m).unwrap(), 2).unwrap();
        assert_eq!(rows[0].status, "optimal");
        assert_eq!(rows[0].size, Some(4));
        assert_eq!(rows[1].status, "error");
        assert!(!rows[1].note.is_empty());
        let csv = to_csv(&rows).unwrap();
        assert!(csv.starts_with("instance,method,objective,status,size,bound,gap,time,iterations,cuts,note\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
