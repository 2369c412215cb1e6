//! Experiment configuration and orchestration: replicated runs, trace and
//! summary export, target export and metric tables.
//!
//! Configuration is a flat `key = value` file, one entry per line, `#` starts
//! a comment. Recognized keys:
//!
//! | key | example |
//! |-----|---------|
//! | `population_size` | `40` |
//! | `generations` | `1000` |
//! | `tournament_size` | `2` |
//! | `mutation_rate` | `0.75` |
//! | `mutation_strength` | `4` |
//! | `lambda2_threshold` | `0.001` |
//! | `min_subgraph_size` | `3` |
//! | `crossover` | `bc`, `sc1`, `sc2` |
//! | `graph_size` | `24` |
//! | `target` | `star`, `circulant:1,2,3`, `circulant:1..6`, `circulant:third`, `file:t.txt` |
//! | `init` | `regular:12`, `er`, `er:0.3`, `ba:8,5`, `ws:4,0.3`, `files:a.txt,b.txt` |
//! | `seed` | `1` |
//! | `runs` | `30` |
//! | `elite_count` | `1` |
//! | `output_dir` | `out` |
//! | `emit_density_svg` | `true` |
//! | `metric_set` | `ac,pl,cc,bc` |

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::{self, EvolutionConfig, InitSource, RunRecord, TargetSource};
use crate::error::{Error, Result};
use crate::generators::{InitFamily, TargetSpec};
use crate::graph::Graph;
use crate::io;
use crate::metrics::{self, Metric, MetricSample};
use crate::operators::CrossoverVariant;
use crate::spectral;

pub const SEED_ENV: &str = "SPECTRA_EVOLVE_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub evolution: EvolutionConfig,
    pub runs: usize,
    pub output_dir: PathBuf,
    pub emit_density_svg: bool,
    pub metric_set: Vec<Metric>,
}

/// How the target was written in the config, kept for the echo.
#[derive(Debug, Clone, PartialEq)]
enum TargetText {
    Star,
    Circulant(CirculantOffsets),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
enum CirculantOffsets {
    Explicit(Vec<usize>),
    Third,
    Quarter,
}

impl CirculantOffsets {
    fn resolve(&self, n: usize) -> Vec<usize> {
        match self {
            CirculantOffsets::Explicit(v) => v.clone(),
            CirculantOffsets::Third => (1..=n / 3).collect(),
            CirculantOffsets::Quarter => (1..=n / 4).collect(),
        }
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| Error::Config(format!("`{key}` expects a non-negative integer, got `{v}`")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse().map_err(|_| Error::Config(format!("`{key}` expects a number, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects true/false, got `{v}`"))),
    }
}

/// Offsets as a comma list, an inclusive range `a..b`, or a mix of both.
pub fn parse_offsets(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a = parse_usize("offsets", a.trim())?;
            let b = parse_usize("offsets", b.trim())?;
            if a > b {
                return Err(Error::Config(format!("empty offset range `{part}`")));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_usize("offsets", part)?);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no circulant offsets given".into()));
    }
    Ok(out)
}

fn parse_target(v: &str) -> Result<TargetText> {
    let (kind, arg) = v.split_once(':').map_or((v, None), |(k, a)| (k, Some(a.trim())));
    match (kind.trim(), arg) {
        ("star", None) => Ok(TargetText::Star),
        ("circulant", Some("third")) => Ok(TargetText::Circulant(CirculantOffsets::Third)),
        ("circulant", Some("quarter")) => Ok(TargetText::Circulant(CirculantOffsets::Quarter)),
        ("circulant", Some(list)) => Ok(TargetText::Circulant(CirculantOffsets::Explicit(parse_offsets(list)?))),
        ("file", Some(path)) => Ok(TargetText::File(PathBuf::from(path))),
        _ => Err(Error::Config(format!("unrecognized target `{v}`"))),
    }
}

fn parse_init(v: &str) -> Result<InitSource> {
    let (kind, arg) = v.split_once(':').map_or((v, None), |(k, a)| (k, Some(a.trim())));
    let nums = |a: Option<&str>| -> Vec<String> {
        a.map(|s| s.split(',').map(|x| x.trim().to_string()).collect()).unwrap_or_default()
    };
    let family = match kind.trim() {
        "regular" => {
            let k = arg.ok_or_else(|| Error::Config("`regular` needs a degree, e.g. regular:6".into()))?;
            InitFamily::Regular { k: parse_usize("init", k)? }
        }
        "er" | "erdos_renyi" => InitFamily::ErdosRenyi {
            p: match arg {
                Some(p) => parse_f64("init", p)?,
                None => InitFamily::DEFAULT_ER_P,
            },
        },
        "ba" | "barabasi_albert" => match nums(arg).as_slice() {
            [] => InitFamily::BarabasiAlbert { m0: InitFamily::DEFAULT_BA_M0, m: InitFamily::DEFAULT_BA_M },
            [m0, m] => InitFamily::BarabasiAlbert { m0: parse_usize("init", m0)?, m: parse_usize("init", m)? },
            _ => return Err(Error::Config(format!("`{v}`: expected ba:m0,m"))),
        },
        "ws" | "watts_strogatz" => match nums(arg).as_slice() {
            [] => InitFamily::WattsStrogatz { k: InitFamily::DEFAULT_WS_K, beta: InitFamily::DEFAULT_WS_BETA },
            [k, b] => InitFamily::WattsStrogatz { k: parse_usize("init", k)?, beta: parse_f64("init", b)? },
            _ => return Err(Error::Config(format!("`{v}`: expected ws:K,beta"))),
        },
        "files" => {
            let files: Vec<PathBuf> = nums(arg).into_iter().filter(|s| !s.is_empty()).map(PathBuf::from).collect();
            return Ok(InitSource::Files(files));
        }
        _ => return Err(Error::Config(format!("unrecognized init `{v}`"))),
    };
    Ok(InitSource::Family(family))
}

fn init_text(init: &InitSource) -> String {
    match init {
        InitSource::Family(InitFamily::Regular { k }) => format!("regular:{k}"),
        InitSource::Family(InitFamily::ErdosRenyi { p }) => format!("er:{p}"),
        InitSource::Family(InitFamily::BarabasiAlbert { m0, m }) => format!("ba:{m0},{m}"),
        InitSource::Family(InitFamily::WattsStrogatz { k, beta }) => format!("ws:{k},{beta}"),
        InitSource::Files(files) => format!(
            "files:{}",
            files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")
        ),
    }
}

fn target_text(target: &TargetSource) -> String {
    match target {
        TargetSource::Spec(TargetSpec::Star { .. }) => "star".into(),
        TargetSource::Spec(TargetSpec::Circulant { offsets, .. }) => format!(
            "circulant:{}",
            offsets.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        ),
        TargetSource::File(p) => format!("file:{}", p.display()),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut ev = EvolutionConfig::with_defaults(
            24,
            TargetSource::Spec(TargetSpec::Star { n: 24 }),
            InitSource::Family(InitFamily::ErdosRenyi { p: InitFamily::DEFAULT_ER_P }),
        );
        let mut runs = 1;
        let mut output_dir = PathBuf::from("out");
        let mut emit_density_svg = false;
        let mut metric_set = Metric::ALL.to_vec();
        let mut crossover_tag = "sc2".to_string();
        let mut nu = CrossoverVariant::DEFAULT_NU;
        let mut target = TargetText::Star;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "population_size" => ev.population_size = parse_usize(key, value)?,
                "generations" => ev.generations = parse_usize(key, value)?,
                "tournament_size" => ev.tournament_size = parse_usize(key, value)?,
                "mutation_rate" => ev.mutation.alpha = parse_f64(key, value)?,
                "mutation_strength" => ev.mutation.beta = parse_usize(key, value)?,
                "lambda2_threshold" => ev.mutation.lambda2_threshold = parse_f64(key, value)?,
                "min_subgraph_size" => nu = parse_usize(key, value)?,
                "crossover" => crossover_tag = value.to_string(),
                "graph_size" => ev.n = parse_usize(key, value)?,
                "target" => target = parse_target(value)?,
                "init" => ev.init = parse_init(value)?,
                "seed" => {
                    ev.seed = value
                        .parse()
                        .map_err(|_| Error::Config(format!("`seed` expects an unsigned integer, got `{value}`")))?
                }
                "runs" => runs = parse_usize(key, value)?,
                "elite_count" => ev.elite_count = parse_usize(key, value)?,
                "output_dir" => output_dir = PathBuf::from(value),
                "emit_density_svg" => emit_density_svg = parse_bool(key, value)?,
                "metric_set" => {
                    metric_set = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(Metric::parse)
                        .collect::<Result<_>>()
                        .map_err(|e| Error::Config(e.to_string()))?
                }
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }

        ev.crossover = CrossoverVariant::from_tag(&crossover_tag, nu).map_err(|e| Error::Config(e.to_string()))?;
        ev.target = match target {
            TargetText::Star => TargetSource::Spec(TargetSpec::Star { n: ev.n }),
            TargetText::Circulant(offsets) => TargetSource::Spec(TargetSpec::Circulant {
                n: ev.n,
                offsets: offsets.resolve(ev.n),
            }),
            TargetText::File(p) => TargetSource::File(p),
        };
        let cfg = ExperimentConfig {
            evolution: ev,
            runs,
            output_dir,
            emit_density_svg,
            metric_set,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be >= 1".into()));
        }
        self.evolution.validate()?;
        if let TargetSource::Spec(spec) = &self.evolution.target {
            spec.build().map_err(|e| Error::Config(format!("target: {e}")))?;
        }
        Ok(())
    }

    /// Applies a seed override such as the value of `SPECTRA_EVOLVE_SEED`.
    pub fn override_seed(&mut self, value: &str) -> Result<()> {
        self.evolution.seed = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got `{value}`")))?;
        Ok(())
    }

    /// Canonical `key = value` rendering; parsing it yields an equal config.
    pub fn to_config_text(&self) -> String {
        let ev = &self.evolution;
        let nu = match ev.crossover {
            CrossoverVariant::Basic { nu } => nu,
            _ => CrossoverVariant::DEFAULT_NU,
        };
        let metrics: Vec<&str> = self.metric_set.iter().map(Metric::name).collect();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("population_size", ev.population_size.to_string());
        kv("generations", ev.generations.to_string());
        kv("tournament_size", ev.tournament_size.to_string());
        kv("mutation_rate", ev.mutation.alpha.to_string());
        kv("mutation_strength", ev.mutation.beta.to_string());
        kv("lambda2_threshold", ev.mutation.lambda2_threshold.to_string());
        kv("min_subgraph_size", nu.to_string());
        kv("crossover", ev.crossover.tag().to_string());
        kv("graph_size", ev.n.to_string());
        kv("target", target_text(&ev.target));
        kv("init", init_text(&ev.init));
        kv("seed", ev.seed.to_string());
        kv("runs", self.runs.to_string());
        kv("elite_count", ev.elite_count.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        kv("emit_density_svg", self.emit_density_svg.to_string());
        kv("metric_set", metrics.join(","));
        s
    }
}

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(BoxStats {
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

pub fn trace_csv(record: &RunRecord) -> String {
    let mut s = String::from("generation,best_d,mean_d\n");
    for (g, (b, m)) in record.best.iter().zip(&record.mean).enumerate() {
        let _ = writeln!(s, "{},{},{}", g + 1, io::fmt_num(*b), io::fmt_num(*m));
    }
    s
}

pub fn metrics_csv(samples: &[MetricSample]) -> String {
    let mut s = String::from("graph_id,ac,pl,cc,bc\n");
    for m in samples {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            m.graph_id,
            io::fmt_num(m.ac),
            io::fmt_num(m.pl),
            io::fmt_num(m.cc),
            io::fmt_num(m.bc)
        );
    }
    s
}

/// Diversity table for each requested metric; fails for fewer than 3 samples.
pub fn diversity_csv(samples: &[MetricSample], metric_set: &[Metric]) -> Result<String> {
    let mut s = String::from("metric,graph_id,h_normalized,div\n");
    for &metric in metric_set {
        let values: Vec<f64> = samples.iter().map(|m| m.get(metric)).collect();
        let report = metrics::diversity_contributions(&values)?;
        for (pos, &i) in report.order.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                metric.name(),
                samples[i].graph_id,
                io::fmt_num(report.normalized[pos]),
                io::fmt_num(report.contributions[pos])
            );
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFailure {
    pub run: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<(usize, RunRecord)>,
    pub failures: Vec<RunFailure>,
    pub summary: serde_json::Value,
}

fn write_run_outputs(cfg: &ExperimentConfig, run: usize, rec: &RunRecord, target: &Graph) -> Result<()> {
    let dir = &cfg.output_dir;
    fs::write(dir.join(format!("run_{run}_trace.csv")), trace_csv(rec))?;
    let run_dir = dir.join(format!("run_{run}"));
    fs::create_dir_all(&run_dir)?;
    for (rank, g) in rec.final_population.iter().enumerate() {
        io::save_edge_list(g, run_dir.join(format!("final_{rank}.txt")))?;
    }
    let doc = json!({
        "config": cfg.to_config_text(),
        "run": run,
        "seed": rec.seed,
        "crossover": cfg.evolution.crossover.tag(),
        "target_lambda2": rec.target_lambda2,
        "initial_best": rec.initial_best,
        "initial_mean": rec.initial_mean,
        "best": rec.best,
        "mean": rec.mean,
        "repair_edges": rec.repair_edges,
        "repair_edges_total": rec.total_repair_edges(),
        "final_fitness": rec.final_fitness,
        "generation_seconds": rec.generation_seconds,
    });
    fs::write(run_dir.join("record.json"), serde_json::to_string_pretty(&doc)?)?;
    if cfg.emit_density_svg {
        let best = spectral::density(&spectral::eigen_spectrum(&rec.final_population[0])?);
        let tgt = spectral::density(&spectral::eigen_spectrum(target)?);
        let svg = io::density_svg(&[("target", &tgt), ("best", &best)]);
        fs::write(dir.join(format!("run_{run}_density.svg")), svg)?;
    }
    Ok(())
}

/// Runs all replicates (seeds `seed + i`) on up to `jobs` threads and writes
/// every output file. Failed replicates are listed in `errors.json`; the
/// returned outcome still covers the successful ones.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let target = engine::resolve_target(&cfg.evolution.target)?;
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.output_dir.join("config.txt"), cfg.to_config_text())?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let failures = Mutex::new(Vec::new());
    let mut records: Vec<(usize, RunRecord)> = pool.install(|| {
        (0..cfg.runs)
            .into_par_iter()
            .filter_map(|run| {
                let mut ev = cfg.evolution.clone();
                ev.seed = cfg.evolution.seed.wrapping_add(run as u64);
                let result = engine::run_evolution(&ev)
                    .and_then(|rec| write_run_outputs(cfg, run, &rec, &target).map(|_| rec));
                match result {
                    Ok(rec) => Some((run, rec)),
                    Err(e) => {
                        failures.lock().expect("poisoned").push(RunFailure {
                            run,
                            seed: ev.seed,
                            error: e.to_string(),
                        });
                        None
                    }
                }
            })
            .collect()
    });
    records.sort_by_key(|(run, _)| *run);
    let mut failures = failures.into_inner().expect("poisoned");
    failures.sort_by_key(|f| f.run);

    let finals: Vec<f64> = records.iter().map(|(_, r)| r.final_best()).collect();
    let mut samples = Vec::new();
    for (run, rec) in &records {
        samples.push(MetricSample::compute(format!("run_{run}"), &rec.final_population[0])?);
    }
    let target_ac = spectral::algebraic_connectivity(&target)?;
    let max_final_ac = samples.iter().map(|s| s.ac).fold(f64::NEG_INFINITY, f64::max);
    if !samples.is_empty() {
        fs::write(cfg.output_dir.join("metrics.csv"), metrics_csv(&samples))?;
    }
    if samples.len() >= 3 && !cfg.metric_set.is_empty() {
        fs::write(cfg.output_dir.join("diversity.csv"), diversity_csv(&samples, &cfg.metric_set)?)?;
    }

    let summary = json!({
        "config": cfg.to_config_text(),
        "runs": cfg.runs,
        "completed": records.len(),
        "seeds": records.iter().map(|(_, r)| r.seed).collect::<Vec<_>>(),
        "crossover": cfg.evolution.crossover.tag(),
        "final_best": finals,
        "initial_best": records.iter().map(|(_, r)| r.initial_best).collect::<Vec<_>>(),
        "stats": BoxStats::from_values(&finals),
        "target_ac": target_ac,
        "max_final_ac": if samples.is_empty() { None } else { Some(max_final_ac) },
        "betweenness_convention": "unnormalized, each unordered pair once, endpoints excluded, averaged over vertices",
    });
    fs::write(cfg.output_dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    if !failures.is_empty() {
        fs::write(cfg.output_dir.join("errors.json"), serde_json::to_string_pretty(&failures)?)?;
    }
    Ok(ExperimentOutcome {
        records,
        failures,
        summary,
    })
}

/// Builds a target graph from a kind name, size and optional offsets.
pub fn target_from_args(kind: &str, n: usize, offsets: Option<&str>) -> Result<TargetSpec> {
    let spec = match (kind, offsets) {
        ("star", None) => TargetSpec::Star { n },
        ("star", Some(_)) => return Err(Error::param("star targets take no offsets")),
        ("circulant", Some("third")) => TargetSpec::Circulant { n, offsets: (1..=n / 3).collect() },
        ("circulant", Some("quarter")) => TargetSpec::Circulant { n, offsets: (1..=n / 4).collect() },
        ("circulant", Some(list)) => TargetSpec::Circulant { n, offsets: parse_offsets(list)? },
        ("circulant", None) => return Err(Error::param("circulant targets need offsets, e.g. 1,2,3")),
        (other, _) => return Err(Error::param(format!("unknown target kind `{other}`"))),
    };
    spec.build()?;
    Ok(spec)
}

/// Writes `<prefix>.txt` (edge list), `<prefix>_density.csv` and optionally
/// `<prefix>_density.svg`. Returns the written paths.
pub fn export_target(spec: &TargetSpec, prefix: &Path, svg: bool) -> Result<Vec<PathBuf>> {
    let g = spec.build()?;
    let grid = spectral::density(&spectral::eigen_spectrum(&g)?);
    let with_suffix = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    let mut written = vec![with_suffix(".txt"), with_suffix("_density.csv")];
    io::save_edge_list(&g, &written[0])?;
    fs::write(&written[1], io::density_csv(&grid))?;
    if svg {
        written.push(with_suffix("_density.svg"));
        fs::write(&written[2], io::density_svg(&[("target", &grid)]))?;
    }
    Ok(written)
}

#[derive(Debug)]
pub struct MetricsTable {
    pub metrics_csv: String,
    pub diversity_csv: Option<String>,
    /// `(graph_id, message)` for inputs that could not be measured.
    pub failures: Vec<(String, String)>,
}

/// Metrics for each file; unreadable or disconnected inputs become rows of
/// `nan` plus an entry in `failures`. Diversity needs at least 3 good graphs.
pub fn metrics_for_files(files: &[PathBuf], diversity: bool, metric_set: &[Metric]) -> Result<MetricsTable> {
    let mut good = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for path in files {
        let id = path.display().to_string();
        let sample = io::load_edge_list(path).and_then(|g| {
            if !g.is_connected() {
                return Err(Error::Disconnected);
            }
            MetricSample::compute(id.clone(), &g)
        });
        match sample {
            Ok(s) => {
                rows.push(s.clone());
                good.push(s);
            }
            Err(e) => {
                rows.push(MetricSample {
                    graph_id: id.clone(),
                    ac: f64::NAN,
                    pl: f64::NAN,
                    cc: f64::NAN,
                    bc: f64::NAN,
                });
                failures.push((id, e.to_string()));
            }
        }
    }
    let diversity_csv = if diversity {
        if good.len() < 3 {
            return Err(Error::param(format!(
                "diversity needs at least 3 measurable graphs, got {}",
                good.len()
            )));
        }
        Some(diversity_csv(&good, metric_set)?)
    } else {
        None
    };
    Ok(MetricsTable {
        metrics_csv: metrics_csv(&rows),
        diversity_csv,
        failures,
    })
}
