//! Generational loop: evaluate, keep elites, tournament-select a mating pool,
//! recombine, mutate, and re-insert the elites in place of the worst
//! offspring.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{self, InitFamily, InitSpec, TargetSpec};
use crate::graph::Graph;
use crate::io;
use crate::operators::{self, CrossoverVariant, MutationParams};
use crate::spectral::{self, DensityGrid};

pub type RunRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSource {
    Spec(TargetSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitSource {
    Family(InitFamily),
    /// Edge-list files, cycled through until the population is full.
    Files(Vec<PathBuf>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub mutation: MutationParams,
    pub crossover: CrossoverVariant,
    pub n: usize,
    pub target: TargetSource,
    pub init: InitSource,
    pub seed: u64,
    pub elite_count: usize,
}

impl EvolutionConfig {
    /// Default design parameters for a given target, initial family and size.
    pub fn with_defaults(n: usize, target: TargetSource, init: InitSource) -> Self {
        EvolutionConfig {
            population_size: 40,
            generations: 1000,
            tournament_size: 2,
            mutation: MutationParams::default(),
            crossover: CrossoverVariant::Spectral2,
            n,
            target,
            init,
            seed: 0,
            elite_count: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return bad(format!("population size must be even and >= 4, got {}", self.population_size));
        }
        if self.generations == 0 {
            return bad("generations must be >= 1".into());
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return bad(format!(
                "tournament size must be in 2..={}, got {}",
                self.population_size, self.tournament_size
            ));
        }
        if self.elite_count == 0 || self.elite_count >= self.population_size {
            return bad(format!("elite count must be in 1..{}, got {}", self.population_size, self.elite_count));
        }
        self.mutation.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.n < 4 {
            return bad(format!("graph size must be >= 4, got {}", self.n));
        }
        if let CrossoverVariant::Basic { nu } = self.crossover {
            if nu < 2 || 2 * nu > self.n {
                return bad(format!("minimal subgraph size {nu} incompatible with n = {}", self.n));
            }
        }
        if let TargetSource::Spec(spec) = &self.target {
            if spec.n() != self.n {
                return bad(format!("target size {} differs from graph size {}", spec.n(), self.n));
            }
        }
        if let InitSource::Files(files) = &self.init {
            if files.is_empty() {
                return bad("init file list is empty".into());
            }
        }
        Ok(())
    }
}

/// Target graph with its precomputed density and algebraic connectivity.
#[derive(Debug, Clone)]
pub struct Target {
    pub graph: Graph,
    pub density: DensityGrid,
    pub lambda2: f64,
}

impl Target {
    pub fn new(graph: Graph) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let sp = spectral::eigen_spectrum(&graph)?;
        Ok(Target {
            lambda2: sp.lambda2(),
            density: spectral::density(&sp),
            graph,
        })
    }
}

/// Spectral distance between `g` and the target density.
pub fn evaluate_fitness(g: &Graph, target_density: &DensityGrid) -> Result<f64> {
    let sp = spectral::eigen_spectrum(g)?;
    spectral::spectral_distance(&spectral::density(&sp), target_density)
}

/// Fitness memo keyed by edge-set hash.
#[derive(Debug, Default)]
pub struct FitnessCache {
    map: HashMap<u64, f64>,
}

impl FitnessCache {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Fitness of every graph; uncached graphs are evaluated in parallel.
    pub fn evaluate(&mut self, pop: &[Graph], target: &DensityGrid) -> Result<Vec<f64>> {
        let keys: Vec<u64> = pop.iter().map(Graph::edge_hash).collect();
        let mut todo: Vec<usize> = Vec::new();
        let mut queued = std::collections::HashSet::new();
        for (i, k) in keys.iter().enumerate() {
            if !self.map.contains_key(k) && queued.insert(*k) {
                todo.push(i);
            }
        }
        let fresh: Vec<(u64, f64)> = todo
            .par_iter()
            .map(|&i| evaluate_fitness(&pop[i], target).map(|f| (keys[i], f)))
            .collect::<Result<_>>()?;
        self.map.extend(fresh);
        Ok(keys.iter().map(|k| self.map[k]).collect())
    }
}

/// Index of the fittest (smallest) of `size` distinct uniformly drawn
/// individuals; ties go to the earliest draw.
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], size: usize, rng: &mut R) -> usize {
    let picks = index::sample(rng, fitness.len(), size);
    let mut best = picks.index(0);
    for i in picks.iter().skip(1) {
        if fitness[i] < fitness[best] {
            best = i;
        }
    }
    best
}

/// Indices sorted by ascending fitness, ties by index.
pub fn rank(fitness: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
    idx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub target_lambda2: f64,
    pub initial_best: f64,
    pub initial_mean: f64,
    /// Best fitness after each generation.
    pub best: Vec<f64>,
    pub mean: Vec<f64>,
    /// Edges inserted by connectivity repair, per generation.
    pub repair_edges: Vec<usize>,
    /// Final population in fitness order.
    #[serde(skip)]
    pub final_population: Vec<Graph>,
    pub final_fitness: Vec<f64>,
    pub generation_seconds: Vec<f64>,
}

impl RunRecord {
    pub fn final_best(&self) -> f64 {
        self.final_fitness[0]
    }

    pub fn total_repair_edges(&self) -> usize {
        self.repair_edges.iter().sum()
    }

    /// True when both records agree on every field except timings.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        self.seed == other.seed
            && self.initial_best.to_bits() == other.initial_best.to_bits()
            && bits(&self.best) == bits(&other.best)
            && bits(&self.mean) == bits(&other.mean)
            && self.repair_edges == other.repair_edges
            && self.final_population == other.final_population
            && bits(&self.final_fitness) == bits(&other.final_fitness)
    }
}

fn bits(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

/// Per-generation hook for callers that want to watch a run.
pub trait Observer {
    fn generation(&mut self, _generation: usize, _population: &[Graph], _fitness: &[f64]) {}
}

impl Observer for () {}

pub fn resolve_target(source: &TargetSource) -> Result<Graph> {
    match source {
        TargetSource::Spec(spec) => spec.build(),
        TargetSource::File(path) => io::load_edge_list(path),
    }
}

pub fn resolve_init<R: Rng + ?Sized>(cfg: &EvolutionConfig, rng: &mut R) -> Result<Vec<Graph>> {
    let pop = match &cfg.init {
        InitSource::Family(family) => generators::make_initial_population(
            &InitSpec {
                family: *family,
                n: cfg.n,
                count: cfg.population_size,
            },
            rng,
        )?,
        InitSource::Files(files) => {
            let graphs = files.iter().map(io::load_edge_list).collect::<Result<Vec<_>>>()?;
            (0..cfg.population_size).map(|i| graphs[i % graphs.len()].clone()).collect()
        }
    };
    for g in &pop {
        if g.n() != cfg.n {
            return Err(Error::Config(format!("initial graph has {} vertices, expected {}", g.n(), cfg.n)));
        }
        if !g.is_connected() {
            return Err(Error::Config("initial graph is disconnected".into()));
        }
    }
    Ok(pop)
}

/// Runs a full evolution as configured; deterministic in `cfg.seed`.
pub fn run_evolution(cfg: &EvolutionConfig) -> Result<RunRecord> {
    run_evolution_observed(cfg, &mut ())
}

pub fn run_evolution_observed(cfg: &EvolutionConfig, observer: &mut dyn Observer) -> Result<RunRecord> {
    cfg.validate()?;
    let target_graph = resolve_target(&cfg.target)?;
    if target_graph.n() != cfg.n {
        return Err(Error::Config(format!(
            "target has {} vertices, expected {}",
            target_graph.n(),
            cfg.n
        )));
    }
    let target = Target::new(target_graph)?;
    let mut rng = RunRng::seed_from_u64(cfg.seed);
    let init = resolve_init(cfg, &mut rng)?;
    evolve(cfg, &target, init, &mut rng, observer)
}

/// Evolution loop from an explicit target and initial population.
pub fn evolve(
    cfg: &EvolutionConfig,
    target: &Target,
    mut population: Vec<Graph>,
    rng: &mut RunRng,
    observer: &mut dyn Observer,
) -> Result<RunRecord> {
    cfg.validate()?;
    if population.len() != cfg.population_size {
        return Err(Error::Config("initial population has the wrong size".into()));
    }
    let mut cache = FitnessCache::default();
    let mut fitness = cache.evaluate(&population, &target.density)?;
    let mut record = RunRecord {
        seed: cfg.seed,
        target_lambda2: target.lambda2,
        initial_best: fitness.iter().copied().fold(f64::INFINITY, f64::min),
        initial_mean: mean(&fitness),
        best: Vec::with_capacity(cfg.generations),
        mean: Vec::with_capacity(cfg.generations),
        repair_edges: Vec::with_capacity(cfg.generations),
        final_population: Vec::new(),
        final_fitness: Vec::new(),
        generation_seconds: Vec::with_capacity(cfg.generations),
    };

    for generation in 1..=cfg.generations {
        let started = Instant::now();
        let ranked = rank(&fitness);
        let elites: Vec<(Graph, f64)> = ranked[..cfg.elite_count]
            .iter()
            .map(|&i| (population[i].clone(), fitness[i]))
            .collect();

        let pool: Vec<Graph> = (0..cfg.population_size)
            .map(|_| population[tournament_select(&fitness, cfg.tournament_size, rng)].clone())
            .collect();
        let crossed = cfg.crossover.apply(&pool, rng)?;
        let mut offspring = Vec::with_capacity(crossed.children.len());
        for child in &crossed.children {
            offspring.push(operators::mutate(child, target.lambda2, &cfg.mutation, rng)?);
        }
        let mut off_fit = cache.evaluate(&offspring, &target.density)?;

        let worst_first: Vec<usize> = rank(&off_fit).into_iter().rev().collect();
        for ((graph, fit), &slot) in elites.into_iter().zip(&worst_first) {
            offspring[slot] = graph;
            off_fit[slot] = fit;
        }
        population = offspring;
        fitness = off_fit;

        record.best.push(fitness.iter().copied().fold(f64::INFINITY, f64::min));
        record.mean.push(mean(&fitness));
        record.repair_edges.push(crossed.repair_edges);
        record.generation_seconds.push(started.elapsed().as_secs_f64());
        observer.generation(generation, &population, &fitness);
    }

    let order = rank(&fitness);
    record.final_population = order.iter().map(|&i| population[i].clone()).collect();
    record.final_fitness = order.iter().map(|&i| fitness[i]).collect();
    Ok(record)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
