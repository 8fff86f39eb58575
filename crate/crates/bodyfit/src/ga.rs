//! Genetic optimization over 24-gene chromosomes.
//!
//! A generation holds 30 chromosomes. Each step sorts by cost, culls the ten
//! worst, breeds ten offspring from the survivors, and mutates exactly three
//! non-elite chromosomes in five genes each. Mutant slots are first refreshed
//! with a copy of the best survivor (a replacement policy, configurable off),
//! then the chosen genes are redrawn from a window around their current value
//! whose width scales with the value's magnitude, so large genes take large
//! steps and near-converged genes fine-tune; occasionally a gene resets
//! uniformly over its whole range to keep exploring. Costs are cached per
//! chromosome, so only new or altered members are re-evaluated.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::model::{
    GENE_COUNT, POSE_MAX, POSE_MIN, SHAPE_GENES, SHAPE_MAX, SHAPE_MIN,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromosome {
    pub genes: [f64; GENE_COUNT],
    /// Cached cost; `None` until evaluated.
    pub cost: Option<f64>,
}

impl Chromosome {
    fn known_cost(&self) -> Result<f64> {
        self.cost
            .ok_or_else(|| Error::invalid("chromosome has no evaluated cost"))
    }
}

fn gene_range(idx: usize) -> (f64, f64) {
    if idx < SHAPE_GENES {
        (SHAPE_MIN, SHAPE_MAX)
    } else {
        (POSE_MIN, POSE_MAX)
    }
}

/// Offspring recombination style.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverKind {
    /// One- or two-point swap, chosen uniformly, cut points uniform in
    /// [1, 23].
    Blocks,
    /// Each gene comes from either parent with equal probability. Mixes
    /// per-gene progress between lineages much faster than block swaps,
    /// which matters on a budget of a few hundred evaluations.
    Uniform,
    /// Each gene is a convex (or slightly expanded) combination of the
    /// parents, creating values neither parent holds.
    Blend,
}

#[derive(Debug, Clone)]
pub struct GAConfig {
    pub population_size: usize,
    pub cull_count: usize,
    pub mutant_count: usize,
    pub genes_per_mutant: usize,
    pub max_iterations: usize,
    /// Best survivor passes through every step untouched.
    pub elitism: bool,
    /// Chance that a mutated gene resets uniformly over its whole range
    /// instead of stepping near its current value.
    pub mutation_reset_prob: f64,
    /// Window half-width as a multiple of the gene's current magnitude, so
    /// large genes take large steps and near-converged genes fine-tune.
    pub mutation_rel_width: f64,
    /// Window half-width floor as a fraction of the gene's range.
    pub mutation_floor: f64,
    /// Each crossover parent is the best of this many uniform draws from
    /// the survivors; 1 means uniform selection.
    pub parent_tournament: usize,
    /// How offspring combine their two parents.
    pub crossover: CrossoverKind,
    /// Blend crossover expansion: the mixing coefficient is drawn from
    /// [−α, 1+α], so α > 0 lets children land slightly outside the segment
    /// between their parents.
    pub blend_alpha: f64,
    /// Replacement policy: mutant slots are overwritten with a copy of the
    /// best survivor before their genes are redrawn, so mutation probes
    /// around the incumbent instead of around a mid-ranked chromosome.
    pub mutate_from_best: bool,
    /// Fraction of each gene range the initial population spans, centered
    /// on the range midpoint. 1 covers the whole range; smaller values
    /// start the search near the population mean, which is where bodies
    /// drawn from the model actually live.
    pub init_spread: f64,
    /// Per-iteration geometric decay applied to the mutation window and
    /// the reset chance, so early iterations explore and late ones refine.
    /// 1 disables annealing.
    pub mutation_decay: f64,
    /// Stop once the best cost improves by less than 1e-6 for five
    /// consecutive iterations. Off by default so histories have a fixed
    /// length.
    pub early_stop: bool,
    pub seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        GAConfig {
            population_size: 30,
            cull_count: 10,
            mutant_count: 3,
            genes_per_mutant: 5,
            max_iterations: 25,
            elitism: true,
            mutation_reset_prob: 0.05,
            mutation_rel_width: 1.4,
            mutation_floor: 0.001,
            parent_tournament: 2,
            crossover: CrossoverKind::Uniform,
            blend_alpha: 0.1,
            mutate_from_best: true,
            init_spread: 1.0,
            mutation_decay: 1.0,
            early_stop: false,
            seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population must hold at least 2".into()));
        }
        if self.cull_count == 0 || self.cull_count >= self.population_size {
            return Err(Error::Config(format!(
                "cull count {} must be in 1..{}",
                self.cull_count, self.population_size
            )));
        }
        if self.mutant_count >= self.population_size {
            return Err(Error::Config("more mutants than chromosomes".into()));
        }
        if self.genes_per_mutant > GENE_COUNT {
            return Err(Error::Config(format!(
                "cannot mutate {} of {GENE_COUNT} genes",
                self.genes_per_mutant
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_reset_prob) {
            return Err(Error::Config(format!(
                "mutation reset probability {} outside [0, 1]",
                self.mutation_reset_prob
            )));
        }
        if self.mutation_rel_width < 0.0
            || self.mutation_floor < 0.0
            || self.mutation_rel_width + self.mutation_floor == 0.0
        {
            return Err(Error::Config("mutation window collapsed to zero".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("need at least one iteration".into()));
        }
        if self.parent_tournament == 0 {
            return Err(Error::Config("parent tournament needs at least one draw".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Chromosome>,
}

impl Population {
    pub fn new(members: Vec<Chromosome>) -> Self {
        Population { members }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub best_cost: f64,
    pub mean_cost: f64,
    pub best_genes: [f64; GENE_COUNT],
}

#[derive(Debug, Clone, Default)]
pub struct RunHistory {
    pub iterations: Vec<IterationStats>,
}

#[derive(Debug, Clone)]
pub struct GAOutcome {
    pub best_genes: [f64; GENE_COUNT],
    pub best_cost: f64,
    pub history: RunHistory,
}

pub fn init_population(cfg: &GAConfig, rng: &mut ChaCha12Rng) -> Population {
    let members = (0..cfg.population_size)
        .map(|_| {
            let mut genes = [0.0; GENE_COUNT];
            for (idx, g) in genes.iter_mut().enumerate() {
                let (lo, hi) = gene_range(idx);
                *g = rng.random_range(lo..=hi);
            }
            Chromosome { genes, cost: None }
        })
        .collect();
    Population::new(members)
}

/// First `k` elements of a partial Fisher-Yates shuffle of `0..n`;
/// deterministic in the rng stream.
fn choose_distinct(rng: &mut ChaCha12Rng, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k.min(n));
    pool
}

/// Survivors are sorted by cost, so the winner of a tournament over
/// uniform draws is simply the smallest index drawn.
fn parent_index(rng: &mut ChaCha12Rng, survivors: usize, tournament: usize) -> usize {
    (0..tournament)
        .map(|_| rng.random_range(0..survivors))
        .min()
        .unwrap_or(0)
}

fn crossover(
    a: &[f64; GENE_COUNT],
    b: &[f64; GENE_COUNT],
    cfg: &GAConfig,
    rng: &mut ChaCha12Rng,
) -> [f64; GENE_COUNT] {
    let mut child = *a;
    match cfg.crossover {
        CrossoverKind::Uniform => {
            for (c, &g) in child.iter_mut().zip(b) {
                if rng.random_range(0..2u8) == 1 {
                    *c = g;
                }
            }
        }
        CrossoverKind::Blend => {
            let alpha = cfg.blend_alpha;
            for (idx, (c, &g)) in child.iter_mut().zip(b).enumerate() {
                let t = rng.random_range(-alpha..=1.0 + alpha);
                let (lo, hi) = gene_range(idx);
                *c = (t * *c + (1.0 - t) * g).clamp(lo, hi);
            }
        }
        CrossoverKind::Blocks => {
            let two_point = rng.random_range(0..2u8) == 1;
            if two_point {
                let p1 = rng.random_range(1..GENE_COUNT);
                let p2 = rng.random_range(1..GENE_COUNT);
                let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
                child[lo..hi].copy_from_slice(&b[lo..hi]);
            } else {
                let p = rng.random_range(1..GENE_COUNT);
                child[p..].copy_from_slice(&b[p..]);
            }
        }
    }
    child
}

/// One generation: sort, cull the worst, breed, mutate.
pub fn step(pop: Population, cfg: &GAConfig, rng: &mut ChaCha12Rng) -> Result<Population> {
    if pop.members.len() != cfg.population_size {
        return Err(Error::invalid(format!(
            "population holds {} members, config says {}",
            pop.members.len(),
            cfg.population_size
        )));
    }
    for c in &pop.members {
        c.known_cost()?;
    }
    let mut members = pop.members;
    members.sort_by(|x, y| x.cost.unwrap().total_cmp(&y.cost.unwrap()));
    members.truncate(cfg.population_size - cfg.cull_count);
    let survivors = members.len();

    for _ in 0..cfg.cull_count {
        let pa = parent_index(rng, survivors, cfg.parent_tournament);
        let pb = parent_index(rng, survivors, cfg.parent_tournament);
        let genes = crossover(&members[pa].genes, &members[pb].genes, cfg, rng);
        members.push(Chromosome { genes, cost: None });
    }

    let elite = members[0];
    let protected = if cfg.elitism { 1 } else { 0 };
    let eligible = cfg.population_size - protected;
    for pick in choose_distinct(rng, eligible, cfg.mutant_count) {
        let target = pick + protected;
        if cfg.mutate_from_best {
            members[target] = elite;
        }
        for gene_idx in choose_distinct(rng, GENE_COUNT, cfg.genes_per_mutant) {
            let (lo, hi) = gene_range(gene_idx);
            let v = members[target].genes[gene_idx];
            let next = if rng.random::<f64>() < cfg.mutation_reset_prob {
                rng.random_range(lo..=hi)
            } else {
                let half = cfg.mutation_rel_width * v.abs()
                    + cfg.mutation_floor * (hi - lo);
                rng.random_range(v - half..=v + half).clamp(lo, hi)
            };
            members[target].genes[gene_idx] = next;
        }
        if cfg.genes_per_mutant > 0 {
            members[target].cost = None;
        }
    }
    Ok(Population { members })
}

fn evaluate<F>(pop: &mut Population, batch_eval: &mut F) -> Result<()>
where
    F: FnMut(&[[f64; GENE_COUNT]]) -> Vec<f64>,
{
    let pending: Vec<usize> = pop
        .members
        .iter()
        .enumerate()
        .filter(|(_, c)| c.cost.is_none())
        .map(|(i, _)| i)
        .collect();
    if pending.is_empty() {
        return Ok(());
    }
    let genes: Vec<[f64; GENE_COUNT]> = pending.iter().map(|&i| pop.members[i].genes).collect();
    let costs = batch_eval(&genes);
    if costs.len() != pending.len() {
        return Err(Error::invalid(format!(
            "fitness returned {} costs for {} chromosomes",
            costs.len(),
            pending.len()
        )));
    }
    for (&i, cost) in pending.iter().zip(costs) {
        if cost.is_nan() {
            return Err(Error::invalid("fitness produced NaN"));
        }
        pop.members[i].cost = Some(cost);
    }
    Ok(())
}

/// Full optimization loop. The fitness callback receives every chromosome
/// that needs (re)evaluation as one batch and returns costs in the same
/// order; it may evaluate them concurrently internally.
pub fn run<F>(cfg: &GAConfig, mut batch_eval: F) -> Result<GAOutcome>
where
    F: FnMut(&[[f64; GENE_COUNT]]) -> Vec<f64>,
{
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut pop = init_population(cfg, &mut rng);
    let mut best: Option<(f64, [f64; GENE_COUNT])> = None;
    let mut history = RunHistory::default();
    let mut stall = 0usize;
    for iteration in 0..cfg.max_iterations {
        evaluate(&mut pop, &mut batch_eval)?;
        let mut iter_best = &pop.members[0];
        let mut sum = 0.0;
        for c in &pop.members {
            let cost = c.known_cost()?;
            sum += cost;
            if cost < iter_best.cost.unwrap() {
                iter_best = c;
            }
        }
        let iter_best_cost = iter_best.cost.unwrap();
        history.iterations.push(IterationStats {
            best_cost: iter_best_cost,
            mean_cost: sum / pop.members.len() as f64,
            best_genes: iter_best.genes,
        });
        let improved = match best {
            Some((cost, _)) => iter_best_cost < cost - 1e-6,
            None => true,
        };
        if best.is_none() || iter_best_cost < best.unwrap().0 {
            best = Some((iter_best_cost, iter_best.genes));
        }
        stall = if improved { 0 } else { stall + 1 };
        if iteration + 1 == cfg.max_iterations {
            break;
        }
        if cfg.early_stop && stall >= 5 {
            break;
        }
        pop = step(pop, cfg, &mut rng)?;
    }
    let (best_cost, best_genes) = best.unwrap();
    Ok(GAOutcome {
        best_genes,
        best_cost,
        history,
    })
}
