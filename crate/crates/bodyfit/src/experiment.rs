//! Batch reconstruction experiments over synthetic subjects.
//!
//! Each subject is a chromosome drawn from the model's parameter space. Its
//! rendered front and side masks become the fit targets, the optimizer runs
//! from scratch, and the reconstruction is compared to the generator through
//! the anthropometric measurements, both bodies rescaled to a common stature
//! so the comparison ignores overall size. Per-iteration errors give the
//! convergence curve; per-subject failures are recorded and excluded rather
//! than aborting the batch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::anthropometry::{error_stats, key_aggregate, measure_at_height, ErrorStats, MEASUREMENT_COUNT};
use crate::error::{Error, Result};
use crate::fitting::{fit, render_views, FitResult, FitTarget, SilhouetteObjective, EVAL_HEIGHT, EVAL_WIDTH};
use crate::ga::{GAConfig, IterationStats, RunHistory};
use crate::model::{synthesize_shape, ParamVector, StatModel, POSE_GENES, SHAPE_GENES};
use crate::objective::WeightConfig;
use crate::synthetic::REFERENCE_HEIGHT_MM;

/// Subject shape coefficients stay within two standard deviations and poses
/// keep a little clearance from the fully closed stance, the range a
/// photographed person in the standard posture occupies.
pub const SUBJECT_SHAPE_SPAN: f64 = 2.0;
pub const SUBJECT_POSE_MIN: f64 = 2.0;
pub const SUBJECT_POSE_MAX: f64 = 28.0;

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub subjects: usize,
    /// Master seed: drives subject draws and offsets each subject's
    /// optimizer seed.
    pub seed: u64,
    /// Raster size of the simulated subject photographs.
    pub target_width: usize,
    pub target_height: usize,
    /// Raster size used while scoring candidates.
    pub eval_width: usize,
    pub eval_height: usize,
    pub weights: WeightConfig,
    pub ga: GAConfig,
    /// Test hook: score the true chromosome instead of optimizing, which
    /// must reproduce the generator exactly.
    pub oracle: bool,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            subjects: 10,
            seed: 0,
            target_width: 640,
            target_height: 480,
            eval_width: EVAL_WIDTH,
            eval_height: EVAL_HEIGHT,
            weights: WeightConfig::defaults(),
            ga: GAConfig::default(),
            oracle: false,
        }
    }
}

/// Draws one subject chromosome.
pub fn draw_subject(rng: &mut ChaCha12Rng) -> ParamVector {
    let mut shape = [0.0; SHAPE_GENES];
    for g in &mut shape {
        *g = rng.random_range(-SUBJECT_SHAPE_SPAN..=SUBJECT_SHAPE_SPAN);
    }
    let mut pose = [0.0; POSE_GENES];
    for p in &mut pose {
        *p = rng.random_range(SUBJECT_POSE_MIN..=SUBJECT_POSE_MAX);
    }
    ParamVector::new(shape, pose).expect("draw ranges sit inside the gene ranges")
}

/// Tailor measurements of the body a parameter vector describes, taken on
/// the rest-pose shape (girths are defined in standard posture; the pose
/// genes only matter for the silhouettes) and rescaled to reference stature.
pub fn normalized_measurements(
    model: &StatModel,
    params: &ParamVector,
) -> Result<[f64; MEASUREMENT_COUNT]> {
    let mesh = synthesize_shape(model, params)?;
    measure_at_height(&mesh, &model.landmarks, REFERENCE_HEIGHT_MM)
}

#[derive(Debug, Clone)]
pub struct SubjectOutcome {
    pub truth: ParamVector,
    pub result: FitResult,
    pub truth_measurements: [f64; MEASUREMENT_COUNT],
    pub fit_measurements: [f64; MEASUREMENT_COUNT],
    /// Mean absolute error over the key measure subset, millimetres.
    pub key_error: f64,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub subjects: Vec<SubjectOutcome>,
    /// Index and error message of every subject whose fit aborted.
    pub failures: Vec<(usize, String)>,
    pub stats: ErrorStats,
    /// Across-subject mean of the key measurement error after each
    /// optimizer iteration.
    pub convergence: Vec<f64>,
}

fn key_error(
    truth: &[f64; MEASUREMENT_COUNT],
    estimate: &[f64; MEASUREMENT_COUNT],
) -> f64 {
    let stats = error_stats(&[*truth], &[*estimate]).expect("one subject");
    key_aggregate(&stats.mean, &stats.std).0
}

fn oracle_history(objective: &SilhouetteObjective, truth: &ParamVector) -> Result<FitResult> {
    let genes = truth.genes();
    let breakdown = objective.breakdown(&genes)?;
    Ok(FitResult {
        params: ParamVector::from_genes_clamped(&genes),
        cost: breakdown.total,
        history: RunHistory {
            iterations: vec![IterationStats {
                best_cost: breakdown.total,
                mean_cost: breakdown.total,
                best_genes: genes,
            }],
        },
        breakdown,
    })
}

fn fit_subject(
    model: &StatModel,
    cfg: &BatchConfig,
    index: usize,
    truth: &ParamVector,
) -> Result<SubjectOutcome> {
    let (front, side) = render_views(model, truth, cfg.target_width, cfg.target_height)?;
    let target = FitTarget::from_masks(&front, &side)?;
    let result = if cfg.oracle {
        let objective = SilhouetteObjective::new(
            model,
            target,
            cfg.weights.clone(),
            cfg.eval_width,
            cfg.eval_height,
        )?;
        oracle_history(&objective, truth)?
    } else {
        let ga = GAConfig {
            seed: cfg.ga.seed.wrapping_add(index as u64),
            ..cfg.ga.clone()
        };
        fit(
            model,
            target,
            cfg.weights.clone(),
            &ga,
            cfg.eval_width,
            cfg.eval_height,
        )?
    };
    let truth_measurements = normalized_measurements(model, truth)?;
    let fit_measurements = normalized_measurements(model, &result.params)?;
    Ok(SubjectOutcome {
        truth: truth.clone(),
        key_error: key_error(&truth_measurements, &fit_measurements),
        result,
        truth_measurements,
        fit_measurements,
    })
}

/// Mean key measurement error per iteration, averaged across subjects. Runs
/// can stop early, so the curve covers the shortest history.
fn convergence_curve(model: &StatModel, subjects: &[SubjectOutcome]) -> Result<Vec<f64>> {
    let len = subjects
        .iter()
        .map(|s| s.result.history.iterations.len())
        .min()
        .unwrap_or(0);
    let mut curve = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = 0.0;
        for s in subjects {
            let genes = s.result.history.iterations[k].best_genes;
            let params = ParamVector::from_genes_clamped(&genes);
            let est = normalized_measurements(model, &params)?;
            acc += key_error(&s.truth_measurements, &est);
        }
        curve.push(acc / subjects.len() as f64);
    }
    Ok(curve)
}

pub fn run_batch(model: &StatModel, cfg: &BatchConfig) -> Result<BatchOutcome> {
    if cfg.subjects == 0 {
        return Err(Error::Config("batch needs at least one subject".into()));
    }
    cfg.weights.validate()?;
    cfg.ga.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let truths: Vec<ParamVector> = (0..cfg.subjects).map(|_| draw_subject(&mut rng)).collect();
    let mut subjects = Vec::new();
    let mut failures = Vec::new();
    for (i, truth) in truths.iter().enumerate() {
        match fit_subject(model, cfg, i, truth) {
            Ok(outcome) => subjects.push(outcome),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    if subjects.is_empty() {
        let (i, e) = failures.swap_remove(0);
        return Err(Error::invalid(format!(
            "every subject failed; subject {i}: {e}"
        )));
    }
    let truth_m: Vec<[f64; MEASUREMENT_COUNT]> =
        subjects.iter().map(|s| s.truth_measurements).collect();
    let fit_m: Vec<[f64; MEASUREMENT_COUNT]> =
        subjects.iter().map(|s| s.fit_measurements).collect();
    let stats = error_stats(&truth_m, &fit_m)?;
    let convergence = convergence_curve(model, &subjects)?;
    Ok(BatchOutcome {
        subjects,
        failures,
        stats,
        convergence,
    })
}
