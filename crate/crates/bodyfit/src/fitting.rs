//! End-to-end silhouette fitting: from a parameter vector to a matching cost,
//! and from two target masks to a reconstructed body.
//!
//! Target masks are reduced once to normalized boundary contours. Scoring a
//! chromosome then synthesizes the mesh, renders it into both views, traces
//! and normalizes the resulting contours, rigidly aligns the target onto the
//! render, and feeds the matched pairs through the weighted cost. Degenerate
//! candidates score infinity instead of erroring so an optimization run never
//! aborts mid-flight.
//!
//! The evaluation raster is deliberately smaller than typical target images:
//! scoring only needs the contour, and a coarser grid keeps the per-candidate
//! cost low. Because target and render then quantize differently, even the
//! generating chromosome keeps a small positive cost, which serves as the
//! empirical noise floor self-consistency checks compare against.

use nalgebra::Point2;
use rayon::prelude::*;

use crate::contour::trace_boundary;
use crate::error::{Error, Result};
use crate::ga::{self, GAConfig, RunHistory};
use crate::kdtree::KdTree2;
use crate::mesh::{BodyPart, Mesh};
use crate::model::{synthesize, ParamVector, StatModel, GENE_COUNT};
use crate::objective::{total_cost, view_cost_detail, FitnessBreakdown, WeightConfig};
use crate::projection::{project, ViewSpec};
use crate::raster::{rasterize, BinaryImage, DEFAULT_MARGIN};
use crate::registration::{
    extreme_points, normalize_boundary, pairwise_match, rigid_register, ICP_MAX_ITERS, ICP_TOL,
};

/// Default raster size for scoring candidates during optimization.
pub const EVAL_WIDTH: usize = 320;
pub const EVAL_HEIGHT: usize = 240;

/// Renders the binary mask a mesh casts in one view.
pub fn render_mask(
    mesh: &Mesh,
    view: ViewSpec,
    width: usize,
    height: usize,
) -> Result<BinaryImage> {
    let projected = project(mesh, view)?;
    let (img, _) = rasterize(&projected.points, &mesh.faces, width, height, DEFAULT_MARGIN)?;
    Ok(img)
}

/// Front and side masks of one model instance, the synthetic stand-in for a
/// photographed subject.
pub fn render_views(
    model: &StatModel,
    params: &ParamVector,
    width: usize,
    height: usize,
) -> Result<(BinaryImage, BinaryImage)> {
    let mesh = synthesize(model, params)?;
    let front = render_mask(&mesh, ViewSpec::front(), width, height)?;
    let side = render_mask(&mesh, ViewSpec::side(), width, height)?;
    Ok((front, side))
}

fn boundary_points(mask: &BinaryImage) -> Result<Vec<Point2<f64>>> {
    let boundary = trace_boundary(mask)?;
    Ok(boundary
        .unique_pixels()
        .into_iter()
        .map(|(x, y)| Point2::new(x as f64, y as f64))
        .collect())
}

/// A target view reduced to its normalized outer contour.
#[derive(Debug, Clone)]
pub struct TargetView {
    pub boundary: Vec<Point2<f64>>,
}

impl TargetView {
    pub fn from_mask(mask: &BinaryImage) -> Result<TargetView> {
        let pts = boundary_points(mask)?;
        Ok(TargetView {
            boundary: normalize_boundary(&pts)?,
        })
    }
}

/// Both subject views, prepared once per fit.
#[derive(Debug, Clone)]
pub struct FitTarget {
    pub front: TargetView,
    pub side: TargetView,
}

impl FitTarget {
    pub fn from_masks(front: &BinaryImage, side: &BinaryImage) -> Result<FitTarget> {
        Ok(FitTarget {
            front: TargetView::from_mask(front)?,
            side: TargetView::from_mask(side)?,
        })
    }
}

/// Scores chromosomes against one prepared target.
pub struct SilhouetteObjective<'m> {
    model: &'m StatModel,
    target: FitTarget,
    weights: WeightConfig,
    width: usize,
    height: usize,
}

impl<'m> SilhouetteObjective<'m> {
    pub fn new(
        model: &'m StatModel,
        target: FitTarget,
        weights: WeightConfig,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        weights.validate()?;
        Ok(SilhouetteObjective {
            model,
            target,
            weights,
            width,
            height,
        })
    }

    pub fn weights(&self) -> &WeightConfig {
        &self.weights
    }

    /// Renders one view of the candidate and returns its normalized contour
    /// with a body-part label per contour point, taken from the nearest
    /// projected vertex.
    fn model_boundary(
        &self,
        mesh: &Mesh,
        view: ViewSpec,
    ) -> Result<(Vec<Point2<f64>>, Vec<BodyPart>)> {
        let projected = project(mesh, view)?;
        let (mask, fit) = rasterize(
            &projected.points,
            &mesh.faces,
            self.width,
            self.height,
            DEFAULT_MARGIN,
        )?;
        let pts = boundary_points(&mask)?;
        let labels = projected
            .labels
            .as_ref()
            .ok_or_else(|| Error::invalid("model mesh carries no part labels"))?;
        let mapped: Vec<Point2<f64>> =
            projected.points.iter().map(|&p| fit.apply(p)).collect();
        let kd = KdTree2::new(&mapped)?;
        let point_labels = pts
            .iter()
            .map(|&p| labels[kd.nearest(p).0])
            .collect();
        Ok((normalize_boundary(&pts)?, point_labels))
    }

    fn score_view(
        &self,
        mesh: &Mesh,
        view: ViewSpec,
        target: &TargetView,
    ) -> Result<crate::objective::ViewCostDetail> {
        let (model_pts, labels) = self.model_boundary(mesh, view)?;
        let reg = rigid_register(&target.boundary, &model_pts, ICP_MAX_ITERS, ICP_TOL)?;
        let moved = reg.transform.apply_all(&target.boundary);
        let corr = pairwise_match(&moved, &model_pts, &labels)?;
        let extremes = extreme_points(&moved, &model_pts)?;
        view_cost_detail(&corr, extremes, &self.weights)
    }

    /// Full scoring with per-view and per-part terms.
    pub fn breakdown(&self, genes: &[f64; GENE_COUNT]) -> Result<FitnessBreakdown> {
        let params = ParamVector::from_genes_clamped(genes);
        let mesh = synthesize(self.model, &params)?;
        let front = self.score_view(&mesh, ViewSpec::front(), &self.target.front)?;
        let side = self.score_view(&mesh, ViewSpec::side(), &self.target.side)?;
        Ok(FitnessBreakdown {
            f_front: front.total,
            f_side: side.total,
            total: total_cost(front.total, side.total, &self.weights),
            front_detail: front,
            side_detail: side,
        })
    }

    /// Scalar cost; degenerate candidates score infinity.
    pub fn cost(&self, genes: &[f64; GENE_COUNT]) -> f64 {
        self.breakdown(genes)
            .map(|b| b.total)
            .unwrap_or(f64::INFINITY)
    }

    /// Costs for a whole generation, order-preserving.
    pub fn batch_costs(&self, batch: &[[f64; GENE_COUNT]]) -> Vec<f64> {
        batch.par_iter().map(|g| self.cost(g)).collect()
    }
}

/// A finished reconstruction.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: ParamVector,
    pub cost: f64,
    pub history: RunHistory,
    pub breakdown: FitnessBreakdown,
}

/// Optimizes the body parameters against a prepared target.
pub fn fit(
    model: &StatModel,
    target: FitTarget,
    weights: WeightConfig,
    ga_cfg: &GAConfig,
    width: usize,
    height: usize,
) -> Result<FitResult> {
    let objective = SilhouetteObjective::new(model, target, weights, width, height)?;
    let outcome = ga::run(ga_cfg, |batch| objective.batch_costs(batch))?;
    let breakdown = objective.breakdown(&outcome.best_genes)?;
    Ok(FitResult {
        params: ParamVector::from_genes_clamped(&outcome.best_genes),
        cost: outcome.best_cost,
        history: outcome.history,
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::test_model;

    fn truth_params(seed: u64) -> ParamVector {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut shape = [0.0; 20];
        for g in &mut shape {
            *g = rng.random_range(-2.0..2.0);
        }
        let mut pose = [0.0; 4];
        for p in &mut pose {
            *p = rng.random_range(0.0..20.0);
        }
        ParamVector::new(shape, pose).unwrap()
    }

    #[test]
    fn rendered_views_have_distinct_aspect() {
        let model = test_model();
        let params = ParamVector::zeros();
        let (front, side) = render_views(model, &params, 320, 240).unwrap();
        assert!(front.foreground_count() > 500);
        assert!(side.foreground_count() > 500);
        // A body is wider from the front than from the side.
        let row_width = |img: &BinaryImage| {
            img.foreground_pixels()
                .iter()
                .map(|&(x, _)| x)
                .max()
                .unwrap()
                - img.foreground_pixels().iter().map(|&(x, _)| x).min().unwrap()
        };
        assert!(row_width(&front) > row_width(&side));
    }

    #[test]
    fn target_preparation_normalizes_the_contour() {
        let model = test_model();
        let (front, side) = render_views(model, &truth_params(3), 640, 480).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        for view in [&target.front, &target.side] {
            let ys: Vec<f64> = view.boundary.iter().map(|p| p.y).collect();
            let extent = ys.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - ys.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            assert!((extent - 1.0).abs() < 1e-9);
            let cx = view.boundary.iter().map(|p| p.x).sum::<f64>()
                / view.boundary.len() as f64;
            assert!(cx.abs() < 1e-9);
        }
        let empty = BinaryImage::new(64, 64);
        assert!(FitTarget::from_masks(&empty, &front).is_err());
    }

    #[test]
    fn self_match_at_equal_resolution_is_free() {
        // Identical raster path on both sides: the generating chromosome
        // reproduces the target contour exactly, so every pair distance and
        // both extreme gaps vanish.
        let model = test_model();
        let params = truth_params(11);
        let (front, side) = render_views(model, &params, 320, 240).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        let obj =
            SilhouetteObjective::new(model, target, WeightConfig::defaults(), 320, 240).unwrap();
        assert_eq!(obj.cost(&params.genes()), 0.0);
    }

    #[test]
    fn self_match_floor_across_resolutions_is_small() {
        // Target rendered large, scored small: quantization alone separates
        // the contours, which bounds the noise floor of every later fit.
        let model = test_model();
        let params = truth_params(11);
        let (front, side) = render_views(model, &params, 640, 480).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        let obj = SilhouetteObjective::new(
            model,
            target,
            WeightConfig::defaults(),
            EVAL_WIDTH,
            EVAL_HEIGHT,
        )
        .unwrap();
        let floor = obj.cost(&params.genes());
        assert!(floor > 0.0, "distinct quantizations cannot match exactly");
        assert!(floor < 0.2, "noise floor {floor} is out of scale");
    }

    #[test]
    fn truth_outscores_perturbed_candidates() {
        let model = test_model();
        let params = truth_params(5);
        let (front, side) = render_views(model, &params, 640, 480).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        let obj = SilhouetteObjective::new(
            model,
            target,
            WeightConfig::defaults(),
            EVAL_WIDTH,
            EVAL_HEIGHT,
        )
        .unwrap();
        let floor = obj.cost(&params.genes());
        let mut genes = params.genes();
        for slot in [0, 3, 7] {
            genes[slot] = (genes[slot] + 2.5).clamp(-3.0, 3.0);
        }
        let perturbed = obj.cost(&genes);
        assert!(
            perturbed > 2.0 * floor,
            "perturbed {perturbed} vs floor {floor}"
        );
    }

    #[test]
    fn batch_costs_match_single_evaluations() {
        let model = test_model();
        let params = truth_params(2);
        let (front, side) = render_views(model, &params, 320, 240).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        let obj =
            SilhouetteObjective::new(model, target, WeightConfig::defaults(), 160, 120).unwrap();
        let batch = [
            params.genes(),
            [0.0; GENE_COUNT],
            {
                let mut g = [0.0; GENE_COUNT];
                g[0] = 3.0;
                g[23] = 30.0;
                g
            },
        ];
        let costs = obj.batch_costs(&batch);
        assert_eq!(costs.len(), 3);
        for (genes, &cost) in batch.iter().zip(&costs) {
            assert_eq!(cost, obj.cost(genes));
            assert!(cost.is_finite());
        }
    }

    #[test]
    fn short_fit_improves_on_its_first_generation() {
        let model = test_model();
        let params = truth_params(21);
        let (front, side) = render_views(model, &params, 640, 480).unwrap();
        let target = FitTarget::from_masks(&front, &side).unwrap();
        // The quantization floor bounds what any candidate can reach, so
        // progress is judged on the span between it and the first generation.
        let floor_obj = SilhouetteObjective::new(
            model,
            target.clone(),
            WeightConfig::defaults(),
            160,
            120,
        )
        .unwrap();
        let floor = floor_obj.cost(&params.genes());
        let ga_cfg = GAConfig {
            max_iterations: 8,
            seed: 17,
            ..GAConfig::default()
        };
        let result = fit(
            model,
            target,
            WeightConfig::defaults(),
            &ga_cfg,
            160,
            120,
        )
        .unwrap();
        let first = result.history.iterations[0].best_cost;
        assert_eq!(result.history.iterations.len(), 8);
        assert!(result.cost <= first);
        assert!(
            result.cost - floor < 0.6 * (first - floor),
            "cost {:.4} barely moved from {:.4} toward the floor {floor:.4}",
            result.cost,
            first
        );
        assert_eq!(result.breakdown.total, result.cost);
    }
}
