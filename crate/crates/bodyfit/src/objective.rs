//! Weighted silhouette matching cost.
//!
//! A view's cost averages the matched pair distances, each scaled by the
//! weight of the body part the model point belongs to, then adds weighted
//! gaps between the highest and lowest points of the two boundaries. The two
//! view costs combine linearly into the total fitness. Torso parts carry the
//! heaviest weights because girth measurements depend on them; extremities
//! contribute less, and the extreme-point terms anchor overall stature.

use crate::error::{Error, Result};
use crate::mesh::BodyPart;
use crate::registration::{CorrespondenceSet, ExtremePair};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightConfig {
    part: [f64; 9],
    pub top: f64,
    pub bottom: f64,
    pub front: f64,
    pub side: f64,
}

impl WeightConfig {
    /// Default per-part weighting, tuned for girth recovery: torso 5,
    /// arm 3, head/leg/elbow 2, foot/hand 1, extremes 5, views 2 and 3.
    pub fn defaults() -> Self {
        let mut part = [0.0; 9];
        part[BodyPart::Head.index()] = 2.0;
        part[BodyPart::Chest.index()] = 5.0;
        part[BodyPart::Waist.index()] = 5.0;
        part[BodyPart::Hip.index()] = 5.0;
        part[BodyPart::Leg.index()] = 2.0;
        part[BodyPart::Foot.index()] = 1.0;
        part[BodyPart::Arm.index()] = 3.0;
        part[BodyPart::Elbow.index()] = 2.0;
        part[BodyPart::Hand.index()] = 1.0;
        WeightConfig {
            part,
            top: 5.0,
            bottom: 5.0,
            front: 2.0,
            side: 3.0,
        }
    }

    /// Every weight set to one; the baseline the default table is judged
    /// against.
    pub fn uniform() -> Self {
        WeightConfig {
            part: [1.0; 9],
            top: 1.0,
            bottom: 1.0,
            front: 1.0,
            side: 1.0,
        }
    }

    pub fn new(part: [f64; 9], top: f64, bottom: f64, front: f64, side: f64) -> Result<Self> {
        let cfg = WeightConfig {
            part,
            top,
            bottom,
            front,
            side,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .part
            .iter()
            .chain([&self.top, &self.bottom, &self.front, &self.side]);
        for &w in all {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "weights must be finite and nonnegative, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn part(&self, p: BodyPart) -> f64 {
        self.part[p.index()]
    }

    pub fn set_part(&mut self, p: BodyPart, w: f64) {
        self.part[p.index()] = w;
    }
}

/// One view's cost split into its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewCostDetail {
    pub total: f64,
    /// Contribution of each body part to the averaged pair term.
    pub part_share: [f64; 9],
    pub top_term: f64,
    pub bottom_term: f64,
}

/// Weighted cost of one view: mean of distance times part weight over all
/// pairs, plus the weighted top and bottom gaps.
pub fn view_cost(
    corr: &CorrespondenceSet,
    extremes: ExtremePair,
    weights: &WeightConfig,
) -> Result<f64> {
    Ok(view_cost_detail(corr, extremes, weights)?.total)
}

pub fn view_cost_detail(
    corr: &CorrespondenceSet,
    extremes: ExtremePair,
    weights: &WeightConfig,
) -> Result<ViewCostDetail> {
    if corr.pairs.is_empty() {
        return Err(Error::invalid("cannot score an empty correspondence set"));
    }
    weights.validate()?;
    let n = corr.pairs.len() as f64;
    let mut part_share = [0.0; 9];
    for pair in &corr.pairs {
        part_share[pair.label.index()] += pair.distance * weights.part(pair.label);
    }
    for share in &mut part_share {
        *share /= n;
    }
    let top_term = extremes.top_gap * weights.top;
    let bottom_term = extremes.bottom_gap * weights.bottom;
    let total = part_share.iter().sum::<f64>() + top_term + bottom_term;
    Ok(ViewCostDetail {
        total,
        part_share,
        top_term,
        bottom_term,
    })
}

/// Combined fitness of the two views.
pub fn total_cost(f_front: f64, f_side: f64, weights: &WeightConfig) -> f64 {
    weights.front * f_front + weights.side * f_side
}

/// Full scoring of one parameter vector against both target views.
#[derive(Debug, Clone, Copy)]
pub struct FitnessBreakdown {
    pub f_front: f64,
    pub f_side: f64,
    pub total: f64,
    pub front_detail: ViewCostDetail,
    pub side_detail: ViewCostDetail,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registration::Correspondence;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn corr_of(entries: &[(f64, BodyPart)]) -> CorrespondenceSet {
        let pairs = entries
            .iter()
            .enumerate()
            .map(|(i, &(distance, label))| Correspondence {
                subject: i,
                model: i,
                distance,
                label,
            })
            .collect();
        CorrespondenceSet {
            pairs,
            residual: entries.iter().map(|e| e.0 * e.0).sum(),
        }
    }

    const NO_GAPS: ExtremePair = ExtremePair {
        top_gap: 0.0,
        bottom_gap: 0.0,
    };

    #[test]
    fn perfect_match_costs_nothing() {
        let corr = corr_of(&[(0.0, BodyPart::Head), (0.0, BodyPart::Leg)]);
        let w = WeightConfig::defaults();
        assert_eq!(view_cost(&corr, NO_GAPS, &w).unwrap(), 0.0);
        assert_eq!(total_cost(0.0, 0.0, &w), 0.0);
    }

    #[test]
    fn uniform_foot_distances_average_to_the_distance() {
        let d = 0.3;
        let corr = corr_of(&vec![(d, BodyPart::Foot); 7]);
        let w = WeightConfig::defaults();
        let cost = view_cost(&corr, NO_GAPS, &w).unwrap();
        assert!((cost - d).abs() < 1e-12, "cost {cost}");
    }

    #[test]
    fn single_chest_pair_is_weighted_five_fold() {
        let d = 0.17;
        let corr = corr_of(&[(d, BodyPart::Chest)]);
        let cost = view_cost(&corr, NO_GAPS, &WeightConfig::defaults()).unwrap();
        assert!((cost - 5.0 * d).abs() < 1e-12);
    }

    #[test]
    fn extreme_gaps_enter_with_weight_five() {
        let corr = corr_of(&[(0.0, BodyPart::Hand)]);
        let gaps = ExtremePair {
            top_gap: 0.04,
            bottom_gap: 0.01,
        };
        let cost = view_cost(&corr, gaps, &WeightConfig::defaults()).unwrap();
        assert!((cost - (5.0 * 0.04 + 5.0 * 0.01)).abs() < 1e-12);
    }

    #[test]
    fn view_combination_uses_front_two_side_three() {
        let w = WeightConfig::defaults();
        assert_eq!(total_cost(1.0, 1.0, &w), 5.0);
        assert_eq!(total_cost(1.0, 0.0, &w), 2.0);
        assert_eq!(total_cost(0.0, 1.0, &w), 3.0);
        let degenerate = WeightConfig::new([1.0; 9], 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(total_cost(0.7, 123.0, &degenerate), 0.7);
    }

    #[test]
    fn detail_terms_sum_to_the_total() {
        let corr = corr_of(&[
            (0.1, BodyPart::Head),
            (0.2, BodyPart::Chest),
            (0.3, BodyPart::Chest),
            (0.05, BodyPart::Hand),
        ]);
        let gaps = ExtremePair {
            top_gap: 0.02,
            bottom_gap: 0.07,
        };
        let w = WeightConfig::defaults();
        let detail = view_cost_detail(&corr, gaps, &w).unwrap();
        let sum: f64 = detail.part_share.iter().sum::<f64>() + detail.top_term + detail.bottom_term;
        assert!((detail.total - sum).abs() < 1e-12);
        assert_eq!(detail.total, view_cost(&corr, gaps, &w).unwrap());
        // Chest share: (0.2*5 + 0.3*5)/4.
        assert!((detail.part_share[BodyPart::Chest.index()] - 0.625).abs() < 1e-12);
    }

    #[test]
    fn cost_scales_linearly_with_distances() {
        let mut rng = StdRng::seed_from_u64(13);
        let w = WeightConfig::defaults();
        for _ in 0..20 {
            let entries: Vec<(f64, BodyPart)> = (0..50)
                .map(|_| {
                    (
                        rng.random_range(0.0..1.0),
                        BodyPart::ALL[rng.random_range(0..9)],
                    )
                })
                .collect();
            let gaps = ExtremePair {
                top_gap: rng.random_range(0.0..0.5),
                bottom_gap: rng.random_range(0.0..0.5),
            };
            let s = rng.random_range(0.1..10.0);
            let scaled: Vec<(f64, BodyPart)> =
                entries.iter().map(|&(d, l)| (d * s, l)).collect();
            let scaled_gaps = ExtremePair {
                top_gap: gaps.top_gap * s,
                bottom_gap: gaps.bottom_gap * s,
            };
            let base = view_cost(&corr_of(&entries), gaps, &w).unwrap();
            let big = view_cost(&corr_of(&scaled), scaled_gaps, &w).unwrap();
            assert!((big - base * s).abs() < 1e-9 * big.max(1.0));
        }
    }

    #[test]
    fn growing_any_distance_never_lowers_the_cost() {
        let mut rng = StdRng::seed_from_u64(19);
        let w = WeightConfig::defaults();
        let entries: Vec<(f64, BodyPart)> = (0..30)
            .map(|_| {
                (
                    rng.random_range(0.0..1.0),
                    BodyPart::ALL[rng.random_range(0..9)],
                )
            })
            .collect();
        let base = view_cost(&corr_of(&entries), NO_GAPS, &w).unwrap();
        for k in 0..entries.len() {
            let mut bumped = entries.clone();
            bumped[k].0 += 0.5;
            let cost = view_cost(&corr_of(&bumped), NO_GAPS, &w).unwrap();
            assert!(cost >= base);
        }
    }

    #[test]
    fn invalid_weights_are_rejected() {
        assert!(WeightConfig::new([1.0; 9], -1.0, 1.0, 1.0, 1.0).is_err());
        let mut part = [1.0; 9];
        part[3] = f64::NAN;
        assert!(WeightConfig::new(part, 1.0, 1.0, 1.0, 1.0).is_err());
        let empty = CorrespondenceSet {
            pairs: Vec::new(),
            residual: 0.0,
        };
        assert!(view_cost(&empty, NO_GAPS, &WeightConfig::defaults()).is_err());
    }
}
