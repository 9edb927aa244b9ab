//! Temporal saliency over slices and density-adaptive event dropping.
//!
//! Each in-scope slice `i` drops its events independently with probability
//! `min(1, d_i / d_min * p)`, where `d_min` is the smallest in-scope slice
//! density and `p` the base rate. Denser slices lose proportionally more.
//!
//! With count-based slicing every slice holds the same number of events, so
//! the rates are uniform; the adaptive behaviour shows up with the
//! top-fraction scope or with externally supplied (e.g. time-based) plans.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::event::EventStream;
use crate::integrator::SlicePlan;
use crate::saliency::SaliencyRanking;
use crate::seed;

/// Event count of every slice in `plan`.
pub fn temporal_saliency(stream: &EventStream, plan: &SlicePlan) -> Result<SaliencyRanking> {
    plan.check_against(stream)?;
    let densities = plan
        .boundaries()
        .iter()
        .map(|&(start, end)| (end - start) as u64)
        .collect();
    Ok(SaliencyRanking::from_densities(densities))
}

/// Which slices are eligible for dropping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DropScope {
    AllSlices,
    /// The `ceil(q * T)` most salient slices, `0 < q <= 1`.
    TopFraction(f64),
}

impl DropScope {
    fn in_scope(self, ranking: &SaliencyRanking) -> Result<Vec<bool>> {
        let n = ranking.len();
        match self {
            DropScope::AllSlices => Ok(vec![true; n]),
            DropScope::TopFraction(q) => {
                if !(q > 0.0 && q <= 1.0) {
                    return Err(Error::InvalidRate {
                        name: "top fraction q (must be > 0)",
                        value: q,
                    });
                }
                let exact = n as f64 * q;
                let count = ((exact - exact * 1e-12).ceil() as usize).clamp(1, n.max(1));
                let mut scope = vec![false; n];
                for &i in ranking.order().iter().take(count) {
                    scope[i] = true;
                }
                Ok(scope)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalDropPlan {
    densities: Vec<u64>,
    min_density: u64,
    base_rate: f64,
    rates: Vec<f64>,
}

impl TemporalDropPlan {
    pub fn densities(&self) -> &[u64] {
        &self.densities
    }

    pub fn min_density(&self) -> u64 {
        self.min_density
    }

    pub fn base_rate(&self) -> f64 {
        self.base_rate
    }

    /// Drop probability per slice; 0 outside the scope.
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn num_slices(&self) -> usize {
        self.rates.len()
    }
}

pub fn build_drop_plan(
    ranking: &SaliencyRanking,
    base_rate: f64,
    scope: DropScope,
) -> Result<TemporalDropPlan> {
    if !(0.0..=1.0).contains(&base_rate) {
        return Err(Error::InvalidRate {
            name: "base rate p",
            value: base_rate,
        });
    }
    let in_scope = scope.in_scope(ranking)?;
    let densities = ranking.densities();
    let min_density = densities
        .iter()
        .zip(&in_scope)
        .filter(|(_, &s)| s)
        .map(|(&d, _)| d)
        .min()
        .ok_or(Error::ZeroSlices)?;
    if min_density == 0 {
        return Err(Error::ZeroMinDensity);
    }
    let rates = densities
        .iter()
        .zip(&in_scope)
        .map(|(&d, &s)| {
            if s {
                (d as f64 / min_density as f64 * base_rate).min(1.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(TemporalDropPlan {
        densities: densities.to_vec(),
        min_density,
        base_rate,
        rates,
    })
}

/// Bernoulli-drops events slice by slice. Slice `i` draws from its own
/// generator seeded by `(seed, i)`, so slices can run in parallel without
/// changing the result. Events outside every slice are always kept.
pub fn tsem_filter_events(
    stream: &EventStream,
    slice_plan: &SlicePlan,
    drop_plan: &TemporalDropPlan,
    seed: u64,
) -> Result<EventStream> {
    slice_plan.check_against(stream)?;
    if drop_plan.num_slices() != slice_plan.num_slices() {
        return Err(Error::PlanMismatch(format!(
            "drop plan has {} slices, slice plan has {}",
            drop_plan.num_slices(),
            slice_plan.num_slices()
        )));
    }

    let dropped: Vec<Vec<bool>> = slice_plan
        .boundaries()
        .par_iter()
        .zip(drop_plan.rates())
        .enumerate()
        .map(|(i, (&(start, end), &rate))| {
            if rate <= 0.0 {
                return vec![false; end - start];
            }
            let mut rng = seed::rng(seed::derive_seed(seed, i as u64));
            (start..end).map(|_| rng.gen::<f64>() < rate).collect()
        })
        .collect();

    let mut drop = vec![false; stream.len()];
    for (&(start, _), flags) in slice_plan.boundaries().iter().zip(&dropped) {
        drop[start..start + flags.len()].copy_from_slice(flags);
    }
    Ok(stream.retain_indices(|i, _| !drop[i]))
}
