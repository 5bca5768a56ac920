//! Measures at the scale of a single visit (groups of closely spaced
//! exposures).

use crate::lightcurve::{Lightcurve, ObservationGroup};
use crate::stats::std_normal_pdf;

/// Floor applied to the pooled within-group deviation before taking logs or
/// dividing by it.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Denominator used by `gtvar` and `gscore`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupNormalization {
    /// Divide by the number of detected observations.
    #[default]
    Observations,
    /// Divide by the number of groups.
    Groups,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    /// Pooled within-group standard deviation (unfloored).
    pub pooled_sd: f64,
    /// Mean of the group means.
    pub grand_mean: f64,
    pub group_means: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMeasures {
    pub lsd: f64,
    pub gtvar: f64,
    pub gscore: f64,
}

pub fn group_stats(lc: &Lightcurve, groups: &[ObservationGroup]) -> GroupStats {
    let obs = lc.observations();
    let n: usize = groups.iter().map(|g| g.member_indices.len()).sum();
    let ss: f64 = groups
        .iter()
        .flat_map(|g| g.member_indices.iter().map(move |&i| obs[i].y - g.group_mean))
        .map(|r| r * r)
        .sum();
    let dof = n.saturating_sub(groups.len()).max(1);
    let group_means: Vec<f64> = groups.iter().map(|g| g.group_mean).collect();
    let grand_mean = group_means.iter().sum::<f64>() / group_means.len() as f64;
    GroupStats {
        pooled_sd: (ss / dof as f64).sqrt(),
        grand_mean,
        group_means,
    }
}

pub fn group_measures(lc: &Lightcurve, groups: &[ObservationGroup], norm: GroupNormalization) -> GroupMeasures {
    let st = group_stats(lc, groups);
    let sigma = st.pooled_sd.max(SIGMA_FLOOR);
    let denom = match norm {
        GroupNormalization::Observations => lc.n(),
        GroupNormalization::Groups => groups.len(),
    } as f64;
    let gtvar = st
        .group_means
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .sum::<f64>()
        / denom;
    let gscore = st
        .group_means
        .iter()
        .map(|g| std_normal_pdf((g - st.grand_mean) / sigma))
        .sum::<f64>()
        / denom;
    GroupMeasures {
        lsd: sigma.ln(),
        gtvar,
        gscore,
    }
}
