use super::EstimatorField;
use std::collections::BTreeSet;

/// How `theta` enters the bulk criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MarkingConvention {
    /// `sum_M η² >= θ² sum η²`
    #[default]
    ThetaSquared,
    /// `sum_M η² >= θ sum η²`
    Theta,
}

/// Dörfler marking: the smallest set, taken greedily by decreasing `η`
/// with ties broken by triangle index, carrying the required fraction of
/// the squared estimator.
pub fn dorfler_mark(estimator: &EstimatorField, theta: f64, convention: MarkingConvention) -> BTreeSet<usize> {
    let mut order: Vec<usize> = (0..estimator.eta.len()).collect();
    order.sort_by(|&a, &b| estimator.eta[b].total_cmp(&estimator.eta[a]).then(a.cmp(&b)));
    // summing in the sorted order makes theta = 1 stop exactly at the last
    // positive contribution
    let total: f64 = order.iter().map(|&t| estimator.eta[t].powi(2)).sum();
    let fraction = match convention {
        MarkingConvention::ThetaSquared => theta * theta,
        MarkingConvention::Theta => theta,
    };
    let threshold = fraction * total;
    let mut marked = BTreeSet::new();
    if total == 0.0 {
        return marked;
    }
    let mut sum = 0.0;
    for t in order {
        if sum >= threshold {
            break;
        }
        sum += estimator.eta[t].powi(2);
        marked.insert(t);
    }
    marked
}
