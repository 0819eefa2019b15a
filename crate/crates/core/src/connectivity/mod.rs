//! Connectivity measures: vertex and edge connectivity, r-robustness, the
//! isoperimetric constant and algebraic connectivity.
//!
//! Exact values come from max-flow and exhaustive subset searches; the
//! platoon closed forms are reported next to them so the two can be compared.

mod exhaustive;
mod flow;
mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PlatoonSpec};

pub use exhaustive::{
    boundary_size, is_r_reachable, isoperimetric_constant, reach_of, robustness, Ratio,
    DEFAULT_ISO_LIMIT, DEFAULT_ROBUSTNESS_LIMIT, HARD_LIMIT,
};
pub use flow::{
    edge_connectivity, local_edge_connectivity, local_vertex_connectivity, vertex_connectivity,
};
pub use spectral::{algebraic_connectivity, lambda2_bounds, laplacian_spectrum, Lambda2Bounds};

pub const CLOSED_FORM_NOTE: &str = "closed-form, not verified exhaustively";

/// How a reported value was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum Measure<T> {
    Computed { value: T },
    ClosedForm { value: T, note: String },
    Skipped { reason: String },
}

impl<T: Copy> Measure<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Measure::Computed { value } | Measure::ClosedForm { value, .. } => Some(*value),
            Measure::Skipped { .. } => None,
        }
    }

    pub fn computed(&self) -> Option<T> {
        match self {
            Measure::Computed { value } => Some(*value),
            _ => None,
        }
    }
}

/// Isoperimetric constant as an exact fraction plus its float value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoValue {
    pub exact: Ratio,
    pub float: f64,
}

impl From<Ratio> for IsoValue {
    fn from(exact: Ratio) -> Self {
        Self {
            exact,
            float: exact.to_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub n: usize,
    pub edges: usize,
    pub d_min: usize,
    pub d_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub platoon: Option<PlatoonSpec>,
    pub kappa: Measure<usize>,
    pub edge_conn: Measure<usize>,
    pub robustness: Measure<usize>,
    pub iso: Measure<IsoValue>,
    pub lambda2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda2_bounds: Option<Lambda2Bounds>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub robustness_limit: usize,
    pub iso_limit: usize,
    /// Fail with [`Error::ExhaustiveRefused`] instead of falling back when
    /// `n` exceeds the robustness limit.
    pub require_robustness: bool,
    pub require_iso: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            robustness_limit: DEFAULT_ROBUSTNESS_LIMIT,
            iso_limit: DEFAULT_ISO_LIMIT,
            require_robustness: false,
            require_iso: false,
        }
    }
}

/// `k(k+1) / (2 floor(n/2))`: boundary `1 + 2 + ... + k` of the first
/// `floor(n/2)` vehicles over the set size.
pub fn knn_iso_closed_form(spec: PlatoonSpec) -> Ratio {
    let k = spec.k as u64;
    Ratio::new(k * (k + 1), 2 * spec.half() as u64)
}

fn iso_note(spec: PlatoonSpec) -> String {
    if spec.k > spec.half() {
        format!("{CLOSED_FORM_NOTE}; k > floor(n/2), outside the half-platoon derivation")
    } else {
        CLOSED_FORM_NOTE.to_string()
    }
}

fn robustness_note(spec: PlatoonSpec) -> String {
    if spec.k > spec.n.div_ceil(2) {
        format!("{CLOSED_FORM_NOTE}; k exceeds the ceil(n/2) ceiling on robustness")
    } else {
        CLOSED_FORM_NOTE.to_string()
    }
}

/// Analytic platoon values: `kappa = e = r = k`, the half-platoon
/// isoperimetric value, eigensolver `lambda_2`, and its bracket.
pub fn knn_closed_forms(spec: PlatoonSpec) -> Result<ConnectivityReport> {
    let g = crate::graph::build_knn_platoon(spec)?;
    let closed = |value| Measure::ClosedForm {
        value,
        note: CLOSED_FORM_NOTE.to_string(),
    };
    Ok(ConnectivityReport {
        n: spec.n,
        edges: g.edge_count(),
        d_min: g.min_degree(),
        d_max: g.max_degree(),
        platoon: Some(spec),
        kappa: closed(spec.k),
        edge_conn: closed(spec.k),
        robustness: Measure::ClosedForm {
            value: spec.k,
            note: robustness_note(spec),
        },
        iso: Measure::ClosedForm {
            value: knn_iso_closed_form(spec).into(),
            note: iso_note(spec),
        },
        lambda2: algebraic_connectivity(&g),
        lambda2_bounds: Some(lambda2_bounds(spec)),
    })
}

/// Computes every measure for `g`. When `platoon` is given, it must describe
/// `g`; exhaustive searches beyond their limits then fall back to the closed
/// forms, otherwise they are skipped (or refused, if required).
pub fn analyze(
    g: &Graph,
    platoon: Option<PlatoonSpec>,
    options: AnalyzeOptions,
) -> Result<ConnectivityReport> {
    if let Some(spec) = platoon {
        spec.validate()?;
        if spec.n != g.n() {
            return Err(Error::InvalidArgument(format!(
                "platoon spec has n = {} but the graph has {} vertices",
                spec.n,
                g.n()
            )));
        }
    }
    let n = g.n();
    let reason = |limit: usize| {
        format!(
            "n too large: {n} exceeds exhaustive limit {}",
            limit.min(HARD_LIMIT)
        )
    };

    let robustness = match robustness(g, options.robustness_limit) {
        Ok(value) => Measure::Computed { value },
        Err(e @ Error::ExhaustiveRefused { .. }) => {
            if options.require_robustness {
                return Err(e);
            }
            match platoon {
                Some(spec) => Measure::ClosedForm {
                    value: spec.k,
                    note: robustness_note(spec),
                },
                None => Measure::Skipped {
                    reason: reason(options.robustness_limit),
                },
            }
        }
        Err(e) => return Err(e),
    };

    let iso = if n < 2 {
        Measure::Skipped {
            reason: "undefined for fewer than two vertices".into(),
        }
    } else {
        match isoperimetric_constant(g, options.iso_limit) {
            Ok(value) => Measure::Computed {
                value: value.into(),
            },
            Err(e @ Error::ExhaustiveRefused { .. }) => {
                if options.require_iso {
                    return Err(e);
                }
                match platoon {
                    Some(spec) => Measure::ClosedForm {
                        value: knn_iso_closed_form(spec).into(),
                        note: iso_note(spec),
                    },
                    None => Measure::Skipped {
                        reason: reason(options.iso_limit),
                    },
                }
            }
            Err(e) => return Err(e),
        }
    };

    Ok(ConnectivityReport {
        n,
        edges: g.edge_count(),
        d_min: g.min_degree(),
        d_max: g.max_degree(),
        platoon,
        kappa: Measure::Computed {
            value: vertex_connectivity(g),
        },
        edge_conn: Measure::Computed {
            value: edge_connectivity(g),
        },
        robustness,
        iso,
        lambda2: algebraic_connectivity(g),
        lambda2_bounds: platoon.map(lambda2_bounds),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_knn_platoon;

    #[test]
    fn analyze_platoon_within_limits() {
        let spec = PlatoonSpec::new(10, 3).unwrap();
        let g = build_knn_platoon(spec).unwrap();
        let report = analyze(&g, Some(spec), AnalyzeOptions::default()).unwrap();
        assert_eq!(report.kappa.computed(), Some(3));
        assert_eq!(report.edge_conn.computed(), Some(3));
        assert_eq!(report.robustness.computed(), Some(3));
        assert_eq!(report.iso.computed().unwrap().exact, Ratio::new(12, 10));
        let b = report.lambda2_bounds.unwrap();
        assert!(b.lower <= report.lambda2 && report.lambda2 <= b.upper);
    }

    #[test]
    fn analyze_falls_back_or_refuses() {
        let spec = PlatoonSpec::new(30, 2).unwrap();
        let g = build_knn_platoon(spec).unwrap();
        let report = analyze(&g, Some(spec), AnalyzeOptions::default()).unwrap();
        assert!(matches!(
            report.robustness,
            Measure::ClosedForm { value: 2, .. }
        ));
        assert!(matches!(report.iso, Measure::ClosedForm { .. }));

        let strict = AnalyzeOptions {
            require_robustness: true,
            ..Default::default()
        };
        assert!(matches!(
            analyze(&g, Some(spec), strict),
            Err(Error::ExhaustiveRefused {
                n: 30,
                limit: 14,
                ..
            })
        ));

        let report = analyze(&g, None, AnalyzeOptions::default()).unwrap();
        assert!(matches!(report.robustness, Measure::Skipped { .. }));
    }

    #[test]
    fn closed_forms_match_exact_for_small_platoon() {
        let spec = PlatoonSpec::new(9, 4).unwrap();
        let g = build_knn_platoon(spec).unwrap();
        let exact = analyze(&g, Some(spec), AnalyzeOptions::default()).unwrap();
        let closed = knn_closed_forms(spec).unwrap();
        assert_eq!(exact.kappa.value(), closed.kappa.value());
        assert_eq!(exact.edge_conn.value(), closed.edge_conn.value());
        assert_eq!(exact.robustness.value(), closed.robustness.value());
        assert_eq!(
            exact.iso.value().map(|v| v.exact),
            closed.iso.value().map(|v| v.exact)
        );
    }

    #[test]
    fn report_json_shape() {
        let spec = PlatoonSpec::new(5, 2).unwrap();
        let g = build_knn_platoon(spec).unwrap();
        let report = analyze(&g, Some(spec), AnalyzeOptions::default()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["iso"]["source"], "computed");
        assert_eq!(json["iso"]["value"]["exact"]["num"], 3);
        assert_eq!(json["iso"]["value"]["exact"]["den"], 2);
        assert_eq!(json["kappa"]["value"], 2);
    }
}
