//! End-to-end orchestration: separation system, arrangement, oracle,
//! census, popular summary, audits, and the machine-readable summary.

use crate::arrangement::{build_arrangement, circles_of, Arrangement};
use crate::audit::{
    audit_consecutive_pairs, audit_k33, audit_popular_line, audit_removal_identities,
    AuditReport, RemovalIdentityReport,
};
use crate::body::{build_separation_system, SeparationSystem};
use crate::census::{
    classify_faces, conflict_weights, popular_census, Census, PopularSummary, ProbePolicy,
    RemovalAnalysis,
};
use crate::error::Error;
use crate::generate::{oracle_enumerate, OracleResult};
use crate::io::{AuditsSummary, IdentitySides, Instance, Summary};
use crate::Rat;

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub probes_per_face: usize,
    pub oracle_density: usize,
    pub with_removal: bool,
    pub with_k33: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            probes_per_face: 5,
            oracle_density: 2000,
            with_removal: true,
            with_k33: true,
        }
    }
}

pub struct PipelineRun {
    pub sys: SeparationSystem<Rat>,
    pub arr: Arrangement<Rat>,
    pub oracle: Option<OracleResult<Rat>>,
    pub census: Census<Rat>,
    pub popular: PopularSummary,
    pub consecutive: Option<AuditReport>,
    pub line: Option<AuditReport>,
    pub k33: Option<AuditReport>,
    pub removal: Option<RemovalAnalysis>,
    pub identity: Option<RemovalIdentityReport>,
    pub summary: Summary,
}

impl PipelineRun {
    /// All executed audits and internal consistency checks passed.
    pub fn all_passed(&self) -> bool {
        self.census.monotone_violations == 0
            && self.census.order_mismatches == 0
            && self.popular.degenerate_popular == 0
            && self.consecutive.as_ref().map_or(true, |r| r.passed())
            && self.line.as_ref().map_or(true, |r| r.passed())
            && self.k33.as_ref().map_or(true, |r| r.passed())
            && self.identity.as_ref().map_or(true, |r| r.passed())
            && self
                .removal
                .as_ref()
                .map_or(true, |r| r.monotone_violations == 0 && r.charge_violations == 0)
    }
}

fn report_string(report: Option<&AuditReport>) -> String {
    match report {
        None => "skipped".to_string(),
        Some(r) if r.passed() => "pass".to_string(),
        Some(_) => "fail".to_string(),
    }
}

/// Run the full census pipeline on an instance.
pub fn run_pipeline(instance: &Instance, opts: &PipelineOptions) -> Result<PipelineRun, Error> {
    let n = instance.bodies.len();
    let sys = build_separation_system(instance.bodies.clone(), instance.seed)?;
    let arr = build_arrangement(&circles_of(&sys))?;

    let oracle = if opts.oracle_density > 0 {
        Some(oracle_enumerate(&instance.bodies, opts.oracle_density)?)
    } else {
        None
    };

    let policy = ProbePolicy {
        probes_per_face: opts.probes_per_face,
        extra_probes: oracle
            .as_ref()
            .map(|o| o.directions.clone())
            .unwrap_or_default(),
    };
    let carried: Vec<_> = oracle
        .as_ref()
        .map(|o| o.orders.values().cloned().collect())
        .unwrap_or_default();
    let active: Vec<usize> = (0..n).collect();
    let census = classify_faces(&arr, &sys, &active, &policy, &carried)?;
    let popular = popular_census(&census, &arr);

    let (consecutive, line, k33, removal, identity) = if arr.dim == 3 {
        let consecutive = audit_consecutive_pairs(&census, &popular, &arr);
        let line = audit_popular_line(&census, &popular, &arr, &sys)?;
        let k33 = if opts.with_k33 {
            let mut merged = AuditReport::default();
            for i in 0..n {
                let r = audit_k33(&arr, i)?;
                merged.checked += r.checked;
                merged.violations.extend(r.violations);
            }
            Some(merged)
        } else {
            None
        };
        let (removal, identity) = if opts.with_removal {
            let analysis = conflict_weights(&arr, &sys, &census, &policy)?;
            let report = audit_removal_identities(&popular, &analysis, n as u64);
            (Some(analysis), Some(report))
        } else {
            (None, None)
        };
        (Some(consecutive), Some(line), k33, removal, identity)
    } else {
        (None, None, None, None, None)
    };

    let identity_sides = |sum: i128, rhs: i128, holds: bool| IdentitySides {
        lhs: crate::io::ratio_string(sum, n as u64),
        rhs: crate::io::ratio_string(rhs, n as u64),
        holds,
    };
    let summary = Summary {
        n,
        d: arr.dim,
        faces: arr.num_faces() as u64,
        acyclic: census.acyclic_faces,
        certified: census.certified_faces,
        permutations_unoriented: census.certified_unoriented.len() as u64,
        popular_vertices: popular.popular_vertices.len() as u64,
        popular_edges: popular.popular_edges.len() as u64,
        e0: popular.e0,
        e1_weighted: removal.as_ref().map(|r| r.e1_weighted()),
        v0: popular.v0,
        v1_weighted: removal.as_ref().map(|r| r.v1_weighted()),
        degenerate_vertices: popular.degenerate_vertices,
        double_charged_weight1: removal.as_ref().map(|r| r.double_charged_weight1),
        audits: AuditsSummary {
            consecutive_pairs: report_string(consecutive.as_ref()),
            popular_line: report_string(line.as_ref()),
            k33: report_string(k33.as_ref()),
            removal_identity_e: identity.as_ref().map(|r| {
                identity_sides(r.lhs_sum_e, r.rhs_regular_e, r.inequality_e && r.regular_equality_e)
            }),
            removal_identity_v: identity.as_ref().map(|r| {
                identity_sides(r.lhs_sum_v, r.rhs_regular_v, r.inequality_v && r.regular_equality_v)
            }),
        },
    };

    Ok(PipelineRun {
        sys,
        arr,
        oracle,
        census,
        popular,
        consecutive,
        line,
        k33,
        removal,
        identity,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenConfig, GenKind};

    #[test]
    fn collinear_three_summary() {
        let bodies = generate(&GenConfig::<Rat>::new(3, 3, GenKind::Collinear, 7)).unwrap();
        let instance = Instance {
            dim: 3,
            seed: 7,
            bodies,
        };
        let run = run_pipeline(
            &instance,
            &PipelineOptions {
                probes_per_face: 5,
                oracle_density: 500,
                with_removal: true,
                with_k33: true,
            },
        )
        .unwrap();
        assert_eq!(run.summary.faces, 8);
        assert_eq!(run.summary.acyclic, 6);
        assert_eq!(run.summary.certified, 2);
        assert_eq!(run.summary.permutations_unoriented, 1);
        assert!(run.all_passed());
        // Oracle orders are a subset of the certified orders.
        let oracle = run.oracle.as_ref().unwrap();
        for order in oracle.orders.keys() {
            assert!(run.census.certified_oriented.contains(order));
        }
    }

    #[test]
    fn two_body_summary() {
        let bodies = generate(&GenConfig::<Rat>::new(2, 3, GenKind::Collinear, 1)).unwrap();
        let instance = Instance {
            dim: 3,
            seed: 1,
            bodies,
        };
        let run = run_pipeline(
            &instance,
            &PipelineOptions {
                probes_per_face: 3,
                oracle_density: 200,
                with_removal: false,
                with_k33: false,
            },
        )
        .unwrap();
        assert_eq!(run.summary.faces, 2);
        assert!(run.summary.permutations_unoriented <= 1);
        assert_eq!(run.summary.permutations_unoriented, 1);
    }

    #[test]
    fn d2_pipeline_skips_border_machinery() {
        let bodies = generate(&GenConfig::<Rat>::new(4, 2, GenKind::Flower2d, 2)).unwrap();
        let instance = Instance {
            dim: 2,
            seed: 2,
            bodies,
        };
        let run = run_pipeline(
            &instance,
            &PipelineOptions {
                probes_per_face: 3,
                oracle_density: 300,
                with_removal: true,
                with_k33: true,
            },
        )
        .unwrap();
        assert_eq!(run.summary.d, 2);
        assert_eq!(run.summary.audits.consecutive_pairs, "skipped");
        assert!(run.summary.e1_weighted.is_none());
        // Certified permutations bounded by the planar curve.
        assert!(run.summary.permutations_unoriented <= 2 * 4 - 2);
        assert!(run.all_passed());
    }
}
