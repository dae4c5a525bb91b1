//! Wire formats: instance JSON (all numbers as exact rational strings),
//! census summary JSON, CSV reports, the arrangement debug dump, and run
//! manifests. Field order is fixed so identical inputs produce byte-
//! identical outputs.

use serde::{Deserialize, Serialize};

use crate::arrangement::Arrangement;
use crate::body::ConvexBody;
use crate::census::{BorderKind, BorderLevel, Census, FaceRelation, FaceStatus};
use crate::error::Error;
use crate::generate::OracleResult;
use crate::linalg::Vector;
use crate::scalar::{parse_rat, rat_to_string};
use crate::Rat;

/// An instance file: dimension, perturbation seed, and the bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub dim: usize,
    pub seed: u64,
    pub bodies: Vec<ConvexBody<Rat>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    dim: usize,
    seed: u64,
    bodies: Vec<BodyWire>,
}

#[derive(Serialize, Deserialize)]
struct BodyWire {
    name: String,
    vertices: Vec<Vec<String>>,
}

impl Instance {
    pub fn to_json(&self) -> String {
        let wire = InstanceWire {
            dim: self.dim,
            seed: self.seed,
            bodies: self
                .bodies
                .iter()
                .map(|b| BodyWire {
                    name: b.name.clone(),
                    vertices: b
                        .vertices()
                        .iter()
                        .map(|v| v.coords().iter().map(rat_to_string).collect())
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&wire).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Instance, Error> {
        let wire: InstanceWire = serde_json::from_str(text)?;
        if !(2..=3).contains(&wire.dim) {
            return Err(Error::BadDimension(wire.dim));
        }
        let mut bodies = Vec::with_capacity(wire.bodies.len());
        for bw in wire.bodies {
            let mut verts = Vec::with_capacity(bw.vertices.len());
            for coords in bw.vertices {
                if coords.len() != wire.dim {
                    return Err(Error::BadInstance(format!(
                        "vertex of {} has {} coordinates, expected {}",
                        bw.name,
                        coords.len(),
                        wire.dim
                    )));
                }
                let parsed: Result<Vec<Rat>, Error> =
                    coords.iter().map(|s| parse_rat(s)).collect();
                verts.push(Vector::new(parsed?));
            }
            bodies.push(ConvexBody::new(bw.name, verts)?);
        }
        Ok(Instance {
            dim: wire.dim,
            seed: wire.seed,
            bodies,
        })
    }
}

/// Census summary; all exact quantities as integers or rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "F")]
    pub faces: u64,
    pub acyclic: u64,
    pub certified: u64,
    pub permutations_unoriented: u64,
    pub popular_vertices: u64,
    pub popular_edges: u64,
    #[serde(rename = "E0")]
    pub e0: u64,
    #[serde(rename = "E1_weighted")]
    pub e1_weighted: Option<u64>,
    #[serde(rename = "V0")]
    pub v0: u64,
    #[serde(rename = "V1_weighted")]
    pub v1_weighted: Option<u64>,
    pub degenerate_vertices: u64,
    pub double_charged_weight1: Option<u64>,
    pub audits: AuditsSummary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditsSummary {
    pub consecutive_pairs: String,
    pub popular_line: String,
    pub k33: String,
    #[serde(rename = "removal_identity_E")]
    pub removal_identity_e: Option<IdentitySides>,
    #[serde(rename = "removal_identity_V")]
    pub removal_identity_v: Option<IdentitySides>,
}

/// Both sides of a removal identity as exact rational strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentitySides {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

pub fn summary_json(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Exact average as a reduced rational string.
pub fn ratio_string(numerator: i128, denominator: u64) -> String {
    let r = Rat::new(numerator.into(), (denominator as i64).into());
    rat_to_string(&r)
}

fn order_names(order: &[usize], bodies: &[ConvexBody<Rat>]) -> String {
    order
        .iter()
        .map(|&i| bodies[i].name.as_str())
        .collect::<Vec<_>>()
        .join("<")
}

/// One row per face: id, relation, status, order or cycle witness, witness
/// direction.
pub fn faces_csv(census: &Census<Rat>, bodies: &[ConvexBody<Rat>]) -> String {
    let mut out = String::from("face,relation,certified,order,witness_direction\n");
    for class in &census.classes {
        let (relation, order) = match &class.relation {
            FaceRelation::Acyclic(o) => ("acyclic", order_names(&o.0, bodies)),
            FaceRelation::Cyclic(c) => ("cyclic", order_names(c, bodies) + "<cycle"),
        };
        let (certified, dir) = match &class.status {
            FaceStatus::Certified(w) => {
                let coords: Vec<String> =
                    w.direction.vector().coords().iter().map(rat_to_string).collect();
                ("true", coords.join(";"))
            }
            FaceStatus::Uncertified => ("false", String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            class.face, relation, certified, order, dir
        ));
    }
    out
}

/// One row per border with level, weight, conflicts and received charges.
pub fn borders_csv(analysis: &crate::census::RemovalAnalysis) -> String {
    let mut out =
        String::from("border,vertex,kind,a,b,regular,level,weight,conflicts,charges\n");
    for (i, b) in analysis.borders.iter().enumerate() {
        let kind = match b.kind {
            BorderKind::Edge => "edge",
            BorderKind::Slice => "slice",
        };
        let (level, weight) = match b.level() {
            BorderLevel::Zero => ("0".to_string(), String::new()),
            BorderLevel::One { weight } => ("1".to_string(), weight.to_string()),
            BorderLevel::DeeperOrUnknown => ("2+".to_string(), String::new()),
        };
        let conflicts = b
            .conflicts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            i, b.vertex, kind, b.a, b.b, b.regular, level, weight, conflicts, b.charges
        ));
    }
    out
}

/// One row per oracle probe direction.
pub fn oracle_csv(oracle: &OracleResult<Rat>, bodies: &[ConvexBody<Rat>]) -> String {
    let mut out = String::from("direction,feasible,order\n");
    let by_dir: std::collections::HashMap<_, _> = oracle
        .orders
        .values()
        .map(|w| (w.direction.clone(), w.order()))
        .collect();
    for dir in &oracle.directions {
        let coords: Vec<String> = dir.vector().coords().iter().map(rat_to_string).collect();
        match by_dir.get(dir) {
            Some(order) => out.push_str(&format!(
                "{},true,{}\n",
                coords.join(";"),
                order_names(&order.0, bodies)
            )),
            None => out.push_str(&format!("{},,\n", coords.join(";"))),
        }
    }
    out
}

/// Arrangement debug dump: vertices as rational-ray tuples, edge endpoint
/// ids, face sign vectors.
pub fn arrangement_json(arr: &Arrangement<Rat>) -> String {
    #[derive(Serialize)]
    struct Wire {
        dim: usize,
        circles: Vec<CircleWire>,
        vertices: Vec<VertexWire>,
        edges: Vec<EdgeWire>,
        faces: Vec<FaceWire>,
    }
    #[derive(Serialize)]
    struct CircleWire {
        pair: (usize, usize),
        normal: Vec<String>,
    }
    #[derive(Serialize)]
    struct VertexWire {
        ray: Vec<String>,
        circles: (usize, usize),
        regular: bool,
    }
    #[derive(Serialize)]
    struct EdgeWire {
        circle: usize,
        endpoints: (usize, usize),
    }
    #[derive(Serialize)]
    struct FaceWire {
        signs: Vec<i8>,
        vertices: Vec<usize>,
    }
    let wire = Wire {
        dim: arr.dim,
        circles: arr
            .circles
            .iter()
            .map(|c| CircleWire {
                pair: c.pair,
                normal: c.normal.coords().iter().map(rat_to_string).collect(),
            })
            .collect(),
        vertices: arr
            .vertices
            .iter()
            .map(|v| VertexWire {
                ray: v.ray.vector().coords().iter().map(rat_to_string).collect(),
                circles: v.circles,
                regular: v.regular,
            })
            .collect(),
        edges: arr
            .edges
            .iter()
            .map(|e| EdgeWire {
                circle: e.circle,
                endpoints: e.endpoints,
            })
            .collect(),
        faces: arr
            .faces
            .iter()
            .map(|f| FaceWire {
                signs: f.signs.clone(),
                vertices: f.vertices.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&wire).expect("arrangement serializes");
    s.push('\n');
    s
}

/// Run manifest: command echo, versions, timing, and the produced files
/// with their record counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub timing_ms: u128,
    pub outputs: Vec<ManifestFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: String,
    pub records: u64,
    pub bytes: u64,
}

pub fn manifest_json(m: &Manifest) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("manifest serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenConfig, GenKind};

    #[test]
    fn instance_round_trip() {
        let bodies = generate(&GenConfig::<Rat>::new(3, 3, GenKind::Collinear, 7)).unwrap();
        let inst = Instance {
            dim: 3,
            seed: 7,
            bodies,
        };
        let json = inst.to_json();
        let back = Instance::from_json(&json).unwrap();
        assert_eq!(inst, back);
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn instance_rejects_bad_dimension() {
        let text = r#"{"dim":4,"seed":0,"bodies":[]}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn instance_rejects_ragged_vertices() {
        let text = r#"{"dim":3,"seed":0,"bodies":[{"name":"a","vertices":[["1","2"]]}]}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn ratio_strings_are_reduced() {
        assert_eq!(ratio_string(6, 4), "3/2");
        assert_eq!(ratio_string(-6, 3), "-2");
        assert_eq!(ratio_string(0, 5), "0");
    }
}
