use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    FractionalAllocation, ForbiddenMask, LabelingInstance, MscaInstance, ProblemInstance, ProblemKind, SubMpInstance,
};
use crate::oracle::{Hyperedge, Oracle, SetFunction, WeightedHypergraph};

pub const SCHEMA_VERSION: &str = "v1";

/// Largest ground set and label count a document may declare.
pub const MAX_ELEMENTS: usize = 1 << 20;
pub const MAX_LABELS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub verts: Vec<usize>,
    pub w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<usize>,
}

/// On-disk instance. Hypergraph types use `edges`; labeling instances use
/// `edges` for a separation `h` or `h` for any other oracle; per-label costs
/// are `costs[v][i]` when modular and `oracles` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub version: String,
    #[serde(rename = "type")]
    pub kind: ProblemKind,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracles: Option<Vec<Oracle>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Oracle>,
}

fn edges_doc(h: &WeightedHypergraph) -> Vec<EdgeDoc> {
    h.edges
        .iter()
        .map(|e| EdgeDoc {
            verts: e.verts.clone(),
            w: e.w,
            rep: (e.rep != e.verts[0]).then_some(e.rep),
        })
        .collect()
}

fn modular_costs(oracles: &[Oracle]) -> Option<Vec<Vec<f64>>> {
    let cols: Vec<&Vec<f64>> = oracles
        .iter()
        .map(|o| match o {
            Oracle::Modular { weights } => Some(weights),
            _ => None,
        })
        .collect::<Option<_>>()?;
    let n = cols.first()?.len();
    Some((0..n).map(|v| cols.iter().map(|c| c[v]).collect()).collect())
}

fn label_costs(doc: &mut InstanceDoc, oracles: &[Oracle]) {
    match modular_costs(oracles) {
        Some(c) => doc.costs = Some(c),
        None => doc.oracles = Some(oracles.to_vec()),
    }
}

fn forbidden_doc(mask: &Option<ForbiddenMask>) -> Option<Vec<[usize; 2]>> {
    mask.as_ref().map(|m| m.pairs().into_iter().map(|(v, i)| [v, i]).collect())
}

impl InstanceDoc {
    pub fn from_instance(instance: &ProblemInstance) -> Self {
        let mut doc = InstanceDoc {
            version: SCHEMA_VERSION.into(),
            kind: instance.kind(),
            n: instance.n(),
            k: instance.k(),
            terminals: instance.terminals().map(<[usize]>::to_vec),
            edges: None,
            costs: None,
            forbidden: None,
            oracles: None,
            h: None,
        };
        match instance {
            ProblemInstance::Msca(m) => {
                label_costs(&mut doc, &m.oracles);
                doc.forbidden = forbidden_doc(&m.forbidden);
            }
            ProblemInstance::SubMp(s) => doc.oracles = Some(vec![s.oracle.clone()]),
            ProblemInstance::HypergraphMp(h) | ProblemInstance::HypergraphMc(h) => doc.edges = Some(edges_doc(&h.graph)),
            ProblemInstance::SubLabel(l) => {
                label_costs(&mut doc, &l.g);
                match &l.h {
                    Oracle::HypergraphSeparation { graph } => doc.edges = Some(edges_doc(graph)),
                    other => doc.h = Some(other.clone()),
                }
                doc.forbidden = forbidden_doc(&l.forbidden);
            }
        }
        doc
    }

    pub fn into_instance(self) -> Result<ProblemInstance> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema version {:?}", self.version)));
        }
        let (n, k) = (self.n, self.k);
        if n == 0 || k == 0 {
            return Err(Error::Parse("n and k must be positive".into()));
        }
        if n > MAX_ELEMENTS || k > MAX_LABELS {
            return Err(Error::Parse(format!(
                "n={n}, k={k} exceed the document limits {MAX_ELEMENTS} and {MAX_LABELS}"
            )));
        }
        let graph = |edges: Option<Vec<EdgeDoc>>| -> Result<WeightedHypergraph> {
            let edges = edges.ok_or_else(|| Error::Parse("missing \"edges\"".into()))?;
            let edges = edges
                .into_iter()
                .map(|e| {
                    let rep = match e.rep {
                        Some(r) => r,
                        None => *e.verts.first().ok_or_else(|| Error::Parse("empty hyperedge".into()))?,
                    };
                    Ok(Hyperedge::with_rep(e.verts, e.w, rep))
                })
                .collect::<Result<Vec<_>>>()?;
            WeightedHypergraph::new(n, edges)
        };
        let terminals = || -> Result<Vec<usize>> {
            let t = self.terminals.clone().ok_or_else(|| Error::Parse("missing \"terminals\"".into()))?;
            if t.len() != k {
                return Err(Error::Parse(format!("{} terminals for k = {k}", t.len())));
            }
            Ok(t)
        };
        let forbidden = match &self.forbidden {
            None => None,
            Some(pairs) => {
                let pairs: Vec<(usize, usize)> = pairs.iter().map(|p| (p[0], p[1])).collect();
                Some(ForbiddenMask::from_pairs(n, k, &pairs)?)
            }
        };
        let label_oracles = |costs: Option<Vec<Vec<f64>>>, oracles: Option<Vec<Oracle>>| -> Result<Vec<Oracle>> {
            match (costs, oracles) {
                (Some(c), None) => {
                    if c.len() != n || c.iter().any(|r| r.len() != k) {
                        return Err(Error::Parse("\"costs\" must be an n x k matrix".into()));
                    }
                    (0..k).map(|i| Oracle::modular(c.iter().map(|r| r[i]).collect())).collect()
                }
                (None, Some(o)) => {
                    if o.len() != k {
                        return Err(Error::Parse(format!("{} oracles for k = {k}", o.len())));
                    }
                    Ok(o)
                }
                _ => Err(Error::Parse("exactly one of \"costs\" and \"oracles\" is required".into())),
            }
        };
        let check_n = |o: &Oracle| -> Result<()> {
            o.validate()?;
            if o.ground_size() != n {
                return Err(Error::Parse(format!("oracle over {} elements, n = {n}", o.ground_size())));
            }
            Ok(())
        };
        let unexpected = |field: &str, present: bool| -> Result<()> {
            if present {
                return Err(Error::Parse(format!("field \"{field}\" is not used by type {:?}", self.kind)));
            }
            Ok(())
        };
        match self.kind {
            ProblemKind::Msca => {
                unexpected("terminals", self.terminals.is_some())?;
                unexpected("edges", self.edges.is_some())?;
                unexpected("h", self.h.is_some())?;
                let oracles = label_oracles(self.costs, self.oracles)?;
                oracles.iter().try_for_each(check_n)?;
                Ok(ProblemInstance::Msca(MscaInstance::new(oracles, forbidden)?))
            }
            ProblemKind::SubMp => {
                for (f, p) in [("edges", self.edges.is_some()), ("costs", self.costs.is_some()), ("h", self.h.is_some())] {
                    unexpected(f, p)?;
                }
                unexpected("forbidden", forbidden.is_some())?;
                let t = terminals()?;
                let o = match self.oracles {
                    Some(mut o) if o.len() == 1 => o.remove(0),
                    _ => return Err(Error::Parse("sub_mp needs exactly one oracle".into())),
                };
                check_n(&o)?;
                Ok(ProblemInstance::SubMp(SubMpInstance::new(o, t)?))
            }
            ProblemKind::HypergraphMp | ProblemKind::HypergraphMc => {
                for (f, p) in [("costs", self.costs.is_some()), ("oracles", self.oracles.is_some()), ("h", self.h.is_some())] {
                    unexpected(f, p)?;
                }
                unexpected("forbidden", forbidden.is_some())?;
                let t = terminals()?;
                let g = graph(self.edges)?;
                if self.kind == ProblemKind::HypergraphMp {
                    ProblemInstance::hypergraph_mp(g, t)
                } else {
                    ProblemInstance::hypergraph_mc(g, t)
                }
            }
            ProblemKind::SubLabel => {
                unexpected("terminals", self.terminals.is_some())?;
                let h = match (self.edges, self.h) {
                    (Some(e), None) => Oracle::HypergraphSeparation { graph: graph(Some(e))? },
                    (None, Some(h)) => h,
                    _ => return Err(Error::Parse("sub_label needs exactly one of \"edges\" and \"h\"".into())),
                };
                check_n(&h)?;
                let g = label_oracles(self.costs, self.oracles)?;
                g.iter().try_for_each(check_n)?;
                Ok(ProblemInstance::SubLabel(LabelingInstance::new(g, h, forbidden)?))
            }
        }
    }
}

pub fn instance_to_json(instance: &ProblemInstance) -> Result<String> {
    Ok(serde_json::to_string(&InstanceDoc::from_instance(instance))?)
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    doc.into_instance()
}

/// Hex SHA-256 of the canonical (compact, field-ordered) serialization.
pub fn instance_hash(instance: &ProblemInstance) -> String {
    let bytes = serde_json::to_vec(&InstanceDoc::from_instance(instance)).expect("instance documents serialize");
    content_hash(&bytes)
}

/// Hex SHA-256 of raw bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub tool_version: String,
}

/// Allocation file: `x` is the `n x k` matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub version: String,
    pub n: usize,
    pub k: usize,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

pub fn allocation_to_json(x: &FractionalAllocation, provenance: Option<Provenance>) -> Result<String> {
    let doc = AllocationDoc {
        version: SCHEMA_VERSION.into(),
        n: x.n(),
        k: x.k(),
        x: x.as_slice().to_vec(),
        terminals: x.terminals().map(<[usize]>::to_vec),
        provenance,
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn allocation_from_json(text: &str) -> Result<(FractionalAllocation, Option<Provenance>)> {
    let doc: AllocationDoc = serde_json::from_str(text)?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {:?}", doc.version)));
    }
    if doc.n.checked_mul(doc.k) != Some(doc.x.len()) {
        return Err(Error::Parse(format!("x has {} entries, expected n * k", doc.x.len())));
    }
    let mut x = FractionalAllocation::new(doc.n, doc.k, doc.x)?;
    if let Some(t) = doc.terminals {
        x = x.with_terminals(t)?;
    }
    Ok((x, doc.provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_gap_example, random_graph_mc, random_hypergraph, random_monotone_msca, random_sym_sublabel, WeightRange};
    use crate::oracle::make_graph_cut;

    fn roundtrip(inst: &ProblemInstance) {
        let text = instance_to_json(inst).unwrap();
        let back = instance_from_json(&text).unwrap();
        assert_eq!(&back, inst);
        assert_eq!(instance_to_json(&back).unwrap(), text);
        assert_eq!(instance_hash(&back), instance_hash(inst));
    }

    #[test]
    fn instances_roundtrip() {
        roundtrip(&random_hypergraph(7, 3, 5, 3, WeightRange::default(), true, 1).unwrap());
        roundtrip(&random_hypergraph(7, 3, 5, 3, WeightRange::default(), false, 1).unwrap());
        roundtrip(&random_graph_mc(6, 2, 0.5, WeightRange::default(), 2).unwrap());
        roundtrip(&random_monotone_msca(5, 3, 3).unwrap());
        roundtrip(&random_sym_sublabel(5, 3, 0.5, WeightRange::default(), 4).unwrap());
        roundtrip(&gen_gap_example(4, 3).unwrap().instance);
        roundtrip(&ProblemInstance::Msca(MscaInstance::modular(&[vec![0.1, 1.0 / 3.0], vec![1e-300, 7.5]]).unwrap()));
    }

    #[test]
    fn minimal_document() {
        let text = r#"{"version":"v1","type":"hypergraph_mp","n":4,"k":3,"terminals":[0,1,2],
            "edges":[{"verts":[0,3],"w":1},{"verts":[1,3],"w":1},{"verts":[2,3],"w":1}]}"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.kind(), ProblemKind::HypergraphMp);
        assert_eq!(inst.hypergraph().unwrap().edges[2].rep, 2);
    }

    #[test]
    fn malformed_documents_rejected() {
        let bad = [
            r#"{"version":"v2","type":"msca","n":1,"k":1,"costs":[[1]]}"#,
            r#"{"version":"v1","type":"msca","n":2,"k":1,"costs":[[1]]}"#,
            r#"{"version":"v1","type":"msca","n":1,"k":1}"#,
            r#"{"version":"v1","type":"hypergraph_mc","n":2,"k":2,"terminals":[0,0],"edges":[]}"#,
            r#"{"version":"v1","type":"hypergraph_mc","n":2,"k":2,"terminals":[0,1],"edges":[{"verts":[0,5],"w":1}]}"#,
            r#"{"version":"v1","type":"hypergraph_mc","n":2,"k":2,"terminals":[0,1],"edges":[{"verts":[],"w":1}]}"#,
            r#"{"version":"v1","type":"hypergraph_mc","n":2,"k":2,"terminals":[0,1],"edges":[{"verts":[0,1],"w":-1}]}"#,
            r#"{"version":"v1","type":"sub_mp","n":2,"k":1,"terminals":[0],"oracles":[{"family":"table","n":1,"values":[0,1]}]}"#,
            r#"{"version":"v1","type":"msca","n":1,"k":1,"costs":[[1]],"extra":1}"#,
        ];
        for b in bad {
            assert!(instance_from_json(b).is_err(), "{b}");
        }
    }

    #[test]
    fn oracle_documents() {
        let h = make_graph_cut(3, &[(0, 1, 2.0)], 1.0).unwrap();
        let inst = ProblemInstance::SubLabel(
            LabelingInstance::new(vec![Oracle::zero(3), Oracle::concave_of_modular(vec![1.0, 2.0, 0.5], 0.5).unwrap()], h, None)
                .unwrap(),
        );
        roundtrip(&inst);
        assert!(instance_to_json(&inst).unwrap().contains("\"family\":\"graph_cut\""));
    }

    #[test]
    fn allocation_roundtrip() {
        let x = FractionalAllocation::new(3, 2, vec![1.0, 0.0, 0.3, 0.7, 0.0, 1.0])
            .unwrap()
            .with_terminals(vec![0, 2])
            .unwrap();
        let p = Provenance {
            seed: Some(9),
            method: Some("lp".into()),
            instance_hash: Some("ab".into()),
            objective: Some(0.25),
            tool_version: "0.1.0".into(),
        };
        let text = allocation_to_json(&x, Some(p.clone())).unwrap();
        let (y, q) = allocation_from_json(&text).unwrap();
        assert_eq!(y, x);
        assert_eq!(q, Some(p));
        assert!(allocation_from_json(r#"{"version":"v1","n":2,"k":2,"x":[1,0,0.5]}"#).is_err());
        assert!(allocation_from_json(r#"{"version":"v1","n":1,"k":2,"x":[0.2,0.2]}"#).is_err());
    }

    #[test]
    fn oversized_dimensions_rejected() {
        let text = r#"{"version":"v1","type":"hypergraph_mc","n":18446744073709551615,"k":2,"terminals":[0,1],"edges":[]}"#;
        assert!(matches!(instance_from_json(text), Err(Error::Parse(_))));
    }
}
