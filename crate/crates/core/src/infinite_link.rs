//! Certificates that the link of a non-reduced `(n-1)`-simplex is infinite.
//!
//! For a system of `n` non-separating spheres that is not reduced, some
//! complementary piece `R` has positive rank and at least two boundary
//! spheres `S1`, `S2` coming from different spheres of the system. Inside a
//! rank-1, two-boundary piece fix a non-separating sphere `A`; cutting along
//! it leaves a 4-punctured `S^3` with boundaries `S1, S2, A+, A-`. Let `B`
//! separate `{A+, S1}` from `{A-, S2}` and let `S1'` be parallel to `S1`.
//! The sphere `T_m` is `B` tubed to `S1'` by a tube crossing `A` exactly
//! `m` times: from `B` it enters `A-`, reappears at `A+`, and repeats until
//! it reaches `S1'`. The crossing circles cut `T_m` into `m + 1` pieces, each
//! separating `S1` from `S2`.
//!
//! A [`TubeCertificate`] records that piece sequence. In normal position the
//! number of crossings with `A` is an isotopy invariant, so certificates with
//! different `m` certify different vertices of the link.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual_graph::{classify, rank_of, DualGraphError, GraphOfGroups};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfiniteLinkError {
    #[error("expected {expected} spheres, system has {actual}")]
    EdgeCount { expected: usize, actual: usize },
    #[error("sphere {0} separates M")]
    SeparatingSphere(String),
    #[error("system is reduced; its link is finite")]
    Reduced,
    #[error("no complementary piece of positive rank with two boundary spheres")]
    NoWitness,
    #[error("tube crossing count must be at least 1")]
    ZeroCrossings,
    #[error("certificate for m = {m} is not in normal form: {reason}")]
    NotNormal { m: usize, reason: String },
    #[error("certificates come from different witness pieces")]
    MixedWitness,
    #[error(transparent)]
    Graph(#[from] DualGraphError),
}

impl InfiniteLinkError {
    pub fn is_hypothesis(&self) -> bool {
        match self {
            InfiniteLinkError::Graph(e) => e.is_hypothesis(),
            InfiniteLinkError::SeparatingSphere(_) | InfiniteLinkError::Reduced | InfiniteLinkError::NoWitness => {
                true
            }
            _ => false,
        }
    }
}

/// A complementary piece `R` of positive rank with its boundary spheres.
///
/// Boundary labels are `"<edge>+"` for the origin end of an edge and
/// `"<edge>-"` for its terminus end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessComponent {
    pub vertex: String,
    pub rank_k: usize,
    pub boundary: Vec<String>,
    /// The two boundary spheres the construction separates; they come from
    /// distinct spheres of the system.
    pub s1: String,
    pub s2: String,
}

/// Locate the piece `R` used to build the infinite family.
pub fn find_witness(gog: &GraphOfGroups, n: usize) -> Result<WitnessComponent, InfiniteLinkError> {
    let edges = gog.edges();
    if edges.len() != n {
        return Err(InfiniteLinkError::EdgeCount { expected: n, actual: edges.len() });
    }
    let class = classify(gog, n)?;
    if let Some(e) = class.separating_edges.first() {
        return Err(InfiniteLinkError::SeparatingSphere(e.clone()));
    }
    if class.is_reduced {
        return Err(InfiniteLinkError::Reduced);
    }
    debug_assert_eq!(rank_of(gog), n);

    for v in 0..gog.graph().vertex_count() {
        let rank_k = gog.vertex_rank(v);
        if rank_k == 0 {
            continue;
        }
        let mut boundary = Vec::new();
        // (label, edge index) for ends coming from distinct edges
        let mut firsts: Vec<(String, usize)> = Vec::new();
        for (k, e) in edges.iter().enumerate() {
            if e.from == v {
                boundary.push(format!("{}+", e.id));
            }
            if e.to == v {
                boundary.push(format!("{}-", e.id));
            }
            if (e.from == v || e.to == v) && !firsts.iter().any(|(_, j)| *j == k) {
                let label = if e.from == v { format!("{}+", e.id) } else { format!("{}-", e.id) };
                firsts.push((label, k));
            }
        }
        if firsts.len() >= 2 {
            return Ok(WitnessComponent {
                vertex: gog.vertex_id(v).to_string(),
                rank_k,
                boundary,
                s1: firsts[0].0.clone(),
                s2: firsts[1].0.clone(),
            });
        }
    }
    Err(InfiniteLinkError::NoWitness)
}

/// Where a piece of `T_m` begins or ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum End {
    #[serde(rename = "B")]
    Base,
    #[serde(rename = "A+")]
    APlus,
    #[serde(rename = "A-")]
    AMinus,
    #[serde(rename = "S1'")]
    Parallel,
}

impl End {
    fn swapped(self) -> End {
        match self {
            End::Base => End::Parallel,
            End::Parallel => End::Base,
            End::APlus => End::AMinus,
            End::AMinus => End::APlus,
        }
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Base => "B",
            End::APlus => "A+",
            End::AMinus => "A-",
            End::Parallel => "S1'",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    /// Boundary spheres of `R` this piece separates.
    pub separates: [String; 2],
    /// Where the piece starts and ends, following the tube from `B`.
    pub attaches: [End; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TubeCertificate {
    pub m: usize,
    /// Actual labels of `S1` and `S2` in the system.
    pub boundary: [String; 2],
    pub pieces: Vec<Piece>,
    pub normal: bool,
}

fn separates_s1_s2(piece: &Piece) -> bool {
    let got: BTreeSet<&str> = piece.separates.iter().map(String::as_str).collect();
    got == BTreeSet::from(["S1", "S2"])
}

impl TubeCertificate {
    /// Check the normal-form conditions: `m + 1` pieces, each separating
    /// `S1` from `S2`, starting at `B`, ending at `S1'`, and every crossing
    /// leaving through `A-` and re-entering through `A+`.
    pub fn check_normal(&self) -> Result<(), String> {
        if self.m == 0 {
            return Err("m must be positive".into());
        }
        if self.pieces.len() != self.m + 1 {
            return Err(format!("{} pieces, expected {}", self.pieces.len(), self.m + 1));
        }
        if let Some(i) = self.pieces.iter().position(|p| !separates_s1_s2(p)) {
            return Err(format!("piece {i} does not separate S1 from S2"));
        }
        if self.pieces[0].attaches[0] != End::Base {
            return Err("tube does not start at B".into());
        }
        if self.pieces[self.m].attaches[1] != End::Parallel {
            return Err("tube does not end at S1'".into());
        }
        for (i, w) in self.pieces.windows(2).enumerate() {
            if w[0].attaches[1] != End::AMinus || w[1].attaches[0] != End::APlus {
                return Err(format!("crossing {} does not pass from A- to A+", i + 1));
            }
        }
        Ok(())
    }

    /// The same tube traversed from the `S1'` end, with the sides of `A`
    /// and the two caps relabeled.
    pub fn read_backwards(&self) -> TubeCertificate {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| Piece {
                separates: p.separates.clone(),
                attaches: [p.attaches[1].swapped(), p.attaches[0].swapped()],
            })
            .collect();
        TubeCertificate { m: self.m, boundary: self.boundary.clone(), pieces, normal: self.normal }
    }
}

/// Build the piece sequence of `T_m`.
pub fn generate_tm(witness: &WitnessComponent, m: usize) -> Result<TubeCertificate, InfiniteLinkError> {
    if m == 0 {
        return Err(InfiniteLinkError::ZeroCrossings);
    }
    let separates = || ["S1".to_string(), "S2".to_string()];
    let pieces = (0..=m)
        .map(|i| {
            let start = if i == 0 { End::Base } else { End::APlus };
            let end = if i == m { End::Parallel } else { End::AMinus };
            Piece { separates: separates(), attaches: [start, end] }
        })
        .collect();
    let mut cert = TubeCertificate {
        m,
        boundary: [witness.s1.clone(), witness.s2.clone()],
        pieces,
        normal: false,
    };
    cert.normal = cert.check_normal().is_ok();
    Ok(cert)
}

/// `T_1, .., T_max_m`.
pub fn tm_family(witness: &WitnessComponent, max_m: usize) -> Result<Vec<TubeCertificate>, InfiniteLinkError> {
    (1..=max_m).map(|m| generate_tm(witness, m)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub distinct: bool,
    pub count: usize,
    pub crossing_numbers: Vec<usize>,
    /// Distinctness rests on reconstructed reasoning, not a computed isotopy test.
    pub reconstructed: bool,
    pub rationale: Vec<String>,
}

/// Decide whether the certificates name pairwise distinct link vertices.
pub fn verify_distinct_family(certs: &[TubeCertificate]) -> Result<FamilyReport, InfiniteLinkError> {
    for c in certs {
        c.check_normal().map_err(|reason| InfiniteLinkError::NotNormal { m: c.m, reason })?;
    }
    if certs.windows(2).any(|w| w[0].boundary != w[1].boundary) {
        return Err(InfiniteLinkError::MixedWitness);
    }
    let crossing_numbers: Vec<usize> = certs.iter().map(|c| c.m).collect();
    let unique: BTreeSet<usize> = crossing_numbers.iter().copied().collect();
    Ok(FamilyReport {
        distinct: unique.len() == certs.len(),
        count: certs.len(),
        crossing_numbers,
        reconstructed: true,
        rationale: vec![
            "in normal position m is the minimal number of intersection circles with A, an isotopy invariant; \
             distinct m give distinct isotopy classes"
                .into(),
            "each T_m separates the boundary spheres S1 and S2 of R, whose partners lie outside R, \
             so T_m is non-separating in M"
                .into(),
            "each T_m lies in the complement of the system and is not parallel to any of its spheres".into(),
        ],
    })
}
