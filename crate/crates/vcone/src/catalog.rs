//! Bundled, validated data files: orbit representatives as root-vector
//! sums, cocharacter weight data, the top-orbit table for the exceptional
//! types, the 16-dimensional-module partition table, the rank-2 bad-prime
//! Hasse diagram and the non-smooth-centraliser class list (opaque
//! reference data).
//!
//! Representatives are shipped only for the orbits that are pinned by
//! explicit root-vector data (all rank-2 exceptional orbits at p = 3, 5,
//! the two 133-dimensional pipeline cases, and the two 78-dimensional
//! rank-comparison classes). The file format is an extension point: more
//! orbits can be added per (group, p) file with the same schema, with
//! roots always referenced by coefficient vectors so the data is
//! independent of any basis ordering.

use crate::chevalley::{build_algebra, ChevalleyAlgebra};
use crate::monogamy::{Generator, PipelineInput};
use crate::rootsys::parse_group_label;
use crate::sl2;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub name: String,
    /// Representative as `(coefficient, root coefficient vector)` terms.
    pub rep: Vec<(i64, Vec<i64>)>,
    /// Weights on the simple roots determining the toral `h` (bad
    /// characteristic) or the associated cocharacter (good
    /// characteristic). `null` when the orbit carries no triple data.
    pub tau: Option<Vec<i64>>,
    pub regime: String,
    /// Scripted step-2 generators; `null` selects the automatic search.
    pub step2: Option<Vec<Generator>>,
    #[serde(rename = "in_V")]
    pub in_v: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub schema_version: u32,
    pub group: String,
    pub p: u64,
    pub orbits: Vec<OrbitEntry>,
}

impl Catalog {
    pub fn orbit(&self, name: &str) -> Result<&OrbitEntry, Error> {
        self.orbits
            .iter()
            .find(|o| o.name == name)
            .ok_or_else(|| Error::UnknownOrbit(format!("{} (p={}): {name}", self.group, self.p)))
    }

    pub fn algebra(&self) -> Result<ChevalleyAlgebra, Error> {
        let (t, rank) = parse_group_label(&self.group)?;
        build_algebra(t, rank, self.p)
    }

    /// Re-verifies every entry invariant against a freshly built algebra:
    /// the representative is a nilpotent root-vector sum, entries inside
    /// the monogamous locus are restricted, and weight data (when present)
    /// produces `h` with `[h, e] = 2e`.
    pub fn validate(&self, alg: &ChevalleyAlgebra) -> Result<(), Error> {
        if alg.p != self.p {
            return Err(Error::Validation("catalog/algebra modulus mismatch".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.orbits {
            if !seen.insert(entry.name.clone()) {
                return Err(Error::Validation(format!(
                    "duplicate orbit name {}",
                    entry.name
                )));
            }
            let e = alg
                .element_from_root_terms(&entry.rep)
                .map_err(|err| Error::Validation(format!("orbit {}: {err}", entry.name)))?;
            if e.is_zero() || !alg.is_ad_nilpotent(&e) {
                return Err(Error::Validation(format!(
                    "orbit {}: representative is not a nonzero nilpotent",
                    entry.name
                )));
            }
            if entry.in_v && !sl2::is_restricted(alg, &e) {
                return Err(Error::Validation(format!(
                    "orbit {}: marked inside the monogamous locus but not restricted",
                    entry.name
                )));
            }
            if let Some(weights) = &entry.tau {
                let h = alg.cartan_element(&alg.rs.inverse_cartan_combine(weights, alg.p)?);
                if alg.bracket(&h, &e)? != alg.scale(&e, 2) {
                    return Err(Error::Validation(format!(
                        "orbit {}: weight data does not satisfy [h,e] = 2e",
                        entry.name
                    )));
                }
            }
            match entry.regime.as_str() {
                "bad" | "good" => {}
                other => {
                    return Err(Error::Validation(format!(
                        "orbit {}: unknown regime `{other}`",
                        entry.name
                    )))
                }
            }
        }
        Ok(())
    }

    /// Pipeline input for one orbit; fails when the entry has no triple
    /// data.
    pub fn pipeline_input(&self, name: &str) -> Result<PipelineInput, Error> {
        let entry = self.orbit(name)?;
        let tau = entry.tau.clone().ok_or_else(|| {
            Error::Validation(format!(
                "orbit {name} carries no weight data (no triple exists through it)"
            ))
        })?;
        Ok(PipelineInput {
            group: self.group.clone(),
            orbit: entry.name.clone(),
            regime: entry.regime.clone(),
            e_terms: entry.rep.clone(),
            tau_weights: tau,
            step2: entry.step2.clone(),
        })
    }
}

/// Parses and validates a catalog file.
pub fn load_catalog(path: &Path) -> Result<Catalog, Error> {
    let text = std::fs::read_to_string(path)?;
    parse_catalog(&text)
}

/// Parses and validates catalog JSON (validation builds the algebra).
pub fn parse_catalog(text: &str) -> Result<Catalog, Error> {
    let cat: Catalog = serde_json::from_str(text)?;
    let alg = cat.algebra()?;
    cat.validate(&alg)?;
    Ok(cat)
}

const G2_P3: &str = include_str!("../data/g2_p3.json");
const G2_P5: &str = include_str!("../data/g2_p5.json");
const E6_P5: &str = include_str!("../data/e6_p5.json");
const E7_P3: &str = include_str!("../data/e7_p3.json");
const E7_P7: &str = include_str!("../data/e7_p7.json");
const V_TOP: &str = include_str!("../data/v_top_exceptional.json");
const D8_PARTITIONS: &str = include_str!("../data/e8_p5_d8_partitions.json");
const G2_P3_HASSE: &str = include_str!("../data/g2_p3_hasse.json");
const SMOOTH_EXCEPTIONS: &str = include_str!("../data/smooth_exceptions.json");

/// The bundled (group, p) pairs.
pub fn builtin_pairs() -> Vec<(&'static str, u64)> {
    vec![("G2", 3), ("G2", 5), ("E6", 5), ("E7", 3), ("E7", 7)]
}

/// Loads a bundled catalog without validation (fast path; the data is
/// covered by the test suite). Use `parse_catalog` to re-validate.
pub fn builtin_catalog(group: &str, p: u64) -> Result<Catalog, Error> {
    let text = builtin_catalog_text(group, p)?;
    Ok(serde_json::from_str(text)?)
}

pub fn builtin_catalog_text(group: &str, p: u64) -> Result<&'static str, Error> {
    match (group, p) {
        ("G2", 3) => Ok(G2_P3),
        ("G2", 5) => Ok(G2_P5),
        ("E6", 5) => Ok(E6_P5),
        ("E7", 3) => Ok(E7_P3),
        ("E7", 7) => Ok(E7_P7),
        _ => Err(Error::UnknownOrbit(format!(
            "no bundled catalog for ({group}, p={p})"
        ))),
    }
}

#[derive(Clone, Debug, Deserialize)]
struct VTopRow {
    group: String,
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    p_ge: Option<u64>,
    orbit: String,
}

#[derive(Clone, Debug, Deserialize)]
struct VTopTableFile {
    rows: Vec<VTopRow>,
}

/// One row of the exceptional top-orbit table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VTopEntry {
    pub group: String,
    /// Exact prime, or the lower threshold of a `>=` row.
    pub p_exact: Option<u64>,
    pub p_ge: Option<u64>,
    pub orbit: String,
}

pub fn v_top_table() -> Vec<VTopEntry> {
    let file: VTopTableFile = serde_json::from_str(V_TOP).expect("bundled table parses");
    file.rows
        .into_iter()
        .map(|r| VTopEntry {
            group: r.group,
            p_exact: r.p,
            p_ge: r.p_ge,
            orbit: r.orbit,
        })
        .collect()
}

/// The orbit whose closure is the whole monogamous locus for an
/// exceptional group at an odd prime.
pub fn v_top_orbit(group: &str, p: u64) -> Result<String, Error> {
    if !crate::exactalg::fp::is_odd_prime(p) {
        return Err(Error::BadPrime(format!("{p} is not an odd prime")));
    }
    let table = v_top_table();
    for row in &table {
        if row.group == group && row.p_exact == Some(p) {
            return Ok(row.orbit.clone());
        }
    }
    for row in &table {
        if row.group == group {
            if let Some(threshold) = row.p_ge {
                if p >= threshold {
                    return Ok(row.orbit.clone());
                }
            }
        }
    }
    Err(Error::UnknownOrbit(format!(
        "no top-orbit row for ({group}, p={p})"
    )))
}

#[derive(Clone, Debug, Deserialize)]
struct HasseFile {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

/// Nodes and edges of the full closure diagram for the rank-2 exceptional
/// group at p = 3 (six nodes, six edges).
pub fn g2_p3_hasse() -> (Vec<String>, Vec<(String, String)>) {
    let file: HasseFile = serde_json::from_str(G2_P3_HASSE).expect("bundled diagram parses");
    (file.nodes, file.edges)
}

/// DOT rendition of the bundled diagram.
pub fn g2_p3_hasse_dot() -> String {
    let (nodes, edges) = g2_p3_hasse();
    let mut out = String::from("digraph \"G2_p3\" {\n  rankdir=TB;\n");
    for n in &nodes {
        out.push_str(&format!("  \"{n}\";\n"));
    }
    for (a, b) in &edges {
        out.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Deserialize)]
struct D8Row {
    orbit: String,
    partition: Vec<u64>,
}

#[derive(Clone, Debug, Deserialize)]
struct D8File {
    m: u64,
    rows: Vec<D8Row>,
}

/// The bundled table of natural-module partitions for the orbits of the
/// monogamous locus of E8 at p = 5, realised inside a D8 subgroup.
pub fn e8_p5_d8_partitions() -> (u64, Vec<(String, Vec<u64>)>) {
    let file: D8File = serde_json::from_str(D8_PARTITIONS).expect("bundled table parses");
    (
        file.m,
        file.rows.into_iter().map(|r| (r.orbit, r.partition)).collect(),
    )
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SmoothExceptionRow {
    pub group: String,
    pub p: u64,
    pub classes: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct SmoothFile {
    non_smooth: Vec<SmoothExceptionRow>,
}

/// Opaque reference list of classes with non-smooth centraliser schemes.
pub fn smooth_exceptions() -> Vec<SmoothExceptionRow> {
    let file: SmoothFile = serde_json::from_str(SMOOTH_EXCEPTIONS).expect("bundled table parses");
    file.non_smooth
}
