//! Partition calculus for nilpotent orbits in the classical types:
//! enumeration, dominance order, Hasse diagrams with very-even splitting,
//! restricted/near-regular membership tests and the closed-form top
//! partitions.
//!
//! Orbits of `SL(V)` correspond to all partitions of `m = dim V`; in the
//! orthogonal types (B, D) even parts must occur with even multiplicity,
//! and in the symplectic type (C) odd parts must. In type D a partition
//! whose parts are all even with even multiplicities ("very even") labels
//! two distinct orbits, tagged I and II here; the tags are formal.

use crate::Error;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum ClassicalFamily {
    A,
    B,
    C,
    D,
}

impl fmt::Display for ClassicalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassicalFamily::A => "A",
            ClassicalFamily::B => "B",
            ClassicalFamily::C => "C",
            ClassicalFamily::D => "D",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ClassicalFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "A" | "a" => Ok(ClassicalFamily::A),
            "B" | "b" => Ok(ClassicalFamily::B),
            "C" | "c" => Ok(ClassicalFamily::C),
            "D" | "d" => Ok(ClassicalFamily::D),
            _ => Err(Error::InvalidType(format!("unknown classical family `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum VeryEvenTag {
    I,
    II,
}

/// A classical nilpotent orbit, given by its partition of `m` (the
/// dimension of the natural module) plus the very-even tag in type D.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PartitionOrbit {
    pub family: ClassicalFamily,
    pub m: u64,
    /// Weakly decreasing positive parts summing to `m`.
    pub parts: Vec<u64>,
    pub very_even_tag: Option<VeryEvenTag>,
}

impl PartitionOrbit {
    pub fn label(&self) -> String {
        let mut s = format_partition(&self.parts);
        match self.very_even_tag {
            Some(VeryEvenTag::I) => s.push_str(" I"),
            Some(VeryEvenTag::II) => s.push_str(" II"),
            None => {}
        }
        s
    }
}

/// Renders a partition in exponent form, e.g. `(5,4^2,1^3)`.
pub fn format_partition(parts: &[u64]) -> String {
    let mut pieces = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        let mult = j - i;
        if mult == 1 {
            pieces.push(format!("{}", parts[i]));
        } else {
            pieces.push(format!("{}^{}", parts[i], mult));
        }
        i = j;
    }
    format!("({})", pieces.join(","))
}

/// All partitions of `m`, parts weakly decreasing, in descending
/// lexicographic order.
pub fn partitions_of(m: u64) -> Vec<Vec<u64>> {
    fn rec(remaining: u64, max: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        let hi = remaining.min(max);
        for part in (1..=hi).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

pub fn is_very_even(parts: &[u64]) -> bool {
    if parts.iter().any(|&x| x % 2 == 1) {
        return false;
    }
    multiplicities(parts).iter().all(|&(_, m)| m % 2 == 0)
}

fn multiplicities(parts: &[u64]) -> Vec<(u64, usize)> {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for &x in parts {
        match out.last_mut() {
            Some((v, m)) if *v == x => *m += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Family-specific validity of a partition as an orbit label.
pub fn is_valid_partition(family: ClassicalFamily, parts: &[u64]) -> bool {
    match family {
        ClassicalFamily::A => true,
        ClassicalFamily::B | ClassicalFamily::D => multiplicities(parts)
            .iter()
            .all(|&(v, m)| v % 2 == 1 || m % 2 == 0),
        ClassicalFamily::C => multiplicities(parts)
            .iter()
            .all(|&(v, m)| v % 2 == 0 || m % 2 == 0),
    }
}

fn check_m(family: ClassicalFamily, m: u64) -> Result<(), Error> {
    let ok = match family {
        ClassicalFamily::A => m >= 1,
        ClassicalFamily::B => m >= 3 && m % 2 == 1,
        ClassicalFamily::C => m >= 2 && m % 2 == 0,
        ClassicalFamily::D => m >= 4 && m % 2 == 0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidType(format!(
            "natural module dimension {m} is not admissible for family {family}"
        )))
    }
}

/// Enumerates the orbits for `(family, m)`. Very even partitions in type D
/// are emitted twice with tags I and II.
pub fn valid_partitions(family: ClassicalFamily, m: u64) -> Result<Vec<PartitionOrbit>, Error> {
    check_m(family, m)?;
    let mut out = Vec::new();
    for parts in partitions_of(m) {
        if !is_valid_partition(family, &parts) {
            continue;
        }
        if family == ClassicalFamily::D && is_very_even(&parts) {
            out.push(PartitionOrbit {
                family,
                m,
                parts: parts.clone(),
                very_even_tag: Some(VeryEvenTag::I),
            });
            out.push(PartitionOrbit {
                family,
                m,
                parts,
                very_even_tag: Some(VeryEvenTag::II),
            });
        } else {
            out.push(PartitionOrbit {
                family,
                m,
                parts,
                very_even_tag: None,
            });
        }
    }
    Ok(out)
}

/// Dominance order: true iff every prefix sum of `a` is >= the
/// corresponding prefix sum of `b`. Rejects partitions of unequal sums.
pub fn dominates(a: &[u64], b: &[u64]) -> Result<bool, Error> {
    let sa: u64 = a.iter().sum();
    let sb: u64 = b.iter().sum();
    if sa != sb {
        return Err(Error::DimensionMismatch(format!(
            "dominance comparison of partitions of {sa} and {sb}"
        )));
    }
    let n = a.len().max(b.len());
    let mut pa = 0u64;
    let mut pb = 0u64;
    for i in 0..n {
        pa += a.get(i).copied().unwrap_or(0);
        pb += b.get(i).copied().unwrap_or(0);
        if pa < pb {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn strictly_dominates(a: &[u64], b: &[u64]) -> Result<bool, Error> {
    Ok(dominates(a, b)? && a != b)
}

/// Largest part at most `p`: the orbit lies in the restricted nullcone.
pub fn is_restricted(parts: &[u64], p: u64) -> bool {
    parts.first().map_or(true, |&x| x <= p)
}

/// Membership in the maximal monogamous subvariety: restricted, and no
/// part of size `p` (linear/symplectic) resp. at most one part of size `p`
/// (orthogonal).
pub fn is_in_v(family: ClassicalFamily, parts: &[u64], p: u64) -> bool {
    if !is_restricted(parts, p) {
        return false;
    }
    let count_p = parts.iter().filter(|&&x| x == p).count();
    match family {
        ClassicalFamily::A | ClassicalFamily::C => count_p == 0,
        ClassicalFamily::B | ClassicalFamily::D => count_p <= 1,
    }
}

/// The partition whose orbit closure is the whole maximal monogamous
/// subvariety, by the closed-form case split on `m = p + a(p-1) + r`
/// (families B, D) or `m = a(p-1) + r` (families A, C), `0 <= r < p-1`.
pub fn v_top_partition(family: ClassicalFamily, m: u64, p: u64) -> Result<PartitionOrbit, Error> {
    check_m(family, m)?;
    if p < 3 || !crate::exactalg::fp::is_odd_prime(p) {
        return Err(Error::BadPrime(format!("{p} is not an odd prime")));
    }
    let mut parts: Vec<u64> = Vec::new();
    let push = |parts: &mut Vec<u64>, v: u64, times: u64| {
        for _ in 0..times {
            if v > 0 {
                parts.push(v);
            }
        }
    };
    match family {
        ClassicalFamily::A | ClassicalFamily::C => {
            let a = m / (p - 1);
            let r = m % (p - 1);
            push(&mut parts, p - 1, a);
            push(&mut parts, r, 1);
        }
        ClassicalFamily::B => {
            if m <= p {
                push(&mut parts, m, 1);
            } else {
                let rest = m - p;
                let a = rest / (p - 1);
                let r = rest % (p - 1);
                push(&mut parts, p, 1);
                if a % 2 == 0 {
                    push(&mut parts, p - 1, a);
                    if r > 0 {
                        push(&mut parts, r - 1, 1);
                        push(&mut parts, 1, 1);
                    }
                } else {
                    push(&mut parts, p - 1, a - 1);
                    push(&mut parts, p - 2, 1);
                    if r > 0 {
                        push(&mut parts, r + 1, 1);
                    } else {
                        push(&mut parts, 1, 1);
                    }
                }
            }
        }
        ClassicalFamily::D => {
            if m <= p {
                push(&mut parts, m - 1, 1);
                push(&mut parts, 1, 1);
            } else {
                let rest = m - p;
                let a = rest / (p - 1);
                let r = rest % (p - 1);
                push(&mut parts, p, 1);
                if a % 2 == 0 {
                    push(&mut parts, p - 1, a);
                    push(&mut parts, r, 1);
                } else {
                    push(&mut parts, p - 1, a - 1);
                    push(&mut parts, p - 2, 1);
                    push(&mut parts, r, 1);
                    push(&mut parts, 1, 1);
                }
            }
        }
    }
    parts.sort_unstable_by(|x, y| y.cmp(x));
    debug_assert_eq!(parts.iter().sum::<u64>(), m);
    if !is_valid_partition(family, &parts) {
        return Err(Error::Validation(format!(
            "top partition {} is not a valid {family}-partition",
            format_partition(&parts)
        )));
    }
    Ok(PartitionOrbit {
        family,
        m,
        parts,
        very_even_tag: None,
    })
}

/// Hasse diagram of the closure (dominance) order on the valid partitions,
/// optionally with the type-D very-even node splitting applied.
#[derive(Clone, Debug, Serialize)]
pub struct HasseDiagram {
    pub nodes: Vec<PartitionOrbit>,
    /// `(i, j)` means node `i` covers node `j`.
    pub edges: Vec<(usize, usize)>,
}

pub fn hasse_diagram(
    family: ClassicalFamily,
    m: u64,
    split_d: bool,
) -> Result<HasseDiagram, Error> {
    check_m(family, m)?;
    // Covers on the plain (unsplit) valid partitions.
    let plain: Vec<Vec<u64>> = partitions_of(m)
        .into_iter()
        .filter(|q| is_valid_partition(family, q))
        .collect();
    let mut covers: Vec<(usize, usize)> = Vec::new();
    for i in 0..plain.len() {
        for j in 0..plain.len() {
            if i == j || !strictly_dominates(&plain[i], &plain[j])? {
                continue;
            }
            let mut is_cover = true;
            for (k, mid) in plain.iter().enumerate() {
                if k != i
                    && k != j
                    && strictly_dominates(&plain[i], mid)?
                    && strictly_dominates(mid, &plain[j])?
                {
                    is_cover = false;
                    break;
                }
            }
            if is_cover {
                covers.push((i, j));
            }
        }
    }
    if family != ClassicalFamily::D || !split_d {
        let nodes = plain
            .iter()
            .map(|q| PartitionOrbit {
                family,
                m,
                parts: q.clone(),
                very_even_tag: None,
            })
            .collect();
        return Ok(HasseDiagram {
            nodes,
            edges: covers,
        });
    }
    // Split every very even node into two, duplicating incident edges.
    let mut nodes: Vec<PartitionOrbit> = Vec::new();
    let mut image: Vec<Vec<usize>> = Vec::new();
    for q in &plain {
        if is_very_even(q) {
            let a = nodes.len();
            nodes.push(PartitionOrbit {
                family,
                m,
                parts: q.clone(),
                very_even_tag: Some(VeryEvenTag::I),
            });
            nodes.push(PartitionOrbit {
                family,
                m,
                parts: q.clone(),
                very_even_tag: Some(VeryEvenTag::II),
            });
            image.push(vec![a, a + 1]);
        } else {
            let a = nodes.len();
            nodes.push(PartitionOrbit {
                family,
                m,
                parts: q.clone(),
                very_even_tag: None,
            });
            image.push(vec![a]);
        }
    }
    let mut edges = Vec::new();
    for (i, j) in covers {
        for &a in &image[i] {
            for &b in &image[j] {
                edges.push((a, b));
            }
        }
    }
    Ok(HasseDiagram { nodes, edges })
}

impl HasseDiagram {
    /// DOT document, one node per orbit, one edge per cover.
    pub fn to_dot(&self, graph_name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("digraph \"{graph_name}\" {{\n"));
        out.push_str("  rankdir=TB;\n");
        for n in &self.nodes {
            out.push_str(&format!("  \"{}\";\n", n.label()));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                self.nodes[a].label(),
                self.nodes[b].label()
            ));
        }
        out.push_str("}\n");
        out
    }
}
