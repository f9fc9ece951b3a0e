//! Leveled diagram of the fixed-point algebra tower.
//!
//! Level `n` of the tower is a direct sum of matrix blocks, one per exponent
//! in `supp(p^n)`, the block for exponent `l` having size equal to the
//! coefficient of `t^l` in `p^n`. The inclusion into level `n+1` sends the
//! block at `l` into the block at `l + i` with multiplicity `a_i`, so sizes
//! propagate by convolution: multiplying by `p` once more.
//!
//! Node identity is the exponent label, not a positional index, so diagrams
//! over lattice-supported polynomials (say `1 + t^3`) stay canonical even
//! though their levels have gaps.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::descriptor::GroupDescriptor;
use crate::polycore::{bigint_string, CharacterPolynomial, IntPoly};

/// Depth cap callers should enforce on untrusted level counts; sizes are the
/// coefficients of `p^n` and grow geometrically.
pub const DEFAULT_MAX_LEVELS: u32 = 64;

/// One matrix block: its exponent label and its size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub label: usize,
    #[serde(with = "bigint_string")]
    pub size: BigInt,
}

/// Connection between blocks on consecutive levels. `from` and `to` are
/// exponent labels; the multiplicity is the coefficient `a_{to - from}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    #[serde(with = "bigint_string")]
    pub multiplicity: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub level: u32,
    pub nodes: Vec<Node>,
}

/// The diagram down to a chosen depth. `edges[n]` connects level `n` to
/// level `n + 1`; nodes and edges are ordered by ascending label so every
/// export is byte-stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratteliDiagram {
    pub character: IntPoly,
    pub levels: Vec<Level>,
    pub edges: Vec<Vec<Edge>>,
}

impl BratteliDiagram {
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// Dimension of the level-`n` algebra: the sum of squared block sizes.
    pub fn dimension(&self, level: u32) -> Option<BigInt> {
        let row = self.levels.get(level as usize)?;
        Some(row.nodes.iter().map(|n| &n.size * &n.size).sum())
    }
}

/// Builds the diagram for `p` with `n_levels` inclusion steps, so
/// `n_levels + 1` rows; row 0 is always the single node `(0, 1)`.
pub fn build(p: &CharacterPolynomial, n_levels: u32) -> BratteliDiagram {
    let psupp = p.support();
    let mut levels = Vec::with_capacity(n_levels as usize + 1);
    let mut edges = Vec::with_capacity(n_levels as usize);
    let mut power = IntPoly::one();
    for n in 0..=n_levels {
        let nodes: Vec<Node> = power
            .support()
            .into_iter()
            .map(|l| Node {
                label: l,
                size: power.coeff(l),
            })
            .collect();
        if n > 0 {
            // every (from, from + i) with a_i != 0 lands on a genuine node:
            // coefficients are nonnegative, so products never cancel
            let prev: &Level = &levels[n as usize - 1];
            let mut step = Vec::with_capacity(prev.nodes.len() * psupp.len());
            for node in &prev.nodes {
                for &i in &psupp {
                    step.push(Edge {
                        from: node.label,
                        to: node.label + i,
                        multiplicity: p.poly().coeff(i),
                    });
                }
            }
            edges.push(step);
        }
        levels.push(Level { level: n, nodes });
        if n < n_levels {
            power = &power * p.poly();
        }
    }
    BratteliDiagram {
        character: p.poly().clone(),
        levels,
        edges,
    }
}

fn matrix_rows<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(BigInt::to_string).collect())
        .collect();
    rows.serialize(s)
}

/// K-theory of one level and the map into the next: a free abelian group on
/// the support monomials of `p^n`, with the inclusion acting as
/// multiplication by `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct K0Level {
    pub level: u32,
    /// Exponents of the basis monomials at this level.
    pub basis: Vec<usize>,
    /// Exponents at level `n + 1`, indexing the matrix rows.
    pub next_basis: Vec<usize>,
    pub descriptor: GroupDescriptor,
    /// Row `r`, column `c` holds the coefficient `a_{next_basis[r] - basis[c]}`.
    #[serde(serialize_with = "matrix_rows")]
    pub matrix: Vec<Vec<BigInt>>,
}

pub fn k0_level(p: &CharacterPolynomial, n: u32) -> K0Level {
    let pn = p.poly().pow(n);
    let basis = pn.support();
    let next_basis = (&pn * p.poly()).support();
    let matrix = next_basis
        .iter()
        .map(|&row| {
            basis
                .iter()
                .map(|&col| {
                    if row >= col {
                        p.poly().coeff(row - col)
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();
    let descriptor = GroupDescriptor::named_free(basis.iter().map(|&l| monomial(l)).collect());
    K0Level {
        level: n,
        basis,
        next_basis,
        descriptor,
        matrix,
    }
}

fn monomial(l: usize) -> String {
    match l {
        0 => "1".to_string(),
        1 => "t".to_string(),
        _ => format!("t^{l}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unsupported export format {0:?}; expected dot or json")]
    UnsupportedFormat(String),
}

impl std::str::FromStr for ExportFormat {
    type Err = ExportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(ExportError::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn export(diagram: &BratteliDiagram, format: &str) -> Result<String, ExportError> {
    match format.parse::<ExportFormat>()? {
        ExportFormat::Dot => Ok(to_dot(diagram)),
        ExportFormat::Json => {
            Ok(serde_json::to_string_pretty(diagram).expect("diagram serializes"))
        }
    }
}

/// Layered digraph: one `rank=same` block per level, node labels
/// `label:size`, edge labels the multiplicities.
fn to_dot(diagram: &BratteliDiagram) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("digraph bratteli {\n  rankdir=TB;\n  node [shape=box];\n");
    for level in &diagram.levels {
        out.push_str("  { rank=same;");
        for node in &level.nodes {
            write!(
                out,
                " \"L{}_{}\" [label=\"{}:{}\"];",
                level.level, node.label, node.label, node.size
            )
            .unwrap();
        }
        out.push_str(" }\n");
    }
    for (n, step) in diagram.edges.iter().enumerate() {
        for edge in step {
            writeln!(
                out,
                "  \"L{}_{}\" -> \"L{}_{}\" [label=\"{}\"];",
                n,
                edge.from,
                n + 1,
                edge.to,
                edge.multiplicity
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

impl std::fmt::Display for BratteliDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for level in &self.levels {
            write!(f, "level {}:", level.level)?;
            for node in &level.nodes {
                write!(f, " {}:{}", node.label, node.size)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cp(s: &str) -> CharacterPolynomial {
        CharacterPolynomial::parse(s).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn binom(n: u64, k: u64) -> BigInt {
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        acc
    }

    fn sizes(d: &BratteliDiagram, level: usize) -> Vec<BigInt> {
        d.levels[level]
            .nodes
            .iter()
            .map(|n| n.size.clone())
            .collect()
    }

    #[test]
    fn pascal_triangle_through_level_12() {
        let d = build(&cp("1+t"), 12);
        assert_eq!(d.depth(), 12);
        for n in 0..=12u64 {
            let row = &d.levels[n as usize].nodes;
            assert_eq!(row.len() as u64, n + 1);
            for (k, node) in row.iter().enumerate() {
                assert_eq!(node.label as u64, k as u64);
                assert_eq!(node.size, binom(n, k as u64), "level {n} entry {k}");
            }
        }
        // central binomial: sum of squared row entries
        assert_eq!(d.dimension(3), Some(big(20)));
        assert_eq!(d.dimension(6), Some(binom(12, 6)));
    }

    #[test]
    fn constant_character_gives_a_single_chain() {
        let d = build(&cp("2"), 8);
        for n in 0..=8 {
            assert_eq!(sizes(&d, n), vec![BigInt::from(1u8) << n]);
            assert_eq!(d.levels[n].nodes[0].label, 0);
        }
        for step in &d.edges {
            assert_eq!(step.len(), 1);
            assert_eq!(step[0].multiplicity, big(2));
        }
        let trivial = build(&cp("1"), 3);
        assert!(trivial
            .levels
            .iter()
            .all(|l| sizes(&trivial, l.level as usize) == vec![big(1)]));
    }

    #[test]
    fn quadratic_rows_match_expansion() {
        let d = build(&cp("1+t+t^2"), 2);
        assert_eq!(sizes(&d, 0), vec![big(1)]);
        assert_eq!(sizes(&d, 1), vec![big(1), big(1), big(1)]);
        assert_eq!(sizes(&d, 2), vec![big(1), big(2), big(3), big(2), big(1)]);
    }

    #[test]
    fn gapped_support_keeps_labels_canonical() {
        let d = build(&cp("1+t^3"), 2);
        let labels: Vec<usize> = d.levels[2].nodes.iter().map(|n| n.label).collect();
        assert_eq!(labels, vec![0, 3, 6]);
        assert_eq!(sizes(&d, 2), vec![big(1), big(2), big(1)]);
        // two parallel strands out of each node
        assert_eq!(d.edges[1].len(), 4);
        assert_eq!(
            d.edges[1][1],
            Edge {
                from: 0,
                to: 3,
                multiplicity: big(1)
            }
        );
    }

    #[test]
    fn size_recursion_is_the_connecting_matrix() {
        for p in ["1+t", "1+2t+3t^2", "1+t^3", "2+t"] {
            let p = cp(p);
            let d = build(&p, 5);
            for n in 0..5u32 {
                let k0 = k0_level(&p, n);
                let prev = sizes(&d, n as usize);
                let next: Vec<BigInt> = k0
                    .matrix
                    .iter()
                    .map(|row| row.iter().zip(&prev).map(|(a, b)| a * b).sum())
                    .collect();
                assert_eq!(next, sizes(&d, n as usize + 1), "p = {p:?}, level {n}");
            }
        }
    }

    #[test]
    fn k0_level_examples() {
        let k0 = k0_level(&cp("1+t"), 1);
        assert_eq!(k0.basis, vec![0, 1]);
        assert_eq!(k0.next_basis, vec![0, 1, 2]);
        assert_eq!(
            k0.matrix,
            vec![
                vec![big(1), big(0)],
                vec![big(1), big(1)],
                vec![big(0), big(1)],
            ]
        );
        assert_eq!(
            k0.descriptor,
            GroupDescriptor::named_free(vec!["1".into(), "t".into()])
        );

        let constant = k0_level(&cp("2"), 4);
        assert_eq!(constant.matrix, vec![vec![big(2)]]);

        let gapped = k0_level(&cp("1+t^3"), 1);
        assert_eq!(gapped.basis, vec![0, 3]);
        assert_eq!(gapped.next_basis, vec![0, 3, 6]);
        assert_eq!(
            gapped.matrix,
            vec![
                vec![big(1), big(0)],
                vec![big(1), big(1)],
                vec![big(0), big(1)],
            ]
        );
        assert_eq!(
            gapped.descriptor.generators,
            Some(vec!["1".to_string(), "t^3".to_string()])
        );
    }

    #[test]
    fn matrices_compose_to_multiplication_by_p_squared() {
        for p in ["1+t", "1+t+t^2", "1+t^3"] {
            let p = cp(p);
            let p2 = p.poly().pow(2);
            for n in 0..4u32 {
                let a = k0_level(&p, n);
                let b = k0_level(&p, n + 1);
                assert_eq!(a.next_basis, b.basis);
                // rows of b.matrix times columns of a.matrix
                let composed: Vec<Vec<BigInt>> = b
                    .matrix
                    .iter()
                    .map(|brow| {
                        (0..a.basis.len())
                            .map(|c| {
                                brow.iter()
                                    .zip(&a.matrix)
                                    .map(|(x, arow)| x * &arow[c])
                                    .sum()
                            })
                            .collect()
                    })
                    .collect();
                let expected: Vec<Vec<BigInt>> = b
                    .next_basis
                    .iter()
                    .map(|&row| {
                        a.basis
                            .iter()
                            .map(|&col| {
                                if row >= col {
                                    p2.coeff(row - col)
                                } else {
                                    BigInt::zero()
                                }
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(composed, expected, "p = {p:?}, level {n}");
            }
        }
    }

    #[test]
    fn dot_export_is_frozen() {
        let d = build(&cp("1+t"), 1);
        let dot = export(&d, "dot").unwrap();
        let expected = "digraph bratteli {\n  rankdir=TB;\n  node [shape=box];\n  { rank=same; \"L0_0\" [label=\"0:1\"]; }\n  { rank=same; \"L1_0\" [label=\"0:1\"]; \"L1_1\" [label=\"1:1\"]; }\n  \"L0_0\" -> \"L1_0\" [label=\"1\"];\n  \"L0_0\" -> \"L1_1\" [label=\"1\"];\n}\n";
        assert_eq!(dot, expected);
    }

    #[test]
    fn zero_levels_is_the_single_node_graph() {
        let d = build(&cp("1+t"), 0);
        assert_eq!(d.levels.len(), 1);
        assert!(d.edges.is_empty());
        let dot = export(&d, "dot").unwrap();
        assert!(dot.contains("\"L0_0\" [label=\"0:1\"]"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn json_export_mirrors_the_type() {
        let d = build(&cp("1+t"), 2);
        let text = export(&d, "json").unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["character"]["coeffs"], serde_json::json!(["1", "1"]));
        assert_eq!(v["levels"][2]["nodes"][1]["size"], "2");
        assert_eq!(v["edges"][0][1]["to"], 1);
        assert!(matches!(
            export(&d, "svg"),
            Err(ExportError::UnsupportedFormat(f)) if f == "svg"
        ));
    }
}
