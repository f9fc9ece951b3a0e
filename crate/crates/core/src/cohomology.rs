//! The spectral-sequence computation of the classifying cohomology theory
//! over finite CW data, the closed form for tori, and the comparison group
//! for a trivial fibre.
//!
//! A space enters as its integral cohomology, degree by degree. Cells of the
//! second page are `H^p(X, E^q)` with the coefficient rows supplied by
//! [`crate::homotopy`]: positive units in row 0, the bounded subring in row
//! -2, the endpoint-case group in every even row below. All coefficient
//! groups are torsion-free, so universal coefficients reduce each cell to a
//! tensor: free rank scales multiplicities, torsion in `X` turns into
//! `Z/n (x) R` terms, rendered formally rather than evaluated.
//!
//! Degree-1 totals collapse to a direct sum on tori and in low dimension.
//! Elsewhere the differentials still vanish rationally, but extensions are
//! unresolved, so the output carries an associated-graded warning instead of
//! asserting the group itself. Spaces with cohomology torsion are declined
//! outright for the degree-1 readout: the vanishing argument only kills
//! torsion-image differentials on torsion-free pages.

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::descriptor::{GroupDescriptor, Warning, WARN_ASSOCIATED_GRADED};
use crate::homotopy::pi_u_limit;
use crate::locring::Ring;

/// `H^p(X, Z)` for one degree: free rank and torsion orders.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeData {
    pub rank: u64,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

impl DegreeData {
    pub fn free(rank: u64) -> Self {
        DegreeData {
            rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Which family the space came from. Products of circles admit the exact
/// direct-sum answer; everything else only the graded one (in dimension 4 and
/// up). Descriptions read from JSON default to `General`, the conservative
/// choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Torus(u32),
    Sphere(u32),
    #[default]
    General,
}

/// A finite CW complex, seen through its integral cohomology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CWDescription {
    pub name: String,
    /// `h[p]` describes `H^p(X, Z)`; trailing zero degrees may be omitted.
    pub h: Vec<DegreeData>,
    #[serde(default)]
    pub kind: SpaceKind,
}

impl CWDescription {
    /// Top degree with nonzero cohomology.
    pub fn dim(&self) -> usize {
        self.h.iter().rposition(|d| !d.is_zero()).unwrap_or(0)
    }

    pub fn degree(&self, p: usize) -> DegreeData {
        self.h.get(p).cloned().unwrap_or(DegreeData::free(0))
    }

    pub fn has_torsion(&self) -> Option<usize> {
        self.h.iter().position(|d| !d.torsion.is_empty())
    }

    pub fn validate(&self) -> Result<(), CohomologyError> {
        if self.h.is_empty() || self.h[0].rank == 0 {
            return Err(CohomologyError::InvalidSpace {
                name: self.name.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CohomologyError {
    #[error("space {name:?} needs H^0 of rank at least 1")]
    InvalidSpace { name: String },
    #[error(
        "torsion in H^{degree}(X) is not supported here: collapse is only known \
         on torsion-free pages"
    )]
    TorsionUnsupported { degree: usize },
}

fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    u64::try_from(acc).expect("binomial fits in u64")
}

/// The n-torus: `H^p = Z^C(n,p)`, torsion-free.
pub fn torus(n: u32) -> CWDescription {
    CWDescription {
        name: format!("T^{n}"),
        h: (0..=n).map(|p| DegreeData::free(binomial(n, p))).collect(),
        kind: SpaceKind::Torus(n),
    }
}

/// The n-sphere. `S^0` is the two-point space, so rank 2 in degree zero.
pub fn sphere(n: u32) -> CWDescription {
    let mut h = vec![DegreeData::free(1); n as usize + 1];
    for d in h.iter_mut().take(n as usize).skip(1) {
        d.rank = 0;
    }
    h[n as usize].rank += if n == 0 { 1 } else { 0 };
    CWDescription {
        name: format!("S^{n}"),
        h,
        kind: SpaceKind::Sphere(n),
    }
}

pub fn point() -> CWDescription {
    CWDescription {
        name: "pt".to_string(),
        h: vec![DegreeData::free(1)],
        kind: SpaceKind::Torus(0),
    }
}

/// `H^p(X, R)` for a torsion-free coefficient group `R` given as a
/// descriptor: `R^rank`, plus one `Z/n (x) R` block per torsion order.
/// Generator names and warnings do not survive into cells.
fn tensor_cell(h: &DegreeData, coeff: &GroupDescriptor) -> GroupDescriptor {
    let mut base = coeff.clone();
    base.generators = None;
    base.warnings.clear();
    let mut out = base.times(h.rank);
    for &n in &h.torsion {
        out.absorb(base.torsion_tensor(n));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E2Row {
    pub q: i64,
    /// Indexed by `p` from 0 to the dimension of the space.
    pub cells: Vec<GroupDescriptor>,
}

/// The even rows of the second page. Odd rows vanish and are omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E2Page {
    pub space: String,
    pub dim: usize,
    pub q_min: i64,
    pub rows: Vec<E2Row>,
    /// Warnings attached to the coefficient computation (once, not per cell).
    pub warnings: Vec<Warning>,
}

/// Rows are shown from 0 down to here: far enough to cover every diagonal
/// through total degree 1, never fewer than five rows.
fn page_floor(dim: usize) -> i64 {
    let mut q = -(dim as i64 + 3);
    if q % 2 != 0 {
        q -= 1;
    }
    q.min(-8)
}

pub fn e2_page(ring: &Ring, x: &CWDescription) -> Result<E2Page, CohomologyError> {
    x.validate()?;
    let dim = x.dim();
    let q_min = page_floor(dim);
    let pi0 = ring.positive_unit_monoid().descriptor;
    let warnings = pi0.warnings.clone();
    let mut rows = Vec::new();
    let mut q = 0i64;
    while q >= q_min {
        let coeff = if q == 0 {
            pi0.clone()
        } else {
            pi_u_limit(ring.p(), (-q - 1) as u32)
        };
        if let Some(degree) = x.has_torsion() {
            if !coeff.torsion.is_empty() {
                return Err(CohomologyError::TorsionUnsupported { degree });
            }
        }
        let cells = (0..=dim)
            .map(|p| tensor_cell(&x.degree(p), &coeff))
            .collect();
        rows.push(E2Row { q, cells });
        q -= 2;
    }
    Ok(E2Page {
        space: x.name.clone(),
        dim,
        q_min,
        rows,
        warnings,
    })
}

impl std::fmt::Display for E2Page {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "second page over {} (dim {})", self.space, self.dim)?;
        for row in &self.rows {
            write!(f, "  q = {:>3}:", row.q)?;
            for (p, cell) in row.cells.iter().enumerate() {
                write!(f, "  [p={p}] {cell}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The total degree-1 group: `H^1(X, G)` for the positive-unit group `G`,
/// `H^3` of the bounded subring, and `H^{2k+1}` of the endpoint-case group
/// for each higher odd degree up to the dimension.
///
/// On tori, in dimension at most 3, and for trivial characters the direct
/// sum is the group itself; otherwise the descriptor carries an
/// associated-graded warning because extensions are unresolved.
pub fn e1_group(ring: &Ring, x: &CWDescription) -> Result<GroupDescriptor, CohomologyError> {
    x.validate()?;
    if let Some(degree) = x.has_torsion() {
        return Err(CohomologyError::TorsionUnsupported { degree });
    }
    let dim = x.dim();
    let pi0 = ring.positive_unit_monoid().descriptor;
    let mut out = tensor_cell(&x.degree(1), &pi0);
    out.warnings.extend(pi0.warnings.iter().cloned());
    out.partial |= pi0.partial;
    let mut p = 3usize;
    while p <= dim {
        let coeff = pi_u_limit(ring.p(), p as u32 - 2);
        out.absorb(tensor_cell(&x.degree(p), &coeff));
        p += 2;
    }
    let trivial_character = ring.p().d() == 0 && ring.p().a0().is_one();
    let exact = matches!(x.kind, SpaceKind::Torus(_)) || dim <= 3 || trivial_character;
    if !exact {
        out.push_warning(
            WARN_ASSOCIATED_GRADED,
            format!(
                "extensions over {} (dim {dim}) are unresolved; this is the associated \
                 graded group",
                x.name
            ),
        );
    }
    Ok(out)
}

/// Obstruction group for bundles with plain matrix fibre: `H^k(X, Z)` plus
/// `H^{k+2}(X, Z)`. At `k = 1` this is the classical pair of a line-bundle
/// class and a gerbe class.
pub fn brauer_trivial_d(x: &CWDescription, k: u32) -> GroupDescriptor {
    let mut out = GroupDescriptor::zero();
    for deg in [k as usize, k as usize + 2] {
        let h = x.degree(deg);
        out.z_rank += h.rank;
        out.torsion.extend(h.torsion);
    }
    out.torsion.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::Symbol;
    use crate::polycore::CharacterPolynomial;

    fn ring(s: &str) -> Ring {
        Ring::new(CharacterPolynomial::parse(s).unwrap()).unwrap()
    }

    fn ranks(x: &CWDescription) -> Vec<u64> {
        x.h.iter().map(|d| d.rank).collect()
    }

    #[test]
    fn torus_ranks_are_binomials() {
        assert_eq!(ranks(&torus(3)), vec![1, 3, 3, 1]);
        assert_eq!(ranks(&torus(1)), vec![1, 1]);
        assert_eq!(torus(5).degree(3).rank, 10);
        assert_eq!(ranks(&torus(0)), vec![1]);
        assert_eq!(torus(4).dim(), 4);
        assert_eq!(torus(2).kind, SpaceKind::Torus(2));
    }

    #[test]
    fn sphere_ranks() {
        assert_eq!(ranks(&sphere(2)), vec![1, 0, 1]);
        assert_eq!(ranks(&sphere(5)), vec![1, 0, 0, 0, 0, 1]);
        assert_eq!(ranks(&sphere(0)), vec![2]);
        assert_eq!(sphere(3).dim(), 3);
        assert_eq!(point().dim(), 0);
    }

    #[test]
    fn page_over_the_three_torus() {
        let page = e2_page(&ring("1+t"), &torus(3)).unwrap();
        assert_eq!(page.dim, 3);
        assert_eq!(page.q_min, -8);
        let row0 = &page.rows[0];
        assert_eq!(row0.q, 0);
        let row0_ranks: Vec<u64> = row0.cells.iter().map(|c| c.z_rank).collect();
        assert_eq!(row0_ranks, vec![2, 6, 6, 2]);
        let row2 = &page.rows[1];
        assert_eq!(row2.q, -2);
        for (p, mult) in [(0u64, 1u64), (1, 3), (2, 3), (3, 1)] {
            assert_eq!(
                row2.cells[p as usize],
                GroupDescriptor::formal_multi(Symbol::RBdd, mult)
            );
        }
        for row in &page.rows[2..] {
            for (p, mult) in [(0u64, 1u64), (1, 3), (2, 3), (3, 1)] {
                assert_eq!(
                    row.cells[p as usize],
                    GroupDescriptor::formal_multi(Symbol::RBdd0Inf, mult),
                    "q = {}",
                    row.q
                );
            }
        }
    }

    #[test]
    fn page_for_the_trivial_character_on_the_circle() {
        let page = e2_page(&ring("1"), &torus(1)).unwrap();
        let row0_ranks: Vec<u64> = page.rows[0].cells.iter().map(|c| c.z_rank).collect();
        assert_eq!(row0_ranks, vec![1, 1]);
        let row2_ranks: Vec<u64> = page.rows[1].cells.iter().map(|c| c.z_rank).collect();
        assert_eq!(row2_ranks, vec![1, 1]);
        for row in &page.rows[2..] {
            assert!(
                row.cells.iter().all(GroupDescriptor::is_zero),
                "q = {}",
                row.q
            );
        }
    }

    #[test]
    fn page_over_a_point_is_the_coefficient_column() {
        use crate::homotopy::coefficients_table;
        let r = ring("1+t+t^2");
        let page = e2_page(&r, &point()).unwrap();
        let table = coefficients_table(&r, page.q_min, 0);
        for row in &page.rows {
            let coeff = table.iter().find(|c| c.k == row.q).unwrap();
            assert_eq!(row.cells.len(), 1);
            assert!(
                row.cells[0].same_group(&coeff.group),
                "q = {}: {} vs {}",
                row.q,
                row.cells[0],
                coeff.group
            );
        }
    }

    #[test]
    fn degree_one_groups_on_tori() {
        // trivial character: the comparison group on the nose
        let got = e1_group(&ring("1"), &torus(3)).unwrap();
        assert_eq!(got, GroupDescriptor::free(4));

        let got = e1_group(&ring("1+t"), &torus(3)).unwrap();
        let want = GroupDescriptor::free(6).direct_sum(GroupDescriptor::formal(Symbol::RBdd));
        assert_eq!(got, want);

        let got = e1_group(&ring("1+t"), &torus(5)).unwrap();
        let want = GroupDescriptor::free(10)
            .direct_sum(GroupDescriptor::formal_multi(Symbol::RBdd, 10))
            .direct_sum(GroupDescriptor::formal(Symbol::RBdd0Inf));
        assert_eq!(got, want);
        assert!(got.warnings.is_empty());
    }

    #[test]
    fn degree_one_matches_the_comparison_group_for_trivial_fibres() {
        let r = ring("1");
        let mut spaces = vec![point()];
        spaces.extend((1..=5).map(torus));
        spaces.extend((2..=5).map(sphere));
        spaces.push(CWDescription {
            name: "wedge".into(),
            h: vec![
                DegreeData::free(1),
                DegreeData::free(2),
                DegreeData::free(0),
                DegreeData::free(3),
            ],
            kind: SpaceKind::General,
        });
        for x in spaces {
            let lhs = e1_group(&r, &x).unwrap();
            let rhs = brauer_trivial_d(&x, 1);
            assert_eq!(lhs, rhs, "space {}", x.name);
        }
    }

    #[test]
    fn comparison_group_examples() {
        assert_eq!(brauer_trivial_d(&torus(2), 1), GroupDescriptor::free(2));
        assert_eq!(brauer_trivial_d(&torus(3), 1), GroupDescriptor::free(4));
        assert_eq!(brauer_trivial_d(&torus(3), 0), GroupDescriptor::free(4));
        assert_eq!(brauer_trivial_d(&sphere(2), 1), GroupDescriptor::zero());
        // torsion input flows straight through
        let x = CWDescription {
            name: "torsion".into(),
            h: vec![
                DegreeData::free(1),
                DegreeData {
                    rank: 0,
                    torsion: vec![2],
                },
                DegreeData::free(0),
                DegreeData {
                    rank: 1,
                    torsion: vec![4],
                },
            ],
            kind: SpaceKind::General,
        };
        let got = brauer_trivial_d(&x, 1);
        assert_eq!(got.z_rank, 1);
        assert_eq!(got.torsion, vec![2, 4]);
    }

    #[test]
    fn torsion_spaces_render_formal_tensors_on_the_page() {
        // the real projective plane
        let x = CWDescription {
            name: "RP^2".into(),
            h: vec![
                DegreeData::free(1),
                DegreeData::free(0),
                DegreeData {
                    rank: 0,
                    torsion: vec![2],
                },
            ],
            kind: SpaceKind::General,
        };
        let page = e2_page(&ring("1+t"), &x).unwrap();
        let row2 = &page.rows[1];
        assert_eq!(
            row2.cells[2],
            GroupDescriptor::formal(Symbol::TorsionTensor(2, Box::new(Symbol::RBdd)))
        );
        let row0 = &page.rows[0];
        assert_eq!(row0.cells[2].torsion, vec![2, 2]);

        // but the degree-1 readout declines
        match e1_group(&ring("1+t"), &x) {
            Err(CohomologyError::TorsionUnsupported { degree: 2 }) => {}
            other => panic!("expected torsion rejection, got {other:?}"),
        }
    }

    #[test]
    fn graded_warning_beyond_tori_and_low_dimension() {
        let high = CWDescription {
            name: "X4".into(),
            h: vec![
                DegreeData::free(1),
                DegreeData::free(0),
                DegreeData::free(1),
                DegreeData::free(0),
                DegreeData::free(1),
            ],
            kind: SpaceKind::General,
        };
        let flagged = e1_group(&ring("1+t"), &high).unwrap();
        assert_eq!(flagged.warnings.len(), 1);
        assert_eq!(flagged.warnings[0].code, WARN_ASSOCIATED_GRADED);

        // trivial character is exact everywhere
        assert!(e1_group(&ring("1"), &high).unwrap().warnings.is_empty());
        // tori are exact in any dimension
        assert!(e1_group(&ring("1+t"), &torus(5))
            .unwrap()
            .warnings
            .is_empty());
        // dimension three and below is exact for every character
        let low = CWDescription {
            name: "X3".into(),
            h: vec![
                DegreeData::free(1),
                DegreeData::free(1),
                DegreeData::free(1),
                DegreeData::free(1),
            ],
            kind: SpaceKind::General,
        };
        assert!(e1_group(&ring("1+t"), &low).unwrap().warnings.is_empty());
    }

    #[test]
    fn row_zero_total_rank_scales_with_the_unit_rank() {
        // one prime factor: positive units have rank 2
        let page = e2_page(&ring("1+t"), &torus(4)).unwrap();
        let total: u64 = page.rows[0].cells.iter().map(|c| c.z_rank).sum();
        assert_eq!(total, 2 * 16);
        // two prime factors, all two-sided positive: rank 3
        let page = e2_page(&ring("2+3t+t^2"), &torus(2)).unwrap();
        let total: u64 = page.rows[0].cells.iter().map(|c| c.z_rank).sum();
        assert_eq!(total, 3 * 4);
        // a one-sided prime leaves no asserted free part; the cells say so
        let page = e2_page(&ring("1+t^3"), &torus(2)).unwrap();
        assert!(page.rows[0]
            .cells
            .iter()
            .all(|c| c.z_rank == 0 && c.partial));
        assert!(!page.warnings.is_empty());
    }

    #[test]
    fn page_floor_tracks_dimension() {
        assert_eq!(page_floor(0), -8);
        assert_eq!(page_floor(3), -8);
        assert_eq!(page_floor(6), -10);
        assert_eq!(page_floor(10), -14);
        let page = e2_page(&ring("1+t"), &torus(6)).unwrap();
        assert_eq!(page.rows.last().unwrap().q, -10);
    }

    #[test]
    fn cw_json_shape_round_trips() {
        let text = r#"{"name":"T^2","h":[{"rank":1,"torsion":[]},{"rank":2},{"rank":1}]}"#;
        let x: CWDescription = serde_json::from_str(text).unwrap();
        assert_eq!(x.kind, SpaceKind::General);
        assert_eq!(ranks(&x), vec![1, 2, 1]);
        let back = serde_json::to_value(torus(2)).unwrap();
        assert_eq!(back["name"], "T^2");
        assert_eq!(back["h"][1]["rank"], 2);
        assert_eq!(back["kind"], serde_json::json!({"torus": 2}));
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        let bad = CWDescription {
            name: "empty".into(),
            h: vec![],
            kind: SpaceKind::General,
        };
        assert!(matches!(
            e2_page(&ring("1+t"), &bad),
            Err(CohomologyError::InvalidSpace { .. })
        ));
        let disconnected_ok = sphere(0);
        assert!(e2_page(&ring("1+t"), &disconnected_ok).is_ok());
    }
}
