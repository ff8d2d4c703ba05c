//! Grassmann spaces of singular subspaces and the half-spin spaces of type D.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Subspace;
use crate::model::Delta;
use crate::polar::{FormKind, PolarSpace, SingularSubspace};

/// A symmetric irreflexive relation on `0..len`.
#[derive(Clone, PartialEq, Eq)]
pub struct Adjacency {
    rows: Vec<FixedBitSet>,
}

impl std::fmt::Debug for Adjacency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Adjacency({} vertices, {} edges)",
            self.len(),
            self.edge_count()
        )
    }
}

impl Adjacency {
    pub fn empty(len: usize) -> Self {
        Adjacency {
            rows: vec![FixedBitSet::with_capacity(len); len],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        if a != b {
            self.rows[a].insert(b);
            self.rows[b].insert(a);
        }
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn neighbours(&self, a: usize) -> &FixedBitSet {
        &self.rows[a]
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, r)| r.ones().filter(move |&b| b > a).map(move |b| (a, b)))
    }

    /// Edges present in exactly one of the two relations.
    pub fn symmetric_difference(&self, other: &Adjacency) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, (x, y)) in self.rows.iter().zip(&other.rows).enumerate() {
            for b in x.symmetric_difference(y) {
                if b > a {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_subset(&self, other: &Adjacency) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(x, y)| x.is_subset(y))
    }
}

/// How a line was defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LineFlag {
    /// All elements between an incident pair `lower ⊂ upper` of dimensions k-1 and k+1.
    Pencil { lower: Subspace, upper: Subspace },
    /// All generators (or orbit members) through a common subspace.
    Star { axis: Subspace },
}

#[derive(Clone, Debug)]
pub struct Line {
    pub members: Vec<usize>,
    pub flag: LineFlag,
}

/// The partial linear space on the Grassmannian of `k`-dimensional singular subspaces.
pub struct GrassmannSpace<'a> {
    space: &'a PolarSpace,
    k: usize,
    elements: &'a [SingularSubspace],
    index: HashMap<Subspace, usize>,
    lines: Vec<Line>,
    collinear: Adjacency,
    weak: Adjacency,
}

impl<'a> GrassmannSpace<'a> {
    pub fn new(space: &'a PolarSpace, k: usize) -> Result<Self> {
        let elements = space.grassmannian(k)?;
        let index: HashMap<Subspace, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.subspace().clone(), i))
            .collect();
        let n = space.rank();
        let amb = space.ambient();

        let lines = if k + 1 == n {
            star_lines(space, elements, &index, n - 1)
        } else {
            let uppers = space.grassmannian(k + 1)?;
            uppers
                .par_iter()
                .flat_map_iter(|u| {
                    let mut groups: BTreeMap<Subspace, Vec<usize>> = BTreeMap::new();
                    for h in amb.subspaces_of(u, k + 1) {
                        let hi = index[&h];
                        for s in amb.subspaces_of(&h, k) {
                            groups.entry(s).or_default().push(hi);
                        }
                    }
                    groups.into_iter().map(|(lower, members)| Line {
                        members,
                        flag: LineFlag::Pencil {
                            lower,
                            upper: u.subspace().clone(),
                        },
                    })
                })
                .collect()
        };

        let mut collinear = Adjacency::empty(elements.len());
        for line in &lines {
            for (x, &a) in line.members.iter().enumerate() {
                for &b in &line.members[x + 1..] {
                    collinear.insert(a, b);
                }
            }
        }

        let mut weak = Adjacency::empty(elements.len());
        if k == 0 {
            for a in 0..elements.len() {
                for b in a + 1..elements.len() {
                    weak.insert(a, b);
                }
            }
        } else {
            let mut by_hyperplane: HashMap<Subspace, Vec<usize>> = HashMap::new();
            for (i, e) in elements.iter().enumerate() {
                for h in amb.subspaces_of(e, k) {
                    by_hyperplane.entry(h).or_default().push(i);
                }
            }
            for group in by_hyperplane.values() {
                for (x, &a) in group.iter().enumerate() {
                    for &b in &group[x + 1..] {
                        weak.insert(a, b);
                    }
                }
            }
        }

        Ok(GrassmannSpace {
            space,
            k,
            elements,
            index,
            lines,
            collinear,
            weak,
        })
    }

    pub fn space(&self) -> &'a PolarSpace {
        self.space
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn elements(&self) -> &'a [SingularSubspace] {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// The lines of the space.
    pub fn lines_of(&self) -> &[Line] {
        &self.lines
    }

    pub fn collinearity(&self) -> &Adjacency {
        &self.collinear
    }

    pub fn weak_adjacency(&self) -> &Adjacency {
        &self.weak
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::Invalid(
                "collinearity of an element with itself".into(),
            ));
        }
        Ok(())
    }

    pub fn collinear(&self, a: usize, b: usize) -> Result<bool> {
        self.check_pair(a, b)?;
        Ok(self.collinear.contains(a, b))
    }

    pub fn weak_adjacent(&self, a: usize, b: usize) -> Result<bool> {
        self.check_pair(a, b)?;
        Ok(self.weak.contains(a, b))
    }

    /// Collinearity evaluated directly from the linear algebra, bypassing the line list.
    pub fn collinear_by_definition(&self, s: &Subspace, u: &Subspace) -> Result<bool> {
        if s == u {
            return Err(Error::Invalid(
                "collinearity of an element with itself".into(),
            ));
        }
        let amb = self.space.ambient();
        let meet = amb.meet_rank(s, u);
        if self.k + 1 == self.space.rank() {
            return Ok(meet + 1 == s.rank());
        }
        Ok(meet == self.k && self.space.is_totally_singular(&amb.sum_unchecked(s, u)))
    }

    pub fn relation(&self, a: usize, b: usize) -> &'static str {
        if self.collinear.contains(a, b) {
            "collinear"
        } else if self.weak.contains(a, b) {
            "weak_adjacent"
        } else {
            "none"
        }
    }

    /// Pairs sharing more than one line (should never happen).
    pub fn partial_linear_violations(&self) -> usize {
        multi_line_pairs(&self.lines)
    }

    /// CSV of every unordered pair with its relation.
    pub fn adjacency_csv(&self) -> String {
        let mut out = String::from("element_a,element_b,relation\n");
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let _ = writeln!(out, "{a},{b},{}", self.relation(a, b));
            }
        }
        out
    }
}

fn star_lines(
    space: &PolarSpace,
    elements: &[SingularSubspace],
    index: &HashMap<Subspace, usize>,
    axis_rank: usize,
) -> Vec<Line> {
    let amb = space.ambient();
    let mut groups: BTreeMap<Subspace, Vec<usize>> = BTreeMap::new();
    for e in elements {
        let ei = index[e.subspace()];
        for h in amb.subspaces_of(e, axis_rank) {
            groups.entry(h).or_default().push(ei);
        }
    }
    groups
        .into_iter()
        .map(|(axis, members)| Line {
            members,
            flag: LineFlag::Star { axis },
        })
        .collect()
}

fn multi_line_pairs(lines: &[Line]) -> usize {
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for line in lines {
        for (x, &a) in line.members.iter().enumerate() {
            for &b in &line.members[x + 1..] {
                *seen.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }
    seen.values().filter(|&&c| c > 1).count()
}

/// The two classes of generators of a type D space.
#[derive(Clone, Debug)]
pub struct OrbitSplit {
    /// Class of every generator, indexed like the top Grassmannian.
    pub labels: Vec<Delta>,
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

impl OrbitSplit {
    pub fn members(&self, delta: Delta) -> &[usize] {
        match delta {
            Delta::Plus => &self.plus,
            Delta::Minus => &self.minus,
        }
    }
}

/// Splits the generators by the parity of `n - dim(S ∩ U)`.
///
/// The class containing the first generator in canonical order is labelled `+`.
/// Every pair is re-checked; an inconsistent parity pattern is a structural error.
pub fn orbit_split(space: &PolarSpace) -> Result<OrbitSplit> {
    if space.kind() != FormKind::HyperbolicD {
        return Err(Error::Unsupported(
            "orbit split needs a type D space".into(),
        ));
    }
    let n = space.rank();
    let gens = space.grassmannian(n - 1)?;
    let amb = space.ambient();
    // projective dim of the meet is meet_rank - 1, so n - dim = n + 1 - meet_rank
    let same_class = |a: &Subspace, b: &Subspace| (n + 1 - amb.meet_rank(a, b)) % 2 == 1;

    let labels: Vec<Delta> = gens
        .par_iter()
        .map(|g| {
            if same_class(&gens[0], g) {
                Delta::Plus
            } else {
                Delta::Minus
            }
        })
        .collect();

    let bad = (0..gens.len())
        .into_par_iter()
        .map(|a| {
            (a + 1..gens.len())
                .filter(|&b| same_class(&gens[a], &gens[b]) != (labels[a] == labels[b]))
                .count()
        })
        .sum::<usize>();
    if bad > 0 {
        return Err(Error::Structural(format!(
            "{bad} generator pairs violate the parity rule"
        )));
    }
    let plus = (0..gens.len())
        .filter(|&i| labels[i] == Delta::Plus)
        .collect();
    let minus = (0..gens.len())
        .filter(|&i| labels[i] == Delta::Minus)
        .collect();
    Ok(OrbitSplit {
        labels,
        plus,
        minus,
    })
}

/// One half-spin space: a class of generators, with lines through (n-3)-dimensional
/// singular subspaces.
pub struct HalfSpinSpace<'a> {
    space: &'a PolarSpace,
    delta: Delta,
    /// Indices into the top Grassmannian.
    elements: Vec<usize>,
    local: HashMap<usize, usize>,
    lines: Vec<Line>,
    collinear: Adjacency,
}

impl<'a> HalfSpinSpace<'a> {
    pub fn new(space: &'a PolarSpace, split: &OrbitSplit, delta: Delta) -> Result<Self> {
        if space.kind() != FormKind::HyperbolicD {
            return Err(Error::Unsupported(
                "half-spin spaces need a type D space".into(),
            ));
        }
        let n = space.rank();
        if n < 4 {
            return Err(Error::Unsupported(format!(
                "half-spin spaces need rank at least 4, got {n}"
            )));
        }
        let gens = space.grassmannian(n - 1)?;
        let elements = split.members(delta).to_vec();
        let local: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let class: Vec<SingularSubspace> = elements.iter().map(|&g| gens[g].clone()).collect();
        let class_index: HashMap<Subspace, usize> = class
            .iter()
            .enumerate()
            .map(|(i, s)| (s.subspace().clone(), i))
            .collect();
        let lines = star_lines(space, &class, &class_index, n - 2);
        let mut collinear = Adjacency::empty(elements.len());
        for line in &lines {
            for (x, &a) in line.members.iter().enumerate() {
                for &b in &line.members[x + 1..] {
                    collinear.insert(a, b);
                }
            }
        }
        Ok(HalfSpinSpace {
            space,
            delta,
            elements,
            local,
            lines,
            collinear,
        })
    }

    pub fn space(&self) -> &'a PolarSpace {
        self.space
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    /// Members as indices into the top Grassmannian, in local order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Local index of a generator, if it belongs to this class.
    pub fn local_index(&self, generator: usize) -> Option<usize> {
        self.local.get(&generator).copied()
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    /// Collinearity on local indices.
    pub fn collinearity(&self) -> &Adjacency {
        &self.collinear
    }

    pub fn collinear(&self, a: usize, b: usize) -> Result<bool> {
        if a == b {
            return Err(Error::Invalid(
                "collinearity of an element with itself".into(),
            ));
        }
        Ok(self.collinear.contains(a, b))
    }

    pub fn partial_linear_violations(&self) -> usize {
        multi_line_pairs(&self.lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::FormSpec;

    #[test]
    fn symplectic_line_sizes_and_linearity() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        for k in 0..3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            assert!(g.lines_of().iter().all(|l| l.members.len() == 3), "k={k}");
            assert_eq!(g.partial_linear_violations(), 0);
        }
    }

    #[test]
    fn hyperbolic_top_lines_have_two_points() {
        let s = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
        let g = GrassmannSpace::new(&s, 3).unwrap();
        assert!(g.lines_of().iter().all(|l| l.members.len() == 2));
    }

    #[test]
    fn collinear_implies_weak_and_witness_exists() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let g = GrassmannSpace::new(&s, 1).unwrap();
        assert!(g.collinearity().is_subset(g.weak_adjacency()));
        let witness = g
            .weak_adjacency()
            .edges()
            .find(|&(a, b)| !g.collinear(a, b).unwrap())
            .expect("weak-adjacent non-collinear pair");
        let (a, b) = witness;
        let els = g.elements();
        assert!(!g.collinear_by_definition(&els[a], &els[b]).unwrap());
        assert!(g.collinear(0, 0).is_err());
    }

    #[test]
    fn line_relation_matches_definition() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 3)).unwrap();
        for k in 0..3 {
            let g = GrassmannSpace::new(&s, k).unwrap();
            let els = g.elements();
            for a in 0..g.len().min(40) {
                for b in 0..g.len() {
                    if a != b {
                        assert_eq!(
                            g.collinear(a, b).unwrap(),
                            g.collinear_by_definition(&els[a], &els[b]).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn orbit_split_small() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        let split = orbit_split(&s).unwrap();
        assert_eq!((split.plus.len(), split.minus.len()), (15, 15));
        assert_eq!(split.labels[0], Delta::Plus);
        let sp = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        assert!(orbit_split(&sp).is_err());
        let split = orbit_split(&s).unwrap();
        assert!(HalfSpinSpace::new(&s, &split, Delta::Plus).is_err());
    }
}
