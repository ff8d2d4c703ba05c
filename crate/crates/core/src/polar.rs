//! Finite classical polar spaces of symplectic (type C) and hyperbolic (type D)
//! kind, with their point-collinearity relation and singular subspaces.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Ambient, PrimeField, Subspace, Vector};

/// Largest number of ambient vectors we are willing to scan when listing points.
const MAX_AMBIENT_VECTORS: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormKind {
    /// Alternating form; every second-maximal singular subspace lies in q+1 generators.
    #[serde(rename = "C")]
    SymplecticC,
    /// Hyperbolic quadratic form `Q(x) = Σ x_{2i} x_{2i+1}`.
    #[serde(rename = "D")]
    HyperbolicD,
}

impl FormKind {
    pub fn letter(&self) -> char {
        match self {
            FormKind::SymplecticC => 'C',
            FormKind::HyperbolicD => 'D',
        }
    }
}

impl std::str::FromStr for FormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" | "c" => Ok(FormKind::SymplecticC),
            "D" | "d" => Ok(FormKind::HyperbolicD),
            _ => Err(Error::Parse {
                what: "form kind",
                detail: format!("{s:?} (expected C or D)"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: FormKind,
    pub n: usize,
    pub p: u32,
}

impl FormSpec {
    pub fn symplectic(n: usize, p: u32) -> Self {
        FormSpec {
            kind: FormKind::SymplecticC,
            n,
            p,
        }
    }

    pub fn hyperbolic(n: usize, p: u32) -> Self {
        FormSpec {
            kind: FormKind::HyperbolicD,
            n,
            p,
        }
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FormKind::SymplecticC => write!(f, "Sp({},{})", 2 * self.n, self.p),
            FormKind::HyperbolicD => write!(f, "O+({},{})", 2 * self.n, self.p),
        }
    }
}

/// A subspace on which the form vanishes identically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SingularSubspace(Subspace);

impl SingularSubspace {
    pub fn subspace(&self) -> &Subspace {
        &self.0
    }

    pub fn into_inner(self) -> Subspace {
        self.0
    }

    pub fn proj_dim(&self) -> isize {
        self.0.proj_dim()
    }

    /// Re-validates the certificate against `space`.
    pub fn recheck(&self, space: &PolarSpace) -> bool {
        space.is_totally_singular(&self.0)
    }
}

impl std::ops::Deref for SingularSubspace {
    type Target = Subspace;
    fn deref(&self) -> &Subspace {
        &self.0
    }
}

/// The polar space of rank `n` defined by a classical form on GF(p)^{2n}.
pub struct PolarSpace {
    spec: FormSpec,
    ambient: Ambient,
    points: Vec<Vector>,
    index: HashMap<Vector, usize>,
    perp: Vec<FixedBitSet>,
    levels: OnceLock<Vec<Vec<SingularSubspace>>>,
}

impl fmt::Debug for PolarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarSpace")
            .field("spec", &self.spec)
            .field("points", &self.points.len())
            .finish()
    }
}

impl PolarSpace {
    pub fn build(spec: FormSpec) -> Result<Self> {
        let field = PrimeField::new(spec.p)?;
        if spec.n < 3 {
            return Err(Error::Unsupported(format!(
                "rank {} polar spaces (rank must be at least 3)",
                spec.n
            )));
        }
        let dim = 2 * spec.n;
        let ambient = Ambient::new(field, dim)?;
        if (spec.p as u64)
            .checked_pow(dim as u32)
            .is_none_or(|v| v > MAX_AMBIENT_VECTORS)
        {
            return Err(Error::Unsupported(format!(
                "{spec} is too large to enumerate"
            )));
        }

        let full = ambient.span_of(&(0..dim).map(|i| Vector::unit(dim, i)).collect::<Vec<_>>());
        let mut space = PolarSpace {
            spec,
            ambient,
            points: Vec::new(),
            index: HashMap::new(),
            perp: Vec::new(),
            levels: OnceLock::new(),
        };
        let points: Vec<Vector> = ambient
            .points_of(&full)
            .into_iter()
            .filter(|v| space.quadratic(v) == 0)
            .collect();
        let index = points.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let perp = points
            .par_iter()
            .map(|x| {
                let mut row = FixedBitSet::with_capacity(points.len());
                for (j, y) in points.iter().enumerate() {
                    if space.bilinear(x, y) == 0 {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        space.points = points;
        space.index = index;
        space.perp = perp;
        Ok(space)
    }

    #[inline]
    pub fn spec(&self) -> FormSpec {
        self.spec
    }

    #[inline]
    pub fn kind(&self) -> FormKind {
        self.spec.kind
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.spec.n
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.spec.p as usize
    }

    #[inline]
    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.ambient.field()
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &Vector {
        &self.points[i]
    }

    /// Index of the projective point spanned by `v`, if it is a point of the space.
    pub fn point_index(&self, v: &Vector) -> Option<usize> {
        self.index.get(&v.normalized(self.field())).copied()
    }

    pub fn point_subspace(&self, i: usize) -> Subspace {
        self.ambient.span_of(std::slice::from_ref(&self.points[i]))
    }

    /// The polar (symmetric or alternating) bilinear form.
    pub fn bilinear(&self, x: &Vector, y: &Vector) -> u8 {
        let f = self.field();
        let mut acc = 0u8;
        for i in 0..self.spec.n {
            let (a, b) = (2 * i, 2 * i + 1);
            let t1 = f.mul(x.get(a), y.get(b));
            let t2 = f.mul(x.get(b), y.get(a));
            acc = match self.spec.kind {
                FormKind::SymplecticC => f.add(acc, f.sub(t1, t2)),
                FormKind::HyperbolicD => f.add(acc, f.add(t1, t2)),
            };
        }
        acc
    }

    /// The quadratic form for type D; identically zero for the alternating form.
    pub fn quadratic(&self, x: &Vector) -> u8 {
        match self.spec.kind {
            FormKind::SymplecticC => 0,
            FormKind::HyperbolicD => {
                let f = self.field();
                (0..self.spec.n).fold(0, |acc, i| {
                    f.add(acc, f.mul(x.get(2 * i), x.get(2 * i + 1)))
                })
            }
        }
    }

    /// Collinearity of two points (reflexive).
    #[inline]
    pub fn perp(&self, i: usize, j: usize) -> bool {
        self.perp[i].contains(j)
    }

    pub fn perp_row(&self, i: usize) -> &FixedBitSet {
        &self.perp[i]
    }

    /// `X^⊥`: points collinear with every point of `xs`.
    pub fn perp_set(&self, xs: &[usize]) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.points.len());
        out.insert_range(..);
        for &x in xs {
            out.intersect_with(&self.perp[x]);
        }
        out
    }

    /// Linear orthogonal complement `{x : B(x, s) = 0 for all s in S}`.
    pub fn perp_subspace(&self, s: &Subspace) -> Subspace {
        let rows: Vec<Vector> = s.rows().iter().map(|r| self.gram_image(r)).collect();
        self.ambient.null_space_of(&rows)
    }

    /// The vector `g` with `g · x = B(x, v)` for all x.
    fn gram_image(&self, v: &Vector) -> Vector {
        let f = self.field();
        let mut g = Vector::zero(self.ambient.dim());
        for i in 0..self.spec.n {
            let (a, b) = (2 * i, 2 * i + 1);
            match self.spec.kind {
                FormKind::SymplecticC => {
                    g.set(a, v.get(b));
                    g.set(b, f.neg(v.get(a)));
                }
                FormKind::HyperbolicD => {
                    g.set(a, v.get(b));
                    g.set(b, v.get(a));
                }
            }
        }
        g
    }

    pub fn is_totally_singular(&self, s: &Subspace) -> bool {
        let rows = s.rows();
        rows.iter().all(|r| self.quadratic(r) == 0)
            && rows
                .iter()
                .enumerate()
                .all(|(i, x)| rows[i + 1..].iter().all(|y| self.bilinear(x, y) == 0))
    }

    pub fn certify(&self, s: Subspace) -> Result<SingularSubspace> {
        if s.ambient_dim() != self.ambient.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient.dim(),
                found: s.ambient_dim(),
            });
        }
        if !self.is_totally_singular(&s) {
            return Err(Error::Invalid(format!("{s:?} is not totally singular")));
        }
        Ok(SingularSubspace(s))
    }

    /// Point indices of the basis rows of a singular subspace (rref rows are normalized).
    pub fn row_points(&self, s: &Subspace) -> Vec<usize> {
        s.rows()
            .iter()
            .map(|r| {
                self.point_index(r)
                    .expect("rows of a singular subspace are points")
            })
            .collect()
    }

    /// Point indices of all points in `s`.
    pub fn points_in(&self, s: &Subspace) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .ambient
            .points_of(s)
            .iter()
            .map(|v| self.point_index(v).expect("point of a singular subspace"))
            .collect();
        out.sort_unstable();
        out
    }

    /// Span of a set of point indices.
    pub fn span_points(&self, pts: &[usize]) -> Subspace {
        let rows: Vec<Vector> = pts.iter().map(|&i| self.points[i]).collect();
        self.ambient.span_of(&rows)
    }

    fn levels(&self) -> &Vec<Vec<SingularSubspace>> {
        self.levels.get_or_init(|| {
            let mut levels: Vec<Vec<SingularSubspace>> = Vec::with_capacity(self.spec.n);
            levels.push(
                (0..self.points.len())
                    .map(|i| SingularSubspace(self.point_subspace(i)))
                    .collect(),
            );
            for _ in 1..self.spec.n {
                let next = self.extend_level(levels.last().unwrap());
                levels.push(next);
            }
            levels
        })
    }

    fn extend_level(&self, prev: &[SingularSubspace]) -> Vec<SingularSubspace> {
        let found: HashSet<Subspace> = prev
            .par_iter()
            .fold(HashSet::new, |mut acc, x| {
                let rows = self.row_points(x);
                let cand = self.perp_set(&rows);
                for c in cand.ones() {
                    if self.ambient.contains_vector(x, &self.points[c]) {
                        continue;
                    }
                    acc.insert(self.ambient.sum_unchecked(x, &self.point_subspace(c)));
                }
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            });
        let mut out: Vec<SingularSubspace> = found.into_iter().map(SingularSubspace).collect();
        out.sort();
        out
    }

    /// The Grassmannian of `k`-dimensional singular subspaces, canonically ordered.
    pub fn grassmannian(&self, k: usize) -> Result<&[SingularSubspace]> {
        if k >= self.spec.n {
            return Err(Error::LevelOutOfRange { n: self.spec.n, k });
        }
        Ok(&self.levels()[k])
    }

    /// Alias of [`PolarSpace::grassmannian`].
    pub fn enumerate_singular(&self, k: usize) -> Result<&[SingularSubspace]> {
        self.grassmannian(k)
    }

    /// Lines of the space as sorted point-index sets.
    pub fn lines(&self) -> Vec<Vec<usize>> {
        self.levels()[1].iter().map(|l| self.points_in(l)).collect()
    }

    pub fn descriptor(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            kind: self.spec.kind,
            n: self.spec.n,
            p: self.spec.p,
            point_count: self.points.len(),
            counts_per_grassmannian: self.levels().iter().map(Vec::len).collect(),
        }
    }

    /// Checks the polar-space axioms and the C/D dichotomy exhaustively.
    pub fn verify_axioms(&self, seed: u64) -> AxiomReport {
        let lines = self.lines();
        let npts = self.points.len();

        let one_or_all_violations = lines
            .par_iter()
            .map(|line| {
                (0..npts)
                    .filter(|&x| {
                        let c = line.iter().filter(|&&y| self.perp(x, y)).count();
                        c != 1 && c != line.len()
                    })
                    .count()
            })
            .sum();

        let universal_points = (0..npts)
            .filter(|&x| self.perp[x].count_ones(..) == npts)
            .count();

        // Exhaustive: non-maximal subspaces extend, generators do not.
        let levels = self.levels();
        let mut flag_violations = 0;
        for (k, level) in levels.iter().enumerate() {
            for x in level {
                let extendable = self.extension_points(x).next().is_some();
                if extendable != (k + 1 < self.spec.n) {
                    flag_violations += 1;
                }
            }
        }

        // Randomized greedy flags starting from random points.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut greedy_lengths = BTreeMap::new();
        for _ in 0..64 {
            let start = rand::Rng::random_range(&mut rng, 0..npts);
            let mut current = self.point_subspace(start);
            let mut len = 1;
            loop {
                let ext: Vec<usize> = self.extension_points(&current).collect();
                let Some(&c) = ext.choose(&mut rng) else {
                    break;
                };
                current = self
                    .ambient
                    .sum_unchecked(&current, &self.point_subspace(c));
                len += 1;
            }
            *greedy_lengths.entry(len).or_insert(0usize) += 1;
            if len != self.spec.n {
                flag_violations += 1;
            }
        }

        let generators_over_ridge = self.generators_per_ridge();
        let distinct: Vec<usize> = {
            let mut v: Vec<usize> = generators_over_ridge.values().copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let expected = match self.spec.kind {
            FormKind::SymplecticC => self.q() + 1,
            FormKind::HyperbolicD => 2,
        };

        AxiomReport {
            space: self.spec,
            lines_checked: lines.len(),
            one_or_all_violations,
            universal_points,
            flag_violations,
            greedy_flag_lengths: greedy_lengths,
            ridges: generators_over_ridge.len(),
            generators_per_ridge: distinct.clone(),
            dichotomy_ok: distinct == vec![expected],
        }
    }

    /// Points of `x^⊥` outside `x`.
    fn extension_points<'a>(&'a self, x: &'a Subspace) -> impl Iterator<Item = usize> + 'a {
        let rows = self.row_points(x);
        let cand = self.perp_set(&rows);
        cand.into_ones()
            .filter(move |&c| !self.ambient.contains_vector(x, &self.points[c]))
    }

    /// For every (n-2)-dimensional singular subspace, the number of generators through it.
    pub fn generators_per_ridge(&self) -> HashMap<Subspace, usize> {
        let n = self.spec.n;
        let mut counts: HashMap<Subspace, usize> = HashMap::new();
        for g in &self.levels()[n - 1] {
            for h in self.ambient.subspaces_of(g, n - 1) {
                *counts.entry(h).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// JSON summary of a built space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub kind: FormKind,
    pub n: usize,
    pub p: u32,
    pub point_count: usize,
    pub counts_per_grassmannian: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub space: FormSpec,
    pub lines_checked: usize,
    /// (point, line) pairs where the point sees neither one nor all points of the line.
    pub one_or_all_violations: usize,
    pub universal_points: usize,
    pub flag_violations: usize,
    pub greedy_flag_lengths: BTreeMap<usize, usize>,
    pub ridges: usize,
    /// Distinct values of "generators through a second-maximal singular subspace".
    pub generators_per_ridge: Vec<usize>,
    pub dichotomy_ok: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.one_or_all_violations == 0
            && self.universal_points == 0
            && self.flag_violations == 0
            && self.dichotomy_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_below_three_is_refused() {
        assert!(matches!(
            PolarSpace::build(FormSpec::symplectic(2, 2)),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            PolarSpace::build(FormSpec::symplectic(3, 7)),
            Err(Error::UnsupportedField(7))
        ));
    }

    #[test]
    fn point_counts() {
        assert_eq!(
            PolarSpace::build(FormSpec::symplectic(3, 2))
                .unwrap()
                .point_count(),
            63
        );
        assert_eq!(
            PolarSpace::build(FormSpec::hyperbolic(3, 2))
                .unwrap()
                .point_count(),
            35
        );
        assert_eq!(
            PolarSpace::build(FormSpec::hyperbolic(4, 2))
                .unwrap()
                .point_count(),
            135
        );
    }

    #[test]
    fn perp_is_symmetric_and_reflexive() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 3)).unwrap();
        for i in 0..s.point_count() {
            assert!(s.perp(i, i));
            for j in 0..s.point_count() {
                assert_eq!(s.perp(i, j), s.perp(j, i));
            }
        }
    }

    #[test]
    fn perp_set_edge_cases() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        assert_eq!(s.perp_set(&[]).count_ones(..), 63);
        let p = s.perp_set(&[5]);
        assert!(p.contains(5));
        assert_eq!(p.count_ones(..), 31);
    }

    #[test]
    fn grassmannian_out_of_range() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        assert!(matches!(
            s.grassmannian(3),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn certify_rejects_nonsingular() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let amb = *s.ambient();
        let h = amb.span_of(&[Vector::unit(6, 0), Vector::unit(6, 1)]);
        assert!(s.certify(h).is_err());
        let t = amb.span_of(&[Vector::unit(6, 0), Vector::unit(6, 2)]);
        assert!(s.certify(t).is_ok());
    }

    #[test]
    fn perp_subspace_matches_pointwise_perp() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        let line = &s.grassmannian(1).unwrap()[7];
        let lin = s.perp_subspace(line);
        assert_eq!(lin.rank(), 4);
        let pts = s.perp_set(&s.row_points(line));
        for i in 0..s.point_count() {
            assert_eq!(
                pts.contains(i),
                s.ambient().contains_vector(&lin, s.point(i))
            );
        }
    }
}
