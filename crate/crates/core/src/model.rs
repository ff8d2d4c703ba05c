//! The signed-subset model of a single base subset.
//!
//! A frame `p_0, …, p_{2n-1}` pairs index `i` with `σ(i) = (i + n) mod 2n`; the
//! element of a base subset spanned by `p_{i_0}, …, p_{i_k}` is recorded as the
//! index mask `{i_0, …, i_k}`. Everything here is pure combinatorics on those
//! masks and never touches an ambient space. Indices are 0-based throughout.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::combinations;
use crate::polar::FormKind;

/// Frame partner of index `i` for rank `n`.
#[inline]
pub fn sigma(n: usize, i: usize) -> usize {
    (i + n) % (2 * n)
}

/// Index set of an element of a base subset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedSet(u32);

impl SignedSet {
    pub fn from_indices(indices: &[usize]) -> Self {
        SignedSet(indices.iter().fold(0u32, |m, &i| m | (1 << i)))
    }

    #[inline]
    pub fn mask(&self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |i| m & (1 << i) != 0)
    }

    #[inline]
    pub fn intersection(&self, other: &SignedSet) -> SignedSet {
        SignedSet(self.0 & other.0)
    }

    #[inline]
    pub fn union(&self, other: &SignedSet) -> SignedSet {
        SignedSet(self.0 | other.0)
    }

    /// The image `σ(T)`.
    pub fn sigma_image(&self, n: usize) -> SignedSet {
        let low = (1u32 << n) - 1;
        SignedSet(((self.0 & low) << n) | ((self.0 >> n) & low))
    }

    /// No index appears together with its partner.
    pub fn is_admissible(&self, n: usize) -> bool {
        self.0 & self.sigma_image(n).0 == 0
    }
}

impl fmt::Debug for SignedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Delta {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Delta {
    pub fn opposite(self) -> Delta {
        match self {
            Delta::Plus => Delta::Minus,
            Delta::Minus => Delta::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Delta::Plus => '+',
            Delta::Minus => '-',
        }
    }
}

impl std::str::FromStr for Delta {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Delta::Plus),
            "-" | "minus" => Ok(Delta::Minus),
            _ => Err(Error::Parse {
                what: "delta",
                detail: s.to_string(),
            }),
        }
    }
}

/// Which base subset the model describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelShape {
    /// Base subset of the Grassmannian of `k`-dimensional singular subspaces.
    Grassmann { kind: FormKind, k: usize },
    /// Base subset of one half-spin class. `Plus` means an even number of
    /// indices from `n..2n`, `Minus` an odd number.
    HalfSpin { delta: Delta },
}

/// A `+i` / `-i` constraint used by [`ApartmentModel::select`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus(usize),
    Minus(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MaxInexact {
    /// `B(-i)`.
    FirstType { i: usize },
    /// `R_ij = B(+i,+j) ∪ B(+σi,+σj) ∪ B(-i,-σj)`.
    SecondType { i: usize, j: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Complement {
    /// `B(+i)`.
    FirstType { i: usize },
    /// `C_ij = B(+i,-j) ∪ B(+σj,-σi)`.
    SecondType { i: usize, j: usize },
}

impl MaxInexact {
    pub fn complement(self) -> Complement {
        match self {
            MaxInexact::FirstType { i } => Complement::FirstType { i },
            MaxInexact::SecondType { i, j } => Complement::SecondType { i, j },
        }
    }

    pub fn is_first_type(&self) -> bool {
        matches!(self, MaxInexact::FirstType { .. })
    }
}

impl Complement {
    pub fn maximal_inexact(self) -> MaxInexact {
        match self {
            Complement::FirstType { i } => MaxInexact::FirstType { i },
            Complement::SecondType { i, j } => MaxInexact::SecondType { i, j },
        }
    }

    pub fn is_first_type(&self) -> bool {
        matches!(self, Complement::FirstType { .. })
    }
}

/// Canonical representative of the pair class `(i, j) ~ (σj, σi)`.
pub fn canonical_pair(n: usize, i: usize, j: usize) -> (usize, usize) {
    let alt = (sigma(n, j), sigma(n, i));
    std::cmp::min((i, j), alt)
}

/// Outcome of intersecting first-type maximal inexact subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntersectionShape {
    /// `k + 2` mutually collinear members.
    Pencil(Vec<usize>),
    /// Two weak-adjacent, non-collinear members.
    WeakPair(usize, usize),
}

/// Result of [`ApartmentModel::count_disjoint_complements`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DisjointCount {
    /// Distinct complement subsets disjoint from the given one.
    pub distinct_sets: usize,
    /// The same, counting a second-type set once per ordered label `(i, j)`.
    pub labelled: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ComplementSizes {
    pub first: Option<usize>,
    pub second: Option<usize>,
}

/// The signed-subset model of a base subset.
#[derive(Clone, Debug)]
pub struct ApartmentModel {
    n: usize,
    shape: ModelShape,
    elements: Vec<SignedSet>,
    index: HashMap<SignedSet, usize>,
}

impl ApartmentModel {
    pub fn grassmann(n: usize, k: usize, kind: FormKind) -> Result<Self> {
        if n < 2 || 2 * n > 32 {
            return Err(Error::Unsupported(format!("model rank {n}")));
        }
        if k >= n {
            return Err(Error::LevelOutOfRange { n, k });
        }
        let elements = combinations(2 * n, k + 1)
            .into_iter()
            .map(|c| SignedSet::from_indices(&c))
            .filter(|t| t.is_admissible(n))
            .collect();
        Ok(Self::from_elements(
            n,
            ModelShape::Grassmann { kind, k },
            elements,
        ))
    }

    pub fn halfspin(n: usize, delta: Delta) -> Result<Self> {
        if !(4..=16).contains(&n) {
            return Err(Error::Unsupported(format!(
                "half-spin model needs 4 <= n <= 16, got {n}"
            )));
        }
        let want_odd = delta == Delta::Minus;
        let upper = ((1u32 << n) - 1) << n;
        let mut elements: Vec<SignedSet> = (0u32..1 << n)
            .map(|choice| {
                // bit b of `choice` picks σ(b) instead of b
                let mut m = 0u32;
                for b in 0..n {
                    m |= if choice & (1 << b) != 0 {
                        1 << (b + n)
                    } else {
                        1 << b
                    };
                }
                SignedSet(m)
            })
            .filter(|t| ((t.0 & upper).count_ones() % 2 == 1) == want_odd)
            .collect();
        elements.sort_by_key(|t| t.indices().collect::<Vec<_>>());
        Ok(Self::from_elements(
            n,
            ModelShape::HalfSpin { delta },
            elements,
        ))
    }

    fn from_elements(n: usize, shape: ModelShape, elements: Vec<SignedSet>) -> Self {
        let index = elements.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        ApartmentModel {
            n,
            shape,
            elements,
            index,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn shape(&self) -> ModelShape {
        self.shape
    }

    /// Level of the members (`n - 1` for half-spin models).
    pub fn k(&self) -> usize {
        match self.shape {
            ModelShape::Grassmann { k, .. } => k,
            ModelShape::HalfSpin { .. } => self.n - 1,
        }
    }

    pub fn is_halfspin(&self) -> bool {
        matches!(self.shape, ModelShape::HalfSpin { .. })
    }

    #[inline]
    pub fn sigma(&self, i: usize) -> usize {
        sigma(self.n, i)
    }

    pub fn elements(&self) -> &[SignedSet] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, idx: usize) -> SignedSet {
        self.elements[idx]
    }

    pub fn position(&self, t: &SignedSet) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn full(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    fn filter(&self, pred: impl Fn(&SignedSet) -> bool) -> FixedBitSet {
        let mut s = self.empty_set();
        for (idx, t) in self.elements.iter().enumerate() {
            if pred(t) {
                s.insert(idx);
            }
        }
        s
    }

    /// `B(±i_1, …)`: members containing every `+` index and avoiding every `-` index.
    pub fn select(&self, signs: &[Sign]) -> FixedBitSet {
        let (mut plus, mut minus) = (0u32, 0u32);
        for s in signs {
            match *s {
                Sign::Plus(i) => plus |= 1 << i,
                Sign::Minus(i) => minus |= 1 << i,
            }
        }
        self.filter(|t| t.0 & plus == plus && t.0 & minus == 0)
    }

    /// `S_i(R)`: intersection of the members of `r` containing `i`.
    pub fn s_i(&self, r: &FixedBitSet, i: usize) -> Option<SignedSet> {
        r.ones()
            .map(|idx| self.elements[idx])
            .filter(|t| t.contains(i))
            .reduce(|a, b| a.intersection(&b))
    }

    pub fn max_inexact_contains(&self, d: MaxInexact, t: &SignedSet) -> bool {
        let n = self.n;
        match d {
            MaxInexact::FirstType { i } => !t.contains(i),
            MaxInexact::SecondType { i, j } => {
                let (si, sj) = (sigma(n, i), sigma(n, j));
                (t.contains(i) && t.contains(j))
                    || (t.contains(si) && t.contains(sj))
                    || (!t.contains(i) && !t.contains(sj))
            }
        }
    }

    pub fn complement_contains(&self, c: Complement, t: &SignedSet) -> bool {
        let n = self.n;
        match c {
            Complement::FirstType { i } => t.contains(i),
            Complement::SecondType { i, j } => {
                let (si, sj) = (sigma(n, i), sigma(n, j));
                (t.contains(i) && !t.contains(j)) || (t.contains(sj) && !t.contains(si))
            }
        }
    }

    pub fn members_of_max_inexact(&self, d: MaxInexact) -> FixedBitSet {
        self.filter(|t| self.max_inexact_contains(d, t))
    }

    pub fn members_of(&self, c: Complement) -> FixedBitSet {
        self.filter(|t| self.complement_contains(c, t))
    }

    fn has_first_type(&self) -> bool {
        match self.shape {
            ModelShape::Grassmann {
                kind: FormKind::SymplecticC,
                k,
            } => k + 1 < self.n,
            _ => false,
        }
    }

    fn has_second_type(&self) -> bool {
        !matches!(
            self.shape,
            ModelShape::Grassmann {
                kind: FormKind::SymplecticC,
                k: 0
            }
        )
    }

    fn second_type_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 0..2 * n {
            for j in 0..2 * n {
                if j == i || j == sigma(n, i) {
                    continue;
                }
                if canonical_pair(n, i, j) == (i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Every maximal inexact subset of the base subset, as descriptors.
    pub fn maximal_inexact(&self) -> Vec<MaxInexact> {
        let mut out = Vec::new();
        if self.has_first_type() {
            out.extend((0..2 * self.n).map(|i| MaxInexact::FirstType { i }));
        }
        if self.has_second_type() {
            out.extend(
                self.second_type_pairs()
                    .into_iter()
                    .map(|(i, j)| MaxInexact::SecondType { i, j }),
            );
        }
        out
    }

    /// Complements of [`ApartmentModel::maximal_inexact`], in the same order.
    pub fn complements(&self) -> Vec<Complement> {
        self.maximal_inexact()
            .into_iter()
            .map(MaxInexact::complement)
            .collect()
    }

    /// Exact iff `r` lies in no maximal inexact subset.
    pub fn is_exact(&self, r: &FixedBitSet) -> bool {
        !self.maximal_inexact().into_iter().any(|d| {
            r.ones()
                .all(|idx| self.max_inexact_contains(d, &self.elements[idx]))
        })
    }

    pub fn model_collinear(&self, s: &SignedSet, u: &SignedSet) -> bool {
        if s == u {
            return false;
        }
        let common = s.intersection(u).len();
        match self.shape {
            ModelShape::HalfSpin { .. } => common + 2 == self.n,
            ModelShape::Grassmann { k, .. } if k + 1 == self.n => common + 1 == self.n,
            ModelShape::Grassmann { k, .. } => common == k && s.union(u).is_admissible(self.n),
        }
    }

    pub fn model_weak_adjacent(&self, s: &SignedSet, u: &SignedSet) -> bool {
        if s == u {
            return false;
        }
        match self.shape {
            ModelShape::Grassmann { k, .. } => s.intersection(u).len() == k,
            ModelShape::HalfSpin { .. } => self.model_collinear(s, u),
        }
    }

    fn require_lemma_range(&self, what: &str) -> Result<usize> {
        match self.shape {
            ModelShape::Grassmann {
                kind: FormKind::SymplecticC,
                k,
            } if k >= 1 && k + 2 <= self.n => Ok(k),
            _ => Err(Error::Unsupported(format!(
                "{what} needs a type C model with 1 <= k <= n-2 (got {:?}, n={})",
                self.shape, self.n
            ))),
        }
    }

    /// Every label of a complement subset: `B(+i)` for each `i` and `C_ij` for each
    /// ordered `(i, j)`, so that each second-type set appears under both of its
    /// labels `(i, j)` and `(σj, σi)`.
    pub fn complement_labels(&self) -> Vec<Complement> {
        let n = self.n;
        let mut out = Vec::new();
        if self.has_first_type() {
            out.extend((0..2 * n).map(|i| Complement::FirstType { i }));
        }
        if self.has_second_type() {
            for i in 0..2 * n {
                for j in 0..2 * n {
                    if j != i && j != sigma(n, i) {
                        out.push(Complement::SecondType { i, j });
                    }
                }
            }
        }
        out
    }

    /// Complement subsets disjoint from `c`, counted as distinct sets and as labels.
    pub fn count_disjoint_complements(&self, c: Complement) -> Result<DisjointCount> {
        self.require_lemma_range("disjoint-complement counting")?;
        let own = self.members_of(c);
        let distinct_sets = self
            .complements()
            .into_iter()
            .filter(|&d| own.is_disjoint(&self.members_of(d)))
            .count();
        let labelled = self
            .complement_labels()
            .into_iter()
            .filter(|&d| own.is_disjoint(&self.members_of(d)))
            .count();
        Ok(DisjointCount {
            distinct_sets,
            labelled,
        })
    }

    /// Number of complement subsets containing both members.
    pub fn count_complements_containing(
        &self,
        s: &SignedSet,
        u: &SignedSet,
        second_type_only: bool,
    ) -> Result<usize> {
        if s == u {
            return Err(Error::Invalid("pair members must be distinct".into()));
        }
        Ok(self
            .complements()
            .into_iter()
            .filter(|c| !(second_type_only && c.is_first_type()))
            .filter(|&c| self.complement_contains(c, s) && self.complement_contains(c, u))
            .count())
    }

    /// `c(S, U)`: second-type complement subsets containing both.
    pub fn c(&self, s: &SignedSet, u: &SignedSet) -> Result<usize> {
        self.count_complements_containing(s, u, true)
    }

    /// Maximum of `c` over distinct pairs.
    pub fn m_c(&self) -> Result<usize> {
        let comps: Vec<Complement> = self
            .complements()
            .into_iter()
            .filter(|c| !c.is_first_type())
            .collect();
        let mut best = 0;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let (s, u) = (self.elements[a], self.elements[b]);
                let c = comps
                    .iter()
                    .filter(|&&c| {
                        self.complement_contains(c, &s) && self.complement_contains(c, &u)
                    })
                    .count();
                best = best.max(c);
            }
        }
        Ok(best)
    }

    pub fn collinear_by_count(&self, s: &SignedSet, u: &SignedSet, m_c: usize) -> Result<bool> {
        Ok(self.c(s, u)? == m_c)
    }

    /// Intersection of the first-type maximal inexact subsets `B(-i)`, `i ∈ indices`.
    pub fn first_type_intersection(&self, indices: &[usize]) -> FixedBitSet {
        let mut minus = 0u32;
        for &i in indices {
            minus |= 1 << i;
        }
        self.filter(|t| t.0 & minus == 0)
    }

    /// Classifies the intersection of `2n - k - 2` distinct first-type maximal
    /// inexact subsets `B(-i)`.
    pub fn first_type_intersection_classify(&self, indices: &[usize]) -> Result<IntersectionShape> {
        let k = self.require_lemma_range("first-type intersection")?;
        let want = 2 * self.n - k - 2;
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != indices.len()
            || sorted.len() != want
            || sorted.iter().any(|&i| i >= 2 * self.n)
        {
            return Err(Error::Invalid(format!(
                "expected {want} distinct indices below {}, got {indices:?}",
                2 * self.n
            )));
        }
        let members: Vec<usize> = self.first_type_intersection(indices).ones().collect();
        let all_collinear = |m: &[usize]| {
            m.iter().enumerate().all(|(x, &a)| {
                m[x + 1..]
                    .iter()
                    .all(|&b| self.model_collinear(&self.elements[a], &self.elements[b]))
            })
        };
        if members.len() == k + 2 && all_collinear(&members) {
            return Ok(IntersectionShape::Pencil(members));
        }
        if let [a, b] = members[..] {
            let (s, u) = (self.elements[a], self.elements[b]);
            if self.model_weak_adjacent(&s, &u) && !self.model_collinear(&s, &u) {
                return Ok(IntersectionShape::WeakPair(a, b));
            }
        }
        Err(Error::Structural(format!(
            "intersection of B(-i) for i in {indices:?} has {} members of unexpected shape",
            members.len()
        )))
    }

    /// Number of half-spin complement subsets `B(+i,+σj)` containing both members.
    pub fn halfspin_count_containing(&self, s: &SignedSet, u: &SignedSet) -> Result<usize> {
        if !self.is_halfspin() {
            return Err(Error::Unsupported(
                "half-spin counting on a Grassmann model".into(),
            ));
        }
        self.count_complements_containing(s, u, false)
    }

    /// Member counts of the complement types that exist in this model.
    pub fn complement_sizes(&self) -> ComplementSizes {
        let comps = self.complements();
        let size_of = |first: bool| {
            comps
                .iter()
                .find(|c| c.is_first_type() == first)
                .map(|&c| self.members_of(c).count_ones(..))
        };
        ComplementSizes {
            first: size_of(true),
            second: size_of(false),
        }
    }
}

/// `2^{k+1} · C(n, k+1)`.
pub fn base_subset_size(n: usize, k: usize) -> usize {
    (1usize << (k + 1)) * binomial(n, k + 1)
}

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use FormKind::{HyperbolicD as D, SymplecticC as C};

    fn set(ix: &[usize]) -> SignedSet {
        SignedSet::from_indices(ix)
    }

    #[test]
    fn model_sizes() {
        assert_eq!(ApartmentModel::grassmann(3, 1, C).unwrap().len(), 12);
        assert_eq!(ApartmentModel::grassmann(4, 1, C).unwrap().len(), 24);
        assert_eq!(ApartmentModel::grassmann(4, 3, D).unwrap().len(), 16);
        assert_eq!(ApartmentModel::halfspin(4, Delta::Plus).unwrap().len(), 8);
        assert_eq!(ApartmentModel::halfspin(4, Delta::Minus).unwrap().len(), 8);
        for n in 3..=6 {
            for k in 0..n {
                assert_eq!(
                    ApartmentModel::grassmann(n, k, C).unwrap().len(),
                    base_subset_size(n, k)
                );
            }
        }
        assert!(ApartmentModel::grassmann(3, 3, C).is_err());
        assert!(ApartmentModel::halfspin(3, Delta::Plus).is_err());
    }

    #[test]
    fn s_i_edge_cases() {
        let m = ApartmentModel::grassmann(3, 1, C).unwrap();
        let full = m.full();
        for i in 0..6 {
            assert_eq!(m.s_i(&full, i), Some(set(&[i])));
            assert_eq!(m.s_i(&m.empty_set(), i), None);
        }
        let r = m.select(&[Sign::Plus(0), Sign::Plus(1)]);
        let s0 = m.s_i(&r, 0).unwrap();
        assert!(s0.contains(0) && s0.contains(1));
    }

    #[test]
    fn select_identities() {
        for (n, k, kind) in [(3, 1, C), (4, 2, D), (4, 3, C), (5, 4, D)] {
            let m = ApartmentModel::grassmann(n, k, kind).unwrap();
            for i in 0..2 * n {
                let si = m.sigma(i);
                assert_eq!(
                    m.select(&[Sign::Plus(i)]),
                    m.select(&[Sign::Plus(i), Sign::Minus(si)])
                );
                if k + 1 == n {
                    assert_eq!(m.select(&[Sign::Plus(i)]), m.select(&[Sign::Minus(si)]));
                }
            }
        }
        let h = ApartmentModel::halfspin(5, Delta::Minus).unwrap();
        for i in 0..10 {
            let si = h.sigma(i);
            assert_eq!(h.select(&[Sign::Minus(i)]), h.select(&[Sign::Plus(si)]));
            assert_eq!(
                h.select(&[Sign::Minus(i)]),
                h.select(&[Sign::Minus(i), Sign::Plus(si)])
            );
        }
    }

    #[test]
    fn maximal_inexact_inventory() {
        let m = ApartmentModel::grassmann(3, 1, C).unwrap();
        let d = m.maximal_inexact();
        assert_eq!(d.iter().filter(|x| x.is_first_type()).count(), 6);
        assert_eq!(d.iter().filter(|x| !x.is_first_type()).count(), 12);

        let m = ApartmentModel::grassmann(4, 1, D).unwrap();
        assert!(m.maximal_inexact().iter().all(|x| !x.is_first_type()));

        let m = ApartmentModel::grassmann(4, 0, C).unwrap();
        assert!(m.maximal_inexact().iter().all(|x| x.is_first_type()));
        assert_eq!(m.maximal_inexact().len(), 8);
    }

    #[test]
    fn second_type_at_top_level_simplifies() {
        for kind in [C, D] {
            let m = ApartmentModel::grassmann(4, 3, kind).unwrap();
            for d in m.maximal_inexact() {
                let MaxInexact::SecondType { i, j } = d else {
                    panic!()
                };
                let mut expect = m.select(&[Sign::Plus(i), Sign::Plus(j)]);
                expect.union_with(&m.select(&[Sign::Minus(i)]));
                assert_eq!(m.members_of_max_inexact(d), expect);
                let c = m.members_of(d.complement());
                let sj = m.sigma(j);
                assert_eq!(c, m.select(&[Sign::Plus(i), Sign::Plus(sj)]));
                assert_eq!(
                    c,
                    m.select(&[
                        Sign::Plus(i),
                        Sign::Plus(sj),
                        Sign::Minus(j),
                        Sign::Minus(m.sigma(i))
                    ])
                );
            }
        }
    }

    #[test]
    fn low_level_complements() {
        let m = ApartmentModel::grassmann(3, 0, C).unwrap();
        for c in m.complements() {
            assert_eq!(m.members_of(c).count_ones(..), 1);
        }
        let m = ApartmentModel::grassmann(3, 0, D).unwrap();
        for c in m.complements() {
            let ms: Vec<usize> = m.members_of(c).ones().collect();
            assert_eq!(ms.len(), 2);
            assert!(m.model_collinear(&m.element(ms[0]), &m.element(ms[1])));
        }
        assert_eq!(m.complements().len(), 2 * 3 * 2);
    }

    #[test]
    fn complement_duality_and_distinctness() {
        let mut models = vec![ApartmentModel::halfspin(5, Delta::Plus).unwrap()];
        for n in 3..=5 {
            for k in 0..n {
                models.push(ApartmentModel::grassmann(n, k, C).unwrap());
                models.push(ApartmentModel::grassmann(n, k, D).unwrap());
            }
        }
        for m in models {
            let mut seen = std::collections::HashSet::new();
            for d in m.maximal_inexact() {
                let mut comp = m.full();
                comp.difference_with(&m.members_of_max_inexact(d));
                assert_eq!(m.members_of(d.complement()), comp, "{:?} {d:?}", m.shape());
                assert!(
                    seen.insert(comp.ones().collect::<Vec<_>>()),
                    "duplicate complement"
                );
            }
        }
    }

    #[test]
    fn exactness_examples() {
        let m = ApartmentModel::grassmann(4, 2, C).unwrap();
        assert!(m.is_exact(&m.full()));
        assert!(!m.is_exact(&m.empty_set()));
        for d in m.maximal_inexact() {
            assert!(!m.is_exact(&m.members_of_max_inexact(d)));
        }
        // B(-i) at the top level is inexact but not maximal
        let m = ApartmentModel::grassmann(4, 3, C).unwrap();
        let r = m.select(&[Sign::Minus(0)]);
        assert!(!m.is_exact(&r));
        assert!(!m
            .maximal_inexact()
            .contains(&MaxInexact::FirstType { i: 0 }));
    }

    #[test]
    fn model_relations() {
        let m = ApartmentModel::grassmann(3, 1, C).unwrap();
        // {1,2} and {1,3} (1-based) become {0,1} and {0,2}
        assert!(m.model_collinear(&set(&[0, 1]), &set(&[0, 2])));
        // {1,2} and {1,σ(2)}
        let s2 = m.sigma(1);
        assert!(!m.model_collinear(&set(&[0, 1]), &set(&[0, s2])));
        assert!(m.model_weak_adjacent(&set(&[0, 1]), &set(&[0, s2])));
        // {1,2} and {3,σ(1)}
        let u = set(&[2, m.sigma(0)]);
        assert!(!m.model_collinear(&set(&[0, 1]), &u));
        assert!(!m.model_weak_adjacent(&set(&[0, 1]), &u));
    }

    #[test]
    fn disjoint_counts_small() {
        let m = ApartmentModel::grassmann(3, 1, C).unwrap();
        let first = m
            .count_disjoint_complements(Complement::FirstType { i: 0 })
            .unwrap();
        assert_eq!((first.labelled, first.distinct_sets), (9, 5));
        let second = m
            .count_disjoint_complements(Complement::SecondType { i: 0, j: 1 })
            .unwrap();
        assert_eq!((second.labelled, second.distinct_sets), (4, 3));
        let m = ApartmentModel::grassmann(4, 2, C).unwrap();
        let first = m
            .count_disjoint_complements(Complement::FirstType { i: 3 })
            .unwrap();
        assert_eq!((first.labelled, first.distinct_sets), (13, 7));
        let d = ApartmentModel::grassmann(4, 2, D).unwrap();
        assert!(d
            .count_disjoint_complements(Complement::FirstType { i: 3 })
            .is_err());
    }

    #[test]
    fn m_c_value() {
        let m = ApartmentModel::grassmann(4, 1, C).unwrap();
        assert_eq!(m.m_c().unwrap(), 5);
    }

    #[test]
    fn halfspin_counts() {
        let h4 = ApartmentModel::halfspin(4, Delta::Plus).unwrap();
        let h5 = ApartmentModel::halfspin(5, Delta::Plus).unwrap();
        for (h, expect) in [(&h4, 1), (&h5, 3)] {
            for a in h.elements() {
                for b in h.elements() {
                    if a != b && h.model_collinear(a, b) {
                        assert_eq!(h.halfspin_count_containing(a, b).unwrap(), expect);
                    }
                }
            }
        }
        // opposite pair in n = 4: disjoint index sets
        let a = h4.element(0);
        let opp = a.sigma_image(4);
        assert!(h4.position(&opp).is_some());
        assert_eq!(h4.halfspin_count_containing(&a, &opp).unwrap(), 0);
        assert!(h4.halfspin_count_containing(&a, &a).is_err());
    }

    #[test]
    fn classify_errors() {
        let m = ApartmentModel::grassmann(3, 1, C).unwrap();
        assert!(m.first_type_intersection_classify(&[0, 1]).is_err());
        assert!(m.first_type_intersection_classify(&[0, 0, 1]).is_err());
        let d = ApartmentModel::grassmann(3, 1, D).unwrap();
        assert!(d.first_type_intersection_classify(&[0, 1, 2]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(2, 2), 1);
        assert_eq!(binomial(1, 2), 0);
        assert_eq!(base_subset_size(3, 1), 12);
        assert_eq!(base_subset_size(4, 3), 16);
    }
}
