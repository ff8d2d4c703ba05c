//! Brute-force ground truth in concrete spaces: frames through a given set of
//! singular subspaces, and maximal inexact subsets read off a full frame family.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Subspace;
use crate::frames::{base_subset_with, dedup_frames, enumerate_frames, Frame};
use crate::model::{ApartmentModel, MaxInexact};
use crate::polar::{FormKind, FormSpec, PolarSpace};

/// Largest frame count accepted for full enumeration.
pub const FULL_FAMILY_LIMIT: u128 = 100_000;

/// Order of the isometry group of the form.
pub fn group_order(spec: FormSpec) -> u128 {
    let q = spec.p as u128;
    let n = spec.n as u32;
    match spec.kind {
        FormKind::SymplecticC => q.pow(n * n) * (1..=n).map(|i| q.pow(2 * i) - 1).product::<u128>(),
        FormKind::HyperbolicD => {
            2 * q.pow(n * (n - 1))
                * (q.pow(n) - 1)
                * (1..n).map(|i| q.pow(2 * i) - 1).product::<u128>()
        }
    }
}

/// Number of frames: the group acts transitively with frame stabilizer of
/// order `n! 2^n (q-1)^n`.
pub fn expected_frame_count(spec: FormSpec) -> u128 {
    let n = spec.n as u32;
    let q = spec.p as u128;
    let stab = (1..=n as u128).product::<u128>() * 2u128.pow(n) * (q - 1).pow(n);
    group_order(spec) / stab
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyMode {
    Full,
    Constrained,
}

pub struct FrameFamily<'a> {
    space: &'a PolarSpace,
    mode: FamilyMode,
    frames: Vec<Frame>,
}

impl<'a> FrameFamily<'a> {
    /// Every frame of the space, certified against the group-order count.
    pub fn full(space: &'a PolarSpace) -> Result<Self> {
        let expected = expected_frame_count(space.spec());
        if expected > FULL_FAMILY_LIMIT {
            return Err(Error::Unsupported(format!(
                "{} has {expected} frames; full enumeration is refused",
                space.spec()
            )));
        }
        let frames = enumerate_frames(space);
        if frames.len() as u128 != expected {
            return Err(Error::Structural(format!(
                "enumerated {} frames, group order predicts {expected}",
                frames.len()
            )));
        }
        Ok(FrameFamily {
            space,
            mode: FamilyMode::Full,
            frames,
        })
    }

    pub fn from_frames(space: &'a PolarSpace, frames: Vec<Frame>) -> Self {
        FrameFamily {
            space,
            mode: FamilyMode::Constrained,
            frames: dedup_frames(frames),
        }
    }

    pub fn space(&self) -> &'a PolarSpace {
        self.space
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Base subsets of every frame at level `k`, as element ids of the sorted Grassmannian.
    pub fn level(&self, k: usize) -> Result<LevelFamily> {
        let model = ApartmentModel::grassmann(self.space.rank(), k, self.space.kind())?;
        let element_count = self.space.grassmannian(k)?.len();
        let members: Vec<Vec<u32>> = self
            .frames
            .par_iter()
            .map(|f| {
                let bs = base_subset_with(self.space, f, &model)?;
                Ok(bs
                    .element_ids(self.space)?
                    .into_iter()
                    .map(|x| x as u32)
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut by_element = vec![Vec::new(); element_count];
        for (fi, ms) in members.iter().enumerate() {
            for &m in ms {
                by_element[m as usize].push(fi as u32);
            }
        }
        Ok(LevelFamily {
            k,
            mode: self.mode,
            model,
            members,
            by_element,
        })
    }
}

/// Base subsets of a frame family at one level.
pub struct LevelFamily {
    k: usize,
    mode: FamilyMode,
    model: ApartmentModel,
    members: Vec<Vec<u32>>,
    by_element: Vec<Vec<u32>>,
}

impl LevelFamily {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn model(&self) -> &ApartmentModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.by_element.len()
    }

    /// Element ids of base subset `f`, in model order.
    pub fn members(&self, f: usize) -> &[u32] {
        &self.members[f]
    }

    /// Frames whose base subset contains the element, ascending.
    pub fn frames_with(&self, element: usize) -> &[u32] {
        &self.by_element[element]
    }

    /// First frame (in family order) whose base subset contains both elements.
    pub fn first_common(&self, a: usize, b: usize) -> Option<usize> {
        let (x, y) = (&self.by_element[a], &self.by_element[b]);
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(x[i] as usize),
            }
        }
        None
    }

    /// Maximal elements of `{𝓑_f ∩ 𝓑' : 𝓑' ≠ 𝓑_f}` as masks over member positions of `f`.
    pub fn maximal_intersections(&self, f: usize) -> Result<Vec<u32>> {
        self.maximal_intersections_with(f, &mut Scratch::default())
    }

    /// Same, reusing per-thread buffers.
    pub fn maximal_intersections_with(&self, f: usize, scratch: &mut Scratch) -> Result<Vec<u32>> {
        if self.mode != FamilyMode::Full {
            return Err(Error::Unsupported(
                "maximal inexact subsets need the full frame family".into(),
            ));
        }
        let ms = &self.members[f];
        if ms.len() > 20 {
            return Err(Error::Unsupported("base subsets above 20 members".into()));
        }
        scratch.acc.resize(self.members.len(), 0);
        scratch.touched.clear();
        for (pos, &m) in ms.iter().enumerate() {
            for &g in &self.by_element[m as usize] {
                let slot = &mut scratch.acc[g as usize];
                if *slot == 0 {
                    scratch.touched.push(g);
                }
                *slot |= 1 << pos;
            }
        }
        scratch.seen.clear();
        scratch.seen.resize(1 << ms.len(), false);
        let mut masks = Vec::new();
        for &g in &scratch.touched {
            let m = std::mem::take(&mut scratch.acc[g as usize]);
            if g as usize != f && !scratch.seen[m as usize] {
                scratch.seen[m as usize] = true;
                masks.push(m);
            }
        }
        Ok(maximal_masks(masks))
    }
}

/// Reusable buffers for [`LevelFamily::maximal_intersections_with`].
#[derive(Default)]
pub struct Scratch {
    acc: Vec<u32>,
    touched: Vec<u32>,
    seen: Vec<bool>,
}

/// Inclusion-maximal masks, distinct, sorted ascending.
pub fn maximal_masks(mut masks: Vec<u32>) -> Vec<u32> {
    masks.sort_unstable();
    masks.dedup();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut kept: Vec<u32> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & m == m) {
            kept.push(m);
        }
    }
    kept.sort_unstable();
    kept
}

pub fn mask_to_set(mask: u32, len: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(len);
    for i in 0..len {
        if mask >> i & 1 == 1 {
            s.insert(i);
        }
    }
    s
}

pub fn set_to_mask(set: &FixedBitSet) -> u32 {
    set.ones().fold(0, |m, i| m | 1 << i)
}

/// Brute-force maximal inexact subsets of base subset `f`, over member positions.
pub fn brute_maximal_inexact(level: &LevelFamily, f: usize) -> Result<Vec<FixedBitSet>> {
    let len = level.members(f).len();
    Ok(level
        .maximal_intersections(f)?
        .into_iter()
        .map(|m| mask_to_set(m, len))
        .collect())
}

/// Descriptor members as masks, sorted by mask.
/// Descriptor member sets, for models of any size.
pub fn descriptor_sets(model: &ApartmentModel) -> Vec<(MaxInexact, FixedBitSet)> {
    model
        .maximal_inexact()
        .into_iter()
        .map(|d| (d, model.members_of_max_inexact(d)))
        .collect()
}

/// Descriptor masks sorted by mask. Only for models with at most 32 members.
pub fn descriptor_masks(model: &ApartmentModel) -> Vec<(MaxInexact, u32)> {
    assert!(model.len() <= 32, "mask form needs at most 32 members");
    let mut out: Vec<(MaxInexact, u32)> = model
        .maximal_inexact()
        .into_iter()
        .map(|d| (d, set_to_mask(&model.members_of_max_inexact(d))))
        .collect();
    out.sort_by_key(|x| x.1);
    out
}

/// Frames whose base subset contains every member of `r`, stopping at `limit`.
///
/// Members are served most-constrained first; each gets exactly `k+1` frame
/// points chosen inside it in increasing order, so every frame is reached
/// along one path only. The partial point set is then completed: unpaired
/// points get partners, and remaining pairs are listed by their smaller point.
pub fn frames_containing(space: &PolarSpace, r: &[Subspace], limit: usize) -> Result<Vec<Frame>> {
    let k1 = match r.first() {
        Some(x) => x.rank(),
        None => 0,
    };
    for x in r {
        if x.rank() != k1 || k1 == 0 {
            return Err(Error::Invalid(
                "members must be nonzero and of equal dimension".into(),
            ));
        }
        if !space.is_totally_singular(x) {
            return Err(Error::Invalid("members must be singular".into()));
        }
    }
    let mut uniq: Vec<&Subspace> = r.iter().collect();
    uniq.sort();
    uniq.dedup();
    let member_points: Vec<Vec<usize>> = uniq.iter().map(|x| space.points_in(x)).collect();
    let mut search = Search {
        space,
        n: space.rank(),
        k1,
        limit,
        member_points,
        chosen: Vec::new(),
        partner: Vec::new(),
        spans: vec![Subspace::zero(space.ambient().dim())],
        out: Vec::new(),
        seen: HashSet::new(),
    };
    if limit > 0 {
        search.serve_members();
    }
    Ok(search.out)
}

struct Search<'a> {
    space: &'a PolarSpace,
    n: usize,
    k1: usize,
    limit: usize,
    member_points: Vec<Vec<usize>>,
    chosen: Vec<usize>,
    partner: Vec<Option<usize>>,
    spans: Vec<Subspace>,
    out: Vec<Frame>,
    seen: HashSet<Vec<usize>>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.out.len() >= self.limit
    }

    /// Index in `chosen` of the unique non-perp partner, `Err` if `x` cannot join.
    fn admissible(&self, x: usize) -> std::result::Result<Option<usize>, ()> {
        if self.chosen.contains(&x) {
            return Err(());
        }
        let mut hit = None;
        for (idx, &y) in self.chosen.iter().enumerate() {
            if !self.space.perp(x, y) {
                if hit.is_some() || self.partner[idx].is_some() {
                    return Err(());
                }
                hit = Some(idx);
            }
        }
        let span = self.spans.last().expect("span stack is never empty");
        if self
            .space
            .ambient()
            .contains_vector(span, self.space.point(x))
        {
            return Err(());
        }
        Ok(hit)
    }

    fn push(&mut self, x: usize, hit: Option<usize>) {
        let me = self.chosen.len();
        self.chosen.push(x);
        self.partner.push(hit);
        if let Some(h) = hit {
            self.partner[h] = Some(me);
        }
        let amb = self.space.ambient();
        let span = self.spans.last().expect("span stack is never empty");
        let next = amb.sum_unchecked(span, &self.space.point_subspace(x));
        self.spans.push(next);
    }

    fn pop(&mut self) {
        self.chosen.pop();
        if let Some(Some(h)) = self.partner.pop() {
            self.partner[h] = None;
        }
        self.spans.pop();
    }

    fn serve_members(&mut self) {
        if self.done() {
            return;
        }
        let mut best: Option<(usize, usize)> = None;
        for (mi, pts) in self.member_points.iter().enumerate() {
            let have = pts.iter().filter(|p| self.chosen.contains(p)).count();
            if have > self.k1 {
                return;
            }
            if have < self.k1 && best.is_none_or(|(_, h)| have > h) {
                best = Some((mi, have));
            }
        }
        match best {
            None => self.partner_singles(),
            Some((mi, have)) => self.fill(mi, self.k1 - have, 0),
        }
    }

    fn fill(&mut self, mi: usize, need: usize, start: usize) {
        let pts = self.member_points[mi].clone();
        for pos in start..pts.len() {
            if self.done() {
                return;
            }
            let x = pts[pos];
            if let Ok(hit) = self.admissible(x) {
                self.push(x, hit);
                if need == 1 {
                    self.serve_members();
                } else {
                    self.fill(mi, need - 1, pos + 1);
                }
                self.pop();
            }
        }
    }

    fn partner_singles(&mut self) {
        if self.done() {
            return;
        }
        let Some(w) = (0..self.chosen.len()).find(|&i| self.partner[i].is_none()) else {
            let pairs: Vec<(usize, usize)> = (0..self.chosen.len())
                .filter_map(|i| {
                    let j = self.partner[i]?;
                    (i < j).then(|| (self.chosen[i], self.chosen[j]))
                })
                .collect();
            let allowed = self.space.perp_set(&self.chosen);
            let mut pairs = pairs;
            self.extra_pairs(&allowed, 0, &mut pairs);
            return;
        };
        let wp = self.chosen[w];
        for z in 0..self.space.point_count() {
            if self.done() {
                return;
            }
            if self.space.perp(wp, z) {
                continue;
            }
            if let Ok(Some(hit)) = self.admissible(z) {
                debug_assert_eq!(hit, w);
                self.push(z, Some(hit));
                self.partner_singles();
                self.pop();
            }
        }
    }

    fn extra_pairs(
        &mut self,
        allowed: &FixedBitSet,
        above: usize,
        pairs: &mut Vec<(usize, usize)>,
    ) {
        if self.done() {
            return;
        }
        if pairs.len() == self.n {
            let mut pts: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            pts.extend(pairs.iter().map(|p| p.1));
            let f = Frame::new(self.space, pts).expect("search keeps the frame pattern");
            if self.seen.insert(f.key().to_vec()) {
                self.out.push(f);
            }
            return;
        }
        for a in allowed.ones().filter(|&a| a >= above) {
            for b in allowed.ones().filter(|&b| b > a) {
                if self.space.perp(a, b) {
                    continue;
                }
                let mut next = allowed.clone();
                next.intersect_with(self.space.perp_row(a));
                next.intersect_with(self.space.perp_row(b));
                pairs.push((a, b));
                self.extra_pairs(&next, a + 1, pairs);
                pairs.pop();
                if self.done() {
                    return;
                }
            }
        }
    }
}

/// Exactness by search: `R` is exact iff exactly one frame's base subset contains it.
pub fn is_exact_by_search(space: &PolarSpace, r: &[Subspace]) -> Result<bool> {
    Ok(frames_containing(space, r, 2)?.len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{base_subset, find_frame};
    use crate::model::Sign;

    #[test]
    fn group_order_cross_checks() {
        assert_eq!(expected_frame_count(FormSpec::symplectic(3, 2)), 30240);
        assert_eq!(expected_frame_count(FormSpec::hyperbolic(3, 2)), 840);
        assert_eq!(group_order(FormSpec::symplectic(3, 2)), 1451520);
    }

    #[test]
    fn full_base_subset_is_exact() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&s, Some(11));
        let bs = base_subset(&s, &f, 2).unwrap();
        let found = frames_containing(&s, bs.members(), 5).unwrap();
        assert_eq!(found, vec![f]);
    }

    #[test]
    fn minus_i_exactness_depends_on_type() {
        let c = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&c, Some(12));
        let bs = base_subset(&c, &f, 1).unwrap();
        let r: Vec<Subspace> = bs
            .select(&[Sign::Minus(0)])
            .ones()
            .map(|i| bs.members()[i].clone())
            .collect();
        assert!(frames_containing(&c, &r, 2).unwrap().len() >= 2);

        let d = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
        let f = find_frame(&d, Some(12));
        let bs = base_subset(&d, &f, 1).unwrap();
        let r: Vec<Subspace> = bs
            .select(&[Sign::Minus(0)])
            .ones()
            .map(|i| bs.members()[i].clone())
            .collect();
        assert_eq!(frames_containing(&d, &r, 2).unwrap().len(), 1);
    }

    #[test]
    fn empty_request_finds_frames() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        assert_eq!(frames_containing(&s, &[], 3).unwrap().len(), 3);
        assert_eq!(frames_containing(&s, &[], 0).unwrap().len(), 0);
    }

    #[test]
    fn search_count_matches_family_count() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let family = FrameFamily::full(&s).unwrap();
        let level = family.level(1).unwrap();
        let g = s.grassmannian(1).unwrap();
        for e in [0usize, 100, 200] {
            let r = vec![g[e].subspace().clone()];
            let found = frames_containing(&s, &r, usize::MAX).unwrap();
            assert_eq!(found.len(), level.frames_with(e).len());
        }
    }

    #[test]
    fn brute_force_matches_descriptors() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let family = FrameFamily::full(&s).unwrap();
        for k in 0..3 {
            let level = family.level(k).unwrap();
            let want: Vec<u32> = descriptor_masks(level.model())
                .into_iter()
                .map(|x| x.1)
                .collect();
            for f in [0, 777, 29999] {
                assert_eq!(level.maximal_intersections(f).unwrap(), want, "k={k}");
            }
        }
    }
}
