//! Frames (bases of the polar space) and the base subsets they span.

use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use fixedbitset::FixedBitSet;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Subspace, Vector};
use crate::grassmann::OrbitSplit;
use crate::model::{sigma, ApartmentModel, Delta, Sign, SignedSet};
use crate::polar::{FormKind, PolarSpace};

/// A base `p_0, …, p_{2n-1}` of the polar space; `p_i` is non-collinear
/// exactly with `p_{σ(i)}`, `σ(i) = (i + n) mod 2n`.
///
/// Equality and hashing ignore the ordering of the points.
#[derive(Clone, Debug)]
pub struct Frame {
    n: usize,
    points: Vec<usize>,
    key: Vec<usize>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Frame {}

impl Hash for Frame {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl Frame {
    /// Validates the collinearity pattern of an ordered list of point indices.
    pub fn new(space: &PolarSpace, points: Vec<usize>) -> Result<Self> {
        let n = space.rank();
        if points.len() != 2 * n {
            return Err(Error::Invalid(format!(
                "a frame has {} points, got {}",
                2 * n,
                points.len()
            )));
        }
        if points.iter().any(|&p| p >= space.point_count()) {
            return Err(Error::Invalid("frame point index out of range".into()));
        }
        for i in 0..2 * n {
            for j in 0..2 * n {
                if i == j {
                    continue;
                }
                let expect_perp = j != sigma(n, i);
                if space.perp(points[i], points[j]) != expect_perp || points[i] == points[j] {
                    return Err(Error::Invalid(format!(
                        "points {i} and {j} break the frame pattern"
                    )));
                }
            }
        }
        Ok(Self::from_checked(n, points))
    }

    fn from_checked(n: usize, points: Vec<usize>) -> Self {
        let mut key = points.clone();
        key.sort_unstable();
        Frame { n, points, key }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn point(&self, i: usize) -> usize {
        self.points[i]
    }

    pub fn sigma(&self, i: usize) -> usize {
        sigma(self.n, i)
    }

    /// Sorted point indices; determines the frame.
    pub fn key(&self) -> &[usize] {
        &self.key
    }

    pub fn position(&self, point: usize) -> Option<usize> {
        self.points.iter().position(|&p| p == point)
    }

    /// Span of the frame points with the given frame indices.
    pub fn span(&self, space: &PolarSpace, t: &SignedSet) -> Subspace {
        let pts: Vec<usize> = t.indices().map(|i| self.points[i]).collect();
        space.span_points(&pts)
    }

    pub fn to_json(&self, space: &PolarSpace) -> FrameJson {
        FrameJson {
            points: self
                .points
                .iter()
                .map(|&p| space.point(p).to_string())
                .collect(),
            sigma: "i<->i+n".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameJson {
    pub points: Vec<String>,
    pub sigma: String,
}

/// A frame found by Witt-style descent: pick a point in the perp of the pairs
/// chosen so far, then a non-collinear partner in the same perp.
///
/// With `seed = None` the least candidates are taken.
pub fn find_frame(space: &PolarSpace, seed: Option<u64>) -> Frame {
    let n = space.rank();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut allowed = space.perp_set(&[]);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for _ in 0..n {
        let cands: Vec<usize> = allowed.ones().collect();
        let a = pick(&cands, rng.as_mut());
        let partners: Vec<usize> = allowed.ones().filter(|&b| !space.perp(a, b)).collect();
        let b = pick(&partners, rng.as_mut());
        allowed.intersect_with(space.perp_row(a));
        allowed.intersect_with(space.perp_row(b));
        lo.push(a);
        hi.push(b);
    }
    lo.extend(hi);
    Frame::from_checked(n, lo)
}

fn pick(cands: &[usize], rng: Option<&mut ChaCha8Rng>) -> usize {
    match rng {
        Some(r) => *cands
            .choose(r)
            .expect("nondegenerate perp always has candidates"),
        None => cands[0],
    }
}

/// Every frame of the space, each exactly once, in canonical order.
///
/// Pairs are listed by their smaller point, with those minima increasing; the
/// search is split over the first pair across threads.
pub fn enumerate_frames(space: &PolarSpace) -> Vec<Frame> {
    let n = space.rank();
    let npts = space.point_count();
    let firsts: Vec<(usize, usize)> = (0..npts)
        .flat_map(|a| {
            (a + 1..npts)
                .filter(move |&b| !space.perp(a, b))
                .map(move |b| (a, b))
        })
        .collect();
    let mut frames: Vec<Frame> = firsts
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let mut allowed = space.perp_set(&[a, b]);
            restrict_above(&mut allowed, a);
            let mut out = Vec::new();
            let mut pairs = vec![(a, b)];
            extend_pairs(space, n, &allowed, &mut pairs, &mut out);
            out
        })
        .collect();
    frames.sort_by(|x, y| x.key.cmp(&y.key));
    frames
}

fn restrict_above(set: &mut FixedBitSet, a: usize) {
    set.remove_range(..a + 1);
}

fn extend_pairs(
    space: &PolarSpace,
    n: usize,
    allowed: &FixedBitSet,
    pairs: &mut Vec<(usize, usize)>,
    out: &mut Vec<Frame>,
) {
    if pairs.len() == n {
        let mut pts: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        pts.extend(pairs.iter().map(|p| p.1));
        out.push(Frame::from_checked(n, pts));
        return;
    }
    for a in allowed.ones() {
        let mut after_a = allowed.clone();
        restrict_above(&mut after_a, a);
        for b in after_a.ones() {
            if space.perp(a, b) {
                continue;
            }
            let mut next = after_a.clone();
            next.intersect_with(space.perp_row(a));
            next.intersect_with(space.perp_row(b));
            pairs.push((a, b));
            extend_pairs(space, n, &next, pairs, out);
            pairs.pop();
        }
    }
}

/// A frame whose base subset at the common level contains both `s` and `u`.
///
/// `S ∩ U^⊥` and `U ∩ S^⊥` together span a totally singular subspace `W`
/// orthogonal to `S + U`; the remaining parts of `S` and `U` are put in dual
/// position and become hyperbolic pairs. A basis of `W` adapted to `S ∩ U`
/// is then given partners, and the rest of the frame is completed by descent.
/// Every choice takes the least admissible witness, so the result is deterministic.
pub fn common_frame(space: &PolarSpace, s: &Subspace, u: &Subspace) -> Result<Frame> {
    if s.rank() != u.rank() {
        return Err(Error::Invalid("subspaces of different dimensions".into()));
    }
    if !space.is_totally_singular(s) || !space.is_totally_singular(u) {
        return Err(Error::Invalid(
            "common frames need singular subspaces".into(),
        ));
    }
    let amb = space.ambient();
    let f = space.field();
    let b = |x: &Vector, y: &Vector| space.bilinear(x, y);

    let s0 = amb.intersect_unchecked(s, &space.perp_subspace(u));
    let u0 = amb.intersect_unchecked(u, &space.perp_subspace(s));
    let d = amb.intersect_unchecked(s, u);

    // Dual bases of the parts of S and U that pair nondegenerately.
    let mut s1 = complement_basis(space, &s0, s);
    let mut u1 = complement_basis(space, &u0, u);
    let mut chosen: Vec<(Vector, Vector)> = Vec::new();
    while let Some(x) = (!s1.is_empty()).then(|| s1.remove(0)) {
        let pos = u1
            .iter()
            .position(|y| b(&x, y) != 0)
            .ok_or_else(|| Error::Structural("degenerate pairing between S and U".into()))?;
        let y0 = u1.remove(pos);
        let y = y0.scale(f, f.inv(b(&x, &y0)));
        for z in s1.iter_mut() {
            *z = z.axpy(f, f.neg(b(z, &y)), &x);
        }
        for w in u1.iter_mut() {
            *w = w.axpy(f, f.neg(b(&x, w)), &y);
        }
        chosen.push((x, y));
    }

    // Basis of W = S0 + U0 extending a basis of S ∩ U.
    let mut w_basis: Vec<Vector> = d.rows().to_vec();
    w_basis.extend(complement_basis(space, &d, &s0));
    w_basis.extend(complement_basis(space, &d, &u0));

    let mut partners: Vec<Vector> = Vec::new();
    for l in 0..w_basis.len() {
        let mut others: Vec<Vector> = chosen.iter().flat_map(|(x, y)| [*x, *y]).collect();
        others.extend(
            w_basis
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != l)
                .map(|(_, v)| *v),
        );
        others.extend(partners.iter().copied());
        let constraint = space.perp_subspace(&amb.span_of(&others));
        let wl = w_basis[l];
        let y = space
            .points()
            .iter()
            .find(|p| amb.contains_vector(&constraint, p) && b(&wl, p) != 0)
            .copied()
            .ok_or_else(|| Error::Structural("no hyperbolic partner found".into()))?;
        partners.push(y);
    }

    let to_point = |v: &Vector| {
        space
            .point_index(v)
            .ok_or_else(|| Error::Structural("frame vector is not a point of the space".into()))
    };
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for (x, y) in &chosen {
        lo.push(to_point(x)?);
        hi.push(to_point(y)?);
    }
    for (w, y) in w_basis.iter().zip(&partners) {
        lo.push(to_point(w)?);
        hi.push(to_point(y)?);
    }
    let mut used: Vec<usize> = lo.iter().chain(&hi).copied().collect();
    let mut allowed = space.perp_set(&used);
    while lo.len() < space.rank() {
        let a = allowed
            .ones()
            .next()
            .ok_or_else(|| Error::Structural("descent ran dry".into()))?;
        let bb = allowed
            .ones()
            .find(|&c| !space.perp(a, c))
            .ok_or_else(|| Error::Structural("descent ran dry".into()))?;
        allowed.intersect_with(space.perp_row(a));
        allowed.intersect_with(space.perp_row(bb));
        used.extend([a, bb]);
        lo.push(a);
        hi.push(bb);
    }
    lo.extend(hi);
    Frame::new(space, lo)
}

/// Rows of `outer` (after reduction) completing a basis of `inner` to one of `outer`.
fn complement_basis(space: &PolarSpace, inner: &Subspace, outer: &Subspace) -> Vec<Vector> {
    let amb = space.ambient();
    let mut acc = inner.clone();
    let mut out = Vec::new();
    for r in outer.rows() {
        if !amb.contains_vector(&acc, r) {
            out.push(*r);
            acc = amb.sum_unchecked(&acc, &amb.span_of(std::slice::from_ref(r)));
        }
    }
    out
}

/// Members of a frame's base subset at level `k`, aligned with the signed-subset model.
#[derive(Clone, Debug)]
pub struct BaseSubset {
    frame: Frame,
    k: usize,
    members: Vec<Subspace>,
    signed: Vec<SignedSet>,
}

impl BaseSubset {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    /// Index map: member position ↔ index set in the frame.
    pub fn signed(&self) -> &[SignedSet] {
        &self.signed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, s: &Subspace) -> Option<usize> {
        self.members.iter().position(|m| m == s)
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.position(s).is_some()
    }

    /// Member positions satisfying every `±i` constraint.
    pub fn select(&self, signs: &[Sign]) -> FixedBitSet {
        select_masks(&self.signed, signs)
    }

    /// Positions of the members inside the top Grassmannian / any sorted level.
    pub fn element_ids(&self, space: &PolarSpace) -> Result<Vec<usize>> {
        let level = space.grassmannian(self.k)?;
        self.members
            .iter()
            .map(|m| {
                level
                    .binary_search_by(|e| e.subspace().cmp(m))
                    .map_err(|_| Error::Structural("base subset member is not singular".into()))
            })
            .collect()
    }
}

fn select_masks(signed: &[SignedSet], signs: &[Sign]) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(signed.len());
    for (idx, t) in signed.iter().enumerate() {
        let ok = signs.iter().all(|s| match *s {
            Sign::Plus(i) => t.contains(i),
            Sign::Minus(i) => !t.contains(i),
        });
        if ok {
            out.insert(idx);
        }
    }
    out
}

/// All `k`-dimensional singular subspaces spanned by points of `frame`.
pub fn base_subset(space: &PolarSpace, frame: &Frame, k: usize) -> Result<BaseSubset> {
    let model = ApartmentModel::grassmann(space.rank(), k, space.kind())?;
    base_subset_with(space, frame, &model)
}

/// Same as [`base_subset`] but reuses a prepared model of matching shape.
pub fn base_subset_with(
    space: &PolarSpace,
    frame: &Frame,
    model: &ApartmentModel,
) -> Result<BaseSubset> {
    if model.n() != space.rank() || frame.n() != space.rank() {
        return Err(Error::Invalid("model, frame and space ranks differ".into()));
    }
    let members = model
        .elements()
        .iter()
        .map(|t| frame.span(space, t))
        .collect();
    Ok(BaseSubset {
        frame: frame.clone(),
        k: model.k(),
        members,
        signed: model.elements().to_vec(),
    })
}

/// Intersection of a top-level base subset with one class of generators.
#[derive(Clone, Debug)]
pub struct HalfSpinBaseSubset {
    frame: Frame,
    delta: Delta,
    /// Parity class of the index sets in the model (see [`crate::model::ModelShape`]).
    model_parity: Delta,
    members: Vec<Subspace>,
    generator_ids: Vec<usize>,
    signed: Vec<SignedSet>,
}

impl HalfSpinBaseSubset {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    pub fn model_parity(&self) -> Delta {
        self.model_parity
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn generator_ids(&self) -> &[usize] {
        &self.generator_ids
    }

    pub fn signed(&self) -> &[SignedSet] {
        &self.signed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn select(&self, signs: &[Sign]) -> FixedBitSet {
        select_masks(&self.signed, signs)
    }
}

pub fn base_subset_halfspin(
    space: &PolarSpace,
    split: &OrbitSplit,
    frame: &Frame,
    delta: Delta,
) -> Result<HalfSpinBaseSubset> {
    if space.kind() != FormKind::HyperbolicD || space.rank() < 4 {
        return Err(Error::Unsupported(
            "half-spin base subsets need type D, n >= 4".into(),
        ));
    }
    let n = space.rank();
    let top = base_subset(space, frame, n - 1)?;
    let ids = top.element_ids(space)?;
    let mut members = Vec::new();
    let mut generator_ids = Vec::new();
    let mut signed = Vec::new();
    for ((m, id), t) in top.members.iter().zip(&ids).zip(&top.signed) {
        if split.labels[*id] == delta {
            members.push(m.clone());
            generator_ids.push(*id);
            signed.push(*t);
        }
    }
    let upper = ((1u32 << n) - 1) << n;
    let parity = |t: &SignedSet| {
        if (t.mask() & upper).count_ones().is_multiple_of(2) {
            Delta::Plus
        } else {
            Delta::Minus
        }
    };
    let model_parity = signed
        .first()
        .map(parity)
        .ok_or_else(|| Error::Structural("empty half-spin base subset".into()))?;
    if signed.iter().any(|t| parity(t) != model_parity) {
        return Err(Error::Structural(
            "half-spin base subset mixes parity classes".into(),
        ));
    }
    // Reorder to the model's element order so positions line up with it.
    let model = ApartmentModel::halfspin(n, model_parity)?;
    let mut order: Vec<usize> = (0..signed.len()).collect();
    order.sort_by_key(|&i| model.position(&signed[i]));
    Ok(HalfSpinBaseSubset {
        frame: frame.clone(),
        delta,
        model_parity,
        members: order.iter().map(|&i| members[i].clone()).collect(),
        generator_ids: order.iter().map(|&i| generator_ids[i]).collect(),
        signed: order.iter().map(|&i| signed[i]).collect(),
    })
}

/// Distinct frames in `frames`, preserving first occurrences.
pub fn dedup_frames(frames: Vec<Frame>) -> Vec<Frame> {
    let mut seen = HashSet::new();
    frames
        .into_iter()
        .filter(|f| seen.insert(f.key.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::FormSpec;

    #[test]
    fn found_frames_are_valid() {
        for spec in [
            FormSpec::symplectic(3, 2),
            FormSpec::hyperbolic(4, 2),
            FormSpec::symplectic(3, 3),
        ] {
            let s = PolarSpace::build(spec).unwrap();
            for seed in [None, Some(1), Some(2)] {
                let f = find_frame(&s, seed);
                assert!(Frame::new(&s, f.points().to_vec()).is_ok());
            }
        }
    }

    #[test]
    fn frame_validation_rejects_bad_patterns() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&s, Some(3));
        let mut pts = f.points().to_vec();
        pts.swap(0, 1);
        assert!(Frame::new(&s, pts).is_err());
        assert!(Frame::new(&s, f.points()[..5].to_vec()).is_err());
    }

    #[test]
    fn frame_equality_ignores_order() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&s, Some(4));
        let mut pts = f.points().to_vec();
        // swapping a pair with its partner keeps the same set
        pts.swap(0, 3);
        let g = Frame::new(&s, pts).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn base_subset_sizes() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&s, Some(5));
        assert_eq!(base_subset(&s, &f, 1).unwrap().len(), 12);
        let d = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
        let f = find_frame(&d, Some(5));
        assert_eq!(base_subset(&d, &f, 3).unwrap().len(), 16);
        let split = crate::grassmann::orbit_split(&d).unwrap();
        assert_eq!(
            base_subset_halfspin(&d, &split, &f, Delta::Plus)
                .unwrap()
                .len(),
            8
        );
    }

    #[test]
    fn common_frame_degenerate_pair() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let x = s.grassmannian(1).unwrap()[17].subspace().clone();
        let f = common_frame(&s, &x, &x).unwrap();
        assert!(base_subset(&s, &f, 1).unwrap().contains(&x));
    }

    #[test]
    fn select_identity_on_concrete_subset() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let f = find_frame(&s, Some(9));
        let bs = base_subset(&s, &f, 1).unwrap();
        for i in 0..6 {
            assert_eq!(
                bs.select(&[Sign::Plus(i)]),
                bs.select(&[Sign::Plus(i), Sign::Minus(f.sigma(i))])
            );
            for idx in bs.select(&[Sign::Plus(i)]).ones() {
                let p = s.point_subspace(f.point(i));
                assert!(s.ambient().contains(&bs.members()[idx], &p).unwrap());
            }
        }
    }
}

#[cfg(test)]
mod enumeration_tests {
    use super::*;
    use crate::polar::FormSpec;

    #[test]
    fn frame_counts_match_group_orders() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let all = enumerate_frames(&s);
        assert_eq!(all.len(), 30240);
        assert_eq!(dedup_frames(all).len(), 30240);
        let d = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        assert_eq!(enumerate_frames(&d).len(), 840);
    }

    #[test]
    fn common_frames_for_many_pairs() {
        for spec in [
            FormSpec::symplectic(3, 2),
            FormSpec::hyperbolic(4, 2),
            FormSpec::symplectic(3, 3),
        ] {
            let s = PolarSpace::build(spec).unwrap();
            for k in 0..s.rank() {
                let level = s.grassmannian(k).unwrap();
                let step = (level.len() / 40).max(1);
                for a in (0..level.len()).step_by(step) {
                    for b in (0..level.len()).step_by(step * 3 + 1) {
                        let (x, y) = (level[a].subspace(), level[b].subspace());
                        let f = common_frame(&s, x, y).unwrap();
                        let bs = base_subset(&s, &f, k).unwrap();
                        assert!(bs.contains(x) && bs.contains(y), "{spec} k={k}");
                    }
                }
            }
        }
    }
}
