//! Form-preserving linear maps and the permutations they induce on Grassmannians.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Subspace, Vector};
use crate::frames::{base_subset, base_subset_halfspin, find_frame, Frame};
use crate::grassmann::{orbit_split, GrassmannSpace, HalfSpinSpace};
use crate::model::Delta;
use crate::polar::{FormKind, PolarSpace};

/// An invertible linear map preserving the form, stored as the images of the unit vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMap {
    images: Vec<Vector>,
}

impl FormMap {
    pub fn identity(space: &PolarSpace) -> Self {
        let d = space.ambient().dim();
        FormMap {
            images: (0..d).map(|i| Vector::unit(d, i)).collect(),
        }
    }

    /// Checks invertibility and that the bilinear form (and, for type D, the
    /// quadratic form) is preserved on the unit vectors.
    pub fn from_images(space: &PolarSpace, images: Vec<Vector>) -> Result<Self> {
        let d = space.ambient().dim();
        if images.len() != d || images.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: images.len(),
            });
        }
        if space.ambient().span_of(&images).rank() != d {
            return Err(Error::Invalid("map is not invertible".into()));
        }
        for i in 0..d {
            let ei = Vector::unit(d, i);
            if space.kind() == FormKind::HyperbolicD
                && space.quadratic(&images[i]) != space.quadratic(&ei)
            {
                return Err(Error::Invalid(
                    "map does not preserve the quadratic form".into(),
                ));
            }
            for j in 0..d {
                let ej = Vector::unit(d, j);
                if space.bilinear(&images[i], &images[j]) != space.bilinear(&ei, &ej) {
                    return Err(Error::Invalid("map does not preserve the form".into()));
                }
            }
        }
        Ok(FormMap { images })
    }

    /// Product of `steps` random transvections (type C) or reflections in
    /// nonsingular vectors (type D).
    pub fn random(space: &PolarSpace, seed: u64, steps: usize) -> Self {
        let f = space.field();
        let d = space.ambient().dim();
        let p = f.p();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut images: Vec<Vector> = (0..d).map(|i| Vector::unit(d, i)).collect();
        let mut done = 0;
        while done < steps {
            let coords: Vec<u8> = (0..d).map(|_| rng.random_range(0..p)).collect();
            let v = Vector::from_slice(f, &coords).expect("coordinates are reduced");
            if v.is_zero() {
                continue;
            }
            let step: Box<dyn Fn(&Vector) -> Vector> = match space.kind() {
                FormKind::SymplecticC => {
                    let a = rng.random_range(1..p);
                    Box::new(move |x: &Vector| x.axpy(f, f.mul(a, space.bilinear(x, &v)), &v))
                }
                FormKind::HyperbolicD => {
                    let qv = space.quadratic(&v);
                    if qv == 0 {
                        continue;
                    }
                    let inv = f.inv(qv);
                    Box::new(move |x: &Vector| {
                        x.axpy(f, f.neg(f.mul(space.bilinear(x, &v), inv)), &v)
                    })
                }
            };
            for img in images.iter_mut() {
                *img = step(img);
            }
            done += 1;
        }
        FormMap { images }
    }

    pub fn images(&self) -> &[Vector] {
        &self.images
    }

    pub fn apply(&self, space: &PolarSpace, v: &Vector) -> Vector {
        space.ambient().apply(&self.images, v)
    }

    pub fn image(&self, space: &PolarSpace, s: &Subspace) -> Subspace {
        space.ambient().image(&self.images, s)
    }

    pub fn point_image(&self, space: &PolarSpace, point: usize) -> Result<usize> {
        let v = self
            .apply(space, space.point(point))
            .normalized(space.field());
        space
            .point_index(&v)
            .ok_or_else(|| Error::Structural("image of a point is not a point".into()))
    }

    /// Induced permutation of the sorted Grassmannian at level `k`.
    pub fn permutation(&self, space: &PolarSpace, k: usize) -> Result<Vec<usize>> {
        let level = space.grassmannian(k)?;
        level
            .iter()
            .map(|e| {
                let img = self.image(space, e.subspace());
                level
                    .binary_search_by(|x| x.subspace().cmp(&img))
                    .map_err(|_| Error::Structural("image is not a singular subspace".into()))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitAction {
    Preserved,
    Swapped,
    Inconsistent,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub space: String,
    pub k: usize,
    pub permutation_ok: bool,
    pub frames_checked: usize,
    pub base_subset_failures: usize,
    pub collinearity_failures: usize,
    pub weak_adjacency_failures: usize,
    pub orbit_action: Option<OrbitAction>,
    pub halfspin_frames_checked: usize,
    pub halfspin_failures: usize,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.permutation_ok
            && self.base_subset_failures == 0
            && self.collinearity_failures == 0
            && self.weak_adjacency_failures == 0
            && self.orbit_action != Some(OrbitAction::Inconsistent)
            && self.halfspin_failures == 0
    }
}

/// Checks that `map` sends base subsets to base subsets at level `k` (on
/// `frames` seeded sample frames), permutes the Grassmannian preserving
/// collinearity and weak adjacency, and in type D acts on the two generator
/// classes consistently, mapping each half-spin space onto one.
pub fn verify_base_preserving_map(
    space: &PolarSpace,
    k: usize,
    map: &FormMap,
    frames: usize,
    seed: u64,
) -> Result<MapReport> {
    let checked = FormMap::from_images(space, map.images.clone())?;
    let perm = checked.permutation(space, k)?;
    let permutation_ok = perm.iter().collect::<HashSet<_>>().len() == perm.len();

    let g = GrassmannSpace::new(space, k)?;
    let collinearity_failures = g
        .collinearity()
        .edges()
        .filter(|&(a, b)| !g.collinearity().contains(perm[a], perm[b]))
        .count();
    let weak_adjacency_failures = g
        .weak_adjacency()
        .edges()
        .filter(|&(a, b)| !g.weak_adjacency().contains(perm[a], perm[b]))
        .count();

    let mut base_subset_failures = 0;
    let sample: Vec<Frame> = (0..frames as u64)
        .map(|t| find_frame(space, Some(seed.wrapping_add(t))))
        .collect();
    let mut images = Vec::with_capacity(sample.len());
    for f in &sample {
        let img = image_frame(space, &checked, f);
        let ok = match &img {
            Some(h) => {
                let want: HashSet<Subspace> = base_subset(space, f, k)?
                    .members()
                    .iter()
                    .map(|m| checked.image(space, m))
                    .collect();
                let got: HashSet<Subspace> = base_subset(space, h, k)?
                    .members()
                    .iter()
                    .cloned()
                    .collect();
                want == got
            }
            None => false,
        };
        if !ok {
            base_subset_failures += 1;
        }
        images.push(img);
    }

    let (mut orbit_action, mut halfspin_frames_checked, mut halfspin_failures) = (None, 0, 0);
    if space.kind() == FormKind::HyperbolicD && space.rank() >= 4 {
        let split = orbit_split(space)?;
        let top = checked.permutation(space, space.rank() - 1)?;
        let same = (0..top.len())
            .filter(|&i| split.labels[i] == split.labels[top[i]])
            .count();
        let action = if same == top.len() {
            OrbitAction::Preserved
        } else if same == 0 {
            OrbitAction::Swapped
        } else {
            OrbitAction::Inconsistent
        };
        orbit_action = Some(action);
        if action != OrbitAction::Inconsistent {
            for delta in [Delta::Plus, Delta::Minus] {
                let target = if action == OrbitAction::Swapped {
                    delta.opposite()
                } else {
                    delta
                };
                let hs = HalfSpinSpace::new(space, &split, delta)?;
                let ht = HalfSpinSpace::new(space, &split, target)?;
                for (a, b) in hs.collinearity().edges() {
                    let (ga, gb) = (top[hs.elements()[a]], top[hs.elements()[b]]);
                    let hit = match (ht.local_index(ga), ht.local_index(gb)) {
                        (Some(x), Some(y)) => ht.collinearity().contains(x, y),
                        _ => false,
                    };
                    if !hit {
                        halfspin_failures += 1;
                    }
                }
                for (f, img) in sample.iter().zip(&images) {
                    let Some(h) = img else { continue };
                    halfspin_frames_checked += 1;
                    let src = base_subset_halfspin(space, &split, f, delta)?;
                    let dst = base_subset_halfspin(space, &split, h, target)?;
                    let want: HashSet<usize> =
                        src.generator_ids().iter().map(|&x| top[x]).collect();
                    let got: HashSet<usize> = dst.generator_ids().iter().copied().collect();
                    if want != got {
                        halfspin_failures += 1;
                    }
                }
            }
        }
    }

    Ok(MapReport {
        space: space.spec().to_string(),
        k,
        permutation_ok,
        frames_checked: sample.len(),
        base_subset_failures,
        collinearity_failures,
        weak_adjacency_failures,
        orbit_action,
        halfspin_frames_checked,
        halfspin_failures,
    })
}

fn image_frame(space: &PolarSpace, map: &FormMap, f: &Frame) -> Option<Frame> {
    let pts: Option<Vec<usize>> = f
        .points()
        .iter()
        .map(|&p| map.point_image(space, p).ok())
        .collect();
    Frame::new(space, pts?).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::FormSpec;

    #[test]
    fn random_maps_preserve_the_form() {
        for spec in [
            FormSpec::symplectic(3, 2),
            FormSpec::symplectic(3, 3),
            FormSpec::hyperbolic(4, 2),
        ] {
            let s = PolarSpace::build(spec).unwrap();
            for seed in 0..5 {
                let m = FormMap::random(&s, seed, 12);
                assert!(
                    FormMap::from_images(&s, m.images().to_vec()).is_ok(),
                    "{spec}"
                );
            }
        }
    }

    #[test]
    fn non_isometry_is_rejected() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let mut imgs = FormMap::identity(&s).images().to_vec();
        imgs.swap(0, 2);
        imgs[0] = imgs[0].add(s.field(), &imgs[1]);
        assert!(verify_base_preserving_map(&s, 1, &FormMap { images: imgs }, 1, 0).is_err());
    }

    #[test]
    fn identity_passes() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let rep = verify_base_preserving_map(&s, 1, &FormMap::identity(&s), 5, 0).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn reflections_swap_generator_classes() {
        let s = PolarSpace::build(FormSpec::hyperbolic(4, 2)).unwrap();
        let mut actions = HashSet::new();
        for seed in 0..6 {
            let rep = verify_base_preserving_map(
                &s,
                3,
                &FormMap::random(&s, seed, 3 + seed as usize),
                3,
                seed,
            )
            .unwrap();
            assert!(rep.passed(), "{rep:?}");
            actions.insert(format!("{:?}", rep.orbit_action));
        }
        assert_eq!(actions.len(), 2);
    }
}
