//! Recovering Grassmann-space collinearity from the family of base subsets alone.
//!
//! Only element ids and the membership of base subsets are consumed; frame
//! labels are used afterwards, to audit the label-free classification.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grassmann::{Adjacency, GrassmannSpace};
use crate::model::binomial;
use crate::oracle::{descriptor_masks, FamilyMode, FrameFamily, LevelFamily, Scratch};
use crate::polar::FormKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// count of second-type complements equals `C(n-1, 2)`
    GeneratorCount,
    /// count equals the per-base-subset maximum
    MaximalCount,
    /// the two points are not partners in the base containing both
    PartnerTest,
    /// the two points form a complement subset
    ComplementPair,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClassificationStats {
    pub base_subsets: usize,
    pub first_type: usize,
    pub second_type: usize,
    /// complements whose label-free type disagrees with the descriptor type
    pub mismatches: usize,
    /// disjointness counts that fit neither type
    pub unclassified: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakReport {
    pub recovered_edges: usize,
    pub truth_edges: usize,
    pub equal: bool,
    pub pencils: usize,
    pub weak_pairs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport {
    pub space: String,
    pub k: usize,
    pub mode: FamilyMode,
    pub rule: Rule,
    pub frames: usize,
    pub elements: usize,
    pub recovered_edges: usize,
    pub truth_edges: usize,
    pub equal: bool,
    pub classification: ClassificationStats,
    pub weak: Option<WeakReport>,
    #[serde(skip)]
    pub recovered: Adjacency,
    #[serde(skip)]
    pub truth: Adjacency,
}

impl ReconstructionReport {
    /// `a,b,recovered,truth` rows for every disagreeing pair.
    pub fn diff_csv(&self) -> String {
        let mut out = String::from("a,b,recovered,truth\n");
        for (a, b) in self.recovered.symmetric_difference(&self.truth) {
            out.push_str(&format!(
                "{a},{b},{},{}\n",
                self.recovered.contains(a, b),
                self.truth.contains(a, b)
            ));
        }
        out
    }
}

struct Analysed {
    /// complements as masks over member positions, with their label-free type
    complements: Vec<(u32, bool)>,
    unclassified: usize,
}

pub fn reconstruct_collinearity(family: &FrameFamily, k: usize) -> Result<ReconstructionReport> {
    if family.mode() != FamilyMode::Full {
        return Err(Error::Unsupported(
            "reconstruction needs the full frame family".into(),
        ));
    }
    let space = family.space();
    let n = space.rank();
    let kind = space.kind();
    let level = family.level(k)?;
    let g = GrassmannSpace::new(space, k)?;

    let classify_by_disjointness = kind == FormKind::SymplecticC && k >= 1 && k + 2 <= n;
    let analysed: Vec<Analysed> = (0..level.len())
        .into_par_iter()
        .map_init(Scratch::default, |scratch, f| {
            analyse(&level, f, scratch, classify_by_disjointness, n, kind, k)
        })
        .collect::<Result<_>>()?;

    let mut stats = ClassificationStats {
        base_subsets: level.len(),
        ..Default::default()
    };
    let truth_types: HashSet<(u32, bool)> = descriptor_masks(level.model())
        .into_iter()
        .map(|(d, m)| (full_mask(level.model().len()) ^ m, d.is_first_type()))
        .collect();
    for a in &analysed {
        stats.unclassified += a.unclassified;
        for &(mask, first) in &a.complements {
            if first {
                stats.first_type += 1;
            } else {
                stats.second_type += 1;
            }
            if !truth_types.contains(&(mask, first)) {
                stats.mismatches += 1;
            }
        }
    }

    let rule = if k == 0 {
        if kind == FormKind::SymplecticC {
            Rule::PartnerTest
        } else {
            Rule::ComplementPair
        }
    } else if k == n - 1 {
        Rule::GeneratorCount
    } else {
        Rule::MaximalCount
    };

    let frame_keys: HashSet<Vec<u32>> = if rule == Rule::PartnerTest {
        (0..level.len())
            .map(|f| {
                let mut m = level.members(f).to_vec();
                m.sort_unstable();
                m
            })
            .collect()
    } else {
        HashSet::new()
    };

    let maxima: Vec<usize> = analysed
        .iter()
        .enumerate()
        .map(|(f, a)| max_pair_count(a, level.members(f).len(), k == 0))
        .collect();
    let elements = level.element_count();
    let edges: Vec<Vec<(usize, usize)>> = (0..elements)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            for b in a + 1..elements {
                let f = level.first_common(a, b).ok_or_else(|| {
                    Error::Structural(format!("no base subset contains elements {a} and {b}"))
                })?;
                let ms = level.members(f);
                let pa = ms.iter().position(|&x| x as usize == a).expect("member");
                let pb = ms.iter().position(|&x| x as usize == b).expect("member");
                let count = second_type_containing(&analysed[f], pa, pb);
                let collinear = match rule {
                    Rule::GeneratorCount => count == binomial(n - 1, 2),
                    Rule::MaximalCount => count == maxima[f],
                    Rule::ComplementPair => analysed[f]
                        .complements
                        .iter()
                        .any(|&(m, _)| m == (1 << pa | 1 << pb)),
                    Rule::PartnerTest => !are_partners(&level, &frame_keys, ms, a, b),
                };
                if collinear {
                    out.push((a, b));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut recovered = Adjacency::empty(elements);
    for (a, b) in edges.into_iter().flatten() {
        recovered.insert(a, b);
    }
    let truth = g.collinearity().clone();

    let weak = if classify_by_disjointness {
        Some(recover_weak(&level, &analysed, &recovered, &g, n, k))
    } else {
        None
    };

    Ok(ReconstructionReport {
        space: space.spec().to_string(),
        k,
        mode: family.mode(),
        rule,
        frames: family.len(),
        elements,
        recovered_edges: recovered.edge_count(),
        truth_edges: truth.edge_count(),
        equal: recovered.symmetric_difference(&truth).is_empty()
            && stats.mismatches == 0
            && stats.unclassified == 0,
        classification: stats,
        weak,
        recovered,
        truth,
    })
}

fn full_mask(len: usize) -> u32 {
    if len == 32 {
        u32::MAX
    } else {
        (1u32 << len) - 1
    }
}

fn analyse(
    level: &LevelFamily,
    f: usize,
    scratch: &mut Scratch,
    by_disjointness: bool,
    n: usize,
    kind: FormKind,
    k: usize,
) -> Result<Analysed> {
    let full = full_mask(level.members(f).len());
    let comps: Vec<u32> = level
        .maximal_intersections_with(f, scratch)?
        .into_iter()
        .map(|m| full ^ m)
        .collect();
    let mut unclassified = 0;
    let complements = comps
        .iter()
        .map(|&c| {
            let first = if by_disjointness {
                let disjoint = comps.iter().filter(|&&d| d & c == 0).count();
                if disjoint != 2 * n - 1 && disjoint != 3 {
                    unclassified += 1;
                }
                disjoint == 2 * n - 1
            } else {
                kind == FormKind::SymplecticC && k == 0
            };
            (c, first)
        })
        .collect();
    Ok(Analysed {
        complements,
        unclassified,
    })
}

fn second_type_containing(a: &Analysed, pa: usize, pb: usize) -> usize {
    let both = 1u32 << pa | 1 << pb;
    a.complements
        .iter()
        .filter(|&&(m, first)| !first && m & both == both)
        .count()
}

fn max_pair_count(a: &Analysed, len: usize, skip: bool) -> usize {
    if skip {
        return 0;
    }
    let mut best = 0;
    for x in 0..len {
        for y in x + 1..len {
            best = best.max(second_type_containing(a, x, y));
        }
    }
    best
}

/// `b` is the partner of `a` in the base `ms` iff some point `p` outside it
/// replaces either of them and still yields a base.
fn are_partners(
    level: &LevelFamily,
    keys: &HashSet<Vec<u32>>,
    ms: &[u32],
    a: usize,
    b: usize,
) -> bool {
    let replace = |out: usize, p: usize| {
        let mut m: Vec<u32> = ms.iter().copied().filter(|&x| x as usize != out).collect();
        m.push(p as u32);
        m.sort_unstable();
        keys.contains(&m)
    };
    (0..level.element_count())
        .filter(|p| !ms.contains(&(*p as u32)))
        .any(|p| replace(a, p) && replace(b, p))
}

fn recover_weak(
    level: &LevelFamily,
    analysed: &[Analysed],
    collinear: &Adjacency,
    g: &GrassmannSpace,
    n: usize,
    k: usize,
) -> WeakReport {
    let take = 2 * n - k - 2;
    let found: Vec<(Vec<(usize, usize)>, usize, usize)> = (0..level.len())
        .into_par_iter()
        .map(|f| {
            let full = full_mask(level.members(f).len());
            let firsts: Vec<u32> = analysed[f]
                .complements
                .iter()
                .filter(|c| c.1)
                .map(|c| full ^ c.0)
                .collect();
            let ms = level.members(f);
            let mut pairs = Vec::new();
            let (mut pencils, mut weak_pairs) = (0, 0);
            for choice in crate::field::combinations(firsts.len(), take) {
                let inter = choice.iter().fold(full, |acc, &i| acc & firsts[i]);
                let ids: Vec<usize> = (0..ms.len())
                    .filter(|&i| inter >> i & 1 == 1)
                    .map(|i| ms[i] as usize)
                    .collect();
                if ids.len() == 2 && !collinear.contains(ids[0], ids[1]) {
                    weak_pairs += 1;
                    pairs.push((ids[0], ids[1]));
                } else if ids.len() == k + 2 {
                    pencils += 1;
                }
            }
            (pairs, pencils, weak_pairs)
        })
        .collect();
    let mut recovered = collinear.clone();
    let (mut pencils, mut weak_pairs) = (0, 0);
    for (pairs, p, w) in found {
        pencils += p;
        weak_pairs += w;
        for (a, b) in pairs {
            recovered.insert(a, b);
        }
    }
    let truth = g.weak_adjacency();
    WeakReport {
        recovered_edges: recovered.edge_count(),
        truth_edges: truth.edge_count(),
        equal: recovered.symmetric_difference(truth).is_empty(),
        pencils,
        weak_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::{FormSpec, PolarSpace};

    #[test]
    fn klein_quadric_points() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        let family = FrameFamily::full(&s).unwrap();
        let rep = reconstruct_collinearity(&family, 0).unwrap();
        assert!(rep.equal, "{rep:?}");
        assert_eq!(rep.diff_csv().lines().count(), 1);
    }

    #[test]
    fn refuses_partial_family() {
        let s = PolarSpace::build(FormSpec::hyperbolic(3, 2)).unwrap();
        let f = crate::frames::find_frame(&s, Some(1));
        let family = FrameFamily::from_frames(&s, vec![f]);
        assert!(reconstruct_collinearity(&family, 0).is_err());
    }
}

#[cfg(test)]
mod symplectic_tests {
    use super::*;
    use crate::polar::{FormSpec, PolarSpace};

    #[test]
    fn every_level_of_the_small_symplectic_space() {
        let s = PolarSpace::build(FormSpec::symplectic(3, 2)).unwrap();
        let family = FrameFamily::full(&s).unwrap();
        for k in 0..3 {
            let rep = reconstruct_collinearity(&family, k).unwrap();
            assert!(rep.equal);
            if let Some(w) = rep.weak {
                assert!(w.equal);
            }
        }
    }
}
