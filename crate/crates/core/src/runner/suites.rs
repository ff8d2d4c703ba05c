use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Ctx, Outcome, Suite, Target};
use crate::error::Result;
use crate::field::{combinations, Subspace};
use crate::frames::{base_subset, base_subset_halfspin, common_frame, find_frame, Frame};
use crate::grassmann::{orbit_split, HalfSpinSpace};
use crate::maps::{verify_base_preserving_map, FormMap};
use crate::model::{
    base_subset_size, binomial, sigma, ApartmentModel, Complement, Delta, IntersectionShape,
    MaxInexact, Sign,
};
use crate::oracle::{
    descriptor_masks, descriptor_sets, expected_frame_count, frames_containing, FrameFamily,
    FULL_FAMILY_LIMIT,
};
use crate::polar::{FormKind, PolarSpace};
use crate::reconstruct::reconstruct_collinearity;

pub(super) fn run_suite(
    ctx: &mut Ctx,
    suite: Suite,
    levels: &[usize],
) -> Result<(&'static str, Vec<Outcome>)> {
    match suite {
        Suite::Axioms => axioms(ctx),
        Suite::Sizes => sizes(ctx, levels),
        Suite::Lemma21 => lemma21(ctx, levels),
        Suite::Lemma22 => lemma22(ctx, levels),
        Suite::Lemmanew => lemmanew(ctx, levels),
        Suite::Lemma24 => lemma24(ctx, levels),
        Suite::Lemma25 => lemma25(ctx, levels),
        Suite::Props2x => props2x(ctx, levels),
        Suite::Prop31 => prop31(ctx),
        Suite::Lemma31 => lemma31(ctx),
        Suite::Oracle => oracle(ctx, levels),
        Suite::Reconstruct => reconstruct(ctx, levels),
        Suite::Maps => maps(ctx, levels),
    }
}

fn sampled(ctx: &Ctx, what: &str) -> Option<String> {
    ctx.sampled.then(|| format!("sampled ({what})"))
}

fn sample_frames(space: &PolarSpace, count: usize, seed: u64) -> Vec<Frame> {
    (0..count as u64)
        .map(|t| find_frame(space, Some(seed.wrapping_mul(7919).wrapping_add(t))))
        .collect()
}

fn model_for(ctx: &Ctx, k: usize) -> Result<ApartmentModel> {
    ApartmentModel::grassmann(ctx.target.n(), k, ctx.target.kind())
}

fn relation(model: &ApartmentModel, a: usize, b: usize) -> &'static str {
    let (s, u) = (model.element(a), model.element(b));
    if model.model_collinear(&s, &u) {
        "collinear"
    } else if model.model_weak_adjacent(&s, &u) {
        "weak"
    } else {
        "other"
    }
}

fn fmt_complement(c: Complement) -> String {
    match c {
        Complement::FirstType { i } => format!("B(+{i})"),
        Complement::SecondType { i, j } => format!("C({i};{j})"),
    }
}

fn fmt_max_inexact(d: MaxInexact) -> String {
    match d {
        MaxInexact::FirstType { i } => format!("B(-{i})"),
        MaxInexact::SecondType { i, j } => format!("R({i};{j})"),
    }
}

fn axioms(ctx: &mut Ctx) -> Result<(&'static str, Vec<Outcome>)> {
    let rep = ctx.space().verify_axioms(ctx.seed);
    let mut o = Outcome::new(None, None);
    o.checked = rep.lines_checked as u64 + rep.ridges as u64 + 1;
    o.failures = (rep.one_or_all_violations + rep.universal_points + rep.flag_violations) as u64
        + u64::from(!rep.dichotomy_ok);
    let ridge_counts: Vec<String> = rep
        .generators_per_ridge
        .iter()
        .map(|c| c.to_string())
        .collect();
    let flags: Vec<String> = rep
        .greedy_flag_lengths
        .iter()
        .map(|(l, c)| format!("{l}:{c}"))
        .collect();
    o.rows = vec![
        format!("lines_checked,{}", rep.lines_checked),
        format!("one_or_all_violations,{}", rep.one_or_all_violations),
        format!("universal_points,{}", rep.universal_points),
        format!("flag_violations,{}", rep.flag_violations),
        format!("greedy_flag_lengths,{}", flags.join("|")),
        format!("ridges,{}", rep.ridges),
        format!("generators_per_ridge,{}", ridge_counts.join("|")),
        format!("dichotomy_ok,{}", rep.dichotomy_ok),
    ];
    Ok(("metric,value", vec![o]))
}

fn sizes(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let kind = ctx.target.kind();
    let halfspin = kind == FormKind::HyperbolicD && n >= 4;
    let mut outs = Vec::new();
    for &k in levels {
        let expected = base_subset_size(n, k);
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        o.check(model.len() == expected);
        o.rows.push(format!(
            "{k},model,{},{expected},{}",
            model.len(),
            model.len() == expected
        ));
        if let Target::Space(_) = ctx.target {
            let count = ctx.samples(100, 10);
            o.mode = sampled(ctx, "10 frames").unwrap_or_else(|| format!("{count} random frames"));
            let space = ctx.space();
            let level = space.grassmannian(k)?.len();
            o.rows.push(format!("{k},grassmannian,{level},,true"));
            let frames = sample_frames(space, count, ctx.seed);
            let mut bad = 0;
            for f in &frames {
                let bs = base_subset(space, f, k)?;
                let mut ok = bs.len() == expected
                    && bs.members().iter().collect::<HashSet<_>>().len() == expected;
                for (m, t) in bs.members().iter().zip(bs.signed()) {
                    let support: Vec<usize> = space
                        .points_in(m)
                        .into_iter()
                        .filter_map(|p| f.position(p))
                        .collect();
                    let mut want: Vec<usize> = t.indices().collect();
                    let mut got = support;
                    want.sort_unstable();
                    got.sort_unstable();
                    ok &= want == got;
                }
                o.check(ok);
                bad += usize::from(!ok);
            }
            o.rows.push(format!(
                "{k},base_subset,{expected},{expected},{}",
                bad == 0
            ));
            let pairs = ctx.samples(1000, 100);
            let elements = space.grassmannian(k)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ (k as u64) << 32);
            let mut good = 0;
            for _ in 0..pairs {
                let x = elements[rng.random_range(0..elements.len())].subspace();
                let y = elements[rng.random_range(0..elements.len())].subspace();
                let ok = match common_frame(space, x, y) {
                    Ok(f) => {
                        let bs = base_subset(space, &f, k)?;
                        bs.contains(x) && bs.contains(y)
                    }
                    Err(_) => false,
                };
                o.check(ok);
                good += usize::from(ok);
            }
            o.rows
                .push(format!("{k},common_frame,{good},{pairs},{}", good == pairs));
            if halfspin && k == n - 1 {
                let split = orbit_split(space)?;
                let half = 1usize << (n - 1);
                let mut bad = 0;
                for f in &frames {
                    let plus = base_subset_halfspin(space, &split, f, Delta::Plus)?.len();
                    let minus = base_subset_halfspin(space, &split, f, Delta::Minus)?.len();
                    let ok = plus == half && minus == half;
                    o.check(ok);
                    bad += usize::from(!ok);
                }
                o.rows
                    .push(format!("{k},halfspin,{half},{half},{}", bad == 0));
            }
        } else if halfspin && k == n - 1 {
            for delta in [Delta::Plus, Delta::Minus] {
                let hm = ApartmentModel::halfspin(n, delta)?;
                let half = 1usize << (n - 1);
                o.check(hm.len() == half);
                o.rows.push(format!(
                    "{k},halfspin{},{},{half},{}",
                    delta.symbol(),
                    hm.len(),
                    hm.len() == half
                ));
            }
        }
        outs.push(o);
    }
    Ok(("k,what,count,expected,ok", outs))
}

fn lemma21(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        for c in model.complements() {
            let got = model.count_disjoint_complements(c)?;
            let (want_distinct, want_labelled) = if c.is_first_type() {
                (2 * n - 1, 4 * n - 3)
            } else {
                (3, 4)
            };
            let ok = got.distinct_sets == want_distinct && got.labelled == want_labelled;
            o.check(ok);
            o.rows.push(format!(
                "{k},{},{},{},{},{want_distinct},{want_labelled},{ok}",
                fmt_complement(c),
                if c.is_first_type() { "first" } else { "second" },
                got.distinct_sets,
                got.labelled
            ));
        }
        outs.push(o);
    }
    Ok((
        "k,descriptor,type,distinct,labelled,expected_distinct,expected_labelled,ok",
        outs,
    ))
}

/// Aggregates per-pair rows into `(key, pair count)` lines.
fn aggregate(rows: BTreeMap<String, usize>) -> Vec<String> {
    rows.into_iter()
        .map(|(key, count)| format!("{key},{count}"))
        .collect()
}

fn lemma22(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        let mut rows = BTreeMap::new();
        let threshold = binomial(n - 1, 2);
        for a in 0..model.len() {
            for b in a + 1..model.len() {
                let (s, u) = (model.element(a), model.element(b));
                let common = s.intersection(&u).len();
                let count = model.count_complements_containing(&s, &u, false)?;
                let formula = binomial(common, 2);
                let rel = relation(&model, a, b);
                let ok = count == formula && (count == threshold) == (rel == "collinear");
                o.check(ok);
                *rows
                    .entry(format!(
                        "{k},{},{rel},{count},{formula},{ok}",
                        common as isize - 1
                    ))
                    .or_insert(0) += 1;
            }
        }
        o.rows = aggregate(rows);
        outs.push(o);
    }
    Ok(("k,m,relation,count,formula,ok,pairs", outs))
}

fn lemma24(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n() as i64;
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let ki = k as i64;
        let mut o = Outcome::new(Some(k), None);
        let mut rows = BTreeMap::new();
        for a in 0..model.len() {
            for b in a + 1..model.len() {
                let (s, u) = (model.element(a), model.element(b));
                let m = s.intersection(&u).len() as i64 - 1;
                let c = model.c(&s, &u)? as i64;
                let mut bound = (m + 1) * (2 * n - 2 * ki + m - 2) + (ki - m) * (ki - m);
                if ki == n - 2 {
                    bound = bound.min((m + 1) * (m + 2) + 1);
                }
                let rel = relation(&model, a, b);
                let formula = match rel {
                    "collinear" => Some(ki * (2 * n - ki - 3) + 1),
                    "weak" => Some(ki * (2 * n - ki - 3)),
                    _ => None,
                };
                let ok = c <= bound && formula.is_none_or(|f| f == c);
                o.check(ok);
                // Pairs (i, j), (i', j') with i, i' in S∩U and j = σi', j' = σi
                // name the same complement; removing that double count fits every case.
                let corrected = formula.map(|f| f - ki * (ki - 1) / 2);
                let show = |x: Option<i64>| x.map(|f| f.to_string()).unwrap_or_else(|| "-".into());
                let corrected_ok = corrected.is_none_or(|f| f == c);
                let (formula, corrected) = (show(formula), show(corrected));
                *rows
                    .entry(format!(
                        "{k},{m},{rel},{c},{formula},{corrected},{corrected_ok},{bound},{ok}"
                    ))
                    .or_insert(0) += 1;
            }
        }
        o.rows = aggregate(rows);
        outs.push(o);
    }
    Ok((
        "k,m,relation,c,formula,corrected,corrected_ok,bound,ok,pairs",
        outs,
    ))
}

fn lemma25(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        let m_c = model.m_c()?;
        let formula = k * (2 * n - k - 3) + 1;
        let corrected = formula - k * (k - 1) / 2;
        let mut disagree = 0;
        for a in 0..model.len() {
            for b in a + 1..model.len() {
                let (s, u) = (model.element(a), model.element(b));
                let ok = model.collinear_by_count(&s, &u, m_c)? == model.model_collinear(&s, &u);
                o.check(ok);
                disagree += usize::from(!ok);
            }
        }
        o.rows.push(format!(
            "{k},{m_c},{formula},{corrected},{},{disagree},{}",
            o.checked,
            o.failures == 0
        ));
        outs.push(o);
    }
    Ok(("k,m_c,formula,corrected,pairs,disagreements,ok", outs))
}

fn lemmanew(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        let (mut pencils, mut pairs) = (0, 0);
        for idx in combinations(2 * n, 2 * n - k - 2) {
            let label = idx
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            if model.first_type_intersection(&idx).is_clear() {
                o.rows.push(format!("{k},{label},empty,"));
                continue;
            }
            let (outcome, members, ok) = match model.first_type_intersection_classify(&idx) {
                Ok(IntersectionShape::Pencil(m)) => {
                    pencils += 1;
                    ("pencil", m, true)
                }
                Ok(IntersectionShape::WeakPair(a, b)) => {
                    pairs += 1;
                    ("weak_pair", vec![a, b], true)
                }
                Err(_) => (
                    "unexpected",
                    model.first_type_intersection(&idx).ones().collect(),
                    false,
                ),
            };
            o.check(ok);
            let members: Vec<String> = members
                .iter()
                .map(|m| format!("{:?}", model.element(*m)))
                .collect();
            o.rows
                .push(format!("{k},{label},{outcome},{}", members.join(" ")));
        }
        o.check(pencils > 0 && pairs > 0);
        outs.push(o);
    }
    Ok(("k,indices,outcome,members", outs))
}

fn union(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = a.clone();
    out.union_with(b);
    out
}

fn props2x(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let kind = ctx.target.kind();
    let mut outs = Vec::new();
    for &k in levels {
        let model = model_for(ctx, k)?;
        let mut o = Outcome::new(Some(k), None);
        let row = |o: &mut Outcome, check: &str, detail: String, ok: bool| {
            o.check(ok);
            o.rows.push(format!("{k},{check},{detail},{ok}"));
        };
        let ds = model.maximal_inexact();
        let firsts = ds.iter().filter(|d| d.is_first_type()).count();
        let seconds = ds.len() - firsts;
        let want_first = kind == FormKind::SymplecticC && k + 2 <= n;
        let want_second = !(kind == FormKind::SymplecticC && k == 0);
        row(
            &mut o,
            "types",
            format!("first={firsts};second={seconds}"),
            (firsts > 0) == want_first && (seconds > 0) == want_second,
        );
        let full = model.full();
        let mut dual_ok = true;
        for &d in &ds {
            let mut rest = full.clone();
            rest.difference_with(&model.members_of_max_inexact(d));
            dual_ok &= model.members_of(d.complement()) == rest;
        }
        row(
            &mut o,
            "duality",
            format!("{} descriptors", ds.len()),
            dual_ok,
        );
        let plus_ok = (0..2 * n).all(|i| {
            model.select(&[Sign::Plus(i)])
                == model.select(&[Sign::Plus(i), Sign::Minus(sigma(n, i))])
        });
        row(&mut o, "plus_i_avoids_sigma_i", String::new(), plus_ok);
        if k == n - 1 {
            let top_ok = (0..2 * n).all(|i| {
                model.select(&[Sign::Plus(i)]) == model.select(&[Sign::Minus(sigma(n, i))])
            });
            row(&mut o, "top_plus_is_minus_sigma", String::new(), top_ok);
            let mut r_ok = true;
            for &d in &ds {
                if let MaxInexact::SecondType { i, j } = d {
                    let want_r = union(
                        &model.select(&[Sign::Plus(i), Sign::Plus(j)]),
                        &model.select(&[Sign::Minus(i)]),
                    );
                    let want_c = model.select(&[Sign::Plus(i), Sign::Plus(sigma(n, j))]);
                    r_ok &= model.members_of_max_inexact(d) == want_r
                        && model.members_of(d.complement()) == want_c;
                }
            }
            row(&mut o, "top_second_type_forms", String::new(), r_ok);
        }
        if k == 0 {
            let comps = model.complements();
            let ok = comps.iter().all(|&c| {
                let m: Vec<usize> = model.members_of(c).ones().collect();
                match kind {
                    FormKind::SymplecticC => m.len() == 1,
                    FormKind::HyperbolicD => {
                        m.len() == 2
                            && model.model_collinear(&model.element(m[0]), &model.element(m[1]))
                    }
                }
            });
            row(
                &mut o,
                "point_complements",
                format!("{} complements", comps.len()),
                ok,
            );
        }
        let inexact_ok = model.is_exact(&full)
            && ds
                .iter()
                .all(|&d| !model.is_exact(&model.members_of_max_inexact(d)));
        row(&mut o, "exactness", String::new(), inexact_ok);
        let sets: Vec<FixedBitSet> = descriptor_sets(&model).into_iter().map(|x| x.1).collect();
        let distinct: HashSet<Vec<usize>> = sets.iter().map(|s| s.ones().collect()).collect();
        let antichain = sets
            .iter()
            .all(|a| sets.iter().all(|b| a == b || !a.is_subset(b)));
        row(
            &mut o,
            "antichain",
            format!("{} distinct sets", distinct.len()),
            antichain && distinct.len() == sets.len(),
        );
        let s_ok = (0..2 * n)
            .all(|i| model.s_i(&full, i).map(|t| t.indices().collect::<Vec<_>>()) == Some(vec![i]))
            && (0..2 * n).all(|i| model.s_i(&model.empty_set(), i).is_none());
        row(&mut o, "s_i", String::new(), s_ok);
        let sizes = model.complement_sizes();
        let coincide = sizes.first.is_some() && sizes.first == sizes.second;
        o.rows.push(format!(
            "{k},complement_sizes,first={};second={};coincide={coincide},true",
            sizes.first.map_or("-".into(), |x| x.to_string()),
            sizes.second.map_or("-".into(), |x| x.to_string())
        ));
        outs.push(o);
    }
    Ok(("k,check,detail,ok", outs))
}

fn prop31(ctx: &mut Ctx) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let mut o = Outcome::new(None, None);
    for delta in [Delta::Plus, Delta::Minus] {
        let model = ApartmentModel::halfspin(n, delta)?;
        let d = delta.symbol();
        let ds = model.maximal_inexact();
        let mut ok = ds.iter().all(|x| !x.is_first_type());
        for &x in &ds {
            if let MaxInexact::SecondType { i, j } = x {
                let want_r = union(
                    &model.select(&[Sign::Minus(i)]),
                    &model.select(&[Sign::Plus(i), Sign::Plus(j)]),
                );
                let want_c = model.select(&[Sign::Plus(i), Sign::Plus(sigma(n, j))]);
                ok &= model.members_of_max_inexact(x) == want_r
                    && model.members_of(x.complement()) == want_c;
            }
        }
        o.check(ok);
        o.rows
            .push(format!("{d},model_forms,{} descriptors,{ok}", ds.len()));
        let minus_ok = (0..2 * n)
            .all(|i| model.select(&[Sign::Minus(i)]) == model.select(&[Sign::Plus(sigma(n, i))]));
        o.check(minus_ok);
        o.rows
            .push(format!("{d},minus_i_is_plus_sigma_i,,{minus_ok}"));
    }
    if let Target::Space(_) = ctx.target {
        let count = ctx.samples(20, 2);
        o.mode = sampled(ctx, "2 frames")
            .unwrap_or_else(|| format!("model exhaustive; {count} random frames"));
        let space = ctx.space();
        let split = orbit_split(space)?;
        for (t, f) in sample_frames(space, count, ctx.seed).iter().enumerate() {
            for delta in [Delta::Plus, Delta::Minus] {
                let hb = base_subset_halfspin(space, &split, f, delta)?;
                let model = ApartmentModel::halfspin(n, hb.model_parity())?;
                let members = hb.members();
                let pick = |set: &FixedBitSet| -> Vec<Subspace> {
                    set.ones().map(|i| members[i].clone()).collect()
                };
                let mut ok = frames_containing(space, members, 2)?.len() == 1;
                let mut seen = HashSet::new();
                for (_, set) in descriptor_sets(&model) {
                    if !seen.insert(set.clone()) {
                        continue;
                    }
                    ok &= frames_containing(space, &pick(&set), 2)?.len() == 2;
                    for x in (0..members.len()).filter(|&x| !set.contains(x)) {
                        let mut bigger = set.clone();
                        bigger.insert(x);
                        ok &= frames_containing(space, &pick(&bigger), 2)?.len() == 1;
                    }
                }
                o.check(ok);
                o.rows.push(format!(
                    "{},concrete_frame_{t},{} maximal inexact sets,{ok}",
                    delta.symbol(),
                    seen.len()
                ));
            }
        }
    }
    Ok(("delta,check,detail,ok", vec![o]))
}

fn lemma31(ctx: &mut Ctx) -> Result<(&'static str, Vec<Outcome>)> {
    let n = ctx.target.n();
    let threshold = binomial(n - 2, 2);
    let mut o = Outcome::new(None, None);
    let mut rows = BTreeMap::new();
    for delta in [Delta::Plus, Delta::Minus] {
        let model = ApartmentModel::halfspin(n, delta)?;
        for a in 0..model.len() {
            for b in a + 1..model.len() {
                let (s, u) = (model.element(a), model.element(b));
                let count = model.halfspin_count_containing(&s, &u)?;
                let collinear = model.model_collinear(&s, &u);
                let ok = (count == threshold) == collinear;
                o.check(ok);
                let rel = if collinear { "collinear" } else { "other" };
                *rows
                    .entry(format!(
                        "{},model,{rel},{count},{threshold},{ok}",
                        delta.symbol()
                    ))
                    .or_insert(0) += 1;
            }
        }
    }
    if let Target::Space(_) = ctx.target {
        let count = ctx.samples(20, 3);
        o.mode = sampled(ctx, "3 frames")
            .unwrap_or_else(|| format!("model exhaustive; {count} random frames"));
        let space = ctx.space();
        let split = orbit_split(space)?;
        let frames = sample_frames(space, count, ctx.seed);
        for delta in [Delta::Plus, Delta::Minus] {
            let hs = HalfSpinSpace::new(space, &split, delta)?;
            for f in &frames {
                let hb = base_subset_halfspin(space, &split, f, delta)?;
                let model = ApartmentModel::halfspin(n, hb.model_parity())?;
                let ids = hb.generator_ids();
                for a in 0..ids.len() {
                    for b in a + 1..ids.len() {
                        let la = hs.local_index(ids[a]).expect("generator of this class");
                        let lb = hs.local_index(ids[b]).expect("generator of this class");
                        let concrete = hs.collinear(la, lb)?;
                        let (s, u) = (hb.signed()[a], hb.signed()[b]);
                        let count = model.halfspin_count_containing(&s, &u)?;
                        let ok = concrete == model.model_collinear(&s, &u)
                            && (count == threshold) == concrete;
                        o.check(ok);
                        let rel = if concrete { "collinear" } else { "other" };
                        *rows
                            .entry(format!(
                                "{},concrete,{rel},{count},{threshold},{ok}",
                                delta.symbol()
                            ))
                            .or_insert(0) += 1;
                    }
                }
            }
        }
    }
    o.rows = aggregate(rows);
    Ok(("delta,source,relation,count,threshold,ok,pairs", vec![o]))
}

fn oracle(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let space = ctx.space();
    let spec = space.spec();
    let n = space.rank();
    let random_subsets = ctx.samples(500, 50);
    let frame_count = ctx.samples(20, 2);
    let brute = expected_frame_count(spec) <= FULL_FAMILY_LIMIT;
    let family = if brute {
        Some(FrameFamily::full(space)?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed);
    let mut outs = Vec::new();
    for &k in levels {
        let model = ApartmentModel::grassmann(n, k, space.kind())?;
        let mut o = Outcome::new(Some(k), None);
        o.mode = sampled(ctx, "2 frames, 50 random subsets, 5 brute-force frames")
            .unwrap_or_else(|| format!("{frame_count} frames, {random_subsets} random subsets"));
        let frames = sample_frames(space, frame_count, ctx.seed.wrapping_add(k as u64));
        let mut tested: Vec<(usize, String, FixedBitSet)> = Vec::new();
        for (t, _) in frames.iter().enumerate() {
            for (d, set) in descriptor_sets(&model) {
                // one random outside member must make it exact
                let outside: Vec<usize> = (0..model.len()).filter(|&x| !set.contains(x)).collect();
                if let Some(&x) = outside.choose(&mut rng) {
                    let mut bigger = set.clone();
                    bigger.insert(x);
                    tested.push((t, format!("{}+{x}", fmt_max_inexact(d)), bigger));
                }
                tested.push((t, fmt_max_inexact(d), set));
            }
            for i in 0..2 * n {
                tested.push((t, format!("B(-{i})"), model.select(&[Sign::Minus(i)])));
            }
            tested.push((t, "full".into(), model.full()));
        }
        for r in 0..random_subsets {
            let t = r % frames.len();
            let size = rng.random_range(1..=model.len());
            let idx: Vec<usize> = (0..model.len()).collect();
            let mut set = FixedBitSet::with_capacity(model.len());
            for &i in idx.choose_multiple(&mut rng, size) {
                set.insert(i);
            }
            tested.push((t, format!("random{r}"), set));
        }
        let subsets: Vec<_> = frames
            .iter()
            .map(|f| base_subset(space, f, k))
            .collect::<Result<_>>()?;
        for (t, label, set) in tested {
            let r: Vec<Subspace> = set
                .ones()
                .map(|i| subsets[t].members()[i].clone())
                .collect();
            let found = frames_containing(space, &r, 2)?.len();
            let model_exact = model.is_exact(&set);
            let ok = (found == 1) == model_exact && found >= 1;
            o.check(ok);
            o.rows.push(format!(
                "{k},{t},{label},{},{model_exact},{found},{ok}",
                set.count_ones(..)
            ));
        }
        if let Some(family) = &family {
            let level = family.level(k)?;
            let want: Vec<u32> = descriptor_masks(&model).into_iter().map(|x| x.1).collect();
            let picks = ctx.samples(50, 5);
            let all: Vec<usize> = (0..level.len()).collect();
            let mut chosen: Vec<usize> = all.choose_multiple(&mut rng, picks).copied().collect();
            chosen.sort_unstable();
            for f in chosen {
                let got = level.maximal_intersections(f)?;
                let ok = got == want;
                o.check(ok);
                o.rows.push(format!(
                    "{k},family{f},brute_maximal_inexact,{},{},{},{ok}",
                    got.len(),
                    want.len(),
                    family.len()
                ));
            }
        }
        outs.push(o);
    }
    Ok(("k,frame,subset,size,model_exact,frames_found,ok", outs))
}

fn reconstruct(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let family = FrameFamily::full(ctx.space())?;
    let mut outs = Vec::new();
    let mut reports = Vec::new();
    for &k in levels {
        let rep = reconstruct_collinearity(&family, k)?;
        let mut o = Outcome::new(Some(k), None);
        o.check(rep.equal);
        if let Some(w) = &rep.weak {
            o.check(w.equal);
        }
        for line in rep.diff_csv().lines().skip(1) {
            o.rows.push(format!("{k},{line}"));
        }
        let json = serde_json::to_string_pretty(&rep).expect("report serializes") + "\n";
        reports.push((format!("reconstruct_k{k}.json"), json));
        outs.push(o);
    }
    drop(family);
    ctx.reports.extend(reports);
    Ok(("k,a,b,recovered,truth", outs))
}

fn maps(ctx: &mut Ctx, levels: &[usize]) -> Result<(&'static str, Vec<Outcome>)> {
    let space = ctx.space();
    let count = ctx.samples(20, 5);
    let frames = ctx.samples(5, 2);
    let mut outs = Vec::new();
    for &k in levels {
        let mut o = Outcome::new(Some(k), None);
        o.mode = sampled(ctx, "5 maps")
            .unwrap_or_else(|| format!("{count} random maps, {frames} frames each"));
        for t in 0..count as u64 {
            let seed = ctx.seed.wrapping_mul(1_000_003).wrapping_add(t);
            let map = FormMap::random(space, seed, 6 + (t as usize % 5));
            let rep = verify_base_preserving_map(space, k, &map, frames, seed)?;
            o.check(rep.passed());
            o.rows.push(format!(
                "{k},{t},{},{},{},{},{}",
                rep.orbit_action
                    .map_or("-".into(), |a| format!("{a:?}").to_lowercase()),
                rep.base_subset_failures,
                rep.collinearity_failures + rep.weak_adjacency_failures,
                rep.halfspin_failures,
                rep.passed()
            ));
        }
        outs.push(o);
    }
    Ok((
        "k,map,orbit_action,base_subset_failures,adjacency_failures,halfspin_failures,ok",
        outs,
    ))
}
