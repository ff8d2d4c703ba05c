// The combinatorial model of a base subset: complement subsets, disjoint
// counts, and collinearity read off from c(S,U).

use polar_base::model::{ApartmentModel, Complement};
use polar_base::polar::FormKind;

pub fn run_example() -> (usize, usize, bool) {
    let m = ApartmentModel::grassmann(5, 2, FormKind::SymplecticC).unwrap();
    let comps = m.complements();
    let first = comps.iter().filter(|c| c.is_first_type()).count();
    println!(
        "{} members, {first} first-type and {} second-type complements",
        m.len(),
        comps.len() - first
    );

    let d = m
        .count_disjoint_complements(Complement::FirstType { i: 0 })
        .unwrap();
    println!(
        "disjoint from B(+0): {} sets, {} labels",
        d.distinct_sets, d.labelled
    );

    let m_c = m.m_c().unwrap();
    let mut agree = true;
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            let (s, u) = (m.element(a), m.element(b));
            agree &= m.collinear_by_count(&s, &u, m_c).unwrap() == m.model_collinear(&s, &u);
        }
    }
    println!("m_c = {m_c}, collinear exactly when c = m_c: {agree}");
    (m.len(), m_c, agree)
}

#[allow(dead_code)]
fn main() {
    run_example();
}
