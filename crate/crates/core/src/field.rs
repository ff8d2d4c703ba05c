//! Exact linear algebra over the small prime fields GF(2), GF(3) and GF(5).
//!
//! Vectors are fixed-capacity coordinate arrays (at most 16 coordinates), and
//! every [`Subspace`] is stored in reduced row-echelon form with rows sorted
//! by pivot column, so structural equality and hashing coincide with equality
//! of subspaces.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// A prime field GF(p) with p in {2, 3, 5}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        match p {
            2 | 3 | 5 => Ok(PrimeField { p: p as u8 }),
            _ => Err(Error::UnsupportedField(p)),
        }
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        (a * b) % self.p
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        (self.p - a) % self.p
    }

    /// Multiplicative inverse; `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(!a.is_multiple_of(self.p), "inverse of zero");
        // a^(p-2) by Fermat; p <= 5 keeps this to a couple of multiplications.
        let mut r = 1u8;
        for _ in 0..self.p - 2 {
            r = self.mul(r, a);
        }
        r
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldScalar> + '_ {
        (0..self.p).map(move |v| FieldScalar {
            value: v,
            p: self.p,
        })
    }

    pub fn scalar(&self, value: u32) -> FieldScalar {
        FieldScalar {
            value: (value % self.p as u32) as u8,
            p: self.p,
        }
    }
}

/// A residue modulo a supported prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u8,
    p: u8,
}

impl FieldScalar {
    #[inline]
    pub fn value(&self) -> u8 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(&self) -> Option<FieldScalar> {
        (self.value != 0).then(|| FieldScalar {
            value: self.field().inv(self.value),
            p: self.p,
        })
    }
}

impl Add for FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            value: self.field().add(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Sub for FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            value: self.field().sub(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Mul for FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.p, rhs.p);
        FieldScalar {
            value: self.field().mul(self.value, rhs.value),
            p: self.p,
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> Self {
        FieldScalar {
            value: self.field().neg(self.value),
            p: self.p,
        }
    }
}

/// A coordinate vector of length at most [`MAX_DIM`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    len: u8,
    coords: [u8; MAX_DIM],
}

impl Vector {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM);
        Vector {
            len: len as u8,
            coords: [0; MAX_DIM],
        }
    }

    /// Builds a vector from raw residues. Entries are reduced modulo `field.p()`.
    pub fn from_slice(field: PrimeField, coords: &[u8]) -> Result<Self> {
        if coords.len() > MAX_DIM {
            return Err(Error::AmbientTooLarge(coords.len()));
        }
        let mut v = Vector::zero(coords.len());
        for (dst, &c) in v.coords.iter_mut().zip(coords) {
            *dst = c % field.p();
        }
        Ok(v)
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Vector::zero(len);
        v.coords[i] = 1;
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn coords(&self) -> &[u8] {
        &self.coords[..self.len as usize]
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.coords[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u8) {
        self.coords[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&c| c == 0)
    }

    pub fn leading(&self) -> Option<usize> {
        self.coords().iter().position(|&c| c != 0)
    }

    pub fn add(&self, field: PrimeField, other: &Vector) -> Vector {
        let mut out = *self;
        for i in 0..self.len() {
            out.coords[i] = field.add(self.coords[i], other.coords[i]);
        }
        out
    }

    pub fn scale(&self, field: PrimeField, a: u8) -> Vector {
        let mut out = *self;
        for c in out.coords[..self.len()].iter_mut() {
            *c = field.mul(*c, a);
        }
        out
    }

    /// `self + a * other`
    pub fn axpy(&self, field: PrimeField, a: u8, other: &Vector) -> Vector {
        let mut out = *self;
        if a == 0 {
            return out;
        }
        for i in 0..self.len() {
            out.coords[i] = field.add(self.coords[i], field.mul(a, other.coords[i]));
        }
        out
    }

    pub fn dot(&self, field: PrimeField, other: &Vector) -> u8 {
        let mut acc = 0u32;
        for i in 0..self.len() {
            acc += self.coords[i] as u32 * other.coords[i] as u32;
        }
        (acc % field.p() as u32) as u8
    }

    /// Scales so that the first nonzero coordinate is 1. Zero stays zero.
    pub fn normalized(&self, field: PrimeField) -> Vector {
        match self.leading() {
            Some(i) => self.scale(field, field.inv(self.coords[i])),
            None => *self,
        }
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector({self})")
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.coords() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A linear subspace in canonical reduced row-echelon form.
///
/// Rows are ordered by strictly increasing pivot column, each pivot entry is 1
/// and every other entry of a pivot column is 0. Two `Subspace` values are equal
/// exactly when they describe the same subspace.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: u8,
    rows: Vec<Vector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient: ambient as u8,
            rows: Vec::new(),
        }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient as usize
    }

    #[inline]
    pub fn rows(&self) -> &[Vector] {
        &self.rows
    }

    /// Linear dimension (number of basis rows).
    #[inline]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Projective dimension; the zero subspace has dimension -1.
    #[inline]
    pub fn proj_dim(&self) -> isize {
        self.rows.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows
            .iter()
            .map(|r| r.leading().expect("rref rows are nonzero"))
    }

    /// Textual encoding: rows as digit strings joined by `;`.
    pub fn encode(&self) -> String {
        self.rows
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace[{}]", self.encode())
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// The ambient space GF(p)^dim; all subspace operations go through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    field: PrimeField,
    dim: usize,
}

impl Ambient {
    pub fn new(field: PrimeField, dim: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::AmbientTooLarge(dim));
        }
        Ok(Ambient { field, dim })
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, coords: &[u8]) -> Result<Vector> {
        self.check_len(coords.len())?;
        Vector::from_slice(self.field, coords)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    fn check_subspace(&self, s: &Subspace) -> Result<()> {
        self.check_len(s.ambient_dim())
    }

    /// Canonical representative of the row span of `rows`.
    pub fn canonicalize(&self, rows: &[Vector]) -> Result<Subspace> {
        for r in rows {
            self.check_len(r.len())?;
        }
        Ok(self.span_unchecked(rows.to_vec()))
    }

    pub(crate) fn span_unchecked(&self, mut rows: Vec<Vector>) -> Subspace {
        rref(self.field, &mut rows);
        Subspace {
            ambient: self.dim as u8,
            rows,
        }
    }

    pub fn span_of(&self, rows: &[Vector]) -> Subspace {
        self.span_unchecked(rows.to_vec())
    }

    pub fn point(&self, v: &Vector) -> Result<Subspace> {
        if v.is_zero() {
            return Err(Error::Invalid("zero vector does not span a point".into()));
        }
        self.canonicalize(std::slice::from_ref(v))
    }

    pub fn sum(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        self.check_subspace(a)?;
        self.check_subspace(b)?;
        Ok(self.sum_unchecked(a, b))
    }

    pub(crate) fn sum_unchecked(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut rows = Vec::with_capacity(a.rank() + b.rank());
        rows.extend_from_slice(&a.rows);
        rows.extend_from_slice(&b.rows);
        self.span_unchecked(rows)
    }

    /// Intersection, computed as the annihilator of the sum of annihilators.
    pub fn intersect(&self, a: &Subspace, b: &Subspace) -> Result<Subspace> {
        self.check_subspace(a)?;
        self.check_subspace(b)?;
        Ok(self.intersect_unchecked(a, b))
    }

    pub(crate) fn intersect_unchecked(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let ann_a = self.null_space_of(&a.rows);
        let ann_b = self.null_space_of(&b.rows);
        let both = self.sum_unchecked(&ann_a, &ann_b);
        self.null_space_of(&both.rows)
    }

    /// Linear dimension of `a ∩ b`, via `dim a + dim b - dim(a + b)`.
    pub fn meet_rank(&self, a: &Subspace, b: &Subspace) -> usize {
        a.rank() + b.rank() - self.sum_unchecked(a, b).rank()
    }

    /// True iff `b ⊆ a`.
    pub fn contains(&self, a: &Subspace, b: &Subspace) -> Result<bool> {
        self.check_subspace(a)?;
        self.check_subspace(b)?;
        Ok(b.rows.iter().all(|r| self.contains_vector(a, r)))
    }

    pub fn contains_vector(&self, a: &Subspace, v: &Vector) -> bool {
        // Reduce v against the rref basis; pivots make this a single pass.
        let mut w = *v;
        for row in &a.rows {
            let piv = row.leading().unwrap();
            let c = w.get(piv);
            if c != 0 {
                w = w.axpy(self.field, self.field.neg(c), row);
            }
        }
        w.is_zero()
    }

    /// `{x : r · x = 0 for every r in rows}` under the standard dot product.
    pub fn null_space_of(&self, rows: &[Vector]) -> Subspace {
        let mut m = rows.to_vec();
        rref(self.field, &mut m);
        let pivots: Vec<usize> = m.iter().map(|r| r.leading().unwrap()).collect();
        let mut basis = Vec::with_capacity(self.dim - pivots.len());
        for free in 0..self.dim {
            if pivots.contains(&free) {
                continue;
            }
            let mut x = Vector::zero(self.dim);
            x.set(free, 1);
            for (row, &piv) in m.iter().zip(&pivots) {
                x.set(piv, self.field.neg(row.get(free)));
            }
            basis.push(x);
        }
        self.span_unchecked(basis)
    }

    /// Every projective point of `s`, as normalized vectors in lexicographic order.
    pub fn points_of(&self, s: &Subspace) -> Vec<Vector> {
        let r = s.rank();
        let q = self.field.p() as usize;
        let mut out = Vec::new();
        for lead in 0..r {
            // coefficient vectors with c_lead = 1 and c_j = 0 for j < lead
            let tail = r - lead - 1;
            let count = q.pow(tail as u32);
            for code in 0..count {
                let mut v = s.rows[lead];
                let mut c = code;
                for j in lead + 1..r {
                    let a = (c % q) as u8;
                    c /= q;
                    v = v.axpy(self.field, a, &s.rows[j]);
                }
                out.push(v);
            }
        }
        out.sort();
        out
    }

    /// All subspaces of `s` with the given linear dimension, in canonical order.
    pub fn subspaces_of(&self, s: &Subspace, rank: usize) -> Vec<Subspace> {
        let d = s.rank();
        if rank > d {
            return Vec::new();
        }
        let mut out = Vec::new();
        for coeffs in rref_matrices(self.field, rank, d) {
            let rows: Vec<Vector> = coeffs
                .iter()
                .map(|c| {
                    let mut v = Vector::zero(self.dim);
                    for (j, &a) in c.iter().enumerate() {
                        v = v.axpy(self.field, a, &s.rows[j]);
                    }
                    v
                })
                .collect();
            out.push(self.span_unchecked(rows));
        }
        out.sort();
        out
    }

    /// Applies a linear map given by `image_of_unit[i] = M e_i`, i.e. `x ↦ Σ x_i M e_i`.
    pub fn apply(&self, image_of_unit: &[Vector], v: &Vector) -> Vector {
        let mut out = Vector::zero(self.dim);
        for (i, img) in image_of_unit.iter().enumerate() {
            out = out.axpy(self.field, v.get(i), img);
        }
        out
    }

    pub fn image(&self, image_of_unit: &[Vector], s: &Subspace) -> Subspace {
        let rows: Vec<Vector> = s
            .rows
            .iter()
            .map(|r| self.apply(image_of_unit, r))
            .collect();
        self.span_unchecked(rows)
    }

    /// Parses the `"101;011"` encoding.
    pub fn decode(&self, text: &str) -> Result<Subspace> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Subspace::zero(self.dim));
        }
        let mut rows = Vec::new();
        for part in text.split(';') {
            let mut coords = Vec::with_capacity(part.len());
            for ch in part.chars() {
                let d = ch.to_digit(10).ok_or_else(|| Error::Parse {
                    what: "subspace",
                    detail: format!("non-digit {ch:?} in {part:?}"),
                })?;
                if d >= self.field.p() as u32 {
                    return Err(Error::Parse {
                        what: "subspace",
                        detail: format!("digit {d} out of range for GF({})", self.field.p()),
                    });
                }
                coords.push(d as u8);
            }
            rows.push(self.vector(&coords)?);
        }
        let s = self.span_unchecked(rows);
        Ok(s)
    }
}

/// In-place reduced row-echelon form; zero rows are dropped.
fn rref(field: PrimeField, rows: &mut Vec<Vector>) {
    if rows.is_empty() {
        return;
    }
    let width = rows[0].len();
    let mut r = 0;
    for col in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i].get(col) != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = field.inv(rows[r].get(col));
        rows[r] = rows[r].scale(field, inv);
        let pivot_row = rows[r];
        for i in 0..rows.len() {
            if i != r {
                let c = rows[i].get(col);
                if c != 0 {
                    rows[i] = rows[i].axpy(field, field.neg(c), &pivot_row);
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
}

/// Every `rank x width` matrix over the field in reduced row-echelon form.
fn rref_matrices(field: PrimeField, rank: usize, width: usize) -> Vec<Vec<Vec<u8>>> {
    let q = field.p() as usize;
    let mut out = Vec::new();
    for pivots in combinations(width, rank) {
        // free slots: (row, col) with col > pivot[row] and col not a pivot
        let slots: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| {
                let piv = &pivots;
                (piv[i] + 1..width)
                    .filter(move |c| !piv.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let total = q.pow(slots.len() as u32);
        for code in 0..total {
            let mut m = vec![vec![0u8; width]; rank];
            for (i, &p) in pivots.iter().enumerate() {
                m[i][p] = 1;
            }
            let mut c = code;
            for &(i, col) in &slots {
                m[i][col] = (c % q) as u8;
                c /= q;
            }
            out.push(m);
        }
    }
    out
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn unsupported_primes_are_rejected() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(7).is_err());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2, 3, 5] {
            let f = gf(p);
            let els: Vec<_> = f.elements().collect();
            let zero = f.scalar(0);
            let one = f.scalar(1);
            for &a in &els {
                assert_eq!(a + zero, a);
                assert_eq!(a * one, a);
                assert_eq!(a + (-a), zero);
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), one);
                }
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!((a - b) + b, a);
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn canonicalize_gf2_example() {
        let amb = Ambient::new(gf(2), 3).unwrap();
        let rows = [
            amb.vector(&[1, 1, 0]).unwrap(),
            amb.vector(&[0, 1, 1]).unwrap(),
        ];
        let s = amb.canonicalize(&rows).unwrap();
        assert_eq!(s.encode(), "101;011");
        assert_eq!(s.proj_dim(), 1);
    }

    #[test]
    fn canonicalize_empty_and_scaling() {
        let amb = Ambient::new(gf(3), 3).unwrap();
        let empty = amb.canonicalize(&[]).unwrap();
        assert_eq!(empty.proj_dim(), -1);
        assert!(empty.is_zero());
        let s = amb
            .canonicalize(&[amb.vector(&[0, 2, 0]).unwrap()])
            .unwrap();
        assert_eq!(s.encode(), "010");
    }

    #[test]
    fn length_mismatch_is_an_input_error() {
        let amb = Ambient::new(gf(2), 3).unwrap();
        let v = Vector::from_slice(gf(2), &[1, 0]).unwrap();
        assert!(matches!(
            amb.canonicalize(&[v]),
            Err(Error::DimensionMismatch { .. })
        ));
        let other = Ambient::new(gf(2), 4).unwrap();
        let a = other.span_of(&[Vector::unit(4, 0)]);
        let b = amb.span_of(&[Vector::unit(3, 0)]);
        assert!(amb.sum(&a, &b).is_err());
        assert!(amb.intersect(&a, &b).is_err());
    }

    #[test]
    fn coordinate_intersection_and_sum() {
        let amb = Ambient::new(gf(2), 4).unwrap();
        let e = |i| Vector::unit(4, i);
        let a = amb.span_of(&[e(0), e(1)]);
        let b = amb.span_of(&[e(1), e(2)]);
        assert_eq!(amb.intersect(&a, &b).unwrap(), amb.span_of(&[e(1)]));
        assert_eq!(amb.sum(&a, &a).unwrap(), a);
        assert_eq!(amb.sum(&a, &b).unwrap().rank(), 3);
        assert!(amb.contains(&amb.sum(&a, &b).unwrap(), &a).unwrap());
        assert!(!amb.contains(&a, &b).unwrap());
    }

    #[test]
    fn points_and_subspaces_counts() {
        let amb = Ambient::new(gf(3), 4).unwrap();
        let full = amb.span_of(&(0..4).map(|i| Vector::unit(4, i)).collect::<Vec<_>>());
        assert_eq!(amb.points_of(&full).len(), 40);
        // Gaussian binomial [4 choose 2]_3 = 130
        assert_eq!(amb.subspaces_of(&full, 2).len(), 130);
        assert_eq!(amb.subspaces_of(&full, 0), vec![Subspace::zero(4)]);
    }

    #[test]
    fn decode_round_trip_and_errors() {
        let amb = Ambient::new(gf(3), 3).unwrap();
        let s = amb.decode("102;012").unwrap();
        assert_eq!(s.encode(), "102;012");
        assert_eq!(amb.decode("").unwrap(), Subspace::zero(3));
        assert!(amb.decode("13x").is_err());
        assert!(amb.decode("103").is_err());
        assert!(amb.decode("10").is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(2, 3).is_empty());
    }
}
