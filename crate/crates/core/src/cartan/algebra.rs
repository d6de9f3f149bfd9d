//! Associative algebra spanned by a matrix family, and the dichotomy for
//! paired spanning representations.

use crate::linalg::Matrix;
use crate::{ExactMatrix, Field, Rational};

use super::CartanError;

/// Incremental row-echelon basis of a subspace of `T^n`.
struct Echelon<T> {
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: Field> Echelon<T> {
    fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    /// Reduces `v` against the basis; inserts and returns `true` when it is
    /// independent.
    fn insert(&mut self, mut v: Vec<T>) -> bool {
        for (pivot, row) in &self.rows {
            let c = v[*pivot].clone();
            if c.is_negligible() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.clone() - c.clone() * r.clone();
            }
        }
        let pivot = match v.iter().position(|x| !x.is_negligible()) {
            Some(p) => p,
            None => return false,
        };
        let lead = v[pivot].clone();
        for x in v.iter_mut() {
            *x = x.clone() / lead.clone();
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot].clone();
            if c.is_negligible() {
                continue;
            }
            for (x, r) in row.iter_mut().zip(&v) {
                *x = x.clone() - c.clone() * r.clone();
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Dimension and a basis of the unital algebra generated by `gens`.
///
/// Starting from the identity, every new basis element is multiplied on the
/// right by each generator until no product leaves the span.
pub fn algebra_closure<T: Field>(gens: &[Matrix<T>]) -> Result<(usize, Vec<Matrix<T>>), CartanError> {
    let d = gens.first().ok_or(CartanError::EmptyFamily)?.rows();
    if gens.iter().any(|g| g.rows() != d || g.cols() != d) {
        return Err(CartanError::NotSquare);
    }
    let mut ech = Echelon::new();
    let mut basis = Vec::new();
    let id = Matrix::<T>::identity(d);
    ech.insert(id.data().to_vec());
    basis.push(id);
    let mut next = 0;
    while next < basis.len() {
        let b = basis[next].clone();
        next += 1;
        for g in gens {
            let prod = &b * g;
            if ech.insert(prod.data().to_vec()) {
                basis.push(prod);
                if basis.len() == d * d {
                    return Ok((basis.len(), basis));
                }
            }
        }
    }
    Ok((basis.len(), basis))
}

/// Outcome of [`goursat_analyze`].
#[derive(Debug, Clone, PartialEq)]
pub enum GoursatVerdict {
    /// The paired family spans the full product algebra.
    Full,
    /// `rho2(g) h = h rho1(g)` for every pair, with `h` invertible and
    /// normalized so its first nonzero entry is one.
    Conjugate { h: ExactMatrix },
}

/// Decides which alternative holds for a family of pairs
/// `(rho1(g), rho2(g))` whose components are each spanning.
pub fn goursat_analyze(pairs: &[(ExactMatrix, ExactMatrix)]) -> Result<GoursatVerdict, CartanError> {
    if pairs.is_empty() {
        return Err(CartanError::EmptyFamily);
    }
    let left: Vec<ExactMatrix> = pairs.iter().map(|p| p.0.clone()).collect();
    let right: Vec<ExactMatrix> = pairs.iter().map(|p| p.1.clone()).collect();
    let m = left[0].rows();
    let n = right[0].rows();
    for (fam, d) in [(&left, m), (&right, n)] {
        let (dim, _) = algebra_closure(fam)?;
        if dim != d * d {
            return Err(CartanError::NotSpanning { dimension: dim, expected: d * d });
        }
    }
    let paired: Vec<ExactMatrix> = pairs
        .iter()
        .map(|(a, b)| ExactMatrix::block_diag(&[a.clone(), b.clone()]))
        .collect();
    let (dim, _) = algebra_closure(&paired)?;
    if dim == m * m + n * n {
        return Ok(GoursatVerdict::Full);
    }
    if m != n {
        return Err(CartanError::Inconsistent);
    }
    // columns: images of the elementary matrices under h -> B h - h A,
    // stacked over all pairs
    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(n * n);
    for idx in 0..n * n {
        let mut e = ExactMatrix::zeros(n, n);
        e[(idx / n, idx % n)] = Rational::from_integer(1.into());
        let mut col = Vec::with_capacity(pairs.len() * n * n);
        for (a, b) in pairs {
            let lhs = b * &e;
            let rhs = &e * a;
            col.extend(lhs.data().iter().zip(rhs.data()).map(|(x, y)| x - y));
        }
        cols.push(col);
    }
    let rows = cols[0].len();
    let system = ExactMatrix::from_vec(
        rows,
        n * n,
        (0..rows)
            .flat_map(|r| cols.iter().map(move |c| c[r].clone()))
            .collect(),
    )
    .expect("shape");
    for v in system.nullspace() {
        let lead = match v.iter().find(|x| !num_traits::Zero::is_zero(*x)) {
            Some(l) => l.clone(),
            None => continue,
        };
        let h = ExactMatrix::from_vec(n, n, v.iter().map(|x| x / &lead).collect()).expect("shape");
        if h.determinant().map(|d| !num_traits::Zero::is_zero(&d)).unwrap_or(false) {
            return Ok(GoursatVerdict::Conjugate { h });
        }
    }
    Err(CartanError::Inconsistent)
}
