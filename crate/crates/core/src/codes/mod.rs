//! Classical linear codes over GF(2^t): Reed-Solomon generators, generalized
//! RS dual coefficients, interpolation vectors, puncturing and shortening.

mod matrix;

pub use matrix::{axpy, star, weight, MatF, Rref};

use crate::error::{check_budget, sat_pow, Error, Result};
use crate::gf::{Elem, FieldCtx};

/// Distinct evaluation points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPoints(Vec<Elem>);

impl EvalPoints {
    pub fn new(field: &FieldCtx, points: Vec<Elem>) -> Result<EvalPoints> {
        let mut seen = vec![false; field.q() as usize];
        for &p in &points {
            if !field.contains(p) {
                return Err(Error::Invalid(format!("{p} is not an element of GF({})", field.q())));
            }
            if std::mem::replace(&mut seen[p.0 as usize], true) {
                return Err(Error::Invalid(format!("evaluation point {p} repeated")));
            }
        }
        Ok(EvalPoints(points))
    }

    /// The first `n` field elements in encoding order.
    pub fn first(field: &FieldCtx, n: usize) -> Result<EvalPoints> {
        if n > field.q() as usize {
            return Err(Error::Bound(format!("N = {n} exceeds q = {}", field.q())));
        }
        Ok(EvalPoints((0..n as u32).map(Elem).collect()))
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// m×N matrix whose row a evaluates x^a at every point.
pub fn rs_generator(field: &FieldCtx, pts: &EvalPoints, m: usize) -> Result<MatF> {
    let n = pts.len();
    if m == 0 || m >= n || n > field.q() as usize {
        return Err(Error::Bound(format!("0 < m < N <= q needs m = {m}, N = {n}, q = {}", field.q())));
    }
    vandermonde(field, pts.as_slice(), m)
}

fn vandermonde(field: &FieldCtx, pts: &[Elem], rows: usize) -> Result<MatF> {
    let data = (0..rows).map(|a| pts.iter().map(|&p| field.pow(p, a as u64)).collect()).collect();
    MatF::from_rows(field, pts.len(), data)
}

/// ν with Σ ν_i f(p_i) = 0 for all deg f < N−1, scaled so ν_N = 1.
pub fn grs_dual_coeffs(field: &FieldCtx, pts: &EvalPoints) -> Result<Vec<Elem>> {
    let n = pts.len();
    if n < 2 {
        return Err(Error::Invalid("dual coefficients need at least two points".into()));
    }
    let ns = vandermonde(field, pts.as_slice(), n - 1)?.nullspace();
    debug_assert_eq!(ns.rows(), 1);
    let v = ns.row(0);
    let scale = field.inv(v[n - 1])?;
    Ok(v.iter().map(|&x| field.mul(x, scale)).collect())
}

/// Γ with f(target) = Σ Γ_i f(p_i) for every deg f < |pts|.
pub fn interpolation_vector(field: &FieldCtx, target: Elem, pts: &EvalPoints) -> Result<Vec<Elem>> {
    if pts.as_slice().contains(&target) {
        return Err(Error::Invalid(format!("target {target} is an evaluation point")));
    }
    if pts.is_empty() {
        return Err(Error::Invalid("interpolation needs at least one point".into()));
    }
    let mut all = Vec::with_capacity(pts.len() + 1);
    all.push(target);
    all.extend_from_slice(pts.as_slice());
    let nu = grs_dual_coeffs(field, &EvalPoints::new(field, all)?)?;
    let scale = field.inv(nu[0])?;
    Ok(nu[1..].iter().map(|&x| field.mul(x, scale)).collect())
}

/// Row-reduces the first `k` columns to (I_k; 0) and returns the remaining
/// columns split as (G1, G0).
pub fn partially_systematic(m: &MatF, k: usize) -> Result<(MatF, MatF)> {
    let reduced = systematic_rows(m, k)?;
    let tail: Vec<usize> = (k..m.cols()).collect();
    let g = reduced.select_cols(&tail);
    Ok((g.select_rows(0..k), g.select_rows(k..m.rows())))
}

fn systematic_rows(m: &MatF, k: usize) -> Result<MatF> {
    if k > m.rows() || k > m.cols() {
        return Err(Error::Dimension(format!("k = {k} for a {}x{} matrix", m.rows(), m.cols())));
    }
    let f = m.field().clone();
    let mut w = m.clone();
    for c in 0..k {
        let p = (c..w.rows())
            .find(|&r| !w.get(r, c).is_zero())
            .ok_or_else(|| Error::RankDeficient(format!("first {k} columns have rank < {k}")))?;
        w.swap_rows(p, c);
        let inv = f.inv(w.get(c, c))?;
        for v in w.row_mut(c) {
            *v = f.mul(*v, inv);
        }
        let pivot = w.row(c).to_vec();
        for r in 0..w.rows() {
            let factor = w.get(r, c);
            if r != c && !factor.is_zero() {
                axpy(&f, w.row_mut(r), factor, &pivot);
            }
        }
    }
    Ok(w)
}

/// Deletes the columns in `t`.
pub fn puncture(m: &MatF, t: &[usize]) -> MatF {
    let keep: Vec<usize> = (0..m.cols()).filter(|c| !t.contains(c)).collect();
    m.select_cols(&keep)
}

/// Basis of the codewords vanishing on `t`, with those columns deleted.
pub fn shorten(m: &MatF, t: &[usize]) -> MatF {
    // x·M|_T = 0  <=>  x ∈ nullspace((M|_T)^T)
    let combos = m.select_cols(t).transpose().nullspace();
    let mut sub = MatF::zeros(m.field(), 0, m.cols());
    for r in 0..combos.rows() {
        sub.push_row(&m.combine_rows(combos.row(r))).expect("width matches");
    }
    puncture(&sub.row_basis(), t)
}

/// Minimum Hamming weight of the row space by exhaustive enumeration of
/// coefficient vectors in lexicographic order. `None` for the zero code.
pub fn min_weight_bruteforce(m: &MatF, budget: u128) -> Result<Option<usize>> {
    let basis = m.row_basis();
    let r = basis.rows();
    if r == 0 {
        return Ok(None);
    }
    let f = m.field();
    let q = f.q();
    check_budget(sat_pow(q as u128, r), budget)?;
    let n = m.cols();
    let mut digits = vec![0u32; r];
    let mut word = vec![Elem::ZERO; n];
    let mut best = usize::MAX;
    loop {
        // Odometer step with the last digit fastest; the word is updated
        // by the differences of the changed digits.
        let mut pos = r;
        loop {
            if pos == 0 {
                return Ok(Some(best));
            }
            pos -= 1;
            let old = digits[pos];
            if old + 1 < q {
                digits[pos] = old + 1;
                axpy(f, &mut word, Elem(old ^ (old + 1)), basis.row(pos));
                break;
            }
            digits[pos] = 0;
            axpy(f, &mut word, Elem(old), basis.row(pos));
        }
        best = best.min(weight(&word));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> FieldCtx {
        FieldCtx::new(2).unwrap()
    }

    #[test]
    fn rs_generator_gf4() {
        let f = gf4();
        let pts = EvalPoints::new(&f, vec![Elem(0), Elem(1), Elem(2)]).unwrap();
        let g = rs_generator(&f, &pts, 2).unwrap();
        assert_eq!(g, MatF::from_u32(&f, &[&[1, 1, 1], &[0, 1, 2]]).unwrap());
        let g1 = rs_generator(&f, &pts, 1).unwrap();
        assert_eq!(g1, MatF::from_u32(&f, &[&[1, 1, 1]]).unwrap());
        assert!(rs_generator(&f, &pts, 3).is_err());
        assert_eq!(min_weight_bruteforce(&g, 1 << 10).unwrap(), Some(2));
    }

    #[test]
    fn grs_gf4_example() {
        let f = gf4();
        let pts = EvalPoints::new(&f, vec![Elem(0), Elem(1), Elem(2)]).unwrap();
        assert_eq!(grs_dual_coeffs(&f, &pts).unwrap(), vec![Elem(3), Elem(2), Elem(1)]);
    }

    #[test]
    fn grs_full_field_is_all_ones() {
        let f = FieldCtx::new(3).unwrap();
        let pts = EvalPoints::first(&f, 8).unwrap();
        assert_eq!(grs_dual_coeffs(&f, &pts).unwrap(), vec![Elem::ONE; 8]);
    }

    #[test]
    fn interpolation_gf4_example() {
        let f = gf4();
        let pts = EvalPoints::new(&f, vec![Elem(0), Elem(1)]).unwrap();
        assert_eq!(interpolation_vector(&f, Elem(2), &pts).unwrap(), vec![Elem(3), Elem(2)]);
        let one = EvalPoints::new(&f, vec![Elem(3)]).unwrap();
        assert_eq!(interpolation_vector(&f, Elem(2), &one).unwrap(), vec![Elem(1)]);
        assert!(interpolation_vector(&f, Elem(0), &pts).is_err());
    }

    #[test]
    fn partially_systematic_gf4() {
        let f = gf4();
        let pts = EvalPoints::new(&f, vec![Elem(0), Elem(1), Elem(2)]).unwrap();
        let g = rs_generator(&f, &pts, 2).unwrap();
        let (g1, g0) = partially_systematic(&g, 1).unwrap();
        assert_eq!((g1.rows(), g1.cols(), g0.rows(), g0.cols()), (1, 2, 1, 2));
        // Column 0 becomes (1, 0): row 0 = [1,1,1], row 1 = [0,1,ω].
        assert_eq!(g1, MatF::from_u32(&f, &[&[1, 1]]).unwrap());
        assert_eq!(g0, MatF::from_u32(&f, &[&[1, 2]]).unwrap());
        let sys = MatF::from_u32(&f, &[&[1, 0, 3], &[0, 1, 2]]).unwrap();
        let (a, b) = partially_systematic(&sys, 2).unwrap();
        assert_eq!(a, MatF::from_u32(&f, &[&[3], &[2]]).unwrap());
        assert_eq!(b.rows(), 0);
        let bad = MatF::from_u32(&f, &[&[0, 1, 1], &[0, 1, 2]]).unwrap();
        assert!(matches!(partially_systematic(&bad, 1), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn puncture_and_shorten() {
        let f = gf4();
        assert_eq!(puncture(&MatF::identity(&f, 3), &[1]).cols(), 2);
        let g = rs_generator(&f, &EvalPoints::first(&f, 4).unwrap(), 2).unwrap();
        assert_eq!(shorten(&g, &[0]).rows(), 1);
    }

    #[test]
    fn min_weight_identity_and_budget() {
        let f = FieldCtx::new(3).unwrap();
        assert_eq!(min_weight_bruteforce(&MatF::identity(&f, 3), 1 << 12).unwrap(), Some(1));
        assert!(matches!(min_weight_bruteforce(&MatF::identity(&f, 3), 100), Err(Error::Budget { .. })));
        assert_eq!(min_weight_bruteforce(&MatF::zeros(&f, 2, 3), 10).unwrap(), None);
    }
}
