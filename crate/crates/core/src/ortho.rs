//! Orthogonality witnesses for generator matrices G = [G1; G0], and the
//! multiplication-property route that produces them from classical codes.
//!
//! A tuple sum is Σ_i Γ_i g^{a_1}_i ··· g^{a_ℓ}_i over rows of G. All
//! predicates enumerate non-decreasing row tuples only: the sums are
//! symmetric in the tuple, and sorting a tuple never makes it
//! lexicographically larger, so the first violating sorted tuple is also the
//! first violating tuple overall.

use serde::{Deserialize, Serialize};

use crate::codes::interpolation_vector;
use crate::codes::{partially_systematic, rs_generator, star, EvalPoints, MatF};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthoKind {
    Plain,
    Strong,
    Addressable,
    AddressableStrong,
}

impl OrthoKind {
    pub fn is_addressable(self) -> bool {
        matches!(self, OrthoKind::Addressable | OrthoKind::AddressableStrong)
    }

    pub fn is_strong(self) -> bool {
        matches!(self, OrthoKind::Strong | OrthoKind::AddressableStrong)
    }
}

/// Weights Γ (one vector, or one per logical index) and targets τ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoWitness {
    pub kind: OrthoKind,
    pub ell: usize,
    pub tau: Vec<Elem>,
    pub gamma: Vec<Vec<Elem>>,
}

impl OrthoWitness {
    /// Checks shape invariants against an m×n matrix with k logical rows.
    pub fn validate(&self, g: &MatF, k: usize) -> Result<()> {
        if k > g.rows() {
            return Err(Error::Dimension(format!("k = {k} exceeds {} rows", g.rows())));
        }
        if self.ell == 0 {
            return Err(Error::Witness("ell must be positive".into()));
        }
        if self.tau.len() != k {
            return Err(Error::Witness(format!("tau has {} entries, k = {k}", self.tau.len())));
        }
        if self.tau.iter().any(|t| t.is_zero()) {
            return Err(Error::Witness("tau entries must be nonzero".into()));
        }
        let expected = if self.kind.is_addressable() { k } else { 1 };
        if self.gamma.len() != expected {
            return Err(Error::Witness(format!(
                "{:?} witness needs {expected} gamma vectors, found {}",
                self.kind,
                self.gamma.len()
            )));
        }
        if let Some(bad) = self.gamma.iter().find(|v| v.len() != g.cols()) {
            return Err(Error::Dimension(format!("gamma of length {} for {} columns", bad.len(), g.cols())));
        }
        Ok(())
    }
}

/// A violating tuple and the value found there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Address A for addressable kinds.
    pub address: Option<usize>,
    pub tuple: Vec<usize>,
    pub got: Elem,
    pub want: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthoCheck {
    pub checked: u64,
    pub violation: Option<Violation>,
}

impl OrthoCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Visits every non-decreasing tuple of `len` indices in `0..m`, in
/// lexicographic order, with the componentwise product of the chosen rows.
/// The visitor returns `false` to stop.
fn for_each_tuple_product(g: &MatF, len: usize, visit: &mut dyn FnMut(&[usize], &[Elem]) -> bool) {
    let f = g.field();
    let n = g.cols();
    let mut prefix = vec![vec![Elem::ONE; n]; len + 1];
    let mut tuple = vec![0usize; len];
    fn rec(
        f: &FieldCtx,
        g: &MatF,
        depth: usize,
        start: usize,
        tuple: &mut Vec<usize>,
        prefix: &mut Vec<Vec<Elem>>,
        visit: &mut dyn FnMut(&[usize], &[Elem]) -> bool,
    ) -> bool {
        if depth == tuple.len() {
            return visit(tuple, &prefix[depth]);
        }
        for a in start..g.rows() {
            tuple[depth] = a;
            let (lo, hi) = prefix.split_at_mut(depth + 1);
            for ((out, &p), &x) in hi[0].iter_mut().zip(&lo[depth]).zip(g.row(a)) {
                *out = f.mul(p, x);
            }
            if !rec(f, g, depth + 1, a, tuple, prefix, visit) {
                return false;
            }
        }
        true
    }
    rec(f, g, 0, 0, &mut tuple, &mut prefix, visit);
}

/// Evaluates the defining sums of the witness's orthogonality notion.
pub fn check_orthogonality(g: &MatF, k: usize, w: &OrthoWitness) -> Result<OrthoCheck> {
    w.validate(g, k)?;
    let f = g.field();
    let ells: Vec<usize> = if w.kind.is_strong() { (1..=w.ell).collect() } else { vec![w.ell] };
    let mut checked = 0u64;
    let mut violation = None;
    for ell in ells {
        for_each_tuple_product(g, ell, &mut |tuple, prod| {
            let diag = tuple.first() == tuple.last();
            let a0 = tuple[0];
            if w.kind.is_addressable() {
                for (addr, gamma) in w.gamma.iter().enumerate() {
                    checked += 1;
                    let got = f.dot(gamma, prod);
                    let want = if diag && a0 == addr { w.tau[addr] } else { Elem::ZERO };
                    if got != want {
                        violation = Some(Violation { address: Some(addr), tuple: tuple.to_vec(), got, want });
                        return false;
                    }
                }
            } else {
                checked += 1;
                let got = f.dot(&w.gamma[0], prod);
                let want = if diag && a0 < k { w.tau[a0] } else { Elem::ZERO };
                if got != want {
                    violation = Some(Violation { address: None, tuple: tuple.to_vec(), got, want });
                    return false;
                }
            }
            true
        });
        if violation.is_some() {
            break;
        }
    }
    Ok(OrthoCheck { checked, violation })
}

/// Γ = Σ_A Γ^A turns an addressable witness into a plain (or strong) one.
pub fn gamma_from_addressable(w: &OrthoWitness) -> Result<OrthoWitness> {
    let kind = match w.kind {
        OrthoKind::Addressable => OrthoKind::Plain,
        OrthoKind::AddressableStrong => OrthoKind::Strong,
        other => return Err(Error::Witness(format!("{other:?} witness is not addressable"))),
    };
    let n = w.gamma.first().map_or(0, |v| v.len());
    let mut sum = vec![Elem::ZERO; n];
    for v in &w.gamma {
        for (s, &x) in sum.iter_mut().zip(v) {
            *s += x;
        }
    }
    Ok(OrthoWitness { kind, ell: w.ell, tau: w.tau.clone(), gamma: vec![sum] })
}

/// Γ^A = Γ ⋆ (g^A)^{⋆c}: c = ℓ̄ − ℓ copies for a plain ℓ̄ witness, one copy
/// for a strong one. The result is addressable of degree `ell`.
pub fn addressable_from_ortho(g: &MatF, k: usize, w: &OrthoWitness, ell: usize) -> Result<OrthoWitness> {
    w.validate(g, k)?;
    if ell == 0 || ell >= w.ell {
        return Err(Error::Witness(format!("requested ell = {ell} must satisfy 1 <= ell < {}", w.ell)));
    }
    let f = g.field();
    let (kind, copies) = match w.kind {
        OrthoKind::Plain => (OrthoKind::Addressable, w.ell - ell),
        OrthoKind::Strong => (OrthoKind::AddressableStrong, 1),
        other => return Err(Error::Witness(format!("{other:?} witness is already addressable"))),
    };
    let gamma = (0..k)
        .map(|a| {
            let mut v = w.gamma[0].clone();
            for _ in 0..copies {
                v = star(f, &v, g.row(a));
            }
            v
        })
        .collect();
    Ok(OrthoWitness { kind, ell, tau: w.tau.clone(), gamma })
}

/// Σ_i σ_i c^1_i ··· c^ℓ_i = 0 over all tuples of rows of `c` (all lengths
/// up to `ell` when `strong`).
pub fn check_multiplication_property(c: &MatF, ell: usize, sigma: &[Elem], strong: bool) -> Result<bool> {
    if sigma.len() != c.cols() {
        return Err(Error::Dimension(format!("sigma of length {} for {} columns", sigma.len(), c.cols())));
    }
    let f = c.field();
    let lens: Vec<usize> = if strong { (1..=ell).collect() } else { vec![ell] };
    let mut ok = true;
    for len in lens {
        for_each_tuple_product(c, len, &mut |_, prod| {
            ok = f.dot(sigma, prod).is_zero();
            ok
        });
        if !ok {
            break;
        }
    }
    Ok(ok)
}

/// Puncturing a code with the (strong) ℓ̄-multiplication property on its
/// first k coordinates gives an (strong) ℓ̄-orthogonal G with Γ = σ_{k..}
/// and τ = σ_{..k}.
pub fn mult_to_ortho(c: &MatF, k: usize, sigma: &[Elem], ell: usize, strong: bool) -> Result<(MatF, OrthoWitness)> {
    if sigma.len() != c.cols() {
        return Err(Error::Dimension(format!("sigma of length {} for {} columns", sigma.len(), c.cols())));
    }
    if let Some(i) = sigma[..k].iter().position(|s| s.is_zero()) {
        return Err(Error::Invalid(format!("sigma_{i} is zero among the first k coordinates")));
    }
    let (g1, g0) = partially_systematic(c, k)?;
    let g = g1.stack(&g0)?;
    let kind = if strong { OrthoKind::Strong } else { OrthoKind::Plain };
    let w = OrthoWitness { kind, ell, tau: sigma[..k].to_vec(), gamma: vec![sigma[k..].to_vec()] };
    Ok((g, w))
}

/// RS_{N,m} on the first N field elements, split on the first k points, with
/// Γ^A interpolating point A from the remaining n = N − k points.
pub fn rs_addressable_matrix(
    field: &FieldCtx,
    n_points: usize,
    m: usize,
    k: usize,
    ellbar: usize,
) -> Result<(MatF, OrthoWitness)> {
    if k > m {
        return Err(Error::Bound(format!("k <= m needs k = {k}, m = {m}")));
    }
    if n_points <= k || ellbar == 0 || m == 0 || ellbar * (m - 1) >= n_points - k {
        return Err(Error::Bound(format!(
            "m < 1 + n/ell with n = N - k: m = {m}, N = {n_points}, k = {k}, ell = {ellbar}"
        )));
    }
    let pts = EvalPoints::first(field, n_points)?;
    let full = rs_generator(field, &pts, m)?;
    let (g1, g0) = partially_systematic(&full, k)?;
    let g = g1.stack(&g0)?;
    let rest = EvalPoints::new(field, pts.as_slice()[k..].to_vec())?;
    let gamma = (0..k).map(|a| interpolation_vector(field, pts.as_slice()[a], &rest)).collect::<Result<Vec<_>>>()?;
    let w = OrthoWitness { kind: OrthoKind::AddressableStrong, ell: ellbar, tau: vec![Elem::ONE; k], gamma };
    Ok((g, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::grs_dual_coeffs;

    #[test]
    fn single_entry_is_orthogonal_for_every_ell() {
        let f = FieldCtx::new(1).unwrap();
        let g = MatF::from_u32(&f, &[&[1]]).unwrap();
        for ell in 1..6 {
            let w = OrthoWitness { kind: OrthoKind::Plain, ell, tau: vec![Elem::ONE], gamma: vec![vec![Elem::ONE]] };
            assert!(check_orthogonality(&g, 1, &w).unwrap().passed());
        }
    }

    #[test]
    fn rs_witness_passes() {
        let f = FieldCtx::new(8).unwrap();
        let (g, w) = rs_addressable_matrix(&f, 18, 5, 2, 3).unwrap();
        assert_eq!((g.rows(), g.cols()), (5, 16));
        assert!(check_orthogonality(&g, 2, &w).unwrap().passed());
    }

    #[test]
    fn rs_bound_enforced() {
        let f = FieldCtx::new(4).unwrap();
        assert!(rs_addressable_matrix(&f, 5, 2, 1, 3).is_ok());
        assert!(matches!(rs_addressable_matrix(&f, 5, 3, 1, 3), Err(Error::Bound(_))));
        assert!(matches!(rs_addressable_matrix(&f, 8, 2, 3, 1), Err(Error::Bound(_))));
    }

    #[test]
    fn corrupted_gamma_reports_first_tuple() {
        let f = FieldCtx::new(6).unwrap();
        let (g, mut w) = rs_addressable_matrix(&f, 10, 3, 2, 3).unwrap();
        w.gamma[1][0] += Elem::ONE;
        let check = check_orthogonality(&g, 2, &w).unwrap();
        let v = check.violation.unwrap();
        assert_eq!(v.tuple, vec![0]);
        assert_eq!(v.address, Some(1));
    }

    #[test]
    fn transform_round_trip() {
        let f = FieldCtx::new(6).unwrap();
        let (g, w) = rs_addressable_matrix(&f, 10, 3, 2, 3).unwrap();
        let plain = gamma_from_addressable(&w).unwrap();
        assert_eq!(plain.kind, OrthoKind::Strong);
        assert!(check_orthogonality(&g, 2, &plain).unwrap().passed());
        let back = addressable_from_ortho(&g, 2, &plain, 2).unwrap();
        assert!(check_orthogonality(&g, 2, &back).unwrap().passed());
        assert!(addressable_from_ortho(&g, 2, &plain, 3).is_err());
    }

    #[test]
    fn rs_mult_to_ortho() {
        let f = FieldCtx::new(6).unwrap();
        let pts = EvalPoints::first(&f, 10).unwrap();
        let c = rs_generator(&f, &pts, 3).unwrap();
        let nu = grs_dual_coeffs(&f, &pts).unwrap();
        assert!(check_multiplication_property(&c, 3, &nu, true).unwrap());
        let (g, w) = mult_to_ortho(&c, 2, &nu, 3, true).unwrap();
        assert!(check_orthogonality(&g, 2, &w).unwrap().passed());
        let (g0, w0) = mult_to_ortho(&c, 0, &nu, 3, true).unwrap();
        assert!(w0.tau.is_empty());
        assert!(check_orthogonality(&g0, 0, &w0).unwrap().passed());
    }

    #[test]
    fn zero_code_is_vacuous() {
        let f = FieldCtx::new(3).unwrap();
        let c = MatF::zeros(&f, 0, 4);
        assert!(check_multiplication_property(&c, 3, &[Elem::ONE; 4], true).unwrap());
    }
}
