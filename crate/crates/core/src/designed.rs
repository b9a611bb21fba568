//! Pre-designed triples addressed by the three-qudit W gate.
//!
//! Every group of 7 logical rows of an addressable strong 7 code is folded
//! into 3 rows through the binary matrix M. M's rows have even weight and
//! even pairwise overlap but odd triple overlap, so the transversal U_7
//! circuit with coefficients Λ^A = Σ_j Γ^{7A+j} acts as W on the 3 new rows.

use crate::codes::MatF;
use crate::css::{build_css_with, CssCode, DistanceOptions};
use crate::error::{Error, Result};
use crate::gates::{Application, GateFamily, GateSchedule, Leg};
use crate::gf::{Elem, FieldCtx};
use crate::ortho::{rs_addressable_matrix, OrthoCheck, OrthoKind, OrthoWitness, Violation};

pub const M: [[u8; 7]; 3] = [[1, 1, 1, 0, 1, 0, 0], [1, 1, 0, 1, 0, 1, 0], [1, 0, 1, 1, 0, 0, 1]];

/// Parity of Σ_j Π_{e∈rows} M[e][j]; an empty product is 1.
pub fn m_overlap_parity(rows: &[usize]) -> u8 {
    (0..7).map(|j| rows.iter().fold(1u8, |p, &e| p & M[e][j])).sum::<u8>() & 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignedCode {
    pub k_prime: usize,
    /// Rows of H: 3k′ designed rows, then the folded G0.
    pub h: MatF,
    pub code: CssCode,
    pub lambdas: Vec<Vec<Elem>>,
}

impl DesignedCode {
    pub fn field(&self) -> &FieldCtx {
        self.h.field()
    }

    /// m′ = number of rows of H.
    pub fn m_prime(&self) -> usize {
        self.h.rows()
    }

    /// For all 36 exponent triples D with |D| = 7, all a, b, c < m′ and all A:
    /// Σ_i Λ^A_i (h^a_i)^{D1} (h^b_i)^{D2} (h^c_i)^{D3} is 1 exactly when every
    /// D is nonzero and {a, b, c} = {3A, 3A+1, 3A+2}.
    pub fn check_extended_orthogonality(&self) -> OrthoCheck {
        let f = self.field();
        let n = self.h.cols();
        let mp = self.m_prime();
        // pows[d][a][i] = (h^a_i)^d
        let pows: Vec<Vec<Vec<Elem>>> = (0..=7u64)
            .map(|d| (0..mp).map(|a| self.h.row(a).iter().map(|&x| f.pow(x, d)).collect()).collect())
            .collect();
        let mut checked = 0u64;
        for (addr, lam) in self.lambdas.iter().enumerate() {
            let triple = [3 * addr, 3 * addr + 1, 3 * addr + 2];
            for d1 in 0..=7usize {
                for d2 in 0..=7 - d1 {
                    let d3 = 7 - d1 - d2;
                    for a in 0..mp {
                        for b in 0..mp {
                            for c in 0..mp {
                                let mut s = Elem::ZERO;
                                for i in 0..n {
                                    let p = f.mul(pows[d1][a][i], f.mul(pows[d2][b][i], pows[d3][c][i]));
                                    s += f.mul(lam[i], p);
                                }
                                checked += 1;
                                let mut abc = [a, b, c];
                                abc.sort_unstable();
                                let hit = d1 > 0 && d2 > 0 && d3 > 0 && abc == triple;
                                let want = if hit { Elem::ONE } else { Elem::ZERO };
                                if s != want {
                                    return OrthoCheck {
                                        checked,
                                        violation: Some(Violation {
                                            address: Some(addr),
                                            tuple: vec![d1, d2, d3, a, b, c],
                                            got: s,
                                            want,
                                        }),
                                    };
                                }
                            }
                        }
                    }
                }
            }
        }
        OrthoCheck { checked, violation: None }
    }
}

/// Folds an addressable strong 7 code (τ = 1) into the designed code.
/// Rows of G1 beyond the last full group of 7 move into G0.
pub fn build_designed(g: &MatF, w: &OrthoWitness, k: usize) -> Result<DesignedCode> {
    build_designed_with(g, w, k, &DistanceOptions::default())
}

pub fn build_designed_with(g: &MatF, w: &OrthoWitness, k: usize, opts: &DistanceOptions) -> Result<DesignedCode> {
    w.validate(g, k)?;
    let ok_kind = match w.kind {
        OrthoKind::AddressableStrong => w.ell >= 7,
        OrthoKind::Addressable => w.ell == 7,
        _ => false,
    };
    if !ok_kind {
        return Err(Error::Witness(format!("need an addressable 7 witness, got {:?} with ell = {}", w.kind, w.ell)));
    }
    if w.tau.iter().any(|&t| t != Elem::ONE) {
        return Err(Error::Witness("designed W needs tau = 1 on every logical index".into()));
    }
    let f = g.field();
    let kp = k / 7;
    let mut h = MatF::zeros(f, 0, g.cols());
    for a in 0..kp {
        for row in &M {
            let mut v = vec![Elem::ZERO; g.cols()];
            for (j, &bit) in row.iter().enumerate() {
                if bit == 1 {
                    for (x, &y) in v.iter_mut().zip(g.row(7 * a + j)) {
                        *x += y;
                    }
                }
            }
            h.push_row(&v)?;
        }
    }
    for r in 7 * kp..g.rows() {
        h.push_row(g.row(r))?;
    }
    let code = build_css_with(&h, 3 * kp, opts)?;
    let lambdas = (0..kp)
        .map(|a| {
            let mut lam = vec![Elem::ZERO; g.cols()];
            for j in 0..7 {
                for (x, &y) in lam.iter_mut().zip(&w.gamma[7 * a + j]) {
                    *x += y;
                }
            }
            lam
        })
        .collect();
    Ok(DesignedCode { k_prime: kp, h, code, lambdas })
}

/// Designed code from RS evaluated on the first n + k elements of GF(2^t),
/// with MDS distance bounds.
pub fn rs_designed(t: u32, n: usize, m: usize, k: usize) -> Result<DesignedCode> {
    let f = FieldCtx::new(t)?;
    let (g, w) = rs_addressable_matrix(&f, n + k, m, k, 7)?;
    let opts =
        DistanceOptions { bound_g: Some(n - m + 1), bound_g0_dual: Some(m - 7 * (k / 7) + 1), ..Default::default() };
    build_designed_with(&g, &w, k, &opts)
}

/// Single-qudit U_7^{βΛ^A_i} on every qudit: W^β on rows 3A, 3A+1, 3A+2.
pub fn designed_w_schedule(d: &DesignedCode, a: usize, beta: Elem) -> Result<GateSchedule> {
    if a >= d.k_prime {
        return Err(Error::Invalid(format!("designed triple {a} outside 0..{}", d.k_prime)));
    }
    let f = d.field();
    let mut s = GateSchedule::new(f);
    for (i, &l) in d.lambdas[a].iter().enumerate() {
        let c = f.mul(beta, l);
        if c.is_zero() {
            continue;
        }
        let mut app = Application::new(GateFamily::Power(7), c, vec![Leg::new(0, i)]);
        app.layer = Some(0);
        s.push(app)?;
    }
    Ok(s)
}

/// (Σ_a c_a x_a)^7 expanded as Σ_{a,b,c} c_a^4 c_b^2 c_c · x_a^4 x_b^2 x_c,
/// the characteristic-2 identity v^7 = v^4 v^2 v.
pub fn seventh_power_expansion(f: &FieldCtx, coeffs: &[Elem], xs: &[Elem]) -> Elem {
    let c4x4: Vec<Elem> = coeffs.iter().zip(xs).map(|(&c, &x)| f.pow(f.mul(c, x), 4)).collect();
    let c2x2: Vec<Elem> = coeffs.iter().zip(xs).map(|(&c, &x)| f.square(f.mul(c, x))).collect();
    let cx: Vec<Elem> = coeffs.iter().zip(xs).map(|(&c, &x)| f.mul(c, x)).collect();
    let mut s = Elem::ZERO;
    for &p in &c4x4 {
        for &q in &c2x2 {
            for &r in &cx {
                s += f.mul(p, f.mul(q, r));
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_parities() {
        for e in 0..3 {
            assert_eq!(m_overlap_parity(&[e]), 0);
            for e2 in 0..3 {
                assert_eq!(m_overlap_parity(&[e, e2]), 0);
                for e3 in 0..3 {
                    let distinct = e != e2 && e2 != e3 && e != e3;
                    assert_eq!(m_overlap_parity(&[e, e2, e3]), distinct as u8);
                }
            }
        }
    }

    #[test]
    fn seventh_power_matches_direct() {
        let f = FieldCtx::new(4).unwrap();
        for c0 in 0..16 {
            for c1 in 0..16 {
                for x0 in 0..16 {
                    for x1 in 0..16 {
                        let (c, x) = ([Elem(c0), Elem(c1)], [Elem(x0), Elem(x1)]);
                        let v = f.add(f.mul(c[0], x[0]), f.mul(c[1], x[1]));
                        assert_eq!(seventh_power_expansion(&f, &c, &x), f.pow(v, 7));
                    }
                }
            }
        }
    }

    #[test]
    fn rs_instance() {
        let d = rs_designed(7, 64, 10, 7).unwrap();
        assert_eq!((d.k_prime, d.m_prime(), d.code.k, d.code.n), (1, 6, 3, 64));
        let r = d.check_extended_orthogonality();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked, 36 * 216);
        let s = designed_w_schedule(&d, 0, Elem(3)).unwrap();
        assert_eq!(s.depth(), Some(1));
        assert!(s.len() <= 64);
        assert!(designed_w_schedule(&d, 0, Elem::ZERO).unwrap().is_empty());
        assert!(designed_w_schedule(&d, 1, Elem::ONE).is_err());
    }

    #[test]
    fn leftover_rows_fold_into_g0() {
        let d = rs_designed(7, 64, 10, 8).unwrap();
        assert_eq!((d.k_prime, d.code.k, d.m_prime()), (1, 3, 6));
    }

    #[test]
    fn corrupted_lambda_fails() {
        let mut d = rs_designed(7, 64, 10, 7).unwrap();
        d.lambdas[0][5] = d.field().add(d.lambdas[0][5], Elem::ONE);
        assert!(!d.check_extended_orthogonality().passed());
    }

    #[test]
    fn wrong_witness_rejected() {
        let f = FieldCtx::new(7).unwrap();
        let (g, w) = rs_addressable_matrix(&f, 71, 10, 7, 7).unwrap();
        let mut low = w.clone();
        low.ell = 3;
        assert!(matches!(build_designed(&g, &low, 7), Err(Error::Witness(_))));
        let mut plain = w;
        plain.kind = OrthoKind::Plain;
        assert!(build_designed(&g, &plain, 7).is_err());
    }
}
