//! Addressable triorthogonality over F_2 and the addressable T gate.
//!
//! T^{Γ^A} on a code state |f⟩, f = Σ_a u_a g^a, gives the phase e^{iπ/4 u_A}
//! times a Clifford phase determined by the integer sums Σ Γ^A g^a and
//! Σ Γ^A g^a g^b. That Clifford is undone by U_A = Π S†^{κ_i} Π CZ^{κ_ij}.
//! All phases are tracked as exponents in Z_8 (units of π/4).

use serde::{Deserialize, Serialize};

use crate::codes::MatF;
use crate::error::{check_budget, sat_pow, Error, Result};
use crate::gf::{Elem, FieldCtx};
use crate::ortho::{addressable_from_ortho, check_multiplication_property, mult_to_ortho};
use crate::verify::{Failure, Mode, Verdict, VerifyReport, MAX_FAILURES};

pub const RM_NOTE: &str = "desk-scale RM(1, m) instantiation";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriWitness {
    pub g: MatF,
    pub k: usize,
    pub gammas: Vec<Vec<Elem>>,
    /// u_a = Σ_i B_ai f_i for f = u·G.
    pub b: MatF,
    pub note: Option<String>,
}

fn bit(x: Elem) -> u8 {
    (x.0 & 1) as u8
}

/// Σ_i Γ^A_i g^{a1}_i g^{a2}_i g^{a3}_i = [a1 = a2 = a3 = A] over F_2, for
/// every ordered triple and every A.
pub fn is_addressable_triorthogonal(g: &MatF, k: usize, gammas: &[Vec<Elem>]) -> bool {
    let (m, n) = (g.rows(), g.cols());
    if g.field().q() != 2 || gammas.len() != k || k > m || gammas.iter().any(|v| v.len() != n) {
        return false;
    }
    for (addr, gamma) in gammas.iter().enumerate() {
        for a1 in 0..m {
            for a2 in 0..m {
                for a3 in 0..m {
                    let s = (0..n).fold(0u8, |acc, i| {
                        acc ^ (bit(gamma[i]) & bit(g.get(a1, i)) & bit(g.get(a2, i)) & bit(g.get(a3, i)))
                    });
                    let want = u8::from(a1 == addr && a2 == addr && a3 == addr);
                    if s != want {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Evaluation matrix of RM(1, m_) on F_2^{m_}; the first k points are
/// 0, e_1, e_2, ... (affinely independent), the rest follow in order.
fn rm1_matrix(f2: &FieldCtx, m_: usize, k: usize) -> Result<MatF> {
    let n = 1usize << m_;
    let mut pts: Vec<usize> = std::iter::once(0).chain((0..k.saturating_sub(1)).map(|j| 1 << j)).collect();
    let rest: Vec<usize> = (0..n).filter(|p| !pts.contains(p)).collect();
    pts.extend(rest);
    let mut rows = vec![vec![Elem::ONE; n]];
    for v in 0..m_ {
        rows.push(pts.iter().map(|&p| Elem(((p >> v) & 1) as u32)).collect());
    }
    MatF::from_rows(f2, n, rows)
}

/// RM(1, m_) has the strong 4-multiplication property with σ = 1 when
/// m_ ≥ 5; puncturing k points gives a strong 4-orthogonal G, and one
/// star product per index gives the addressable witness Γ^A = g^A.
pub fn rm_tri_matrix(m_: usize, k: usize) -> Result<TriWitness> {
    if !(2..=12).contains(&m_) {
        return Err(Error::Bound(format!("m must be in 2..=12, got {m_}")));
    }
    if k == 0 || k > m_ + 1 || k >= 1 << (m_ - 1) {
        return Err(Error::Bound(format!("need 1 <= k <= m + 1 and k < 2^(m-1); got k = {k}, m = {m_}")));
    }
    let f2 = FieldCtx::new(1)?;
    let c = rm1_matrix(&f2, m_, k)?;
    let sigma = vec![Elem::ONE; c.cols()];
    if !check_multiplication_property(&c, 4, &sigma, true)? {
        return Err(Error::Assumption(format!(
            "RM(1, {m_}) lacks the strong 4-multiplication property: some product of four rows has odd weight"
        )));
    }
    let (g, w) = mult_to_ortho(&c, k, &sigma, 4, true)?;
    let aw = addressable_from_ortho(&g, k, &w, 3)?;
    let b = recovery_matrix(&g)?;
    Ok(TriWitness { g, k, gammas: aw.gamma, b, note: Some(RM_NOTE.into()) })
}

/// Rows B_a with G·B_aᵀ = e_a.
pub fn recovery_matrix(g: &MatF) -> Result<MatF> {
    if g.rank() != g.rows() {
        return Err(Error::RankDeficient("rows of G must be independent".into()));
    }
    let mut b = MatF::zeros(g.field(), 0, g.cols());
    for a in 0..g.rows() {
        let mut e = vec![Elem::ZERO; g.rows()];
        e[a] = Elem::ONE;
        b.push_row(&g.solve_lex_min(&e)?.expect("full row rank"))?;
    }
    Ok(b)
}

impl TriWitness {
    pub fn new(g: MatF, k: usize, gammas: Vec<Vec<Elem>>) -> Result<TriWitness> {
        if !is_addressable_triorthogonal(&g, k, &gammas) {
            return Err(Error::Witness("matrix is not addressable triorthogonal for these gammas".into()));
        }
        let b = recovery_matrix(&g)?;
        Ok(TriWitness { g, k, gammas, b, note: None })
    }

    pub fn check(&self) -> bool {
        is_addressable_triorthogonal(&self.g, self.k, &self.gammas)
    }
}

/// Clifford correction for T^{Γ^A}: κ_i mod 4 (powers of S†) and the
/// symmetric κ_ij mod 2 (CZ exponents).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub address: usize,
    /// Λ_a with Σ_i Γ^A_i g^a_i = 2Λ_a + [a = A].
    pub lambda1: Vec<i64>,
    /// Λ_ab (a < b) with Σ_i Γ^A_i g^a_i g^b_i = 2Λ_ab, row-major upper triangle.
    pub lambda2: Vec<Vec<i64>>,
    pub kappa1: Vec<u8>,
    pub kappa2: Vec<Vec<u8>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordGate {
    pub gate: String,
    pub power: u32,
    pub legs: Vec<usize>,
}

impl Correction {
    /// S† and CZ gates with nonzero exponent.
    pub fn gates(&self) -> Vec<CliffordGate> {
        let mut out: Vec<CliffordGate> = self
            .kappa1
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| CliffordGate { gate: "Sdg".into(), power: k as u32, legs: vec![i] })
            .collect();
        for (i, row) in self.kappa2.iter().enumerate() {
            for (j, &k) in row.iter().enumerate().skip(i + 1) {
                if k != 0 {
                    out.push(CliffordGate { gate: "CZ".into(), power: 1, legs: vec![i, j] });
                }
            }
        }
        out
    }

    /// Z_8 exponent of U_A T^{Γ^A} on the binary vector f.
    pub fn total_phase(&self, gamma: &[Elem], f: &[u8]) -> u8 {
        let n = f.len();
        let mut p: i64 = 0;
        for i in 0..n {
            if f[i] == 1 {
                p += bit(gamma[i]) as i64 - 2 * self.kappa1[i] as i64;
                for j in i + 1..n {
                    if f[j] == 1 {
                        p += 4 * self.kappa2[i][j] as i64;
                    }
                }
            }
        }
        p.rem_euclid(8) as u8
    }
}

pub fn clifford_correction(w: &TriWitness, a: usize) -> Result<Correction> {
    if a >= w.k {
        return Err(Error::Invalid(format!("logical index {a} outside 0..{}", w.k)));
    }
    let (m, n) = (w.g.rows(), w.g.cols());
    let gam: Vec<i64> = w.gammas[a].iter().map(|&x| bit(x) as i64).collect();
    let gb = |r: usize, i: usize| bit(w.g.get(r, i)) as i64;
    let bb = |r: usize, i: usize| bit(w.b.get(r, i)) as i64;
    let mut lambda1 = vec![0i64; m];
    for (r, l) in lambda1.iter_mut().enumerate() {
        let s: i64 = (0..n).map(|i| gam[i] * gb(r, i)).sum();
        let odd = i64::from(r == a);
        if (s - odd) % 2 != 0 {
            return Err(Error::Witness(format!("Σ Γ g^{r} has the wrong parity")));
        }
        *l = (s - odd) / 2;
    }
    let mut lambda2 = vec![vec![0i64; m]; m];
    for r in 0..m {
        for s2 in r + 1..m {
            let s: i64 = (0..n).map(|i| gam[i] * gb(r, i) * gb(s2, i)).sum();
            if s % 2 != 0 {
                return Err(Error::Witness(format!("Σ Γ g^{r} g^{s2} is odd")));
            }
            lambda2[r][s2] = s / 2;
        }
    }
    let mut kappa1 = vec![0u8; n];
    for (i, k) in kappa1.iter_mut().enumerate() {
        let mut v: i64 = (0..m).map(|r| bb(r, i) * lambda1[r]).sum();
        for r in 0..m {
            for s2 in r + 1..m {
                v += 2 * lambda2[r][s2] * bb(r, i) * bb(s2, i);
            }
        }
        *k = v.rem_euclid(4) as u8;
    }
    let mut kappa2 = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let mut v: i64 = (0..m).map(|r| bb(r, i) * bb(r, j) * lambda1[r]).sum();
            for r in 0..m {
                for s2 in r + 1..m {
                    v += lambda2[r][s2] * (bb(r, i) * bb(s2, j) + bb(r, j) * bb(s2, i));
                }
            }
            let k = v.rem_euclid(2) as u8;
            kappa2[i][j] = k;
            kappa2[j][i] = k;
        }
    }
    Ok(Correction { address: a, lambda1, lambda2, kappa1, kappa2 })
}

/// Checks U_A T^{Γ^A}|f⟩ = e^{iπ u_A/4}|f⟩ for all 2^m coefficient vectors u.
pub fn verify_t_addressing(w: &TriWitness, a: usize, budget: u128) -> Result<VerifyReport> {
    let corr = clifford_correction(w, a)?;
    verify_t_correction(w, &corr, budget)
}

pub fn verify_t_correction(w: &TriWitness, corr: &Correction, budget: u128) -> Result<VerifyReport> {
    let (m, n) = (w.g.rows(), w.g.cols());
    check_budget(sat_pow(2, m), budget)?;
    let gamma = &w.gammas[corr.address];
    let mut failures = Vec::new();
    let mut count = 0u64;
    for x in 0u64..1 << m {
        let u: Vec<u8> = (0..m).map(|r| ((x >> (m - 1 - r)) & 1) as u8).collect();
        let f: Vec<u8> = (0..n).map(|i| (0..m).fold(0u8, |acc, r| acc ^ (u[r] & bit(w.g.get(r, i))))).collect();
        let got = corr.total_phase(gamma, &f);
        let want = u[corr.address];
        if got != want {
            count += 1;
            if failures.len() < MAX_FAILURES {
                failures.push(Failure {
                    logical: u.iter().map(|&b| b as u32).collect(),
                    coset: Vec::new(),
                    got: got as u32,
                    want: want as u32,
                });
            }
        }
    }
    let verdict = if count == 0 { Verdict::Pass } else { Verdict::Fail };
    Ok(VerifyReport {
        mode: Mode::Exhaustive,
        checked: 1 << m,
        failure_count: count,
        failures,
        coset_constant: None,
        verdict,
    })
}
