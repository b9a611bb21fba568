//! Qudit-to-qubit conversion preserving addressability.
//!
//! A code over GF(2^t) becomes a qubit code through a self-dual basis. All
//! but one logical qubit per logical q-block is then gauge-fixed, and each
//! physical q-block is further encoded so that the expanded qudit gates
//! become physical Z/CZ/CCZ circuits of depth one.

mod mfe;
mod pipeline;
mod sigma;

pub use mfe::{mfe_degree3, mfe_duplicate, Mfe};
pub use pipeline::{pipeline_theorem_6_1, pipeline_theorem_6_2, Pipeline61, Pipeline62};
pub use sigma::{expand_sigma, omega, sigma_decompose, SigmaTables};

use serde::{Deserialize, Serialize};

use crate::codes::MatF;
use crate::css::CssCode;
use crate::error::{Error, Result};
use crate::gates::w_value;
use crate::gf::{Elem, FieldCtx, SelfDualBasis};
use crate::verify::CodeSpace;

/// Sorted supports of binary vectors.
pub type SparseRows = Vec<Vec<usize>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Q1,
    Q2,
    Q3,
    #[serde(rename = "Q3'")]
    Q3Prime,
}

/// A binary CSS code. X-type rows are dense over GF(2); Z-type rows are
/// stored as supports, since concatenated codes have many sparse checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitCssCode {
    pub n: usize,
    pub k: usize,
    pub hx: MatF,
    pub hz: SparseRows,
    pub lx: MatF,
    pub lz: SparseRows,
    /// Physical qubits per physical q-block.
    pub block_size: usize,
    /// Logical qubits per logical q-block (t before gauge fixing, else 1).
    pub logical_group: usize,
    pub stage: Stage,
    pub d_lower: usize,
    pub note: Option<String>,
}

fn sparse_dot(dense: &[Elem], support: &[usize]) -> u32 {
    support.iter().fold(0, |acc, &j| acc ^ dense[j].0)
}

impl QubitCssCode {
    pub fn field(&self) -> &FieldCtx {
        self.hx.field()
    }

    /// Checks hx·hz = 0, lx·hz = 0, hx·lz = 0, lx·lz = I and that lx is
    /// independent modulo hx.
    pub fn check_invariants(&self) -> Result<()> {
        let zero_against = |x: &MatF, zs: &SparseRows, what: &str| -> Result<()> {
            for r in 0..x.rows() {
                if let Some(c) = zs.iter().position(|z| sparse_dot(x.row(r), z) != 0) {
                    return Err(Error::Invalid(format!("{what}: X row {r} anticommutes with Z row {c}")));
                }
            }
            Ok(())
        };
        zero_against(&self.hx, &self.hz, "stabilizers")?;
        zero_against(&self.lx, &self.hz, "logical X vs Z stabilizers")?;
        zero_against(&self.hx, &self.lz, "X stabilizers vs logical Z")?;
        if self.lx.rows() != self.k || self.lz.len() != self.k {
            return Err(Error::Dimension(format!(
                "{} / {} logical rows for k = {}",
                self.lx.rows(),
                self.lz.len(),
                self.k
            )));
        }
        for a in 0..self.k {
            for b in 0..self.k {
                if sparse_dot(self.lx.row(a), &self.lz[b]) != u32::from(a == b) {
                    return Err(Error::Invalid(format!("logical pair ({a}, {b}) has the wrong commutation")));
                }
            }
        }
        if self.lx.stack(&self.hx)?.rank() != self.k + self.hx.rank() {
            return Err(Error::Invalid("logical X rows are not independent of the stabilizers".into()));
        }
        Ok(())
    }

    /// Dense Z-stabilizer matrix (for small codes).
    pub fn hz_dense(&self) -> MatF {
        to_dense(self.field(), self.n, &self.hz)
    }
}

pub(crate) fn to_dense(f: &FieldCtx, n: usize, rows: &SparseRows) -> MatF {
    let mut m = MatF::zeros(f, rows.len(), n);
    for (r, s) in rows.iter().enumerate() {
        for &j in s {
            m.set(r, j, Elem::ONE);
        }
    }
    m
}

fn support(v: &[Elem]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i).collect()
}

impl CodeSpace for QubitCssCode {
    fn field(&self) -> &FieldCtx {
        self.hx.field()
    }
    fn len(&self) -> usize {
        self.n
    }
    fn logical_rows(&self) -> &MatF {
        &self.lx
    }
    fn coset_rows(&self) -> &MatF {
        &self.hx
    }
}

fn check_basis(f: &FieldCtx, basis: &SelfDualBasis) -> Result<()> {
    if !basis.is_self_dual(f) {
        return Err(Error::FieldMismatch(format!("basis is not a self-dual basis of GF({})", f.q())));
    }
    Ok(())
}

/// B(v): each coordinate replaced by its t basis coordinates.
pub fn expand_vector(f: &FieldCtx, basis: &SelfDualBasis, v: &[Elem]) -> Vec<Elem> {
    let t = basis.len();
    let mut out = vec![Elem::ZERO; v.len() * t];
    for (x, chunk) in v.iter().zip(out.chunks_mut(t)) {
        basis.decomp_into(f, *x, chunk);
    }
    out
}

/// Rows B(α_i·v) for every row v of `m` and every basis element α_i.
fn expand_rows(f: &FieldCtx, basis: &SelfDualBasis, m: &MatF) -> Vec<Vec<Elem>> {
    let mut out = Vec::with_capacity(m.rows() * basis.len());
    for r in 0..m.rows() {
        for &a in &basis.elems {
            let scaled: Vec<Elem> = m.row(r).iter().map(|&x| f.mul(a, x)).collect();
            out.push(expand_vector(f, basis, &scaled));
        }
    }
    out
}

/// [[n t, k t, ≥ d]] qubit code; logical qubit a·t + i is B(α_i g^a).
pub fn qudit_to_qubit(code: &CssCode, basis: &SelfDualBasis) -> Result<QubitCssCode> {
    let f = &code.field;
    check_basis(f, basis)?;
    let t = basis.len();
    let f2 = FieldCtx::new(1)?;
    let dense = |rows: Vec<Vec<Elem>>| MatF::from_rows(&f2, code.n * t, rows);
    let sparse = |m: &MatF| expand_rows(f, basis, m).iter().map(|v| support(v)).collect::<SparseRows>();
    Ok(QubitCssCode {
        n: code.n * t,
        k: code.k * t,
        hx: dense(expand_rows(f, basis, code.g0_basis()))?,
        hz: sparse(&code.zdual),
        lx: dense(expand_rows(f, basis, &code.g1))?,
        lz: sparse(&code.h),
        block_size: t,
        logical_group: t,
        stage: Stage::Q1,
        d_lower: code.d_lower,
        note: None,
    })
}

/// Retain logical qubit `pattern[b]` of each logical q-block b; the other
/// logical Z's join the Z-stabilizers.
pub fn gauge_fix(code: &QubitCssCode, pattern: &[usize]) -> Result<QubitCssCode> {
    let g = code.logical_group;
    if g == 0 || !code.k.is_multiple_of(g) || pattern.len() != code.k / g {
        return Err(Error::Invalid(format!(
            "pattern of length {} for {} logical q-blocks",
            pattern.len(),
            code.k / g.max(1)
        )));
    }
    if let Some(bad) = pattern.iter().find(|&&p| p >= g) {
        return Err(Error::Invalid(format!("retained index {bad} outside 0..{g}")));
    }
    let mut hz = code.hz.clone();
    let mut lx = MatF::zeros(code.field(), 0, code.n);
    let mut lz = Vec::new();
    for (b, &keep) in pattern.iter().enumerate() {
        for j in 0..g {
            let idx = b * g + j;
            if j == keep {
                lx.push_row(code.lx.row(idx))?;
                lz.push(code.lz[idx].clone());
            } else {
                hz.push(code.lz[idx].clone());
            }
        }
    }
    Ok(QubitCssCode { k: pattern.len(), hz, lx, lz, logical_group: 1, stage: Stage::Q2, ..code.clone() })
}

/// Retain the first qubit of every logical q-block.
pub fn uniform_pattern(blocks: usize) -> Vec<usize> {
    vec![0; blocks]
}

/// Block 3A + e retains qubit e.
pub fn staggered_pattern(blocks: usize) -> Vec<usize> {
    (0..blocks).map(|b| b % 3).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeKind {
    Ccz,
    W,
}

/// Coefficient turning the expanded gate into qubit CCZ on retained
/// qubits: α_1^{-1} for CCZ, the smallest β with tr(β·s) = 1 for W, where
/// s = Σ α_a^4 α_b^2 α_c over the first three basis elements.
pub fn gauge_coefficient(f: &FieldCtx, kind: GaugeKind, basis: &SelfDualBasis) -> Result<Elem> {
    check_basis(f, basis)?;
    match kind {
        GaugeKind::Ccz => f.inv(basis.elems[0]),
        GaugeKind::W => {
            if basis.len() < 3 {
                return Err(Error::VanishingGauge(format!(
                    "W needs three basis elements, GF({}) has {}",
                    f.q(),
                    basis.len()
                )));
            }
            let s = w_value(f, [basis.elems[0], basis.elems[1], basis.elems[2]]);
            if s.is_zero() {
                return Err(Error::VanishingGauge(format!(
                    "sum over basis triple ({}, {}, {}) vanishes; substitute three F2-independent elements with a nonzero sum",
                    basis.elems[0], basis.elems[1], basis.elems[2]
                )));
            }
            Ok(f.elements().find(|&b| f.trace(f.mul(b, s)) == 1).expect("trace is onto"))
        }
    }
}

/// Each group of `s = embed.rows()` physical qubits is re-encoded by the
/// injective map x ↦ x·embed into r = embed.cols() qubits.
pub fn concatenate(code: &QubitCssCode, embed: &MatF, stage: Stage) -> Result<QubitCssCode> {
    let s = embed.rows();
    let r = embed.cols();
    if s == 0 || !code.n.is_multiple_of(s) || !code.block_size.is_multiple_of(s) {
        return Err(Error::Dimension(format!("inner groups of {s} qubits do not tile {} qubits", code.n)));
    }
    if embed.rank() != s {
        return Err(Error::RankDeficient("outer embedding is not injective".into()));
    }
    let f = code.field();
    let groups = code.n / s;
    let n = groups * r;
    // Z lift: P with embed·P_i = e_i keeps ⟨lift_z(z), lift_x(x)⟩ = ⟨z, x⟩.
    let mut p = Vec::with_capacity(s);
    for i in 0..s {
        let mut e = vec![Elem::ZERO; s];
        e[i] = Elem::ONE;
        p.push(support(&embed.solve_lex_min(&e)?.expect("injective embedding has a right inverse")));
    }
    let lift_x = |m: &MatF| -> Result<MatF> {
        let mut out = MatF::zeros(f, 0, n);
        for row in 0..m.rows() {
            let mut v = vec![Elem::ZERO; n];
            for g in 0..groups {
                let img = embed.transpose().apply(&m.row(row)[g * s..(g + 1) * s]);
                v[g * r..(g + 1) * r].copy_from_slice(&img);
            }
            out.push_row(&v)?;
        }
        Ok(out)
    };
    let lift_z = |z: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = Vec::new();
        for &j in z {
            let (g, i) = (j / s, j % s);
            v.extend(p[i].iter().map(|&c| g * r + c));
        }
        v.sort_unstable();
        // Coinciding positions cancel in pairs.
        let mut out: Vec<usize> = Vec::with_capacity(v.len());
        for x in v {
            if out.last() == Some(&x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        out
    };
    let checks = embed.nullspace();
    let mut hz: SparseRows = Vec::with_capacity(groups * checks.rows() + code.hz.len());
    for g in 0..groups {
        for c in 0..checks.rows() {
            hz.push(support(checks.row(c)).into_iter().map(|j| g * r + j).collect());
        }
    }
    hz.extend(code.hz.iter().map(|z| lift_z(z)));
    Ok(QubitCssCode {
        n,
        k: code.k,
        hx: lift_x(&code.hx)?,
        hz,
        lx: lift_x(&code.lx)?,
        lz: code.lz.iter().map(|z| lift_z(z)).collect(),
        block_size: code.block_size / s * r,
        logical_group: code.logical_group,
        stage,
        d_lower: code.d_lower,
        note: code.note.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::build_rs_addressable;
    use crate::css::build_css;

    #[test]
    fn gf4_toy_expands() {
        // [[3,1]] over GF(4): G1 = (1,1,1), G0 = (0,1,ω).
        let f = FieldCtx::new(2).unwrap();
        let g = MatF::from_u32(&f, &[&[1, 1, 1], &[0, 1, 2]]).unwrap();
        let c = build_css(&g, 1).unwrap();
        let b = f.self_dual_basis();
        let q = qudit_to_qubit(&c, &b).unwrap();
        assert_eq!((q.n, q.k), (6, 2));
        q.check_invariants().unwrap();
        assert_eq!(q.hx.rank() + q.hz_dense().rank() + q.k, q.n);
    }

    #[test]
    fn trivial_extension_is_identity() {
        let f = FieldCtx::new(1).unwrap();
        let g = MatF::from_u32(&f, &[&[1, 1, 1], &[0, 1, 1]]).unwrap();
        let c = build_css(&g, 1).unwrap();
        let q = qudit_to_qubit(&c, &f.self_dual_basis()).unwrap();
        assert_eq!(q.lx, c.g1);
        assert_eq!(q.hx, *c.g0_basis());
        assert_eq!(gauge_fix(&q, &[0]).unwrap().k, 1);
    }

    #[test]
    fn trace_pairing_is_preserved() {
        let f = FieldCtx::new(4).unwrap();
        let b = f.self_dual_basis();
        for x in f.elements() {
            for y in f.elements() {
                let bx = expand_vector(&f, &b, &[x]);
                let by = expand_vector(&f, &b, &[y]);
                let dot = bx.iter().zip(&by).fold(0, |acc, (p, q)| acc ^ (p.0 & q.0)) as u8;
                assert_eq!(dot, f.trace(f.mul(x, y)));
            }
        }
    }

    #[test]
    fn gauge_fix_parameters() {
        let c = build_rs_addressable(4, 2, 2).unwrap();
        let q1 = qudit_to_qubit(&c.code, &c.field.self_dual_basis()).unwrap();
        assert_eq!((q1.n, q1.k), (16, 8));
        let q2 = gauge_fix(&q1, &uniform_pattern(2)).unwrap();
        assert_eq!((q2.n, q2.k, q2.stage), (16, 2, Stage::Q2));
        q2.check_invariants().unwrap();
        assert!(gauge_fix(&q1, &[0]).is_err());
        assert!(gauge_fix(&q1, &[0, 4]).is_err());
    }

    #[test]
    fn gauge_coefficients() {
        let f = FieldCtx::new(2).unwrap();
        let b = f.self_dual_basis();
        assert_eq!(b.elems, vec![Elem(2), Elem(3)]);
        assert_eq!(gauge_coefficient(&f, GaugeKind::Ccz, &b).unwrap(), Elem(3));
        assert!(matches!(gauge_coefficient(&f, GaugeKind::W, &b), Err(Error::VanishingGauge(_))));
        let f7 = FieldCtx::new(7).unwrap();
        let b7 = f7.self_dual_basis();
        let beta = gauge_coefficient(&f7, GaugeKind::W, &b7).unwrap();
        let s = w_value(&f7, [b7.elems[0], b7.elems[1], b7.elems[2]]);
        assert_eq!(f7.trace(f7.mul(beta, s)), 1);
    }

    #[test]
    fn concatenation_keeps_commutation() {
        let c = build_rs_addressable(4, 2, 1).unwrap();
        let q2 = gauge_fix(&qudit_to_qubit(&c.code, &c.field.self_dual_basis()).unwrap(), &[0]).unwrap();
        let f2 = q2.field().clone();
        let rep = MatF::from_u32(&f2, &[&[1, 1, 1]]).unwrap();
        let q3 = concatenate(&q2, &rep, Stage::Q3).unwrap();
        assert_eq!((q3.n, q3.k, q3.block_size), (48, 1, 12));
        q3.check_invariants().unwrap();
        assert_eq!(q3.hx.rank() + q3.hz_dense().rank() + q3.k, q3.n);
    }
}
