use crate::address::{build_rs_addressable, AddressableRsCode};
use crate::codes::MatF;
use crate::designed::{designed_w_schedule, rs_designed, DesignedCode};
use crate::error::Result;
use crate::gates::{GateFamily, GateSchedule};
use crate::gf::{Elem, FieldCtx, SelfDualBasis};

use super::{
    concatenate, expand_sigma, gauge_coefficient, gauge_fix, mfe_degree3, mfe_duplicate, omega, qudit_to_qubit,
    staggered_pattern, uniform_pattern, GaugeKind, Mfe, QubitCssCode, Stage,
};

/// Tag for codes whose base is Reed-Solomon rather than a good family.
pub const RS_BASE_NOTE: &str = "near-good (RS base)";

/// RS addressable code → qubits → uniform gauge fix → MFE outer codes.
#[derive(Clone, Debug)]
pub struct Pipeline61 {
    pub rs: AddressableRsCode,
    pub basis: SelfDualBasis,
    pub q1: QubitCssCode,
    pub q2: QubitCssCode,
    pub mfe: Mfe,
    pub q3: QubitCssCode,
    pub mfe_dup: Mfe,
    pub q3_prime: QubitCssCode,
    /// α_1⁻¹.
    pub gauge: Elem,
}

pub fn pipeline_theorem_6_1(n: usize, m: usize, k: usize) -> Result<Pipeline61> {
    let rs = build_rs_addressable(n, m, k)?;
    let basis = rs.field.self_dual_basis();
    let q1 = qudit_to_qubit(&rs.code, &basis)?;
    let q2 = gauge_fix(&q1, &uniform_pattern(k))?;
    let mfe = mfe_degree3(&rs.field, &basis)?;
    let q3 = concatenate(&q2, &mfe.embed, Stage::Q3)?;
    let mfe_dup = mfe_duplicate(&mfe, 4)?;
    let q3_prime = concatenate(&q2, &mfe_dup.embed, Stage::Q3Prime)?;
    let gauge = gauge_coefficient(&rs.field, GaugeKind::Ccz, &basis)?;
    Ok(Pipeline61 { rs, basis, q1, q2, mfe, q3, mfe_dup, q3_prime, gauge })
}

impl Pipeline61 {
    /// Qudit-level CCZ^{α_1⁻¹}[A,B,C]; on Q2 (through the basis expansion)
    /// it is logical qubit CCZ.
    pub fn qudit_ccz(&self, a: usize, b: usize, c: usize, blocks: [usize; 3]) -> Result<GateSchedule> {
        self.rs.shifted_schedule(&GateFamily::Mcz(3), &[a, b, c], self.gauge, &blocks)
    }

    /// Physical CCZ circuit on Q3; needs every qudit to carry one leg,
    /// which holds for three distinct blocks.
    pub fn ccz_q3(&self, a: usize, b: usize, c: usize, blocks: [usize; 3]) -> Result<GateSchedule> {
        self.mfe.transform(&self.qudit_ccz(a, b, c, blocks)?)
    }

    /// Depth-one physical CCZ circuit on Q3′ for any block pattern.
    pub fn ccz_q3_prime(&self, a: usize, b: usize, c: usize, blocks: [usize; 3]) -> Result<GateSchedule> {
        self.mfe_dup.transform(&self.qudit_ccz(a, b, c, blocks)?)
    }
}

/// Designed W code → qubits → staggered gauge fix → Ω-fold duplication.
#[derive(Clone, Debug)]
pub struct Pipeline62 {
    pub designed: DesignedCode,
    pub basis: SelfDualBasis,
    pub q1: QubitCssCode,
    pub q2: QubitCssCode,
    pub q3: QubitCssCode,
    pub omega: usize,
    /// β̂ with tr(β̂ Σ α_a⁴α_b²α_c) = 1.
    pub gauge: Elem,
}

pub fn pipeline_theorem_6_2(t: u32, n: usize, m: usize, k: usize) -> Result<Pipeline62> {
    let designed = rs_designed(t, n, m, k)?;
    let f: FieldCtx = designed.field().clone();
    let basis = f.self_dual_basis();
    let gauge = gauge_coefficient(&f, GaugeKind::W, &basis)?;
    let mut q1 = qudit_to_qubit(&designed.code, &basis)?;
    q1.note = Some(RS_BASE_NOTE.into());
    let q2 = gauge_fix(&q1, &staggered_pattern(designed.code.k))?;
    let om = omega(basis.len());
    let rep = MatF::from_rows(&FieldCtx::new(1)?, om, vec![vec![Elem::ONE; om]])?;
    let q3 = concatenate(&q2, &rep, Stage::Q3)?;
    Ok(Pipeline62 { designed, basis, q1, q2, q3, omega: om, gauge })
}

impl Pipeline62 {
    /// U_7 circuit realizing logical CCZ on triple A of Q2.
    pub fn w_q2(&self, a: usize) -> Result<GateSchedule> {
        designed_w_schedule(&self.designed, a, self.gauge)
    }

    /// Depth-one Z/CZ/CCZ circuit on Q3.
    pub fn ccz_q3(&self, a: usize) -> Result<GateSchedule> {
        expand_sigma(&self.w_q2(a)?, &self.basis, self.omega)
    }
}
