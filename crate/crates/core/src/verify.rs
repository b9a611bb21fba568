//! Logical-action checking for diagonal schedules.
//!
//! All gates are diagonal, so a schedule acts on a code state Σ_c |uG1 + c⟩
//! by a phase per basis vector. It implements the target logical gate iff
//! that phase equals the target phase of u for every coset vector c, which
//! also certifies that the codespace is preserved.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::address::AddressableRsCode;
use crate::codes::{axpy, MatF};
use crate::css::CssCode;
use crate::designed::DesignedCode;
use crate::error::{check_budget, sat_pow, Error, Result};
use crate::gates::{GateSchedule, PhasePoly};
use crate::gf::{Elem, FieldCtx, SelfDualBasis};
use crate::ortho::{check_orthogonality, OrthoCheck, OrthoWitness};

pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 1 << 26;
pub const DEFAULT_TRIALS: u64 = 100_000;
/// Stored failures per report.
pub const MAX_FAILURES: usize = 32;

/// A code whose basis states are u·L + c·S with L the logical rows and S a
/// basis of the coset space.
pub trait CodeSpace: Sync {
    fn field(&self) -> &FieldCtx;
    fn len(&self) -> usize;
    fn logical_rows(&self) -> &MatF;
    fn coset_rows(&self) -> &MatF;
}

impl CodeSpace for CssCode {
    fn field(&self) -> &FieldCtx {
        &self.field
    }
    fn len(&self) -> usize {
        self.n
    }
    fn logical_rows(&self) -> &MatF {
        &self.g1
    }
    fn coset_rows(&self) -> &MatF {
        self.g0_basis()
    }
}

/// Anything that assigns a phase tr(...) ∈ {0, 1} to a per-block state.
pub trait PhaseCircuit: Sync {
    fn field(&self) -> &FieldCtx;
    fn phase(&self, state: &[&[Elem]]) -> u8;
    /// Errors if some leg falls outside the given block lengths.
    fn check_fits(&self, lens: &[usize]) -> Result<()>;
}

fn check_legs(s: &GateSchedule, lens: &[usize], scale: usize) -> Result<()> {
    for a in s.applications() {
        for l in &a.legs {
            match lens.get(l.block) {
                None => return Err(Error::Invalid(format!("circuit uses block {} of {}", l.block, lens.len()))),
                Some(&n) if (l.qudit + 1) * scale > n => {
                    return Err(Error::Dimension(format!("qudit {} outside block {}", l.qudit, l.block)))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

impl PhaseCircuit for GateSchedule {
    fn field(&self) -> &FieldCtx {
        GateSchedule::field(self)
    }
    fn phase(&self, state: &[&[Elem]]) -> u8 {
        GateSchedule::phase(self, state)
    }
    fn check_fits(&self, lens: &[usize]) -> Result<()> {
        check_legs(self, lens, 1)
    }
}

/// A qudit schedule run on qubits: each consecutive group of t qubits is
/// read back as one field element through the self-dual basis.
pub struct Expanded<'a> {
    pub schedule: &'a GateSchedule,
    pub basis: &'a SelfDualBasis,
    bit_field: FieldCtx,
}

impl<'a> Expanded<'a> {
    pub fn new(schedule: &'a GateSchedule, basis: &'a SelfDualBasis) -> Expanded<'a> {
        let bit_field = FieldCtx::new(1).expect("GF(2)");
        Expanded { schedule, basis, bit_field }
    }
}

impl PhaseCircuit for Expanded<'_> {
    fn field(&self) -> &FieldCtx {
        &self.bit_field
    }
    fn phase(&self, state: &[&[Elem]]) -> u8 {
        let t = self.basis.len();
        let qudits: Vec<Vec<Elem>> =
            state.iter().map(|b| b.chunks(t).map(|c| self.basis.recomp_elems(c)).collect()).collect();
        let refs: Vec<&[Elem]> = qudits.iter().map(Vec::as_slice).collect();
        self.schedule.phase(&refs)
    }
    fn check_fits(&self, lens: &[usize]) -> Result<()> {
        check_legs(self.schedule, lens, self.basis.len())
    }
}

/// One variable of the target polynomial: logical index `index` of `block`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicalTarget {
    pub block: usize,
    pub index: usize,
}

/// The expected logical phase tr(P(u_{targets})).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalSpec {
    pub poly: PhasePoly,
    pub targets: Vec<LogicalTarget>,
    /// When set, target `index` means the field element recombined from the
    /// logical qubits index·t .. index·t + t through this basis.
    pub grouping: Option<SelfDualBasis>,
}

impl LogicalSpec {
    pub fn new(poly: PhasePoly, targets: Vec<LogicalTarget>) -> Result<LogicalSpec> {
        if targets.len() != poly.arity() {
            return Err(Error::Dimension(format!(
                "{} targets for a {}-variable polynomial",
                targets.len(),
                poly.arity()
            )));
        }
        Ok(LogicalSpec { poly, targets, grouping: None })
    }

    /// Targets given as (block, index) pairs.
    pub fn on(poly: PhasePoly, targets: &[(usize, usize)]) -> Result<LogicalSpec> {
        LogicalSpec::new(poly, targets.iter().map(|&(block, index)| LogicalTarget { block, index }).collect())
    }

    pub fn identity(field: &FieldCtx) -> LogicalSpec {
        LogicalSpec { poly: PhasePoly::identity(field, 0), targets: Vec::new(), grouping: None }
    }

    pub fn grouped(mut self, basis: SelfDualBasis) -> LogicalSpec {
        self.grouping = Some(basis);
        self
    }

    fn width(&self) -> usize {
        self.grouping.as_ref().map_or(1, SelfDualBasis::len)
    }

    fn check(&self, codes: &[&dyn CodeSpace]) -> Result<()> {
        let w = self.width();
        if self.grouping.is_none() && !codes.is_empty() && codes[0].field() != self.poly.field() {
            return Err(Error::FieldMismatch("target polynomial and code fields differ".into()));
        }
        for t in &self.targets {
            let code = codes
                .get(t.block)
                .ok_or_else(|| Error::Invalid(format!("target block {} of {}", t.block, codes.len())))?;
            if (t.index + 1) * w > code.logical_rows().rows() {
                return Err(Error::Invalid(format!("target index {} outside block {}", t.index, t.block)));
            }
        }
        Ok(())
    }

    /// Target phase for per-block logical digit vectors.
    pub fn phase(&self, logical: &[&[Elem]]) -> u8 {
        let vals: Vec<Elem> = match &self.grouping {
            None => self.targets.iter().map(|t| logical[t.block][t.index]).collect(),
            Some(b) => {
                let w = b.len();
                self.targets.iter().map(|t| b.recomp_elems(&logical[t.block][t.index * w..(t.index + 1) * w])).collect()
            }
        };
        self.poly.field().trace(self.poly.value(&vals))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A failing (logical, coset) tuple; identity failures put the index tuple
/// in `logical` and leave `coset` empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub logical: Vec<u32>,
    pub coset: Vec<u32>,
    pub got: u32,
    pub want: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub mode: Mode,
    pub checked: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    /// Exhaustive mode only: whether every logical tuple saw one phase.
    pub coset_constant: Option<bool>,
    pub verdict: Verdict,
}

impl VerifyReport {
    fn finish(
        mode: Mode,
        checked: u64,
        failure_count: u64,
        mut failures: Vec<Failure>,
        coset_constant: Option<bool>,
    ) -> Self {
        failures.sort();
        failures.truncate(MAX_FAILURES);
        let verdict = if failure_count == 0 { Verdict::Pass } else { Verdict::Fail };
        VerifyReport { mode, checked, failure_count, failures, coset_constant, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// SplitMix64: state += 0x9E3779B97F4A7C15, then
/// z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9, z = (z ^ (z >> 27)) · 0x94D049BB133111EB,
/// output z ^ (z >> 31).
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform element of GF(q): the low t bits.
    pub fn next_elem(&mut self, q: u32) -> Elem {
        Elem((self.next_u64() & (q as u64 - 1)) as u32)
    }
}

struct Setup<'a> {
    codes: &'a [&'a dyn CodeSpace],
    q: u32,
    ks: Vec<usize>,
    rs: Vec<usize>,
}

fn setup<'a>(codes: &'a [&'a dyn CodeSpace], circuit: &dyn PhaseCircuit, spec: &LogicalSpec) -> Result<Setup<'a>> {
    let field = circuit.field();
    if codes.iter().any(|c| c.field() != field) {
        return Err(Error::FieldMismatch("circuit and code fields differ".into()));
    }
    let lens: Vec<usize> = codes.iter().map(|c| c.len()).collect();
    circuit.check_fits(&lens)?;
    spec.check(codes)?;
    Ok(Setup {
        codes,
        q: field.q(),
        ks: codes.iter().map(|c| c.logical_rows().rows()).collect(),
        rs: codes.iter().map(|c| c.coset_rows().rows()).collect(),
    })
}

/// Writes Σ digits_j · rows_j into `out`.
fn combine(f: &FieldCtx, rows: &MatF, digits: &[Elem], out: &mut [Elem]) {
    out.fill(Elem::ZERO);
    for (j, &d) in digits.iter().enumerate() {
        if !d.is_zero() {
            axpy(f, out, d, rows.row(j));
        }
    }
}

fn digits_of(mut x: u64, q: u32, len: usize) -> Vec<Elem> {
    let mut d = vec![Elem::ZERO; len];
    for slot in d.iter_mut().rev() {
        *slot = Elem((x % q as u64) as u32);
        x /= q as u64;
    }
    d
}

/// Checks every logical tuple against every coset vector in every block.
/// Needs Π_b q^{k_b + r_b} ≤ `budget`.
pub fn verify_exhaustive(
    codes: &[&dyn CodeSpace],
    circuit: &dyn PhaseCircuit,
    spec: &LogicalSpec,
    budget: u128,
) -> Result<VerifyReport> {
    let s = setup(codes, circuit, spec)?;
    let f = circuit.field();
    let q = s.q;
    let nb = codes.len();
    let k_total: usize = s.ks.iter().sum();
    let r_total: usize = s.rs.iter().sum();
    check_budget(sat_pow(q as u128, k_total + r_total), budget)?;

    // Logical parts per block, indexed by the block's logical digits.
    let logical_parts: Vec<Vec<(Vec<Elem>, Vec<Elem>)>> = (0..nb)
        .map(|b| {
            let count = (q as u64).pow(s.ks[b] as u32);
            (0..count)
                .map(|x| {
                    let d = digits_of(x, q, s.ks[b]);
                    let mut v = vec![Elem::ZERO; codes[b].len()];
                    combine(f, codes[b].logical_rows(), &d, &mut v);
                    (d, v)
                })
                .collect()
        })
        .collect();
    let l_total = (q as u64).pow(k_total as u32);

    let per_task: Vec<(u64, u64, Vec<Failure>, bool)> = (0..l_total)
        .into_par_iter()
        .map(|lx| {
            // Block 0 holds the most significant logical digits.
            let mut rem = lx;
            let mut chosen = vec![0usize; nb];
            for b in (0..nb).rev() {
                let c = (q as u64).pow(s.ks[b] as u32);
                chosen[b] = (rem % c) as usize;
                rem /= c;
            }
            let logical: Vec<&[Elem]> = (0..nb).map(|b| logical_parts[b][chosen[b]].0.as_slice()).collect();
            let want = spec.phase(&logical);
            let flat_logical: Vec<u32> = logical.iter().flat_map(|d| d.iter().map(|e| e.0)).collect();
            let mut coset_digits: Vec<Vec<Elem>> = s.rs.iter().map(|&r| vec![Elem::ZERO; r]).collect();
            let mut states: Vec<Vec<Elem>> = (0..nb).map(|b| logical_parts[b][chosen[b]].1.clone()).collect();
            let (mut checked, mut fails, mut stored, mut first) = (0u64, 0u64, Vec::new(), None);
            let mut constant = true;
            loop {
                let refs: Vec<&[Elem]> = states.iter().map(Vec::as_slice).collect();
                let got = circuit.phase(&refs);
                checked += 1;
                match first {
                    None => first = Some(got),
                    Some(p) if p != got => constant = false,
                    _ => {}
                }
                if got != want {
                    fails += 1;
                    if stored.len() < MAX_FAILURES {
                        stored.push(Failure {
                            logical: flat_logical.clone(),
                            coset: coset_digits.iter().flat_map(|d| d.iter().map(|e| e.0)).collect(),
                            got: got as u32,
                            want: want as u32,
                        });
                    }
                }
                // Odometer over (block, digit) with the last block fastest.
                let mut advanced = false;
                'outer: for b in (0..nb).rev() {
                    let rows = codes[b].coset_rows();
                    for j in (0..s.rs[b]).rev() {
                        let old = coset_digits[b][j].0;
                        if old + 1 < q {
                            coset_digits[b][j] = Elem(old + 1);
                            axpy(f, &mut states[b], Elem(old ^ (old + 1)), rows.row(j));
                            advanced = true;
                            break 'outer;
                        }
                        coset_digits[b][j] = Elem::ZERO;
                        axpy(f, &mut states[b], Elem(old), rows.row(j));
                    }
                }
                if !advanced {
                    break;
                }
            }
            (checked, fails, stored, constant)
        })
        .collect();

    let mut checked = 0;
    let mut count = 0;
    let mut failures = Vec::new();
    let mut constant = true;
    for (c, n, fl, k) in per_task {
        checked += c;
        count += n;
        constant &= k;
        if failures.len() < MAX_FAILURES {
            failures.extend(fl);
        }
    }
    Ok(VerifyReport::finish(Mode::Exhaustive, checked, count, failures, Some(constant)))
}

/// `trials` random (logical, coset) tuples. Per trial and block, the k
/// logical digits are drawn first, then the coset digits.
pub fn verify_sampled(
    codes: &[&dyn CodeSpace],
    circuit: &dyn PhaseCircuit,
    spec: &LogicalSpec,
    trials: u64,
    seed: u64,
) -> Result<VerifyReport> {
    let s = setup(codes, circuit, spec)?;
    let f = circuit.field();
    let nb = codes.len();
    let mut rng = SplitMix64::new(seed);
    let mut count = 0u64;
    let mut failures = Vec::new();
    const CHUNK: u64 = 4096;
    let mut done = 0;
    while done < trials {
        let batch = CHUNK.min(trials - done);
        // Draws are sequential for reproducibility; evaluation is parallel.
        let draws: Vec<Vec<(Vec<Elem>, Vec<Elem>)>> = (0..batch)
            .map(|_| {
                (0..nb)
                    .map(|b| {
                        let u = (0..s.ks[b]).map(|_| rng.next_elem(s.q)).collect();
                        let c = (0..s.rs[b]).map(|_| rng.next_elem(s.q)).collect();
                        (u, c)
                    })
                    .collect()
            })
            .collect();
        let results: Vec<Option<Failure>> = draws
            .par_iter()
            .map(|trial| {
                let states: Vec<Vec<Elem>> = (0..nb)
                    .map(|b| {
                        let code = s.codes[b];
                        let mut v = vec![Elem::ZERO; code.len()];
                        combine(f, code.logical_rows(), &trial[b].0, &mut v);
                        let mut c = vec![Elem::ZERO; code.len()];
                        combine(f, code.coset_rows(), &trial[b].1, &mut c);
                        for (x, y) in v.iter_mut().zip(c) {
                            *x += y;
                        }
                        v
                    })
                    .collect();
                let refs: Vec<&[Elem]> = states.iter().map(Vec::as_slice).collect();
                let logical: Vec<&[Elem]> = trial.iter().map(|(u, _)| u.as_slice()).collect();
                let (got, want) = (circuit.phase(&refs), spec.phase(&logical));
                (got != want).then(|| Failure {
                    logical: trial.iter().flat_map(|(u, _)| u.iter().map(|e| e.0)).collect(),
                    coset: trial.iter().flat_map(|(_, c)| c.iter().map(|e| e.0)).collect(),
                    got: got as u32,
                    want: want as u32,
                })
            })
            .collect();
        for r in results.into_iter().flatten() {
            count += 1;
            failures.push(r);
        }
        failures.sort();
        failures.truncate(MAX_FAILURES);
        done += batch;
    }
    Ok(VerifyReport::finish(Mode::Sampled, trials, count, failures, None))
}

/// The algebraic certificate a construction's correctness reduces to.
pub enum IdentityTarget<'a> {
    /// Basis-tuple sums of an orthogonality witness.
    Ortho { g: &'a MatF, k: usize, witness: &'a OrthoWitness },
    /// Shifted-product sums of the RS code for one address tuple.
    RsShift { code: &'a AddressableRsCode, addresses: &'a [usize] },
    /// The 36-monomial sums behind the designed W gate.
    Designed(&'a DesignedCode),
}

fn from_ortho_check(c: OrthoCheck) -> VerifyReport {
    let failures: Vec<Failure> = c
        .violation
        .iter()
        .map(|v| Failure {
            logical: v.address.into_iter().chain(v.tuple.iter().copied()).map(|x| x as u32).collect(),
            coset: Vec::new(),
            got: v.got.0,
            want: v.want.0,
        })
        .collect();
    let n = failures.len() as u64;
    VerifyReport::finish(Mode::Identity, c.checked, n, failures, None)
}

pub fn verify_identities(target: IdentityTarget<'_>) -> Result<VerifyReport> {
    match target {
        IdentityTarget::Ortho { g, k, witness } => Ok(from_ortho_check(check_orthogonality(g, k, witness)?)),
        IdentityTarget::RsShift { code, addresses } => {
            let (checked, fail) = code.shifted_identity_failure(addresses)?;
            let want = |t: &[usize]| u32::from(t == addresses);
            let failures: Vec<Failure> = fail
                .into_iter()
                .map(|(t, got)| Failure {
                    want: want(&t),
                    logical: t.iter().map(|&x| x as u32).collect(),
                    coset: Vec::new(),
                    got: got.0,
                })
                .collect();
            let n = failures.len() as u64;
            Ok(VerifyReport::finish(Mode::Identity, checked, n, failures, None))
        }
        IdentityTarget::Designed(d) => Ok(from_ortho_check(d.check_extended_orthogonality())),
    }
}
