//! The fully addressable Reed-Solomon CCZ code and its schedules.
//!
//! Over F_q with q = n², the physical qudits are the elements α_i of the
//! subfield K of order n (in encoding order) and the logical qudits sit at
//! β_A = ζ + K[A]. Since Δ_{A,B} = β_A + β_B lies in K, the shifted point
//! α_i + Δ_{A,B} is again a physical qudit, which is what lets one
//! transversal circuit address an arbitrary logical triple.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codes::{interpolation_vector, partially_systematic, rs_generator, EvalPoints, MatF};
use crate::css::{build_css_with, CssCode, DistanceOptions};
use crate::error::{Error, Result};
use crate::gates::{Application, GateFamily, GateSchedule, Leg};
use crate::gf::{Elem, FieldCtx};
use crate::ortho::{OrthoKind, OrthoWitness};

/// Largest number of legs supported by the shifted construction.
pub const MAX_SHIFTED_LEGS: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddressableRsCode {
    pub code: CssCode,
    pub field: FieldCtx,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// The α's; physical qudit i holds K[i].
    pub subfield: Vec<Elem>,
    pub zeta: Elem,
    pub betas: Vec<Elem>,
    /// Γ^A with f(β_A) = Σ_i Γ^A_i f(α_i) for deg f < n.
    pub gammas: Vec<Vec<Elem>>,
    index: Vec<u32>,
}

pub fn build_rs_addressable(n: usize, m: usize, k: usize) -> Result<AddressableRsCode> {
    if n < 2 || !n.is_power_of_two() || n > 256 {
        return Err(Error::Bound(format!("n must be a power of two with 2 <= n and n^2 <= 2^16, got {n}")));
    }
    if m == 0 || 3 * (m - 1) >= n {
        return Err(Error::Bound(format!("m < n/3 + 1 fails for n = {n}, m = {m}")));
    }
    if k == 0 || k > m {
        return Err(Error::Bound(format!("k in [m] fails for k = {k}, m = {m}")));
    }
    let t = 2 * n.trailing_zeros();
    let field = FieldCtx::new(t)?;
    let subfield = field.subfield_elements(n as u64)?;
    let mut index = vec![u32::MAX; field.q() as usize];
    for (i, a) in subfield.iter().enumerate() {
        index[a.0 as usize] = i as u32;
    }
    let zeta = field.elements().find(|e| index[e.0 as usize] == u32::MAX).expect("K is a proper subfield");
    let betas: Vec<Elem> = subfield[..k].iter().map(|&a| zeta + a).collect();
    let mut pts = betas.clone();
    pts.extend_from_slice(&subfield);
    let pts = EvalPoints::new(&field, pts)?;
    let (g1, g0) = partially_systematic(&rs_generator(&field, &pts, m)?, k)?;
    let g = g1.stack(&g0)?;
    let opts = DistanceOptions { bound_g: Some(n - m + 1), bound_g0_dual: Some(m - k + 1), ..Default::default() };
    let code = build_css_with(&g, k, &opts)?;
    let alphas = EvalPoints::new(&field, subfield.clone())?;
    let gammas = betas.iter().map(|&b| interpolation_vector(&field, b, &alphas)).collect::<Result<Vec<_>>>()?;
    Ok(AddressableRsCode { code, field, n, m, k, subfield, zeta, betas, gammas, index })
}

impl AddressableRsCode {
    /// Physical qudit holding the subfield element `x`.
    pub fn qudit_of(&self, x: Elem) -> Option<usize> {
        match self.index.get(x.0 as usize) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }

    /// Δ_{A,B} = β_A + β_B, an element of K.
    pub fn delta(&self, a: usize, b: usize) -> Elem {
        self.betas[a] + self.betas[b]
    }

    /// The generator G = [G1; G0] restricted to physical qudits.
    pub fn generator(&self) -> MatF {
        self.code.g1.stack(&self.code.g0).expect("same width")
    }

    /// Γ^A as an addressable strong witness of degree ⌊(n−1)/(m−1)⌋.
    pub fn witness(&self) -> OrthoWitness {
        let ell = if self.m == 1 { usize::MAX / 2 } else { (self.n - 1) / (self.m - 1) };
        OrthoWitness {
            kind: OrthoKind::AddressableStrong,
            ell: ell.min(64),
            tau: vec![Elem::ONE; self.k],
            gamma: self.gammas.clone(),
        }
    }

    fn check_addresses(&self, addrs: &[usize]) -> Result<()> {
        if let Some(&bad) = addrs.iter().find(|&&a| a >= self.k) {
            return Err(Error::Invalid(format!("logical index {bad} outside 0..{}", self.k)));
        }
        Ok(())
    }

    /// For leg j, the shift Δ_{A_1, A_j}.
    pub fn shifts(&self, addrs: &[usize]) -> Vec<Elem> {
        addrs.iter().map(|&a| self.delta(addrs[0], a)).collect()
    }

    /// Checks deg(P)·(m−1) < n for a family of the given degree.
    fn check_degree(&self, degree: u32) -> Result<()> {
        if degree as usize * (self.m - 1) >= self.n {
            return Err(Error::Bound(format!(
                "m < 1 + n/ell fails for n = {}, m = {}, ell = {degree}",
                self.n, self.m
            )));
        }
        Ok(())
    }

    /// Π_i P^{γΓ^{A_1}_i}[α_i + Δ_{A_1,A_1}, ..., α_i + Δ_{A_1,A_e}] with leg j
    /// placed in `blocks[j]`. Realizes the logical phase tr(γ P(u_{A_1}, ...)).
    pub fn shifted_schedule(
        &self,
        family: &GateFamily,
        addrs: &[usize],
        gamma: Elem,
        blocks: &[usize],
    ) -> Result<GateSchedule> {
        self.check_addresses(addrs)?;
        let coeffs: Vec<Elem> = self.gammas[addrs[0]].iter().map(|&g| self.field.mul(gamma, g)).collect();
        self.schedule_from_coeffs(family, &self.shifts(addrs), &coeffs, blocks)
    }

    fn schedule_from_coeffs(
        &self,
        family: &GateFamily,
        shifts: &[Elem],
        coeffs: &[Elem],
        blocks: &[usize],
    ) -> Result<GateSchedule> {
        let e = family.arity();
        if e == 0 || e > MAX_SHIFTED_LEGS || shifts.len() != e || blocks.len() != e {
            return Err(Error::Dimension(format!(
                "{} addresses and {} blocks for a {e}-leg gate (at most {MAX_SHIFTED_LEGS})",
                shifts.len(),
                blocks.len()
            )));
        }
        if matches!(family, GateFamily::Poly(ms) if ms.iter().any(|m| m.exps.len() != e)) {
            return Err(Error::Dimension("polynomial arity differs from the address count".into()));
        }
        self.check_degree(family.degree())?;
        let f = &self.field;
        let mut s = GateSchedule::new(f);
        let mut layers = Vec::new();
        let same_block = blocks.iter().all(|&b| b == blocks[0]);
        // F_2-span of the shifts: gates inside one coset α + span touch only
        // that coset, so the offset of α inside its coset is a valid layer.
        let span = f2_span(shifts);
        for (i, &alpha) in self.subfield.iter().enumerate() {
            if coeffs[i].is_zero() {
                continue;
            }
            let legs = shifts
                .iter()
                .zip(blocks)
                .map(|(&d, &b)| Leg::new(b, self.qudit_of(alpha + d).expect("shift stays in K")))
                .collect();
            s.push(Application::new(family.clone(), coeffs[i], legs))?;
            if same_block {
                let rep = span.iter().map(|&o| alpha + o).min().expect("span contains 0");
                layers.push(span.iter().position(|&o| o == alpha + rep).expect("offset in span"));
            }
        }
        let all_distinct = (0..e).all(|a| (a + 1..e).all(|b| blocks[a] != blocks[b]));
        Ok(if all_distinct {
            let zeros = vec![0; s.len()];
            s.with_layers_or_greedy(&zeros)
        } else if same_block {
            s.with_layers_or_greedy(&layers)
        } else {
            s.layer_greedy()
        })
    }

    /// CCZ^γ[A,B,C] inside one block.
    pub fn intra_ccz_schedule(&self, a: usize, b: usize, c: usize, gamma: Elem) -> Result<GateSchedule> {
        self.shifted_schedule(&GateFamily::Mcz(3), &[a, b, c], gamma, &[0, 0, 0])
    }

    /// CCZ^γ_{123}[A,B,C] across three blocks (or two, with a repeated id).
    pub fn inter_ccz_schedule(
        &self,
        a: usize,
        b: usize,
        c: usize,
        gamma: Elem,
        blocks: [usize; 3],
    ) -> Result<GateSchedule> {
        self.shifted_schedule(&GateFamily::Mcz(3), &[a, b, c], gamma, &blocks)
    }

    /// Several triples sharing (Δ_AB, Δ_AC) in one circuit with coefficients
    /// Σ_j γ_j Γ^{A_j}_i.
    pub fn merged_triples_schedule(
        &self,
        triples: &[(usize, usize, usize, Elem)],
        blocks: [usize; 3],
    ) -> Result<GateSchedule> {
        let Some(&(a0, b0, c0, _)) = triples.first() else {
            return Ok(GateSchedule::new(&self.field));
        };
        let mut coeffs = vec![Elem::ZERO; self.n];
        for &(a, b, c, gamma) in triples {
            self.check_addresses(&[a, b, c])?;
            if self.delta(a, b) != self.delta(a0, b0) || self.delta(a, c) != self.delta(a0, c0) {
                return Err(Error::Invalid(format!(
                    "triple ({a},{b},{c}) has a different Δ pair than ({a0},{b0},{c0})"
                )));
            }
            for (acc, &g) in coeffs.iter_mut().zip(&self.gammas[a]) {
                *acc += self.field.mul(gamma, g);
            }
        }
        self.schedule_from_coeffs(&GateFamily::Mcz(3), &self.shifts(&[a0, b0, c0]), &coeffs, &blocks)
    }

    /// First failing shifted-product sum, if any, over all row tuples:
    /// Σ_i Γ^{A_1}_i Π_j g̃^{a_j}(α_i + Δ_{A_1,A_j}) must be [a_j = A_j for all j].
    pub fn shifted_identity_failure(&self, addrs: &[usize]) -> Result<(u64, Option<(Vec<usize>, Elem)>)> {
        self.check_addresses(addrs)?;
        let f = &self.field;
        let g = self.generator();
        let e = addrs.len();
        let shifted: Vec<Vec<usize>> = self
            .shifts(addrs)
            .iter()
            .map(|&d| self.subfield.iter().map(|&a| self.qudit_of(a + d).expect("in K")).collect())
            .collect();
        let gamma = &self.gammas[addrs[0]];
        let rows = g.rows();
        let mut tuple = vec![0usize; e];
        let mut checked = 0u64;
        loop {
            let mut sum = Elem::ZERO;
            for i in 0..self.n {
                let mut p = gamma[i];
                for j in 0..e {
                    p = f.mul(p, g.get(tuple[j], shifted[j][i]));
                }
                sum += p;
            }
            checked += 1;
            let want = if tuple.iter().zip(addrs).all(|(t, a)| t == a) { Elem::ONE } else { Elem::ZERO };
            if sum != want {
                return Ok((checked, Some((tuple, sum))));
            }
            let mut pos = e;
            loop {
                if pos == 0 {
                    return Ok((checked, None));
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < rows {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }
}

/// All F_2-combinations of `v`, sorted and deduplicated.
fn f2_span(v: &[Elem]) -> Vec<Elem> {
    let mut span = vec![Elem::ZERO];
    for &x in v {
        if !span.contains(&x) {
            let shifted: Vec<Elem> = span.iter().map(|&s| s + x).collect();
            span.extend(shifted);
        }
    }
    span.sort();
    span.dedup();
    span
}

/// Witness-based transversal schedule: one gate per physical index i with
/// coefficient β·Γ^A_i, leg j on block j. Realizes U^{β τ_A} on index A.
pub fn single_index_schedule(
    g: &MatF,
    k: usize,
    w: &OrthoWitness,
    a: usize,
    family: &GateFamily,
    beta: Elem,
) -> Result<GateSchedule> {
    w.validate(g, k)?;
    if a >= k {
        return Err(Error::Invalid(format!("logical index {a} outside 0..{k}")));
    }
    if let GateFamily::Poly(ms) = family {
        if ms.iter().any(|m| m.exps.iter().all(|&d| d == 0)) {
            return Err(Error::Witness("polynomial gates need a zero constant term".into()));
        }
    }
    let deg = family.degree() as usize;
    let ok = match w.kind {
        OrthoKind::AddressableStrong => w.ell >= deg,
        OrthoKind::Addressable => family.is_homogeneous() && w.ell == deg,
        _ => false,
    };
    if !ok {
        return Err(Error::Witness(format!(
            "{} of degree {deg}{} needs an addressable{} witness of that degree; got {:?} with ell = {}",
            family,
            if family.is_homogeneous() { "" } else { " (non-homogeneous)" },
            if family.is_homogeneous() { "" } else { " strong" },
            w.kind,
            w.ell
        )));
    }
    let f = g.field();
    let mut s = GateSchedule::new(f);
    for (i, &gi) in w.gamma[a].iter().enumerate() {
        let c = f.mul(beta, gi);
        if c.is_zero() {
            continue;
        }
        let legs = (0..family.arity()).map(|j| Leg::new(j, i)).collect();
        let mut app = Application::new(family.clone(), c, legs);
        app.layer = Some(0);
        s.push(app)?;
    }
    Ok(s)
}

#[derive(Serialize, Deserialize)]
struct RsRepr {
    code: CssCode,
    n: usize,
    m: usize,
    k: usize,
    zeta: Elem,
    alphas: Vec<Elem>,
    betas: Vec<Elem>,
    gammas: Vec<Vec<Elem>>,
}

impl Serialize for AddressableRsCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RsRepr {
            code: self.code.clone(),
            n: self.n,
            m: self.m,
            k: self.k,
            zeta: self.zeta,
            alphas: self.subfield.clone(),
            betas: self.betas.clone(),
            gammas: self.gammas.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AddressableRsCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = RsRepr::deserialize(d)?;
        let built = build_rs_addressable(r.n, r.m, r.k).map_err(D::Error::custom)?;
        if built.code != r.code || built.subfield != r.alphas || built.betas != r.betas || built.gammas != r.gammas {
            return Err(D::Error::custom("bundle does not match the canonical construction"));
        }
        Ok(built)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameters() {
        let c = build_rs_addressable(4, 2, 1).unwrap();
        assert_eq!((c.code.n, c.code.k), (4, 1));
        assert!(c.code.d_lower >= 2);
        let c = build_rs_addressable(8, 3, 2).unwrap();
        assert_eq!((c.code.n, c.code.k, c.field.q()), (8, 2, 64));
        assert!(c.code.d_lower >= 2);
        assert!(build_rs_addressable(16, 6, 3).is_ok());
        assert!(matches!(build_rs_addressable(16, 7, 3), Err(Error::Bound(_))));
        assert!(matches!(build_rs_addressable(8, 4, 2), Err(Error::Bound(m)) if m.contains("m < n/3 + 1")));
        assert!(build_rs_addressable(6, 2, 1).is_err());
    }

    #[test]
    fn deltas_stay_in_subfield() {
        let c = build_rs_addressable(8, 3, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!(c.qudit_of(c.delta(a, b)).is_some());
            }
        }
        assert!(c.qudit_of(c.zeta).is_none());
    }

    #[test]
    fn shifted_identities_hold() {
        let c = build_rs_addressable(8, 3, 2).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for cc in 0..2 {
                    let (checked, fail) = c.shifted_identity_failure(&[a, b, cc]).unwrap();
                    assert_eq!(checked, 27);
                    assert!(fail.is_none());
                }
            }
        }
    }

    #[test]
    fn depths() {
        let c = build_rs_addressable(8, 3, 3).unwrap();
        let s = c.intra_ccz_schedule(0, 1, 2, Elem(5)).unwrap();
        assert!(s.depth().unwrap() <= 4);
        assert!(s.max_usage() <= 3);
        let s = c.inter_ccz_schedule(0, 1, 2, Elem(5), [0, 1, 2]).unwrap();
        assert_eq!(s.depth(), Some(1));
        let s = c.inter_ccz_schedule(0, 1, 2, Elem(5), [0, 0, 1]).unwrap();
        assert!(s.depth().unwrap() <= 2);
        assert!(c.intra_ccz_schedule(0, 1, 2, Elem(0)).unwrap().is_empty());
        assert!(c.intra_ccz_schedule(0, 1, 3, Elem(1)).is_err());
    }

    #[test]
    fn merged_requires_equal_deltas() {
        let c = build_rs_addressable(8, 3, 3).unwrap();
        // Δ(0,0) = Δ(1,1) = 0, so [A,A,A] triples always merge.
        let s = c.merged_triples_schedule(&[(0, 0, 0, Elem(1)), (1, 1, 1, Elem(2))], [0, 1, 2]).unwrap();
        assert_eq!(s.depth(), Some(1));
        assert!(c.merged_triples_schedule(&[(0, 1, 2, Elem(1)), (0, 0, 0, Elem(2))], [0, 1, 2]).is_err());
    }

    #[test]
    fn single_index_rejects_plain_for_nonhomogeneous() {
        use crate::gates::Monomial;
        let f = FieldCtx::new(8).unwrap();
        let (g, w) = crate::ortho::rs_addressable_matrix(&f, 18, 5, 2, 3).unwrap();
        let p = GateFamily::Poly(vec![
            Monomial { coeff: Elem(1), exps: vec![2, 1] },
            Monomial { coeff: Elem(3), exps: vec![1, 1] },
        ]);
        assert!(single_index_schedule(&g, 2, &w, 0, &p, Elem(1)).is_ok());
        let mut plain = w.clone();
        plain.kind = OrthoKind::Addressable;
        assert!(matches!(single_index_schedule(&g, 2, &plain, 0, &p, Elem(1)), Err(Error::Witness(_))));
        assert!(single_index_schedule(&g, 2, &plain, 0, &GateFamily::Mcz(3), Elem(1)).is_ok());
    }

    #[test]
    fn bundle_round_trip() {
        let c = build_rs_addressable(4, 2, 1).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: AddressableRsCode = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
