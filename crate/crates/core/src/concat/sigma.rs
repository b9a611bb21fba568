use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{w_value, Application, GateFamily, GateSchedule, Leg};
use crate::gf::{Elem, FieldCtx, SelfDualBasis};

/// Z/CZ/CCZ exponents with tr(γ (B⁻¹(u))⁷) = Σ κ_i u_i + Σ κ_ij u_i u_j + Σ κ_ijk u_i u_j u_k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaTables {
    pub t: usize,
    pub singles: Vec<u8>,
    /// ((i, j), κ_ij) for i < j, lexicographic.
    pub pairs: Vec<((usize, usize), u8)>,
    /// ((i, j, k), κ_ijk) for i < j < k, lexicographic.
    pub triples: Vec<((usize, usize, usize), u8)>,
}

impl SigmaTables {
    pub fn phase(&self, u: &[u8]) -> u8 {
        let mut p = 0;
        for (i, &k) in self.singles.iter().enumerate() {
            p ^= k & u[i];
        }
        for &((i, j), k) in &self.pairs {
            p ^= k & u[i] & u[j];
        }
        for &((i, j, l), k) in &self.triples {
            p ^= k & u[i] & u[j] & u[l];
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.singles
            .iter()
            .chain(self.pairs.iter().map(|p| &p.1))
            .chain(self.triples.iter().map(|p| &p.1))
            .all(|&k| k == 0)
    }
}

pub fn sigma_decompose(f: &FieldCtx, basis: &SelfDualBasis, gamma: Elem) -> SigmaTables {
    let a = &basis.elems;
    let t = a.len();
    let tr = |x: Elem| f.trace(f.mul(gamma, x));
    let singles = a.iter().map(|&x| tr(f.pow(x, 7))).collect();
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    for i in 0..t {
        for j in i + 1..t {
            let s = (1..=6u64).fold(Elem::ZERO, |acc, e| acc + f.mul(f.pow(a[i], e), f.pow(a[j], 7 - e)));
            pairs.push(((i, j), tr(s)));
            for k in j + 1..t {
                triples.push(((i, j, k), tr(w_value(f, [a[i], a[j], a[k]]))));
            }
        }
    }
    SigmaTables { t, singles, pairs, triples }
}

/// Copies per qubit that make the Σ circuit depth one: 1 + t(t−1)/2.
pub fn omega(t: usize) -> usize {
    1 + t * (t.saturating_sub(1)) / 2
}

/// Rank of a gate among all potential Σ gates touching qubit `i`: Z first,
/// then CZ by partner, then CCZ by partner pair.
fn rank(t: usize, i: usize, others: &[usize]) -> usize {
    let shift = |j: usize| if j < i { j } else { j - 1 };
    match others {
        [] => 0,
        [j] => 1 + shift(*j),
        [j, k] => {
            let (a, b) = (shift(*j), shift(*k));
            let m = t - 1;
            // Index of the pair (a, b), a < b, among pairs of 0..m.
            t + a * m - a * (a + 1) / 2 + (b - a - 1)
        }
        _ => unreachable!("Σ gates have at most three legs"),
    }
}

/// Replaces single-leg U_7 qudit gates by their Z/CZ/CCZ circuits over the
/// t qubits of each q-block. With `copies` = Ω every physical qubit is
/// duplicated and each gate reads its own copy, giving depth one; with
/// `copies` = 1 the circuit is layered greedily.
pub fn expand_sigma(s: &GateSchedule, basis: &SelfDualBasis, copies: usize) -> Result<GateSchedule> {
    let f = s.field();
    let t = basis.len();
    if copies != 1 && copies < omega(t) {
        return Err(Error::Invalid(format!("{copies} copies, need 1 or at least {}", omega(t))));
    }
    let mut merged: BTreeMap<(usize, usize), Elem> = BTreeMap::new();
    for app in s.applications() {
        if app.family != GateFamily::Power(7) {
            return Err(Error::Invalid(format!("expected U7 gates, got {}", app.family)));
        }
        *merged.entry((app.legs[0].block, app.legs[0].qudit)).or_insert(Elem::ZERO) += app.beta;
    }
    let f2 = FieldCtx::new(1)?;
    let mut out = GateSchedule::new(&f2);
    let qubit = |b: usize, x: usize, i: usize, others: &[usize]| {
        let copy = if copies == 1 { 0 } else { rank(t, i, others) };
        Leg::new(b, (x * t + i) * copies + copy)
    };
    for (&(b, x), &gamma) in &merged {
        let tab = sigma_decompose(f, basis, gamma);
        let mut emit = |qs: &[usize]| -> Result<()> {
            let legs = qs
                .iter()
                .map(|&i| {
                    let others: Vec<usize> = qs.iter().copied().filter(|&j| j != i).collect();
                    qubit(b, x, i, &others)
                })
                .collect();
            out.push(Application::new(GateFamily::Mcz(qs.len()), Elem::ONE, legs))
        };
        for (i, &k) in tab.singles.iter().enumerate() {
            if k == 1 {
                emit(&[i])?;
            }
        }
        for &((i, j), k) in &tab.pairs {
            if k == 1 {
                emit(&[i, j])?;
            }
        }
        for &((i, j, l), k) in &tab.triples {
            if k == 1 {
                emit(&[i, j, l])?;
            }
        }
    }
    if copies == 1 {
        return Ok(out.layer_greedy());
    }
    for a in out.applications_mut() {
        a.layer = Some(0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_reproduce_seventh_power() {
        let f = FieldCtx::new(4).unwrap();
        let b = f.self_dual_basis();
        for gamma in f.elements() {
            let tab = sigma_decompose(&f, &b, gamma);
            for x in 0..16u32 {
                let u: Vec<u8> = (0..4).map(|i| ((x >> i) & 1) as u8).collect();
                let v = b.recomp(&u);
                assert_eq!(tab.phase(&u), f.trace(f.mul(gamma, f.pow(v, 7))));
            }
        }
        assert!(sigma_decompose(&f, &b, Elem::ZERO).is_zero());
    }

    #[test]
    fn ranks_are_a_bijection() {
        for t in 1..=8 {
            for i in 0..t {
                let mut seen = vec![false; omega(t)];
                let others: Vec<usize> = (0..t).filter(|&j| j != i).collect();
                let mut mark = |r: usize| {
                    assert!(!seen[r]);
                    seen[r] = true;
                };
                mark(rank(t, i, &[]));
                for &j in &others {
                    mark(rank(t, i, &[j]));
                }
                for (a, &j) in others.iter().enumerate() {
                    for &k in &others[a + 1..] {
                        mark(rank(t, i, &[j, k]));
                    }
                }
                assert!(seen.iter().all(|&s| s));
            }
        }
    }

    #[test]
    fn duplicated_expansion_is_depth_one() {
        let f = FieldCtx::new(5).unwrap();
        let b = f.self_dual_basis();
        let mut s = GateSchedule::new(&f);
        for x in 0..3 {
            s.push(Application::new(GateFamily::Power(7), Elem(7 + x as u32), vec![Leg::new(0, x)])).unwrap();
        }
        let e = expand_sigma(&s, &b, omega(5)).unwrap();
        assert!(e.layering_is_valid());
        assert_eq!(e.depth(), Some(1));
        assert!(expand_sigma(&s, &b, 3).is_err());
    }
}
