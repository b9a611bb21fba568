use std::collections::HashMap;

use crate::codes::MatF;
use crate::error::{Error, Result};
use crate::gates::{Application, GateFamily, GateSchedule, Leg};
use crate::gf::{Elem, FieldCtx, SelfDualBasis};
use crate::verify::SplitMix64;

/// Degree-3 multiplication-friendly embedding of GF(2^t) into F_2^r with
/// r = t³, optionally repeated over several copies.
///
/// Coordinate (i, j, k) sits at i·t² + j·t + k. The embedding copies basis
/// coordinate i of the input to every (i, ·, ·). The pullbacks are
/// π1⁻¹ = id, π2⁻¹(i,j,k) = (j,k,i), π3⁻¹(i,j,k) = (k,i,j), so the star
/// product at (i,j,k) is u_i v_j w_k, and extraction sums α_i α_j α_k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mfe {
    pub t: usize,
    /// Qubits per copy.
    pub r: usize,
    pub copies: usize,
    /// t × (copies·r): row i is φ(e_i).
    pub embed: MatF,
    /// r × t: row (i,j,k) is B(α_i α_j α_k). Reads the first copy only.
    pub extract: MatF,
    pub pullbacks: [Vec<usize>; 3],
    field: FieldCtx,
    basis: SelfDualBasis,
}

pub fn mfe_degree3(f: &FieldCtx, basis: &SelfDualBasis) -> Result<Mfe> {
    let t = basis.len();
    if t == 0 || t > 8 || !basis.is_self_dual(f) {
        return Err(Error::Invalid(format!("degree-3 MFE needs a self-dual basis with t <= 8, got t = {t}")));
    }
    let r = t * t * t;
    let f2 = FieldCtx::new(1)?;
    let idx = |i: usize, j: usize, k: usize| i * t * t + j * t + k;
    let mut embed = MatF::zeros(&f2, t, r);
    let mut extract = MatF::zeros(&f2, r, t);
    let mut pullbacks = [vec![0; r], vec![0; r], vec![0; r]];
    for i in 0..t {
        for j in 0..t {
            for k in 0..t {
                let p = idx(i, j, k);
                embed.set(i, p, Elem::ONE);
                let prod = f.mul(basis.elems[i], f.mul(basis.elems[j], basis.elems[k]));
                for (c, b) in basis.decomp(f, prod).into_iter().enumerate() {
                    extract.set(p, c, Elem(b as u32));
                }
                pullbacks[0][p] = p;
                pullbacks[1][p] = idx(j, k, i);
                pullbacks[2][p] = idx(k, i, j);
            }
        }
    }
    Ok(Mfe { t, r, copies: 1, embed, extract, pullbacks, field: f.clone(), basis: basis.clone() })
}

/// The same embedding repeated `copies` times; permutations act per copy.
pub fn mfe_duplicate(m: &Mfe, copies: usize) -> Result<Mfe> {
    if copies == 0 {
        return Err(Error::Invalid("at least one copy is required".into()));
    }
    let base = m.single_copy_embed();
    let f2 = base.field().clone();
    let mut embed = MatF::zeros(&f2, m.t, copies * m.r);
    for i in 0..m.t {
        for c in 0..copies {
            for j in 0..m.r {
                embed.set(i, c * m.r + j, base.get(i, j));
            }
        }
    }
    Ok(Mfe { copies, embed, ..m.clone() })
}

impl Mfe {
    pub fn width(&self) -> usize {
        self.copies * self.r
    }

    fn single_copy_embed(&self) -> MatF {
        self.embed.select_cols(&(0..self.r).collect::<Vec<_>>())
    }

    /// ME_{q→2}(x) = φ(B(x)).
    pub fn encode(&self, x: Elem) -> Vec<Elem> {
        let mut bits = vec![Elem::ZERO; self.t];
        self.basis.decomp_into(&self.field, x, &mut bits);
        self.embed.combine_rows(&bits)
    }

    /// ME_{2→q}(v) = B⁻¹(v·T) on the first copy.
    pub fn decode(&self, v: &[Elem]) -> Elem {
        let coords = self.extract.combine_rows(&v[..self.r]);
        self.basis.recomp_elems(&coords)
    }

    /// π_l applied to every copy of v: π_l(v)_j = v_{π_l⁻¹(j)}.
    pub fn permute(&self, l: usize, v: &[Elem]) -> Vec<Elem> {
        let mut out = vec![Elem::ZERO; v.len()];
        for c in 0..self.copies {
            for j in 0..self.r {
                out[c * self.r + j] = v[c * self.r + self.pullbacks[l][j]];
            }
        }
        out
    }

    /// Does x·y·z = ME_{2→q}[π1(ME(x)) ⋆ π2(ME(y)) ⋆ π3(ME(z))] hold?
    pub fn identity_holds(&self, x: Elem, y: Elem, z: Elem) -> bool {
        let (a, b, c) =
            (self.permute(0, &self.encode(x)), self.permute(1, &self.encode(y)), self.permute(2, &self.encode(z)));
        let star: Vec<Elem> = a.iter().zip(&b).zip(&c).map(|((p, q), r)| Elem(p.0 & q.0 & r.0)).collect();
        self.decode(&star) == self.field.mul(x, self.field.mul(y, z))
    }

    /// First failing triple over all of GF(q)³.
    pub fn check_exhaustive(&self) -> Option<(Elem, Elem, Elem)> {
        let f = &self.field;
        for x in f.elements() {
            for y in f.elements() {
                for z in f.elements() {
                    if !self.identity_holds(x, y, z) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn check_sampled(&self, trials: u64, seed: u64) -> Option<(Elem, Elem, Elem)> {
        let mut rng = SplitMix64::new(seed);
        let q = self.field.q();
        (0..trials)
            .map(|_| (rng.next_elem(q), rng.next_elem(q), rng.next_elem(q)))
            .find(|&(x, y, z)| !self.identity_holds(x, y, z))
    }

    /// Λ(β)_j = B(β)·T_j = tr(β α_i α_j α_k).
    pub fn lambda(&self, beta: Elem) -> Vec<u8> {
        let b = self.basis.decomp(&self.field, beta);
        (0..self.r)
            .map(|j| self.extract.row(j).iter().zip(&b).fold(0u8, |acc, (e, &bit)| acc ^ (e.0 as u8 & bit)))
            .collect()
    }

    /// Maps a qudit-level CCZ schedule to physical CCZ gates. Every
    /// (block, qudit) leg occurrence takes the next unused copy, so the
    /// output is depth one whenever no qudit carries more legs than copies.
    pub fn transform(&self, s: &GateSchedule) -> Result<GateSchedule> {
        if s.field() != &self.field {
            return Err(Error::FieldMismatch("schedule field differs from the embedding field".into()));
        }
        let f2 = self.embed.field();
        let w = self.width();
        let mut used: HashMap<(usize, usize), usize> = HashMap::new();
        let mut out = GateSchedule::new(f2);
        for app in s.applications() {
            if app.family != GateFamily::Mcz(3) {
                return Err(Error::Invalid(format!("MFE transform expects CCZ gates, got {}", app.family)));
            }
            let mut copy = [0usize; 3];
            for (l, leg) in app.legs.iter().enumerate() {
                let u = used.entry((leg.block, leg.qudit)).or_insert(0);
                if *u >= self.copies {
                    return Err(Error::Invalid(format!(
                        "qudit {} of block {} carries more than {} legs; use more copies",
                        leg.qudit, leg.block, self.copies
                    )));
                }
                copy[l] = *u;
                *u += 1;
            }
            for (j, &bit) in self.lambda(app.beta).iter().enumerate() {
                if bit == 0 {
                    continue;
                }
                let legs = (0..3)
                    .map(|l| {
                        let leg = app.legs[l];
                        Leg::new(leg.block, leg.qudit * w + copy[l] * self.r + self.pullbacks[l][j])
                    })
                    .collect();
                let mut g = Application::new(GateFamily::Mcz(3), Elem::ONE, legs);
                g.layer = Some(0);
                out.push(g)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_exhaustive_small() {
        for t in 1..=3 {
            let f = FieldCtx::new(t).unwrap();
            let m = mfe_degree3(&f, &f.self_dual_basis()).unwrap();
            assert_eq!(m.r, (t * t * t) as usize);
            assert_eq!(m.embed.rank(), t as usize);
            assert!(m.check_exhaustive().is_none());
        }
        let f = FieldCtx::new(2).unwrap();
        let m = mfe_degree3(&f, &f.self_dual_basis()).unwrap();
        let d = mfe_duplicate(&m, 4).unwrap();
        assert_eq!(d.width(), 32);
        assert!(d.check_exhaustive().is_none());
        assert_eq!(mfe_duplicate(&m, 1).unwrap(), m);
    }

    #[test]
    fn lambda_matches_trace() {
        let f = FieldCtx::new(4).unwrap();
        let b = f.self_dual_basis();
        let m = mfe_degree3(&f, &b).unwrap();
        let beta = Elem(11);
        let lam = m.lambda(beta);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let p = f.mul(b.elems[i], f.mul(b.elems[j], b.elems[k]));
                    assert_eq!(lam[i * 16 + j * 4 + k], f.trace(f.mul(beta, p)));
                }
            }
        }
        assert!(m.lambda(Elem::ZERO).iter().all(|&x| x == 0));
    }
}
