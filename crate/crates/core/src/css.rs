//! CSS codes Q = CSS(X, row(G0); Z, row(G)^⊥) from a generator matrix
//! G = [G1; G0] whose first k rows carry the logical X operators.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::codes::{axpy, min_weight_bruteforce, weight, MatF};
use crate::error::{check_budget, sat_pow, Error, Result};
use crate::gf::{Elem, FieldCtx};

/// Default cap on vectors enumerated for exact distances.
pub const DEFAULT_DISTANCE_BUDGET: u128 = 1 << 24;

/// Where a distance bound came from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceProvenance {
    /// Classical distances enumerated exactly.
    Exact,
    /// Analytic MDS bound supplied by the constructor.
    MdsBound,
    /// Neither was available; the bound is the trivial one.
    Trivial,
}

/// Inputs for the distance bound d(Q) ≥ min(d(row(G0)^⊥), d(row(G))).
#[derive(Clone, Debug)]
pub struct DistanceOptions {
    pub budget: u128,
    /// Analytic lower bound on d(row(G)).
    pub bound_g: Option<usize>,
    /// Analytic lower bound on d(row(G0)^⊥).
    pub bound_g0_dual: Option<usize>,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions { budget: DEFAULT_DISTANCE_BUDGET, bound_g: None, bound_g0_dual: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    pub field: FieldCtx,
    pub n: usize,
    pub k: usize,
    /// Logical X representatives g^a.
    pub g1: MatF,
    /// X-stabilizer generators, as given.
    pub g0: MatF,
    /// Z-stabilizer generators, a basis of row(G)^⊥.
    pub zdual: MatF,
    /// Logical Z representatives h^b with g^a·h^b = δ_ab and h^b ⊥ row(G0).
    pub h: MatF,
    pub d_lower: usize,
    pub d_provenance: DistanceProvenance,
    g0_basis: MatF,
}

/// Checks rank(G1) = k and row(G1) ∩ row(G0) = 0.
pub fn independence_holds(g: &MatF, k: usize) -> bool {
    if k > g.rows() {
        return false;
    }
    let g1 = g.select_rows(0..k);
    let g0 = g.select_rows(k..g.rows());
    g1.rank() == k && g.rank() == k + g0.rank()
}

pub fn build_css(g: &MatF, k: usize) -> Result<CssCode> {
    build_css_with(g, k, &DistanceOptions::default())
}

pub fn build_css_with(g: &MatF, k: usize, opts: &DistanceOptions) -> Result<CssCode> {
    if k > g.rows() {
        return Err(Error::Dimension(format!("k = {k} exceeds {} rows", g.rows())));
    }
    if !independence_holds(g, k) {
        return Err(Error::Assumption("rows of G1 must be independent of each other and of row(G0)".into()));
    }
    let f = g.field().clone();
    let n = g.cols();
    let g1 = g.select_rows(0..k);
    let g0 = g.select_rows(k..g.rows());
    let zdual = g.nullspace();
    // Constraint rows: G0 (rhs 0) then G1 (rhs e_b).
    let system = g0.stack(&g1)?;
    let mut h = MatF::zeros(&f, 0, n);
    for b in 0..k {
        let mut rhs = vec![Elem::ZERO; system.rows()];
        rhs[g0.rows() + b] = Elem::ONE;
        let sol = system
            .solve_lex_min(&rhs)?
            .ok_or_else(|| Error::Assumption(format!("no logical Z representative for index {b}")))?;
        h.push_row(&sol)?;
    }
    let g0_basis = g0.row_basis();
    let (d_lower, d_provenance) = distance_bound(g, &g0, opts);
    Ok(CssCode { field: f, n, k, g1, g0, zdual, h, d_lower, d_provenance, g0_basis })
}

fn distance_bound(g: &MatF, g0: &MatF, opts: &DistanceOptions) -> (usize, DistanceProvenance) {
    let component = |m: &MatF, analytic: Option<usize>| -> (Option<usize>, DistanceProvenance) {
        match min_weight_bruteforce(m, opts.budget) {
            Ok(d) => (d, DistanceProvenance::Exact),
            Err(_) => match analytic {
                Some(d) => (Some(d), DistanceProvenance::MdsBound),
                None => (Some(1), DistanceProvenance::Trivial),
            },
        }
    };
    let (dg, pg) = component(g, opts.bound_g);
    let g0_dual = if g0.rows() == 0 { MatF::identity(g.field(), g.cols()) } else { g0.nullspace() };
    let (dd, pd) = component(&g0_dual, opts.bound_g0_dual);
    let d = match (dg, dd) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 0,
    };
    (d, pg.max(pd))
}

impl CssCode {
    /// Independent rows spanning row(G0).
    pub fn g0_basis(&self) -> &MatF {
        &self.g0_basis
    }

    /// X and Z check generators.
    pub fn stabilizer_matrices(&self) -> (MatF, MatF) {
        (self.g0_basis.clone(), self.zdual.clone())
    }

    /// Σ_a u_a g^a.
    pub fn logical_vector(&self, u: &[Elem]) -> Vec<Elem> {
        self.g1.combine_rows(u)
    }

    /// All vectors Σ u_a g^a + g with g in row(G0).
    pub fn enumerate_coset(&self, u: &[Elem], budget: u128) -> Result<CosetIter> {
        if u.len() != self.k {
            return Err(Error::Dimension(format!("logical vector of length {} for k = {}", u.len(), self.k)));
        }
        check_budget(sat_pow(self.field.q() as u128, self.g0_basis.rows()), budget)?;
        Ok(CosetIter {
            basis: self.g0_basis.clone(),
            digits: vec![0; self.g0_basis.rows()],
            current: self.logical_vector(u),
            done: false,
        })
    }

    /// Exact (d_X, d_Z) by enumeration; errors for k = 0.
    pub fn quantum_distance_bruteforce(&self, budget: u128) -> Result<QuantumDistance> {
        if self.k == 0 {
            return Err(Error::NoLogical);
        }
        let q = self.field.q() as u128;
        let rx = self.k + self.g0_basis.rows();
        let rz = self.k + self.zdual.rows();
        check_budget(sat_pow(q, rx).saturating_add(sat_pow(q, rz)), budget)?;
        // X logicals: row(G) \ row(G0); Z logicals: row(G0)^⊥ \ row(G)^⊥.
        let dx = min_weight_outside(&self.g1.stack(&self.g0_basis)?, self.k);
        let dz = min_weight_outside(&self.h.stack(&self.zdual)?, self.k);
        Ok(QuantumDistance { dx, dz })
    }
}

/// Minimum weight over combinations of `basis` rows whose first `lead`
/// coefficients are not all zero.
fn min_weight_outside(basis: &MatF, lead: usize) -> usize {
    let mut best = usize::MAX;
    for_each_combination(basis, |digits, word| {
        if digits[..lead].iter().any(|&d| d != 0) {
            best = best.min(weight(word));
        }
    });
    best
}

/// Visits every combination Σ c_r row_r (including zero) with coefficients
/// in lexicographic order of their encodings.
pub(crate) fn for_each_combination(basis: &MatF, mut visit: impl FnMut(&[u32], &[Elem])) {
    let f = basis.field();
    let q = f.q();
    let r = basis.rows();
    let mut digits = vec![0u32; r];
    let mut word = vec![Elem::ZERO; basis.cols()];
    loop {
        visit(&digits, &word);
        let mut pos = r;
        loop {
            if pos == 0 {
                return;
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
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumDistance {
    pub dx: usize,
    pub dz: usize,
}

impl QuantumDistance {
    pub fn d(&self) -> usize {
        self.dx.min(self.dz)
    }
}

/// Deterministic cursor over one logical coset; the first vector is the
/// bare logical representative.
#[derive(Clone, Debug)]
pub struct CosetIter {
    basis: MatF,
    digits: Vec<u32>,
    current: Vec<Elem>,
    done: bool,
}

impl Iterator for CosetIter {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let f = self.basis.field().clone();
        let q = f.q();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            let old = self.digits[pos];
            if old + 1 < q {
                self.digits[pos] = old + 1;
                axpy(&f, &mut self.current, Elem(old ^ (old + 1)), self.basis.row(pos));
                break;
            }
            self.digits[pos] = 0;
            axpy(&f, &mut self.current, Elem(old), self.basis.row(pos));
        }
        Some(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CssRepr {
    field: FieldCtx,
    n: usize,
    k: usize,
    g1: MatF,
    g0: MatF,
    zdual: MatF,
    h: MatF,
    d_lower: usize,
    d_provenance: DistanceProvenance,
}

impl Serialize for CssCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CssRepr {
            field: self.field.clone(),
            n: self.n,
            k: self.k,
            g1: self.g1.clone(),
            g0: self.g0.clone(),
            zdual: self.zdual.clone(),
            h: self.h.clone(),
            d_lower: self.d_lower,
            d_provenance: self.d_provenance,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CssCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CssRepr::deserialize(d)?;
        let code = CssCode {
            g0_basis: r.g0.row_basis(),
            field: r.field,
            n: r.n,
            k: r.k,
            g1: r.g1,
            g0: r.g0,
            zdual: r.zdual,
            h: r.h,
            d_lower: r.d_lower,
            d_provenance: r.d_provenance,
        };
        code.check_invariants().map_err(D::Error::custom)?;
        Ok(code)
    }
}

impl CssCode {
    /// Re-checks the structural invariants of a (possibly imported) code.
    pub fn check_invariants(&self) -> Result<()> {
        let f = &self.field;
        let dims_ok = [&self.g1, &self.g0, &self.zdual, &self.h].iter().all(|m| m.cols() == self.n && m.field() == f);
        if !dims_ok || self.g1.rows() != self.k || self.h.rows() != self.k {
            return Err(Error::Dimension("code matrices disagree with n, k".into()));
        }
        let g = self.g1.stack(&self.g0)?;
        if !independence_holds(&g, self.k) {
            return Err(Error::Assumption("logical rows not independent of row(G0)".into()));
        }
        if self.zdual.rows() + g.rank() != self.n {
            return Err(Error::Invalid("zdual does not span row(G)^⊥".into()));
        }
        for z in 0..self.zdual.rows() {
            if g.apply(self.zdual.row(z)).iter().any(|e| !e.is_zero()) {
                return Err(Error::Invalid("zdual not orthogonal to row(G)".into()));
            }
        }
        for b in 0..self.k {
            let col = g.apply(self.h.row(b));
            for (r, v) in col.iter().enumerate() {
                let want = if r == b { Elem::ONE } else { Elem::ZERO };
                if *v != want {
                    return Err(Error::Invalid(format!("h^{b} fails the duality with row {r}")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{partially_systematic, rs_generator, EvalPoints};

    fn rs_css(t: u32, n_points: usize, m: usize, k: usize) -> CssCode {
        let f = FieldCtx::new(t).unwrap();
        let pts = EvalPoints::first(&f, n_points).unwrap();
        let (g1, g0) = partially_systematic(&rs_generator(&f, &pts, m).unwrap(), k).unwrap();
        build_css(&g1.stack(&g0).unwrap(), k).unwrap()
    }

    #[test]
    fn identity_gives_trivial_code() {
        let f = FieldCtx::new(2).unwrap();
        let c = build_css(&MatF::identity(&f, 3), 0).unwrap();
        assert_eq!(c.k, 0);
        assert_eq!(c.zdual.rows(), 0);
        assert_eq!(c.quantum_distance_bruteforce(1 << 20), Err(Error::NoLogical));
    }

    #[test]
    fn rs_4_1_code() {
        let c = rs_css(4, 5, 2, 1);
        assert_eq!((c.n, c.k), (4, 1));
        assert!(c.d_lower >= 2);
        assert_eq!(c.d_provenance, DistanceProvenance::Exact);
        c.check_invariants().unwrap();
        let qd = c.quantum_distance_bruteforce(1 << 20).unwrap();
        assert!(qd.d() >= c.d_lower);
    }

    #[test]
    fn stabilizers_commute_and_count() {
        let c = rs_css(6, 10, 4, 2);
        let (hx, hz) = c.stabilizer_matrices();
        for x in 0..hx.rows() {
            for z in 0..hz.rows() {
                assert!(c.field.dot(hx.row(x), hz.row(z)).is_zero());
            }
        }
        assert_eq!(hx.rank() + hz.rank(), c.n - c.k);
    }

    #[test]
    fn repetition_like_toy_has_dx_one() {
        let f = FieldCtx::new(1).unwrap();
        let g = MatF::from_u32(&f, &[&[1, 0, 0], &[0, 1, 1]]).unwrap();
        let c = build_css(&g, 1).unwrap();
        assert_eq!(c.quantum_distance_bruteforce(1 << 10).unwrap().dx, 1);
    }

    #[test]
    fn cosets_have_expected_size_and_are_disjoint() {
        let c = rs_css(2, 4, 2, 1);
        let mut seen = std::collections::HashSet::new();
        for u in 0..4 {
            let coset: Vec<_> = c.enumerate_coset(&[Elem(u)], 1 << 10).unwrap().collect();
            assert_eq!(coset.len(), 4usize.pow(c.g0_basis().rows() as u32));
            assert_eq!(coset[0], c.logical_vector(&[Elem(u)]));
            for v in coset {
                assert!(seen.insert(v));
            }
        }
    }

    #[test]
    fn empty_g0_gives_single_vector() {
        let f = FieldCtx::new(2).unwrap();
        let c = build_css(&MatF::from_u32(&f, &[&[1, 1, 0]]).unwrap(), 1).unwrap();
        let v: Vec<_> = c.enumerate_coset(&[Elem(0)], 10).unwrap().collect();
        assert_eq!(v, vec![vec![Elem::ZERO; 3]]);
    }

    #[test]
    fn json_round_trip_keeps_row_spaces() {
        let c = rs_css(4, 6, 3, 1);
        let s = serde_json::to_string(&c).unwrap();
        let back: CssCode = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let (hx, hz) = back.stabilizer_matrices();
        assert!(hx.row_space_eq(&c.g0) && hz.row_space_eq(&c.zdual));
    }

    #[test]
    fn dependent_logical_rows_rejected() {
        let f = FieldCtx::new(2).unwrap();
        let g = MatF::from_u32(&f, &[&[1, 1, 0], &[2, 2, 0]]).unwrap();
        assert!(matches!(build_css(&g, 1), Err(Error::Assumption(_))));
    }
}
