//! Diagonal gates as trace-of-polynomial phases, and physical schedules.
//!
//! A gate with coefficient β on legs η_1..η_e applies (−1)^{tr(β P(η))}.
//! Phases are tracked as a single bit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldCtx};

/// One term c·x_1^{D_1}···x_e^{D_e}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Elem,
    pub exps: Vec<u32>,
}

/// A phase polynomial P over e variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoly {
    field: FieldCtx,
    arity: usize,
    monomials: Vec<Monomial>,
}

impl PhasePoly {
    pub fn new(field: &FieldCtx, arity: usize, monomials: Vec<Monomial>) -> Result<PhasePoly> {
        let mut seen = std::collections::HashSet::new();
        for m in &monomials {
            if m.exps.len() != arity {
                return Err(Error::Dimension(format!("monomial over {} variables, arity {arity}", m.exps.len())));
            }
            if m.coeff.is_zero() || !field.contains(m.coeff) {
                return Err(Error::Invalid(format!("bad monomial coefficient {}", m.coeff)));
            }
            if !seen.insert(m.exps.clone()) {
                return Err(Error::Invalid(format!("repeated exponent tuple {:?}", m.exps)));
            }
        }
        Ok(PhasePoly { field: field.clone(), arity, monomials })
    }

    /// β·x_1···x_ℓ.
    pub fn mcz(field: &FieldCtx, ell: usize, beta: Elem) -> PhasePoly {
        PhasePoly::single(field, ell, beta, vec![1; ell])
    }

    pub fn ccz(field: &FieldCtx, beta: Elem) -> PhasePoly {
        PhasePoly::mcz(field, 3, beta)
    }

    /// β·x^ℓ.
    pub fn power(field: &FieldCtx, ell: u32, beta: Elem) -> PhasePoly {
        PhasePoly::single(field, 1, beta, vec![ell])
    }

    /// β·Σ over assignments {a,b,c} = {1,2,3} of x_a^4 x_b^2 x_c.
    pub fn w(field: &FieldCtx, beta: Elem) -> PhasePoly {
        let monomials = if beta.is_zero() {
            Vec::new()
        } else {
            W_PERMS
                .iter()
                .map(|&(a, b, c)| {
                    let mut exps = vec![0; 3];
                    exps[a] = 4;
                    exps[b] = 2;
                    exps[c] = 1;
                    Monomial { coeff: beta, exps }
                })
                .collect()
        };
        PhasePoly { field: field.clone(), arity: 3, monomials }
    }

    /// The identity gate (no monomials).
    pub fn identity(field: &FieldCtx, arity: usize) -> PhasePoly {
        PhasePoly { field: field.clone(), arity, monomials: Vec::new() }
    }

    fn single(field: &FieldCtx, arity: usize, beta: Elem, exps: Vec<u32>) -> PhasePoly {
        let monomials = if beta.is_zero() { Vec::new() } else { vec![Monomial { coeff: beta, exps }] };
        PhasePoly { field: field.clone(), arity, monomials }
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.exps.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.monomials.iter().all(|m| m.exps.iter().sum::<u32>() == d)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: Elem) -> PhasePoly {
        let monomials = if s.is_zero() {
            Vec::new()
        } else {
            self.monomials
                .iter()
                .map(|m| Monomial { coeff: self.field.mul(m.coeff, s), exps: m.exps.clone() })
                .collect()
        };
        PhasePoly { field: self.field.clone(), arity: self.arity, monomials }
    }

    /// The field value P(η) before taking the trace.
    pub fn value(&self, eta: &[Elem]) -> Elem {
        let f = &self.field;
        self.monomials.iter().fold(Elem::ZERO, |acc, m| {
            let term = m.exps.iter().zip(eta).fold(m.coeff, |t, (&d, &x)| f.mul(t, f.pow(x, d as u64)));
            acc + term
        })
    }

    /// Phase bit tr(P(η)).
    pub fn eval_phase(&self, eta: &[Elem]) -> Result<u8> {
        if eta.len() != self.arity {
            return Err(Error::Dimension(format!("{} inputs for arity {}", eta.len(), self.arity)));
        }
        Ok(self.field.trace(self.value(eta)))
    }
}

const W_PERMS: [(usize, usize, usize); 6] = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)];

/// Σ over assignments of x_a^4 x_b^2 x_c, without coefficient.
#[inline]
pub fn w_value(f: &FieldCtx, x: [Elem; 3]) -> Elem {
    let sq: [Elem; 3] = [f.square(x[0]), f.square(x[1]), f.square(x[2])];
    let qu: [Elem; 3] = [f.square(sq[0]), f.square(sq[1]), f.square(sq[2])];
    W_PERMS.iter().fold(Elem::ZERO, |acc, &(a, b, c)| acc + f.mul(qu[a], f.mul(sq[b], x[c])))
}

/// Gate families appearing in schedules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateFamily {
    /// C^(ℓ−1)Z on ℓ legs: tr(β η_1···η_ℓ).
    Mcz(usize),
    /// U_ℓ on one leg: tr(β η^ℓ).
    Power(u32),
    /// The three-leg W gate.
    W,
    /// General polynomial gate with unit-free monomials (scaled by β).
    Poly(Vec<Monomial>),
}

impl GateFamily {
    pub fn arity(&self) -> usize {
        match self {
            GateFamily::Mcz(l) => *l,
            GateFamily::Power(_) => 1,
            GateFamily::W => 3,
            GateFamily::Poly(ms) => ms.first().map_or(0, |m| m.exps.len()),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            GateFamily::Mcz(l) => *l as u32,
            GateFamily::Power(l) => *l,
            GateFamily::W => 7,
            GateFamily::Poly(ms) => ms.iter().map(|m| m.exps.iter().sum()).max().unwrap_or(0),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self {
            GateFamily::Poly(ms) => {
                let d = self.degree();
                ms.iter().all(|m| m.exps.iter().sum::<u32>() == d)
            }
            _ => true,
        }
    }

    /// The polynomial β·P of this family.
    pub fn poly(&self, field: &FieldCtx, beta: Elem) -> PhasePoly {
        match self {
            GateFamily::Mcz(l) => PhasePoly::mcz(field, *l, beta),
            GateFamily::Power(l) => PhasePoly::power(field, *l, beta),
            GateFamily::W => PhasePoly::w(field, beta),
            GateFamily::Poly(ms) => {
                let p = PhasePoly { field: field.clone(), arity: self.arity(), monomials: ms.clone() };
                p.scaled(beta)
            }
        }
    }

    /// tr(β P(η)) with η read through `leg`.
    #[inline]
    pub fn phase(&self, f: &FieldCtx, beta: Elem, leg: impl Fn(usize) -> Elem) -> u8 {
        let v = match self {
            GateFamily::Mcz(l) => {
                let mut acc = beta;
                for j in 0..*l {
                    acc = f.mul(acc, leg(j));
                }
                acc
            }
            GateFamily::Power(l) => f.mul(beta, f.pow(leg(0), *l as u64)),
            GateFamily::W => f.mul(beta, w_value(f, [leg(0), leg(1), leg(2)])),
            GateFamily::Poly(ms) => {
                let s = ms.iter().fold(Elem::ZERO, |acc, m| {
                    let term = m.exps.iter().enumerate().fold(m.coeff, |t, (j, &d)| f.mul(t, f.pow(leg(j), d as u64)));
                    acc + term
                });
                f.mul(beta, s)
            }
        };
        f.trace(v)
    }

    pub fn name(&self) -> String {
        match self {
            GateFamily::Mcz(1) => "Z".into(),
            GateFamily::Mcz(2) => "CZ".into(),
            GateFamily::Mcz(3) => "CCZ".into(),
            GateFamily::Mcz(l) => format!("C{}Z", l - 1),
            GateFamily::Power(l) => format!("U{l}"),
            GateFamily::W => "W".into(),
            GateFamily::Poly(_) => "P".into(),
        }
    }
}

impl fmt::Display for GateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for GateFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<GateFamily> {
        let bad = || Error::Invalid(format!("unknown gate name {s:?}"));
        match s {
            "Z" => Ok(GateFamily::Mcz(1)),
            "CZ" => Ok(GateFamily::Mcz(2)),
            "CCZ" => Ok(GateFamily::Mcz(3)),
            "W" => Ok(GateFamily::W),
            "P" => Ok(GateFamily::Poly(Vec::new())),
            _ => {
                if let Some(rest) = s.strip_prefix('U') {
                    rest.parse().map(GateFamily::Power).map_err(|_| bad())
                } else if let Some(mid) = s.strip_prefix('C').and_then(|r| r.strip_suffix('Z')) {
                    mid.parse::<usize>().map(|c| GateFamily::Mcz(c + 1)).map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

/// A (block, qudit) position.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Leg {
    pub block: usize,
    pub qudit: usize,
}

impl Leg {
    pub fn new(block: usize, qudit: usize) -> Leg {
        Leg { block, qudit }
    }
}

impl From<(usize, usize)> for Leg {
    fn from((block, qudit): (usize, usize)) -> Leg {
        Leg { block, qudit }
    }
}

impl From<Leg> for (usize, usize) {
    fn from(l: Leg) -> (usize, usize) {
        (l.block, l.qudit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub family: GateFamily,
    pub beta: Elem,
    pub legs: Vec<Leg>,
    pub layer: Option<usize>,
}

impl Application {
    pub fn new(family: GateFamily, beta: Elem, legs: Vec<Leg>) -> Application {
        Application { family, beta, legs, layer: None }
    }

    #[inline]
    pub fn phase(&self, f: &FieldCtx, state: &[&[Elem]]) -> u8 {
        self.family.phase(f, self.beta, |j| {
            let l = self.legs[j];
            state[l.block][l.qudit]
        })
    }
}

/// A list of diagonal gate applications with optional layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSchedule {
    field: FieldCtx,
    apps: Vec<Application>,
}

impl GateSchedule {
    pub fn new(field: &FieldCtx) -> GateSchedule {
        GateSchedule { field: field.clone(), apps: Vec::new() }
    }

    pub fn field(&self) -> &FieldCtx {
        &self.field
    }

    pub fn applications(&self) -> &[Application] {
        &self.apps
    }

    pub fn applications_mut(&mut self) -> &mut [Application] {
        &mut self.apps
    }

    pub fn len(&self) -> usize {
        self.apps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apps.is_empty()
    }

    pub fn push(&mut self, app: Application) -> Result<()> {
        if app.legs.len() != app.family.arity() {
            return Err(Error::Dimension(format!(
                "{} legs for a {}-leg {} gate",
                app.legs.len(),
                app.family.arity(),
                app.family
            )));
        }
        if !self.field.contains(app.beta) {
            return Err(Error::Invalid(format!("coefficient {} outside the field", app.beta)));
        }
        self.apps.push(app);
        Ok(())
    }

    /// Concatenation; layers are dropped.
    pub fn concat(&self, other: &GateSchedule) -> Result<GateSchedule> {
        if self.field != other.field {
            return Err(Error::FieldMismatch("schedules over different fields".into()));
        }
        let mut out = self.clone();
        out.apps.extend(other.apps.iter().cloned());
        for a in &mut out.apps {
            a.layer = None;
        }
        Ok(out)
    }

    /// Highest block id referenced, plus one.
    pub fn blocks(&self) -> usize {
        self.apps.iter().flat_map(|a| a.legs.iter()).map(|l| l.block + 1).max().unwrap_or(0)
    }

    /// XOR of all application phases on per-block vectors.
    pub fn apply(&self, state: &[&[Elem]]) -> Result<u8> {
        for a in &self.apps {
            for l in &a.legs {
                match state.get(l.block) {
                    None => return Err(Error::Invalid(format!("state has no block {}", l.block))),
                    Some(v) if l.qudit >= v.len() => {
                        return Err(Error::Dimension(format!("qudit {} outside block {}", l.qudit, l.block)))
                    }
                    _ => {}
                }
            }
        }
        Ok(self.phase(state))
    }

    /// `apply` without bounds diagnostics (panics on bad indices).
    #[inline]
    pub fn phase(&self, state: &[&[Elem]]) -> u8 {
        self.apps.iter().fold(0u8, |acc, a| acc ^ a.phase(&self.field, state))
    }

    /// Number of layers when every application is layered.
    pub fn depth(&self) -> Option<usize> {
        let mut d = 0;
        for a in &self.apps {
            d = d.max(a.layer? + 1);
        }
        Some(d)
    }

    /// True when all applications are layered and no layer reuses a
    /// position across different applications.
    pub fn layering_is_valid(&self) -> bool {
        let mut used: HashMap<(usize, Leg), usize> = HashMap::new();
        for (i, a) in self.apps.iter().enumerate() {
            let Some(layer) = a.layer else { return false };
            for &l in &a.legs {
                if let Some(&j) = used.get(&(layer, l)) {
                    if j != i {
                        return false;
                    }
                }
                used.insert((layer, l), i);
            }
        }
        true
    }

    /// Largest number of applications touching one position; repeated legs
    /// inside one application count once.
    pub fn max_usage(&self) -> usize {
        let mut count: HashMap<Leg, usize> = HashMap::new();
        for a in &self.apps {
            let mut legs = a.legs.clone();
            legs.sort();
            legs.dedup();
            for l in legs {
                *count.entry(l).or_default() += 1;
            }
        }
        count.values().copied().max().unwrap_or(0)
    }

    /// Greedy first-fit layering, processing applications in order of their
    /// first leg's qudit index (stable).
    pub fn layer_greedy(mut self) -> GateSchedule {
        self.apps.sort_by_key(|a| a.legs.first().map_or(0, |l| l.qudit));
        let mut used: HashMap<Leg, Vec<usize>> = HashMap::new();
        for a in &mut self.apps {
            let mut layer = 0;
            while a.legs.iter().any(|l| used.get(l).is_some_and(|v| v.contains(&layer))) {
                layer += 1;
            }
            for &l in &a.legs {
                used.entry(l).or_default().push(layer);
            }
            a.layer = Some(layer);
        }
        self
    }

    /// Uses the given layers if valid, else falls back to greedy layering.
    pub fn with_layers_or_greedy(mut self, layers: &[usize]) -> GateSchedule {
        for (a, &l) in self.apps.iter_mut().zip(layers) {
            a.layer = Some(l);
        }
        if layers.len() == self.apps.len() && self.layering_is_valid() {
            self
        } else {
            self.layer_greedy()
        }
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for a in &self.apps {
            out.push_str(&serde_json::to_string(&AppRepr::from(a)).expect("plain data serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(field: &FieldCtx, text: &str) -> Result<GateSchedule> {
        let mut s = GateSchedule::new(field);
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let r: AppRepr = serde_json::from_str(line).map_err(|e| Error::Invalid(format!("line {}: {e}", i + 1)))?;
            let mut family: GateFamily = r.gate.parse()?;
            if let GateFamily::Poly(ms) = &mut family {
                *ms = r.poly.unwrap_or_default();
            }
            s.push(Application { family, beta: Elem(r.beta), legs: r.legs, layer: r.layer })?;
        }
        Ok(s)
    }
}

#[derive(Serialize, Deserialize)]
struct AppRepr {
    gate: String,
    beta: u32,
    legs: Vec<Leg>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    layer: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    poly: Option<Vec<Monomial>>,
}

impl From<&Application> for AppRepr {
    fn from(a: &Application) -> AppRepr {
        AppRepr {
            gate: a.family.name(),
            beta: a.beta.0,
            legs: a.legs.clone(),
            layer: a.layer,
            poly: match &a.family {
                GateFamily::Poly(ms) => Some(ms.clone()),
                _ => None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ccz_over_gf2() {
        let f = FieldCtx::new(1).unwrap();
        let p = PhasePoly::ccz(&f, Elem::ONE);
        assert_eq!(p.eval_phase(&[Elem::ONE; 3]).unwrap(), 1);
        assert_eq!(p.eval_phase(&[Elem::ONE, Elem::ZERO, Elem::ONE]).unwrap(), 0);
    }

    #[test]
    fn power_gate_matches_field_power() {
        let f = FieldCtx::new(4).unwrap();
        for beta in f.elements() {
            let p = PhasePoly::power(&f, 7, beta);
            for x in f.elements() {
                assert_eq!(p.eval_phase(&[x]).unwrap(), f.trace(f.mul(beta, f.pow(x, 7))));
            }
        }
    }

    #[test]
    fn degenerate_legs_collapse() {
        let f = FieldCtx::new(2).unwrap();
        let merged = PhasePoly::new(&f, 2, vec![Monomial { coeff: Elem(1), exps: vec![2, 1] }]).unwrap();
        for beta in f.elements() {
            let mut s = GateSchedule::new(&f);
            s.push(Application::new(GateFamily::Mcz(3), beta, vec![Leg::new(0, 0), Leg::new(0, 0), Leg::new(0, 1)]))
                .unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let state = [a, b];
                    assert_eq!(s.apply(&[&state]).unwrap(), merged.scaled(beta).eval_phase(&[a, b]).unwrap());
                }
            }
        }
    }

    #[test]
    fn greedy_layering() {
        let f = FieldCtx::new(2).unwrap();
        let mut s = GateSchedule::new(&f);
        for i in 0..4 {
            s.push(Application::new(GateFamily::Mcz(1), Elem(1), vec![Leg::new(0, i)])).unwrap();
        }
        let s = s.layer_greedy();
        assert_eq!(s.depth(), Some(1));
        let mut t = GateSchedule::new(&f);
        t.push(Application::new(GateFamily::Mcz(2), Elem(1), vec![Leg::new(0, 0), Leg::new(0, 1)])).unwrap();
        t.push(Application::new(GateFamily::Mcz(2), Elem(1), vec![Leg::new(0, 1), Leg::new(0, 2)])).unwrap();
        let t = t.layer_greedy();
        assert_eq!(t.depth(), Some(2));
        assert!(t.layering_is_valid());
        assert_eq!(t.max_usage(), 2);
    }

    #[test]
    fn empty_and_zero_state() {
        let f = FieldCtx::new(3).unwrap();
        let s = GateSchedule::new(&f);
        assert_eq!(s.apply(&[]).unwrap(), 0);
        let mut c = GateSchedule::new(&f);
        c.push(Application::new(GateFamily::Mcz(3), Elem(5), vec![Leg::new(0, 0), Leg::new(0, 1), Leg::new(1, 0)]))
            .unwrap();
        let z = [Elem::ZERO; 2];
        assert_eq!(c.apply(&[&z, &z]).unwrap(), 0);
        assert!(c.apply(&[&z]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for fam in [
            GateFamily::Mcz(1),
            GateFamily::Mcz(2),
            GateFamily::Mcz(3),
            GateFamily::Mcz(5),
            GateFamily::Power(7),
            GateFamily::W,
        ] {
            assert_eq!(fam.name().parse::<GateFamily>().unwrap(), fam);
        }
    }

    #[test]
    fn json_lines_round_trip() {
        let f = FieldCtx::new(4).unwrap();
        let mut s = GateSchedule::new(&f);
        s.push(Application::new(GateFamily::Mcz(3), Elem(9), vec![Leg::new(0, 1), Leg::new(1, 2), Leg::new(2, 3)]))
            .unwrap();
        let poly = vec![Monomial { coeff: Elem(1), exps: vec![2, 1] }];
        s.push(Application::new(GateFamily::Poly(poly), Elem(3), vec![Leg::new(0, 0), Leg::new(1, 0)])).unwrap();
        let s = s.layer_greedy();
        let text = s.to_json_lines();
        assert!(text.starts_with(r#"{"gate":"P","beta":3,"legs":[[0,0],[1,0]],"layer":0,"#));
        assert_eq!(GateSchedule::from_json_lines(&f, &text).unwrap(), s);
    }
}
