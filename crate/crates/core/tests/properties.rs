use addrccz::address::build_rs_addressable;
use addrccz::codes::MatF;
use addrccz::concat::{sigma_decompose, QubitCssCode};
use addrccz::gates::{Application, GateFamily, GateSchedule, Leg, PhasePoly};
use addrccz::ortho::{check_orthogonality, OrthoKind, OrthoWitness};
use addrccz::tri_t::{is_addressable_triorthogonal, rm_tri_matrix};
use addrccz::verify::{verify_exhaustive, verify_identities, CodeSpace, IdentityTarget, LogicalSpec, SplitMix64};
use addrccz::{Elem, FieldCtx};
use proptest::prelude::*;

fn elem(t: u32) -> impl Strategy<Value = Elem> {
    (0..1u32 << t).prop_map(Elem)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_axioms(t in 1u32..=16, seed in any::<u64>()) {
        let f = FieldCtx::new(t).unwrap();
        let mut rng = SplitMix64::new(seed);
        let (a, b, c) = (rng.next_elem(f.q()), rng.next_elem(f.q()), rng.next_elem(f.q()));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, b + c), f.mul(a, b) + f.mul(a, c));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.square(a + b), f.square(a) + f.square(b));
        prop_assert_eq!(f.pow(a, u64::from(f.q())), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
        }
        prop_assert_eq!(f.trace(a + b), f.trace(a) ^ f.trace(b));
    }

    #[test]
    fn basis_round_trip(t in 1u32..=10, seed in any::<u64>()) {
        let f = FieldCtx::new(t).unwrap();
        let b = f.self_dual_basis();
        let x = SplitMix64::new(seed).next_elem(f.q());
        prop_assert_eq!(b.recomp(&b.decomp(&f, x)), x);
        // tr(xy) is the dot product of coordinates.
        let y = SplitMix64::new(seed ^ 1).next_elem(f.q());
        let dot = b.decomp(&f, x).iter().zip(b.decomp(&f, y)).fold(0, |acc, (&u, v)| acc ^ (u & v));
        prop_assert_eq!(f.trace(f.mul(x, y)), dot);
    }

    #[test]
    fn schedule_phase_is_order_independent(seed in any::<u64>(), gates in 1usize..20) {
        let f = FieldCtx::new(4).unwrap();
        let mut rng = SplitMix64::new(seed);
        let mut apps = Vec::new();
        for _ in 0..gates {
            let fam = [GateFamily::Mcz(3), GateFamily::Power(3), GateFamily::W][(rng.next_u64() % 3) as usize].clone();
            let legs = (0..fam.arity()).map(|_| Leg::new((rng.next_u64() % 2) as usize, (rng.next_u64() % 5) as usize)).collect();
            apps.push(Application::new(fam, rng.next_elem(16), legs));
        }
        let build = |order: &[Application]| {
            let mut s = GateSchedule::new(&f);
            for a in order {
                s.push(a.clone()).unwrap();
            }
            s
        };
        let fwd = build(&apps);
        apps.reverse();
        let rev = build(&apps);
        let b0: Vec<Elem> = (0..5).map(|_| rng.next_elem(16)).collect();
        let b1: Vec<Elem> = (0..5).map(|_| rng.next_elem(16)).collect();
        prop_assert_eq!(fwd.phase(&[&b0, &b1]), rev.phase(&[&b0, &b1]));
        let back = GateSchedule::from_json_lines(&f, &fwd.to_json_lines()).unwrap();
        prop_assert_eq!(back.phase(&[&b0, &b1]), fwd.phase(&[&b0, &b1]));
    }

    #[test]
    fn identities_imply_phase_correctness(gamma in elem(4).prop_filter("nonzero", |g| !g.is_zero())) {
        let rs = build_rs_addressable(4, 2, 1).unwrap();
        let id = verify_identities(IdentityTarget::RsShift { code: &rs, addresses: &[0, 0, 0] }).unwrap();
        prop_assert!(id.passed());
        let s = rs.intra_ccz_schedule(0, 0, 0, gamma).unwrap();
        let codes: [&dyn CodeSpace; 1] = [&rs.code];
        let spec = LogicalSpec::on(PhasePoly::ccz(&rs.field, gamma), &[(0, 0), (0, 0), (0, 0)]).unwrap();
        prop_assert!(verify_exhaustive(&codes, &s, &spec, 1 << 20).unwrap().passed());
    }

    #[test]
    fn triorthogonality_predicates_agree(rows in 2usize..5, cols in 3usize..12, seed in any::<u64>()) {
        let f2 = FieldCtx::new(1).unwrap();
        let mut rng = SplitMix64::new(seed);
        let k = 1 + (rng.next_u64() % rows as u64) as usize;
        let data = (0..rows).map(|_| (0..cols).map(|_| rng.next_elem(2)).collect()).collect();
        let g = MatF::from_rows(&f2, cols, data).unwrap();
        let gammas: Vec<Vec<Elem>> = (0..k).map(|_| (0..cols).map(|_| rng.next_elem(2)).collect()).collect();
        let w = OrthoWitness { kind: OrthoKind::Addressable, ell: 3, tau: vec![Elem::ONE; k], gamma: gammas.clone() };
        prop_assert_eq!(check_orthogonality(&g, k, &w).unwrap().passed(), is_addressable_triorthogonal(&g, k, &gammas));
    }

    #[test]
    fn sigma_tables_are_linear_in_gamma(a in elem(5), b in elem(5)) {
        let f = FieldCtx::new(5).unwrap();
        let basis = f.self_dual_basis();
        let (ta, tb, tab) = (sigma_decompose(&f, &basis, a), sigma_decompose(&f, &basis, b), sigma_decompose(&f, &basis, a + b));
        for x in 0..32u32 {
            let u: Vec<u8> = (0..5).map(|i| ((x >> i) & 1) as u8).collect();
            prop_assert_eq!(tab.phase(&u), ta.phase(&u) ^ tb.phase(&u));
        }
    }
}

#[test]
fn corrupted_schedule_is_caught() {
    let rs = build_rs_addressable(4, 2, 1).unwrap();
    let gamma = Elem(3);
    let mut s = rs.inter_ccz_schedule(0, 0, 0, gamma, [0, 1, 2]).unwrap();
    s.applications_mut()[1].beta += Elem::ONE;
    let codes: [&dyn CodeSpace; 3] = [&rs.code, &rs.code, &rs.code];
    let spec = LogicalSpec::on(PhasePoly::ccz(&rs.field, gamma), &[(0, 0), (1, 0), (2, 0)]).unwrap();
    let r = verify_exhaustive(&codes, &s, &spec, 1 << 26).unwrap();
    assert!(!r.passed());
    assert!(!r.failures.is_empty());
}

#[test]
fn rm_witnesses_for_all_k() {
    for k in 1..=6 {
        let w = rm_tri_matrix(5, k).unwrap();
        assert!(w.check());
        assert_eq!(w.note.as_deref(), Some(addrccz::tri_t::RM_NOTE));
    }
    assert!(rm_tri_matrix(6, 7).unwrap().check());
}

#[test]
fn qubit_code_serializes() {
    let p = addrccz::concat::pipeline_theorem_6_1(4, 2, 1).unwrap();
    let text = serde_json::to_string(&p.q2).unwrap();
    let back: QubitCssCode = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p.q2);
}
