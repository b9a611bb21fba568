use addrccz::concat::{pipeline_theorem_6_1, pipeline_theorem_6_2, Stage};
use addrccz::gates::PhasePoly;
use addrccz::verify::{verify_exhaustive, verify_sampled, CodeSpace, Expanded, LogicalSpec};
use addrccz::{Elem, FieldCtx};

fn ccz_spec(targets: &[(usize, usize)]) -> LogicalSpec {
    let f2 = FieldCtx::new(1).unwrap();
    LogicalSpec::on(PhasePoly::ccz(&f2, Elem::ONE), targets).unwrap()
}

#[test]
fn rs_pipeline_stage_parameters() {
    let p = pipeline_theorem_6_1(4, 2, 1).unwrap();
    assert_eq!((p.q1.n, p.q1.k), (16, 4));
    assert_eq!((p.q2.n, p.q2.k), (16, 1));
    assert_eq!((p.q3.n, p.q3.k, p.q3.stage), (256, 1, Stage::Q3));
    assert_eq!((p.q3_prime.n, p.q3_prime.k, p.q3_prime.stage), (1024, 1, Stage::Q3Prime));
    for q in [&p.q1, &p.q2, &p.q3, &p.q3_prime] {
        q.check_invariants().unwrap();
        assert!(q.d_lower >= p.rs.code.d_lower);
    }
}

#[test]
fn gauge_fixed_ccz_is_exhaustively_correct() {
    let p = pipeline_theorem_6_1(4, 2, 1).unwrap();
    // Intra-block on one logical qubit: CCZ[0,0,0] acts as Z^{b·b·b}.
    let s = p.qudit_ccz(0, 0, 0, [0, 0, 0]).unwrap();
    let codes: [&dyn CodeSpace; 1] = [&p.q2];
    let r =
        verify_exhaustive(&codes, &Expanded::new(&s, &p.basis), &ccz_spec(&[(0, 0), (0, 0), (0, 0)]), 1 << 26).unwrap();
    assert!(r.passed(), "{r:?}");
    // Inter-block across three blocks.
    let s = p.qudit_ccz(0, 0, 0, [0, 1, 2]).unwrap();
    let codes: [&dyn CodeSpace; 3] = [&p.q2, &p.q2, &p.q2];
    let r =
        verify_exhaustive(&codes, &Expanded::new(&s, &p.basis), &ccz_spec(&[(0, 0), (1, 0), (2, 0)]), 1 << 26).unwrap();
    assert!(r.passed());
    assert_eq!(r.coset_constant, Some(true));
}

#[test]
fn mfe_schedules_are_depth_one_and_correct() {
    let p = pipeline_theorem_6_1(4, 2, 1).unwrap();
    let inter = p.ccz_q3(0, 0, 0, [0, 1, 2]).unwrap();
    assert_eq!(inter.depth(), Some(1));
    assert!(inter.layering_is_valid());
    let codes: [&dyn CodeSpace; 3] = [&p.q3, &p.q3, &p.q3];
    let r = verify_exhaustive(&codes, &inter, &ccz_spec(&[(0, 0), (1, 0), (2, 0)]), 1 << 26).unwrap();
    assert!(r.passed(), "{r:?}");

    // Plain MFE cannot host a qudit carrying several legs.
    assert!(p.ccz_q3(0, 0, 0, [0, 0, 0]).is_err());

    let intra = p.ccz_q3_prime(0, 0, 0, [0, 0, 0]).unwrap();
    assert!(intra.layering_is_valid());
    assert_eq!(intra.depth(), Some(1));
    let codes: [&dyn CodeSpace; 1] = [&p.q3_prime];
    let r = verify_exhaustive(&codes, &intra, &ccz_spec(&[(0, 0), (0, 0), (0, 0)]), 1 << 26).unwrap();
    assert!(r.passed(), "{r:?}");

    let two = p.ccz_q3_prime(0, 0, 0, [0, 0, 1]).unwrap();
    assert_eq!(two.depth(), Some(1));
    let codes: [&dyn CodeSpace; 2] = [&p.q3_prime, &p.q3_prime];
    let r = verify_exhaustive(&codes, &two, &ccz_spec(&[(0, 0), (0, 0), (1, 0)]), 1 << 26).unwrap();
    assert!(r.passed());
}

#[test]
fn designed_pipeline() {
    let p = pipeline_theorem_6_2(7, 64, 10, 7).unwrap();
    assert_eq!(p.omega, 22);
    assert_eq!((p.q1.n, p.q1.k), (448, 21));
    assert_eq!((p.q2.n, p.q2.k), (448, 3));
    assert_eq!((p.q3.n, p.q3.k), (9856, 3));
    assert_eq!(p.q3.note.as_deref(), Some("near-good (RS base)"));
    p.q2.check_invariants().unwrap();
    p.q3.check_invariants().unwrap();

    let spec = ccz_spec(&[(0, 0), (0, 1), (0, 2)]);
    let w = p.w_q2(0).unwrap();
    let codes: [&dyn CodeSpace; 1] = [&p.q2];
    let r = verify_sampled(&codes, &Expanded::new(&w, &p.basis), &spec, 10_000, 7).unwrap();
    assert!(r.passed(), "{r:?}");

    let phys = p.ccz_q3(0).unwrap();
    assert_eq!(phys.depth(), Some(1));
    assert!(phys.layering_is_valid());
    let codes: [&dyn CodeSpace; 1] = [&p.q3];
    let r = verify_sampled(&codes, &phys, &spec, 2_000, 11).unwrap();
    assert!(r.passed(), "{r:?}");
}
