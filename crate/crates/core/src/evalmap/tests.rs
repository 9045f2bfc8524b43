use super::*;
use crate::dynamics::signature;
use crate::rational::q;
use crate::reversibility::{half_turn_matching, ComponentMatching};
use crate::sampling::{farey_points, random_points};

fn cp(n: i64, d: i64) -> CirclePoint {
    CirclePoint::new(q(n, d))
}

// x/2 on [0, 1/2], then slope 3/2 up to 1
fn sawtooth() -> PLMap {
    PLMap::from_lift_vertices(1, vec![(q(0, 1), q(0, 1)), (q(1, 2), q(1, 4))]).unwrap()
}

// fixed at 0 and 1/2, up on (0, 1/2), down on (1/2, 1)
fn two_fixed() -> PLMap {
    PLMap::from_lift_vertices(
        1,
        vec![
            (q(0, 1), q(0, 1)),
            (q(1, 4), q(3, 8)),
            (q(1, 2), q(1, 2)),
            (q(3, 4), q(5, 8)),
        ],
    )
    .unwrap()
}

fn samples() -> Vec<CirclePoint> {
    let mut v = farey_points(128);
    v.extend(random_points(128, 3));
    v
}

fn full(start: i64, d: i64) -> ClosedArc {
    ClosedArc::full_from(&cp(start, d))
}

#[test]
fn piecewise_identity_halves() {
    let id = EvalMap::identity();
    let m = EvalMap::piecewise(vec![
        (ClosedArc::between(&cp(0, 1), &cp(1, 2)), id.clone()),
        (ClosedArc::between(&cp(1, 2), &cp(0, 1)), id),
    ])
    .unwrap();
    assert_eq!(m.eval(&cp(1, 3)).unwrap(), cp(1, 3));
    assert_eq!(m.eval_inverse(&cp(5, 7)).unwrap(), cp(5, 7));
}

#[test]
fn piecewise_rejects_disagreement_and_overlap() {
    let id = EvalMap::identity();
    let rot = EvalMap::pl(PLMap::rotation(&q(1, 4)));
    let e = EvalMap::piecewise(vec![
        (ClosedArc::between(&cp(0, 1), &cp(1, 2)), id.clone()),
        (ClosedArc::between(&cp(1, 2), &cp(0, 1)), rot),
    ]);
    assert!(e.is_err());
    let e = EvalMap::piecewise(vec![
        (ClosedArc::between(&cp(0, 1), &cp(3, 4)), id.clone()),
        (ClosedArc::between(&cp(1, 2), &cp(0, 1)), id),
    ]);
    assert!(e.is_err());
}

#[test]
fn partial_piecewise_reports_outside() {
    let id = EvalMap::identity();
    let m = EvalMap::piecewise(vec![(ClosedArc::between(&cp(0, 1), &cp(1, 2)), id)]).unwrap();
    assert!(matches!(
        m.eval(&cp(3, 4)),
        Err(Error::OutsideDomain { .. })
    ));
}

#[test]
fn extension_of_identity_is_identity() {
    let f = sawtooth();
    let e = EquivariantExtension::new(full(0, 1), full(0, 1), false, f.clone(), f, cp(1, 2), cp(1, 2))
        .unwrap();
    let k = EvalMap::equivariant(e);
    for x in samples() {
        assert_eq!(k.eval(&x).unwrap(), x);
    }
}

#[test]
fn extension_unwinds_to_fundamental_domain() {
    // D = [1/4, 1/2); k0 sends 1/2 -> 3/8 and 1/4 -> 3/16, so k0(t) = 3t/4
    let f = sawtooth();
    let e = EquivariantExtension::new(full(0, 1), full(0, 1), false, f.clone(), f, cp(1, 2), cp(3, 8))
        .unwrap();
    assert_eq!(e.fundamental_domain(), ClosedArc::between(&cp(1, 4), &cp(1, 2)));
    let k = EvalMap::equivariant(e);
    // 1/16 -> 1/8 -> 1/4 under f^-1 (doubling), k0(1/4) = 3/16, then halve twice
    assert_eq!(k.eval(&cp(1, 16)).unwrap(), cp(3, 64));
    assert_eq!(k.eval(&cp(0, 1)).unwrap(), cp(0, 1));
    let f = sawtooth();
    for x in samples() {
        let lhs = k.eval(&f.evaluate(&x)).unwrap();
        let rhs = f.evaluate(&k.eval(&x).unwrap());
        assert_eq!(lhs, rhs, "at {x}");
        assert_eq!(k.eval_inverse(&k.eval(&x).unwrap()).unwrap(), x);
    }
}

#[test]
fn iteration_cap_is_reported() {
    let f = sawtooth();
    let e = EquivariantExtension::new(full(0, 1), full(0, 1), false, f.clone(), f, cp(1, 2), cp(3, 8))
        .unwrap();
    let k = EvalMap::equivariant(e);
    match k.eval_capped(&cp(1, 1024), 3) {
        Err(Error::IterationCap { iterations, .. }) => assert_eq!(iterations, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn extension_rejects_bad_descriptors() {
    let f = two_fixed();
    // the arc (0, 1) contains the fixed point 1/2
    assert!(EquivariantExtension::new(full(0, 1), full(0, 1), false, f.clone(), f.clone(), cp(1, 4), cp(1, 4)).is_err());
    // wrong orientation: f moves up on (0, 1/2), f⁻¹ moves down
    let arc = ClosedArc::between(&cp(0, 1), &cp(1, 2));
    assert!(EquivariantExtension::new(arc.clone(), arc.clone(), false, f.clone(), f.invert(), cp(1, 4), cp(1, 4)).is_err());
    assert!(EquivariantExtension::new(arc.clone(), arc, true, f.clone(), f.invert(), cp(1, 4), cp(1, 4)).is_ok());
}

#[test]
fn conjugator_moves_fixed_point() {
    let f = sawtooth();
    let g = f.conjugate_by(&PLMap::rotation(&q(1, 2)));
    assert_eq!(signature(&g).unwrap().shape(), signature(&f).unwrap().shape());
    let k = equivariant_conjugator(&f, &g, &ComponentMatching::shift(1, 0)).unwrap();
    assert_eq!(k.eval(&cp(0, 1)).unwrap(), cp(1, 2));
    for x in random_points(256, 11) {
        assert_eq!(k.eval(&f.evaluate(&x)).unwrap(), g.evaluate(&k.eval(&x).unwrap()));
    }
}

#[test]
fn self_conjugator_commutes() {
    let f = two_fixed();
    let k = equivariant_conjugator(&f, &f, &ComponentMatching::shift(2, 0)).unwrap();
    for x in samples() {
        assert_eq!(k.eval(&f.evaluate(&x)).unwrap(), f.evaluate(&k.eval(&x).unwrap()));
    }
}

#[test]
fn conjugator_checks_signs() {
    let f = two_fixed();
    let finv = f.invert();
    assert!(equivariant_conjugator(&f, &finv, &ComponentMatching::shift(2, 0)).is_err());
    let m = half_turn_matching(&signature(&finv).unwrap().negated()).unwrap();
    let k = equivariant_conjugator(&f, &finv, &m).unwrap();
    for x in samples() {
        assert_eq!(k.eval(&f.evaluate(&x)).unwrap(), finv.evaluate(&k.eval(&x).unwrap()));
    }
}

#[test]
fn reversing_conjugator() {
    let f = two_fixed();
    let finv = f.invert();
    // element i -> 2 - i: exchanges the fixed points, each gap goes to itself
    let k = equivariant_conjugator(&f, &finv, &ComponentMatching::axis(2, 2)).unwrap();
    assert_eq!(k.eval(&cp(1, 2)).unwrap(), cp(0, 1));
    assert_eq!(k.eval(&cp(0, 1)).unwrap(), cp(1, 2));
    assert!(equivariant_conjugator(&f, &finv, &ComponentMatching::axis(2, 0)).is_err());
    for x in samples() {
        assert_eq!(k.eval(&f.evaluate(&x)).unwrap(), finv.evaluate(&k.eval(&x).unwrap()));
    }
}

#[test]
fn reverse_on_arc_is_reversing_involution() {
    for f in [sawtooth(), sawtooth().invert()] {
        let tau = reverse_on_arc(&f, &full(0, 1)).unwrap();
        let finv = f.invert();
        for x in samples() {
            let y = tau.eval(&x).unwrap();
            assert_eq!(tau.eval(&y).unwrap(), x);
            assert_eq!(tau.eval(&f.evaluate(&y)).unwrap(), finv.evaluate(&x));
        }
        // reverses cyclic order
        let (a, b, c) = (cp(1, 8), cp(1, 4), cp(1, 2));
        let (ta, tb, tc) = (tau.eval(&a).unwrap(), tau.eval(&b).unwrap(), tau.eval(&c).unwrap());
        assert!(ta.distance_to(&tc) < ta.distance_to(&tb));
    }
    assert!(reverse_on_arc(&two_fixed(), &full(0, 1)).is_err());
}

#[test]
fn affine_with_knots() {
    let arc = ClosedArc::between(&cp(0, 1), &cp(1, 2));
    let m = affine_between(&arc, &arc, true, &[(cp(1, 8), cp(1, 4)), (cp(1, 4), cp(1, 8))]).unwrap();
    assert_eq!(m.eval(&cp(1, 8)).unwrap(), cp(1, 4));
    assert_eq!(m.eval(&cp(0, 1)).unwrap(), cp(1, 2));
    assert_eq!(m.eval(&cp(3, 16)).unwrap(), cp(3, 16));
    assert_eq!(affine_fixed_point(&arc, &[(cp(1, 8), cp(1, 4)), (cp(1, 4), cp(1, 8))]), Some(cp(3, 16)));
    assert_eq!(affine_fixed_point(&arc, &[]), Some(cp(1, 4)));
    for x in samples().into_iter().filter(|x| arc.contains(x)) {
        assert_eq!(m.eval(&m.eval(&x).unwrap()).unwrap(), x);
    }
}

#[test]
fn inverse_nodes() {
    let f = two_fixed();
    let k = equivariant_conjugator(&f, &f.invert(), &ComponentMatching::axis(2, 2)).unwrap();
    let kinv = k.inverse();
    let wrapped = EvalMap::inverse_of(k.clone());
    let comp = EvalMap::compose(vec![EvalMap::pl(f.clone()), k.clone()]);
    for x in samples() {
        assert_eq!(k.eval(&kinv.eval(&x).unwrap()).unwrap(), x);
        assert_eq!(wrapped.eval(&k.eval(&x).unwrap()).unwrap(), x);
        assert_eq!(comp.inverse().eval(&comp.eval(&x).unwrap()).unwrap(), x);
    }
}

#[test]
fn json_round_trip() {
    let f = two_fixed();
    let k = equivariant_conjugator(&f, &f.invert(), &ComponentMatching::axis(2, 2)).unwrap();
    let m = EvalMap::compose(vec![
        EvalMap::pl(f.clone()),
        EvalMap::inverse_of(k.clone()),
        k.inverse(),
        affine_between(&ClosedArc::between(&cp(0, 1), &cp(1, 3)), &ClosedArc::between(&cp(0, 1), &cp(1, 3)), false, &[]).unwrap(),
    ]);
    let s = m.to_json();
    let back = EvalMap::from_json(&s).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.to_json(), s);
    assert!(EvalMap::from_json(r#"{"node":"spline"}"#).is_err());
}
