use hfl::germ::{q, qf, Germ, Order, Q};
use hfl::hecke_moduli::{
    act, canonicalize, canonicalizing_element, chart_image, charts, contains, from_u_coordinate, same_orbit,
    u_coordinate, GroupElement, HeckeParam,
};
use hfl::strata::{all_profiles, degeneration_poset, enumerate_strata, has_saturated_even_zero, r2_closed_form, QDProfile};
use hfl::wps::WpsPoint;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| qf(n, d))
}

fn germ(len: usize, t: i64) -> impl Strategy<Value = Germ> {
    (-2i64..=2, prop::collection::vec(rat(), 0..len)).prop_map(move |(v, c)| Germ::new(v, c, v + t))
}

fn unit(t: i64) -> impl Strategy<Value = Germ> {
    (prop::collection::vec(rat(), 1..6), rat().prop_filter("nonzero", |x| *x != q(0)))
        .prop_map(move |(mut c, c0)| {
            c[0] = c0;
            Germ::new(0, c, t)
        })
}

fn even_unit(d: i64) -> impl Strategy<Value = Germ> {
    (prop::collection::vec(rat(), 1..6), rat().prop_filter("nonzero", |x| *x != q(0))).prop_map(move |(c, c0)| {
        let mut terms = vec![(0, c0)];
        terms.extend(c.into_iter().enumerate().map(|(i, x)| (2 * i as i64 + 2, x)));
        Germ::from_terms(&terms, d)
    })
}

fn parity_poly(first: i64, d: i64) -> impl Strategy<Value = Germ> {
    prop::collection::vec(rat(), 0..6).prop_map(move |c| {
        let terms: Vec<(i64, Q)> = c.into_iter().enumerate().map(|(i, x)| (first + 2 * i as i64, x)).collect();
        Germ::from_terms(&terms, d)
    })
}

fn hecke_param() -> impl Strategy<Value = HeckeParam> {
    prop::sample::select(vec![3i64, 5, 7, 9]).prop_flat_map(|d| {
        (parity_poly(1, d), parity_poly(0, d), 0..=((d - 1) / 2)).prop_map(move |(a, b, shift)| {
            // shifting both components by an even power keeps the parities
            let s = 2 * (shift / 2);
            HeckeParam::new(d, a.shift(s).truncate(d), b.shift(s).truncate(d)).unwrap()
        })
    })
}

fn wps_point() -> impl Strategy<Value = WpsPoint> {
    prop::collection::vec((1u32..=4, rat()), 1..5)
        .prop_filter("not all zero", |v| v.iter().any(|(_, x)| *x != q(0)))
        .prop_map(|v| {
            let (w, c): (Vec<u32>, Vec<Q>) = v.into_iter().unzip();
            WpsPoint::new(w, c).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(x in germ(6, 6), y in germ(6, 6), z in germ(6, 6)) {
        prop_assert!((&x + &y).agrees(&(&y + &x)));
        prop_assert!((&x * &y).agrees(&(&y * &x)));
        prop_assert!((&(&x + &y) + &z).agrees(&(&x + &(&y + &z))));
        prop_assert!((&(&x * &y) * &z).agrees(&(&x * &(&y * &z))));
        prop_assert!((&x * &(&y + &z)).agrees(&(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn unit_inverse(u in unit(8)) {
        let inv = u.invert().unwrap();
        prop_assert!((&u * &inv).agrees(&Germ::one(8)));
        prop_assert_eq!(inv.trunc(), 8);
    }

    #[test]
    fn parity_split_recombines(x in germ(8, 8)) {
        let (e, o) = x.parity_split();
        prop_assert!(e.is_even() && o.is_odd());
        prop_assert!((&e + &o).agrees(&x));
        prop_assert!(x.sigma().sigma().agrees(&x));
    }

    #[test]
    fn precision_is_conservative(x in germ(6, 6), y in germ(6, 6), k in 0i64..6) {
        // operating on truncations never claims more than the truncations support
        let (xs, ys) = (x.truncate(x.valuation() + k), y.truncate(y.valuation() + k));
        let p = &xs * &ys;
        let full = &x * &y;
        prop_assert!(p.trunc() <= full.trunc());
        prop_assert!(p.agrees(&full));
        let s = &xs + &ys;
        prop_assert!(s.agrees(&(&x + &y)));
    }

    #[test]
    fn text_roundtrip(x in germ(6, 6)) {
        prop_assert_eq!(Germ::parse(&x.to_text(), 0).unwrap(), x);
    }

    #[test]
    fn wps_rescale_is_equal(p in wps_point(), l in rat().prop_filter("nonzero", |x| *x != q(0))) {
        let r = p.rescale(&l).unwrap();
        prop_assert!(p.equals(&r).unwrap());
        prop_assert!(r.equals(&p).unwrap());
        prop_assert!(p.equals(&p).unwrap());
    }

    #[test]
    fn wps_equality_is_transitive(p in wps_point(), l in 1i64..5, m in -4i64..-1) {
        let r = p.rescale(&q(l)).unwrap();
        let s = r.rescale(&q(m)).unwrap();
        prop_assert!(p.equals(&s).unwrap());
        prop_assert_eq!(p.normalized(), s.normalized());
    }

    #[test]
    fn torus_action_respects_equality(p in wps_point(), l in 1i64..4) {
        let t: Vec<Q> = (1..p.coords().len()).map(|i| q(i as i64 + 2)).collect();
        let a = p.torus_act(&t).unwrap();
        let b = p.rescale(&q(l)).unwrap().torus_act(&t).unwrap();
        prop_assert!(a.equals(&b).unwrap());
    }

    #[test]
    fn action_preserves_orbit_invariants(p in hecke_param(), phi in even_unit(9)) {
        let g = GroupElement::new(p.d(), phi.truncate(p.d())).unwrap();
        let gp = act(&g, &p).unwrap();
        prop_assert_eq!(gp.stratum(), p.stratum());
        prop_assert_eq!(canonicalize(&gp), canonicalize(&p));
        prop_assert!(same_orbit(&gp, &p));
        if let Ok(u) = u_coordinate(&p) {
            prop_assert_eq!(u_coordinate(&gp).unwrap(), u);
        }
        for c in charts(p.d()) {
            if contains(c, &p) {
                prop_assert!(contains(c, &gp));
                prop_assert!(chart_image(c, &p).unwrap().equals(&chart_image(c, &gp).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn canonical_form_is_reached(p in hecke_param()) {
        let g = canonicalizing_element(&p);
        let c = canonicalize(&p);
        prop_assert_eq!(act(&g, &p).unwrap(), c.clone());
        prop_assert_eq!(canonicalize(&c), c.clone());
        if let (Some(n), Ok(u)) = (p.n(), u_coordinate(&p)) {
            prop_assert_eq!(from_u_coordinate(p.d(), n, &u).unwrap(), c);
        }
    }

    #[test]
    fn every_class_lies_in_a_chart(p in hecke_param()) {
        let covered = charts(p.d()).into_iter().any(|ch| contains(ch, &p));
        prop_assert_eq!(covered, p.n().is_some());
    }
}

#[test]
fn strata_invariants_through_genus_five() {
    for g in 2..=5 {
        for p in all_profiles(g) {
            let s = enumerate_strata(&p);
            check_strata(&p, &s);
            let poset = degeneration_poset(&p);
            assert_eq!(poset.minima().len(), 1);
            assert_eq!(poset.maxima().len(), 1);
            assert_eq!(poset.height() as u32, p.mults.iter().map(|m| m / 2).sum::<u32>());
        }
    }
}

fn check_strata(p: &QDProfile, s: &[hfl::strata::Stratum]) {
    for st in s {
        assert_eq!(st.bundle_dim(), st.dim, "{:?} {:?}", p.mults, st.divisor.coeffs);
        if !has_saturated_even_zero(p, &st.divisor) {
            assert_eq!(st.r2 as i64, r2_closed_form(p, &st.divisor));
        }
    }
    assert_eq!(s.iter().filter(|x| x.is_open).count(), 1);
    assert_eq!(s.iter().filter(|x| x.is_lowest).count(), 1);
}

#[test]
fn germ_orders() {
    assert_eq!(Germ::zero(4).order(), Order::Infinite);
    assert_eq!(Germ::monomial(q(2), 3, 6).order(), Order::Finite(3));
}
