use proptest::prelude::*;
use uea_lab::{PLocal, PrimeContext, Valuation};

fn local(p: u64) -> impl Strategy<Value = PLocal> {
    (-200i64..200, 1i64..60).prop_filter_map("denominator divisible by p", move |(n, d)| {
        PrimeContext::new(p).unwrap().scalar(n, d).ok()
    })
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11])
}

proptest! {
    #[test]
    fn ring_axioms((p, a, b, c) in prime().prop_flat_map(|p| (Just(p), local(p), local(p), local(p)))) {
        let ctx = PrimeContext::new(p).unwrap();
        prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!(ctx.is_local(&(&a * &b)));
        prop_assert!(ctx.is_local(&(&a - &b)));
    }

    #[test]
    fn valuation_is_discrete((p, a, b) in prime().prop_flat_map(|p| (Just(p), local(p), local(p)))) {
        let ctx = PrimeContext::new(p).unwrap();
        let (va, vb) = (ctx.valuation(&a), ctx.valuation(&b));
        let vs = ctx.valuation(&(&a + &b));
        prop_assert!(vs >= va.min(vb));
        if va != vb {
            prop_assert_eq!(vs, va.min(vb));
        }
        if let (Valuation::Finite(x), Valuation::Finite(y)) = (va, vb) {
            prop_assert_eq!(ctx.valuation(&(&a * &b)), Valuation::Finite(x + y));
        }
    }

    #[test]
    fn reduction_is_a_ring_map((p, a, b) in prime().prop_flat_map(|p| (Just(p), local(p), local(p)))) {
        let ctx = PrimeContext::new(p).unwrap();
        let (ra, rb) = (ctx.reduce_mod_p(&a), ctx.reduce_mod_p(&b));
        prop_assert_eq!(ctx.reduce_mod_p(&(&a * &b)), ra * rb % p);
        prop_assert_eq!(ctx.reduce_mod_p(&(&a + &b)), (ra + rb) % p);
        prop_assert_eq!(ctx.reduce_mod_p(&ctx.lift(ra)), ra);
    }

    #[test]
    fn parse_round_trips((p, a) in prime().prop_flat_map(|p| (Just(p), local(p)))) {
        let ctx = PrimeContext::new(p).unwrap();
        prop_assert_eq!(ctx.parse(&a.to_string()).unwrap(), a);
    }
}

#[test]
fn rejects_non_local_values() {
    let ctx = PrimeContext::new(3).unwrap();
    assert!(ctx.scalar(1, 3).is_err());
    assert!(ctx.parse("2/9").is_err());
    assert!(ctx.divide_exact(&PLocal::one(), &PLocal::from_int(3)).is_err());
    assert!(PrimeContext::new(2).is_err());
    assert!(PrimeContext::new(9).is_err());
}
