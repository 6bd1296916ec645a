use proptest::prelude::*;

use super::*;
use crate::algebra::{GenKind, Generator};
use crate::expr::parse_element;
use crate::fp::Prime;

fn dual_steenrod_2() -> Presentation {
    // ξ̄_1, ξ̄_2, ξ̄_3 with Q^{2^k}(ξ̄_k) = ξ̄_{k+1}.
    let gens = (1..=3).map(|k| Generator::new(format!("xi{k}"), (1 << k) - 1, GenKind::Polynomial)).collect();
    let mut a = Presentation::new(Prime::new(2).unwrap(), gens).unwrap();
    for k in 0..2 {
        a.dl.insert(DlKey { epsilon: 0, i: 1 << (k + 1), generator: k }, a.gen(k + 1));
    }
    a
}

fn dual_steenrod_odd(pv: u32) -> Presentation {
    let p = Prime::new(pv).unwrap();
    let gens = vec![
        Generator::new("tau0", 1, GenKind::Exterior),
        Generator::new("tau1", 2 * pv - 1, GenKind::Exterior),
        Generator::new("xi1", 2 * pv - 2, GenKind::Polynomial),
    ];
    let mut a = Presentation::new(p, gens).unwrap();
    a.dl.insert(DlKey { epsilon: 0, i: 1, generator: 0 }, a.gen(1));
    a.bockstein[1] = Some(a.gen(2));
    a
}

fn mu(pv: u32) -> Presentation {
    let gens = (1..=4).map(|k| Generator::new(format!("b{k}"), 2 * k, GenKind::Polynomial)).collect();
    let mut a = Presentation::new(Prime::new(pv).unwrap(), gens).unwrap();
    a.evenly_graded = true;
    a
}

#[test]
fn table_and_bottom_examples() {
    let a = dual_steenrod_2();
    let x1 = a.gen(0);
    assert_eq!(apply_q(&a, 0, 2, &x1).unwrap(), DlValue::Known(a.gen(1)));
    assert_eq!(apply_q(&a, 0, 1, &x1).unwrap(), DlValue::Known(a.multiply(&x1, &x1).unwrap()));
    assert!(apply_q(&a, 0, 0, &x1).unwrap().known().unwrap().is_zero());
    let x2 = a.gen(1);
    assert!(apply_q(&a, 0, 2, &x2).unwrap().known().unwrap().is_zero());
    assert_eq!(apply_q(&a, 0, 5, &x2).unwrap(), DlValue::Unknown);
    assert!(apply_q(&a, 1, 5, &x2).is_err());
}

#[test]
fn odd_table_and_bockstein() {
    for pv in [3, 5] {
        let a = dual_steenrod_odd(pv);
        let t0 = a.gen(0);
        assert_eq!(apply_q(&a, 0, 1, &t0).unwrap(), DlValue::Known(a.gen(1)));
        assert_eq!(apply_q(&a, 1, 1, &t0).unwrap(), DlValue::Known(a.gen(2)));
        assert!(apply_q(&a, 0, 0, &t0).unwrap().known().unwrap().is_zero());
        let xi = a.gen(2);
        let m = (pv - 1) as i64;
        let pow = a.power(&xi, pv).unwrap();
        assert_eq!(apply_q(&a, 0, m, &xi).unwrap(), DlValue::Known(pow));
        assert!(apply_q(&a, 1, m, &xi).unwrap().known().unwrap().is_zero());
    }
}

#[test]
fn parity_vanishing_in_even_algebra() {
    let a = mu(2);
    let b1 = a.gen(0);
    assert!(apply_q(&a, 0, 3, &b1).unwrap().known().unwrap().is_zero());
    assert_eq!(apply_q(&a, 0, 4, &b1).unwrap(), DlValue::Unknown);
    let a3 = mu(3);
    assert!(apply_q(&a3, 1, 2, &a3.gen(0)).unwrap().known().unwrap().is_zero());
    let mut unflagged = mu(2);
    unflagged.evenly_graded = false;
    assert_eq!(apply_q(&unflagged, 0, 3, &unflagged.gen(0)).unwrap(), DlValue::Unknown);
}

#[test]
fn cartan_on_products() {
    let a = dual_steenrod_2();
    let x = parse_element(&a, "xi1*xi2").unwrap();
    // Q^5(ξ̄_1ξ̄_2) = Q^1(ξ̄_1)Q^4(ξ̄_2) + Q^2(ξ̄_1)Q^3(ξ̄_2)
    let want = parse_element(&a, "xi1^2*xi3 + xi2^3").unwrap();
    assert_eq!(apply_q(&a, 0, 5, &x).unwrap(), DlValue::Known(want));
    assert_eq!(apply_q(&a, 0, 6, &x).unwrap(), DlValue::Unknown);
}

#[test]
fn validate_table_flags_violations() {
    let p3 = Prime::new(3).unwrap();
    let mut a = Presentation::new(p3, vec![Generator::new("x", 4, GenKind::Polynomial)]).unwrap();
    assert!(validate_table(&a).is_empty());
    // Q^1(x) with |x| = 4 = 2m, m = 2: below range.
    let x = a.gen(0);
    let v = a.power(&x, 2).unwrap();
    a.dl.insert(DlKey { epsilon: 0, i: 1, generator: 0 }, v.with_degree(8));
    assert!(!validate_table(&a).is_empty());
    let mut b = Presentation::new(p3, vec![Generator::new("x", 4, GenKind::Polynomial)]).unwrap();
    b.dl.insert(DlKey { epsilon: 0, i: 2, generator: 0 }, b.power(&b.gen(0), 3).unwrap());
    assert!(validate_table(&b).is_empty());
    b.dl.insert(DlKey { epsilon: 0, i: 2, generator: 0 }, Element::zero(12));
    assert_eq!(validate_table(&b).len(), 1);
    assert!(validate_table(&mu(5)).is_empty());
    assert!(validate_table(&dual_steenrod_2()).is_empty());
    assert!(validate_table(&dual_steenrod_odd(3)).is_empty());
}

/// Cartan sum with the product split at the last generator instead of the
/// first; agrees with the evaluator whenever both sides resolve.
fn cartan_split_last(a: &Presentation, eps: u8, i: i64, m: &Monomial) -> Option<Element> {
    let (g, _) = m.support().last()?;
    let last = Monomial::generator(a.len(), g, 1);
    let mut rest = m.clone();
    rest.0[g] -= 1;
    let (_, c) = a.mul_monomials(&rest, &last)?;
    let p = a.p;
    let drest = a.monomial_degree(&rest);
    let parts: Vec<(u8, u8, u32)> =
        if eps == 1 { vec![(1, 0, 1), (0, 1, p.sign(drest % 2 != 0))] } else { vec![(0, 0, 1)] };
    let mut total = Element::zero(a.dl_degree(eps, i, a.monomial_degree(m)));
    for j in 0..=i {
        for &(ea, eb, s) in &parts {
            let x = apply_q(a, ea, j, &a.monomial_element(rest.clone())).ok()?.known()?;
            let y = apply_q(a, eb, i - j, &a.monomial_element(last.clone())).ok()?.known()?;
            total = total.add_scaled(&a.multiply(&x, &y).ok()?, s, p).ok()?;
        }
    }
    Some(total.scaled(p.inv(c), p))
}

fn arb_even_algebra() -> impl Strategy<Value = (Presentation, Vec<(i64, usize, u8)>)> {
    (
        prop::sample::select(vec![2u32, 3, 5]),
        prop::collection::vec(1u32..=3, 1..=3),
        prop::collection::vec((0i64..12, 0usize..3, 0u8..3), 0..4),
    )
        .prop_map(|(pv, halves, entries)| {
            let gens = halves
                .iter()
                .enumerate()
                .map(|(i, &h)| Generator::new(format!("g{i}"), 2 * h, GenKind::Polynomial))
                .collect();
            let mut a = Presentation::new(Prime::new(pv).unwrap(), gens).unwrap();
            a.evenly_graded = true;
            (a, entries)
        })
}

/// Fills in a few table entries with products of generators of the right
/// degree (or zero), above the instability range.
fn with_table(mut a: Presentation, entries: &[(i64, usize, u8)]) -> Presentation {
    for &(i, g, pick) in entries {
        let g = g % a.len();
        let d = a.generators[g].degree as i64;
        let key = DlKey { epsilon: 0, i, generator: g };
        let target = a.dl_degree(0, i, d);
        let bottom = if a.p.is_two() { i <= d } else { 2 * i <= d };
        if bottom || target % 2 != 0 {
            continue;
        }
        let basis = a.basis_in_degree(target, target).unwrap();
        let v = match basis.get(pick as usize) {
            Some(m) => a.monomial_element(m.clone()),
            None => Element::zero(target),
        };
        a.dl.insert(key, v);
    }
    a
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn instability_and_bottom_are_total((a, _e) in arb_even_algebra(), i in -3i64..20) {
        for g in 0..a.len() {
            let x = a.gen(g);
            let d = x.degree();
            let below = if a.p.is_two() { i < d } else { 2 * i < d };
            let v = apply_q(&a, 0, i, &x).unwrap();
            if below {
                prop_assert!(v.known().unwrap().is_zero());
            } else if (a.p.is_two() && i == d) || (!a.p.is_two() && 2 * i == d) {
                prop_assert_eq!(v.known().unwrap(), a.power(&x, a.p.value()).unwrap());
            }
        }
    }

    #[test]
    fn cartan_consistency((a, entries) in arb_even_algebra(), i in 0i64..24) {
        let a = with_table(a, &entries);
        prop_assert!(validate_table(&a).is_empty());
        let eps_range: Vec<u8> = if a.p.is_two() { vec![0] } else { vec![0, 1] };
        for t in 2..=8 {
            for m in a.basis_in_degree(t, 8).unwrap() {
                if m.length() < 2 { continue; }
                for &eps in &eps_range {
                    let direct = apply_q(&a, eps, i, &a.monomial_element(m.clone())).unwrap();
                    if let Some(other) = cartan_split_last(&a, eps, i, &m) {
                        prop_assert_eq!(direct, DlValue::Known(other));
                    }
                }
            }
        }
    }

    #[test]
    fn additive_in_the_target((a, entries) in arb_even_algebra(), i in 0i64..16, c in 1u32..5) {
        let a = with_table(a, &entries);
        let basis = a.basis_in_degree(4, 4).unwrap();
        if basis.len() < 2 { return Ok(()); }
        let x = a.monomial_element(basis[0].clone());
        let y = a.monomial_element(basis[1].clone());
        let sum = x.add_scaled(&y, c, a.p).unwrap();
        let (qx, qy, qs) = (apply_q(&a, 0, i, &x).unwrap(), apply_q(&a, 0, i, &y).unwrap(), apply_q(&a, 0, i, &sum).unwrap());
        if let (Some(qx), Some(qy)) = (qx.known(), qy.known()) {
            prop_assert_eq!(qs, DlValue::Known(qx.add_scaled(&qy, c, a.p).unwrap()));
        }
    }
}
