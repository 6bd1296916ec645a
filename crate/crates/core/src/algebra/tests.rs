use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;

fn p(v: u32) -> Prime {
    Prime::new(v).unwrap()
}

fn pres(pv: u32, gens: &[(&str, u32, GenKind)]) -> Presentation {
    let gens = gens.iter().map(|(n, d, k)| Generator::new(*n, *d, *k)).collect();
    Presentation::new(p(pv), gens).unwrap()
}

/// Brute-force enumeration of exponent vectors, independent of the DFS.
fn brute_basis(a: &Presentation, t: i64) -> Vec<Monomial> {
    let caps: Vec<u32> = a
        .generators
        .iter()
        .map(|g| {
            let by_degree = (t.max(0) as u32) / g.degree;
            g.kind.max_exponent().map_or(by_degree, |c| c.min(by_degree))
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0u32; a.len()];
    loop {
        let m = Monomial(cur.clone());
        if a.monomial_degree(&m) == t {
            out.push(m);
        }
        let mut i = 0;
        loop {
            if i == cur.len() {
                out.sort();
                return out;
            }
            if cur[i] < caps[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn multiply_examples() {
    let a = pres(2, &[("xi1_2", 2, GenKind::Polynomial)]);
    let x = a.gen(0);
    assert_eq!(a.format_element(&a.multiply(&x, &x).unwrap()), "xi1_2^2");

    let b = pres(3, &[("sxi1", 5, GenKind::Exterior)]);
    let s = b.gen(0);
    assert!(b.multiply(&s, &s).unwrap().is_zero());

    let c = pres(5, &[("stau", 4, GenKind::DividedPower)]);
    let g1 = c.monomial_element(Monomial(vec![1]));
    let g2 = c.monomial_element(Monomial(vec![2]));
    let prod = c.multiply(&g1, &g2).unwrap();
    assert_eq!(prod.coefficient(&Monomial(vec![3])), 3);
    let c3 = pres(3, &[("stau", 4, GenKind::DividedPower)]);
    let g1 = c3.monomial_element(Monomial(vec![1]));
    let g2 = c3.monomial_element(Monomial(vec![2]));
    assert!(c3.multiply(&g1, &g2).unwrap().is_zero());
}

#[test]
fn koszul_sign_on_odd_generators() {
    let a = pres(3, &[("a", 1, GenKind::Exterior), ("b", 3, GenKind::Exterior)]);
    let ab = a.multiply(&a.gen(0), &a.gen(1)).unwrap();
    let ba = a.multiply(&a.gen(1), &a.gen(0)).unwrap();
    assert_eq!(ab, ba.scaled(2, a.p));
}

#[test]
fn truncated_height() {
    let a = pres(3, &[("u", 2, GenKind::Truncated(3))]);
    let u2 = a.power(&a.gen(0), 2).unwrap();
    assert!(!u2.is_zero());
    assert!(a.power(&a.gen(0), 3).unwrap().is_zero());
}

#[test]
fn basis_examples() {
    let a = pres(2, &[("b1", 2, GenKind::Polynomial)]);
    assert_eq!(a.basis_in_degree(4, 10).unwrap(), vec![Monomial(vec![2])]);
    assert!(a.basis_in_degree(11, 10).is_err());

    // E(x) ⊗ Γ(σx) with |x| = 3: only γ_2 sits in degree 8.
    let b = pres(3, &[("x", 3, GenKind::Exterior), ("sx", 4, GenKind::DividedPower)]);
    assert_eq!(b.basis_in_degree(8, 10).unwrap(), brute_basis(&b, 8));
    assert_eq!(b.basis_in_degree(8, 10).unwrap(), vec![Monomial(vec![0, 2])]);
    assert_eq!(b.basis_in_degree(7, 10).unwrap(), vec![Monomial(vec![1, 1])]);

    let bad = Presentation {
        generators: vec![Generator::new("z", 0, GenKind::Polynomial)],
        ..Presentation::trivial(p(2))
    };
    assert!(bad.basis_in_degree(1, 4).is_err());
}

#[test]
fn canonical_order_is_lex_descending() {
    let a = pres(2, &[("a", 1, GenKind::Polynomial), ("b", 2, GenKind::Polynomial)]);
    let basis = a.basis_in_degree(4, 4).unwrap();
    let exps: Vec<Vec<u32>> = basis.iter().map(|m| m.0.clone()).collect();
    assert_eq!(exps, vec![vec![4, 0], vec![2, 1], vec![0, 2]]);
}

#[test]
fn poincare_examples() {
    let a = pres(2, &[("y", 2, GenKind::Polynomial)]);
    assert_eq!(a.poincare_series(6).unwrap(), vec![1, 0, 1, 0, 1, 0, 1]);
    let e = pres(3, &[("x", 3, GenKind::Exterior)]);
    assert_eq!(e.poincare_series(6).unwrap(), vec![1, 0, 0, 1, 0, 0, 0]);
}

fn thh_mu(pv: u32, t_max: u32) -> Presentation {
    let mut gens = Vec::new();
    for k in 1..=t_max / 2 {
        gens.push(Generator::new(format!("b{k}"), 2 * k, GenKind::Polynomial));
    }
    for k in 1..=t_max / 2 {
        gens.push(Generator::new(format!("sb{k}"), 2 * k + 1, GenKind::Exterior));
    }
    let mut a = Presentation::new(p(pv), gens).unwrap();
    let n = (t_max / 2) as usize;
    for k in 0..n {
        a.sigma[k] = Some(a.gen(n + k));
    }
    a
}

#[test]
fn thh_mu_series_matches_enumeration() {
    let a = thh_mu(2, 8);
    let series = a.poincare_series(8).unwrap();
    for t in 0..=8 {
        assert_eq!(series[t as usize], brute_basis(&a, t).len() as u64, "t={t}");
    }
    assert_eq!(&series[..6], &[1, 0, 1, 1, 2, 2]);
}

#[test]
fn sigma_examples() {
    let a = thh_mu(3, 8);
    let d = Derivation::sigma(&a);
    let b1b2 = a.multiply(&a.gen(0), &a.gen(1)).unwrap();
    let expect = a
        .multiply(&a.gen(0), &a.gen(5))
        .unwrap()
        .add(&a.multiply(&a.gen(1), &a.gen(4)).unwrap(), a.p)
        .unwrap();
    assert_eq!(d.apply(&b1b2).unwrap().unwrap(), expect);
    let cube = a.power(&a.gen(0), 3).unwrap();
    assert!(d.apply(&cube).unwrap().unwrap().is_zero());
}

#[test]
fn sigma_squares_to_zero_on_thh_mu() {
    for pv in [2, 3, 5] {
        let a = thh_mu(pv, 20);
        let d = Derivation::sigma(&a);
        for t in 0..=19 {
            for m in a.basis_in_degree(t, 20).unwrap() {
                let once = d.apply_monomial(&m).unwrap().unwrap();
                assert!(d.apply(&once).unwrap().unwrap().is_zero(), "p={pv} {m:?}");
            }
        }
    }
}

#[test]
fn missing_bockstein_is_unknown() {
    let a = pres(3, &[("t0", 1, GenKind::Exterior)]);
    assert!(Derivation::bockstein(&a).apply(&a.gen(0)).unwrap().is_none());
}

#[test]
fn restrict_projects_tables() {
    let mut a = thh_mu(2, 6);
    a.dl.insert(DlKey { epsilon: 0, i: 3, generator: 0 }, a.gen(4));
    let sub = a.restrict(&[0, 3]);
    assert_eq!(sub.len(), 2);
    assert_eq!(sub.sigma[0], Some(sub.gen(1)));
    assert!(sub.dl.is_empty());
    let map: BTreeMap<usize, usize> = [(0, 0), (3, 1)].into_iter().collect();
    assert_eq!(a.gen(3).reindex(&map, 2), Some(sub.gen(1)));
}

#[test]
fn format_round_trip_shape() {
    let a = pres(3, &[("x", 2, GenKind::Polynomial), ("g", 4, GenKind::DividedPower)]);
    let e = a
        .monomial_element(Monomial(vec![2, 0]))
        .scaled(2, a.p)
        .add(&a.monomial_element(Monomial(vec![0, 1])), a.p)
        .unwrap();
    assert_eq!(a.format_element(&e), "-x^2 + g[1]");
}

// Random small presentations for the algebraic laws.

fn kind_for(pv: u32, degree: u32, pick: u8) -> GenKind {
    if pv == 2 {
        return match pick % 4 {
            0 => GenKind::Polynomial,
            1 => GenKind::Exterior,
            2 => GenKind::Truncated(2 + (pick as u32 / 4) % 3),
            _ => GenKind::DividedPower,
        };
    }
    if degree % 2 == 1 {
        GenKind::Exterior
    } else {
        match pick % 3 {
            0 => GenKind::Polynomial,
            1 => GenKind::Truncated(2 + (pick as u32 / 4) % 3),
            _ => GenKind::DividedPower,
        }
    }
}

fn arb_presentation() -> impl Strategy<Value = Presentation> {
    (prop::sample::select(vec![2u32, 3, 5]), prop::collection::vec((1u32..=6, any::<u8>()), 1..=4))
        .prop_map(|(pv, raw)| {
            let gens = raw
                .iter()
                .enumerate()
                .map(|(i, &(d, pick))| Generator::new(format!("g{i}"), d, kind_for(pv, d, pick)))
                .collect();
            Presentation::new(p(pv), gens).unwrap()
        })
}

fn sign_of(a: &Presentation, x: i64, y: i64) -> u32 {
    a.p.sign(x % 2 != 0 && y % 2 != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn graded_commutative_and_associative(a in arb_presentation()) {
        const T: i64 = 10;
        let bases = a.bases_up_to(T).unwrap();
        let elems: Vec<Element> = bases.iter().flatten().map(|m| a.monomial_element(m.clone())).collect();
        for x in &elems {
            for y in &elems {
                if x.degree() + y.degree() > T { continue; }
                let xy = a.multiply(x, y).unwrap();
                let yx = a.multiply(y, x).unwrap();
                prop_assert_eq!(&xy, &yx.scaled(sign_of(&a, x.degree(), y.degree()), a.p));
                for z in &elems {
                    if x.degree() + y.degree() + z.degree() > T { continue; }
                    let l = a.multiply(&xy, z).unwrap();
                    let r = a.multiply(x, &a.multiply(y, z).unwrap()).unwrap();
                    prop_assert_eq!(l, r);
                }
            }
        }
    }

    #[test]
    fn basis_matches_brute_force_and_series(a in arb_presentation()) {
        let series = a.poincare_series(14).unwrap();
        for t in 0..=14 {
            let b = a.basis_in_degree(t, 14).unwrap();
            prop_assert_eq!(&b, &brute_basis(&a, t));
            prop_assert_eq!(b.len() as u64, series[t as usize]);
        }
    }

    #[test]
    fn tensor_series_is_product(a in arb_presentation(), b in arb_presentation()) {
        if a.p != b.p { return Ok(()); }
        let mut gens = a.generators.clone();
        for (i, g) in b.generators.iter().enumerate() {
            let mut g = g.clone();
            g.name = format!("h{i}");
            gens.push(g);
        }
        let ab = Presentation::new(a.p, gens).unwrap();
        let expect = basis::convolve(&a.poincare_series(16).unwrap(), &b.poincare_series(16).unwrap());
        prop_assert_eq!(ab.poincare_series(16).unwrap(), expect);
    }

    #[test]
    fn divided_power_coherence(pv in prop::sample::select(vec![2u32, 3, 5, 7]), i in 0u32..6, j in 0u32..6, k in 0u32..6) {
        let a = pres(pv, &[("g", 2, GenKind::DividedPower)]);
        let gi = a.monomial_element(Monomial(vec![i]));
        let gj = a.monomial_element(Monomial(vec![j]));
        let gk = a.monomial_element(Monomial(vec![k]));
        let l = a.multiply(&a.multiply(&gi, &gj).unwrap(), &gk).unwrap();
        let r = a.multiply(&gi, &a.multiply(&gj, &gk).unwrap()).unwrap();
        prop_assert_eq!(&l, &r);
        // γ_1 behaves as the generator: γ_1^n = n! γ_n.
        let g1 = a.monomial_element(Monomial(vec![1]));
        let pow = a.power(&g1, i).unwrap();
        let fact = (1..=i).fold(1u32, |acc, n| a.p.mul(acc, n % pv));
        prop_assert_eq!(pow.coefficient(&Monomial(vec![i])), fact);
    }

    #[test]
    fn square_zero_derivations_extend(a in arb_presentation(), picks in prop::collection::vec(any::<u8>(), 4)) {
        // σ pairs some generators x -> y with |y| = |x| + 1. At p = 2 a
        // divided-power source needs an exterior target, since otherwise
        // D²(γ_2) = y² is not zero.
        let mut a = a;
        let n = a.len();
        let mut used = vec![false; n];
        for x in 0..n {
            if used[x] || picks[x] % 2 == 1 {
                continue;
            }
            let fits = |y: usize| {
                y != x
                    && !used[y]
                    && a.generators[y].degree == a.generators[x].degree + 1
                    && !(a.p.is_two()
                        && a.generators[x].kind == GenKind::DividedPower
                        && a.generators[y].kind != GenKind::Exterior)
            };
            if let Some(y) = (0..n).find(|&y| fits(y)) {
                a.sigma[x] = Some(a.gen(y));
                used[x] = true;
                used[y] = true;
            }
        }
        let d = Derivation::sigma(&a);
        let mut ok_on_gens = true;
        for g in 0..n {
            let once = d.apply(&a.gen(g)).unwrap().unwrap();
            ok_on_gens &= d.apply(&once).unwrap().unwrap().is_zero();
        }
        prop_assume!(ok_on_gens);
        for t in 0..=12 {
            for m in a.basis_in_degree(t, 12).unwrap() {
                let once = d.apply_monomial(&m).unwrap().unwrap();
                prop_assert!(d.apply(&once).unwrap().unwrap().is_zero());
            }
        }
    }
}
