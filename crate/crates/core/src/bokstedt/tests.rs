use super::*;
use crate::fp::Prime;
use crate::presets::{bp_m, preset};

const T: i64 = 48;

fn run(spec: &crate::specfile::SpecFile, t: i64) -> ThhOutput {
    let l = spec.load(base_window(Prime::new(spec.p).unwrap(), t)).unwrap();
    let input = ThhInput { base: l.presentation.clone(), commutative: l.commutative(), witness: l.witness };
    thh(&input, t).unwrap()
}

/// Series of a tensor product of P(d) and E(d) factors, written out by hand.
fn series(p: u32, poly: &[u32], ext: &[u32], t: i64) -> Vec<u64> {
    let mut gens = Vec::new();
    for (i, &d) in poly.iter().enumerate() {
        gens.push(Generator::new(format!("p{i}"), d, GenKind::Polynomial));
    }
    for (i, &d) in ext.iter().enumerate() {
        gens.push(Generator::new(format!("e{i}"), d, if p == 2 || d % 2 == 1 { GenKind::Exterior } else { GenKind::Truncated(2) }));
    }
    Presentation::new(Prime::new(p).unwrap(), gens).unwrap().poincare_series(t).unwrap()
}

fn upto(t: i64, it: impl Iterator<Item = i64>) -> Vec<u32> {
    it.take_while(|&d| d <= t).map(|d| d as u32).collect()
}

#[test]
fn thh_of_truncated_brown_peterson_odd() {
    for (p, m) in [(3u32, 1u32), (3, 2), (5, 2), (3, 0)] {
        let out = run(&bp_m(p, m), T);
        let pi = p as i64;
        // H_*(B) ⊗ E(σξ̄_1..σξ̄_m) ⊗ P(στ̄_m)
        let mut poly = upto(T, (1..).map(|k| 2 * (pi.pow(k) - 1)));
        poly.extend(upto(T, [2 * pi.pow(m)].into_iter()));
        let mut ext = upto(T, (m..30).map(|k| 2 * pi.pow(k) - 1));
        ext.extend((1..=m).map(|k| 2 * (p.pow(k) - 1) + 1));
        assert_eq!(out.presentation.poincare_series(T).unwrap(), series(p, &poly, &ext, T), "p={p} m={m}");
        if let Ok(st) = out.presentation.index_of(&format!("stau{m}")) {
            assert_eq!(out.presentation.generators[st].kind, GenKind::Polynomial);
        }
        assert!(out.warnings.is_empty());
    }
}

#[test]
fn thh_of_truncated_brown_peterson_two() {
    for m in 0..=3u32 {
        let out = run(&bp_m(2, m), T);
        // H_*(B) ⊗ E(σξ̄_1², …, σξ̄_m²) ⊗ P(σξ̄_{m+1})
        let mut poly: Vec<u32> = (1..=m).map(|k| 2 * ((1 << k) - 1)).collect();
        poly.extend(upto(T, (m as i64 + 1..).map(|k| (1i64 << k) - 1)));
        poly.push(1 << (m + 1));
        let ext: Vec<u32> = (1..=m).map(|k| 2 * ((1 << k) - 1) + 1).collect();
        assert_eq!(out.presentation.poincare_series(T).unwrap(), series(2, &poly, &ext, T), "m={m}");
        let head = out.presentation.index_of(&format!("sxi{}", m + 1)).unwrap();
        assert_eq!(out.presentation.generators[head].kind, GenKind::Polynomial);
        // σ(ξ̄_{m+2}) = (σξ̄_{m+1})²
        let x = out.presentation.index_of(&format!("xi{}", m + 2)).unwrap();
        let want = out.presentation.power(&out.presentation.gen(head), 2).unwrap();
        assert_eq!(out.presentation.sigma[x], Some(want));
    }
}

#[test]
fn bokstedt_differential_squares_to_zero() {
    for (p, m) in [(3u32, 1u32), (3, 2), (5, 1), (3, 0)] {
        let l = bp_m(p, m).load(base_window(Prime::new(p).unwrap(), T)).unwrap();
        let e2 = hh_of_free(&l.presentation).unwrap();
        let fams = families(&e2).unwrap();
        assert!(!fams.is_empty());
        let basis = GradedBasis::new(&e2, T).unwrap();
        for t in 1..=T {
            for mono in basis.basis(t) {
                let once = bokstedt_d(&e2, &fams, mono).unwrap();
                let mut twice = Element::zero(t - 2);
                for (m2, &c) in once.terms() {
                    twice = twice.add_scaled(&bokstedt_d(&e2, &fams, m2).unwrap(), c, e2.p).unwrap();
                }
                assert!(twice.is_zero(), "p={p} {}", e2.format_monomial(mono));
            }
        }
    }
}

#[test]
fn polynomial_inputs_are_unchanged() {
    let mu = preset("MU", Some(3), None).unwrap().0;
    let out = run(&mu, 30);
    let e2 = hh_of_free(&mu.load(30).unwrap().presentation).unwrap();
    assert_eq!(out.presentation.poincare_series(30).unwrap(), e2.poincare_series(30).unwrap());
    assert!(out.notes.is_empty() && out.warnings.is_empty());
    let sphere = preset("sphere", Some(5), None).unwrap().0;
    assert_eq!(run(&sphere, 10).presentation.len(), 0);
}

#[test]
fn brown_peterson_via_witness() {
    for p in [2u32, 3] {
        let spec = preset("BP", Some(p), None).unwrap().0;
        let out = run(&spec, T);
        assert!(out.warnings.is_empty());
        assert!(out.notes.iter().any(|n| n.contains("witness")));
        let pres = &out.presentation;
        assert!(pres.generators.iter().filter(|g| g.name.starts_with('s')).all(|g| g.kind == GenKind::Exterior));
        // Without the witness the extension question is left open.
        let mut bare = spec.clone();
        bare.witness = None;
        let out = run(&bare, T);
        assert_eq!(out.presentation.len(), pres.len());
    }
}

#[test]
fn non_commutative_input_keeps_truncations() {
    let mut spec = bp_m(3, 1);
    spec.flags.commutative = false;
    let out = run(&spec, T);
    assert!(!out.warnings.is_empty());
    let st = out.presentation.index_of("stau1").unwrap();
    assert_eq!(out.presentation.generators[st].kind, GenKind::Truncated(3));
}

#[test]
fn rejects_truncated_input() {
    let p = Prime::new(3).unwrap();
    let a = Presentation::new(p, vec![Generator::new("u", 2, GenKind::Truncated(3))]).unwrap();
    assert!(matches!(hh_of_free(&a), Err(Error::Unsupported(_))));
}

