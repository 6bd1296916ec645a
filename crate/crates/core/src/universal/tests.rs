use super::*;
use crate::ss::turn_page;

fn replay(p: u32, t: i64, r: u32, t_max: i64) -> UniversalReport {
    replay_universal(&UniversalInput::new(p, t, r, t_max).unwrap()).unwrap()
}

#[test]
fn smallest_example_by_hand() {
    // x in degree 0, δx in degree 1: survivors x² and Q^1(x) + xδx.
    let rep = replay(2, 0, 1, 20);
    assert!(rep.pass, "{:?}", rep.failures);
    let mut want = vec![0u64; 21];
    want[0] = 1;
    want[1] = 1;
    assert_eq!(rep.stable_dims, want);
    let names: Vec<_> = rep.survivors.iter().map(|s| s.class.as_str()).collect();
    assert_eq!(names, ["Q^0(x)", "Q^1(x) + xδx"]);
}

#[test]
fn basis_counts_match_a_direct_count() {
    // Odd p, t = 2m: count operations by hand from the degree formula.
    let u = UniversalInput::new(3, 2, 2, 40).unwrap();
    let b = extended_power_basis(&u, 40);
    for d in 0..=40 {
        let mut n = 0;
        if d == 2 * 2 + 5 {
            n += 1; // x²δx, |x| = 2, |δx| = 5
        }
        for i in 0..=40 {
            for eps in 0..=1i64 {
                if 2 * i - eps >= 2 && 2 + 4 * i - eps == d {
                    n += 1;
                }
                if 2 * i - eps >= 5 && 5 + 4 * i - eps == d {
                    n += 1;
                }
            }
        }
        assert_eq!(b.dim(d), n, "degree {d}");
    }
}

#[test]
fn all_three_cases_pass() {
    for (p, t, r) in [(2, 3, 2), (3, 4, 2), (3, 3, 3), (5, 2, 1), (5, 1, 2), (3, 0, 1)] {
        let rep = replay(p, t, r, 60);
        assert!(rep.pass, "p={p} t={t} r={r}: {:?}", rep.failures);
        assert_eq!(rep.survivors.len(), 2 * r as usize);
        assert!(rep.survivors.iter().all(|s| s.reason.is_some()));
    }
}

#[test]
fn bockstein_exclusion_is_used_for_the_product() {
    let rep = replay(5, 2, 3, 60);
    assert!(rep.pass, "{:?}", rep.failures);
    let prod = rep.survivors.iter().find(|s| s.class == "x^4δx").unwrap();
    assert_eq!(prod.reason, Some(SurvivalReason::BocksteinExclusion));
    assert!(rep.survivors.iter().any(|s| s.reason == Some(SurvivalReason::Induction)));
}

#[test]
fn zero_differential_changes_nothing() {
    let u = UniversalInput::new(2, 2, 2, 30).unwrap();
    let (_, page, round) = universal_page(&u).unwrap();
    let zero = Round::zero(&page);
    let same = turn_page(&page, &zero).unwrap();
    assert_eq!(same.stable_dims()[..=30], page.stable_dims()[..=30]);
    assert!(same.torsion.iter().all(|s| s.dims.iter().all(|&d| d == 0)));
    let next = turn_page(&page, &round).unwrap();
    assert!(next.stable_dims()[..=30].iter().sum::<u64>() < page.stable_dims()[..=30].iter().sum::<u64>());
}

#[test]
fn torsion_sits_in_the_strip() {
    let rep = replay(2, 1, 3, 40);
    let next = rep.next.unwrap();
    for s in &next.torsion {
        for c in s.columns() {
            assert!(c > -6 && c <= 0);
        }
    }
}

#[test]
fn grid_passes() {
    for u in grid(60) {
        let rep = replay_universal(&u).unwrap();
        assert!(rep.pass, "{:?}: {:?}", u, rep.failures);
    }
}
