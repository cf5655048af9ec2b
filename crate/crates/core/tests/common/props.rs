//! SF and mitigation property checks shared by the property suite and the
//! acceptance run.

use coevo::mitigation::{rv_transform, sf_apply, sf_kappa, AvaState, Mitigation};
use coevo::{compute_delta, AvaConfig, Individual, Population, Role, Strategy as Mitigate};
use proptest::prelude::*;

pub type Scores = Vec<f64>;

pub fn members(psi: &[f64], tag: usize) -> Vec<Individual<usize>> {
    psi.iter()
        .enumerate()
        .map(|(i, &p)| Individual {
            genome: tag + i,
            objective: 0.0,
            psi: p,
        })
        .collect()
}

/// Subjective scores as produced by S sampled contests: multiples of 1/S.
pub fn scores(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Scores> {
    (1usize..=10).prop_flat_map(move |s| {
        prop::collection::vec((0..=s).prop_map(move |k| k as f64 / s as f64), n.clone())
    })
}

/// Two same-size populations, a positive delta and a kappa fraction.
pub fn sf_case() -> impl Strategy<Value = ((Scores, Scores), f64, f64)> {
    (
        (1usize..=30).prop_flat_map(|n| (scores(n..=n), scores(n..=n))),
        0.001f64..=1.0,
        0.0f64..=1.0,
    )
}

/// A short history of host and parasite scores, eight members each.
pub fn trigger_case() -> impl Strategy<Value = Vec<(Scores, Scores)>> {
    prop::collection::vec((scores(8..=8), scores(8..=8)), 1..12)
}

pub fn kappa_case() -> impl Strategy<Value = (usize, f64)> {
    (1usize..=600, 0.0f64..=1.0)
}

/// Reference substitution: rank ascending by (psi, index) on a snapshot and
/// copy the i-th best over the i-th worst (or the reverse).
fn substitute_ref(
    pop: &[Individual<usize>],
    kappa: usize,
    best_over_worst: bool,
) -> Vec<Individual<usize>> {
    let n = pop.len();
    let mut asc: Vec<usize> = (0..n).collect();
    asc.sort_by(|&a, &b| pop[a].psi.partial_cmp(&pop[b].psi).unwrap().then(a.cmp(&b)));
    let mut out = pop.to_vec();
    for i in 0..kappa.min(n) {
        let (worst, best) = (asc[i], asc[n - 1 - i]);
        if best_over_worst {
            out[worst] = pop[best].clone();
        } else {
            out[best] = pop[worst].clone();
        }
    }
    out
}

fn argmax(psi: &[f64]) -> Vec<usize> {
    let m = psi.iter().cloned().fold(f64::MIN, f64::max);
    (0..psi.len()).filter(|&i| psi[i] == m).collect()
}

/// Checks that `after` orders individuals like `before`, allowing ties
/// only where the shifted value was clipped to `bound`.
fn rank_preserved(before: &[f64], after: &[f64], bound: f64) -> Result<(), TestCaseError> {
    for i in 0..before.len() {
        for j in 0..before.len() {
            if before[i] < before[j] {
                prop_assert!(after[i] <= after[j]);
                if after[i] == after[j] {
                    prop_assert_eq!(after[i], bound);
                }
            }
        }
    }
    let pre = argmax(before);
    let post = argmax(after);
    prop_assert!(pre.iter().all(|i| post.contains(i)));
    Ok(())
}

/// Substitution follows the snapshot ranking and the shift keeps rank order
/// up to clipping ties.
pub fn sf_substitution(
    low: &[f64],
    high: &[f64],
    delta: f64,
    kappa_frac: f64,
) -> Result<(), TestCaseError> {
    let n = low.len();
    let kappa = (kappa_frac * n as f64).round() as usize;
    let mut l = members(low, 0);
    let mut h = members(high, 1000);
    let l_sub = substitute_ref(&l, kappa, true);
    let h_sub = substitute_ref(&h, kappa, false);
    sf_apply(&mut l, &mut h, delta, kappa);

    let l_pre: Vec<f64> = l_sub.iter().map(|m| m.psi).collect();
    let h_pre: Vec<f64> = h_sub.iter().map(|m| m.psi).collect();
    let l_post: Vec<f64> = l.iter().map(|m| m.psi).collect();
    let h_post: Vec<f64> = h.iter().map(|m| m.psi).collect();
    for (i, m) in l.iter().enumerate() {
        prop_assert_eq!(m.genome, l_sub[i].genome);
        prop_assert!((m.psi - (l_pre[i] + delta).min(1.0)).abs() < 1e-12);
    }
    for (i, m) in h.iter().enumerate() {
        prop_assert_eq!(m.genome, h_sub[i].genome);
        prop_assert!((m.psi - (h_pre[i] - delta).max(0.0)).abs() < 1e-12);
    }
    rank_preserved(&l_pre, &l_post, 1.0)?;
    rank_preserved(&h_pre, &h_post, 0.0)
}

/// SF acts in a generation exactly when the raw delta exceeds the previous one.
pub fn sf_trigger(gens: &[(Scores, Scores)]) -> Result<(), TestCaseError> {
    let mut m = Mitigation::new(Mitigate::Sf).unwrap();
    let mut prev = 0.0;
    for (t, (hs, ps)) in gens.iter().enumerate() {
        let mut host = Population::new(Role::Host, members(hs, 0));
        let mut para = Population::new(Role::Parasite, members(ps, 100));
        let delta = compute_delta(host.sigma(), para.sigma());
        let report = m.apply(&mut host, &mut para, t);
        if delta > prev {
            prop_assert_eq!(report.kappa, sf_kappa(8, delta));
            prop_assert!(report.kappa >= 1);
        } else {
            prop_assert_eq!(report.kappa, 0);
            let h: Vec<f64> = host.members().iter().map(|x| x.psi).collect();
            let p: Vec<f64> = para.members().iter().map(|x| x.psi).collect();
            prop_assert_eq!(&h, hs);
            prop_assert_eq!(&p, ps);
        }
        prev = delta;
    }
    Ok(())
}

pub fn kappa_formula(n: usize, delta: f64) -> Result<(), TestCaseError> {
    // The exact ceiling of a positive real is at least 1, even where the
    // power underflows in floating point.
    let x = n as f64 * delta.powf(1.0 / delta);
    let want = if delta == 0.0 {
        0
    } else if x == 0.0 {
        1
    } else {
        x.ceil() as usize
    };
    let got = sf_kappa(n, delta);
    prop_assert_eq!(got, want);
    prop_assert!(got <= n);
    if delta > 0.0 {
        prop_assert!(got >= 1);
    }
    Ok(())
}

pub fn kappa_monotone(n: usize, a: f64, b: f64) -> Result<(), TestCaseError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    prop_assert!(sf_kappa(n, lo) <= sf_kappa(n, hi));
    Ok(())
}

pub fn full_kappa_keeps_genomes(psi: &[f64], delta: f64) -> Result<(), TestCaseError> {
    let n = psi.len();
    let mut low = members(psi, 0);
    let mut high = members(psi, 0);
    sf_apply(&mut low, &mut high, delta, n);
    let mut a: Vec<usize> = low.iter().map(|m| m.genome).collect();
    let mut b: Vec<usize> = high.iter().map(|m| m.genome).collect();
    a.sort_unstable();
    b.sort_unstable();
    let orig: Vec<usize> = (0..n).collect();
    prop_assert_eq!(a, orig.clone());
    prop_assert_eq!(b, orig);
    Ok(())
}

pub fn ava_in_bounds(means: &[f64], cfg: AvaConfig) -> Result<(), TestCaseError> {
    let mut s = AvaState::new(&cfg);
    for (t, &x) in means.iter().enumerate() {
        s.update(x, t + 1);
        prop_assert!((0.5..=1.0).contains(&s.virulence));
    }
    Ok(())
}

pub fn rv_rises_to_one(v: f64, a: f64, b: f64) -> Result<(), TestCaseError> {
    let (x1, x2) = (a.min(b) * v, a.max(b) * v);
    let (f1, f2) = (rv_transform(x1, v).unwrap(), rv_transform(x2, v).unwrap());
    prop_assert!(f1 <= f2);
    if x1 < x2 {
        prop_assert!(f1 < f2 || f2 == 1.0);
    }
    prop_assert!((rv_transform(v, v).unwrap() - 1.0).abs() < 1e-12);
    prop_assert!((0.0..=1.0).contains(&rv_transform(a, v).unwrap()));
    Ok(())
}

pub fn delta_symmetric(a: f64, b: f64) -> Result<(), TestCaseError> {
    let d = compute_delta(a, b);
    prop_assert_eq!(d, compute_delta(b, a));
    prop_assert!((0.0..=1.0).contains(&d));
    Ok(())
}
