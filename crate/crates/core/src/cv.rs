//! Seeded stratified k-fold assignment keyed on row identity.
//!
//! A row's fold depends on its key (row id), its stratum and the seed, never on
//! its position, so shuffling rows or dropping unrelated rows of other strata
//! leaves assignments intact.

use crate::{Error, Result};

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic hash of `(seed, stream, key)`.
pub fn keyed_hash(seed: u64, stream: u64, key: u64) -> u64 {
    mix64(mix64(mix64(seed) ^ stream) ^ key)
}

/// Deterministic uniform in `[0, 1)` derived from `(seed, stream, key)`.
pub fn keyed_uniform(seed: u64, stream: u64, key: u64) -> f64 {
    (keyed_hash(seed, stream, key) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

const FOLD_STREAM: u64 = 0xF01D;

/// Fold index for every position.
///
/// Rows are grouped by stratum, shuffled within each stratum by a keyed hash,
/// and dealt round-robin across folds. Strata are dealt largest first (ties by
/// stratum value), continuing the rotation, so fold sizes differ by at most one.
pub fn stratified_folds(keys: &[u64], strata: &[u8], k: usize, seed: u64) -> Result<Vec<usize>> {
    if keys.len() != strata.len() {
        return Err(Error::Contract("keys and strata must align".into()));
    }
    if k < 2 {
        return Err(Error::Contract(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > keys.len() {
        return Err(Error::Contract(format!(
            "k = {k} exceeds the {} available rows",
            keys.len()
        )));
    }
    let mut groups: Vec<(u8, Vec<usize>)> = Vec::new();
    for (pos, &s) in strata.iter().enumerate() {
        match groups.iter_mut().find(|(v, _)| *v == s) {
            Some((_, g)) => g.push(pos),
            None => groups.push((s, vec![pos])),
        }
    }
    groups.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));

    let mut folds = vec![0usize; keys.len()];
    let mut next = 0usize;
    for (_, mut members) in groups {
        members.sort_by_key(|&p| (keyed_hash(seed, FOLD_STREAM, keys[p]), keys[p]));
        for p in members {
            folds[p] = next % k;
            next += 1;
        }
    }
    Ok(folds)
}

/// Positions grouped by fold.
pub fn group_by_fold(folds: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (pos, &f) in folds.iter().enumerate() {
        out[f].push(pos);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ten_rows_five_folds() {
        let keys: Vec<u64> = (0..10).collect();
        let strata = [0, 0, 0, 1, 1, 1, 1, 1, 1, 1];
        let folds = stratified_folds(&keys, &strata, 5, 42).unwrap();
        let groups = group_by_fold(&folds, 5);
        assert!(groups.iter().all(|g| g.len() == 2));
    }

    #[test]
    fn rejects_bad_k() {
        assert!(stratified_folds(&[1, 2], &[0, 1], 1, 0).is_err());
        assert!(stratified_folds(&[1, 2], &[0, 1], 3, 0).is_err());
    }

    proptest! {
        #[test]
        fn position_independent(n in 5usize..200, k in 2usize..5, seed in any::<u64>(), rot in 0usize..200) {
            let keys: Vec<u64> = (0..n as u64).map(|i| i * 7 + 3).collect();
            let strata: Vec<u8> = keys.iter().map(|k| (mix64(*k) % 3 == 0) as u8).collect();
            let folds = stratified_folds(&keys, &strata, k, seed).unwrap();
            let r = rot % n;
            let mut keys2 = keys.clone();
            let mut strata2 = strata.clone();
            keys2.rotate_left(r);
            strata2.rotate_left(r);
            let folds2 = stratified_folds(&keys2, &strata2, k, seed).unwrap();
            for i in 0..n {
                prop_assert_eq!(folds[(i + r) % n], folds2[i]);
            }
            let sizes: Vec<usize> = group_by_fold(&folds, k).iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }
}
