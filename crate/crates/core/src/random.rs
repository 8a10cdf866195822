//! Seeded random structures and homomorphisms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::homs::{HomSearch, Map};
use crate::structure::{ElemId, RelStructure, Signature};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Signature `R1..Rk`, all binary.
pub fn binary_signature(k: usize) -> Signature {
    Signature::new((1..=k).map(|i| (format!("R{i}"), 2))).expect("nonempty binary signature")
}

/// Every tuple over `0..n` of each symbol is present with probability
/// `density`. Elements are named `0..n-1`.
pub fn random_structure<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    n: usize,
    density: f64,
) -> RelStructure {
    let rels = sig
        .symbols()
        .iter()
        .map(|s| {
            let mut out = Vec::new();
            let mut t = vec![0; s.arity];
            loop {
                if rng.gen_bool(density) {
                    out.push(t.clone());
                }
                // odometer over n^arity
                let mut i = s.arity;
                loop {
                    if i == 0 {
                        return out;
                    }
                    i -= 1;
                    t[i] += 1;
                    if t[i] < n {
                        break;
                    }
                    t[i] = 0;
                }
            }
        })
        .collect();
    RelStructure::new(sig.clone(), (0..n).map(|i| i.to_string()).collect(), rels)
        .expect("valid random structure")
}

/// A random subset of `0..n`, each element kept with probability one half.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ElemId> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// A uniformly random permutation of `0..n`.
pub fn random_order<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ElemId> {
    let mut v: Vec<ElemId> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// A homomorphism found by searching with a random variable order and
/// random value preferences, or `None` when there is none.
pub fn random_hom<R: Rng + ?Sized>(rng: &mut R, g: &RelStructure, h: &RelStructure) -> Option<Map> {
    let s = HomSearch::new(g, h).ok()?;
    // Pin elements one at a time to random values that still extend.
    let mut fixed: Vec<Option<ElemId>> = vec![None; g.len()];
    for x in random_order(rng, g.len()) {
        let mut values: Vec<ElemId> = h.elements().filter(|&a| s.allows(x, a)).collect();
        values.shuffle(rng);
        let mut placed = false;
        for a in values {
            fixed[x] = Some(a);
            if s.first_with(&fixed).is_some() {
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    Some(fixed.into_iter().map(|a| a.expect("all pinned")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homs::is_homomorphism;

    #[test]
    fn seeded_structures_repeat() {
        let sig = binary_signature(2);
        let a = random_structure(&mut rng(7), &sig, 4, 0.5);
        let b = random_structure(&mut rng(7), &sig, 4, 0.5);
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn random_homs_are_homs() {
        let sig = binary_signature(1);
        let mut r = rng(3);
        for _ in 0..30 {
            let g = random_structure(&mut r, &sig, 4, 0.3);
            let h = random_structure(&mut r, &sig, 3, 0.6);
            if let Some(m) = random_hom(&mut r, &g, &h) {
                assert!(is_homomorphism(&g, &h, &m));
            } else {
                assert!(HomSearch::new(&g, &h).unwrap().first().is_none());
            }
        }
    }
}
