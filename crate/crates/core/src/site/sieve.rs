use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, MorId, ObjId};

/// Sieves are stored as bit sets over morphism ids, so a site's base may have
/// at most this many morphisms.
pub const MAX_SITE_MORPHISMS: usize = 64;

/// Number of distinct sieves on one object past which enumeration stops.
pub const SIEVE_CAP: usize = 1 << 14;

/// A set of arrows into `target` closed under precomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Sieve {
    pub target: ObjId,
    pub bits: u64,
}

impl Sieve {
    pub fn contains(&self, f: MorId) -> bool {
        self.bits >> f.0 & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn arrows(&self) -> Vec<MorId> {
        bits_iter(self.bits).map(MorId).collect()
    }

    pub fn is_subset(&self, other: &Sieve) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn describe(&self, c: &FinCategory) -> Vec<String> {
        self.arrows()
            .into_iter()
            .map(|f| c.morphism_name(f).to_string())
            .collect()
    }
}

pub(crate) fn bits_iter(bits: u64) -> impl Iterator<Item = usize> {
    let mut b = bits;
    std::iter::from_fn(move || {
        if b == 0 {
            return None;
        }
        let i = b.trailing_zeros() as usize;
        b &= b - 1;
        Some(i)
    })
}

pub(crate) fn check_base(c: &FinCategory) -> Result<()> {
    if c.num_morphisms() > MAX_SITE_MORPHISMS {
        return Err(Error::budget(
            format!("representing sieves on `{}`", c.name()),
            MAX_SITE_MORPHISMS,
        ));
    }
    Ok(())
}

pub fn maximal_sieve(c: &FinCategory, x: ObjId) -> Sieve {
    Sieve {
        target: x,
        bits: c.arrows_into(x).iter().fold(0, |acc, f| acc | 1 << f.0),
    }
}

/// The sieve generated by a family of arrows into `x`.
pub fn generated_sieve(c: &FinCategory, x: ObjId, family: &[MorId]) -> Sieve {
    let mut bits = 0u64;
    for &f in family {
        debug_assert_eq!(c.tgt(f), x);
        for g in c.arrows_into(c.src(f)) {
            bits |= 1 << c.comp(f, g).0;
        }
    }
    Sieve { target: x, bits }
}

/// `f*S = {g | f ∘ g ∈ S}` for `f: Y → X`.
pub fn pullback_sieve(c: &FinCategory, s: &Sieve, f: MorId) -> Sieve {
    debug_assert_eq!(c.tgt(f), s.target);
    let y = c.src(f);
    let bits = c
        .arrows_into(y)
        .iter()
        .filter(|g| s.contains(c.comp(f, **g)))
        .fold(0, |acc, g| acc | 1 << g.0);
    Sieve { target: y, bits }
}

pub fn is_sieve(c: &FinCategory, s: &Sieve) -> bool {
    s.arrows().iter().all(|&f| {
        c.tgt(f) == s.target
            && c.arrows_into(c.src(f))
                .iter()
                .all(|g| s.contains(c.comp(f, *g)))
    })
}

/// Every sieve on `x`, in ascending bit order.
pub fn all_sieves(c: &FinCategory, x: ObjId) -> Result<Vec<Sieve>> {
    let principal: Vec<u64> = c
        .arrows_into(x)
        .iter()
        .map(|f| generated_sieve(c, x, &[*f]).bits)
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![0u64];
    seen.insert(0u64);
    while let Some(s) = stack.pop() {
        for p in &principal {
            let t = s | p;
            if seen.insert(t) {
                if seen.len() > SIEVE_CAP {
                    return Err(Error::budget(
                        format!("enumerating sieves on `{}`", c.object_name(x)),
                        SIEVE_CAP,
                    ));
                }
                stack.push(t);
            }
        }
    }
    Ok(seen
        .into_iter()
        .map(|bits| Sieve { target: x, bits })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieves_on_the_top_of_a_chain() {
        let c = FinCategory::chain(3);
        let top = ObjId(2);
        let all = all_sieves(&c, top).unwrap();
        // down-sets of a 3-chain
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|s| is_sieve(&c, s)));
        assert_eq!(all.last().unwrap().bits, maximal_sieve(&c, top).bits);
    }

    #[test]
    fn pullback_of_maximal_is_maximal() {
        let c = FinCategory::parallel_pair();
        let top = ObjId(1);
        let max = maximal_sieve(&c, top);
        for f in c.arrows_into(top) {
            assert_eq!(pullback_sieve(&c, &max, f), maximal_sieve(&c, c.src(f)));
        }
    }

    #[test]
    fn generated_sieve_is_closed() {
        let z2 = FinCategory::monoid("z2", &["e", "s"], &[vec![0, 1], vec![1, 0]]).unwrap();
        let s = generated_sieve(&z2, ObjId(0), &[MorId(1)]);
        assert_eq!(s.len(), 2);
        assert!(is_sieve(&z2, &s));
    }
}
