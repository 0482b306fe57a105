//! Seeded generators for random linking matrices and test corpora.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::intlinalg::{IntMatrix, IntSymMatrix};

/// Symmetric `m×m` matrix with entries uniform in `[-bound, bound]`.
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, m: usize, bound: i64) -> IntSymMatrix {
    let mut a = IntMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let x = BigInt::from(rng.gen_range(-bound..=bound));
            a[(i, j)] = x.clone();
            a[(j, i)] = x;
        }
    }
    IntSymMatrix::new(a).expect("symmetric by construction")
}

/// Product of `steps` random elementary matrices `I ± E_ij`.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, m: usize, steps: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(m);
    if m < 2 {
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..m);
        let j = (i + rng.gen_range(1..m)) % m;
        let f = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        u.add_row(i, j, &f);
    }
    u
}

/// `Uᵀ (L_reg ⊕ 0_ν) U` for a random unimodular `U`.
pub fn degenerate_from<R: Rng + ?Sized>(
    rng: &mut R,
    l_reg: &IntSymMatrix,
    nullity: usize,
) -> IntSymMatrix {
    let m = l_reg.dim() + nullity;
    let padded =
        l_reg.direct_sum(&IntSymMatrix::new(IntMatrix::zeros(nullity, nullity)).expect("zero"));
    let u = random_unimodular(rng, m, 2 * m);
    padded.congruence(&u)
}

/// Random nondegenerate symmetric matrix.
pub fn random_nondegenerate<R: Rng + ?Sized>(rng: &mut R, m: usize, bound: i64) -> IntSymMatrix {
    loop {
        let l = random_symmetric(rng, m, bound);
        if !l.det().is_zero() {
            return l;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    #[serde(rename = "L")]
    pub l: IntSymMatrix,
    pub k: u64,
}

/// Even levels used by the random corpora.
pub const CORPUS_LEVELS: [u64; 4] = [2, 4, 6, 8];

/// `count` random `(L, k)` pairs: `m ∈ 1..=4`, entries in `[-4, 4]`, `k ∈ {2,4,6,8}`.
pub fn random_entries(seed: u64, count: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=4);
            let k = CORPUS_LEVELS[rng.gen_range(0..CORPUS_LEVELS.len())];
            CorpusEntry {
                l: random_symmetric(&mut rng, m, 4),
                k,
            }
        })
        .collect()
}
