use rand::Rng;

use crate::freegroup::Word;

/// Uniformly random freely reduced word of exactly `len` letters.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, rank: u32, len: usize) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.gen_range(1..=rank as i32);
        let l = if rng.gen_bool(0.5) { g } else { -g };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    Word::reduce(rank, &letters).expect("letters in range")
}
