use proptest::prelude::*;
use qhi_core::word::{
    cyclic_normalize, decompose, word_to_matrix, IntMatrix2x2, Letter, MappingClassWord,
};

fn word_strategy(max_len: usize) -> impl Strategy<Value = MappingClassWord> {
    prop::collection::vec(prop::bool::ANY, 2..=max_len)
        .prop_filter("needs both letters", |bits| {
            bits.iter().any(|&b| b) && bits.iter().any(|&b| !b)
        })
        .prop_map(|bits| {
            let letters = bits
                .into_iter()
                .map(|b| if b { Letter::L } else { Letter::R })
                .collect();
            MappingClassWord::new(letters).unwrap()
        })
}

/// A product of `R^{±1}` and `L^{±1}`.
fn sl2z_strategy() -> impl Strategy<Value = IntMatrix2x2> {
    prop::collection::vec(0..4u8, 0..6).prop_map(|choices| {
        let gens = [
            IntMatrix2x2::new(1, 1, 0, 1).unwrap(),
            IntMatrix2x2::new(1, -1, 0, 1).unwrap(),
            IntMatrix2x2::new(1, 0, 1, 1).unwrap(),
            IntMatrix2x2::new(1, 0, -1, 1).unwrap(),
        ];
        choices
            .into_iter()
            .fold(IntMatrix2x2::new(1, 0, 0, 1).unwrap(), |acc, c| {
                acc.checked_mul(&gens[c as usize]).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn normal_form_is_idempotent_and_rotation_invariant(w in word_strategy(16), k in 0usize..16) {
        let normal = cyclic_normalize(&w);
        prop_assert_eq!(&cyclic_normalize(&normal), &normal);
        prop_assert_eq!(&cyclic_normalize(&w.rotate(k % w.len())), &normal);
    }

    #[test]
    fn decompose_recovers_the_normal_form(w in word_strategy(14)) {
        let m = word_to_matrix(&w).unwrap();
        prop_assert_eq!(decompose(&m).unwrap(), cyclic_normalize(&w));
    }

    #[test]
    fn decompose_is_a_conjugacy_invariant(w in word_strategy(8), p in sl2z_strategy()) {
        let m = word_to_matrix(&w).unwrap();
        let conj = p.checked_mul(&m).unwrap().checked_mul(&p.inverse()).unwrap();
        prop_assert_eq!(decompose(&conj).unwrap(), decompose(&m).unwrap());
    }

    #[test]
    fn negated_matrix_gives_the_same_word(w in word_strategy(10)) {
        let m = word_to_matrix(&w).unwrap();
        prop_assert_eq!(decompose(&m.neg()).unwrap(), decompose(&m).unwrap());
    }
}
