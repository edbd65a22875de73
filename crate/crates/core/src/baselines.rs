//! The two comparison models: the sum of the definition's word vectors,
//! and the vector of the nearest hypernym that has one.

use crate::embed_store::{EmbeddingTable, VectorError};
use crate::wordnet::{Pos, WordNetError, WordNetGraph};

pub fn additive(vec_h: &[f32], vec_m: &[f32]) -> Result<Vec<f32>, VectorError> {
    if vec_h.len() != vec_m.len() {
        return Err(VectorError::LengthMismatch(vec_h.len(), vec_m.len()));
    }
    Ok(vec_h.iter().zip(vec_m).map(|(a, b)| a + b).collect())
}

/// Vector of the most specific in-vocabulary hypernym of the first sense
/// of `word`. Always a copy of a table row.
pub fn head_baseline(
    g: &WordNetGraph,
    table: &EmbeddingTable,
    word: &str,
    pos: Pos,
) -> Result<Vec<f32>, WordNetError> {
    g.first_iv_hypernym(word, pos, table).map(|(_, v)| v.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn additive_examples() {
        assert_eq!(additive(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![4.0, 6.0]);
        assert_eq!(additive(&[1.5, -2.0], &[0.0, 0.0]).unwrap(), vec![1.5, -2.0]);
        assert_eq!(additive(&[1.5, -2.0], &[-1.5, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(
            additive(&[1.0], &[1.0, 2.0]),
            Err(VectorError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn head_walks_past_oov_parents() {
        let g = crate::wordnet::toy::graph();
        let mut t = EmbeddingTable::new("t", 2).unwrap();
        t.insert("root", &[1.0, 0.0]).unwrap();
        assert_eq!(head_baseline(&g, &t, "a1", Pos::Noun).unwrap(), vec![1.0, 0.0]);
        t.insert("a", &[0.0, 1.0]).unwrap();
        assert_eq!(head_baseline(&g, &t, "a1", Pos::Noun).unwrap(), vec![0.0, 1.0]);
        assert!(matches!(
            head_baseline(&g, &t, "root", Pos::Noun),
            Err(WordNetError::NoIvHypernym { .. })
        ));
    }

    fn ints(n: usize) -> impl Strategy<Value = Vec<f32>> {
        prop::collection::vec((-1000i32..1000).prop_map(|x| x as f32), n)
    }

    proptest! {
        #[test]
        fn additive_commutes_and_associates(a in ints(5), b in ints(5), c in ints(5)) {
            prop_assert_eq!(additive(&a, &b).unwrap(), additive(&b, &a).unwrap());
            let left = additive(&additive(&a, &b).unwrap(), &c).unwrap();
            let right = additive(&a, &additive(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
