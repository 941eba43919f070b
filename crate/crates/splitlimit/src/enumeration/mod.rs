//! Exact labeled counting for the three families, and brute-force oracles
//! for small sizes.

pub mod brute;
pub mod grammar;
pub mod graphs;
pub mod identities;
pub mod marked;
pub mod marked_brute;
pub mod mpoly;
pub mod skeleton;

pub use brute::{brute_force_count, brute_force_trees, in_family};
pub use grammar::{Grammar, Tables};
pub use identities::{verify_identities, verify_identities_with, Check, IdentityReport};

use crate::{Error, Family, Result};
use num_bigint::BigInt;

/// Number of labeled trees of size `n` in the family.
pub fn count_trees(f: Family, n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Invalid("size must be at least 1".into()));
    }
    Tables::new(f, n).total(n)
}

/// Counts for every size `1..=order` from a single table.
pub fn count_trees_upto(f: Family, order: usize) -> Vec<BigInt> {
    let t = Tables::new(f, order);
    (1..=order).map(|n| t.total(n).expect("within order")).collect()
}

/// Number of labeled graphs of the family on `m ≥ 3` vertices.
pub fn count_graphs(f: Family, m: usize) -> Result<BigInt> {
    if m < 3 {
        return Err(Error::TooSmall(m));
    }
    count_trees(f, m - 1)
}

/// Rows `family,n,tree_count,graph_count` for sizes `1..=order`; the graph
/// count (graphs on `n` vertices) is empty for `n < 3`.
pub fn counts_csv(families: &[Family], order: usize) -> String {
    let mut out = String::from("family,n,tree_count,graph_count\n");
    for &f in families {
        let trees = count_trees_upto(f, order);
        for n in 1..=order {
            let graphs = if n >= 3 { trees[n - 2].to_string() } else { String::new() };
            out.push_str(&format!("{},{},{},{}\n", f, n, trees[n - 1], graphs));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(count_trees(Family::Dh, 2).unwrap(), 4.into());
        assert_eq!(count_trees(Family::Dh2c, 2).unwrap(), 1.into());
        assert_eq!(count_trees(Family::Leaf3, 2).unwrap(), 4.into());
        assert_eq!(count_graphs(Family::Dh, 3).unwrap(), 4.into());
        assert_eq!(count_graphs(Family::Dh2c, 3).unwrap(), 1.into());
        assert!(matches!(count_graphs(Family::Dh, 2), Err(Error::TooSmall(2))));
        assert!(count_trees(Family::Dh, 0).is_err());
    }

    #[test]
    fn tables_match_brute_force_up_to_five() {
        for f in Family::ALL {
            let counts = count_trees_upto(f, 5);
            for n in 1..=5 {
                assert_eq!(counts[n - 1], BigInt::from(brute_force_count(f, n)), "{f} n={n}");
            }
        }
    }
}
