//! Tree grammars of the three families and their integer counting tables.

use crate::series::labeled::{Binomials, OnlineSet};
use crate::treecodec::NodeType;
use crate::{Error, Family, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Arc;

/// A child slot: a single leaf or a tree of some class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    Z,
    Class(usize),
}

#[derive(Clone, Debug)]
pub enum Ctor {
    /// A set of at least `min` children.
    Set { min: usize, alpha: Vec<Atom> },
    /// One child from `first` plus a set of at least `rest_min` children
    /// from `rest`; with `dist` the first child is the star center.
    Pair {
        first: Vec<Atom>,
        rest_min: usize,
        rest: Vec<Atom>,
        dist: bool,
    },
}

#[derive(Clone, Debug)]
pub struct ClassDef {
    pub name: &'static str,
    pub ty: NodeType,
    pub ctor: Ctor,
}

#[derive(Clone, Debug)]
pub struct Grammar {
    pub classes: Vec<ClassDef>,
    pub roots: Vec<usize>,
    /// The lone leaf counts as a tree of size 1.
    pub root_leaf: bool,
}

use Atom::{Class as C, Z};

impl Grammar {
    pub fn for_family(f: Family) -> Grammar {
        let (k, sc, sx) = (0, 1, 2);
        let set2 = |alpha: Vec<Atom>| Ctor::Set { min: 2, alpha };
        match f {
            Family::Dh | Family::Dh2c => {
                let first = if f == Family::Dh {
                    vec![Z, C(k), C(sc)]
                } else {
                    vec![C(k), C(sc)]
                };
                Grammar {
                    classes: vec![
                        ClassDef {
                            name: "K",
                            ty: NodeType::K,
                            ctor: set2(vec![Z, C(sc), C(sx)]),
                        },
                        ClassDef {
                            name: "SC",
                            ty: NodeType::SC,
                            ctor: set2(vec![Z, C(k), C(sx)]),
                        },
                        ClassDef {
                            name: "SX",
                            ty: NodeType::SX,
                            ctor: Ctor::Pair {
                                first,
                                rest_min: 1,
                                rest: vec![Z, C(k), C(sx)],
                                dist: true,
                            },
                        },
                    ],
                    roots: if f == Family::Dh { vec![k, sc, sx] } else { vec![k, sx] },
                    root_leaf: false,
                }
            }
            Family::Leaf3 => {
                let (lk, sx, sc, ks) = (0, 1, 2, 3);
                Grammar {
                    classes: vec![
                        ClassDef {
                            name: "LK",
                            ty: NodeType::K,
                            ctor: set2(vec![Z]),
                        },
                        ClassDef {
                            name: "SX",
                            ty: NodeType::SX,
                            ctor: Ctor::Pair {
                                first: vec![Z, C(lk)],
                                rest_min: 1,
                                rest: vec![Z, C(lk), C(sx)],
                                dist: true,
                            },
                        },
                        ClassDef {
                            name: "SC",
                            ty: NodeType::SC,
                            ctor: set2(vec![Z, C(lk), C(sx)]),
                        },
                        ClassDef {
                            name: "KS",
                            ty: NodeType::K,
                            ctor: Ctor::Pair {
                                first: vec![C(sx), C(sc)],
                                rest_min: 1,
                                rest: vec![Z],
                                dist: false,
                            },
                        },
                    ],
                    roots: vec![lk, sx, sc, ks],
                    root_leaf: true,
                }
            }
        }
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }
}

/// Labeled counts of every class up to `order`, plus the set-construction
/// tables needed for uniform sampling.
#[derive(Clone, Debug)]
pub struct Tables {
    pub family: Family,
    pub grammar: Grammar,
    order: usize,
    binom: Arc<Binomials>,
    counts: Vec<Vec<BigInt>>,
    /// Per class: alphabet counts of the set part.
    alpha: Vec<Vec<BigInt>>,
    /// Per class: online set over `alpha`.
    sets: Vec<OnlineSet>,
}

impl Tables {
    pub fn new(family: Family, order: usize) -> Self {
        let grammar = Grammar::for_family(family);
        let binom = Arc::new(Binomials::new(order.max(1)));
        let nc = grammar.classes.len();
        let sets = grammar
            .classes
            .iter()
            .map(|c| match &c.ctor {
                Ctor::Set { min, .. } => {
                    assert!(*min >= 2, "set constructors need at least two blocks");
                    OnlineSet::new(*min, order)
                }
                Ctor::Pair { rest_min, .. } => OnlineSet::new(*rest_min, order),
            })
            .collect();
        let mut t = Tables {
            family,
            grammar,
            order,
            binom,
            counts: vec![Vec::with_capacity(order + 1); nc],
            alpha: vec![Vec::with_capacity(order + 1); nc],
            sets,
        };
        for n in 0..=order {
            t.step(n);
        }
        t
    }

    fn atom_at(&self, atoms: &[Atom], n: usize) -> BigInt {
        atoms
            .iter()
            .map(|a| match a {
                Atom::Z => BigInt::from((n == 1) as u8),
                Atom::Class(c) => self.counts[*c][n].clone(),
            })
            .sum()
    }

    fn step(&mut self, n: usize) {
        let b = self.binom.clone();
        let nc = self.grammar.classes.len();
        let mut vals = Vec::with_capacity(nc);
        for c in 0..nc {
            let v = if n == 0 {
                BigInt::zero()
            } else {
                match &self.grammar.classes[c].ctor {
                    Ctor::Set { .. } => self.sets[c].peek_top(&self.alpha[c], n, &b),
                    Ctor::Pair { first, .. } => {
                        let rest = self.sets[c].counts();
                        let mut acc = BigInt::zero();
                        for k in 1..n {
                            if rest[n - k].is_zero() {
                                continue;
                            }
                            let fk = self.atom_at(first, k);
                            if fk.is_zero() {
                                continue;
                            }
                            acc += b.get(n, k) * fk * &rest[n - k];
                        }
                        acc
                    }
                }
            };
            vals.push(v);
        }
        for (c, v) in vals.into_iter().enumerate() {
            self.counts[c].push(v);
        }
        for c in 0..nc {
            let atoms = match &self.grammar.classes[c].ctor {
                Ctor::Set { alpha, .. } => alpha.clone(),
                Ctor::Pair { rest, .. } => rest.clone(),
            };
            let a = self.atom_at(&atoms, n);
            self.alpha[c].push(a);
            self.sets[c].extend(&self.alpha[c], n, &b);
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn binomials(&self) -> &Binomials {
        &self.binom
    }

    pub fn class_counts(&self, c: usize) -> &[BigInt] {
        &self.counts[c]
    }

    pub fn set_table(&self, c: usize) -> &OnlineSet {
        &self.sets[c]
    }

    pub fn alpha_counts(&self, c: usize) -> &[BigInt] {
        &self.alpha[c]
    }

    /// Count of `atoms` at size `n`.
    pub fn atoms_count(&self, atoms: &[Atom], n: usize) -> BigInt {
        self.atom_at(atoms, n)
    }

    /// Number of family trees of size `n`.
    pub fn total(&self, n: usize) -> Result<BigInt> {
        if n > self.order {
            return Err(Error::OrderTooLow {
                requested: n,
                order: self.order,
            });
        }
        let mut t: BigInt = self.grammar.roots.iter().map(|&c| &self.counts[c][n]).sum();
        if self.grammar.root_leaf && n == 1 {
            t += 1;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_two_counts() {
        for (f, expected) in [(Family::Dh, 4), (Family::Dh2c, 1), (Family::Leaf3, 4)] {
            let t = Tables::new(f, 4);
            assert_eq!(t.total(2).unwrap(), BigInt::from(expected), "{f}");
        }
        let dh = Tables::new(Family::Dh, 2);
        let per_class: Vec<_> = (0..3).map(|c| dh.class_counts(c)[2].clone()).collect();
        assert_eq!(per_class, vec![1.into(), 1.into(), 2.into()]);
    }

    #[test]
    fn k_and_sc_counts_coincide() {
        for f in [Family::Dh, Family::Dh2c] {
            let t = Tables::new(f, 25);
            assert_eq!(t.class_counts(0), t.class_counts(1));
        }
    }

    #[test]
    fn order_is_enforced() {
        let t = Tables::new(Family::Dh, 5);
        assert!(matches!(t.total(6), Err(Error::OrderTooLow { .. })));
    }
}
