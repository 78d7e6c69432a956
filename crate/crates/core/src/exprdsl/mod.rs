//! Elementary-type constructions of maximal pro-2 Galois groups.
//!
//! An [`Expr`] is built from three kinds of basic blocks (free pro-2 groups,
//! `Z/2Z` and 2-Demushkin groups) with two operations: the free pro-2 product
//! and the cyclotomic semidirect product `Z₂^m ⋊ G`, written `GR(m, G)`.
//!
//! Text syntax:
//!
//! ```text
//! expr   := factor {"*" factor}
//! factor := "C2" | "F" "(" INT ["," BITS] ")" | "D" "(" INT ";" ROWS ";" BITS ")"
//!         | "Q2" | "Qp" "(" INT ")" | "GR" "(" INT "," expr ")" | "(" expr ")" | "1"
//! ```
//!
//! `1` denotes the trivial group (a quadratically closed field). It only shows
//! up as the result of extending a real-closed block, and disappears under
//! canonicalization unless it is the whole expression.

mod builtins;
mod enumerate;
mod parse;

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Subspace, MAX_DIM};

pub use builtins::{kula, q2, qp, quasi_pythagorean};
pub use enumerate::{canonical_expressions, demushkin_catalog, enumerate, EnumeratedExpr};
pub use parse::parse;

/// Largest `d_max` accepted by [`enumerate`].
pub const MAX_ENUMERATION_DIM: usize = 5;

/// A 2-Demushkin block: a nondegenerate symmetric pairing into `F₂` together
/// with the class of `-1`.
///
/// Construction validates symmetry, nondegeneracy and the diagonal law
/// `q(x, x) = q(e, x)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DemushkinAtom {
    rows: Vec<BitVec>,
    e: BitVec,
}

impl DemushkinAtom {
    pub fn new(rows: Vec<BitVec>, e: BitVec) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Invalid("Demushkin block needs at least one generator".into()));
        }
        if n > MAX_DIM {
            return Err(Error::DimensionCap { dim: n, cap: MAX_DIM });
        }
        for (i, r) in rows.iter().enumerate() {
            if r.width() != n {
                return Err(Error::Invalid(format!(
                    "Demushkin gram row {i} has {} entries, expected {n}",
                    r.width()
                )));
            }
        }
        if e.width() != n {
            return Err(Error::Invalid(format!(
                "class of -1 has {} coordinates, expected {n}",
                e.width()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if rows[i].get(j) != rows[j].get(i) {
                    return Err(Error::Invalid(format!(
                        "Demushkin gram is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if Subspace::span(n, &rows)?.dim() != n {
            return Err(Error::Invalid("Demushkin gram is degenerate".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            let column_dot_e = (0..n).filter(|&k| e.get(k) && rows[k].get(i)).count() % 2 == 1;
            if r.get(i) != column_dot_e {
                return Err(Error::Invalid(format!(
                    "diagonal law q(x,x) = q(-1,x) fails for generator {i}"
                )));
            }
        }
        Ok(DemushkinAtom { rows, e })
    }

    /// Representative of the isomorphism class with `n` generators.
    ///
    /// Over `F₂` a nondegenerate symmetric form is classified by its dimension
    /// and whether it is alternating; alternating forces `n` even and `e = 0`.
    /// The representatives are `H^{n/2}` (alternating), `⟨1⟩ ⊥ H^{(n-1)/2}`
    /// (odd) and `[[0,1],[1,1]] ⊥ H^{(n-2)/2}` (even, non-alternating), where
    /// `H` is the hyperbolic plane. The non-alternating ones have `e = (1,0,…,0)`.
    pub fn canonical(n: usize, alternating: bool) -> Result<Self> {
        if n == 0 || (alternating && n % 2 == 1) {
            return Err(Error::Invalid(format!(
                "no {} Demushkin block with {n} generators",
                if alternating { "alternating" } else { "non-alternating" }
            )));
        }
        let mut rows = vec![BitVec::zero(n); n];
        let mut e = BitVec::zero(n);
        let mut start = 0;
        if !alternating {
            e.set(0, true);
            if n % 2 == 1 {
                rows[0].set(0, true);
                start = 1;
            } else {
                rows[0].set(1, true);
                rows[1].set(0, true);
                rows[1].set(1, true);
                start = 2;
            }
        }
        for i in (start..n).step_by(2) {
            rows[i].set(i + 1, true);
            rows[i + 1].set(i, true);
        }
        DemushkinAtom::new(rows, e)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn e(&self) -> BitVec {
        self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn is_alternating(&self) -> bool {
        self.e.is_zero()
    }
}

/// Syntax tree of an elementary-type construction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    /// The trivial group.
    Trivial,
    /// Free pro-2 group of the given rank; `e` is the class of `-1`.
    Free { rank: usize, e: BitVec },
    /// `Z/2Z`, the group of a real-closed field.
    C2,
    Demushkin(DemushkinAtom),
    /// `Z₂^m ⋊ base` with the cyclotomic action.
    GroupRing { m: usize, base: Box<Expr> },
    FreeProd(Vec<Expr>),
}

/// Total order on canonical expressions: node kind, then `d`, then the text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CanonicalKey {
    kind: u8,
    d: usize,
    text: String,
}

impl Expr {
    pub fn free(rank: usize) -> Expr {
        Expr::Free {
            rank,
            e: BitVec::zero(rank),
        }
    }

    pub fn group_ring(m: usize, base: Expr) -> Expr {
        Expr::GroupRing {
            m,
            base: Box::new(base),
        }
    }

    /// Minimal number of generators, i.e. the dimension of the square-class space.
    pub fn d(&self) -> usize {
        match self {
            Expr::Trivial => 0,
            Expr::Free { rank, .. } => *rank,
            Expr::C2 => 1,
            Expr::Demushkin(atom) => atom.n(),
            Expr::GroupRing { m, base } => m + base.d(),
            Expr::FreeProd(fs) => fs.iter().map(Expr::d).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Expr::Trivial | Expr::C2 | Expr::Demushkin(_) => {}
            Expr::Free { rank, e } => {
                if *rank == 0 {
                    return Err(Error::Invalid("free block of rank 0".into()));
                }
                if e.width() != *rank {
                    return Err(Error::Invalid(format!(
                        "free block of rank {rank} with a {}-coordinate class of -1",
                        e.width()
                    )));
                }
            }
            Expr::GroupRing { m, base } => {
                if *m == 0 {
                    return Err(Error::Invalid("GR needs m >= 1".into()));
                }
                base.validate()?;
            }
            Expr::FreeProd(fs) => {
                if fs.len() < 2 {
                    return Err(Error::Invalid("free product needs at least two factors".into()));
                }
                for f in fs {
                    f.validate()?;
                }
            }
        }
        if self.d() > MAX_DIM {
            return Err(Error::DimensionCap {
                dim: self.d(),
                cap: MAX_DIM,
            });
        }
        Ok(())
    }

    /// Top-level factors with nested products expanded, in order.
    pub fn factors(&self) -> Vec<Expr> {
        match self {
            Expr::FreeProd(fs) => fs.iter().flat_map(Expr::factors).collect(),
            other => vec![other.clone()],
        }
    }

    fn kind(&self) -> u8 {
        match self {
            Expr::Trivial => 0,
            Expr::Free { .. } => 1,
            Expr::C2 => 2,
            Expr::Demushkin(_) => 3,
            Expr::GroupRing { .. } => 4,
            Expr::FreeProd(_) => 5,
        }
    }

    pub fn key(&self) -> CanonicalKey {
        CanonicalKey {
            kind: self.kind(),
            d: self.d(),
            text: self.to_string(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalize() == *self
    }

    /// Normal form: products flattened, free blocks merged and factors sorted,
    /// nested group rings collapsed, atom data reduced to class representatives.
    pub fn canonicalize(&self) -> Expr {
        match self {
            Expr::Trivial => Expr::Trivial,
            Expr::C2 => Expr::C2,
            Expr::Free { rank, e } => canonical_free(*rank, !e.is_zero()),
            Expr::Demushkin(atom) if atom.n() == 1 => Expr::C2,
            Expr::Demushkin(atom) => Expr::Demushkin(
                DemushkinAtom::canonical(atom.n(), atom.is_alternating())
                    .expect("a valid atom has a class representative"),
            ),
            Expr::GroupRing { m, base } => match base.canonicalize() {
                Expr::GroupRing { m: inner, base } => Expr::GroupRing { m: m + inner, base },
                // Z₂^m over the trivial group is one step over Z₂.
                Expr::Trivial if *m == 1 => Expr::free(1),
                Expr::Trivial => Expr::group_ring(m - 1, Expr::free(1)),
                other => Expr::group_ring(*m, other),
            },
            Expr::FreeProd(fs) => {
                let mut free_rank = 0;
                let mut free_odd = false;
                let mut rest = Vec::new();
                for f in fs {
                    for g in f.canonicalize().factors() {
                        match g {
                            Expr::Trivial => {}
                            Expr::Free { rank, e } => {
                                free_rank += rank;
                                free_odd |= !e.is_zero();
                            }
                            other => rest.push(other),
                        }
                    }
                }
                if free_rank > 0 {
                    rest.push(canonical_free(free_rank, free_odd));
                }
                rest.sort_by_cached_key(Expr::key);
                match rest.len() {
                    0 => Expr::Trivial,
                    1 => rest.pop().unwrap(),
                    _ => Expr::FreeProd(rest),
                }
            }
        }
    }

    /// The printed tree with atom data erased; enumeration deduplicates
    /// isomorphic structures only within one shape.
    pub fn shape(&self) -> String {
        match self {
            Expr::Trivial => "1".into(),
            Expr::Free { rank, .. } => format!("F({rank})"),
            Expr::C2 => "C2".into(),
            Expr::Demushkin(atom) => format!("D({})", atom.n()),
            Expr::GroupRing { m, base } => format!("GR({m},{})", base.shape()),
            Expr::FreeProd(fs) => fs.iter().map(Expr::shape).collect::<Vec<_>>().join("*"),
        }
    }
}

fn canonical_free(rank: usize, odd: bool) -> Expr {
    Expr::Free {
        rank,
        e: if odd {
            BitVec::unit(rank, 0)
        } else {
            BitVec::zero(rank)
        },
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Trivial => f.write_str("1"),
            Expr::Free { rank, e } if e.is_zero() => write!(f, "F({rank})"),
            Expr::Free { rank, e } => write!(f, "F({rank},{e})"),
            Expr::C2 => f.write_str("C2"),
            Expr::Demushkin(atom) => {
                write!(f, "D({};", atom.n())?;
                for (i, r) in atom.rows().iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ";{})", atom.e())
            }
            Expr::GroupRing { m, base } => write!(f, "GR({m},{base})"),
            Expr::FreeProd(fs) => {
                for (i, factor) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    if matches!(factor, Expr::FreeProd(_)) {
                        write!(f, "({factor})")?;
                    } else {
                        write!(f, "{factor}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
