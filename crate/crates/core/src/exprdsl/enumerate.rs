//! Bounded enumeration of canonical expressions.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{DemushkinAtom, Expr, MAX_ENUMERATION_DIM};
use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::synth::{synthesize, SquareClassStructure};
use crate::verify::{iso_key, isomorphic};

#[derive(Clone, Debug)]
pub struct EnumeratedExpr {
    pub expr: Expr,
    pub structure: SquareClassStructure,
}

/// Demushkin blocks with `n ≥ 2` generators, one per isomorphism class:
/// the non-alternating one, and for even `n` also the alternating one.
pub fn demushkin_catalog(n: usize) -> Vec<DemushkinAtom> {
    if n < 2 {
        return Vec::new();
    }
    let mut out = vec![DemushkinAtom::canonical(n, false).expect("non-alternating exists")];
    if n.is_multiple_of(2) {
        out.push(DemushkinAtom::canonical(n, true).expect("even n"));
    }
    out.sort_by_cached_key(|a| Expr::Demushkin(a.clone()).key());
    out
}

fn check_bound(d_max: usize) -> Result<()> {
    if (1..=MAX_ENUMERATION_DIM).contains(&d_max) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "d_max must lie in 1..={MAX_ENUMERATION_DIM}, got {d_max}"
        )))
    }
}

/// Every canonical expression with `1 ≤ d ≤ d_max`, in increasing key order.
pub fn canonical_expressions(d_max: usize) -> Result<Vec<Expr>> {
    check_bound(d_max)?;
    // blocks[d]: non-free, non-product factors with exactly d generators.
    // all[d]: every canonical expression with exactly d generators.
    let mut blocks: Vec<Vec<Expr>> = vec![Vec::new(); d_max + 1];
    let mut all: Vec<Vec<Expr>> = vec![Vec::new(); d_max + 1];
    for d in 1..=d_max {
        let mut b = Vec::new();
        if d == 1 {
            b.push(Expr::C2);
        }
        b.extend(demushkin_catalog(d).into_iter().map(Expr::Demushkin));
        for m in 1..d {
            for base in &all[d - m] {
                if !matches!(base, Expr::GroupRing { .. }) {
                    b.push(Expr::group_ring(m, base.clone()));
                }
            }
        }
        blocks[d] = b;

        let mut exprs = vec![
            Expr::free(d),
            Expr::Free {
                rank: d,
                e: BitVec::unit(d, 0),
            },
        ];
        exprs.extend(blocks[d].iter().cloned());
        exprs.extend(products(d, &blocks));
        all[d] = exprs;
    }
    let mut out: Vec<Expr> = all.into_iter().flatten().collect();
    out.sort_by_cached_key(Expr::key);
    debug_assert!(out.iter().all(Expr::is_canonical));
    debug_assert!(out.windows(2).all(|w| w[0].key() < w[1].key()));
    Ok(out)
}

/// Canonical products with exactly `d` generators.
fn products(d: usize, blocks: &[Vec<Expr>]) -> Vec<Expr> {
    // Every smaller block, in key order, so multisets come out as sorted lists.
    let mut pool: Vec<Expr> = blocks[1..d].iter().flatten().cloned().collect();
    pool.sort_by_cached_key(Expr::key);
    let mut out = Vec::new();
    for r in 0..d {
        let frees: Vec<Option<Expr>> = if r == 0 {
            vec![None]
        } else {
            vec![
                Some(Expr::free(r)),
                Some(Expr::Free {
                    rank: r,
                    e: BitVec::unit(r, 0),
                }),
            ]
        };
        let min_blocks = if r == 0 { 2 } else { 1 };
        let mut chosen = Vec::new();
        multisets(&pool, 0, d - r, &mut chosen, &mut |ms| {
            if ms.len() < min_blocks {
                return;
            }
            for f in &frees {
                let mut factors: Vec<Expr> = f.iter().cloned().collect();
                factors.extend(ms.iter().cloned());
                out.push(Expr::FreeProd(factors));
            }
        });
    }
    out
}

fn multisets(pool: &[Expr], from: usize, left: usize, chosen: &mut Vec<Expr>, emit: &mut dyn FnMut(&[Expr])) {
    if left == 0 {
        emit(chosen);
        return;
    }
    for i in from..pool.len() {
        let d = pool[i].d();
        if d <= left {
            chosen.push(pool[i].clone());
            multisets(pool, i, left - d, chosen, emit);
            chosen.pop();
        }
    }
}

/// Canonical expressions with `d ≤ d_max`, keeping only the first (in key
/// order) of any isomorphic structures that share an expression shape.
pub fn enumerate(d_max: usize) -> Result<Vec<EnumeratedExpr>> {
    let exprs = canonical_expressions(d_max)?;
    let items: Vec<EnumeratedExpr> = exprs
        .into_par_iter()
        .map(|expr| {
            let structure = synthesize(&expr)?;
            Ok(EnumeratedExpr { expr, structure })
        })
        .collect::<Result<_>>()?;

    let mut by_shape: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        by_shape.entry(it.expr.shape()).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = by_shape.into_values().collect();
    let kept: Vec<Vec<usize>> = groups
        .into_par_iter()
        .map(|group| {
            let mut kept: Vec<usize> = Vec::new();
            for &i in &group {
                let key = iso_key(&items[i].structure);
                let mut duplicate = false;
                for &j in &kept {
                    if iso_key(&items[j].structure) == key
                        && isomorphic(&items[i].structure, &items[j].structure)?.is_some()
                    {
                        duplicate = true;
                        break;
                    }
                }
                if !duplicate {
                    kept.push(i);
                }
            }
            Ok(kept)
        })
        .collect::<Result<_>>()?;
    let mut keep = vec![false; items.len()];
    for i in kept.into_iter().flatten() {
        keep[i] = true;
    }
    Ok(items
        .into_iter()
        .zip(keep)
        .filter_map(|(it, k)| k.then_some(it))
        .collect())
}
