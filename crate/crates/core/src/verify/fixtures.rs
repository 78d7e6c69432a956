//! Deliberately broken extensions. A checker that misses any of these has
//! lost its teeth.

use super::{check_extension, h90_with, Report};
use crate::error::Result;
use crate::exprdsl::Expr;
use crate::gf2::{BitVec, LinMap, Subspace};
use crate::quadext::{build, extend};
use crate::synth::SquareClassStructure;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Corruption {
    /// One off-diagonal gram entry of `S_K` flipped on one side only.
    FlippedGramBit,
    /// A column of `ι` set to zero.
    DroppedIotaColumn,
    /// One generator too many in the free complement.
    WrongComplementRank,
    /// Two columns of `σ*` exchanged.
    SwappedSigma,
    /// The last basis vector of `R(K)` removed before the H90 comparison.
    TruncatedRadical,
}

impl Corruption {
    pub const ALL: [Corruption; 5] = [
        Corruption::FlippedGramBit,
        Corruption::DroppedIotaColumn,
        Corruption::WrongComplementRank,
        Corruption::SwappedSigma,
        Corruption::TruncatedRadical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Corruption::FlippedGramBit => "flipped gram bit",
            Corruption::DroppedIotaColumn => "dropped iota column",
            Corruption::WrongComplementRank => "wrong complement rank",
            Corruption::SwappedSigma => "swapped sigma",
            Corruption::TruncatedRadical => "truncated radical",
        }
    }
}

/// The extension and H90 checks on `F(√a)` with `corruption` applied, or
/// `None` when the corruption does not apply (too few coordinates, empty
/// radical, …).
pub fn corrupted_report(expr: &Expr, a: &BitVec, corruption: Corruption) -> Result<Option<Report>> {
    let mut q = extend(expr, a)?;
    let n_f = q.s_f.n();
    let n_k = q.s_k.n();
    let mut r_k = q.s_k.radical();
    match corruption {
        Corruption::FlippedGramBit => {
            if n_k < 2 || q.s_k.b_dim() == 0 {
                return Ok(None);
            }
            let mut gram = q.s_k.gram().to_vec();
            let flipped = gram[0][1] ^ BitVec::unit(q.s_k.b_dim(), 0);
            gram[0][1] = flipped;
            q.s_k = SquareClassStructure::from_parts_unchecked(
                n_k,
                q.s_k.e(),
                q.s_k.b_dim(),
                gram,
                q.s_k.provenance(),
            )?;
            r_k = q.s_k.radical();
        }
        Corruption::DroppedIotaColumn => {
            let Some(j) = (0..n_f).find(|&j| BitVec::unit(n_f, j) != q.a) else {
                return Ok(None);
            };
            *q.iota.column_mut(j) = BitVec::zero(n_k);
        }
        Corruption::WrongComplementRank => {
            q = build(expr, a, 1)?;
            r_k = q.s_k.radical();
        }
        Corruption::SwappedSigma => {
            if n_k < 2 {
                return Ok(None);
            }
            let mut cols = q.sigma.columns().to_vec();
            cols.swap(0, 1);
            q.sigma = LinMap::new(n_k, n_k, cols)?;
        }
        Corruption::TruncatedRadical => {
            let basis = r_k.basis();
            if basis.is_empty() {
                return Ok(None);
            }
            r_k = Subspace::span(n_k, &basis[..basis.len() - 1])?;
        }
    }
    let mut report = check_extension(&q);
    let r_f = q.s_f.radical();
    report.checks.extend(h90_with(&q, &r_f, &r_k).checks);
    Ok(Some(report))
}
