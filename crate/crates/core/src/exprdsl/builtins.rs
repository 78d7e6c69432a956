//! Named blocks and families.

use super::{DemushkinAtom, Expr};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

fn bits(s: &str) -> BitVec {
    s.parse().expect("builtin bit strings are well formed")
}

/// The 2-adic numbers on the square-class basis `([-1], [2], [5])`.
///
/// Hilbert symbols: `(-1,-1)₂ = (2,5)₂ = -1`, and `-1` pairs trivially with
/// `2` and `5`, as do `2` and `5` with themselves.
pub fn q2() -> Expr {
    let atom = DemushkinAtom::new(vec![bits("100"), bits("001"), bits("010")], bits("100"))
        .expect("Q2 gram is valid");
    Expr::Demushkin(atom)
}

fn is_odd_prime(p: usize) -> bool {
    p > 2 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `Q_p` for an odd prime on the basis `(u, p)` with `u` a nonsquare unit.
///
/// `(u,p)_p = -1`, unit pairs are trivial, and `(p,p)_p = (-1/p)`; `-1` is a
/// square iff `p ≡ 1 mod 4`, otherwise it is the class of `u`.
pub fn qp(p: usize) -> Result<Expr> {
    if !is_odd_prime(p) {
        return Err(Error::OutOfRange(format!(
            "Qp needs an odd prime, got {p} (use Q2 for p = 2)"
        )));
    }
    let atom = if p % 4 == 1 {
        DemushkinAtom::new(vec![bits("01"), bits("10")], bits("00"))
    } else {
        DemushkinAtom::new(vec![bits("01"), bits("11")], bits("10"))
    }
    .expect("Qp gram is valid");
    Ok(Expr::Demushkin(atom))
}

/// `F(k) * GR(n, F(k))`: a free factor next to `n` iterated Laurent series
/// over a field with free Galois group of rank `k`.
pub fn kula(k: usize, n: usize) -> Result<Expr> {
    if k == 0 || n == 0 {
        return Err(Error::OutOfRange("kula needs k >= 1 and n >= 1".into()));
    }
    let e = Expr::FreeProd(vec![Expr::free(k), Expr::group_ring(n, Expr::free(k))]);
    e.validate()?;
    Ok(e.canonicalize())
}

/// `F(r) * C2 * … * C2` with `s` real-closed factors.
pub fn quasi_pythagorean(r: usize, s: usize) -> Result<Expr> {
    if s == 0 {
        return Err(Error::OutOfRange("quasipyth needs at least one C2 factor".into()));
    }
    let mut factors = vec![Expr::C2; s];
    if r > 0 {
        factors.insert(0, Expr::free(r));
    }
    let e = if factors.len() == 1 {
        Expr::C2
    } else {
        Expr::FreeProd(factors)
    };
    e.validate()?;
    Ok(e.canonicalize())
}
