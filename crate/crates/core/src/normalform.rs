//! Splitting off the free part: `G_F(2) ≅ F * G_H(2)` with `F` free of rank
//! `dim R(F)` and `H` of trivial radical.
//!
//! The split is syntactic over the factors of the expression. Every
//! non-product factor is either free or has trivial radical; anything else
//! would contradict the dichotomy and is reported as an internal error.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exprdsl::Expr;
use crate::gf2::BitVec;
use crate::synth::{synthesize, RadicalClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub free_rank: usize,
    /// Component of the class of `-1` on the free part.
    pub e_free: BitVec,
    /// The trivial-radical part; `None` when the whole group is free.
    pub h: Option<Expr>,
}

impl NormalForm {
    /// `F(free_rank, e_free) * H` as an expression.
    pub fn reassemble(&self) -> Expr {
        let mut factors = Vec::new();
        if self.free_rank > 0 {
            factors.push(Expr::Free {
                rank: self.free_rank,
                e: self.e_free,
            });
        }
        if let Some(h) = &self.h {
            factors.extend(h.factors());
        }
        match factors.len() {
            0 => Expr::Trivial,
            1 => factors.pop().unwrap(),
            _ => Expr::FreeProd(factors),
        }
    }
}

impl Serialize for NormalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NormalForm", 3)?;
        st.serialize_field("freeRank", &self.free_rank)?;
        st.serialize_field("eFree", &self.e_free)?;
        st.serialize_field("H", &self.h.as_ref().map(Expr::to_string))?;
        st.end()
    }
}

pub fn decompose(expr: &Expr) -> Result<NormalForm> {
    expr.validate()?;
    let mut free_rank = 0;
    let mut e_free = BitVec::zero(0);
    let mut h = Vec::new();
    for factor in expr.factors() {
        if factor.d() == 0 {
            continue;
        }
        let s = synthesize(&factor)?;
        match s.classify() {
            RadicalClass::Free => {
                free_rank += s.n();
                e_free = e_free.concat(&s.e());
            }
            RadicalClass::TrivialRadical => h.push(factor),
            RadicalClass::ProperRadical => {
                return Err(Error::Internal(format!(
                    "factor {factor} has a proper nonzero radical"
                )))
            }
        }
    }
    let h = match h.len() {
        0 => None,
        1 => h.pop(),
        _ => Some(Expr::FreeProd(h)),
    };
    Ok(NormalForm {
        free_rank,
        e_free,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse;
    use crate::verify::isomorphic;

    fn nf(text: &str) -> NormalForm {
        decompose(&parse(text).unwrap().canonicalize()).unwrap()
    }

    #[test]
    fn free_input() {
        let n = nf("F(2)");
        assert_eq!((n.free_rank, n.h), (2, None));
    }

    #[test]
    fn real_closed_beside_free() {
        let n = nf("F(1)*C2");
        assert_eq!(n.free_rank, 1);
        assert_eq!(n.e_free, "0".parse().unwrap());
        assert_eq!(n.h, Some(Expr::C2));
    }

    #[test]
    fn kula_shape() {
        let n = nf("F(1)*GR(1,F(1))");
        assert_eq!(n.free_rank, 1);
        assert_eq!(n.h.unwrap().to_string(), "GR(1,F(1))");
    }

    #[test]
    fn trivial_radical_input() {
        let n = nf("Q2");
        assert_eq!(n.free_rank, 0);
        assert_eq!(n.h, Some(parse("Q2").unwrap()));
    }

    #[test]
    fn reassembly_is_isomorphic_and_idempotent() {
        for t in ["F(2,10)*C2*GR(1,C2)", "F(1)*C2", "Q2*F(3)", "F(2)"] {
            let e = parse(t).unwrap().canonicalize();
            let n = decompose(&e).unwrap();
            let back = n.reassemble();
            let (s1, s2) = (synthesize(&e).unwrap(), synthesize(&back).unwrap());
            assert!(isomorphic(&s1, &s2).unwrap().is_some(), "{t}");
            assert_eq!(decompose(&back).unwrap(), n, "{t}");
            assert_eq!(n.free_rank, s1.radical().dim(), "{t}");
        }
    }

    #[test]
    fn json_layout() {
        let json = serde_json::to_string(&nf("F(1)*C2")).unwrap();
        assert_eq!(json, r#"{"freeRank":1,"eFree":"0","H":"C2"}"#);
        let json = serde_json::to_string(&nf("F(2)")).unwrap();
        assert_eq!(json, r#"{"freeRank":2,"eFree":"00","H":null}"#);
    }
}
