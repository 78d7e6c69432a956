//! Quadratic extensions `K = F(√a)`.
//!
//! `G_K(2)` is an index-two open subgroup of `G_F(2)`, so by the Kurosh
//! subgroup theorem it is a free product of the intersections with conjugates
//! of the factors of `G_F(2)` and a free group. Factors on which `a` is a
//! square contribute two conjugate copies, factors on which it is not
//! contribute their own quadratic extension, and `s` factors seeing a
//! nontrivial component of `a` leave a free complement of rank `s - 1`.
//!
//! Alongside `E_K` the extension carries the restriction `ι: V_F → V_K`, the
//! norm `N: V_K → V_F` and the action `σ* = id + ι∘N` of the nontrivial
//! automorphism on `V_K`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exprdsl::{DemushkinAtom, Expr};
use crate::gf2::{complete_basis, BitVec, LinMap, Subspace};
use crate::synth::{synthesize, SquareClassStructure};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionCase {
    /// Free block of rank `r` becomes free of rank `2r - 1`.
    Free,
    /// `Z/2Z` at `a = -1`: the extension is quadratically closed.
    RealClosed,
    /// Demushkin block with `n` generators becomes one with `2n - 2`.
    Demushkin,
    /// Group ring with `a` in the residue part.
    Unramified,
    /// Group ring with a nonzero uniformizer component.
    Ramified,
    /// `a` restricts trivially: two conjugate copies of the block.
    Doubled,
    /// The free factor produced by the Kurosh rank formula.
    Complement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomLogEntry {
    pub factor: String,
    pub case: ExtensionCase,
    /// Component of `a` in the factor's coordinates (the rank for the complement).
    pub component: String,
    pub result: String,
}

/// The extension of a single factor: `E′` with its restriction and norm.
#[derive(Clone, Debug)]
pub struct AtomExtension {
    pub expr: Expr,
    pub iota: LinMap,
    pub norm: LinMap,
    pub log: Vec<AtomLogEntry>,
}

#[derive(Clone, Debug)]
pub struct QuadExt {
    pub(crate) expr_f: Expr,
    pub(crate) a: BitVec,
    pub(crate) expr_k: Expr,
    pub(crate) s_f: SquareClassStructure,
    pub(crate) s_k: SquareClassStructure,
    pub(crate) iota: LinMap,
    pub(crate) norm: LinMap,
    pub(crate) sigma: LinMap,
    pub(crate) complement_rank: usize,
    pub(crate) log: Vec<AtomLogEntry>,
}

impl QuadExt {
    pub fn expr_f(&self) -> &Expr {
        &self.expr_f
    }

    pub fn a(&self) -> BitVec {
        self.a
    }

    /// `E_K` with factors in coordinate order.
    pub fn expr_k(&self) -> &Expr {
        &self.expr_k
    }

    pub fn expr_k_canonical(&self) -> Expr {
        self.expr_k.canonicalize()
    }

    pub fn s_f(&self) -> &SquareClassStructure {
        &self.s_f
    }

    pub fn s_k(&self) -> &SquareClassStructure {
        &self.s_k
    }

    pub fn iota(&self) -> &LinMap {
        &self.iota
    }

    pub fn norm(&self) -> &LinMap {
        &self.norm
    }

    pub fn sigma(&self) -> &LinMap {
        &self.sigma
    }

    /// Rank of the free complement, `s - 1`.
    pub fn complement_rank(&self) -> usize {
        self.complement_rank
    }

    pub fn atom_log(&self) -> &[AtomLogEntry] {
        &self.log
    }
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QuadExt", 7)?;
        st.serialize_field("expr", &self.expr_f.to_string())?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("e_K_expr", &self.expr_k_canonical().to_string())?;
        st.serialize_field("iota", &self.iota)?;
        st.serialize_field("norm", &self.norm)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("atomLog", &self.log)?;
        st.end()
    }
}

/// `R(K)`, the radical of the extension's structure.
pub fn radical_of_extension(q: &QuadExt) -> Subspace {
    q.s_k.radical()
}

/// Builds `K = F(√a)` for the field modelled by `expr`; `a` is written in the
/// coordinates of `synthesize(expr)`.
pub fn extend(expr: &Expr, a: &BitVec) -> Result<QuadExt> {
    build(expr, a, 0)
}

/// Like [`extend`] but with `extra` surplus generators in the free complement.
/// Only negative-control fixtures want this.
pub(crate) fn build(expr: &Expr, a: &BitVec, extra: usize) -> Result<QuadExt> {
    let s_f = synthesize(expr)?;
    if a.width() != s_f.n() {
        return Err(Error::WidthMismatch {
            expected: s_f.n(),
            found: a.width(),
        });
    }
    if a.is_zero() {
        return Err(Error::ZeroClass);
    }
    let (parts, complement_rank) = extend_factors(expr, a, extra)?;
    let s_k = synthesize(&parts.expr)?;
    let sigma = LinMap::identity(s_k.n()).add(&parts.norm.then(&parts.iota)?)?;
    Ok(QuadExt {
        expr_f: expr.clone(),
        a: *a,
        expr_k: parts.expr,
        s_f,
        s_k,
        iota: parts.iota,
        norm: parts.norm,
        sigma,
        complement_rank,
        log: parts.log,
    })
}

fn product(factors: Vec<Expr>) -> Expr {
    let mut fs: Vec<Expr> = factors.into_iter().filter(|f| *f != Expr::Trivial).collect();
    match fs.len() {
        0 => Expr::Trivial,
        1 => fs.pop().unwrap(),
        _ => Expr::FreeProd(fs),
    }
}

/// Block-diagonal assembly of per-factor maps.
struct Assembly {
    factors: Vec<Expr>,
    iota_cols: Vec<Vec<BitVec>>,
    norm_cols: Vec<Vec<BitVec>>,
    log: Vec<AtomLogEntry>,
}

fn extend_factors(expr: &Expr, a: &BitVec, extra: usize) -> Result<(AtomExtension, usize)> {
    let factors: Vec<Expr> = expr.factors().into_iter().filter(|f| f.d() > 0).collect();
    let n_f = a.width();
    let e_f = synthesize(expr)?.e();
    let mut asm = Assembly {
        factors: Vec::new(),
        iota_cols: Vec::new(),
        norm_cols: Vec::new(),
        log: Vec::new(),
    };
    // Per nonzero component: the global coordinate of its pivot.
    let mut pivots = Vec::new();
    let mut offset = 0;
    for factor in &factors {
        let d = factor.d();
        let ai = a.slice(offset, d);
        if ai.is_zero() {
            let iota = LinMap::from_fn(d, 2 * d, |x| x.concat(&x));
            let norm = LinMap::from_fn(2 * d, d, |y| y.slice(0, d) ^ y.slice(d, d));
            asm.factors.push(factor.clone());
            asm.factors.push(factor.clone());
            asm.iota_cols.push(iota.columns().to_vec());
            asm.norm_cols.push(norm.columns().to_vec());
            asm.log.push(AtomLogEntry {
                factor: factor.to_string(),
                case: ExtensionCase::Doubled,
                component: ai.to_string(),
                result: format!("{factor}*{factor}"),
            });
        } else {
            pivots.push(offset + ai.pivot().unwrap());
            let ext = extend_atom(factor, &ai)?;
            asm.factors.push(ext.expr);
            asm.iota_cols.push(ext.iota.columns().to_vec());
            asm.norm_cols.push(ext.norm.columns().to_vec());
            asm.log.extend(ext.log);
        }
        offset += d;
    }
    let s = pivots.len();
    let rank = s - 1 + extra;
    let n_blocks: usize = asm.norm_cols.iter().map(Vec::len).sum();
    let n_k = n_blocks + rank;

    // The complement: the j-th nonzero component's pivot goes to f_j, the last
    // one to f_1 + … + f_{s-1}; every other coordinate to zero.
    let complement_image = |global: usize| -> BitVec {
        match pivots.iter().position(|&p| p == global) {
            Some(j) if j + 1 < s => BitVec::unit(rank, j),
            Some(_) => BitVec::from_indices(rank, 0..s - 1),
            None => BitVec::zero(rank),
        }
    };

    let mut iota_columns = Vec::with_capacity(n_f);
    let mut norm_columns = Vec::with_capacity(n_k);
    let (mut off_f, mut off_k) = (0, 0);
    for (k, (ic, nc)) in asm.iota_cols.iter().zip(&asm.norm_cols).enumerate() {
        let d = factors[k].d();
        for (j, col) in ic.iter().enumerate() {
            let head = col.embed(n_blocks, off_k);
            iota_columns.push(head.concat(&complement_image(off_f + j)));
        }
        for col in nc {
            norm_columns.push(col.embed(n_f, off_f));
        }
        off_f += d;
        off_k += nc.len();
    }
    norm_columns.extend(std::iter::repeat_n(BitVec::zero(n_f), rank));
    let iota = LinMap::new(n_f, n_k, iota_columns)?;
    let norm = LinMap::new(n_k, n_f, norm_columns)?;

    let mut out_factors = asm.factors;
    if rank > 0 {
        let e_c = iota.apply(&e_f).slice(n_blocks, rank);
        out_factors.push(Expr::Free { rank, e: e_c });
        asm.log.push(AtomLogEntry {
            factor: String::new(),
            case: ExtensionCase::Complement,
            component: rank.to_string(),
            result: format!("F({rank})"),
        });
    }
    Ok((
        AtomExtension {
            expr: product(out_factors),
            iota,
            norm,
            log: asm.log,
        },
        rank,
    ))
}

/// Extends a single non-product factor at a nonzero `a` in its coordinates.
pub fn extend_atom(atom: &Expr, a: &BitVec) -> Result<AtomExtension> {
    if matches!(atom, Expr::FreeProd(_)) {
        return Err(Error::Invalid("extend_atom needs a single factor".into()));
    }
    let s = synthesize(atom)?;
    if a.width() != s.n() {
        return Err(Error::WidthMismatch {
            expected: s.n(),
            found: a.width(),
        });
    }
    if a.is_zero() {
        return Err(Error::ZeroClass);
    }
    let entry = |case, result: &Expr| AtomLogEntry {
        factor: atom.to_string(),
        case,
        component: a.to_string(),
        result: result.to_string(),
    };
    let n = s.n();
    match atom {
        Expr::Trivial | Expr::FreeProd(_) => unreachable!("handled above"),
        Expr::C2 => {
            let expr = Expr::Trivial;
            let log = vec![entry(ExtensionCase::RealClosed, &expr)];
            Ok(AtomExtension {
                expr,
                iota: LinMap::zero(1, 0),
                norm: LinMap::zero(0, 1),
                log,
            })
        }
        Expr::Free { rank, e } => {
            let r = *rank;
            let basis = complete_basis(r, &[*a])?;
            let (iota, norm) = split_basis_maps(&basis, 2 * r - 1, &basis)?;
            let expr = Expr::Free {
                rank: 2 * r - 1,
                e: iota.apply(e),
            };
            let log = vec![entry(ExtensionCase::Free, &expr)];
            Ok(AtomExtension {
                expr,
                iota,
                norm,
                log,
            })
        }
        Expr::Demushkin(d) => {
            let basis = complete_basis(n, &[*a])?;
            let perp = s.pair_with(a).kernel();
            let p = perp.basis();
            let (iota, norm) = split_basis_maps(&basis, 2 * n - 2, p)?;
            let m = 2 * n - 2;
            let half = n - 1;
            let bit = |v: BitVec| v.get(0);
            let mut rows = vec![BitVec::zero(m); m];
            for i in 0..half {
                for j in 0..half {
                    let v = bit(s.pair(&basis[i + 1], &p[j]));
                    rows[i].set(half + j, v);
                    rows[half + j].set(i, v);
                }
            }
            for j in 0..half {
                rows[half + j].set(half + j, bit(s.pair(&d.e(), &p[j])));
            }
            let atom_k = DemushkinAtom::new(rows, iota.apply(&d.e()))
                .map_err(|err| Error::Internal(format!("Demushkin extension of {atom}: {err}")))?;
            let expr = Expr::Demushkin(atom_k);
            let log = vec![entry(ExtensionCase::Demushkin, &expr)];
            Ok(AtomExtension {
                expr,
                iota,
                norm,
                log,
            })
        }
        Expr::GroupRing { m, base } => {
            let m = *m;
            let n0 = n - m;
            let u = a.slice(0, n0);
            let tau = a.slice(n0, m);
            if tau.is_zero() {
                let (inner, _) = extend_factors(base, &u, 0)?;
                let n0k = inner.expr.d();
                let iota = LinMap::from_fn(n, n0k + m, |x| {
                    inner.iota.apply(&x.slice(0, n0)).concat(&x.slice(n0, m))
                });
                let norm = LinMap::from_fn(n0k + m, n, |y| {
                    inner.norm.apply(&y.slice(0, n0k)).concat(&BitVec::zero(m))
                });
                let expr = Expr::group_ring(m, inner.expr);
                let mut log = vec![entry(ExtensionCase::Unramified, &expr)];
                log.extend(inner.log);
                Ok(AtomExtension {
                    expr,
                    iota,
                    norm,
                    log,
                })
            } else {
                // New uniformizer basis of F: τ replaces t_k for the lowest k in
                // its support. In K the uniformizer s = √a takes slot 0 and the
                // remaining t_j keep their order.
                let k = tau.pivot().unwrap();
                let mut basis = Vec::with_capacity(n);
                let mut images = Vec::with_capacity(n);
                for i in 0..n0 {
                    basis.push(BitVec::unit(n, i));
                    images.push(BitVec::unit(n, i));
                }
                basis.push(BitVec::zero(n0).concat(&tau));
                images.push(u.concat(&BitVec::zero(m)));
                for (slot, j) in (0..m).filter(|&j| j != k).enumerate() {
                    basis.push(BitVec::unit(n, n0 + j));
                    images.push(BitVec::unit(n, n0 + slot + 1));
                }
                let iota = LinMap::from_basis_images(&basis, &images, n)?;
                let mut norm = LinMap::zero(n, n);
                *norm.column_mut(n0) = s.e() ^ *a;
                let expr = atom.clone();
                let log = vec![entry(ExtensionCase::Ramified, &expr)];
                Ok(AtomExtension {
                    expr,
                    iota,
                    norm,
                    log,
                })
            }
        }
    }
}

/// Restriction and norm for a block whose extension has carrier
/// `ι(x₂), …, ι(x_r), w₁, …, w_k` where `x₁ = a, x₂, …` is `basis` and
/// `N(w_j) = norm_targets[j]`.
fn split_basis_maps(basis: &[BitVec], dim_k: usize, norm_targets: &[BitVec]) -> Result<(LinMap, LinMap)> {
    let r = basis.len();
    let images: Vec<BitVec> = std::iter::once(BitVec::zero(dim_k))
        .chain((0..r - 1).map(|j| BitVec::unit(dim_k, j)))
        .collect();
    let iota = LinMap::from_basis_images(basis, &images, dim_k)?;
    let columns = std::iter::repeat_n(BitVec::zero(r), r - 1)
        .chain(norm_targets.iter().copied())
        .collect();
    let norm = LinMap::new(dim_k, r, columns)?;
    Ok((iota, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprdsl::parse;

    fn bv(s: &str) -> BitVec {
        s.parse().unwrap()
    }

    fn ext(e: &str, a: &str) -> QuadExt {
        extend(&parse(e).unwrap(), &bv(a)).unwrap()
    }

    #[test]
    fn split_component_doubles_real_closed_factor() {
        let q = ext("F(1)*C2", "10");
        assert_eq!(q.expr_k_canonical().to_string(), "F(1)*C2*C2");
        assert_eq!(q.iota().apply(&bv("10")), bv("000"));
        assert_eq!(q.iota().apply(&bv("01")), bv("011"));
        assert_eq!(q.norm().apply(&bv("100")), bv("10"));
        assert_eq!(q.norm().apply(&bv("010")), bv("01"));
        assert_eq!(q.norm().apply(&bv("001")), bv("01"));
        assert_eq!(q.complement_rank(), 0);
        assert_eq!(radical_of_extension(&q).basis(), &[bv("100")]);
    }

    #[test]
    fn mixed_component_adds_a_free_generator() {
        let q = ext("F(1)*C2", "11");
        assert_eq!(q.complement_rank(), 1);
        assert_eq!(q.expr_k_canonical().to_string(), "F(2,10)");
        let g = q.iota().apply(&bv("10"));
        assert!(!g.is_zero());
        assert_eq!(q.iota().apply(&bv("01")), g);
        assert_eq!(q.norm().apply(&g), bv("00"));
        assert!(radical_of_extension(&q).is_full());
    }

    #[test]
    fn q2_extensions_have_four_generators() {
        for a in ["100", "010", "001", "111"] {
            let q = ext("Q2", a);
            assert_eq!(q.s_k().n(), 4, "a = {a}");
            assert!(radical_of_extension(&q).is_zero());
        }
    }

    #[test]
    fn atom_rules() {
        let f = extend_atom(&parse("F(1)").unwrap(), &bv("1")).unwrap();
        assert_eq!(f.expr, Expr::free(1));
        assert_eq!(f.norm.apply(&bv("1")), bv("1"));
        let c = extend_atom(&Expr::C2, &bv("1")).unwrap();
        assert_eq!(c.expr, Expr::Trivial);
        let g = extend_atom(&parse("GR(1,C2)").unwrap(), &bv("01")).unwrap();
        assert_eq!(g.expr.to_string(), "GR(1,C2)");
        assert_eq!(g.iota.apply(&bv("01")), bv("00"));
        assert_eq!(g.norm.apply(&bv("01")), bv("11"));
        assert_eq!(g.norm.image().basis(), &[bv("11")]);
        assert!(extend_atom(&parse("F(1)*C2").unwrap(), &bv("10")).is_err());
    }

    #[test]
    fn sigma_is_identity_plus_restricted_norm() {
        let q = ext("GR(2,F(1))*C2", "0101");
        let x = bv("1".repeat(q.s_k().n()).as_str());
        assert_eq!(q.sigma().apply(&x), x ^ q.iota().apply(&q.norm().apply(&x)));
    }

    #[test]
    fn zero_class_is_rejected() {
        assert_eq!(extend(&parse("F(2)").unwrap(), &bv("00")).unwrap_err(), Error::ZeroClass);
        assert!(extend(&parse("F(2)").unwrap(), &bv("1")).is_err());
    }
}
