//! Model outputs checked against independent brute-force or number-theoretic oracles.

use etg2::exprdsl::{canonical_expressions, demushkin_catalog, enumerate, q2, qp, DemushkinAtom};
use etg2::gf2::{BitVec, Subspace};
use etg2::quadext::extend;
use etg2::verify::isomorphic;
use etg2::{parse, synthesize, Expr, SquareClassStructure};

fn bv(s: &str) -> BitVec {
    s.parse().unwrap()
}

fn structure(text: &str) -> SquareClassStructure {
    synthesize(&parse(text).unwrap()).unwrap()
}

fn set(s: &Subspace) -> Vec<BitVec> {
    let mut v: Vec<BitVec> = s.elements().collect();
    v.sort();
    v
}

/// Every valid `(gram, e)` with `n` generators, by exhaustion.
fn all_demushkin(n: usize) -> Vec<DemushkinAtom> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut rows = vec![BitVec::zero(n); n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                rows[i].set(j, true);
                rows[j].set(i, true);
            }
        }
        for e in BitVec::all(n) {
            if let Ok(atom) = DemushkinAtom::new(rows.clone(), e) {
                out.push(atom);
            }
        }
    }
    out
}

#[test]
fn demushkin_catalog_covers_every_valid_block_exactly_once() {
    for n in 2..=4 {
        let catalog: Vec<SquareClassStructure> = demushkin_catalog(n)
            .into_iter()
            .map(|a| synthesize(&Expr::Demushkin(a)).unwrap())
            .collect();
        let all = all_demushkin(n);
        // nondegenerate symmetric matrices determine e through the diagonal law
        assert!(!all.is_empty());
        for atom in &all {
            let s = synthesize(&Expr::Demushkin(atom.clone())).unwrap();
            let hits = catalog.iter().filter(|c| isomorphic(c, &s).unwrap().is_some()).count();
            assert_eq!(hits, 1, "{}", Expr::Demushkin(atom.clone()));
        }
    }
}

fn legendre(a: i64, p: i64) -> i64 {
    let a = a.rem_euclid(p);
    let mut r = 1i64;
    let (mut base, mut exp) = (a, (p - 1) / 2);
    while exp > 0 {
        if exp & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// `(x, y)_p` for `x = p^α u`, `y = p^β v` with `u, v` units.
fn hilbert_odd(p: i64, (alpha, u): (i64, i64), (beta, v): (i64, i64)) -> i64 {
    let sign = if alpha * beta * (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
    let lu = if beta % 2 == 0 { 1 } else { legendre(u, p) };
    let lv = if alpha % 2 == 0 { 1 } else { legendre(v, p) };
    sign * lu * lv
}

#[test]
fn qp_matches_odd_hilbert_symbols() {
    for p in [3i64, 5, 7, 11, 13, 17] {
        let u = (2..p).find(|&x| legendre(x, p) == -1).unwrap();
        let s = synthesize(&qp(p as usize).unwrap()).unwrap();
        // classes 1, u, p, up on the basis (u, p)
        let reps = [((0, 1), "00"), ((0, u), "10"), ((1, 1), "01"), ((1, u), "11")];
        for (x, cx) in reps {
            for (y, cy) in reps {
                let nonsplit = hilbert_odd(p, x, y) == -1;
                assert_eq!(!s.pair(&bv(cx), &bv(cy)).is_zero(), nonsplit, "p={p} {cx} {cy}");
            }
        }
        let minus_one = if legendre(-1, p) == 1 { "00" } else { "10" };
        assert_eq!(s.e(), bv(minus_one), "p={p}");
    }
}

#[test]
fn q2_value_set_is_the_norm_group_of_q2_sqrt_minus_2() {
    // Norms x² + 2y² from Q₂(√-2) include 1, 2, 3, 6; modulo squares 3 ~ -5 and 6 ~ -10.
    let s = synthesize(&q2()).unwrap();
    let d = s.value_set(&bv("010")).unwrap();
    assert_eq!(set(&d), vec![bv("000"), bv("010"), bv("101"), bv("111")]);
    // over a local field every non-hyperbolic binary form has values of index two
    for x in BitVec::all(3) {
        if x != s.e() {
            assert_eq!(s.value_set(&x).unwrap().dim(), 2);
        }
    }
}

#[test]
fn value_sets_match_brute_force() {
    for t in ["F(1)*C2", "GR(1,C2)", "Q2*C2", "GR(2,F(1,1))", "D(4;1100,1000,0001,0010;0100)"] {
        let s = structure(t);
        let e = s.e();
        for x in BitVec::all(s.n()) {
            let brute: Vec<BitVec> = BitVec::all(s.n()).filter(|b| s.pair(b, &(x ^ e)).is_zero()).collect();
            assert_eq!(set(&s.value_set(&x).unwrap()), brute, "{t} x={x}");
        }
        assert!(s.value_set(&e).unwrap().is_full());
    }
}

#[test]
fn radical_matches_brute_force_on_the_catalog() {
    for e in canonical_expressions(4).unwrap() {
        let s = synthesize(&e).unwrap();
        let brute: Vec<BitVec> = BitVec::all(s.n())
            .filter(|a| BitVec::all(s.n()).all(|b| s.pair(a, &b).is_zero()))
            .collect();
        assert_eq!(set(&s.radical()), brute, "{e}");
    }
}

#[test]
fn ramified_group_ring_norms_onto_a_perp() {
    let s = structure("GR(1,C2)");
    let a = bv("01");
    let perp: Vec<BitVec> = BitVec::all(2).filter(|b| s.pair(b, &a).is_zero()).collect();
    assert_eq!(perp, vec![bv("00"), bv("11")]);
    let q = extend(&parse("GR(1,C2)").unwrap(), &a).unwrap();
    assert_eq!(set(&q.norm().image()), perp);
    assert_eq!(q.iota().apply(&a), bv("00"));
}

#[test]
fn isomorphism_is_an_equivalence_on_the_catalog() {
    let items: Vec<SquareClassStructure> = enumerate(3).unwrap().into_iter().map(|e| e.structure).collect();
    let iso = |i: usize, j: usize| isomorphic(&items[i], &items[j]).unwrap().is_some();
    let n = items.len();
    for i in 0..n {
        assert!(iso(i, i));
        for j in 0..n {
            assert_eq!(iso(i, j), iso(j, i), "{i} {j}");
            if iso(i, j) {
                for k in 0..n {
                    if iso(j, k) {
                        assert!(iso(i, k), "{i} {j} {k}");
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_dedups_only_within_shapes() {
    for d in 1..=4 {
        let kept = enumerate(d).unwrap();
        for (i, x) in kept.iter().enumerate() {
            for y in &kept[i + 1..] {
                if x.expr.shape() == y.expr.shape() {
                    assert!(
                        isomorphic(&x.structure, &y.structure).unwrap().is_none(),
                        "{} and {}",
                        x.expr,
                        y.expr
                    );
                }
            }
        }
        // every canonical expression is represented by a kept one of its shape
        for e in canonical_expressions(d).unwrap() {
            let s = synthesize(&e).unwrap();
            assert!(
                kept.iter()
                    .any(|k| k.expr.shape() == e.shape() && isomorphic(&k.structure, &s).unwrap().is_some()),
                "{e}"
            );
        }
    }
}

#[test]
fn every_expression_has_dimension_at_most_d_max() {
    let v = canonical_expressions(3).unwrap();
    assert!(v.iter().all(|e| (1..=3).contains(&e.d())));
    assert_eq!(v.iter().filter(|e| e.d() == 1).count(), 3);
}
