//! Invariant suites, the radical Hilbert 90 checker and structure isomorphism.
//!
//! Every failed check carries a witness: a vector, subspace or map column
//! that exhibits the violation.

mod fixtures;
mod iso;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exprdsl::Expr;
use crate::gf2::{BitVec, LinMap, Subspace};
use crate::normalform::decompose;
use crate::quadext::{extend, QuadExt};
use crate::synth::{synthesize, RadicalClass, SquareClassStructure};

pub use fixtures::{corrupted_report, Corruption};
pub use iso::{iso_key, isomorphic, isomorphic_with, Constraints, IsoKey, Isomorphism, ISO_MAX_DIM};

/// Largest `d(E)` accepted by [`run_suite`].
pub const SUITE_MAX_DIM: usize = ISO_MAX_DIM;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subject {
    pub expr: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub subject: Subject,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    fn new(expr: &Expr, a: Option<BitVec>) -> Self {
        Report {
            subject: Subject {
                expr: expr.to_string(),
                a,
            },
            checks: Vec::new(),
            timing_ms: None,
        }
    }

    fn record(&mut self, name: impl Into<String>, outcome: std::result::Result<(), String>) {
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        self.checks.push(Check {
            name: name.into(),
            status,
            witness,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Folds the report into a single check named `name`; the witness of the
    /// first failure is kept.
    fn summarize(&self, name: String) -> Check {
        match self.failures().next() {
            None => Check {
                name,
                status: Status::Pass,
                witness: None,
            },
            Some(f) => Check {
                name,
                status: Status::Fail,
                witness: Some(format!("{}: {}", f.name, f.witness.as_deref().unwrap_or(""))),
            },
        }
    }

    pub fn without_timing(mut self) -> Self {
        self.timing_ms = None;
        self
    }
}

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

/// Passes when `a ⊆ b`; otherwise names a basis vector of `a` outside `b`.
fn subset(a: &Subspace, b: &Subspace, what: &str) -> std::result::Result<(), String> {
    match a.basis().iter().find(|v| !b.contains(v).expect("same ambient space")) {
        None => Ok(()),
        Some(v) => Err(format!("{v} {what}")),
    }
}

fn equal(a: &Subspace, b: &Subspace, left: &str, right: &str) -> std::result::Result<(), String> {
    subset(a, b, &format!("lies in {left} but not in {right}"))?;
    subset(b, a, &format!("lies in {right} but not in {left}"))
}

fn show(s: &Subspace) -> String {
    let rows: Vec<String> = s.basis().iter().map(BitVec::to_string).collect();
    format!("span{{{}}}", rows.join(","))
}

/// `N⁻¹(R(F)) = ι(V_F) + R(K)`: the inclusion `⊇` and then equality.
pub fn check_h90(q: &QuadExt) -> Report {
    h90_with(q, &q.s_f.radical(), &q.s_k.radical())
}

fn h90_with(q: &QuadExt, r_f: &Subspace, r_k: &Subspace) -> Report {
    let mut report = Report::new(&q.expr_f, Some(q.a));
    let lhs = q.norm.preimage(r_f).expect("norm lands in V_F");
    let rhs = q.iota.image().sum(r_k).expect("both live in V_K");
    report.record(
        "h90r_inclusion",
        subset(&rhs, &lhs, "lies in ι(V_F) + R(K) but its norm is not in R(F)"),
    );
    report.record(
        "h90r_equality",
        subset(&lhs, &rhs, "has norm in R(F) but is not in ι(V_F) + R(K)"),
    );
    report
}

/// Axioms and the exact-sequence laws of a quadratic extension.
pub fn check_extension(q: &QuadExt) -> Report {
    let mut report = Report::new(&q.expr_f, Some(q.a));
    let (sf, sk) = (&q.s_f, &q.s_k);
    let (iota, norm, sigma) = (&q.iota, &q.norm, &q.sigma);
    let n_k = sk.n();

    let expected_kernel = Subspace::span(sf.n(), [&q.a]).expect("a has width n_F");
    report.record(
        "kernel_of_restriction",
        equal(&iota.kernel(), &expected_kernel, "ker ι", "{0, a}"),
    );
    let image_iota = iota.image();
    report.record(
        "classical_h90",
        equal(&norm.kernel(), &image_iota, "ker N", "im ι"),
    );
    let a_perp = sf.value_set(&(q.a ^ sf.e())).expect("a has width n_F");
    report.record(
        "norm_image",
        equal(&norm.image(), &a_perp, "im N", "D⟨1,-a⟩"),
    );
    let n_iota = iota.then(norm).expect("composable");
    report.record(
        "norm_kills_restriction",
        ensure(n_iota.is_zero(), || {
            let j = n_iota.columns().iter().position(|c| !c.is_zero()).unwrap();
            format!("N(ι(b{j})) = {}", n_iota.columns()[j])
        }),
    );
    let sigma2 = sigma.then(sigma).expect("square map");
    report.record(
        "sigma_involution",
        first_difference(&sigma2, &LinMap::identity(n_k), "σ*²", "id"),
    );
    let sigma_iota = iota.then(sigma).expect("composable");
    report.record(
        "sigma_fixes_restriction",
        first_difference(&sigma_iota, iota, "σ*∘ι", "ι"),
    );
    let iota_n = norm.then(iota).expect("composable");
    let id_sigma = LinMap::identity(n_k).add(sigma).expect("square maps");
    report.record(
        "sigma_relation",
        first_difference(&iota_n, &id_sigma, "ι∘N", "id + σ*"),
    );
    let e_img = iota.apply(&sf.e());
    report.record(
        "minus_one_restricts",
        ensure(e_img == sk.e(), || format!("ι(e_F) = {e_img} but e_K = {}", sk.e())),
    );
    report.record("axioms_k", axioms(sk));
    let expected_dim = sf.n() - 1 + a_perp.dim();
    report.record(
        "dimension_law",
        ensure(n_k == expected_dim, || {
            format!("dim V_K = {n_k}, expected {} - 1 + {}", sf.n(), a_perp.dim())
        }),
    );
    report.record("radical_of_extension", radical_matches_free_part(q));
    report
}

fn first_difference(f: &LinMap, g: &LinMap, left: &str, right: &str) -> std::result::Result<(), String> {
    match f.columns().iter().zip(g.columns()).position(|(x, y)| x != y) {
        None => Ok(()),
        Some(j) => Err(format!(
            "{left}(b{j}) = {} but {right}(b{j}) = {}",
            f.columns()[j],
            g.columns()[j]
        )),
    }
}

fn axioms(s: &SquareClassStructure) -> std::result::Result<(), String> {
    match s.axiom_violations().into_iter().next() {
        None => Ok(()),
        Some(v) => Err(v),
    }
}

/// `R(K)` is exactly the free part of the normal form of `E_K`.
fn radical_matches_free_part(q: &QuadExt) -> std::result::Result<(), String> {
    let r = q.s_k.radical();
    match decompose(&q.expr_k) {
        Ok(nf) => ensure(nf.free_rank == r.dim(), || {
            format!("R(K) = {} has dim {} but the free part has rank {}", show(&r), r.dim(), nf.free_rank)
        }),
        Err(err) => Err(format!("decompose(E_K) failed: {err}")),
    }
}

/// Axioms, the radical as an intersection of value sets and `R ⊆ D⟨1,1⟩`.
pub fn check_structure(s: &SquareClassStructure) -> std::result::Result<(), String> {
    axioms(s)?;
    let r = s.radical();
    let mut meet = Subspace::full(s.n());
    for x in BitVec::all(s.n()) {
        let d = s.value_set(&x).expect("width matches");
        meet = meet.intersect(&d).expect("same ambient space");
    }
    equal(&r, &meet, "R", "⋂ D⟨1,x⟩")?;
    subset(&r, &s.value_set(&BitVec::zero(s.n())).unwrap(), "lies in R but not in D⟨1,1⟩")?;
    let free = s.reduce().b_dim() == 0;
    ensure(free == (s.classify() == RadicalClass::Free), || {
        format!("classified {} with reduced B of dimension {}", s.classify(), s.reduce().b_dim())
    })
}

/// Which branch of the rigid trichotomy a structure with a rigid element
/// `a` satisfies: `R = 0`; `R = {0,a} = D⟨1,1⟩ = e^⊥` with `e ≠ 0`; or
/// `R = V = {0,a}` with `e = 0`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RigidBranch {
    TrivialRadical,
    RadicalIsRigidLine,
    OneDimensionalFree,
}

/// Branches satisfied for the rigid element `a`.
pub fn rigid_branches(s: &SquareClassStructure, a: &BitVec) -> Vec<RigidBranch> {
    let r = s.radical();
    let line = Subspace::span(s.n(), [a]).unwrap();
    let e = s.e();
    let mut out = Vec::new();
    if r.is_zero() {
        out.push(RigidBranch::TrivialRadical);
    }
    let e_perp = s.pair_with(&e).kernel();
    if !e.is_zero() && r == line && s.value_set(&BitVec::zero(s.n())).unwrap() == line && e_perp == line {
        out.push(RigidBranch::RadicalIsRigidLine);
    }
    if e.is_zero() && r.is_full() && r == line {
        out.push(RigidBranch::OneDimensionalFree);
    }
    out
}

/// Rigid trichotomy and the birigid law.
pub fn check_rigidity(s: &SquareClassStructure) -> std::result::Result<(), String> {
    let r = s.radical();
    for a in s.rigid_elements() {
        ensure(r.dim() <= 1, || format!("rigid {a} but dim R = {}", r.dim()))?;
        let branches = rigid_branches(s, &a);
        ensure(branches.len() == 1, || {
            format!("rigid {a} satisfies {} trichotomy branches ({branches:?})", branches.len())
        })?;
        if s.n() >= 2 && s.is_birigid(&a).unwrap() {
            ensure(r.is_zero(), || format!("birigid {a} but R = {}", show(&r)))?;
        }
    }
    Ok(())
}

/// The free split of `E`: rank, trivial radical of `H`, reassembly and the index law.
pub fn check_decomposition(expr: &Expr, s: &SquareClassStructure) -> std::result::Result<(), String> {
    let nf = decompose(expr).map_err(|e| e.to_string())?;
    let r = s.radical();
    ensure(nf.free_rank == r.dim(), || {
        format!("free rank {} but R = {}", nf.free_rank, show(&r))
    })?;
    let h_dim = match &nf.h {
        None => 0,
        Some(h) => {
            let sh = synthesize(h).map_err(|e| e.to_string())?;
            ensure(sh.radical().is_zero(), || format!("H = {h} has radical {}", show(&sh.radical())))?;
            sh.n()
        }
    };
    ensure(h_dim == s.n() - nf.free_rank, || {
        format!("dim V(H) = {h_dim} but dim V - free rank = {}", s.n() - nf.free_rank)
    })?;
    let back = synthesize(&nf.reassemble()).map_err(|e| e.to_string())?;
    match isomorphic(s, &back) {
        Ok(Some(_)) => Ok(()),
        Ok(None) => Err(format!("{} is not isomorphic to the input", nf.reassemble())),
        Err(err) => Err(err.to_string()),
    }
}

/// Structure, rigidity and decomposition checks, then for every `a ≠ 0`
/// the extension and radical Hilbert 90 checks.
pub fn run_suite(expr: &Expr) -> Result<Report> {
    expr.validate()?;
    if expr.d() > SUITE_MAX_DIM {
        return Err(Error::DimensionCap {
            dim: expr.d(),
            cap: SUITE_MAX_DIM,
        });
    }
    let start = Instant::now();
    let s = synthesize(expr)?;
    let mut report = Report::new(expr, None);
    report.record("structure", check_structure(&s));
    report.record("rigidity", check_rigidity(&s));
    report.record("decomposition", check_decomposition(expr, &s));
    let per_a: Vec<Result<[Check; 2]>> = BitVec::all(s.n())
        .skip(1)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|a| {
            let q = extend(expr, &a)?;
            Ok([
                check_extension(&q).summarize(format!("extension[a={a}]")),
                check_h90(&q).summarize(format!("h90[a={a}]")),
            ])
        })
        .collect();
    for checks in per_a {
        report.checks.extend(checks?);
    }
    report.timing_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}
