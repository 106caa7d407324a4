#![allow(dead_code)]

use quasispec_core::rootfinder::Annulus;
use quasispec_core::{Complex64, Functional, OperatorModel, RankOnePerturbation, RankOneProblem, Vector};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn problem(op: OperatorModel, e_star: Functional, f: Vector) -> RankOneProblem {
    RankOneProblem::new(op, RankOnePerturbation::new(e_star, f).unwrap()).unwrap()
}

fn ones(dim: usize) -> Functional {
    Functional::new(vec![c(1.0, 0.0); dim]).unwrap()
}

/// `T eₙ = eₙ₊₁/n`, `e*(x) = Σ xₙ/n`, `f = e₁`: `g(z) = exp(1/z) − 1`.
pub fn example(dim: usize) -> RankOneProblem {
    problem(
        OperatorModel::one_over_n_shift(dim).unwrap(),
        Functional::one_over_n(dim),
        Vector::basis(dim, 0),
    )
}

/// Same shift, `e* = e₃*`: `g(z) = 1/(2z³)`.
pub fn pole_k2(dim: usize) -> RankOneProblem {
    problem(
        OperatorModel::one_over_n_shift(dim).unwrap(),
        Functional::coordinate(dim, 2),
        Vector::basis(dim, 0),
    )
}

/// Same shift, `e* = e₁*`, `f = e₂`: `g ≡ 0`.
pub fn all_zero(dim: usize) -> RankOneProblem {
    problem(
        OperatorModel::one_over_n_shift(dim).unwrap(),
        Functional::coordinate(dim, 0),
        Vector::basis(dim, 1),
    )
}

pub fn volterra(dim: usize) -> RankOneProblem {
    problem(OperatorModel::volterra(dim).unwrap(), ones(dim), Vector::basis(dim, 0))
}

pub fn dense(dim: usize) -> RankOneProblem {
    problem(
        OperatorModel::seeded_dense(dim, 7).unwrap(),
        ones(dim),
        Vector::basis(dim, 0),
    )
}

pub struct Case {
    pub name: &'static str,
    pub problem: RankOneProblem,
    pub annulus: Annulus,
    pub alphas: Vec<Complex64>,
}

/// The five reference problems with their search regions and α grids.
pub fn cases() -> Vec<Case> {
    let a = |lo, hi| Annulus::new(lo, hi).unwrap();
    let reals = |v: &[f64]| v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>();
    vec![
        Case {
            name: "example",
            problem: example(400),
            annulus: a(0.05, 2.0),
            alphas: reals(&[-1.0, 1.0, 2.0]),
        },
        Case {
            name: "pole_k2",
            problem: pole_k2(400),
            annulus: a(0.5, 1.5),
            alphas: vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)],
        },
        Case {
            name: "all_zero",
            problem: all_zero(400),
            annulus: a(0.05, 2.0),
            alphas: vec![c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)],
        },
        Case {
            name: "volterra",
            problem: volterra(200),
            annulus: a(0.3, 3.0),
            alphas: vec![c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)],
        },
        Case {
            name: "dense",
            problem: dense(200),
            annulus: a(0.2, 3.0),
            alphas: vec![c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0)],
        },
    ]
}
