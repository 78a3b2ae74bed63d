use std::fmt;
use std::str::FromStr;

use crate::basis::{self, CoefficientVector, NodalValue};
use crate::numerics::{gauss_legendre_rule, QuadratureRule};
use crate::subdomain::SubdomainOptions;
use crate::{galerkin, subdomain, BvProblem, GradedMesh, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Galerkin,
    Subdomain,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Galerkin, Method::Subdomain];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::Subdomain => "subdomain",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "galerkin" => Ok(Method::Galerkin),
            "subdomain" => Ok(Method::Subdomain),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Gauss-Legendre points per element.
    pub quadrature_order: usize,
    pub subdomain: SubdomainOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quadrature_order: 8,
            subdomain: SubdomainOptions::default(),
        }
    }
}

impl SolverOptions {
    pub fn rule(&self) -> Result<QuadratureRule> {
        gauss_legendre_rule(self.quadrature_order)
    }
}

/// Spline coefficients of a discrete solution and its knot values.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub mesh: GradedMesh,
    pub coefficients: CoefficientVector,
    pub method: Method,
    pub knot_values: Vec<f64>,
}

impl Solution {
    pub fn new(mesh: GradedMesh, coefficients: CoefficientVector, method: Method) -> Result<Self> {
        let knot_values = basis::knot_values(&mesh, &coefficients)?;
        Ok(Self {
            mesh,
            coefficients,
            method,
            knot_values,
        })
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        basis::evaluate(&self.mesh, &self.coefficients, x)
    }

    pub fn nodal_values(&self) -> Result<Vec<NodalValue>> {
        basis::nodal_values(&self.mesh, &self.coefficients)
    }
}

/// Solve `problem` on `mesh` with the chosen discretization.
pub fn solve(
    problem: &BvProblem,
    mesh: &GradedMesh,
    method: Method,
    options: &SolverOptions,
) -> Result<Solution> {
    let rule = options.rule()?;
    match method {
        Method::Galerkin => galerkin::solve_galerkin(problem, mesh, &rule),
        Method::Subdomain => subdomain::solve_subdomain(problem, mesh, &rule, &options.subdomain),
    }
}
