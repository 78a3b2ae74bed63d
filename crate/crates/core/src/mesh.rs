//! Geometrically graded partitions of an interval.
//!
//! Element widths form a geometric progression `h[m] = σ h[m-1]`. A ratio
//! below one clusters elements towards the right end, above one towards the
//! left end, and `σ = 1` gives a uniform mesh.

use crate::{Error, Result};

/// Ratios this close to one are treated as the uniform mesh.
const UNIFORM_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    a: f64,
    b: f64,
    ratio: f64,
    first_width: f64,
    knots: Vec<f64>,
    widths: Vec<f64>,
}

impl GradedMesh {
    /// Partition `[a, b]` into `elements` pieces whose widths grow by `ratio`.
    pub fn new(a: f64, b: f64, elements: usize, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::InvalidRatio(ratio));
        }
        if elements < 2 {
            return Err(Error::TooFewElements(elements));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidInterval { a, b });
        }

        let length = b - a;
        let first_width = if (ratio - 1.0).abs() <= UNIFORM_THRESHOLD {
            length / elements as f64
        } else {
            // (b - a)(σ - 1)/(σ^N - 1); expm1 avoids cancellation when σ^N is
            // near one, powi keeps the exponent error small otherwise
            let exponent = elements as f64 * (ratio - 1.0).ln_1p();
            let growth = if exponent.abs() < 1.0 {
                exponent.exp_m1()
            } else {
                ratio.powi(elements as i32) - 1.0
            };
            length * (ratio - 1.0) / growth
        };
        if !(first_width.is_finite() && first_width > 0.0) {
            return Err(Error::InvalidRatio(ratio));
        }

        let widths: Vec<f64> = (0..elements)
            .map(|m| first_width * ratio.powi(m as i32))
            .collect();
        if widths.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidRatio(ratio));
        }

        // compensated running sum, so every knot difference reproduces its
        // width to within one rounding of the knot
        let mut knots = Vec::with_capacity(elements + 1);
        knots.push(a);
        let (mut sum, mut carry) = (a, 0.0);
        for &w in &widths[..elements - 1] {
            let t = sum + w;
            carry += if sum.abs() >= w.abs() { (sum - t) + w } else { (w - t) + sum };
            sum = t;
            knots.push(sum + carry);
        }
        knots.push(b);
        if knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::UnresolvableMesh { ratio, elements });
        }

        Ok(Self {
            a,
            b,
            ratio,
            first_width,
            knots,
            widths,
        })
    }

    /// Uniform mesh on `[a, b]`.
    pub fn uniform(a: f64, b: f64, elements: usize) -> Result<Self> {
        Self::new(a, b, elements, 1.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn first_width(&self) -> f64 {
        self.first_width
    }

    /// Number of elements `N`.
    pub fn element_count(&self) -> usize {
        self.widths.len()
    }

    /// The `N + 1` knots `x_0 = a < x_1 < ... < x_N = b`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn knot(&self, m: usize) -> f64 {
        self.knots[m]
    }

    pub fn width(&self, m: usize) -> f64 {
        self.widths[m]
    }

    /// Index of the element containing `x`.
    ///
    /// A point on an interior knot belongs to the element it starts; `x = b`
    /// belongs to the last element.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutsideDomain {
                x,
                a: self.a,
                b: self.b,
            });
        }
        let above = self.knots.partition_point(|&k| k <= x);
        Ok(above.saturating_sub(1).min(self.element_count() - 1))
    }
}
