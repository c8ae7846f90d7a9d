//! Integral binary quadratic forms of square discriminant, the modular-group
//! action on them, genus characters, and the geometry of the associated
//! geodesics.
//!
//! A form Q = [a, b, c] stands for ax² + bxy + cy² with discriminant
//! D = b² − 4ac. For a fundamental discriminant d, the forms of discriminant
//! d² fall into exactly |d| classes under Γ = PSL₂(ℤ), with the columns
//! {[c, |d|, 0]} and {[0, |d|, c]} (0 ≤ c < |d|) each forming a complete set
//! of representatives. The genus character χ_d assigns (d/n) to any class
//! representing an n coprime to d, and 0 to imprimitive classes; it is the
//! weight attached to each closed geodesic in the cycle sums downstream.

use crate::arithmetic::{kronecker, Discriminant};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadFormError {
    #[error("the zero form is not a quadratic form")]
    ZeroForm,
    #[error("matrix has determinant {0}, expected 1")]
    NonUnimodular(i64),
    #[error("geodesic data needs positive discriminant, got {0}")]
    NonPositiveDiscriminant(i64),
    #[error("form discriminant {form_disc} is not d·d' with d = {d} and d' ≡ 0,1 (mod 4)")]
    IncompatibleDiscriminant { form_disc: i64, d: i64 },
    #[error("no represented value coprime to {d} inside the search box for {form}")]
    SearchExhausted { d: i64, form: QuadraticForm },
}

/// Integral binary quadratic form [a, b, c] = ax² + bxy + cy².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm {
    a: i64,
    b: i64,
    c: i64,
}

impl QuadraticForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, QuadFormError> {
        if a == 0 && b == 0 && c == 0 {
            return Err(QuadFormError::ZeroForm);
        }
        Ok(QuadraticForm { a, b, c })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// b² − 4ac.
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Value ax² + bxy + cy².
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// The form −Q = [−a, −b, −c].
    pub fn negate(&self) -> QuadraticForm {
        QuadraticForm {
            a: -self.a,
            b: -self.b,
            c: -self.c,
        }
    }
}

impl std::fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// An element of Γ: an integer matrix [[a, b], [c, d]] with determinant 1,
/// acting as the Möbius map z ↦ (az + b)/(cz + d). The −I quotient is left
/// implicit; every consumer here is invariant under negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GammaElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GammaElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, QuadFormError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(QuadFormError::NonUnimodular(det));
        }
        Ok(GammaElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        GammaElement { a: 1, b: 0, c: 0, d: 1 }
    }

    /// Translation z ↦ z + 1.
    pub fn translation() -> Self {
        GammaElement { a: 1, b: 1, c: 0, d: 1 }
    }

    /// Inversion z ↦ −1/z.
    pub fn inversion() -> Self {
        GammaElement { a: 0, b: -1, c: 1, d: 0 }
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn inverse(&self) -> Self {
        GammaElement {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn mul(&self, rhs: &GammaElement) -> Self {
        GammaElement {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    /// Möbius action (az + b)/(cz + d) on the upper half plane.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let num = self.a as f64 * z + self.b as f64;
        let den = self.c as f64 * z + self.d as f64;
        num / den
    }

    /// The automorphy factor cz + d.
    pub fn denominator(&self, z: Complex64) -> Complex64 {
        self.c as f64 * z + self.d as f64
    }
}

/// The action (g · Q)(x, y) = Q(g^{−1}(x, y)): discriminant-preserving right
/// action turned into a left one via the inverse.
pub fn act(g: &GammaElement, q: &QuadraticForm) -> QuadraticForm {
    // g^{-1} = [[d, -b], [-c, a]] substitutes (x, y) -> (dx - by, -cx + ay)
    let (al, be, ga, de) = g.entries();
    let (a, b, c) = (q.a, q.b, q.c);
    QuadraticForm {
        a: a * de * de - b * ga * de + c * ga * ga,
        b: -2 * a * be * de + b * (al * de + be * ga) - 2 * c * al * ga,
        c: a * be * be - b * al * be + c * al * al,
    }
}

/// Which Lemma-2.1 column of representatives of Γ\Q_{d²} to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentativeFlavor {
    /// {[c, |d|, 0] : 0 ≤ c < |d|}
    Left,
    /// {[0, |d|, c] : 0 ≤ c < |d|}
    Right,
}

/// The |d| representatives of the Γ-classes of forms of discriminant d².
pub fn square_disc_representatives(
    d: Discriminant,
    flavor: RepresentativeFlavor,
) -> Vec<QuadraticForm> {
    let ad = d.abs() as i64;
    (0..ad)
        .map(|c| match flavor {
            RepresentativeFlavor::Left => QuadraticForm { a: c, b: ad, c: 0 },
            RepresentativeFlavor::Right => QuadraticForm { a: 0, b: ad, c },
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Genus character χ_d(Q) ∈ {−1, 0, 1} for a form whose discriminant is d·d'
/// with d' itself a discriminant.
///
/// Zero when gcd(a, b, c, d) > 1; otherwise (d/n) for a represented value n
/// coprime to d, found by scanning (x, y) in square rings of growing radius
/// up to 2d². Any represented coprime value yields the same symbol, so the
/// scan order only fixes determinism, not the result.
pub fn genus_character(d: Discriminant, q: &QuadraticForm) -> Result<i32, QuadFormError> {
    let dv = d.value();
    let disc = q.discriminant();
    if disc % dv != 0 || !matches!((disc / dv).rem_euclid(4), 0 | 1) {
        return Err(QuadFormError::IncompatibleDiscriminant {
            form_disc: disc,
            d: dv,
        });
    }
    if gcd(gcd(q.a, q.b), gcd(q.c, dv)) > 1 {
        return Ok(0);
    }
    let bound = 2 * dv * dv;
    for ring in 0..=bound {
        let mut best: Option<i64> = None;
        let mut consider = |x: i64, y: i64| {
            let n = q.eval(x, y);
            if n != 0 && gcd(n, dv) == 1 && best.map_or(true, |m| n.abs() < m.abs()) {
                best = Some(n);
            }
        };
        if ring == 0 {
            consider(0, 0);
        } else {
            for t in -ring..=ring {
                consider(t, ring);
                consider(t, -ring);
                consider(ring, t);
                consider(-ring, t);
            }
        }
        if let Some(n) = best {
            return Ok(kronecker(dv, n));
        }
    }
    Err(QuadFormError::SearchExhausted { d: dv, form: *q })
}

/// Endpoint of a geodesic on the boundary of the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// Traversal sense of the geodesic S_Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// a > 0: semicircle traversed clockwise
    Clockwise,
    /// a < 0: semicircle traversed counterclockwise
    Counterclockwise,
    /// a = 0: vertical line traversed downward
    Downward,
}

/// The geodesic attached to a form of positive discriminant: its boundary
/// endpoints, traversal sense, and (for semicircles) the apex
/// −b/(2a) + i·√D/(2|a|), the highest point of the arc.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicData {
    pub endpoints: [BoundaryPoint; 2],
    pub orientation: Orientation,
    pub apex: Option<Complex64>,
}

pub fn geodesic(q: &QuadraticForm) -> Result<GeodesicData, QuadFormError> {
    let disc = q.discriminant();
    if disc <= 0 {
        return Err(QuadFormError::NonPositiveDiscriminant(disc));
    }
    let sqrt_d = (disc as f64).sqrt();
    if q.a == 0 {
        // bx + c = 0: vertical line at −c/b, running down from the cusp
        Ok(GeodesicData {
            endpoints: [
                BoundaryPoint::Infinity,
                BoundaryPoint::Finite(-(q.c as f64) / q.b as f64),
            ],
            orientation: Orientation::Downward,
            apex: None,
        })
    } else {
        let a2 = 2.0 * q.a as f64;
        let root_minus = (-(q.b as f64) - sqrt_d) / a2;
        let root_plus = (-(q.b as f64) + sqrt_d) / a2;
        Ok(GeodesicData {
            endpoints: [
                BoundaryPoint::Finite(root_minus),
                BoundaryPoint::Finite(root_plus),
            ],
            orientation: if q.a > 0 {
                Orientation::Clockwise
            } else {
                Orientation::Counterclockwise
            },
            apex: Some(Complex64::new(
                -(q.b as f64) / a2,
                sqrt_d / (2.0 * q.a.abs() as f64),
            )),
        })
    }
}
